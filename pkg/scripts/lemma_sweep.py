"""Sweep random 4-planes: associative content c and psi0 value, and report max |c^2 + psi0^2 - 1|."""
import argparse

import numpy as np

from g2calib.calibration import calibration_value, make_plane, max_associative_content
from g2calib.g2_algebra import PSI0, random_orthonormal_frames


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=200)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    rng = np.random.default_rng(args.seed)
    frames = random_orthonormal_frames(rng, args.samples, 4)
    worst = 0.0
    smallest_psi = np.inf
    for frame in frames:
        F = make_plane(frame)
        c = max_associative_content(F).value
        psi = calibration_value(PSI0, F)
        worst = max(worst, abs(c * c + psi * psi - 1))
        smallest_psi = min(smallest_psi, abs(psi))
    print(f"samples {args.samples}  max |c^2 + psi^2 - 1| = {worst:.2e}  min |psi| = {smallest_psi:.3e}")


if __name__ == "__main__":
    main()

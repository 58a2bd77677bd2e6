"""Chern numbers and largest plaquette phase of the oracle bundles across icosphere levels."""
import argparse
import math
import time

from g2calib import chern
from g2calib.errors import ResolutionError
from g2calib.surfaces import icosphere

BUNDLES = {
    "constant": chern.constant_bundle,
    "tautological": chern.tautological_bundle,
    "tangent": chern.tangent_bundle,
    "nu_X": chern.boundary_normal_bundle,
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-level", type=int, default=5)
    ap.add_argument("--power", type=int, default=12, help="also sweep O(power)")
    args = ap.parse_args()
    makers = dict(BUNDLES)
    makers[f"O({args.power})"] = lambda m: chern.line_bundle_O(m, args.power)
    print(f"{'bundle':<14}{'level':>6}{'c1':>6}{'max phase/pi':>14}{'seconds':>10}")
    for name, make in makers.items():
        for level in range(0, args.max_level + 1):
            mesh = icosphere(level)
            t0 = time.perf_counter()
            try:
                res = chern.chern_result(make(mesh))
                c1, phase = str(res.value), f"{res.max_plaquette_phase / math.pi:.4f}"
            except ResolutionError:
                c1, phase = "-", "> 0.5"
            print(f"{name:<14}{level:>6}{c1:>6}{phase:>14}{time.perf_counter() - t0:>10.3f}")


if __name__ == "__main__":
    main()

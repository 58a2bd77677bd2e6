"""Oriented 3- and 4-planes in R^7 and their G2 calibration classification.

Tolerances refer to the calibration defect ``1 - |value|``.  Because
``phi0(E)^2 + |chi0(E)|^2 = 1`` for every oriented orthonormal 3-frame and
``psi0(F)^2 + |phi0|_F|^2 = 1`` for every 4-frame, the complementary test of
each predicate is run against the matching squared bound
``1 - (1 - tol)^2``; the two routes are required to agree.
"""
from __future__ import annotations

import itertools
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.optimize

from .errors import DegenerateInputError, DegreeError, InvariantViolation
from .g2_algebra import DIM, PHI0, PSI0, KForm, chi_eval

RANK_TOL = 1e-9
DEFAULT_TOL = 1e-9
SEARCH_TOL = 1e-6
# slack for the two routes of a predicate landing on opposite sides of the threshold
_AGREE_SLACK = 1e-12


def worker_count() -> int:
    """Thread cap from ``G2CALIB_THREADS`` (defaults to the CPU count)."""
    raw = os.environ.get("G2CALIB_THREADS")
    if raw:
        return max(1, int(raw))
    return os.cpu_count() or 1


@dataclass(frozen=True, eq=False)
class OrientedPlane:
    """Oriented k-plane (k = 3 or 4) given by an orthonormal frame, shape (k, 7)."""

    frame: np.ndarray

    def __post_init__(self):
        frame = np.array(self.frame, dtype=float)
        if frame.ndim != 2 or frame.shape[1] != DIM:
            raise ValueError(f"frame must have shape (k, 7), got {frame.shape}")
        frame.setflags(write=False)
        object.__setattr__(self, "frame", frame)

    @property
    def dim(self) -> int:
        return self.frame.shape[0]

    @property
    def vectors(self) -> list[np.ndarray]:
        return list(self.frame)

    def swapped(self, i: int = 0, j: int = 1) -> "OrientedPlane":
        """Same subspace with the opposite orientation."""
        frame = self.frame.copy()
        frame[[i, j]] = frame[[j, i]]
        return OrientedPlane(frame)

    def projector(self) -> np.ndarray:
        return self.frame.T @ self.frame

    def contains(self, v, tol: float = 1e-9) -> bool:
        v = np.asarray(v, dtype=float)
        return bool(np.linalg.norm(v - self.projector() @ v) <= tol * max(1.0, np.linalg.norm(v)))

    def complement(self) -> "OrientedPlane":
        """Orthogonal complement, oriented so that (self, complement) is positive."""
        _, _, vt = np.linalg.svd(self.frame)
        comp = vt[self.dim :]
        if np.linalg.det(np.vstack([self.frame, comp])) < 0:
            comp[0] = -comp[0]
        return OrientedPlane(comp)

    def same_oriented_subspace(self, other: "OrientedPlane", tol: float = 1e-9) -> bool:
        if other.dim != self.dim:
            return False
        overlap = self.frame @ other.frame.T
        return bool(abs(np.linalg.det(overlap) - 1.0) <= tol)

    def to_json(self) -> dict:
        return {"dim": self.dim, "vectors": self.frame.tolist()}

    @classmethod
    def from_json(cls, data: dict) -> "OrientedPlane":
        vectors = data["vectors"]
        if "dim" in data and data["dim"] != len(vectors):
            raise ValueError(f"dim {data['dim']} does not match {len(vectors)} vectors")
        return make_plane(vectors)


def make_plane(vectors) -> OrientedPlane:
    """Gram-Schmidt an oriented 3- or 4-plane from spanning vectors."""
    V = np.array(vectors, dtype=float)
    if V.ndim != 2 or V.shape[1] != DIM:
        raise ValueError(f"expected a list of 7-vectors, got shape {V.shape}")
    if V.shape[0] not in (3, 4):
        raise ValueError(f"planes have dimension 3 or 4, got {V.shape[0]} vectors")
    smallest = np.linalg.svd(V, compute_uv=False)[-1]
    if smallest < RANK_TOL:
        raise DegenerateInputError(f"vectors are linearly dependent (smallest singular value {smallest:.3g})")
    q, r = np.linalg.qr(V.T)
    q = q * np.sign(np.diag(r))
    return OrientedPlane(q.T)


def coordinate_plane(*indices: int) -> OrientedPlane:
    """Plane spanned by e_i for the given 1-based indices, in that order."""
    return OrientedPlane(np.eye(DIM)[[i - 1 for i in indices]])


def e_alpha(alpha: float) -> OrientedPlane:
    """The 3-plane e1 ^ e2 ^ (cos a e3 + sin a e4), with phi0 value cos a."""
    third = np.zeros(DIM)
    third[2], third[3] = np.cos(alpha), np.sin(alpha)
    return OrientedPlane(np.vstack([np.eye(DIM)[:2], third]))


def calibration_value(form: KForm, plane: OrientedPlane) -> float:
    if form.degree != plane.dim:
        raise DegreeError(f"{form.degree}-form cannot calibrate a {plane.dim}-plane")
    return float(form.evaluate(*plane.frame))


def _complementary_bound(tol: float) -> float:
    return 1.0 - (1.0 - tol) ** 2


def _agree(primary: bool, secondary: bool, value: float, threshold: float, what: str) -> None:
    if primary != secondary and abs(value - threshold) > _AGREE_SLACK:
        raise InvariantViolation(f"{what}: the two characterisations disagree (value {value!r})")


def is_associative(E: OrientedPlane, tol: float = DEFAULT_TOL) -> bool:
    if E.dim != 3:
        raise DegreeError("associativity is a property of 3-planes")
    phi = abs(calibration_value(PHI0, E))
    by_phi = phi >= 1.0 - tol
    chi = chi_eval(*E.frame)
    by_chi = float(chi @ chi) <= _complementary_bound(tol)
    _agree(by_phi, by_chi, phi, 1.0 - tol, "associativity")
    return by_phi


def subframe_phi_values(F: OrientedPlane) -> np.ndarray:
    """phi0 on the four coordinate 3-subframes of a 4-frame (omitting slot l)."""
    return np.array(
        [float(PHI0.evaluate(*F.frame[list(idx)])) for idx in itertools.combinations(range(4), 3)][::-1]
    )


def is_coassociative(F: OrientedPlane, tol: float = DEFAULT_TOL) -> bool:
    if F.dim != 4:
        raise DegreeError("coassociativity is a property of 4-planes")
    sub = subframe_phi_values(F)
    by_phi = float(sub @ sub) <= _complementary_bound(tol)
    psi = abs(calibration_value(PSI0, F))
    by_psi = psi >= 1.0 - tol
    _agree(by_psi, by_phi, psi, 1.0 - tol, "coassociativity")
    return by_phi


def is_psi_positive(F: OrientedPlane, tol: float = DEFAULT_TOL) -> bool:
    if F.dim != 4:
        raise DegreeError("psi-positivity is a property of 4-planes")
    return abs(calibration_value(PSI0, F)) > tol


# ---------------------------------------------------------------------------
# largest associative content of a 4-plane


@dataclass(frozen=True, eq=False)
class AssociativeContent:
    value: float
    plane: OrientedPlane
    grid_value: float
    resolution: int
    directions: int


@lru_cache(maxsize=4)
def direction_grid(resolution: int) -> np.ndarray:
    """Unit directions of R^4 from a resolution^4 cube lattice, one per antipodal pair."""
    axis = np.linspace(-1.0, 1.0, resolution)
    pts = np.stack(np.meshgrid(axis, axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 4)
    norms = np.linalg.norm(pts, axis=1)
    pts = pts[norms > 1e-12]
    # keep the representative whose first nonzero coordinate is positive
    first = pts[np.arange(len(pts)), np.argmax(np.abs(pts) > 1e-12, axis=1)]
    pts = pts[first > 0]
    out = pts / np.linalg.norm(pts, axis=1, keepdims=True)
    out.setflags(write=False)
    return out


def _slice_plane(F: OrientedPlane, n: np.ndarray) -> OrientedPlane:
    """n^perp inside F, oriented so that n ^ (n^perp) is F; n in frame coordinates."""
    n = n / np.linalg.norm(n)
    q, _ = np.linalg.qr(np.column_stack([n, np.eye(4)]))
    rest = q[:, 1:4].T
    if np.linalg.det(np.vstack([n, rest])) < 0:
        rest[0] = -rest[0]
    return OrientedPlane(rest @ F.frame)


def _grid_values(directions: np.ndarray, m: np.ndarray) -> np.ndarray:
    workers = min(worker_count(), 8)
    if workers == 1 or len(directions) < 200_000:
        return np.abs(directions @ m)
    chunks = np.array_split(directions, workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return np.concatenate(list(pool.map(lambda c: np.abs(c @ m), chunks)))


def max_associative_content(F: OrientedPlane, resolution: int = 32, refine: bool = True) -> AssociativeContent:
    """Largest |phi0| over the 3-planes n^perp inside F.

    A grid search over unit n in frame coordinates (antipodes identified)
    followed by a local maximisation that evaluates phi0 on the explicit
    3-plane n^perp.  F contains an associative 3-plane iff the value is 1.
    """
    if F.dim != 4:
        raise DegreeError("max_associative_content needs a 4-plane")
    if resolution < 32:
        raise ValueError("resolution must be at least 32 per axis")
    # phi0 on the unit 3-vector of n^perp is linear in n: sum_l (-1)^l n_l phi0(F minus slot l)
    signs = np.array([1.0, -1.0, 1.0, -1.0])
    m = signs * subframe_phi_values(F)
    grid = direction_grid(resolution)
    values = _grid_values(grid, m)
    best = int(np.argmax(values))
    n0 = grid[best]
    grid_value = float(values[best])

    def objective(x):
        if np.linalg.norm(x) < 1e-12:
            return 0.0
        return -abs(calibration_value(PHI0, _slice_plane(F, x)))

    n = n0
    if refine:
        res = scipy.optimize.minimize(objective, n0, method="BFGS", options={"gtol": 1e-12})
        if -res.fun >= grid_value:
            n = res.x / np.linalg.norm(res.x)
    plane = _slice_plane(F, n)
    value = calibration_value(PHI0, plane)
    if value < 0:
        plane = plane.swapped()
        value = -value
    return AssociativeContent(
        value=min(value, 1.0), plane=plane, grid_value=grid_value, resolution=resolution, directions=len(grid)
    )


def classify_plane(plane: OrientedPlane, tol: float = DEFAULT_TOL) -> dict:
    """All predicates and calibration values applicable to ``plane``."""
    if plane.dim == 3:
        value = calibration_value(PHI0, plane)
        return {
            "dim": 3,
            "phi0": value,
            "chi_norm": float(np.linalg.norm(chi_eval(*plane.frame))),
            "associative": is_associative(plane, tol),
        }
    value = calibration_value(PSI0, plane)
    content = max_associative_content(plane)
    return {
        "dim": 4,
        "psi0": value,
        "phi0_subframes": subframe_phi_values(plane).tolist(),
        "coassociative": is_coassociative(plane, tol),
        "psi_positive": is_psi_positive(plane, tol),
        "max_associative_content": content.value,
        "phi_free": content.value < 1.0 - SEARCH_TOL,
        "grid_directions": content.directions,
    }

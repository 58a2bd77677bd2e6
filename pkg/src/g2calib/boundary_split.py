"""Pointwise geometry along the boundary of an associative 3-fold.

At a boundary point we have the inward normal ``u``, an oriented orthonormal
frame ``(v, w = u x v)`` of the boundary surface, and the tangent 4-plane
``F`` of the 4-fold containing the boundary.  The normal space of the
associative splits as ``nu = nu_X + mu_X``; ``J = u x`` is a complex
structure on ``nu``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .calibration import OrientedPlane, is_associative, is_coassociative, is_psi_positive, make_plane
from .errors import InvariantViolation, PreconditionError
from .g2_algebra import DIM, cross, random_g2_element

TOL = 1e-9


def _unit(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x)


def _orthonormal_complement(vectors: np.ndarray, within: np.ndarray | None = None) -> np.ndarray:
    """Orthonormal basis of span(within) minus span(vectors), rows."""
    if within is None:
        within = np.eye(DIM)
    P = vectors.T @ vectors if len(vectors) else np.zeros((DIM, DIM))
    rest = within - within @ P
    # Gram-Schmidt keeps the first surviving direction deterministic
    out = []
    for r in rest:
        for o in out:
            r = r - (r @ o) * o
        if np.linalg.norm(r) > 1e-6:
            out.append(_unit(r))
    return np.array(out)


@dataclass(frozen=True, eq=False)
class BoundaryConfig:
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    F: OrientedPlane
    NX: np.ndarray | None = None

    def __post_init__(self):
        for name in ("u", "v", "w"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (DIM,):
                raise ValueError(f"{name} must be a 7-vector")
            object.__setattr__(self, name, arr)
        if self.NX is not None:
            nx = np.asarray(self.NX, dtype=float)
            if nx.shape != (2, DIM):
                raise ValueError("NX must be two 7-vectors")
            object.__setattr__(self, "NX", nx)

    @property
    def E(self) -> OrientedPlane:
        return OrientedPlane(np.vstack([self.u, self.v, self.w]))

    def validate(self, tol: float = TOL) -> None:
        """Raise PreconditionError unless (u, v, w) is an associative frame inside F."""
        frame = np.vstack([self.u, self.v, self.w])
        if np.abs(frame @ frame.T - np.eye(3)).max() > tol:
            raise PreconditionError("(u, v, w) is not orthonormal")
        if np.linalg.norm(cross(self.u, self.v) - self.w) > tol:
            raise PreconditionError("w differs from u x v")
        if not is_associative(self.E, tol):
            raise PreconditionError("<u, v, w> is not associative")
        for name in ("v", "w"):
            if not self.F.contains(getattr(self, name), tol):
                raise PreconditionError(f"{name} does not lie in F")

    def to_json(self) -> dict:
        out = {"u": self.u.tolist(), "v": self.v.tolist(), "w": self.w.tolist(), "F": self.F.to_json()}
        if self.NX is not None:
            out["NX"] = self.NX.tolist()
        return out

    @classmethod
    def from_json(cls, data: dict) -> "BoundaryConfig":
        return cls(
            u=data["u"],
            v=data["v"],
            w=data["w"],
            F=OrientedPlane.from_json(data["F"]),
            NX=data.get("NX"),
        )


@dataclass(frozen=True, eq=False)
class NormalSplit:
    """Frames of nu, nu_X and mu_X at one boundary point.

    ``nu_frame`` is ``nuX_frame`` followed by ``muX_frame``; ``J`` is the
    matrix of ``x -> u x x`` on nu in that frame.
    """

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray
    a: np.ndarray
    nuX_frame: np.ndarray
    muX_frame: np.ndarray
    J: np.ndarray = field(repr=False)

    @property
    def nu_frame(self) -> np.ndarray:
        return np.vstack([self.nuX_frame, self.muX_frame])

    def apply_J(self, x) -> np.ndarray:
        return cross(self.u, x)

    def residuals(self, F: OrientedPlane | None = None) -> dict[str, float]:
        """Numerical defects of every structural claim; all ~0 for coassociative F."""
        nu = self.nu_frame
        E = np.vstack([self.u, self.v, self.w])
        P_nuX = self.nuX_frame.T @ self.nuX_frame
        P_muX = self.muX_frame.T @ self.muX_frame
        J_nuX = self.apply_J(self.nuX_frame)
        J_muX = self.apply_J(self.muX_frame)
        out = {
            "nu_orthonormal": float(np.abs(nu @ nu.T - np.eye(4)).max()),
            "nu_perp_E": float(np.abs(nu @ E.T).max()),
            "J_squared": float(np.abs(self.J @ self.J + np.eye(4)).max()),
            "J_orthogonal": float(np.abs(self.J.T @ self.J - np.eye(4)).max()),
            "J_stable_nuX": float(np.abs(J_nuX - J_nuX @ P_nuX).max()),
            "J_stable_muX": float(np.abs(J_muX - J_muX @ P_muX).max()),
            "a_perp_u": float(abs(self.a @ self.u)),
        }
        if F is not None:
            out["muX_perp_TX"] = float(np.abs(self.muX_frame @ F.frame.T).max())
        return out

    def check(self, F: OrientedPlane | None = None, tol: float = TOL) -> None:
        bad = {k: v for k, v in self.residuals(F).items() if v > tol}
        if bad:
            raise InvariantViolation(f"normal split invariants fail: {bad}")

    def to_json(self) -> dict:
        return {
            "a": self.a.tolist(),
            "nuX_frame": self.nuX_frame.tolist(),
            "muX_frame": self.muX_frame.tolist(),
            "J": self.J.tolist(),
        }


def _j_matrix(u: np.ndarray, nu: np.ndarray) -> np.ndarray:
    return nu @ cross(u, nu).T


def split_coassociative(cfg: BoundaryConfig, tol: float = TOL) -> NormalSplit:
    """nu_X = <a, Ja> and mu_X = <a x v, a x w> for coassociative F."""
    cfg.validate(tol)
    if not is_coassociative(cfg.F, tol):
        raise PreconditionError("F is not coassociative")
    a = _orthonormal_complement(np.vstack([cfg.v, cfg.w]), within=cfg.F.frame)[0]
    if abs(a @ cfg.u) > tol:
        raise InvariantViolation(f"g(a, u) = {a @ cfg.u:.3g} for coassociative F")
    Ja = cross(cfg.u, a)
    nuX = np.vstack([a, Ja])
    muX = np.vstack([cross(a, cfg.v), cross(a, cfg.w)])
    split = NormalSplit(u=cfg.u, v=cfg.v, w=cfg.w, a=a, nuX_frame=nuX, muX_frame=muX, J=_j_matrix(cfg.u, np.vstack([nuX, muX])))
    split.check(cfg.F, tol)
    return split


def check_antilinear(split: NormalSplit, y, tol: float = TOL) -> bool:
    """Ja x y == a x Jy == -J(a x y) for y tangent to the boundary."""
    y = np.asarray(y, dtype=float)
    T = np.vstack([split.v, split.w])
    if np.linalg.norm(y - T.T @ (T @ y)) > tol * max(1.0, np.linalg.norm(y)):
        raise PreconditionError("y is not tangent to the boundary (outside span(v, w))")
    J = split.apply_J
    first = cross(J(split.a), y)
    second = cross(split.a, J(y))
    third = -J(cross(split.a, y))
    scale = max(1.0, np.linalg.norm(y))
    return bool(max(np.linalg.norm(first - second), np.linalg.norm(first - third)) <= tol * scale)


@dataclass(frozen=True, eq=False)
class PsiPositiveReport:
    """Quantitative content of the psi-positive boundary lemma at one point.

    ``projection_singular_values`` are those of P restricted to N_X (both
    positive iff P|N_X is an isomorphism onto nu_X); ``jb_mu_norm`` is the
    minimum over unit b in mu_X of |p_muX(Jb)|.  ``z`` holds the coordinates
    (s + it) of p_muX(Jb) in the basis {b, Jb, v x b, w x b}, rescaled so the
    Jb-coordinate is 1.
    """

    projection_singular_values: tuple[float, float]
    jb_mu_norm: float
    z: complex
    b: np.ndarray
    b_tilde: np.ndarray

    def to_json(self) -> dict:
        return {
            "projection_singular_values": list(self.projection_singular_values),
            "jb_mu_norm": self.jb_mu_norm,
            "z": [self.z.real, self.z.imag],
        }


def split_psi_positive(cfg: BoundaryConfig, NX_frame=None, tol: float = TOL) -> tuple[NormalSplit, PsiPositiveReport]:
    """Split nu for a psi-positive F: nu_X is the normal projection of N_X."""
    cfg.validate(tol)
    if not is_psi_positive(cfg.F, tol):
        raise PreconditionError("F is not psi-positive")
    T = np.vstack([cfg.v, cfg.w])
    if NX_frame is None:
        NX_frame = cfg.NX if cfg.NX is not None else _orthonormal_complement(T, within=cfg.F.frame)
    NX = np.asarray(NX_frame, dtype=float)
    for n in NX:
        if not cfg.F.contains(n, tol) or np.abs(T @ n).max() > tol * max(1.0, np.linalg.norm(n)):
            raise PreconditionError("NX must span the orthogonal complement of <v, w> in F")
    if np.linalg.svd(NX, compute_uv=False)[-1] < tol:
        raise PreconditionError("NX vectors are linearly dependent")
    NX = _orthonormal_complement(np.zeros((0, DIM)), within=NX)

    E = np.vstack([cfg.u, cfg.v, cfg.w])
    P = np.eye(DIM) - E.T @ E
    projected = NX @ P
    sv = np.linalg.svd(projected, compute_uv=False)
    if sv[-1] <= tol:
        raise InvariantViolation(f"P restricted to N_X has rank < 2 (singular values {sv})")
    nuX = _orthonormal_complement(np.zeros((0, DIM)), within=projected)
    nu = _orthonormal_complement(E)
    muX = _orthonormal_complement(nuX, within=nu)
    split = NormalSplit(
        u=cfg.u, v=cfg.v, w=cfg.w, a=nuX[0], nuX_frame=nuX, muX_frame=muX,
        J=_j_matrix(cfg.u, np.vstack([nuX, muX])),
    )

    P_mu = muX.T @ muX
    # p_mu o J on mu_X is skew, so |p_mu(Jb)| is constant on the unit circle of mu_X
    block = muX @ cross(cfg.u, muX).T
    jb_norm = float(np.linalg.svd(block, compute_uv=False)[-1])
    if jb_norm <= tol:
        raise InvariantViolation("J maps a vector of mu_X into nu_X")

    b = P_mu @ (-cross(cfg.v, split.a))
    if np.linalg.norm(b) <= tol:
        b = muX[0]
    b = _unit(b)
    Jb = cross(cfg.u, b)
    b_tilde = P_mu @ Jb
    coords = np.array([b_tilde @ b, b_tilde @ Jb, b_tilde @ cross(cfg.v, b), b_tilde @ cross(cfg.w, b)])
    z = complex(coords[2], coords[3]) / coords[1]
    report = PsiPositiveReport(
        projection_singular_values=(float(sv[0]), float(sv[1])),
        jb_mu_norm=jb_norm,
        z=z,
        b=b,
        b_tilde=b_tilde,
    )
    return split, report


# ---------------------------------------------------------------------------
# sampling


def standard_config() -> BoundaryConfig:
    """u = e1, v = e2, w = e3 inside the coassociative <e2, e3, e4, e5>."""
    e = np.eye(DIM)
    return BoundaryConfig(u=e[0], v=e[1], w=e[2], F=make_plane([e[1], e[2], e[3], e[4]]))


def random_coassociative_config(rng: np.random.Generator) -> BoundaryConfig:
    """Random associative E (a G2 image of <e1, e2, e3>), random frame in E, random
    coassociative F = <v, w, a0, u x a0> through the boundary tangent plane."""
    g = random_g2_element(rng)
    E = g[:, :3].T
    c = rng.normal(size=(2, 3))
    u = _unit(c[0] @ E)
    v = c[1] @ E
    v = _unit(v - (v @ u) * u)
    w = cross(u, v)
    nu = _orthonormal_complement(E)
    a0 = _unit(rng.normal(size=4) @ nu)
    F = make_plane([v, w, a0, cross(u, a0)])
    return BoundaryConfig(u=u, v=v, w=w, F=F)


def perturbed_psi_positive_config(cfg: BoundaryConfig, rng: np.random.Generator, size: float = 1e-2) -> BoundaryConfig:
    """Tilt the N_X directions of a coassociative config by ``size``; F stays through <v, w>."""
    T = np.vstack([cfg.v, cfg.w])
    NX = _orthonormal_complement(T, within=cfg.F.frame)
    tilted = NX + size * rng.normal(size=NX.shape)
    tilted = tilted - tilted @ T.T @ T
    F = make_plane([cfg.v, cfg.w, tilted[0], tilted[1]])
    return BoundaryConfig(u=cfg.u, v=cfg.v, w=cfg.w, F=F)

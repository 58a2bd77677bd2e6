"""Principal symbols of the boundary problem for the associative deformation
operator, their ellipticity checks, and the closed-form index.

All 4x4 matrices act on the complexified normal space in the ordered basis
``{alpha, beta, alpha_bar, beta_bar}`` where ``alpha = a - iJa`` and
``beta = -v x alpha_bar``; the boundary symbols land in ``mu_X^C`` with
basis ``{beta, beta_bar}``.  Matrices act on coordinate columns.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .boundary_split import NormalSplit
from .errors import DegenerateInputError, InvariantViolation, PreconditionError
from .g2_algebra import cross

NU_BASIS = ("alpha", "beta", "alpha_bar", "beta_bar")
MU_BASIS = ("beta", "beta_bar")
SPLUS_BASIS = ("alpha", "beta")
MIN_GRID = 90
RANK_TOL = 1e-9
UNIT_TOL = 1e-12
_EXACT_ENTRIES = np.array([0, 1, -1, 1j, -1j])


@dataclass(frozen=True, eq=False)
class SymbolMatrix:
    entries: np.ndarray
    domain: tuple[str, ...] = NU_BASIS
    codomain: tuple[str, ...] = NU_BASIS

    def __post_init__(self):
        m = np.array(self.entries, dtype=complex)
        if m.shape != (len(self.codomain), len(self.domain)):
            raise ValueError(f"shape {m.shape} does not fit {self.codomain} <- {self.domain}")
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def __matmul__(self, other: "SymbolMatrix") -> "SymbolMatrix":
        if self.domain != other.codomain:
            raise ValueError(f"cannot compose {self.domain} with {other.codomain}")
        return SymbolMatrix(self.entries @ other.entries, other.domain, self.codomain)

    def equals(self, other, tol: float = 0.0) -> bool:
        other_entries = other.entries if isinstance(other, SymbolMatrix) else np.asarray(other, dtype=complex)
        if isinstance(other, SymbolMatrix) and (other.domain, other.codomain) != (self.domain, self.codomain):
            return False
        return bool(np.abs(self.entries - other_entries).max() <= tol)

    def singular_values(self) -> np.ndarray:
        return np.linalg.svd(self.entries, compute_uv=False)

    def to_json(self) -> dict:
        return {
            "domain": list(self.domain),
            "codomain": list(self.codomain),
            "entries": [[[z.real, z.imag] for z in row] for row in self.entries],
        }


def _blocks(upper_right, lower_left) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    out[:2, 2:] = upper_right
    out[2:, :2] = lower_left
    return out


V_CROSS = SymbolMatrix(_blocks([[0, 1], [-1, 0]], [[0, 1], [-1, 0]]))
W_CROSS = SymbolMatrix(_blocks([[0, -1j], [1j, 0]], [[0, 1j], [-1j, 0]]))
B_SYMBOL = SymbolMatrix([[0, 1, 0, 0], [0, 0, 0, 1]], NU_BASIS, MU_BASIS)
P_PLUS_SYMBOL = SymbolMatrix([[1, 0, 0, 0], [0, 1, 0, 0]], NU_BASIS, SPLUS_BASIS)
# inclusion of S^+ = span(alpha, beta) into nu^C
S_PLUS_INCLUSION = SymbolMatrix([[1, 0], [0, 1], [0, 0], [0, 0]], SPLUS_BASIS, NU_BASIS)


def complex_basis(split: NormalSplit) -> np.ndarray:
    """Columns alpha, beta, alpha_bar, beta_bar as vectors in C^7."""
    a = split.a
    alpha = a - 1j * cross(split.u, a)
    alpha_bar = alpha.conj()
    beta = -_ccross(split.v, alpha_bar)
    beta_bar = beta.conj()
    return np.column_stack([alpha, beta, alpha_bar, beta_bar])


def _ccross(x: np.ndarray, z: np.ndarray) -> np.ndarray:
    return cross(x, z.real) + 1j * cross(x, z.imag)


def _snap_exact(m: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    flat = m.reshape(-1)
    dist = np.abs(flat[:, None] - _EXACT_ENTRIES[None, :])
    nearest = np.argmin(dist, axis=1)
    worst = dist[np.arange(len(flat)), nearest].max()
    if worst > tol:
        raise InvariantViolation(f"cross matrix entry is {worst:.3g} away from {{0, +-1, +-i}}")
    return _EXACT_ENTRIES[nearest].reshape(m.shape)


def cross_matrix(x: str, split: NormalSplit) -> SymbolMatrix:
    """Matrix of ``x x`` (x = 'v' or 'w') on nu^C, computed from the frame vectors."""
    if x not in ("v", "w"):
        raise ValueError("x must be 'v' or 'w'")
    vec = split.v if x == "v" else split.w
    basis = complex_basis(split)
    image = np.column_stack([_ccross(vec, basis[:, k]) for k in range(4)])
    coords, *_ = np.linalg.lstsq(basis, image, rcond=None)
    if np.abs(basis @ coords - image).max() > 1e-9:
        raise InvariantViolation(f"{x} x does not preserve nu^C")
    return SymbolMatrix(_snap_exact(coords))


def _unit_covector(eta) -> complex:
    if isinstance(eta, complex | float | int):
        z = complex(eta)
    else:
        ev, ew = eta
        z = complex(ev, ew)
    if abs(z) == 0:
        raise DegenerateInputError("symbols are not defined at the zero covector")
    if abs(abs(z) - 1.0) > UNIT_TOL:
        raise PreconditionError(f"covector must have unit length, got |eta| = {abs(z)!r}")
    return z


def symbol_R(eta, v_cross: SymbolMatrix = V_CROSS, w_cross: SymbolMatrix = W_CROSS) -> SymbolMatrix:
    """sigma(R)(eta) = i (eta_v w x - eta_w v x) for R = w x nabla_v - v x nabla_w."""
    z = _unit_covector(eta)
    return SymbolMatrix(1j * (z.real * w_cross.entries - z.imag * v_cross.entries))


def r_blocks(eta) -> tuple[np.ndarray, np.ndarray]:
    """(r_minus, r_plus): the off-diagonal blocks of sigma(R) in closed form."""
    z = _unit_covector(eta)
    r_minus = np.array([[0, z.conjugate()], [-z.conjugate(), 0]])
    r_plus = np.array([[0, -z], [z, 0]])
    return r_minus, r_plus


def calderon_symbol(eta) -> SymbolMatrix:
    """Projector onto the +1 eigenspace of sigma(R)."""
    R = symbol_R(eta).entries
    return SymbolMatrix(0.5 * (np.eye(4) + R))


def unit_grid(resolution: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(resolution) / resolution)


@dataclass(frozen=True)
class EbcReport:
    boundary_rank: int
    min_singular_value: float
    argmin_eta: complex
    grid: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "boundary_rank": self.boundary_rank,
            "min_singular_value": self.min_singular_value,
            "argmin_eta": [self.argmin_eta.real, self.argmin_eta.imag],
            "grid": self.grid,
            "pass": self.passed,
        }


def ebc_check(resolution: int = 360, boundary: SymbolMatrix = B_SYMBOL, tol: float = RANK_TOL) -> EbcReport:
    """Symbol-level elliptic boundary condition: sigma(B) onto and sigma(B) q of rank 2 on the grid."""
    if resolution < MIN_GRID:
        raise ValueError(f"grid must have at least {MIN_GRID} angles")
    rank = int(np.sum(boundary.singular_values() > tol))
    smallest, where = np.inf, 1.0 + 0j
    for eta in unit_grid(resolution):
        sv = (boundary @ calderon_symbol(eta)).singular_values()[-1]
        if sv < smallest:
            smallest, where = float(sv), complex(eta)
    return EbcReport(
        boundary_rank=rank,
        min_singular_value=smallest,
        argmin_eta=where,
        grid=resolution,
        passed=bool(rank == boundary.entries.shape[0] and smallest > tol),
    )


def bqp_symbol(eta) -> SymbolMatrix:
    """sigma(B) q P^+ : S^+ -> mu_X^C, recomputed from its factors."""
    return B_SYMBOL @ calderon_symbol(eta) @ S_PLUS_INCLUSION


def bqp_closed_form(eta) -> SymbolMatrix:
    z = _unit_covector(eta)
    return SymbolMatrix(0.5 * np.array([[0, 1], [z, 0]]), SPLUS_BASIS, MU_BASIS)


def cauchy_riemann_symbol(eta) -> complex:
    """Symbol of (d_1 + i d_2)/2 at eta = eta_v + i eta_w."""
    return 1j * _unit_covector(eta) / 2


def boundary_symbol_psi_positive(z: complex) -> SymbolMatrix:
    z = complex(z)
    return SymbolMatrix([[0, 1, 0, 1], [z, -1j, z.conjugate(), 1j]], NU_BASIS, MU_BASIS)


def psi_positive_closed_form(z: complex, eta) -> SymbolMatrix:
    """The product worked out by hand; the lower right entry carries conj(z)."""
    z, e = complex(z), _unit_covector(eta)
    return SymbolMatrix(0.5 * np.array([[e, 1], [z + 1j * e, -1j - z.conjugate() * e]]), SPLUS_BASIS, MU_BASIS)


def psi_positive_det_formula(z: complex, eta) -> complex:
    z, e = complex(z), _unit_covector(eta)
    return (-2j * e - z - z.conjugate() * e**2) / 4


@dataclass(frozen=True)
class PsiPositiveEllipticity:
    z: complex
    grid: int
    min_abs_det: float
    det_formula_residual: float
    closed_form_residual: float
    # the same comparison against the variant with z (not conj z) in the last entry
    unconjugated_variant_residual: float
    passed: bool

    def to_json(self) -> dict:
        return {
            "z": [self.z.real, self.z.imag],
            "grid": self.grid,
            "min_abs_det": self.min_abs_det,
            "det_formula_residual": self.det_formula_residual,
            "closed_form_residual": self.closed_form_residual,
            "unconjugated_variant_residual": self.unconjugated_variant_residual,
            "pass": self.passed,
        }


def psi_positive_ellipticity(z: complex, resolution: int = 360, tol: float = 1e-12) -> PsiPositiveEllipticity:
    """Evaluate sigma(B^C) q P^+ on a unit grid and check it never degenerates."""
    if resolution < MIN_GRID:
        raise ValueError(f"grid must have at least {MIN_GRID} angles")
    z = complex(z)
    Bc = boundary_symbol_psi_positive(z).entries
    etas = unit_grid(resolution)
    R = 1j * (etas.real[:, None, None] * W_CROSS.entries - etas.imag[:, None, None] * V_CROSS.entries)
    q = 0.5 * (np.eye(4) + R)
    M = Bc @ q @ S_PLUS_INCLUSION.entries  # (grid, 2, 2)
    det = np.linalg.det(M)
    min_det = np.abs(det).min()
    det_res = np.abs(det - (-2j * etas - z - z.conjugate() * etas**2) / 4).max()
    closed = 0.5 * np.stack(
        [np.stack([etas, np.ones_like(etas)], -1), np.stack([z + 1j * etas, -1j - z.conjugate() * etas], -1)], -2
    )
    closed_res = np.abs(M - closed).max()
    variant = closed.copy()
    variant[:, 1, 1] = 0.5 * (-1j - z * etas)
    variant_res = np.abs(M - variant).max()
    return PsiPositiveEllipticity(
        z=z,
        grid=resolution,
        min_abs_det=float(min_det),
        det_formula_residual=float(det_res),
        closed_form_residual=float(closed_res),
        unconjugated_variant_residual=float(variant_res),
        passed=bool(det_res <= tol and min_det > RANK_TOL),
    )


def chirule_residual(a, b, c) -> float:
    """|(a x b) x c + a x (b x c)|, zero for orthonormal triples."""
    return float(np.linalg.norm(cross(cross(a, b), c) + cross(a, cross(b, c))))


# ---------------------------------------------------------------------------
# index


@dataclass(frozen=True)
class BoundaryComponentData:
    genus: int
    c1: int

    def __post_init__(self):
        if not isinstance(self.genus, int | np.integer) or isinstance(self.genus, bool) or self.genus < 0:
            raise ValueError(f"genus must be a nonnegative integer, got {self.genus!r}")
        if not isinstance(self.c1, int | np.integer) or isinstance(self.c1, bool):
            raise ValueError(f"c1 must be an integer, got {self.c1!r}")

    def to_json(self) -> dict:
        return {"genus": int(self.genus), "c1": int(self.c1)}

    @classmethod
    def from_json(cls, data: dict) -> "BoundaryComponentData":
        for key in ("genus", "c1"):
            if key not in data:
                raise KeyError(key)
        return cls(genus=data["genus"], c1=data["c1"])


def index_formula(components) -> int:
    """Sum over boundary components of c1 + 1 - g."""
    return int(sum(c.c1 + 1 - c.genus for c in components))


def maslov_from_index(index: int, components=None) -> int:
    """(index + 1) mod 2; only meaningful when the boundary is one 2-sphere."""
    if components is not None:
        comps = list(components)
        if len(comps) != 1 or comps[0].genus != 0:
            raise PreconditionError("the Maslov class is defined for a single 2-sphere boundary")
    return (int(index) + 1) % 2

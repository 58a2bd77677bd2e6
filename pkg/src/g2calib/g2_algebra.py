"""Octonions, the G2 forms on R^7 and a small dense exterior algebra.

Vectors of R^7 are plain numpy arrays whose last axis has length 7, so every
pointwise operation broadcasts over leading batch axes.  Arrays of dtype
``object`` holding ``int``/``Fraction`` entries go through the same code
paths and stay exact.

The octonions are ``H + eH`` with the Cayley-Dickson rule
``(a, b)(c, d) = (ac - conj(d) b, d a + b conj(c))``; coordinates are taken
over the literal basis ``(1, i, j, k, e, e*i, e*j, e*k)``.  The G2-frame is

    e1 = i, e2 = j, e3 = k, e4 = e*i, e5 = e, e6 = e*k, e7 = e*j

which is the sign-free identification under which ``<u x v, w>`` reproduces
``phi0 = e123 + e1(e45 + e67) + e2(e46 - e57) + e3(-e47 - e56)``.  The match is
re-checked on all 35 basis triples at import time.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np
import scipy.linalg

from .errors import DegreeError, InvariantViolation, NotPositiveFormError

DIM = 7

# octonion coordinate carrying e_1 .. e_7
IMAG_INDEX = (1, 2, 3, 5, 4, 7, 6)
OCTONION_LABELS = ("1", "i", "j", "k", "e", "e*i", "e*j", "e*k")

# positive triples of phi0, 1-based, with their sign
PHI0_TERMS: dict[tuple[int, ...], int] = {
    (1, 2, 3): 1,
    (1, 4, 5): 1,
    (1, 6, 7): 1,
    (2, 4, 6): 1,
    (2, 5, 7): -1,
    (3, 4, 7): -1,
    (3, 5, 6): -1,
}

PSI0_TERMS: dict[tuple[int, ...], int] = {
    (1, 2, 4, 7): -1,
    (1, 2, 5, 6): -1,
    (1, 3, 4, 6): -1,
    (1, 3, 5, 7): 1,
    (2, 3, 4, 5): 1,
    (2, 3, 6, 7): 1,
    (4, 5, 6, 7): 1,
}


# ---------------------------------------------------------------------------
# octonions


def _qmul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    a1, b1, c1, d1 = (p[..., n] for n in range(4))
    a2, b2, c2, d2 = (q[..., n] for n in range(4))
    return np.stack(
        [
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ],
        axis=-1,
    )


_QCONJ = np.array([1, -1, -1, -1])


def _as_array(x) -> np.ndarray:
    if isinstance(x, Octonion):
        return x.coeffs
    arr = np.asarray(x)
    if arr.dtype.kind in "ub":
        return arr.astype(np.int64)
    return arr


def oct_mul(p, q) -> np.ndarray:
    """Octonion product over the literal basis; broadcasts over batch axes."""
    p = _as_array(p)
    q = _as_array(q)
    # literal e*q sits at pair slot (0, conj q)
    a, b = p[..., :4], p[..., 4:] * _QCONJ
    c, d = q[..., :4], q[..., 4:] * _QCONJ
    first = _qmul(a, c) - _qmul(d * _QCONJ, b)
    second = _qmul(d, a) + _qmul(b, c * _QCONJ)
    return np.concatenate([first, second * _QCONJ], axis=-1)


def oct_conj(p) -> np.ndarray:
    p = _as_array(p)
    return p * np.array([1, -1, -1, -1, -1, -1, -1, -1])


@dataclass(frozen=True, eq=False)
class Octonion:
    """An element of O stored over ``(1, i, j, k, e, e*i, e*j, e*k)``."""

    coeffs: np.ndarray

    def __post_init__(self):
        arr = np.array(self.coeffs)
        if arr.shape != (8,):
            raise ValueError(f"octonion needs 8 coefficients, got shape {arr.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @classmethod
    def basis(cls, label: str) -> "Octonion":
        out = np.zeros(8, dtype=np.int64)
        out[OCTONION_LABELS.index(label)] = 1
        return cls(out)

    @classmethod
    def from_vector(cls, v) -> "Octonion":
        return cls(to_octonion(v))

    def __mul__(self, other):
        if isinstance(other, Octonion):
            return Octonion(oct_mul(self.coeffs, other.coeffs))
        return Octonion(self.coeffs * other)

    def __rmul__(self, scalar):
        return Octonion(self.coeffs * scalar)

    def __add__(self, other: "Octonion") -> "Octonion":
        return Octonion(self.coeffs + other.coeffs)

    def __sub__(self, other: "Octonion") -> "Octonion":
        return Octonion(self.coeffs - other.coeffs)

    def __neg__(self) -> "Octonion":
        return Octonion(-self.coeffs)

    def __eq__(self, other) -> bool:
        return isinstance(other, Octonion) and bool(np.all(self.coeffs == other.coeffs))

    def __hash__(self):
        return hash(tuple(self.coeffs.tolist()))

    def __repr__(self) -> str:
        terms = [f"{c}*{lab}" for c, lab in zip(self.coeffs.tolist(), OCTONION_LABELS) if c != 0]
        return "Octonion(" + (" + ".join(terms) or "0") + ")"

    def conj(self) -> "Octonion":
        return Octonion(oct_conj(self.coeffs))

    def norm2(self):
        return sum(c * c for c in self.coeffs.tolist())

    def norm(self) -> float:
        return math.sqrt(self.norm2())

    @property
    def real(self):
        return self.coeffs[0]

    @property
    def imag(self) -> np.ndarray:
        return from_octonion(self.coeffs)

    def allclose(self, other: "Octonion", atol: float = 1e-12) -> bool:
        return bool(np.allclose(self.coeffs.astype(float), other.coeffs.astype(float), atol=atol))


def to_octonion(v) -> np.ndarray:
    """Embed vectors of R^7 as imaginary octonions."""
    v = _as_array(v)
    out = np.zeros(v.shape[:-1] + (8,), dtype=v.dtype)
    out[..., list(IMAG_INDEX)] = v
    return out


def from_octonion(p) -> np.ndarray:
    """Imaginary part of an octonion, in G2-frame coordinates."""
    return _as_array(p)[..., list(IMAG_INDEX)]


def basis_vector(i: int, exact: bool = False) -> np.ndarray:
    """The frame vector e_i, 1-based."""
    v = np.zeros(DIM, dtype=object if exact else float)
    if exact:
        v[:] = 0
    v[i - 1] = 1
    return v


# ---------------------------------------------------------------------------
# cross product and the G2 forms


def _derive_cross_table() -> np.ndarray:
    """Structure constants T[i, j, k] = <e_i x e_j, e_k> from octonion products."""
    eye = np.eye(DIM, dtype=np.int64)
    table = np.zeros((DIM, DIM, DIM), dtype=np.int64)
    for i in range(DIM):
        for j in range(DIM):
            prod = oct_mul(oct_conj(to_octonion(eye[j])), to_octonion(eye[i]))
            table[i, j] = from_octonion(prod)
    return table


def _table_from_terms(terms: Mapping[tuple[int, ...], int]) -> np.ndarray:
    table = np.zeros((DIM,) * 3, dtype=np.int64)
    for idx, sign in terms.items():
        for perm in itertools.permutations(range(3)):
            table[tuple(idx[p] - 1 for p in perm)] = sign * _perm_sign(perm)
    return table


def _perm_sign(perm: Sequence[int]) -> int:
    sign = 1
    perm = list(perm)
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


CROSS_TABLE = _derive_cross_table()
if not np.array_equal(CROSS_TABLE, _table_from_terms(PHI0_TERMS)):
    raise InvariantViolation("octonion convention does not reproduce the standard G2 3-form")

_CROSS_ENTRIES = [
    (i, j, k, int(CROSS_TABLE[i, j, k])) for i, j, k in zip(*np.nonzero(CROSS_TABLE))
]


def cross_with_table(u, v, table: np.ndarray) -> np.ndarray:
    """Bilinear product with structure constants ``table``; used to inject faults."""
    u = _as_array(u)
    v = _as_array(v)
    shape = np.broadcast_shapes(u.shape, v.shape)
    dtype = np.result_type(u.dtype, v.dtype)
    out = np.zeros(shape, dtype=dtype)
    if dtype == object:
        out[...] = 0
    for i, j, k in zip(*np.nonzero(table)):
        out[..., k] = out[..., k] + table[i, j, k] * u[..., i] * v[..., j]
    return out


def cross(u, v) -> np.ndarray:
    """u x v = Im(conj(v) u)."""
    u = _as_array(u)
    v = _as_array(v)
    shape = np.broadcast_shapes(u.shape, v.shape)
    dtype = np.result_type(u.dtype, v.dtype)
    out = np.zeros(shape, dtype=dtype)
    if dtype == object:
        out[...] = 0
    for i, j, k, s in _CROSS_ENTRIES:
        if s > 0:
            out[..., k] = out[..., k] + u[..., i] * v[..., j]
        else:
            out[..., k] = out[..., k] - u[..., i] * v[..., j]
    return out


def dot(u, v):
    u = _as_array(u)
    v = _as_array(v)
    return (u * v).sum(axis=-1)


def phi0_eval(u, v, w):
    return dot(cross(u, v), w)


def associator(u, v, w) -> np.ndarray:
    """[u, v, w] = ((uv)w - u(vw))/2 for imaginary octonions u, v, w."""
    U, V, W = to_octonion(u), to_octonion(v), to_octonion(w)
    diff = oct_mul(oct_mul(U, V), W) - oct_mul(U, oct_mul(V, W))
    im = from_octonion(diff)
    if im.dtype == object:
        return np.vectorize(lambda x: Fraction(x) / 2, otypes=[object])(im)
    return im / 2


def chi_eval(u, v, w) -> np.ndarray:
    """chi0(u, v, w) = -u x (v x w) - <u, v> w + <u, w> v."""
    u = _as_array(u)
    v = _as_array(v)
    w = _as_array(w)
    uv = dot(u, v)[..., None]
    uw = dot(u, w)[..., None]
    return -cross(u, cross(v, w)) - uv * w + uw * v


def psi0_eval(u, v, w, x):
    """psi0(u, v, w, x) = -<u, [v, w, x]>.

    With the associator normalised by 1/2 this is the form
    ``-e12(e47 + e56) - e13(e46 - e57) + e23(e45 + e67) + e4567`` = *phi0.
    """
    return -dot(u, associator(v, w, x))


# ---------------------------------------------------------------------------
# exterior algebra


@lru_cache(maxsize=None)
def index_sets(k: int) -> tuple[tuple[int, ...], ...]:
    """Sorted 0-based index tuples of length k, in lexicographic order."""
    return tuple(itertools.combinations(range(DIM), k))


@lru_cache(maxsize=None)
def _position(k: int) -> dict[tuple[int, ...], int]:
    return {idx: n for n, idx in enumerate(index_sets(k))}


@lru_cache(maxsize=None)
def _wedge_table(k: int, l: int):
    pos = _position(k + l)
    out = []
    for a, I in enumerate(index_sets(k)):
        for b, J in enumerate(index_sets(l)):
            if set(I) & set(J):
                continue
            merged = I + J
            order = sorted(range(len(merged)), key=lambda n: merged[n])
            out.append((a, b, pos[tuple(sorted(merged))], _perm_sign(order)))
    return tuple(out)


@dataclass(frozen=True)
class KForm:
    """Alternating k-form on R^7, dense over ``index_sets(k)``."""

    degree: int
    coeffs: tuple

    def __post_init__(self):
        if not 0 <= self.degree <= DIM:
            raise DegreeError(f"degree must lie in 0..7, got {self.degree}")
        coeffs = tuple(self.coeffs)
        if len(coeffs) != math.comb(DIM, self.degree):
            raise ValueError(
                f"a {self.degree}-form needs {math.comb(DIM, self.degree)} coefficients, got {len(coeffs)}"
            )
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def zero(cls, degree: int) -> "KForm":
        return cls(degree, (0,) * math.comb(DIM, degree))

    @classmethod
    def from_terms(cls, degree: int, terms: Mapping[Sequence[int], object]) -> "KForm":
        """Build from ``{(i, j, ...): coefficient}`` with 1-based, any-order indices."""
        coeffs = [0] * math.comb(DIM, degree)
        pos = _position(degree)
        for idx, c in terms.items():
            idx0 = tuple(i - 1 for i in idx)
            if len(idx0) != degree:
                raise DegreeError(f"term {idx} does not have degree {degree}")
            if len(set(idx0)) < degree:
                continue
            order = sorted(range(degree), key=lambda n: idx0[n])
            coeffs[pos[tuple(sorted(idx0))]] += _perm_sign(order) * c
        return cls(degree, tuple(coeffs))

    @classmethod
    def basis(cls, *idx: int) -> "KForm":
        return cls.from_terms(len(idx), {idx: 1})

    def terms(self) -> dict[tuple[int, ...], object]:
        """Nonzero coefficients keyed by 1-based index tuples."""
        return {
            tuple(i + 1 for i in I): c for I, c in zip(index_sets(self.degree), self.coeffs) if c != 0
        }

    def __add__(self, other: "KForm") -> "KForm":
        if other.degree != self.degree:
            raise DegreeError("cannot add forms of different degree")
        return KForm(self.degree, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other: "KForm") -> "KForm":
        return self + (-other)

    def __neg__(self) -> "KForm":
        return KForm(self.degree, tuple(-a for a in self.coeffs))

    def __mul__(self, scalar) -> "KForm":
        return KForm(self.degree, tuple(scalar * a for a in self.coeffs))

    __rmul__ = __mul__

    def __xor__(self, other: "KForm") -> "KForm":
        return wedge(self, other)

    def is_exact(self) -> bool:
        return all(isinstance(c, (int, Fraction, np.integer)) for c in self.coeffs)

    def allclose(self, other: "KForm", atol: float = 1e-12) -> bool:
        if other.degree != self.degree:
            return False
        return bool(
            np.allclose(np.array(self.coeffs, dtype=float), np.array(other.coeffs, dtype=float), atol=atol)
        )

    def evaluate(self, *vectors):
        """Evaluate on k vectors; each may carry leading batch axes."""
        if len(vectors) != self.degree:
            raise DegreeError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        if self.degree == 0:
            return self.coeffs[0]
        vs = [_as_array(v) for v in vectors]
        if any(v.dtype == object for v in vs) or not all(
            isinstance(c, (int, float, np.integer, np.floating)) for c in self.coeffs
        ):
            return self._evaluate_exact(vs)
        V = np.stack(np.broadcast_arrays(*vs), axis=-2).astype(float)  # (..., k, 7)
        cols = np.array(index_sets(self.degree))  # (n, k)
        minors = np.moveaxis(V[..., :, cols], -3, -2)  # (..., n, k, k)
        return np.linalg.det(minors) @ np.array(self.coeffs, dtype=float)

    def _evaluate_exact(self, vs):
        total = 0
        perms = [(p, _perm_sign(p)) for p in itertools.permutations(range(self.degree))]
        for I, c in zip(index_sets(self.degree), self.coeffs):
            if c == 0:
                continue
            minor = 0
            for p, s in perms:
                term = s
                for row, col in zip(range(self.degree), p):
                    term = term * vs[row][..., I[col]]
                minor = minor + term
            total = total + c * minor
        return total


def wedge(a: KForm, b: KForm) -> KForm:
    if a.degree + b.degree > DIM:
        raise DegreeError(f"wedge of degrees {a.degree} and {b.degree} exceeds 7")
    coeffs = [0] * math.comb(DIM, a.degree + b.degree)
    for ia, ib, ic, sign in _wedge_table(a.degree, b.degree):
        ca, cb = a.coeffs[ia], b.coeffs[ib]
        if ca == 0 or cb == 0:
            continue
        coeffs[ic] = coeffs[ic] + sign * ca * cb
    return KForm(a.degree + b.degree, tuple(coeffs))


def interior(u, a: KForm) -> KForm:
    """Contraction u _| a, inserting u in the first slot."""
    if a.degree < 1:
        raise DegreeError("cannot contract a 0-form")
    u = list(_as_array(u).tolist())
    pos = _position(a.degree - 1)
    coeffs = [0] * math.comb(DIM, a.degree - 1)
    for I, c in zip(index_sets(a.degree), a.coeffs):
        if c == 0:
            continue
        for p, i in enumerate(I):
            if u[i] == 0:
                continue
            J = I[:p] + I[p + 1 :]
            term = u[i] * c
            coeffs[pos[J]] = coeffs[pos[J]] + (term if p % 2 == 0 else -term)
    return KForm(a.degree - 1, tuple(coeffs))


def pullback(a: KForm, M) -> KForm:
    """(M* a)(x_1, ..., x_k) = a(M x_1, ..., M x_k) for a 7x7 matrix M."""
    M = np.asarray(M)
    cols = [M[:, j] for j in range(DIM)]
    coeffs = []
    for J in index_sets(a.degree):
        coeffs.append(a.evaluate(*[cols[j] for j in J]) if a.degree else a.coeffs[0])
    if M.dtype != object:
        coeffs = [float(c) for c in coeffs]
    return KForm(a.degree, tuple(coeffs))


def form_inner(a: KForm, b: KForm, gram=None):
    """Pointwise inner product of forms; euclidean unless ``gram`` is given."""
    if a.degree != b.degree:
        raise DegreeError("inner product of forms of different degree")
    if gram is None:
        return sum(x * y for x, y in zip(a.coeffs, b.coeffs))
    return sum(x * y for x, y in zip(a.coeffs, _raise_indices(b, _inverse(np.asarray(gram)))))


def volume_form(scale=1) -> KForm:
    return KForm(DIM, (scale,))


PHI0 = KForm.from_terms(3, PHI0_TERMS)
PSI0 = KForm.from_terms(4, PSI0_TERMS)


# ---------------------------------------------------------------------------
# exact-or-float small linear algebra


def _is_exact_matrix(M: np.ndarray) -> bool:
    return M.dtype == object or M.dtype.kind in "iu"


def _det(M: np.ndarray):
    if not _is_exact_matrix(M):
        return float(np.linalg.det(M.astype(float)))
    A = [[Fraction(x) for x in row] for row in np.asarray(M).tolist()]
    n = len(A)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            A[col], A[piv] = A[piv], A[col]
            det = -det
        det *= A[col][col]
        for r in range(col + 1, n):
            f = A[r][col] / A[col][col]
            if f:
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return det


def _inverse(M: np.ndarray) -> np.ndarray:
    if not _is_exact_matrix(M):
        return np.linalg.inv(M.astype(float))
    n = M.shape[0]
    A = [[Fraction(x) for x in row] + [Fraction(int(r == c)) for c in range(n)] for r, row in enumerate(M.tolist())]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        A[col], A[piv] = A[piv], A[col]
        p = A[col][col]
        A[col] = [x / p for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    out = np.empty((n, n), dtype=object)
    for r in range(n):
        for c in range(n):
            out[r, c] = A[r][n + c]
    return out


def _real_root(x, n: int):
    """Real n-th root (n odd); exact for rational perfect powers."""
    if isinstance(x, (int, Fraction)):
        x = Fraction(x)
        sign = -1 if x < 0 else 1
        num, den = abs(x.numerator), x.denominator
        rn, rd = _int_root(num, n), _int_root(den, n)
        if rn is not None and rd is not None:
            return sign * Fraction(rn, rd)
        x = float(x)
    return math.copysign(abs(x) ** (1.0 / n), x)


def _int_root(m: int, n: int):
    r = round(m ** (1.0 / n))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand**n == m:
            return cand
    return None


def _raise_indices(a: KForm, ginv: np.ndarray) -> list:
    sets = index_sets(a.degree)
    if a.degree == 0:
        return list(a.coeffs)
    out = []
    for I in sets:
        total = 0
        for K, c in zip(sets, a.coeffs):
            if c == 0:
                continue
            total = total + _det(ginv[np.ix_(I, K)]) * c
        out.append(total)
    return out


# ---------------------------------------------------------------------------
# metric and Hodge star


def metric_from_three_form(phi: KForm):
    """Metric and volume scale induced by a 3-form.

    With ``B_ij`` the coefficient of ``(e_i _| phi) ^ (e_j _| phi) ^ phi`` on
    ``e^{1..7}``, returns ``gram = B / (6 vol)`` and the real ninth root
    ``vol = (det B / 6^7)^(1/9)``.  ``vol`` is negative when phi induces the
    orientation opposite to ``e^{1..7}``; the metric is unaffected.  Exact
    input with a perfect-power determinant gives exact output.
    """
    if phi.degree != 3:
        raise DegreeError("metric_from_three_form needs a 3-form")
    contractions = [interior(basis_vector(i + 1, exact=True), phi) for i in range(DIM)]
    B = np.empty((DIM, DIM), dtype=object)
    for i in range(DIM):
        for j in range(i, DIM):
            B[i, j] = B[j, i] = wedge(wedge(contractions[i], contractions[j]), phi).coeffs[0]
    exact = phi.is_exact()
    if not exact:
        B = B.astype(float)
    det_b = _det(B)
    if det_b == 0:
        raise NotPositiveFormError("degenerate 3-form: det B = 0")
    vol = _real_root(Fraction(det_b) / 6**7 if exact else det_b / 6.0**7, 9)
    if isinstance(vol, Fraction):
        gram = np.vectorize(lambda b: Fraction(b) / (6 * vol), otypes=[object])(B)
        if vol.denominator == 1:
            vol = int(vol)
    else:
        gram = np.asarray(B, dtype=float) / (6.0 * float(vol))
    if not _positive_definite(gram):
        raise NotPositiveFormError("3-form does not induce a positive definite metric")
    return gram, vol


def _positive_definite(gram: np.ndarray) -> bool:
    if gram.dtype == object:
        return all(_det(gram[:m, :m]) > 0 for m in range(1, DIM + 1))
    return bool(np.all(np.linalg.eigvalsh(gram) > 0))


def hodge_star(a: KForm, gram=None, vol=1) -> KForm:
    """Hodge dual with respect to ``gram`` and the volume form ``vol * e^{1..7}``.

    ``vol`` must equal ``±sqrt(det gram)`` for the usual identities
    (``**a = (-1)^{k(7-k)} a``) to hold; ``metric_from_three_form`` returns
    such a pair.
    """
    k = a.degree
    if gram is None:
        raised = list(a.coeffs)
    else:
        gram = np.asarray(gram)
        raised = _raise_indices(a, _inverse(gram))
    pos = _position(DIM - k)
    coeffs = [0] * math.comb(DIM, DIM - k)
    for I, c in zip(index_sets(k), raised):
        if c == 0:
            continue
        J = tuple(i for i in range(DIM) if i not in I)
        coeffs[pos[J]] = _perm_sign(I + J) * vol * c
    return KForm(DIM - k, tuple(coeffs))


# ---------------------------------------------------------------------------
# the group G2


@lru_cache(maxsize=None)
def g2_lie_algebra() -> np.ndarray:
    """Orthonormal basis (14, 7, 7) of the stabiliser of phi0 inside so(7)."""
    phi = _table_from_terms(PHI0_TERMS).astype(float)
    pairs = list(itertools.combinations(range(DIM), 2))
    gens = []
    for a, b in pairs:
        A = np.zeros((DIM, DIM))
        A[a, b], A[b, a] = -1.0, 1.0
        gens.append(A)
    # derivative of phi0 along each so(7) generator
    columns = []
    for A in gens:
        d = (
            np.einsum("ma,mbc->abc", A, phi)
            + np.einsum("mb,amc->abc", A, phi)
            + np.einsum("mc,abm->abc", A, phi)
        )
        columns.append(d.ravel())
    null = scipy.linalg.null_space(np.array(columns).T)
    if null.shape[1] != 14:
        raise InvariantViolation(f"stabiliser of phi0 has dimension {null.shape[1]}, expected 14")
    basis = np.einsum("gn,nij->gij", null.T, np.array(gens))
    return basis / np.sqrt(np.einsum("gij,gij->g", basis, basis) / 2)[:, None, None]


def random_g2_element(rng: np.random.Generator, scale: float = math.pi) -> np.ndarray:
    """A random element of G2 as exp of a random Lie algebra element."""
    coeffs = rng.normal(size=14) * scale
    return scipy.linalg.expm(np.einsum("g,gij->ij", coeffs, g2_lie_algebra()))


def random_unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.normal(size=(n, DIM))
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def random_orthonormal_frames(rng: np.random.Generator, n: int, k: int) -> np.ndarray:
    """n random orthonormal k-frames in R^7, shape (n, k, 7)."""
    q, r = np.linalg.qr(rng.normal(size=(n, DIM, k)))
    q = q * np.sign(np.diagonal(r, axis1=-2, axis2=-1))[:, None, :]
    return np.swapaxes(q, -1, -2)


def as_vectors(rows: Iterable) -> np.ndarray:
    return np.array([np.asarray(r, dtype=float) for r in rows])

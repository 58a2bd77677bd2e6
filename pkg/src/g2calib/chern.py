"""Discrete first Chern number of a sampled complex line bundle over a closed
oriented triangulated surface, by plaquette holonomy.

Overlaps are ``<s, t> = sum_k s_k conj(t_k)`` (linear in the first slot).  With
this convention the tautological line over CP^1 has degree -1 and the
holomorphic tangent line of S^2 has degree +2.

On a closed oriented complex every edge overlap meets its conjugate, so the
plaquette sum is an integer up to rounding whatever the mesh; the residual
gate only catches broken input.  Under-resolution shows up as large
per-triangle phases instead, which alias to a wrong integer, so those are
gated too.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary_split import BoundaryConfig, split_coassociative
from .calibration import make_plane
from .errors import AdmissibilityError, PreconditionError, ResolutionError, TopologyError
from .g2_algebra import DIM, cross
from .surfaces import TriangleMesh, check_closed_oriented, midpoint_subdivide

ADMISSIBILITY = 1e-6
RESIDUAL_BOUND = 0.1
MAX_PLAQUETTE_PHASE = math.pi / 2


@dataclass(frozen=True, eq=False)
class SampledLineBundle:
    """One nonzero vector of C^N per vertex spanning the fibre there."""

    triangles: np.ndarray
    lines: np.ndarray
    positions: np.ndarray | None = None
    vertex_ids: tuple | None = None

    def __post_init__(self):
        tris = np.asarray(self.triangles, dtype=int)
        lines = np.asarray(self.lines, dtype=complex)
        if lines.ndim == 1:
            lines = lines[:, None]
        if lines.ndim != 2 or lines.shape[1] < 1:
            raise ValueError("lines must be a (V, N) array of complex samples")
        norms = np.linalg.norm(lines, axis=1)
        if np.any(norms == 0):
            raise ValueError(f"line sample at vertex {int(np.argmin(norms))} is the zero vector")
        check_closed_oriented(tris, len(lines))
        object.__setattr__(self, "triangles", tris)
        object.__setattr__(self, "lines", lines)
        if self.positions is not None:
            object.__setattr__(self, "positions", np.asarray(self.positions, dtype=float))
        if self.vertex_ids is None:
            object.__setattr__(self, "vertex_ids", tuple(range(len(lines))))

    @property
    def ambient_dim(self) -> int:
        return self.lines.shape[1]

    @property
    def mesh(self) -> TriangleMesh:
        pos = self.positions if self.positions is not None else np.zeros((len(self.lines), 3))
        return TriangleMesh(pos, self.triangles)

    def unit_lines(self) -> np.ndarray:
        return self.lines / np.linalg.norm(self.lines, axis=1, keepdims=True)

    def with_lines(self, lines) -> "SampledLineBundle":
        return SampledLineBundle(self.triangles, lines, self.positions, self.vertex_ids)

    def reversed(self) -> "SampledLineBundle":
        return SampledLineBundle(self.triangles[:, ::-1].copy(), self.lines, self.positions, self.vertex_ids)

    def to_json(self) -> dict:
        return {
            "vertices": list(self.vertex_ids),
            "triangles": self.triangles.tolist(),
            "lines": [[[z.real, z.imag] for z in row] for row in self.lines],
        }

    @classmethod
    def from_json(cls, data: dict) -> "SampledLineBundle":
        for key in ("vertices", "triangles", "lines"):
            if key not in data:
                raise KeyError(key)
        ids = list(data["vertices"])
        index = {v: k for k, v in enumerate(ids)}
        if len(index) != len(ids):
            raise ValueError("vertex ids must be distinct")
        try:
            tris = [[index[v] for v in tri] for tri in data["triangles"]]
        except KeyError as exc:
            raise ValueError(f"triangle refers to unknown vertex {exc.args[0]!r}") from None
        lines = np.array(
            [[complex(re, im) for re, im in row] for row in data["lines"]], dtype=complex
        )
        if len(lines) != len(ids):
            raise ValueError(f"{len(lines)} line samples for {len(ids)} vertices")
        return cls(np.array(tris, dtype=int), lines, vertex_ids=tuple(ids))


def _overlap(s: np.ndarray, t: np.ndarray) -> np.ndarray:
    return np.sum(s * t.conj(), axis=-1)


@dataclass(frozen=True)
class ChernResult:
    value: int
    raw: float
    residual: float
    min_edge_overlap: float
    max_plaquette_phase: float

    def to_json(self) -> dict:
        return {
            "c1": self.value,
            "raw": self.raw,
            "residual": self.residual,
            "min_edge_overlap": self.min_edge_overlap,
            "max_plaquette_phase": self.max_plaquette_phase,
        }


def chern_result(
    b: SampledLineBundle,
    admissibility: float = ADMISSIBILITY,
    residual_bound: float = RESIDUAL_BOUND,
    max_phase: float = MAX_PLAQUETTE_PHASE,
) -> ChernResult:
    s = b.unit_lines()
    t = b.triangles
    edges = np.array(sorted(b.mesh.edges()))
    edge_overlap = np.abs(_overlap(s[edges[:, 0]], s[edges[:, 1]]))
    worst = int(np.argmin(edge_overlap))
    if edge_overlap[worst] <= admissibility:
        u, v = edges[worst]
        raise AdmissibilityError(
            f"samples at vertices {b.vertex_ids[u]!r}, {b.vertex_ids[v]!r} are nearly orthogonal "
            f"(|overlap| = {edge_overlap[worst]:.3g}); refine the mesh"
        )
    hol = _overlap(s[t[:, 0]], s[t[:, 1]]) * _overlap(s[t[:, 1]], s[t[:, 2]]) * _overlap(s[t[:, 2]], s[t[:, 0]])
    phases = np.angle(hol)
    raw = float(np.sum(phases) / (2 * math.pi))
    value = round(raw)
    residual = abs(raw - value)
    if residual >= residual_bound:
        raise ResolutionError(f"plaquette sum {raw:.4f} is {residual:.3f} from an integer; mesh too coarse")
    peak = int(np.argmax(np.abs(phases)))
    if abs(phases[peak]) > max_phase:
        tri = [b.vertex_ids[i] for i in t[peak]]
        raise ResolutionError(
            f"plaquette phase {abs(phases[peak]) / math.pi:.3f} pi on triangle {tri} exceeds "
            f"{max_phase / math.pi:.3f} pi; the sum may alias, refine the mesh"
        )
    return ChernResult(int(value), raw, float(residual), float(edge_overlap[worst]), float(np.abs(phases).max()))


def chern_number(
    b: SampledLineBundle,
    admissibility: float = ADMISSIBILITY,
    residual_bound: float = RESIDUAL_BOUND,
    max_phase: float = MAX_PLAQUETTE_PHASE,
) -> int:
    return chern_result(b, admissibility, residual_bound, max_phase).value


def genus_of_complex(b: SampledLineBundle | TriangleMesh) -> int:
    mesh = b.mesh if isinstance(b, SampledLineBundle) else b
    chi = mesh.euler_characteristic()
    if chi % 2:
        raise TopologyError(f"odd Euler characteristic {chi} for a closed oriented surface")
    return 1 - chi // 2


def maslov_mod2(b: SampledLineBundle) -> int:
    chi = b.mesh.euler_characteristic()
    if chi != 2:
        raise PreconditionError(f"Maslov class needs a 2-sphere (Euler characteristic {chi}, expected 2)")
    return chern_number(b) % 2


def refine(b: SampledLineBundle) -> SampledLineBundle:
    """One 1-to-4 subdivision; new samples are phase-aligned normalized midpoints."""
    mesh = b.mesh
    on_sphere = b.positions is not None and np.allclose(np.linalg.norm(b.positions, axis=1), 1.0)
    fine, parents = midpoint_subdivide(mesh, project_to_sphere=on_sphere)
    s = b.unit_lines()
    new = []
    for i, j in parents:
        if i == j:
            new.append(s[i])
            continue
        ov = _overlap(s[j], s[i])
        aligned = s[j] * (ov.conjugate() / abs(ov)) if abs(ov) > 0 else s[j]
        mid = s[i] + aligned
        new.append(mid / np.linalg.norm(mid))
    return SampledLineBundle(fine.triangles, np.array(new), fine.positions if b.positions is not None else None)


def tensor_line(b1: SampledLineBundle, b2: SampledLineBundle) -> SampledLineBundle:
    """L1 (x) L2 on the same complex, sampled in C^(N1 N2)."""
    if not np.array_equal(b1.triangles, b2.triangles):
        raise ValueError("bundles must share the triangulation")
    prod = np.einsum("vi,vj->vij", b1.lines, b2.lines).reshape(len(b1.lines), -1)
    return b1.with_lines(prod)


def determinant_line(b1: SampledLineBundle, b2: SampledLineBundle) -> SampledLineBundle:
    """Lambda^2 of L1 + L2 inside Lambda^2(C^N1 + C^N2), as antisymmetrised outer products."""
    if not np.array_equal(b1.triangles, b2.triangles):
        raise ValueError("bundles must share the triangulation")
    n1, n2 = b1.ambient_dim, b2.ambient_dim
    x = np.concatenate([b1.lines, np.zeros((len(b1.lines), n2))], axis=1)
    y = np.concatenate([np.zeros((len(b2.lines), n1)), b2.lines], axis=1)
    wedge = np.einsum("vi,vj->vij", x, y) - np.einsum("vi,vj->vij", y, x)
    iu = np.triu_indices(n1 + n2, 1)
    return b1.with_lines(wedge[:, iu[0], iu[1]])


# ---------------------------------------------------------------------------
# sample bundles over the unit sphere and other meshes


def _tautological_vector(p: np.ndarray) -> np.ndarray:
    """Fibre over p of the tautological line, via stereographic projection from the south pole."""
    x, y, z = p
    if z > -0.5:
        return np.array([1 + z, x + 1j * y])
    return np.array([x - 1j * y, 1 - z])


def _tangent_vector(p: np.ndarray) -> np.ndarray:
    axis = np.array([0.0, 0.0, 1.0]) if abs(p[2]) < 0.8 else np.array([1.0, 0.0, 0.0])
    t = axis - (axis @ p) * p
    t /= np.linalg.norm(t)
    return t - 1j * np.cross(p, t)


def constant_bundle(mesh: TriangleMesh, vector=(1.0, 0.0)) -> SampledLineBundle:
    return SampledLineBundle(mesh.triangles, np.tile(np.asarray(vector, dtype=complex), (mesh.n_vertices, 1)), mesh.positions)


def tautological_bundle(mesh: TriangleMesh) -> SampledLineBundle:
    return SampledLineBundle(mesh.triangles, np.array([_tautological_vector(p) for p in mesh.positions]), mesh.positions)


def tangent_bundle(mesh: TriangleMesh) -> SampledLineBundle:
    """T^{1,0} of the round sphere with complex structure p x (outward normal)."""
    return SampledLineBundle(mesh.triangles, np.array([_tangent_vector(p) for p in mesh.positions]), mesh.positions)


def veronese(vectors: np.ndarray, n: int) -> np.ndarray:
    """Symmetric power z -> (sqrt(C(n,k)) z0^k z1^(n-k))_k of 2-vectors."""
    z0, z1 = vectors[:, 0], vectors[:, 1]
    return np.stack([math.sqrt(math.comb(n, k)) * z0**k * z1 ** (n - k) for k in range(n + 1)], axis=1)


def line_bundle_O(mesh: TriangleMesh, n: int) -> SampledLineBundle:
    """O(n) on the sphere: the n-th power of the tautological line (dual when n > 0)."""
    taut = np.array([_tautological_vector(p) for p in mesh.positions])
    if n == 0:
        return constant_bundle(mesh, (1.0,))
    lines = veronese(taut, abs(n))
    return SampledLineBundle(mesh.triangles, lines if n < 0 else lines.conj(), mesh.positions)


def boundary_normal_bundle(mesh: TriangleMesh, a_field=None) -> SampledLineBundle:
    """nu_X^{1,0} along the unit sphere bounding the ball in <e1, e2, e3>.

    At each vertex p the inward normal is u = -p, (v, w = u x v) frames the
    tangent plane and X is tangent to the coassociative <v, w, a, u x a>; the
    sample is alpha = a - iJa from the computed split.  ``a_field`` maps p to
    a vector of R^7 (projected off <u, v, w>), default e4.
    """
    e = np.eye(DIM)
    if a_field is None:
        a_field = lambda p: e[3]  # noqa: E731
    samples = []
    for p in mesh.positions:
        u = np.zeros(DIM)
        u[:3] = -p
        t = _tangent_vector(p).real
        v = np.zeros(DIM)
        v[:3] = t
        w = cross(u, v)
        a = np.asarray(a_field(p), dtype=float)
        a = a - (a @ u) * u - (a @ v) * v - (a @ w) * w
        F = make_plane([v, w, a, cross(u, a)])
        split = split_coassociative(BoundaryConfig(u=u, v=v, w=w, F=F))
        samples.append(split.a - 1j * cross(split.u, split.a))
    return SampledLineBundle(mesh.triangles, np.array(samples), mesh.positions)

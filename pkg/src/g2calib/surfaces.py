"""Triangulated closed oriented surfaces used as sample domains for line bundles."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import TopologyError


@dataclass(frozen=True, eq=False)
class TriangleMesh:
    positions: np.ndarray  # (V, 3), informational
    triangles: np.ndarray  # (F, 3) oriented vertex indices

    @property
    def n_vertices(self) -> int:
        return len(self.positions)

    def edges(self) -> set[tuple[int, int]]:
        return {tuple(sorted(e)) for e in _directed_edges(self.triangles)}

    def euler_characteristic(self) -> int:
        check_closed_oriented(self.triangles, self.n_vertices)
        return self.n_vertices - len(self.edges()) + len(self.triangles)

    def genus(self) -> int:
        return 1 - self.euler_characteristic() // 2

    def reversed(self) -> "TriangleMesh":
        return TriangleMesh(self.positions, self.triangles[:, ::-1].copy())


def _directed_edges(triangles) -> list[tuple[int, int]]:
    out = []
    for a, b, c in triangles:
        out += [(int(a), int(b)), (int(b), int(c)), (int(c), int(a))]
    return out


def check_closed_oriented(triangles, n_vertices: int | None = None) -> None:
    """Every undirected edge borders exactly two triangles, with opposite directions."""
    tris = np.asarray(triangles, dtype=int)
    if tris.ndim != 2 or tris.shape[1] != 3 or len(tris) == 0:
        raise TopologyError("triangles must be a nonempty list of vertex triples")
    if n_vertices is not None and (tris.min() < 0 or tris.max() >= n_vertices):
        raise TopologyError("triangle refers to an unknown vertex")
    if np.any(tris[:, 0] == tris[:, 1]) or np.any(tris[:, 1] == tris[:, 2]) or np.any(tris[:, 0] == tris[:, 2]):
        raise TopologyError("degenerate triangle with a repeated vertex")
    directed: dict[tuple[int, int], int] = {}
    for e in _directed_edges(tris):
        directed[e] = directed.get(e, 0) + 1
    for (a, b), count in directed.items():
        if count != 1:
            raise TopologyError(f"directed edge ({a}, {b}) is used {count} times (non-manifold or misoriented)")
        if (b, a) not in directed:
            raise TopologyError(f"edge ({a}, {b}) borders only one triangle (surface has boundary)")


def _orient_outward(positions: np.ndarray, triangles: np.ndarray) -> np.ndarray:
    p = positions[triangles]
    normal = np.cross(p[:, 1] - p[:, 0], p[:, 2] - p[:, 0])
    flip = np.einsum("ij,ij->i", normal, p.mean(axis=1)) < 0
    tris = triangles.copy()
    tris[flip] = tris[flip][:, ::-1]
    return tris


def icosahedron() -> TriangleMesh:
    t = (1 + 5**0.5) / 2
    pts = np.array(
        [[-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0],
         [0, -1, t], [0, 1, t], [0, -1, -t], [0, 1, -t],
         [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1]],
        dtype=float,
    )
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    tris = np.array(
        [[0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
         [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
         [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
         [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1]]
    )
    return TriangleMesh(pts, _orient_outward(pts, tris))


def midpoint_subdivide(mesh: TriangleMesh, project_to_sphere: bool = False):
    """Split every triangle into four; returns the new mesh and the parent pair of each new vertex."""
    positions = list(mesh.positions)
    parents: list[tuple[int, int]] = [(i, i) for i in range(mesh.n_vertices)]
    cache: dict[tuple[int, int], int] = {}

    def mid(a: int, b: int) -> int:
        key = (min(a, b), max(a, b))
        if key not in cache:
            p = (mesh.positions[a] + mesh.positions[b]) / 2
            if project_to_sphere:
                p = p / np.linalg.norm(p)
            cache[key] = len(positions)
            positions.append(p)
            parents.append(key)
        return cache[key]

    tris = []
    for a, b, c in mesh.triangles:
        ab, bc, ca = mid(a, b), mid(b, c), mid(c, a)
        tris += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
    return TriangleMesh(np.array(positions), np.array(tris)), parents


def icosphere(level: int) -> TriangleMesh:
    """Icosahedron subdivided ``level`` times, vertices on the unit sphere, outward oriented."""
    mesh = icosahedron()
    for _ in range(level):
        mesh, _ = midpoint_subdivide(mesh, project_to_sphere=True)
    return mesh


def torus_grid(n: int, m: int | None = None, radii: tuple[float, float] = (2.0, 1.0)) -> TriangleMesh:
    """n x m periodic grid, two triangles per square."""
    m = n if m is None else m
    if n < 3 or m < 3:
        raise ValueError("a torus grid needs at least 3 x 3 squares")
    R, r = radii
    idx = lambda i, j: (i % n) * m + (j % m)  # noqa: E731
    s, t = np.meshgrid(2 * np.pi * np.arange(n) / n, 2 * np.pi * np.arange(m) / m, indexing="ij")
    pos = np.stack([(R + r * np.cos(t)) * np.cos(s), (R + r * np.cos(t)) * np.sin(s), r * np.sin(t)], axis=-1)
    tris = []
    for i in range(n):
        for j in range(m):
            a, b, c, d = idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)
            tris += [(a, b, c), (a, c, d)]
    return TriangleMesh(pos.reshape(-1, 3), np.array(tris))


def connected_sum(first: TriangleMesh, second: TriangleMesh, offset=(6.0, 0.0, 0.0)) -> TriangleMesh:
    """Remove one triangle from each surface and glue along the boundary triangles."""
    a, b, c = (int(x) for x in first.triangles[0])
    a2, b2, c2 = (int(x) for x in second.triangles[0])
    n1 = first.n_vertices
    # identifying a2~b, b2~a, c2~c makes every glued edge appear once in each direction
    relabel = {a2: b, b2: a, c2: c}
    keep = [i for i in range(second.n_vertices) if i not in relabel]
    for k, i in enumerate(keep):
        relabel[i] = n1 + k
    tris2 = np.vectorize(relabel.get)(second.triangles[1:])
    positions = np.vstack([first.positions, second.positions[keep] + np.asarray(offset)])
    mesh = TriangleMesh(positions, np.vstack([first.triangles[1:], tris2]))
    check_closed_oriented(mesh.triangles, mesh.n_vertices)
    return mesh


def genus_two_surface(n: int = 4) -> TriangleMesh:
    return connected_sum(torus_grid(n), torus_grid(n))

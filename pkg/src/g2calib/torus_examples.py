"""Exact fixed-locus and orbit enumeration for diagonal affine maps of T^7 = R^7/Z^7.

A map is ``x_i -> eps_i x_i + c_i`` with ``eps_i = +-1`` and rational
``c_i`` mod 1.  Fixed loci of such maps are unions of coordinate subtori,
which are classified against phi0/psi0 and counted up to a finite group.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .chern import chern_number, constant_bundle
from .errors import DegreeError, GroupOverflowError
from .g2_algebra import DIM, PHI0_TERMS, PSI0_TERMS
from .surfaces import torus_grid
from .symbol_index import BoundaryComponentData, index_formula

MAX_GROUP_ORDER = 2**10
ZERO, HALF = Fraction(0), Fraction(1, 2)


def mod1(x) -> Fraction:
    return Fraction(x) % 1


def _fmt(x: Fraction) -> str:
    return str(x)


@dataclass(frozen=True)
class AffineTorusMap:
    signs: tuple[int, ...]
    shift: tuple[Fraction, ...]
    label: str = field(default="", compare=False)

    def __post_init__(self):
        signs = tuple(int(s) for s in self.signs)
        if len(signs) != DIM or any(s not in (1, -1) for s in signs):
            raise ValueError("signs must be seven entries in {+1, -1}")
        shift = tuple(mod1(c) for c in self.shift)
        if len(shift) != DIM:
            raise ValueError("shift must have seven entries")
        object.__setattr__(self, "signs", signs)
        object.__setattr__(self, "shift", shift)

    @classmethod
    def identity(cls) -> "AffineTorusMap":
        return cls((1,) * DIM, (ZERO,) * DIM, "Id")

    @classmethod
    def from_formula(cls, *entries, label: str = "") -> "AffineTorusMap":
        """Entries ``(eps, c)`` per coordinate meaning ``x -> c + eps x``."""
        return cls(tuple(e for e, _ in entries), tuple(Fraction(c) for _, c in entries), label)

    def compose(self, other: "AffineTorusMap") -> "AffineTorusMap":
        """self o other."""
        signs = tuple(a * b for a, b in zip(self.signs, other.signs))
        shift = tuple(e * c2 + c for e, c2, c in zip(self.signs, other.shift, self.shift))
        words = [x for x in (self.label, other.label) if x and x != "Id"]
        label = "*".join(words) if words else ("Id" if self.label == other.label == "Id" else "")
        return AffineTorusMap(signs, shift, label)

    __matmul__ = compose

    def is_identity(self) -> bool:
        return all(s == 1 for s in self.signs) and all(c == 0 for c in self.shift)

    def is_involution(self) -> bool:
        return all(e == -1 or mod1(2 * c) == 0 for e, c in zip(self.signs, self.shift))

    def apply_point(self, x) -> tuple[Fraction, ...]:
        return tuple(mod1(e * Fraction(xi) + c) for e, xi, c in zip(self.signs, x, self.shift))

    def form_sign(self, terms: dict) -> int:
        """+1 if the linear part preserves the form, -1 if it reverses it, 0 otherwise."""
        signs = {int(np.prod([self.signs[i - 1] for i in idx])) * 1 for idx in terms}
        return signs.pop() if len(signs) == 1 else 0

    def phi_sign(self) -> int:
        return self.form_sign(PHI0_TERMS)

    def to_json(self) -> dict:
        return {"signs": list(self.signs), "shift": [_fmt(c) for c in self.shift]}

    @classmethod
    def from_json(cls, data: dict, label: str = "") -> "AffineTorusMap":
        for key in ("signs", "shift"):
            if key not in data:
                raise KeyError(key)
        return cls(tuple(data["signs"]), tuple(Fraction(str(c)) for c in data["shift"]), label or data.get("label", ""))

    def __str__(self) -> str:
        parts = []
        for i, (e, c) in enumerate(zip(self.signs, self.shift), start=1):
            x = f"x{i}" if e == 1 else f"-x{i}"
            parts.append(x if c == 0 else f"{c}{'+' if e == 1 else ''}{x}")
        return f"{self.label or 'map'}({', '.join(parts)})"


@dataclass(frozen=True)
class CoordSubtorus:
    """``values[i]`` is None for a free coordinate, else the pinned value mod 1."""

    values: tuple

    def __post_init__(self):
        if len(self.values) != DIM:
            raise ValueError("a coordinate subtorus needs seven entries")
        object.__setattr__(self, "values", tuple(None if v is None else mod1(v) for v in self.values))

    @classmethod
    def make(cls, free, fixed: dict) -> "CoordSubtorus":
        free = set(free)
        vals = []
        for i in range(1, DIM + 1):
            if i in free:
                vals.append(None)
            else:
                vals.append(Fraction(fixed[i]))
        return cls(tuple(vals))

    @property
    def free(self) -> tuple[int, ...]:
        return tuple(i + 1 for i, v in enumerate(self.values) if v is None)

    @property
    def fixedvals(self) -> dict[int, Fraction]:
        return {i + 1: v for i, v in enumerate(self.values) if v is not None}

    @property
    def dim(self) -> int:
        return len(self.free)

    def contains(self, x) -> bool:
        return all(v is None or mod1(xi) == v for v, xi in zip(self.values, x))

    def is_subset_of(self, other: "CoordSubtorus") -> bool:
        return all(o is None or (v is not None and v == o) for v, o in zip(self.values, other.values))

    def sample_point(self, rng=None) -> tuple[Fraction, ...]:
        rng = rng or np.random.default_rng(0)
        return tuple(Fraction(int(rng.integers(0, 997)), 997) if v is None else v for v in self.values)

    def to_json(self) -> dict:
        return {"free": list(self.free), "fixed": {str(k): _fmt(v) for k, v in self.fixedvals.items()}}

    @classmethod
    def from_json(cls, data: dict) -> "CoordSubtorus":
        for key in ("free", "fixed"):
            if key not in data:
                raise KeyError(key)
        free = {int(i) for i in data["free"]}
        fixed = {int(k): Fraction(str(v)) for k, v in data["fixed"].items()}
        missing = set(range(1, DIM + 1)) - free - set(fixed)
        if missing or free & set(fixed):
            raise ValueError("fixed: every coordinate must be either free or pinned, exactly once")
        return cls.make(free, fixed)

    def __str__(self) -> str:
        return "T^{}[{}]".format(self.dim, " ".join("." if v is None else str(v) for v in self.values))


def fixed_locus(m: AffineTorusMap) -> list[CoordSubtorus]:
    choices = []
    for e, c in zip(m.signs, m.shift):
        if e == 1:
            if c != 0:
                return []
            choices.append((None,))
        else:
            choices.append((mod1(c / 2), mod1(c / 2 + HALF)))
    return [CoordSubtorus(vals) for vals in itertools.product(*choices)]


def classify_subtorus(t: CoordSubtorus) -> str:
    """Exact calibration type of the coordinate plane spanned by the free directions."""
    free = t.free
    if len(free) == 3:
        return "associative" if abs(PHI0_TERMS.get(free, 0)) == 1 else "neither"
    if len(free) == 4:
        return "coassociative" if abs(PSI0_TERMS.get(free, 0)) == 1 else "neither"
    raise DegreeError(f"only 3- and 4-dimensional subtori are classified, got dimension {len(free)}")


def apply_map(m: AffineTorusMap, t: CoordSubtorus) -> CoordSubtorus:
    return CoordSubtorus(tuple(None if v is None else e * v + c for v, e, c in zip(t.values, m.signs, m.shift)))


def subtorus_intersect(s: CoordSubtorus, t: CoordSubtorus) -> bool:
    return all(a is None or b is None or a == b for a, b in zip(s.values, t.values))


def intersection(s: CoordSubtorus, t: CoordSubtorus) -> CoordSubtorus | None:
    if not subtorus_intersect(s, t):
        return None
    return CoordSubtorus(tuple(a if a is not None else b for a, b in zip(s.values, t.values)))


def group_closure(gens, max_order: int = MAX_GROUP_ORDER) -> list[AffineTorusMap]:
    """All products of the generators, identity first, in breadth-first order."""
    ident = AffineTorusMap.identity()
    elements = [ident]
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for g in frontier:
            for h in gens:
                k = g.compose(h)
                if k not in seen:
                    if len(seen) >= max_order:
                        raise GroupOverflowError(f"group generated exceeds order {max_order}")
                    seen.add(k)
                    elements.append(k)
                    nxt.append(k)
        frontier = nxt
    return elements


@dataclass
class Orbit:
    representative: CoordSubtorus
    members: list[CoordSubtorus]
    stabilizer_order: int
    # members lying outside the item list passed in
    outside: list[CoordSubtorus]

    def to_json(self) -> dict:
        return {
            "representative": self.representative.to_json(),
            "size": len(self.members),
            "stabilizer_order": self.stabilizer_order,
            "outside_items": len(self.outside),
        }


@dataclass
class OrbitCensus:
    group_order: int
    orbits: list[Orbit]

    @property
    def orbit_count(self) -> int:
        return len(self.orbits)

    @property
    def is_free(self) -> bool:
        return all(o.stabilizer_order == 1 for o in self.orbits)

    def stabilizer_table(self) -> str:
        lines = [f"group order {self.group_order}, {self.orbit_count} orbits"]
        for k, o in enumerate(self.orbits):
            lines.append(f"  orbit {k}: rep {o.representative}  size {len(o.members)}  stabilizer {o.stabilizer_order}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "group_order": self.group_order,
            "orbit_count": self.orbit_count,
            "free": self.is_free,
            "orbits": [o.to_json() for o in self.orbits],
        }


def orbit_census(group_gens, items, max_order: int = MAX_GROUP_ORDER) -> OrbitCensus:
    """Orbits of ``items`` under the group generated by ``group_gens``; stabilizers counted directly."""
    group = group_closure(list(group_gens), max_order)
    items = list(dict.fromkeys(items))
    item_set = set(items)
    assigned: set[CoordSubtorus] = set()
    orbits = []
    for t in items:
        if t in assigned:
            continue
        images = [apply_map(g, t) for g in group]
        members = list(dict.fromkeys(images))
        stab = sum(1 for im in images if im == t)
        assigned.update(members)
        orbits.append(Orbit(t, members, stab, [m for m in members if m not in item_set]))
    return OrbitCensus(len(group), orbits)


@dataclass
class ComposedRow:
    delta: AffineTorusMap
    components: list[CoordSubtorus]

    @property
    def dims(self) -> list[int]:
        return sorted({c.dim for c in self.components})

    def to_json(self) -> dict:
        return {
            "delta": self.delta.label or str(self.delta),
            "components": len(self.components),
            "dims": self.dims,
        }


@dataclass
class ComposedCensus:
    base: AffineTorusMap
    rows: list[ComposedRow]
    census: OrbitCensus

    def nonempty(self) -> list[str]:
        return [r.delta.label for r in self.rows if r.components]

    def row(self, label: str) -> ComposedRow:
        for r in self.rows:
            if r.delta.label == label:
                return r
        raise KeyError(label)

    def orbits_of_dim(self, d: int) -> list[Orbit]:
        return [o for o in self.census.orbits if o.representative.dim == d]

    def to_json(self) -> dict:
        return {
            "base": self.base.to_json(),
            "rows": [r.to_json() for r in self.rows],
            "census": self.census.to_json(),
        }


def composed_fixed_census(base: AffineTorusMap, gens, max_order: int = MAX_GROUP_ORDER) -> ComposedCensus:
    """Fixed loci of base o delta over the group, and their orbits under the group."""
    group = group_closure(list(gens), max_order)
    rows = [ComposedRow(d, fixed_locus(base.compose(d))) for d in group]
    items = [c for r in rows for c in r.components]
    return ComposedCensus(base, rows, orbit_census(gens, items, max_order))


# ---------------------------------------------------------------------------
# the concrete maps


def _m(label: str, *entries) -> AffineTorusMap:
    return AffineTorusMap.from_formula(*entries, label=label)


P, N = 1, -1
Q, H = Fraction(1, 4), Fraction(1, 2)

FLAT_SIGMA = _m("sigma0", (P, 0), (P, 0), (P, 0), (N, 0), (N, 0), (N, 0), (N, 0))
FLAT_TAU = _m("tau0", (N, 0), (P, 0), (P, 0), (P, 0), (P, 0), (N, 0), (N, 0))

ALPHA = _m("alpha", (P, 0), (P, 0), (P, 0), (N, 0), (N, 0), (N, 0), (N, 0))
BETA = _m("beta", (P, 0), (N, 0), (N, 0), (P, 0), (P, 0), (N, H), (N, 0))
GAMMA = _m("gamma", (N, 0), (P, 0), (N, 0), (P, 0), (N, H), (P, 0), (N, H))
GAMMA_GENERATORS = (ALPHA, BETA, GAMMA)

WARMUP_SIGMA = _m("sigma0", (P, 0), (N, H), (N, H), (P, 0), (P, 0), (N, 0), (N, H))
WARMUP_TAU = _m("tau0", (P, 0), (P, 0), (N, H), (N, H), (P, 0), (P, 0), (N, H))
SECOND_SIGMA = _m("sigma0", (P, 0), (N, H), (N, H), (P, 0), (P, 0), (N, 0), (N, 0))
SECOND_TAU = _m("tau0", (N, H), (P, 0), (P, 0), (P, 0), (P, 0), (N, 0), (N, 0))

# quoted count of isolated fixed points of tau on T^7/Gamma in the first Joyce example
QUOTED_ISOLATED_POINTS = 8


def gamma_group() -> list[AffineTorusMap]:
    return group_closure(GAMMA_GENERATORS)


def find_element(label: str) -> AffineTorusMap:
    """Element of Gamma by generator word, e.g. 'beta*gamma'."""
    for g in gamma_group():
        if g.label == label:
            return g
    raise KeyError(label)


# ---------------------------------------------------------------------------
# reports


def flat_example_report() -> dict:
    sigma_tori = fixed_locus(FLAT_SIGMA)
    tau_tori = fixed_locus(FLAT_TAU)
    interior = CoordSubtorus.make({1, 2, 3}, {4: 0, 5: 0, 6: 0, 7: 0})
    boundary = [CoordSubtorus.make({2, 3}, {1: t, 4: 0, 5: 0, 6: 0, 7: 0}) for t in (ZERO, HALF)]
    X = [t for t in tau_tori if t.values[5] == 0 and t.values[6] == 0]
    hits = [[subtorus_intersect(b, x) for x in tau_tori] for b in boundary]
    # nu_X is spanned by the constant directions e1, e6 (resp. e7): a constant sample on a torus grid
    grid = torus_grid(6)
    c1 = chern_number(constant_bundle(grid, (1.0, -1.0j)))
    components = [BoundaryComponentData(genus=grid.genus(), c1=c1) for _ in boundary]
    return {
        "sigma_components": len(sigma_tori),
        "sigma_types": sorted({classify_subtorus(t) for t in sigma_tori}),
        "tau_components": len(tau_tori),
        "tau_types": sorted({classify_subtorus(t) for t in tau_tori}),
        "phi_signs": {"sigma0": FLAT_SIGMA.phi_sign(), "tau0": FLAT_TAU.phi_sign()},
        "Y_interior": classify_subtorus(interior),
        "boundary_components": [{"torus": str(b), "genus": grid.genus()} for b in boundary],
        "boundary_in_X": [any(b.is_subset_of(x) for x in X) for b in boundary],
        "matching_X_components": [sum(h) for h in hits],
        "X_components": [str(x) for x in X],
        "X_coassociative": [classify_subtorus(x) == "coassociative" for x in X],
        "c1_nu_X": c1,
        "index": index_formula(components),
    }


def singular_census() -> dict:
    """Singular locus of T^7/Gamma: fixed 3-tori of alpha, beta, gamma up to Gamma."""
    per_generator = {}
    classes = []
    for g in GAMMA_GENERATORS:
        tori = fixed_locus(g)
        census = orbit_census(GAMMA_GENERATORS, tori)
        others = [h for h in GAMMA_GENERATORS if h is not g]
        sub = orbit_census(others, tori)
        per_generator[g.label] = {
            "tori": len(tori),
            "types": sorted({classify_subtorus(t) for t in tori}),
            "orbits": census.orbit_count,
            "complementary_subgroup_free": sub.is_free,
            "complementary_subgroup_orbits": sub.orbit_count,
        }
        classes += [(g.label, o) for o in census.orbits]
    # two classes meet iff some representatives meet
    meets = 0
    for (la, oa), (lb, ob) in itertools.combinations(classes, 2):
        if any(subtorus_intersect(a, b) for a in oa.members for b in ob.members):
            meets += 1
    return {
        "group_order": len(gamma_group()),
        "per_generator": per_generator,
        "classes": len(classes),
        "intersecting_pairs": meets,
        "fixed_point_free": sorted(
            g.label for g in gamma_group() if not g.is_identity() and not fixed_locus(g)
        ),
    }


def warmup_report() -> dict:
    sigma = composed_fixed_census(WARMUP_SIGMA, GAMMA_GENERATORS)
    tau = composed_fixed_census(WARMUP_TAU, GAMMA_GENERATORS)
    points = tau.orbits_of_dim(0)
    four_tori = tau.orbits_of_dim(4)
    # diagnostic: orbits of the isolated points when tau0 itself is also divided out
    pts = [c for r in tau.rows for c in r.components if c.dim == 0]
    with_tau = orbit_census(GAMMA_GENERATORS + (WARMUP_TAU,), pts)
    return {
        "sigma_nonempty": sigma.nonempty(),
        "sigma_components": len(sigma.row("Id").components),
        "sigma_types": sorted({classify_subtorus(c) for c in sigma.row("Id").components}),
        "sigma_orbits": sigma.census.orbit_count,
        "tau_nonempty": tau.nonempty(),
        "tau_rows": {r.delta.label: len(r.components) for r in tau.rows},
        "tau_four_tori": len(tau.row("Id").components),
        "tau_types": sorted({classify_subtorus(c) for c in tau.row("Id").components}),
        "tau_four_torus_orbits": len(four_tori),
        "isolated_points": sum(len(r.components) for r in tau.rows if r.components and r.components[0].dim == 0),
        "isolated_point_orbits": len(points),
        "isolated_point_stabilizers": sorted({o.stabilizer_order for o in points}),
        "isolated_point_orbits_mod_gamma_and_tau": with_tau.orbit_count,
        "quoted_isolated_points": QUOTED_ISOLATED_POINTS,
        "stabilizer_table": tau.census.stabilizer_table(),
        "index": index_formula([BoundaryComponentData(1, 0), BoundaryComponentData(1, 0)]),
    }


def second_example_report() -> dict:
    sigma = composed_fixed_census(SECOND_SIGMA, GAMMA_GENERATORS)
    tau = composed_fixed_census(SECOND_TAU, GAMMA_GENERATORS)
    alpha_tori = fixed_locus(ALPHA)
    hits_sigma = any(subtorus_intersect(c, a) for r in sigma.rows for c in r.components for a in alpha_tori)
    hits_tau = any(subtorus_intersect(c, a) for r in tau.rows for c in r.components for a in alpha_tori)
    return {
        "sigma_nonempty": sigma.nonempty(),
        "sigma_rows": {r.delta.label: len(r.components) for r in sigma.rows if r.components},
        "sigma_dims": {r.delta.label: r.dims for r in sigma.rows if r.components},
        "tau_nonempty": tau.nonempty(),
        "tau_rows": {r.delta.label: len(r.components) for r in tau.rows if r.components},
        "tau_dims": {r.delta.label: r.dims for r in tau.rows if r.components},
        "hits_alpha_tori": {"sigma": hits_sigma, "tau": hits_tau},
        # two sphere boundary components with trivial normal bundle
        "index": index_formula([BoundaryComponentData(0, 0), BoundaryComponentData(0, 0)]),
    }

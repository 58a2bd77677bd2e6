"""Seeded property suite for the G2 linear algebra.

Every check compares two independent routes: the structure-constant table
against octonion multiplication, the form coefficients against determinant
expansion, and so on.  Passing a corrupted table (see ``corrupted_table``)
must make the suite fail.
"""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .errors import G2CalibError
from .g2_algebra import (
    CROSS_TABLE,
    DIM,
    PHI0,
    PHI0_TERMS,
    PSI0,
    KForm,
    _table_from_terms,
    associator,
    cross,
    cross_with_table,
    dot,
    hodge_star,
    metric_from_three_form,
    random_orthonormal_frames,
)

TOL = 1e-9


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    value: object

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "value": self.value}


def corrupted_table(term=(1, 2, 3)) -> np.ndarray:
    """Structure constants with the sign of one phi0 term flipped."""
    terms = dict(PHI0_TERMS)
    terms[term] = -terms[term]
    return _table_from_terms(terms)


def _form_from_table(table: np.ndarray) -> KForm:
    terms = {}
    for i in range(DIM):
        for j in range(i + 1, DIM):
            for k in range(j + 1, DIM):
                if table[i, j, k]:
                    terms[(i + 1, j + 1, k + 1)] = int(table[i, j, k])
    return KForm.from_terms(3, terms)


def identity_suite(seed: int = 0, trials: int = 10_000, table: np.ndarray | None = None, tol: float = TOL) -> list[Check]:
    if trials < 1:
        raise ValueError("trials must be at least 1")
    table = CROSS_TABLE if table is None else np.asarray(table)
    rng = np.random.default_rng(seed)
    u, v, w, x = rng.normal(size=(4, trials, DIM))
    X = lambda a, b: cross_with_table(a, b, table)  # noqa: E731
    checks = []

    def add(name, err, bound=tol):
        checks.append(Check(name, bool(err <= bound), float(err)))

    add("cross_table_matches_octonions", np.abs(X(u, v) - cross(u, v)).max())

    chi = -X(u, X(v, w)) - dot(u, v)[:, None] * w + dot(u, w)[:, None] * v
    add("chi_equals_associator", np.abs(chi - associator(u, v, w)).max())

    psi_form = PSI0.evaluate(u, v, w, x)
    add("psi_equals_minus_u_dot_associator", np.abs(psi_form + dot(u, associator(v, w, x))).max())

    lhs = dot(X(u, v), X(u, v))
    rhs = dot(u, u) * dot(v, v) - dot(u, v) ** 2
    add("cross_norm_is_area", np.abs(lhs - rhs).max() / max(1.0, np.abs(rhs).max()))

    add("phi_from_table_matches_form", np.abs(dot(X(u, v), w) - PHI0.evaluate(u, v, w)).max())

    frames3 = random_orthonormal_frames(rng, trials, 3)
    phi_vals = dot(X(frames3[:, 0], frames3[:, 1]), frames3[:, 2])
    add("phi_comass_at_most_one", max(0.0, np.abs(phi_vals).max() - 1.0))
    frames4 = random_orthonormal_frames(rng, trials, 4)
    psi_vals = PSI0.evaluate(*[frames4[:, k] for k in range(4)])
    add("psi_comass_at_most_one", max(0.0, np.abs(psi_vals).max() - 1.0))

    # exact statements in rational arithmetic on the form the table defines
    phi = _form_from_table(table)
    try:
        gram, vol = metric_from_three_form(phi)
        metric_ok = bool(np.all(gram == np.eye(DIM, dtype=int)) and vol == 1)
        star = hodge_star(phi, gram, vol)
        star_ok = star == PSI0
    except G2CalibError as exc:
        metric_ok, star_ok = False, False
        checks.append(Check("metric_defined", False, str(exc)))
    checks.append(Check("metric_is_identity_exactly", metric_ok, metric_ok))
    checks.append(Check("hodge_star_phi_is_psi_exactly", bool(star_ok), bool(star_ok)))
    return checks


def run_suite(seed: int = 0, trials: int = 10_000, table=None) -> dict:
    t0 = time.perf_counter()
    checks = identity_suite(seed, trials, table)
    return {
        "seed": seed,
        "trials": trials,
        "seconds": time.perf_counter() - t0,
        "checks": checks,
        "passed": all(c.passed for c in checks),
    }

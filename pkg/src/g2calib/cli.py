"""Command line interface: ``g2calib <command> [--input FILE] [flags]``.

Every command prints a RunReport as JSON.  Exit codes: 0 all checks pass,
1 a reported check failed, 2 the input could not be parsed, 3 an invariant
or precondition was violated.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import chern as chern_mod
from . import torus_examples as tx
from .boundary_split import BoundaryConfig, check_antilinear, split_coassociative, split_psi_positive
from .calibration import OrientedPlane, classify_plane, is_coassociative
from .errors import G2CalibError
from .identities import corrupted_table, run_suite
from .surfaces import genus_two_surface, icosphere, torus_grid
from .symbol_index import (
    P_PLUS_SYMBOL,
    BoundaryComponentData,
    ebc_check,
    index_formula,
    maslov_from_index,
    psi_positive_ellipticity,
)

EXIT_OK, EXIT_CHECK, EXIT_PARSE, EXIT_INVARIANT = 0, 1, 2, 3


class InputError(Exception):
    """Input file missing, malformed, or lacking a field."""


def jsonable(x):
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, list | tuple):
        return [jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex | np.complexfloating):
        return [float(x.real), float(x.imag)]
    if isinstance(x, np.ndarray):
        return jsonable(x.tolist())
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, np.integer):
        return int(x)
    if isinstance(x, np.floating):
        return float(x)
    if hasattr(x, "to_json"):
        return jsonable(x.to_json())
    return x


@dataclass
class RunReport:
    command: str
    inputs: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)  # (name, passed, value)

    def check(self, name: str, passed: bool, value=None) -> bool:
        self.checks.append((name, bool(passed), jsonable(value)))
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(p for _, p, _ in self.checks)

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "inputs": jsonable(self.inputs),
            "outputs": jsonable(self.outputs),
            "checks": [{"name": n, "pass": p, "value": v} for n, p, v in self.checks],
            "passed": self.passed,
        }

    @classmethod
    def from_json(cls, data: dict) -> "RunReport":
        return cls(
            command=data["command"],
            inputs=data["inputs"],
            outputs=data["outputs"],
            checks=[(c["name"], c["pass"], c["value"]) for c in data["checks"]],
        )

    def render(self) -> str:
        lines = [f"== {self.command} =="]
        for n, p, v in self.checks:
            lines.append(f"  [{'PASS' if p else 'FAIL'}] {n}: {v}")
        lines.append(json.dumps(jsonable(self.outputs), indent=2))
        return "\n".join(lines)


def _load(args) -> object:
    path = args.input or args.file
    if path is None:
        raise InputError("an input file is required (--input FILE or positional)")
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from None


def _parse(kind: str, fn, data):
    try:
        return fn(data)
    except G2CalibError:
        raise
    except KeyError as exc:
        raise InputError(f"{kind}: missing field {exc.args[0]!r}") from None
    except (TypeError, ValueError, IndexError, ZeroDivisionError) as exc:
        raise InputError(f"{kind}: {exc}") from None


# ---------------------------------------------------------------------------
# commands


def cmd_verify_identities(args) -> RunReport:
    table = corrupted_table() if args.corrupt_phi else None
    result = run_suite(args.seed, args.trials, table)
    rep = RunReport("verify-identities", {"seed": args.seed, "trials": args.trials})
    rep.outputs = {"seconds": result["seconds"], "corrupted": bool(args.corrupt_phi)}
    for c in result["checks"]:
        rep.check(c.name, c.passed, c.value)
    return rep


def cmd_classify_plane(args) -> RunReport:
    data = _load(args)
    plane = _parse("plane", OrientedPlane.from_json, data)
    rep = RunReport("classify-plane", {"plane": plane.to_json(), "tol": args.tol})
    rep.outputs = classify_plane(plane, args.tol)
    return rep


def cmd_boundary_split(args) -> RunReport:
    data = _load(args)
    cfg = _parse("boundary config", BoundaryConfig.from_json, data)
    rep = RunReport("boundary-split", {"config": cfg.to_json(), "tol": args.tol})
    if is_coassociative(cfg.F, args.tol):
        split = split_coassociative(cfg, args.tol)
        rep.outputs = {"case": "coassociative", "split": split.to_json(), "residuals": split.residuals(cfg.F)}
        for name, y in (("v", cfg.v), ("w", cfg.w), ("v+w", cfg.v + cfg.w)):
            rep.check(f"antilinear_{name}", check_antilinear(split, y, max(args.tol, 1e-9)))
        rep.check("split_invariants", max(split.residuals(cfg.F).values()) <= 1e-9, max(split.residuals(cfg.F).values()))
    else:
        split, report = split_psi_positive(cfg, tol=args.tol)
        ell = psi_positive_ellipticity(report.z, args.grid)
        rep.outputs = {
            "case": "psi-positive",
            "split": split.to_json(),
            "report": report.to_json(),
            "ellipticity": ell.to_json(),
        }
        rep.check("projection_isomorphism", report.projection_singular_values[1] > args.tol, report.projection_singular_values)
        rep.check("J_mu_nondegenerate", report.jb_mu_norm > args.tol, report.jb_mu_norm)
        rep.check("boundary_symbol_elliptic", ell.passed, ell.min_abs_det)
    return rep


def cmd_index(args) -> RunReport:
    data = _load(args)
    comps = _parse("components", lambda d: [BoundaryComponentData.from_json(c) for c in d], data)
    rep = RunReport("index", {"components": comps})
    idx = index_formula(comps)
    rep.outputs = {"index": idx}
    if len(comps) == 1 and comps[0].genus == 0:
        rep.outputs["maslov"] = maslov_from_index(idx, comps)
    return rep


def cmd_ebc_check(args) -> RunReport:
    if args.grid < 90:
        raise InputError(f"--grid must be at least 90 angles, got {args.grid}")
    rep = RunReport("ebc-check", {"grid": args.grid})
    b = ebc_check(args.grid)
    p = ebc_check(args.grid, boundary=P_PLUS_SYMBOL)
    rep.outputs = {"min_singular_value": b.min_singular_value, "grid": b.grid, "pass": b.passed, "projector_nu_plus": p.to_json()}
    rep.check("sigma_B_elliptic", b.passed, b.min_singular_value)
    rep.check("nu_plus_projector_elliptic", p.passed, p.min_singular_value)
    if args.z is not None:
        try:
            z = complex(args.z.replace(" ", "").replace("i", "j"))
        except ValueError:
            raise InputError(f"--z: cannot parse {args.z!r} as a complex number") from None
        ell = psi_positive_ellipticity(z, args.grid)
        rep.inputs["z"] = z
        rep.outputs["psi_positive"] = ell.to_json()
        rep.check("psi_positive_elliptic", ell.passed, ell.min_abs_det)
    return rep


def _bundle(args):
    return _parse("bundle", chern_mod.SampledLineBundle.from_json, _load(args))


def cmd_chern(args) -> RunReport:
    b = _bundle(args)
    res = chern_mod.chern_result(b)
    rep = RunReport("chern", {"vertices": len(b.lines), "triangles": len(b.triangles), "ambient_dim": b.ambient_dim})
    rep.outputs = {**res.to_json(), "genus": chern_mod.genus_of_complex(b)}
    return rep


def cmd_maslov(args) -> RunReport:
    b = _bundle(args)
    mu = chern_mod.maslov_mod2(b)
    c1 = chern_mod.chern_number(b)
    comps = [BoundaryComponentData(0, c1)]
    from_index = maslov_from_index(index_formula(comps), comps)
    rep = RunReport("maslov", {"vertices": len(b.lines), "triangles": len(b.triangles)})
    rep.outputs = {"c1": c1, "maslov": mu, "index": index_formula(comps), "maslov_from_index": from_index}
    rep.check("maslov_agrees_with_index", mu == from_index, [mu, from_index])
    return rep


def _maps(data) -> list[tx.AffineTorusMap]:
    items = data if isinstance(data, list) else [data]
    return [tx.AffineTorusMap.from_json(m, label=m.get("label", f"m{k}")) for k, m in enumerate(items)]


def cmd_fixed_loci(args) -> RunReport:
    maps = _parse("involution", _maps, _load(args))
    rep = RunReport("fixed-loci", {"maps": maps})
    out = []
    for m in maps:
        comps = tx.fixed_locus(m)
        types = sorted({tx.classify_subtorus(c) for c in comps if c.dim in (3, 4)})
        out.append({
            "map": m.label,
            "involution": m.is_involution(),
            "phi_sign": m.phi_sign(),
            "components": len(comps),
            "dims": sorted({c.dim for c in comps}),
            "types": types,
            "tori": [str(c) for c in comps],
        })
    rep.outputs = {"loci": out}
    return rep


def cmd_census(args) -> RunReport:
    data = _load(args)

    def parse(d):
        gens = _maps(d["generators"])
        items = [tx.CoordSubtorus.from_json(t) for t in d.get("items", [])]
        for m in _maps(d.get("fixed_loci_of", [])):
            items += tx.fixed_locus(m)
        base = _maps(d["base"])[0] if "base" in d else None
        return gens, items, base

    gens, items, base = _parse("census", parse, data)
    rep = RunReport("census", {"generators": gens, "items": len(items), "base": base})
    if base is not None:
        comp = tx.composed_fixed_census(base, gens)
        rep.outputs = comp.to_json()
        rep.outputs["stabilizer_table"] = comp.census.stabilizer_table()
    else:
        census = tx.orbit_census(gens, items)
        rep.outputs = census.to_json()
        rep.outputs["stabilizer_table"] = census.stabilizer_table()
    return rep


def paper_examples(grid_level: int = 3) -> RunReport:
    """Rebuild every quoted index, count and Maslov value; checks fail on any mismatch."""
    rep = RunReport("paper-examples", {"sphere_level": grid_level})
    sphere = icosphere(grid_level)
    rows = []

    def row(name, computed, expected):
        rows.append({"example": name, "computed": computed, "quoted": expected})
        rep.check(name, computed == expected, computed)

    # local coassociative: nu_X from the pointwise split over a sphere, trivial frame over genus 2
    c1_sphere = chern_mod.chern_number(chern_mod.boundary_normal_bundle(sphere))
    g2 = genus_two_surface()
    c1_g2 = chern_mod.chern_number(chern_mod.constant_bundle(g2))
    for g, c1 in ((0, c1_sphere), (g2.genus(), c1_g2)):
        row(f"local coassociative g={g}", index_formula([BoundaryComponentData(g, c1)]), 1 - g)
    # Bryant-Salamon: nu_X = O(n) on the boundary sphere
    for n in range(6):
        c1 = chern_mod.chern_number(chern_mod.line_bundle_O(sphere, n))
        row(f"Bryant-Salamon n={n}", index_formula([BoundaryComponentData(0, c1)]), n + 1)
    # Calabi-Yau: c1 = c1(K) = 2(1-g); sampled where a sample exists
    c1_cy = {0: chern_mod.chern_number(chern_mod.tangent_bundle(sphere)), 1: chern_mod.chern_number(chern_mod.constant_bundle(torus_grid(6)))}
    for g in (0, 1, 2):
        c1 = c1_cy.get(g, 2 * (1 - g))
        row(f"Calabi-Yau g={g}", index_formula([BoundaryComponentData(g, c1)]), 3 * (1 - g))
    flat = tx.flat_example_report()
    row("flat torus index", flat["index"], 0)
    warm = tx.warmup_report()
    row("Joyce warm-up index", warm["index"], 0)
    second = tx.second_example_report()
    row("second Joyce index", second["index"], 2)
    b = chern_mod.boundary_normal_bundle(sphere)
    idx = index_formula([BoundaryComponentData(0, chern_mod.chern_number(b))])
    row("Maslov example", maslov_from_index(idx), 0)
    mu = chern_mod.maslov_mod2(b)
    rep.check("Maslov cross-formula", mu == maslov_from_index(idx), [mu, maslov_from_index(idx)])

    # enumeration counts
    sing = tx.singular_census()
    row("flat sigma0 associative 3-tori", flat["sigma_components"] if flat["sigma_types"] == ["associative"] else -1, 16)
    row("flat tau0 coassociative 4-tori", flat["tau_components"] if flat["tau_types"] == ["coassociative"] else -1, 8)
    row("alpha-tori classes", sing["per_generator"]["alpha"]["orbits"], 4)
    row("singular T^3 classes", sing["classes"], 12)
    row("singular classes intersecting", sing["intersecting_pairs"], 0)
    row("warm-up sigma fixed tori classes", warm["sigma_orbits"], 2)
    row("warm-up tau 4-torus classes", warm["tau_four_torus_orbits"], 1)
    row("warm-up 128 fixed points", warm["isolated_points"], 128)
    row("warm-up isolated points in quotient", warm["isolated_point_orbits"], tx.QUOTED_ISOLATED_POINTS)
    row("second sigma nonempty deltas", second["sigma_nonempty"], ["Id", "alpha"])
    rep.outputs = {"rows": rows, "isolated_point_table": warm["stabilizer_table"]}
    return rep


def cmd_paper_examples(args) -> RunReport:
    return paper_examples()


COMMANDS = {
    "verify-identities": cmd_verify_identities,
    "classify-plane": cmd_classify_plane,
    "boundary-split": cmd_boundary_split,
    "index": cmd_index,
    "ebc-check": cmd_ebc_check,
    "chern": cmd_chern,
    "maslov": cmd_maslov,
    "fixed-loci": cmd_fixed_loci,
    "census": cmd_census,
    "paper-examples": cmd_paper_examples,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("file", nargs="?", help="input JSON (or use --input; '-' reads stdin)")
    common.add_argument("--input", help="input JSON file")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--trials", type=int, default=10_000)
    common.add_argument("--grid", type=int, default=360)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--z", help="psi-positive parameter for ebc-check, e.g. '0.3+0.2j'")
    out = common.add_mutually_exclusive_group()
    out.add_argument("--json", dest="pretty", action="store_false", help="machine-readable JSON (default)")
    out.add_argument("--pretty", dest="pretty", action="store_true", help="human-readable summary")
    common.set_defaults(pretty=False)
    common.add_argument("--corrupt-phi", action="store_true", help=argparse.SUPPRESS)
    parser = argparse.ArgumentParser(prog="g2calib", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.trials < 1:
        parser.error("--trials must be at least 1")
    t0 = time.perf_counter()
    try:
        rep = COMMANDS[args.command](args)
    except InputError as exc:
        print(f"g2calib {args.command}: parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except G2CalibError as exc:
        print(f"g2calib {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    rep.inputs.setdefault("seed", args.seed)
    rep.outputs["seconds"] = time.perf_counter() - t0
    print(rep.render() if args.pretty else json.dumps(rep.to_json()))
    return EXIT_OK if rep.passed else EXIT_CHECK


if __name__ == "__main__":
    sys.exit(main())

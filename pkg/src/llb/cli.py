"""Command-line entry point: ``llb {complex,tower,luck,bs,hyp} ...``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import covers, hyperbolic, library, local, lueck
from .complex import betti_number, betti_numbers
from .covers import CoverLevel, CoverTower, PermutationRep, is_normal, is_transitive
from .errors import InputError, LLBError, ResourceCapError
from .io import (
    RunManifest,
    emit_report,
    format_complex,
    format_perm_rep,
    format_value,
    read,
    report_table,
)


def _write(data: bytes, out):
    if out is None or out == "-":
        sys.stdout.write(data.decode())
    else:
        Path(out).write_bytes(data)


def _fmt_for(out, default="csv"):
    if out and str(out).endswith(".json"):
        return "json"
    return default


def _emit(result, out, manifest, fmt=None):
    fmt = fmt or _fmt_for(out)
    _write(emit_report(result, fmt, manifest), out)
    if fmt == "csv" and out not in (None, "-") and manifest is not None:
        # CSV has no room for metadata; the manifest goes next to it
        Path(str(out) + ".manifest.json").write_text(json.dumps(manifest.to_dict(), indent=2) + "\n")


def _linear_grid(spec):
    try:
        a, b, steps = spec.split(":")
        a, b, steps = float(a), float(b), int(steps)
    except ValueError:
        raise InputError(f"grid {spec!r} is not of the form a:b:steps") from None
    if a <= 0 or b < a or steps < 1:
        raise InputError(f"grid {spec!r} needs 0 < a <= b and steps >= 1")
    return np.linspace(a, b, steps) if steps > 1 else np.array([a])


# ---------------------------------------------------------------- complex


def cmd_complex_validate(args):
    K = read(args.file, "complex")
    counts = " ".join(f"{n}" for n in K.counts())
    print(f"valid: dim {K.dim}, cells per dimension {counts}, euler characteristic {K.euler_characteristic()}")


def cmd_complex_betti(args):
    K = read(args.file, "complex")
    manifest = RunManifest.for_inputs("complex betti", [args.file], {"degree": args.degree})
    if args.degree is None:
        result = betti_numbers(K)
        _emit(result, args.out, manifest)
    else:
        b = betti_number(K, args.degree)
        _emit((["degree", "betti"], [[args.degree, b]], {}), args.out, manifest)


# ---------------------------------------------------------------- tower


def _free_surjection_for(K):
    if K == library.genus2_surface():
        return covers.genus2_free_surjection()
    return None


def build_tower(K, family, depth, p=2, refine=False, modulus_base=2):
    if family == "free-chain":
        return covers.free_subgroup_chain_tower(K, depth, _free_surjection_for(K))
    return covers.normal_chain_tower(K, family, depth, p=p, refine=refine, modulus_base=modulus_base)


def write_tower(tower: CoverTower, out_dir, manifest=None):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "base.cx").write_text(format_complex(tower.base))
    levels = []
    for i, lv in enumerate(tower.levels, start=1):
        cx, perm = f"level_{i:02d}.cx", f"level_{i:02d}.perm"
        (out / cx).write_text(format_complex(lv.complex))
        (out / perm).write_text(format_perm_rep(lv.rep))
        levels.append({"level": i, "degree": lv.degree, "complex": cx, "perm": perm,
                       "is_normal": lv.is_normal, "is_connected": lv.is_connected})
    doc = {
        "manifest": manifest.to_dict() if manifest else None,
        "family": tower.family,
        "base": "base.cx",
        "nested": tower.nested,
        "trivial_intersection": tower.trivial_intersection,
        "degrees": tower.degrees,
        "levels": levels,
    }
    (out / "tower.json").write_text(json.dumps(doc, indent=2) + "\n")
    return out / "tower.json"


def load_tower(path) -> CoverTower:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read tower manifest {path}: {exc}") from None
    root = path.parent
    base = read(root / doc["base"], "complex")
    tower = CoverTower(base, family=doc.get("family", ""), nested=doc.get("nested", True),
                       trivial_intersection=doc.get("trivial_intersection", False))
    for entry in doc["levels"]:
        K = read(root / entry["complex"], "complex")
        rep = read(root / entry["perm"], "perm") if entry.get("perm") else PermutationRep(entry["degree"], ())
        tower.levels.append(CoverLevel(rep, K, int(entry["degree"]), is_normal(rep), is_transitive(rep)))
    return tower


def cmd_tower_build(args):
    K = read(args.complex, "complex")
    params = {"family": args.family, "depth": args.depth, "p": args.p, "refine": args.refine,
              "modulus_base": args.modulus_base}
    manifest = RunManifest.for_inputs("tower build", [args.complex], params)
    tower = build_tower(K, args.family, args.depth, args.p, args.refine, args.modulus_base)
    path = write_tower(tower, args.out, manifest=manifest)
    print(f"wrote {len(tower.levels)} levels (degrees {tower.degrees}) to {path}")


def cmd_tower_cover(args):
    K = read(args.complex, "complex")
    rep = read(args.rep, "perm")
    pres = covers.spanning_tree_generators(K)
    if len(rep.generators) != pres.rank:
        raise InputError(f"{pres.rank} generators needed (non-tree edges), file has {len(rep.generators)}")
    C = covers.cover_from_permutations(K, PermutationRep(rep.degree, rep.generators, pres.relators), pres)
    _write(format_complex(C).encode(), args.out)


# ---------------------------------------------------------------- luck


def cmd_luck_run(args):
    tower = load_tower(args.manifest)
    t_grid = lueck.parse_t_grid(args.t_grid)
    params = {"degree": args.degree, "t_grid": args.t_grid, "mode": args.mode, "probes": args.probes,
              "seed": args.seed, "threads": args.threads}
    manifest = RunManifest.for_inputs("luck run", [args.manifest], params)
    conv = lueck.normalized_betti_sequence(tower, args.degree)
    if len(tower.levels) >= 2:
        result = lueck.l2_betti_plateau(tower, args.degree, t_grid, mode=args.mode, probes=args.probes,
                                        seed=args.seed, threads=args.threads)
    else:
        result = lueck.heat_trace_series(tower, args.degree, t_grid, mode=args.mode, probes=args.probes,
                                         seed=args.seed, threads=args.threads)
    cols, rows, summary = report_table(result)
    summary.update(fitted_limit=conv.fitted_limit, verdict=conv.verdict)
    _emit((cols, rows, summary), args.out, manifest, "json")
    if args.out not in (None, "-"):
        csv_path = Path(args.out).with_suffix(".csv")
        csv_path.write_bytes(emit_report((cols, rows, summary), "csv"))


# ---------------------------------------------------------------- bs


def _read_graph_like(path):
    p = str(path)
    if p.endswith((".cx", ".complex")):
        return read(path, "complex").graph()
    if p.endswith(".json"):
        return read(path, "surface")
    return read(path, "graph")


def cmd_bs_census(args):
    G = _read_graph_like(args.graph)
    manifest = RunManifest.for_inputs("bs census", [args.graph], {"radius": args.radius})
    stats = local.ball_census(G, args.radius, threads=args.threads)
    out = args.out
    if out and out.endswith(".json"):
        doc = {"manifest": manifest.to_dict(), **stats.to_dict()}
        _write((json.dumps(doc, indent=2) + "\n").encode(), out)
    else:
        _emit(stats, out, manifest)


def _read_stats(path):
    try:
        return local.BallStatistics.from_dict(json.loads(Path(path).read_text()))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise InputError(f"cannot read ball statistics from {path}: {exc}") from None


def cmd_bs_compare(args):
    d = local.tv_distance(_read_stats(args.a), _read_stats(args.b))
    print(format_value(d))


def cmd_bs_thin(args):
    G = _read_graph_like(args.input)
    grid = _linear_grid(args.r_grid)
    params = {"r_grid": args.r_grid, "samples": args.samples, "seed": args.seed}
    manifest = RunManifest.for_inputs("bs thin", [args.input], params)
    if not isinstance(G, hyperbolic.HyperbolicSurface):
        grid = [Fraction(float(r)).limit_denominator(10**6) for r in grid]
    prof = local.thin_part_profile(G, grid, samples=args.samples, seed=args.seed)
    _emit(prof, args.out, manifest)


# ---------------------------------------------------------------- hyp


def cmd_hyp_trace(args):
    S = read(args.surface, "surface")
    params = {"t": args.t, "eps": args.eps, "points": args.points, "seed": args.seed, "window": args.window}
    manifest = RunManifest.for_inputs("hyp trace", [args.surface], params)
    if S.is_cyclic:
        # points at increasing distance from the core geodesic
        pts = [hyperbolic.cylinder_point(d) for d in np.linspace(0.0, 2.0, args.points)]
    else:
        pts = list(hyperbolic.dirichlet_samples(S, args.points, seed=args.seed))
    table = hyperbolic.deviation_vs_injrad(S, pts, args.t, eps=args.eps, window=args.window)
    _emit(table, args.out, manifest)


def cmd_hyp_dual(args):
    v = hyperbolic.compact_dual_l2_betti(args.space, args.degree)
    print(format_value(v))


def cmd_hyp_genus_limit(args):
    if args.max_genus < 2:
        raise InputError("--max-genus must be at least 2")
    rows = [[r.genus, r.normalized_over_pi, r.deviation_over_pi, r.deviation]
            for r in hyperbolic.genus_limit_check(range(2, args.max_genus + 1))]
    table = (["genus", "normalized_times_pi", "deviation_times_pi", "deviation"], rows, {})
    _emit(table, args.out, None, "csv")


# ---------------------------------------------------------------- parser


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=1, help="worker threads (default 1)")
    common.add_argument("--seed", type=int, default=0, help="seed for every random stream (default 0)")
    ap = argparse.ArgumentParser(prog="llb", description="Betti numbers of covers, heat traces and local statistics.")
    top = ap.add_subparsers(dest="group", required=True)

    g = top.add_parser("complex").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("validate", parents=[common])
    p.add_argument("file")
    p.set_defaults(func=cmd_complex_validate)
    p = g.add_parser("betti", parents=[common])
    p.add_argument("file")
    p.add_argument("--degree", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_complex_betti)

    g = top.add_parser("tower").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("build", parents=[common])
    p.add_argument("complex")
    p.add_argument("--family", choices=["mod-p", "cyclic", "free-chain"], required=True)
    p.add_argument("--depth", type=int, required=True)
    p.add_argument("--p", type=int, default=2, help="prime for mod-p towers")
    p.add_argument("--refine", action="store_true", help="index-p steps for mod-p towers")
    p.add_argument("--modulus-base", type=int, default=2, help="cyclic towers use Z/base^i")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_tower_build)
    p = g.add_parser("cover", parents=[common])
    p.add_argument("complex")
    p.add_argument("rep")
    p.add_argument("--out")
    p.set_defaults(func=cmd_tower_cover)

    g = top.add_parser("luck").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("run", parents=[common])
    p.add_argument("manifest")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--t-grid", default="0.1:100:20")
    p.add_argument("--mode", choices=["exact", "stochastic"], default="exact")
    p.add_argument("--probes", type=int, default=64)
    p.add_argument("--out")
    p.set_defaults(func=cmd_luck_run)

    g = top.add_parser("bs").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("census", parents=[common])
    p.add_argument("graph")
    p.add_argument("--radius", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bs_census)
    p = g.add_parser("compare", parents=[common])
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_bs_compare)
    p = g.add_parser("thin", parents=[common])
    p.add_argument("input")
    p.add_argument("--r-grid", required=True)
    p.add_argument("--samples", type=int, default=400)
    p.add_argument("--out")
    p.set_defaults(func=cmd_bs_thin)

    g = top.add_parser("hyp").add_subparsers(dest="cmd", required=True)
    p = g.add_parser("trace", parents=[common])
    p.add_argument("surface")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--eps", type=float, default=1e-6)
    p.add_argument("--points", type=int, default=8)
    p.add_argument("--window", type=float, default=hyperbolic.DEFAULT_WINDOW)
    p.add_argument("--out")
    p.set_defaults(func=cmd_hyp_trace)
    p = g.add_parser("dual", parents=[common])
    p.add_argument("--space", required=True)
    p.add_argument("--degree", type=int, required=True)
    p.set_defaults(func=cmd_hyp_dual)
    p = g.add_parser("genus-limit", parents=[common])
    p.add_argument("--max-genus", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_hyp_genus_limit)
    return ap


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ResourceCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except LLBError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

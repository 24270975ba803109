"""Text formats for complexes, permutation representations, graphs and surfaces; report emission and run manifests."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .complex import BettiVector, SimplicialComplex, validate_complex
from .covers import PermutationRep
from .errors import InputError, ParseError, ValidationError

VERSION = "0.1.0"


def _lines(text):
    for no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield no, line


def _ints(tokens, no, path):
    try:
        return [int(t) for t in tokens]
    except ValueError:
        raise ParseError(no, f"expected integers, got {' '.join(tokens)!r}", path) from None


# ---------------------------------------------------------------- complexes


def parse_complex(text, path=None) -> SimplicialComplex:
    """``dim k`` headers, each followed by one cell per line; ``#`` starts a comment."""
    raw = {}
    current = None
    for no, line in _lines(text):
        tokens = line.split()
        if tokens[0] == "dim":
            if len(tokens) != 2:
                raise ParseError(no, "header must be 'dim k'", path)
            (k,) = _ints(tokens[1:], no, path)
            if k < 0 or k in raw:
                raise ParseError(no, f"dimension {k} negative or repeated", path)
            current = k
            raw[k] = []
            continue
        if current is None:
            raise ParseError(no, "cell before any 'dim k' header", path)
        cell = _ints(tokens, no, path)
        if len(cell) != current + 1:
            raise ParseError(no, f"a {current}-cell needs {current + 1} vertices, got {len(cell)}", path)
        raw[current].append(tuple(cell))
    if not raw:
        raise ParseError(0, "no cells", path)
    top = max(raw)
    return validate_complex([raw.get(k, []) for k in range(top + 1)])


def format_complex(K: SimplicialComplex) -> str:
    out = []
    for k in range(K.dim + 1):
        out.append(f"dim {k}")
        out += [" ".join(map(str, c)) for c in K.cells(k)]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- permutation representations


def parse_perm_rep(text, path=None) -> PermutationRep:
    """First line ``degree n``, then one line per generator listing the images of 0..n-1."""
    lines = list(_lines(text))
    if not lines:
        raise ParseError(0, "empty permutation file", path)
    no, head = lines[0]
    tokens = head.split()
    if len(tokens) != 2 or tokens[0] != "degree":
        raise ParseError(no, "first line must be 'degree n'", path)
    (n,) = _ints(tokens[1:], no, path)
    if n < 1:
        raise ParseError(no, "degree must be positive", path)
    gens = []
    for no, line in lines[1:]:
        images = _ints(line.split(), no, path)
        if len(images) != n:
            raise ParseError(no, f"expected {n} images, got {len(images)}", path)
        if sorted(images) != list(range(n)):
            dup = next((v for v in images if images.count(v) > 1), None)
            reason = f"image {dup} repeated" if dup is not None else f"images must be 0..{n - 1}"
            raise ParseError(no, reason, path)
        gens.append(tuple(images))
    return PermutationRep(n, tuple(gens))


def format_perm_rep(rep: PermutationRep) -> str:
    return "\n".join([f"degree {rep.degree}"] + [" ".join(map(str, g)) for g in rep.generators]) + "\n"


# ---------------------------------------------------------------- graphs


def parse_graph(text, path=None):
    """Edge list, one ``u v`` pair per line; a lone vertex id declares an isolated vertex."""
    adj = {}
    for no, line in _lines(text):
        ids = _ints(line.split(), no, path)
        if len(ids) == 1:
            adj.setdefault(ids[0], set())
            continue
        if len(ids) != 2:
            raise ParseError(no, "expected 'u v'", path)
        u, v = ids
        if u == v:
            raise ParseError(no, f"self-loop at {u}", path)
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    if not adj:
        raise ParseError(0, "no vertices", path)
    return adj


def format_graph(adj) -> str:
    out = []
    for v in sorted(adj):
        if not adj[v]:
            out.append(str(v))
        out += [f"{v} {u}" for u in sorted(adj[v]) if u > v]
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- surfaces


def parse_surface(text, path=None):
    """JSON: ``generators`` (row-major 2x2), ``relator`` ([[index, +-1], ...]), optional
    ``label``, ``basepoint`` ([re, im]), ``domain_radius``, ``area``."""
    from .hyperbolic import HyperbolicSurface

    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.lineno, exc.msg, path) from None
    if not isinstance(d, dict) or "generators" not in d:
        raise ParseError(1, "surface JSON needs a 'generators' list", path)
    try:
        gens = [np.asarray(g, dtype=float).reshape(2, 2) for g in d["generators"]]
        relator = [(int(j), int(s)) for j, s in d.get("relator", [])]
        bp = d.get("basepoint", [0.0, 1.0])
        base = complex(float(bp[0]), float(bp[1]))
    except (TypeError, ValueError) as exc:
        raise ParseError(1, f"malformed surface field: {exc}", path) from None
    if base.imag <= 0:
        raise ValidationError("basepoint must lie in the upper half-plane")
    return HyperbolicSurface(gens, relator, base, d.get("area"), d.get("domain_radius"), d.get("label", ""))


def format_surface(S) -> str:
    d = {
        "label": S.label,
        "generators": [[float(v) for v in g.reshape(-1)] for g in S.generators],
        "relator": [[j, s] for j, s in S.relator],
        "basepoint": [complex(S.basepoint).real, complex(S.basepoint).imag],
    }
    if S.domain_radius is not None:
        d["domain_radius"] = S.domain_radius
    if S.area is not None:
        d["area"] = S.area
    return json.dumps(d, indent=2) + "\n"


# ---------------------------------------------------------------- dispatch

PARSERS = {"complex": parse_complex, "perm": parse_perm_rep, "graph": parse_graph, "surface": parse_surface}
SUFFIXES = {".cx": "complex", ".complex": "complex", ".perm": "perm", ".edges": "graph", ".graph": "graph",
            ".json": "surface"}


def parse_inputs(paths, kinds=None):
    """Parse files into domain objects; ``kinds`` overrides the suffix-based format guess."""
    out = []
    for i, p in enumerate(paths):
        p = Path(p)
        kind = kinds[i] if kinds else SUFFIXES.get(p.suffix)
        if kind not in PARSERS:
            raise InputError(f"cannot tell the format of {p}; pass a format hint")
        try:
            text = p.read_text()
        except OSError as exc:
            raise InputError(f"cannot read {p}: {exc.strerror}") from None
        out.append(PARSERS[kind](text, str(p)))
    return out


def read(path, kind):
    return parse_inputs([path], [kind])[0]


# ---------------------------------------------------------------- manifests


def sha256_file(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


@dataclass
class RunManifest:
    command: str
    inputs: list = field(default_factory=list)
    parameters: dict = field(default_factory=dict)
    version: str = VERSION
    hashes: dict = field(default_factory=dict)

    @classmethod
    def for_inputs(cls, command, inputs, parameters):
        inputs = [str(p) for p in inputs]
        return cls(command, inputs, dict(parameters), VERSION, {p: sha256_file(p) for p in inputs})

    def to_dict(self):
        return {
            "command": self.command,
            "inputs": self.inputs,
            "parameters": {k: _json_value(v) for k, v in self.parameters.items()},
            "version": self.version,
            "hashes": self.hashes,
        }


# ---------------------------------------------------------------- reports


def format_value(v):
    """Text form used in every report: 12 significant digits, rationals as p/q."""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return f"{v:.12g}"
    if isinstance(v, complex):
        return f"{v.real:.12g}{v.imag:+.12g}j"
    if v is None:
        return ""
    return str(v)


def _json_value(v):
    if isinstance(v, (Fraction, complex)):
        return format_value(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return format_value(v) if not math.isfinite(v) else float(f"{v:.12g}")
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, np.ndarray):
        return [_json_value(x) for x in v.tolist()]
    if isinstance(v, (list, tuple)):
        return [_json_value(x) for x in v]
    if isinstance(v, dict):
        return {str(k): _json_value(x) for k, x in v.items()}
    return v


def report_table(result):
    """(columns, rows, summary) for every result type the CLI emits."""
    from .hyperbolic import DeviationTable
    from .local import BallStatistics, ThinPartProfile
    from .lueck import ConvergenceReport, HeatTraceSeries, PlateauEstimate

    if isinstance(result, ConvergenceReport):
        cols = ["level", "degree", "normalized_betti"]
        summary = {"k": result.k, "base_normalized": result.base_normalized, "fitted_limit": result.fitted_limit,
                   "verdict": result.verdict}
        return cols, [[r[c] for c in cols] for r in result.rows()], summary
    if isinstance(result, HeatTraceSeries):
        cols = ["level", "degree", "normalized_betti"] + [f"trace@{format_value(float(t))}" for t in result.t_grid]
        rows = [[i + 1, d, result.normalized_betti[i]] + list(result.values[i]) for i, d in enumerate(result.degrees)]
        return cols, rows, {"k": result.k, "errors": result.errors}
    if isinstance(result, PlateauEstimate):
        cols, rows, summary = report_table(result.series)
        summary.update(plateau=result.value, t_star=result.t_star, limsup_ok=result.limsup_ok,
                       tolerance=result.tolerance)
        return cols, rows, summary
    if isinstance(result, BettiVector):
        return ["degree", "betti"], [[k, b] for k, b in enumerate(result.values)], {}
    if isinstance(result, BallStatistics):
        rows = [[code.hex(), freq] for code, freq in result.items()]
        return ["code", "frequency"], rows, {"r": result.r, "sample_size": result.sample_size}
    if isinstance(result, ThinPartProfile):
        if result.errors is None:
            return ["r", "fraction"], [[r, f] for r, f in zip(result.r_grid, result.fractions)], {}
        rows = [[r, f, e] for r, f, e in zip(result.r_grid, result.fractions, result.errors)]
        return ["r", "fraction", "std_error"], rows, {}
    if isinstance(result, DeviationTable):
        cols = ["point_re", "point_im", "injrad", "kernel", "deviation", "deviation_x_injrad2", "truncation_bound"]
        rows = [[r.point.real, r.point.imag, r.injrad, r.kernel, r.deviation, r.ratio, r.truncation_bound]
                for r in result.rows]
        return cols, rows, {"t": result.t, "empirical_c": result.empirical_c}
    if isinstance(result, tuple) and len(result) == 3:
        return result
    raise TypeError(f"no report layout for {type(result).__name__}")


def emit_report(result, fmt="csv", manifest: RunManifest | None = None) -> bytes:
    cols, rows, summary = report_table(result)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for row in rows:
            w.writerow([format_value(v) for v in row])
        return buf.getvalue().encode()
    if fmt == "json":
        doc = {
            "manifest": manifest.to_dict() if manifest else None,
            "columns": cols,
            "rows": [[_json_value(v) for v in row] for row in rows],
            "summary": _json_value(summary),
        }
        return (json.dumps(doc, indent=2) + "\n").encode()
    raise InputError(f"unknown report format {fmt!r}")

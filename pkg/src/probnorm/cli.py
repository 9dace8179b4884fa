"""Batch front-end: declarative TOML documents in, line-oriented verdicts out.

A document holds one ``[space]`` block, optional ``[sets.*]``,
``[sequences.*]`` and ``[series.*]`` blocks, and an ordered ``[[checks]]``
list.  Every check prints one ``RESULT <id> PASS|FAIL|EXHAUSTED key=value...``
line followed by ``CE ...`` lines for any counterexamples.  The exit status is
0 when no check fails, 1 otherwise, and 2 for parse or validation errors.

Numbers are TOML integers or floats, or strings: ``"p/q"`` and decimal
strings are read as exact rationals, ``"inf"`` and ``"-inf"`` as infinities.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import dbound, sequences
from .dfalgebra import (
    DistributionFn,
    PiecewiseConstant,
    Scaled,
    StandardRatio,
    StepAt,
    evaluate,
    geometric_grid,
    min_of,
)
from .geometry import Point, check_2norm_axioms, minors_vanish
from .menger2pn import (
    Prob2Norm,
    check_2pn_axioms,
    custom_space,
    indicator_space,
    is_bounded,
    standard_space,
)

EXIT_OK, EXIT_FAIL, EXIT_INVALID = 0, 1, 2
DEFAULT_SEED = 20240101
CHECK_KINDS = ("axioms", "classify", "converge", "series", "radius", "closure", "bounded")


class SpecError(Exception):
    """Validation failure tied to a document block."""

    def __init__(self, block: str, message: str):
        super().__init__(f"[{block}] {message}")
        self.block = block


# ---------------------------------------------------------------------------
# value parsing


def parse_number(value, block: str):
    if isinstance(value, bool):
        raise SpecError(block, f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return value
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity"):
            return math.inf
        if text in ("-inf", "-infinity"):
            return -math.inf
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError):
            pass
    raise SpecError(block, f"cannot read {value!r} as a number")


def parse_point(value, block: str, dim: Optional[int]) -> Point:
    if not isinstance(value, list):
        raise SpecError(block, f"a point must be a list of numbers, got {value!r}")
    try:
        p = Point(tuple(parse_number(c, block) for c in value))
    except ValueError as exc:
        raise SpecError(block, str(exc)) from None
    if dim is not None and p.dim != dim:
        raise SpecError(block, f"point {p} has dimension {p.dim}, space has {dim}")
    return p


def parse_points(value, block: str, dim: Optional[int]) -> list:
    if not isinstance(value, list) or not value:
        raise SpecError(block, "expected a non-empty list of points")
    return [parse_point(v, block, dim) for v in value]


def parse_df(spec, block: str) -> DistributionFn:
    """``{step=a}``, ``{ratio=a}``, ``{pieces=[[t,v],...]}``, ``{scaled=c, of=...}``, ``{min=[...]}``."""
    if not isinstance(spec, dict) or len(spec) == 0:
        raise SpecError(block, f"bad distribution function {spec!r}")
    try:
        if "step" in spec:
            return StepAt(parse_number(spec["step"], block))
        if "ratio" in spec:
            return StandardRatio(parse_number(spec["ratio"], block))
        if "pieces" in spec:
            return PiecewiseConstant(tuple(
                (parse_number(t, block), parse_number(v, block)) for t, v in spec["pieces"]))
        if "scaled" in spec:
            return Scaled(parse_df(spec["of"], block), parse_number(spec["scaled"], block))
        if "min" in spec:
            return min_of(parse_df(s, block) for s in spec["min"])
    except (ValueError, TypeError, KeyError) as exc:
        raise SpecError(block, f"bad distribution function {spec!r}: {exc}") from None
    raise SpecError(block, f"unknown distribution function {spec!r}")


def parse_grid(value, block: str, grid_scale: int) -> list:
    if value is None:
        return geometric_grid(-10, 20, grid_scale)
    if not isinstance(value, list) or not value:
        raise SpecError(block, "grid must be a non-empty list")
    return [parse_number(v, block) for v in value]


# ---------------------------------------------------------------------------
# document model


@dataclass
class SpecDocument:
    space: Optional[Prob2Norm]
    dim: Optional[int]
    sets: dict = field(default_factory=dict)
    sequences: dict = field(default_factory=dict)
    series: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    seed: int = DEFAULT_SEED


def _table_space(block: dict, dim: int) -> Prob2Norm:
    if "default" not in block:
        raise SpecError("space", "custom spaces need a 'default' distribution function")
    default = parse_df(block["default"], "space.default")
    dependent = parse_df(block["dependent"], "space.dependent") if "dependent" in block else None
    entries = {}
    for i, row in enumerate(block.get("table", [])):
        where = f"space.table[{i}]"
        x = parse_point(row.get("x"), where, dim)
        y = parse_point(row.get("y"), where, dim)
        entries[(x, y)] = entries[(y, x)] = parse_df(row.get("df"), where)

    def pair_map(x, y):
        if (x, y) in entries:
            return entries[(x, y)]
        if dependent is not None and minors_vanish(x, y, 0):
            return dependent
        return default

    return custom_space(pair_map, dim, "custom-table")


def _parse_space(block) -> tuple:
    if not isinstance(block, dict):
        raise SpecError("space", "missing [space] block")
    dim = block.get("dim", 2)
    if not isinstance(dim, int) or dim < 2:
        raise SpecError("space", f"dim must be an integer >= 2, got {dim!r}")
    family = block.get("family", "standard")
    if family == "standard":
        return standard_space(dim), dim
    if family == "indicator":
        return indicator_space(dim), dim
    if family == "custom":
        return _table_space(block, dim), dim
    raise SpecError("space", f"unknown family {family!r}")


def _parse_set(name: str, block: dict, dim: int):
    where = f"sets.{name}"
    if "points" in block:
        return dbound.FiniteSet(tuple(parse_points(block["points"], where, dim)))
    rule = parse_df(block["rule"], where) if "rule" in block else None
    area = parse_number(block.get("area_sup", 0), where)
    try:
        return dbound.AnalyticSet(area, rule, name)
    except ValueError as exc:
        raise SpecError(where, str(exc)) from None


def _parse_sequence(name: str, block: dict, dim: int):
    where = f"sequences.{name}"
    kind = block.get("kind", "inverse")
    try:
        if kind == "explicit":
            return sequences.SequenceRule.explicit(parse_points(block.get("points"), where, dim))
        horizon = block.get("horizon", 100)
        base = parse_point(block.get("base"), where, dim)
        direction = parse_point(block["direction"], where, dim) if "direction" in block else None
        return sequences.SequenceRule(horizon, base, direction, kind)
    except (ValueError, TypeError) as exc:
        raise SpecError(where, str(exc)) from None


def _parse_series(name: str, block: dict, dim: int):
    where = f"series.{name}"
    points = tuple(parse_points(block.get("points"), where, dim))
    weights = block.get("weights", "geometric")
    if weights == "geometric":
        ws = None
    elif isinstance(weights, list):
        ws = tuple(parse_number(w, where) for w in weights)
    else:
        raise SpecError(where, f"weights must be 'geometric' or a list, got {weights!r}")
    try:
        series = sequences.ConvexSeries(points, block.get("horizon", 30), ws)
    except (ValueError, TypeError) as exc:
        raise SpecError(where, str(exc)) from None
    if ws is not None and abs(float(sum(series.weights)) - 1) > 1e-12:
        raise SpecError(where, "weights do not sum to 1 after renormalisation")
    return series


def load_document(text: str) -> SpecDocument:
    """Parse and validate; raises ``tomllib.TOMLDecodeError`` or :class:`SpecError`."""
    raw = tomllib.loads(text)
    checks = raw.get("checks", [])
    if not isinstance(checks, list):
        raise SpecError("checks", "use [[checks]] array-of-tables entries")
    seed = raw.get("seed", DEFAULT_SEED)
    if not isinstance(seed, int):
        raise SpecError("seed", "seed must be an integer")
    if "space" not in raw:
        if checks:
            raise SpecError("space", "missing [space] block")
        return SpecDocument(None, None, checks=[], seed=seed)
    space, dim = _parse_space(raw["space"])
    doc = SpecDocument(space, dim, seed=seed)
    for name, block in raw.get("sets", {}).items():
        doc.sets[name] = _parse_set(name, block, dim)
    for name, block in raw.get("sequences", {}).items():
        doc.sequences[name] = _parse_sequence(name, block, dim)
    for name, block in raw.get("series", {}).items():
        doc.series[name] = _parse_series(name, block, dim)

    seen = set()
    for i, check in enumerate(checks):
        cid = check.get("id", f"check-{i + 1}")
        if cid in seen:
            raise SpecError(cid, "duplicate check id")
        seen.add(cid)
        kind = check.get("kind")
        if kind not in CHECK_KINDS:
            raise SpecError(cid, f"unknown check kind {kind!r}")
        for key, table in (("set", doc.sets), ("a", doc.sets), ("b", doc.sets), ("c", doc.sets),
                           ("d", doc.sets), ("sequence", doc.sequences), ("series", doc.series)):
            ref = check.get(key)
            if ref is not None and ref not in table:
                raise SpecError(cid, f"{key} {ref!r} is not defined")
        doc.checks.append(dict(check, id=cid))
    return doc


# ---------------------------------------------------------------------------
# execution


def fmt(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, Fraction):
        return str(value.numerator) if value.denominator == 1 else str(value)
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, (tuple, list)):
        return "(" + ", ".join(fmt(v) for v in value) + ")"
    return str(value)


def _result(cid: str, status: str, **kv) -> str:
    parts = [f"RESULT {cid} {status}"]
    parts += [f"{k}={fmt(v)}" for k, v in kv.items() if v is not None]
    return " ".join(parts)


@dataclass
class Overrides:
    seed: Optional[int] = None
    trials: Optional[int] = None
    grid_scale: int = 1


class _Runner:
    def __init__(self, doc: SpecDocument, ov: Overrides):
        self.doc = doc
        self.ov = ov
        self.space = doc.space

    def number(self, check: dict, key: str, default=None):
        if key not in check:
            if default is None:
                raise SpecError(check["id"], f"missing '{key}'")
            return default
        return parse_number(check[key], check["id"])

    def points(self, check: dict, key: str) -> list:
        if key not in check:
            raise SpecError(check["id"], f"missing '{key}'")
        return parse_points(check[key], check["id"], self.doc.dim)

    def ref(self, check: dict, key: str, table: dict):
        if key not in check:
            raise SpecError(check["id"], f"missing '{key}'")
        return table[check[key]]

    def seed(self, check: dict) -> int:
        if self.ov.seed is not None:
            return self.ov.seed
        return check.get("seed", self.doc.seed)

    def trials(self, check: dict, default: int) -> int:
        if self.ov.trials is not None:
            return self.ov.trials
        return check.get("trials", default)

    def grid(self, check: dict) -> list:
        return parse_grid(check.get("grid"), check["id"], self.ov.grid_scale)

    # -- check kinds --------------------------------------------------------

    def axioms(self, c: dict) -> list:
        target = c.get("target", "2pn")
        trials, seed = self.trials(c, 1000), self.seed(c)
        tol = float(self.number(c, "tol", 1e-9))
        if target == "2pn":
            grid = self.grid(c)
            reports = check_2pn_axioms(self.space, None, grid, grid, trials,
                                       dim=self.doc.dim, seed=seed, tol=tol)
        elif target == "2norm":
            reports = check_2norm_axioms(None, trials, tol, dim=self.doc.dim, seed=seed,
                                         exact=bool(c.get("exact", False)))
        elif target == "mg2pn":
            reports = dbound.check_mg2pn_axioms(self.space, None, self.grid(c), trials,
                                                dim=self.doc.dim, seed=seed, tol=tol,
                                                min_form=c.get("min_form", "split"))
        else:
            raise SpecError(c["id"], f"unknown axiom target {target!r}")
        failed = [r for r in reports if not r.passed]
        if not failed:
            return [_result(c["id"], "PASS", target=target, trials=trials,
                            axioms=",".join(r.axiom for r in reports))]
        lines = [_result(c["id"], "FAIL", axiom=failed[0].axiom,
                         failed=",".join(r.axiom for r in failed), trials=trials)]
        for r in failed:
            for w in r.failures[: c.get("max_ce", 3)]:
                lines.append(f"CE {r.axiom} {fmt(w)}")
        return lines

    def _classification_line(self, c: dict, cls: dbound.Classification) -> list:
        expect = c.get("expect")
        status = "PASS" if expect is None or expect == cls.kind.value else "FAIL"
        return [_result(c["id"], status, **{"class": cls.kind.value}, limit=float(cls.limit),
                        x0=cls.x0, d_bounded=cls.d_bounded if c.get("verbose") else None)]

    def _set_or_pair(self, c: dict):
        if "set" in c:
            return self.ref(c, "set", self.doc.sets), None
        return None, dbound.PairSet(self.ref(c, "a", self.doc.sets), self.ref(c, "b", self.doc.sets))

    def classify(self, c: dict) -> list:
        A, P = self._set_or_pair(c)
        cls = dbound.classify(A, self.space) if P is None else dbound.classify_pair(P, self.space)
        return self._classification_line(c, cls)

    def radius(self, c: dict) -> list:
        A, P = self._set_or_pair(c)
        R = dbound.radius(A, self.space) if P is None else dbound.pair_radius(P, self.space)
        at = [parse_number(t, c["id"]) for t in c.get("at", [])]
        values = {f"R({fmt(t)})": evaluate(R, t) for t in at}
        return [_result(c["id"], "PASS", df=repr(R).replace(" ", ""), limit=R.upper_limit(), **values)]

    def converge(self, c: dict) -> list:
        seq = self.ref(c, "sequence", self.doc.sequences)
        wit = self.points(c, "witnesses")
        t, alpha = self.number(c, "t"), self.number(c, "alpha")
        mode = c.get("mode", "limit")
        try:
            if mode == "limit":
                v = sequences.converges_to(self.space, seq, parse_point(c.get("limit"), c["id"], self.doc.dim),
                                           wit, t, alpha)
            elif mode == "cauchy":
                v = sequences.is_cauchy(self.space, seq, wit, t, alpha)
            elif mode == "routes":
                x = parse_point(c.get("limit"), c["id"], self.doc.dim)
                rep = sequences.route_equivalence(seq, x, wit, alpha, t)
                return [_result(c["id"], "PASS" if rep.agree else "FAIL", agree=rep.agree,
                                norm=",".join(v.status for v in rep.norm_verdicts),
                                pnorm=",".join(v.status for v in rep.pnorm_verdicts))]
            else:
                raise SpecError(c["id"], f"unknown converge mode {mode!r}")
        except ValueError as exc:
            raise SpecError(c["id"], str(exc)) from None
        if v.converged:
            return [_result(c["id"], "PASS", n0=v.n0, horizon=v.horizon, certificate=v.certificate)]
        return [_result(c["id"], "EXHAUSTED", horizon=v.horizon)]

    def series(self, c: dict) -> list:
        s = self.ref(c, "series", self.doc.series)
        wit = self.points(c, "witnesses")
        t, alpha = self.number(c, "t"), self.number(c, "alpha")
        if "polytope" in c:
            rep = sequences.convex_series_closed_probe(self.space, self.points(c, "polytope"), s,
                                                       wit, t, alpha)
            if rep.status == "NOT_CONVERGED":
                return [_result(c["id"], "EXHAUSTED", horizon=s.horizon)]
            status = "PASS" if rep.inside else "FAIL"
            lines = [_result(c["id"], status, limit=rep.verdict.limit, inside=rep.inside,
                             residual=rep.residual, tolerance=rep.tolerance)]
            if not rep.inside:
                lines.append(f"CE {fmt(rep.verdict.limit)}")
            return lines
        v = sequences.convex_series_converges(self.space, s, wit, t, alpha)
        if not v.converged:
            return [_result(c["id"], "EXHAUSTED", horizon=s.horizon)]
        return [_result(c["id"], "PASS", n0=v.cauchy.n0, limit=v.limit, tail_mass=v.tail_mass)]

    def closure(self, c: dict) -> list:
        mode = c.get("mode", "sum")
        sets = self.doc.sets
        try:
            if mode == "scaling":
                alpha = self.number(c, "alpha")
                P = dbound.PairSet(self.ref(c, "a", sets), self.ref(c, "b", sets))
                ok = dbound.scaling_closure_check(alpha, P, self.space)
                return [_result(c["id"], "PASS" if ok else "FAIL", mode=mode, alpha=alpha)]
            if mode == "sum":
                rep = dbound.sum_closure_check(self.ref(c, "a", sets), self.ref(c, "c", sets),
                                               self.ref(c, "b", sets), self.space)
            elif mode == "pair_sum":
                rep = dbound.pair_sum_closure_check(
                    dbound.PairSet(self.ref(c, "a", sets), self.ref(c, "b", sets)),
                    dbound.PairSet(self.ref(c, "c", sets), self.ref(c, "d", sets)), self.space)
            else:
                raise SpecError(c["id"], f"unknown closure mode {mode!r}")
        except dbound.PreconditionError as exc:
            raise SpecError(c["id"], str(exc)) from None
        lines = [_result(c["id"], "PASS" if rep.passed else "FAIL", mode=mode,
                         conclusion=rep.conclusion, pointwise_min=rep.pointwise_min,
                         split_min=rep.split_min)]
        lines += [f"CE {fmt(w)}" for w in rep.counterexamples[: c.get("max_ce", 3)]]
        return lines

    def bounded(self, c: dict) -> list:
        A = self.ref(c, "set", self.doc.sets)
        if not isinstance(A, dbound.FiniteSet):
            raise SpecError(c["id"], "bounded needs a finite set")
        wit = self.points(c, "witnesses")
        rs = [parse_number(r, c["id"]) for r in c.get("r", [0.5])]
        out = is_bounded(self.space, A.points, wit, rs, method=c.get("method", "auto"),
                         t_grid=self.grid(c))
        status = "PASS" if all(v is not None for v in out.values()) else "EXHAUSTED"
        return [_result(c["id"], status, **{f"t0[{fmt(r)}]": out[r] for r in rs})]


def run(doc: SpecDocument, overrides: Optional[Overrides] = None) -> tuple:
    """Execute every check in order; returns ``(report_lines, exit_status)``."""
    runner = _Runner(doc, overrides or Overrides())
    lines = []
    for check in doc.checks:
        lines.extend(getattr(runner, check["kind"])(check))
    failed = any(line.split(" ", 3)[2] == "FAIL" for line in lines if line.startswith("RESULT "))
    return lines, EXIT_FAIL if failed else EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = argparse.ArgumentParser(prog="probnorm",
                                     description="Run declarative checks on Menger 2-PN spaces.")
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="execute a document")
    p_run.add_argument("file", type=Path)
    p_run.add_argument("--seed", type=int, default=None, help="override every check's seed")
    p_run.add_argument("--trials", type=int, default=None, help="override randomised trial counts")
    p_run.add_argument("--grid-scale", type=int, default=1,
                       help="points per octave of the default geometric t-grid")
    p_val = sub.add_parser("validate", help="parse and validate only")
    p_val.add_argument("file", type=Path)
    args = parser.parse_args(argv)

    try:
        doc = load_document(args.file.read_text(encoding="utf-8"))
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except tomllib.TOMLDecodeError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SpecError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if args.command == "validate":
        print(f"OK {len(doc.checks)} checks")
        return EXIT_OK
    if args.grid_scale < 1:
        print("error: --grid-scale must be >= 1", file=sys.stderr)
        return EXIT_INVALID
    try:
        lines, status = run(doc, Overrides(args.seed, args.trials, args.grid_scale))
    except SpecError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    for line in lines:
        print(line)
    return status

"""Acceptance criteria, one test per criterion.

Each test records a ``CRITERION <n> PASS|FAIL <detail>`` line; the lines are
printed in the terminal summary and when this file is run as a script.
"""

import itertools
import math
import random
import subprocess
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from conftest import ACCEPTANCE_LINES
from probnorm.dbound import (
    AnalyticSet,
    BoundClass,
    FiniteSet,
    PairSet,
    class_predicates,
    classify,
    d_bounded_via_witness,
    pair_sum_closure_check,
    phi,
    radius,
    scaling_closure_check,
    sum_closure_check,
    witness_G_check,
)
from probnorm.dfalgebra import (
    PiecewiseConstant,
    Scaled,
    StandardRatio,
    StepAt,
    canonical_grid,
    classify_df,
    evaluate,
    exact_leq,
    geometric_grid,
)
from probnorm.geometry import Point, check_2norm_axioms, rational_point, two_norm
from probnorm.menger2pn import (
    bound_constants,
    check_2pn_axioms,
    closed_form_threshold,
    indicator_space,
    is_bounded,
    scalar_monotonicity_check,
    standard_space,
)
from probnorm.sequences import (
    ConvexSeries,
    SequenceRule,
    chain_inequality_check,
    closed_form_n0,
    convex_series_closed_probe,
    converges_to,
    route_equivalence,
)

STD, IND = standard_space(), indicator_space()
T_GRID = geometric_grid(-10, 20)
SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def report(n, ok, detail):
    line = f"CRITERION {n} {'PASS' if ok else 'FAIL'} {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def int_point(rng, lo=-5, hi=5):
    return Point((rng.randint(lo, hi), rng.randint(lo, hi)))


def disc_point(rng):
    r, a = math.sqrt(rng.random()), rng.uniform(0, 2 * math.pi)
    return Point((r * math.cos(a), r * math.sin(a)))


def oracle_max_area(points):
    best = 0.0
    for x, y in itertools.product(points, repeat=2):
        best = max(best, abs(float(np.linalg.det(np.array([x.as_floats(), y.as_floats()])))))
    return best


# 1 -------------------------------------------------------------------------

def test_c1_axiom_suites():
    timings, failures = {}, {}
    for name, space in (("standard", STD), ("indicator", IND)):
        for dim in (2, 3):
            start = time.perf_counter()
            reps = check_2pn_axioms(space, None, T_GRID, T_GRID, 10_000, dim=dim, seed=dim, tol=1e-9)
            timings[f"{name}/R{dim}"] = time.perf_counter() - start
            failures[f"{name}/R{dim}"] = sum(r.failure_count for r in reps)
    total = sum(timings.values())
    ok = not any(failures.values()) and total < 10
    detail = " ".join(f"{k}:{failures[k]}ce/{timings[k]:.2f}s" for k in timings)
    report(1, ok, f"{detail} total={total:.2f}s (limit 10s)")


# 2 -------------------------------------------------------------------------

def test_c2_two_norm_suite():
    counts = {}
    for label, kw in (("R2", dict(dim=2)), ("R3", dict(dim=3)), ("exact", dict(exact=True))):
        reps = check_2norm_axioms(trials=10_000, seed=2, **kw)
        counts[label] = {r.axiom: r.failure_count for r in reps}
    # exact mode must really be exact: areas of rational points come back as Fractions
    rng = random.Random(2)
    exact_types = all(isinstance(two_norm(rational_point(rng), rational_point(rng)), Fraction)
                      for _ in range(200))
    ok = exact_types and all(v == 0 for c in counts.values() for v in c.values())
    detail = " ".join(f"{k}:{sum(v.values())}ce" for k, v in counts.items())
    report(2, ok, f"{detail} axioms=N1,N2,N3,N4,shear exact_fractions={exact_types}")


# 3 -------------------------------------------------------------------------

def test_c3_convergence_equivalence():
    rng = random.Random(3)
    agree = 0
    for _ in range(100):
        x, u = int_point(rng, -9, 9), int_point(rng, -9, 9)
        zs = [int_point(rng, -9, 9) for _ in range(rng.randint(1, 3))]
        alpha = Fraction(rng.randint(1, 19), 20)
        t = Fraction(rng.randint(1, 40), 8)
        agree += route_equivalence(SequenceRule.affine(x, u, 200), x, zs, alpha, t).agree
    seq = SequenceRule.affine(Point.of(0, 0), Point.of(1, 0), 50)
    n0_closed = closed_form_n0(1, 1, Fraction(1, 10))
    n0_run = converges_to(STD, seq, Point.of(0, 0), [Point.of(0, 1)], 1, Fraction(1, 10)).n0
    ok = agree == 100 and n0_closed == 9 and n0_run == 9
    report(3, ok, f"agree={agree}/100 n0_closed={n0_closed} n0_search={n0_run} (expected 9)")


# 4 -------------------------------------------------------------------------

def test_c4_boundedness_constants():
    rng = random.Random(4)
    worst = 0.0
    for _ in range(1_000):
        M = 10 ** rng.uniform(-6, 6)
        r = rng.uniform(1e-3, 1 - 1e-3)
        _, back = bound_constants(M, r)
        worst = max(worst, abs(back - M) / M)
    grid = sorted(T_GRID)
    within, fixtures = 0, 0
    while fixtures < 200:
        F = [int_point(rng) for _ in range(rng.randint(1, 5))]
        W = [int_point(rng) for _ in range(rng.randint(1, 3))]
        r = rng.uniform(0.05, 0.95)
        th = closed_form_threshold(STD, F, W, r)
        if not 0 < th < grid[-1]:
            continue
        fixtures += 1
        g = is_bounded(STD, F, W, [r], method="grid", t_grid=grid)[r]
        i = grid.index(g) if g is not None else None
        within += g is not None and g >= th and (i == 0 or grid[i - 1] <= th * (1 + 1e-12))
    ok = worst <= 1e-12 and within == fixtures
    report(4, ok, f"max_rel_roundtrip={worst:.2e} (tol 1e-12) grid_within_one_step={within}/{fixtures}")


# 5 -------------------------------------------------------------------------

def test_c5_radius_oracle():
    rng = random.Random(5)
    worst, matched = 0.0, 0
    for _ in range(500):
        A = FiniteSet(tuple(int_point(rng) for _ in range(rng.randint(1, 12))))
        R = radius(A, STD)
        oracle = StandardRatio(oracle_max_area(A.points))
        grid = [t for t in canonical_grid(R, oracle) if abs(t) < 1e12]
        err = max(abs(evaluate(R, t) - evaluate(oracle, t)) for t in grid)
        err = max(err, max(abs(phi(A, STD, t) - evaluate(oracle, t)) for t in grid[::7]))
        worst = max(worst, err)
        matched += err <= 1e-12
    report(5, matched == 500, f"matched={matched}/500 max_abs_err={worst:.1e} (tol 1e-12)")


# 6 -------------------------------------------------------------------------

FIXTURES = {
    "indicator/finite": (FiniteSet((Point.of(1, 0), Point.of(0, 1), Point.of(2, 0))), IND,
                         BoundClass.CERTAINLY_BOUNDED),
    "standard/finite-sup": (AnalyticSet(2), STD, BoundClass.PERHAPS_BOUNDED),
    "custom/half-scaled": (AnalyticSet(radius_rule=Scaled(StandardRatio(1), 0.5)), STD,
                           BoundClass.PERHAPS_UNBOUNDED),
    "standard/infinite-sup": (AnalyticSet(math.inf), STD, BoundClass.CERTAINLY_UNBOUNDED),
}


def test_c6_classification():
    parts = []
    ok = True
    for name, (A, space, kind) in FIXTURES.items():
        got = classify(A, space).kind
        held = [k.value for k, v in class_predicates(radius(A, space)).items() if v]
        good = got is kind and held == [kind.value]
        ok &= good
        parts.append(f"{name}->{got.value}{'' if good else '!'}")
    report(6, ok, " ".join(parts))


# 7 -------------------------------------------------------------------------

def test_c7_witness_g():
    ok = True
    parts = []
    for name, (A, space, kind) in FIXTURES.items():
        R = radius(A, space)
        bounded = kind in (BoundClass.CERTAINLY_BOUNDED, BoundClass.PERHAPS_BOUNDED)
        forward = witness_G_check(A, space, R) if bounded else not classify_df(R).in_d_plus
        backward = d_bounded_via_witness(A, space) == bounded
        ok &= forward and backward
        parts.append(f"{name}:{'ok' if forward and backward else 'broken'}")
    grid = [t for t in geometric_grid(-10, 20, 4)]
    witnesses = ([StandardRatio(2.0 ** k) for k in range(-10, 41, 2)]
                 + [StepAt(2.0 ** k) for k in range(-10, 20)]
                 + [PiecewiseConstant(((0, v), (2.0 ** 19, 1))) for v in (0.01, 0.5, 0.99)])
    unbounded = FIXTURES["standard/infinite-sup"][0]
    rejected = sum(not witness_G_check(unbounded, STD, G, grid) for G in witnesses)
    ok &= rejected == len(witnesses) and grid[-1] >= 2.0 ** 20
    report(7, ok, " ".join(parts) + f" unbounded_rejects={rejected}/{len(witnesses)} grid_max=2^20")


# 8 -------------------------------------------------------------------------

def test_c8_monotonicity():
    rng = random.Random(8)
    passed = {"standard": 0, "indicator": 0}
    for _ in range(1_000):
        x, y = int_point(rng, -20, 20), int_point(rng, -20, 20)
        a = Fraction(rng.randint(-100, 100) or 1, rng.randint(1, 10))
        b = Fraction(rng.randint(-100, 100) or 1, rng.randint(1, 10))
        a, b = sorted((a, b), key=abs)
        for name, space in (("standard", STD), ("indicator", IND)):
            closed = exact_leq(space.nu(x * b, y), space.nu(x * a, y)) is True
            passed[name] += closed and scalar_monotonicity_check(space, x, y, a, b)
    ok = all(v == 1_000 for v in passed.values())
    report(8, ok, " ".join(f"{k}={v}/1000" for k, v in passed.items()) + " (closed-form order)")


# 9 -------------------------------------------------------------------------

def test_c9_closure():
    rng = random.Random(9)

    def fset():
        return FiniteSet(tuple(int_point(rng, -4, 4) for _ in range(rng.randint(1, 4))))

    stats = {"sum": [0, 0, 0], "pair_sum": [0, 0, 0]}
    for _ in range(200):
        for key, rep in (("sum", sum_closure_check(fset(), fset(), fset(), STD, T_GRID)),
                         ("pair_sum", pair_sum_closure_check(PairSet(fset(), fset()),
                                                             PairSet(fset(), fset()), STD, T_GRID))):
            stats[key][0] += rep.passed
            stats[key][1] += rep.conclusion
            stats[key][2] += rep.split_min
    scaling = sum(scaling_closure_check(rng.choice([-1, 1]) * rng.uniform(1e-3, 10),
                                        PairSet(fset(), fset()), STD) for _ in range(100))
    ok = stats["sum"][0] == 200 and stats["pair_sum"][0] == 200 and scaling == 100
    detail = " ".join(f"{k}: min-bound={v[0]}/200 d-bounded={v[1]}/200 split-bound={v[2]}/200"
                      for k, v in stats.items())
    report(9, ok, f"{detail} scaling={scaling}/100")


# 10 ------------------------------------------------------------------------

def test_c10_convex_series():
    rng = random.Random(10)
    chain = 0
    for _ in range(1_000):
        pts = tuple(disc_point(rng) for _ in range(rng.randint(1, 6)))
        n = rng.randint(1, 30)
        m = rng.randint(n, 30)
        t = 2.0 ** rng.uniform(-10, 10)
        chain += chain_inequality_check(STD, ConvexSeries(pts), n, m, t, int_point(rng))
    N = 30
    bound = 1e-9 + 2.0 ** -N
    inside, probes, worst = 0, 200, 0.0
    for _ in range(probes):
        verts = [disc_point(rng) for _ in range(rng.randint(1, 6))]
        k = rng.randint(1, 4)
        mix = [rng.random() for _ in range(len(verts))]
        pts = tuple(verts[:k]) if rng.random() < 0.5 else tuple(
            Point(tuple(sum(w * v.coords[c] for w, v in zip(mix, verts)) / sum(mix) for c in range(2)))
            for _ in range(1))
        series = ConvexSeries(pts, horizon=N, offset=rng.randint(0, 3))
        rep = convex_series_closed_probe(STD, verts, series, [int_point(rng, 1, 5)], 1, 0.1)
        worst = max(worst, rep.residual if rep.residual is not None else math.inf)
        inside += rep.status == "INSIDE" and rep.residual <= bound
    ok = chain == 1_000 and inside == probes
    report(10, ok, f"chain={chain}/1000 closed_probe={inside}/{probes} "
                   f"max_residual={worst:.2e} (bound 1e-9+2^-30={bound:.2e})")


# 11 ------------------------------------------------------------------------

def test_c11_cli_determinism():
    outputs = []
    for seed in ("5", "5", "6", "6"):
        proc = subprocess.run([sys.executable, "-m", "probnorm", "run", str(SAMPLES / "demo.toml"),
                               "--seed", seed], capture_output=True, check=False)
        outputs.append(proc.stdout)
    plain = [subprocess.run([sys.executable, "-m", "probnorm", "run", str(SAMPLES / "violator.toml")],
                            capture_output=True, check=False).stdout for _ in range(2)]
    ok = outputs[0] == outputs[1] and outputs[2] == outputs[3] and plain[0] == plain[1] and all(outputs)
    report(11, ok, f"byte-identical: seed5={outputs[0] == outputs[1]} seed6={outputs[2] == outputs[3]} "
                   f"document-seed={plain[0] == plain[1]} bytes={len(outputs[0])}")


if __name__ == "__main__":
    import pytest

    sys.exit(pytest.main([__file__, "-q", "-s"]))

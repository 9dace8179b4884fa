"""Probabilistic radius and D-boundedness.

The radius of a set is the left-limit regularisation of the pointwise
infimum of ``nu`` over its pairs.  Its shape sorts the set into one of four
classes: certainly bounded, perhaps bounded, perhaps unbounded, certainly
unbounded.  The first two are the D-bounded ones.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .dfalgebra import (
    CLOSED_FORM_TOL,
    DistributionFn,
    StandardRatio,
    StepAt,
    canonical_grid,
    classify_df,
    evaluate,
    geometric_grid,
    leq,
    min_of,
)
from .geometry import AxiomReport, Point, integer_point, minors_vanish, random_point
from .menger2pn import Family, PreconditionError, Prob2Norm, default_t_grid

__all__ = [
    "FiniteSet",
    "AnalyticSet",
    "SetDescriptor",
    "PairSet",
    "BoundClass",
    "Classification",
    "phi",
    "radius",
    "classify",
    "classify_radius",
    "class_predicates",
    "witness_G_check",
    "d_bounded_via_witness",
    "pair_radius",
    "pairs_radius",
    "classify_pair",
    "minkowski_sum",
    "scale_pair",
    "scaling_closure_check",
    "ClosureReport",
    "sum_closure_check",
    "pair_sum",
    "pair_sum_closure_check",
    "check_mg2pn_axioms",
]

SEARCH_GRID = geometric_grid(-10, 20)


@dataclass(frozen=True)
class FiniteSet:
    """An explicit, non-empty list of points."""

    points: tuple

    def __post_init__(self):
        if not self.points:
            raise ValueError("a finite set needs at least one point")
        object.__setattr__(self, "points", tuple(self.points))


@dataclass(frozen=True)
class AnalyticSet:
    """A set known only through the supremum of its pairwise 2-norm areas.

    ``area_sup`` is caller-certified.  With ``radius_rule`` set, that d.f. is
    taken as the pair infimum directly, whatever the space.
    """

    area_sup: float = 0.0
    radius_rule: Optional[DistributionFn] = None
    label: str = ""

    def __post_init__(self):
        if not self.area_sup >= 0:
            raise ValueError("area_sup must be >= 0")


SetDescriptor = Union[FiniteSet, AnalyticSet]


@dataclass(frozen=True)
class PairSet:
    """``A x B`` inside ``X x Y``; the infimum runs over ``x in A, y in B``."""

    a: SetDescriptor
    b: SetDescriptor


class BoundClass(str, Enum):
    CERTAINLY_BOUNDED = "certainly_bounded"
    PERHAPS_BOUNDED = "perhaps_bounded"
    PERHAPS_UNBOUNDED = "perhaps_unbounded"
    CERTAINLY_UNBOUNDED = "certainly_unbounded"


@dataclass(frozen=True)
class Classification:
    kind: BoundClass
    limit: float
    x0: Optional[float] = None
    radius: Optional[DistributionFn] = field(default=None, compare=False)

    @property
    def d_bounded(self) -> bool:
        return self.kind in (BoundClass.CERTAINLY_BOUNDED, BoundClass.PERHAPS_BOUNDED)


# ---------------------------------------------------------------------------
# radius


def _analytic_df(A: AnalyticSet, space: Prob2Norm) -> DistributionFn:
    if A.radius_rule is not None:
        return A.radius_rule
    if space.family is Family.STANDARD:
        return StandardRatio(A.area_sup)
    if space.family is Family.INDICATOR:
        return StepAt(A.area_sup)
    raise ValueError("analytic sets need a radius rule in custom spaces")


def _pairs(A: FiniteSet):
    return ((x, y) for x in A.points for y in A.points)


def phi(A: SetDescriptor, space: Prob2Norm, t) -> float:
    """``inf {nu_{x,y}(t) : x, y in A}`` at a finite ``t``.

    Finite sets are brute-forced over all ordered pairs, dependent pairs
    included.
    """
    if isinstance(A, AnalyticSet):
        return evaluate(_analytic_df(A, space), t)
    return min(evaluate(space.nu(x, y), t) for x, y in _pairs(A))


def radius(A: SetDescriptor, space: Prob2Norm) -> DistributionFn:
    """``R_A``: left limits of ``phi_A`` on ``[0, inf)`` and 1 at ``+inf``.

    Every d.f. variant is left-continuous and a finite minimum preserves
    that, so for finite sets the regularisation leaves ``phi_A`` unchanged.
    For analytic sets the closed form is already the regularised one.
    """
    if isinstance(A, AnalyticSet):
        return _analytic_df(A, space)
    return min_of(space.nu(x, y) for x, y in _pairs(A))


def pairs_radius(pairs: Iterable, space: Prob2Norm) -> DistributionFn:
    """Radius of an arbitrary subset of ``X x Y`` given as ``(x, y)`` tuples."""
    return min_of(space.nu(x, y) for x, y in pairs)


def pair_radius(P: PairSet, space: Prob2Norm) -> DistributionFn:
    """``R_{A x B}``.  An analytic side stands for the cross-pair supremum."""
    for side in (P.a, P.b):
        if isinstance(side, AnalyticSet):
            return _analytic_df(side, space)
    return pairs_radius(((x, y) for x in P.a.points for y in P.b.points), space)


# ---------------------------------------------------------------------------
# classification


def _search_points(R: DistributionFn) -> list:
    marks = [m + 1 for m in R.landmarks() if m >= 0]
    return sorted(set(marks) | set(SEARCH_GRID))


def class_predicates(R: DistributionFn) -> dict:
    """Each of the four class conditions evaluated independently on ``R``."""
    limit = R.upper_limit()
    reaches_one = R.one_from() is not None and R.one_from() < math.inf
    positive = limit > 0 and any(evaluate(R, x) > 0 for x in _search_points(R))
    return {
        BoundClass.CERTAINLY_BOUNDED: reaches_one,
        BoundClass.PERHAPS_BOUNDED: not reaches_one and limit == 1,
        BoundClass.PERHAPS_UNBOUNDED: positive and 0 < limit < 1,
        BoundClass.CERTAINLY_UNBOUNDED: limit == 0,
    }


def classify_radius(R: DistributionFn) -> Classification:
    """Four-way class of a radius function, with witnesses.

    ``x0`` for a certainly bounded radius is one past the point where it
    reaches 1 (so at least 1); for a perhaps unbounded one it is the first
    search point with a positive value.
    """
    limit = R.upper_limit()
    hit = R.one_from()
    if hit is not None:
        return Classification(BoundClass.CERTAINLY_BOUNDED, limit, max(hit, 0) + 1, R)
    if limit == 1:
        return Classification(BoundClass.PERHAPS_BOUNDED, limit, None, R)
    if limit == 0:
        return Classification(BoundClass.CERTAINLY_UNBOUNDED, limit, None, R)
    x0 = next(x for x in _search_points(R) if evaluate(R, x) > 0)
    return Classification(BoundClass.PERHAPS_UNBOUNDED, limit, x0, R)


def classify(A: SetDescriptor, space: Prob2Norm) -> Classification:
    return classify_radius(radius(A, space))


def classify_pair(P: PairSet, space: Prob2Norm) -> Classification:
    return classify_radius(pair_radius(P, space))


# ---------------------------------------------------------------------------
# witness d.f.


def witness_G_check(A: SetDescriptor, space: Prob2Norm, G: DistributionFn,
                    grid: Optional[Sequence[float]] = None) -> bool:
    """``nu_{x,y} >= G`` for every pair of ``A``.

    Each comparison is decided in closed form where the variants allow and on
    ``grid`` (canonical grid reaching 2**20 by default) otherwise.
    """
    if not classify_df(G).in_d_plus:
        raise PreconditionError("witness G must lie in D+")
    if isinstance(A, AnalyticSet):
        dfs = [_analytic_df(A, space)]
    else:
        dfs = [space.nu(x, y) for x, y in _pairs(A)]
    for F in dfs:
        g = canonical_grid(G, F) if grid is None else grid
        if not leq(G, F, g):
            return False
    return True


def d_bounded_via_witness(A: SetDescriptor, space: Prob2Norm) -> bool:
    """D-boundedness decided through the witness route with ``G = R_A``."""
    R = radius(A, space)
    if not classify_df(R).in_d_plus:
        return False
    return witness_G_check(A, space, R)


# ---------------------------------------------------------------------------
# closure theorems


def minkowski_sum(A: FiniteSet, C: FiniteSet) -> FiniteSet:
    return FiniteSet(tuple(a + c for a in A.points for c in C.points))


def scale_pair(alpha, P: PairSet) -> PairSet:
    """``alpha A x B = {(alpha p, q)}``."""
    if alpha == 0:
        raise ValueError("alpha must be non-zero")
    a = P.a
    if isinstance(a, FiniteSet):
        scaled = FiniteSet(tuple(p * alpha for p in a.points))
    elif a.radius_rule is None:
        scaled = AnalyticSet(abs(alpha) * a.area_sup, None, a.label)
    else:
        raise ValueError("cannot rescale an analytic set given only by a radius rule")
    if isinstance(P.b, AnalyticSet) and P.b.radius_rule is None:
        return PairSet(scaled, AnalyticSet(abs(alpha) * P.b.area_sup, None, P.b.label))
    return PairSet(scaled, P.b)


def scaling_closure_check(alpha, P: PairSet, space: Prob2Norm) -> bool:
    """``alpha A x B`` is D-bounded whenever ``A x B`` is."""
    if not classify_pair(P, space).d_bounded:
        raise PreconditionError("the pair set must be D-bounded")
    return classify_pair(scale_pair(alpha, P), space).d_bounded


@dataclass
class ClosureReport:
    """Outcome of a Minkowski-sum closure check.

    ``conclusion`` is D-boundedness of the sum set.  ``pointwise_min`` is the
    bound ``R_sum(t) >= min(R_1(t), R_2(t))`` on the grid and
    ``split_min`` the split-argument bound
    ``R_sum(s + t) >= min(R_1(s), R_2(t))`` on the grid product.
    ``passed`` requires the conclusion and the pointwise bound.
    """

    conclusion: bool
    pointwise_min: bool
    split_min: bool
    counterexamples: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.conclusion and self.pointwise_min


def _min_bounds(R_sum: DistributionFn, R1: DistributionFn, R2: DistributionFn,
                grid: np.ndarray, tol: float) -> tuple:
    ces = []
    lhs = R_sum.values(grid)
    rhs = np.minimum(R1.values(grid), R2.values(grid))
    bad = lhs < rhs - tol
    for i in np.flatnonzero(bad)[:5]:
        ces.append(("pointwise", float(grid[i]), float(lhs[i]), float(rhs[i])))
    S, T = np.meshgrid(grid, grid, indexing="ij")
    lhs2 = R_sum.values((S + T) * (1 + tol))
    rhs2 = np.minimum(R1.values(S), R2.values(T))
    bad2 = lhs2 < rhs2 - tol
    for i, j in list(zip(*np.nonzero(bad2)))[:5]:
        ces.append(("split", float(S[i, j]), float(T[i, j]), float(lhs2[i, j]), float(rhs2[i, j])))
    return not bad.any(), not bad2.any(), ces


def _closure_grid(grid, *fns) -> np.ndarray:
    if grid is None:
        grid = [t for t in canonical_grid(*fns) if 0 < t <= 2.0**20]
    return np.asarray(sorted(grid), dtype=float)


def sum_closure_check(A: FiniteSet, C: FiniteSet, B: FiniteSet, space: Prob2Norm,
                      grid: Optional[Sequence[float]] = None,
                      tol: float = CLOSED_FORM_TOL) -> ClosureReport:
    """``(A + C) x B`` against ``A x B`` and ``C x B``."""
    for S in (A, B, C):
        if not isinstance(S, FiniteSet):
            raise PreconditionError("closure checks need finite sets")
    R_ab = pair_radius(PairSet(A, B), space)
    R_cb = pair_radius(PairSet(C, B), space)
    if not (classify_radius(R_ab).d_bounded and classify_radius(R_cb).d_bounded):
        raise PreconditionError("A x B and C x B must be D-bounded")
    R_sum = pair_radius(PairSet(minkowski_sum(A, C), B), space)
    g = _closure_grid(grid, R_sum, R_ab, R_cb)
    pw, split, ces = _min_bounds(R_sum, R_ab, R_cb, g, tol)
    return ClosureReport(classify_radius(R_sum).d_bounded, pw, split, ces)


def pair_sum(P: PairSet, Q: PairSet) -> tuple:
    """``A x B + C x D = {(p + r, q + s)}`` as an explicit tuple of pairs."""
    return tuple((p + r, q + s)
                 for p in P.a.points for q in P.b.points
                 for r in Q.a.points for s in Q.b.points)


def pair_sum_closure_check(P: PairSet, Q: PairSet, space: Prob2Norm,
                           grid: Optional[Sequence[float]] = None,
                           tol: float = CLOSED_FORM_TOL) -> ClosureReport:
    """``A x B + C x D`` against ``A x (B + D)`` and ``C x (B + D)``."""
    A, B, C, D = P.a, P.b, Q.a, Q.b
    for S in (A, B, C, D):
        if not isinstance(S, FiniteSet):
            raise PreconditionError("closure checks need finite sets")
    for left, right in ((A, B), (C, D), (A, D), (C, B)):
        if not classify_pair(PairSet(left, right), space).d_bounded:
            raise PreconditionError("all four cross sets must be D-bounded")
    BD = minkowski_sum(B, D)
    R_1 = pair_radius(PairSet(A, BD), space)
    R_2 = pair_radius(PairSet(C, BD), space)
    R_sum = pairs_radius(pair_sum(P, Q), space)
    g = _closure_grid(grid, R_sum, R_1, R_2)
    pw, split, ces = _min_bounds(R_sum, R_1, R_2, g, tol)
    return ClosureReport(classify_radius(R_sum).d_bounded, pw, split, ces)


# ---------------------------------------------------------------------------
# generalized (two-carrier) axioms on the concrete instance X = Y


def check_mg2pn_axioms(
    space: Prob2Norm,
    sampler: Optional[Callable[[random.Random], Point]] = None,
    t_grid: Optional[Sequence[float]] = None,
    trials: int = 1000,
    *,
    dim: int = 2,
    seed: int = 0,
    tol: float = 1e-9,
    min_form: str = "split",
) -> list:
    """Randomised sweep of MG2P-N1..N6 with ``X = Y`` the space's carrier.

    N2 is taken in its Menger form (``nu = eps_0`` exactly on dependent pairs).
    ``min_form`` selects how N5/N6 are read: ``"split"`` compares
    ``nu_{x+y,z}(s+t)`` with ``min(nu_{x,z}(s), nu_{y,z}(t))``;
    ``"pointwise"`` compares both sides at the same argument.
    """
    if min_form not in ("split", "pointwise"):
        raise ValueError(f"unknown min_form {min_form!r}")
    t_arr = np.asarray(default_t_grid() if t_grid is None else t_grid, dtype=float)
    S, T = np.meshgrid(t_arr, t_arr, indexing="ij")
    rng = random.Random(seed)
    if sampler is None:
        def sampler(r):
            return integer_point(r, dim) if r.random() < 0.5 else random_point(r, dim)
    reports = {k: AxiomReport(k, trials) for k in ("N1", "N2", "N3", "N4", "N5", "N6")}

    def min_law(key, combined, first, second, witness):
        if min_form == "pointwise":
            lhs = combined.values(t_arr * (1 + tol))
            rhs = np.minimum(first.values(t_arr), second.values(t_arr))
        else:
            lhs = combined.values((S + T) * (1 + tol))
            rhs = np.minimum(first.values(S), second.values(T))
        if np.any(lhs < rhs - tol):
            reports[key].record(*witness)

    for _ in range(trials):
        x, y, z = sampler(rng), sampler(rng), sampler(rng)
        alpha = rng.uniform(-10, 10) or 1.0
        nxy = space.nu(x, y)
        if evaluate(nxy, 0) > tol:
            reports["N1"].record(x, y)
        is_eps0 = bool(np.all(nxy.values(t_arr) >= 1 - tol)) and leq(StepAt(0), nxy)
        if is_eps0 != minors_vanish(x, y, tol):
            reports["N2"].record(x, y)
        if np.any(np.abs(nxy.values(t_arr) - space.nu(y, x).values(t_arr)) > tol):
            reports["N3"].record(x, y)
        u = t_arr / abs(alpha)
        lo = nxy.values(u * (1 - tol)) - tol
        hi = nxy.values(u * (1 + tol)) + tol
        for scaled in (space.nu(x * alpha, y), space.nu(x, y * alpha)):
            v = scaled.values(t_arr)
            if np.any((v < lo) | (v > hi)):
                reports["N4"].record(x, y, alpha)
                break
        min_law("N5", space.nu(x + y, z), space.nu(x, z), space.nu(y, z), (x, y, z))
        min_law("N6", space.nu(x, y + z), space.nu(x, y), space.nu(x, z), (x, y, z))
    return list(reports.values())

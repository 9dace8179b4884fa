"""Finite-horizon convergence analysis and convex series.

Limits are not decidable, so every verdict here is about a finite prefix
``1..N``: a sequence either shows a non-empty good tail ``(n0, N]`` or the
horizon is exhausted.  Closed-form families make the exact ``n0`` reachable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import lsq_linear, nnls

from .dfalgebra import CLOSED_FORM_TOL, evaluate
from .geometry import Point, norm, two_norm
from .menger2pn import PreconditionError, Prob2Norm, standard_space

__all__ = [
    "SequenceRule",
    "Verdict",
    "converges_to",
    "is_cauchy",
    "closed_form_n0",
    "RouteReport",
    "route_equivalence",
    "ConvexSeries",
    "partial_sum",
    "tail_weight",
    "head_weight",
    "chain_inequality_check",
    "SeriesVerdict",
    "convex_series_converges",
    "renormalized_tail",
    "ClosedProbeReport",
    "in_convex_hull",
    "convex_series_closed_probe",
]


@dataclass(frozen=True)
class SequenceRule:
    """``x_n = base + c(n) * direction`` for ``n = 1..horizon``, or an explicit list.

    ``c(n)`` is ``1/n`` (``"inverse"``), ``1`` (``"offset"``), ``(-1)^n``
    (``"alternating"``) or ``0`` (``"constant"``).
    """

    horizon: int
    base: Optional[object] = None
    direction: Optional[object] = None
    kind: str = "inverse"
    points: tuple = ()

    def __post_init__(self):
        if self.points:
            object.__setattr__(self, "points", tuple(self.points))
            object.__setattr__(self, "kind", "explicit")
            if self.horizon != len(self.points):
                raise ValueError("horizon must equal the number of explicit points")
        elif self.kind not in ("inverse", "offset", "alternating", "constant"):
            raise ValueError(f"unknown sequence kind {self.kind!r}")
        elif self.base is None or (self.direction is None and self.kind != "constant"):
            raise ValueError("closed-form rules need a base point and a direction")
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")

    @classmethod
    def affine(cls, base, direction, horizon: int) -> "SequenceRule":
        return cls(horizon, base, direction, "inverse")

    @classmethod
    def explicit(cls, points: Sequence) -> "SequenceRule":
        return cls(len(points), points=tuple(points))

    def coefficient(self, n: int):
        if self.kind == "inverse":
            return Fraction(1, n)
        if self.kind == "offset":
            return 1
        if self.kind == "alternating":
            return -1 if n % 2 else 1
        return 0

    def term(self, n: int):
        if not 1 <= n <= self.horizon:
            raise IndexError(f"index {n} outside 1..{self.horizon}")
        if self.kind == "explicit":
            return self.points[n - 1]
        if self.kind == "constant":
            return self.base
        return self.base + self.direction * self.coefficient(n)

    def terms(self) -> list:
        return [self.term(n) for n in range(1, self.horizon + 1)]


@dataclass(frozen=True)
class Verdict:
    """``n0`` if a non-empty good tail ``(n0, N]`` was found, else exhaustion."""

    converged: bool
    n0: Optional[int]
    horizon: int
    certificate: Optional[float] = None

    @property
    def status(self) -> str:
        return "CONVERGED" if self.converged else "EXHAUSTED"


def _validate(t, alpha) -> None:
    if not t > 0:
        raise ValueError(f"t must be > 0, got {t!r}")
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")


def converges_to(space: Prob2Norm, seq: SequenceRule, x, witnesses: Sequence, t, alpha) -> Verdict:
    """Least ``n0 >= 1`` with ``nu_{x_n - x, z}(t) > 1 - alpha`` on ``(n0, N]``.

    The verdict is exhausted when even the last term fails.  ``certificate``
    is the smallest value seen on the good tail.
    """
    _validate(t, alpha)
    if not witnesses:
        raise ValueError("need at least one witness")
    N = seq.horizon
    last_bad = 0
    vals = []
    for n in range(1, N + 1):
        xn = seq.term(n)
        v = min(evaluate(space.nu(xn - x, z), t) for z in witnesses)
        vals.append(v)
        if not v > 1 - alpha:
            last_bad = n
    if last_bad >= N:
        return Verdict(False, None, N)
    n0 = max(1, last_bad)
    return Verdict(True, n0, N, min(vals[n0:]) if n0 < N else None)


def is_cauchy(space: Prob2Norm, seq: SequenceRule, witnesses: Sequence, t, alpha,
              horizon: Optional[int] = None) -> Verdict:
    """Least ``n0 >= 1`` with ``nu_{x_m - x_n, z}(t) > 1 - alpha`` for ``m > n > n0``.

    Exhausted unless the final pair ``(N-1, N)`` passes.
    """
    _validate(t, alpha)
    if not witnesses:
        raise ValueError("need at least one witness")
    N = seq.horizon if horizon is None else min(horizon, seq.horizon)
    xs = [seq.term(n) for n in range(1, N + 1)]
    if N == 1:
        return Verdict(True, 1, 1)
    last_bad = 0
    worst = 1.0
    for n in range(N - 1, 0, -1):
        ok = True
        row_min = 1.0
        for m in range(n + 1, N + 1):
            v = min(evaluate(space.nu(xs[m - 1] - xs[n - 1], z), t) for z in witnesses)
            row_min = min(row_min, v)
            if not v > 1 - alpha:
                ok = False
                break
        if not ok:
            last_bad = n
            break
        worst = min(worst, row_min)
    if last_bad >= N - 1:
        return Verdict(False, None, N)
    n0 = max(1, last_bad)
    return Verdict(True, n0, N, worst)


def _exact(v):
    """Rational reading of a number; floats go through their shortest decimal form."""
    if isinstance(v, float):
        return Fraction(repr(v))
    return Fraction(v)


def closed_form_n0(area, t, alpha) -> int:
    """Exact ``n0`` for ``x_n = x + u/n`` in the standard space.

    With ``area = ||u, z||`` the value is ``t / (t + area/n)``, which exceeds
    ``1 - alpha`` iff ``n > (1 - alpha) area / (alpha t)``.
    """
    _validate(t, alpha)
    bound = (1 - _exact(alpha)) * _exact(area) / (_exact(alpha) * _exact(t))
    return max(1, math.floor(bound))


@dataclass(frozen=True)
class RouteReport:
    """Side-by-side verdicts of the 2-norm route and the standard 2-P-norm route."""

    norm_verdicts: tuple
    pnorm_verdicts: tuple

    @property
    def agree(self) -> bool:
        return all(a.converged == b.converged
                   for a, b in zip(self.norm_verdicts, self.pnorm_verdicts))


def _norm_route(seq: SequenceRule, x, z, eps) -> Verdict:
    N = seq.horizon
    last_bad = 0
    for n in range(1, N + 1):
        if not two_norm(seq.term(n) - x, z) < eps:
            last_bad = n
    if last_bad >= N:
        return Verdict(False, None, N)
    return Verdict(True, max(1, last_bad), N)


def route_equivalence(seq: SequenceRule, x, witnesses: Sequence, alpha, t,
                        horizon: Optional[int] = None) -> RouteReport:
    """Run the 2-norm criterion and the standard-space criterion per witness.

    The 2-norm route asks ``||x_n - x, z|| < t alpha / (1 - alpha)`` using the
    geometry alone; the other route evaluates the standard 2-P norm.
    """
    _validate(t, alpha)
    if horizon is not None and horizon < seq.horizon:
        seq = SequenceRule.explicit([seq.term(n) for n in range(1, horizon + 1)])
    space = standard_space()
    eps = t * alpha / (1 - alpha)
    a = tuple(_norm_route(seq, x, z, eps) for z in witnesses)
    b = tuple(converges_to(space, seq, x, [z], t, alpha) for z in witnesses)
    return RouteReport(a, b)


# ---------------------------------------------------------------------------
# convex series


@dataclass(frozen=True)
class ConvexSeries:
    """``sum lambda_n x_n`` with ``lambda_n >= 0`` summing to 1.

    ``weights=None`` selects the geometric family ``lambda_n = 2^-n``; an
    explicit tuple is renormalised to total mass 1 and is zero beyond its
    length.  Points cycle through ``points`` starting at ``offset``.
    """

    points: tuple
    horizon: int = 30
    weights: Optional[tuple] = None
    offset: int = 0

    def __post_init__(self):
        if not self.points:
            raise ValueError("a convex series needs at least one point")
        object.__setattr__(self, "points", tuple(self.points))
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")
        if self.weights is not None:
            ws = tuple(self.weights)
            if not ws or any(w < 0 for w in ws):
                raise ValueError("weights must be non-negative")
            total = sum(ws)
            if not total > 0:
                raise ValueError("weights must have positive mass")
            object.__setattr__(self, "weights", tuple(w / total for w in ws))

    @property
    def geometric(self) -> bool:
        return self.weights is None

    def weight(self, n: int):
        if n < 1:
            raise IndexError("weights are indexed from 1")
        if self.geometric:
            return 2.0 ** -n
        return self.weights[n - 1] if n <= len(self.weights) else 0

    def point(self, n: int):
        return self.points[(n - 1 + self.offset) % len(self.points)]


def tail_weight(series: ConvexSeries, n: int, m=math.inf):
    """``gamma_{n,m} = sum_{i=n}^m lambda_i``; ``m = inf`` gives the full tail."""
    if n < 1 or m < n:
        raise IndexError(f"need 1 <= n <= m, got n={n}, m={m}")
    if series.geometric:
        return 2.0 ** (1 - n) - (0.0 if m == math.inf else 2.0 ** -m)
    stop = len(series.weights) if m == math.inf else min(m, len(series.weights))
    return sum(series.weights[n - 1:stop], 0 * series.weights[0])


def head_weight(series: ConvexSeries, n: int):
    """``alpha_n = sum_{i=1}^n lambda_i``."""
    if n < 1:
        raise IndexError("n must be >= 1")
    if series.geometric:
        return 1.0 - 2.0 ** -n
    return sum(series.weights[:n], 0 * series.weights[0])


def partial_sum(series: ConvexSeries, n: int, start: int = 1):
    """``sum_{i=start}^n lambda_i x_i``."""
    if not 1 <= start <= n:
        raise IndexError(f"need 1 <= start <= n, got start={start}, n={n}")
    total = series.point(start) * series.weight(start)
    for i in range(start + 1, n + 1):
        total = total + series.point(i) * series.weight(i)
    return total


def chain_inequality_check(space: Prob2Norm, series: ConvexSeries, n: int, m: int, t, z,
                           tol: float = CLOSED_FORM_TOL) -> bool:
    """``nu_{sum_{i=n}^m lambda_i x_i, z}(t) >= min_i nu_{x_i, z}(t / gamma_{n,m})``."""
    gamma = tail_weight(series, n, m)
    if gamma == 0:
        raise PreconditionError("gamma_{n,m} = 0: the block carries no weight")
    lhs = evaluate(space.nu(partial_sum(series, m, n), z), t)
    rhs = min(evaluate(space.nu(series.point(i), z), t / gamma) for i in range(n, m + 1))
    return lhs >= rhs - tol


@dataclass(frozen=True)
class SeriesVerdict:
    cauchy: Verdict
    limit: Optional[object]
    certificate: Optional[float]
    tail_mass: float

    @property
    def converged(self) -> bool:
        return self.cauchy.converged


def convex_series_converges(space: Prob2Norm, series: ConvexSeries, witnesses: Sequence,
                            t, alpha) -> SeriesVerdict:
    """Cauchy analysis of the partial sums; on success ``y_N`` estimates the sum.

    Finite weight lists are summed one step past their last weight so the
    stationary tail is always visible to the Cauchy test.
    """
    N = series.horizon if series.geometric else max(series.horizon, len(series.weights) + 1)
    sums = []
    total = None
    for n in range(1, N + 1):
        term = series.point(n) * series.weight(n)
        total = term if total is None else total + term
        sums.append(total)
    verdict = is_cauchy(space, SequenceRule.explicit(sums), witnesses, t, alpha)
    tail = tail_weight(series, N + 1) if series.geometric else 0
    if not verdict.converged:
        return SeriesVerdict(verdict, None, None, tail)
    return SeriesVerdict(verdict, sums[-1], verdict.certificate, tail)


def renormalized_tail(series: ConvexSeries, n: int) -> ConvexSeries:
    """The series ``sum_{i>=n} (lambda_i / lam) x_i`` with ``lam = sum_{i>=n} lambda_i``.

    Geometric weights renormalise to the geometric family again, with the
    point rule shifted by ``n - 1``.
    """
    if n < 1:
        raise IndexError("n must be >= 1")
    lam = tail_weight(series, n)
    if not lam > 0:
        raise PreconditionError("tail from n carries no weight")
    if series.geometric:
        return ConvexSeries(series.points, series.horizon, None, series.offset + n - 1)
    return ConvexSeries(series.points, series.horizon,
                        tuple(w / lam for w in series.weights[n - 1:]), series.offset + n - 1)


# ---------------------------------------------------------------------------
# convex-series closedness


@dataclass(frozen=True)
class ClosedProbeReport:
    verdict: SeriesVerdict
    inside: Optional[bool]
    residual: Optional[float]
    tolerance: float

    @property
    def status(self) -> str:
        if not self.verdict.converged:
            return "NOT_CONVERGED"
        return "INSIDE" if self.inside else "OUTSIDE"

    @property
    def passed(self) -> bool:
        return self.inside is not False


def _hull_gap(V: np.ndarray, target: np.ndarray, coef: np.ndarray) -> float:
    total = coef.sum()
    if not total > 0:
        return math.inf
    return float(np.linalg.norm(V @ (coef / total) - target))


def in_convex_hull(p: Point, vertices: Sequence[Point], tol: float = 1e-9) -> tuple:
    """Solve for convex coefficients of ``p``; returns ``(inside, residual)``.

    Least squares on ``sum c_i (v_i - p) = 0, sum c_i = 1`` with ``c >= 0``,
    solved by NNLS and by bounded-variable least squares.  Each candidate is
    rescaled onto the simplex, so ``residual`` is the distance from ``p`` to
    an actual point of the hull and never understates the true gap.
    """
    V = np.array([v.as_floats() for v in vertices], dtype=float).T
    target = np.array(p.as_floats(), dtype=float)
    A = np.vstack([V - target[:, None], np.ones((1, V.shape[1]))])
    b = np.zeros(A.shape[0])
    b[-1] = 1.0
    candidates = [
        nnls(A, b)[0],
        lsq_linear(A, b, bounds=(0, np.inf), method="bvls", tol=1e-14).x,
    ]
    residual = min(_hull_gap(V, target, c) for c in candidates)
    return residual <= tol, residual


def convex_series_closed_probe(space: Prob2Norm, vertices: Sequence[Point], series: ConvexSeries,
                               witnesses: Sequence, t, alpha, tol: float = 1e-9) -> ClosedProbeReport:
    """Sum a convex series over a polytope and check the limit lies in it.

    The truncated sum misses the tail mass, so membership is tested within
    ``tol + tail_mass * max |x_n|``.
    """
    verdict = convex_series_converges(space, series, witnesses, t, alpha)
    reach = max(norm(v) for v in series.points)
    allowance = tol + float(verdict.tail_mass) * reach
    if not verdict.converged:
        return ClosedProbeReport(verdict, None, None, allowance)
    inside, residual = in_convex_hull(verdict.limit, vertices, allowance)
    return ClosedProbeReport(verdict, inside, residual, allowance)

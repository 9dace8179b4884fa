"""Exact algebra of distance distribution functions.

A distribution function (d.f.) here is a non-decreasing, left-continuous map
from the extended reals into [0, 1] with ``F(-inf) = 0`` and ``F(+inf) = 1``.
Instead of wrapping arbitrary callables, every d.f. is one of a small closed
set of variants:

* :class:`StepAt` -- the unit step ``eps_a`` (0 for ``t <= a``, 1 above),
* :class:`StandardRatio` -- ``t / (t + a)`` for ``t > 0`` and 0 otherwise,
* :class:`PiecewiseConstant` -- a left-continuous staircase,
* :class:`Scaled` -- a constant multiple ``c * F`` with ``0 <= c <= 1``,
* :class:`MinOf` -- the pointwise minimum (the t-norm ``M``) of other variants.

Because the shapes are known, left limits, limits at infinity, minima and the
pointwise order can be decided in closed form for most pairs; a finite grid
is only the fallback.

Arithmetic is type-generic: feeding :class:`fractions.Fraction` arguments to
rational closed forms keeps results exact.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "CLOSED_FORM_TOL",
    "SAMPLED_TOL",
    "DistributionFn",
    "StepAt",
    "StandardRatio",
    "PiecewiseConstant",
    "Scaled",
    "MinOf",
    "DFMembership",
    "evaluate",
    "left_limit",
    "epsilon",
    "pointwise_min",
    "min_of",
    "leq",
    "exact_leq",
    "equal",
    "canonical_grid",
    "geometric_grid",
    "classify_df",
]

CLOSED_FORM_TOL = 1e-12
SAMPLED_TOL = 1e-9

INF = math.inf
SENTINEL = 2.0**40


class DistributionFn:
    """Common surface of all d.f. variants.

    Subclasses implement the finite-argument hooks; the extended-real contract
    (``F(-inf) = 0``, ``F(+inf) = 1``) is enforced here.
    """

    def __call__(self, t):
        return evaluate(self, t)

    def values(self, ts) -> np.ndarray:
        """Vectorised evaluation over an array of (extended) reals."""
        ts = np.asarray(ts, dtype=float)
        finite = np.isfinite(ts)
        if finite.all():
            return np.asarray(self._values(ts), dtype=float)
        out = np.asarray(self._values(np.where(finite, ts, 0.0)), dtype=float)
        out = np.where(ts == INF, 1.0, out)
        return np.where(ts == -INF, 0.0, out)

    # hooks -----------------------------------------------------------------
    def _value(self, t):
        raise NotImplementedError

    def _values(self, ts: np.ndarray) -> np.ndarray:
        return np.array([float(self._value(t)) for t in ts.ravel()]).reshape(ts.shape)

    def right_limit(self, t):
        """``lim F(u)`` as ``u`` decreases to the finite point ``t``."""
        raise NotImplementedError

    def upper_limit(self):
        """``lim F(t)`` as ``t -> +inf`` through the reals."""
        raise NotImplementedError

    def lower_limit(self):
        """``lim F(t)`` as ``t -> -inf`` through the reals."""
        raise NotImplementedError

    def landmarks(self) -> tuple:
        """Finite points where the closed form changes character."""
        raise NotImplementedError

    def one_from(self):
        """Least ``s`` with ``F(t) = 1`` for every finite ``t > s``; ``None`` if never."""
        raise NotImplementedError

    @property
    def is_step(self) -> bool:
        """True if the function is constant between consecutive landmarks."""
        return False


@dataclass(frozen=True)
class StepAt(DistributionFn):
    """Unit step ``eps_a``: 0 for ``t <= a`` and 1 for ``t > a``.

    ``a = +inf`` is the zero function on the reals (limit 0 at infinity) and
    ``a = -inf`` the constant 1; both remain d.f.'s under the extended-real
    convention.
    """

    a: float = 0.0

    def __post_init__(self):
        if isinstance(self.a, float) and math.isnan(self.a):
            raise ValueError("step location must not be NaN")

    def _value(self, t):
        return 1.0 if t > self.a else 0.0

    def _values(self, ts):
        return (ts > self.a).astype(float)

    def right_limit(self, t):
        return 1.0 if t >= self.a else 0.0

    def upper_limit(self):
        return 1.0 if self.a < INF else 0.0

    def lower_limit(self):
        return 1.0 if self.a == -INF else 0.0

    def landmarks(self):
        return (self.a,) if math.isfinite(self.a) else ()

    def one_from(self):
        return self.a if self.a < INF else None

    @property
    def is_step(self):
        return True


@dataclass(frozen=True)
class StandardRatio(DistributionFn):
    """``t / (t + a)`` for ``t > 0`` and 0 for ``t <= 0``.

    ``a = 0`` behaves as ``eps_0``; ``a = +inf`` is the zero function on the
    reals.
    """

    a: float = 0.0

    def __post_init__(self):
        if not self.a >= 0:
            raise ValueError(f"ratio scale must be >= 0, got {self.a!r}")

    def _value(self, t):
        if t <= 0 or self.a == INF:
            return 0.0
        return t / (t + self.a)

    def _values(self, ts):
        a = float(self.a)
        if a == INF:
            return np.zeros_like(ts)
        if a == 0:
            return (ts > 0).astype(float)
        tp = np.maximum(ts, 0.0)
        return tp / (tp + a)

    def right_limit(self, t):
        if t < 0 or self.a == INF:
            return 0.0
        if t == 0:
            return 1.0 if self.a == 0 else 0.0
        return self._value(t)

    def upper_limit(self):
        return 1.0 if self.a < INF else 0.0

    def lower_limit(self):
        return 0.0

    def landmarks(self):
        return (0.0, self.a) if 0 < self.a < INF else (0.0,)

    def one_from(self):
        return 0.0 if self.a == 0 else None

    @property
    def is_step(self):
        return self.a == 0 or self.a == INF


@dataclass(frozen=True)
class PiecewiseConstant(DistributionFn):
    """Left-continuous staircase.

    ``breakpoints`` is a sorted sequence of ``(t_k, v_k)``; the function equals
    ``v_k`` on ``(t_k, t_{k+1}]`` and 0 on ``(-inf, t_1]``.  A leading
    ``t_1 = -inf`` sets the value on the whole real line left of ``t_2``.
    """

    breakpoints: tuple = ()
    _ts: tuple = field(init=False, repr=False, compare=False)
    _vs: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        pts = tuple((t, v) for t, v in self.breakpoints)
        object.__setattr__(self, "breakpoints", pts)
        ts = tuple(t for t, _ in pts)
        vs = tuple(v for _, v in pts)
        for i, t in enumerate(ts):
            if t == INF or (isinstance(t, float) and math.isnan(t)):
                raise ValueError("breakpoints must be finite or -inf")
            if t == -INF and i != 0:
                raise ValueError("-inf may only be the first breakpoint")
            if i and not ts[i - 1] < t:
                raise ValueError("breakpoints must be strictly increasing")
        prev = 0
        for v in vs:
            if not 0 <= v <= 1:
                raise ValueError(f"value {v!r} outside [0, 1]")
            if v < prev:
                raise ValueError("values must be non-decreasing")
            prev = v
        object.__setattr__(self, "_ts", ts)
        object.__setattr__(self, "_vs", vs)

    def _value(self, t):
        i = bisect.bisect_left(self._ts, t)
        return self._vs[i - 1] if i else 0.0

    def _values(self, ts):
        if not self._ts:
            return np.zeros_like(ts)
        table = np.concatenate([[0.0], np.asarray(self._vs, dtype=float)])
        idx = np.searchsorted(np.asarray(self._ts, dtype=float), ts, side="left")
        return table[idx]

    def right_limit(self, t):
        i = bisect.bisect_right(self._ts, t)
        return self._vs[i - 1] if i else 0.0

    def upper_limit(self):
        return self._vs[-1] if self._vs else 0.0

    def lower_limit(self):
        return self._vs[0] if self._ts and self._ts[0] == -INF else 0.0

    def landmarks(self):
        return tuple(t for t in self._ts if math.isfinite(t))

    def one_from(self):
        for t, v in self.breakpoints:
            if v == 1:
                return t
        return None

    @property
    def is_step(self):
        return True


@dataclass(frozen=True)
class Scaled(DistributionFn):
    """``factor * base`` on the reals, with ``0 <= factor <= 1``."""

    base: DistributionFn
    factor: float = 1.0

    def __post_init__(self):
        if not 0 <= self.factor <= 1:
            raise ValueError(f"factor {self.factor!r} outside [0, 1]")

    def _value(self, t):
        return self.factor * self.base._value(t)

    def _values(self, ts):
        return float(self.factor) * self.base._values(ts)

    def right_limit(self, t):
        return self.factor * self.base.right_limit(t)

    def upper_limit(self):
        return self.factor * self.base.upper_limit()

    def lower_limit(self):
        return self.factor * self.base.lower_limit()

    def landmarks(self):
        return self.base.landmarks()

    def one_from(self):
        return self.base.one_from() if self.factor == 1 else None

    @property
    def is_step(self):
        return self.base.is_step


@dataclass(frozen=True)
class MinOf(DistributionFn):
    """Pointwise minimum of its parts.  Build through :func:`pointwise_min`."""

    parts: tuple = ()

    def __post_init__(self):
        if not self.parts:
            raise ValueError("MinOf needs at least one part")
        object.__setattr__(self, "parts", tuple(self.parts))

    def _value(self, t):
        return min(p._value(t) for p in self.parts)

    def _values(self, ts):
        return np.minimum.reduce([p._values(ts) for p in self.parts])

    def right_limit(self, t):
        return min(p.right_limit(t) for p in self.parts)

    def upper_limit(self):
        return min(p.upper_limit() for p in self.parts)

    def lower_limit(self):
        return min(p.lower_limit() for p in self.parts)

    def landmarks(self):
        return tuple(sorted({x for p in self.parts for x in p.landmarks()}))

    def one_from(self):
        marks = [p.one_from() for p in self.parts]
        if any(m is None for m in marks):
            return None
        return max(marks)

    @property
    def is_step(self):
        return all(p.is_step for p in self.parts)


# ---------------------------------------------------------------------------
# evaluation


def evaluate(F: DistributionFn, t):
    """``F(t)`` for an extended real ``t``."""
    if t == -INF:
        return 0.0
    if t == INF:
        return 1.0
    return F._value(t)


def left_limit(F: DistributionFn, t):
    """``lim F(u)`` as ``u`` increases to ``t``; at ``+inf`` the limit at infinity.

    Every variant is left-continuous, so at finite points this is ``F(t)``.
    """
    if t == -INF:
        raise ValueError("no left neighbourhood at -inf")
    if t == INF:
        return F.upper_limit()
    return F._value(t)


def epsilon(a) -> StepAt:
    """The unit step ``eps_a``."""
    if not math.isfinite(a):
        raise ValueError("epsilon needs a finite jump location")
    return StepAt(a)


# ---------------------------------------------------------------------------
# pointwise order


def _step_pieces(F: DistributionFn):
    """Yield ``(lo, hi, value)`` with F constant on ``(lo, hi]`` (``hi`` may be inf)."""
    marks = sorted(set(F.landmarks()))
    if not marks:
        yield (-INF, INF, F.upper_limit())
        return
    yield (-INF, marks[0], F._value(marks[0]))
    for lo, hi in zip(marks, marks[1:]):
        yield (lo, hi, F._value(hi))
    yield (marks[-1], INF, F.upper_limit())


def _ratio_form(F: DistributionFn):
    """``(c, a)`` with ``F(t) = c * t / (t + a)`` on ``t > 0``, else None."""
    if isinstance(F, StandardRatio):
        return (1, F.a)
    if isinstance(F, Scaled):
        inner = _ratio_form(F.base)
        if inner is not None:
            return (F.factor * inner[0], inner[1])
    return None


def exact_leq(F: DistributionFn, G: DistributionFn) -> Optional[bool]:
    """Decide ``F <= G`` everywhere in closed form, or return None if undecided."""
    if isinstance(G, MinOf):
        verdicts = [exact_leq(F, g) for g in G.parts]
        if any(v is False for v in verdicts):
            return False
        return True if all(verdicts) else None
    if G.is_step:
        # sup of a left-continuous non-decreasing F over (lo, hi] is F(hi)
        for lo, hi, w in _step_pieces(G):
            top = F.upper_limit() if hi == INF else F._value(hi)
            if top > w:
                return False
        return True
    if F.is_step:
        # inf of G over (lo, hi] is its right limit at lo
        for lo, hi, v in _step_pieces(F):
            bottom = G.lower_limit() if lo == -INF else G.right_limit(lo)
            if v > bottom:
                return False
        return True
    rf, rg = _ratio_form(F), _ratio_form(G)
    if rf is not None and rg is not None:
        (c1, a1), (c2, a2) = rf, rg
        if c1 == 0 or a1 == INF:
            return True
        if c2 == 0 or a2 == INF:
            return False
        return c1 <= c2 and c1 * a2 <= c2 * a1
    if isinstance(F, MinOf):
        if any(exact_leq(f, G) for f in F.parts):
            return True
    return None


def geometric_grid(lo_exp: int = -10, hi_exp: int = 20, per_octave: int = 1) -> list:
    """Points ``2**(k / per_octave)`` for ``lo_exp*per_octave <= k <= hi_exp*per_octave``."""
    n = max(1, int(per_octave))
    return [2.0 ** (k / n) for k in range(lo_exp * n, hi_exp * n + 1)]


def canonical_grid(*fns: DistributionFn, extra: Iterable = ()) -> list:
    """Landmarks of all operands, midpoints between them, a geometric sweep and sentinels."""
    marks = {0.0, -SENTINEL, SENTINEL}
    for F in fns:
        marks.update(float(x) for x in F.landmarks())
    marks.update(float(x) for x in extra)
    marks.update(geometric_grid())
    pts = sorted(marks)
    mids = [(a + b) / 2 for a, b in zip(pts, pts[1:])]
    nudges = [x + max(abs(x), 1.0) * 1e-9 for x in pts]
    return sorted(set(pts) | set(mids) | set(nudges))


def leq(F: DistributionFn, G: DistributionFn, grid: Optional[Sequence] = None,
        tol: float = CLOSED_FORM_TOL) -> bool:
    """Pointwise ``F <= G``.

    Checked on ``grid`` (the canonical grid when omitted) and, whenever the two
    variants admit a closed-form comparison, also analytically.  When no closed
    form applies the answer is grid-certified only.
    """
    if grid is None:
        grid = canonical_grid(F, G)
    elif len(grid) == 0:
        raise ValueError("grid must be non-empty")
    for t in grid:
        if evaluate(F, t) > evaluate(G, t) + tol:
            return False
    return exact_leq(F, G) is not False


def equal(F: DistributionFn, G: DistributionFn, grid: Optional[Sequence] = None,
          tol: float = CLOSED_FORM_TOL) -> bool:
    return leq(F, G, grid, tol) and leq(G, F, grid, tol)


# ---------------------------------------------------------------------------
# the t-norm M


def _merge_steps(parts: Sequence[DistributionFn]) -> DistributionFn:
    marks = sorted({x for p in parts for x in p.landmarks()})
    out = []
    start = min(p.lower_limit() for p in parts)
    if start > 0:
        out.append((-INF, start))
    current = start
    for b in marks:
        v = min(p.right_limit(b) for p in parts)
        if v != current:
            out.append((b, v))
            current = v
    if not out:
        return StepAt(INF)
    if len(out) == 1 and out[0][1] == 1:
        return StepAt(out[0][0])
    return PiecewiseConstant(tuple(out))


def min_of(fns: Iterable[DistributionFn]) -> DistributionFn:
    """Pointwise minimum of any number of d.f.'s, flattened and simplified."""
    flat: list = []
    stack = list(fns)[::-1]
    while stack:
        f = stack.pop()
        if isinstance(f, MinOf):
            stack.extend(f.parts[::-1])
        else:
            flat.append(f)
    if not flat:
        raise ValueError("min_of needs at least one operand")

    steps = [f for f in flat if f.is_step]
    ratios = [f for f in flat if isinstance(f, StandardRatio) and not f.is_step]
    rest = [f for f in flat if not f.is_step and not isinstance(f, StandardRatio)]
    merged: list = []
    if len(steps) == 1:
        merged.append(steps[0])
    elif steps:
        merged.append(_merge_steps(steps))
    if ratios:
        merged.append(max(ratios, key=lambda r: r.a))
    for f in rest:
        if f not in merged:
            merged.append(f)

    kept: list = []
    for i, f in enumerate(merged):
        dominated = any(
            exact_leq(g, f) and not (exact_leq(f, g) and j > i)
            for j, g in enumerate(merged) if j != i
        )
        if not dominated:
            kept.append(f)
    if len(kept) == 1:
        return kept[0]
    return MinOf(tuple(kept))


def pointwise_min(F: DistributionFn, G: DistributionFn) -> DistributionFn:
    """``M(F, G)``: the pointwise minimum, again a d.f."""
    return min_of((F, G))


# ---------------------------------------------------------------------------
# membership


@dataclass(frozen=True)
class DFMembership:
    in_delta: bool
    in_delta_plus: bool
    in_d: bool
    in_d_plus: bool


def classify_df(F: DistributionFn) -> DFMembership:
    """Membership of ``F`` in Delta, Delta+, D and D+."""
    lower, upper = F.lower_limit(), F.upper_limit()
    plus = F._value(0) == 0
    proper = lower == 0 and upper == 1
    return DFMembership(
        in_delta=True,
        in_delta_plus=plus,
        in_d=proper,
        in_d_plus=plus and upper == 1,
    )

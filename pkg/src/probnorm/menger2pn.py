"""Menger 2-probabilistic norms: construction, axiom sweeps, balls and boundedness."""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .dfalgebra import (
    CLOSED_FORM_TOL,
    DistributionFn,
    StandardRatio,
    StepAt,
    epsilon,
    evaluate,
    exact_leq,
    geometric_grid,
    leq,
    min_of,
    pointwise_min,
)
from .geometry import (
    DEPENDENT_MULTIPLIERS,
    AxiomReport,
    Point,
    integer_point,
    minors_vanish,
    random_point,
    two_norm,
)

__all__ = [
    "PreconditionError",
    "Family",
    "Prob2Norm",
    "PairedPoint",
    "BallQuery",
    "standard_space",
    "indicator_space",
    "custom_space",
    "product_space",
    "nu",
    "default_t_grid",
    "check_2pn_axioms",
    "ball_contains",
    "convexity_probe_ball",
    "scalar_monotonicity_check",
    "is_bounded",
    "grid_search_t0",
    "closed_form_threshold",
    "bound_constants",
]


class PreconditionError(ValueError):
    """An operation was called outside its documented precondition."""


class Family(str, Enum):
    STANDARD = "standard"
    INDICATOR = "indicator"
    CUSTOM = "custom"


def default_t_grid() -> list:
    return geometric_grid(-10, 20)


@dataclass(frozen=True)
class Prob2Norm:
    """A rule ``(x, y) -> nu_{x,y}``.

    Standard and indicator spaces are built over the Gram 2-norm of
    :mod:`probnorm.geometry` and satisfy the Menger axioms by construction.
    Custom spaces wrap an arbitrary pair map and carry no guarantee until
    checked; ``validated`` is False for them.
    """

    family: Family
    dim: Optional[int] = None
    pair_map: Optional[Callable] = None
    name: str = ""

    @property
    def validated(self) -> bool:
        return self.family is not Family.CUSTOM

    def nu(self, x, y) -> DistributionFn:
        if self.dim is not None:
            for p in (x, y):
                if p.dim != self.dim:
                    raise ValueError(f"point of dimension {p.dim} in a {self.dim}-dimensional space")
        if self.family is Family.STANDARD:
            return StandardRatio(two_norm(x, y))
        if self.family is Family.INDICATOR:
            return StepAt(two_norm(x, y))
        return self.pair_map(x, y)

    def __str__(self) -> str:
        return self.name or self.family.value


def standard_space(dim: Optional[int] = None) -> Prob2Norm:
    """``nu_{x,y}(t) = t / (t + ||x, y||)`` for ``t > 0``."""
    return Prob2Norm(Family.STANDARD, dim)


def indicator_space(dim: Optional[int] = None) -> Prob2Norm:
    """``nu_{x,y} = eps_{||x, y||}``."""
    return Prob2Norm(Family.INDICATOR, dim)


def custom_space(pair_map: Callable, dim: Optional[int] = None, name: str = "custom") -> Prob2Norm:
    return Prob2Norm(Family.CUSTOM, dim, pair_map, name)


def nu(space: Prob2Norm, x, y) -> DistributionFn:
    return space.nu(x, y)


# ---------------------------------------------------------------------------
# product spaces


@dataclass(frozen=True)
class PairedPoint:
    """An element ``(x, y)`` of ``X x Y`` with componentwise vector operations."""

    first: Point
    second: Point

    def __add__(self, other: "PairedPoint") -> "PairedPoint":
        return PairedPoint(self.first + other.first, self.second + other.second)

    def __sub__(self, other: "PairedPoint") -> "PairedPoint":
        return PairedPoint(self.first - other.first, self.second - other.second)

    def __neg__(self) -> "PairedPoint":
        return PairedPoint(-self.first, -self.second)

    def __mul__(self, alpha) -> "PairedPoint":
        return PairedPoint(self.first * alpha, self.second * alpha)

    __rmul__ = __mul__

    def __str__(self) -> str:
        return f"[{self.first},{self.second}]"


def product_space(space_x: Prob2Norm, space_y: Prob2Norm) -> Prob2Norm:
    """``nu_{[(x,y),(z,z')]} = min(nu'_{x,z}, nu''_{y,z'})`` on paired points."""

    def pair_map(p: PairedPoint, q: PairedPoint) -> DistributionFn:
        return pointwise_min(space_x.nu(p.first, q.first), space_y.nu(p.second, q.second))

    return custom_space(pair_map, None, f"{space_x}x{space_y}")


# ---------------------------------------------------------------------------
# axiom sweeps


def _default_sampler(dim: int) -> Callable[[random.Random], Point]:
    def sample(rng: random.Random) -> Point:
        if rng.random() < 0.5:
            return integer_point(rng, dim)
        return random_point(rng, dim)
    return sample


def _ones(F: DistributionFn, grid: np.ndarray, tol: float) -> bool:
    """Whether ``F = 1`` on the positive reals (closed form first, grid fallback)."""
    verdict = exact_leq(epsilon(0), F)
    if verdict is not None:
        return verdict
    return bool(np.all(F.values(grid) >= 1 - tol))


def check_2pn_axioms(
    space: Prob2Norm,
    sampler: Optional[Callable[[random.Random], Point]] = None,
    t_grid: Optional[Sequence[float]] = None,
    s_grid: Optional[Sequence[float]] = None,
    trials: int = 1000,
    *,
    dim: int = 2,
    seed: int = 0,
    tol: float = 1e-9,
) -> list:
    """Randomised sweep of the Menger axioms A1-A5.

    A4 and A5 are compared with a relative slack ``tol`` on the argument and an
    absolute slack ``tol`` on the value, so rounding at a step's jump is not
    mistaken for a violation.  A5 is exercised for positive ``s, t`` only.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    t_arr = np.asarray(default_t_grid() if t_grid is None else t_grid, dtype=float)
    s_arr = np.asarray(t_arr if s_grid is None else s_grid, dtype=float)
    if t_arr.size == 0 or s_arr.size == 0:
        raise ValueError("grids must be non-empty")
    S, T = np.meshgrid(s_arr, t_arr, indexing="ij")
    ST = (S + T) * (1 + tol)
    rng = random.Random(seed)
    sampler = sampler or _default_sampler(dim)

    reports = {k: AxiomReport(k, trials) for k in ("A1", "A2", "A3", "A4", "A5")}
    for _ in range(trials):
        x, y, z = sampler(rng), sampler(rng), sampler(rng)
        alpha = rng.choice((rng.uniform(-10, 10), rng.choice((-3, -2, 0.5, 2, 3))))
        if alpha == 0:
            alpha = 1.0
        nxy = space.nu(x, y)

        if evaluate(nxy, 0) > tol:
            reports["A1"].record(x, y, 0, evaluate(nxy, 0))

        dep = x * rng.choice(DEPENDENT_MULTIPLIERS)
        if not _ones(space.nu(x, dep), t_arr, tol):
            reports["A2"].record(x, dep, "dependent pair not eps_0")
        if isinstance(x, Point):
            dependent = minors_vanish(x, y, 0 if _is_exact(x, y) else tol)
            if _ones(nxy, t_arr, tol) != dependent:
                reports["A2"].record(x, y, "dependent" if dependent else "independent")

        gap = np.abs(nxy.values(t_arr) - space.nu(y, x).values(t_arr))
        if np.any(gap > tol):
            i = int(np.argmax(gap))
            reports["A3"].record(x, y, float(t_arr[i]))

        scaled = space.nu(x * alpha, y).values(t_arr)
        u = t_arr / abs(alpha)
        lo = nxy.values(u * (1 - tol)) - tol
        hi = nxy.values(u * (1 + tol)) + tol
        bad = (scaled < lo) | (scaled > hi)
        if np.any(bad):
            i = int(np.argmax(bad))
            reports["A4"].record(x, y, alpha, float(t_arr[i]))

        lhs = space.nu(x + y, z).values(ST)
        rhs = np.minimum(space.nu(x, z).values(S), space.nu(y, z).values(T))
        bad = lhs < rhs - tol
        if np.any(bad):
            i, j = np.unravel_index(int(np.argmax(bad)), bad.shape)
            reports["A5"].record(x, y, z, float(S[i, j]), float(T[i, j]))
    return list(reports.values())


def _is_exact(*pts: Point) -> bool:
    return all(not isinstance(c, float) for p in pts for c in p.coords)


# ---------------------------------------------------------------------------
# locally balls


@dataclass(frozen=True)
class BallQuery:
    """The locally ball ``B_{e,alpha}[x, r] = {y : nu_{x-y,e}(r) >= alpha}``."""

    center: Point
    direction: Point
    level: float
    radius: float

    def __post_init__(self):
        if not 0 < self.level < 1:
            raise ValueError(f"level must lie in (0, 1), got {self.level!r}")
        if not self.radius > 0:
            raise ValueError(f"radius must be > 0, got {self.radius!r}")


def ball_contains(space: Prob2Norm, q: BallQuery, y, slack: float = 0.0) -> bool:
    value = evaluate(space.nu(q.center - y, q.direction), q.radius)
    return value >= q.level - slack


def convexity_probe_ball(
    space: Prob2Norm,
    q: BallQuery,
    y1,
    y2,
    lambdas: Iterable[float] = (0.25, 0.5, 0.75),
) -> bool:
    """True iff every ``lam*y1 + (1-lam)*y2`` stays in the ball.

    A False return is a counterexample to the convexity of locally balls.
    Membership of the segment points allows rounding slack of 1e-12.
    """
    if not (ball_contains(space, q, y1) and ball_contains(space, q, y2)):
        raise PreconditionError("both endpoints must lie in the ball")
    return all(
        ball_contains(space, q, y1 * lam + y2 * (1 - lam), CLOSED_FORM_TOL)
        for lam in lambdas
    )


# ---------------------------------------------------------------------------
# scalar monotonicity and boundedness


def scalar_monotonicity_check(
    space: Prob2Norm, x, y, alpha, beta, t_grid: Optional[Sequence[float]] = None
) -> bool:
    """``nu_{beta x, y} <= nu_{alpha x, y}`` whenever ``|alpha| <= |beta|``."""
    if alpha == 0 or beta == 0:
        raise ValueError("scalars must be non-zero")
    if abs(alpha) > abs(beta):
        raise PreconditionError("need |alpha| <= |beta|")
    return leq(space.nu(x * beta, y), space.nu(x * alpha, y), t_grid)


def bound_constants(M, r) -> tuple:
    """``t0 = M(1-r)/r`` and the inverse ``M = t0 r / (1-r)`` recomputed from it."""
    if not M > 0:
        raise ValueError("M must be > 0")
    if not 0 < r < 1:
        raise ValueError("r must lie in (0, 1)")
    t0 = M * (1 - r) / r
    return t0, t0 * r / (1 - r)


def _max_area(F: Sequence, witnesses: Sequence):
    return max(two_norm(x, y) for x in F for y in witnesses)


def closed_form_threshold(space: Prob2Norm, F: Sequence, witnesses: Sequence, r):
    """Infimum of the certifying ``t0`` for a standard or indicator space.

    Every ``t0`` strictly above the returned value has
    ``nu_{x,y}(t0) > 1 - r`` for all ``x`` in ``F`` and ``y`` in ``witnesses``.
    """
    M = _max_area(F, witnesses)
    if space.family is Family.STANDARD:
        return M * (1 - r) / r
    if space.family is Family.INDICATOR:
        return M
    raise ValueError("closed form only for standard and indicator spaces")


def grid_search_t0(space: Prob2Norm, F: Sequence, witnesses: Sequence, r,
                   t_grid: Optional[Sequence[float]] = None) -> Optional[float]:
    """Least grid ``t0`` with ``min nu_{x,y}(t0) > 1 - r``, or None."""
    floor = min_of(space.nu(x, y) for x in F for y in witnesses)
    for t in sorted(default_t_grid() if t_grid is None else t_grid):
        if t > 0 and evaluate(floor, t) > 1 - r:
            return t
    return None


def is_bounded(
    space: Prob2Norm,
    F: Sequence,
    witnesses: Sequence,
    r_grid: Iterable[float],
    *,
    method: str = "auto",
    t_grid: Optional[Sequence[float]] = None,
) -> dict:
    """Probabilistic boundedness of ``F`` against the witness points, per ``r``.

    ``method="auto"`` uses the closed-form threshold on standard and indicator
    spaces (returned as the infimum of certifying values; when it is 0 every
    positive ``t0`` works and the smallest grid value is reported) and grid
    search otherwise.  ``None`` means the search bound was exhausted.
    """
    if not F or not witnesses:
        raise ValueError("F and witnesses must be non-empty")
    if method not in ("auto", "grid", "closed"):
        raise ValueError(f"unknown method {method!r}")
    closed = method != "grid" and space.family in (Family.STANDARD, Family.INDICATOR)
    if method == "closed" and not closed:
        raise ValueError("closed form only for standard and indicator spaces")
    grid = sorted(default_t_grid() if t_grid is None else t_grid)
    out = {}
    for r in r_grid:
        if not 0 < r < 1:
            raise ValueError(f"r must lie in (0, 1), got {r!r}")
        if closed:
            th = closed_form_threshold(space, F, witnesses, r)
            out[r] = th if th > 0 else next(t for t in grid if t > 0)
        else:
            out[r] = grid_search_t0(space, F, witnesses, r, grid)
    return out

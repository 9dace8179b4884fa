"""2-norms on R^d: parallelogram areas and an axiom verifier."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Integral, Real
from typing import Callable, Optional

__all__ = [
    "Point",
    "AxiomReport",
    "two_norm",
    "two_norm_squared",
    "is_dependent",
    "minors_vanish",
    "norm",
    "random_point",
    "integer_point",
    "rational_point",
    "check_2norm_axioms",
]

DEFAULT_TOL = 1e-9
MAX_RECORDED = 20


def _plain(c):
    if type(c) in (int, float, Fraction):
        return c
    if isinstance(c, Integral):
        return int(c)
    if isinstance(c, Fraction):
        return c
    return float(c)


@dataclass(frozen=True)
class Point:
    """A vector of R^d, d >= 2.

    Coordinates may be ints, floats or :class:`~fractions.Fraction`; sums and
    scalar multiples keep exact types exact.
    """

    coords: tuple

    def __post_init__(self):
        coords = tuple(self.coords)
        if len(coords) < 2:
            raise ValueError(f"dimension must be >= 2, got {len(coords)}")
        for c in coords:
            kind = type(c)
            if kind is float:
                if not math.isfinite(c):
                    raise ValueError(f"coordinate {c!r} is not finite")
            elif kind is not int and kind is not Fraction:
                if not isinstance(c, Real) or isinstance(c, bool):
                    raise ValueError(f"coordinate {c!r} is not a real number")
                # numpy scalars and friends become plain int or float
                coords = tuple(_plain(v) for v in coords)
                if not all(math.isfinite(v) for v in coords):
                    raise ValueError(f"coordinates {coords!r} are not all finite")
                break
        object.__setattr__(self, "coords", coords)

    @classmethod
    def of(cls, *coords) -> "Point":
        return cls(coords)

    @classmethod
    def zero(cls, dim: int) -> "Point":
        return cls((0,) * dim)

    @property
    def dim(self) -> int:
        return len(self.coords)

    def _check(self, other: "Point") -> None:
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __add__(self, other: "Point") -> "Point":
        self._check(other)
        return Point(tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "Point") -> "Point":
        self._check(other)
        return Point(tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "Point":
        return Point(tuple(-a for a in self.coords))

    def __mul__(self, alpha) -> "Point":
        return Point(tuple(alpha * a for a in self.coords))

    __rmul__ = __mul__

    def dot(self, other: "Point"):
        self._check(other)
        return sum(a * b for a, b in zip(self.coords, other.coords))

    def as_floats(self) -> tuple:
        return tuple(float(c) for c in self.coords)

    def __str__(self) -> str:
        return "(" + ",".join(_fmt(c) for c in self.coords) + ")"


def _fmt(c) -> str:
    if isinstance(c, Fraction):
        return str(c) if c.denominator != 1 else str(c.numerator)
    return repr(c)


def norm(x: Point) -> float:
    return math.sqrt(float(x.dot(x)))


def _coords(x: Point, y: Point) -> tuple:
    xc, yc = x.coords, y.coords
    if len(xc) != len(yc):
        raise ValueError(f"dimension mismatch: {len(xc)} vs {len(yc)}")
    return xc, yc


def two_norm_squared(x: Point, y: Point):
    """Gram determinant ``<x,x><y,y> - <x,y>^2``; exact for rational input."""
    xc, yc = _coords(x, y)
    if len(xc) == 2:
        det = xc[0] * yc[1] - xc[1] * yc[0]
        return det * det
    if float not in map(type, xc + yc):
        xy = x.dot(y)
        return x.dot(x) * y.dot(y) - xy * xy
    # <x,x><y,y> - <x,y>^2 cancels badly for near-parallel floats; one
    # Gram-Schmidt step gives the same determinant as |u|^2 |v - proj_u v|^2.
    # Canonical ordering keeps the result symmetric bit for bit.
    u, v = (xc, yc) if xc <= yc else (yc, xc)
    uu = sum([a * a for a in u])
    if uu == 0:
        return 0.0
    c = sum([a * b for a, b in zip(u, v)]) / uu
    return uu * sum([(b - c * a) ** 2 for a, b in zip(u, v)])


def two_norm(x: Point, y: Point):
    """Area of the parallelogram spanned by ``x`` and ``y``.

    In R^2 this is ``|x1*y2 - x2*y1|`` and stays exact for rational
    coordinates.  For d > 2 it is the square root of the 2x2 Gram determinant.
    """
    xc, yc = _coords(x, y)
    if len(xc) == 2:
        return abs(xc[0] * yc[1] - xc[1] * yc[0])
    return math.sqrt(float(two_norm_squared(x, y)))


def is_dependent(x: Point, y: Point, tol: float = DEFAULT_TOL) -> bool:
    """Scale-aware dependence test: ``area <= tol * max(1, |x| |y|)``."""
    area = two_norm(x, y)
    if tol == 0:
        return area == 0
    return area <= tol * max(1.0, norm(x) * norm(y))


def minors_vanish(x: Point, y: Point, tol: float = DEFAULT_TOL) -> bool:
    """Dependence via all 2x2 minors; independent of the Gram route."""
    x._check(y)
    scale = tol * max(1.0, norm(x) * norm(y))
    for i in range(x.dim):
        for j in range(i + 1, x.dim):
            m = x.coords[i] * y.coords[j] - x.coords[j] * y.coords[i]
            if (m != 0) if tol == 0 else abs(m) > scale:
                return False
    return True


# ---------------------------------------------------------------------------
# samplers


def random_point(rng: random.Random, dim: int = 2, spread: float = 10.0) -> Point:
    return Point(tuple(rng.uniform(-spread, spread) for _ in range(dim)))


def integer_point(rng: random.Random, dim: int = 2, bound: int = 10) -> Point:
    return Point(tuple(rng.randint(-bound, bound) for _ in range(dim)))


def rational_point(rng: random.Random, dim: int = 2, bound: int = 10, den: int = 12) -> Point:
    return Point(tuple(Fraction(rng.randint(-bound * den, bound * den), rng.randint(1, den))
                       for _ in range(dim)))


def _mixed_sampler(dim: int) -> Callable[[random.Random], Point]:
    def sample(rng: random.Random) -> Point:
        if rng.random() < 0.5:
            return integer_point(rng, dim)
        return random_point(rng, dim)
    return sample


# ---------------------------------------------------------------------------
# axiom verification


@dataclass
class AxiomReport:
    """Outcome of one axiom sweep; ``failures`` holds counterexample tuples."""

    axiom: str
    trials: int = 0
    failures: list = field(default_factory=list)
    failure_count: int = 0

    @property
    def passed(self) -> bool:
        return self.failure_count == 0

    def record(self, *witness) -> None:
        self.failure_count += 1
        if len(self.failures) < MAX_RECORDED:
            self.failures.append(witness)


DEPENDENT_MULTIPLIERS = (1, -1, 2, -2, Fraction(1, 2), Fraction(-1, 2))


def check_2norm_axioms(
    sampler: Optional[Callable[[random.Random], Point]] = None,
    trials: int = 1000,
    tol: float = DEFAULT_TOL,
    *,
    dim: int = 2,
    seed: int = 0,
    exact: bool = False,
) -> list:
    """Randomised check of N1-N4 and the shear identity ``||x, y + a x|| = ||x, y||``.

    With ``exact=True`` (rational samples in R^2) every comparison is an
    exact equality or inequality and ``tol`` is ignored.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    rng = random.Random(seed)
    if sampler is None:
        sampler = (lambda r: rational_point(r, dim)) if exact else _mixed_sampler(dim)

    def slack(scale: float):
        # exact mode compares rationals with no float contamination
        return 0 if exact else tol * max(1.0, scale)

    n1 = AxiomReport("N1", trials)
    n2 = AxiomReport("N2", trials)
    n3 = AxiomReport("N3", trials)
    n4 = AxiomReport("N4", trials)
    shear = AxiomReport("shear", trials)

    for _ in range(trials):
        x, y, z = sampler(rng), sampler(rng), sampler(rng)
        if exact:
            alpha = Fraction(rng.randint(-60, 60), rng.randint(1, 12))
        else:
            alpha = rng.uniform(-10, 10)
        nx, ny, nz = norm(x), norm(y), norm(z)

        # N1, forward: a constructed dependent pair has zero area
        lam = rng.choice(DEPENDENT_MULTIPLIERS)
        dep = x * lam
        dep_tol = 0 if exact else tol
        if not is_dependent(x, dep, dep_tol):
            n1.record(x, dep, two_norm(x, dep))
        # N1, both directions on the sampled pair, dependence decided by minors
        if is_dependent(x, y, dep_tol) != minors_vanish(x, y, dep_tol):
            n1.record(x, y, two_norm(x, y))

        if two_norm(x, y) != two_norm(y, x):
            n2.record(x, y)

        lhs = two_norm(x * alpha, y)
        rhs = abs(alpha) * two_norm(x, y)
        if abs(lhs - rhs) > slack(abs(float(alpha)) * nx * ny):
            n3.record(x, y, alpha, lhs, rhs)

        lhs = two_norm(x + y, z)
        rhs = two_norm(x, z) + two_norm(y, z)
        if lhs > rhs + slack((nx + ny) * nz):
            n4.record(x, y, z, lhs, rhs)

        lhs = two_norm(x, y + x * alpha)
        rhs = two_norm(x, y)
        if abs(lhs - rhs) > slack(nx * (ny + abs(float(alpha)) * nx)):
            shear.record(x, y, alpha, lhs, rhs)

    return [n1, n2, n3, n4, shear]

"""
Plane geometry kernel
Arithmetic backends and frame-agnostic primitives shared by every other module.

Two backends are supported: exact rationals (``fractions.Fraction``) and
IEEE-754 doubles (``float``). Plain ``int`` values are backend-neutral and are
promoted to whichever backend they meet. Mixing ``Fraction`` and ``float`` in
one value or one operation raises ``BackendMismatchError``.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterator, Optional, Sequence, Tuple, Union

import numpy as np

from . import constants

logger = logging.getLogger(__name__)

Scalar = Union[Fraction, float]


class GeometryError(Exception):
    """Base exception for geometric failures; carries a machine-readable code."""

    code = "GEOMETRY_ERROR"

    def __init__(self, message: str, code: Optional[str] = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class CoincidentPointsError(GeometryError):
    code = "COINCIDENT_POINTS"


class PointNotOnCircleError(GeometryError):
    code = "POINT_NOT_ON_CIRCLE"


class CollinearPointsError(GeometryError):
    code = "COLLINEAR_POINTS"


class BackendMismatchError(GeometryError):
    code = "BACKEND_MISMATCH"


class DegeneratePointCircleError(GeometryError):
    code = "DEGENERATE_POINT_CIRCLE"


class Backend(str, Enum):
    EXACT = "exact"
    DOUBLE = "double"


def backend_of(*values: Union[Scalar, int]) -> Backend:
    """Returns the backend shared by ``values``; ints are neutral."""
    seen = set()
    for value in values:
        if isinstance(value, bool):
            raise TypeError(f"Booleans are not scalars: {value!r}")
        if isinstance(value, float):
            seen.add(Backend.DOUBLE)
        elif isinstance(value, Fraction):
            seen.add(Backend.EXACT)
        elif not isinstance(value, int):
            raise TypeError(f"Unsupported scalar type {type(value).__name__}: {value!r}")
    if len(seen) > 1:
        raise BackendMismatchError(f"Cannot mix exact and double scalars: {values!r}")
    return seen.pop() if seen else Backend.EXACT


def coerce(*values: Union[Scalar, int]) -> Tuple[Scalar, ...]:
    """Promotes ``values`` to their common backend."""
    if backend_of(*values) is Backend.DOUBLE:
        return tuple(float(v) for v in values)
    return tuple(Fraction(v) for v in values)


def to_scalar(value: Union[Scalar, int, str], backend: Backend = Backend.EXACT) -> Scalar:
    """Converts ``value`` (number or ``"p/q"``/decimal string) to ``backend``."""
    if isinstance(value, str):
        try:
            value = Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as e:
            raise ValueError(f"Not a rational number: {value!r}") from e
    if isinstance(value, bool):
        raise TypeError(f"Booleans are not scalars: {value!r}")
    if backend is Backend.DOUBLE:
        result = float(value)
        if not math.isfinite(result):
            raise ValueError(f"Scalar must be finite: {value!r}")
        return result
    if isinstance(value, float):
        raise BackendMismatchError(
            f"Float {value!r} cannot enter the exact backend; pass a Fraction or 'p/q' string"
        )
    return Fraction(value)


def is_zero(value: Scalar, scale: float = 1.0) -> bool:
    """
    Exact ``== 0`` for rationals; for doubles ``|value| <= 1e-9 * scale``.

    ``scale`` is the largest intermediate magnitude behind ``value``. It is
    not floored, so a zero scale demands an exact zero.
    """
    if isinstance(value, float):
        return abs(value) <= constants.RELATIVE_TOLERANCE * abs(float(scale))
    return value == 0


def magnitude(*values: Scalar) -> float:
    """Largest absolute value among ``values`` as a float (tolerance scaling)."""
    return max((abs(float(v)) for v in values), default=0.0)


@dataclass(frozen=True)
class Point:
    x: Scalar
    y: Scalar

    def __post_init__(self):
        x, y = coerce(self.x, self.y)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    @property
    def backend(self) -> Backend:
        return backend_of(self.x, self.y)

    def __iter__(self) -> Iterator[Scalar]:
        return iter((self.x, self.y))

    def __add__(self, other: "Point") -> "Point":
        x1, y1, x2, y2 = coerce(self.x, self.y, other.x, other.y)
        return Point(x1 + x2, y1 + y2)

    def __sub__(self, other: "Point") -> "Point":
        x1, y1, x2, y2 = coerce(self.x, self.y, other.x, other.y)
        return Point(x1 - x2, y1 - y2)

    def __neg__(self) -> "Point":
        return Point(-self.x, -self.y)

    def __mul__(self, factor: Union[Scalar, int]) -> "Point":
        x, y, k = coerce(self.x, self.y, factor)
        return Point(x * k, y * k)

    __rmul__ = __mul__

    def __truediv__(self, divisor: Union[Scalar, int]) -> "Point":
        x, y, k = coerce(self.x, self.y, divisor)
        return Point(x / k, y / k)

    def dot(self, other: "Point") -> Scalar:
        x1, y1, x2, y2 = coerce(self.x, self.y, other.x, other.y)
        return x1 * x2 + y1 * y2

    def norm_squared(self) -> Scalar:
        return self.x * self.x + self.y * self.y

    def magnitude(self) -> float:
        return magnitude(self.x, self.y)

    def as_double(self) -> "Point":
        return Point(float(self.x), float(self.y))

    def __str__(self):
        return f"({self.x}, {self.y})"


def same_point(p1: Point, p2: Point, scale: Optional[float] = None) -> bool:
    """
    Exact equality for rationals; coordinate-wise relative tolerance for doubles.

    ``scale`` defaults to the larger coordinate magnitude of the two points.
    Callers that know the size of the figure (a circumradius) pass it instead.
    """
    delta = p1 - p2
    if scale is None:
        scale = max(p1.magnitude(), p2.magnitude())
    return is_zero(delta.x, scale) and is_zero(delta.y, scale)


def origin(backend: Backend = Backend.EXACT) -> Point:
    return Point(0.0, 0.0) if backend is Backend.DOUBLE else Point(0, 0)


@dataclass(frozen=True, eq=False)
class Line:
    """The line ``alpha*x + beta*y + gamma = 0``; equality is up to scale."""

    alpha: Scalar
    beta: Scalar
    gamma: Scalar

    def __post_init__(self):
        alpha, beta, gamma = coerce(self.alpha, self.beta, self.gamma)
        scale = magnitude(alpha, beta, gamma)
        if is_zero(alpha, scale) and is_zero(beta, scale):
            raise GeometryError(f"Not a line: alpha and beta both vanish ({alpha}, {beta}, {gamma})")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", gamma)

    @property
    def backend(self) -> Backend:
        return backend_of(self.alpha, self.beta, self.gamma)

    def normalized(self) -> Tuple[Scalar, Scalar, Scalar]:
        """Coefficients divided by the first nonzero of alpha, beta."""
        scale = magnitude(self.alpha, self.beta, self.gamma)
        lead = self.beta if is_zero(self.alpha, scale) else self.alpha
        return (self.alpha / lead, self.beta / lead, self.gamma / lead)

    def evaluate(self, p: Point) -> Scalar:
        alpha, beta, gamma, x, y = coerce(self.alpha, self.beta, self.gamma, p.x, p.y)
        return alpha * x + beta * y + gamma

    def contains(self, p: Point) -> bool:
        alpha, beta, gamma, x, y = coerce(self.alpha, self.beta, self.gamma, p.x, p.y)
        return is_zero(self.evaluate(p), magnitude(alpha * x, beta * y, gamma))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Line):
            return NotImplemented
        mine, theirs = self.normalized(), other.normalized()
        values = coerce(*mine, *theirs)
        scale = magnitude(*values)
        return all(is_zero(a - b, scale) for a, b in zip(values[:3], values[3:]))

    def __repr__(self):
        return f"Line({self.alpha}*x + {self.beta}*y + {self.gamma} = 0)"


@dataclass(frozen=True)
class Circle:
    """The circle ``x^2 + y^2 + 2*g*x + 2*f*y + t = 0`` (center (-g, -f))."""

    g: Scalar
    f: Scalar
    t: Scalar

    def __post_init__(self):
        g, f, t = coerce(self.g, self.f, self.t)
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "f", f)
        object.__setattr__(self, "t", t)
        r2 = g * g + f * f - t
        if r2 < 0 and not is_zero(r2, magnitude(g * g, f * f, t)):
            raise GeometryError(f"Imaginary circle: squared radius {r2} < 0")

    @classmethod
    def unit(cls, backend: Backend = Backend.EXACT) -> "Circle":
        if backend is Backend.DOUBLE:
            return cls(0.0, 0.0, -1.0)
        return cls(0, 0, -1)

    @classmethod
    def from_center(cls, center: Point, radius_squared: Scalar) -> "Circle":
        cx, cy, r2 = coerce(center.x, center.y, radius_squared)
        return cls(-cx, -cy, cx * cx + cy * cy - r2)

    @property
    def backend(self) -> Backend:
        return backend_of(self.g, self.f, self.t)

    @property
    def center(self) -> Point:
        return Point(-self.g, -self.f)

    @property
    def radius_squared(self) -> Scalar:
        return self.g * self.g + self.f * self.f - self.t

    @property
    def is_point_circle(self) -> bool:
        return is_zero(self.radius_squared, magnitude(self.g * self.g, self.f * self.f, self.t))

    def power(self, p: Point) -> Scalar:
        """Substitutes ``p`` into the circle equation."""
        g, f, t, x, y = coerce(self.g, self.f, self.t, p.x, p.y)
        return x * x + y * y + 2 * g * x + 2 * f * y + t

    def contains(self, p: Point) -> bool:
        scale = max(p.norm_squared(), self.g * self.g + self.f * self.f, abs(self.t))
        return is_zero(self.power(p), float(scale))

    def is_close(self, other: "Circle") -> bool:
        values = coerce(self.g, self.f, self.t, other.g, other.f, other.t)
        scale = magnitude(*values)
        return all(is_zero(a - b, scale) for a, b in zip(values[:3], values[3:]))

    def residual(self, other: "Circle") -> Scalar:
        """Largest coefficient difference; exact for rationals."""
        values = coerce(self.g, self.f, self.t, other.g, other.f, other.t)
        return max(abs(a - b) for a, b in zip(values[:3], values[3:]))

    def __str__(self):
        return f"x^2 + y^2 + 2*({self.g})*x + 2*({self.f})*y + ({self.t}) = 0"


def line_through(p1: Point, p2: Point) -> Line:
    if same_point(p1, p2):
        raise CoincidentPointsError(f"Cannot draw a line through coincident points {p1}")
    alpha = p1.y - p2.y
    beta = p2.x - p1.x
    gamma = p1.x * p2.y - p2.x * p1.y
    return Line(alpha, beta, gamma)


def second_intersection(c: Circle, a: Point, d: Point) -> Tuple[Point, bool]:
    """
    Returns the second point where line ``ad`` meets ``c``, and a tangency flag.

    ``a`` must lie on ``c``. Parametrizing the line as ``a + lam*(d - a)`` the
    constant term of the quadratic vanishes, so the second root is rational in
    the inputs: ``lam = -2*((a - center) . u) / |u|^2``. A zero root means the
    line touches ``c`` at ``a``; ``a`` is returned with the flag set.
    """
    backend_of(c.g, a.x, d.x)
    if not c.contains(a):
        raise PointNotOnCircleError(f"Chord end {a} is not on circle {c}")
    if same_point(a, d):
        raise CoincidentPointsError(f"Chord direction is undefined: {a} coincides with {d}")

    u = d - a
    radial = a - c.center
    projection = radial.dot(u)
    if isinstance(projection, float):
        scale = math.sqrt(float(radial.norm_squared()) * float(u.norm_squared()))
    else:
        scale = 1.0
    if is_zero(projection, scale):
        logger.debug(f"Line through {a} and {d} is tangent at {a}")
        return a, True

    lam = -2 * projection / u.norm_squared()
    return a + u * lam, False


def circle_through_3(p1: Point, p2: Point, p3: Point) -> Circle:
    """Solves the linear system in (g, f, t) for the circle through three points."""
    x1, y1, x2, y2, x3, y3 = coerce(p1.x, p1.y, p2.x, p2.y, p3.x, p3.y)
    if collinear(p1, p2, p3):
        raise CollinearPointsError(f"Points {p1}, {p2}, {p3} are collinear")

    if isinstance(x1, float):
        system = np.array([[2 * x, 2 * y, 1.0] for x, y in ((x1, y1), (x2, y2), (x3, y3))])
        rhs = -np.array([x * x + y * y for x, y in ((x1, y1), (x2, y2), (x3, y3))])
        g, f, t = np.linalg.solve(system, rhs)
        return Circle(float(g), float(f), float(t))

    # Cramer on the two difference equations 2g*dx + 2f*dy = -(ds)
    s1, s2, s3 = x1 * x1 + y1 * y1, x2 * x2 + y2 * y2, x3 * x3 + y3 * y3
    a11, a12, b1 = x2 - x1, y2 - y1, (s1 - s2) / 2
    a21, a22, b2 = x3 - x1, y3 - y1, (s1 - s3) / 2
    det = a11 * a22 - a12 * a21
    g = (b1 * a22 - a12 * b2) / det
    f = (a11 * b2 - b1 * a21) / det
    t = -s1 - 2 * g * x1 - 2 * f * y1
    return Circle(g, f, t)


def fourth_vertex(a: Point, q: Point, e: Point) -> Point:
    """Fourth vertex U of parallelogram AQEU (diagonals AE and QU)."""
    return a + e - q


def reflect_across_line(p: Point, line: Line) -> Point:
    value = line.evaluate(p)
    alpha, beta, value = coerce(line.alpha, line.beta, value)
    factor = 2 * value / (alpha * alpha + beta * beta)
    return p - Point(alpha, beta) * factor


def midpoint(p1: Point, p2: Point) -> Point:
    return (p1 + p2) / 2


def collinear(p1: Point, p2: Point, p3: Point, scale: Optional[float] = None) -> bool:
    """
    Zero test on ``det(p2 - p1, p3 - p1)``.

    For doubles the determinant is compared with ``|p2 - p1| * |p3 - p1|``,
    so the test is invariant under scaling and a repeated point counts as
    collinear. Points that agree only up to rounding noise need an explicit
    ``scale`` (squared length) from the frame that produced them.
    """
    u, v = p2 - p1, p3 - p1
    det = u.x * v.y - u.y * v.x
    if scale is None and isinstance(det, float):
        scale = math.sqrt(u.norm_squared() * v.norm_squared())
    return is_zero(det, scale or 0.0)


def on_circle(c: Circle, p: Point) -> bool:
    return c.contains(p)


def scale_about(p: Point, center: Point, factor: Union[Scalar, int]) -> Point:
    """Image of ``p`` under the homothety with the given center and factor."""
    return center + (p - center) * factor


def circumcircle(vertices: Sequence[Point]) -> Circle:
    a, b, c = vertices
    return circle_through_3(a, b, c)


def orthocenter(vertices: Sequence[Point]) -> Point:
    """H = A + B + C - 2*O (Euler line identity)."""
    a, b, c = vertices
    center = circumcircle(vertices).center
    return a + b + c - center * 2

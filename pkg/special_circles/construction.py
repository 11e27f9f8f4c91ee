"""
Special circle construction
Builds the circle through an arbitrary point P with a chosen center K, twice:
once from the closed-form coordinates of the canonical frame and once by the
frame-independent chord/parallelogram construction.

Canonical frame: circumcircle x^2 + y^2 = 1, O at the origin, P = (-k, 0),
Q = (k, 0), D = (m, n), vertex A = (2a/(1+a^2), (1-a^2)/(1+a^2)).
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Dict, Iterator, Optional, Sequence, Tuple, Union

from .geometry import (
    Backend,
    Circle,
    CollinearPointsError,
    DegeneratePointCircleError,
    GeometryError,
    Line,
    Point,
    Scalar,
    backend_of,
    circle_through_3,
    coerce,
    collinear,
    fourth_vertex,
    is_zero,
    line_through,
    midpoint,
    origin,
    reflect_across_line,
    same_point,
    scale_about,
    second_intersection,
)

logger = logging.getLogger(__name__)

VERTEX_NAMES = ("A", "B", "C")
SIDE_NAMES = ("BC", "CA", "AB")

FLAG_DEGENERATE = "degenerate_point_circle"
FLAG_O_CIRCLE = "o_circle"


def tangent_flag(vertex_name: str) -> str:
    return f"tangent_at_{vertex_name}"


def sideline_flag(side_name: str) -> str:
    return f"P_on_sideline_{side_name}"


class ConstructionError(GeometryError):
    code = "CONSTRUCTION_ERROR"


class DIsVertexError(ConstructionError):
    code = "D_IS_VERTEX"


class NonCanonicalForClosedFormError(ConstructionError):
    code = "NON_CANONICAL_FOR_CLOSED_FORM"


class DegenerateTriangleError(ConstructionError):
    code = "DEGENERATE_TRIANGLE"


class DegenerateInputError(ConstructionError):
    code = "DEGENERATE_INPUT"


class CollinearReflectionsError(ConstructionError):
    code = "COLLINEAR_REFLECTIONS"


class GeneratorSpecificationError(ConstructionError):
    """Raised when a scene gets neither or both of D and K."""

    code = "SCENE_UNDERSPECIFIED"


class Frame(str, Enum):
    CANONICAL = "canonical"
    ARBITRARY = "arbitrary"


class ConstructionPath(str, Enum):
    CLOSED_FORM = "closed-form"
    GEOMETRIC = "geometric"


@dataclass(frozen=True)
class TriangleParams:
    """Tangent-half-angle parameters of the vertices on the unit circumcircle."""

    a: Scalar
    b: Scalar
    c: Scalar

    def __post_init__(self):
        a, b, c = coerce(self.a, self.b, self.c)
        if isinstance(a, float) and not all(math.isfinite(v) for v in (a, b, c)):
            raise DegenerateTriangleError(f"Triangle parameters must be finite: {(a, b, c)}")
        scale = max(abs(float(v)) for v in (a, b, c))
        if any(is_zero(u - v, scale) for u, v in ((a, b), (b, c), (c, a))):
            raise DegenerateTriangleError(f"Triangle parameters must be pairwise distinct: {(a, b, c)}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    def __iter__(self) -> Iterator[Scalar]:
        return iter((self.a, self.b, self.c))

    @property
    def backend(self) -> Backend:
        return backend_of(self.a, self.b, self.c)

    def vertices(self) -> Tuple[Point, Point, Point]:
        return tuple(vertex_from_param(value) for value in self)


def vertex_from_param(a: Scalar) -> Point:
    (a,) = coerce(a)
    denominator = 1 + a * a
    return Point(2 * a / denominator, (1 - a * a) / denominator)


def param_from_vertex(vertex: Point) -> Scalar:
    """Inverse of ``vertex_from_param``; (0, -1) has no finite parameter."""
    if is_zero(1 + vertex.y):
        raise NonCanonicalForClosedFormError(
            f"Vertex {vertex} sits at (0, -1), which the half-angle parametrization cannot represent"
        )
    return vertex.x / (1 + vertex.y)


def resolve_generator(P: Point, O: Point, D: Optional[Point] = None, K: Optional[Point] = None) -> Point:
    """Returns D, accepting either D itself or the desired center K (OPKD a parallelogram)."""
    if D is None and K is None:
        raise GeneratorSpecificationError("Scene needs either the generator D or the desired center K")
    if D is not None and K is not None:
        raise GeneratorSpecificationError(
            "Scene accepts only one of the generator D and the desired center K", code="SCENE_OVERSPECIFIED"
        )
    if D is not None:
        return D
    return K - P + O


@dataclass(frozen=True)
class Scene:
    """Triangle, target point P and generator D in one frame."""

    vertices: Tuple[Point, Point, Point]
    P: Point
    D: Point
    frame: Frame = Frame.ARBITRARY
    params: Optional[TriangleParams] = None

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        coordinates = [value for point in (*self.vertices, self.P, self.D) for value in point]
        backend_of(*coordinates)
        a, b, c = self.vertices
        if collinear(a, b, c):
            raise DegenerateTriangleError(f"Triangle vertices are collinear: {a}, {b}, {c}")
        for name, vertex in zip(VERTEX_NAMES, self.vertices):
            if same_point(vertex, self.D):
                raise DIsVertexError(f"Generator D {self.D} coincides with vertex {name}")
        if self.frame is Frame.CANONICAL:
            unit = Circle.unit(self.backend)
            if not all(unit.contains(vertex) for vertex in self.vertices) or not is_zero(self.P.y):
                raise ConstructionError(
                    "Canonical scenes need vertices on the unit circle and P on the x-axis",
                    code="INVALID_CANONICAL_SCENE",
                )

    @classmethod
    def canonical(
        cls,
        params: Union[TriangleParams, Sequence[Scalar]],
        k: Scalar,
        D: Optional[Point] = None,
        K: Optional[Point] = None,
    ) -> "Scene":
        if not isinstance(params, TriangleParams):
            params = TriangleParams(*params)
        _, k = coerce(params.a, k)
        P = Point(-k, 0)
        D = resolve_generator(P, origin(P.backend), D, K)
        return cls(vertices=params.vertices(), P=P, D=D, frame=Frame.CANONICAL, params=params)

    @classmethod
    def from_vertices(
        cls,
        vertices: Sequence[Point],
        P: Point,
        D: Optional[Point] = None,
        K: Optional[Point] = None,
        frame: Frame = Frame.ARBITRARY,
    ) -> "Scene":
        a, b, c = vertices
        if collinear(a, b, c):
            raise DegenerateTriangleError(f"Triangle vertices are collinear: {a}, {b}, {c}")
        O = circle_through_3(a, b, c).center
        D = resolve_generator(P, O, D, K)
        return cls(vertices=(a, b, c), P=P, D=D, frame=frame)

    @property
    def backend(self) -> Backend:
        return self.P.backend

    @cached_property
    def circumcircle(self) -> Circle:
        if self.frame is Frame.CANONICAL:
            return Circle.unit(self.backend)
        return circle_through_3(*self.vertices)

    @property
    def O(self) -> Point:
        return self.circumcircle.center

    @property
    def Q(self) -> Point:
        return self.O * 2 - self.P

    @property
    def K(self) -> Point:
        return self.P + self.D - self.O

    @property
    def k(self) -> Scalar:
        if self.frame is not Frame.CANONICAL:
            raise NonCanonicalForClosedFormError("k is only defined in the canonical frame")
        return -self.P.x

    def with_P(self, P: Point) -> "Scene":
        return dataclasses.replace(self, P=P)

    def with_k(self, k: Scalar) -> "Scene":
        _, k = coerce(self.P.x, k)
        return self.with_P(Point(-k, 0))


@dataclass(frozen=True)
class ConstructionOutput:
    scene: Scene
    path: ConstructionPath
    Q: Point
    K: Point
    chord_ends: Tuple[Point, Point, Point]
    special_points: Tuple[Point, Point, Point]
    mid_points: Tuple[Point, Point, Point]
    special_circle: Optional[Circle]
    midpoint_circle: Optional[Circle]
    flags: Tuple[str, ...] = ()

    @property
    def degenerate(self) -> bool:
        return FLAG_DEGENERATE in self.flags

    def named_points(self) -> Dict[str, Point]:
        """All derived points keyed by their figure labels."""
        named = {"O": self.scene.O, "P": self.scene.P, "Q": self.Q, "D": self.scene.D, "K": self.K}
        named.update(zip(VERTEX_NAMES, self.scene.vertices))
        named.update(zip(("E", "F", "G"), self.chord_ends))
        named.update(zip(("U", "V", "W"), self.special_points))
        named.update(zip(("U'", "V'", "W'"), self.mid_points))
        return named


# Closed forms (canonical frame)


def _chord_denominator(a: Scalar, m: Scalar, n: Scalar) -> Scalar:
    return (m * m + (n + 1) ** 2) * a * a - 4 * m * a + m * m + (1 - n) ** 2


def _check_not_vertex(a: Scalar, D: Point) -> Tuple[Scalar, Scalar, Scalar]:
    a, m, n = coerce(a, D.x, D.y)
    if same_point(vertex_from_param(a), D):
        raise DIsVertexError(f"Generator D {D} coincides with the vertex of parameter {a}")
    return a, m, n


def line_AD(a: Scalar, D: Point) -> Line:
    a, m, n = _check_not_vertex(a, D)
    alpha = (n + 1) * a * a + (n - 1)
    beta = -((1 + a * a) * m - 2 * a)
    gamma = (1 - a * a) * m - 2 * a * n
    return Line(alpha, beta, gamma)


def point_E(a: Scalar, D: Point) -> Point:
    """Second intersection of line AD with the unit circle."""
    a, m, n = _check_not_vertex(a, D)
    denominator = _chord_denominator(a, m, n)
    x = 2 * (m * (n + 1) * a * a - (1 + m * m - n * n) * a + m * (1 - n)) / denominator
    y = (((n + 1) ** 2 - m * m) * a * a - 4 * m * n * a + m * m - (1 - n) ** 2) / denominator
    return Point(x, y)


def point_U(a: Scalar, D: Point, k: Scalar) -> Point:
    """Fourth vertex U of parallelogram AQEU, Q = (k, 0)."""
    a, m, n = _check_not_vertex(a, D)
    _, k = coerce(a, k)
    s = (1 + a * a) * _chord_denominator(a, m, n)
    x = (
        -(k * (m * m + (n + 1) ** 2) - 2 * m * (n + 1)) * a**4
        + 4 * (k * m + n * (n + 1)) * a**3
        - 2 * (k * (m * m + n * n + 1) + 2 * m) * a**2
        + 4 * (k * m + n * (n - 1)) * a
        - k * (m * m + n * n - 2 * n + 1)
        - 2 * m * (n - 1)
    ) / s
    y = -2 * (m * m * a**4 + 2 * m * (n - 1) * a**3 - 4 * n * a**2 + 2 * m * (n + 1) * a - m * m) / s
    return Point(x, y)


def point_Uprime(a: Scalar, D: Point) -> Point:
    """Midpoint of AE (equivalently of QU); does not depend on k."""
    a, m, n = _check_not_vertex(a, D)
    s = (1 + a * a) * _chord_denominator(a, m, n)
    shared = 2 * a * n - m * (1 - a * a)
    x = (n * (1 + a * a) - (1 - a * a)) * shared / s
    y = (2 * a - m * (1 + a * a)) * shared / s
    return Point(x, y)


def _check_generator_not_origin(D: Point) -> Tuple[Scalar, Scalar]:
    if same_point(D, origin(D.backend), scale=1.0):
        raise DegeneratePointCircleError(f"Generator D {D} is the circumcenter; the circle has radius 0")
    return D.x, D.y


def special_circle(D: Point, k: Scalar, printed_form: bool = False) -> Circle:
    """
    Circle UVW: center (m - k, n), squared radius m^2 + n^2, through P = (-k, 0).

    ``printed_form`` swaps in the y-coefficient ``-2mn`` instead of ``-2n``; it
    exists only to demonstrate that variant failing the oracle.
    """
    m, n = _check_generator_not_origin(D)
    m, n, k = coerce(m, n, k)
    f = -m * n if printed_form else -n
    return Circle(k - m, f, k * (k - 2 * m))


def midpoint_circle(D: Point) -> Circle:
    """Circle U'V'W' on diameter OD: x^2 + y^2 - m*x - n*y = 0."""
    m, n = _check_generator_not_origin(D)
    return Circle(-m / 2, -n / 2, 0)


# Construction


def _scene_flags(scene: Scene) -> list:
    flags = []
    a, b, c = scene.vertices
    for side_name, (p1, p2) in zip(SIDE_NAMES, ((b, c), (c, a), (a, b))):
        if collinear(p1, p2, scene.P):
            logger.warning(f"P {scene.P} lies on sideline {side_name}; constructing anyway")
            flags.append(sideline_flag(side_name))
    radius = math.sqrt(float(scene.circumcircle.radius_squared))
    if same_point(scene.P, scene.O, radius):
        flags.append(FLAG_O_CIRCLE)
    if same_point(scene.D, scene.O, radius):
        logger.warning("Generator D is the circumcenter; U, V, W collapse onto P")
        flags.append(FLAG_DEGENERATE)
    return flags


def _closed_form(scene: Scene, printed_form: bool) -> ConstructionOutput:
    if scene.frame is not Frame.CANONICAL:
        raise NonCanonicalForClosedFormError(
            f"The closed-form path needs a canonical-frame scene, got {scene.frame.value}"
        )
    params = scene.params or TriangleParams(*(param_from_vertex(v) for v in scene.vertices))
    k, D = scene.k, scene.D
    flags = _scene_flags(scene)

    chord_ends, special_points, mid_points = [], [], []
    for name, a, vertex in zip(VERTEX_NAMES, params, scene.vertices):
        E = point_E(a, D)
        if same_point(E, vertex):
            logger.warning(f"Line {name}D is tangent to the circumcircle at {name}")
            flags.append(tangent_flag(name))
        chord_ends.append(E)
        special_points.append(point_U(a, D, k))
        mid_points.append(point_Uprime(a, D))

    if FLAG_DEGENERATE in flags:
        circle, mid_circle = None, None
    else:
        circle, mid_circle = special_circle(D, k, printed_form), midpoint_circle(D)

    return ConstructionOutput(
        scene=scene,
        path=ConstructionPath.CLOSED_FORM,
        Q=scene.Q,
        K=scene.K,
        chord_ends=tuple(chord_ends),
        special_points=tuple(special_points),
        mid_points=tuple(mid_points),
        special_circle=circle,
        midpoint_circle=mid_circle,
        flags=tuple(sorted(flags)),
    )


def _geometric(scene: Scene) -> ConstructionOutput:
    circumcircle = scene.circumcircle
    Q, D = scene.Q, scene.D
    flags = _scene_flags(scene)

    chord_ends, special_points, mid_points = [], [], []
    for name, vertex in zip(VERTEX_NAMES, scene.vertices):
        E, tangent = second_intersection(circumcircle, vertex, D)
        if tangent:
            logger.warning(f"Line {name}D is tangent to the circumcircle at {name}")
            flags.append(tangent_flag(name))
        chord_ends.append(E)
        special_points.append(fourth_vertex(vertex, Q, E))
        mid_points.append(midpoint(vertex, E))

    if FLAG_DEGENERATE in flags:
        circle, mid_circle = None, None
    else:
        circle, mid_circle = circle_through_3(*special_points), circle_through_3(*mid_points)

    return ConstructionOutput(
        scene=scene,
        path=ConstructionPath.GEOMETRIC,
        Q=Q,
        K=scene.K,
        chord_ends=tuple(chord_ends),
        special_points=tuple(special_points),
        mid_points=tuple(mid_points),
        special_circle=circle,
        midpoint_circle=mid_circle,
        flags=tuple(sorted(flags)),
    )


def construct(
    scene: Scene,
    path: ConstructionPath = ConstructionPath.GEOMETRIC,
    printed_form: bool = False,
) -> ConstructionOutput:
    """Runs the full construction along ``path``."""
    path = ConstructionPath(path)
    logger.debug(f"Constructing special circle for P={scene.P}, D={scene.D} via {path.value}")
    if path is ConstructionPath.CLOSED_FORM:
        output = _closed_form(scene, printed_form)
    else:
        if printed_form:
            logger.debug("printed_form only affects the closed-form path; ignoring")
        output = _geometric(scene)
    logger.debug(f"Construction finished with flags {list(output.flags)}")
    return output


def o_circle(scene: Scene, path: ConstructionPath = ConstructionPath.GEOMETRIC) -> Circle:
    """Circle U''V''W'' from parallelograms AOEU'' etc.: center D, through O."""
    output = construct(scene.with_P(scene.O), path)
    if output.special_circle is None:
        raise DegeneratePointCircleError("Generator D is the circumcenter; U'', V'', W'' collapse onto O")
    return output.special_circle


def homothety_circle(output: ConstructionOutput, factor: Scalar) -> Circle:
    """Image of the midpoint circle under the homothety about Q with ``factor``."""
    if output.midpoint_circle is None:
        raise DegenerateInputError("Degenerate construction has no midpoint circle to enlarge")
    source = output.midpoint_circle
    _, factor = coerce(source.g, factor)
    center = scale_about(source.center, output.Q, factor)
    return Circle.from_center(center, source.radius_squared * factor * factor)


def homothety_points(output: ConstructionOutput, factor: Scalar) -> Tuple[Point, Point, Point]:
    """Points on the diagonals QU, QV, QW whose circle is ``homothety_circle``."""
    return tuple(scale_about(point, output.Q, factor) for point in output.mid_points)


@dataclass(frozen=True)
class HaggeConstruction:
    circle: Circle
    chord_ends: Tuple[Point, Point, Point]
    reflections: Tuple[Point, Point, Point]
    orthocenter: Point


def classic_hagge(vertices: Sequence[Point], D: Point) -> HaggeConstruction:
    """Reflects E, F, G in BC, CA, AB; the circle through the images passes through H."""
    a, b, c = vertices
    if collinear(a, b, c):
        raise DegenerateTriangleError(f"Triangle vertices are collinear: {a}, {b}, {c}")
    for name, vertex in zip(VERTEX_NAMES, vertices):
        if same_point(vertex, D):
            raise DIsVertexError(f"Generator D {D} coincides with vertex {name}")

    circumcircle = circle_through_3(a, b, c)
    chord_ends, reflections = [], []
    for vertex, (p1, p2) in zip((a, b, c), ((b, c), (c, a), (a, b))):
        E, _ = second_intersection(circumcircle, vertex, D)
        chord_ends.append(E)
        reflections.append(reflect_across_line(E, line_through(p1, p2)))

    # the reflections can all fall on one point (equilateral triangle, D = O)
    if collinear(*reflections, scale=float(circumcircle.radius_squared)):
        raise CollinearReflectionsError(f"Reflections of E, F, G are collinear for D={D}")
    try:
        circle = circle_through_3(*reflections)
    except CollinearPointsError as e:
        raise CollinearReflectionsError(f"Reflections of E, F, G are collinear for D={D}") from e

    H = a + b + c - circumcircle.center * 2
    return HaggeConstruction(
        circle=circle,
        chord_ends=tuple(chord_ends),
        reflections=tuple(reflections),
        orthocenter=H,
    )

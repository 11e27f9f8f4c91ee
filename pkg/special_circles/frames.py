"""
Frame normalization
Maps an arbitrary triangle onto the canonical frame (unit circumcircle at the
origin, P on the nonpositive x-axis) and carries constructions back.
"""

import dataclasses
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import numpy as np

from . import constants
from .construction import (
    ConstructionOutput,
    ConstructionPath,
    DegenerateTriangleError,
    Frame,
    Scene,
    construct,
    resolve_generator,
)
from .geometry import (
    Backend,
    Circle,
    GeometryError,
    Point,
    Scalar,
    backend_of,
    circle_through_3,
    coerce,
    collinear,
    is_zero,
    origin,
)

logger = logging.getLogger(__name__)


def rational_sqrt(value: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None when irrational."""
    if value < 0:
        return None
    numerator, denominator = value.numerator, value.denominator
    root_n, root_d = math.isqrt(numerator), math.isqrt(denominator)
    if root_n * root_n == numerator and root_d * root_d == denominator:
        return Fraction(root_n, root_d)
    return None


@dataclass(frozen=True)
class SimilarityTransform:
    """
    ``p -> M(scale * R(theta) * p) + translation`` with R stored as (cos, sin).

    M is the identity, or the mirror ``(x, y) -> (x, -y)`` when ``mirrored``.
    """

    translation: Point
    cos: Scalar
    sin: Scalar
    scale: Scalar
    mirrored: bool = False

    def __post_init__(self):
        cos, sin, scale, tx, ty = coerce(self.cos, self.sin, self.scale, self.translation.x, self.translation.y)
        if not scale > 0:
            raise GeometryError(f"Similarity scale must be positive, got {scale}")
        if not is_zero(cos * cos + sin * sin - 1):
            raise GeometryError(f"Rotation is not orthonormal: cos={cos}, sin={sin}")
        object.__setattr__(self, "cos", cos)
        object.__setattr__(self, "sin", sin)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "translation", Point(tx, ty))

    @classmethod
    def identity(cls, backend: Backend = Backend.EXACT) -> "SimilarityTransform":
        if backend is Backend.DOUBLE:
            return cls(Point(0.0, 0.0), 1.0, 0.0, 1.0)
        return cls(Point(0, 0), 1, 0, 1)

    @property
    def backend(self) -> Backend:
        return backend_of(self.cos, self.sin, self.scale)

    @property
    def orientation(self) -> int:
        return -1 if self.mirrored else 1

    @property
    def matrix(self) -> np.ndarray:
        """Homogeneous 3x3 matrix (double precision)."""
        c, s, k = float(self.cos), float(self.sin), float(self.scale)
        m = float(self.orientation)
        return np.array(
            [
                [k * c, -k * s, float(self.translation.x)],
                [m * k * s, m * k * c, float(self.translation.y)],
                [0.0, 0.0, 1.0],
            ]
        )

    def _linear(self, x: Scalar, y: Scalar) -> Tuple[Scalar, Scalar]:
        rx = self.scale * (self.cos * x - self.sin * y)
        ry = self.scale * (self.sin * x + self.cos * y)
        return rx, self.orientation * ry

    def apply(self, p: Point) -> Point:
        if self.backend is Backend.EXACT and p.backend is Backend.EXACT:
            x, y = self._linear(p.x, p.y)
            return Point(x + self.translation.x, y + self.translation.y)
        x, y, _ = self.matrix @ np.array([float(p.x), float(p.y), 1.0])
        return Point(float(x), float(y))

    def apply_circle(self, circle: Circle) -> Circle:
        center = self.apply(circle.center)
        radius_squared = circle.radius_squared * self.scale * self.scale
        if center.backend is Backend.DOUBLE:
            radius_squared = float(radius_squared)
        return Circle.from_center(center, radius_squared)

    def inverse(self) -> "SimilarityTransform":
        # (M R)^-1 = R^T M, and R^T M = M R for a mirror M
        sin = self.sin if self.mirrored else -self.sin
        linear = SimilarityTransform(origin(self.backend), self.cos, sin, 1 / self.scale, self.mirrored)
        tx, ty = linear._linear(self.translation.x, self.translation.y)
        return dataclasses.replace(linear, translation=Point(-tx, -ty))

    def mirror(self) -> "SimilarityTransform":
        """This transform followed by ``(x, y) -> (x, -y)``."""
        translation = Point(self.translation.x, -self.translation.y)
        return dataclasses.replace(self, translation=translation, mirrored=not self.mirrored)


def _exact_rotation(offset: Point) -> Optional[Tuple[Fraction, Fraction]]:
    if offset.x == 0 and offset.y == 0:
        return Fraction(1), Fraction(0)
    distance = rational_sqrt(offset.norm_squared())
    if distance is None:
        return None
    return -offset.x / distance, offset.y / distance


def normalize(
    vertices: Sequence[Point],
    P: Point,
    D: Optional[Point] = None,
    K: Optional[Point] = None,
) -> Tuple[Scene, SimilarityTransform]:
    """
    Returns the canonical scene equivalent to (vertices, P, D) and the transform
    taking the input frame to the canonical one.

    Exact inputs stay exact when the circumradius and |OP| are rational (no
    irrational rotation or scaling is needed); otherwise everything is
    converted to doubles.
    """
    a, b, c = vertices
    if collinear(a, b, c):
        raise DegenerateTriangleError(f"Triangle vertices are collinear: {a}, {b}, {c}")
    circumcircle = circle_through_3(a, b, c)
    O = circumcircle.center
    D = resolve_generator(P, O, D, K)

    transform = None
    if P.backend is Backend.EXACT:
        radius = rational_sqrt(circumcircle.radius_squared)
        rotation = _exact_rotation(P - O)
        if radius is not None and rotation is not None:
            cos, sin = rotation
            scale = 1 / radius
            translation = Point(-scale * (cos * O.x - sin * O.y), -scale * (sin * O.x + cos * O.y))
            transform = SimilarityTransform(translation, cos, sin, scale)
            logger.debug("Normalizing without leaving the exact backend")
        else:
            logger.info("Normalization needs irrational rotation or scaling; switching to doubles")

    if transform is None:
        a, b, c, P, D = (point.as_double() for point in (a, b, c, P, D))
        O = O.as_double()
        radius = math.sqrt(float(circumcircle.radius_squared))
        offset = P - O
        distance = math.hypot(offset.x, offset.y)
        if distance <= constants.RELATIVE_TOLERANCE * radius:
            cos, sin = 1.0, 0.0
        else:
            cos, sin = -offset.x / distance, offset.y / distance
        scale = 1.0 / radius
        translation = Point(-scale * (cos * O.x - sin * O.y), -scale * (sin * O.x + cos * O.y))
        transform = SimilarityTransform(translation, cos, sin, scale)

    canonical_vertices = tuple(transform.apply(v) for v in (a, b, c))
    # (0, -1) has no half-angle parameter; mirroring in the x-axis keeps P in place
    at_pole = [is_zero(1 + v.y) for v in canonical_vertices]
    at_top = [is_zero(1 - v.y) for v in canonical_vertices]
    if any(at_pole) and not any(at_top):
        logger.debug("A vertex lands on (0, -1); mirroring the canonical frame")
        transform = transform.mirror()
        canonical_vertices = tuple(transform.apply(v) for v in (a, b, c))
    mapped_P = transform.apply(P)
    # P lands on the x-axis by construction; drop rounding noise in y
    canonical_P = Point(mapped_P.x, 0)
    scene = Scene(
        vertices=canonical_vertices,
        P=canonical_P,
        D=transform.apply(D),
        frame=Frame.CANONICAL,
    )
    logger.debug(f"Normalized scene: k={scene.k}, D={scene.D}")
    return scene, transform


def construct_in_frame(
    scene: Scene,
    path: ConstructionPath = ConstructionPath.CLOSED_FORM,
    printed_form: bool = False,
) -> ConstructionOutput:
    """Runs ``construct`` in the canonical frame and maps the result back to ``scene``'s frame."""
    if scene.frame is Frame.CANONICAL:
        return construct(scene, path, printed_form)

    canonical, transform = normalize(scene.vertices, scene.P, D=scene.D)
    output = construct(canonical, path, printed_form)
    back = transform.inverse()

    def mapped(points):
        return tuple(back.apply(point) for point in points)

    def mapped_circle(circle):
        return back.apply_circle(circle) if circle is not None else None

    return ConstructionOutput(
        scene=scene,
        path=output.path,
        Q=back.apply(output.Q),
        K=back.apply(output.K),
        chord_ends=mapped(output.chord_ends),
        special_points=mapped(output.special_points),
        mid_points=mapped(output.mid_points),
        special_circle=mapped_circle(output.special_circle),
        midpoint_circle=mapped_circle(output.midpoint_circle),
        flags=output.flags,
    )

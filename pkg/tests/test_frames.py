"""
Tests for frame normalization
"""

import math
from fractions import Fraction

import pytest

from special_circles.construction import ConstructionPath, Frame, Scene, construct
from special_circles.frames import SimilarityTransform, construct_in_frame, normalize, rational_sqrt
from special_circles.geometry import Backend, Circle, GeometryError, Point

F = Fraction


@pytest.mark.unit
class TestRationalSqrt:
    """Test cases for rational_sqrt."""

    def test_perfect_squares(self):
        assert rational_sqrt(F(9, 4)) == F(3, 2)
        assert rational_sqrt(F(25, 16)) == F(5, 4)
        assert rational_sqrt(F(0)) == 0

    def test_irrational(self):
        assert rational_sqrt(F(2)) is None
        assert rational_sqrt(F(1, 2)) is None

    def test_negative(self):
        assert rational_sqrt(F(-4)) is None


@pytest.mark.unit
class TestSimilarityTransform:
    """Test cases for SimilarityTransform."""

    def test_identity(self):
        p = Point(F(1, 3), F(2, 7))
        assert SimilarityTransform.identity().apply(p) == p

    def test_exact_inverse(self):
        transform = SimilarityTransform(Point(1, -2), F(3, 5), F(-4, 5), F(2, 5))
        p = Point(F(7, 3), F(-1, 2))
        assert transform.inverse().apply(transform.apply(p)) == p

    def test_double_matrix(self):
        angle = 0.3
        transform = SimilarityTransform(Point(1.0, 2.0), math.cos(angle), math.sin(angle), 2.0)
        assert transform.matrix.shape == (3, 3)
        image = transform.apply(Point(1.0, 0.0))
        assert image.x == pytest.approx(1.0 + 2.0 * math.cos(angle))
        assert image.y == pytest.approx(2.0 + 2.0 * math.sin(angle))
        back = transform.inverse().apply(image)
        assert back.x == pytest.approx(1.0)
        assert back.y == pytest.approx(0.0, abs=1e-12)

    def test_circle_image(self):
        transform = SimilarityTransform(Point(1, 1), 1, 0, 2)
        image = transform.apply_circle(Circle.unit())
        assert image.center == Point(1, 1)
        assert image.radius_squared == 4

    def test_rejects_bad_scale(self):
        with pytest.raises(GeometryError):
            SimilarityTransform(Point(0, 0), 1, 0, 0)

    def test_rejects_non_rotation(self):
        with pytest.raises(GeometryError):
            SimilarityTransform(Point(0, 0), 1, 1, 1)


@pytest.mark.unit
class TestNormalize:
    """Test cases for normalize."""

    def test_exact_normalization(self, right_triangle_exact):
        """R = 5/2 and |OP| = 5/4 are rational, so the frame stays exact."""
        scene = right_triangle_exact
        canonical, transform = normalize(scene.vertices, scene.P, D=scene.D)
        assert canonical.frame is Frame.CANONICAL
        assert canonical.backend is Backend.EXACT
        assert all(v.norm_squared() == 1 for v in canonical.vertices)
        assert canonical.P == Point(F(-1, 2), 0)
        assert canonical.k == F(1, 2)
        assert transform.apply(scene.O) == Point(0, 0)
        assert transform.apply(scene.D) == canonical.D

    def test_accepts_center(self, right_triangle_exact):
        scene = right_triangle_exact
        by_center, _ = normalize(scene.vertices, scene.P, K=scene.K)
        by_generator, _ = normalize(scene.vertices, scene.P, D=scene.D)
        assert by_center.D == by_generator.D

    def test_irrational_radius_falls_back_to_doubles(self):
        vertices = [Point(0, 0), Point(1, 0), Point(0, 1)]
        canonical, transform = normalize(vertices, Point(F(1, 4), F(1, 4)), D=Point(F(1, 3), F(1, 5)))
        assert canonical.backend is Backend.DOUBLE
        assert transform.backend is Backend.DOUBLE
        for vertex in canonical.vertices:
            assert vertex.norm_squared() == pytest.approx(1.0)

    def test_p_at_circumcenter(self):
        vertices = [Point(0, 0), Point(4, 0), Point(0, 3)]
        canonical, _ = normalize(vertices, Point(2, F(3, 2)), D=Point(1, 1))
        assert canonical.k == 0

    def test_double_scene(self, right_triangle_double):
        scene = right_triangle_double
        canonical, transform = normalize(scene.vertices, scene.P, D=scene.D)
        assert canonical.P.y == 0
        assert canonical.k == pytest.approx(1 / math.sqrt(5))
        assert canonical.k == pytest.approx(0.4472135955)
        mapped_O = transform.apply(scene.O)
        assert mapped_O.x == pytest.approx(0.0, abs=1e-12)
        assert mapped_O.y == pytest.approx(0.0, abs=1e-12)


@pytest.mark.integration
class TestConstructInFrame:
    """Closed forms carried back to the input frame."""

    def test_exact_frame_matches_geometric_path(self, right_triangle_exact):
        closed = construct_in_frame(right_triangle_exact)
        geometric = construct(right_triangle_exact, ConstructionPath.GEOMETRIC)
        assert closed.path is ConstructionPath.CLOSED_FORM
        assert closed.scene is right_triangle_exact
        assert closed.chord_ends == geometric.chord_ends
        assert closed.special_points == geometric.special_points
        assert closed.mid_points == geometric.mid_points
        assert closed.special_circle == geometric.special_circle
        assert closed.special_circle.center == Point(F(7, 4), 0)
        assert closed.special_circle.radius_squared == F(5, 4)

    def test_double_frame_matches_geometric_path(self, right_triangle_double):
        closed = construct_in_frame(right_triangle_double)
        geometric = construct(right_triangle_double, ConstructionPath.GEOMETRIC)
        for mine, theirs in zip(closed.special_points, geometric.special_points):
            assert mine.x == pytest.approx(theirs.x, abs=1e-9)
            assert mine.y == pytest.approx(theirs.y, abs=1e-9)
        center = closed.special_circle.center
        assert center.x == pytest.approx(float(right_triangle_double.K.x))
        assert center.y == pytest.approx(float(right_triangle_double.K.y))

    def test_micrometre_triangle(self):
        """Tolerances follow the size of the figure, not absolute units."""
        vertices = [Point(0.0, 0.0), Point(4e-6, 0.0), Point(0.0, 3e-6)]
        scene = Scene.from_vertices(vertices, Point(1e-6, 1e-6), D=Point(1e-6, 5e-7))
        for output in (construct_in_frame(scene), construct(scene, ConstructionPath.GEOMETRIC)):
            assert not output.degenerate
            center = output.special_circle.center
            assert center.x == pytest.approx(0.0, abs=1e-15)
            assert center.y == pytest.approx(0.0, abs=1e-15)
            assert output.special_circle.radius_squared == pytest.approx(2e-12, rel=1e-6)

    def test_canonical_scene_passes_through(self, s1_scene):
        assert construct_in_frame(s1_scene) == construct(s1_scene, ConstructionPath.CLOSED_FORM)

    def test_degenerate_frame(self):
        vertices = [Point(0, 0), Point(4, 0), Point(0, 3)]
        scene = Scene.from_vertices(vertices, Point(F(11, 4), F(1, 2)), D=Point(2, F(3, 2)))
        output = construct_in_frame(scene)
        assert output.degenerate
        assert output.special_points == (scene.P,) * 3


@pytest.mark.unit
class TestMirroredFrames:
    """A vertex landing on (0, -1) is moved to (0, 1) by mirroring."""

    vertices = [Point(0, -1), Point(1, 0), Point(-1, 0)]
    P = Point(F(-1, 2), 0)
    D = Point(0, F(-1, 2))

    def test_mirror_round_trip(self):
        transform = SimilarityTransform(Point(1, -2), F(3, 5), F(-4, 5), F(2, 5)).mirror()
        assert transform.mirrored
        p = Point(F(7, 3), F(-1, 2))
        assert transform.inverse().apply(transform.apply(p)) == p
        assert transform.inverse().mirrored

    def test_mirror_matrix_matches_exact(self):
        transform = SimilarityTransform(Point(1, -2), F(3, 5), F(-4, 5), F(2, 5)).mirror()
        exact = transform.apply(Point(F(1, 2), F(3, 4)))
        double = transform.apply(Point(0.5, 0.75))
        assert double.x == pytest.approx(float(exact.x))
        assert double.y == pytest.approx(float(exact.y))

    def test_normalize_mirrors(self):
        canonical, transform = normalize(self.vertices, self.P, D=self.D)
        assert transform.mirrored
        assert canonical.vertices == (Point(0, 1), Point(1, 0), Point(-1, 0))
        assert canonical.P == self.P
        assert canonical.D == Point(0, F(1, 2))

    def test_closed_form_through_mirror(self):
        """The mirror image of the hand-computed scene."""
        scene = Scene.from_vertices(self.vertices, self.P, D=self.D)
        output = construct_in_frame(scene)
        assert output.special_points == (
            Point(F(-1, 2), 0),
            Point(F(-1, 10), F(-4, 5)),
            Point(F(-9, 10), F(-4, 5)),
        )
        assert output.special_circle.center == Point(F(-1, 2), F(-1, 2))
        assert output.special_circle.radius_squared == F(1, 4)

    def test_both_poles_cannot_be_fixed(self):
        """Hypotenuse perpendicular to OP: vertices land on (0, -1) and (0, 1)."""
        vertices = [Point(0, 0), Point(4, 0), Point(0, 3)]
        canonical, transform = normalize(vertices, Point(F(5, 4), F(1, 2)), D=Point(1, 1))
        assert not transform.mirrored
        assert Point(0, -1) in canonical.vertices

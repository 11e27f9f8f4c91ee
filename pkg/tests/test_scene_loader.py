"""
Tests for scene_loader module
"""

import json
from fractions import Fraction

import pytest

from special_circles.construction import ConstructionPath, Frame, construct
from special_circles.geometry import Backend, Circle, Point
from special_circles.scene_loader import (
    SceneError,
    encode_circle,
    encode_scalar,
    load_scene,
    output_to_document,
    parse_scalar,
    parse_scene_document,
    scene_digest,
    scene_to_document,
)

F = Fraction


def s1_document(**overrides):
    document = {
        "triangle": {"params": [0, 1, -1]},
        "P": {"k": "1/2"},
        "D": ["0", "1/2"],
    }
    document.update(overrides)
    return document


class TestSceneError:
    """Test cases for SceneError exception."""

    def test_scene_error_inheritance(self):
        assert issubclass(SceneError, Exception)

    def test_scene_error_code(self):
        error = SceneError("Test error message", code="MALFORMED_JSON")
        assert str(error) == "Test error message"
        assert error.code == "MALFORMED_JSON"

    def test_default_code(self):
        assert SceneError("x").code == "INVALID_SCENE"


@pytest.mark.unit
class TestNumbers:
    """Test cases for number parsing and encoding."""

    def test_rational_strings(self):
        assert parse_scalar("-3/4", Backend.EXACT) == F(-3, 4)
        assert parse_scalar(2, Backend.EXACT) == F(2)

    def test_json_float_is_exact_as_written(self):
        """0.1 means 1/10, not the nearest double."""
        assert parse_scalar(0.1, Backend.EXACT) == F(1, 10)

    def test_double_backend(self):
        assert parse_scalar("1/4", Backend.DOUBLE) == 0.25

    def test_invalid_number(self):
        with pytest.raises(SceneError) as error:
            parse_scalar("1/0", Backend.EXACT)
        assert error.value.code == "INVALID_NUMBER"

    def test_encoding(self):
        assert encode_scalar(F(-1, 2)) == "-1/2"
        assert encode_scalar(F(3)) == "3"
        assert encode_scalar(0.25) == 0.25

    def test_encode_circle(self):
        encoded = encode_circle(Circle(F(1, 2), F(-1, 2), F(1, 4)))
        assert encoded == {
            "g": "1/2",
            "f": "-1/2",
            "t": "1/4",
            "center": ["-1/2", "1/2"],
            "r2": "1/4",
        }
        assert encode_circle(None) is None


@pytest.mark.unit
class TestParseSceneDocument:
    """Test cases for parse_scene_document."""

    def test_s1(self, s1_scene):
        scene = parse_scene_document(s1_document())
        assert scene == s1_scene
        assert scene.frame is Frame.CANONICAL

    def test_center_instead_of_generator(self, s1_scene):
        document = s1_document(K=["-1/2", "1/2"])
        del document["D"]
        assert parse_scene_document(document).D == s1_scene.D

    def test_center_object_form(self, s1_scene):
        assert parse_scene_document(s1_document(D={"K": ["-1/2", "1/2"]})).D == s1_scene.D

    def test_params_with_point_on_axis_stay_canonical(self, s1_scene):
        assert parse_scene_document(s1_document(P=["-1/2", 0])) == s1_scene

    def test_params_with_point_off_axis(self):
        scene = parse_scene_document(s1_document(P=["3/10", "2/5"]))
        assert scene.frame is Frame.ARBITRARY
        assert scene.P == Point(F(3, 10), F(2, 5))

    def test_vertices_double(self):
        scene = parse_scene_document(
            {
                "triangle": {"vertices": [[0, 0], [4, 0], [0, 3]]},
                "P": [1, 1],
                "D": [1, 0.5],
                "backend": "double",
            }
        )
        assert scene.backend is Backend.DOUBLE
        assert scene.frame is Frame.ARBITRARY

    @pytest.mark.parametrize(
        "document, code",
        [
            ({"triangle": {"params": [0, 1, -1]}, "P": {"k": "1/2"}}, "SCENE_UNDERSPECIFIED"),
            (s1_document(K=["0", "0"]), "SCENE_OVERSPECIFIED"),
            (s1_document(triangle={"params": [0, 1, -1], "vertices": [[0, 1], [1, 0], [-1, 0]]}), "INVALID_SCENE"),
            (s1_document(triangle={}), "INVALID_SCENE"),
            (s1_document(triangle={"vertices": [[0, 0], [4, 0], [0, 3]]}), "INVALID_SCENE"),
            (s1_document(extra=True), "INVALID_SCENE"),
            (s1_document(D=["0", "one"]), "INVALID_NUMBER"),
            (s1_document(D=[0, 1]), "D_IS_VERTEX"),
            (s1_document(triangle={"params": [0, 1, 1]}), "DEGENERATE_TRIANGLE"),
            (s1_document(triangle={"vertices": [[0, 0], [1, 1], [2, 2]]}, P=[0, 1]), "DEGENERATE_TRIANGLE"),
            (s1_document(D=[0, "1/2", 1]), "INVALID_SCENE"),
        ],
    )
    def test_invalid_documents(self, document, code):
        with pytest.raises(SceneError) as error:
            parse_scene_document(document)
        assert error.value.code == code

    def test_not_an_object(self):
        with pytest.raises(SceneError, match="not a valid JSON object"):
            parse_scene_document([1, 2, 3])

    def test_exact_needs_rational_normalization(self):
        """R^2 = 1/2 is not a rational square."""
        document = {
            "triangle": {"vertices": [[0, 0], [1, 0], [0, 1]]},
            "P": ["1/4", "1/4"],
            "D": ["1/3", "1/5"],
        }
        with pytest.raises(SceneError) as error:
            parse_scene_document(document)
        assert error.value.code == "EXACT_REQUIRES_CANONICAL"

    def test_same_document_as_double_is_accepted(self):
        document = {
            "triangle": {"vertices": [[0, 0], [1, 0], [0, 1]]},
            "P": ["1/4", "1/4"],
            "D": ["1/3", "1/5"],
            "backend": "double",
        }
        assert parse_scene_document(document).backend is Backend.DOUBLE


@pytest.mark.unit
class TestLoadScene:
    """Test cases for load_scene."""

    def test_bundled_scenes(self, scenes_dir, s1_scene):
        assert load_scene(str(scenes_dir / "s1.json")) == s1_scene
        assert load_scene(str(scenes_dir / "s1_center.json")) == s1_scene
        assert construct(load_scene(str(scenes_dir / "degenerate.json"))).degenerate
        assert load_scene(str(scenes_dir / "right_triangle.json")).backend is Backend.DOUBLE
        assert load_scene(str(scenes_dir / "right_triangle_exact.json")).backend is Backend.EXACT

    def test_missing_file(self, tmp_path):
        with pytest.raises(SceneError) as error:
            load_scene(str(tmp_path / "missing.json"))
        assert error.value.code == "SCENE_NOT_FOUND"

    def test_malformed_json(self, tmp_path):
        scene_file = tmp_path / "invalid.json"
        scene_file.write_text("{ invalid json }")
        with pytest.raises(SceneError, match="Error decoding JSON") as error:
            load_scene(str(scene_file))
        assert error.value.code == "MALFORMED_JSON"


@pytest.mark.unit
class TestSerialization:
    """Test cases for scene and output serialization."""

    def test_canonical_round_trip(self, s1_scene):
        document = scene_to_document(s1_scene)
        assert document == {
            "triangle": {"params": ["0", "1", "-1"]},
            "P": {"k": "1/2"},
            "D": ["0", "1/2"],
            "backend": "exact",
        }
        assert parse_scene_document(document) == s1_scene

    def test_arbitrary_round_trip(self, right_triangle_exact, right_triangle_double):
        for scene in (right_triangle_exact, right_triangle_double):
            assert parse_scene_document(json.loads(json.dumps(scene_to_document(scene)))) == scene

    def test_digest(self, s1_scene, right_triangle_exact):
        assert scene_digest(s1_scene) == scene_digest(parse_scene_document(s1_document()))
        assert scene_digest(s1_scene) != scene_digest(right_triangle_exact)
        assert len(scene_digest(s1_scene)) == 16

    def test_output_document(self, s1_scene):
        document = output_to_document(construct(s1_scene, ConstructionPath.CLOSED_FORM))
        assert document["path"] == "closed-form"
        assert document["U"] == ["-1/2", "0"]
        assert document["V"] == ["-1/10", "4/5"]
        assert document["U'"] == ["0", "0"]
        assert document["specialCircle"]["g"] == "1/2"
        assert document["specialCircle"]["f"] == "-1/2"
        assert document["specialCircle"]["t"] == "1/4"
        assert document["specialCircle"]["center"] == ["-1/2", "1/2"]
        assert document["midpointCircle"]["r2"] == "1/16"
        assert document["flags"] == ["P_on_sideline_BC"]
        assert document["degenerate"] is False

    def test_degenerate_output_document(self, degenerate_scene):
        document = output_to_document(construct(degenerate_scene))
        assert document["specialCircle"] is None
        assert document["degenerate"] is True
        assert document["U"] == document["P"]

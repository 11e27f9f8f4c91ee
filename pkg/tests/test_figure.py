"""
Tests for figure module
"""

import os
import xml.etree.ElementTree as ET
from fractions import Fraction
from pathlib import Path

import pytest
from pydantic import ValidationError

from special_circles import constants
from special_circles.construction import construct
from special_circles.figure import FigureOptions, format_number, render_svg, write_svg
from special_circles.frames import construct_in_frame


NS = {"svg": "http://www.w3.org/2000/svg"}
FIXTURES_DIR = Path(__file__).resolve().parent / "fixtures"


def parse(svg):
    return ET.fromstring(svg.encode("utf-8"))


def group_ids(root):
    return [group.get("id") for group in root.iterfind(".//svg:g", NS)]


def label_texts(root):
    return [text.text for text in root.iterfind(".//svg:g[@id='labels']/svg:text", NS)]


@pytest.mark.unit
class TestFormatNumber:
    """Test cases for format_number."""

    @pytest.mark.parametrize(
        "value, expected",
        [
            (0.1, "0.1"),
            (-0.0, "0"),
            (Fraction(1, 2), "0.5"),
            (2.0, "2"),
            (Fraction(1, 3), "0.333333333333"),
            (1e-20, "1e-20"),
        ],
    )
    def test_format(self, value, expected):
        assert format_number(value) == expected


@pytest.mark.unit
class TestFigureOptions:
    """Test cases for FigureOptions."""

    def test_default_strokes(self):
        options = FigureOptions()
        assert set(options.strokes) == set(constants.DEFAULT_STROKES)
        assert options.style("diagonal").dash == "4 3"

    def test_override_merges_with_defaults(self):
        options = FigureOptions(strokes={"chord": {"stroke": "#ff0000", "width": 2}})
        assert options.style("chord").stroke == "#ff0000"
        assert options.style("triangle").stroke == constants.DEFAULT_STROKES["triangle"]["stroke"]

    def test_unknown_element_class(self):
        with pytest.raises(ValidationError, match="Unknown element classes"):
            FigureOptions(strokes={"sun": {"stroke": "#ffff00", "width": 1}})

    @pytest.mark.parametrize("overrides", [{"width": 0}, {"height": -5}, {"labels": "maybe"}])
    def test_invalid_options(self, overrides):
        with pytest.raises(ValidationError):
            FigureOptions(**overrides)


@pytest.mark.unit
class TestRenderSvg:
    """Test cases for render_svg."""

    def test_deterministic(self, s1_scene):
        output = construct(s1_scene)
        assert render_svg(output) == render_svg(construct(s1_scene))

    def test_document_shape(self, s1_scene):
        svg = render_svg(construct(s1_scene))
        assert svg.startswith('<?xml version="1.0" encoding="UTF-8"?>\n<svg')
        assert svg.endswith("</svg>\n")
        root = parse(svg)
        assert root.get("width") == "800"
        assert root.get("viewBox") == "0 0 800 800"

    def test_default_layers(self, s1_scene):
        root = parse(render_svg(construct(s1_scene)))
        assert group_ids(root) == [
            "construction",
            "circumcircle",
            "triangle",
            "axis",
            "chords",
            "parallelograms",
            "diagonals",
            "special-circle",
            "midpoint-circle",
            "points",
            "labels",
        ]

    def test_y_up_transform(self, s1_scene):
        root = parse(render_svg(construct(s1_scene)))
        transform = root.find("svg:g[@id='construction']", NS).get("transform")
        assert transform.startswith("matrix(")
        a, b, c, d, _, _ = (float(v) for v in transform[len("matrix(") : -1].split())
        assert a > 0
        assert d == -a
        assert b == c == 0

    def test_special_circle_geometry(self, s1_scene):
        root = parse(render_svg(construct(s1_scene)))
        circle = root.find(".//svg:g[@id='special-circle']/svg:circle", NS)
        assert (circle.get("cx"), circle.get("cy"), circle.get("r")) == ("-0.5", "0.5", "0.5")

    def test_strokes_do_not_scale(self, s1_scene):
        root = parse(render_svg(construct(s1_scene)))
        chords = root.find(".//svg:g[@id='chords']", NS)
        assert chords.get("vector-effect") == "non-scaling-stroke"
        assert chords.get("stroke") == constants.DEFAULT_STROKES["chord"]["stroke"]
        assert len(chords.findall("svg:line", NS)) == 3

    def test_layer_toggles(self, s1_scene):
        options = FigureOptions(midpoint_circle=False, diagonals=False)
        ids = group_ids(parse(render_svg(construct(s1_scene), options)))
        assert "midpoint-circle" not in ids
        assert "diagonals" not in ids
        assert "special-circle" in ids

    def test_labels(self, s1_scene):
        root = parse(render_svg(construct(s1_scene)))
        assert label_texts(root) == list(construct(s1_scene).named_points())

    def test_labels_off(self, s1_scene):
        root = parse(render_svg(construct(s1_scene), FigureOptions(labels=False)))
        assert label_texts(root) == []

    def test_degenerate_collapse(self, degenerate_scene):
        root = parse(render_svg(construct(degenerate_scene)))
        ids = group_ids(root)
        assert "collapse" in ids
        assert "special-circle" not in ids
        assert "parallelograms" not in ids
        texts = label_texts(root)
        assert "U=V=W=P" in texts
        assert "U" not in texts

    def test_hagge_overlay(self, s1_scene):
        root = parse(render_svg(construct(s1_scene), FigureOptions(hagge=True)))
        assert "hagge" in group_ids(root)
        assert "H" in label_texts(root)
        hagge = root.find(".//svg:g[@id='hagge']/svg:circle", NS)
        assert float(hagge.get("cy")) == pytest.approx(2 / 3)

    def test_arbitrary_frame(self, right_triangle_double):
        root = parse(render_svg(construct_in_frame(right_triangle_double)))
        assert "special-circle" in group_ids(root)


@pytest.mark.integration
class TestWriteSvg:
    """Test cases for write_svg and the golden figure."""

    def test_write_svg(self, s1_scene, tmp_path):
        target = tmp_path / "s1.svg"
        svg = write_svg(construct(s1_scene), str(target))
        assert target.read_text(encoding="utf-8") == svg

    @pytest.mark.parametrize(
        "golden_name, options",
        [
            ("s1_default.svg", FigureOptions()),
            ("s1_no_midcircle.svg", FigureOptions(midpoint_circle=False)),
        ],
    )
    def test_golden_s1(self, s1_scene, golden_name, options):
        """Set SPECIAL_CIRCLES_UPDATE_GOLDEN=1 to regenerate the golden files."""
        golden = FIXTURES_DIR / golden_name
        svg = render_svg(construct(s1_scene), options)
        if os.environ.get(constants.ENV_UPDATE_GOLDEN) == "1":
            golden.write_text(svg, encoding="utf-8")
        assert golden.exists(), f"golden figure {golden_name} is missing from {FIXTURES_DIR}"
        assert svg == golden.read_text(encoding="utf-8")

    def test_no_midcircle_golden_keeps_the_frame(self):
        default = (FIXTURES_DIR / "s1_default.svg").read_text(encoding="utf-8")
        without = (FIXTURES_DIR / "s1_no_midcircle.svg").read_text(encoding="utf-8")
        assert 'id="midpoint-circle"' in default
        assert 'id="midpoint-circle"' not in without
        assert 'transform="matrix(352 0 0 -352 400 400)"' in without

"""
Shared fixtures: the hand-computed scene S1 and the bundled scene documents
"""

from fractions import Fraction
from pathlib import Path

import pytest

from special_circles.construction import Scene
from special_circles.geometry import Point

SCENES_DIR = Path(__file__).resolve().parent.parent / "scenes"


def F(value) -> Fraction:
    return Fraction(value)


@pytest.fixture
def scenes_dir() -> Path:
    return SCENES_DIR


@pytest.fixture
def s1_scene() -> Scene:
    """Triangle (0, 1), (1, 0), (-1, 0); P = (-1/2, 0); D = (0, 1/2)."""
    return Scene.canonical([0, 1, -1], F("1/2"), D=Point(F(0), F("1/2")))


@pytest.fixture
def degenerate_scene() -> Scene:
    """S1 with the generator at the circumcenter."""
    return Scene.canonical([0, 1, -1], F("1/2"), D=Point(F(0), F(0)))


@pytest.fixture
def right_triangle_exact() -> Scene:
    """Arbitrary-frame scene whose normalization stays rational (R = 5/2, |OP| = 5/4)."""
    vertices = [Point(F(0), F(0)), Point(F(4), F(0)), Point(F(0), F(3))]
    return Scene.from_vertices(vertices, Point(F("11/4"), F("1/2")), D=Point(F(1), F(1)))


@pytest.fixture
def right_triangle_double() -> Scene:
    vertices = [Point(0.0, 0.0), Point(4.0, 0.0), Point(0.0, 3.0)]
    return Scene.from_vertices(vertices, Point(1.0, 1.0), D=Point(1.0, 0.5))

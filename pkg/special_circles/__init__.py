"""
Special Circles - circles through an arbitrary point of a triangle's plane

This package constructs the circle through a point P whose center K is chosen
freely, by way of chords through a generator point D, and verifies the
closed-form coordinates against an independent geometric construction.
"""

__version__ = "1.0.0"

from . import constants
from . import geometry
from . import construction
from . import frames
from . import scene_loader
from . import verify
from . import figure

__all__ = [
    "constants",
    "geometry",
    "construction",
    "frames",
    "scene_loader",
    "verify",
    "figure",
]

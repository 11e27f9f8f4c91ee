import hashlib
import json
import logging
import os
from fractions import Fraction
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, StrictFloat, StrictInt, StrictStr, ValidationError

from .construction import ConstructionOutput, Frame, Scene, TriangleParams
from .frames import normalize
from .geometry import Backend, Circle, GeometryError, Point, Scalar, to_scalar

logger = logging.getLogger(__name__)

Number = Union[StrictInt, StrictFloat, StrictStr]


class SceneError(Exception):
    """Custom exception for scene document loading errors."""

    def __init__(self, message: str, code: str = "INVALID_SCENE"):
        super().__init__(message)
        self.code = code


class TriangleDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    params: Optional[List[Number]] = Field(default=None, min_length=3, max_length=3)
    vertices: Optional[List[List[Number]]] = Field(default=None, min_length=3, max_length=3)


class KDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    k: Number


class CenterDocument(BaseModel):
    model_config = ConfigDict(extra="forbid")

    K: List[Number] = Field(min_length=2, max_length=2)


class SceneDocument(BaseModel):
    """JSON scene: triangle (params or vertices), P ([x, y] or {"k"}), D ([m, n]) or K."""

    model_config = ConfigDict(extra="forbid")

    triangle: TriangleDocument
    P: Union[List[Number], KDocument]
    D: Optional[Union[List[Number], CenterDocument]] = None
    K: Optional[List[Number]] = None
    backend: Literal["exact", "double"] = "exact"


def parse_scalar(value: Union[int, float, str], backend: Backend) -> Scalar:
    """Reads a JSON number or ``"p/q"`` string; JSON floats enter the exact backend as written."""
    try:
        if isinstance(value, float) and backend is Backend.EXACT:
            return Fraction(repr(value))
        return to_scalar(value, backend)
    except (ValueError, TypeError) as e:
        raise SceneError(f"Invalid number {value!r}: {e}", code="INVALID_NUMBER")


def parse_point(values: List[Union[int, float, str]], backend: Backend) -> Point:
    if len(values) != 2:
        raise SceneError(f"A point needs exactly two coordinates, got {values!r}", code="INVALID_SCENE")
    return Point(parse_scalar(values[0], backend), parse_scalar(values[1], backend))


def encode_scalar(value: Scalar) -> Union[str, float]:
    """Rationals as ``"p/q"`` strings, doubles as JSON numbers."""
    if isinstance(value, Fraction):
        return str(value)
    return float(value)


def encode_point(point: Point) -> List[Union[str, float]]:
    return [encode_scalar(point.x), encode_scalar(point.y)]


def encode_circle(circle: Optional[Circle]) -> Optional[Dict[str, Any]]:
    if circle is None:
        return None
    return {
        "g": encode_scalar(circle.g),
        "f": encode_scalar(circle.f),
        "t": encode_scalar(circle.t),
        "center": encode_point(circle.center),
        "r2": encode_scalar(circle.radius_squared),
    }


def _resolve_generator_fields(document: SceneDocument, backend: Backend) -> Dict[str, Point]:
    has_center = document.K is not None or isinstance(document.D, CenterDocument)
    has_generator = isinstance(document.D, list)
    if not has_center and not has_generator:
        raise SceneError("Scene needs either \"D\" or \"K\"", code="SCENE_UNDERSPECIFIED")
    if (has_center and has_generator) or (document.K is not None and document.D is not None):
        raise SceneError("Scene accepts only one of \"D\" and \"K\"", code="SCENE_OVERSPECIFIED")
    if has_generator:
        return {"D": parse_point(document.D, backend)}
    center = document.K if document.K is not None else document.D.K
    return {"K": parse_point(center, backend)}


def build_scene(document: SceneDocument) -> Scene:
    """Turns a validated document into a Scene, mapping geometry failures to SceneError."""
    backend = Backend(document.backend)
    generator = _resolve_generator_fields(document, backend)
    triangle = document.triangle
    if (triangle.params is None) == (triangle.vertices is None):
        raise SceneError("Triangle needs exactly one of \"params\" and \"vertices\"", code="INVALID_SCENE")

    try:
        if triangle.params is not None:
            params = TriangleParams(*(parse_scalar(v, backend) for v in triangle.params))
            if isinstance(document.P, KDocument):
                return Scene.canonical(params, parse_scalar(document.P.k, backend), **generator)
            P = parse_point(document.P, backend)
            if P.y == 0:
                return Scene.canonical(params, -P.x, **generator)
            vertices = params.vertices()
        else:
            if isinstance(document.P, KDocument):
                raise SceneError("P as {\"k\": ...} needs triangle \"params\"", code="INVALID_SCENE")
            vertices = tuple(parse_point(v, backend) for v in triangle.vertices)
            P = parse_point(document.P, backend)

        scene = Scene.from_vertices(vertices, P, **generator)
        if backend is Backend.EXACT:
            canonical, _ = normalize(scene.vertices, scene.P, D=scene.D)
            if canonical.backend is not Backend.EXACT:
                raise SceneError(
                    "The exact backend needs a canonical scene or one reachable without irrational rotation/scaling",
                    code="EXACT_REQUIRES_CANONICAL",
                )
        return scene
    except GeometryError as e:
        raise SceneError(str(e), code=e.code)


def parse_scene_document(data: Any) -> Scene:
    if not isinstance(data, dict):
        raise SceneError("Scene document is not a valid JSON object.", code="INVALID_SCENE")
    try:
        document = SceneDocument.model_validate(data)
    except ValidationError as e:
        raise SceneError(f"Scene document failed validation: {e}", code="INVALID_SCENE")
    return build_scene(document)


def load_scene(file_path: str) -> Scene:
    """Loads and validates a scene document from ``file_path``."""
    if not os.path.exists(file_path):
        raise SceneError(f"Scene file not found: {file_path}", code="SCENE_NOT_FOUND")
    try:
        with open(file_path, "r") as f:
            data = json.load(f)
    except json.JSONDecodeError as e:
        raise SceneError(f"Error decoding JSON from {file_path}: {e}", code="MALFORMED_JSON")
    except OSError as e:
        raise SceneError(f"Error reading file {file_path}: {e}", code="SCENE_NOT_FOUND")
    scene = parse_scene_document(data)
    logger.debug(f"Loaded {scene.frame.value} {scene.backend.value} scene from {file_path}")
    return scene


def scene_to_document(scene: Scene) -> Dict[str, Any]:
    """Serializes a scene so that ``parse_scene_document`` reproduces it exactly."""
    if scene.frame is Frame.CANONICAL and scene.params is not None:
        document = {
            "triangle": {"params": [encode_scalar(v) for v in scene.params]},
            "P": {"k": encode_scalar(scene.k)},
        }
    else:
        document = {
            "triangle": {"vertices": [encode_point(v) for v in scene.vertices]},
            "P": encode_point(scene.P),
        }
    document["D"] = encode_point(scene.D)
    document["backend"] = scene.backend.value
    return document


def scene_digest(scene: Scene) -> str:
    payload = json.dumps(scene_to_document(scene), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def output_to_document(output: ConstructionOutput) -> Dict[str, Any]:
    """ConstructionOutput as JSON-ready data (same number encoding as scenes)."""
    document: Dict[str, Any] = {
        "path": output.path.value,
        "backend": output.scene.backend.value,
        "frame": output.scene.frame.value,
        "scene": scene_to_document(output.scene),
    }
    for name, point in output.named_points().items():
        document[name] = encode_point(point)
    document["specialCircle"] = encode_circle(output.special_circle)
    document["midpointCircle"] = encode_circle(output.midpoint_circle)
    document["flags"] = list(output.flags)
    document["degenerate"] = output.degenerate
    return document

"""
SVG figures of the construction
Draws the circumcircle, triangle, chords through D, the parallelograms and the
resulting circles. Output is byte-identical for identical inputs.
"""

import logging
import xml.etree.ElementTree as ET
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field, PositiveFloat, PositiveInt, field_validator

from . import constants
from .construction import ConstructionOutput, HaggeConstruction, classic_hagge
from .geometry import Circle, GeometryError, Point

logger = logging.getLogger(__name__)

SVG_NAMESPACE = "http://www.w3.org/2000/svg"
XML_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


class StrokeStyle(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    stroke: str
    width: PositiveFloat
    dash: Optional[str] = None


class FigureOptions(BaseModel):
    """Canvas, styles and layer toggles; the defaults fully determine the output."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    width: PositiveInt = constants.DEFAULT_CANVAS_WIDTH
    height: PositiveInt = constants.DEFAULT_CANVAS_HEIGHT
    strokes: Dict[str, StrokeStyle] = Field(default_factory=dict, validate_default=True)
    labels: bool = True
    special_circle: bool = True
    midpoint_circle: bool = True
    hagge: bool = False
    diagonals: bool = True

    @field_validator("strokes", mode="before")
    @classmethod
    def _merge_default_strokes(cls, value):
        unknown = set(value or {}) - set(constants.DEFAULT_STROKES)
        if unknown:
            raise ValueError(f"Unknown element classes: {sorted(unknown)}")
        merged = dict(constants.DEFAULT_STROKES)
        merged.update(value or {})
        return merged

    def style(self, element_class: str) -> StrokeStyle:
        return self.strokes[element_class]


def format_number(value) -> str:
    """Shortest decimal up to 12 significant digits; never ``-0``."""
    text = f"{float(value):.{constants.SVG_SIGNIFICANT_DIGITS}g}"
    return "0" if text == "-0" else text


def _bounds(points: Iterable[Point], circles: Iterable[Circle]) -> Tuple[float, float, float, float]:
    xs, ys = [], []
    for p in points:
        xs.append(float(p.x))
        ys.append(float(p.y))
    for circle in circles:
        center = circle.center
        radius = float(circle.radius_squared) ** 0.5
        xs += [float(center.x) - radius, float(center.x) + radius]
        ys += [float(center.y) - radius, float(center.y) + radius]
    return min(xs), min(ys), max(xs), max(ys)


class SvgCanvas:
    """
    Builds the SVG tree. Geometry goes into a root group carrying the y-up
    transform ``matrix(s 0 0 -s tx ty)``; labels are placed in pixel space.
    """

    def __init__(self, options: FigureOptions, bounds: Tuple[float, float, float, float]):
        self.options = options
        min_x, min_y, max_x, max_y = bounds
        usable = 1 - 2 * constants.FIGURE_MARGIN_RATIO
        span_x, span_y = max(max_x - min_x, 1e-12), max(max_y - min_y, 1e-12)
        self.scale = min(options.width * usable / span_x, options.height * usable / span_y)
        self.tx = options.width / 2 - self.scale * (min_x + max_x) / 2
        self.ty = options.height / 2 + self.scale * (min_y + max_y) / 2

        self.root = ET.Element(
            "svg",
            xmlns=SVG_NAMESPACE,
            width=str(options.width),
            height=str(options.height),
            viewBox=f"0 0 {options.width} {options.height}",
        )
        ET.SubElement(self.root, "rect", width="100%", height="100%", fill="#ffffff")
        transform = " ".join(format_number(v) for v in (self.scale, 0, 0, -self.scale, self.tx, self.ty))
        self.construction = ET.SubElement(self.root, "g", id="construction", transform=f"matrix({transform})")
        self.labels = ET.SubElement(
            self.root,
            "g",
            id="labels",
            attrib={"font-family": "sans-serif", "font-size": str(constants.LABEL_FONT_SIZE_PX)},
        )

    def to_pixels(self, p: Point) -> Tuple[float, float]:
        return self.scale * float(p.x) + self.tx, -self.scale * float(p.y) + self.ty

    def layer(self, name: str, element_class: Optional[str] = None) -> ET.Element:
        attrib = {"id": name}
        if element_class is not None:
            style = self.options.style(element_class)
            attrib.update(
                {
                    "fill": "none",
                    "stroke": style.stroke,
                    "stroke-width": format_number(style.width),
                    "vector-effect": "non-scaling-stroke",
                }
            )
            if style.dash:
                attrib["stroke-dasharray"] = style.dash
        return ET.SubElement(self.construction, "g", attrib=attrib)

    @staticmethod
    def circle(parent: ET.Element, circle: Circle) -> ET.Element:
        center = circle.center
        return ET.SubElement(
            parent,
            "circle",
            cx=format_number(center.x),
            cy=format_number(center.y),
            r=format_number(float(circle.radius_squared) ** 0.5),
            attrib={"vector-effect": "non-scaling-stroke"},
        )

    @staticmethod
    def segment(parent: ET.Element, p1: Point, p2: Point) -> ET.Element:
        return ET.SubElement(
            parent,
            "line",
            x1=format_number(p1.x),
            y1=format_number(p1.y),
            x2=format_number(p2.x),
            y2=format_number(p2.y),
            attrib={"vector-effect": "non-scaling-stroke"},
        )

    @staticmethod
    def polygon(parent: ET.Element, points: Sequence[Point]) -> ET.Element:
        coordinates = " ".join(f"{format_number(p.x)},{format_number(p.y)}" for p in points)
        return ET.SubElement(parent, "polygon", points=coordinates, attrib={"vector-effect": "non-scaling-stroke"})

    def marker(self, parent: ET.Element, p: Point, radius_px: float = constants.POINT_RADIUS_PX) -> ET.Element:
        return ET.SubElement(
            parent,
            "circle",
            cx=format_number(p.x),
            cy=format_number(p.y),
            r=format_number(radius_px / self.scale),
        )

    def label(self, p: Point, text: str, drop_px: float = 0.0) -> ET.Element:
        x, y = self.to_pixels(p)
        y += drop_px
        element = ET.SubElement(
            self.labels,
            "text",
            x=format_number(x + constants.LABEL_OFFSET_PX),
            y=format_number(y - constants.LABEL_OFFSET_PX),
        )
        element.text = text
        return element

    def to_string(self) -> str:
        ET.indent(self.root, space="  ")
        return XML_HEADER + ET.tostring(self.root, encoding="unicode") + "\n"


def _hagge_overlay(output: ConstructionOutput) -> Optional[HaggeConstruction]:
    try:
        return classic_hagge(output.scene.vertices, output.scene.D)
    except GeometryError as e:
        logger.warning(f"Skipping classic Hagge overlay: {e}")
        return None


def render_svg(output: ConstructionOutput, options: Optional[FigureOptions] = None) -> str:
    """Renders ``output`` as an SVG document string."""
    options = options or FigureOptions()
    scene = output.scene
    named = output.named_points()
    hagge = _hagge_overlay(output) if options.hagge else None

    circles: List[Circle] = [scene.circumcircle]
    if options.special_circle and output.special_circle is not None:
        circles.append(output.special_circle)
    if options.midpoint_circle and output.midpoint_circle is not None:
        circles.append(output.midpoint_circle)
    extra_points: List[Point] = []
    if hagge is not None:
        circles.append(hagge.circle)
        extra_points += [*hagge.reflections, hagge.orthocenter]

    canvas = SvgCanvas(options, _bounds([*named.values(), *extra_points], circles))

    canvas.circle(canvas.layer("circumcircle", "circumcircle"), scene.circumcircle)
    canvas.polygon(canvas.layer("triangle", "triangle"), scene.vertices)
    canvas.segment(canvas.layer("axis", "axis"), scene.P, output.Q)

    chords = canvas.layer("chords", "chord")
    for vertex, end in zip(scene.vertices, output.chord_ends):
        canvas.segment(chords, vertex, end)

    if not output.degenerate:
        parallelograms = canvas.layer("parallelograms", "parallelogram")
        for vertex, end, special in zip(scene.vertices, output.chord_ends, output.special_points):
            canvas.polygon(parallelograms, (vertex, output.Q, end, special))
        if options.diagonals:
            diagonals = canvas.layer("diagonals", "diagonal")
            for special in output.special_points:
                canvas.segment(diagonals, output.Q, special)

    if options.special_circle and output.special_circle is not None:
        canvas.circle(canvas.layer("special-circle", "special_circle"), output.special_circle)
    if options.midpoint_circle and output.midpoint_circle is not None:
        canvas.circle(canvas.layer("midpoint-circle", "midpoint_circle"), output.midpoint_circle)
    if hagge is not None:
        overlay = canvas.layer("hagge", "hagge")
        canvas.circle(overlay, hagge.circle)
        for end, reflection in zip(hagge.chord_ends, hagge.reflections):
            canvas.segment(overlay, end, reflection)

    points = canvas.layer("points")
    points.set("fill", "#000000")
    hidden = {"U", "V", "W"} if output.degenerate else set()
    for name, point in named.items():
        if name in hidden:
            continue
        canvas.marker(points, point)
        if options.labels:
            canvas.label(point, name)
    if hagge is not None:
        canvas.marker(points, hagge.orthocenter)
        if options.labels:
            canvas.label(hagge.orthocenter, "H")

    if output.degenerate:
        collapse = canvas.layer("collapse", "special_circle")
        canvas.marker(collapse, scene.P, radius_px=3 * constants.POINT_RADIUS_PX)
        if options.labels:
            canvas.label(scene.P, "U=V=W=P", drop_px=constants.LABEL_FONT_SIZE_PX + constants.LABEL_OFFSET_PX)
        logger.info("Degenerate construction: drawing the collapse point instead of circles")

    logger.debug(f"Rendered {options.width}x{options.height} figure at scale {canvas.scale:.6g}")
    return canvas.to_string()


def write_svg(output: ConstructionOutput, file_path: str, options: Optional[FigureOptions] = None) -> str:
    svg = render_svg(output, options)
    with open(file_path, "w", encoding="utf-8", newline="\n") as f:
        f.write(svg)
    logger.info(f"Wrote figure to {file_path}")
    return svg

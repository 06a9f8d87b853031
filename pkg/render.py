"""
SVG pictures of the tiling in the Poincare disk with optional overlays:
coded paths, geodesics and spectacle intervals.
"""

import cmath
import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

try:
    from .hyperbolic_core import BoundaryPoint, Geodesic, Isometry, Triplet, axis, cw_distance, to_disk
    from .tiling import Vertex, get_tiling
    from .word_parser import WordParser
    from .words import matrix_of_word
except ImportError:
    from hyperbolic_core import BoundaryPoint, Geodesic, Isometry, Triplet, axis, cw_distance, to_disk
    from tiling import Vertex, get_tiling
    from word_parser import WordParser
    from words import matrix_of_word

SVG_NS = "http://www.w3.org/2000/svg"
OVERLAY_KINDS = ("word", "path", "geodesic", "interval")
PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2")


@dataclass(frozen=True)
class Overlay:
    kind: str
    value: str


@dataclass
class RenderSpec:
    triplet: Triplet
    depth: int
    overlays: List[Overlay] = field(default_factory=list)
    output: str = "tiling.svg"
    size: int = 800

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1 (got {self.depth})")
        for ov in self.overlays:
            validate_overlay(ov)


def parse_overlay(text: str) -> Overlay:
    """Parse kind:value, e.g. word:a2ba2b2, path:1.2, geodesic:0.5,2.0, interval:A"""
    kind, sep, value = text.partition(":")
    if not sep or kind not in OVERLAY_KINDS:
        raise ValueError(f"overlay must be one of {', '.join(k + ':...' for k in OVERLAY_KINDS)} (got {text!r})")
    overlay = Overlay(kind, value.strip())
    validate_overlay(overlay)
    return overlay


def validate_overlay(ov: Overlay):
    if ov.kind == "word":
        WordParser.to_cyclic(ov.value)
    elif ov.kind == "path":
        float(ov.value)
    elif ov.kind == "geodesic":
        parts = ov.value.split(",")
        if len(parts) != 2:
            raise ValueError(f"geodesic overlay needs two angles (got {ov.value!r})")
        Geodesic(BoundaryPoint(float(parts[0])), BoundaryPoint(float(parts[1])))
    elif ov.kind == "interval":
        if ov.value not in ("A", "B"):
            raise ValueError(f"interval overlay takes A or B (got {ov.value!r})")
    else:
        raise ValueError(f"unknown overlay kind {ov.kind!r}")


# ==================== Drawing primitives ====================
class _Canvas:
    def __init__(self, size: int):
        self.size = size
        self.radius = size * 0.48
        self.center = size / 2.0
        self.root = ET.Element("svg", {
            "xmlns": SVG_NS,
            "width": str(size),
            "height": str(size),
            "viewBox": f"0 0 {size} {size}",
        })
        self.layers: Dict[str, ET.Element] = {}

    def layer(self, name: str) -> ET.Element:
        if name not in self.layers:
            self.layers[name] = ET.SubElement(self.root, "g", {"id": name})
        return self.layers[name]

    def xy(self, w: complex) -> Tuple[float, float]:
        return self.center + self.radius * w.real, self.center - self.radius * w.imag

    def polyline(self, layer: str, points: Sequence[complex], stroke: str, width: float = 1.0):
        coords = " ".join(f"{x:.3f},{y:.3f}" for x, y in (self.xy(w) for w in points))
        ET.SubElement(self.layer(layer), "polyline", {
            "points": coords, "fill": "none", "stroke": stroke, "stroke-width": f"{width:g}",
        })

    def ring(self, layer: str, stroke: str, width: float):
        ET.SubElement(self.layer(layer), "circle", {
            "cx": f"{self.center:g}", "cy": f"{self.center:g}", "r": f"{self.radius:g}",
            "fill": "none", "stroke": stroke, "stroke-width": f"{width:g}",
        })

    def circle(self, layer: str, w: complex, r: float, fill: str):
        x, y = self.xy(w)
        ET.SubElement(self.layer(layer), "circle", {"cx": f"{x:.3f}", "cy": f"{y:.3f}", "r": f"{r:g}", "fill": fill})


def segment_points(w1: complex, w2: complex, n: int = 16) -> List[complex]:
    """Points along the disk geodesic segment from w1 to w2"""
    v = (w2 - w1) / (1 - w1.conjugate() * w2)
    return [(s * v + w1) / (1 + w1.conjugate() * s * v) for s in (k / n for k in range(n + 1))]


def geodesic_points(g: Geodesic, n: int = 48) -> List[complex]:
    """Points along a complete geodesic of the disk"""
    p1, p2 = g.endpoint_neg.to_complex(), g.endpoint_pos.to_complex()
    half = abs(cmath.phase(p2 / p1)) / 2.0
    if abs(math.cos(half)) < 1e-9:
        return [p1 + (p2 - p1) * k / n for k in range(n + 1)]
    mid = cmath.exp(1j * (cmath.phase(p1) + cmath.phase(p2 / p1) / 2.0))
    center = mid / math.cos(half)
    a1, a2 = cmath.phase(p1 - center), cmath.phase(p2 - center)
    sweep = (a2 - a1 + math.pi) % (2 * math.pi) - math.pi
    rad = abs(p1 - center)
    return [center + rad * cmath.exp(1j * (a1 + sweep * k / n)) for k in range(n + 1)]


def boundary_arc_points(left: float, right: float, n: int = 48) -> List[complex]:
    """Clockwise boundary arc from left to right"""
    span = cw_distance(left, right)
    return [cmath.exp(1j * (left - span * k / n)) for k in range(n + 1)]


# ==================== Scene ====================
def tiling_edges(t: Triplet, depth: int) -> List[Tuple[complex, complex]]:
    """Edges of the tiling within depth steps of A0, as disk segments"""
    tiling = get_tiling(t)
    gd = tiling.gd

    def key(w: complex) -> Tuple[int, int]:
        return int(round(w.real * 1e7)), int(round(w.imag * 1e7))

    start = Vertex(Isometry.identity(), "A")
    seen_vertices = {key(to_disk(start.position(gd)))}
    seen_edges = set()
    edges = []
    frontier = [start]
    for _ in range(depth):
        nxt = []
        for v in frontier:
            for e in tiling.neighbors(v):
                tail, head = (to_disk(z) for z in e.endpoints(gd))
                ekey = tuple(sorted((key(tail), key(head))))
                if ekey not in seen_edges:
                    seen_edges.add(ekey)
                    edges.append((tail, head))
                if key(head) not in seen_vertices:
                    seen_vertices.add(key(head))
                    nxt.append(e.head)
        frontier = nxt
    return edges


def render_svg(spec: RenderSpec) -> ET.Element:
    t = spec.triplet
    tiling = get_tiling(t)
    gd = tiling.gd
    canvas = _Canvas(spec.size)
    canvas.ring("boundary", "#000000", 1.5)
    for tail, head in tiling_edges(t, spec.depth):
        canvas.polyline("tiling", segment_points(tail, head), "#999999", 0.6)
    canvas.circle("tiling", to_disk(gd.a0), 3.0, "#000000")
    canvas.circle("tiling", to_disk(gd.b0), 3.0, "#555555")

    for i, ov in enumerate(spec.overlays):
        color = PALETTE[i % len(PALETTE)]
        name = f"overlay-{i}-{ov.kind}"
        if ov.kind == "word":
            word = WordParser.to_cyclic(ov.value, t)
            m = matrix_of_word(word, gd)
            canvas.polyline(name, geodesic_points(axis(m)), color, 1.5)
            path = tiling.follow_path(Vertex(Isometry.identity(), "A"), m, max_steps=4 * len(word) + 8)
            pts = [to_disk(v.position(gd)) for v in path.vertices]
            for a, b in zip(pts, pts[1:]):
                canvas.polyline(name, segment_points(a, b), color, 2.0)
        elif ov.kind == "path":
            xi = BoundaryPoint(float(ov.value))
            path = tiling.follow_path(Vertex(Isometry.identity(), "A"), xi, max_steps=4 * spec.depth)
            pts = [to_disk(v.position(gd)) for v in path.vertices]
            for a, b in zip(pts, pts[1:]):
                canvas.polyline(name, segment_points(a, b), color, 2.0)
            canvas.circle(name, xi.to_complex(), 4.0, color)
        elif ov.kind == "geodesic":
            a1, a2 = (float(x) for x in ov.value.split(","))
            canvas.polyline(name, geodesic_points(Geodesic(BoundaryPoint(a1), BoundaryPoint(a2))), color, 1.5)
        elif ov.kind == "interval":
            entries = tiling.theta[ov.value]
            n = len(entries)
            for k in range(n):
                interval = tiling.base_interval(ov.value, dual=False).image(gd.step(ov.value.lower(), k))
                arc = boundary_arc_points(interval.left.angle, interval.right.angle)
                canvas.polyline(name, [w * 1.02 for w in arc], PALETTE[k % len(PALETTE)], 4.0)
    return canvas.root


def render(spec: RenderSpec) -> Path:
    """Write the SVG described by spec; returns the output path"""
    root = render_svg(spec)
    out = Path(spec.output)
    if out.parent and not out.parent.exists():
        out.parent.mkdir(parents=True, exist_ok=True)
    ET.ElementTree(root).write(out, encoding="utf-8", xml_declaration=True)
    return out

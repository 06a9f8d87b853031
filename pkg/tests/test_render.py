import xml.etree.ElementTree as ET

import pytest

from render import SVG_NS, Overlay, RenderSpec, geodesic_points, parse_overlay, render, tiling_edges
from hyperbolic_core import BoundaryPoint, Geodesic


def _polylines(path):
    root = ET.parse(path).getroot()
    return root.findall(f".//{{{SVG_NS}}}polyline")


def test_render_tiling(t337, tmp_path):
    out = render(RenderSpec(t337, 2, output=str(tmp_path / "out" / "tiling.svg"), size=400))
    assert out.exists()
    assert len(_polylines(out)) == len(tiling_edges(t337, 2))


def test_render_overlays(t337, tmp_path):
    overlays = [parse_overlay(x) for x in ("word:a2ba2bab", "path:1.2", "geodesic:0.5,2.0", "interval:A")]
    out = render(RenderSpec(t337, 2, overlays, str(tmp_path / "overlays.svg")))
    root = ET.parse(out).getroot()
    ids = {g.get("id") for g in root.findall(f"{{{SVG_NS}}}g")}
    assert {"overlay-0-word", "overlay-1-path", "overlay-2-geodesic", "overlay-3-interval"} <= ids


def test_tiling_edges_grow_with_depth(t344):
    assert len(tiling_edges(t344, 1)) == 3
    assert len(tiling_edges(t344, 3)) > len(tiling_edges(t344, 2))


@pytest.mark.parametrize("text", ["circle:1", "word:a2x", "path:abc", "geodesic:1.0", "interval:C", "word"])
def test_bad_overlays(text):
    with pytest.raises(ValueError):
        parse_overlay(text)


def test_bad_depth(t337):
    with pytest.raises(ValueError):
        RenderSpec(t337, 0)
    with pytest.raises(ValueError):
        RenderSpec(t337, 2, [Overlay("interval", "C")])


def test_geodesic_points_end_on_the_circle():
    pts = geodesic_points(Geodesic(BoundaryPoint(0.3), BoundaryPoint(2.0)))
    assert abs(abs(pts[0]) - 1.0) < 1e-9
    assert abs(abs(pts[-1]) - 1.0) < 1e-9
    assert all(abs(w) <= 1.0 + 1e-9 for w in pts)

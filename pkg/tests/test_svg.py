import xml.etree.ElementTree as ET

import numpy as np

from topoclass.numerics import make_rng
from topoclass.svg import SvgScene, heatmap_svg, scatter_svg

NS = {"svg": "http://www.w3.org/2000/svg"}


def circles_of(svg_text):
    return ET.fromstring(svg_text).findall(".//svg:circle", NS)


def test_marks_stay_inside_viewport():
    rng = make_rng(1)
    pts = rng.uniform(-1e6, 1e6, size=(200, 2))  # extreme ranges still autoscale
    svg = scatter_svg(pts, np.zeros(200, dtype=int), "extremes")
    for circle in circles_of(svg):
        cx, cy, r = (float(circle.get(a)) for a in ("cx", "cy", "r"))
        assert 0.0 <= cx - r and cx + r <= 640.0
        assert 0.0 <= cy - r and cy + r <= 480.0


def test_degenerate_cloud_renders():
    pts = np.zeros((5, 2))
    svg = scatter_svg(pts, np.zeros(5, dtype=int), "all identical")
    assert len(circles_of(svg)) == 5


def test_depth_cue_varies_radius():
    pts = np.array([[0.0, 0.0, 0.0], [1.0, 1.0, 10.0]])
    svg = scatter_svg(pts, [0, 1], "3d")
    radii = sorted(float(c.get("r")) for c in circles_of(svg))
    assert radii[0] < radii[1]


def test_one_dimensional_points_padded():
    svg = scatter_svg(np.array([[0.0], [1.0]]), [0, 1], "line")
    assert len(circles_of(svg)) == 2


def test_title_is_escaped():
    scene = SvgScene(title="a < b & c")
    scene.add_point(0.0, 0.0, 3.0, "#000000")
    root = ET.fromstring(scene.render())  # would raise on unescaped markup
    assert "a < b & c" in [t.text for t in root.findall(".//svg:text", NS)]


def test_heatmap_is_wellformed():
    xs = np.linspace(-1, 1, 5)
    ys = np.linspace(-1, 1, 4)
    values = np.outer(np.arange(4), np.arange(5)).astype(float)
    root = ET.fromstring(heatmap_svg(xs, ys, values, "field"))
    rects = root.findall(".//svg:rect", NS)
    assert len(rects) == 1 + 4 * 5  # background plus one cell each

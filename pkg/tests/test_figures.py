import math

import pytest

from figures import DapsFigure, SceneFigure, load_fonts
from sensing.model import MpcRecord, Point2, RpEstimate
from sensing.pipeline import CloudPoint, cluster_records


def test_fonts_always_load():
    fonts = load_fonts()
    assert {"medium", "small"} <= set(fonts)


def test_daps_image_size_and_content():
    mpcs = [MpcRecord(-80.0, 10e-9, math.radians(30)),
            MpcRecord(-82.0, 10.5e-9, math.radians(32)),
            MpcRecord(-95.0, 50e-9, math.radians(200))]
    image = DapsFigure(width=400, height=300).render("u1", mpcs, cluster_records(mpcs))
    assert image.size == (400, 300)
    assert len(image.getcolors(maxcolors=1 << 16)) > 2


def test_daps_without_records_still_renders():
    image = DapsFigure().render("empty", [])
    assert image.size == (600, 600)


def test_scene_svg(tmp_path, l_room):
    env, observations, _ = l_room
    est = RpEstimate(Point2(1.0, -5.0), 4.0, 0.0, "ue01", 0)
    cloud = [CloudPoint(est, None), CloudPoint(est, 0)]
    out = tmp_path / "scene.svg"
    SceneFigure().save(out, env, observations, cloud)
    text = out.read_text(encoding="utf-8")
    assert "<svg" in text
    assert "RP (duplicate)" in text


def test_scene_figure_skips_raster_fonts(monkeypatch):
    monkeypatch.setattr("figures.base.load_fonts", lambda: pytest.fail("fonts loaded"))
    assert SceneFigure().fonts == {}

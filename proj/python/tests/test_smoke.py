import json
import math
from pathlib import Path

import numpy as np
import pytest

import lamgen

CONFIGS = Path(__file__).resolve().parents[2] / "configs"


def test_strengths_and_laws():
    assert lamgen.reduce_strength(9720.0, 0.0876, 5, 1.0) == pytest.approx(13.0, rel=5e-3)
    assert lamgen.reduce_strength(9720.0, 0.315, 1, 1.0) == pytest.approx(55.3, rel=5e-3)
    assert lamgen.bk_toughness(0.0) == 0.0876
    assert lamgen.bk_toughness(1.0) == 0.315
    assert lamgen.bk_toughness(0.5) == pytest.approx(0.0876 + 0.2274 * 0.5**2.68)
    assert lamgen.fiber_damage(0.0109) == 0.0
    assert lamgen.fiber_damage(0.013) == 1.0


def test_config_round_trip_and_errors():
    cfg = lamgen.Config.from_file(str(CONFIGS / "three_ply.cfg"))
    assert [p["theta"] for p in cfg.plies] == [-18.0, 10.0, 55.0]
    assert lamgen.Config.from_text(cfg.to_text()) == cfg
    with pytest.raises(ValueError, match="laminate"):
        lamgen.Config.from_text("[laminate]\nL = -1\n")


def test_generate_mesh_validate():
    cfg = lamgen.Config.from_file(str(CONFIGS / "two_ply_interface.cfg"))
    model = lamgen.Model.generate(cfg, threads=2)
    report = model.validate()
    assert report.passed, report.failures
    assert report.max_tiling_residual < 1e-9
    assert json.loads(report.json())["passed"] is True

    parts = model.parts()
    assert len(parts) == model.part_count
    area = {}
    for p in parts:
        fp = p["footprint"]
        x, y = fp[:, 0], fp[:, 1]
        a = 0.5 * abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))
        area[p["slab"]] = area.get(p["slab"], 0.0) + a
    assert area[0] == pytest.approx(200.0, rel=1e-9)
    assert len(model.ties()) == model.tie_count

    mesh = lamgen.Mesh.build(model, yarn_size=1.0)
    assert mesh.nodes.shape == (mesh.node_count, 3)
    assert mesh.validate(model).passed
    assert mesh.vtk(model).startswith("# vtk DataFile Version 3.0")
    svg = model.interface_svg(1)
    cells = sum(p["role"] == "delamination-cracklet" for p in parts)
    assert svg.count('class="delamination-cracklet"') == cells


def test_model_text_round_trip_and_elastic_line():
    model = lamgen.Model.generate(lamgen.Config.random(5))
    again = lamgen.Model.from_text(model.to_text())
    assert again.to_text() == model.to_text()
    mesh = lamgen.Mesh.build(model, yarn_size=1.0)
    r1 = lamgen.elastic_reaction(model, mesh, 1e-3)
    r2 = lamgen.elastic_reaction(model, mesh, 2e-3)
    assert r1 > 0 and math.isclose(r2, 2 * r1, rel_tol=1e-9)

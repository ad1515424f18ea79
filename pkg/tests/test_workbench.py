import json

import numpy as np
import pytest

from cofactor import synth
from cofactor.conditions import cofactor_report
from cofactor.errors import InputError, NoCrossing, NoLambda2Curve
from cofactor.workbench import (
    CompositionModel, bundled_crystal, load_crystal, parse_crystal, screen, table2_report,
)
from cofactor.workbench.table2 import alloy_row

GRID = np.linspace(0.0, 1.0, 11)


def test_load_bundled_cualmn():
    spec = load_crystal("bundled:cualmn")
    assert spec.U[0, 0] == 1.1098 and spec.U[2, 2] == 0.8989
    np.testing.assert_allclose(spec.ehat, np.array([1, 0, 1]) / np.sqrt(2))


def test_load_from_file(tmp_path):
    p = tmp_path / "c.json"
    p.write_text(json.dumps({"name": "x", "U": np.diag([0.9, 1, 1.1]).tolist(), "ehat": [0, 1, 1]}))
    spec = load_crystal(p)
    np.testing.assert_allclose(spec.ehat, [0, 1 / np.sqrt(2), 1 / np.sqrt(2)])
    p.write_text(json.dumps({"monoclinic": {"alpha": 1.05, "beta": 0.03, "gamma": 0.93, "delta": 1.01}}))
    spec = load_crystal(p)
    assert spec.U[0, 1] == 0.03 and spec.ehat is None


@pytest.mark.parametrize("data,field", [
    ({"name": "x"}, "U"),
    ({"U": np.eye(3).tolist(), "monoclinic": {}}, "U"),
    ({"U": [[1, 0], [0, 1]]}, "U"),
    ({"U": [[1, 0, 0], [0, "a", 0], [0, 0, 1]]}, "U[1][1]"),
    ({"U": [[1, 0.2, 0], [0, 1, 0], [0, 0, 1]]}, "U"),
    ({"U": np.diag([1, -1, 1]).tolist()}, "U"),
    ({"monoclinic": {"alpha": 1, "beta": 0, "gamma": 1}}, "monoclinic.delta"),
    ({"U": np.eye(3).tolist(), "ehat": [0, 0, 0]}, "ehat"),
])
def test_schema_errors_name_the_field(data, field):
    with pytest.raises(InputError) as exc:
        parse_crystal(data)
    assert exc.value.field == field


def test_missing_file_and_bad_json(tmp_path):
    with pytest.raises(InputError):
        load_crystal(tmp_path / "nope.json")
    p = tmp_path / "bad.json"
    p.write_text("{not json")
    with pytest.raises(InputError):
        load_crystal(p)
    with pytest.raises(InputError):
        load_crystal("bundled:unobtainium")


def test_table2_report_matches_expected():
    rows = {r["name"]: r for r in table2_report()}
    assert all(r["pass"] for r in rows.values())
    assert rows["VO2"]["verdict"] == "satisfied if lambda2 = 1"
    assert rows["VO2"]["verdict_lambda2_forced"] == "satisfied (Compound)"


def test_table2_is_stable_under_rounding_noise():
    """Entries carry four decimals: noise of 5e-5 per entry must move no output by more than 1.5e-3."""
    rng = np.random.default_rng(7)
    for name in ("cualmn", "aucuzn", "vo2"):
        spec = bundled_crystal(name)
        base = alloy_row(spec)
        spread = 0.0
        for _ in range(200):
            N = rng.uniform(-5e-5, 5e-5, (3, 3))
            N = np.triu(N) + np.triu(N, 1).T
            row = alloy_row(type(spec)(**{**spec.__dict__, "U": spec.U + N}))
            spread = max(spread, *(abs(row[k] - base[k]) for k in ("lambda2_dev", "typeI", "typeII", "cc3")))
        assert spread <= 1.5e-3, (name, spread)


def _planted(rng, maker, target):
    s = maker(rng)
    V = s.frame
    Dy = 0.04 * np.outer(V[:, 1], V[:, 1]) + 0.01 * np.outer(V[:, 0], V[:, 0])
    if target == "compound":
        Dx = 0.02 * (np.outer(V[:, 1], V[:, 2]) + np.outer(V[:, 2], V[:, 1])) + 0.01 * np.outer(V[:, 0], V[:, 0])
    else:
        Dx = 0.05 * np.outer(V[:, 0], V[:, 0]) + 0.02 * np.outer(V[:, 2], V[:, 2])
    model = CompositionModel.from_function(lambda x, y: s.U + (x - 0.5) * Dx + (y - 0.5) * Dy, [0, 1], [0, 1])
    return s, model


@pytest.mark.parametrize("maker,target", [
    (synth.type1_system, "type1"), (synth.type2_system, "type2"),
])
def test_screen_recovers_planted_root(rng, maker, target):
    s, model = _planted(rng, maker, target)
    res = screen(model, s.ehat, GRID, GRID, target)
    assert abs(res.x - 0.5) < 1e-6 and abs(res.y - 0.5) < 1e-6
    assert abs(res.lambda2_residual) < 1e-10 and abs(res.type_residual) < 1e-10
    assert res.verdict == "cofactor conditions satisfied"
    assert len(res.trace) == len(GRID)
    again = screen(model, s.ehat, GRID, GRID, target)
    assert (again.x, again.y) == (res.x, res.y)


def test_screen_reports_failed_inequality(rng):
    s, model = _planted(rng, synth.violate_cc3, "compound")
    res = screen(model, s.ehat, GRID, GRID, "compound")
    assert abs(res.x - 0.5) < 1e-6 and abs(res.y - 0.5) < 1e-6
    assert res.cc3 < 0
    assert res.verdict == "interpolation found, inequality fails"


def test_screen_without_lambda2_curve(rng):
    s = synth.type1_system(rng)
    model = CompositionModel.from_function(lambda x, y: s.U + (0.02 + 0.01 * x + 0.01 * y) * np.eye(3),
                                           [0, 1], [0, 1])
    with pytest.raises(NoLambda2Curve):
        screen(model, s.ehat, GRID, GRID, "type1")


def test_screen_without_crossing(rng):
    s = synth.type1_system(rng)
    V = s.frame
    Dy = 0.04 * np.outer(V[:, 1], V[:, 1])
    model = CompositionModel.from_function(lambda x, y: s.U + (y - 0.5) * Dy + 0.05 * np.outer(V[:, 0], V[:, 0]),
                                           [0, 1], [0, 1])
    with pytest.raises(NoCrossing):
        screen(model, s.ehat, GRID, GRID, "type1")


def test_composition_model_reproduces_anchors(rng):
    anchors = [[synth.type1_system(rng).U for _ in range(3)] for _ in range(2)]
    m = CompositionModel([0.0, 1.0], [0.0, 0.3, 1.0], anchors)
    for i, x in enumerate([0.0, 1.0]):
        for j, y in enumerate([0.0, 0.3, 1.0]):
            np.testing.assert_allclose(m(x, y), anchors[i][j], atol=1e-15)
    with pytest.raises(InputError):
        CompositionModel([0, 1], [0, 1], np.zeros((2, 3, 3, 3)))

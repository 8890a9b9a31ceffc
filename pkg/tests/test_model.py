import json
import math

import pytest
from hypothesis import given, strategies as st

from paddle_lab import (InvalidParameter, TouchViolation, build_model,
                        deflection_state, load_model_json, model_from_dict,
                        model_to_dict, touch_limits, yb_from_yp, yp_from_yb)
from paddle_lab.model import MODEL_JSON_KEYS


def test_default_geometry_resolution(default_model):
    g = default_model.geom
    assert g.w_p == g.l_p
    assert g.b_root == g.l_p
    assert g.d_e == g.d_c
    assert g.center_ratio == pytest.approx(1.0 + 5.0 / 3.0, rel=1e-15)
    assert g.edge_ratio == pytest.approx(1.0 + 10.0 / 3.0, rel=1e-15)


def test_film_defaults_resolve(default_model):
    f = default_model.film
    # half the root width times beam length: triangular plan fully covered
    assert f.A_F == pytest.approx(0.5 * 5e-3 * 3e-3, rel=1e-15)
    assert default_model.V_F == pytest.approx(f.t_F * f.A_F, rel=1e-15)
    assert default_model.eps_F0 == 0.0


def test_touch_limits_value(default_model):
    lo, hi = touch_limits(default_model.geom)
    assert hi == pytest.approx(8e-4 / 13.0, rel=1e-14)
    assert lo == pytest.approx(-8e-4 / 13.0, rel=1e-14)
    assert default_model.y_p_min == lo and default_model.y_p_max == hi


def test_kinematic_round_trip(default_model):
    g = default_model.geom
    for y_p in (-5e-5, -1e-6, 0.0, 2e-5, 6e-5):
        assert yp_from_yb(yb_from_yp(y_p, g), g) == pytest.approx(y_p, abs=1e-20)


def test_deflection_state_fields(default_model):
    g = default_model.geom
    st_ = deflection_state(3e-5, g)
    assert st_.y_b == pytest.approx(3e-5 / g.center_ratio, rel=1e-14)
    assert st_.slope == pytest.approx(2.0 * st_.y_b / g.l_b, rel=1e-14)
    assert st_.y_edge == pytest.approx(st_.y_b * g.edge_ratio, rel=1e-14)
    # gap at paddle near edge / far edge
    assert st_.gap_top(0.0) == pytest.approx(g.d_c - st_.y_b, rel=1e-14)
    assert st_.gap_top(g.l_p) == pytest.approx(g.d_c - st_.y_edge, rel=1e-14)
    assert st_.gap_bottom(g.l_p) == pytest.approx(g.d_e + st_.y_edge, rel=1e-14)


def test_deflection_state_touch_violation(default_model):
    g = default_model.geom
    lo, hi = touch_limits(g)
    with pytest.raises(TouchViolation):
        deflection_state(hi * 1.0001, g)
    with pytest.raises(TouchViolation):
        deflection_state(lo * 1.0001, g)
    # exactly at the limit the far edge touches: rejected as well
    with pytest.raises(TouchViolation):
        deflection_state(hi, g)


@given(st.floats(min_value=-0.99, max_value=0.99))
def test_edge_always_beyond_center(frac):
    m = build_model()
    y_p = frac * m.y_p_max
    s = deflection_state(y_p, m.geom)
    assert abs(s.y_edge) >= abs(y_p) or y_p == 0.0


def test_build_model_rejects_unknown_key():
    with pytest.raises(InvalidParameter):
        build_model(notakey=1.0)


@pytest.mark.parametrize("key,value", [
    ("l_b", 0.0), ("l_p", -1e-3), ("t_b", 0.0), ("d_c", -1e-6),
    ("E_biaxial", 0.0), ("K", 0.0), ("E_F", -1.0), ("t_F", -1e-9),
])
def test_build_model_rejects_nonpositive(key, value):
    with pytest.raises(InvalidParameter):
        build_model(**{key: value})


def test_thickness_must_fit_in_gap():
    with pytest.raises(InvalidParameter):
        build_model(t_b=2e-4)  # thicker than the 100 um gap


def test_dict_round_trip(default_model):
    d = model_to_dict(default_model.model)
    assert set(d) == set(MODEL_JSON_KEYS)
    again = model_from_dict(d)
    assert model_to_dict(again.model) == d


def test_dict_rejects_bool_and_string():
    d = model_to_dict(build_model().model)
    d["l_b"] = True
    with pytest.raises(InvalidParameter):
        model_from_dict(d)
    d2 = model_to_dict(build_model().model)
    d2["l_b"] = "3e-3"
    with pytest.raises(InvalidParameter):
        model_from_dict(d2)


def test_load_model_json(tmp_path):
    d = model_to_dict(build_model().model)
    d["sigma0"] = 1.5e8
    path = tmp_path / "model.json"
    path.write_text(json.dumps(d))
    m = load_model_json(path)
    assert m.film.sigma0 == 1.5e8
    assert m.eps_F0 == pytest.approx(1.5e8 / 70e9, rel=1e-15)


def test_load_model_json_malformed(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    with pytest.raises(InvalidParameter):
        load_model_json(path)


def test_partial_json_uses_defaults(tmp_path):
    path = tmp_path / "partial.json"
    path.write_text(json.dumps({"sigma0": 2e8}))
    m = load_model_json(path)
    assert m.film.sigma0 == 2e8
    assert m.geom.l_b == 3e-3


def test_eps_f0_sign_convention(with_sigma0):
    # tensile stress = positive initial strain
    assert with_sigma0(1e8).eps_F0 > 0
    assert with_sigma0(-1e8).eps_F0 < 0
    assert math.isclose(with_sigma0(7e8).eps_F0, 0.01, rel_tol=1e-12)

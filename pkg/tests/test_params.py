import math

import pytest
from hypothesis import given, settings, strategies as st

from cachecomp.params import (
    ConfigError,
    SystemParams,
    db_to_linear,
    dump_config,
    load_config,
    loads_config,
    table_i,
)


def test_db_to_linear():
    assert db_to_linear(0) == 1.0
    assert db_to_linear(10) == pytest.approx(10.0, rel=1e-15)
    assert db_to_linear(-3.01) == pytest.approx(0.5001, abs=1e-4)


def test_defaults_reproduce_reference_table(p):
    assert (p.alpha_los, p.alpha_nlos) == (2.09, 3.75)
    assert p.a_los == pytest.approx(10 ** -4.11)
    assert p.a_nlos == pytest.approx(10 ** -3.29)
    assert p.g_main == pytest.approx(10.0)
    assert p.g_side == pytest.approx(10 ** -0.301)
    assert (p.m_nakagami, p.eta_spread, p.h_sbs, p.h_ue) == (3, 2.0, 30.0, 100.0)
    assert (p.bldg_area_fraction, p.bldg_density, p.bldg_height_scale) == (0.3, 200.0, 15.0)
    assert (p.r_cluster, p.lambda_b, p.sir_threshold, p.c_f) == (200.0, 20.0, 1.0, 1.0)
    assert (p.theta_tilt, p.theta_beam) == (8.0, 30.0)
    assert p.lambda_b_m2 == pytest.approx(2e-5)
    assert p.mean_caching_count == pytest.approx(2.5133, abs=1e-4)


def test_empty_file_gives_defaults(tmp_path):
    f = tmp_path / "empty.cfg"
    f.write_text("")
    assert load_config(f) == table_i()
    assert load_config("tableI") == table_i()


def test_single_override(tmp_path):
    f = tmp_path / "rc.cfg"
    f.write_text("# wider clusters\nr_cluster = 500\n")
    p = load_config(f)
    assert p.r_cluster == 500.0
    assert p == table_i().replace(r_cluster=500.0)


def test_bad_caching_probability_names_key(tmp_path):
    f = tmp_path / "bad.cfg"
    f.write_text("c_f = 1.5\n")
    with pytest.raises(ConfigError) as e:
        load_config(f)
    assert "c_f" in str(e.value)


def test_parse_error_reports_line():
    with pytest.raises(ConfigError, match="line 3"):
        loads_config("h_ue = 100\n\nm_nakagami = three\n")
    with pytest.raises(ConfigError, match="line 1"):
        loads_config("no_such_key = 4\n")


def test_db_keys():
    p = loads_config("g_main_db = 12\nsir_threshold_db = -3\n")
    assert p.g_main == pytest.approx(db_to_linear(12))
    assert p.sir_threshold == pytest.approx(db_to_linear(-3))


def test_invariant_violations_listed():
    with pytest.raises(ConfigError) as e:
        SystemParams(alpha_los=4.0, m_nakagami=0)
    assert len(e.value.problems) >= 2


def test_kappa_max_floor():
    p = table_i()
    assert p.kappa_max >= math.ceil(p.mean_caching_count) + 8 * math.sqrt(p.mean_caching_count)
    with pytest.raises(ConfigError, match="kappa_max"):
        p.replace(kappa_max=5)


def test_window_must_exceed_cluster():
    with pytest.raises(ConfigError, match="r_sim_window"):
        table_i().replace(r_sim_window=100.0)


params_strategy = st.builds(
    lambda **kw: table_i().replace(**kw),
    alpha_los=st.floats(1.5, 3.0),
    a_los=st.floats(1e-6, 1e-2),
    g_side=st.floats(0.01, 1.0),
    m_nakagami=st.integers(1, 8),
    eta_spread=st.floats(0.1, 10),
    h_ue=st.floats(31, 500),
    r_cluster=st.floats(10, 1000),
    lambda_b=st.floats(1, 50),
    c_f=st.floats(0, 1),
    sir_threshold=st.floats(1e-3, 1e3),
    rng_seed=st.integers(0, 2**32),
)


@settings(max_examples=60, deadline=None)
@given(params_strategy)
def test_config_round_trip(p):
    assert loads_config(dump_config(p)) == p

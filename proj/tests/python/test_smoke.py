import math

import pytest

import d2doffload as d2d


def test_baseline_profile_loads():
    net = d2d.load_network("table1")
    assert net.eta_d == pytest.approx(10.0)
    assert "table1" in d2d.profile_names()
    cache = d2d.load_cache()
    assert cache.cache_d2d == 20


def test_kernels():
    assert d2d.hyp2f1(1.0, 1.0, 2.0, 0.5) == pytest.approx(-math.log(0.5) / 0.5, rel=1e-12)
    assert d2d.lens_area(3.0, 1.0, 2.0) == pytest.approx(4 * math.pi, rel=1e-9)
    net = d2d.load_network()
    assert d2d.containment_weight(0.0, net.lambda_m, net.lambda_d) == pytest.approx(1 / 15)
    assert d2d.p_user_inside(net.lambda_m, net.lambda_d) == 0.2


def test_uniform_scheme_flat_in_k():
    net = d2d.load_network()
    cache = d2d.load_cache()
    vals = [d2d.p_d2d_mode(d2d.SelectionScheme.US, 1, k, net.eta_d, cache) for k in range(1, 9)]
    assert max(vals) - min(vals) < 1e-15


def test_model_orderings():
    model = d2d.PerformanceModel(d2d.load_network(), d2d.load_cache())
    assert model.gamma_d(1) > model.gamma_d(2) > model.gamma_m()
    assert model.optimal_k_coverage(d2d.SelectionScheme.US, 1).k == 1


def test_commands_return_rows():
    rows = d2d.analytic(["mode-prob"], overrides=["k=1,2", "schemes=NS"])
    assert [r["k"] for r in rows] == [1, 2]
    assert all(r["method"] == "exact" for r in rows)
    sim = d2d.simulate(["p-in"], overrides=["trials=500"])
    assert sim[0]["trials"] == 500
    assert 0.1 < sim[0]["value"] < 0.4
    csv = d2d.render(["coverage"], overrides=["k=1", "schemes=NS"])
    assert csv.splitlines()[0] == "scheme,k,c,metric,value,method,ci_halfwidth,trials,seed"


def test_errors_map_to_python():
    with pytest.raises(d2d.ConfigError):
        d2d.analytic(["coverage"], overrides=["bogus=1"])
    with pytest.raises(ValueError):
        d2d.CacheParams(0, 0.8, 1, 1)
    cache = d2d.CacheParams(100, 0.8, 10, 0)
    model = d2d.PerformanceModel(d2d.load_network(), cache)
    assert model.coverage(d2d.SelectionScheme.NS, 1, 2) == pytest.approx(model.gamma_m())


def test_single_trial_interval_is_unbounded():
    est = d2d.simulate_p_inside(d2d.load_network(), trials=1)
    assert math.isinf(est.ci_halfwidth)

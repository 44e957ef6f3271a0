import math

import numpy as np
import pytest
from scipy import special

import gtpheat as g


def test_special_functions_match_scipy():
    for x in [-2.0, 0.0, 0.3, 4.0, 20.0]:
        assert g.erfc(x) == pytest.approx(special.erfc(x), rel=1e-13, abs=1e-300)
    assert g.inverse_erfc(g.erfc(1.7)) == pytest.approx(1.7, rel=1e-12)
    assert g.bessel_j(0.5, 2.0) == pytest.approx(special.jv(0.5, 2.0), rel=1e-12)
    zeros = g.bessel_zeros(0.0, 5)
    assert zeros == pytest.approx(list(special.jn_zeros(0, 5)), rel=1e-12)


def test_moment_closed_form():
    for n in range(2, 6):
        closed = (n - 1) * math.gamma((n - 1) / 4) / (2 * math.sqrt(math.pi) * (n + 1))
        assert g.erfc_moment(n, 2.0) == pytest.approx(closed, abs=1e-10)


def test_exponents():
    assert g.conj_exponent(3.0) == pytest.approx(1.5)
    assert g.conj_exponent(math.inf) == 1.0
    with pytest.raises(ValueError):
        g.conj_exponent(0.5)


def test_half_space_profile_and_residual():
    u = g.half_space_solution(3.0, 2)
    x, t = [0.4, 0.1], 0.02
    assert u.value(x, t) == pytest.approx(special.erfc(math.sqrt(1.5 / (4 * t)) * 0.4), rel=1e-12)
    r = u.varadhan_residual(x, t)
    assert g.half_space_residual_lower(3.0, 0.4, t) <= r + 1e-14
    assert r <= 0


def test_ball_solution_bounds_and_elliptic():
    u = g.ball_solution(2.0, 1.0, 3)
    vals = [u.value([r, 0, 0], 0.05) for r in np.linspace(0, 0.99, 10)]
    assert all(0 < v < 1 for v in vals)
    assert vals == sorted(vals)
    eps = 0.1
    a = math.sqrt(2) / eps
    r = 0.5
    closed = math.sinh(a * r) / (r * math.sinh(a))
    assert math.exp(g.ball_elliptic_log(2.0, 1.0, 3, eps, r)) == pytest.approx(closed, rel=1e-10)


def test_heat_content_report_on_ball():
    ball = g.touching_ball(g.Domain.ball(1.0, 2), [0.5, 0.0], 0.5, 500)
    assert ball.pi_gamma == pytest.approx(0.5)
    rep = g.heat_content_report(g.ball_solution(2.0, 1.0, 2), ball, [1e-2, 1e-3, 1e-4])
    assert rep["relative_gap"] <= 0.02


def test_q_mean_and_rate_fit():
    assert g.q_mean([0.0, 1.0, 4.0], math.inf) == pytest.approx(2.0)
    assert g.q_mean([1.0, 3.0], 2.0) == pytest.approx(2.0)
    t = [1e-2, 1e-3, 1e-4]
    c, res = g.rate_fit(t, [2 * s for s in t], "t")
    assert c == pytest.approx(2.0) and res < 1e-12
    with pytest.raises(ValueError):
        g.rate_fit(t, t, "cubic")


def test_geometry():
    d = g.Domain.ellipse(2.0, 1.0)
    assert d.boundary_distance([0.0, 0.0]) == pytest.approx(1.0)
    w = g.weingarten_check(d, 0.3, 2048)
    assert w["verdict"] == "nonconstant"
    assert w["min"] == pytest.approx(0.4, rel=1e-2)
    assert g.weingarten_check(g.Domain.ball(1.0, 2), 0.3)["verdict"] == "constant"
    disk = g.Domain.ball(1.0, 2)
    ball = g.touching_ball(disk, [0.5, 0.0], 0.5, 500)
    exact, _ = g.parallel_area(disk, ball, 0.05)
    mc, se = g.parallel_area(disk, ball, 0.05, monte_carlo=True, seed=3)
    assert abs(exact - mc) <= 3 * se


def test_fd_solver_on_disk():
    out = g.solve_fd(g.Domain.ball(1.0, 2), 3.0, 1.0 / 16, 0.05)
    v = out["values"]
    assert v.shape == (len(out["y"]), len(out["x"]))
    inside = v[np.isfinite(v)]
    assert inside.min() >= 0 and inside.max() <= 1
    assert out["max_principle_held"] and out["time_monotone"]
    assert out["sup_error"] < 0.1
    wavy = g.solve_fd(g.Domain.ball(1.0, 2), 3.0, 1.0 / 16, 0.05, lambda x, y, t: 1.0 + 0.5 * x)
    assert np.nanmax(wavy["values"]) <= 1.5 + 1e-12


def test_run_experiment_and_config_errors():
    out = g.run_experiment("experiment = constants\n")
    assert out["pass"]
    assert out["checks"]
    with pytest.raises(g.ConfigError, match="line 2"):
        g.run_experiment("experiment = constants\nbogus = 1\n")

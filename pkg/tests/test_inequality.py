import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import minimize

from arthurs_kelly.errors import InvalidParameters
from arthurs_kelly.gaussian import (
    GaussianProbeParams,
    GaussianSystemParams,
    assemble_initial_state,
    probe_moments,
    system_moments,
)
from arthurs_kelly.inequality import (
    ScanGrid,
    constrained_probe,
    correlated_product,
    gamma_bound,
    gamma_c,
    gamma_c_closed_form,
    gamma_example,
    meter_product,
    minimized_product,
    separable_product,
    stationarity_residuals,
    summarize,
    uncertainty_report,
    violation_scan,
)
from conftest import probes, systems

ks = st.floats(0.25, 4.0)


def numerical_minimum(K1, K2, K3):
    """Grid search in log space, then local refinement."""
    f = lambda v: separable_product(K1, K2, K3, math.exp(v[0]), math.exp(v[1]))
    grid = np.linspace(-6, 6, 41)
    start = min(((u, w) for u in grid for w in grid), key=f)
    res = minimize(f, start, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 4000})
    return res.fun


def test_minimal_uncertainty_bound():
    assert gamma_bound(0.25, 0.25, 0.25) == 1.0


@given(ks)
def test_bound_with_minimal_system(K):
    assert gamma_bound(K, K, 0.25) == pytest.approx(math.sqrt(K) + 0.5, rel=1e-14)


@given(st.floats(0.3, 10), st.floats(0.3, 10), st.floats(-0.95, 0.95), st.floats(-10, 10))
def test_bound_for_constrained_family(ar, br, rho, ci):
    cr = rho * math.sqrt(ar * br)
    m = probe_moments(constrained_probe(ar, br, cr, ci))
    g = gamma_bound(m.dx1sq * m.dp1sq, m.dx2sq * m.dp2sq, 0.25)
    assert g == pytest.approx(gamma_example(ar, br, cr, ci), rel=1e-12)


@pytest.mark.parametrize("bad", [(0, 1, 1), (1, -1, 1), (1, 1, float("nan"))])
def test_bound_domain(bad):
    with pytest.raises(InvalidParameters):
        gamma_bound(*bad)
    with pytest.raises(InvalidParameters):
        minimized_product(*bad)


def test_minimized_product_minimal_case():
    value, x, y = minimized_product(0.25, 0.25, 0.25)
    assert (x, y) == (1.0, 0.5)
    assert value == pytest.approx(1.0, abs=1e-15)


def test_minimized_product_against_numerical_minimizer():
    rng = np.random.default_rng(17)
    for K in rng.uniform(0.25, 4.0, size=(20, 3)):
        assert minimized_product(*K)[0] == pytest.approx(numerical_minimum(*K), abs=1e-6)


@given(ks, ks, ks)
def test_stationarity_at_closed_form_optimum(K1, K2, K3):
    _, x, y = minimized_product(K1, K2, K3)
    dx, dy = stationarity_residuals(K1, K2, K3, x, y)
    assert abs(dx) < 1e-10 and abs(dy) < 1e-10


@given(st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.01, 100))
def test_minimum_is_bound_squared(K1, K2, K3):
    assert minimized_product(K1, K2, K3)[0] == pytest.approx(gamma_bound(K1, K2, K3) ** 2,
                                                             rel=1e-12)


@given(probes(separable=True), systems())
def test_generalized_inequality_for_separable_probes(probe, system):
    pm, sm = probe_moments(probe), system_moments(system)
    bound = gamma_bound(pm.dx1sq * pm.dp1sq, pm.dx2sq * pm.dp2sq, sm.dx3sq * sm.dp3sq)
    assert meter_product(assemble_initial_state(probe, system)) >= bound * (1 - 1e-12)


@given(probes(), systems())
def test_correlated_product_matches_propagated_variances(probe, system):
    pm, sm = probe_moments(probe), system_moments(system)
    state = assemble_initial_state(probe, system)
    value = correlated_product(
        pm.dx1sq * pm.dp1sq, pm.dx2sq * pm.dp2sq, sm.dx3sq * sm.dp3sq,
        pm.dp1sq * pm.dp2sq, pm.dp2sq * sm.dp3sq, sm.dp3sq * pm.dp1sq,
        pm.alpha, pm.beta,
    )
    assert value == pytest.approx(meter_product(state) ** 2, rel=1e-10)


def test_meter_product_examples():
    minimal = assemble_initial_state(GaussianProbeParams(1, 1), GaussianSystemParams())
    assert meter_product(minimal) == pytest.approx(9 / 8, rel=1e-15)
    squeezed = assemble_initial_state(GaussianProbeParams(2, 2), GaussianSystemParams())
    assert meter_product(squeezed) == pytest.approx(1.0, rel=1e-15)


def test_gamma_c_unit_point():
    assert gamma_c(2, 2, 0, 0) == pytest.approx(1.0, abs=1e-12)
    assert gamma_c_closed_form(2, 2, 0, 0) == pytest.approx(1.0, abs=1e-12)


def test_gamma_c_regression_fixture():
    # frozen from the moment-propagation path
    assert gamma_c(3, 1, 1, 1) == pytest.approx(1.1636866703140785, rel=1e-12)
    assert gamma_c_closed_form(3, 1, 1, 1) == pytest.approx(1.1636866703140785, rel=1e-12)


@given(st.floats(0.3, 10), st.floats(-0.95, 0.95), st.floats(-10, 10))
def test_gamma_c_symmetric_in_ci_when_ar_equals_br(ar, rho, ci):
    cr = rho * ar
    assert gamma_c(ar, ar, cr, -ci) == pytest.approx(gamma_c(ar, ar, cr, ci), rel=1e-12)


@given(st.floats(0.3, 10), st.floats(0.3, 10), st.floats(-0.95, 0.95), st.floats(-10, 10))
def test_gamma_c_two_paths(ar, br, rho, ci):
    cr = rho * math.sqrt(ar * br)
    assert gamma_c(ar, br, cr, ci) == pytest.approx(gamma_c_closed_form(ar, br, cr, ci), rel=1e-9)


def test_gamma_c_domain():
    with pytest.raises(InvalidParameters):
        gamma_c(1, 1, 1, 0)
    with pytest.raises(InvalidParameters):
        gamma_c_closed_form(-1, 1, 0, 0)


def test_uncertainty_report():
    r = uncertainty_report(GaussianProbeParams(2, 2), GaussianSystemParams())
    assert (r.K1, r.K2, r.K3) == pytest.approx((0.25, 0.25, 0.25))
    assert r.Gamma == pytest.approx(1.0) and r.Gamma_C == pytest.approx(1.0)
    assert r.violates_generalized and not r.violates_original
    r = uncertainty_report(constrained_probe(3, 1, 1, 1), GaussianSystemParams())
    assert r.Gamma_C == pytest.approx(gamma_c(3, 1, 1, 1))
    assert r.Gamma == pytest.approx(gamma_example(3, 1, 1, 1))


FIG_A = ScanGrid(B_R=1, C_R=1, ar_min=1.05, ar_max=10)
FIG_B = ScanGrid(B_R=1, C_R=2, ar_min=4.05, ar_max=20)


@pytest.mark.parametrize("grid", [FIG_A, FIG_B], ids=["fig1a", "fig1b"])
def test_violation_regions(grid):
    s = summarize(violation_scan(grid))
    assert s.violations >= 1
    assert s.original_violations == 0
    assert s.min_gamma_c >= 1.0


def test_scan_flags_invalid_points_and_orders_rows():
    grid = ScanGrid(B_R=1, C_R=1, ar_min=0.5, ar_max=2.0, ar_steps=4, ci_min=-1, ci_max=1,
                    ci_steps=3)
    rows = violation_scan(grid)
    assert len(rows) == 12
    assert [r.a_r for r in rows[:3]] == [0.5] * 3
    assert [r.c_i for r in rows[:3]] == [-1.0, 0.0, 1.0]
    invalid = [r for r in rows if not r.valid]
    assert {r.a_r for r in invalid} == {0.5, 1.0}
    assert all(math.isnan(r.gamma_c) and not r.violates_generalized for r in invalid)


def test_scan_is_independent_of_thread_count():
    grid = ScanGrid(ar_steps=20, ci_steps=15)
    assert violation_scan(grid, threads=1) == violation_scan(grid, threads=8)


def test_scan_grid_validation():
    with pytest.raises(InvalidParameters):
        ScanGrid(ar_steps=1)
    with pytest.raises(InvalidParameters):
        ScanGrid(ar_min=3, ar_max=2)
    with pytest.raises(InvalidParameters):
        ScanGrid(ci_max=float("inf"))

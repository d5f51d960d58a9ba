import math

import numpy as np
import pytest

from rkn_resonance.stability import (
    ChartSpec,
    classify,
    constant_step_limit,
    growth_factor,
    is_r_stable,
    schur_cohn_stable,
    stability_chart,
)
from rkn_resonance.tableau import RKN_CATALOG, builtin_rkn
from rkn_resonance.transition import StepPattern, composed_transition, step_sequence, transition_matrix

NYSTROM4_LIMIT = 2 * math.sqrt(2 + 2 ** (1 / 3) - 2 ** (2 / 3))


def test_schur_cohn_examples():
    assert schur_cohn_stable(np.eye(2))
    assert not schur_cohn_stable(np.diag([2.0, 0.1]))
    assert schur_cohn_stable(transition_matrix(builtin_rkn("central_difference"), 1.0))


def test_schur_cohn_agrees_with_eigenvalues():
    rng = np.random.default_rng(11)
    checked = 0
    for _ in range(5000):
        R = rng.normal(scale=0.8, size=(2, 2))
        rho = np.max(np.abs(np.linalg.eigvals(R)))
        if abs(rho - 1) < 1e-9:
            continue
        assert schur_cohn_stable(R, 0.0) == (rho < 1)
        checked += 1
    assert checked > 4000


def test_schur_cohn_rotations_stable():
    for th in np.linspace(0, 2 * np.pi, 37):
        R = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
        assert schur_cohn_stable(R)
    # Jordan block at eigenvalue -1 passes the inequalities but grows linearly;
    # the boundary is a measure-zero case
    assert schur_cohn_stable(np.array([[-1.0, 1.0], [0.0, -1.0]]))


def test_constant_step_limits():
    assert abs(constant_step_limit(builtin_rkn("central_difference")) - 2.0) <= 1e-9
    assert abs(constant_step_limit(builtin_rkn("nystrom4")) - NYSTROM4_LIMIT) <= 1e-6
    for name in ("trapezoid", "sdirk3rkn", "newmark_half"):
        assert constant_step_limit(builtin_rkn(name), h_cap=1e3) is None
        assert is_r_stable(builtin_rkn(name))


def test_nystrom4_limit_is_exact_root():
    # tr = h^4/12 - h^2 + 2, det = 1 - h^6/288; the boundary is tr + 1 + det = 0
    h = NYSTROM4_LIMIT
    assert abs(h**4 / 12 - h * h + 2 + 1 + 1 - h**6 / 288) < 1e-12
    R = transition_matrix(builtin_rkn("nystrom4"), h)
    assert abs(np.trace(R) - (h**4 / 12 - h * h + 2)) < 1e-12
    assert abs(np.linalg.det(R) - (1 - h**6 / 288)) < 1e-12


def test_classify():
    assert classify(None) == "R-stable"
    assert classify(0.0) == "unstable"
    assert classify(2.0) == "conditionally stable"


def test_limit_bad_cap():
    with pytest.raises(ValueError):
        constant_step_limit(builtin_rkn("trapezoid"), h_cap=0.0)


def _spectral_growth(tab, pat):
    P = composed_transition(tab, step_sequence(pat))
    return np.max(np.abs(np.linalg.eigvals(P))) ** (1 / pat.p)


def test_growth_factor_examples():
    cd = builtin_rkn("central_difference")
    assert abs(growth_factor(cd, StepPattern(1.0, 0.0, 3)) - 1.0) <= 1e-12
    g = growth_factor(cd, StepPattern(1.0, 0.1, 3))
    assert g > 1.0
    assert abs(g - _spectral_growth(cd, StepPattern(1.0, 0.1, 3))) <= 1e-12
    rng = np.random.default_rng(5)
    tr = builtin_rkn("trapezoid")
    for _ in range(20):
        h = rng.uniform(0.1, 50)
        pat = StepPattern(h, rng.uniform(0, h * 0.99), int(rng.integers(1, 8)))
        assert abs(growth_factor(tr, pat) - 1.0) <= 1e-10


@pytest.mark.parametrize("name", list(RKN_CATALOG))
def test_growth_factor_vs_numpy_eig(name):
    tab = builtin_rkn(name)
    rng = np.random.default_rng(9)
    for _ in range(30):
        h = rng.uniform(0.1, 2.5)
        pat = StepPattern(h, rng.uniform(0, 0.9 * h), int(rng.integers(1, 7)))
        assert growth_factor(tab, pat) == pytest.approx(_spectral_growth(tab, pat), rel=1e-9)


def test_chart_wedge_cells():
    cd = builtin_rkn("central_difference")
    spec = ChartSpec(3, 0.95, 1.05, 0.0, 0.1, nh=3, neps=2)
    res = stability_chart(cd, spec)
    cells = {(round(h, 12), round(e, 12)): (s, g) for h, e, s, g in res.cells()}
    assert not cells[(1.0, 0.1)][0]
    assert cells[(1.05, 0.1)][0]
    assert cells[(1.05, 0.1)][1] <= 1 + 1e-12


def test_chart_shape_and_invalid_cells():
    spec = ChartSpec(2, 0.0, 1.0, 0.0, 1.0, nh=11, neps=6)
    res = stability_chart(builtin_rkn("central_difference"), spec)
    assert res.stable.shape == (6, 11)
    hg, eg = np.meshgrid(spec.h_grid, spec.eps_grid)
    np.testing.assert_array_equal(res.valid, hg - eg > 0)
    assert np.all(np.isnan(res.growth[~res.valid]))
    assert np.all(res.growth[res.valid] >= 0)
    cells = list(res.cells())
    assert len(cells) == res.valid.sum()
    # row-major, h fastest
    assert cells[0][1] == cells[1][1] and cells[0][0] < cells[1][0]


@pytest.mark.parametrize("name", list(RKN_CATALOG))
def test_chart_zero_amplitude_row_matches_limit(name):
    tab = builtin_rkn(name)
    spec = ChartSpec(3, 0.01, 5.0, 0.0, 0.1, nh=300, neps=2)
    res = stability_chart(tab, spec)
    lim = constant_step_limit(tab, h_cap=1e3)
    expected = spec.h_grid <= (lim if lim is not None else np.inf)
    np.testing.assert_array_equal(res.stable[0], expected)


@pytest.mark.parametrize("name", ["trapezoid", "sdirk3rkn"])
@pytest.mark.parametrize("p", [2, 3, 4, 5, 6])
def test_a_stable_charts_have_no_wedges(name, p):
    spec = ChartSpec(p, 0.0, 20.0, 0.0, 10.0, nh=120, neps=60)
    res = stability_chart(builtin_rkn(name), spec)
    hg, eg = np.meshgrid(spec.h_grid, spec.eps_grid)
    region = res.valid & (hg > 0) & (eg <= hg / 2)
    assert region.sum() > 1000
    assert not np.any(res.unstable & region)


def test_nystrom4_wedges_detached():
    tab = builtin_rkn("nystrom4")
    spec = ChartSpec(6, 0.0, 2.59, 0.0, 0.01, nh=200, neps=50)
    res = stability_chart(tab, spec)
    lim = constant_step_limit(tab)
    hmask = (spec.h_grid > 0) & (spec.h_grid < lim)
    assert not np.any(res.unstable[:, hmask])


def test_central_difference_wedges_touch_axis():
    spec = ChartSpec(3, 0.5, 1.5, 0.0, 0.5, nh=101, neps=51)
    res = stability_chart(builtin_rkn("central_difference"), spec)
    # near the axis only the wedge at h = 1 is unstable
    row = res.unstable[1]
    hs = spec.h_grid[row]
    assert hs.size and np.all(np.abs(hs - 1.0) <= spec.eps_grid[1] / 8 + 0.011)


def test_chart_threads_bit_identical():
    tab = builtin_rkn("nystrom4")
    spec = ChartSpec(6, 0.0, 3.0, 0.0, 0.5, nh=60, neps=40)
    a = stability_chart(tab, spec, threads=1)
    b = stability_chart(tab, spec, threads=4)
    np.testing.assert_array_equal(a.stable, b.stable)
    np.testing.assert_array_equal(a.growth, b.growth)


@pytest.mark.parametrize(
    "kw",
    [
        dict(p=0),
        dict(p=2, h_min=-1.0),
        dict(p=2, eps_min=-0.1),
        dict(p=2, h_min=1.0, h_max=1.0),
        dict(p=2, nh=0),
    ],
)
def test_chart_spec_validation(kw):
    with pytest.raises(ValueError):
        ChartSpec(**kw)

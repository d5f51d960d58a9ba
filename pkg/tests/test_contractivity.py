import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm, solve_continuous_lyapunov, sqrtm

from rkn_resonance.contractivity import (
    MODEL_PROBLEM,
    LinearSystem,
    a_stable_check,
    contractivity_trace,
    is_hurwitz,
    lyapunov_solve,
    rk_step_linear,
    stability_function,
    w_norm,
)
from rkn_resonance.errors import PoleError
from rkn_resonance.tableau import RK_CATALOG, RkTableau, builtin_rk, builtin_rkn
from rkn_resonance.transition import transition_matrix


def random_hurwitz(rng, n):
    M = rng.normal(size=(n, n))
    shift = np.max(np.linalg.eigvals(M).real) + rng.uniform(0.1, 1.0)
    return M - shift * np.eye(n)


def test_is_hurwitz_examples():
    assert is_hurwitz(-np.eye(2))
    assert not is_hurwitz(MODEL_PROBLEM)
    assert is_hurwitz([[0, 1], [-1, -1]])
    with pytest.raises(ValueError):
        LinearSystem([[1, 2, 3]])


def test_lyapunov_examples():
    np.testing.assert_allclose(lyapunov_solve(-np.eye(2)), np.eye(2) / 2, atol=1e-15)
    np.testing.assert_allclose(lyapunov_solve([[0, 1], [-1, -1]]), [[1.5, 0.5], [0.5, 1.0]], atol=1e-14)
    rng = np.random.default_rng(2)
    B = rng.normal(size=(4, 4))
    A = -(B @ B.T + np.eye(4))
    np.testing.assert_allclose(lyapunov_solve(A), -np.linalg.inv(A) / 2, atol=1e-13)
    with pytest.raises(ValueError):
        lyapunov_solve(MODEL_PROBLEM)


def test_lyapunov_random_suite():
    rng = np.random.default_rng(20)
    for _ in range(100):
        n = int(rng.integers(1, 7))
        A = random_hurwitz(rng, n)
        W = lyapunov_solve(A)
        assert np.max(np.abs(A.T @ W + W @ A + np.eye(n))) <= 1e-10
        np.testing.assert_array_equal(W, W.T)
        assert np.min(np.linalg.eigvalsh(W)) > 0
        ref = solve_continuous_lyapunov(A.T, -np.eye(n))
        np.testing.assert_allclose(W, ref, rtol=1e-8, atol=1e-10 * np.abs(ref).max())


def test_exact_flow_is_monotone_in_w_norm():
    rng = np.random.default_rng(21)
    for _ in range(20):
        n = int(rng.integers(2, 6))
        A = random_hurwitz(rng, n)
        W = lyapunov_solve(A)
        step = expm(0.01 * A)
        y = rng.normal(size=n)
        prev = w_norm(y, W)
        for _ in range(300):
            y = step @ y
            cur = w_norm(y, W)
            assert cur <= prev * (1 + 1e-12)
            prev = cur


@pytest.mark.parametrize("name", list(RK_CATALOG))
def test_equivariance(name):
    rk = builtin_rk(name)
    rng = np.random.default_rng(30)
    for _ in range(100):
        n = int(rng.integers(1, 5))
        A = random_hurwitz(rng, n)
        V = np.eye(n) + 0.5 * rng.normal(size=(n, n))
        if np.linalg.cond(V) > 1e3:
            continue
        h = rng.uniform(0.01, 5.0)
        y = rng.normal(size=n)
        lhs = V @ rk_step_linear(rk, A, h, y)
        rhs = rk_step_linear(rk, V @ A @ np.linalg.inv(V), h, V @ y)
        assert np.linalg.norm(lhs - rhs) <= 1e-9 * np.linalg.norm(lhs)


def test_rk_step_examples():
    rng = np.random.default_rng(31)
    A = rng.normal(size=(3, 3))
    y = rng.normal(size=3)
    for name in RK_CATALOG:
        np.testing.assert_array_equal(rk_step_linear(builtin_rk(name), A, 0.0, y), y)
    np.testing.assert_allclose(rk_step_linear(builtin_rk("explicit_euler"), A, 0.3, y), y + 0.3 * A @ y)
    tr = builtin_rk("trapezoid")
    for h in (0.1, 1.0, 10.0, 500.0):
        out = rk_step_linear(tr, MODEL_PROBLEM, h, [1.0, 0.5])
        assert abs(np.linalg.norm(out) - np.linalg.norm([1.0, 0.5])) <= 1e-12


@pytest.mark.parametrize("rkn, rk", [("trapezoid", "trapezoid"), ("sdirk3rkn", "sdirk3")])
def test_rk_step_matches_rkn_transition(rkn, rk):
    y = np.array([0.3, -1.2])
    for h in (0.05, 0.7, 2.0, 9.0):
        np.testing.assert_allclose(
            rk_step_linear(builtin_rk(rk), MODEL_PROBLEM, h, y), transition_matrix(builtin_rkn(rkn), h) @ y, atol=1e-12
        )


def test_stability_function_examples():
    for z in (-0.5, 0.3 + 2j, -3j):
        assert stability_function(builtin_rk("explicit_euler"), z) == pytest.approx(1 + z, abs=1e-15)
    for y in np.linspace(-50, 50, 21):
        r = stability_function(builtin_rk("trapezoid"), 1j * y)
        assert r == pytest.approx((1 + 1j * y / 2) / (1 - 1j * y / 2), abs=1e-13)
        assert abs(abs(r) - 1) <= 1e-13
    assert abs(stability_function(builtin_rk("sdirk3"), -1.0)) < 1
    with pytest.raises(PoleError):
        stability_function(builtin_rk("implicit_midpoint"), 2.0)


def test_a_stable_check():
    assert not a_stable_check(builtin_rk("explicit_euler"))
    for name in ("implicit_midpoint", "trapezoid", "sdirk3"):
        assert a_stable_check(builtin_rk(name))
    # pole at z = -2 inside the left half-plane
    assert not a_stable_check(RkTableau("bad", c=[-0.5], a=[[-0.5]], b=[1.0]))


def test_w_norm():
    assert w_norm([3.0, 4.0], np.eye(2)) == 5.0
    assert w_norm([2.0, 0.0], np.eye(2) / 2) == pytest.approx(np.sqrt(2))
    rng = np.random.default_rng(40)
    for _ in range(20):
        B = rng.normal(size=(3, 3))
        W = B @ B.T + 0.1 * np.eye(3)
        y = rng.normal(size=3)
        assert w_norm(y, W) == pytest.approx(np.linalg.norm(np.real(sqrtm(W)) @ y), rel=1e-10)
    with pytest.raises(ValueError):
        w_norm([1.0, 2.0, 3.0], np.eye(2))


@pytest.mark.parametrize("name", ["trapezoid", "sdirk3rkn"])
def test_rkn_contractive_on_model_problem(name):
    rng = np.random.default_rng(50)
    rep = contractivity_trace(builtin_rkn(name), np.eye(2), [1.0, 0.0], 100 * (1 - rng.random(1000)))
    assert rep.contractive
    assert np.all(rep.ratios <= 1 + 1e-12)


def test_trapezoid_norm_is_constant():
    rng = np.random.default_rng(51)
    rep = contractivity_trace(builtin_rkn("trapezoid"), np.eye(2), [1.0, 0.0], 1000 * (1 - rng.random(500)))
    assert np.max(np.abs(rep.norms - 1)) <= 1e-12


def test_central_difference_witness():
    rep = contractivity_trace(builtin_rkn("central_difference"), np.eye(2), [1.0, 0.0], [1.9] * 20)
    assert not rep.contractive
    assert rep.ratios.max() > 1


def test_rk_pair_contractive_in_lyapunov_norm():
    rng = np.random.default_rng(52)
    A = random_hurwitz(rng, 4)
    W = lyapunov_solve(A)
    steps = 50 * (1 - rng.random(200))
    for name in ("trapezoid", "sdirk3", "implicit_midpoint"):
        rep = contractivity_trace((builtin_rk(name), A), W, rng.normal(size=4), steps)
        assert rep.contractive


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=30))
def test_sdirk3rkn_never_grows(steps):
    rep = contractivity_trace(builtin_rkn("sdirk3rkn"), np.eye(2), [0.2, 1.0], steps)
    assert np.all(rep.ratios <= 1 + 1e-12)

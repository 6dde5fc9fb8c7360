import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gramsense import (
    DimensionMismatchError,
    InvalidParameterError,
    LassoProblem,
    default_mu,
    kkt_residual,
    reconstruct,
    soft_threshold,
    solve,
    solve_batch,
)
from gramsense.lasso import lasso_objective, lipschitz_bound, zero_threshold


def unit(v):
    return v / np.linalg.norm(v)


def random_problem(rng, m=3, n=6, c=0.1, weights=None):
    h = rng.standard_normal((m, n)) + 1j * rng.standard_normal((m, n))
    h /= np.linalg.norm(h, axis=0)
    y = unit(rng.standard_normal(m) + 1j * rng.standard_normal(m))
    w = np.ones(n) if weights is None else weights
    return LassoProblem(h, y, default_mu(h, y, c), w)


def ista(problem, iters=200_000):
    # plain proximal gradient, no acceleration or restarts
    h, y = problem.h_bar, problem.y_bar
    step = 1.0 / np.linalg.norm(h, 2) ** 2
    x = np.zeros(h.shape[1], dtype=complex)
    thr = step * problem.mu_bar * problem.weights
    for _ in range(iters):
        z = x - step * (h.conj().T @ (h @ x - y))
        x_new = soft_threshold(z, thr)
        if np.abs(x_new - x).max() < 1e-15:
            return x_new
        x = x_new
    return x


def test_identity_closed_form_real():
    y = unit(np.array([0.9, -0.3, 0.05, -0.2]))
    mu = 0.1
    sol = solve(LassoProblem(np.eye(4), y, mu, np.ones(4)), tol=1e-14)
    expected = np.sign(y) * np.maximum(np.abs(y) - mu, 0.0)
    np.testing.assert_allclose(sol.x_bar_hat, expected, atol=1e-12)
    assert sol.converged and sol.kkt_residual < 1e-14


def test_identity_closed_form_complex(rng):
    y = unit(rng.standard_normal(6) + 1j * rng.standard_normal(6))
    mu = 0.2
    sol = solve(LassoProblem(np.eye(6), y, mu, np.ones(6)), tol=1e-14)
    np.testing.assert_allclose(sol.x_bar_hat, soft_threshold(y, mu), atol=1e-12)


def test_zero_solution_at_threshold(rng):
    p = random_problem(rng, 4, 8)
    top = np.abs(p.h_bar.conj().T @ p.y_bar).max()
    at = solve(LassoProblem(p.h_bar, p.y_bar, top, p.weights))
    assert np.all(at.x_bar_hat == 0)
    assert kkt_residual(LassoProblem(p.h_bar, p.y_bar, top, p.weights), np.zeros(8)) == 0.0
    below = solve(LassoProblem(p.h_bar, p.y_bar, 0.99 * top, p.weights))
    assert np.count_nonzero(below.x_bar_hat) >= 1


def test_mu_fraction_one_gives_zero(rng):
    p = random_problem(rng, 5, 7, c=1.0)
    assert np.all(solve(p).x_bar_hat == 0)


def test_weighted_zero_threshold(rng):
    w = rng.uniform(0.5, 3.0, 6)
    p = random_problem(rng, weights=w)
    thr = zero_threshold(p)
    corr = np.abs(p.h_bar.conj().T @ p.y_bar)
    assert thr == pytest.approx((corr / w).max())
    assert np.all(solve(LassoProblem(p.h_bar, p.y_bar, thr, w)).x_bar_hat == 0)
    assert np.any(solve(LassoProblem(p.h_bar, p.y_bar, 0.98 * thr, w)).x_bar_hat != 0)


@pytest.mark.parametrize("seed", range(5))
def test_matches_independent_proximal_oracle(seed):
    rng = np.random.default_rng(seed)
    p = random_problem(rng, weights=rng.uniform(0.5, 2.0, 6))
    fast = solve(p, tol=1e-12)
    assert fast.converged and fast.kkt_residual < 1e-10
    np.testing.assert_allclose(fast.x_bar_hat, ista(p), atol=1e-6)


def test_solution_invariants(rng):
    h = rng.standard_normal((5, 9)) + 1j * rng.standard_normal((5, 9))
    x = np.zeros(9, dtype=complex)
    x[3] = 2.0 - 1.0j
    y = h @ x
    sol = reconstruct(h, y, 0.05)
    p = LassoProblem.from_measurements(h, y, 0.05)
    assert sol.objective == pytest.approx(lasso_objective(p, sol.x_bar_hat), abs=1e-10)
    np.testing.assert_allclose(sol.x_hat, p.y_norm * p.weights * sol.x_bar_hat)
    assert sol.kkt_residual < 1e-8
    assert int(np.argmax(np.abs(sol.x_hat))) == 3


def test_kkt_detects_perturbation(rng):
    p = random_problem(rng)
    sol = solve(p, tol=1e-12)
    assert kkt_residual(p, sol.x_bar_hat) < 1e-10
    x = sol.x_bar_hat.copy()
    x[int(np.argmax(np.abs(x)))] += 1e-3
    assert kkt_residual(p, x) > 1e-6


def test_not_converged_is_flagged(rng):
    p = random_problem(rng, 8, 20, c=0.01)
    sol = solve(p, tol=1e-14, max_iter=2)
    assert not sol.converged and sol.iterations == 2


@pytest.mark.parametrize("tol,max_iter", [(0.0, 10), (-1.0, 10), (1e-8, 0), (1e-8, 2.5)])
def test_invalid_options(rng, tol, max_iter):
    with pytest.raises(InvalidParameterError):
        solve(random_problem(rng), tol=tol, max_iter=max_iter)


def test_problem_validation():
    h = np.eye(3)
    with pytest.raises(InvalidParameterError):
        LassoProblem(2 * h, unit(np.ones(3)), 0.1, np.ones(3))
    with pytest.raises(InvalidParameterError):
        LassoProblem(h, np.ones(3), 0.1, np.ones(3))
    with pytest.raises(InvalidParameterError):
        LassoProblem(h, unit(np.ones(3)), 0.0, np.ones(3))
    with pytest.raises(InvalidParameterError):
        LassoProblem(h, unit(np.ones(3)), 0.1, np.array([1.0, 0.0, 1.0]))
    with pytest.raises(DimensionMismatchError):
        LassoProblem(h, unit(np.ones(2)), 0.1, np.ones(3))
    with pytest.raises(InvalidParameterError):
        LassoProblem.from_measurements(h, np.zeros(3))


def test_batch_equals_single(rng):
    p = random_problem(rng, 4, 10)
    ys = np.stack([p.y_bar, unit(p.y_bar + 0.3), unit(1j * p.y_bar - 0.2)], axis=1)
    mus = [default_mu(p.h_bar, ys[:, j]) for j in range(3)]
    batch = solve_batch(p.h_bar, ys, mus, p.weights)
    for j in range(3):
        single = solve(LassoProblem(p.h_bar, ys[:, j], mus[j], p.weights))
        np.testing.assert_allclose(batch[j].x_bar_hat, single.x_bar_hat, atol=1e-9)


def test_lipschitz_upper_bound(rng):
    h = rng.standard_normal((7, 12)) + 1j * rng.standard_normal((7, 12))
    assert lipschitz_bound(h) >= np.linalg.norm(h, 2) ** 2


@settings(max_examples=100)
@given(st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
       st.floats(0, 10))
def test_soft_threshold_properties(z, t):
    out = complex(soft_threshold(np.array([z]), t)[0])
    assert abs(out) == pytest.approx(max(abs(z) - t, 0.0), abs=1e-9)
    if abs(out) > 1e-9:
        assert np.angle(out) == pytest.approx(np.angle(z), abs=1e-9)


def test_default_mu(rng):
    p = random_problem(rng)
    top = np.abs(p.h_bar.conj().T @ p.y_bar).max()
    assert default_mu(p.h_bar, p.y_bar, 0.08) == pytest.approx(0.08 * top)
    with pytest.raises(InvalidParameterError):
        default_mu(p.h_bar, p.y_bar, 0.0)

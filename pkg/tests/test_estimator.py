"""Tests for mixture synthesis, noise, and concentration recovery.

Oracles: a brute-force grid search for the least-squares minimizer, mpmath's
arbitrary-precision SVD, and a hand-rolled Jacobi eigenvalue iteration on
A^T A for the condition number.
"""

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sklearn.base import clone

from ssmc.errors import NumericError
from ssmc.estimator import (ConcentrationSolver, add_noise, condition_number,
                            error_norm, mixture_response, project_simplex,
                            random_concentrations, solve_concentrations)


def jacobi_singular_values(A, sweeps=60):
    """Singular values via cyclic Jacobi diagonalization of A^T A (oracle)."""
    S = A.T @ A
    n = S.shape[0]
    for _ in range(sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off = max(off, abs(S[p, q]))
                if abs(S[p, q]) < 1e-300:
                    continue
                tau = (S[q, q] - S[p, p]) / (2.0 * S[p, q])
                t = np.sign(tau) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                J = np.eye(n)
                J[p, p] = J[q, q] = c
                J[p, q] = s
                J[q, p] = -s
                S = J.T @ S @ J
        if off < 1e-30:
            break
    return np.sqrt(np.sort(np.abs(np.diag(S)))[::-1])


@pytest.fixture
def tall_system():
    rng = np.random.default_rng(42)
    A = rng.normal(size=(30, 4))
    y = np.array([0.1, 0.4, 0.3, 0.2])
    return A, y


# -- mixture synthesis --------------------------------------------------------

def test_mixture_response_is_matrix_vector(tall_system):
    A, y = tall_system
    np.testing.assert_allclose(mixture_response(A, y), A @ y)
    with pytest.raises(ValueError):
        mixture_response(A, y[:-1])
    with pytest.raises(ValueError):
        mixture_response(A[0], y)


def test_random_concentrations_normalized():
    y = random_concentrations(7, seed=3)
    assert y.shape == (7,)
    assert np.all(y >= 0)
    assert y.sum() == pytest.approx(1.0, rel=1e-14)
    np.testing.assert_array_equal(y, random_concentrations(7, seed=3))
    assert not np.array_equal(y, random_concentrations(7, seed=4))
    with pytest.raises(ValueError):
        random_concentrations(0, seed=0)


def test_add_noise_basics():
    R = np.array([1.0, -2.0, 0.5])
    assert np.array_equal(add_noise(R, 0.0, seed=0), R)
    a = add_noise(R, 0.1, seed=5)
    np.testing.assert_array_equal(a, add_noise(R, 0.1, seed=5))
    assert not np.array_equal(a, add_noise(R, 0.1, seed=6))
    with pytest.raises(ValueError):
        add_noise(R, -0.1, seed=0)


def test_add_noise_std_matches_request():
    rng_R = np.array([3.0, 1.0, -2.0, 0.5] * 25)
    sigma_rel = 0.05
    draws = np.concatenate([add_noise(rng_R, sigma_rel, seed=s) - rng_R
                            for s in range(1000)])
    want = sigma_rel * np.abs(rng_R).max()
    assert draws.std() == pytest.approx(want, rel=0.02)
    assert draws.mean() == pytest.approx(0.0, abs=3 * want / np.sqrt(draws.size))


# -- recovery -----------------------------------------------------------------

def test_exact_recovery_consistent_system(tall_system):
    A, y = tall_system
    got = solve_concentrations(A, A @ y)
    assert error_norm(y, got) < 1e-12


def test_recovery_matches_grid_search_oracle():
    """Brute-force minimization of ||A y - R|| agrees with the SVD solution."""
    rng = np.random.default_rng(7)
    A = rng.normal(size=(40, 2))
    R = rng.normal(size=40)          # inconsistent right-hand side
    y_svd = solve_concentrations(A, R)
    grid = np.linspace(-2.0, 2.0, 161)
    best, best_val = None, np.inf
    for a in grid:
        res = R[:, None] - np.outer(A[:, 0], np.full_like(grid, a)) \
            - np.outer(A[:, 1], grid)
        vals = np.linalg.norm(res, axis=0)
        k = int(vals.argmin())
        if vals[k] < best_val:
            best_val, best = vals[k], np.array([a, grid[k]])
    assert np.abs(best - y_svd).max() < 0.05       # grid resolution limit
    assert np.linalg.norm(A @ y_svd - R) <= best_val + 1e-12


def test_solve_validation(tall_system):
    A, y = tall_system
    with pytest.raises(ValueError):
        solve_concentrations(A.T, np.zeros(4))     # wide matrix
    with pytest.raises(ValueError):
        solve_concentrations(A, np.zeros(29))
    with pytest.raises(NumericError):
        solve_concentrations(np.zeros((10, 2)), np.zeros(10))


def test_error_norm():
    assert error_norm([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert error_norm([0.0, 0.0], [3.0, 4.0]) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        error_norm([1.0], [1.0, 2.0])


@settings(max_examples=30)
@given(st.integers(min_value=1, max_value=5), st.integers(min_value=0, max_value=10))
def test_recovery_property_random_systems(n_s, seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(n_s * 8, n_s))
    if condition_number(A) > 1e6:    # skip pathologically conditioned draws
        return
    y = random_concentrations(n_s, seed)
    got = solve_concentrations(A, A @ y)
    assert error_norm(y, got) < 1e-9


# -- condition number ---------------------------------------------------------

def test_condition_number_identity():
    assert condition_number(np.eye(5)) == 1.0


def test_condition_number_known_diagonal():
    A = np.diag([10.0, 2.0, 0.5])
    assert condition_number(A) == pytest.approx(20.0, rel=1e-14)


def test_condition_number_zero_and_singular():
    with pytest.raises(ValueError):
        condition_number(np.zeros((3, 3)))
    A = np.ones((4, 2))                  # identical columns
    assert condition_number(A) > 1e15 or condition_number(A) == np.inf


def test_condition_number_against_mpmath():
    rng = np.random.default_rng(11)
    A = rng.normal(size=(6, 4)) @ np.diag([1.0, 0.1, 0.01, 1e-4])
    with mpmath.workdps(50):
        s = mpmath.mp.svd_r(mpmath.matrix(A.tolist()), compute_uv=False)
        want = float(max(s) / min(s))
    assert condition_number(A) == pytest.approx(want, rel=1e-8)


def test_condition_number_against_jacobi_iteration():
    rng = np.random.default_rng(13)
    A = rng.normal(size=(12, 5))
    s = jacobi_singular_values(A)
    assert condition_number(A) == pytest.approx(s[0] / s[-1], rel=1e-10)


# -- simplex projection -------------------------------------------------------

@settings(max_examples=50)
@given(st.lists(st.floats(min_value=-5, max_value=5), min_size=1, max_size=8))
def test_project_simplex_properties(vals):
    y = project_simplex(np.array(vals))
    assert np.all(y >= 0)
    assert y.sum() == pytest.approx(1.0, abs=1e-9)
    # idempotent
    np.testing.assert_allclose(project_simplex(y), y, atol=1e-12)


def test_project_simplex_fixed_point():
    y = np.array([0.2, 0.5, 0.3])
    np.testing.assert_allclose(project_simplex(y), y, atol=1e-14)


# -- sklearn-style solver -----------------------------------------------------

def test_solver_matches_function(tall_system):
    A, y = tall_system
    R = A @ y
    solver = ConcentrationSolver().fit(A)
    np.testing.assert_allclose(solver.predict(R), solve_concentrations(A, R),
                               atol=1e-12)
    assert solver.condition_number_ == pytest.approx(condition_number(A))
    assert solver.rank_ == 4
    assert solver.n_features_in_ == 4


def test_solver_batch_predict(tall_system):
    A, y = tall_system
    Y = np.vstack([y, y[::-1]])
    solver = ConcentrationSolver().fit(A)
    got = solver.predict(Y @ A.T)
    assert got.shape == (2, 4)
    np.testing.assert_allclose(got, Y, atol=1e-10)


def test_solver_projection_option(tall_system):
    A, y = tall_system
    R = add_noise(A @ y, 0.3, seed=1)
    est = ConcentrationSolver(project=True).fit(A).predict(R)
    assert np.all(est >= 0)
    assert est.sum() == pytest.approx(1.0, abs=1e-9)


def test_solver_sklearn_protocol(tall_system):
    A, _ = tall_system
    solver = ConcentrationSolver(rcond=1e-10, project=True)
    assert solver.get_params() == {"rcond": 1e-10, "project": True}
    dup = clone(solver)
    assert dup.get_params() == solver.get_params()
    solver.set_params(project=False)
    assert solver.get_params()["project"] is False


def test_solver_errors(tall_system):
    A, y = tall_system
    with pytest.raises(NumericError):
        ConcentrationSolver().predict(A @ y)       # not fitted
    with pytest.raises(ValueError):
        ConcentrationSolver().fit(A.T)             # wide
    with pytest.raises(ValueError):
        ConcentrationSolver().fit(np.full((5, 2), np.nan))
    with pytest.raises(NumericError):
        ConcentrationSolver().fit(np.zeros((5, 2)))
    with pytest.raises(ValueError):
        ConcentrationSolver().fit(A).predict(np.zeros(29))

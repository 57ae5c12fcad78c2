"""Mixture synthesis, noise injection, and concentration recovery.

The recovery solves the overdetermined system A y = R_mix by SVD least
squares; the condition number of A is the diagnostic that tracks the
recovery error.  Estimates are *not* constrained to the simplex unless
explicitly requested.
"""

from dataclasses import dataclass

import numpy as np
from sklearn.base import BaseEstimator

from .errors import NumericError


@dataclass(frozen=True, eq=False)
class EstimationReport:
    """Outcome of one characterization: estimate, error, and diagnostics."""

    method: str                 # "ssmc" | "naive"
    y_true: np.ndarray
    y_est: np.ndarray
    epsilon: float              # ||y_true - y_est||_2
    cond_A: float
    noise_sigma_rel: float
    seed: int | None = None


def mixture_response(A, y):
    """Weighted sum of species responses, R_mix = A @ y."""
    A = np.asarray(A, dtype=float)
    y = np.asarray(y, dtype=float)
    if A.ndim != 2 or y.shape != (A.shape[1],):
        raise ValueError(f"shape mismatch: A {A.shape}, y {y.shape}")
    return A @ y


def add_noise(R_mix, sigma_rel, seed):
    """Add i.i.d. Gaussian noise with std sigma_rel * ||R_mix||_inf.

    Deterministic for a given seed (PCG64 generator, ziggurat normals);
    reproducibility across implementations is statistical, not bitwise.
    """
    R_mix = np.asarray(R_mix, dtype=float)
    if sigma_rel < 0:
        raise ValueError("sigma_rel must be non-negative")
    if sigma_rel == 0:
        return R_mix.copy()
    rng = np.random.default_rng(seed)
    scale = sigma_rel * np.linalg.norm(R_mix, ord=np.inf)
    return R_mix + rng.normal(0.0, scale, size=R_mix.shape)


def solve_concentrations(A, R_mix, rcond=None):
    """Unconstrained least-squares estimate of the concentration vector."""
    A = np.asarray(A, dtype=float)
    R_mix = np.asarray(R_mix, dtype=float)
    if A.ndim != 2 or A.shape[0] < A.shape[1]:
        raise ValueError(f"A must be tall, got shape {A.shape}")
    if R_mix.shape != (A.shape[0],):
        raise ValueError(f"R_mix length {R_mix.shape} does not match A rows")
    if rcond is None:
        rcond = np.finfo(float).eps * max(A.shape)
    y, _, rank, _ = np.linalg.lstsq(A, R_mix, rcond=rcond)
    if rank == 0:
        raise NumericError("response matrix is rank deficient at the SVD cutoff")
    return y


def condition_number(A):
    """Ratio of extreme singular values; inf if the smallest is exactly zero."""
    A = np.asarray(A, dtype=float)
    if not np.any(A):
        raise ValueError("condition number of a zero matrix is undefined")
    s = np.linalg.svd(A, compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def error_norm(y_true, y_est):
    """Euclidean distance between the true and estimated concentrations."""
    y_true = np.asarray(y_true, dtype=float)
    y_est = np.asarray(y_est, dtype=float)
    if y_true.shape != y_est.shape:
        raise ValueError(f"length mismatch: {y_true.shape} vs {y_est.shape}")
    return float(np.linalg.norm(y_true - y_est))


def random_concentrations(n_s, seed):
    """Uniform(0, 1) draws normalized to sum to one; deterministic per seed."""
    if n_s < 1:
        raise ValueError("need at least one species")
    rng = np.random.default_rng(seed)
    y = rng.uniform(0.0, 1.0, size=n_s)
    return y / y.sum()


def project_simplex(y):
    """Euclidean projection onto the probability simplex (opt-in post-step)."""
    y = np.asarray(y, dtype=float)
    u = np.sort(y)[::-1]
    css = np.cumsum(u) - 1.0
    rho = np.nonzero(u * np.arange(1, y.size + 1) > css)[0][-1]
    return np.maximum(y - css[rho] / (rho + 1.0), 0.0)


class ConcentrationSolver(BaseEstimator):
    """Least-squares concentration estimator with a scikit-learn surface.

    ``fit`` takes the response matrix A (rows: stacked time samples,
    columns: species); ``predict`` maps a measured mixture-response vector
    (or a batch of them) to concentration estimates.
    """

    def __init__(self, rcond=None, project=False):
        self.rcond = rcond
        self.project = project

    def fit(self, A, y=None):
        A = np.asarray(A, dtype=float)
        if A.ndim != 2 or A.shape[0] < A.shape[1]:
            raise ValueError(f"A must be a tall 2D matrix, got shape {A.shape}")
        if not np.all(np.isfinite(A)):
            raise ValueError("A must be finite")
        rcond = self.rcond
        if rcond is None:
            rcond = np.finfo(float).eps * max(A.shape)
        U, s, Vt = np.linalg.svd(A, full_matrices=False)
        keep = s > rcond * s[0]
        if not np.any(keep):
            raise NumericError("response matrix is rank deficient at the SVD cutoff")
        self.n_features_in_ = A.shape[1]
        self.singular_values_ = s
        self.rank_ = int(keep.sum())
        self.condition_number_ = float(s[0] / s[-1]) if s[-1] > 0 else float("inf")
        self._pinv = (Vt[keep].T / s[keep]) @ U[:, keep].T
        return self

    def predict(self, R_mix):
        if not hasattr(self, "_pinv"):
            raise NumericError("solver is not fitted")
        R_mix = np.asarray(R_mix, dtype=float)
        single = R_mix.ndim == 1
        R2 = R_mix[None, :] if single else R_mix
        if R2.shape[1] != self._pinv.shape[1]:
            raise ValueError(f"R_mix length {R2.shape[1]} does not match A rows")
        est = R2 @ self._pinv.T
        if self.project:
            est = np.array([project_simplex(row) for row in est])
        return est[0] if single else est

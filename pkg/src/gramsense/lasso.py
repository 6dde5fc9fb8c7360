"""Complex weighted-l1 LASSO on column-normalized data.

Minimizes  0.5 * ||H_bar x - y_bar||^2 + mu_bar * ||F x||_1  over complex x,
with F = diag(weights), using accelerated proximal gradient with
function-value restart. Several right-hand sides sharing H_bar are solved
together as columns of one array.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, InvalidParameterError
from .frf import FrfMatrix, NormalizedFrf, normalize_columns

DEFAULT_TOL = 1e-8
DEFAULT_MAX_ITER = 50_000
_UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class LassoProblem:
    h_bar: np.ndarray
    y_bar: np.ndarray
    mu_bar: float
    weights: np.ndarray
    y_norm: float = 1.0

    def __post_init__(self):
        h = np.asarray(self.h_bar, dtype=complex)
        y = np.asarray(self.y_bar, dtype=complex)
        w = np.asarray(self.weights, dtype=float)
        if h.ndim != 2 or y.shape != (h.shape[0],) or w.shape != (h.shape[1],):
            raise DimensionMismatchError(
                f"h_bar {h.shape}, y_bar {y.shape} and weights {w.shape} are inconsistent"
            )
        if np.abs(np.linalg.norm(h, axis=0) - 1.0).max() > _UNIT_TOL:
            raise InvalidParameterError("h_bar columns must have unit l2 norm")
        if abs(np.linalg.norm(y) - 1.0) > _UNIT_TOL:
            raise InvalidParameterError("y_bar must have unit l2 norm")
        if not self.mu_bar > 0:
            raise InvalidParameterError(f"mu_bar must be positive, got {self.mu_bar}")
        if np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise InvalidParameterError("weights must be positive and finite")
        if not self.y_norm > 0:
            raise InvalidParameterError("y_norm must be positive")
        object.__setattr__(self, "h_bar", h)
        object.__setattr__(self, "y_bar", y)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "mu_bar", float(self.mu_bar))
        object.__setattr__(self, "y_norm", float(self.y_norm))

    @classmethod
    def from_measurements(cls, h, y, mu_fraction: float = 0.1) -> LassoProblem:
        """Normalize raw H (FrfMatrix, NormalizedFrf or array) and y; mu_bar by the fractional rule."""
        nh = h if isinstance(h, NormalizedFrf) else normalize_columns(h)
        y = np.asarray(y, dtype=complex)
        if y.shape != (nh.h_bar.shape[0],):
            raise DimensionMismatchError(f"y has shape {y.shape}, H has {nh.h_bar.shape[0]} rows")
        y_norm = float(np.linalg.norm(y))
        if y_norm == 0:
            raise InvalidParameterError("measurement vector is zero")
        y_bar = y / y_norm
        return cls(nh.h_bar, y_bar, default_mu(nh.h_bar, y_bar, mu_fraction), nh.weights, y_norm)


@dataclass(frozen=True, eq=False)
class LassoSolution:
    x_bar_hat: np.ndarray
    x_hat: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    converged: bool
    mu_bar: float

    def to_dict(self) -> dict:
        return {
            "x_hat_magnitude": np.abs(self.x_hat).tolist(),
            "x_hat_phase": np.angle(self.x_hat).tolist(),
            "objective": self.objective,
            "kkt_residual": self.kkt_residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "mu_bar": self.mu_bar,
        }


def default_mu(h_bar, y_bar, c: float = 0.1) -> float:
    """mu_bar = c * ||H_bar^H y_bar||_inf."""
    h = h_bar.h_bar if isinstance(h_bar, NormalizedFrf) else np.asarray(h_bar)
    corr = np.abs(h.conj().T @ np.asarray(y_bar))
    top = float(corr.max()) if corr.size else 0.0
    if top == 0:
        raise InvalidParameterError("H_bar^H y_bar vanishes (zero measurement?)")
    if not c > 0:
        raise InvalidParameterError(f"mu fraction must be positive, got {c}")
    return c * top


def zero_threshold(problem: LassoProblem) -> float:
    """Smallest mu_bar for which x = 0 is optimal: max_n |h_n^H y| / F_nn."""
    corr = np.abs(problem.h_bar.conj().T @ problem.y_bar)
    return float(np.max(corr / problem.weights))


def soft_threshold(z, t):
    """Complex magnitude shrinkage z * max(1 - t/|z|, 0); phase preserved."""
    mag = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        scale = np.where(mag > t, 1.0 - t / mag, 0.0)
    return z * scale


def lipschitz_bound(h, iters: int = 50, margin: float = 0.05) -> float:
    """Power-iteration estimate of ||H||_2^2, inflated by ``margin``."""
    n = h.shape[1]
    v = np.full(n, 1.0 / np.sqrt(n), dtype=complex)
    est = 0.0
    for _ in range(iters):
        w = h.conj().T @ (h @ v)
        nw = np.linalg.norm(w)
        if nw == 0:
            break
        est = float(nw)
        v = w / nw
    est = float(np.linalg.norm(h @ v) ** 2) if est else 0.0
    return max(est * (1.0 + margin), np.finfo(float).tiny)


def _kkt(grad_smooth, x, thr):
    # grad_smooth = H^H (H x - y); optimality needs -grad in thr * subdifferential of |x|
    g = -grad_smooth
    mag = np.abs(x)
    zero = mag == 0
    with np.errstate(divide="ignore", invalid="ignore"):
        on = np.abs(g - thr * np.where(zero, 0, x / np.where(zero, 1, mag)))
    off = np.maximum(np.abs(g) - thr, 0.0)
    return np.where(zero, off, on).max(axis=0)


def _objective(resid, x, thr):
    return 0.5 * np.sum(np.abs(resid) ** 2, axis=0) + np.sum(thr * np.abs(x), axis=0)


def kkt_residual(problem: LassoProblem, x_bar) -> float:
    x = np.asarray(x_bar, dtype=complex)
    if x.shape != (problem.h_bar.shape[1],):
        raise DimensionMismatchError(f"x_bar has shape {x.shape}")
    grad = problem.h_bar.conj().T @ (problem.h_bar @ x - problem.y_bar)
    thr = problem.mu_bar * problem.weights
    return float(_kkt(grad[:, None], x[:, None], thr[:, None])[0])


def lasso_objective(problem: LassoProblem, x_bar) -> float:
    x = np.asarray(x_bar, dtype=complex)
    resid = problem.h_bar @ x - problem.y_bar
    thr = problem.mu_bar * problem.weights
    return float(_objective(resid[:, None], x[:, None], thr[:, None])[0])


def _check_options(tol, max_iter):
    if not (tol > 0 and np.isfinite(tol)):
        raise InvalidParameterError(f"tol must be positive, got {tol}")
    if int(max_iter) != max_iter or max_iter < 1:
        raise InvalidParameterError(f"max_iter must be a positive integer, got {max_iter}")


def _apg(h, y, thr, tol, max_iter, lipschitz):
    """Batched accelerated proximal gradient; columns of y are independent problems."""
    n, b = h.shape[1], y.shape[1]
    hh = h.conj().T
    x = np.zeros((n, b), dtype=complex)
    gx = -(hh @ y)  # gradient of the smooth part at x
    gz = gx.copy()
    z = x.copy()
    resid = -y.copy()
    obj = _objective(resid, x, thr)
    t = np.ones(b)
    plain = np.ones(b, dtype=bool)  # z == x, i.e. next step carries no momentum
    kkt = _kkt(gx, x, thr)
    iters = np.zeros(b, dtype=int)
    active = kkt >= tol
    step = 1.0 / lipschitz
    for _ in range(max_iter):
        cols = np.nonzero(active)[0]
        if cols.size == 0:
            break
        za, ga, ta = z[:, cols], gz[:, cols], thr[:, cols]
        xn = soft_threshold(za - step * ga, step * ta)
        rn = h @ xn - y[:, cols]
        gn = hh @ rn
        objn = _objective(rn, xn, ta)
        slack = 1e-13 * (1.0 + np.abs(obj[cols]))
        worse = objn > obj[cols] + slack
        if np.any(worse & plain[cols]):
            # a momentum-free step went uphill: the Lipschitz estimate is too small
            step *= 0.5
        iters[cols] += 1
        acc = cols[~worse]
        rej = cols[worse]
        if rej.size:
            z[:, rej] = x[:, rej]
            gz[:, rej] = gx[:, rej]
            t[rej] = 1.0
            plain[rej] = True
        if acc.size:
            k = ~worse
            xa, ga_new = xn[:, k], gn[:, k]
            t_new = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t[acc] ** 2))
            beta = (t[acc] - 1.0) / t_new
            z[:, acc] = xa + beta * (xa - x[:, acc])
            gz[:, acc] = ga_new + beta * (ga_new - gx[:, acc])
            x[:, acc] = xa
            gx[:, acc] = ga_new
            obj[acc] = objn[k]
            t[acc] = t_new
            plain[acc] = beta == 0
            kkt[acc] = _kkt(ga_new, xa, thr[:, acc])
            active[acc] = kkt[acc] >= tol
    return x, kkt, iters, ~active


def solve_batch(h_bar, y_bars, mu_bars, weights, y_norms=None, tol: float = DEFAULT_TOL,
                max_iter: int = DEFAULT_MAX_ITER) -> list:
    """Solve several problems that share H_bar and weights; y_bars is (M, B)."""
    _check_options(tol, max_iter)
    h = np.asarray(h_bar, dtype=complex)
    y = np.asarray(y_bars, dtype=complex)
    if y.ndim == 1:
        y = y[:, None]
    b = y.shape[1]
    mu = np.broadcast_to(np.asarray(mu_bars, dtype=float), (b,))
    w = np.asarray(weights, dtype=float)
    norms = np.ones(b) if y_norms is None else np.broadcast_to(np.asarray(y_norms, dtype=float), (b,))
    if y.shape[0] != h.shape[0] or w.shape != (h.shape[1],):
        raise DimensionMismatchError("h_bar, y_bars and weights are inconsistent")
    thr = w[:, None] * mu[None, :]
    x, kkt, iters, done = _apg(h, y, thr, tol, int(max_iter), lipschitz_bound(h))
    resid = h @ x - y
    obj = _objective(resid, x, thr)
    out = []
    for j in range(b):
        out.append(LassoSolution(
            x_bar_hat=x[:, j].copy(),
            x_hat=norms[j] * w * x[:, j],
            objective=float(obj[j]),
            kkt_residual=float(kkt[j]),
            iterations=int(iters[j]),
            converged=bool(done[j]),
            mu_bar=float(mu[j]),
        ))
    return out


def solve(problem: LassoProblem, tol: float = DEFAULT_TOL,
          max_iter: int = DEFAULT_MAX_ITER) -> LassoSolution:
    return solve_batch(problem.h_bar, problem.y_bar[:, None], problem.mu_bar, problem.weights,
                       problem.y_norm, tol=tol, max_iter=max_iter)[0]


def reconstruct(h, y, mu_fraction: float = 0.1, tol: float = DEFAULT_TOL,
                max_iter: int = DEFAULT_MAX_ITER) -> LassoSolution:
    """Normalize, solve and de-normalize in one call; returns forces in N."""
    if isinstance(h, FrfMatrix) or not isinstance(h, NormalizedFrf):
        h = normalize_columns(h)
    return solve(LassoProblem.from_measurements(h, y, mu_fraction), tol=tol, max_iter=max_iter)

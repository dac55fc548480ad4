"""Regularized empirical-risk objectives: logistic and ridge least-squares.

Two regularization conventions coexist in the literature, lambda/2 * ||w||^2
and lambda * ||w||^2. Both are supported; ``reg`` below is the coefficient
that multiplies the identity in the Hessian (lambda for Half, 2*lambda for
Full), so gradients/Hessians of the Full convention at lambda equal those of
Half at 2*lambda exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from fedsketch.data import Dataset
from fedsketch.errors import DimensionMismatch, FedsketchError


class ObjectiveKind(Enum):
    LOGISTIC = "logistic"
    RIDGE_LS = "ridge"


class RegConvention(Enum):
    HALF = "half"  # lambda/2 * ||w||^2
    FULL = "full"  # lambda * ||w||^2


class SingularHessian(FedsketchError):
    pass


class PowerIterationDivergence(FedsketchError):
    pass


@dataclass(frozen=True)
class Objective:
    kind: ObjectiveKind
    lam: float
    reg_convention: RegConvention = RegConvention.HALF

    def __post_init__(self):
        if not (self.lam > 0):
            raise ValueError(f"lambda must be positive, got {self.lam}")

    @property
    def reg(self) -> float:
        """Coefficient on the identity in the Hessian (and on w in the gradient)."""
        return self.lam if self.reg_convention is RegConvention.HALF else 2.0 * self.lam

    @property
    def reg_loss_coef(self) -> float:
        """Coefficient on ||w||^2 in the loss."""
        return 0.5 * self.lam if self.reg_convention is RegConvention.HALF else self.lam

    @property
    def curvature_bound(self) -> float:
        """Upper bound on the per-sample loss curvature: 1/4 logistic, 1 ridge."""
        return 0.25 if self.kind is ObjectiveKind.LOGISTIC else 1.0


def _check_dims(w: np.ndarray, data: Dataset) -> np.ndarray:
    w = np.asarray(w, dtype=np.float64)
    if w.shape != (data.feature_dim,):
        raise DimensionMismatch(f"w has shape {w.shape}, expected ({data.feature_dim},)")
    return w


def _sigmoid(t: np.ndarray) -> np.ndarray:
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    e = np.exp(t[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def loss(obj: Objective, w: np.ndarray, data: Dataset) -> float:
    w = _check_dims(w, data)
    X, y = data.features, data.labels
    if obj.kind is ObjectiveKind.LOGISTIC:
        z = y * (X @ w)
        # log(1 + exp(-z)) = log1p(exp(-|z|)) + max(0, -z), overflow-free
        fit = np.mean(np.log1p(np.exp(-np.abs(z))) + np.maximum(0.0, -z))
    else:
        r = X @ w - y
        fit = 0.5 * np.mean(r * r)
    return float(fit + obj.reg_loss_coef * (w @ w))


def gradient(obj: Objective, w: np.ndarray, data: Dataset) -> np.ndarray:
    w = _check_dims(w, data)
    X, y = data.features, data.labels
    n = data.row_count
    if obj.kind is ObjectiveKind.LOGISTIC:
        z = y * (X @ w)
        g_fit = -(X.T @ (y * _sigmoid(-z))) / n
    else:
        g_fit = X.T @ (X @ w - y) / n
    return g_fit + obj.reg * w


def _curvature_weights(obj: Objective, w: np.ndarray, data: Dataset) -> np.ndarray:
    """Per-sample second-derivative weights of the unregularized loss."""
    if obj.kind is ObjectiveKind.LOGISTIC:
        s = _sigmoid(data.labels * (data.features @ w))
        return s * (1.0 - s)
    return np.ones(data.row_count)


def hessian(obj: Objective, w: np.ndarray, data: Dataset) -> np.ndarray:
    w = _check_dims(w, data)
    X = data.features
    n = data.row_count
    d = _curvature_weights(obj, w, data)
    H = (X * d[:, None]).T @ X / n
    H += obj.reg * np.eye(data.feature_dim)
    return 0.5 * (H + H.T)


def hessian_sqrt(obj: Objective, w: np.ndarray, data: Dataset) -> np.ndarray:
    """An (n, M) matrix A with A^T A equal to the unregularized loss Hessian."""
    w = _check_dims(w, data)
    d = _curvature_weights(obj, w, data)
    return data.features * np.sqrt(d / data.row_count)[:, None]


def _power_lambda_max(G: np.ndarray, rel_tol: float = 1e-6, max_iter: int = 500) -> float:
    """Largest eigenvalue of a symmetric PSD matrix by seeded power iteration."""
    M = G.shape[0]
    v = np.random.default_rng(0x9E3779B9).standard_normal(M)
    v /= np.linalg.norm(v)
    lam = 0.0
    for _ in range(max_iter):
        u = G @ v
        if not np.all(np.isfinite(u)):
            raise PowerIterationDivergence("non-finite values in power iteration")
        norm = np.linalg.norm(u)
        if norm == 0.0:
            return 0.0
        lam_new = float(v @ u)
        v = u / norm
        if abs(lam_new - lam) <= rel_tol * max(abs(lam_new), 1e-300):
            return lam_new
        lam = lam_new
    return lam


def estimate_constants(obj: Objective, data: Dataset) -> tuple[float, float]:
    """(L1, gamma): smoothness bound and strong-convexity parameter.

    L1 = c * lambda_max(X^T X)/n + reg with c the per-sample curvature bound;
    gamma is the effective regularization coefficient.
    """
    G = data.features.T @ data.features
    lam_max = _power_lambda_max(G)
    L1 = obj.curvature_bound * lam_max / data.row_count + obj.reg
    return L1, obj.reg


def solve_spd(K: np.ndarray, b: np.ndarray, err: type[FedsketchError] = SingularHessian):
    """Solve K x = b for symmetric positive-definite K via Cholesky.

    On factorization failure, retries once with 1e-12 * mean-diagonal jitter,
    then raises ``err``.
    """
    try:
        L = np.linalg.cholesky(K)
    except np.linalg.LinAlgError:
        jitter = 1e-12 * np.trace(K) / K.shape[0]
        try:
            L = np.linalg.cholesky(K + jitter * np.eye(K.shape[0]))
        except np.linalg.LinAlgError:
            raise err("Cholesky factorization failed even after jitter")
    y = np.linalg.solve(L, b)
    return np.linalg.solve(L.T, y)


@dataclass(frozen=True)
class NewtonResult:
    w: np.ndarray
    grad_norm: float
    iterations: int
    converged: bool


def newton_oracle(
    obj: Objective, data: Dataset, tol: float, max_iter: int = 100
) -> NewtonResult:
    """Centralized damped Newton from w = 0 down to ||grad|| <= tol.

    Backtracking line search (Armijo, halving, c = 1e-4). Deterministic. On
    non-convergence the best iterate seen is returned with converged=False.
    """
    if not (tol > 0):
        raise ValueError("tol must be positive")
    w = np.zeros(data.feature_dim)
    best_w, best_gn = w, np.inf
    for it in range(max_iter):
        g = gradient(obj, w, data)
        gn = float(np.linalg.norm(g))
        if gn < best_gn:
            best_w, best_gn = w, gn
        if gn <= tol:
            return NewtonResult(w, gn, it, True)
        H = hessian(obj, w, data)
        d = solve_spd(H, g)
        f0 = loss(obj, w, data)
        slope = float(g @ d)
        t = 1.0
        for _ in range(60):
            if loss(obj, w - t * d, data) <= f0 - 1e-4 * t * slope:
                break
            t *= 0.5
        else:
            return NewtonResult(best_w, best_gn, it, False)
        w = w - t * d
    g = gradient(obj, w, data)
    gn = float(np.linalg.norm(g))
    if gn < best_gn:
        best_w, best_gn = w, gn
    return NewtonResult(best_w, best_gn, max_iter, best_gn <= tol)

"""Kernel ridge regression on finite samples.

The regularized system is (K + ell * lambda * I) alpha = y, matching the
operator normalization T ~ K/ell under which the effective dimension keeps
its meaning; the lambda here is the same lambda the risk bound speaks about.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import linalg

__all__ = [
    "KernelFn",
    "FittedModel",
    "gram_matrix",
    "krr_fit",
    "krr_predict",
    "empirical_effective_dimension",
    "empirical_effective_dimension_profile",
]

logger = logging.getLogger(__name__)

_RESIDUAL_RTOL = 1e-8


@dataclass(frozen=True)
class KernelFn:
    """A symmetric PSD kernel with a known diagonal bound.

    ``fn`` evaluates k(x, y) elementwise over broadcastable arrays.
    ``factored``, when present, is a (feature_map, weights) pair with
    k(x, y) = sum_m w_m phi_m(x) phi_m(y); Gram assembly then runs through
    one BLAS product instead of the elementwise path.
    """

    fn: Callable
    sup_diag: float
    factored: tuple[Callable, np.ndarray] | None = None

    def __post_init__(self) -> None:
        if not self.sup_diag > 0:
            raise ValueError(f"sup_diag must be positive, got {self.sup_diag}")

    def __call__(self, x, y):
        return self.fn(x, y)


@dataclass(frozen=True)
class FittedModel:
    """Representer coefficients plus the data they were trained on."""

    coefficients: np.ndarray
    training_inputs: np.ndarray
    lam: float
    ell: int

    def __post_init__(self) -> None:
        coef = np.asarray(self.coefficients, dtype=float)
        xs = np.asarray(self.training_inputs, dtype=float)
        if coef.shape[0] != self.ell or xs.shape[0] != self.ell:
            raise ValueError(
                f"coefficients ({coef.shape[0]}) and training inputs ({xs.shape[0]}) "
                f"must both have length ell = {self.ell}"
            )
        object.__setattr__(self, "coefficients", coef)
        object.__setattr__(self, "training_inputs", xs)


def gram_matrix(kernel: KernelFn, xs) -> np.ndarray:
    """K[i, j] = k(x_i, x_j), exactly symmetric (upper triangle mirrored)."""
    xs = np.asarray(xs, dtype=float)
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("xs must be a nonempty 1-d array of inputs")
    if kernel.factored is not None:
        feature_map, weights = kernel.factored
        scaled = feature_map(xs) * np.sqrt(weights)
        k = scaled @ scaled.T
    else:
        k = np.asarray(kernel.fn(xs[:, None], xs[None, :]), dtype=float)
    return np.triu(k) + np.triu(k, 1).T


def krr_fit(K: np.ndarray, y, lam: float) -> np.ndarray:
    """Solve (K + ell * lambda * I) alpha = y by Cholesky factorization.

    K must be symmetric PSD and lambda positive, which makes the shifted
    matrix positive definite.  If the factorization still fails, a jitter of
    1e-12 * trace(K)/ell is added once and the event logged; silent jitter
    would change the meaning of lambda.
    """
    K = np.asarray(K, dtype=float)
    y = np.asarray(y, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"K must be square, got shape {K.shape}")
    ell = K.shape[0]
    if y.shape != (ell,):
        raise ValueError(f"y must have shape ({ell},), got {y.shape}")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if not np.allclose(K, K.T, rtol=0.0, atol=1e-12 * max(1.0, float(np.abs(K).max()))):
        raise ValueError("K must be symmetric")

    shifted = K + ell * lam * np.eye(ell)
    try:
        alpha = linalg.cho_solve(linalg.cho_factor(shifted, lower=True), y)
    except np.linalg.LinAlgError:
        jitter = 1e-12 * float(np.trace(K)) / ell
        logger.warning(
            "Cholesky factorization failed; retrying with jitter %.3e on the diagonal",
            jitter,
        )
        alpha = linalg.cho_solve(
            linalg.cho_factor(shifted + jitter * np.eye(ell), lower=True), y
        )

    residual = float(np.linalg.norm(shifted @ alpha - y))
    if residual > _RESIDUAL_RTOL * float(np.linalg.norm(y)):
        raise RuntimeError(
            f"ridge solve residual {residual:.3e} exceeds "
            f"{_RESIDUAL_RTOL:.0e} * ||y||; system too ill-conditioned"
        )
    return alpha


def krr_predict(kernel: KernelFn, xs, alpha, x):
    """sum_i alpha_i k(x_i, x); vectorized over query points."""
    xs = np.asarray(xs, dtype=float)
    alpha = np.asarray(alpha, dtype=float)
    if xs.shape != alpha.shape:
        raise ValueError("xs and alpha must have matching shapes")
    query = np.asarray(x, dtype=float)
    scalar = query.ndim == 0
    q = np.atleast_1d(query)
    if kernel.factored is not None:
        feature_map, weights = kernel.factored
        coef = weights * (feature_map(xs).T @ alpha)
        values = feature_map(q) @ coef
    else:
        values = np.asarray(kernel.fn(xs[:, None], q[None, :]), dtype=float).T @ alpha
    return float(values[0]) if scalar else values


def empirical_effective_dimension(K: np.ndarray, lam: float) -> float:
    """Tr[(K/ell) ((K/ell) + lambda I)^{-1}] via eigendecomposition of K/ell."""
    return float(empirical_effective_dimension_profile(K, [lam])[0])


def empirical_effective_dimension_profile(K: np.ndarray, lambdas) -> np.ndarray:
    """Empirical effective dimension over a lambda grid, one eigensolve total.

    Eigenvalues of K/ell below zero (roundoff) are clipped; each value lies
    in [0, ell).
    """
    K = np.asarray(K, dtype=float)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"K must be square, got shape {K.shape}")
    lams = np.asarray(list(lambdas), dtype=float)
    if np.any(lams <= 0):
        raise ValueError("all lambda values must be positive")
    mu = np.clip(np.linalg.eigvalsh(K) / K.shape[0], 0.0, None)
    return np.array([float(np.sum(mu / (mu + lam))) for lam in lams])

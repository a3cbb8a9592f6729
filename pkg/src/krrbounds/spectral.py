"""Eigenvalue spectra of kernel integral operators and the constant Q.

The operators of interest have polynomially decaying eigenvalues
t_n = beta * n**-b with b > 1 (so the trace is finite).  Q is the
coefficient of the effective-dimension bound N(lambda) <= Q * lambda**(-1/b):

    Q = beta**(1/b) * (pi/b) / sin(pi/b)   for finite b,
    Q = beta                               for b = inf.

The two cases do not join continuously: the finite-b expression tends to 1
as b grows, regardless of beta.  b = inf therefore has to be requested
explicitly (``math.inf``), never approximated by a large float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["PriorParams", "Spectrum", "polynomial_spectrum", "q_constant"]


def _check_decay(beta: float, b: float) -> None:
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    if not b > 1:
        raise ValueError(f"spectral decay exponent b must be > 1, got {b}")


@dataclass(frozen=True)
class Spectrum:
    """Truncated nonincreasing sequence of positive operator eigenvalues.

    ``decay_model``, when present, is the ``(beta, b)`` pair generating
    ``eigenvalues[n-1] = beta * n**-b``; consumers that need the infinite
    tail (the effective-dimension computation) use it to treat the tail
    analytically instead of materialising huge arrays.  b must be finite
    here: an infinite exponent would zero out every eigenvalue past the
    first, contradicting positivity.
    """

    eigenvalues: np.ndarray
    decay_model: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        eig = np.array(self.eigenvalues, dtype=float)
        if eig.ndim != 1 or eig.size == 0:
            raise ValueError("eigenvalues must be a nonempty 1-d sequence")
        if not np.all(eig > 0):
            raise ValueError("eigenvalues must be strictly positive")
        if np.any(np.diff(eig) > 0):
            raise ValueError("eigenvalues must be nonincreasing")
        if self.decay_model is not None:
            beta, b = self.decay_model
            _check_decay(beta, b)
            if not math.isfinite(b):
                raise ValueError("decay_model requires finite b")
            n = np.arange(1, eig.size + 1, dtype=float)
            if not np.allclose(eig, beta * n**-b, rtol=1e-14, atol=0.0):
                raise ValueError("eigenvalues deviate from beta * n**-b decay model")
        eig.setflags(write=False)
        object.__setattr__(self, "eigenvalues", eig)

    def __len__(self) -> int:
        return int(self.eigenvalues.size)


@dataclass(frozen=True)
class PriorParams:
    """Parameters of the distribution family the risk bound quantifies over.

    b, beta    spectral decay t_n <= beta * n**-b (capacity); b = math.inf
               selects the flat-spectrum convention Q = beta
    c, R       source condition of degree c in [1, 2] with radius R
    alpha      lower bound on the operator norm of T (used as the testable
               surrogate for the condition lambda <= ||T||)
    kappa      kernel sup bound, k(x, x) <= kappa**2
    M, Sigma   noise bounds: |y - f(x)| <= M almost surely, variance proxy
               Sigma**2
    """

    b: float
    c: float
    beta: float
    alpha: float
    R: float
    kappa: float
    M: float
    Sigma: float

    def __post_init__(self) -> None:
        if not self.b > 1:
            raise ValueError(f"b must be > 1 (math.inf allowed), got {self.b}")
        if not 1.0 <= self.c <= 2.0:
            raise ValueError(f"c must be in [1, 2], got {self.c}")
        for name in ("beta", "alpha", "R", "kappa", "M", "Sigma"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value}")


def polynomial_spectrum(beta: float, b: float, n_max: int) -> Spectrum:
    """First ``n_max`` eigenvalues t_n = beta * n**-b, with the decay model attached."""
    _check_decay(beta, b)
    if not math.isfinite(b):
        raise ValueError("polynomial_spectrum requires finite b")
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    n = np.arange(1, n_max + 1, dtype=float)
    return Spectrum(beta * n**-b, decay_model=(float(beta), float(b)))


def q_constant(beta: float, b: float) -> float:
    """Coefficient Q of the effective-dimension bound Q * lambda**(-1/b).

    Finite b uses beta**(1/b) * (pi/b) / sin(pi/b); b = math.inf returns
    beta itself (and the bound exponent degenerates to lambda**0).
    """
    _check_decay(beta, b)
    if math.isinf(b):
        return float(beta)
    return beta ** (1.0 / b) * (math.pi / b) / math.sin(math.pi / b)

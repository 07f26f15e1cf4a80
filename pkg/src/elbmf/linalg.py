"""Spectral norm of small Gram matrices by power iteration."""
from __future__ import annotations

import numpy as np

LIPSCHITZ_FLOOR = 1e-12


def spectral_norm_psd(M, tol: float = 1e-6, max_iter: int = 1000) -> float:
    """Largest eigenvalue of a symmetric PSD matrix.

    Starts from the all-ones vector, so the result is deterministic. Stops once
    the Rayleigh quotient changes by less than ``tol`` relative.
    """
    M = np.asarray(M, dtype=float)
    k = M.shape[0]
    if k == 0:
        return 0.0
    x = np.ones(k) / np.sqrt(k)
    est = 0.0
    for _ in range(max_iter):
        y = M @ x
        new = float(x @ y)
        norm = np.linalg.norm(y)
        if norm == 0.0:
            return 0.0
        x = y / norm
        if abs(new - est) <= tol * abs(new):
            return new
        est = new
    return est


def lipschitz(M, tol: float = 1e-6, max_iter: int = 1000) -> float:
    """Step-size constant for a Gram matrix, floored away from zero."""
    return max(spectral_norm_psd(M, tol, max_iter), LIPSCHITZ_FLOOR)

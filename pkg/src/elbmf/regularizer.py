"""Elastic-binary (ELB) regularizer and its proximal operators.

The elastic net ``r(x) = kappa*|x| + lam*x**2`` only penalizes non-zero values.
Taking ``min(r(x), r(x - 1))`` gives a W-shaped penalty that vanishes exactly
on {0, 1}. Its proximal map splits at 1/2 into two shifted, shrunk elastic-net
proximal maps, one per well.

Coefficient convention: the proximal functions take ``(kappa, lam)`` as the
coefficients of the closed-form operator ``(1 + lam)^-1 * (...)``. That
operator is the proximal map of ``kappa*|y - t| + (lam / 2)*(y - t)**2`` around
the well ``t``, so it pairs with ``elb_scalar`` evaluated at ``lam / 2``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class RegCoeffs:
    """Elastic-net weights: ``kappa`` on the l1 term, ``lam`` on the l2 term."""

    kappa: float = 0.0
    lam: float = 0.0

    def __post_init__(self):
        if not (self.kappa >= 0 and self.lam >= 0):
            raise ValueError(f"coefficients must be non-negative, got kappa={self.kappa}, lam={self.lam}")


def elastic_net_scalar(x, c: RegCoeffs):
    return c.kappa * np.abs(x) + c.lam * np.square(x)


def elb_scalar(x, c: RegCoeffs):
    """``min(r(x), r(x - 1))``; works element-wise on arrays."""
    return np.minimum(elastic_net_scalar(x, c), elastic_net_scalar(np.subtract(x, 1.0), c))


def elb_matrix(X, c: RegCoeffs) -> float:
    return float(np.sum(elb_scalar(np.asarray(X, dtype=float), c)))


def _well(x):
    # x <= 1/2 belongs to the zero well, including the boundary
    return (np.asarray(x) > 0.5).astype(float)


def prox_scalar(x, c: RegCoeffs):
    """Proximal map of the ELB penalty, element-wise.

    For ``x <= 1/2`` this is ``(x - kappa*sign(x)) / (1 + lam)``, otherwise
    ``(x - kappa*sign(x - 1) + lam) / (1 + lam)``. Inside the dead zone
    ``|x - well| < kappa`` the l1 term pins the result to the well instead of
    letting ``sign`` push it across; outside the dead zone both forms agree.
    """
    x = np.asarray(x, dtype=float)
    t = _well(x)
    d = x - t
    shrunk = np.sign(d) * np.maximum(np.abs(d) - c.kappa, 0.0)
    out = t + shrunk / (1.0 + c.lam)
    return out if out.ndim else float(out)


def prox_scalar_alt(x, c: RegCoeffs):
    """Alternative closed form obtained by swapping ``x`` and ``y`` in the fit term.

    ``(lam - 1)^-1 * (-x - kappa*sign(x))`` for ``x <= 1/2`` and
    ``(lam - 1)^-1 * (-x - kappa*sign(x - 1) + lam)`` otherwise. Singular at
    ``lam == 1``. Not used by the solver.
    """
    if c.lam == 1:
        raise ZeroDivisionError("alternative proximal operator is undefined for lam == 1")
    x = np.asarray(x, dtype=float)
    upper = x > 0.5
    num = np.where(upper, -x - c.kappa * np.sign(x - 1.0) + c.lam, -x - c.kappa * np.sign(x))
    out = num / (c.lam - 1.0)
    return out if out.ndim else float(out)


def prox_nonneg_scalar(x, c: RegCoeffs):
    out = np.maximum(0.0, prox_scalar(x, c))
    return out if np.ndim(out) else float(out)


def prox_matrix(X, c: RegCoeffs, nonneg: bool = False) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    out = prox_scalar(X, c)
    if nonneg:
        out = np.maximum(out, 0.0)
    return np.asarray(out, dtype=float).reshape(X.shape)

"""Reconstruction quality and convergence diagnostics."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .boolean import DimensionError, as_bool, bool_product, xor_loss


@dataclass(frozen=True)
class MetricsReport:
    recall: float
    similarity: float
    relative_loss: float
    xor_loss: int
    recall_star: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def _ones(a: np.ndarray) -> int:
    n = int(np.count_nonzero(a))
    if n == 0:
        raise ValueError("reference matrix has no ones; the ratio is undefined")
    return n


def _same_shape(a, b):
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch: {a.shape} vs {b.shape}")


def recall(A, B) -> float:
    """Fraction of the ones of ``A`` that are also ones in ``B``."""
    a, b = as_bool(A), as_bool(B)
    _same_shape(a, b)
    return np.count_nonzero(a & b) / _ones(a)


def recall_star(A_star, B) -> float:
    """Recall against the noise-free ground truth."""
    return recall(A_star, B)


def hamming_similarity(A, B) -> float:
    """``1 - mismatches / cells``; higher is better."""
    a, b = as_bool(A), as_bool(B)
    _same_shape(a, b)
    return 1.0 - xor_loss(a, b) / a.size


def relative_loss(A, B) -> float:
    """XOR loss normalized by the number of ones in ``A``; lower is better."""
    a, b = as_bool(A), as_bool(B)
    _same_shape(a, b)
    return xor_loss(a, b) / _ones(a)


def boolean_gap(U, V) -> float:
    """Sum over both factors of the mean distance to the nearest of {0, 1}."""
    total = 0.0
    for X in (U, V):
        X = np.asarray(X, dtype=float)
        if X.size:
            total += float(np.mean(np.minimum(np.abs(X), np.abs(X - 1.0))))
    return total


def hamming_flips(B_prev, B_next, size: int) -> float:
    """Fraction of ``size`` cells that flipped between two reconstructions."""
    return xor_loss(B_prev, B_next) / size


def loss_gap(relaxed_fit: float, rounded_xor_loss: int) -> float:
    return rounded_xor_loss - relaxed_fit


def evaluate(A, U, V, A_star=None) -> MetricsReport:
    """All reconstruction metrics of ``U o V`` against ``A`` (and ``A_star``)."""
    B = bool_product(U, V)
    return MetricsReport(
        recall=recall(A, B),
        similarity=hamming_similarity(A, B),
        relative_loss=relative_loss(A, B),
        xor_loss=xor_loss(A, B),
        recall_star=None if A_star is None else recall_star(A_star, B),
    )

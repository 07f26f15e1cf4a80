"""Rank estimation by minimum description length."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .boolean import DimensionError, as_bool, bool_product, xor_loss
from .optimizer import ElbmfConfig, factorize

DEFAULT_RESTARTS = 3


def log_binomial(size: int, ones: int) -> float:
    """``log2 C(size, ones)`` via log-gamma."""
    if not 0 <= ones <= size:
        raise ValueError(f"need 0 <= ones <= size, got ones={ones}, size={size}")
    return (math.lgamma(size + 1) - math.lgamma(ones + 1) - math.lgamma(size - ones + 1)) / math.log(2)


def code_length(x) -> float:
    """Bits to name which cells of ``x`` are ones, given how many there are."""
    x = np.asarray(x, dtype=bool)
    return log_binomial(x.size, int(np.count_nonzero(x)))


def mdl_cost(A, U, V, k: int | None = None) -> float:
    """Description length in bits of ``A`` under the Boolean factorization ``U o V``.

    Error matrix, plus each component's column of ``U`` and row of ``V``, plus
    ``log2(n*m)`` per component.
    """
    a, u, v = as_bool(A), as_bool(U), as_bool(V)
    if u.shape[1] != v.shape[0] or a.shape != (u.shape[0], v.shape[1]):
        raise DimensionError(f"shapes do not conform: A{a.shape}, U{u.shape}, V{v.shape}")
    if k is None:
        k = u.shape[1]
    if k != u.shape[1]:
        raise DimensionError(f"k={k} but factors have {u.shape[1]} components")
    n, m = a.shape
    err = a ^ bool_product(u, v).to_dense()
    bits = code_length(err)
    for i in range(k):
        bits += code_length(u[:, i]) + code_length(v[i, :])
    return bits + k * math.log2(n * m)


def aic_cost(A, U, V, eps: float = 1e-12) -> float:
    """AIC-style score ``2k(n+m) + nm*log2(err_rate + eps)``.

    Our own reading of AIC for Boolean factorizations; reported alongside MDL
    but never used to pick the rank unless asked.
    """
    a = as_bool(A)
    n, m = a.shape
    k = as_bool(U).shape[1]
    rate = xor_loss(a, bool_product(U, V)) / (n * m)
    return 2.0 * k * (n + m) + n * m * math.log2(rate + eps)


@dataclass
class RankCandidate:
    rank: int
    mdl_cost: float
    aic_cost: float
    xor_loss: int
    seed: int
    n_iter: int


@dataclass
class RankSweepResult:
    candidates: list[RankCandidate] = field(default_factory=list)
    criterion: str = "mdl"

    @property
    def chosen_rank(self) -> int:
        key = (lambda c: c.mdl_cost) if self.criterion == "mdl" else (lambda c: c.aic_cost)
        # min() keeps the first minimum; candidates are sorted by rank
        return min(self.candidates, key=key).rank

    def costs(self) -> dict[int, float]:
        return {c.rank: c.mdl_cost for c in self.candidates}


def restart_seed(base_seed: int, rank: int, restart: int) -> int:
    return int(np.random.SeedSequence([base_seed, rank, restart]).generate_state(1, np.uint64)[0])


def _best_run(A, k: int, base: ElbmfConfig, restarts: int) -> RankCandidate:
    best = None
    for r in range(restarts):
        seed = restart_seed(base.seed, k, r)
        res = factorize(A, replace(base, rank=k, seed=seed))
        loss = xor_loss(A, bool_product(res.U, res.V))
        if best is None or loss < best[0]:
            best = (loss, seed, res)
    loss, seed, res = best
    return RankCandidate(
        rank=k, mdl_cost=mdl_cost(A, res.U, res.V, k), aic_cost=aic_cost(A, res.U, res.V),
        xor_loss=loss, seed=seed, n_iter=res.n_iter,
    )


def rank_select(A, k_min: int, k_max: int, base_config: ElbmfConfig,
                restarts: int = DEFAULT_RESTARTS, workers: int = 1,
                criterion: str = "mdl") -> RankSweepResult:
    """Factorize at every rank in ``k_min..k_max`` and pick the cheapest.

    Each rank keeps the lowest-loss run out of ``restarts`` seeds derived from
    ``base_config.seed``. Ties go to the smaller rank. Results do not depend on
    ``workers``.
    """
    a = as_bool(A)
    if not 1 <= k_min <= k_max <= min(a.shape):
        raise ValueError(f"infeasible rank range {k_min}..{k_max} for a {a.shape[0]}x{a.shape[1]} matrix")
    if restarts < 1:
        raise ValueError("restarts must be positive")
    if criterion not in ("mdl", "aic"):
        raise ValueError(f"unknown criterion {criterion!r}")
    ranks = list(range(k_min, k_max + 1))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cands = list(pool.map(lambda k: _best_run(a, k, base_config, restarts), ranks))
    else:
        cands = [_best_run(a, k, base_config, restarts) for k in ranks]
    return RankSweepResult(candidates=cands, criterion=criterion)

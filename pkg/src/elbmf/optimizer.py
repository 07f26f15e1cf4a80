"""Elastic Boolean matrix factorization solver.

The relaxed problem

    minimize  1/2 ||A - U V||_F^2 + R(U) + R(V),   U, V >= 0

is solved by inertial proximal alternating linearized minimization: each
half-step extrapolates one factor, takes a gradient step of length 1/L on the
fit term, and applies the ELB proximal map with coefficients scaled by 1/L.
The l2 weight grows geometrically (``lam_t = lam * rate_base**t``) so the
factors are driven onto {0, 1}; whatever gap remains at the end is closed by
thresholding at 1/2.
"""
from __future__ import annotations

import csv
import io
import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields
from typing import Optional

import numpy as np

from .boolean import BoolMatrix, DimensionError, as_bool, bool_product, xor_loss
from .linalg import lipschitz
from .metrics import boolean_gap
from .regularizer import RegCoeffs, elb_matrix, prox_matrix

logger = logging.getLogger(__name__)

# rounded diagnostics run every iteration up to this many cells, every 10th above
FULL_TRACE_CELLS = 10**6
OBJECTIVE_WINDOW = 10
# lam_t saturates here instead of overflowing to inf
LAMBDA_CAP = 1e300


class NumericalError(ArithmeticError):
    """The solver produced a non-finite value."""


@dataclass(frozen=True)
class ElbmfConfig:
    rank: int
    kappa: float = 0.005
    lam: float = 0.001
    rate_base: float = 1.0033
    beta: float = 0.0
    max_iters: int = 1500
    tol: float = 1e-7
    integrality_eps: float = 1e-8
    seed: int = 0
    nonneg: bool = True

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError("rank must be positive")
        if self.kappa < 0 or self.lam < 0:
            raise ValueError("kappa and lam must be non-negative")
        if self.rate_base < 1:
            raise ValueError("rate_base must be >= 1")
        if self.beta < 0:
            raise ValueError("beta must be non-negative")
        if self.max_iters < 1:
            raise ValueError("max_iters must be positive")
        if self.tol <= 0 or self.integrality_eps <= 0:
            raise ValueError("tol and integrality_eps must be positive")

    def lambda_at(self, t: int) -> float:
        if self.lam == 0:
            return 0.0
        if t * math.log(self.rate_base) >= math.log(LAMBDA_CAP / self.lam):
            return LAMBDA_CAP
        return self.lam * self.rate_base ** t

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class TraceRecord:
    iteration: int
    lambda_t: float
    relaxed_objective: float
    relaxed_fit: float
    boolean_gap: float
    rounded_loss: Optional[int]
    bit_flips: Optional[int]
    cumulative_flips: float
    seconds: float


CSV_COLUMNS = (
    "iter", "lambda_t", "relaxed_objective", "rounded_loss",
    "boolean_gap", "bit_flips", "cumulative_flips", "seconds",
)


@dataclass
class IterationTrace:
    """Per-iteration diagnostics of one run.

    ``cumulative_flips`` is the Hamming process: the running sum of the
    fraction of reconstruction bits that flipped since the previous sampled
    iteration. Rounded quantities are ``None`` off the sampling cadence.
    """

    n_cells: int
    cadence: int = 1
    records: list[TraceRecord] = field(default_factory=list)

    def __len__(self):
        return len(self.records)

    def column(self, name: str) -> list:
        return [getattr(r, name) for r in self.records]

    def final(self) -> TraceRecord:
        return self.records[-1]

    def to_csv(self, fh=None) -> Optional[str]:
        own = fh is None
        if own:
            fh = io.StringIO()
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.records:
            w.writerow([
                r.iteration, repr(r.lambda_t), repr(r.relaxed_objective),
                "" if r.rounded_loss is None else r.rounded_loss,
                repr(r.boolean_gap),
                "" if r.bit_flips is None else r.bit_flips,
                repr(r.cumulative_flips), repr(r.seconds),
            ])
        return fh.getvalue() if own else None

    @classmethod
    def from_csv(cls, fh, n_cells: int = 0, cadence: int = 1) -> "IterationTrace":
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
            raise ValueError(f"unexpected trace columns: {reader.fieldnames}")
        opt_int = lambda s: None if s == "" else int(s)
        recs = [
            TraceRecord(
                iteration=int(row["iter"]),
                lambda_t=float(row["lambda_t"]),
                relaxed_objective=float(row["relaxed_objective"]),
                relaxed_fit=float("nan"),
                boolean_gap=float(row["boolean_gap"]),
                rounded_loss=opt_int(row["rounded_loss"]),
                bit_flips=opt_int(row["bit_flips"]),
                cumulative_flips=float(row["cumulative_flips"]),
                seconds=float(row["seconds"]),
            )
            for row in reader
        ]
        return cls(n_cells=n_cells, cadence=cadence, records=recs)


@dataclass
class Factorization:
    """Result of :func:`factorize`.

    ``U`` and ``V`` are the Boolean factors; ``U_relaxed``/``V_relaxed`` are the
    real-valued iterates they were rounded from.
    """

    U: BoolMatrix
    V: BoolMatrix
    trace: IterationTrace
    U_relaxed: np.ndarray
    V_relaxed: np.ndarray
    n_iter: int
    converged: bool

    def __iter__(self):
        return iter((self.U, self.V, self.trace))


def init_factors(n: int, m: int, k: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Uniform ``[0, 1)`` factors ``U`` (n x k) and ``V`` (k x m)."""
    if min(n, m, k) < 1:
        raise ValueError("dimensions and rank must be positive")
    if k > min(n, m):
        raise ValueError(f"rank {k} exceeds min(n, m) = {min(n, m)}")
    rng = np.random.default_rng(seed)
    U = rng.random((n, k))
    V = rng.random((k, m))
    return U, V


def _check_shapes(A, U, V):
    if U.shape[1] != V.shape[0] or A.shape != (U.shape[0], V.shape[1]):
        raise DimensionError(f"shapes do not conform: A{A.shape}, U{U.shape}, V{V.shape}")


def grad_u(A, U, V) -> np.ndarray:
    """Gradient of ``1/2 ||A - UV||^2`` with respect to ``U``."""
    A, U, V = np.asarray(A, dtype=float), np.asarray(U, dtype=float), np.asarray(V, dtype=float)
    _check_shapes(A, U, V)
    return U @ (V @ V.T) - A @ V.T


def grad_v(A, U, V) -> np.ndarray:
    """Gradient of ``1/2 ||A - UV||^2`` with respect to ``V``."""
    A, U, V = np.asarray(A, dtype=float), np.asarray(U, dtype=float), np.asarray(V, dtype=float)
    _check_shapes(A, U, V)
    return (U.T @ U) @ V - U.T @ A


def half_step(A, fixed, moving, prev_moving, side: str, c: RegCoeffs,
              lambda_t: float, beta: float = 0.0, nonneg: bool = True) -> np.ndarray:
    """One inertial proximal gradient update of ``moving`` with ``fixed`` held.

    ``side`` is ``"U"`` (moving is the left factor) or ``"V"``.
    """
    if beta < 0:
        raise ValueError("beta must be non-negative")
    if not (np.all(np.isfinite(moving)) and np.all(np.isfinite(fixed))):
        raise NumericalError(f"non-finite factor entering the {side} half-step")
    X = moving + beta * (moving - prev_moving) if beta else moving
    if side == "U":
        grad = grad_u(A, X, fixed)
        L = lipschitz(fixed @ fixed.T)
    elif side == "V":
        grad = grad_v(A, fixed, X)
        L = lipschitz(fixed.T @ fixed)
    else:
        raise ValueError(f"side must be 'U' or 'V', got {side!r}")
    if not np.all(np.isfinite(grad)):
        raise NumericalError(f"non-finite gradient in the {side} half-step")
    step = RegCoeffs(c.kappa / L, lambda_t / L)
    return prox_matrix(X - grad / L, step, nonneg=nonneg)


def relaxed_fit(A, U, V) -> float:
    """``||A - UV||_F^2`` on real factors."""
    R = np.asarray(A, dtype=float) - np.asarray(U) @ np.asarray(V)
    return float(np.einsum("ij,ij->", R, R))


def relaxed_objective(A, U, V, c: RegCoeffs, lambda_t: float) -> float:
    """``1/2 ||A - UV||_F^2 + R(U) + R(V)`` with l2 weight ``lambda_t``."""
    A = np.asarray(A, dtype=float)
    _check_shapes(A, np.asarray(U), np.asarray(V))
    reg = RegCoeffs(c.kappa, lambda_t)
    return 0.5 * relaxed_fit(A, U, V) + elb_matrix(U, reg) + elb_matrix(V, reg)


def binarize(U, V=None):
    """Threshold at 1/2; the boundary goes to zero.

    With one argument returns one BoolMatrix, with two returns a pair.
    """
    if V is None:
        return BoolMatrix(np.asarray(U) > 0.5)
    return BoolMatrix(np.asarray(U) > 0.5), BoolMatrix(np.asarray(V) > 0.5)


def factorize(A, config: ElbmfConfig, callback=None) -> Factorization:
    """Factorize Boolean ``A`` into Boolean ``U o V`` of rank ``config.rank``.

    Stops after ``config.max_iters`` iterations, or earlier once the Boolean gap
    is below ``config.integrality_eps`` and the relaxed objective changed by at
    most ``config.tol`` (relative) over the last 10 iterations.

    ``callback(t, U, V)``, if given, is called after every iteration.
    """
    a = as_bool(A)
    n, m = a.shape
    if n == 0 or m == 0:
        raise ValueError("cannot factorize an empty matrix")
    k = config.rank
    U, V = init_factors(n, m, k, config.seed)
    U_prev, V_prev = U.copy(), V.copy()
    Af = a.astype(float)
    c = RegCoeffs(config.kappa, config.lam)

    cadence = 1 if n * m <= FULL_TRACE_CELLS else 10
    trace = IterationTrace(n_cells=n * m, cadence=cadence)
    B_prev = bool_product(*binarize(U, V))
    cumulative = 0.0
    objectives: list[float] = []
    converged = False
    start = time.perf_counter()

    t = 0
    for t in range(1, config.max_iters + 1):
        lam_t = config.lambda_at(t)
        U_new = half_step(Af, V, U, U_prev, "U", c, lam_t, config.beta, config.nonneg)
        U_prev, U = U, U_new
        V_new = half_step(Af, U, V, V_prev, "V", c, lam_t, config.beta, config.nonneg)
        V_prev, V = V, V_new

        fit = relaxed_fit(Af, U, V)
        reg = RegCoeffs(config.kappa, lam_t)
        obj = 0.5 * fit + elb_matrix(U, reg) + elb_matrix(V, reg)
        if not np.isfinite(obj):
            raise NumericalError(f"relaxed objective became non-finite at iteration {t}")
        gap = boolean_gap(U, V)

        rounded = flips = None
        if t % cadence == 0 or t == 1:
            B = bool_product(*binarize(U, V))
            rounded = xor_loss(a, B)
            flips = xor_loss(B_prev, B)
            cumulative += flips / (n * m)
            B_prev = B
        trace.records.append(TraceRecord(
            iteration=t, lambda_t=lam_t, relaxed_objective=obj, relaxed_fit=fit,
            boolean_gap=gap, rounded_loss=rounded, bit_flips=flips,
            cumulative_flips=cumulative, seconds=time.perf_counter() - start,
        ))
        objectives.append(obj)
        if callback is not None:
            callback(t, U, V)

        if gap <= config.integrality_eps and len(objectives) > OBJECTIVE_WINDOW:
            ref = objectives[-1 - OBJECTIVE_WINDOW]
            change = abs(obj - ref) / max(abs(ref), np.finfo(float).tiny)
            if change <= config.tol:
                converged = True
                break

    logger.debug("elbmf: %d iterations, gap %.3g, converged=%s", t, trace.final().boolean_gap, converged)
    Ub, Vb = binarize(U, V)
    return Factorization(U=Ub, V=Vb, trace=trace, U_relaxed=U, V_relaxed=V, n_iter=t, converged=converged)

"""Elastic Boolean matrix factorization.

Relax Boolean factors to non-negative reals, penalize them with a W-shaped
elastic-binary regularizer, and tighten the penalty over the iterations until
the factors land on {0, 1}.
"""
from .boolean import BoolMatrix, DimensionError, bool_product, density, xor_loss
from .datagen import GenConfig, PlacementError, TileSpec, generate, planted_rank
from .metrics import (
    MetricsReport,
    boolean_gap,
    evaluate,
    hamming_flips,
    hamming_similarity,
    loss_gap,
    recall,
    recall_star,
    relative_loss,
)
from .model_selection import RankSweepResult, log_binomial, mdl_cost, rank_select
from .optimizer import (
    ElbmfConfig,
    Factorization,
    IterationTrace,
    NumericalError,
    binarize,
    factorize,
    relaxed_objective,
)
from .regularizer import RegCoeffs, elb_matrix, elb_scalar, prox_matrix, prox_scalar

__version__ = "0.1.0"

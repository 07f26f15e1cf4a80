import numpy as np
import pytest

from elbmf.boolean import BoolMatrix, bool_product, xor_loss
from elbmf.datagen import GenConfig, generate
from elbmf.linalg import LIPSCHITZ_FLOOR, lipschitz, spectral_norm_psd
from elbmf.metrics import boolean_gap, recall
from elbmf.optimizer import (
    ElbmfConfig,
    IterationTrace,
    NumericalError,
    binarize,
    factorize,
    grad_u,
    grad_v,
    half_step,
    init_factors,
    relaxed_objective,
)
from elbmf.regularizer import RegCoeffs, prox_scalar
from oracles import central_diff, fit_half


def test_init_shapes_range_determinism():
    U, V = init_factors(4, 3, 2, seed=5)
    assert U.shape == (4, 2) and V.shape == (2, 3)
    assert U.min() >= 0 and U.max() < 1 and V.min() >= 0 and V.max() < 1
    U2, V2 = init_factors(4, 3, 2, seed=5)
    assert np.array_equal(U, U2) and np.array_equal(V, V2)


def test_init_seeds_differ():
    base = init_factors(6, 5, 3, seed=0)
    for s in range(1, 101):
        U, V = init_factors(6, 5, 3, seed=s)
        assert not (np.array_equal(U, base[0]) and np.array_equal(V, base[1]))


def test_init_rejects_rank_too_large():
    with pytest.raises(ValueError):
        init_factors(4, 3, 4, seed=0)


def test_gradients_small_examples():
    np.testing.assert_allclose(grad_u([[1.0]], [[0.5]], [[1.0]]), [[-0.5]])
    np.testing.assert_allclose(grad_v([[1.0]], [[1.0]], [[0.5]]), [[-0.5]])
    U = np.array([[1.0, 0], [0, 1], [1, 1]])
    V = np.array([[1.0, 0, 1], [0, 1, 0]])
    A = U @ V
    assert np.allclose(grad_u(A, U, V), 0) and np.allclose(grad_v(A, U, V), 0)


def test_gradients_finite_differences():
    rng = np.random.default_rng(0)
    A = (rng.random((5, 4)) < 0.5).astype(float)
    U, V = rng.random((5, 3)), rng.random((3, 4))
    gu = central_diff(lambda X: fit_half(A, X, V), U)
    gv = central_diff(lambda X: fit_half(A, U, X), V)
    np.testing.assert_allclose(grad_u(A, U, V), gu, rtol=1e-5, atol=1e-8)
    np.testing.assert_allclose(grad_v(A, U, V), gv, rtol=1e-5, atol=1e-8)


@pytest.mark.parametrize("M, expected", [
    (np.eye(3), 1.0),
    (np.diag([4.0, 1.0]), 4.0),
    (np.array([[2.0, 1.0], [1.0, 2.0]]), 3.0),
])
def test_lipschitz_examples(M, expected):
    assert lipschitz(M) == pytest.approx(expected, rel=1e-5)


def test_lipschitz_floor_and_random_gram():
    assert lipschitz(np.zeros((3, 3))) == LIPSCHITZ_FLOOR
    rng = np.random.default_rng(2)
    for _ in range(20):
        V = rng.random((4, 30))
        G = V @ V.T
        assert spectral_norm_psd(G) == pytest.approx(np.linalg.eigvalsh(G)[-1], rel=1e-5)


def test_half_step_plain_gradient_when_regularizer_off():
    rng = np.random.default_rng(3)
    A = (rng.random((6, 5)) < 0.5).astype(float)
    U, V = rng.random((6, 2)), rng.random((2, 5))
    L = np.linalg.eigvalsh(V @ V.T)[-1]
    out = half_step(A, V, U, U, "U", RegCoeffs(0, 0), 0.0, beta=0.0, nonneg=False)
    np.testing.assert_allclose(out, U - grad_u(A, U, V) / L, rtol=1e-5)


def test_half_step_boolean_stationary():
    U = np.array([[1.0, 0], [0, 1], [1, 0]])
    V = np.array([[1.0, 1, 0], [0, 0, 1]])
    A = U @ V
    c = RegCoeffs(0.05, 0.1)
    np.testing.assert_array_equal(half_step(A, V, U, U, "U", c, 0.1), U)
    np.testing.assert_array_equal(half_step(A, U, V, V, "V", c, 0.1), V)


def test_half_step_single_entry_chain():
    # L = 1, gradient -0.5, pre-prox value 1.0, prox keeps 1.0
    A, U, V = np.array([[1.0]]), np.array([[0.5]]), np.array([[1.0]])
    out = half_step(A, V, U, U, "U", RegCoeffs(0.05, 0.0), 0.1)
    assert out[0, 0] == pytest.approx(prox_scalar(1.0, RegCoeffs(0.05, 0.1)))
    assert out[0, 0] == pytest.approx(1.0)


def test_half_step_inertia_extrapolates():
    A = np.array([[0.0]])
    V = np.array([[1.0]])
    # zero gradient at the extrapolated point 0 + 0.5 * (0 - 0) ... use a nonzero history
    U, U_prev = np.array([[0.4]]), np.array([[0.2]])
    out = half_step(A, V, U, U_prev, "U", RegCoeffs(0, 0), 0.0, beta=0.5, nonneg=False)
    # X~ = 0.5, grad = 0.5, L = 1 -> 0
    assert out[0, 0] == pytest.approx(0.0)


def test_half_step_rejects_non_finite():
    A = np.array([[1.0]])
    with pytest.raises(NumericalError):
        half_step(A, np.array([[np.inf]]), np.array([[0.5]]), np.array([[0.5]]), "U", RegCoeffs(), 0.0)


def test_relaxed_objective_examples():
    c = RegCoeffs(0.5, 0.5)
    assert relaxed_objective([[1.0]], [[1.0]], [[0.5]], c, 0.5) == pytest.approx(0.5)
    U = np.array([[1.0, 0], [0, 1]])
    V = np.array([[1.0, 1], [0, 1]])
    assert relaxed_objective(U @ V, U, V, c, 0.5) == 0.0


def test_binarize_examples():
    assert binarize([[0.49, 0.51]]) == BoolMatrix([[0, 1]])
    assert binarize([[0.5]]) == BoolMatrix([[0]])
    Ub, Vb = binarize(np.eye(2), np.ones((2, 3)))
    assert Ub == BoolMatrix(np.eye(2)) and Vb == BoolMatrix.ones(2, 3)


def test_config_validation():
    with pytest.raises(ValueError):
        ElbmfConfig(rank=0)
    with pytest.raises(ValueError):
        ElbmfConfig(rank=2, rate_base=0.99)
    with pytest.raises(ValueError):
        ElbmfConfig(rank=2, kappa=-1)
    cfg = ElbmfConfig(rank=2, lam=0.5, rate_base=1.0)
    assert cfg.lambda_at(1) == cfg.lambda_at(500) == 0.5


def test_lambda_schedule_non_decreasing_and_capped():
    cfg = ElbmfConfig(rank=1, lam=1.0, rate_base=1.05)
    lams = [cfg.lambda_at(t) for t in range(1, 20000, 97)]
    assert all(b >= a for a, b in zip(lams, lams[1:]))
    assert np.isfinite(lams[-1])


def test_factorize_all_zeros():
    # a U column paired with an empty V row is also an exact optimum here
    res = factorize(np.zeros((8, 6), dtype=bool), ElbmfConfig(rank=2, max_iters=300))
    assert xor_loss(np.zeros((8, 6)), bool_product(res.U, res.V)) == 0


def test_factorize_rejects_rank():
    with pytest.raises(ValueError):
        factorize(np.ones((3, 5)), ElbmfConfig(rank=4))


def test_factorize_planted_noiseless():
    A, A_star, tiles = generate(GenConfig(40, 30, 5, (5, 10), (5, 10), 0.0, False, seed=0))
    res = factorize(A, ElbmfConfig(rank=5, seed=0))
    B = bool_product(res.U, res.V)
    assert xor_loss(A, B) == 0
    assert recall(A_star, B) == 1.0


def test_factorize_outputs_and_trace():
    A, _, _ = generate(GenConfig(30, 20, 3, (4, 8), (4, 8), 0.1, False, seed=4))
    seen = []
    res = factorize(A, ElbmfConfig(rank=3, max_iters=200, seed=1),
                    callback=lambda t, U, V: seen.append((U.min(), V.min(), np.isfinite(U).all() and np.isfinite(V).all())))
    U, V, trace = res
    assert U.shape == (30, 3) and V.shape == (3, 20)
    assert all(u >= 0 and v >= 0 and fin for u, v, fin in seen)
    assert len(trace) == res.n_iter == len(seen)
    lam = trace.column("lambda_t")
    assert all(b >= a for a, b in zip(lam, lam[1:]))
    assert trace.cadence == 1 and None not in trace.column("rounded_loss")
    assert res.U == binarize(res.U_relaxed) and res.V == binarize(res.V_relaxed)
    assert trace.final().boolean_gap == pytest.approx(boolean_gap(res.U_relaxed, res.V_relaxed))


def test_factorize_deterministic():
    A, _, _ = generate(GenConfig(30, 20, 3, (4, 8), (4, 8), 0.1, False, seed=6))
    cfg = ElbmfConfig(rank=3, max_iters=150, seed=9, beta=0.3)
    r1, r2 = factorize(A, cfg), factorize(A, cfg)
    assert r1.U == r2.U and r1.V == r2.V
    assert np.array_equal(r1.U_relaxed, r2.U_relaxed)
    strip = lambda r: [(x.lambda_t, x.relaxed_objective, x.rounded_loss, x.boolean_gap, x.bit_flips)
                       for x in r.trace.records]
    assert strip(r1) == strip(r2)


def test_objective_monotone_under_constant_regularization():
    # the iterates descend the objective whose l2 weight matches the prox, lam/2
    for seed in range(5):
        A, _, _ = generate(GenConfig(30, 25, 3, (4, 9), (4, 9), 0.1, False, seed))
        objs = []
        cfg = ElbmfConfig(rank=3, kappa=0.05, lam=0.2, rate_base=1.0, max_iters=200, seed=seed)
        c = RegCoeffs(0.05, 0.1)
        factorize(A, cfg, callback=lambda t, U, V: objs.append(
            relaxed_objective(A.astype(float), U, V, c, 0.1)))
        assert np.max(np.diff(objs)) <= 1e-9


def test_trace_csv_roundtrip():
    A, _, _ = generate(GenConfig(20, 15, 2, (3, 6), (3, 6), 0.1, False, seed=2))
    res = factorize(A, ElbmfConfig(rank=2, max_iters=40))
    text = res.trace.to_csv()
    assert text.splitlines()[0] == "iter,lambda_t,relaxed_objective,rounded_loss,boolean_gap,bit_flips,cumulative_flips,seconds"
    import io
    back = IterationTrace.from_csv(io.StringIO(text))
    assert len(back) == res.n_iter
    assert back.to_csv() == text

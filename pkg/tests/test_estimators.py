import numpy as np
import pytest

from hsfcqmc.estimators import (EstimatorConfig, derive_seed, dnet_estimate, grid_estimate,
                                grid_points, hsfc_estimate, hsfc_points, mc_estimate, replicate,
                                replication_seed)
from hsfcqmc.hilbert import encode_bits, sampling_level
from hsfcqmc.integrands import get_integrand, make_constant, make_f1, make_linear
from hsfcqmc.stats import empirical_variance

from oracles import hsfc_exact_variance_f1


def variance(fn, R, seed0=0):
    return np.var([fn(replication_seed(seed0, r)) for r in range(R)], ddof=1)


@pytest.mark.parametrize("est,size", [(mc_estimate, 64), (grid_estimate, 4), (hsfc_estimate, 6),
                                      (dnet_estimate, 6)])
def test_constant_exact(est, size):
    f = make_constant(3, 2.5)
    assert est(f, size, seed=1) == pytest.approx(2.5, abs=1e-15)


def test_mc_f3_mean_and_variance():
    f = get_integrand("f3", 2)
    assert abs(mc_estimate(f, 10**4, 3) - 0.5) < 4 * 0.5 / 100
    n = 256
    v = variance(lambda s: mc_estimate(f, n, s), 2000)
    assert v == pytest.approx(1 / (4 * n), rel=0.15)


def test_grid_points_one_per_cell():
    P = grid_points(3, 4, seed=0)
    cells = np.floor(P * 4).astype(int)
    assert len({tuple(c) for c in cells.tolist()}) == 64


def test_grid_linear_d1_variance():
    n = 32
    f = make_linear(1, slope=3.0)
    v = variance(lambda s: grid_estimate(f, n, s), 4000)
    assert v == pytest.approx(9 / (12 * n**3), rel=0.10)


def test_grid_f1_limit_small():
    f = make_f1(2)
    m_axis = 16
    n = m_axis**2
    v = variance(lambda s: grid_estimate(f, m_axis, s), 2000)
    assert n**2 * v == pytest.approx(2.0, rel=0.15)


def test_hsfc_points_one_per_stratum():
    d, m = 2, 6
    K = sampling_level(m, d)
    P = hsfc_points(d, m, seed=4, K=K)
    # recover each point's level-K cell, then its stratum from the cell's curve position
    bits = encode_bits(np.floor(P * 2**K).astype(np.int64), K)
    strata = bits[:, :m] @ (1 << np.arange(m - 1, -1, -1))
    assert np.array_equal(np.sort(strata), np.arange(2**m))


@pytest.mark.parametrize("kind", ["nested", "linear"])
def test_hsfc_f3_unbiased(kind):
    f = get_integrand("f3", 2)
    est = np.array([hsfc_estimate(f, 6, kind, replication_seed(1, r)) for r in range(2000)])
    assert abs(est.mean() - 0.5) < 4 * est.std(ddof=1) / np.sqrt(2000)


@pytest.mark.parametrize("d,m", [(2, 6), (2, 9), (3, 6), (8, 10)])
def test_hsfc_variance_matches_cell_oracle(d, m):
    f = make_f1(d)
    R = 2000
    v = variance(lambda s: hsfc_estimate(f, m, "nested", s), R, seed0=d * 100 + m)
    exact = hsfc_exact_variance_f1(d, m)
    # relative sd of a variance estimate is about sqrt(2/R) for near-normal estimates
    assert v == pytest.approx(exact, rel=5 * np.sqrt(2 / R))


@pytest.mark.parametrize("m", range(6, 13))
def test_hsfc_sandwich(m):
    f = make_f1(2)
    n = 2**m
    v = variance(lambda s: hsfc_estimate(f, m, "nested", s), 300, seed0=m)
    assert n**-2 / 32 <= v <= 2880 * n**-2


def test_dnet_beats_mc_paired():
    f = make_f1(2)
    m = 10
    dn = [dnet_estimate(f, m, "nested", replication_seed(5, r)) for r in range(300)]
    mc = [mc_estimate(f, 2**m, replication_seed(5, r)) for r in range(300)]
    assert np.var(dn, ddof=1) < np.var(mc, ddof=1)


def test_dnet_f3_unbiased():
    f = get_integrand("f3", 2)
    est = np.array([dnet_estimate(f, 6, "linear", replication_seed(2, r)) for r in range(2000)])
    assert abs(est.mean() - 0.5) < 4 * est.std(ddof=1) / np.sqrt(2000)


def test_config_validation():
    with pytest.raises(ValueError):
        EstimatorConfig("qmc", "f1", 2, 4)
    with pytest.raises(ValueError):
        EstimatorConfig("hsfc", "f1", 2, 4, scramble="owen")
    with pytest.raises(ValueError):
        EstimatorConfig("mc", "f1", 2, 0)
    with pytest.raises(ValueError):
        EstimatorConfig("dnet", "f1", 2, 40)
    assert EstimatorConfig("grid", "f1", 3, 4).n == 64
    assert EstimatorConfig("hsfc", "f1", 3, 4).n == 16
    assert EstimatorConfig("mc", "f1", 3, 7).n == 7


def test_replicate_determinism_and_jobs():
    cfg = EstimatorConfig("hsfc", "f1", 3, 6, seed=42)
    a = replicate(cfg, 12)
    b = replicate(cfg, 12)
    c = replicate(cfg, 12, jobs=3)
    assert np.array_equal(a.estimates, b.estimates)
    assert np.array_equal(a.estimates, c.estimates)
    assert len(set(a.seeds)) == 12
    assert a.R == 12 and a.to_dict()["config"]["method"] == "hsfc"


def test_replicate_constant():
    rs = replicate(EstimatorConfig("mc", "constant", 2, 10), 2)
    assert rs.estimates[0] == rs.estimates[1]
    assert empirical_variance(rs) == 0
    with pytest.raises(ValueError):
        replicate(EstimatorConfig("mc", "constant", 2, 10), 1)


def test_seed_derivation():
    assert derive_seed(1, "a", 2) == derive_seed(1, "a", 2)
    assert derive_seed(1, "a", 2) != derive_seed(1, "a", 3)
    assert 0 <= derive_seed(0) < 2**64

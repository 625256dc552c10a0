import math

import numpy as np
import pytest
from scipy.special import ndtri
from scipy.stats import kstest

from epsgames.distributions import Exponential, Gaussian, Pareto, Uniform
from epsgames.games import GameShape, decode
from epsgames.generators import (InteractionGraph,
                                 NotPositiveSemidefiniteError,
                                 constant_correlation, gen_copula, gen_iid,
                                 gen_network, is_alpha_expander,
                                 is_well_connected, semidefinite_cholesky,
                                 validate_correlation)


def random_psd_correlation(rng, n):
    a = rng.standard_normal((n, n + 2))
    cov = a @ a.T
    d = np.sqrt(np.diag(cov))
    corr = cov / np.outer(d, d)
    np.fill_diagonal(corr, 1.0)
    return corr


# ---------------------------------------------------------------- gen_iid

def test_iid_support_and_distinctness():
    game = gen_iid((2, 2), Uniform(0, 1), 7, 0)
    u = game.utilities
    assert u.shape == (2, 4)
    assert np.all((u > 0) & (u < 1))
    assert len(np.unique(u)) == u.size


def test_iid_determinism_and_index_independence():
    g1 = gen_iid((3, 2), Uniform(0, 1), 7, 5)
    g2 = gen_iid((3, 2), Uniform(0, 1), 7, 5)
    assert np.array_equal(g1.utilities, g2.utilities)
    g3 = gen_iid((3, 2), Uniform(0, 1), 7, 6)
    assert not np.array_equal(g1.utilities, g3.utilities)
    g4 = gen_iid((3, 2), Uniform(0, 1), 8, 5)
    assert not np.array_equal(g1.utilities, g4.utilities)


def test_iid_generation_order_is_irrelevant():
    games = {i: gen_iid((2, 2), Gaussian(0, 1), 3, i) for i in (2, 0, 1)}
    again = {i: gen_iid((2, 2), Gaussian(0, 1), 3, i) for i in (0, 1, 2)}
    for i in (0, 1, 2):
        assert np.array_equal(games[i].utilities, again[i].utilities)


def test_iid_pooled_ks():
    pooled = np.concatenate([
        gen_iid((2, 2), Uniform(0, 1), 99, g).utilities.ravel()
        for g in range(12_500)
    ])
    stat = kstest(pooled, Uniform(0, 1).cdf).statistic
    assert stat <= 1.95 / math.sqrt(pooled.size)


# ------------------------------------------------------------- gen_copula

def test_copula_identity_is_bitwise_iid():
    for spec in (Uniform(0, 1), Exponential(1), Pareto(1, 2)):
        iid = gen_iid((2, 3, 2), spec, 11, 4)
        cop = gen_copula((2, 3, 2), spec, np.eye(3), 11, 4)
        assert np.array_equal(iid.utilities, cop.utilities)


def test_copula_perfect_negative_is_constant_sum():
    delta = constant_correlation(2, -1.0)
    game = gen_copula((5, 4), Uniform(0, 1), delta, 13, 2)
    s = game.utilities[0] + game.utilities[1]
    assert np.all(s == 1.0)


def test_copula_perfect_positive_is_common_interest():
    delta = constant_correlation(3, 1.0)
    game = gen_copula((2, 2, 2), Uniform(0, 1), delta, 17, 0)
    assert np.array_equal(game.utilities[0], game.utilities[1])
    assert np.array_equal(game.utilities[0], game.utilities[2])


def test_copula_marginals_ks():
    rng = np.random.default_rng(0)
    delta = random_psd_correlation(rng, 2)
    game = gen_copula((317, 317), Uniform(0, 1), delta, 23, 0)
    crit = 1.95 / math.sqrt(game.shape.num_profiles)
    for i in range(2):
        stat = kstest(game.utilities[i], Uniform(0, 1).cdf).statistic
        assert stat <= crit


def test_copula_correlation_recovery():
    spec = Exponential(1.0)
    for target in (-0.8, -0.3, 0.4, 0.9):
        delta = constant_correlation(2, target)
        game = gen_copula((317, 317), spec, delta, 29, 1)
        z0 = ndtri(spec.cdf(game.utilities[0]))
        z1 = ndtri(spec.cdf(game.utilities[1]))
        r = np.corrcoef(z0, z1)[0, 1]
        assert abs(r - target) <= 0.02


def test_copula_validation_errors():
    with pytest.raises(ValueError):
        validate_correlation(np.eye(3), 2)
    bad_diag = np.array([[1.0, 0.0], [0.0, 0.9]])
    with pytest.raises(ValueError):
        validate_correlation(bad_diag, 2)
    asym = np.array([[1.0, 0.5], [0.4, 1.0]])
    with pytest.raises(ValueError):
        validate_correlation(asym, 2)
    out_of_range = np.array([[1.0, 1.5], [1.5, 1.0]])
    with pytest.raises(ValueError):
        validate_correlation(out_of_range, 2)
    non_psd = np.array([[1.0, 0.9, -0.9], [0.9, 1.0, 0.9], [-0.9, 0.9, 1.0]])
    with pytest.raises(NotPositiveSemidefiniteError):
        validate_correlation(non_psd, 3)


def test_semidefinite_cholesky_clamps_exact_extremes():
    L = semidefinite_cholesky(np.array([[1.0, -1.0], [-1.0, 1.0]]))
    assert np.array_equal(L, np.array([[1.0, 0.0], [-1.0, 0.0]]))
    L3 = semidefinite_cholesky(constant_correlation(3, 1.0))
    assert np.array_equal(L3[:, 0], np.ones(3))
    assert np.all(L3[:, 1:] == 0.0)
    full = random_psd_correlation(np.random.default_rng(1), 4)
    L4 = semidefinite_cholesky(full)
    assert np.allclose(L4 @ L4.T, full, atol=1e-12)


# ------------------------------------------------------------ gen_network

def test_network_complete_graph_is_bitwise_iid():
    for shape in ((2, 2), (3, 2, 2), (2, 3, 4)):
        n = len(shape)
        iid = gen_iid(shape, Uniform(0, 1), 31, 9)
        net = gen_network(shape, InteractionGraph.complete(n), Uniform(0, 1), 31, 9)
        assert np.array_equal(iid.utilities, net.utilities)


def test_network_isolated_vertex_depends_on_own_action_only():
    graph = InteractionGraph(3, [(0, 1)])  # vertex 2 isolated
    game = gen_network((2, 2, 2), graph, Uniform(0, 1), 37, 0)
    shape = game.shape
    for flat in range(shape.num_profiles):
        a = decode(shape, flat)
        ref = next(f for f in range(shape.num_profiles)
                   if decode(shape, f)[2] == a[2]
                   and decode(shape, f)[0] == 0 and decode(shape, f)[1] == 0)
        assert game.utilities[2, flat] == game.utilities[2, ref]


def test_network_cycle_lifting():
    graph = InteractionGraph.cycle(4)
    game = gen_network((2, 2, 2, 2), graph, Uniform(0, 1), 41, 3)
    shape = game.shape
    # agent 1's neighbourhood on the 4-cycle is {0, 1, 2}
    for flat in range(shape.num_profiles):
        a = decode(shape, flat)
        for flat2 in range(shape.num_profiles):
            b = decode(shape, flat2)
            if (a[0], a[1], a[2]) == (b[0], b[1], b[2]):
                assert game.utilities[1, flat] == game.utilities[1, flat2]


def test_network_lifting_random_graphs():
    rng = np.random.default_rng(4)
    for trial in range(200):
        n = int(rng.integers(2, 5))
        shape = GameShape(tuple(int(c) for c in rng.integers(2, 4, size=n)))
        edges = [(i, j) for i in range(n) for j in range(i + 1, n)
                 if rng.random() < 0.5]
        graph = InteractionGraph(n, edges)
        game = gen_network(shape, graph, Uniform(0, 1), 1000 + trial, 0)
        flats = np.arange(shape.num_profiles)
        for i in range(n):
            members = sorted(set(graph.neighbors(i)) | {i})
            key_cols = np.stack([
                (flats // shape.strides[j]) % shape.action_counts[j]
                for j in members
            ])
            _, inverse = np.unique(key_cols, axis=1, return_inverse=True)
            for group in range(inverse.max() + 1):
                vals = game.utilities[i][inverse == group]
                assert np.all(vals == vals[0])


def test_network_size_mismatch():
    with pytest.raises(ValueError):
        gen_network((2, 2), InteractionGraph.complete(3), Uniform(0, 1), 1, 0)


# ------------------------------------------------------- graphs and files

def test_graph_text_roundtrip(tmp_path):
    graph = InteractionGraph(5, [(0, 1), (1, 2), (3, 4)])
    path = tmp_path / "g.txt"
    graph.save(path)
    text = path.read_text()
    assert text.splitlines()[0] == "n 5"
    back = InteractionGraph.load(path)
    assert back.n == 5
    assert back.edges() == graph.edges()


def test_graph_validation():
    with pytest.raises(ValueError):
        InteractionGraph(3, [(0, 0)])
    with pytest.raises(ValueError):
        InteractionGraph(3, [(0, 5)])
    with pytest.raises(ValueError):
        InteractionGraph.parse("1 2\n")
    with pytest.raises(ValueError):
        InteractionGraph.parse("")


# -------------------------------------------------------------- expanders

def test_expander_complete_and_cycle():
    assert is_alpha_expander(InteractionGraph.complete(8), 4.0) is True
    assert is_alpha_expander(InteractionGraph.cycle(8), 4.0) is False


def test_well_connected_examples():
    assert is_well_connected(InteractionGraph.complete(16), 1.0) is True
    assert is_well_connected(InteractionGraph.cycle(16), 1.0) is False


def test_tiny_alpha_reduces_to_no_isolated_vertex():
    n = 8
    c = 1.0 / (n * math.log(n))  # alpha * n <= 1
    with_isolated = InteractionGraph(n, [(i, i + 1) for i in range(n - 2)])
    without = InteractionGraph(n, [(i, (i + 1) % n) for i in range(n)])
    assert is_well_connected(with_isolated, c) is False
    assert is_well_connected(without, c) is True


def test_expander_guardrails():
    with pytest.raises(ValueError):
        is_alpha_expander(InteractionGraph.complete(25), 2.0)
    with pytest.raises(ValueError):
        is_alpha_expander(InteractionGraph.complete(4), 0.0)

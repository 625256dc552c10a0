import math

import numpy as np
import pytest

import epsgames.montecarlo as mc
from epsgames.distributions import Uniform
from epsgames.equilibria import analyze
from epsgames.games import GameShape
from epsgames.generators import constant_correlation, gen_copula, gen_iid
from epsgames.montecarlo import (CopulaMeasure, ExperimentConfig, IIDMeasure,
                                 NetworkMeasure, ShareEstimate, cell_counts,
                                 cell_exists, estimate_share, fig1_csv,
                                 share_csv, thm_check, wilson_interval)


def test_wilson_basic_properties():
    lo, hi = wilson_interval(0, 10)
    assert lo == 0.0 and 0 < hi < 0.35
    lo, hi = wilson_interval(10, 10)
    assert hi == 1.0 and 0.65 < lo < 1
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    with pytest.raises(ValueError):
        wilson_interval(5, 0)
    with pytest.raises(ValueError):
        wilson_interval(11, 10)


def test_wilson_coverage():
    r = np.random.default_rng(21)
    n = 150
    covered = 0
    trials = 1000
    for _ in range(trials):
        p = r.uniform(0.05, 0.95)
        s = r.binomial(n, p)
        lo, hi = wilson_interval(int(s), n)
        covered += lo <= p <= hi
    assert 0.93 <= covered / trials <= 0.97


def test_cell_counts_match_per_game_analysis():
    spec = Uniform(0, 1)
    eps = [0.0, 0.3]
    nash, eps_c, star_c = cell_counts((2, 3), spec, eps, 5, 20)
    for g in range(20):
        game = gen_iid((2, 3), spec, 5, g)
        for ei, e in enumerate(eps):
            rep = analyze(game, e)
            assert (int(nash[g]), int(eps_c[g, ei]), int(star_c[g, ei])) == rep.counts()


def test_cell_counts_thread_determinism():
    spec = Uniform(0, 1)
    runs = [cell_counts((2, 2, 2), spec, [0.05], 9, 3000, threads=t)
            for t in (1, 2, 5)]
    for other in runs[1:]:
        for a, b in zip(runs[0], other):
            assert np.array_equal(a, b)


def test_cell_exists_matches_counts():
    spec = Uniform(0, 1)
    nash, eps_c, star_c = cell_counts((2, 2, 3), spec, [0.2], 31, 200)
    found = cell_exists((2, 2, 3), spec, 0.2, 31, 200)
    assert np.array_equal(found["nash"], nash >= 1)
    assert np.array_equal(found["eps"], eps_c[:, 0] >= 1)
    assert np.array_equal(found["eps_star"], star_c[:, 0] >= 1)


def test_cell_exists_beyond_materialization():
    # 22 agents x 2 actions: far past the dense cap, eps = 1 makes every
    # profile an eps-witness so the scan exits on its first chunk
    spec = Uniform(0, 1)
    found = cell_exists((2,) * 22, spec, 1.0, 3, 8, targets=("eps", "eps_star"))
    assert bool(found["eps"].all())
    assert bool(found["eps_star"].all())


def test_estimate_share_rows_and_refinement():
    config = ExperimentConfig(
        shapes=((2, 2), (2, 2, 2)),
        dist=Uniform(0, 1),
        epsilons=(0.0, 0.05, 0.3),
        replications=2000,
        master_seed=12,
    )
    rows = estimate_share(config)
    assert len(rows) == 2 * 3 * 3
    by_key = {(r.shape, r.epsilon, r.target): r for r in rows}
    for shape in config.shapes:
        shares = {}
        for e in config.epsilons:
            for t in config.targets:
                r = by_key[(shape, e, t)]
                lo, hi = r.ci
                assert 0.0 <= lo <= r.share <= hi <= 1.0
                shares[(e, t)] = r.successes
            assert (shares[(e, "nash")] <= shares[(e, "eps_star")]
                    <= shares[(e, "eps")])
        for t in config.targets:
            vals = [shares[(e, t)] for e in config.epsilons]
            if t != "nash":
                assert vals == sorted(vals)
        # nash successes identical across epsilon columns
        assert len({shares[(e, "nash")] for e in config.epsilons}) == 1
        # epsilon = 0 collapse
        assert shares[(0.0, "nash")] == shares[(0.0, "eps")] == shares[(0.0, "eps_star")]


def test_estimate_share_thread_and_csv_determinism():
    config = ExperimentConfig(
        shapes=((2, 2, 2),), dist=Uniform(0, 1), epsilons=(0.05,),
        replications=4000, master_seed=77,
    )
    texts = {share_csv(estimate_share(config, threads=t)) for t in (1, 2, 8)}
    assert len(texts) == 1


def test_estimate_share_full_counts_mean():
    # expected number of pure NE is exactly 1 for any shape under iid draws
    config = ExperimentConfig(
        shapes=((2, 2),), dist=Uniform(0, 1), epsilons=(0.0,),
        replications=4000, master_seed=3, targets=("nash",),
    )
    (row,) = estimate_share(config, full_counts=True)
    assert row.mean_count == pytest.approx(1.0, abs=0.05)
    text = share_csv([row], full_counts=True)
    assert text.splitlines()[0].endswith(",mean_count")


def test_full_counts_refused_beyond_cap():
    config = ExperimentConfig(
        shapes=((2,) * 22,), dist=Uniform(0, 1), epsilons=(1.0,),
        replications=2, master_seed=3, targets=("eps",),
    )
    with pytest.raises(ValueError):
        estimate_share(config, full_counts=True)


def test_copula_identity_measure_equals_iid():
    base = ExperimentConfig(
        shapes=((2, 2),), dist=Uniform(0, 1), epsilons=(0.1,),
        replications=500, master_seed=5,
    )
    ident = ExperimentConfig(
        shapes=((2, 2),), dist=Uniform(0, 1), epsilons=(0.1,),
        replications=500, master_seed=5,
        measure=CopulaMeasure(np.eye(2)),
    )
    assert share_csv(estimate_share(base)) == share_csv(estimate_share(ident))


def test_copula_common_interest_always_has_nash():
    config = ExperimentConfig(
        shapes=((2, 2, 2),), dist=Uniform(0, 1), epsilons=(0.0,),
        replications=200, master_seed=6,
        measure=CopulaMeasure(constant_correlation(3, 1.0)),
        targets=("nash",),
    )
    (row,) = estimate_share(config)
    assert row.successes == row.replications  # common payoff peak is a NE


def test_network_measure_runs():
    from epsgames.generators import InteractionGraph
    config = ExperimentConfig(
        shapes=((2, 2, 2),), dist=Uniform(0, 1), epsilons=(0.05,),
        replications=300, master_seed=8,
        measure=NetworkMeasure(InteractionGraph.cycle(3)),
    )
    rows = estimate_share(config)
    by_target = {r.target: r for r in rows}
    assert (by_target["nash"].successes <= by_target["eps_star"].successes
            <= by_target["eps"].successes)


def test_config_from_json():
    obj = {
        "agents": [2, 3], "actions": [2], "dist": "uniform(0,1)",
        "epsilons": [0.05], "replications": 100, "master_seed": 4,
    }
    config = ExperimentConfig.from_json(obj)
    assert config.shapes == ((2, 2), (2, 2, 2))
    assert isinstance(config.measure, IIDMeasure)
    obj2 = {
        "shapes": [[2, 3]], "dist": "exponential(1)", "epsilons": [0.1],
        "measure": {"kind": "copula", "constant": 0.5},
    }
    config2 = ExperimentConfig.from_json(obj2)
    assert isinstance(config2.measure, CopulaMeasure)
    obj3 = {
        "shapes": [[2, 2, 2]], "dist": "uniform(0,1)",
        "measure": {"kind": "network", "n": 3, "edges": [[0, 1], [1, 2]]},
    }
    config3 = ExperimentConfig.from_json(obj3)
    assert isinstance(config3.measure, NetworkMeasure)
    with pytest.raises(ValueError):
        ExperimentConfig.from_json({"dist": "uniform(0,1)"})
    with pytest.raises(ValueError):
        ExperimentConfig.from_json({"shapes": [[2, 2]], "dist": "uniform(0,1)",
                                    "targets": ["nashish"]})
    with pytest.raises(ValueError):
        ExperimentConfig.from_json({"shapes": [[2, 2]], "dist": "uniform(0,1)",
                                    "measure": {"kind": "mystery"}})


def test_replications_one_degenerate():
    config = ExperimentConfig(
        shapes=((2, 2),), dist=Uniform(0, 1), epsilons=(0.0,),
        replications=1, master_seed=9, targets=("nash",),
    )
    (row,) = estimate_share(config)
    assert row.share in (0.0, 1.0)
    lo, hi = row.ci
    assert 0.0 <= lo <= row.share <= hi <= 1.0


def test_fig1_csv_layout():
    rows = [("a", 2, 2, 8731, 10000), ("b", 2, 2, 9164, 10000)]
    text = fig1_csv(rows)
    lines = text.splitlines()
    assert lines[0] == "panel,actions,agents,share,ci_low,ci_high"
    assert lines[1].startswith("a,2,2,0.8731,")


def test_thm_check_no_violation_small():
    config = ExperimentConfig(
        shapes=((2, 2), (8, 8, 8, 8)), dist=Uniform(0, 1), epsilons=(0.01,),
        replications=3000, master_seed=13,
    )
    verdicts, violation = thm_check(config, threads=2)
    assert not violation
    entries = {tuple(v["shape"]): v for v in verdicts}
    assert not entries[(2, 2)]["poisson"]  # bound far above 0.3 there
    quad_cell = entries[(8, 8, 8, 8)]
    assert quad_cell["poisson"], "informative bound expected at (8,8,8,8)"
    for chk in quad_cell["poisson"]:
        assert not chk["violation"], chk


def test_share_estimate_labels():
    r = ShareEstimate(shape=(40, 40, 2), epsilon=0.5, target="eps",
                      successes=5, replications=10)
    assert r.agents == 3
    assert r.actions_label == "40x40x2"
    r2 = ShareEstimate(shape=(3, 3), epsilon=0.0, target="nash",
                       successes=5, replications=10)
    assert r2.actions_label == "3"

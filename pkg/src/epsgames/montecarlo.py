"""Seeded Monte Carlo estimation of equilibrium-existence shares.

Replicates are embarrassingly parallel: game r of a cell is a pure function
of (master_seed, r), chunks of replicates are farmed out to worker threads
(the counting kernels release the GIL), and per-chunk integer tallies are
summed by chunk index, so output bytes never depend on the thread count.

Cells whose utility tensors fit the desk-scale cap are counted exactly with
the dense kernel; far larger i.i.d. cells fall back to an exact existence
scan that never materializes the game.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, rng
from .distributions import Distribution, Uniform, parse_distribution
from .equilibria import deviation_tensor
from .games import ENTRY_LIMIT, GameShape, shape_of
from .generators import InteractionGraph, gen_copula, gen_network, validate_correlation
from .theory import TheoryReport, poisson_tail, theory_report

__all__ = [
    "IIDMeasure",
    "CopulaMeasure",
    "NetworkMeasure",
    "ExperimentConfig",
    "ShareEstimate",
    "wilson_interval",
    "cell_counts",
    "cell_exists",
    "estimate_share",
    "fig1_suite",
    "fig1_csv",
    "share_csv",
    "thm_check",
    "FIG1_GRID",
]

_Z95 = 1.959963984540054
# Above this many tensor entries per game the dense counting kernel yields
# to the existence scan (i.i.d. measure only).
DENSE_MAX_ENTRIES = 2 ** 24
_SCAN_CHUNK = 2 ** 18
TARGETS = ("nash", "eps", "eps_star")

FIG1_GRID = {2: tuple(range(2, 14)), 3: tuple(range(2, 11)),
             4: tuple(range(2, 8)), 5: tuple(range(2, 7))}


def wilson_interval(successes: int, n: int, z: float = _Z95) -> tuple[float, float]:
    """Wilson score interval; well behaved for shares at 0 or 1."""
    if n < 1:
        raise ValueError("need at least one trial")
    if not 0 <= successes <= n:
        raise ValueError("successes out of range")
    phat = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom
    # rounding must never push the interval off the point estimate
    return max(0.0, min(center - half, phat)), min(1.0, max(center + half, phat))


@dataclass(frozen=True)
class IIDMeasure:
    kind: str = "iid"


@dataclass(frozen=True)
class CopulaMeasure:
    delta: np.ndarray
    kind: str = "copula"


@dataclass(frozen=True)
class NetworkMeasure:
    graph: InteractionGraph
    kind: str = "network"


@dataclass(frozen=True)
class ExperimentConfig:
    shapes: tuple[tuple[int, ...], ...]
    dist: Distribution
    epsilons: tuple[float, ...]
    replications: int = 10_000
    master_seed: int = 0
    measure: object = field(default_factory=IIDMeasure)
    targets: tuple[str, ...] = TARGETS

    def __post_init__(self):
        if self.replications < 1:
            raise ValueError("replications must be >= 1")
        if not self.shapes:
            raise ValueError("no cells configured")
        for s in self.shapes:
            shape_of(s)  # validates
        for e in self.epsilons:
            if e < 0:
                raise ValueError("epsilon must be nonnegative")
        bad = [t for t in self.targets if t not in TARGETS]
        if bad:
            raise ValueError(f"unknown targets: {bad}")

    @classmethod
    def from_json(cls, obj: dict, base_dir: str = ".") -> "ExperimentConfig":
        if "shapes" in obj:
            shapes = tuple(tuple(int(c) for c in s) for s in obj["shapes"])
        elif "agents" in obj and "actions" in obj:
            shapes = tuple((int(k),) * int(n)
                           for k in obj["actions"] for n in obj["agents"])
        else:
            raise ValueError("config needs either 'shapes' or 'agents'+'actions'")
        dist = parse_distribution(obj["dist"])
        eps = tuple(float(e) for e in obj.get("epsilons", [0.0]))
        measure_obj = obj.get("measure", {"kind": "iid"})
        kind = measure_obj.get("kind", "iid")
        if kind == "iid":
            measure = IIDMeasure()
        elif kind == "copula":
            n = len(shapes[0])
            if any(len(s) != n for s in shapes):
                raise ValueError("copula cells must share one agent count")
            if "delta" in measure_obj:
                d = np.asarray(measure_obj["delta"], dtype=np.float64)
            elif "constant" in measure_obj:
                d = np.full((n, n), float(measure_obj["constant"]))
                np.fill_diagonal(d, 1.0)
            else:
                raise ValueError("copula measure needs 'delta' or 'constant'")
            measure = CopulaMeasure(validate_correlation(d, n))
        elif kind == "network":
            if "graph_file" in measure_obj:
                import os
                path = measure_obj["graph_file"]
                if not os.path.isabs(path):
                    path = os.path.join(base_dir, path)
                graph = InteractionGraph.load(path)
            elif "edges" in measure_obj and "n" in measure_obj:
                graph = InteractionGraph(int(measure_obj["n"]), measure_obj["edges"])
            else:
                raise ValueError("network measure needs 'graph_file' or 'edges'+'n'")
            measure = NetworkMeasure(graph)
        else:
            raise ValueError(f"unknown measure kind {kind!r}")
        return cls(
            shapes=shapes,
            dist=dist,
            epsilons=eps,
            replications=int(obj.get("replications", 10_000)),
            master_seed=int(obj.get("master_seed", 0)),
            measure=measure,
            targets=tuple(obj.get("targets", TARGETS)),
        )


@dataclass(frozen=True)
class ShareEstimate:
    shape: tuple[int, ...]
    epsilon: float
    target: str
    successes: int
    replications: int
    mean_count: float | None = None

    @property
    def share(self) -> float:
        return self.successes / self.replications

    @property
    def ci(self) -> tuple[float, float]:
        return wilson_interval(self.successes, self.replications)

    @property
    def agents(self) -> int:
        return len(self.shape)

    @property
    def actions_label(self) -> str:
        if len(set(self.shape)) == 1:
            return str(self.shape[0])
        return "x".join(str(c) for c in self.shape)


def _fam_params(spec: Distribution):
    return spec._fam, spec._p0, spec._p1


def _map_chunks(worker, chunks, threads: int):
    if threads <= 1 or len(chunks) <= 1:
        return [worker(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, chunks))


def _dense_chunk_size(shape: GameShape) -> int:
    return max(1, 2 ** 22 // max(1, shape.num_entries))


def cell_counts(shape, spec: Distribution, epsilons, master_seed: int,
                replications: int, threads: int = 1):
    """Exact per-game equilibrium counts for an i.i.d. cell.

    Returns (nash, eps, eps_star): nash of length R, the others (R, len(eps)).
    """
    shape = shape_of(shape)
    if shape.num_entries > DENSE_MAX_ENTRIES:
        raise ValueError(
            f"cell {shape.action_counts} exceeds the dense counting cap; "
            "only existence estimates are available at this size"
        )
    eps_arr = np.asarray(sorted(set(float(e) for e in epsilons)), dtype=np.float64)
    if eps_arr.size == 0:
        eps_arr = np.asarray([0.0])
    order = {float(e): i for i, e in enumerate(eps_arr)}
    fam, p0, p1 = _fam_params(spec)
    dims = shape.dims_array()
    strides = shape.strides_array()
    root = np.uint64(rng.stream_root(master_seed))
    K = eps_arr.size
    nash = np.zeros(replications, np.int64)
    eps_c = np.zeros((replications, K), np.int64)
    star_c = np.zeros((replications, K), np.int64)
    step = _dense_chunk_size(shape)
    chunks = [(g, min(g + step, replications)) for g in range(0, replications, step)]

    def worker(bounds):
        g0, g1 = bounds
        out_n = np.zeros(g1 - g0, np.int64)
        out_e = np.zeros((g1 - g0, K), np.int64)
        out_s = np.zeros((g1 - g0, K), np.int64)
        _kernels.count_games(root, g0, g1, dims, strides, fam, p0, p1,
                             eps_arr, out_n, out_e, out_s)
        return g0, out_n, out_e, out_s

    for g0, out_n, out_e, out_s in _map_chunks(worker, chunks, threads):
        nash[g0:g0 + out_n.size] = out_n
        eps_c[g0:g0 + out_n.size] = out_e
        star_c[g0:g0 + out_n.size] = out_s

    cols = [order[float(e)] for e in epsilons]
    return nash, eps_c[:, cols], star_c[:, cols]


def cell_exists(shape, spec: Distribution, epsilon: float, master_seed: int,
                replications: int, targets=TARGETS, threads: int = 1):
    """Existence flags per game via the early-exit scan (i.i.d. only).

    Returns a dict target -> bool array of length R for the requested
    targets; works far beyond the materialization cap.
    """
    shape = shape_of(shape)
    fam, p0, p1 = _fam_params(spec)
    dims = shape.dims_array()
    strides = shape.strides_array()
    root = np.uint64(rng.stream_root(master_seed))
    wn = "nash" in targets
    we = "eps" in targets
    ws = "eps_star" in targets
    flags = np.zeros(replications, np.int64)

    def worker(bounds):
        g0, g1 = bounds
        out = np.zeros(g1 - g0, np.int64)
        for g in range(g0, g1):
            out[g - g0] = _kernels.exists_scan(
                root, g, dims, strides, fam, p0, p1, float(epsilon),
                wn, we, ws, _SCAN_CHUNK)
        return g0, out

    step = max(1, min(64, replications // max(1, 4 * threads) or 1))
    chunks = [(g, min(g + step, replications)) for g in range(0, replications, step)]
    for g0, out in _map_chunks(worker, chunks, threads):
        flags[g0:g0 + out.size] = out

    result = {}
    if wn:
        result["nash"] = (flags & 1) > 0
    if we:
        result["eps"] = (flags & 2) > 0
    if ws:
        result["eps_star"] = (flags & 4) > 0
    return result


def _counts_from_game(game, epsilons):
    delta = deviation_tensor(game)
    nonbr = (delta > 0.0).sum(axis=0)
    dmax = delta.max(axis=0)
    nash = int((nonbr == 0).sum())
    eps_counts = []
    star_counts = []
    for e in epsilons:
        within = dmax <= e
        eps_counts.append(int(within.sum()))
        star_counts.append(int((within & (nonbr <= 1)).sum()))
    return nash, eps_counts, star_counts


def _cell_counts_general(shape, config: ExperimentConfig, threads: int):
    shape = shape_of(shape)
    if shape.num_entries > ENTRY_LIMIT:
        raise ValueError(
            f"cell {shape.action_counts} cannot be materialized for the "
            f"{config.measure.kind} measure"
        )
    R = config.replications
    K = len(config.epsilons)
    nash = np.zeros(R, np.int64)
    eps_c = np.zeros((R, K), np.int64)
    star_c = np.zeros((R, K), np.int64)
    measure = config.measure

    def one(g):
        if isinstance(measure, CopulaMeasure):
            game = gen_copula(shape, config.dist, measure.delta,
                              config.master_seed, g)
        else:
            game = gen_network(shape, measure.graph, config.dist,
                               config.master_seed, g)
        return _counts_from_game(game, config.epsilons)

    def worker(bounds):
        g0, g1 = bounds
        return g0, [one(g) for g in range(g0, g1)]

    step = max(1, min(256, R))
    chunks = [(g, min(g + step, R)) for g in range(0, R, step)]
    for g0, results in _map_chunks(worker, chunks, threads):
        for off, (n, ec, sc) in enumerate(results):
            nash[g0 + off] = n
            eps_c[g0 + off] = ec
            star_c[g0 + off] = sc
    return nash, eps_c, star_c


def estimate_share(config: ExperimentConfig, threads: int = 1,
                   full_counts: bool = False) -> list[ShareEstimate]:
    """Share of games admitting each requested equilibrium type, per cell.

    Results are deterministic in (config, master_seed) and independent of
    the thread count.
    """
    rows: list[ShareEstimate] = []
    R = config.replications
    for shape_counts in config.shapes:
        shape = shape_of(shape_counts)
        iid = isinstance(config.measure, IIDMeasure)
        use_dense = shape.num_entries <= DENSE_MAX_ENTRIES
        if not iid or use_dense:
            if iid:
                nash, eps_c, star_c = cell_counts(
                    shape, config.dist, config.epsilons,
                    config.master_seed, R, threads)
            else:
                nash, eps_c, star_c = _cell_counts_general(shape, config, threads)
            for ei, e in enumerate(config.epsilons):
                for target in config.targets:
                    if target == "nash":
                        counts = nash
                    elif target == "eps":
                        counts = eps_c[:, ei]
                    else:
                        counts = star_c[:, ei]
                    rows.append(ShareEstimate(
                        shape=shape.action_counts,
                        epsilon=float(e),
                        target=target,
                        successes=int((counts >= 1).sum()),
                        replications=R,
                        mean_count=float(counts.mean()) if full_counts else None,
                    ))
        else:
            if full_counts:
                raise ValueError(
                    f"cell {shape.action_counts} is beyond the dense cap; "
                    "full counts are unavailable, drop --full-counts"
                )
            for e in config.epsilons:
                found = cell_exists(shape, config.dist, e, config.master_seed,
                                    R, config.targets, threads)
                for target in config.targets:
                    rows.append(ShareEstimate(
                        shape=shape.action_counts,
                        epsilon=float(e),
                        target=target,
                        successes=int(found[target].sum()),
                        replications=R,
                    ))
    return rows


def share_csv(rows: list[ShareEstimate], full_counts: bool = False) -> str:
    out = ["agents,actions,epsilon,target,successes,replications,share,ci_low,ci_high"
           + (",mean_count" if full_counts else "")]
    for r in rows:
        lo, hi = r.ci
        line = (f"{r.agents},{r.actions_label},{r.epsilon!r},{r.target},"
                f"{r.successes},{r.replications},{r.share!r},{lo!r},{hi!r}")
        if full_counts:
            line += f",{'' if r.mean_count is None else repr(r.mean_count)}"
        out.append(line)
    return "\n".join(out) + "\n"


def fig1_suite(master_seed: int, replications: int = 10_000,
               threads: int = 1, dist: Distribution | None = None):
    """Share-versus-agents sweep: pure Nash (panel a) and pure
    eps-equilibrium at eps = 0.05 (panel b) for 2..5 equal actions per
    agent, uniform(0,1) utilities.

    Returns rows (panel, actions, agents, successes, replications); panel b
    reuses panel a's games, which is sound (same measure) and halves cost.
    """
    spec = dist if dist is not None else Uniform(0.0, 1.0)
    cells = {}
    for actions, agent_grid in FIG1_GRID.items():
        for agents in agent_grid:
            shape = (actions,) * agents
            nash, eps_c, _ = cell_counts(shape, spec, (0.05,), master_seed,
                                         replications, threads)
            cells[(actions, agents)] = (
                int((nash >= 1).sum()), int((eps_c[:, 0] >= 1).sum()))
    rows = []
    for panel, pick in (("a", 0), ("b", 1)):
        for actions in sorted(FIG1_GRID):
            for agents in FIG1_GRID[actions]:
                rows.append((panel, actions, agents,
                             cells[(actions, agents)][pick], replications))
    return rows


def fig1_csv(rows) -> str:
    out = ["panel,actions,agents,share,ci_low,ci_high"]
    for panel, actions, agents, successes, reps in rows:
        share = successes / reps
        lo, hi = wilson_interval(successes, reps)
        out.append(f"{panel},{actions},{agents},{share!r},{lo!r},{hi!r}")
    return "\n".join(out) + "\n"


def thm_check(config: ExperimentConfig, threads: int = 1):
    """Compare Monte Carlo estimates against the analytic results.

    Per cell and epsilon: flags a violation when the estimated probability
    that at least one eps-star profile exists falls more than four standard
    errors below the analytic lower bound, and, where the eps-count error
    bound is informative (< 0.3), when a Poisson tail at k = 1..3 is missed
    by more than bound + 4 SE.  Returns (verdicts, any_violation).
    """
    verdicts = []
    violation = False
    R = config.replications
    iid = isinstance(config.measure, IIDMeasure)
    for shape_counts in config.shapes:
        shape = shape_of(shape_counts)
        dense = shape.num_entries <= DENSE_MAX_ENTRIES
        counts = None
        if iid and dense:
            counts = cell_counts(shape, config.dist, config.epsilons,
                                 config.master_seed, R, threads)
        elif not iid:
            counts = _cell_counts_general(shape, config, threads)
        for ei, e in enumerate(config.epsilons):
            report: TheoryReport = theory_report(shape, config.dist, e)
            entry = {
                "shape": shape.action_counts,
                "epsilon": float(e),
                "lambda_eps_star": report.lambda_eps_star,
                "bound_eps_star": report.bound_eps_star,
                "existence_lower_bound": report.existence_lower_bound,
                "poisson": [],
            }
            if counts is not None:
                _, eps_c, star_c = counts
                share_star = float((star_c[:, ei] >= 1).mean())
                if report.bound_eps < 0.3:
                    for kk in (1, 2, 3):
                        pr = float((eps_c[:, ei] >= kk).mean())
                        se = math.sqrt(max(pr * (1 - pr), 1e-12) / R)
                        pred = poisson_tail(report.lambda_eps, kk)
                        bad = abs(pr - pred) > report.bound_eps + 4 * se
                        entry["poisson"].append({
                            "k": kk, "mc": pr, "poisson": pred,
                            "bound": report.bound_eps, "violation": bad,
                        })
                        violation = violation or bad
            else:
                found = cell_exists(shape, config.dist, e, config.master_seed,
                                    R, ("eps_star",), threads)
                share_star = float(found["eps_star"].mean())
            se = math.sqrt(max(share_star * (1 - share_star), 1e-12) / R)
            bad1 = share_star < report.existence_lower_bound - 4 * se
            entry["share_eps_star"] = share_star
            entry["se"] = se
            entry["violation_lower_bound"] = bad1
            violation = violation or bad1
            verdicts.append(entry)
    return verdicts, violation

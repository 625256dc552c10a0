"""Random game generators and interaction graphs.

Three measures over games of a fixed shape:

* i.i.d.     — every utility entry an independent draw from one distribution;
* copula     — entries still have the chosen marginal, but at each profile
               the agents' draws are coupled through a Gaussian copula with
               a given correlation matrix;
* network    — agent i's utility depends only on the actions of i and its
               graph neighbours; values are drawn once per neighbourhood
               profile and lifted.

All three read the same per-game uniform field (see rng.uniform_field), so
the coincidence cases are bit-exact: an identity correlation matrix or a
complete interaction graph reproduces the i.i.d. generator byte for byte.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.special import ndtr

from . import _kernels, rng
from .distributions import Distribution
from .games import Game, GameShape, shape_of

__all__ = [
    "gen_iid",
    "gen_copula",
    "gen_network",
    "InteractionGraph",
    "is_alpha_expander",
    "is_well_connected",
    "semidefinite_cholesky",
    "validate_correlation",
]

_PIVOT_TOL = 1e-12
_RESIDUAL_TOL = 1e-10


class NotPositiveSemidefiniteError(ValueError):
    pass


def semidefinite_cholesky(matrix: np.ndarray, tol: float = _PIVOT_TOL) -> np.ndarray:
    """Lower-triangular factor L with L @ L.T = matrix, allowing exact
    singularity: pivots within `tol` of zero are clamped to zero.  Raises
    NotPositiveSemidefiniteError when a pivot is genuinely negative or a
    clamped column has nonzero residual."""
    a = np.array(matrix, dtype=np.float64)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    L = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - np.dot(L[j, :j], L[j, :j])
        if d > tol:
            L[j, j] = math.sqrt(d)
            for i in range(j + 1, n):
                L[i, j] = (a[i, j] - np.dot(L[i, :j], L[j, :j])) / L[j, j]
        elif d >= -tol:
            L[j, j] = 0.0
            for i in range(j + 1, n):
                r = a[i, j] - np.dot(L[i, :j], L[j, :j])
                if abs(r) > _RESIDUAL_TOL:
                    raise NotPositiveSemidefiniteError(
                        f"matrix is not positive semidefinite (column {j})"
                    )
        else:
            raise NotPositiveSemidefiniteError(
                f"negative pivot {d:.3e} at column {j}"
            )
    return L


def validate_correlation(delta: np.ndarray, num_agents: int) -> np.ndarray:
    """Check a correlation matrix: square of the right size, symmetric,
    unit diagonal, entries in [-1, 1], positive semidefinite."""
    d = np.asarray(delta, dtype=np.float64)
    if d.shape != (num_agents, num_agents):
        raise ValueError(
            f"correlation matrix must be {num_agents}x{num_agents}, got {d.shape}"
        )
    if not np.allclose(d, d.T, atol=1e-12, rtol=0.0):
        raise ValueError("correlation matrix must be symmetric")
    if not np.all(np.diag(d) == 1.0):
        raise ValueError("correlation matrix diagonal must be 1")
    if np.any(np.abs(d) > 1.0):
        raise ValueError("correlation entries must lie in [-1, 1]")
    semidefinite_cholesky(d)  # raises if not PSD
    return d


def constant_correlation(num_agents: int, off_diagonal: float) -> np.ndarray:
    d = np.full((num_agents, num_agents), float(off_diagonal))
    np.fill_diagonal(d, 1.0)
    return d


def gen_iid(shape, spec: Distribution, seed, game_index: int = 0) -> Game:
    """Independent draws for every (agent, profile) entry."""
    shape = shape_of(shape)
    key = rng.as_seed(seed).key(game_index)
    field = rng.uniform_field(key, shape.num_profiles, shape.num_agents)
    utilities = np.empty((shape.num_agents, shape.num_profiles))
    for i in range(shape.num_agents):
        utilities[i] = spec.quantile(np.ascontiguousarray(field[:, i]))
    return Game(shape, utilities)


def _trivial_row(row: np.ndarray) -> tuple[int, float] | None:
    """Detect factor rows that are exactly +-(a standard basis vector)."""
    nz = np.nonzero(row)[0]
    if nz.size == 1 and abs(row[nz[0]]) == 1.0:
        return int(nz[0]), float(row[nz[0]])
    return None


def gen_copula(shape, spec: Distribution, delta, seed, game_index: int = 0) -> Game:
    """Gaussian-copula coupled draws across agents at each profile.

    Rows of the factor equal to +-e_j are applied on the uniform scale
    directly (u or 1 - u), so the degenerate extremes are exact: identity
    correlation is bit-identical to gen_iid, and a -1 pairing with uniform
    marginals yields exactly constant-sum utilities.
    """
    shape = shape_of(shape)
    n = shape.num_agents
    d = validate_correlation(delta, n)
    L = semidefinite_cholesky(d)
    key = rng.as_seed(seed).key(game_index)
    field = rng.uniform_field(key, shape.num_profiles, n)

    coupled = np.empty_like(field)
    rows = [_trivial_row(L[i]) for i in range(n)]
    if any(r is None for r in rows):
        z = _kernels.std_normal_quantile_array(
            np.ascontiguousarray(field.ravel())
        ).reshape(field.shape)
        w = z @ L.T
        coupled[:] = ndtr(w)
    for i, r in enumerate(rows):
        if r is not None:
            j, sign = r
            coupled[:, i] = field[:, j] if sign > 0 else 1.0 - field[:, j]

    utilities = np.empty((n, shape.num_profiles))
    for i in range(n):
        utilities[i] = spec.quantile(np.ascontiguousarray(coupled[:, i]))
    return Game(shape, utilities)


class InteractionGraph:
    """Simple undirected graph on agents 0..n-1, no self-loops."""

    def __init__(self, n: int, edges=()):
        n = int(n)
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        masks = [0] * n
        for i, j in edges:
            i, j = int(i), int(j)
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i},{j}) out of range for n={n}")
            if i == j:
                raise ValueError(f"self-loop at vertex {i} not allowed")
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        self.n = n
        self._masks = masks

    @classmethod
    def complete(cls, n: int) -> "InteractionGraph":
        return cls(n, itertools.combinations(range(n), 2))

    @classmethod
    def cycle(cls, n: int) -> "InteractionGraph":
        if n < 3:
            raise ValueError("cycle needs n >= 3")
        return cls(n, [(i, (i + 1) % n) for i in range(n)])

    @classmethod
    def empty(cls, n: int) -> "InteractionGraph":
        return cls(n)

    def neighbors(self, i: int) -> tuple[int, ...]:
        m = self._masks[i]
        return tuple(j for j in range(self.n) if m >> j & 1)

    def neighborhood_mask(self, i: int) -> int:
        """Open neighborhood as a bitmask (excludes i itself)."""
        return self._masks[i]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in self.neighbors(i) if j > i]

    def degree(self, i: int) -> int:
        return self._masks[i].bit_count()

    @classmethod
    def parse(cls, text: str) -> "InteractionGraph":
        """Edge-list format: header line `n <count>`, then one `i j` per line."""
        lines = [ln.strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln and not ln.startswith("#")]
        if not lines:
            raise ValueError("empty graph file")
        head = lines[0].split()
        if len(head) != 2 or head[0] != "n":
            raise ValueError("graph file must start with a 'n <count>' header")
        n = int(head[1])
        edges = []
        for ln in lines[1:]:
            parts = ln.split()
            if len(parts) != 2:
                raise ValueError(f"bad edge line: {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
        return cls(n, edges)

    def to_text(self) -> str:
        out = [f"n {self.n}"]
        out += [f"{i} {j}" for i, j in self.edges()]
        return "\n".join(out) + "\n"

    @classmethod
    def load(cls, path) -> "InteractionGraph":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.parse(fh.read())

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_text())


def gen_network(shape, graph: InteractionGraph, spec: Distribution,
                seed, game_index: int = 0) -> Game:
    """Draws restricted by an interaction graph: agent i's utility is a
    function of the actions of i and its neighbours only.

    Draw blocks are keyed by the neighbourhood-profile index, so on the
    complete graph every block index equals the full profile index and the
    output is bit-identical to gen_iid.
    """
    shape = shape_of(shape)
    n = shape.num_agents
    if graph.n != n:
        raise ValueError(f"graph has {graph.n} vertices, game has {n} agents")
    key = rng.as_seed(seed).key(game_index)
    flats = np.arange(shape.num_profiles, dtype=np.int64)
    counts = shape.action_counts
    strides = shape.strides
    utilities = np.empty((n, shape.num_profiles))
    for i in range(n):
        members = sorted(set(graph.neighbors(i)) | {i})
        block = np.zeros(shape.num_profiles, dtype=np.int64)
        nb_stride = 1
        for j in members:
            block += ((flats // strides[j]) % counts[j]) * nb_stride
            nb_stride *= counts[j]
        u = rng.uniforms_at(key, block * n + i)
        utilities[i] = spec.quantile(u)
    return Game(shape, utilities)


_EXPANDER_MAX_VERTICES = 24


def is_alpha_expander(graph: InteractionGraph, alpha: float) -> bool:
    """Exhaustive check: every vertex set S with |S| <= ceil(n / alpha) has
    |union of open neighborhoods| >= min(n, alpha * |S|)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    n = graph.n
    if n > _EXPANDER_MAX_VERTICES:
        raise ValueError(
            f"exhaustive expander check limited to {_EXPANDER_MAX_VERTICES} vertices"
        )
    max_size = min(n, math.ceil(n / alpha))
    masks = [graph.neighborhood_mask(i) for i in range(n)]
    for size in range(1, max_size + 1):
        needed = min(float(n), alpha * size)
        for subset in itertools.combinations(range(n), size):
            union = 0
            for i in subset:
                union |= masks[i]
            if union.bit_count() < needed:
                return False
    return True


def is_well_connected(graph: InteractionGraph, c: float) -> bool:
    """True when the graph is a (c * ln n)-expander."""
    if c <= 0:
        raise ValueError("c must be positive")
    if graph.n < 2:
        raise ValueError("well-connectedness needs at least two vertices")
    return is_alpha_expander(graph, c * math.log(graph.n))

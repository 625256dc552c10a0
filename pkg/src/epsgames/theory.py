"""Analytic companions to the Monte Carlo estimates.

The two workhorse probabilities for an agent with k actions and slack eps:

* q(eps, k)  — probability that the agent's utility at a profile is within
  eps of the best it could get on its line: the integral over x of
  F(x + eps)^(k-1) dF(x);
* p(eps, k)  — probability that the agent is *not* best responding and yet
  within eps: q(eps, k) - 1/k.

From these, Poisson intensities for the number of near-stable profiles, the
Chen-Stein total-variation error bounds, a lower bound for the probability
that at least one near-stable profile exists, and the predicted large-action
limit of the eps-equilibrium share, which depends only on the limit of the
hazard rate of the utility distribution.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from scipy.integrate import quad

from .distributions import Distribution
from .games import shape_of

__all__ = [
    "QuadratureError",
    "q_integral",
    "p_integral",
    "poisson_tail",
    "hazard_limit_pair",
    "convergence_table",
    "LimitPrediction",
    "TheoryReport",
    "theory_report",
]

_LARGE_K = 1000
_ONE_MINUS_INV_E = 1.0 - 1.0 / math.e


class QuadratureError(RuntimeError):
    """Raised when the integrator cannot certify the requested accuracy."""


def _check_k_eps(k: int, epsilon: float):
    k = int(k)
    if k < 2:
        raise ValueError("action count k must be >= 2")
    epsilon = float(epsilon)
    if not epsilon >= 0:
        raise ValueError("epsilon must be nonnegative")
    return k, epsilon


def q_integral(spec: Distribution, k: int, epsilon: float) -> float:
    """Probability of being within eps of the line optimum, k actions.

    Evaluated in probability space u = F(x).  For k above 1000 the mass
    concentrates in an O(1/k) layer below u = 1, so the variable is changed
    to z = k (1 - u) and integrated over geometrically growing segments with
    an early cutoff justified by the integrand being decreasing in z.
    """
    k, epsilon = _check_k_eps(k, epsilon)
    if epsilon == 0.0:
        return 1.0 / k

    if k <= _LARGE_K:
        def f(u):
            return spec.cdf(spec.quantile(u) + epsilon) ** (k - 1)

        val, err = quad(f, 0.0, 1.0, epsabs=1e-13, epsrel=1e-13, limit=500)
        if err > 1e-10:
            raise QuadratureError(
                f"q integral did not converge (k={k}, eps={epsilon}, err={err:.2e})"
            )
        return min(max(val, 0.0), 1.0)

    def g(z):
        s = spec.sf(spec.isf(z / k) + epsilon)
        if s >= 1.0:
            return 0.0
        return math.exp((k - 1) * math.log1p(-s))

    total = 0.0
    total_err = 0.0
    left = 0.0
    right = 1.0
    while left < k:
        r = min(right, float(k))
        val, err = quad(g, left, r, epsabs=1e-13, epsrel=1e-12, limit=200)
        total += val
        total_err += err
        if r >= k:
            break
        if g(r) * (k - r) < 1e-16 * max(total, 1e-300):
            break
        left = r
        right *= 2.0
    if total_err > 1e-8 * max(1.0, total):
        raise QuadratureError(
            f"q integral did not converge (k={k}, eps={epsilon}, err={total_err:.2e})"
        )
    return min(max(total / k, 0.0), 1.0)


def p_integral(spec: Distribution, k: int, epsilon: float) -> float:
    """Probability of a near miss: within eps of the line optimum without
    attaining it.  Equals q(eps, k) - 1/k; tiny negative quadrature noise
    is clamped to zero."""
    k, epsilon = _check_k_eps(k, epsilon)
    p = q_integral(spec, k, epsilon) - 1.0 / k
    if p < 0.0:
        if p < -1e-12:
            raise QuadratureError(f"p integral came out negative: {p:.3e}")
        return 0.0
    return p


def poisson_tail(lam: float, k: int) -> float:
    """Pr[Poisson(lam) >= k], with log-space terms for stability."""
    lam = float(lam)
    if not (lam >= 0.0 and math.isfinite(lam)):
        raise ValueError("lambda must be finite and nonnegative")
    k = int(k)
    if k <= 0:
        return 1.0
    if lam == 0.0:
        return 0.0
    loglam = math.log(lam)
    head = math.fsum(
        math.exp(-lam + j * loglam - math.lgamma(j + 1)) for j in range(k)
    )
    if head < 0.5:
        return 1.0 - head
    # deep tail: sum the pmf upward from k instead of subtracting from 1
    term = math.exp(-lam + k * loglam - math.lgamma(k + 1))
    acc = 0.0
    j = k
    while term > acc * 1e-18 + 5e-324 and j < k + 10_000:
        acc += term
        j += 1
        term *= lam / j
    return acc


def hazard_limit_pair(spec: Distribution, epsilon: float, k: int,
                      endpoint: str = "left") -> tuple[float, float]:
    """Convergence-table pair for the large-action regime: the left side is
    k * q(eps, k); the right side exp(eps * h(x_k)) with x_k the (1 - 1/k)
    quantile (or that point plus eps when endpoint='right').  No assertion
    is made here; callers tabulate both sides."""
    k, epsilon = _check_k_eps(k, epsilon)
    if endpoint not in ("left", "right"):
        raise ValueError("endpoint must be 'left' or 'right'")
    if epsilon == 0.0:
        return 1.0, 1.0
    lhs = k * q_integral(spec, k, epsilon)
    x = spec.isf(1.0 / k)
    if endpoint == "right":
        x = x + epsilon
    h = spec.hazard(x)  # raises when the point is outside the support
    exponent = epsilon * h
    rhs = math.inf if exponent > 709.0 else math.exp(exponent)
    return lhs, rhs


def convergence_table(spec: Distribution, epsilon: float, ks,
                      endpoint: str = "left"):
    """Rows (k, lhs, rhs, ratio) for a list of action counts; rhs and ratio
    are NaN where the hazard is undefined at the evaluation point."""
    rows = []
    for k in ks:
        lhs = float(k) * q_integral(spec, int(k), epsilon) if epsilon > 0 else 1.0
        try:
            _, rhs = hazard_limit_pair(spec, epsilon, int(k), endpoint)
            ratio = lhs / rhs if rhs > 0 and math.isfinite(rhs) else math.nan
        except ValueError:
            rhs = math.nan
            ratio = math.nan
        rows.append((int(k), lhs, rhs, ratio))
    return rows


@dataclass(frozen=True)
class LimitPrediction:
    """Predicted large-action limit of the eps-equilibrium share."""

    kind: str  # "one" | "one_minus_inv_e" | "interval"
    bounds: tuple[float, float] | None = None

    @classmethod
    def one(cls):
        return cls("one")

    @classmethod
    def one_minus_inv_e(cls):
        return cls("one_minus_inv_e")

    @classmethod
    def interval(cls):
        return cls("interval", (_ONE_MINUS_INV_E, 1.0))

    def to_json(self):
        if self.kind == "interval":
            return {"kind": self.kind, "bounds": list(self.bounds)}
        return {"kind": self.kind}


@dataclass(frozen=True)
class TheoryReport:
    action_counts: tuple[int, ...]
    epsilon: float
    p: tuple[float, ...]
    q: tuple[float, ...]
    lambda_eps_star: float      # 1 + sum_i |A_i| p_i
    lambda_eps: float           # prod_i |A_i| q_i
    bound_eps_star: float       # 9 (sum |A_i|)^4 / prod |A_i|
    bound_eps: float            # 2 (sum |A_i|^2) prod |A_i| q_i^2
    existence_lower_bound: float
    predicted_limit: LimitPrediction

    def to_json(self) -> dict:
        return {
            "actions": list(self.action_counts),
            "epsilon": self.epsilon,
            "p": list(self.p),
            "q": list(self.q),
            "lambda_eps_star": self.lambda_eps_star,
            "lambda_eps": self.lambda_eps,
            "bound_eps_star": self.bound_eps_star,
            "bound_eps": self.bound_eps,
            "existence_lower_bound": self.existence_lower_bound,
            "predicted_limit": self.predicted_limit.to_json(),
        }


def theory_report(shape, spec: Distribution, epsilon: float) -> TheoryReport:
    """All analytic quantities for one game shape / distribution / eps."""
    shape = shape_of(shape)
    epsilon = float(epsilon)
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    counts = shape.action_counts
    by_k = {k: (p_integral(spec, k, epsilon), q_integral(spec, k, epsilon))
            for k in set(counts)}
    p = tuple(by_k[k][0] for k in counts)
    q = tuple(by_k[k][1] for k in counts)

    lam_star = 1.0 + sum(k * pk for k, pk in zip(counts, p))
    lam_eps = 1.0
    bound_eps = 1.0
    for k, qk in zip(counts, q):
        lam_eps *= k * qk
        bound_eps *= k * qk * qk
    bound_eps *= 2.0 * sum(k * k for k in counts)

    total = sum(counts)
    prod = 1.0
    for k in counts:
        prod *= k
    bound_star = 9.0 * total ** 4 / prod

    lower = max(0.0, 1.0 - math.exp(-lam_star) - bound_star)

    tc = spec.tail_class()
    if tc.kind == "diverges":
        predicted = LimitPrediction.one()
    elif tc.kind == "zero":
        predicted = LimitPrediction.one_minus_inv_e()
    else:
        predicted = LimitPrediction.interval()

    return TheoryReport(
        action_counts=counts,
        epsilon=epsilon,
        p=p,
        q=q,
        lambda_eps_star=lam_star,
        lambda_eps=lam_eps,
        bound_eps_star=bound_star,
        bound_eps=bound_eps,
        existence_lower_bound=lower,
        predicted_limit=predicted,
    )

"""Continuous utility distributions.

Five families: uniform, gaussian, exponential, pareto, cauchy.  Each exposes
cdf / pdf / sf / quantile / isf / hazard / sample and a tail classification
by the limit of the hazard rate h(x) = pdf(x) / (1 - cdf(x)) as x grows.
Sampling is always by inversion (quantile of a uniform draw), one draw per
value, so generated data is reproducible bit-for-bit on every platform and
thread count.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import _kernels

__all__ = [
    "TailClass",
    "Distribution",
    "Uniform",
    "Gaussian",
    "Exponential",
    "Pareto",
    "Cauchy",
    "parse_distribution",
]


@dataclass(frozen=True)
class TailClass:
    """Limit behaviour of the hazard rate at +infinity."""

    kind: str  # "diverges" | "zero" | "finite"
    limit: float | None = None

    @classmethod
    def diverges(cls) -> "TailClass":
        return cls("diverges")

    @classmethod
    def zero(cls) -> "TailClass":
        return cls("zero")

    @classmethod
    def finite(cls, limit: float) -> "TailClass":
        if not limit > 0:
            raise ValueError("finite hazard limit must be positive")
        return cls("finite", float(limit))

    def __str__(self) -> str:
        if self.kind == "finite":
            return f"finite({self.limit:g})"
        return self.kind


def _vectorize(x):
    arr = np.asarray(x, dtype=np.float64)
    return arr, arr.ndim == 0


def _devec(arr, scalar):
    return float(arr) if scalar else arr


class Distribution:
    """Shared behaviour; subclasses fill in the family-specific pieces."""

    _fam: int
    _p0: float
    _p1: float

    def cdf(self, x):
        raise NotImplementedError

    def pdf(self, x):
        raise NotImplementedError

    def sf(self, x):
        """Survival function 1 - cdf(x), computed without cancellation."""
        raise NotImplementedError

    def isf(self, v):
        """Inverse survival function; isf(v) = quantile(1 - v) done stably."""
        raise NotImplementedError

    def tail_class(self) -> TailClass:
        raise NotImplementedError

    @property
    def text(self) -> str:
        raise NotImplementedError

    def quantile(self, u):
        arr, scalar = _vectorize(u)
        if np.any(arr <= 0.0) or np.any(arr >= 1.0):
            raise ValueError("quantile requires u in the open interval (0, 1)")
        out = _kernels.quantile_array(
            self._fam, self._p0, self._p1, np.ascontiguousarray(arr.ravel())
        ).reshape(arr.shape)
        return _devec(out, scalar)

    def hazard(self, x):
        arr, scalar = _vectorize(x)
        s = np.asarray(self.sf(arr), dtype=np.float64)
        if np.any(s <= 0.0):
            bad = np.asarray(arr)[np.asarray(s <= 0.0)]
            raise ValueError(
                f"hazard undefined where cdf(x) >= 1 (x = {np.atleast_1d(bad)[0]!r})"
            )
        out = np.asarray(self.pdf(arr), dtype=np.float64) / s
        return _devec(out, scalar)

    def sample(self, stream, size: int | None = None):
        u = stream.uniforms(1 if size is None else size)
        out = self.quantile(u)
        return float(out[0]) if size is None else out

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class Uniform(Distribution):
    lo: float
    hi: float

    def __post_init__(self):
        if not self.hi > self.lo:
            raise ValueError("uniform requires hi > lo")
        object.__setattr__(self, "_fam", _kernels.FAM_UNIFORM)
        object.__setattr__(self, "_p0", float(self.lo))
        object.__setattr__(self, "_p1", float(self.hi) - float(self.lo))

    def cdf(self, x):
        arr, scalar = _vectorize(x)
        return _devec(np.clip((arr - self.lo) / (self.hi - self.lo), 0.0, 1.0), scalar)

    def sf(self, x):
        arr, scalar = _vectorize(x)
        return _devec(np.clip((self.hi - arr) / (self.hi - self.lo), 0.0, 1.0), scalar)

    def pdf(self, x):
        arr, scalar = _vectorize(x)
        inside = (arr >= self.lo) & (arr <= self.hi)
        return _devec(np.where(inside, 1.0 / (self.hi - self.lo), 0.0), scalar)

    def isf(self, v):
        arr, scalar = _vectorize(v)
        return _devec(self.hi - (self.hi - self.lo) * arr, scalar)

    def tail_class(self) -> TailClass:
        return TailClass.diverges()

    @property
    def text(self) -> str:
        return f"uniform({self.lo:g},{self.hi:g})"


@dataclass(frozen=True)
class Gaussian(Distribution):
    mean: float
    stddev: float

    def __post_init__(self):
        if not self.stddev > 0:
            raise ValueError("gaussian requires stddev > 0")
        object.__setattr__(self, "_fam", _kernels.FAM_GAUSSIAN)
        object.__setattr__(self, "_p0", float(self.mean))
        object.__setattr__(self, "_p1", float(self.stddev))

    def _z(self, x):
        return (x - self.mean) / self.stddev

    def cdf(self, x):
        arr, scalar = _vectorize(x)
        return _devec(ndtr(self._z(arr)), scalar)

    def sf(self, x):
        arr, scalar = _vectorize(x)
        return _devec(ndtr(-self._z(arr)), scalar)

    def pdf(self, x):
        arr, scalar = _vectorize(x)
        z = self._z(arr)
        return _devec(np.exp(-0.5 * z * z) / (self.stddev * math.sqrt(2.0 * math.pi)), scalar)

    def isf(self, v):
        arr, scalar = _vectorize(v)
        z = _kernels.std_normal_quantile_array(np.ascontiguousarray(arr.ravel()))
        out = self.mean - self.stddev * z.reshape(arr.shape)
        return _devec(out, scalar)

    def tail_class(self) -> TailClass:
        return TailClass.diverges()

    @property
    def text(self) -> str:
        return f"gaussian({self.mean:g},{self.stddev:g})"


@dataclass(frozen=True)
class Exponential(Distribution):
    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("exponential requires rate > 0")
        object.__setattr__(self, "_fam", _kernels.FAM_EXPONENTIAL)
        object.__setattr__(self, "_p0", float(self.rate))
        object.__setattr__(self, "_p1", 0.0)

    def cdf(self, x):
        arr, scalar = _vectorize(x)
        return _devec(np.where(arr > 0.0, -np.expm1(-self.rate * np.maximum(arr, 0.0)), 0.0), scalar)

    def sf(self, x):
        arr, scalar = _vectorize(x)
        return _devec(np.where(arr > 0.0, np.exp(-self.rate * np.maximum(arr, 0.0)), 1.0), scalar)

    def pdf(self, x):
        arr, scalar = _vectorize(x)
        return _devec(np.where(arr >= 0.0, self.rate * np.exp(-self.rate * np.maximum(arr, 0.0)), 0.0), scalar)

    def isf(self, v):
        arr, scalar = _vectorize(v)
        return _devec(-np.log(arr) / self.rate, scalar)

    def tail_class(self) -> TailClass:
        return TailClass.finite(self.rate)

    @property
    def text(self) -> str:
        return f"exponential({self.rate:g})"


@dataclass(frozen=True)
class Pareto(Distribution):
    scale: float
    shape: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("pareto requires scale > 0")
        if not self.shape > 0:
            raise ValueError("pareto requires shape > 0")
        object.__setattr__(self, "_fam", _kernels.FAM_PARETO)
        object.__setattr__(self, "_p0", float(self.scale))
        object.__setattr__(self, "_p1", -1.0 / float(self.shape))

    def cdf(self, x):
        arr, scalar = _vectorize(x)
        ratio = np.log(self.scale / np.maximum(arr, self.scale))
        return _devec(np.where(arr > self.scale, -np.expm1(self.shape * ratio), 0.0), scalar)

    def sf(self, x):
        arr, scalar = _vectorize(x)
        ratio = np.log(self.scale / np.maximum(arr, self.scale))
        return _devec(np.where(arr > self.scale, np.exp(self.shape * ratio), 1.0), scalar)

    def pdf(self, x):
        arr, scalar = _vectorize(x)
        safe = np.maximum(arr, self.scale)
        dens = self.shape / safe * np.exp(self.shape * np.log(self.scale / safe))
        return _devec(np.where(arr >= self.scale, dens, 0.0), scalar)

    def isf(self, v):
        arr, scalar = _vectorize(v)
        return _devec(self.scale * np.exp(-np.log(arr) / self.shape), scalar)

    def tail_class(self) -> TailClass:
        return TailClass.zero()

    @property
    def text(self) -> str:
        return f"pareto({self.scale:g},{self.shape:g})"


@dataclass(frozen=True)
class Cauchy(Distribution):
    location: float
    scale: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError("cauchy requires scale > 0")
        object.__setattr__(self, "_fam", _kernels.FAM_CAUCHY)
        object.__setattr__(self, "_p0", float(self.location))
        object.__setattr__(self, "_p1", float(self.scale))

    def _z(self, x):
        return (x - self.location) / self.scale

    def cdf(self, x):
        arr, scalar = _vectorize(x)
        z = self._z(arr)
        # atan(1/z) form keeps full precision in both tails
        out = np.where(z > 0.0,
                       1.0 - np.arctan2(1.0, np.abs(z)) / math.pi,
                       np.arctan2(1.0, np.maximum(np.abs(z), 1e-300)) / math.pi)
        out = np.where(z == 0.0, 0.5, out)
        return _devec(out, scalar)

    def sf(self, x):
        arr, scalar = _vectorize(x)
        z = self._z(arr)
        out = np.where(z > 0.0,
                       np.arctan2(1.0, np.abs(z)) / math.pi,
                       1.0 - np.arctan2(1.0, np.maximum(np.abs(z), 1e-300)) / math.pi)
        out = np.where(z == 0.0, 0.5, out)
        return _devec(out, scalar)

    def pdf(self, x):
        arr, scalar = _vectorize(x)
        z = self._z(arr)
        return _devec(1.0 / (math.pi * self.scale * (1.0 + z * z)), scalar)

    def isf(self, v):
        arr, scalar = _vectorize(v)
        # cot(pi v), stable near v = 0 where quantile(1 - v) would lose digits
        out = self.location + self.scale / np.tan(math.pi * arr)
        return _devec(out, scalar)

    def tail_class(self) -> TailClass:
        return TailClass.zero()

    @property
    def text(self) -> str:
        return f"cauchy({self.location:g},{self.scale:g})"


_FAMILIES = {
    "uniform": (Uniform, 2),
    "gaussian": (Gaussian, 2),
    "exponential": (Exponential, 1),
    "pareto": (Pareto, 2),
    "cauchy": (Cauchy, 2),
}

_SPEC_RE = re.compile(r"^\s*([a-zA-Z]+)\s*\(([^)]*)\)\s*$")


def parse_distribution(text: str) -> Distribution:
    """Parse `uniform(0,1)`-style distribution text (case-insensitive)."""
    m = _SPEC_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse distribution {text!r}")
    name = m.group(1).lower()
    if name not in _FAMILIES:
        raise ValueError(f"unknown distribution family {name!r}")
    cls, arity = _FAMILIES[name]
    raw = [p.strip() for p in m.group(2).split(",") if p.strip()]
    if len(raw) != arity:
        raise ValueError(f"{name} takes {arity} parameter(s), got {len(raw)}")
    try:
        params = [float(p) for p in raw]
    except ValueError as e:
        raise ValueError(f"bad parameter in {text!r}: {e}") from None
    return cls(*params)

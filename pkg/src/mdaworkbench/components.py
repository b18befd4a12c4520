"""Closed-form building blocks for one-dimensional mixtures.

Each component is an immutable probability law on the real line. All array
methods accept scalars or arrays and return float64 arrays of the same shape.
Survival quantities are exposed in log space so that tails far past the
double-precision underflow point stay usable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special, stats

from .errors import DomainError

_LN2 = math.log(2.0)
# GeometricAtomTail atoms beyond this many steps carry mass below 2**-64 and
# are not enumerated as breakpoints.
_GAT_ENUM = 64
# 2**(2j+1)+1 overflows a double past this index.
_GAT_MAX_INDEX = 510


def _arr(x):
    return np.asarray(x, dtype=np.float64)


def _log_from_sf(sf):
    with np.errstate(divide="ignore"):
        return np.log(np.clip(sf, 0.0, 1.0))


class Component:
    """Interface shared by all components."""

    kind = "component"

    def cdf(self, x):
        raise NotImplementedError

    def cdf_left(self, x):
        """P(X < x)."""
        return self.cdf(x)

    def log_sf(self, x):
        return _log_from_sf(1.0 - self.cdf(x))

    def log_sf_left(self, x):
        """log P(X >= x); equals log_sf away from atoms."""
        return self.log_sf(x)

    def quantile(self, u):
        """Generalized inverse inf{t : cdf(t) >= u} for u in [0, 1]."""
        raise NotImplementedError

    def isf(self, s):
        return self.quantile(1.0 - _arr(s))

    def support(self):
        raise NotImplementedError

    def breakpoints(self):
        """Points where the CDF jumps or changes formula (finite, sorted)."""
        return np.array([], dtype=np.float64)

    def jumps(self):
        """Locations of atoms (subset of breakpoints)."""
        return np.array([], dtype=np.float64)

    def jump_near(self, x, rel):
        """An atom location within ``rel * max(1, |x|)`` of x, or None."""
        jumps = self.jumps()
        if jumps.size == 0:
            return None
        i = int(np.argmin(np.abs(jumps - x)))
        return float(jumps[i]) if abs(jumps[i] - x) <= rel * max(1.0, abs(x)) else None

    def tail_integral(self, t):
        """Integral of the survival function over [t, inf)."""
        raise NotImplementedError

    def log_tail_integral(self, t):
        v = self.tail_integral(t)
        return math.log(v) if v > 0 else -math.inf

    def sf_integral(self, a, b):
        """Integral of the survival function over [a, b]."""
        if b <= a:
            return 0.0
        ta, tb = self.tail_integral(a), self.tail_integral(b)
        if math.isfinite(ta) and math.isfinite(tb):
            return max(ta - tb, 0.0)
        val, _ = integrate.quad(lambda z: 1.0 - float(self.cdf(z)), a, b, limit=200)
        return val

    def to_dict(self):
        raise NotImplementedError


@dataclass(frozen=True)
class Atom(Component):
    location: float
    kind = "atom"

    def cdf(self, x):
        return (_arr(x) >= self.location).astype(np.float64)

    def cdf_left(self, x):
        return (_arr(x) > self.location).astype(np.float64)

    def log_sf(self, x):
        return np.where(_arr(x) >= self.location, -np.inf, 0.0)

    def log_sf_left(self, x):
        return np.where(_arr(x) > self.location, -np.inf, 0.0)

    def quantile(self, u):
        return np.full(np.shape(u), self.location, dtype=np.float64)

    def support(self):
        return (self.location, self.location)

    def breakpoints(self):
        return np.array([self.location])

    def jumps(self):
        return np.array([self.location])

    def tail_integral(self, t):
        return max(self.location - t, 0.0)

    def to_dict(self):
        return {"type": "atom", "at": self.location}


@dataclass(frozen=True)
class Uniform(Component):
    a: float
    b: float
    kind = "uniform"

    def __post_init__(self):
        if not self.b > self.a:
            raise DomainError(f"uniform needs a < b, got a={self.a}, b={self.b}")

    def cdf(self, x):
        return np.clip((_arr(x) - self.a) / (self.b - self.a), 0.0, 1.0)

    def log_sf(self, x):
        return _log_from_sf((self.b - _arr(x)) / (self.b - self.a))

    def quantile(self, u):
        return self.a + _arr(u) * (self.b - self.a)

    def support(self):
        return (self.a, self.b)

    def breakpoints(self):
        return np.array([self.a, self.b])

    def tail_integral(self, t):
        if t >= self.b:
            return 0.0
        if t <= self.a:
            return (self.a - t) + (self.b - self.a) / 2.0
        return (self.b - t) ** 2 / (2.0 * (self.b - self.a))

    def to_dict(self):
        return {"type": "uniform", "a": self.a, "b": self.b}


@dataclass(frozen=True)
class Exponential(Component):
    rate: float
    kind = "exponential"

    def __post_init__(self):
        if not self.rate > 0:
            raise DomainError("exponential rate must be positive")

    def cdf(self, x):
        x = _arr(x)
        return np.where(x > 0, -np.expm1(-self.rate * np.maximum(x, 0.0)), 0.0)

    def log_sf(self, x):
        return -self.rate * np.maximum(_arr(x), 0.0)

    def quantile(self, u):
        with np.errstate(divide="ignore"):
            return -np.log1p(-_arr(u)) / self.rate

    def isf(self, s):
        with np.errstate(divide="ignore"):
            return -np.log(_arr(s)) / self.rate

    def support(self):
        return (0.0, math.inf)

    def breakpoints(self):
        return np.array([0.0])

    def tail_integral(self, t):
        if t <= 0:
            return -t + 1.0 / self.rate
        return math.exp(-self.rate * t) / self.rate

    def log_tail_integral(self, t):
        if t <= 0:
            return math.log(self.tail_integral(t))
        return -self.rate * t - math.log(self.rate)

    def to_dict(self):
        return {"type": "exponential", "rate": self.rate}


@dataclass(frozen=True)
class Normal(Component):
    mean: float = 0.0
    sd: float = 1.0
    kind = "normal"

    def __post_init__(self):
        if not self.sd > 0:
            raise DomainError("normal sd must be positive")

    def cdf(self, x):
        return special.ndtr((_arr(x) - self.mean) / self.sd)

    def log_sf(self, x):
        return special.log_ndtr(-(_arr(x) - self.mean) / self.sd)

    def quantile(self, u):
        return self.mean + self.sd * special.ndtri(_arr(u))

    def support(self):
        return (-math.inf, math.inf)

    def breakpoints(self):
        return np.array([self.mean])

    @staticmethod
    def _std_log_tail(u):
        # log of the integral of the standard normal survival over [u, inf)
        if u < 0:
            return math.log(math.exp(-u * u / 2) / math.sqrt(2 * math.pi) - u * float(special.ndtr(-u)))
        if u > 100:
            series = -3 / u**2 + 15 / u**4 - 105 / u**6
            return -u * u / 2 - 0.5 * math.log(2 * math.pi) - 2 * math.log(u) + math.log1p(series)
        bracket = 1.0 / math.sqrt(2 * math.pi) - u / 2.0 * float(special.erfcx(u / math.sqrt(2)))
        return -u * u / 2.0 + math.log(bracket)

    def isf(self, s):
        return self.mean - self.sd * special.ndtri(_arr(s))

    def log_tail_integral(self, t):
        u = (t - self.mean) / self.sd
        return math.log(self.sd) + self._std_log_tail(u)

    def tail_integral(self, t):
        return math.exp(self.log_tail_integral(t))

    def to_dict(self):
        return {"type": "normal", "mean": self.mean, "sd": self.sd}


@dataclass(frozen=True)
class Pareto(Component):
    alpha: float
    scale: float = 1.0
    kind = "pareto"

    def __post_init__(self):
        if not (self.alpha > 0 and self.scale > 0):
            raise DomainError("pareto alpha and scale must be positive")

    def cdf(self, x):
        x = _arr(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(x >= self.scale, -np.expm1(self.log_sf(x)), 0.0)

    def log_sf(self, x):
        x = _arr(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(x >= self.scale, -self.alpha * np.log(np.maximum(x, self.scale) / self.scale), 0.0)

    def quantile(self, u):
        with np.errstate(divide="ignore"):
            return self.scale * np.exp(-np.log1p(-_arr(u)) / self.alpha)

    def isf(self, s):
        with np.errstate(divide="ignore"):
            return self.scale * np.exp(-np.log(_arr(s)) / self.alpha)

    def support(self):
        return (self.scale, math.inf)

    def breakpoints(self):
        return np.array([self.scale])

    def tail_integral(self, t):
        if self.alpha <= 1:
            return math.inf
        if t <= self.scale:
            return (self.scale - t) + self.scale / (self.alpha - 1)
        return t * (t / self.scale) ** (-self.alpha) / (self.alpha - 1)

    def sf_integral(self, a, b):
        if b <= a:
            return 0.0
        head = max(min(b, self.scale) - a, 0.0)
        lo = max(a, self.scale)
        if b <= lo:
            return head
        s, al = self.scale, self.alpha
        if al == 1:
            return head + s * math.log(b / lo)
        return head + s ** al * (b ** (1 - al) - lo ** (1 - al)) / (1 - al)

    def to_dict(self):
        return {"type": "pareto", "alpha": self.alpha, "scale": self.scale}


@dataclass(frozen=True)
class Geometric(Component):
    """Failures before the first success: P(X = j) = (1-p)^j p, j >= 0."""

    p: float
    kind = "geometric"

    def __post_init__(self):
        if not 0 < self.p <= 1:
            raise DomainError("geometric p must lie in (0, 1]")

    @property
    def _logq(self):
        return math.log1p(-self.p) if self.p < 1 else -math.inf

    def log_sf(self, x):
        x = _arr(x)
        with np.errstate(invalid="ignore"):
            out = (np.floor(np.maximum(x, 0.0)) + 1.0) * self._logq
        return np.where(x < 0, 0.0, out)

    def cdf(self, x):
        return -np.expm1(self.log_sf(x))

    def cdf_left(self, x):
        return self.cdf(np.ceil(_arr(x)) - 1.0)

    def log_sf_left(self, x):
        return self.log_sf(np.ceil(_arr(x)) - 1.0)

    def isf(self, s):
        s = _arr(s)
        if self.p == 1:
            return np.zeros_like(s)
        with np.errstate(divide="ignore"):
            k = np.maximum(np.ceil(np.log(s) / self._logq) - 1.0, 0.0)
        k = np.where((k > 0) & (np.exp(self.log_sf(k - 1.0)) <= s), k - 1.0, k)
        return np.where(np.exp(self.log_sf(k)) > s, k + 1.0, k)

    def quantile(self, u):
        u = _arr(u)
        if self.p == 1:
            return np.zeros_like(u)
        with np.errstate(divide="ignore"):
            k = np.ceil(np.log1p(-u) / self._logq) - 1.0
        k = np.maximum(k, 0.0)
        # correct off-by-one from rounding in the log ratio
        k = np.where((k > 0) & (self.cdf(k - 1.0) >= u), k - 1.0, k)
        k = np.where(self.cdf(k) < u, k + 1.0, k)
        return k

    def support(self):
        return (0.0, 0.0 if self.p == 1 else math.inf)

    def _last_index(self):
        if self.p == 1:
            return 0
        return int(min(math.ceil(math.log(1e-17) / self._logq), 10**6))

    def breakpoints(self):
        return np.arange(self._last_index() + 1, dtype=np.float64)

    jumps = breakpoints

    def jump_near(self, x, rel):
        k = round(x)
        return float(k) if k >= 0 and abs(k - x) <= rel * max(1.0, abs(x)) else None

    def tail_integral(self, t):
        q = 1.0 - self.p
        if t < 0:
            return -t + q / self.p
        m = math.floor(t)
        return (m + 1 - t) * q ** (m + 1) + q ** (m + 2) / self.p

    def to_dict(self):
        return {"type": "geometric", "p": self.p}


@dataclass(frozen=True)
class Poisson(Component):
    lam: float
    kind = "poisson"

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("poisson lambda must be positive")

    def cdf(self, x):
        x = _arr(x)
        return np.where(x < 0, 0.0, special.pdtr(np.floor(np.maximum(x, 0.0)), self.lam))

    def cdf_left(self, x):
        return self.cdf(np.ceil(_arr(x)) - 1.0)

    def log_sf(self, x):
        x = _arr(x)
        return np.where(x < 0, 0.0, stats.poisson.logsf(np.floor(np.maximum(x, 0.0)), self.lam))

    def log_sf_left(self, x):
        return self.log_sf(np.ceil(_arr(x)) - 1.0)

    def quantile(self, u):
        return stats.poisson.ppf(_arr(u), self.lam).astype(np.float64)

    def support(self):
        return (0.0, math.inf)

    def breakpoints(self):
        hi = self.lam + 12 * math.sqrt(self.lam) + 40
        return np.arange(int(hi) + 1, dtype=np.float64)

    jumps = breakpoints

    def jump_near(self, x, rel):
        k = round(x)
        return float(k) if k >= 0 and abs(k - x) <= rel * max(1.0, abs(x)) else None

    def tail_integral(self, t):
        if t < 0:
            return -t + self.lam
        m = math.floor(t)
        ks = np.arange(m + 1, m + 1 + int(10 * math.sqrt(self.lam) + 60) + max(0, int(self.lam - m)))
        pmf = stats.poisson.pmf(ks, self.lam)
        return float(math.fsum((ks - t) * pmf))

    def to_dict(self):
        return {"type": "poisson", "lambda": self.lam}


@dataclass(frozen=True)
class PiecewiseLinearCDF(Component):
    knots: tuple
    kind = "piecewise_linear"

    def __post_init__(self):
        xs = np.array([k[0] for k in self.knots], dtype=np.float64)
        ps = np.array([k[1] for k in self.knots], dtype=np.float64)
        if len(xs) < 2 or np.any(np.diff(xs) <= 0):
            raise DomainError("piecewise-linear knots need at least two strictly increasing x")
        if np.any(np.diff(ps) < 0) or ps[0] != 0 or ps[-1] != 1:
            raise DomainError("piecewise-linear p must be nondecreasing from 0 to 1")
        object.__setattr__(self, "knots", tuple((float(a), float(b)) for a, b in zip(xs, ps)))

    @property
    def _xs(self):
        return np.array([k[0] for k in self.knots])

    @property
    def _ps(self):
        return np.array([k[1] for k in self.knots])

    def cdf(self, x):
        return np.interp(_arr(x), self._xs, self._ps, left=0.0, right=1.0)

    def quantile(self, u):
        u = _arr(u)
        xs, ps = self._xs, self._ps
        i = np.clip(np.searchsorted(ps, u, side="left"), 1, len(xs) - 1)
        p0, p1 = ps[i - 1], ps[i]
        with np.errstate(invalid="ignore", divide="ignore"):
            frac = np.where(p1 > p0, (u - p0) / (p1 - p0), 1.0)
        out = xs[i - 1] + np.clip(frac, 0.0, 1.0) * (xs[i] - xs[i - 1])
        return np.where(u <= 0, xs[0], out)

    def support(self):
        return (self.knots[0][0], self.knots[-1][0])

    def breakpoints(self):
        return self._xs

    def tail_integral(self, t):
        xs, ps = self._xs, self._ps
        total = max(xs[0] - t, 0.0)
        for x0, x1, p0, p1 in zip(xs[:-1], xs[1:], ps[:-1], ps[1:]):
            if x1 <= t:
                continue
            lo = max(x0, t)
            plo = p0 + (p1 - p0) * (lo - x0) / (x1 - x0)
            total += (x1 - lo) * (1.0 - (plo + p1) / 2.0)
        return total

    def to_dict(self):
        return {"type": "piecewise_linear", "knots": [list(k) for k in self.knots]}


_TWO53 = 2.0**53
_GAT_POWERS = 2.0 ** (2 * np.arange(_GAT_MAX_INDEX + 1) + 1)


@dataclass(frozen=True)
class GeometricAtomTail(Component):
    """Atoms at 2^(2j+1)+1 for j >= start_index with masses 2^-(j-start_index+1)."""

    start_index: int = 0
    kind = "geometric_atom_tail"

    def __post_init__(self):
        if not 0 <= self.start_index <= _GAT_MAX_INDEX - _GAT_ENUM:
            raise DomainError("geometric atom tail start index out of range")

    @staticmethod
    def location(j):
        return float(2 ** (2 * j + 1) + 1)

    def _count_at_or_below(self, x, strict=False):
        """Number of atoms at or below x (strictly below when strict), exact for every double x.

        Locations 2^(2j+1)+1 are odd integers, not representable past 2^53,
        while every double x >= 2^53 is an even integer. There loc(j) <= x
        iff 2^(2j+1) < x, and strictness makes no difference.
        """
        x = _arr(x)
        big = x >= _TWO53
        n_big = np.searchsorted(_GAT_POWERS, x, side="left")
        n_small = np.searchsorted(_GAT_POWERS + 1.0, x, side="left" if strict else "right")
        count = np.where(big, n_big, n_small)
        return np.maximum(count - self.start_index, 0).astype(np.float64)

    def log_sf(self, x):
        return -self._count_at_or_below(x) * _LN2

    def cdf(self, x):
        return -np.expm1(self.log_sf(x))

    def cdf_left(self, x):
        return -np.expm1(-self._count_at_or_below(x, strict=True) * _LN2)

    def log_sf_left(self, x):
        return -self._count_at_or_below(x, strict=True) * _LN2

    def isf(self, s):
        s = _arr(s)
        with np.errstate(divide="ignore"):
            c = np.maximum(np.ceil(-np.log2(s)), 1.0)
        j = np.minimum(self.start_index + c - 1, _GAT_MAX_INDEX)
        return np.array([self.location(int(v)) for v in np.ravel(j)]).reshape(np.shape(s))

    def quantile(self, u):
        u = _arr(u)
        with np.errstate(divide="ignore"):
            c = np.ceil(-np.log2(np.maximum(1.0 - u, 1e-300)))
        c = np.maximum(c, 1.0)
        c = np.where(-np.expm1(-(c - 1) * _LN2) >= u, c - 1, c)
        c = np.maximum(c, 1.0)
        j = np.minimum(self.start_index + c - 1, _GAT_MAX_INDEX)
        return np.array([self.location(int(v)) for v in np.ravel(j)]).reshape(np.shape(u))

    def support(self):
        return (self.location(self.start_index), math.inf)

    def breakpoints(self):
        s = self.start_index
        return np.array([self.location(j) for j in range(s, s + _GAT_ENUM)])

    jumps = breakpoints

    def tail_integral(self, t):
        return math.inf

    def sf_integral(self, a, b):
        if b <= a:
            return 0.0
        s = self.start_index
        pts = [-math.inf] + [self.location(j) for j in range(s, _GAT_MAX_INDEX + 1)]
        total = 0.0
        for i, left in enumerate(pts[:-1]):
            right = pts[i + 1]
            lo, hi = max(left, a), min(right, b)
            if hi > lo:
                total += (hi - lo) * 2.0 ** (-i)
            if right >= b:
                break
        return total

    def to_dict(self):
        return {"type": "geometric_atom_tail", "start_index": self.start_index}


@dataclass(frozen=True)
class Truncated(Component):
    """``inner`` conditioned on ``lower < X < upper``.

    Windows whose lower end sits in the upper half of ``inner`` are handled
    through survivals, so a window deep in a tail keeps its mass and shape.
    """

    inner: Component
    lower: float = -math.inf
    upper: float = math.inf
    kind = "truncated"

    def __post_init__(self):
        if isinstance(self.inner, Truncated):
            object.__setattr__(self, "lower", max(self.lower, self.inner.lower))
            object.__setattr__(self, "upper", min(self.upper, self.inner.upper))
            object.__setattr__(self, "inner", self.inner.inner)
        if not self._mass() > 0:
            raise DomainError("truncation window carries no mass")

    # P(X > lower), P(X >= upper) and the cdf counterparts of the inner law
    def _tail_mode(self):
        return self.lower > -math.inf and float(self.inner.cdf(self.lower)) > 0.5

    def _log_s_lo(self):
        return float(self.inner.log_sf(self.lower)) if self.lower > -math.inf else 0.0

    def _s_up(self):
        return math.exp(float(self.inner.log_sf_left(self.upper))) if self.upper < math.inf else 0.0

    def _f_lower(self):
        return 0.0 if self.lower == -math.inf else float(self.inner.cdf(self.lower))

    def _f_upper_left(self):
        return 1.0 if self.upper == math.inf else float(self.inner.cdf_left(self.upper))

    def _mass(self):
        if self._tail_mode() or self.upper == math.inf:
            return math.exp(self._log_s_lo()) - self._s_up()
        return self._f_upper_left() - self._f_lower()

    def _clip(self, x, mid, left):
        hi_side = (x > self.upper) if left else (x >= self.upper)
        return np.where(x <= self.lower, 0.0, np.where(hi_side, 1.0, np.clip(mid, 0.0, 1.0)))

    def cdf(self, x):
        x = _arr(x)
        z = self._mass()
        if self._tail_mode():
            mid = (math.exp(self._log_s_lo()) - np.exp(self.inner.log_sf(x))) / z
        else:
            mid = (self.inner.cdf(x) - self._f_lower()) / z
        return self._clip(x, mid, left=False)

    def cdf_left(self, x):
        x = _arr(x)
        z = self._mass()
        if self._tail_mode():
            mid = (math.exp(self._log_s_lo()) - np.exp(self.inner.log_sf_left(x))) / z
        else:
            mid = (self.inner.cdf_left(x) - self._f_lower()) / z
        return self._clip(x, mid, left=True)

    def _log_sf_from(self, x, log_inner):
        if self.upper == math.inf:
            mid = log_inner - self._log_s_lo()
        else:
            with np.errstate(divide="ignore"):
                mid = np.log(np.clip((np.exp(log_inner) - self._s_up()) / self._mass(), 0.0, 1.0))
        return np.minimum(mid, 0.0)

    def log_sf(self, x):
        x = _arr(x)
        mid = self._log_sf_from(x, self.inner.log_sf(x))
        return np.where(x <= self.lower, 0.0, np.where(x >= self.upper, -np.inf, mid))

    def log_sf_left(self, x):
        x = _arr(x)
        mid = self._log_sf_from(x, self.inner.log_sf_left(x))
        return np.where(x <= self.lower, 0.0, np.where(x > self.upper, -np.inf, mid))

    def _top(self):
        return self.support()[1]

    def isf(self, s):
        s = _arr(s)
        if self._tail_mode() or self.upper == math.inf:
            q = self.inner.isf(self._s_up() + s * self._mass())
        else:
            q = self.inner.quantile(np.clip(self._f_lower() + (1.0 - s) * self._mass(), 0.0, 1.0))
        return np.clip(q, self.lower, self._top())

    def quantile(self, u):
        u = _arr(u)
        if self._tail_mode() or self.upper == math.inf:
            return self.isf(1.0 - u)
        q = self.inner.quantile(np.clip(self._f_lower() + u * self._mass(), 0.0, 1.0))
        return np.clip(q, self.lower, self._top())

    def support(self):
        lo_in, hi_in = self.inner.support()
        lo = max(lo_in, self.lower)
        if self.upper == math.inf:
            return (lo, hi_in)
        hi = min(hi_in, self.upper)
        if self._tail_mode():
            top = float(self.inner.isf(self._s_up()))
        else:
            top = float(self.inner.quantile(self._f_upper_left()))
        return (lo, min(hi, top))

    def breakpoints(self):
        bp = self.inner.breakpoints()
        bp = bp[(bp > self.lower) & (bp < self.upper)]
        ends = [v for v in (self.lower, self.upper) if math.isfinite(v)]
        return np.unique(np.concatenate((bp, ends)))

    def jumps(self):
        j = self.inner.jumps()
        return j[(j > self.lower) & (j < self.upper)]

    def jump_near(self, x, rel):
        j = self.inner.jump_near(x, rel)
        return j if j is not None and self.lower < j < self.upper else None

    def tail_integral(self, t):
        below = max(self.lower - t, 0.0) if self.lower > -math.inf else 0.0
        if self.upper == math.inf:
            inner_tail = self.inner.tail_integral(max(t, self.lower))
            if not math.isfinite(inner_tail):
                return math.inf
            return below + inner_tail / math.exp(self._log_s_lo())
        return self.sf_integral(t, self.upper) if t < self.upper else 0.0

    def log_tail_integral(self, t):
        if self.upper == math.inf and self.lower > -math.inf and t >= self.lower:
            return self.inner.log_tail_integral(t) - self._log_s_lo()
        return super().log_tail_integral(t)

    def sf_integral(self, a, b):
        if b <= a:
            return 0.0
        lo_part = max(min(b, self.lower) - a, 0.0) if self.lower > -math.inf else 0.0
        a2, b2 = max(a, self.lower), min(b, self.upper)
        if b2 <= a2:
            return lo_part
        inner = self.inner.sf_integral(a2, b2)
        return lo_part + (inner - (b2 - a2) * self._s_up()) / self._mass()

    def to_dict(self):
        d = {"type": "truncated", "of": self.inner.to_dict()}
        if self.lower > -math.inf:
            d["lower"] = self.lower
        if self.upper < math.inf:
            d["upper"] = self.upper
        return d


@dataclass(frozen=True)
class Shifted(Component):
    """``inner`` translated: X + by."""

    inner: Component
    by: float = 0.0
    kind = "shifted"

    def __post_init__(self):
        if not math.isfinite(self.by):
            raise DomainError("shift must be finite")
        if isinstance(self.inner, Shifted):
            object.__setattr__(self, "by", self.by + self.inner.by)
            object.__setattr__(self, "inner", self.inner.inner)

    def _back(self, x):
        return _arr(x) - self.by

    def cdf(self, x):
        return self.inner.cdf(self._back(x))

    def cdf_left(self, x):
        return self.inner.cdf_left(self._back(x))

    def log_sf(self, x):
        return self.inner.log_sf(self._back(x))

    def log_sf_left(self, x):
        return self.inner.log_sf_left(self._back(x))

    def quantile(self, u):
        return self.inner.quantile(u) + self.by

    def isf(self, s):
        return self.inner.isf(s) + self.by

    def support(self):
        lo, hi = self.inner.support()
        return (lo + self.by, hi + self.by)

    def breakpoints(self):
        return self.inner.breakpoints() + self.by

    def jumps(self):
        return self.inner.jumps() + self.by

    def jump_near(self, x, rel):
        j = self.inner.jump_near(x - self.by, rel)
        return None if j is None else j + self.by

    def tail_integral(self, t):
        return self.inner.tail_integral(t - self.by)

    def log_tail_integral(self, t):
        return self.inner.log_tail_integral(t - self.by)

    def sf_integral(self, a, b):
        return self.inner.sf_integral(a - self.by, b - self.by)

    def to_dict(self):
        return {"type": "shifted", "of": self.inner.to_dict(), "by": self.by}

"""Generalized extreme value family, norming schedules and block-maxima convergence reports."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import _kernels
from .dist import Lift1D, Product, as_k
from .errors import DomainError

GUMBEL_SWITCH = 1e-8


@dataclass(frozen=True)
class GevParams:
    gamma: float

    def cdf(self, x):
        return gev_cdf(self, x)

    @property
    def family(self):
        if self.gamma > 0:
            return "frechet"
        if self.gamma < 0:
            return "weibull"
        return "gumbel"


def gev_log_exponent(gamma, x):
    """log of (1 + gamma x)^(-1/gamma), with the Gumbel branch -x near gamma x = 0.

    Returns +inf below a left endpoint and -inf above a right endpoint.
    """
    x = np.asarray(x, dtype=np.float64)
    gx = gamma * x
    with np.errstate(divide="ignore", invalid="ignore"):
        general = -np.log1p(np.where(gx > -1, gx, 0.0)) / (gamma if gamma != 0 else 1.0)
    # series: log1p(g x)/g = x - g x^2 / 2 + g^2 x^3 / 3
    series = -(x - gamma * x**2 / 2 + gamma**2 * x**3 / 3)
    out = np.where(np.abs(gx) < GUMBEL_SWITCH, series, general)
    if gamma > 0:
        out = np.where(gx <= -1, np.inf, out)
    elif gamma < 0:
        out = np.where(gx <= -1, -np.inf, out)
    return out


def gev_cdf(g, x):
    """G_gamma(x) = exp(-(1 + gamma x)^(-1/gamma)); gamma = 0 is exp(-exp(-x))."""
    gamma = g.gamma if isinstance(g, GevParams) else float(g)
    return np.exp(-np.exp(gev_log_exponent(gamma, x)))


@dataclass(frozen=True)
class NormingSchedule:
    """Affine norming u_n(x) = a(n) x + b(n), applied identically on every coordinate."""

    name: str
    a: Callable[[int], float] = field(compare=False)
    b: Callable[[int], float] = field(compare=False)

    def at(self, n):
        a, b = float(self.a(n)), float(self.b(n))
        if not a > 0:
            raise DomainError(f"schedule {self.name} has non-positive scale at n={n}")
        return a, b

    def translated(self, offset, name=None):
        """Schedule (a_n, b_n + offset): same limit for the law translated by ``offset``."""
        return NormingSchedule(name or f"{self.name}+{offset:g}", self.a, lambda n: self.b(n) + offset)

    def shifted(self, offset, name=None):
        """Schedule (a_n, a_n * offset + b_n)."""
        return NormingSchedule(name or f"{self.name}+a*{offset:g}", self.a,
                               lambda n: self.a(n) * offset + self.b(n))


def normal_norming(n):
    """(a_n, b_n) with a_n = (2 log n - log log n - log 4 pi)^(-1/2), b_n = 1 / a_n."""
    if n < 2:
        raise DomainError("normal norming needs n >= 2")
    inner = 2 * math.log(n) - math.log(math.log(n)) - math.log(4 * math.pi)
    if not inner > 0:
        raise DomainError(f"normal norming undefined at n={n}: 2 log n <= log log n + log 4 pi")
    a = inner ** -0.5
    return a, 1.0 / a


def normal_schedule():
    return NormingSchedule("normal", lambda n: normal_norming(n)[0], lambda n: normal_norming(n)[1])


def uniform_schedule():
    return NormingSchedule("uniform", lambda n: 1.0 / n, lambda n: 1.0 - 1.0 / n)


def pareto_schedule():
    return NormingSchedule("pareto", lambda n: float(n), lambda n: float(n))


def table_schedule(path):
    """Custom schedule from a JSON file ``{"n": [...], "a": [...], "b": [...]}``."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
        table = {int(n): (float(a), float(b)) for n, a, b in zip(raw["n"], raw["a"], raw["b"], strict=True)}
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise DomainError(f"bad custom schedule {path!r}: {exc}") from None

    def lookup(i):
        def get(n):
            if n not in table:
                raise DomainError(f"custom schedule has no entry for n={n}")
            return table[n][i]
        return get

    return NormingSchedule(f"custom:{path}", lookup(0), lookup(1))


SCHEDULES = {"normal": normal_schedule, "uniform": uniform_schedule, "pareto": pareto_schedule}


def schedule_by_name(name):
    if name.startswith("custom:"):
        return table_schedule(name.split(":", 1)[1])
    try:
        return SCHEDULES[name]()
    except KeyError:
        raise DomainError(f"unknown schedule {name!r}") from None


def _points(F, x):
    x = np.asarray(x, dtype=np.float64)
    if F.dim == 1:
        return x[..., None] if (x.ndim == 0 or x.shape[-1] != 1) else x
    if x.ndim == 1 and x.shape[0] != F.dim:
        return np.repeat(x[:, None], F.dim, axis=1)
    return x


def maxima_cdf(F, n, a, b, x):
    """P(max of n iid draws <= a x + b e) = F(a x + b e)^n, evaluated in log space."""
    if n < 1:
        raise DomainError("block size n must be at least 1")
    F = as_k(F)
    pts = _points(F, x)
    y = a * pts + b
    if isinstance(F, Lift1D):
        out = _kernels.powered_cdf(np.ascontiguousarray(F.d.log_survival(y[..., 0]).ravel()), float(n))
        return out.reshape(y.shape[:-1])
    if isinstance(F, Product):
        logc = np.zeros(y.shape[:-1])
        for i, m in enumerate(F.marginals):
            lsf = np.ascontiguousarray(m.log_survival(y[..., i]).ravel())
            with np.errstate(divide="ignore"):
                logc = logc + np.log(_kernels.powered_cdf(lsf, 1.0)).reshape(logc.shape)
        return np.exp(n * logc)
    return np.exp(n * F.log_cdf_k(y))


def gumbel_product_target(k):
    """G_0^k on R^k."""
    def target(x):
        x = np.asarray(x, dtype=np.float64)
        return np.prod(gev_cdf(0.0, x), axis=-1)
    return target


@dataclass
class ConvergenceReport:
    schedule: str
    rows: list  # (n, a_n, b_n, sup_error)

    @property
    def errors(self):
        return [r[3] for r in self.rows]

    @property
    def strictly_decreasing(self):
        e = self.errors
        return all(x > y for x, y in zip(e, e[1:]))

    def to_dict(self):
        return {"schedule": self.schedule, "strictly_decreasing": self.strictly_decreasing,
                "rows": [{"n": n, "a": a, "b": b, "sup_error": e} for n, a, b, e in self.rows]}


def _target_fn(F, target):
    if isinstance(target, GevParams):
        if F.dim == 1:
            return lambda x: gev_cdf(target, np.asarray(x)[..., 0])
        return lambda x: np.prod(gev_cdf(target, x), axis=-1)
    return target


def convergence_report(F, sched, target, ns, xs):
    """sup over ``xs`` of |F(a_n x + b_n)^n - target(x)| for each n in ``ns``."""
    F = as_k(F)
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("ns must be strictly increasing")
    pts = _points(F, xs)
    if pts.size == 0:
        raise DomainError("empty evaluation grid")
    tgt = np.asarray(_target_fn(F, target)(pts))
    rows = []
    for n in ns:
        a, b = sched.at(n)
        err = float(np.max(np.abs(maxima_cdf(F, n, a, b, pts) - tgt)))
        rows.append((n, a, b, err))
    return ConvergenceReport(sched.name, rows)

"""Free max-convolution on the line.

For free noncommutative variables with distributions F and G the maximum has
distribution H = max(0, F + G - 1). The n-fold power is
max(0, 1 - n (1 - F)), so block maxima renormalize through n times the
survival function, the same quantity that drives the classical limit
F^n ~ exp(-n (1 - F)). The free limit laws are max(0, 1 + log G_gamma).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .dist import as_1d
from .errors import DomainError
from .gev import ConvergenceReport, gev_log_exponent


def _two_sum(a, b):
    s = a + b
    bb = s - a
    return s, (a - (s - bb)) + (b - bb)


def _split(a):
    # Veltkamp split into two 26-bit halves
    c = 134217729.0 * a
    hi = c - (c - a)
    return hi, a - hi


def _two_prod(a, b):
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    return p, ((ah * bh - p) + ah * bl + al * bh) + al * bl


def _clamped(hi, lo):
    # normalize a double-double and cap it at 1
    hi, lo = _two_sum(hi, lo)
    full = (hi > 1.0) | ((hi == 1.0) & (lo >= 0.0))
    return np.where(full, 1.0, hi), np.where(full, 0.0, lo)


class FreeCDF:
    """CDF oracle built from one-dimensional laws by free max operations.

    The survival is carried as an unevaluated sum hi + lo. Free max-convolution
    adds survivals, and for repeated factors of one law the sums stay exact, so
    F maxfree F maxfree ... (n factors) rounds once, to the same double as
    ``free_power(F, n)``.
    """

    def __init__(self, survival2_fn, label):
        self._sf2 = survival2_fn
        self.label = label

    def survival2(self, x):
        return self._sf2(np.asarray(x, dtype=np.float64))

    def survival(self, x):
        return self.survival2(x)[0]

    def cdf(self, x):
        return 1.0 - self.survival(x)

    def __repr__(self):
        return f"FreeCDF({self.label})"


def _survival2_of(F):
    if isinstance(F, FreeCDF):
        return F.survival2
    F = as_1d(F)

    def sf2(x):
        v = F.survival(x)
        return v, np.zeros_like(v)

    return sf2


def _survival_of(F):
    return F.survival if isinstance(F, FreeCDF) else as_1d(F).survival


def free_max_conv(F, G):
    """H = max(0, F + G - 1), held as survival min(1, sf_F + sf_G)."""
    sf, sg = _survival2_of(F), _survival2_of(G)

    def sf2(x):
        (fh, fl), (gh, gl) = sf(x), sg(x)
        s, e = _two_sum(fh, gh)
        return _clamped(s, e + (fl + gl))

    return FreeCDF(sf2, f"{F!r} maxfree {G!r}")


def free_power(F, n):
    """n-fold free max-convolution power, closed form max(0, 1 - n (1 - F))."""
    if int(n) != n or n < 1:
        raise DomainError(f"free power needs an integer n >= 1, got {n}")
    n = float(int(n))
    sf = _survival2_of(F)

    def sf2(x):
        h, l = sf(x)
        p, e = _two_prod(n, h)
        return _clamped(p, e + n * l)

    return FreeCDF(sf2, f"{F!r}^[{int(n)}]")


def iterated_free_power(F, n, x):
    """CDF values of the n-fold power at ``x`` by n - 1 explicit pairings (reference path).

    The pairings accumulate the survival exactly, so for any n the result is
    bitwise equal to ``free_power(F, n).cdf(x)``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"free power needs an integer n >= 1, got {n}")
    sv = np.ascontiguousarray(_survival_of(F)(np.asarray(x, dtype=np.float64)).ravel())
    return (1.0 - _kernels.iterated_free_power(sv, int(n))).reshape(np.shape(x))


@dataclass(frozen=True)
class FreeLimitLaw:
    """x -> max(0, 1 + log G_gamma(x))."""

    gamma: float

    def cdf(self, x):
        return free_limit_cdf(self.gamma, x)


def free_limit_cdf(gamma, x):
    """max(0, 1 - (1 + gamma x)^(-1/gamma)); gamma = 0 gives max(0, 1 - exp(-x))."""
    le = gev_log_exponent(float(gamma), x)
    with np.errstate(over="ignore"):
        out = np.clip(1.0 - np.exp(le), 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def free_convergence_report(F, sched, gamma, ns, xs):
    """sup over ``xs`` of |free_power(F, n)(a_n x + b_n) - free_limit_cdf(gamma, x)|."""
    F = as_1d(F)
    ns = [int(n) for n in ns]
    if any(b <= a for a, b in zip(ns, ns[1:])):
        raise DomainError("ns must be strictly increasing")
    xs = np.asarray(xs, dtype=np.float64).ravel()
    if xs.size == 0:
        raise DomainError("empty evaluation grid")
    target = free_limit_cdf(gamma, xs)
    rows = []
    for n in ns:
        a, b = sched.at(n)
        vals = np.maximum(0.0, 1.0 - n * F.survival(a * xs + b))
        rows.append((n, a, b, float(np.max(np.abs(vals - target)))))
    return ConvergenceReport(sched.name, rows)

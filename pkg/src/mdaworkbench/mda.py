"""Tail diagnostics for the three max-domains of attraction.

Only necessary conditions are available, so every positive verdict reads
"consistent with" and never "member of":

* Fréchet (gamma > 0): infinite right endpoint, and the dyadic survival ratio
  (1 - F(2^(n+1))) / (1 - F(2^n)) has a limit inside (0, 1).
* Weibull (gamma < 0): finite right endpoint.
* Gumbel with infinite endpoint: finite mean excess f(t) and
  (1 - F(t + f(t))) / (1 - F(t)) -> 1/e.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .dist import as_1d, as_k
from .errors import DomainError

INV_E = math.exp(-1.0)


class NotApplicable(DomainError):
    """The diagnostic is undefined at this argument (beyond the endpoint, divergent mean excess)."""


class Verdict(str, enum.Enum):
    CONSISTENT_FRECHET = "ConsistentFrechet"
    CONSISTENT_WEIBULL = "ConsistentWeibull"
    CONSISTENT_GUMBEL = "ConsistentGumbel"
    EXCLUDED_FROM_D = "ExcludedFromD"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class DiagnosticConfig:
    n_max: int = 50
    t_steps: int = 60
    cauchy_tol: float = 1e-4
    cauchy_window: int = 5
    oscillation_window: int = 10
    gumbel_tol: float = 1e-3
    # drop t where the mean excess is below this fraction of t: t + f(t) loses f in rounding
    min_relative_excess: float = 1e-6


def frechet_ratio(F, n):
    """(1 - F(2^(n+1))) / (1 - F(2^n)) via log survivals."""
    F = as_1d(F)
    lo, hi = 2.0**n, 2.0 ** (n + 1)
    if F.right_endpoint() <= lo:
        raise NotApplicable(f"right endpoint {F.right_endpoint()} is not beyond 2^{n}")
    l_hi, l_lo = float(F.log_survival(hi)), float(F.log_survival(lo))
    if l_lo == -math.inf:
        raise NotApplicable(f"survival vanishes at 2^{n}")
    return min(math.exp(l_hi - l_lo), 1.0)


def mean_excess(F, t):
    """f(t) = integral_t^inf (1 - F) / (1 - F(t)); +inf when the tail integral diverges."""
    F = as_1d(F)
    lsf = float(F.log_survival(t))
    if lsf == -math.inf:
        raise DomainError(f"mean excess undefined: F({t}) = 1")
    ltail = F.log_tail_integral(t)
    if ltail == math.inf:
        return math.inf
    return math.exp(ltail - lsf)


def gumbel_ratio(F, t):
    """(1 - F(t + f(t))) / (1 - F(t))."""
    F = as_1d(F)
    f = mean_excess(F, t)
    if not math.isfinite(f):
        raise NotApplicable("mean excess is infinite; the Gumbel condition already fails")
    x = _snap_to_jump(F, t + f)
    return min(math.exp(float(F.log_survival(x)) - float(F.log_survival(t))), 1.0)


def _snap_to_jump(F, x, rel=1e-12):
    # t + f(t) can land on an atom exactly (lattice laws); rounding must not
    # decide which side of the jump is evaluated
    for c in F.components:
        j = c.jump_near(x, rel)
        if j is not None:
            return j
    return x


def limit_status(values, tol, window, osc_window):
    """Classify a sequence tail: ('converged', L), ('oscillating', None) or ('inconclusive', None)."""
    values = [v for v in values if np.isfinite(v)]
    if len(values) < window + 1:
        return "inconclusive", None
    tail = np.asarray(values[-(window + 1):])
    if np.max(np.abs(np.diff(tail))) < tol:
        return "converged", float(tail[-1])
    last = np.asarray(values[-osc_window:])
    if np.ptp(last) > 10 * tol:
        return "oscillating", None
    return "inconclusive", None


@dataclass
class DiagnosticReport:
    endpoint: float
    frechet_ratios: list = field(default_factory=list)
    frechet_status: str = "not-evaluated"
    frechet_limit: object = None
    gumbel_ratios: list = field(default_factory=list)
    gumbel_status: str = "not-evaluated"
    gumbel_limit: object = None
    tail_integral_finite: bool = True
    verdict: Verdict = Verdict.INCONCLUSIVE
    evidence: list = field(default_factory=list)

    def to_dict(self):
        def num(v):
            if isinstance(v, float) and not math.isfinite(v):
                return "inf" if v > 0 else "-inf"
            return v

        return {
            "verdict": self.verdict.value,
            "endpoint": num(self.endpoint),
            "frechet_status": self.frechet_status,
            "frechet_limit": num(self.frechet_limit),
            "frechet_ratios": [[n, num(r)] for n, r in self.frechet_ratios],
            "gumbel_status": self.gumbel_status,
            "gumbel_limit": num(self.gumbel_limit),
            "gumbel_ratios": [[t, num(r)] for t, r in self.gumbel_ratios],
            "tail_integral_finite": self.tail_integral_finite,
            "evidence": list(self.evidence),
        }


def _frechet(F, cfg, rep):
    for n in range(1, cfg.n_max + 1):
        try:
            rep.frechet_ratios.append((n, frechet_ratio(F, n)))
        except NotApplicable:
            continue
    status, lim = limit_status([r for _, r in rep.frechet_ratios], cfg.cauchy_tol,
                               cfg.cauchy_window, cfg.oscillation_window)
    if status == "converged" and lim < cfg.cauchy_tol:
        status, lim = "divergent-to-0", 0.0
    rep.frechet_status = status
    rep.frechet_limit = lim if status == "converged" else status
    ok = status == "converged" and cfg.cauchy_tol < lim < 1 - cfg.cauchy_tol
    violated = status in ("divergent-to-0", "oscillating") or (status == "converged" and not ok)
    if ok:
        rep.evidence.append(f"dyadic survival ratio converges to {lim:.6g} in (0, 1)")
    elif violated:
        rep.evidence.append(f"dyadic survival ratio is {status}"
                            + (f" (limit {lim:.6g})" if status == "converged" else "")
                            + ": no limit inside (0, 1), rules out gamma > 0")
    return ok, violated


def _gumbel(F, cfg, rep):
    endpoint = rep.endpoint
    rep.tail_integral_finite = math.isfinite(F.tail_integral(0.0))
    if not rep.tail_integral_finite:
        rep.gumbel_status = "tail-integral-divergent"
        rep.gumbel_limit = "tail-integral-divergent"
        rep.evidence.append("integral of 1 - F over [0, inf) diverges: rules out the Gumbel domain")
        return False, True
    for j in range(cfg.t_steps + 1):
        t = 2.0 ** (j / 2.0)
        if t >= endpoint or float(F.log_survival(t)) == -math.inf:
            break
        f = mean_excess(F, t)
        if f < cfg.min_relative_excess * t:
            break
        rep.gumbel_ratios.append((t, gumbel_ratio(F, t)))
    status, lim = limit_status([r for _, r in rep.gumbel_ratios], cfg.cauchy_tol,
                               cfg.cauchy_window, cfg.oscillation_window)
    rep.gumbel_status = status
    rep.gumbel_limit = lim if status == "converged" else status
    ok = status == "converged" and abs(lim - INV_E) < cfg.gumbel_tol
    violated = status == "oscillating" or (status == "converged" and not ok)
    if ok:
        rep.evidence.append(f"mean-excess survival ratio converges to {lim:.6g} ~ 1/e")
    elif violated:
        rep.evidence.append(f"mean-excess survival ratio is {status}"
                            + (f" with limit {lim:.6g} != 1/e" if status == "converged" else "")
                            + ": rules out the Gumbel domain with infinite endpoint")
    return ok, violated


def classify(F, config=None):
    """Evidence-based verdict from the necessary conditions of each domain."""
    cfg = config or DiagnosticConfig()
    F = as_1d(F)
    rep = DiagnosticReport(endpoint=F.right_endpoint())
    if math.isfinite(rep.endpoint):
        rep.verdict = Verdict.CONSISTENT_WEIBULL
        rep.evidence.append(f"finite right endpoint {rep.endpoint:.6g}: only gamma < 0 "
                            "(or Gumbel with finite endpoint, not diagnosed) remains possible")
        return rep
    rep.evidence.append("infinite right endpoint: rules out gamma < 0")
    f_ok, f_bad = _frechet(F, cfg, rep)
    g_ok, g_bad = _gumbel(F, cfg, rep)
    if f_ok:
        rep.verdict = Verdict.CONSISTENT_FRECHET
    elif g_ok:
        rep.verdict = Verdict.CONSISTENT_GUMBEL
    elif f_bad and g_bad:
        rep.verdict = Verdict.EXCLUDED_FROM_D
        rep.evidence.append("every domain has a violated necessary condition")
    else:
        rep.verdict = Verdict.INCONCLUSIVE
    return rep


def classify_marginal(F, config=None):
    """Classify the first-coordinate marginal; exclusion there certifies exclusion of F."""
    F = as_k(F)
    rep = classify(F.marginal(0), config)
    if F.dim > 1:
        if rep.verdict is Verdict.EXCLUDED_FROM_D:
            rep.evidence.append("first marginal lies outside D, hence so does the joint law")
        else:
            rep.evidence.append("verdict concerns the first marginal only")
    return rep

import math

import mpmath
import numpy as np
import pytest

from mdaworkbench.components import Exponential, Geometric, Normal, Pareto, Poisson, Uniform
from mdaworkbench.dist import Distribution1D, Lift1D, Product
from mdaworkbench.errors import DomainError
from mdaworkbench.mda import (
    INV_E, NotApplicable, Verdict, classify, classify_marginal, frechet_ratio, gumbel_ratio, limit_status,
    mean_excess,
)

U01 = Distribution1D.of(Uniform(0.0, 1.0))
PHI = Distribution1D.of(Normal(0.0, 1.0))
EXP1 = Distribution1D.of(Exponential(1.0))
PAR1 = Distribution1D.of(Pareto(1.0, 1.0))
PAR2 = Distribution1D.of(Pareto(2.0, 1.0))
GEO = Distribution1D.of(Geometric(0.5))


def normal_gumbel_ratio_oracle(t):
    """(1 - Phi(t + f(t))) / (1 - Phi(t)) at 50 digits, f from the closed-form tail integral."""
    mpmath.mp.dps = 50
    t = mpmath.mpf(t)
    sf = lambda x: mpmath.erfc(x / mpmath.sqrt(2)) / 2
    tail = mpmath.npdf(t) - t * sf(t)  # integral_t^inf (1 - Phi)
    return float(sf(t + tail / sf(t)) / sf(t))


class TestRatios:
    def test_frechet_examples(self):
        # closed form up to rounding of log(2^n) and log(2^(n+1))
        assert all(abs(frechet_ratio(PAR1, n) - 0.5) < 1e-14 for n in range(1, 51))
        assert all(abs(frechet_ratio(PAR2, n) - 0.25) < 1e-12 for n in range(1, 51))
        assert frechet_ratio(EXP1, 4) == pytest.approx(math.exp(-16.0), rel=1e-12)

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 1.7, 3.0, 6.0])
    def test_pareto_ratio_exact(self, alpha):
        F = Distribution1D.of(Pareto(alpha, 1.0))
        for n in range(1, 51):
            assert frechet_ratio(F, n) == pytest.approx(2.0 ** -alpha, abs=1e-12)

    def test_frechet_not_applicable_past_endpoint(self):
        with pytest.raises(NotApplicable):
            frechet_ratio(U01, 1)

    def test_mean_excess(self):
        assert mean_excess(EXP1, 3.0) == pytest.approx(1.0, rel=1e-12)
        assert mean_excess(U01, 0.5) == pytest.approx(0.25, rel=1e-12)
        assert mean_excess(PAR1, 2.0) == math.inf
        with pytest.raises(DomainError):
            mean_excess(U01, 1.0)

    def test_gumbel_ratio_exponential(self):
        for t in (1.0, 10.0, 100.0):
            assert gumbel_ratio(EXP1, t) == pytest.approx(INV_E, rel=1e-12)
        for t in np.linspace(0.0, 700.0, 71):
            assert abs(gumbel_ratio(EXP1, float(t)) - INV_E) < 1e-12

    def test_gumbel_ratio_normal_against_oracle(self):
        prev = None
        for t in (5.0, 10.0, 20.0):
            r = gumbel_ratio(PHI, t)
            assert r == pytest.approx(normal_gumbel_ratio_oracle(t), rel=1e-8)
            if prev is not None:
                assert abs(r - INV_E) < abs(prev - INV_E)
            prev = r

    def test_gumbel_ratio_geometric_is_constant(self):
        # t + f(t) always lands on the lattice: f(t) = 2 - frac(t) and the ratio is 2^-2
        vals = [gumbel_ratio(GEO, 8.0 + k + off) for k in range(6) for off in (0.0, 0.25, 0.5, 0.75)]
        assert np.allclose(vals, 0.25, rtol=0, atol=1e-15)
        assert limit_status(vals, 1e-4, 5, 10) == ("converged", pytest.approx(0.25))

    def test_gumbel_not_applicable_for_divergent_tail(self):
        with pytest.raises(NotApplicable):
            gumbel_ratio(PAR1, 2.0)

    def test_ratio_ranges(self):
        for F in (PHI, EXP1, PAR1, PAR2, GEO, Distribution1D.of(Poisson(3.0))):
            for n in range(1, 30):
                try:
                    assert 0.0 <= frechet_ratio(F, n) <= 1.0
                except NotApplicable:
                    pass
            for t in (0.5, 2.0, 8.0):
                if F.tail_integral(t) < math.inf:
                    assert mean_excess(F, t) >= 0.0
                    assert 0.0 <= gumbel_ratio(F, t) <= 1.0


class TestClassify:
    def test_examples(self):
        rep = classify(PAR1)
        assert rep.verdict is Verdict.CONSISTENT_FRECHET
        assert rep.frechet_limit == pytest.approx(0.5)
        assert classify(U01).verdict is Verdict.CONSISTENT_WEIBULL
        assert classify(U01).endpoint == 1.0
        geo = classify(GEO)
        assert geo.verdict is Verdict.EXCLUDED_FROM_D
        assert geo.frechet_limit == "divergent-to-0"
        assert geo.gumbel_status == "converged"
        assert geo.gumbel_limit == pytest.approx(0.25)

    def test_gumbel_consistent(self):
        assert classify(EXP1).verdict is Verdict.CONSISTENT_GUMBEL
        assert classify(PHI).verdict is Verdict.CONSISTENT_GUMBEL

    def test_poisson_excluded(self):
        assert classify(Distribution1D.of(Poisson(3.0))).verdict is Verdict.EXCLUDED_FROM_D

    def test_marginal_examples(self):
        assert classify_marginal(Product([PAR1, U01])).verdict is Verdict.CONSISTENT_FRECHET
        rep = classify_marginal(Product([GEO, PHI]))
        assert rep.verdict is Verdict.EXCLUDED_FROM_D
        assert any("joint law" in e for e in rep.evidence)
        assert classify_marginal(Lift1D(EXP1)).verdict is Verdict.CONSISTENT_GUMBEL

    @pytest.mark.parametrize("F", [
        U01, PHI, EXP1, PAR1, PAR2, GEO,
        Distribution1D.of(Poisson(3.0)),
        Distribution1D.of(Geometric(0.2)),
        Distribution1D([(0.5, Pareto(1.5, 1.0)), (0.5, Normal(0.0, 1.0))]),
        Distribution1D([(0.3, Exponential(2.0)), (0.7, Uniform(0.0, 1.0))]),
    ], ids=lambda F: repr(F)[:40])
    def test_decision_table(self, F):
        rep = classify(F)
        v = rep.verdict
        if v is Verdict.CONSISTENT_WEIBULL:
            assert math.isfinite(rep.endpoint)
        if v is Verdict.CONSISTENT_FRECHET:
            assert rep.endpoint == math.inf
            assert rep.frechet_status == "converged" and 0 < rep.frechet_limit < 1
        if v is Verdict.CONSISTENT_GUMBEL:
            assert rep.tail_integral_finite
            assert rep.gumbel_status == "converged" and abs(rep.gumbel_limit - INV_E) < 1e-3
        if v is Verdict.EXCLUDED_FROM_D:
            assert rep.endpoint == math.inf
            assert rep.frechet_status in ("divergent-to-0", "oscillating") or (
                rep.frechet_status == "converged" and not 0 < rep.frechet_limit < 1)
            assert not rep.tail_integral_finite or rep.gumbel_status == "oscillating" or (
                rep.gumbel_status == "converged" and abs(rep.gumbel_limit - INV_E) >= 1e-3)

    def test_report_serializes(self):
        import json
        d = classify(GEO).to_dict()
        assert json.loads(json.dumps(d))["verdict"] == "ExcludedFromD"

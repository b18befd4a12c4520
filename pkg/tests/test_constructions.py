import math

import numpy as np
import pytest
from scipy import special

from conftest import random_mixture
from mdaworkbench.components import Atom, GeometricAtomTail, Normal, Uniform
from mdaworkbench.constructions import (
    dense_projection, escape_blocks, escape_from_D, escape_start_index, escape_support_bound,
)
from mdaworkbench.dist import Distribution1D, Lift1D, Product
from mdaworkbench.errors import DomainError
from mdaworkbench.gev import convergence_report
from mdaworkbench.levy import in_T, levy_distance
from mdaworkbench.mda import frechet_ratio

U01 = Distribution1D.of(Uniform(0.0, 1.0))
PHI = Distribution1D.of(Normal(0.0, 1.0))
NS = [10**2, 10**4, 10**6]


def partial_integral(G, lo, hi):
    return G.sf_integral(lo, hi)


class TestDenseProjection:
    def test_uniform_example(self):
        gs = dense_projection(U01, 0.2)
        assert gs.x0[0] == pytest.approx(0.9, abs=1e-12)
        assert gs.xstar[0] == pytest.approx(special.ndtri(0.9), abs=1e-12)
        assert gs.xstar[0] == pytest.approx(1.28155, abs=1e-5)
        assert gs.result.cdf_k([0.5]) == pytest.approx(0.5)
        assert gs.result.cdf_k([0.9]) == pytest.approx(0.9, abs=1e-12)

    def test_product_example(self):
        gs = dense_projection(Product([U01, U01]), 0.2)
        assert np.allclose(gs.xstar, special.ndtri(math.sqrt(0.9)), atol=1e-12)
        # the quoted 1.63224 is good to about 3e-5; Phi^-1(0.948683) = 1.632219
        assert gs.xstar[0] == pytest.approx(1.63224, abs=1e-4)

    def test_normal_glued_to_itself(self):
        gs = dense_projection(PHI, 0.5)
        q = special.ndtri(0.75)
        assert gs.x0[0] == pytest.approx(q, abs=1e-12)
        assert gs.xstar[0] == pytest.approx(q, abs=1e-12)
        x = np.linspace(-6, 6, 241)
        assert np.allclose(gs.result.cdf_k(x[:, None]), PHI.cdf(x), atol=1e-12)
        assert levy_distance(PHI, gs.as_1d()) <= 1e-9

    def test_mixture_form_matches_oracle(self, rng):
        for _ in range(10):
            F = random_mixture(rng)
            gs = dense_projection(F, float(rng.uniform(0.05, 0.9)))
            x = np.linspace(-8, 12, 401)
            assert np.allclose(gs.as_1d().cdf(x), gs.result.cdf_k(x[:, None]), atol=1e-12)

    def test_inside_truncation_family(self, rng):
        for _ in range(20):
            F = random_mixture(rng)
            eps = float(rng.uniform(0.02, 0.98))
            gs = dense_projection(F, eps)
            assert in_T(gs.result, Lift1D(F), eps / 2)
            assert levy_distance(F, gs.as_1d()) <= eps / 2 + 1e-9

    @pytest.mark.parametrize("base", [U01, PHI, Product([U01, U01]), Product([PHI, U01])], ids=repr)
    def test_translated_schedule_converges(self, base):
        gs = dense_projection(base, 0.2)
        x = np.linspace(-3, 6, 91)
        if gs.dim > 1:
            x = np.stack(np.meshgrid(x, x, indexing="ij"), axis=-1).reshape(-1, 2)
        rep = convergence_report(gs.result, gs.schedule(), gs.target(), NS, x)
        assert rep.strictly_decreasing

    def test_literal_schedule_diverges(self):
        gs = dense_projection(U01, 0.2)
        rep = convergence_report(gs.result, gs.literal_schedule(), gs.target(), NS, np.linspace(-3, 6, 181))
        assert rep.errors[0] < rep.errors[1] < rep.errors[2]

    def test_eps_guard(self):
        for eps in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(DomainError):
                dense_projection(U01, eps)


class TestSupportEscape:
    def test_uniform(self):
        G = escape_support_bound(U01, 1.0, 0.5)
        assert G.right_endpoint() == 2.0
        assert G.interval_mass(2.0, 2.0) == pytest.approx(0.25)
        assert G.cdf(0.75) == pytest.approx(0.75)
        assert levy_distance(U01, G) <= 0.25 + 1e-9

    def test_atom(self):
        A = Distribution1D.of(Atom(0.0))
        G = escape_support_bound(A, 1.0, 0.1)
        assert G.interval_mass(0.0, 0.0) == pytest.approx(0.95)
        assert G.interval_mass(2.0, 2.0) == pytest.approx(0.05)

    def test_endpoint_floor(self):
        for t in (1.0, 1.5, 2.999, 3.0, 7.25):
            G = escape_support_bound(U01, t, 0.3)
            assert G.right_endpoint() == math.floor(t + 1) > t

    def test_guards(self):
        with pytest.raises(DomainError):
            escape_support_bound(Distribution1D.of(Uniform(0.0, 3.0)), 1.0, 0.5)
        with pytest.raises(DomainError):
            escape_support_bound(U01, 0.5, 0.5)


class TestEscapeFromD:
    def test_uniform_example(self):
        G = escape_from_D(U01, 0.5)
        assert G.gen_inverse(0.75) == pytest.approx(0.75)
        j0, blocks = escape_blocks(G)
        assert j0 == 0
        for loc, mass in zip((3.0, 9.0, 33.0, 129.0), (0.125, 0.0625, 0.03125, 0.015625)):
            assert G.interval_mass(loc, loc) == pytest.approx(mass, rel=1e-12)
        assert in_T(G, U01, 0.25)

    def test_normal_example(self):
        G = escape_from_D(PHI, 0.2)
        q = special.ndtri(0.9)
        assert escape_start_index(q) == 0
        assert escape_blocks(G)[0] == 0
        assert G.interval_mass(3.0, 3.0) == pytest.approx(0.05, rel=1e-12)

    def test_start_index(self):
        assert escape_start_index(0.5) == 0
        assert escape_start_index(2.0) == 1
        assert escape_start_index(7.9) == 1
        assert escape_start_index(8.0) == 2

    @pytest.mark.parametrize("F,eps", [(U01, 0.5), (PHI, 0.2), (Distribution1D.of(Normal(20.0, 1.0)), 0.3)])
    def test_blocks_empty_and_integral_diverges(self, F, eps):
        G = escape_from_D(F, eps)
        j0, blocks = escape_blocks(G)
        for lo, hi in blocks:
            assert G.interval_mass(lo, hi) == 0.0
        assert G.tail_integral(0.0) == math.inf
        for j in range(j0, j0 + 12):
            lo, hi = 2.0 ** (2 * j + 1) + 1, 2.0 ** (2 * j + 3) + 1
            expect = (eps / 2) * 2.0 ** (-(j - j0) - 1) * 6 * 4.0**j
            assert partial_integral(G, lo, hi) == pytest.approx(expect, rel=1e-9)

    def test_empty_block_ratio_is_one(self):
        G = escape_from_D(U01, 0.5)
        j0, _ = escape_blocks(G)
        for j in range(j0, j0 + 20):
            assert abs(frechet_ratio(G, 2 * j + 2) - 1.0) < 1e-12

    def test_tail_component_normalized(self):
        t = GeometricAtomTail(3)
        assert t.cdf(2.0**7) == 0.0
        assert t.cdf(2.0**7 + 1) == 0.5

"""Distribution builders: projection into D(G_0^k), and two escape constructions.

``dense_projection`` keeps the lower (1 - eps/2) part of a law and replaces the
rest with a translated standard normal tail, which lies in the Gumbel domain.
``escape_support_bound`` pushes a bounded law past a given endpoint.
``escape_from_D`` keeps the lower part and appends a sparse atom tail with
empty dyadic blocks and a divergent survival integral.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .components import GeometricAtomTail, Normal, Truncated
from .dist import Distribution1D, Glued, Lift1D, Product, as_1d, as_k
from .errors import DomainError
from .gev import gumbel_product_target, normal_schedule
from .levy import top_up_at, truncate_tail


def _check_eps(eps):
    if not 0 < eps < 1:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")


def standard_normal_k(k):
    phi = Distribution1D.of(Normal(0.0, 1.0))
    return Lift1D(phi) if k == 1 else Product([phi] * k)


@dataclass(frozen=True)
class GluedSpec:
    base: object
    eps: float
    x0: np.ndarray
    xstar: np.ndarray
    result: Glued

    @property
    def dim(self):
        return self.result.dim

    def schedule(self):
        """Norming (a_n, b_n + x0 - xstar) carrying the normal limit over to the glued law.

        Above x0 the glued law is Phi^k translated by x0 - xstar, so
        F(a_n x + b_n + x0 - xstar) = Phi^k(a_n x + b_n) once a_n x + b_n clears xstar.
        """
        return normal_schedule().translated(float(self.x0[0] - self.xstar[0]), name="normal-translated")

    def literal_schedule(self):
        """(a_n, a_n (x0 - xstar) + b_n) as printed; the offset (1 - a_n)(x0 - xstar) / a_n diverges."""
        return normal_schedule().shifted(float(self.x0[0] - self.xstar[0]), name="normal-literal")

    def target(self):
        return gumbel_product_target(self.dim)

    def as_1d(self):
        """The k = 1 glued law as a mixture: base below x0, an atom at x0, a truncated normal above."""
        if self.dim != 1:
            raise DomainError("only the one-dimensional glued law has a mixture form")
        base = as_1d(self.base)
        x0, xs = float(self.x0[0]), float(self.xstar[0])
        parts = base.restricted_below(x0)
        w_tail = float(special.ndtr(-xs))
        parts += top_up_at(base, x0, w_tail)
        parts.append((w_tail, Truncated(Normal(x0 - xs, 1.0), lower=x0)))
        return Distribution1D.normalized(parts)


def dense_projection(F0, eps):
    """Glue F0 below its (1 - eps/2) diagonal quantile to a shifted standard normal above it."""
    _check_eps(eps)
    base = as_k(F0)
    k = base.dim
    q = base.diagonal_upper_quantile(eps / 2.0)
    if not math.isfinite(q):
        raise DomainError("diagonal quantile is infinite")
    x0 = np.full(k, q)
    # Phi^-1((1 - eps/2)^(1/k)) through the upper tail: 1 - (1 - eps/2)^(1/k) = -expm1(log1p(-eps/2)/k)
    xstar = np.full(k, -float(special.ndtri(-math.expm1(math.log1p(-eps / 2.0) / k))))
    result = Glued(base, standard_normal_k(k), x0, xstar)
    return GluedSpec(base=base, eps=eps, x0=x0, xstar=xstar, result=result)


def escape_support_bound(F, t, eps):
    """Move eps/2 of mass to floor(t + 1) so the right endpoint exceeds t."""
    _check_eps(eps)
    if t < 1:
        raise DomainError("t must be at least 1")
    F = as_1d(F)
    if F.right_endpoint() > t:
        raise DomainError(f"right endpoint {F.right_endpoint()} exceeds t = {t}; F is not in M_t")
    return truncate_tail(F, eps / 2.0, float(math.floor(t + 1)))


def escape_start_index(q):
    """Smallest j >= 0 with 2^(2j+1) > q."""
    j = 0
    while 2.0 ** (2 * j + 1) <= q:
        j += 1
    return j


def escape_from_D(F, eps):
    """Member of T(F, eps/2) with empty blocks [2^(2j+2), 2^(2j+3)] and divergent survival integral.

    Above q = F^<-(1 - eps/2) the law carries atoms at 2^(2j+1) + 1, j >= j0,
    with masses (eps/2) 2^-(j - j0 + 1).
    """
    _check_eps(eps)
    F = as_1d(F)
    q = float(F.upper_quantile(eps / 2.0))
    j0 = escape_start_index(q)
    parts = F.restricted_below(q) + top_up_at(F, q, eps / 2.0)
    parts.append((eps / 2.0, GeometricAtomTail(j0)))
    return Distribution1D.normalized(parts)


def escape_blocks(G):
    """(j0, [(2^(2j+2), 2^(2j+3)) ...]) for the atom tail of an escape_from_D result."""
    tails = [c for c in G.components if isinstance(c, GeometricAtomTail)]
    if not tails:
        raise DomainError("not an escape_from_D result: no geometric atom tail")
    j0 = tails[0].start_index
    return j0, [(2.0 ** (2 * j + 2), 2.0 ** (2 * j + 3)) for j in range(j0, j0 + 40)]

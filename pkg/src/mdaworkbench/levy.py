"""Lévy metric, open balls, and the truncation family T(F, eps).

The sandwich condition ``F(x - eps e) - eps <= G(x) <= F(x + eps e) + eps``
is checked on a finite candidate set: breakpoints of both laws shifted by 0
and +-eps (with their left limits), quantile grids, and a uniform backstop
grid. For the supported component algebra violations are attained on or
next to these points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .components import Atom
from .dist import Distribution1D, DistributionK, Lift1D, as_1d, as_k
from .errors import DomainError, UnsupportedFormError

UNIFORM_POINTS = 512
QUANTILE_POINTS = 512
AXIS_UNIFORM_POINTS = 32
AXIS_QUANTILE_POINTS = 16
MAX_GRID = 10**6
BISECTION_DEPTH = 31
EQ_TOL = 1e-9
# relative allowance for rounding in CDF and survival evaluations (4 ulp)
ROUND_REL = 4 * np.finfo(float).eps
REFINE_BRACKETS = 6
REFINE_ITERS = 40
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class OpenBall:
    """B(center, radius) = {G : d(center, G) < radius}."""

    center: object
    radius: float

    def __post_init__(self):
        if not 0 < self.radius <= 1:
            raise DomainError(f"ball radius must lie in (0, 1], got {self.radius}")

    def contains_ball(self, inner, slack=1e-12):
        """Sufficient metric certificate for ``inner`` being a subset of ``self``."""
        return levy_distance(self.center, inner.center) + inner.radius <= self.radius + slack


def _finite(a):
    a = np.asarray(a, dtype=np.float64).ravel()
    return a[np.isfinite(a)]


def _anchor_points(dists, quantiles):
    pts = [_finite(d.breakpoints()) for d in dists]
    pts += [_finite(d.quantile_grid(quantiles)) for d in dists]
    return np.unique(np.concatenate(pts))


def _shifted(base, eps):
    shifts = (0.0, eps, -eps, EQ_TOL, -EQ_TOL) if eps > 0 else (0.0, EQ_TOL, -EQ_TOL)
    moved = np.concatenate([base + s for s in shifts])
    return np.concatenate((moved, np.nextafter(moved, -np.inf)))


def _uniform(anchors, n):
    if anchors.size == 0:
        return np.linspace(-1.0, 1.0, n)
    return np.linspace(anchors.min() - 1.0, anchors.max() + 1.0, n)


def candidate_points_1d(F, G, eps):
    anchors = _anchor_points((F, G), QUANTILE_POINTS)
    return np.unique(np.concatenate((_shifted(anchors, eps), _uniform(anchors, UNIFORM_POINTS))))


def _axis_candidates(F, G, i, eps):
    anchors = [_finite(F.axis_breakpoints(i)), _finite(G.axis_breakpoints(i)),
               _finite(F.axis_quantiles(i, AXIS_QUANTILE_POINTS)),
               _finite(G.axis_quantiles(i, AXIS_QUANTILE_POINTS))]
    anchors = np.unique(np.concatenate(anchors))
    shifts = (0.0, eps, -eps) if eps > 0 else (0.0,)
    moved = np.concatenate([anchors + s for s in shifts])
    moved = np.concatenate((moved, np.nextafter(moved, -np.inf)))
    return np.unique(np.concatenate((moved, _uniform(anchors, AXIS_UNIFORM_POINTS))))


def candidate_points_k(F, G, eps):
    """Tensor grid of per-axis candidates plus the diagonal; shape (N, k)."""
    axes = [_axis_candidates(F, G, i, eps) for i in range(F.dim)]
    size = math.prod(len(a) for a in axes)
    if size > MAX_GRID:
        raise DomainError(f"candidate grid of {size} points exceeds the cap of {MAX_GRID}")
    mesh = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, F.dim)
    diag_base = np.unique(np.concatenate(
        [_finite(F.diagonal_breakpoints()), _finite(G.diagonal_breakpoints())] + axes))
    diag = _shifted(diag_base, eps)
    diag = np.repeat(diag[:, None], F.dim, axis=1)
    return np.concatenate((mesh, diag))


def _check_dims(F, G):
    F, G = as_k(F), as_k(G)
    if F.dim != G.dim:
        raise DomainError(f"dimension mismatch: {F.dim} vs {G.dim}")
    return F, G


def _pick(up, upper_fn, xu, lower_fn, xl):
    """upper_fn(xu) where ``up``, lower_fn(xl) elsewhere; each is evaluated only where used.

    ``lower_fn`` may be None, in which case ``xl`` already holds the values.
    """
    out = np.empty(up.shape)
    out[up] = upper_fn(xu[up])
    down = ~up
    out[down] = xl[down] if lower_fn is None else lower_fn(xl[down])
    return out


class _Sandwich1D:
    """Sandwich test for a fixed pair of one-dimensional laws; anchors are built once.

    Each candidate is a triple of arguments (x - eps, x, x + eps) for
    (F, G, F). Triples are anchored so that the anchor itself, not a rounded
    x +- eps, lands on F's argument; this keeps one-sided limits at atoms
    exact. Every triple is checked with right values and with left limits.

    Where G > 1/2 the comparison runs on survivals,
    1 - F(x + eps) - eps <= 1 - G(x) <= 1 - F(x - eps) + eps, which keeps
    absolute accuracy when every CDF value is within 1e-16 of 1.
    """

    def __init__(self, f, g):
        self.f, self.g = f, g
        self.anchors = _anchor_points((f, g), QUANTILE_POINTS)
        self.grid = _uniform(self.anchors, UNIFORM_POINTS)

    def triples(self, eps):
        y, z = self.anchors, self.grid
        p = np.concatenate((y - eps, y - 2 * eps, y, z - eps))
        q = np.concatenate((y, y - eps, y + eps, z))
        r = np.concatenate((y + eps, y, y + 2 * eps, z + eps))
        return p, q, r

    def __call__(self, eps):
        f, g = self.f, self.g
        p, q, r = self.triples(eps)
        gc, gl = g.cdf(q), g.cdf_left(q)
        up_c, up_l = gc > 0.5, gl > 0.5
        lo = np.concatenate((_pick(up_c, f.survival, r, f.cdf, p), _pick(up_l, f.survival_left, r, f.cdf_left, p)))
        mid = np.concatenate((_pick(up_c, g.survival, q, None, gc), _pick(up_l, g.survival_left, q, None, gl)))
        hi = np.concatenate((_pick(up_c, f.survival, p, f.cdf, r), _pick(up_l, f.survival_left, p, f.cdf_left, r)))
        return _kernels.sandwich_ok(lo, mid, hi, float(eps), ROUND_REL)

    def margins(self, x, eps):
        """Slack of the lower and upper inequality at right values; negative means violated."""
        f, g = self.f, self.g
        gc = g.cdf(x)
        sg = g.survival(x)
        up = gc > 0.5
        fm = np.where(up, f.survival(x + eps), f.cdf(x - eps))
        fp = np.where(up, f.survival(x - eps), f.cdf(x + eps))
        gv = np.where(up, sg, gc)
        m_lo = gv - fm + eps + ROUND_REL * (np.abs(fm) + np.abs(gv))
        m_hi = fp + eps - gv + ROUND_REL * (np.abs(gv) + np.abs(fp))
        return m_lo, m_hi

    def refined(self, eps):
        """Discrete test plus a golden-section search for interior minima of each margin.

        Between candidates both CDFs may be smooth, and a violation can peak
        where their slopes match. The search starts from the REFINE_BRACKETS
        smallest margins per side; any point it visits is a valid test point.
        """
        if not self(eps):
            return False
        x = np.unique(self.triples(eps)[1])
        x = x[np.isfinite(x)]
        if x.size < 3:
            return True
        m = self.margins(x, eps)
        lo_parts, hi_parts, side_parts = [], [], []
        for side in (0, 1):
            idx = np.argsort(m[side])[:REFINE_BRACKETS]
            lo_parts.append(x[np.maximum(idx - 1, 0)])
            hi_parts.append(x[np.minimum(idx + 1, x.size - 1)])
            side_parts.append(np.full(idx.size, side))
        a, b = np.concatenate(lo_parts), np.concatenate(hi_parts)
        side = np.concatenate(side_parts)
        rows = np.arange(side.size)

        def value(t):
            return np.stack(self.margins(t, eps))[side, rows]

        c, d = b - _INVPHI * (b - a), a + _INVPHI * (b - a)
        fc, fd = value(c), value(d)
        best = np.minimum(fc, fd)
        for _ in range(REFINE_ITERS):
            left = fc < fd
            b = np.where(left, d, b)
            a = np.where(left, a, c)
            c_new = np.where(left, b - _INVPHI * (b - a), d)
            d_new = np.where(left, c, a + _INVPHI * (b - a))
            probe = np.where(left, c_new, d_new)
            fp = value(probe)
            fc, fd = np.where(left, fp, fd), np.where(left, fc, fp)
            c, d = c_new, d_new
            best = np.minimum(best, fp)
            if np.any(best < 0):
                return False
        return True


def _sandwich_test(F, G):
    F, G = _check_dims(F, G)
    if isinstance(F, Lift1D) and isinstance(G, Lift1D):
        return _Sandwich1D(F.d, G.d)
    e = np.ones(F.dim)

    def test(eps):
        x = candidate_points_k(F, G, eps)
        return _kernels.sandwich_ok(F.cdf_k(x - eps * e), G.cdf_k(x), F.cdf_k(x + eps * e), float(eps),
                                    ROUND_REL)

    return test


def sandwich_holds(F, G, eps):
    """True iff F(x - eps e) - eps <= G(x) <= F(x + eps e) + eps on the candidate set."""
    test = _sandwich_test(F, G)
    return getattr(test, "refined", test)(eps)


def levy_bracket(F, G, tol=1e-9):
    """(lo, hi) with the sandwich failing at lo and holding at hi, hi - lo <= tol; (0, 0) for equal laws.

    In one dimension bisection runs on the discrete candidate test and the
    endpoint is then confirmed with the refined test, moving up if needed.
    """
    if not tol > 0:
        raise DomainError("tolerance must be positive")
    test = _sandwich_test(F, G)
    final = getattr(test, "refined", test)
    if final(0.0):
        return 0.0, 0.0
    lo, hi = _bisect(test, 0.0, 1.0, tol)
    if final is not test and not final(hi):
        lo, step = hi, max(tol, hi - lo)
        while lo + step < 1.0 and not final(lo + step):
            lo, step = lo + step, 2.0 * step
        lo, hi = _bisect(final, lo, min(1.0, lo + step), tol)
    return lo, hi


def _bisect(test, lo, hi, tol):
    depth = max(BISECTION_DEPTH, math.ceil(math.log2(max(hi - lo, tol) / tol)))
    for _ in range(depth):
        if hi - lo <= tol:
            break
        mid = (lo + hi) / 2.0
        if test(mid):
            hi = mid
        else:
            lo = mid
    return lo, hi


def levy_distance(F, G, tol=1e-9):
    """Lévy distance, reported as the upper bisection endpoint."""
    return levy_bracket(F, G, tol)[1]


def in_ball(ball, G):
    return levy_distance(ball.center, G) < ball.radius


def _grid_below(F, G, q):
    """Candidate points strictly below q e (componentwise <= and not equal)."""
    if isinstance(F, Lift1D) and isinstance(G, Lift1D):
        f, g = F.d, G.d
        x = candidate_points_1d(f, g, 0.0)
        x = np.concatenate((x[x < q], [np.nextafter(q, -np.inf)]))
        return x[:, None]
    x = candidate_points_k(F, G, 0.0)
    qe = np.full(F.dim, q)
    keep = np.all(x <= qe, axis=1) & np.any(x != qe, axis=1)
    return x[keep]


def in_T(G, F, eps):
    """Membership of G in T(F, eps): G = F below q e and G(q e) >= 1 - eps, q = F^<-(1 - eps)."""
    F, G = _check_dims(F, G)
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    q = F.diagonal_upper_quantile(eps)
    x = _grid_below(F, G, q)
    if x.size and np.max(np.abs(G.cdf_k(x) - F.cdf_k(x))) > EQ_TOL:
        return False
    if isinstance(G, Lift1D):
        return bool(G.d.survival(q) <= eps * (1.0 + 1e-9))
    return bool(G.cdf_k(np.full(F.dim, q)) >= 1.0 - eps - 1e-12)


def truncate_tail(F, eps, atom_at):
    """Canonical member of T(F, eps): F below q, mass up to 1 - eps at q, an atom of mass eps at ``atom_at``.

    Only one-dimensional laws are supported; the k-dimensional analogue has no
    canonical CDF oracle.
    """
    if isinstance(F, DistributionK) and F.dim != 1:
        raise UnsupportedFormError("truncate_tail is defined for one-dimensional laws only")
    F = as_1d(F)
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    q = float(F.upper_quantile(eps))
    if not atom_at > q:
        raise DomainError(f"atom location {atom_at} must exceed the quantile {q}")
    parts = F.restricted_below(q)
    parts += top_up_at(F, q, eps)
    parts.append((eps, Atom(float(atom_at))))
    return Distribution1D.normalized(parts)


def top_up_at(F, q, eps):
    """The atom at q that lifts F restricted to (-inf, q) to total mass 1 - eps.

    Its mass is P(X >= q) - eps, computed from survivals so that it stays
    accurate when eps is far below the spacing of doubles near 1.
    """
    mass = float(F.survival_left(q)) - eps
    return [(mass, Atom(q))] if mass > 1e-9 * eps else []


def levy_grid_oracle(F, G, step=1e-3):
    """Brute-force Lévy distance on a uniform x grid with eps restricted to multiples of ``step``.

    Independent of the candidate-set path: no breakpoints, no bisection.
    """
    F, G = as_1d(F), as_1d(G)
    max_shift = int(round(1.0 / step))
    lows = [float(d.gen_inverse(1e-9)) for d in (F, G)]
    highs = [float(d.gen_inverse(1.0 - 1e-9)) for d in (F, G)]
    lo, hi = min(lows) - 1.0 - step, max(highs) + 1.0 + step
    n = int(math.ceil((hi - lo) / step)) + 1
    if n > 5 * 10**6:
        raise DomainError("oracle grid too large")
    x = lo + step * np.arange(n)
    s = _kernels.levy_grid_oracle(F.cdf(x), G.cdf(x), max_shift)
    return s * step

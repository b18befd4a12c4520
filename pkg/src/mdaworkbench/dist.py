"""Distributions on R and R^k.

``Distribution1D`` is a finite mixture of closed-form components. The
k-dimensional forms are CDF oracles: a lifted 1-D law, a product of
independent marginals, or the two-branch glued form used to push an
arbitrary law into the Gumbel domain of attraction.

Extended reals (right endpoints, divergent tail integrals) are plain floats
that may be ``math.inf``.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.special import logsumexp

from .components import Atom, Component, Shifted, Truncated
from .errors import DomainError, UnsupportedFormError

WEIGHT_TOL = 1e-12
QUANTILE_TOL = 1e-12


def _arr(x):
    return np.asarray(x, dtype=np.float64)


def _logsumexp0(terms):
    # log-sum-exp along axis 0; all -inf columns stay -inf
    top = terms.max(axis=0)
    safe = np.where(np.isfinite(top), top, 0.0)
    with np.errstate(divide="ignore"):
        return safe + np.log(np.exp(terms - safe).sum(axis=0))


class Distribution1D:
    """Finite mixture ``sum_i w_i * C_i`` of components."""

    def __init__(self, parts):
        parts = [(float(w), c) for w, c in parts]
        if not parts:
            raise DomainError("a distribution needs at least one component")
        for w, c in parts:
            if not w > 0:
                raise DomainError(f"component weight must be positive, got {w}")
            if not isinstance(c, Component):
                raise DomainError(f"not a component: {c!r}")
        total = math.fsum(w for w, _ in parts)
        if abs(total - 1.0) > WEIGHT_TOL:
            raise DomainError(f"component weights sum to {total!r}, not 1")
        self.weights = np.array([w for w, _ in parts])
        self.components = tuple(c for _, c in parts)
        self._split_atoms()

    def _split_atoms(self):
        # all atoms are evaluated together through sorted prefix/suffix sums
        atoms = sorted((c.location, w) for w, c in self.parts if isinstance(c, Atom))
        self._others = [(w, c) for w, c in self.parts if not isinstance(c, Atom)]
        self._atom_locs = np.array([a for a, _ in atoms])
        w = np.array([w for _, w in atoms])
        self._atom_below = np.concatenate(([0.0], np.cumsum(w)))
        self._atom_above = np.concatenate((np.cumsum(w[::-1])[::-1], [0.0]))

    def _atoms_cdf(self, x, side):
        return self._atom_below[np.searchsorted(self._atom_locs, x, side=side)]

    def _atoms_sf(self, x, side):
        return self._atom_above[np.searchsorted(self._atom_locs, x, side=side)]

    @classmethod
    def of(cls, component):
        return cls([(1.0, component)])

    @classmethod
    def normalized(cls, parts, drop_below=0.0):
        """Build from weights that may carry rounding drift; tiny parts are dropped."""
        parts = [(w, c) for w, c in parts if w > drop_below]
        total = math.fsum(w for w, _ in parts)
        return cls([(w / total, c) for w, c in parts])

    @property
    def parts(self):
        return list(zip(self.weights.tolist(), self.components))

    dim = 1

    def __repr__(self):
        inner = ", ".join(f"{w:.6g}*{c!r}" for w, c in self.parts)
        return f"Distribution1D({inner})"

    def __eq__(self, other):
        return isinstance(other, Distribution1D) and self.parts == other.parts

    def __hash__(self):
        return hash(tuple(self.parts))

    # -- pointwise functions -------------------------------------------------

    def cdf(self, x):
        x = _arr(x)
        out = self._atoms_cdf(x, "right")
        for w, c in self._others:
            out = out + w * c.cdf(x)
        return np.clip(out, 0.0, 1.0)

    def cdf_left(self, x):
        x = _arr(x)
        out = self._atoms_cdf(x, "left")
        for w, c in self._others:
            out = out + w * c.cdf_left(x)
        return np.clip(out, 0.0, 1.0)

    def _log_sf(self, x, left):
        if len(self.components) == 1:
            c = self.components[0]
            return c.log_sf_left(x) if left else c.log_sf(x)
        rows = [math.log(w) + (c.log_sf_left(x) if left else c.log_sf(x)) for w, c in self._others]
        if self._atom_locs.size:
            with np.errstate(divide="ignore"):
                rows.append(np.log(self._atoms_sf(x, "left" if left else "right")))
        if len(rows) == 1:
            return np.minimum(rows[0], 0.0)
        return np.minimum(_logsumexp0(np.stack(rows)), 0.0)

    def log_survival(self, x):
        """log(1 - F(x)); -inf where F(x) = 1."""
        return self._log_sf(_arr(x), left=False)

    def survival(self, x):
        return np.exp(self.log_survival(x))

    def survival_left(self, x):
        """P(X >= x)."""
        return np.exp(self._log_sf(_arr(x), left=True))

    # -- support ------------------------------------------------------------

    def right_endpoint(self):
        return max(c.support()[1] for c in self.components)

    def left_endpoint(self):
        return min(c.support()[0] for c in self.components)

    def breakpoints(self):
        bps = [c.breakpoints() for c in self.components]
        return np.unique(np.concatenate(bps)) if bps else np.array([])

    def jumps(self):
        js = [c.jumps() for c in self.components]
        return np.unique(np.concatenate(js))

    # -- quantiles ----------------------------------------------------------

    def gen_inverse(self, p):
        """inf{t : F(t) >= p} for p in (0, 1]; vectorized over p."""
        p = _arr(p)
        if np.any((p <= 0) | (p > 1)) or np.any(np.isnan(p)):
            raise DomainError("generalized inverse needs p in (0, 1]")
        if len(self.components) == 1:
            out = self.components[0].quantile(p)
            return out if out.shape else float(out)
        qs = np.stack([c.quantile(p) for c in self.components])
        lo = qs.min(axis=0)
        hi = qs.max(axis=0)
        out = np.where(np.isinf(hi), math.inf, hi)
        finite = np.isfinite(hi)
        if np.any(finite):
            out[finite] = self._bisect(p[finite], lo[finite], hi[finite])
        return out if out.shape else float(out)

    def _bisect(self, p, lo, hi):
        # answer lies in [lo, hi]; cdf(hi) >= p by construction
        done = self.cdf(lo) >= p
        result = np.where(done, lo, hi)
        lo, hi = lo.copy(), hi.copy()
        active = ~done
        for _ in range(2200):
            if not np.any(active):
                break
            mid = lo + (hi - lo) / 2.0
            width_ok = (hi - lo) <= QUANTILE_TOL * np.maximum(1.0, np.abs(hi))
            stuck = (mid <= lo) | (mid >= hi)
            active = active & ~width_ok & ~stuck
            up = self.cdf(mid) >= p
            hi = np.where(active & up, mid, hi)
            lo = np.where(active & ~up, mid, lo)
        result = np.where(done, result, hi)
        # inf-semantics: snap to a breakpoint inside (lo, hi] when one qualifies
        bps = self.breakpoints()
        if bps.size:
            for i in np.flatnonzero(~done):
                cand = bps[(bps > lo[i]) & (bps <= hi[i])]
                if cand.size:
                    ok = cand[self.cdf(cand) >= p[i]]
                    if ok.size:
                        result[i] = ok.min()
        return result

    def upper_quantile(self, s):
        """inf{t : 1 - F(t) <= s}, i.e. gen_inverse(1 - s), resolved in survival space.

        Keeps full relative precision when s is below the spacing of doubles near 1.
        """
        s = float(s)
        if not 0 <= s < 1:
            raise DomainError("upper quantile needs s in [0, 1)")
        if s == 0:
            return self.right_endpoint()
        log_s = math.log(s)

        def done(t):
            return float(self.log_survival(t)) <= log_s

        cands = [float(c.isf(s)) for c in self.components]
        cands = [v for v in cands if math.isfinite(v)] or [0.0]
        lo, hi = min(cands), max(cands)
        for _ in range(2100):
            if done(hi):
                break
            hi = hi + max(1.0, abs(hi))
        else:
            return math.inf
        if done(lo):
            for _ in range(2100):
                lo = lo - max(1.0, abs(lo))
                if not done(lo):
                    break
        # invariant: not done(lo), done(hi)
        for _ in range(2200):
            mid = lo + (hi - lo) / 2.0
            if (hi - lo) <= QUANTILE_TOL * max(1.0, abs(hi)) or mid <= lo or mid >= hi:
                break
            if done(mid):
                hi = mid
            else:
                lo = mid
        bps = self.breakpoints()
        cand = bps[(bps > lo) & (bps <= hi)]
        for b in cand:
            if done(b):
                return float(b)
        return hi

    def quantile_grid(self, n):
        """gen_inverse at n interior probability levels (i + 1/2) / n."""
        levels = (np.arange(n) + 0.5) / n
        return np.atleast_1d(self.gen_inverse(levels))

    # -- integrals and masses -----------------------------------------------

    def tail_integral(self, t):
        """Integral of 1 - F over [t, inf); +inf when any component diverges."""
        total = 0.0
        for w, c in self.parts:
            v = c.tail_integral(t)
            if not math.isfinite(v):
                return math.inf
            total += w * v
        return total

    def log_tail_integral(self, t):
        terms = []
        for w, c in self.parts:
            v = c.log_tail_integral(t)
            if v == math.inf:
                return math.inf
            terms.append(math.log(w) + v)
        return float(logsumexp(terms))

    def sf_integral(self, a, b):
        """Integral of 1 - F over [a, b]."""
        return math.fsum(w * c.sf_integral(a, b) for w, c in self.parts)

    def interval_mass(self, lo, hi, closed=(True, True)):
        """Probability of the interval from lo to hi; ``closed`` flags each end."""
        if lo > hi:
            raise DomainError(f"interval needs lo <= hi, got [{lo}, {hi}]")
        upper = self.cdf(hi) if closed[1] else self.cdf_left(hi)
        lower = self.cdf_left(lo) if closed[0] else self.cdf(lo)
        if lo == hi and not (closed[0] and closed[1]):
            return 0.0
        return float(max(upper - lower, 0.0))

    # -- sampling -----------------------------------------------------------

    def sample(self, seed, count):
        """Inverse-transform samples, deterministic in ``seed``."""
        if count < 1:
            raise DomainError("sample count must be at least 1")
        rng = np.random.default_rng(seed)
        which = rng.choice(len(self.components), size=count, p=self.weights)
        u = rng.random(count)
        out = np.empty(count)
        for i, c in enumerate(self.components):
            sel = which == i
            if np.any(sel):
                out[sel] = c.quantile(u[sel])
        return out

    # -- restructuring ------------------------------------------------------

    def restricted_below(self, q):
        """(weight, component) parts of the sub-probability on (-inf, q)."""
        out = []
        for w, c in self.parts:
            m = float(c.cdf_left(q))
            if m <= 0:
                continue
            if c.support()[1] < q or m >= 1.0:
                out.append((w, c))
            else:
                out.append((w * m, Truncated(c, upper=q)))
        return out

    def as_k(self):
        return Lift1D(self)


# ------------------------------------------------------------------ k dims


class DistributionK:
    """CDF oracle on R^k."""

    dim: int

    def cdf_k(self, x):
        raise NotImplementedError

    def log_cdf_k(self, x):
        with np.errstate(divide="ignore"):
            return np.log(self.cdf_k(x))

    def axis_breakpoints(self, i):
        raise NotImplementedError

    def axis_quantiles(self, i, n):
        raise NotImplementedError

    def marginal(self, i):
        raise UnsupportedFormError(f"{type(self).__name__} does not expose marginals")

    def _points(self, x):
        x = _arr(x)
        if x.ndim == 0 or x.shape[-1] != self.dim:
            if self.dim == 1:
                return x[..., None]
            raise DomainError(f"point dimension mismatch: expected {self.dim}, got shape {x.shape}")
        return x

    def diagonal_breakpoints(self):
        return np.unique(np.concatenate([self.axis_breakpoints(i) for i in range(self.dim)]))

    def diagonal_cdf(self, t):
        t = _arr(t)
        return self.cdf_k(np.repeat(t[..., None], self.dim, axis=-1))

    def _diag_bracket(self, p):
        lo, hi = -1.0, 1.0
        while self.diagonal_cdf(hi) < p:
            hi = 2 * hi if hi > 0 else 1.0
            if hi > 1e300:
                return None
        while self.diagonal_cdf(lo) >= p:
            lo = 2 * lo
            if lo < -1e300:
                return (lo, lo)
        return lo, hi

    def diagonal_upper_quantile(self, s):
        """diagonal_quantile(1 - s); the one-dimensional form resolves it in survival space."""
        return self.diagonal_quantile(1.0 - s)

    def diagonal_quantile(self, p):
        """inf{t : F(t e) >= p}; bisection to 1e-12 then breakpoint snapping."""
        if not 0 < p <= 1:
            raise DomainError("diagonal quantile needs p in (0, 1]")
        br = self._diag_bracket(p)
        if br is None:
            return math.inf
        lo, hi = br
        if lo == hi:
            return lo
        for _ in range(2200):
            mid = lo + (hi - lo) / 2.0
            if hi - lo <= QUANTILE_TOL * max(1.0, abs(hi)) or mid <= lo or mid >= hi:
                break
            if self.diagonal_cdf(mid) >= p:
                hi = mid
            else:
                lo = mid
        bps = self.diagonal_breakpoints()
        cand = bps[(bps > lo) & (bps <= hi)]
        for b in np.sort(cand):
            if self.diagonal_cdf(b) >= p:
                return float(b)
        return float(hi)


class Lift1D(DistributionK):
    dim = 1

    def __init__(self, d):
        if not isinstance(d, Distribution1D):
            raise DomainError("Lift1D wraps a Distribution1D")
        self.d = d

    def __repr__(self):
        return f"Lift1D({self.d!r})"

    def __eq__(self, other):
        return isinstance(other, Lift1D) and self.d == other.d

    def __hash__(self):
        return hash(self.d)

    def cdf_k(self, x):
        return self.d.cdf(self._points(x)[..., 0])

    def log_cdf_k(self, x):
        return _log_cdf_1d(self.d, self._points(x)[..., 0])

    def axis_breakpoints(self, i):
        return self.d.breakpoints()

    def axis_quantiles(self, i, n):
        return self.d.quantile_grid(n)

    def marginal(self, i):
        if i != 0:
            raise DomainError(f"coordinate {i} out of range for dimension 1")
        return self.d

    def diagonal_quantile(self, p):
        if not 0 < p <= 1:
            raise DomainError("diagonal quantile needs p in (0, 1]")
        return float(self.d.gen_inverse(p))

    def diagonal_upper_quantile(self, s):
        return self.d.upper_quantile(s)


class Product(DistributionK):
    """Independent coordinates: F(x) = prod_i F_i(x_i)."""

    def __init__(self, marginals):
        marginals = tuple(marginals)
        if len(marginals) < 2:
            raise DomainError("product form needs k >= 2 marginals")
        self.marginals = marginals
        self.dim = len(marginals)

    def __repr__(self):
        return f"Product({list(self.marginals)!r})"

    def __eq__(self, other):
        return isinstance(other, Product) and self.marginals == other.marginals

    def __hash__(self):
        return hash(self.marginals)

    def cdf_k(self, x):
        x = self._points(x)
        out = np.ones(x.shape[:-1])
        for i, m in enumerate(self.marginals):
            out = out * m.cdf(x[..., i])
        return out

    def log_cdf_k(self, x):
        x = self._points(x)
        out = np.zeros(x.shape[:-1])
        for i, m in enumerate(self.marginals):
            out = out + _log_cdf_1d(m, x[..., i])
        return out

    def axis_breakpoints(self, i):
        return self.marginals[i].breakpoints()

    def axis_quantiles(self, i, n):
        return self.marginals[i].quantile_grid(n)

    def marginal(self, i):
        if not 0 <= i < self.dim:
            raise DomainError(f"coordinate {i} out of range for dimension {self.dim}")
        return self.marginals[i]

    def _diag_bracket(self, p):
        lo = max(float(m.gen_inverse(p)) for m in self.marginals)
        hi = max(float(m.gen_inverse(p ** (1.0 / self.dim))) for m in self.marginals)
        if not math.isfinite(hi):
            return None
        if self.diagonal_cdf(lo) >= p:
            return (lo, lo)
        return lo, hi


class Glued(DistributionK):
    """F(x) = base(x) if x < x0 (componentwise <= and not equal), else tail(x - x0 + xstar)."""

    def __init__(self, base, tail, x0, xstar):
        self.base = as_k(base)
        self.tail = as_k(tail)
        self.x0 = np.atleast_1d(_arr(x0)).copy()
        self.xstar = np.atleast_1d(_arr(xstar)).copy()
        self.dim = self.base.dim
        if self.tail.dim != self.dim or self.x0.shape != (self.dim,) or self.xstar.shape != (self.dim,):
            raise DomainError("glued form needs base, tail, x0 and xstar of one dimension")

    def __repr__(self):
        return f"Glued(x0={self.x0.tolist()}, xstar={self.xstar.tolist()})"

    def _below(self, x):
        return np.all(x <= self.x0, axis=-1) & np.any(x != self.x0, axis=-1)

    def cdf_k(self, x):
        x = self._points(x)
        below = self._below(x)
        return np.where(below, self.base.cdf_k(x), self.tail.cdf_k(x - self.x0 + self.xstar))

    def log_cdf_k(self, x):
        x = self._points(x)
        below = self._below(x)
        return np.where(below, self.base.log_cdf_k(x), self.tail.log_cdf_k(x - self.x0 + self.xstar))

    def axis_breakpoints(self, i):
        b = self.base.axis_breakpoints(i)
        t = self.tail.axis_breakpoints(i) + self.x0[i] - self.xstar[i]
        return np.unique(np.concatenate((b[b < self.x0[i]], [self.x0[i]], t[t >= self.x0[i]])))

    def axis_quantiles(self, i, n):
        b = self.base.axis_quantiles(i, n)
        t = self.tail.axis_quantiles(i, n) + self.x0[i] - self.xstar[i]
        return np.concatenate((b[b < self.x0[i]], t[t >= self.x0[i]]))

    def marginal(self, i):
        """Law of coordinate i as the limit of the oracle with every other coordinate at +inf.

        For k >= 2 such points never lie below x0, so the marginal is the
        translated tail marginal. For k = 1 it is base on (-inf, x0), an atom
        topping up to tail(xstar) at x0, and the translated tail above x0.
        """
        if not 0 <= i < self.dim:
            raise DomainError(f"coordinate {i} out of range for dimension {self.dim}")
        tail = self.tail.marginal(i)
        by = float(self.x0[i] - self.xstar[i])
        if self.dim > 1:
            return Distribution1D([(w, Shifted(c, by)) for w, c in tail.parts])
        base = self.base.marginal(0)
        x0, xs = float(self.x0[0]), float(self.xstar[0])
        parts = base.restricted_below(x0)
        atom = float(tail.cdf(xs)) - float(base.cdf_left(x0))
        if atom < -WEIGHT_TOL:
            raise DomainError("glued law decreases across x0: base(x0-) exceeds tail(xstar)")
        if atom > 0:
            parts.append((atom, Atom(x0)))
        for w, c in tail.parts:
            m = float(np.exp(c.log_sf(xs)))
            if m > 0:
                c_above = c if c.support()[0] > xs else Truncated(c, lower=xs)
                parts.append((w * m, Shifted(c_above, by)))
        return Distribution1D.normalized(parts)

    def monotone_on_grid(self, axis_points=25, seed=0):
        """Check coordinatewise monotonicity of the oracle on a random grid."""
        rng = np.random.default_rng(seed)
        span = [np.sort(np.concatenate((rng.normal(self.x0[i], 2.0, axis_points), [self.x0[i]])))
                for i in range(self.dim)]
        mesh = np.stack(np.meshgrid(*span, indexing="ij"), axis=-1)
        vals = self.cdf_k(mesh)
        return all(np.all(np.diff(vals, axis=i) >= -1e-15) for i in range(self.dim))


def as_k(d):
    """View a Distribution1D as a 1-dimensional DistributionK; pass k-forms through."""
    if isinstance(d, DistributionK):
        return d
    if isinstance(d, Distribution1D):
        return Lift1D(d)
    raise DomainError(f"not a distribution: {d!r}")


def as_1d(d):
    if isinstance(d, Distribution1D):
        return d
    if isinstance(d, Lift1D):
        return d.d
    raise UnsupportedFormError(f"expected a one-dimensional mixture, got {type(d).__name__}")


def marginal(d, i):
    """The law of coordinate i, counted from 1, of a Lift1D, Product or Glued form.

    The ``marginal`` methods on the forms take a 0-based axis index.
    """
    if int(i) != i or i < 1:
        raise DomainError(f"coordinates are numbered from 1, got {i}")
    return as_k(d).marginal(int(i) - 1)


def _log_cdf_1d(d, x):
    lsf = d.log_survival(x)
    with np.errstate(divide="ignore", invalid="ignore"):
        small = np.log1p(-np.exp(lsf))
        direct = np.log(d.cdf(x))
    return np.where(lsf < -0.7, small, direct)


def point_mass(location):
    return Distribution1D.of(Atom(float(location)))

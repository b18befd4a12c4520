"""Hot numeric loops.

Every kernel has a numba ``@njit`` version and a pure-numpy version with the
same signature. The numba path is used when numba imports cleanly and the
environment variable ``MDA_WORKBENCH_DISABLE_JIT`` is unset or ``0``.
"""

import os

import numpy as np

_DISABLE = os.environ.get("MDA_WORKBENCH_DISABLE_JIT", "0") not in ("", "0")

try:
    if _DISABLE:
        raise ImportError
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    numba = None
    HAVE_NUMBA = False


def _threads_cap():
    raw = os.environ.get("MDA_WORKBENCH_THREADS")
    if raw and HAVE_NUMBA:
        numba.set_num_threads(max(1, min(int(raw), numba.config.NUMBA_NUM_THREADS)))


_threads_cap()


# ---------------------------------------------------------------- numpy paths


def sandwich_ok_numpy(f_minus, g, f_plus, eps, rel=0.0):
    """True iff ``f_minus - eps <= g <= f_plus + eps`` at every index.

    ``rel`` widens each comparison by ``rel`` times the magnitudes compared,
    absorbing rounding in the CDF evaluations.
    """
    ok_lo = f_minus - eps <= g + rel * (np.abs(f_minus) + np.abs(g))
    ok_hi = g <= f_plus + eps + rel * (np.abs(g) + np.abs(f_plus))
    return bool(np.all(ok_lo) and np.all(ok_hi))


def levy_grid_oracle_numpy(fv, gv, max_shift):
    """Smallest shift ``s`` (in grid cells) for which the discrete sandwich holds.

    ``fv`` and ``gv`` are CDF values on a common uniform grid whose step must
    be ``1 / max_shift``, so a shift of ``s`` cells is also a vertical slack of
    ``s / max_shift``. Values off the grid are taken as 0 (left) and 1 (right).
    Returns ``max_shift`` if no smaller shift works.
    """
    n = fv.shape[0]
    step_eps = 1.0 / max_shift
    for s in range(max_shift + 1):
        eps = s * step_eps
        left = np.concatenate((np.zeros(s), fv[: n - s])) if s else fv
        right = np.concatenate((fv[s:], np.ones(s))) if s else fv
        if np.all(left - eps <= gv) and np.all(gv <= right + eps):
            return s
    return max_shift


def iterated_free_power_numpy(sv, n):
    """Survival of the n-fold free max-convolution of ``sv`` by n - 1 pairings.

    Each pairing adds ``sv`` to a double-double accumulator and clamps at 1.
    For n <= 2**53 the partial sums k * sv fit in a double-double, so the
    accumulator is exact and the result is the single rounding of
    min(1, n * sv).
    """
    hi = sv.copy()
    lo = np.zeros_like(sv)
    for _ in range(n - 1):
        t = hi + sv
        bb = t - hi
        err = (hi - (t - bb)) + (sv - bb)
        lo = lo + err
        hi = t + lo
        lo = lo - (hi - t)
        done = (hi > 1.0) | ((hi == 1.0) & (lo >= 0.0))
        hi = np.where(done, 1.0, hi)
        lo = np.where(done, 0.0, lo)
    return hi


def powered_cdf_numpy(log_sf, n):
    """``(1 - exp(log_sf))**n`` evaluated as ``exp(n * log1p(-exp(log_sf)))``."""
    with np.errstate(divide="ignore"):
        return np.exp(n * np.log1p(-np.exp(log_sf)))


# ---------------------------------------------------------------- numba paths

if HAVE_NUMBA:

    @numba.njit(cache=True)
    def sandwich_ok_numba(f_minus, g, f_plus, eps, rel=0.0):
        for i in range(g.shape[0]):
            if f_minus[i] - eps > g[i] + rel * (abs(f_minus[i]) + abs(g[i])):
                return False
            if g[i] > f_plus[i] + eps + rel * (abs(g[i]) + abs(f_plus[i])):
                return False
        return True

    @numba.njit(cache=True)
    def levy_grid_oracle_numba(fv, gv, max_shift):
        n = fv.shape[0]
        step_eps = 1.0 / max_shift
        for s in range(max_shift + 1):
            eps = s * step_eps
            ok = True
            for i in range(n):
                lo = fv[i - s] if i - s >= 0 else 0.0
                hi = fv[i + s] if i + s < n else 1.0
                if lo - eps > gv[i] or gv[i] > hi + eps:
                    ok = False
                    break
            if ok:
                return s
        return max_shift

    @numba.njit(cache=True)
    def iterated_free_power_numba(sv, n):
        out = np.empty_like(sv)
        for i in range(sv.shape[0]):
            s = sv[i]
            hi = s
            lo = 0.0
            for _ in range(n - 1):
                t = hi + s
                bb = t - hi
                lo += (hi - (t - bb)) + (s - bb)
                hi = t + lo
                lo -= hi - t
                if hi > 1.0 or (hi == 1.0 and lo >= 0.0):
                    hi = 1.0
                    lo = 0.0
            out[i] = hi
        return out

    @numba.njit(cache=True)
    def powered_cdf_numba(log_sf, n):
        out = np.empty_like(log_sf)
        for i in range(log_sf.shape[0]):
            out[i] = np.exp(n * np.log1p(-np.exp(log_sf[i])))
        return out

    sandwich_ok = sandwich_ok_numba
    levy_grid_oracle = levy_grid_oracle_numba
    iterated_free_power = iterated_free_power_numba
    powered_cdf = powered_cdf_numba
else:
    sandwich_ok = sandwich_ok_numpy
    levy_grid_oracle = levy_grid_oracle_numpy
    iterated_free_power = iterated_free_power_numpy
    powered_cdf = powered_cdf_numpy

BACKEND = "numba" if HAVE_NUMBA else "numpy"

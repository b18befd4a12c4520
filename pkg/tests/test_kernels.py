import os
import subprocess
import sys

import numpy as np
import pytest

from mdaworkbench import _kernels as K

needs_numba = pytest.mark.skipif(not K.HAVE_NUMBA, reason="numba path unavailable or disabled")


def cases(rng):
    x = np.sort(rng.random(5000))
    for noise in (0.0, 1e-3, 0.05):
        g = np.clip(x + rng.normal(0, noise, x.size), 0, 1)
        for eps in (0.0, 0.01, 0.1):
            yield x, g, eps


@needs_numba
def test_sandwich_ok_paths_agree(rng):
    for f, g, eps in cases(rng):
        for rel in (0.0, 1e-15):
            assert K.sandwich_ok_numpy(f, g, f, eps, rel) == K.sandwich_ok_numba(f, g, f, eps, rel)


@needs_numba
def test_levy_grid_oracle_paths_agree(rng):
    for _ in range(20):
        fv = np.sort(rng.random(400))
        gv = np.sort(np.clip(fv + rng.uniform(-0.1, 0.1), 0, 1))
        assert K.levy_grid_oracle_numpy(fv, gv, 200) == K.levy_grid_oracle_numba(fv, gv, 200)


@needs_numba
def test_iterated_free_power_paths_agree(rng):
    sv = np.concatenate((rng.random(2000) / rng.integers(1, 40, 2000), [0.0, 1.0, 1e-300]))
    for n in (1, 2, 5, 32, 100):
        assert np.array_equal(K.iterated_free_power_numpy(sv, n), K.iterated_free_power_numba(sv, n))


@needs_numba
def test_powered_cdf_paths_agree(rng):
    log_sf = np.concatenate((np.log(rng.random(2000)), [-np.inf, 0.0, -1e-300]))
    for n in (1.0, 10.0, 1e6):
        assert np.allclose(K.powered_cdf_numpy(log_sf, n), K.powered_cdf_numba(log_sf, n), rtol=1e-14, atol=0)


def test_sandwich_semantics():
    f = np.array([0.2, 0.5, 0.9])
    assert K.sandwich_ok_numpy(f, f + 0.05, f, 0.05)
    assert not K.sandwich_ok_numpy(f, f + 0.06, f, 0.05)
    assert K.sandwich_ok(f, f - 0.05, f, 0.05)


def test_iterated_free_power_is_rounded_closed_form(rng):
    sv = rng.random(3000) / 16
    for n in range(1, 40):
        assert np.array_equal(K.iterated_free_power(sv, n), np.minimum(1.0, n * sv))


def test_disable_flag_selects_numpy():
    env = dict(os.environ, MDA_WORKBENCH_DISABLE_JIT="1")
    r = subprocess.run([sys.executable, "-c", "from mdaworkbench import _kernels as K; print(K.BACKEND)"],
                       env=env, capture_output=True, text=True, check=True)
    assert r.stdout.strip() == "numpy"

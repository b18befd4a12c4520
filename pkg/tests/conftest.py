import os
import sys
from pathlib import Path

import numpy as np
import pytest

from mdaworkbench.components import Atom, Exponential, Normal, Pareto, Uniform
from mdaworkbench.dist import Distribution1D

ROOT = Path(__file__).resolve().parents[1]
FIXTURES = ROOT / "fixtures"

sys.path.insert(0, str(Path(__file__).parent))

# Full-size property runs (20 games per mode and strategy, etc.) are slow;
# they run only when this flag is set.
FULL = os.environ.get("MDA_WORKBENCH_FULL", "0") not in ("", "0")


def random_component(rng):
    kind = rng.integers(5)
    if kind == 0:
        a = round(float(rng.uniform(-2, 2)), 3)
        return Uniform(a, a + round(float(rng.uniform(0.1, 3)), 3))
    if kind == 1:
        return Normal(float(rng.uniform(-2, 2)), float(rng.uniform(0.3, 2)))
    if kind == 2:
        return Exponential(float(rng.uniform(0.3, 3)))
    if kind == 3:
        return Atom(round(float(rng.uniform(-3, 3)), 3))
    return Pareto(float(rng.uniform(3, 6)), float(rng.uniform(0.5, 2)))


def random_mixture(rng, max_parts=3):
    """Mixture of 1-3 closed-form components with Dirichlet weights."""
    n = int(rng.integers(1, max_parts + 1))
    w = rng.dirichlet(np.ones(n))
    return Distribution1D([(float(wi), random_component(rng)) for wi in w])


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


@pytest.fixture
def fixture_path():
    return lambda name: str(FIXTURES / f"{name}.json")


GAME_MODES = ("frechet", "gumbel")
GAME_PLAYERS = ("replay", "recenter-dense", "random")
_GAMES = {}


@pytest.fixture(scope="session")
def played_games():
    """10-round transcripts and their verification reports, one per (mode, Player I), seed 0."""
    from mdaworkbench.game import run_game, verify_transcript

    if not _GAMES:
        for mode in GAME_MODES:
            for p1 in GAME_PLAYERS:
                t = run_game(p1, mode, 10, seed=0)
                _GAMES[mode, p1] = (t, verify_transcript(t))
    return _GAMES


ACCEPTANCE = {}


@pytest.fixture
def accept():
    """record(number, ok, detail): one line per acceptance criterion, printed at the end of the run."""

    def record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"acceptance {number}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")

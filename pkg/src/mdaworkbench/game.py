"""Banach–Mazur game on (distributions on R, Lévy metric) with the Player II strategies.

Player I opens a ball U_1. In round m Player II answers U_m = B(F_m, eps_m)
with V_m = B(G_m, r_m), where G_m keeps F_m up to its (1 - eps_m/2) quantile
and moves eps_m/2 of mass to the isolated point 2^(n_m+1) + 1. Player I then
picks U_(m+1) inside V_m. The empty windows (2^(n_m) - 1, 2^(n_m+1) + 1) pin
the dyadic survival ratios of every law in the intersection of the V_m away
from any limit in (0, 1) (Fréchet mode), or make the survival integral over
each window at least m (Gumbel mode).

Winning is certified at finite horizon by the inequalities that hold for
every law in the intersection, evaluated on the last center.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import __version__, specio
from .components import Exponential, Normal, Uniform
from .constructions import dense_projection
from .dist import Distribution1D, DistributionK, as_1d
from .errors import DomainError, InvariantViolation
from .levy import OpenBall, levy_distance, truncate_tail

# bisection tolerance and containment slack, relative to the radius involved
DIST_TOL_REL = 1e-10
NEST_SLACK_REL = 1e-9
BOUND_SLACK = 1e-9
DEFAULT_OPENING = OpenBall(Distribution1D.of(Uniform(0.0, 1.0)), 0.5)


class Mode(str, enum.Enum):
    FRECHET = "frechet"
    GUMBEL = "gumbel"


def _mode(mode):
    try:
        return Mode(mode)
    except ValueError:
        raise DomainError(f"unknown game mode {mode!r}") from None


def ball_distance(outer, inner):
    return levy_distance(outer.center, inner.center, tol=DIST_TOL_REL * inner.radius)


def ball_inside(outer, inner):
    """Metric certificate for inner being a subset of outer: d(centers) + r_in <= r_out."""
    d = ball_distance(outer, inner)
    return d + inner.radius <= outer.radius * (1.0 + NEST_SLACK_REL), d


@dataclass(frozen=True)
class GameState:
    round: int
    history_n: tuple = (0,)
    last_ball: OpenBall | None = None
    mode: Mode = Mode.FRECHET

    def __post_init__(self):
        h = self.history_n
        if any(b <= a for a, b in zip(h, h[1:])):
            raise InvariantViolation(f"n history is not strictly increasing: {h}")


@dataclass(frozen=True)
class PlayerIIMove:
    m: int
    n_m: int
    G_m: Distribution1D
    delta_m: float
    V_m: OpenBall
    distance: float  # d(F_m, G_m)


def choose_n(F, eps, m, prev_n, mode):
    """Smallest n > prev_n with 2^n > 1 + F^<-(1 - eps/2), and 2^n > 4m/eps in Gumbel mode."""
    q = float(F.upper_quantile(eps / 2.0))
    n = prev_n + 1
    while not (2.0**n > 1.0 + q and (mode is Mode.FRECHET or 2.0**n > 4.0 * m / eps)):
        n += 1
    return n


def atom_location(n):
    return 2.0 ** (n + 1) + 1.0


def player2_move(state, U):
    """Player II's answer to U = B(F_m, eps_m) in round ``state.round``."""
    mode = _mode(state.mode)
    if isinstance(U.center, DistributionK) and U.center.dim != 1:
        raise DomainError("the game is played on the line only (k = 1)")
    F = as_1d(U.center)
    eps, m = float(U.radius), int(state.round)
    if not 0 < eps < 1:
        raise DomainError(f"eps_m must lie in (0, 1), got {eps}")
    if m < 1:
        raise DomainError("rounds are numbered from 1")
    n = choose_n(F, eps, m, state.history_n[-1], mode)
    G = truncate_tail(F, eps / 2.0, atom_location(n))
    d = levy_distance(F, G, tol=DIST_TOL_REL * eps)
    delta = eps - d
    if not delta > 0:
        raise InvariantViolation(f"round {m}: d(F_m, G_m) = {d} leaves no room inside U_m")
    V = OpenBall(G, min(delta, eps / 2.0**m))
    return PlayerIIMove(m=m, n_m=n, G_m=G, delta_m=delta, V_m=V, distance=d)


# ------------------------------------------------------------------ Player I


class PlayerI:
    name = "abstract"

    def opening(self):
        return DEFAULT_OPENING

    def respond(self, m, V, rng):
        raise NotImplementedError


class Replay(PlayerI):
    """Hands Player II's ball straight back."""

    name = "replay"

    def respond(self, m, V, rng):
        return V


class RecenterDense(PlayerI):
    """Aims into D: recenters on the dense projection of V's center, half the radius."""

    name = "recenter-dense"

    def respond(self, m, V, rng):
        r = V.radius
        return OpenBall(dense_projection(V.center, r / 2.0).as_1d(), r / 2.0)


class RandomPerturbation(PlayerI):
    """Mixes a random law into V's center with weight r/4; new radius r/2."""

    name = "random"

    def respond(self, m, V, rng):
        r = V.radius
        pick = int(rng.integers(3))
        if pick == 0:
            a = float(rng.uniform(-2.0, 5.0))
            H = Uniform(a, a + float(rng.uniform(0.1, 3.0)))
        elif pick == 1:
            H = Normal(float(rng.uniform(-2.0, 5.0)), float(rng.uniform(0.2, 2.0)))
        else:
            H = Exponential(float(rng.uniform(0.2, 3.0)))
        w = r / 4.0
        parts = [((1.0 - w) * p, c) for p, c in as_1d(V.center).parts] + [(w, H)]
        return OpenBall(Distribution1D.normalized(parts), r / 2.0)


class Scripted(PlayerI):
    """Moves read from a JSON file; once the script runs out, replays."""

    name = "scripted"

    def __init__(self, opening=None, moves=()):
        self._opening = opening or DEFAULT_OPENING
        self.moves = list(moves)

    @classmethod
    def from_file(cls, path):
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise DomainError(f"cannot read script {path!r}: {exc}") from None
        if not isinstance(raw, dict) or not raw.keys() <= {"opening", "moves"}:
            raise DomainError("script must be an object with 'opening' and/or 'moves'")
        opening = ball_from_dict(raw["opening"]) if "opening" in raw else None
        return cls(opening, [ball_from_dict(b) for b in raw.get("moves", [])])

    def opening(self):
        return self._opening

    def respond(self, m, V, rng):
        return self.moves[m - 1] if m - 1 < len(self.moves) else V


def player_one(name):
    if name.startswith("script:"):
        return Scripted.from_file(name.split(":", 1)[1])
    table = {"replay": Replay, "recenter-dense": RecenterDense, "random": RandomPerturbation}
    if name not in table:
        raise DomainError(f"unknown Player I strategy {name!r}")
    return table[name]()


# ------------------------------------------------------------------ game loop


@dataclass(frozen=True)
class GameRound:
    U: OpenBall
    move: PlayerIIMove


@dataclass
class GameTranscript:
    mode: Mode
    player1: str
    seed: int
    rounds: list = field(default_factory=list)
    forfeit: dict | None = None

    @property
    def moves(self):
        """U_1, V_1, U_2, V_2, ..."""
        out = []
        for r in self.rounds:
            out += [r.U, r.move.V_m]
        return out

    @property
    def certificates(self):
        return [r.move for r in self.rounds]

    @property
    def history_n(self):
        return [0] + [r.move.n_m for r in self.rounds]

    @property
    def final_center(self):
        return self.rounds[-1].move.G_m if self.rounds else None

    def to_dict(self):
        return {
            "format": "mdaworkbench-transcript",
            "version": __version__,
            "mode": self.mode.value,
            "player1": self.player1,
            "seed": self.seed,
            "history_n": self.history_n,
            "rounds": [{
                "m": r.move.m,
                "U": ball_to_dict(r.U),
                "n": r.move.n_m,
                "G": specio.to_dict(r.move.G_m, version=False),
                "distance": r.move.distance,
                "delta": r.move.delta_m,
                "V_radius": r.move.V_m.radius,
            } for r in self.rounds],
            "forfeit": self.forfeit,
        }

    @classmethod
    def from_dict(cls, raw):
        try:
            t = cls(_mode(raw["mode"]), str(raw["player1"]), int(raw["seed"]), forfeit=raw.get("forfeit"))
            for r in raw["rounds"]:
                G = specio.from_dict(r["G"])
                move = PlayerIIMove(m=int(r["m"]), n_m=int(r["n"]), G_m=G, delta_m=float(r["delta"]),
                                    V_m=OpenBall(G, float(r["V_radius"])), distance=float(r["distance"]))
                t.rounds.append(GameRound(ball_from_dict(r["U"]), move))
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed transcript: {exc!r}") from None
        return t


def ball_to_dict(b):
    return {"center": specio.to_dict(b.center, version=False), "radius": b.radius}


def ball_from_dict(raw):
    if not isinstance(raw, dict) or set(raw) != {"center", "radius"}:
        raise DomainError("a ball is an object with exactly 'center' and 'radius'")
    return OpenBall(specio.from_dict(raw["center"]), float(raw["radius"]))


def run_game(p1, mode, rounds, seed=0):
    """Alternate Player I and Player II for ``rounds`` rounds; a bad Player I move ends the game as a forfeit."""
    mode = _mode(mode)
    if rounds < 1:
        raise DomainError("rounds must be at least 1")
    if isinstance(p1, str):
        p1 = player_one(p1)
    rng = np.random.default_rng(seed)
    t = GameTranscript(mode, p1.name, int(seed))
    U = p1.opening()
    if not U.radius < 1:
        raise DomainError("opening ball radius must be below 1")
    state = GameState(round=1, mode=mode)
    for m in range(1, rounds + 1):
        move = player2_move(state, U)
        t.rounds.append(GameRound(U, move))
        if m == rounds:
            break
        state = GameState(round=m + 1, history_n=state.history_n + (move.n_m,), last_ball=move.V_m, mode=mode)
        try:
            U_next = p1.respond(m, move.V_m, rng)
            inside, d = ball_inside(move.V_m, U_next)
            reason = None if inside else (f"d(center of V_{m}, new center) + radius = "
                                          f"{d + U_next.radius!r} exceeds {move.V_m.radius!r}")
        except DomainError as exc:
            U_next, reason = None, f"invalid move: {exc}"
        if reason is not None:
            t.forfeit = {"round": m + 1, "reason": reason,
                         "ball": ball_to_dict(U_next) if U_next is not None else None}
            break
        U = U_next
    return t


# ------------------------------------------------------------------ certificates


@dataclass
class Certificate:
    name: str
    ok: bool
    detail: str

    def to_dict(self):
        return {"check": self.name, "ok": self.ok, "detail": self.detail}


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)
    forfeit: dict | None = None

    @property
    def ok(self):
        return all(c.ok for c in self.checks)

    @property
    def failures(self):
        return [c for c in self.checks if not c.ok]

    def add(self, name, ok, detail):
        self.checks.append(Certificate(name, bool(ok), detail))

    def to_dict(self):
        return {"ok": self.ok, "forfeit": self.forfeit, "checks": [c.to_dict() for c in self.checks]}


def frechet_bound(j):
    """(2^-1 - 2^-j) / (2^-1 + 2^-j)."""
    return (0.5 - 2.0**-j) / (0.5 + 2.0**-j)


def verify_transcript(t):
    """Re-derive every certificate of a transcript from its balls alone."""
    rep = VerificationReport(forfeit=t.forfeit)
    if not t.rounds:
        rep.add("nonempty", False, "transcript has no rounds")
        return rep
    balls = t.moves
    for i, (outer, inner) in enumerate(zip(balls, balls[1:])):
        inside, d = ball_inside(outer, inner)
        label = f"V_{i // 2 + 1} in U_{i // 2 + 1}" if i % 2 == 0 else f"U_{i // 2 + 2} in V_{i // 2 + 1}"
        rep.add(f"nesting {label}", inside,
                f"d = {d:.6g}, d + r_inner = {d + inner.radius:.6g}, r_outer = {outer.radius:.6g}")
    prev = 0
    for r in t.rounds:
        mv, eps, m = r.move, r.U.radius, r.move.m
        F = as_1d(r.U.center)
        rep.add(f"round {m}: n increasing", mv.n_m > prev, f"n_{m} = {mv.n_m}, previous {prev}")
        prev = mv.n_m
        expect = choose_n(F, eps, m, t.history_n[m - 1], t.mode)
        rep.add(f"round {m}: n minimal", mv.n_m == expect, f"recomputed {expect}")
        if t.mode is Mode.GUMBEL:
            rep.add(f"round {m}: 2^n > 4m/eps", 2.0**mv.n_m > 4.0 * m / eps,
                    f"2^{mv.n_m} vs {4.0 * m / eps:.6g}")
        G_ref = truncate_tail(F, eps / 2.0, atom_location(mv.n_m))
        rep.add(f"round {m}: G_m recomputed", specio.to_dict(G_ref) == specio.to_dict(mv.G_m),
                "G_m equals the canonical truncation of F_m")
        gap = mv.G_m.interval_mass(2.0**mv.n_m - 1.0, atom_location(mv.n_m), closed=(False, False))
        rep.add(f"round {m}: empty window", gap == 0.0,
                f"mass of (2^{mv.n_m} - 1, 2^{mv.n_m + 1} + 1) = {gap:.3g}")
        d = levy_distance(F, mv.G_m, tol=DIST_TOL_REL * eps)
        rep.add(f"round {m}: d(F_m, G_m) <= eps_m/2", d <= eps / 2.0 * (1 + NEST_SLACK_REL) + 1e-300,
                f"d = {d:.6g}, eps_m/2 = {eps / 2.0:.6g}")
        rep.add(f"round {m}: radius <= eps_m/2^m", mv.V_m.radius <= eps / 2.0**m,
                f"r = {mv.V_m.radius:.6g}, eps_m/2^m = {eps / 2.0**m:.6g}")
    F = t.final_center
    for r in t.rounds:
        j, n = r.move.m, r.move.n_m
        lo, hi = 2.0**n, 2.0 ** (n + 1)
        if t.mode is Mode.FRECHET:
            ratio = math.exp(float(F.log_survival(hi)) - float(F.log_survival(lo)))
            b = frechet_bound(j)
            rep.add(f"dyadic ratio j={j}", ratio >= b - BOUND_SLACK,
                    f"(1-F(2^{n + 1}))/(1-F(2^{n})) = {ratio:.6g} >= {b:.6g}")
        elif j >= 2:
            s = float(F.sf_integral(lo, hi))
            rep.add(f"window integral j={j}", s >= j - BOUND_SLACK,
                    f"integral of 1-F over [2^{n}, 2^{n + 1}] = {s:.6g} >= {j}")
    return rep

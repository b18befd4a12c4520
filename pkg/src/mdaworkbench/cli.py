"""Command-line entry point: ``mdaw <subcommand> ...``.

Exit codes: 0 success, 1 domain error or failed verification, 2 internal
invariant violation. Every subcommand accepts ``--json PATH`` and writes a
self-contained report there (inputs inlined, seed, tool version, timestamp).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import sys

import numpy as np

from . import __version__, specio
from .constructions import dense_projection, escape_blocks, escape_from_D, escape_support_bound
from .dist import Distribution1D, as_1d, as_k
from .errors import DomainError, InvariantViolation
from .free_max import free_convergence_report
from .game import GameTranscript, run_game, verify_transcript
from .gev import GevParams, convergence_report, schedule_by_name
from .levy import in_T, levy_bracket
from .mda import DiagnosticConfig, classify, classify_marginal


def _floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise DomainError(f"expected comma-separated numbers, got {text!r}") from None


def _grid(text):
    lo, hi, count = _floats(text)
    if int(count) != count or count < 2 or not lo < hi:
        raise DomainError("--xs needs lo,hi,count with lo < hi and integer count >= 2")
    return np.linspace(lo, hi, int(count))


def _num(v):
    if isinstance(v, float) and not math.isfinite(v):
        return "inf" if v > 0 else ("-inf" if v < 0 else "nan")
    return v


def _clean(obj):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    return _num(obj)


def _table(rows, header):
    out = ["  ".join(f"{h:>14}" for h in header)]
    for row in rows:
        out.append("  ".join(f"{v:>14.6g}" if isinstance(v, float) else f"{v!s:>14}" for v in row))
    return "\n".join(out)


# ------------------------------------------------------------------ subcommands


def cmd_classify(args):
    d = specio.load(args.f)
    cfg = DiagnosticConfig(n_max=args.n_max, t_steps=args.t_steps, cauchy_tol=args.cauchy_tol,
                           gumbel_tol=args.gumbel_tol)
    rep = classify(d, cfg) if isinstance(d, Distribution1D) else classify_marginal(d, cfg)
    lines = [f"verdict: {rep.verdict.value}"] + [f"  - {e}" for e in rep.evidence]
    return {"f": specio.to_dict(d)}, rep.to_dict(), "\n".join(lines), 0


def cmd_levy(args):
    F, G = specio.load(args.f), specio.load(args.g)
    lo, hi = levy_bracket(F, G, tol=args.tol)
    if hi == 0.0:
        text = "levy distance: 0\nwitness: sandwich holds at eps = 0 (equal laws)"
    else:
        text = f"levy distance: {hi:.12g}\nwitness bracket: sandwich fails at {lo:.12g}, holds at {hi:.12g}"
    return ({"f": specio.to_dict(F), "g": specio.to_dict(G), "tol": args.tol},
            {"distance": hi, "bracket": [lo, hi]}, text, 0)


def _write_spec(path, d):
    if path:
        with open(path, "w") as fh:
            json.dump(_clean(specio.to_dict(d)), fh, indent=2)
            fh.write("\n")


def cmd_project(args):
    F0 = specio.load(args.f)
    spec = dense_projection(F0, args.eps)
    out = spec.as_1d() if (spec.dim == 1 and args.form == "mixture") else spec.result
    _write_spec(args.out, out)
    dist = levy_bracket(as_k(F0), spec.result)[1]
    member = in_T(spec.result, as_k(F0), args.eps / 2.0)
    a100, b100 = spec.schedule().at(100)
    outputs = {"x0": spec.x0.tolist(), "xstar": spec.xstar.tolist(), "levy_distance": dist,
               "in_T_eps_half": member, "distance_within_eps_half": dist <= args.eps / 2.0 + 1e-9,
               "schedule": "c_n = a_n, d_n = a_n (x0 - xstar) + b_n (normal norming)",
               "c_100": a100, "d_100": b100, "result": specio.to_dict(out)}
    text = (f"x0 = {spec.x0.tolist()}, xstar = {spec.xstar.tolist()}\n"
            f"d(F0, F) = {dist:.6g} (bound {args.eps / 2:.6g}), in T(F0, eps/2): {member}")
    return {"f": specio.to_dict(F0), "eps": args.eps, "form": args.form}, outputs, text, 0


def cmd_escape(args):
    F = specio.load(args.f)
    if args.t is not None:
        G = escape_support_bound(F, args.t, args.eps)
        outputs = {"construction": "support-bound", "right_endpoint": _num(G.right_endpoint())}
        text = f"right endpoint moved to {G.right_endpoint():.6g} (> t = {args.t})"
    else:
        G = escape_from_D(F, args.eps)
        j0, blocks = escape_blocks(G)
        shown = blocks[:8]
        masses = [G.interval_mass(a, b) for a, b in shown]
        outputs = {"construction": "dyadic", "start_index": j0,
                   "empty_blocks": [[a, b, m] for (a, b), m in zip(shown, masses)]}
        text = f"atoms at 2^(2j+1)+1 for j >= {j0}\n" + _table(
            [(a, b, m) for (a, b), m in zip(shown, masses)], ["block lo", "block hi", "mass"])
    outputs["levy_distance"] = levy_bracket(F, G)[1]
    outputs["result"] = specio.to_dict(G)
    _write_spec(args.out, G)
    text += f"\nd(F, G) = {outputs['levy_distance']:.6g}"
    return {"f": specio.to_dict(F), "eps": args.eps, "t": args.t}, outputs, text, 0


def _verify_file(path):
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise DomainError(f"cannot read transcript {path!r}: {exc}") from None
    t = GameTranscript.from_dict(raw)
    rep = verify_transcript(t)
    lines = [f"{'ok  ' if c.ok else 'FAIL'} {c.name}: {c.detail}" for c in rep.checks]
    lines.append(f"transcript {'verified' if rep.ok else 'REJECTED'} "
                 f"({len(rep.failures)} failed of {len(rep.checks)})")
    return {"transcript": raw}, rep.to_dict(), "\n".join(lines), 0 if rep.ok else 1


def cmd_game(args):
    if args.action == "verify":
        if not args.input:
            raise DomainError("game verify needs --in")
        return _verify_file(args.input)
    if args.p1 == "random" and args.seed is None:
        raise DomainError("the random Player I strategy needs --seed")
    seed = 0 if args.seed is None else args.seed
    t = run_game(args.p1, args.mode, args.rounds, seed=seed)
    rep = verify_transcript(t)
    doc = t.to_dict()
    doc["certificates"] = rep.to_dict()
    if args.out:
        with open(args.out, "w") as fh:
            json.dump(_clean(doc), fh, indent=2)
            fh.write("\n")
    rows = [(r.move.m, r.U.radius, r.move.n_m, r.move.distance, r.move.V_m.radius) for r in t.rounds]
    text = _table(rows, ["m", "eps_m", "n_m", "d(F_m,G_m)", "r_m"])
    if t.forfeit:
        text += f"\nPlayer I forfeits in round {t.forfeit['round']}: {t.forfeit['reason']}"
    text += f"\ncertificates: {'all pass' if rep.ok else f'{len(rep.failures)} FAILED'}"
    inputs = {"mode": args.mode, "p1": args.p1, "rounds": args.rounds}
    return inputs, {"transcript": doc}, text, 0 if rep.ok else 1


def cmd_verify(args):
    return _verify_file(args.input)


def _conv_inputs(args, F):
    return {"f": specio.to_dict(F), "schedule": args.schedule, "gamma": args.gamma,
            "ns": args.ns, "xs": args.xs}


def cmd_free_limit(args):
    F = as_1d(specio.load(args.f))
    ns = [int(n) for n in _floats(args.ns)]
    rep = free_convergence_report(F, schedule_by_name(args.schedule), args.gamma, ns, _grid(args.xs))
    text = _table(rep.rows, ["n", "a_n", "b_n", "sup error"])
    return _conv_inputs(args, F), rep.to_dict(), text, 0


def _mc_maxima(F, n, a, b, gamma, blocks, rng):
    # max of n iid draws is F^<-(U^(1/n)); Kolmogorov distance of the normalized sample to G_gamma
    u = rng.random(blocks)
    m = (np.asarray(F.gen_inverse(np.maximum(u, 1e-300) ** (1.0 / n))) - b) / a
    m.sort()
    g = GevParams(gamma).cdf(m)
    k = np.arange(1, blocks + 1)
    return float(max(np.max(k / blocks - g), np.max(g - (k - 1) / blocks)))


def cmd_maxima_sim(args):
    F = specio.load(args.f)
    ns = [int(n) for n in _floats(args.ns)]
    sched = schedule_by_name(args.schedule)
    rep = convergence_report(F, sched, GevParams(args.gamma), ns, _grid(args.xs))
    outputs = rep.to_dict()
    text = _table(rep.rows, ["n", "a_n", "b_n", "sup error"])
    if args.mc:
        if args.seed is None:
            raise DomainError("Monte-Carlo block maxima need --seed")
        rng = np.random.default_rng(args.seed)
        F1 = as_1d(F)
        ks = [_mc_maxima(F1, n, *sched.at(n), args.gamma, args.mc, rng) for n in ns]
        outputs["monte_carlo"] = {"blocks": args.mc, "kolmogorov": ks}
        text += "\n" + _table(list(zip(ns, ks)), ["n", "MC Kolmogorov"])
    inputs = _conv_inputs(args, F)
    inputs.update(mc=args.mc)
    return inputs, outputs, text, 0


# ------------------------------------------------------------------ parser


def build_parser():
    p = argparse.ArgumentParser(prog="mdaw", description="Max-domain-of-attraction workbench")
    p.add_argument("--version", action="version", version=f"mdaworkbench {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", metavar="PATH", help="write a self-contained JSON report")
        sp.set_defaults(fn=fn)
        return sp

    sp = add("classify", cmd_classify, "tail diagnostics and domain verdict")
    sp.add_argument("--f", required=True, help="distribution spec file ('-' for stdin)")
    sp.add_argument("--n-max", type=int, default=50)
    sp.add_argument("--t-steps", type=int, default=60)
    sp.add_argument("--cauchy-tol", type=float, default=1e-4)
    sp.add_argument("--gumbel-tol", type=float, default=1e-3)

    sp = add("levy", cmd_levy, "Lévy distance between two laws")
    sp.add_argument("--f", required=True)
    sp.add_argument("--g", required=True)
    sp.add_argument("--tol", type=float, default=1e-9)

    sp = add("project-to-D", cmd_project, "glue a normal tail onto F inside B(F, eps)")
    sp.add_argument("--f", required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--out")
    sp.add_argument("--form", choices=("mixture", "glued"), default="mixture",
                    help="serial form of a one-dimensional result")

    sp = add("escape-D", cmd_escape, "perturb F out of D inside B(F, eps)")
    sp.add_argument("--f", required=True)
    sp.add_argument("--eps", type=float, required=True)
    sp.add_argument("--t", type=float, help="push the right endpoint past t instead")
    sp.add_argument("--out")

    sp = add("game", cmd_game, "play the Banach-Mazur game, or 'game verify --in FILE'")
    sp.add_argument("action", nargs="?", choices=("verify",))
    sp.add_argument("--mode", choices=("frechet", "gumbel"), default="frechet")
    sp.add_argument("--p1", default="replay", help="replay | recenter-dense | random | script:FILE")
    sp.add_argument("--rounds", type=int, default=10)
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out")
    sp.add_argument("--in", dest="input")

    sp = add("verify", cmd_verify, "re-check a game transcript")
    sp.add_argument("--in", dest="input", required=True)

    for name, fn, help_ in (("free-limit", cmd_free_limit, "free max-convolution convergence table"),
                            ("maxima-sim", cmd_maxima_sim, "classical block-maxima convergence table")):
        sp = add(name, fn, help_)
        sp.add_argument("--f", required=True)
        sp.add_argument("--schedule", default="normal", help="normal | uniform | pareto | custom:FILE")
        sp.add_argument("--gamma", type=float, default=0.0)
        sp.add_argument("--ns", default="100,10000,1000000")
        sp.add_argument("--xs", default="-3,6,901", help="lo,hi,count of the evaluation grid")
        if name == "maxima-sim":
            sp.add_argument("--mc", type=int, default=0, help="Monte-Carlo blocks per n (0: off)")
            sp.add_argument("--seed", type=int)
    return p


def _report(args, inputs, outputs, code):
    return {
        "tool": "mdaworkbench",
        "version": __version__,
        "command": args.command,
        "inputs": inputs,
        "seed": getattr(args, "seed", None),
        "outputs": outputs,
        "exit_code": code,
        "timestamp": _dt.datetime.now(_dt.timezone.utc).isoformat(),
    }


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        inputs, outputs, text, code = args.fn(args)
    except InvariantViolation as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(text)
    if args.json:
        with open(args.json, "w") as fh:
            json.dump(_clean(_report(args, inputs, outputs, code)), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return code


if __name__ == "__main__":
    sys.exit(main())

"""JSON distribution specs.

Three kinds are accepted::

    {"kind": "mixture", "components": [{"type": "uniform", "a": 0, "b": 1, "weight": 0.75},
                                       {"type": "atom", "at": 5, "mass": 0.25}]}
    {"kind": "product", "marginals": [<mixture>, <mixture>]}
    {"kind": "glued", "base": <spec>, "tail": <spec>, "x0": [...], "xstar": [...]}

Atoms carry their weight as ``mass``; other components use ``weight``. Weight
sums off by more than 1e-9 are rejected, smaller drift is renormalized.
Unknown fields are errors.
"""

from __future__ import annotations

import json
import math

import numpy as np

from . import components as C
from .dist import Distribution1D, DistributionK, Glued, Lift1D, Product
from .errors import DomainError

SPEC_VERSION = 1
WEIGHT_SUM_TOL = 1e-9

_FIELDS = {
    "atom": ({"at"}, set()),
    "uniform": ({"a", "b"}, set()),
    "exponential": ({"rate"}, set()),
    "normal": ({"mean", "sd"}, set()),
    "pareto": ({"alpha"}, {"scale"}),
    "geometric": ({"p"}, set()),
    "poisson": ({"lambda"}, set()),
    "piecewise_linear": ({"knots"}, set()),
    "geometric_atom_tail": ({"start_index"}, set()),
    "truncated": ({"of"}, {"lower", "upper"}),
    "shifted": ({"of", "by"}, set()),
}


def _num(v, name):
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise DomainError(f"field {name!r} must be a number, got {v!r}")
    return float(v)


def _check_fields(obj, required, optional, where):
    if not isinstance(obj, dict):
        raise DomainError(f"{where}: expected an object, got {type(obj).__name__}")
    missing = required - obj.keys()
    if missing:
        raise DomainError(f"{where}: missing field(s) {sorted(missing)}")
    extra = obj.keys() - required - optional
    if extra:
        raise DomainError(f"{where}: unknown field(s) {sorted(extra)}")


def component_from_dict(obj):
    """Component from its dict form, without weight or mass."""
    kind = obj.get("type") if isinstance(obj, dict) else None
    if kind not in _FIELDS:
        raise DomainError(f"unknown component type {kind!r}")
    req, opt = _FIELDS[kind]
    _check_fields(obj, req | {"type"}, opt, f"component {kind}")
    if kind == "atom":
        return C.Atom(_num(obj["at"], "at"))
    if kind == "uniform":
        return C.Uniform(_num(obj["a"], "a"), _num(obj["b"], "b"))
    if kind == "exponential":
        return C.Exponential(_num(obj["rate"], "rate"))
    if kind == "normal":
        return C.Normal(_num(obj["mean"], "mean"), _num(obj["sd"], "sd"))
    if kind == "pareto":
        return C.Pareto(_num(obj["alpha"], "alpha"), _num(obj.get("scale", 1.0), "scale"))
    if kind == "geometric":
        return C.Geometric(_num(obj["p"], "p"))
    if kind == "poisson":
        return C.Poisson(_num(obj["lambda"], "lambda"))
    if kind == "piecewise_linear":
        knots = obj["knots"]
        if not isinstance(knots, list) or not all(isinstance(k, list) and len(k) == 2 for k in knots):
            raise DomainError("knots must be a list of [x, p] pairs")
        return C.PiecewiseLinearCDF(tuple((_num(x, "x"), _num(p, "p")) for x, p in knots))
    if kind == "geometric_atom_tail":
        j = obj["start_index"]
        if isinstance(j, bool) or not isinstance(j, int):
            raise DomainError("start_index must be an integer")
        return C.GeometricAtomTail(j)
    if kind == "shifted":
        return C.Shifted(component_from_dict(obj["of"]), _num(obj["by"], "by"))
    lower = _num(obj["lower"], "lower") if "lower" in obj else -math.inf
    upper = _num(obj["upper"], "upper") if "upper" in obj else math.inf
    return C.Truncated(component_from_dict(obj["of"]), lower, upper)


def _mixture_from_dict(obj):
    _check_fields(obj, {"kind", "components"}, {"version"}, "mixture")
    comps = obj["components"]
    if not isinstance(comps, list) or not comps:
        raise DomainError("mixture needs a nonempty component list")
    parts = []
    for raw in comps:
        if not isinstance(raw, dict):
            raise DomainError("component entries must be objects")
        raw = dict(raw)
        key = "mass" if raw.get("type") == "atom" else "weight"
        if key not in raw:
            raise DomainError(f"component {raw.get('type')!r} needs a {key!r} field")
        w = _num(raw.pop(key), key)
        if not w > 0:
            raise DomainError(f"{key} must be positive, got {w}")
        parts.append((w, component_from_dict(raw)))
    total = math.fsum(w for w, _ in parts)
    if abs(total - 1.0) > WEIGHT_SUM_TOL:
        raise DomainError(f"weights sum to {total!r}, outside 1 +- {WEIGHT_SUM_TOL}")
    if abs(total - 1.0) > 1e-12:
        parts = [(w / total, c) for w, c in parts]
    return Distribution1D(parts)


def _vector(v, name, k=None):
    if not isinstance(v, list):
        raise DomainError(f"{name} must be a list of numbers")
    out = np.array([_num(x, name) for x in v])
    if k is not None and out.size != k:
        raise DomainError(f"{name} has length {out.size}, expected {k}")
    return out


def from_dict(obj):
    """Distribution1D for a mixture, Product or Glued for the k-dimensional kinds."""
    if not isinstance(obj, dict) or "kind" not in obj:
        raise DomainError("distribution spec needs a 'kind' field")
    if "version" in obj and obj["version"] != SPEC_VERSION:
        raise DomainError(f"unsupported spec version {obj['version']!r}")
    kind = obj["kind"]
    if kind == "mixture":
        return _mixture_from_dict(obj)
    if kind == "product":
        _check_fields(obj, {"kind", "marginals"}, {"version"}, "product")
        ms = obj["marginals"]
        if not isinstance(ms, list):
            raise DomainError("marginals must be a list")
        marg = [from_dict(m) for m in ms]
        if not all(isinstance(m, Distribution1D) for m in marg):
            raise DomainError("product marginals must be mixtures")
        return Product(marg)
    if kind == "glued":
        _check_fields(obj, {"kind", "base", "tail", "x0", "xstar"}, {"version"}, "glued")
        base, tail = _as_k(from_dict(obj["base"])), _as_k(from_dict(obj["tail"]))
        if base.dim != tail.dim:
            raise DomainError("glued base and tail dimensions differ")
        return Glued(base, tail, _vector(obj["x0"], "x0", base.dim), _vector(obj["xstar"], "xstar", base.dim))
    raise DomainError(f"unknown distribution kind {kind!r}")


def _as_k(d):
    return Lift1D(d) if isinstance(d, Distribution1D) else d


def to_dict(d, version=True):
    """Inverse of ``from_dict``; a Lift1D serializes as its mixture."""
    if isinstance(d, Lift1D):
        d = d.d
    if isinstance(d, Distribution1D):
        comps = []
        for w, c in d.parts:
            item = c.to_dict()
            item["mass" if isinstance(c, C.Atom) else "weight"] = w
            comps.append(item)
        out = {"kind": "mixture", "components": comps}
    elif isinstance(d, Product):
        out = {"kind": "product", "marginals": [to_dict(m, False) for m in d.marginals]}
    elif isinstance(d, Glued):
        out = {"kind": "glued", "base": to_dict(d.base, False), "tail": to_dict(d.tail, False),
               "x0": [float(v) for v in d.x0], "xstar": [float(v) for v in d.xstar]}
    elif isinstance(d, DistributionK):
        raise DomainError(f"no serial form for {type(d).__name__}")
    else:
        raise DomainError(f"not a distribution: {d!r}")
    if version:
        out["version"] = SPEC_VERSION
    return out


def loads(text):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"spec is not valid JSON: {exc}") from None
    return from_dict(obj)


def dumps(d, **kw):
    return json.dumps(to_dict(d), **kw)


def load(path):
    if path == "-":
        import sys
        return loads(sys.stdin.read())
    try:
        with open(path) as fh:
            return loads(fh.read())
    except OSError as exc:
        raise DomainError(f"cannot read spec {path!r}: {exc}") from None

"""Single command-line entry point: ``levyliouville <command> [options]``.

Exit status is 0 when the computed certificate passes, 1 for a certified
failure (the computation ran and found a violation or a mathematical
obstruction), and 2 for usage errors.  Options come from flags, then a JSON
``--config`` file, then built-in defaults; the effective values are echoed in
every report.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
import time
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import __version__
from . import counterexample_continuous as cc
from . import counterexample_discrete as cd
from . import levy_core as lc
from . import persistence
from . import positive_liouville as pl
from . import wiener_inversion as wi
from .functions import cosine, polynomial

OUT_ENV = "LEVYLIOUVILLE_OUT"

# errors that mean "bad input" rather than "the mathematics says no"
USAGE_ERRORS = (cd.WindowExceedsLevelError, cc.BumpDegreeError, cc.OutsideWindowError, lc.InvalidTripletError,
                pl.NegativeWeightError, pl.NotProbabilityError, pl.UnsupportedMeasureError, wi.WindowError,
                persistence.CorruptFileError, persistence.VersionMismatchError, OSError, ZeroDivisionError)
FAILURES = {
    wi.InversionImpossibleError: "inversion-impossible",
    wi.NonIntegrableError: "non-integrable",
    wi.DoublingConditionError: "doubling-condition",
    wi.NotDecreasingError: "not-decreasing",
    lc.DivergentIntegralError: "divergent-integral",
    lc.QuadratureError: "quadrature-nonconvergence",
}


class UsageError(Exception):
    pass


PRESETS = {
    "brownian": lambda: lc.brownian(1, 0),
    "brownian-drift": lambda: lc.brownian(1, -1),
    "symmetric-jump": lambda: lc.LevyTriplet(0, 0, lc.AtomicMeasure(((1, Fraction(1, 2)), (-1, Fraction(1, 2))))),
    "counterexample": lambda: lc.counterexample_triplet(0),
    "counterexample-continuous": lambda: lc.counterexample_triplet(1),
}


def _triplet(p: dict) -> lc.LevyTriplet:
    if p.get("triplet"):
        return persistence.load(p["triplet"]) if not isinstance(p["triplet"], dict) \
            else persistence.triplet_from_json(p["triplet"])
    name = p.get("preset", "brownian")
    if name not in PRESETS:
        raise UsageError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    return PRESETS[name]()


def _numbers(text, kind=float) -> list:
    if isinstance(text, (list, tuple)):
        return [kind(v) for v in text]
    return [kind(v) for v in str(text).split(",") if v.strip()]


def _xi(text):
    s = str(text).replace(" ", "")
    if s.startswith("pi*"):
        return lc.PiMultiple(Fraction(s[3:]))
    if s == "pi":
        return lc.PiMultiple(1)
    return float(s)


def _function(spec: str):
    kind, _, arg = str(spec).partition(":")
    if kind == "poly":
        return polynomial([Fraction(c) for c in arg.split(",")])
    if kind == "cos":
        return cosine(float(arg or 1))
    if kind == "exp":
        return pl.ExponentialMixture(((float(arg), 1.0),)).function()
    raise UsageError(f"unknown function spec {spec!r} (poly:c0,c1,..  cos:w  exp:lam)")


def _jsonable(v):
    if isinstance(v, Fraction):
        return persistence.frac_to_str(v)
    if isinstance(v, int) and not isinstance(v, bool):
        return persistence.encode_number(v)
    if isinstance(v, float):
        return v if math.isfinite(v) else repr(v)
    if isinstance(v, (np.floating, np.integer)):
        return _jsonable(v.item())
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


# --------------------------------------------------------------------------
# commands: each returns (certificates, passed)


def cmd_symbol(p):
    t = _triplet(p)
    v = lc.symbol_eval(t, _xi(p["xi"]))
    return {"re": v.re, "im": v.im, "error": v.error}, True


def cmd_apply(p):
    t = _triplet(p)
    x = Fraction(p["x"]) if isinstance(p["x"], str) and "/" in p["x"] else float(p["x"])
    value, err = lc.apply_operator(t, _function(p["function"]), x, with_error=True)
    return {"value": value if isinstance(value, Fraction) else float(value), "error": err}, True


def cmd_counterexample_discrete(p):
    M, N = int(p["level"]), int(p["verify_window"])
    seq = cd.build_discrete(M)
    cert = cd.verify_harmonic_window(M, N, seq=seq)
    out = {"atoms": persistence.sequence_to_json(seq)["atoms"],
           "coefficients": cd.level_coefficients(seq),
           "window": {str(n): v for n, v in cert.values.items()},
           "symmetric": seq.is_symmetric(), "sparsity_violations": len(cd.sparsity_violations(seq))}
    if p.get("growth_eps") is not None or p.get("csv"):
        rep = cd.growth_report(seq, float(p.get("growth_eps") or 0.25))
        out["growth"] = {"max_atom_ratio": rep.max_atom_ratio, "bounded": rep.bounded}
        if p.get("csv"):
            cd.write_growth_csv(rep, p["csv"])
    return out, cert.passed and out["symmetric"] and not out["sparsity_violations"]


def cmd_counterexample_continuous(p):
    M, q = int(p["level"]), int(p["q"])
    b = cc.build_continuous(M, q)
    pts = [Fraction(j, 4) for j in range(-4 * M - 2, 4 * M + 3)]
    vals = {str(x): cc.apply_L_continuous(b, x) for x in pts}
    bounds = cc.piece_norm_bounds(b)
    if p.get("bundle_out"):
        persistence.save(b, p["bundle_out"])
    if p.get("csv"):
        cc.sample_csv(b, p["csv"])
    out = {"log2_x": [x.bit_length() - 1 for x in b.levels], "values": vals,
           "norm_bounds": [{"m": nb.m, "upper": float(nb.upper), "sampled": nb.sampled, "log_x": nb.log_x,
                            "holds": nb.holds} for nb in bounds],
           "max_degree": max(pp.degree for pp in b.pieces.values())}
    return out, all(v == 0 for v in vals.values()) and all(nb.holds for nb in bounds)


def cmd_lambda(p):
    rep = pl.lambda_set(_triplet(p), tuple(_numbers(p["bracket"])), float(p["tol"]))
    return {"roots": rep.roots, "convex": rep.convex_ok, "suspicious": rep.suspicious}, not rep.suspicious


def cmd_mixture(p):
    terms = tuple(tuple(map(float, term.split(":"))) for term in str(p["terms"]).split(","))
    lo, hi, n = _numbers(p["points"])
    rep = pl.verify_mixture(pl.ExponentialMixture(terms), _triplet(p), np.linspace(lo, hi, int(n)), float(p["tol"]))
    return {"max_residual": rep.max_residual, "analytic": max(rep.analytic)}, rep.passed


def cmd_exit_mc(p):
    t = _triplet(p)
    law = pl.exit_distribution_mc(t, float(p["a"]), float(p["b"]), float(p["x0"]), int(p["paths"]),
                                  float(p["dt"]), int(p["seed"]), threads=int(p["threads"]))
    if p.get("csv"):
        law.to_csv(p["csv"])
    out = {"right_fraction": law.right_fraction, "stderr": law.right_stderr}
    passed = True
    if p.get("expect_right") is not None:
        out["z"] = abs(law.right_fraction - float(p["expect_right"])) / law.right_stderr
        passed = out["z"] <= 3
    return out, passed


def cmd_dynkin(p):
    est = pl.dynkin_residual(_triplet(p), float(p["a"]), float(p["b"]), float(p["x0"]), _function(p["phi"]),
                             int(p["paths"]), float(p["dt"]), int(p["seed"]), threads=int(p["threads"]))
    return {"value": est.value, "stderr": est.stderr, "z": est.within}, est.within <= 3


def cmd_deny(p):
    W = int(p["window"])
    kind = p["h"]
    if kind == "counterexample":
        h = cd.build_discrete(W)
        res = pl.deny_check(h, lc.counterexample_measure(40))
    elif kind == "pow2":
        h = cd.SparseSequence({n: Fraction(2) ** n for n in range(-W - 1, W + 2)})
        res = pl.deny_check(h, {1: Fraction(2, 3), -1: Fraction(1, 3)}, window=range(-W, W + 1))
    elif kind == "const":
        h = cd.SparseSequence({n: Fraction(1) for n in range(-W - 1, W + 2)})
        res = pl.deny_check(h, {1: Fraction(1, 2), -1: Fraction(1, 2)}, window=range(-W, W + 1))
    else:
        raise UsageError(f"unknown sequence {kind!r} (counterexample, pow2, const)")
    return {"residuals": {str(n): v for n, v in res.items()}}, all(v == 0 for v in res.values())


def cmd_weight_check(p):
    fam = p["family"]
    if fam == "power":
        Y = wi.power_weight(float(p["alpha"]))
    elif fam == "log":
        Y = wi.log_weight(float(p["beta"]))
    else:
        raise UsageError("family must be power or log")
    v = wi.check_submultiplicative(Y, n=int(p["pairs"]), seed=int(p["seed"]))
    return {"violation": v}, v == 0


def _profile(spec: str):
    kind, _, arg = str(spec).partition(":")
    if kind == "power":
        a = float(arg or 2)
        return lambda r: (1 + np.asarray(r, dtype=float)) ** -a
    if kind == "exp":
        return lambda r: np.exp(-np.asarray(r, dtype=float))
    raise UsageError(f"unknown profile {spec!r} (power:a, exp)")


def cmd_radial_eps(p):
    phi = _profile(p["profile"])
    res = wi.radial_epsilon(phi, int(p["dim"]))
    eps = res.eps * float(p["scale"])
    rep = wi.check_direct_jump(wi.radial_weight(phi, eps), _numbers(p["radii"]))
    return {"eps": res.eps, "c1": res.c1, "c2": res.c2, "checked_eps": eps, "excess": rep.excess,
            "tail_ratios": rep.tail_ratios}, rep.passed


def cmd_invert(p):
    if p.get("grid"):
        f = persistence.read_grid(p["grid"])
    else:
        f = wi.GridFunction.sample(lambda x: np.exp(-x * x / 2) / math.sqrt(2 * math.pi), -20, 20,
                                   float(p["spacing"]))
    K = _numbers(p["K"])
    intervals = list(zip(K[::2], K[1::2]))
    r = p["r"] if p["r"] == "auto" else float(p["r"])
    res = wi.neumann_invert(f, intervals, int(p["N"]), r=r)
    c = res.certificate
    out = c.to_json()
    out.update(rho=c.rho, oracle_gap=c.oracle_gap, min_phi=c.min_phi)
    return out, c.passed and c.residual <= float(p["tol"])


def cmd_spectrum(p):
    R = float(p["radius"])
    src = str(p["input"])
    if src == "counterexample":
        h = wi.render_atoms(cd.build_discrete(12).atoms, -R, R)
    elif p.get("grid"):
        h = persistence.read_grid(p["grid"])
    else:
        f = _function(src)
        h = wi.GridFunction.sample(lambda x: np.asarray(f.value(x), dtype=float) * np.ones_like(x), -R, R, 0.01)
    inside, outside = wi.spectrum_mass(h, wi.taper(R), float(p["delta"]))
    frac = outside / (inside + outside) if inside + outside > 0 else 0.0
    out = {"inside": inside, "outside": outside, "outside_fraction": frac, "leakage": wi.LEAKAGE_THRESHOLD}
    expect = p.get("expect")
    passed = True
    if expect == "concentrated":
        passed = frac <= wi.LEAKAGE_THRESHOLD
    elif expect == "spread":
        passed = frac > wi.LEAKAGE_THRESHOLD
    return out, passed


# commands whose --csv output is a dedicated table rather than the flattened certificate
CSV_NATIVE = {"counterexample-discrete", "counterexample-continuous", "exit-mc"}


def _flatten(prefix: str, v, rows: list) -> None:
    if isinstance(v, dict):
        for k in sorted(v):
            _flatten(f"{prefix}.{k}" if prefix else str(k), v[k], rows)
    elif isinstance(v, (list, tuple)):
        for i, x in enumerate(v):
            _flatten(f"{prefix}[{i}]", x, rows)
    else:
        rows.append((prefix, v))


def write_certificate_csv(certs: dict, path) -> None:
    rows: list = []
    _flatten("", _jsonable(certs), rows)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["key", "value"])
        w.writerows(rows)


# --------------------------------------------------------------------------
# parser


COMMANDS = {
    "symbol": (cmd_symbol, {"preset": "counterexample", "xi": "pi"}),
    "apply": (cmd_apply, {"preset": "brownian", "function": "poly:0,0,1", "x": "3"}),
    "counterexample-discrete": (cmd_counterexample_discrete, {"level": 12, "verify_window": 12}),
    "counterexample-continuous": (cmd_counterexample_continuous, {"level": 2, "q": 12}),
    "lambda": (cmd_lambda, {"preset": "brownian-drift", "bracket": [-5, 5], "tol": 1e-10}),
    "mixture": (cmd_mixture, {"preset": "brownian-drift", "terms": "0:3,1:2", "points": [-5, 5, 21], "tol": 1e-9}),
    "exit-mc": (cmd_exit_mc, {"preset": "brownian", "a": 1.0, "b": 2.0, "x0": 0.0, "paths": 10000, "dt": 1e-3,
                              "seed": 0}),
    "dynkin": (cmd_dynkin, {"preset": "brownian", "a": 1.0, "b": 2.0, "x0": 0.0, "phi": "poly:0,1",
                            "paths": 10000, "dt": 1e-3, "seed": 0}),
    "deny": (cmd_deny, {"h": "counterexample", "window": 12}),
    "weight-check": (cmd_weight_check, {"family": "power", "alpha": 2.0, "beta": 1.0, "pairs": 10000, "seed": 0}),
    "radial-eps": (cmd_radial_eps, {"profile": "power:2", "dim": 1, "scale": 1.0, "radii": [1, 10, 100]}),
    "invert": (cmd_invert, {"K": [-1, 1], "N": 30, "r": "auto", "spacing": 0.01, "tol": 1e-6}),
    "spectrum": (cmd_spectrum, {"input": "counterexample", "radius": 300.0, "delta": 0.5}),
}

_S = argparse.SUPPRESS


def _add_common(sp):
    sp.add_argument("--config", default=_S, help="JSON file with option values")
    sp.add_argument("--out", default=_S, help="report path (default: $%s/<command>.json)" % OUT_ENV)
    sp.add_argument("--no-timestamp", action="store_true", default=_S, help="omit time fields from the report")
    sp.add_argument("--threads", type=int, default=_S)
    sp.add_argument("--csv", default=_S, help="also write a plotting-friendly CSV table")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="levyliouville", description=__doc__.splitlines()[0],
                                 allow_abbrev=False)
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)
    specs = {
        "symbol": [("--preset",), ("--triplet",), ("--xi",)],
        "apply": [("--preset",), ("--triplet",), ("--function",), ("--x",)],
        "counterexample-discrete": [("--level", int), ("--verify-window", int), ("--growth-eps", float)],
        "counterexample-continuous": [("--level", int), ("--q", int), ("--bundle-out",)],
        "lambda": [("--preset",), ("--triplet",), ("--bracket", float, 2), ("--tol", float)],
        "mixture": [("--preset",), ("--triplet",), ("--terms",), ("--points", float, 3), ("--tol", float)],
        "exit-mc": [("--preset",), ("--triplet",), ("--a", float), ("--b", float), ("--x0", float),
                    ("--paths", int), ("--dt", float), ("--seed", int), ("--expect-right", float)],
        "dynkin": [("--preset",), ("--triplet",), ("--a", float), ("--b", float), ("--x0", float), ("--phi",),
                   ("--paths", int), ("--dt", float), ("--seed", int)],
        "deny": [("--h",), ("--window", int)],
        "weight-check": [("--family",), ("--alpha", float), ("--beta", float), ("--pairs", int), ("--seed", int)],
        "radial-eps": [("--profile",), ("--dim", int), ("--scale", float), ("--radii", float, "+")],
        "invert": [("--grid",), ("--K", float, "+"), ("--N", int), ("--r",), ("--spacing", float), ("--tol", float)],
        "spectrum": [("--input",), ("--grid",), ("--radius", float), ("--delta", float),
                     ("--expect",)],
    }
    for name, opts in specs.items():
        sp = sub.add_parser(name, allow_abbrev=False)
        _add_common(sp)
        for opt in opts:
            kw = {"default": _S}
            if len(opt) > 1:
                kw["type"] = opt[1]
            if len(opt) > 2:
                kw["nargs"] = opt[2]
            sp.add_argument(opt[0], **kw)
    return ap


def _effective(ns: argparse.Namespace) -> dict:
    _, defaults = COMMANDS[ns.command]
    params = {"threads": 1, **defaults}
    flags = {k: v for k, v in vars(ns).items() if k not in ("command",)}
    if "config" in flags:
        try:
            cfg = json.loads(Path(flags.pop("config")).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config: {exc}") from exc
        if not isinstance(cfg, dict):
            raise UsageError("config must be a JSON object")
        params.update({k.replace("-", "_"): v for k, v in cfg.items()})
    params.update(flags)
    return params


def run(argv=None) -> int:
    ap = build_parser()
    try:
        ns = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    start = time.perf_counter()
    report = {"command": ns.command, "version": __version__}
    try:
        params = _effective(ns)
        stamp = not params.pop("no_timestamp", False)
        out = params.pop("out", None)
        report["parameters"] = params
        fn, _ = COMMANDS[ns.command]
        try:
            certs, passed = fn(params)
            reason = None if passed else "certificate-failed"
        except tuple(FAILURES) as exc:
            certs, passed = {"error": str(exc)}, False
            reason = next(code for cls, code in FAILURES.items() if isinstance(exc, cls))
    except (UsageError, KeyError, ValueError, TypeError) + USAGE_ERRORS as exc:
        print(f"levyliouville {ns.command}: error: {exc}", file=sys.stderr)
        return 2
    report.update(certificates=certs, passed=bool(passed), reason=reason,
                  rng=pl.RNG_NAME if ns.command in ("exit-mc", "dynkin") else None)
    if stamp:
        report["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S%z")
        report["duration"] = time.perf_counter() - start
    path = Path(out) if out else Path(os.environ.get(OUT_ENV, ".")) / f"{ns.command}.json"
    try:
        if params.get("csv") and ns.command not in CSV_NATIVE:
            write_certificate_csv(certs, params["csv"])
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(_jsonable(report), indent=1, sort_keys=True) + "\n")
    except OSError as exc:
        print(f"levyliouville {ns.command}: error: cannot write output: {exc}", file=sys.stderr)
        return 2
    print(f"{ns.command}: {'pass' if passed else 'FAIL'}" + (f" ({reason})" if reason else "") + f" -> {path}")
    return 0 if passed else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()

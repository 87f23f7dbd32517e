"""Lossless JSON/CSV formats for triplets, sparse sequences, bundles and grids.

Rationals are written as ``"p/q"`` strings and integers beyond 2^53 as
decimal strings, so exact objects survive a round trip unchanged.  Floats are
written with their shortest round-trip ``repr``.
"""

from __future__ import annotations

import csv
import dataclasses
import json
from fractions import Fraction
from pathlib import Path

import gmpy2
import numpy as np

from .counterexample_continuous import PiecewiseBundle, Polynomial
from .counterexample_discrete import SparseSequence
from .levy_core import (AtomicMeasure, DensityMeasure, LevyTriplet, QuadratureSpec, SeriesMeasure,
                        counterexample_measure)
from .wiener_inversion import GridFunction

FORMAT_VERSION = 1
_SAFE_INT = 2**53


class CorruptFileError(ValueError):
    pass


class VersionMismatchError(ValueError):
    pass


# --------------------------------------------------------------------------
# scalars


def int_to_str(n: int) -> str:
    return gmpy2.mpz(n).digits() if abs(n) >= 10**4000 else str(n)


def str_to_int(s: str) -> int:
    return int(gmpy2.mpz(s)) if len(s) > 4000 else int(s)


def frac_to_str(v: Fraction) -> str:
    v = Fraction(v)
    return f"{int_to_str(v.numerator)}/{int_to_str(v.denominator)}"


def encode_number(v):
    if isinstance(v, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(v, int):
        return v if abs(v) < _SAFE_INT else int_to_str(v)
    if isinstance(v, Fraction):
        return frac_to_str(v)
    return float(v)


def decode_number(v):
    if isinstance(v, bool):
        raise CorruptFileError("unexpected boolean where a number was expected")
    if isinstance(v, (int, float)):
        return v
    if isinstance(v, str):
        try:
            if "/" in v:
                p, q = v.split("/")
                return Fraction(str_to_int(p), str_to_int(q))
            if v.lstrip("-").isdigit():
                return str_to_int(v)
            return float(v)
        except ValueError as exc:
            raise CorruptFileError(f"bad number {v[:40]!r}") from exc
    raise CorruptFileError(f"bad number of type {type(v).__name__}")


# --------------------------------------------------------------------------
# objects


def triplet_to_json(t: LevyTriplet) -> dict:
    m = t.measure
    if isinstance(m, AtomicMeasure):
        meas = {"atoms": [[encode_number(y), encode_number(w)] for y, w in m.atoms]}
    elif isinstance(m, DensityMeasure):
        meas = {"density": m.name, "params": dict(m.params), "quadrature": dataclasses.asdict(m.quadrature)}
    elif isinstance(m, SeriesMeasure):
        meas = {"series": "counterexample", "truncation": m.truncation}
    else:
        raise TypeError(f"cannot serialise {type(m).__name__}")
    return {"version": FORMAT_VERSION, "kind": "triplet", "diffusion": encode_number(t.diffusion),
            "drift": encode_number(t.drift), "measure": meas}


def triplet_from_json(d: dict) -> LevyTriplet:
    _check_header(d, "triplet", required=False)
    try:
        m = d.get("measure", {"atoms": []})
        if "atoms" in m:
            meas = AtomicMeasure(tuple((decode_number(y), decode_number(w)) for y, w in m["atoms"]))
        elif "density" in m:
            meas = DensityMeasure(m["density"], dict(m.get("params", {})),
                                  QuadratureSpec(**m.get("quadrature", {})))
        elif m.get("series") == "counterexample":
            meas = counterexample_measure(int(m.get("truncation", 40)))
        else:
            raise CorruptFileError("measure must declare atoms, density or series")
        return LevyTriplet(decode_number(d.get("diffusion", 0)), decode_number(d.get("drift", 0)), meas)
    except (KeyError, TypeError) as exc:
        raise CorruptFileError(f"malformed triplet: {exc}") from exc


def sequence_to_json(s: SparseSequence) -> dict:
    return {"version": FORMAT_VERSION, "kind": "sparse_sequence", "level": s.level,
            "atoms": [[int_to_str(n), frac_to_str(v)] for n, v in sorted(s.atoms.items())]}


def sequence_from_json(d: dict) -> SparseSequence:
    _check_header(d, "sparse_sequence")
    try:
        return SparseSequence({str_to_int(n): decode_number(v) for n, v in d["atoms"]}, level=int(d["level"]))
    except (KeyError, TypeError, ValueError) as exc:
        raise CorruptFileError(f"malformed sequence: {exc}") from exc


def bundle_to_json(b: PiecewiseBundle) -> dict:
    return {"version": FORMAT_VERSION, "kind": "bundle", "level": b.level, "q": b.q,
            "x": [int_to_str(x) for x in b.levels],
            "pieces": [[int_to_str(c), [frac_to_str(v) for v in p.coeffs]] for c, p in sorted(b.pieces.items())]}


def bundle_from_json(d: dict) -> PiecewiseBundle:
    _check_header(d, "bundle")
    try:
        levels = tuple(str_to_int(x) for x in d["x"])
        if len(levels) != int(d["level"]) + 1:
            raise CorruptFileError("level count does not match the x list")
        pieces = {str_to_int(c): Polynomial(tuple(decode_number(v) for v in cs)) for c, cs in d["pieces"]}
        return PiecewiseBundle(pieces, levels, int(d["q"]))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, CorruptFileError):
            raise
        raise CorruptFileError(f"malformed bundle: {exc}") from exc


def _check_header(d, kind: str, required: bool = True) -> None:
    if not isinstance(d, dict):
        raise CorruptFileError("top level must be a JSON object")
    if "version" not in d and not required:
        return
    if d.get("version") != FORMAT_VERSION:
        raise VersionMismatchError(f"format version {d.get('version')!r}, expected {FORMAT_VERSION}")
    if d.get("kind", kind) != kind:
        raise CorruptFileError(f"expected a {kind}, found {d.get('kind')!r}")


_ENCODERS = [(LevyTriplet, triplet_to_json), (SparseSequence, sequence_to_json), (PiecewiseBundle, bundle_to_json)]
_DECODERS = {"triplet": triplet_from_json, "sparse_sequence": sequence_from_json, "bundle": bundle_from_json}


def save(obj, path) -> None:
    path = Path(path)
    if isinstance(obj, GridFunction):
        write_grid(obj, path)
        return
    for cls, enc in _ENCODERS:
        if isinstance(obj, cls):
            path.write_text(json.dumps(enc(obj), separators=(",", ":")))
            return
    raise TypeError(f"cannot save {type(obj).__name__}")


def load(path):
    path = Path(path)
    if path.suffix == ".csv":
        return read_grid(path)
    try:
        d = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise CorruptFileError(f"{path}: {exc}") from exc
    if not isinstance(d, dict) or d.get("kind") not in _DECODERS:
        raise CorruptFileError(f"{path}: unknown object kind")
    return _DECODERS[d["kind"]](d)


# --------------------------------------------------------------------------
# grids


def write_grid(g: GridFunction, path) -> None:
    samples = np.asarray(g.samples)
    if np.iscomplexobj(samples):
        raise TypeError("grid CSV holds real samples only")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["version", FORMAT_VERSION, "origin", repr(float(g.origin)), "spacing", repr(float(g.spacing)),
                    "count", samples.size])
        for v in samples:
            w.writerow([repr(float(v))])


def read_grid(path) -> GridFunction:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or len(rows[0]) != 8 or rows[0][0] != "version":
        raise CorruptFileError(f"{path}: missing grid header")
    head = rows[0]
    if int(head[1]) != FORMAT_VERSION:
        raise VersionMismatchError(f"grid format version {head[1]}, expected {FORMAT_VERSION}")
    try:
        origin, spacing, count = float(head[3]), float(head[5]), int(head[7])
        samples = np.array([float(r[0]) for r in rows[1:]])
    except (ValueError, IndexError) as exc:
        raise CorruptFileError(f"{path}: {exc}") from exc
    if samples.size != count:
        raise CorruptFileError(f"{path}: expected {count} samples, found {samples.size}")
    return GridFunction(origin, spacing, samples)

import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from levyliouville import counterexample_continuous as cc
from levyliouville import counterexample_discrete as cd
from levyliouville import levy_core as lc
from levyliouville import persistence as ps
from levyliouville import wiener_inversion as wi

big_ints = st.one_of(st.integers(), st.integers(min_value=2**53, max_value=2**400),
                     st.builds(lambda e: 2**e + 1, st.integers(min_value=13000, max_value=14000)))


@given(big_ints)
def test_integer_roundtrip(n):
    assert ps.decode_number(ps.encode_number(n)) == n
    assert ps.str_to_int(ps.int_to_str(n)) == n


@given(st.fractions())
def test_fraction_roundtrip(q):
    assert ps.decode_number(ps.encode_number(q)) == q


@given(st.floats(allow_nan=False, allow_infinity=False))
def test_float_roundtrip(v):
    assert ps.decode_number(json.loads(json.dumps(ps.encode_number(v)))) == v


@pytest.mark.parametrize("t", [
    lc.brownian(Fraction(1, 3), -2),
    lc.LevyTriplet(0, 1, lc.AtomicMeasure(((Fraction(1, 2), 2), (-3, Fraction(1, 7))))),
    lc.LevyTriplet(1, 0, lc.DensityMeasure("tempered_stable", {"alpha": 0.5, "theta": 2.0})),
    lc.counterexample_triplet(1, truncation=12),
])
def test_triplet_roundtrip(tmp_path, t):
    path = tmp_path / "t.json"
    ps.save(t, path)
    back = ps.load(path)
    assert back.diffusion == t.diffusion and back.drift == t.drift
    if isinstance(t.measure, lc.SeriesMeasure):
        assert back.measure.truncation == t.measure.truncation
        assert back.measure.atoms(5) == t.measure.atoms(5)
    else:
        assert back.measure == t.measure


def test_sequence_roundtrip(tmp_path):
    h = cd.build_discrete(12)
    ps.save(h, tmp_path / "h.json")
    assert ps.load(tmp_path / "h.json") == h


def test_bundle_roundtrip(tmp_path):
    b = cc.build_continuous(2, 10)
    ps.save(b, tmp_path / "b.json")
    back = ps.load(tmp_path / "b.json")
    assert back.levels == b.levels and back.pieces == b.pieces and back.q == b.q


@given(st.lists(st.floats(allow_nan=False, allow_infinity=False, width=64), min_size=2, max_size=50),
       st.floats(min_value=-100, max_value=100), st.floats(min_value=1e-4, max_value=1))
def test_grid_roundtrip(tmp_path_factory, vals, origin, spacing):
    path = tmp_path_factory.mktemp("g") / "g.csv"
    g = wi.GridFunction(origin, spacing, np.array(vals))
    ps.save(g, path)
    back = ps.load(path)
    assert back.origin == g.origin and back.spacing == g.spacing
    assert np.array_equal(back.samples, g.samples)


def test_truncated_json_detected(tmp_path):
    path = tmp_path / "h.json"
    ps.save(cd.build_discrete(4), path)
    path.write_text(path.read_text()[:-20])
    with pytest.raises(ps.CorruptFileError):
        ps.load(path)


def test_truncated_csv_detected(tmp_path):
    path = tmp_path / "g.csv"
    ps.save(wi.GridFunction(0.0, 0.5, np.arange(20.0)), path)
    lines = path.read_text().splitlines()
    path.write_text("\n".join(lines[:5]) + "\n")
    with pytest.raises(ps.CorruptFileError):
        ps.load(path)


def test_version_mismatch(tmp_path):
    path = tmp_path / "h.json"
    d = ps.sequence_to_json(cd.build_discrete(2))
    d["version"] = 99
    path.write_text(json.dumps(d))
    with pytest.raises(ps.VersionMismatchError):
        ps.load(path)


def test_unknown_kind(tmp_path):
    path = tmp_path / "x.json"
    path.write_text('{"kind": "teapot"}')
    with pytest.raises(ps.CorruptFileError):
        ps.load(path)

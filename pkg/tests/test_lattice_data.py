import json
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from friedlab.errors import (InvariantViolation, NonInvertibleGenerator, Overflow, ParseError,
                             SchemaVersionMismatch)
from friedlab.group_model import ad_determinant_factor, build_preset
from friedlab.lattice_data import (dumps, enumerate_words, load_classes, loads, reduced_words,
                                   save_classes, synthesize_classes)

DIAG2 = [[[2, 0], [0, Fraction(1, 2)]]]
FREE2 = [[[3, 0], [0, Fraction(1, 3)]],
         [[Fraction(5, 3), Fraction(4, 3)], [Fraction(4, 3), Fraction(5, 3)]]]
# frozen from the pairwise conjugacy oracle in tests/oracles/oracle_values.py
FREE2_CLASSES_LEN6 = 37


def _mul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)] for i in range(2)]


def _inv(a):
    return [[a[1][1], -a[0][1]], [-a[1][0], a[0][0]]]


def test_round_trip_bytes(tmp_path):
    cf = synthesize_classes(seed=7, count=50)
    path = tmp_path / "c.json"
    save_classes(cf, path)
    text = path.read_text()
    assert dumps(load_classes(path)) == text
    assert dumps(loads(text)) == text


def test_empty_records():
    cf = synthesize_classes(seed=1, count=0)
    assert loads(dumps(cf)).records == []


def test_malformed_field():
    text = dumps(synthesize_classes(seed=1, count=2))
    bad = text.replace('"m_mult": 1', '"m_mult": "x"', 1)
    with pytest.raises(ParseError) as err:
        loads(bad)
    assert err.value.field == "m_mult" and err.value.line is not None


def test_not_json():
    with pytest.raises(ParseError):
        loads("{not json")


def test_schema_mismatch():
    doc = json.loads(dumps(synthesize_classes(seed=1, count=1)))
    doc["schema_version"] = 99
    with pytest.raises(SchemaVersionMismatch):
        loads(json.dumps(doc))


def test_invariant_violation_on_load():
    doc = json.loads(dumps(synthesize_classes(seed=1, count=1)))
    doc["records"][0]["m_mult"] = 0
    with pytest.raises(InvariantViolation):
        loads(json.dumps(doc))


def test_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_classes(tmp_path / "nope.json")


def test_synthesis_deterministic():
    assert dumps(synthesize_classes(seed=3, count=20)) == dumps(synthesize_classes(seed=3, count=20))
    assert dumps(synthesize_classes(seed=3, count=20)) != dumps(synthesize_classes(seed=4, count=20))


def test_synthesis_chi_choices():
    recs = synthesize_classes(seed=2, count=200).records
    assert {r.chi_orb for r in recs} == {0, 1, Fraction(1, 2), Fraction(1, 3)}
    assert {r.m_mult for r in recs} <= {1, 2}


@pytest.mark.parametrize("dist", ["zero", "rational"])
def test_synthesis_angle_distributions(dist):
    recs = synthesize_classes(seed=2, count=20, angle_dist=dist).records
    for r in recs:
        k = r.holonomy.angles[0] / (math.pi / 6)
        assert abs(k - round(k)) < 1e-12
        if dist == "zero":
            assert r.holonomy.angles[0] == 0


def test_identity_generator():
    assert enumerate_words([[[1, 0], [0, 1]]], 4).records == []


def test_diag_closed_form():
    recs = enumerate_words(DIAG2, 5).records
    assert len(recs) == 5
    for k, r in enumerate(sorted(recs, key=lambda r: r.ell), 1):
        assert r.ell == pytest.approx(2 * k * math.log(2), rel=1e-12)
        assert r.m_mult == k and r.chi_orb == 1 and r.weight == Fraction(1, k)
        assert r.holonomy.angles == (0.0,)
        assert r.convention == "fried-primitive"


def test_free_group_count():
    assert len(enumerate_words(FREE2, 6).records) == FREE2_CLASSES_LEN6


def test_records_usable():
    m = build_preset("sl2c")
    for r in enumerate_words(FREE2, 4).records:
        assert r.holonomy.a_part[0] > 0
        assert ad_determinant_factor(m, r.holonomy) > 0


def test_bad_generators():
    with pytest.raises(NonInvertibleGenerator):
        enumerate_words([[[1, 1], [1, 1]]], 3)
    with pytest.raises(NonInvertibleGenerator):
        enumerate_words([[[2, 0], [0, 1]]], 3)


def test_overflow():
    with pytest.raises(Overflow):
        enumerate_words(FREE2, 8, cap=100)


def test_reduced_word_count():
    # 2n (2n - 1)^(k - 1) reduced words of length k in n free generators
    words = list(reduced_words(2, 3))
    assert len(words) == 4 + 12 + 36


@given(st.integers(-3, 3), st.integers(-3, 3), st.integers(1, 3))
def test_stable_under_conjugation(x, y, z):
    # c = [[1, x], [0, 1]] [[1, 0], [y, 1]] [[z, 0], [0, 1/z]] is unimodular
    c = _mul(_mul([[1, x], [0, 1]], [[1, 0], [y, 1]]), [[Fraction(z), 0], [0, Fraction(1, z)]])
    ci = _inv(c)
    conj = [_mul(_mul(c, g), ci) for g in FREE2]
    a = sorted((round(r.ell, 9), r.m_mult) for r in enumerate_words(FREE2, 3).records)
    b = sorted((round(r.ell, 9), r.m_mult) for r in enumerate_words(conj, 3).records)
    assert a == b

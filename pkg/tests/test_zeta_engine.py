import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from friedlab import eta_pipeline as ep
from friedlab import zeta_engine as ze
from friedlab.errors import EllipticClass, EvaluationAtPole, InvariantViolation
from friedlab.group_model import ad_determinant_factor
from friedlab.lattice_data import synthesize_classes
from friedlab.lie_characters import TorusElement, VirtualCharacter, Weight
from friedlab.representations import full_h_character, parse_rep_spec
from tests.conftest import random_torus

rows = st.lists(st.tuples(st.integers(-5, 8).map(Fraction), st.integers(0, 3), st.integers(0, 3)),
                max_size=6, unique_by=lambda r: r[0])


def record(ell, angle=0.0, chi=1, m=1, rid="c"):
    return ze.ConjugacyClassRecord(rid, ell, TorusElement((ell,), (angle,)), Fraction(chi), m)


def pair_trace_oracle(a: float, phi: float) -> float:
    # closed form of the trace of V10 + V01 at exp(a a0) exp(phi t)
    return 4 * math.cosh(a / 2) * math.cos(phi)


# records and series


def test_record_validation():
    with pytest.raises(InvariantViolation):
        ze.ConjugacyClassRecord("x", -1.0, TorusElement((1.0,), (0.0,))).validate()
    with pytest.raises(InvariantViolation):
        record(2.0, m=0).validate()
    with pytest.raises(InvariantViolation):
        ze.ConjugacyClassRecord("x", 2.0, TorusElement((1.0,), (0.0,))).validate(b_norm=1.0)
    assert record(2.0, chi=Fraction(1, 3), m=2).weight == Fraction(1, 6)


def test_ruelle_empty():
    s = ze.ruelle_log_series([], VirtualCharacter([Weight((0,), (0,))]))
    assert len(s) == 0 and s.exp_value(1.0) == 1


def test_ruelle_single_class():
    chi = VirtualCharacter([Weight((0,), (0,))]) * 2
    s = ze.ruelle_log_series([record(1.0)], chi)
    assert s.terms == [(1.0, 2 + 0j)]
    assert s.exp_value(0.5) == pytest.approx(cmath.exp(2 * math.exp(-0.5)))


def test_ruelle_brute_force(classes50, rep_pair):
    s = ze.ruelle_log_series(classes50, full_h_character(rep_pair))
    oracle: dict = {}
    for c in classes50:
        v = float(c.chi_orb) / c.m_mult * pair_trace_oracle(c.holonomy.a, c.holonomy.angles[0])
        oracle[c.ell] = oracle.get(c.ell, 0) + v
    assert len(s) == len(oracle)
    for ell, v in oracle.items():
        assert s.coefficient(ell) == pytest.approx(v, rel=1e-12, abs=1e-12)


def test_selberg_trivial_eta(sl2c):
    c = record(1.3, 0.4, chi=Fraction(1, 2), m=2)
    s = ze.selberg_log_series([c], VirtualCharacter([Weight((), (0,))]), sl2c)
    expected = -0.25 / ad_determinant_factor(sl2c, c.holonomy)
    assert s.coefficient(1.3) == pytest.approx(expected, rel=1e-12)


def test_selberg_no_denominator(rline_su2):
    c = record(1.3, 0.4)
    s = ze.selberg_log_series([c], VirtualCharacter([Weight((), (0,))]), rline_su2)
    assert s.coefficient(1.3) == pytest.approx(-1.0)


def test_selberg_elliptic(sl2c):
    c = ze.ConjugacyClassRecord("e", 1.0, TorusElement((0.0,), (0.3,)))
    with pytest.raises(EllipticClass):
        ze.selberg_log_series([c], VirtualCharacter([Weight((), (0,))]), sl2c)


def test_series_shift_and_merge():
    s = ze.LogZetaSeries.from_pairs([(1.0, 1), (1.0 + 1e-12, 2), (2.0, 3)])
    assert s.terms == [(1.0, 3 + 0j), (2.0, 3 + 0j)]
    assert s.shifted(0.5).coefficient(2.0) == pytest.approx(3 * math.exp(-1.0))


# factorization


def test_factorization_50(classes50, fam_pair):
    assert ze.factorization_check(classes50, fam_pair) <= 1e-10


def test_factorization_chi_zero(fam_pair):
    recs = synthesize_classes(seed=3, count=20, chi_choices=(0,)).records
    log_r = ze.ruelle_log_series(recs, full_h_character(fam_pair.rep))
    assert all(c == 0 for _, c in log_r.terms)
    assert all(c == 0 for _, c in ze.assembled_log_zeta(recs, fam_pair).terms)
    assert ze.factorization_check(recs, fam_pair) == 0


def test_factorization_matches_pointwise(fam_pair):
    # per-class residual is the pointwise identity defect at the class holonomy
    for t in random_torus(9, 10):
        rec = ze.ConjugacyClassRecord("s", t.a, t)
        eq, defect = ep.verify_pointwise_identity(fam_pair, [t])
        assert ze.factorization_check([rec], fam_pair) <= max(defect, 1e-12) * 10


def test_factorization_direct(fam_direct):
    recs = synthesize_classes(seed=4, count=30, model="rline_x_su2").records
    assert ze.factorization_check(recs, fam_direct) <= 1e-10


def test_assembled_equals_ruelle(classes50, fam_pair):
    a = ze.assembled_log_zeta(classes50, fam_pair)
    r = ze.ruelle_log_series(classes50, full_h_character(fam_pair.rep))
    for ell, c in r.terms:
        assert a.coefficient(ell) == pytest.approx(c, rel=1e-9, abs=1e-9)


@given(st.integers(0, 10 ** 6))
def test_ruelle_additive(seed):
    from friedlab.group_model import build_preset
    m = build_preset("sl2c")
    recs = synthesize_classes(seed=seed, count=8).records
    c1 = full_h_character(parse_rep_spec(m, "1,0"))
    c2 = full_h_character(parse_rep_spec(m, "1,1"))
    s12 = ze.ruelle_log_series(recs, c1 + c2)
    s1, s2 = ze.ruelle_log_series(recs, c1), ze.ruelle_log_series(recs, c2)
    for ell, c in s12.terms:
        assert c == pytest.approx(s1.coefficient(ell) + s2.coefficient(ell), abs=1e-9)


# conjugation symmetry


def test_conjugation(classes50, sl2c):
    c10 = full_h_character(parse_rep_spec(sl2c, "1,0"))
    c01 = full_h_character(parse_rep_spec(sl2c, "0,1"))
    assert ze.conjugation_symmetry_check(classes50, c10, c01) <= 1e-12
    assert ze.conjugation_symmetry_check([], c10, c01) == 0
    real = c10 + c01
    assert ze.conjugation_symmetry_check(classes50, real, real) <= 1e-12


# tables


def test_graded_determinant_basics():
    assert ze.graded_determinant(ze.SpectrumTable.build([]), Fraction(3)) == 1
    assert ze.graded_determinant(ze.SpectrumTable.build([(1, 2, 0)]), 1) == 4
    bal = ze.SpectrumTable.build([(1, 2, 2), (Fraction(5, 2), 1, 1)])
    assert ze.graded_determinant(bal, Fraction(7, 3)) == 1


def test_graded_determinant_pole():
    tab = ze.SpectrumTable.build([(2, 0, 3)])
    with pytest.raises(EvaluationAtPole) as err:
        ze.graded_determinant(tab, -2)
    assert ze.graded_order(tab, -2) == -3
    assert err.value.order == -3


def test_table_rejects_repeats():
    with pytest.raises(InvariantViolation):
        ze.SpectrumTable.build([(1, 1, 0), (1, 0, 1)])


@given(rows, st.integers(-20, 20).map(lambda x: Fraction(x, 3)))
def test_graded_determinant_negation(rs, sigma):
    tab = ze.SpectrumTable.build(rs)
    if any(l + sigma == 0 for l, _, _ in tab.rows):
        return
    assert ze.graded_determinant(tab, sigma) * ze.graded_determinant(tab.negated(), sigma) == 1


def test_zero_predictions():
    s = Fraction(3, 2)
    assert ze.selberg_zero_predictions(ze.SpectrumTable.build([(-s, 1, 0)]), s) == [(0j, 2)]
    preds = ze.selberg_zero_predictions(ze.SpectrumTable.build([(1 - s, 1, 0)]), s)
    assert preds == [(1j, 1), (-1j, 1)]
    assert ze.selberg_zero_predictions(ze.SpectrumTable.build([]), s) == []


def test_leading_constants():
    cu = Fraction(-3, 2)
    empty = {Fraction(0): ze.SpectrumTable.build([(5, 1, 0)]),
             Fraction(1, 2): ze.SpectrumTable.build([])}
    assert ze.leading_constants(empty, cu, {0: 0, Fraction(1, 2): Fraction(1, 4)}) == (1, 0)
    one = {Fraction(1, 2): ze.SpectrumTable.build([(cu, 1, 0)])}
    assert ze.leading_constants(one, cu, {Fraction(1, 2): Fraction(1, 4)}) == (-1, -2)


@given(st.lists(st.integers(0, 3), min_size=2, max_size=5), st.integers(-4, 4))
def test_r_eta_is_minus_chi_prime(dims, shift):
    cu = Fraction(shift, 2)
    degs = [ze.SpectrumTable.build([(0, h, 0), (i + 1, 1, 0)]) for i, h in enumerate(dims)]
    tab = ze.eta_hat_table_from_degrees(degs, cu)
    assert ze.r_eta_beta(tab, cu) == -ze.chi_prime(dims)


def test_torsion_simple():
    lt = ze.torsion_leading_term([ze.SpectrumTable.build([]), ze.SpectrumTable.build([(0, 1, 0)])])
    assert lt.exponent == -1


def test_torsion_mirror_is_one():
    lam = Fraction(7, 2)
    tabs = [ze.SpectrumTable.build([(lam, c, 0)]) for c in (1, 3, 3, 1)]
    for sigma in (Fraction(1, 3), Fraction(2), Fraction(11, 5)):
        assert ze.torsion_series(tabs, sigma) == 1
    assert ze.torsion_leading_term(tabs).t_squared == 1


@given(st.lists(st.tuples(st.integers(0, 2), rows), min_size=1, max_size=4))
def test_torsion_leading_against_product(data):
    tabs = []
    for h, rs in data:
        rs = [r for r in rs if r[0] > 0]
        tabs.append(ze.SpectrumTable.build([(Fraction(0), h, 0)] + rs))
    lt = ze.torsion_leading_term(tabs)
    dims = [h for h, _ in data]
    assert lt.exponent == ze.chi_prime(dims)
    assert lt.euler == ze.euler_characteristic(dims)
    oracle = 1.0
    for i, tab in enumerate(tabs):
        for l, p, q in tab.rows:
            if l:
                oracle *= float(l) ** ((-1) ** i * i * (p - q))
    assert float(lt.t_squared) == pytest.approx(oracle, rel=1e-9)
    sigma = Fraction(1, 10 ** 9)
    ratio = ze.torsion_series(tabs, sigma) / sigma ** lt.exponent
    assert float(ratio) == pytest.approx(oracle, rel=1e-6)


def test_consistency_direct(fam_direct):
    recs = synthesize_classes(seed=5, count=10, model="rline_x_su2").records
    spectra = {Fraction(1, 2): ze.SpectrumTable.build([(1, 1, 0)])}
    rep = ze.torsion_zeta_consistency(recs, fam_direct, spectra)
    assert rep.passed and rep.spectral_value is not None
    bad = ze.torsion_zeta_consistency(recs, fam_direct, {Fraction(3): ze.SpectrumTable.build([])})
    assert not bad.labels_consistent and bad.missing


def test_consistency_trivial(fam_pair):
    recs = synthesize_classes(seed=6, count=10, chi_choices=(0,)).records
    spectra = {b: ze.SpectrumTable.build([]) for b in fam_pair.betas() if b >= 0}
    rep = ze.torsion_zeta_consistency(recs, fam_pair, spectra)
    assert rep.passed and rep.skeleton_residual == 0 and rep.spectral_value == 1

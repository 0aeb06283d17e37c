import cmath
import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from friedlab.clifford_dirac import n_weights
from friedlab.errors import NotLiftable
from friedlab.lie_characters import (TorusElement, VirtualCharacter, Weight, decompose_irreducibles,
                                     evaluate_character, exterior_algebra,
                                     exterior_power_character, irreducible_character,
                                     is_w_invariant, lift_to_rk, weyl_orbit)


def w(b, t):
    return Weight((b,), (t,))


weights = st.builds(w, st.integers(-3, 3).map(lambda x: Fraction(x, 2)), st.integers(-4, 4))
characters = st.dictionaries(weights, st.integers(-2, 2), max_size=5).map(VirtualCharacter)
genuine = st.lists(weights, max_size=5).map(VirtualCharacter)
tori = st.builds(lambda a, th: TorusElement((a,), (th,)),
                 st.floats(-2, 2), st.floats(-3.1, 3.1))


# weyl_orbit / is_w_invariant


def test_orbit_of_zero(sl2c):
    assert weyl_orbit(w(0, 0), sl2c.weyl_TK) == {w(0, 0)}


def test_orbit_of_t_weight(sl2c):
    # two-element group generated by the t-flip
    assert weyl_orbit(w(0, 1), sl2c.weyl_TK) == {w(0, 1), w(0, -1)}


def test_orbit_of_fixed_weight_is_singleton(rline_su2):
    # the central real line is not moved by W
    assert weyl_orbit(w(1, 0), rline_su2.weyl_TK) == {w(1, 0)}


def test_invariance_predicates(sl2c):
    W = sl2c.weyl_TK
    assert is_w_invariant(VirtualCharacter(), W)
    assert is_w_invariant(VirtualCharacter(weyl_orbit(w(1, 3), W)), W)
    assert not is_w_invariant(VirtualCharacter([w(0, 1)]), W)


def test_weyl_group_is_orthogonal(sl2c):
    assert sl2c.weyl_TK.order == 2
    assert sl2c.weyl_TK.is_orthogonal()


# lift_to_rk


def test_lift_trivial(sl2c):
    triv = exterior_power_character(n_weights(sl2c, "n"), 0).restrict_t()
    assert lift_to_rk(triv, sl2c.weyl_TK).character == VirtualCharacter([Weight((), (0,))])


def test_lift_of_n_and_decomposition(sl2c):
    chi = exterior_power_character(n_weights(sl2c, "n"), 1).restrict_t()
    lifted = lift_to_rk(chi, sl2c.weyl_TK)
    roots = sl2c.k_positive_roots
    gram_t = [row[1:] for row in sl2c.weight_gram[1:]]
    # oracle: highest-weight subtraction with explicit weight strings
    remainder = dict(lifted.character.terms)
    oracle = {}
    while any(remainder.values()):
        top = max((x for x, m in remainder.items() if m), key=lambda x: x.t)
        mult = remainder[top]
        oracle[top] = mult
        n = int(top.t[0])
        for k in range(-n, n + 1, 2):
            key = Weight((), (k,))
            remainder[key] = remainder.get(key, 0) - mult
    assert decompose_irreducibles(lifted.character, roots, gram_t) == oracle
    assert oracle == {Weight((), (2,)): 1, Weight((), (0,)): -1}


def test_lift_rejects_non_invariant(sl2c):
    with pytest.raises(NotLiftable):
        lift_to_rk(VirtualCharacter([Weight((), (2,))]), sl2c.weyl_TK)


def test_irreducible_character_string(sl2c):
    gram_t = [row[1:] for row in sl2c.weight_gram[1:]]
    chi = irreducible_character(Weight((), (3,)), sl2c.k_positive_roots, gram_t, sl2c.weyl_TK)
    assert chi == VirtualCharacter([Weight((), (k,)) for k in (-3, -1, 1, 3)])


# exterior powers


def test_exterior_power_zero_is_trivial():
    assert exterior_power_character(VirtualCharacter([w(1, 2), w(0, 1)]), 0) == \
        VirtualCharacter([w(0, 0)])


def test_exterior_square_of_two_weights():
    a, b = w(1, 2), w(Fraction(1, 2), -1)
    assert exterior_power_character(VirtualCharacter([a, b]), 2) == VirtualCharacter([a + b])


@pytest.mark.parametrize("j", [0, 1, 2])
def test_exterior_n_matches_nbar_on_t(sl2c, j):
    n, nbar = n_weights(sl2c, "n"), n_weights(sl2c, "nbar")
    lhs = exterior_power_character(n, j).restrict_t()
    rhs = exterior_power_character(nbar, 2 * sl2c.ell - j).restrict_t()
    assert lhs == rhs


# evaluation


def test_evaluate_basics():
    t = TorusElement((0.4,), (0.7,))
    assert evaluate_character(VirtualCharacter(), t) == 0
    assert evaluate_character(VirtualCharacter([w(0, 0)]), t) == pytest.approx(1)
    val = evaluate_character(VirtualCharacter([w(0, 1), w(0, -1)]), t)
    assert val == pytest.approx(2 * math.cos(0.7), rel=1e-12)


# properties


@given(characters, characters, tori)
def test_evaluation_is_ring_homomorphism(c1, c2, t):
    e1, e2 = evaluate_character(c1, t), evaluate_character(c2, t)
    assert evaluate_character(c1 + c2, t) == pytest.approx(e1 + e2, rel=1e-9, abs=1e-9)
    assert evaluate_character(c1 * c2, t) == pytest.approx(e1 * e2, rel=1e-9, abs=1e-9)


@given(genuine, tori)
def test_graded_exterior_algebra_is_determinant(chi, t):
    prod = 1
    for x in chi.weights():
        prod *= 1 - cmath.exp(x.b[0] * t.a + 1j * x.t[0] * t.angles[0])
    val = evaluate_character(exterior_algebra(chi), t) if chi else 1
    assert val == pytest.approx(prod, rel=1e-10, abs=1e-10)


@given(weights, weights)
def test_orbits_partition(a, b):
    from friedlab.group_model import build_preset
    W = build_preset("sl2c").weyl_TK
    oa, ob = weyl_orbit(a, W), weyl_orbit(b, W)
    assert oa == ob or not (oa & ob)


@given(st.lists(weights, max_size=4))
def test_orbit_sums_round_trip(ws):
    from friedlab.group_model import build_preset
    W = build_preset("sl2c").weyl_TK
    chi = VirtualCharacter()
    for x in ws:
        chi = chi + VirtualCharacter(weyl_orbit(Weight((), x.t), W))
    assert lift_to_rk(chi, W).character == chi

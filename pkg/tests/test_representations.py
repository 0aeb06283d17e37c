from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from friedlab import exact as ex
from friedlab.errors import Infeasible, NotScalar
from friedlab.group_model import build_preset
from friedlab.lie_characters import VirtualCharacter, Weight
from friedlab.representations import (MatrixRep, admissibility_residual, b_blocks_paired,
                                      build_irrep_sl2c, casimir_scalar, decompose_by_b,
                                      find_admissible_metric, full_h_character,
                                      is_theta_invariant, parse_rep_spec, theta_augment,
                                      theta_twist, trivial_rep)

# frozen from tests/oracles/oracle_values.py (Pauli matrices, symmetric powers)
CASIMIR_ORACLE = {
    (0, 0): 0, (0, 1): Fraction(-3, 2), (0, 2): -4,
    (1, 0): Fraction(-3, 2), (1, 1): -3, (1, 2): Fraction(-11, 2),
    (2, 0): -4, (2, 1): Fraction(-11, 2), (2, 2): -8,
}


def metric(r: MatrixRep) -> MatrixRep:
    find_admissible_metric(r)
    return r


pq = st.tuples(st.integers(0, 2), st.integers(0, 2))


def test_small_irreps(sl2c):
    assert build_irrep_sl2c(0, 0, sl2c).dim == 1
    assert build_irrep_sl2c(1, 0, sl2c).dim == 2
    assert build_irrep_sl2c(1, 1, sl2c).dim == 4


def test_tensor_character(sl2c):
    v10, v01 = build_irrep_sl2c(1, 0, sl2c), build_irrep_sl2c(0, 1, sl2c)
    assert full_h_character(build_irrep_sl2c(1, 1, sl2c)) == \
        full_h_character(v10) * full_h_character(v01)
    assert full_h_character(v10.tensor(v01)) == full_h_character(v10) * full_h_character(v01)


@pytest.mark.parametrize("p,q", sorted(CASIMIR_ORACLE))
def test_casimir_oracle(sl2c, p, q):
    assert casimir_scalar(build_irrep_sl2c(p, q, sl2c)) == CASIMIR_ORACLE[(p, q)]


def test_casimir_not_scalar(sl2c):
    with pytest.raises(NotScalar):
        casimir_scalar(parse_rep_spec(sl2c, "1,0++2,0"))


def test_theta_twist(sl2c):
    triv = trivial_rep(sl2c)
    assert theta_twist(triv).matrices == triv.matrices
    v10 = build_irrep_sl2c(1, 0, sl2c)
    tw = theta_twist(v10)
    assert full_h_character(tw) == full_h_character(build_irrep_sl2c(0, 1, sl2c))
    assert full_h_character(tw) != full_h_character(v10)
    assert theta_twist(tw).matrices == v10.matrices


def test_theta_invariance(sl2c):
    assert is_theta_invariant(parse_rep_spec(sl2c, "1,0++0,1"))
    assert not is_theta_invariant(build_irrep_sl2c(1, 0, sl2c))
    su2 = build_preset("su2")
    assert all(is_theta_invariant(parse_rep_spec(su2, str(p))) for p in range(4))


def test_metric_trivial(sl2c):
    g = find_admissible_metric(trivial_rep(sl2c))
    assert g == ex.eye(1)


@pytest.mark.parametrize("p,q", [(1, 0), (0, 2), (1, 1), (2, 1)])
def test_metric_exists(sl2c, p, q):
    r = build_irrep_sl2c(p, q, sl2c)
    g = find_admissible_metric(r)
    assert ex.is_positive_definite(g)
    assert admissibility_residual(r, g) == 0


def test_metric_infeasible_for_unipotent():
    m = build_preset("rline")
    r = MatrixRep(m, [ex.mat([[0, 1], [0, 0]])], label="unipotent")
    with pytest.raises(Infeasible):
        find_admissible_metric(r)


def test_b_blocks(sl2c):
    triv = decompose_by_b(metric(trivial_rep(sl2c)))
    assert [(b.beta, b.dim) for b in triv] == [(0, 1)]
    v10 = decompose_by_b(metric(build_irrep_sl2c(1, 0, sl2c)))
    assert sorted((b.beta, b.dim) for b in v10) == [(Fraction(-1, 2), 1), (Fraction(1, 2), 1)]
    assert b_blocks_paired(decompose_by_b(metric(parse_rep_spec(sl2c, "1,0++0,1"))))


def test_h_characters(sl2c):
    assert full_h_character(trivial_rep(sl2c)) == VirtualCharacter([Weight((0,), (0,))])
    ws = full_h_character(build_irrep_sl2c(1, 0, sl2c)).weights()
    assert len(ws) == 2 and ws[0] == -ws[1]


def test_homomorphism_exact(sl2c):
    for p in range(3):
        for q in range(3):
            assert build_irrep_sl2c(p, q, sl2c).homomorphism_residual() == 0


@given(pq)
def test_casimir_theta_symmetric(x):
    m = build_preset("sl2c")
    r = build_irrep_sl2c(*x, model=m)
    assert casimir_scalar(r) == casimir_scalar(theta_twist(r))


@given(pq)
def test_augmentation_theta_invariant(x):
    m = build_preset("sl2c")
    assert is_theta_invariant(theta_augment(build_irrep_sl2c(*x, model=m)))


@given(pq)
def test_blocks_partition_dimension(x):
    m = build_preset("sl2c")
    r = metric(build_irrep_sl2c(*x, model=m))
    blocks = decompose_by_b(r)
    assert sum(b.dim for b in blocks) == r.dim
    g = r.metric
    for i, b1 in enumerate(blocks):
        for b2 in blocks[i + 1:]:
            assert ex.is_zero(ex.dagger(b1.basis) * g * b2.basis)

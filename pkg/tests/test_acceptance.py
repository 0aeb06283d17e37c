"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py -v`` or ``python3 -m tests.test_acceptance``.
"""
import math
import time
from fractions import Fraction

import pytest

from friedlab import eta_pipeline as ep
from friedlab import zeta_engine as ze
from friedlab.clifford_dirac import (dirac_operator, expected_spinor_graded, p_clifford,
                                     spinor_b_m_characters, supertrace_determinant_check,
                                     uperp_clifford, verify_parthasarathy)
from friedlab.group_model import (CORRUPTIONS, ad_determinant_factor, build_preset,
                                  corrupt_model, validate_model)
from friedlab.lattice_data import enumerate_words, synthesize_classes
from friedlab.lie_characters import VirtualCharacter, Weight
from friedlab.representations import (find_admissible_metric, full_h_character, parse_rep_spec)
from tests.conftest import random_torus

H = Fraction(1, 2)
PRESETS = ["sl2c", "sl2r", "su2", "sl2c_cubed", "rline_x_su2"]
PQ = [(p, q) for p in range(3) for q in range(3)]

# frozen oracle values (tests/oracles/oracle_values.py)
SPINOR_PLUS = VirtualCharacter([Weight((1,), (0,)), Weight((-1,), (0,))])
SPINOR_MINUS = VirtualCharacter([Weight((0,), (2,)), Weight((0,), (-2,))])
PAIR_SIGMA = {-3 * H: Fraction(-3, 4), -H: Fraction(5, 4), H: Fraction(5, 4),
              3 * H: Fraction(-3, 4)}
FREE2_CLASSES_LEN6 = 37
DIAG2 = [[[2, 0], [0, Fraction(1, 2)]]]
FREE2 = [[[3, 0], [0, Fraction(1, 3)]],
         [[Fraction(5, 3), Fraction(4, 3)], [Fraction(4, 3), Fraction(5, 3)]]]


def _spec(p: int, q: int) -> str:
    return "triv" if (p, q) == (0, 0) else f"{p},{q}"


def c1_model_validation():
    t0 = time.perf_counter()
    bad = []
    for name in PRESETS:
        m = build_preset(name)
        if not validate_model(m).passed:
            bad.append(name)
        for kind in CORRUPTIONS:
            if validate_model(corrupt_model(m, kind)).passed:
                bad.append(f"{name}/{kind} undetected")
    dt = time.perf_counter() - t0
    return not bad and dt < 5, f"{len(PRESETS)} presets x {len(CORRUPTIONS)} faults, {dt:.2f}s {bad}"


def c2_parthasarathy():
    t0 = time.perf_counter()
    m = build_preset("sl2c")
    paths = (p_clifford(m), uperp_clifford(m))
    worst, n = 0, 0
    for p, q in PQ:
        for suffix in ("", "+theta"):
            rep = parse_rep_spec(m, _spec(p, q) + suffix)
            find_admissible_metric(rep)
            for cm in paths:
                worst = max(worst, verify_parthasarathy(dirac_operator(rep, cm)))
                n += 1
    dt = time.perf_counter() - t0
    return worst == 0 and dt < 30, f"{n} cases, max residual {worst}, {dt:.2f}s"


def c3_spinor():
    m = build_preset("sl2c")
    cm = uperp_clifford(m)
    plus, minus = spinor_b_m_characters(cm, m)
    exact = (plus, minus) == expected_spinor_graded(m) == (SPINOR_PLUS, SPINOR_MINUS)
    worst = max(supertrace_determinant_check(cm, m, t)[0] for t in random_torus(11, 100))
    return exact and worst <= 1e-10, f"multisets equal={exact}, supertrace max {worst:.2e}"


def c4_kostant():
    res = {n: ep.kostant_checks(build_preset(n)).passed for n in ("sl2c", "sl2c_cubed")}
    return all(res.values()), str(res)


def c5_eta_family():
    t0 = time.perf_counter()
    m = build_preset("sl2c")
    fam = ep.compute_eta_family(parse_rep_spec(m, "1,0++0,1"))
    sig = fam.sigma() == PAIR_SIGMA and all(
        ep.sigma_eta(fam, b) + fam.beta_norm2(b) == -fam.casimir_u for b in fam.betas())
    cas = ep.verify_casimir_scalar_eta(fam) == 0
    mod = ep.module_identity(fam)[0]
    eq, pw = ep.verify_pointwise_identity(fam, random_torus(1, 100))
    lift = ep.verify_lift_identity(ep.compute_eta_hat(fam), fam.rep)
    dt = time.perf_counter() - t0
    ok = sig and cas and mod and eq and pw <= 1e-9 and lift.equal and lift.w_invariant and dt < 60
    return ok, (f"sigma={sig} casimir={cas} module={mod} pointwise={pw:.2e} "
                f"lift={lift.equal} W-inv={lift.w_invariant}, {dt:.2f}s")


def c6_direct_branch():
    m = build_preset("rline_x_su2")
    fam = ep.compute_eta_family(parse_rep_spec(m, "1/2;1+theta"), mode="direct")
    fam_ok = all(ep.verify_family(fam).values()) and ep.verify_casimir_scalar_eta(fam) == 0
    sig = all(ep.sigma_eta(fam, b) == -fam.casimir_u - fam.beta_norm2(b) for b in fam.betas())
    mod = ep.module_identity(fam)[0]
    lift = ep.verify_lift_identity(ep.compute_eta_hat(fam), fam.rep)
    denom = all(ad_determinant_factor(m, t) == 1.0 for t in random_torus(4, 20))
    ok = fam_ok and sig and mod and lift.equal and denom
    return ok, f"family={fam_ok} sigma={sig} module={mod} lift={lift.equal} denominator==1: {denom}"


def c7_factorization():
    m = build_preset("sl2c")
    fam = ep.compute_eta_family(parse_rep_spec(m, "1,0++0,1"))
    res = ze.factorization_check(synthesize_classes(seed=7, count=50).records, fam)
    zero = synthesize_classes(seed=3, count=50, chi_choices=(0,)).records
    log_r = ze.ruelle_log_series(zero, full_h_character(fam.rep))
    vanish = all(c == 0 for _, c in log_r.terms)
    return res <= 1e-10 and vanish, f"residual {res:.2e}, chi=0 gives log R == 0: {vanish}"


def c8_conjugation():
    m = build_preset("sl2c")
    recs = synthesize_classes(seed=7, count=50).records
    res = ze.conjugation_symmetry_check(recs, full_h_character(parse_rep_spec(m, "1,0")),
                                        full_h_character(parse_rep_spec(m, "0,1")))
    return res <= 1e-12, f"residual {res:.2e}"


def c9_orders():
    s = Fraction(3, 2)
    checks = [
        ze.selberg_zero_predictions(ze.SpectrumTable.build([(-s, 2, 0)]), s) == [(0j, 4)],
        ze.selberg_zero_predictions(ze.SpectrumTable.build([(-s, 0, 1)]), s) == [(0j, -2)],
        ze.selberg_zero_predictions(ze.SpectrumTable.build([(1 - s, 1, 0)]), s)
        == [(1j, 1), (-1j, 1)],
        ze.selberg_zero_predictions(ze.SpectrumTable.build([(4 - s, 3, 3)]), s) == [],
        ze.graded_determinant(ze.SpectrumTable.build([]), Fraction(7, 3)) == 1,
        ze.graded_determinant(ze.SpectrumTable.build([(1, 2, 2), (H, 1, 1)]), Fraction(7, 3)) == 1,
        ze.graded_order(ze.SpectrumTable.build([(2, 0, 3)]), -2) == -3,
    ]
    return all(checks), f"{sum(checks)}/{len(checks)} rules reproduced"


def c10_leading():
    cu = Fraction(-3, 2)
    n2 = {Fraction(0): 0, H: Fraction(1, 4), 3 * H: Fraction(9, 4)}
    free = {Fraction(0): ze.SpectrumTable.build([(5, 1, 0)]), H: ze.SpectrumTable.build([])}
    ok = [ze.leading_constants(free, cu, n2) == (1, 0)]
    # kernel at beta = 1/2 and beta = 3/2: C = (-4 |beta|^2)^(-r) per beta, r_rho = -2 sum r
    kern = {H: ze.SpectrumTable.build([(cu, 1, 0)]), 3 * H: ze.SpectrumTable.build([(cu, 0, 2)])}
    ok.append(ze.leading_constants(kern, cu, n2) == (Fraction(-1) * Fraction(81), 2))
    for dims in ([1, 0, 1], [0, 2, 1, 0], [1, 1, 1, 1]):
        degs = [ze.SpectrumTable.build([(0, h, 0), (i + 1, 1, 0)]) for i, h in enumerate(dims)]
        ok.append(ze.r_eta_beta(ze.eta_hat_table_from_degrees(degs, cu), cu) == -ze.chi_prime(dims))
    worst = 0.0
    for dims, lams in (([1, 2, 1], [3, H, 5]), ([0, 1, 0, 1], [2, 7, Fraction(1, 3), 4])):
        tabs = [ze.SpectrumTable.build([(0, h, 0), (l, 1, 0)]) for h, l in zip(dims, lams)]
        lt = ze.torsion_leading_term(tabs)
        ok.append(lt.exponent == ze.chi_prime(dims))
        oracle = math.prod(float(l) ** ((-1) ** i * i) for i, l in enumerate(lams))
        worst = max(worst, abs(float(lt.t_squared) / oracle - 1))
    return all(ok) and worst <= 1e-9, f"{sum(ok)}/{len(ok)} exact, torsion factor rel {worst:.1e}"


def c11_harish_chandra():
    m = build_preset("sl2c")
    lit, signed = [], []
    for p, q in PQ:
        r = ep.hc_casimir_crosscheck(parse_rep_spec(m, _spec(p, q)))
        lit.append(r.residual)
        signed.append(r.signed_residual)
    return max(lit) == 0, (f"literal max |hc - C| = {max(lit)} over {len(PQ)} irreps; "
                           f"with C entering as -C: max {max(signed)}")


def c12_lattice():
    recs = sorted(enumerate_words(DIAG2, 5).records, key=lambda r: r.ell)
    diag = len(recs) == 5 and all(
        abs(r.ell - 2 * k * math.log(2)) <= 1e-12 * r.ell and r.weight == Fraction(1, k)
        for k, r in enumerate(recs, 1))
    n = len(enumerate_words(FREE2, 6).records)
    return diag and n == FREE2_CLASSES_LEN6, f"diag closed form={diag}, free classes {n}"


CRITERIA = [
    (1, "model validation", c1_model_validation),
    (2, "Parthasarathy identity", c2_parthasarathy),
    (3, "spinor decomposition and supertrace", c3_spinor),
    (4, "Kostant suite", c4_kostant),
    (5, "eta family", c5_eta_family),
    (6, "noncompact-center branch", c6_direct_branch),
    (7, "zeta factorization", c7_factorization),
    (8, "conjugation symmetry", c8_conjugation),
    (9, "order bookkeeping", c9_orders),
    (10, "leading terms", c10_leading),
    (11, "Harish-Chandra crosscheck", c11_harish_chandra),
    (12, "lattice demo", c12_lattice),
]


def run(num: int, name: str, fn) -> bool:
    ok, detail = fn()
    print(f"{'PASS' if ok else 'FAIL'} #{num:<2} {name}: {detail}", flush=True)
    return ok


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"c{n}" for n, _, _ in CRITERIA])
def test_criterion(num, name, fn, capsys):
    with capsys.disabled():
        print()
        ok = run(num, name, fn)
    assert ok


if __name__ == "__main__":
    results = [run(*c) for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria pass")

"""Closed geodesics of two explicit Schottky-type groups.

diag(2, 1/2) generates a cyclic group whose classes have lengths 2k log 2;
the two-generator group shows the trace-based conjugacy dedup.
"""
import math
from fractions import Fraction

from friedlab import eta_pipeline as ep
from friedlab import zeta_engine as ze
from friedlab.group_model import build_preset
from friedlab.lattice_data import dumps, enumerate_words
from friedlab.representations import full_h_character, parse_rep_spec

DIAG2 = [[[2, 0], [0, Fraction(1, 2)]]]
FREE2 = [[[3, 0], [0, Fraction(1, 3)]],
         [[Fraction(5, 3), Fraction(4, 3)], [Fraction(4, 3), Fraction(5, 3)]]]


def main():
    for r in sorted(enumerate_words(DIAG2, 5).records, key=lambda r: r.ell):
        print(f"ell={r.ell:.6f} ({r.ell / math.log(2):.1f} log 2)  m={r.m_mult}  weight={r.weight}")

    cf = enumerate_words(FREE2, 6)
    print(len(cf.records), "classes up to word length 6")
    print(dumps(cf)[:300], "...")

    model = build_preset("sl2c")
    fam = ep.compute_eta_family(parse_rep_spec(model, "1,0++0,1"))
    s = ze.ruelle_log_series(cf.records, full_h_character(fam.rep))
    print("R(sigma=3):", s.exp_value(3.0))
    print("factorization residual:", ze.factorization_check(cf.records, fam))


if __name__ == "__main__":
    main()

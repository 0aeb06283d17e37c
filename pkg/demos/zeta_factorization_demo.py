"""Ruelle series of a synthetic class file against the product of Selberg series.

The Ruelle log-series of rho splits into Selberg log-series indexed by the
Dirac-cohomology family; this demo prints a few coefficients of each side.
"""
from friedlab import eta_pipeline as ep
from friedlab import zeta_engine as ze
from friedlab.group_model import build_preset
from friedlab.lattice_data import synthesize_classes
from friedlab.representations import full_h_character, parse_rep_spec


def main():
    model = build_preset("sl2c")
    fam = ep.compute_eta_family(parse_rep_spec(model, "1,0++0,1"))
    classes = synthesize_classes(seed=7, count=50).records

    ruelle = ze.ruelle_log_series(classes, full_h_character(fam.rep))
    assembled = ze.assembled_log_zeta(classes, fam)
    print(f"{'ell':>8} {'log R coeff':>26} {'assembled':>26}")
    for ell, c in ruelle.terms[:8]:
        print(f"{ell:8.4f} {c:26.12f} {assembled.coefficient(ell):26.12f}")
    print(f"max per-length residual: {ze.factorization_check(classes, fam):.2e}")

    # the selberg side at beta = 0 alone, with the adjoint determinant in the denominator
    z0 = ze.selberg_log_series(classes, fam.eta(0), model)
    print("log Z_0 terms:", len(z0))

    # order bookkeeping on a finite table
    tab = ze.SpectrumTable.build([(-fam.sigma()[fam.betas()[0]], 1, 0), (2, 1, 0)])
    print("zero predictions:", ze.selberg_zero_predictions(tab, fam.sigma()[fam.betas()[0]]))


if __name__ == "__main__":
    main()

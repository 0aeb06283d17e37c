"""Formal Ruelle and Selberg log-series, factorization checks and spectral bookkeeping.

A zeta function is handled through its logarithm, a finite series
sum_j c_j exp(-sigma * l_j) over closed-geodesic lengths l_j. All identity
checks are coefficientwise, hence independent of sigma.

Spectral determinants are finite-table surrogates: a table lists eigenvalues
with graded multiplicities and determinants are plain finite products. Orders of
zeros and poles depend only on finitely many eigenvalues, so they agree with the
regularized objects.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from friedlab.errors import EllipticClass, EvaluationAtPole, InvariantViolation
from friedlab.group_model import GroupModel, ad_determinant_factor
from friedlab.lie_characters import TorusElement, VirtualCharacter, evaluate_character

MERGE_TOL = 1e-9


@dataclass(frozen=True)
class ConjugacyClassRecord:
    """Data of a closed-geodesic class conjugate into H.

    Attributes:
      id: unique identifier.
      ell: length of the closed geodesic.
      holonomy: torus element e^a k^{-1}.
      chi_orb: orbifold Euler characteristic of B/S^1.
      m_mult: multiplicity m.
      n_mult: orbifold factor n (m is divisible by it).
      convention: optional label of how chi_orb/m was assigned.
    """

    id: str
    ell: float
    holonomy: TorusElement
    chi_orb: Fraction = Fraction(1)
    m_mult: int = 1
    n_mult: int = 1
    convention: str | None = None

    @property
    def weight(self) -> Fraction:
        return Fraction(self.chi_orb) / self.m_mult

    def problems(self, b_norm: float | None = None) -> list:
        """Invariant violations (empty when valid)."""
        out = []
        if not (self.ell > 0 and math.isfinite(self.ell)):
            out.append("ell must be positive")
        if self.m_mult < 1:
            out.append("m_mult must be >= 1")
        if self.n_mult < 1:
            out.append("n_mult must be >= 1")
        if not self.holonomy.a_part or any(float(a) <= 0 for a in self.holonomy.a_part):
            out.append("holonomy a_part must be positive")
        elif b_norm is not None and len(self.holonomy.a_part) == 1:
            if abs(float(self.holonomy.a_part[0]) * b_norm - self.ell) > 1e-9 * max(1.0, self.ell):
                out.append("ell inconsistent with holonomy a_part")
        return out

    def validate(self, b_norm: float | None = None) -> "ConjugacyClassRecord":
        p = self.problems(b_norm)
        if p:
            raise InvariantViolation(f"record {self.id}: {'; '.join(p)}")
        return self


@dataclass
class LogZetaSeries:
    """sum_j c_j exp(-sigma l_j) with strictly increasing lengths."""

    terms: list = field(default_factory=list)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[float, complex]], tol: float = MERGE_TOL):
        out: list = []
        for length, c in sorted(pairs, key=lambda p: p[0]):
            if out and abs(out[-1][0] - length) < tol:
                out[-1] = (out[-1][0], out[-1][1] + c)
            else:
                out.append((float(length), complex(c)))
        return cls(out)

    def __len__(self) -> int:
        return len(self.terms)

    def __add__(self, other: "LogZetaSeries") -> "LogZetaSeries":
        return LogZetaSeries.from_pairs(self.terms + other.terms)

    def __neg__(self) -> "LogZetaSeries":
        return LogZetaSeries([(l, -c) for l, c in self.terms])

    def shifted(self, s: float) -> "LogZetaSeries":
        """Series of the function sigma -> Z(sigma + s)."""
        return LogZetaSeries([(l, c * math.exp(-s * l)) for l, c in self.terms])

    def lengths(self) -> list:
        return [l for l, _ in self.terms]

    def coefficient(self, length: float, tol: float = MERGE_TOL) -> complex:
        for l, c in self.terms:
            if abs(l - length) < tol:
                return c
        return 0j

    def evaluate(self, sigma: complex) -> complex:
        """The log-value at sigma (diagnostics only)."""
        return complex(sum(c * cmath.exp(-sigma * l) for l, c in self.terms))

    def exp_value(self, sigma: complex) -> complex:
        return cmath.exp(self.evaluate(sigma))


def ruelle_log_series(classes: Sequence[ConjugacyClassRecord],
                      rep_char: VirtualCharacter) -> LogZetaSeries:
    """log R: coefficient (chi_orb/m) Tr[rho(e^a k^{-1})] at each length."""
    pairs = [(c.ell, float(c.weight) * evaluate_character(rep_char, c.holonomy))
             for c in classes]
    return LogZetaSeries.from_pairs(pairs)


def _eta_trace(eta_char: VirtualCharacter, t: TorusElement) -> complex:
    return evaluate_character(eta_char, TorusElement((), t.angles))


def selberg_log_series(classes: Sequence[ConjugacyClassRecord], eta_char: VirtualCharacter,
                       model: GroupModel) -> LogZetaSeries:
    """log Z_eta: coefficient -(chi_orb/m) Tr_s[eta(k^{-1})] / |det(1 - Ad)|_{z^perp(b)}|^{1/2}.

    Raises:
      EllipticClass: for records with vanishing a_part.
    """
    pairs = []
    for c in classes:
        if c.holonomy.is_elliptic():
            raise EllipticClass(f"record {c.id} is elliptic")
        den = ad_determinant_factor(model, c.holonomy)
        pairs.append((c.ell, -float(c.weight) * _eta_trace(eta_char, c.holonomy) / den))
    return LogZetaSeries.from_pairs(pairs)


def _beta_abs(fam, beta) -> float:
    return math.sqrt(float(fam.beta_norm2(beta)))


def factorization_terms(record: ConjugacyClassRecord, fam, rep_char: VirtualCharacter) -> list:
    """Per-record contributions whose sum vanishes under the factorization.

    They are log R, log Z_{eta_0} and log Z_{eta_beta}(sigma +- |beta|) for
    beta > 0, all at the record's length.
    """
    model = fam.model
    one = [record]
    out = [ruelle_log_series(one, rep_char).coefficient(record.ell)]
    for b in fam.betas():
        if b < 0:
            continue
        z = selberg_log_series(one, fam.eta(b), model)
        if b == 0:
            out.append(z.coefficient(record.ell))
        else:
            s = _beta_abs(fam, b)
            out.append(z.shifted(s).coefficient(record.ell))
            out.append(z.shifted(-s).coefficient(record.ell))
    return out


def factorization_check(classes: Sequence[ConjugacyClassRecord], fam,
                        rep_char: VirtualCharacter | None = None) -> float:
    """Max per-length residual of log R + log Z_0 + sum_{beta>0} log Z_beta(. +- |beta|).

    Residuals are scaled by max(1, largest term magnitude) at each length.
    """
    if rep_char is None:
        from friedlab.representations import full_h_character
        rep_char = full_h_character(fam.rep)
    by_len: dict = {}
    for rec in classes:
        terms = factorization_terms(rec, fam, rep_char)
        key = round(rec.ell / MERGE_TOL)
        tot, scale = by_len.get(key, (0j, 1.0))
        by_len[key] = (tot + sum(terms), max(scale, max(abs(t) for t in terms)))
    return max((abs(t) / s for t, s in by_len.values()), default=0.0)


def assembled_log_zeta(classes: Sequence[ConjugacyClassRecord], fam) -> LogZetaSeries:
    """-log Z_0 - sum_{beta>0} [log Z_beta(. + |beta|) + log Z_beta(. - |beta|)]."""
    out = LogZetaSeries()
    for b in fam.betas():
        if b < 0:
            continue
        z = selberg_log_series(classes, fam.eta(b), fam.model)
        if b == 0:
            out = out + (-z)
        else:
            s = _beta_abs(fam, b)
            out = out + (-z.shifted(s)) + (-z.shifted(-s))
    return out


def conjugation_symmetry_check(classes: Sequence[ConjugacyClassRecord],
                               rep_char: VirtualCharacter,
                               rep_theta_char: VirtualCharacter) -> float:
    """max_l |coeff_{rho^theta}(l) - conj(coeff_rho(l))|."""
    a = ruelle_log_series(classes, rep_char)
    b = ruelle_log_series(classes, rep_theta_char)
    lens = sorted(set(a.lengths()) | set(b.lengths()))
    return max((abs(b.coefficient(l) - a.coefficient(l).conjugate()) for l in lens),
               default=0.0)


# spectral tables -------------------------------------------------------------


@dataclass(frozen=True)
class SpectrumTable:
    """Finite graded spectrum: rows (lambda, mult_plus, mult_minus).

    Raises:
      InvariantViolation: on repeated eigenvalues or negative multiplicities.
    """

    rows: tuple
    label: str = ""

    def __post_init__(self):
        lams = [r[0] for r in self.rows]
        if len(set(lams)) != len(lams):
            raise InvariantViolation("eigenvalues in a table must be distinct")
        if any(r[1] < 0 or r[2] < 0 for r in self.rows):
            raise InvariantViolation("multiplicities must be nonnegative")

    @classmethod
    def build(cls, rows: Iterable, label: str = "") -> "SpectrumTable":
        return cls(tuple((r[0], int(r[1]), int(r[2]) if len(r) > 2 else 0) for r in rows), label)

    def m(self, lam) -> int:
        """m_eta(lambda) = mult_plus - mult_minus (0 when absent)."""
        for l, p, q in self.rows:
            if l == lam:
                return p - q
        return 0

    def negated(self) -> "SpectrumTable":
        return SpectrumTable(tuple((l, q, p) for l, p, q in self.rows), self.label)


def graded_order(spec: SpectrumTable, sigma) -> int:
    """Order of zero (positive) or pole (negative) of the graded determinant at sigma."""
    return sum(p - q for l, p, q in spec.rows if l + sigma == 0)


def graded_determinant(spec: SpectrumTable, sigma):
    """prod (lambda + sigma)^{mult_plus - mult_minus}; exact for rational input.

    Raises:
      EvaluationAtPole: when sigma is a pole (the order is attached).
    """
    order = graded_order(spec, sigma)
    if order < 0:
        raise EvaluationAtPole(f"pole of order {-order} at sigma = {sigma}", order)
    val = 1
    for l, p, q in spec.rows:
        e = p - q
        if e == 0:
            continue
        base = l + sigma
        if base == 0:
            return 0
        val = val * base ** e
    return val


def selberg_zero_predictions(spec: SpectrumTable, sigma_eta) -> list:
    """Locations and orders of zeros (negative order = pole) of Z_eta.

    lambda contributes +-i sqrt(lambda + sigma_eta) with order m_eta(lambda);
    lambda = -sigma_eta contributes 0 with order 2 m_eta(-sigma_eta).
    """
    out = []
    for l, p, q in sorted(spec.rows, key=lambda r: r[0]):
        m = p - q
        if m == 0:
            continue
        s = l + sigma_eta
        if s == 0:
            out.append((0j, 2 * m))
        else:
            root = 1j * cmath.sqrt(float(s))
            out.append((root, m))
            out.append((-root, m))
    return out


def r_eta_beta(spec_beta: SpectrumTable, c_u_rho) -> int:
    """dim ker(C^+ - C^{u,rho}) - dim ker(C^- - C^{u,rho})."""
    return spec_beta.m(c_u_rho)


def leading_constants(tables: Mapping, c_u_rho, beta_norm2: Mapping) -> tuple[Fraction, int]:
    """(C_rho, r_rho) from one table per beta in {0} u b*_+.

    Args:
      tables: beta -> SpectrumTable of C^{g,Z,eta_hat_beta}.
      c_u_rho: the scalar C^{u,rho}.
      beta_norm2: beta -> |beta|^2 (exact).
    """
    c = Fraction(1)
    tot = 0
    for beta, tab in tables.items():
        r = r_eta_beta(tab, c_u_rho)
        tot += r
        if beta != 0 and r:
            c *= Fraction(-4 * Fraction(beta_norm2[beta])) ** (-r)
    return c, -2 * tot


def eta_hat_table_from_degrees(degree_tables: Sequence[SpectrumTable], c_u_rho,
                               label: str = "") -> SpectrumTable:
    """Table of C^{g,Z,eta_hat} assembled from Hodge tables per degree.

    Degree i enters with weight (-1)^{i-1} i and eigenvalues shifted by C^{u,rho}.
    """
    acc: dict = {}
    for i, tab in enumerate(degree_tables):
        w = (-1) ** (i - 1) * i
        for l, p, q in tab.rows:
            acc[l + c_u_rho] = acc.get(l + c_u_rho, 0) + w * (p - q)
    rows = [(l, max(v, 0), max(-v, 0)) for l, v in sorted(acc.items()) if v]
    return SpectrumTable(tuple(rows), label)


def chi_prime(kernel_dims: Sequence[int]) -> int:
    return sum((-1) ** i * i * h for i, h in enumerate(kernel_dims))


def euler_characteristic(kernel_dims: Sequence[int]) -> int:
    return sum((-1) ** i * h for i, h in enumerate(kernel_dims))


def _kernel_dim(tab: SpectrumTable) -> int:
    return sum(p - q for l, p, q in tab.rows if l == 0)


def torsion_series(spectra: Sequence[SpectrumTable], sigma):
    """T(sigma) = prod_i det(sigma + table_i)^{(-1)^i i}."""
    val = 1
    for i, tab in enumerate(spectra):
        e = (-1) ** i * i
        if e == 0:
            continue
        for l, p, q in tab.rows:
            val = val * (l + sigma) ** (e * (p - q))
    return val


@dataclass(frozen=True)
class TorsionLeading:
    """T(sigma) = t_squared sigma^exponent + O(sigma^{exponent+1})."""

    t_squared: object
    exponent: int
    euler: int


def torsion_leading_term(spectra: Sequence[SpectrumTable]) -> TorsionLeading:
    dims = [_kernel_dim(t) for t in spectra]
    val = 1
    for i, tab in enumerate(spectra):
        e = (-1) ** i * i
        for l, p, q in tab.rows:
            if l != 0 and e:
                val = val * l ** (e * (p - q))
    return TorsionLeading(val, chi_prime(dims), euler_characteristic(dims))


@dataclass
class ConsistencyReport:
    skeleton_residual: float
    labels_consistent: bool
    missing: list
    spectral_value: complex | None
    notes: list

    @property
    def passed(self) -> bool:
        return self.labels_consistent and self.skeleton_residual <= 1e-10


def torsion_zeta_consistency(classes: Sequence[ConjugacyClassRecord], fam,
                             spectra: Mapping, sigma: float = 1.0) -> ConsistencyReport:
    """Checks the sigma-free skeleton of the Ruelle/torsion identity.

    Only the factorization of log R into Selberg factors is checked; the
    exp(-vol P) factor and full spectra are out of scope, so the spectral side
    is reported, not compared.

    Args:
      spectra: beta -> SpectrumTable for beta in {0} u b*_+.
    """
    needed = {b for b in fam.betas() if b >= 0}
    have = {Fraction(b) for b in spectra}
    missing = sorted(needed ^ have)
    res = factorization_check(classes, fam)
    spectral = None
    if not missing:
        spectral = 1
        for b, tab in spectra.items():
            g = graded_determinant(tab, -fam.casimir_u + sigma)
            spectral = spectral * g ** (-1 if b == 0 else -2)
    notes = ["exp(-vol(Z) P(sigma)) omitted", "truncated spectra"]
    return ConsistencyReport(res, not missing, missing, spectral, notes)

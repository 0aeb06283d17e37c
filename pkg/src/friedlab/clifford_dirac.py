"""Clifford modules, spinors and Dirac operators.

Gamma matrices are built from Pauli tensor products: with Hermitian
anticommuting Gamma_i squaring to 1, the Clifford generators are
c(e_i) = i Gamma_i, so that c(e_i)^2 = -1 for an orthonormal basis. All entries
lie in {0, +-1, +-i}.

Two Dirac operators are supported on S x V:
  * the p-path, with S the spinor of (p, B) and D = sum c(e_i) rho(e_i) over a
    B-orthonormal basis of p;
  * the u^perp-path, with S the spinor of (u^perp(b), -B) and the same formula
    over a (-B)-orthonormal basis of u^perp(b).
When dim p is odd the p-path uses an ungraded irreducible Clifford module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.linalg
from sympy.polys.matrices import DomainMatrix

from friedlab import exact as ex
from friedlab.errors import (BasisMismatch, EllipticClass, NotRankOne, NotStabilizing,
                             OddDimension, RequiresAdmissibleMetric)
from friedlab.group_model import (GroupModel, ad_determinant_factor, casimir_operator,
                                  compact_casimir, compact_form_data)
from friedlab.lie_characters import (TorusElement, VirtualCharacter, Weight,
                                     exterior_parity, exterior_power_character)
from friedlab.representations import MatrixRep, casimir_matrix

_X = [[0, 1], [1, 0]]
_Y = [[0, (0, -1)], [(0, 1), 0]]
_Z = [[1, 0], [0, -1]]


def _kron_all(mats: Sequence[DomainMatrix]) -> DomainMatrix:
    out = ex.eye(1)
    for m in mats:
        out = ex.kron(out, m)
    return out


def hermitian_gammas(d: int) -> tuple[list, DomainMatrix | None]:
    """Anticommuting Hermitian involutions Gamma_1..Gamma_d and a grading.

    Returns:
      (gammas, tau) with tau = Z^{(x) r} for even d = 2r and None for odd d.
    """
    r = d // 2
    X, Y, Z, I2 = ex.mat(_X), ex.mat(_Y), ex.mat(_Z), ex.eye(2)
    gammas = []
    for k in range(r):
        pre, post = [Z] * k, [I2] * (r - k - 1)
        gammas.append(_kron_all(pre + [X] + post))
        gammas.append(_kron_all(pre + [Y] + post))
    tau = _kron_all([Z] * r)
    if d % 2:
        gammas.append(tau)
        return gammas, None
    return gammas, tau


def _rational_sqrt(q: Fraction) -> Fraction:
    if q <= 0:
        raise ValueError(f"form is not positive: {q}")
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn != n or rd * rd != d:
        raise ValueError(f"norm {q} is not a rational square")
    return Fraction(rn, rd)


def orthonormal_basis(model: GroupModel, cols: DomainMatrix, sign: int) -> DomainMatrix:
    """Exact Gram-Schmidt for the form sign*B on the span of ``cols``.

    Raises:
      ValueError: if the form is not positive or a norm is not a rational square.
    """
    out = []
    for j in range(cols.shape[1]):
        v = ex.columns(cols, [j])
        for e in out:
            c = ex.gq(sign) * model.form(v, e)
            v = v - ex.scal(c, e)
        if ex.is_zero(v):
            continue
        q = ex.real_value(ex.gq(sign) * model.form(v, v))
        out.append(ex.scal(ex.gq(1 / _rational_sqrt(q)), v))
    return ex.hstack(out, nrows=model.dim)


@dataclass
class CliffordModule:
    """An irreducible module for the Clifford algebra of (V, q).

    Attributes:
      model: group model.
      onb: q-orthonormal basis of V as complex columns of g_C.
      sign: q = sign * B (+1 for p, -1 for subspaces of u).
      gammas: c(e_i) = i Gamma_i, so that c(e_i)^2 = -1.
      chirality: grading tau (None for an ungraded odd module).
      path: 'p' or 'uperp'.
    """

    model: GroupModel
    onb: DomainMatrix
    sign: int
    gammas: list
    chirality: DomainMatrix | None
    path: str

    @property
    def dim_space(self) -> int:
        return self.onb.shape[1]

    @property
    def spinor_dim(self) -> int:
        return self.gammas[0].shape[0] if self.gammas else 1

    def q(self, x: DomainMatrix, y: DomainMatrix):
        return ex.gq(self.sign) * self.model.form(x, y)

    def relation_residual(self) -> float:
        """max |c_i c_j + c_j c_i + 2 q(e_i, e_j)| over pairs."""
        n = self.spinor_dim
        worst = 0.0
        for i, a in enumerate(self.gammas):
            for j, b in enumerate(self.gammas):
                qij = self.q(ex.columns(self.onb, [i]), ex.columns(self.onb, [j]))
                r = ex.anticommutator(a, b) + ex.scal(2 * qij, ex.eye(n))
                worst = max(worst, ex.max_abs(r))
        if self.chirality is not None:
            t = self.chirality
            worst = max(worst, ex.max_abs(t * t - ex.eye(n)))
            for a in self.gammas:
                worst = max(worst, ex.max_abs(ex.anticommutator(t, a)))
        return worst


def build_spinor(d: int, graded: bool = True) -> tuple[list, DomainMatrix | None]:
    """Clifford generators c_i (c_i^2 = -1) on a 2^{floor(d/2)}-dim space.

    Raises:
      OddDimension: if a graded module is requested for odd d.
    """
    if d % 2 and graded:
        raise OddDimension(f"no graded spinor module in odd dimension {d}")
    gam, tau = hermitian_gammas(d)
    return [ex.scal(ex.I_UNIT, g) for g in gam], tau


def clifford_for_space(model: GroupModel, cols: DomainMatrix, sign: int, path: str,
                       graded: bool = True) -> CliffordModule:
    onb = orthonormal_basis(model, cols, sign)
    gammas, tau = build_spinor(onb.shape[1], graded)
    if not gammas:
        tau = ex.eye(1) if graded else None
    return CliffordModule(model, onb, sign, gammas, tau, path)


def p_clifford(model: GroupModel) -> CliffordModule:
    """Clifford module of (p, B); ungraded when dim p is odd."""
    even = model.p.shape[1] % 2 == 0
    return clifford_for_space(model, model.p, 1, "p", graded=even)


def k_spinor_action(cm: CliffordModule, model: GroupModel, a: DomainMatrix) -> DomainMatrix:
    """(1/4) sum_ij q([a, e_i], e_j) c_i c_j.

    ``a`` may be any complex column whose adjoint action preserves the
    Clifford-generating subspace (the formula is complex-linear in a).

    Raises:
      NotStabilizing: if [a, e_i] leaves the subspace.
    """
    n = cm.spinor_dim
    out = ex.zeros(n)
    d = cm.dim_space
    for i in range(d):
        ei = ex.columns(cm.onb, [i])
        br = model.bracket(a, ei)
        recon = ex.zeros(model.dim, 1)
        for j in range(d):
            ej = ex.columns(cm.onb, [j])
            c = cm.q(br, ej)
            if c != ex.ZERO:
                recon = recon + ex.scal(c, ej)
                out = out + ex.scal(c / ex.gq(4), cm.gammas[i] * cm.gammas[j])
        if not ex.is_zero(recon - br):
            raise NotStabilizing("ad(a) does not preserve the Clifford space")
    return out


def orient_uperp(cm: CliffordModule) -> CliffordModule:
    """Fixes the sign of tau so that the twisted Lambda^0 piece lies in S+."""
    model = cm.model
    target = lambda_zero_twist_weight(model)
    plus, _ = spinor_b_m_characters(cm, model)
    if plus.mult(target) == 0:
        cm = CliffordModule(cm.model, cm.onb, cm.sign, cm.gammas, -cm.chirality, cm.path)
    return cm


def uperp_clifford(model: GroupModel) -> CliffordModule:
    """Graded, oriented Clifford module of (u^perp(b), -B)."""
    cf = compact_form_data(model)
    cm = clifford_for_space(model, cf.uperp, -1, "uperp", graded=True)
    if model.delta == 1 and model.n.shape[1]:
        cm = orient_uperp(cm)
    return cm


def _spin_weight_pieces(cm: CliffordModule, model: GroupModel):
    return model.weights_of(lambda x: k_spinor_action(cm, model, x), cm.spinor_dim)


def spinor_b_m_characters(cm: CliffordModule, model: GroupModel):
    """Characters (S+, S-) of b + t acting on the u^perp(b)-spinor.

    Raises:
      NotRankOne: unless delta = 1 and n != 0.
    """
    if model.delta != 1 or model.n.shape[1] == 0:
        raise NotRankOne("spinor characters need delta = 1 and n != 0")
    tau = cm.chirality
    n = cm.spinor_dim
    halves = []
    for s in (1, -1):
        proj = ex.nullspace(tau - ex.scal(s, ex.eye(n)))
        pieces = model.weights_of(lambda x: k_spinor_action(cm, model, x), n, basis=proj)
        halves.append(VirtualCharacter({w: c.shape[1] for w, c in pieces}))
    return halves[0], halves[1]


def n_weights(model: GroupModel, which: str = "n") -> VirtualCharacter:
    """Weights of h on n_C (or nbar_C)."""
    cols = model.n if which == "n" else model.nbar
    pieces = model.weights_of(model.ad_of, model.dim, basis=cols)
    return VirtualCharacter({w: c.shape[1] for w, c in pieces})


def lambda_zero_twist_weight(model: GroupModel) -> Weight:
    """Weight of Lambda^0(nbar_C^*) (x) det(n_C)^{-1/2}."""
    tot = Weight.zero(model.db, model.dt)
    for w in n_weights(model).weights():
        tot = tot + w
    return tot.scale(Fraction(-1, 2))


def expected_spinor_twisted(model: GroupModel, twist: bool = True):
    """(Lambda^even, Lambda^odd)(nbar_C^*) (x) det(n_C)^{-1/2} as full characters."""
    nbar_dual = n_weights(model, "nbar").dual()
    ev, od = exterior_parity(nbar_dual)
    if twist:
        w = lambda_zero_twist_weight(model)
        ev, od = ev.shift(w), od.shift(w)
    return ev, od


def expected_spinor_graded(model: GroupModel):
    """sum_{j=-l}^{l} C_{j alpha0} (x) eta_{l-j}, eta_k = Lambda^k(n_C^*) on t.

    Returns (S+, S-) where the j-piece lies in S+ iff l + j is even.
    """
    ell = model.ell
    ndual_t = n_weights(model).dual().restrict_t()
    plus, minus = VirtualCharacter(), VirtualCharacter()
    for j in range(-ell, ell + 1):
        eta = exterior_power_character(ndual_t, ell - j)
        piece = eta.map(lambda w, j=j: Weight((j,), w.t))
        if (ell + j) % 2 == 0:
            plus = plus + piece
        else:
            minus = minus + piece
    return plus, minus


def supertrace_determinant_check(cm: CliffordModule, model: GroupModel,
                                 t: TorusElement) -> tuple[float, float, float]:
    """Compares Tr_s^S[e^a k^{-1}] with the adjoint determinant factor.

    Returns:
      (residual, supertrace, determinant factor).

    Raises:
      EllipticClass: when a_part = 0.
    """
    if t.is_elliptic():
        raise EllipticClass("a_part = 0")
    gen = _h_generator_numeric(model, t, lambda x: k_spinor_action(cm, model, x),
                               cm.spinor_dim)
    tau = ex.to_numpy(cm.chirality)
    st = complex(np.trace(tau @ scipy.linalg.expm(gen)))
    det = ad_determinant_factor(model, t)
    return abs(st - det), st, det


def _h_generator_numeric(model: GroupModel, t: TorusElement, action, dim: int):
    gen = np.zeros((dim, dim), dtype=complex)
    for j, a in enumerate(t.a_part):
        gen += float(a) * ex.to_numpy(action(ex.columns(model.b_basis, [j])))
    for j, th in enumerate(t.angles):
        gen += th * ex.to_numpy(action(ex.columns(model.t, [j])))
    return gen


@dataclass
class DiracData:
    """A Dirac operator on S x V.

    Attributes:
      rep: the representation.
      clifford: the Clifford module.
      D: the operator on S (x) V.
      k_spin_action: callable x -> spin action of x on S.
    """

    rep: MatrixRep
    clifford: CliffordModule
    D: DomainMatrix

    @property
    def path(self) -> str:
        return self.clifford.path

    def spin(self, x: DomainMatrix) -> DomainMatrix:
        return k_spinor_action(self.clifford, self.rep.model, x)

    def diagonal_action(self, x: DomainMatrix) -> DomainMatrix:
        """spin(x) (x) 1 + 1 (x) rho(x)."""
        return (ex.kron(self.spin(x), ex.eye(self.rep.dim))
                + ex.kron(ex.eye(self.clifford.spinor_dim), self.rep.act(x)))

    def oddness_residual(self) -> float:
        if self.clifford.chirality is None:
            return 0.0
        tg = ex.kron(self.clifford.chirality, ex.eye(self.rep.dim))
        return ex.max_abs(ex.anticommutator(tg, self.D))

    def hermiticity_residual(self) -> float:
        """Self-adjointness (u^perp-path) or skew-adjointness (p-path) w.r.t. the metric."""
        g = ex.kron(ex.eye(self.clifford.spinor_dim), self.rep.metric)
        s = 1 if self.path == "uperp" else -1
        return ex.max_abs(ex.dagger(self.D) * g - ex.scal(s, g * self.D))


def dirac_operator(rep: MatrixRep, cm: CliffordModule) -> DiracData:
    """D = sum_i c(e_i) (x) rho(e_i) over the Clifford module's orthonormal basis.

    Raises:
      BasisMismatch: if the module belongs to a different model.
      RequiresAdmissibleMetric: if the representation has no metric.
    """
    if cm.model is not rep.model or cm.onb.shape[0] != rep.model.dim:
        raise BasisMismatch("Clifford module and representation use different models")
    if rep.metric is None:
        raise RequiresAdmissibleMetric(rep.label)
    ns = cm.spinor_dim
    D = ex.zeros(ns * rep.dim)
    for i, c in enumerate(cm.gammas):
        D = D + ex.kron(c, rep.act(ex.columns(cm.onb, [i])))
    dd = DiracData(rep, cm, D)
    if dd.oddness_residual() != 0:
        raise BasisMismatch("D does not anticommute with the grading")
    if dd.hermiticity_residual() != 0:
        raise BasisMismatch("D is not (skew-)adjoint for the admissible metric")
    return dd


def parthasarathy_sides(dd: DiracData) -> tuple[DomainMatrix, DomainMatrix]:
    """Both sides of the Parthasarathy formula for the Dirac data's path.

    p-path:      D^2 = C^{g,V} + (1/8) Tr[C^{k,p}] - C^{k, S x V}.
    u^perp-path: -D^2 = C^{u,V} + (1/8) Tr[C^{u(b),u^perp(b)}] - C^{u(b), S x E}.
    """
    rep, cm = dd.rep, dd.clifford
    model = rep.model
    ns, nv = cm.spinor_dim, rep.dim
    big = ns * nv
    cas = ex.kron(ex.eye(ns), casimir_matrix(rep))
    if dd.path == "p":
        kc = compact_casimir(model, model.k, model.ad_of, model.dim)
        const = Fraction(0)
        if model.p.shape[1]:
            const = ex.real_value(ex.trace(ex.restrict(kc, model.p))) / 8
        sub = model.k
        lhs = dd.D * dd.D
    else:
        const = compact_form_data(model).trace_const
        sub = compact_form_data(model).ub
        lhs = -(dd.D * dd.D)
    c_sub = compact_casimir(model, sub, dd.diagonal_action, big)
    rhs = cas + ex.scal(ex.gq(const), ex.eye(big)) - c_sub
    return lhs, rhs


def verify_parthasarathy(dd: DiracData) -> float:
    """Max-entry residual of the Parthasarathy identity (0.0 when exact)."""
    lhs, rhs = parthasarathy_sides(dd)
    return ex.max_abs(lhs - rhs)


def mckean_singer_spread(dd: DiracData, t: TorusElement, times: Sequence[float]) -> float:
    """Spread of Tr_s[h exp(-s D^2)] over the given times s (graded path only)."""
    model = dd.rep.model
    nv = dd.rep.dim
    gen = _h_generator_numeric(model, t, dd.diagonal_action, dd.clifford.spinor_dim * nv)
    h = scipy.linalg.expm(gen)
    tau = np.kron(ex.to_numpy(dd.clifford.chirality), np.eye(nv))
    d2 = ex.to_numpy(dd.D * dd.D)
    vals = [complex(np.trace(tau @ h @ scipy.linalg.expm(-s * d2))) for s in times]
    return max(abs(v - vals[0]) for v in vals)

"""Finite-dimensional matrix representations of a model Lie algebra.

A representation assigns an exact square matrix to every basis vector of g.
Complex coefficient columns (elements of g_C, or of the compact form u) act by
complex-linear extension.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Sequence

import numpy as np
import scipy.optimize
from sympy.polys.matrices import DomainMatrix

from friedlab import exact as ex
from friedlab.errors import (Infeasible, NonSemisimpleAction, NonSemisimpleBAction,
                             NotIrreducible, NotRepresentation, NotScalar,
                             RequiresAdmissibleMetric)
from friedlab.group_model import (GroupModel, build_preset, casimir_operator,
                                  compact_casimir, compact_form_data)
from friedlab.lie_characters import VirtualCharacter, Weight


@dataclass
class MatrixRep:
    """A representation rho: g -> End(V) by explicit matrices.

    Attributes:
      model: the group model.
      matrices: rho(e_i) for each basis vector e_i of g.
      metric: optional Hermitian Gram matrix (admissible metric).
      label: human-readable name.
    """

    model: GroupModel
    matrices: list
    metric: DomainMatrix | None = None
    label: str = ""

    @property
    def dim(self) -> int:
        return self.matrices[0].shape[0] if self.matrices else 0

    def act(self, x: DomainMatrix) -> DomainMatrix:
        """rho(x) for a complex coefficient column x."""
        out = ex.zeros(self.dim)
        for (i, _), c in x.to_dok().items():
            out = out + ex.scal(c, self.matrices[i])
        return out

    def homomorphism_residual(self) -> float:
        """max |[rho(e_i), rho(e_j)] - rho([e_i, e_j])| over basis pairs."""
        worst = 0.0
        n = self.model.dim
        for i in range(n):
            for j in range(i + 1, n):
                lhs = ex.commutator(self.matrices[i], self.matrices[j])
                rhs = self.act(ex.columns(self.model.ad[i], [j]))
                worst = max(worst, ex.max_abs(lhs - rhs))
        return worst

    def check(self) -> "MatrixRep":
        if self.homomorphism_residual() != 0:
            raise NotRepresentation(f"{self.label}: bracket not preserved")
        return self

    def direct_sum(self, other: "MatrixRep") -> "MatrixRep":
        mats = [ex.block_diag([a, b]) for a, b in zip(self.matrices, other.matrices)]
        metric = None
        if self.metric is not None and other.metric is not None:
            metric = ex.block_diag([self.metric, other.metric])
        return MatrixRep(self.model, mats, metric, f"{self.label}+{other.label}")

    def tensor(self, other: "MatrixRep") -> "MatrixRep":
        ia, ib = ex.eye(self.dim), ex.eye(other.dim)
        mats = [ex.kron(a, ib) + ex.kron(ia, b)
                for a, b in zip(self.matrices, other.matrices)]
        metric = None
        if self.metric is not None and other.metric is not None:
            metric = ex.kron(self.metric, other.metric)
        return MatrixRep(self.model, mats, metric, f"{self.label}x{other.label}")

    def with_metric(self, metric: DomainMatrix) -> "MatrixRep":
        return replace(self, metric=metric)


def trivial_rep(model: GroupModel) -> MatrixRep:
    return MatrixRep(model, [ex.zeros(1) for _ in range(model.dim)], ex.eye(1), "triv")


def sym_power_matrix(a: DomainMatrix, p: int) -> DomainMatrix:
    """Action of a 2x2 matrix on Sym^p(C^2) as a derivation."""
    a11, a12 = ex.entry(a, 0, 0), ex.entry(a, 0, 1)
    a21, a22 = ex.entry(a, 1, 0), ex.entry(a, 1, 1)
    dok = {}
    for k in range(p + 1):
        e1, e2 = p - k, k
        d = ex.gq(e1) * a11 + ex.gq(e2) * a22
        if d != ex.ZERO:
            dok[(k, k)] = d
        if k + 1 <= p and a21 != ex.ZERO and e1:
            dok[(k + 1, k)] = ex.gq(e1) * a21
        if k - 1 >= 0 and a12 != ex.ZERO and e2:
            dok[(k - 1, k)] = ex.gq(e2) * a12
    return DomainMatrix.from_dok(dok, (p + 1, p + 1), ex.K)


def _piece_mats(model: GroupModel, fi: int) -> list:
    """Defining 2x2 (or 1x1) matrices of factor fi, one per factor basis vector."""
    f = model.factors[fi]
    lo, hi = f.block
    rows = list(range(lo, hi))
    return [ex.submatrix(model.matrices[i], rows, rows) for i in f.indices]


def factor_irrep_mats(model: GroupModel, fi: int, spec) -> list:
    """Irreducible representation of one factor.

    Args:
      model: product model.
      fi: factor index.
      spec: for sl2c a pair (p, q) giving Sym^p(std) x Sym^q(conj std); for
        su2/sl2r an integer p giving Sym^p(std); for the real line a rational
        number beta giving the character x -> beta*x.
    """
    f = model.factors[fi]
    base = _piece_mats(model, fi)
    if f.name == "r":
        return [ex.mat([[ex.gq(Fraction(spec))]])]
    if f.name == "sl2c":
        p, q = spec
        left = [sym_power_matrix(m, p) for m in base]
        right = [sym_power_matrix(ex.conjugate(m), q) for m in base]
        il, ir = ex.eye(p + 1), ex.eye(q + 1)
        return [ex.kron(a, ir) + ex.kron(il, b) for a, b in zip(left, right)]
    p = spec if isinstance(spec, int) else spec[0]
    return [sym_power_matrix(m, p) for m in base]


def external_tensor(model: GroupModel, factor_mats: Sequence[list], label: str = "") -> MatrixRep:
    """Outer tensor product of representations of the direct summands."""
    dims = [fm[0].shape[0] for fm in factor_mats]
    total = int(np.prod(dims)) if dims else 1
    mats = [None] * model.dim
    for fi, (f, fm) in enumerate(zip(model.factors, factor_mats)):
        left = int(np.prod(dims[:fi])) if fi else 1
        right = int(np.prod(dims[fi + 1:])) if fi + 1 < len(dims) else 1
        for idx, m in zip(f.indices, fm):
            mats[idx] = ex.kron(ex.kron(ex.eye(left), m), ex.eye(right))
    for i in range(model.dim):
        if mats[i] is None:
            mats[i] = ex.zeros(total)
    return MatrixRep(model, mats, None, label)


def build_irrep(model: GroupModel, specs: Sequence, label: str | None = None) -> MatrixRep:
    """Irreducible representation of a product model, one spec per factor."""
    fm = [factor_irrep_mats(model, i, s) for i, s in enumerate(specs)]
    return external_tensor(model, fm, label or "V" + "".join(str(s) for s in specs))


def build_irrep_sl2c(p: int, q: int, model: GroupModel | None = None) -> MatrixRep:
    """V_{p,q} = Sym^p(std) x Sym^q(conj std) on the sl2c preset."""
    if p < 0 or q < 0:
        raise ValueError("p and q must be nonnegative")
    model = model or build_preset("sl2c")
    return build_irrep(model, [(p, q)], f"V{p},{q}")


def casimir_matrix(r: MatrixRep) -> DomainMatrix:
    """C^{g,V} = -sum_ij (B^{-1})_ij rho(e_i) rho(e_j).

    This equals -sum rho(e_i)^2 over a B-orthonormal basis of p plus
    sum rho(e_i)^2 over a (-B)-orthonormal basis of k.
    """
    return -casimir_operator(r.matrices, r.model.B, r.dim)


def casimir_matrix_u(r: MatrixRep) -> DomainMatrix:
    """C^{u,V}, computed through the compact form u = i p + k."""
    u = compact_form_data(r.model).u
    return compact_casimir(r.model, u, r.act, r.dim)


def casimir_scalar(r: MatrixRep) -> Fraction:
    """The scalar by which C^{g,V} acts.

    Also recomputes C^{u,V} through the compact form and checks equality.

    Raises:
      NotScalar: if the Casimir is not a scalar matrix.
    """
    c = casimir_matrix(r)
    s = ex.scalar_value(c)
    if s is None:
        off = ex.max_abs(c - ex.scal(ex.entry(c, 0, 0), ex.eye(r.dim)))
        raise NotScalar(f"Casimir of {r.label} is not scalar", off)
    cu = casimir_matrix_u(r)
    if not ex.is_zero(cu - c):
        raise NotScalar("C^u differs from C^g", ex.max_abs(cu - c))
    return ex.real_value(s)


def theta_twist(r: MatrixRep) -> MatrixRep:
    """rho^theta = rho o theta."""
    th = r.model.theta
    mats = [r.act(ex.columns(th, [i])) for i in range(r.model.dim)]
    lab = r.label[:-2] if r.label.endswith("^t") else r.label + "^t"
    return MatrixRep(r.model, mats, r.metric, lab)


def theta_augment(r: MatrixRep) -> MatrixRep:
    """rho + rho^theta."""
    out = r.direct_sum(theta_twist(r))
    out.label = f"{r.label}+theta"
    return out


def full_h_character(r: MatrixRep) -> VirtualCharacter:
    """Weights of h on V (joint eigenvalues of rho(b) and rho(t))."""
    try:
        pieces = r.model.weights_of(r.act, r.dim)
    except NonSemisimpleAction as err:
        raise NonSemisimpleBAction(str(err)) from err
    return VirtualCharacter({w: cols.shape[1] for w, cols in pieces})


def is_theta_invariant(r: MatrixRep) -> bool:
    return full_h_character(r) == full_h_character(theta_twist(r))


def admissibility_residual(r: MatrixRep, metric: DomainMatrix) -> float:
    """max residual of G rho(Y) = rho(Y)^H G (Y in p) and G rho(Y) = -rho(Y)^H G (Y in k)."""
    worst = 0.0
    m = r.model
    for cols, sign in ((m.p, 1), (m.k, -1)):
        for j in range(cols.shape[1]):
            a = r.act(ex.columns(cols, [j]))
            res = metric * a - ex.scal(sign, ex.dagger(a) * metric)
            worst = max(worst, ex.max_abs(res))
    return worst


def _unvec(v: list, n: int) -> DomainMatrix:
    # column-major
    return ex.mat([[v[j * n + i] for j in range(n)] for i in range(n)])


def _herm_vec(h: DomainMatrix) -> list:
    n = h.shape[0]
    out = []
    for i in range(n):
        for j in range(n):
            z = ex.entry(h, i, j)
            out.extend([ex.frac(z.x), ex.frac(z.y)])
    return out


def find_admissible_metric(r: MatrixRep, install: bool = True) -> DomainMatrix:
    """Solves for a positive-definite admissible metric (unit trace).

    The linear conditions are G rho(Y) = rho(Y)^H G on p and
    G rho(Y) = -rho(Y)^H G on k. Among Hermitian solutions the Frobenius
    projection of the identity is tried first; a numerical search over the
    solution cone (certified exactly afterwards) is the fallback.

    Raises:
      Infeasible: when no positive-definite solution exists.
    """
    n = r.dim
    m = r.model
    idn = ex.eye(n)
    rows = []
    for cols, sign in ((m.p, 1), (m.k, -1)):
        for j in range(cols.shape[1]):
            a = r.act(ex.columns(cols, [j]))
            rows.append(ex.kron(a.transpose(), idn) - ex.scal(sign, ex.kron(idn, ex.dagger(a))))
    if rows:
        ns = ex.nullspace(ex.vstack(rows))
    else:
        ns = ex.eye(n * n)
    herm = []
    for j in range(ns.shape[1]):
        s = _unvec(ex.col(ns, j), n)
        herm.append(s + ex.dagger(s))
        herm.append(ex.scal(ex.I_UNIT, s - ex.dagger(s)))
    # independent real basis
    vecs = [_herm_vec(h) for h in herm]
    basis = []
    if vecs:
        mat = ex.mat([list(row) for row in zip(*vecs)])
        _, piv = mat.rref()
        basis = [herm[i] for i in piv]
    if not basis:
        raise Infeasible(f"{r.label}: no Hermitian solutions")
    k = len(basis)
    gram = ex.mat([[ex.trace(a * b).x for b in basis] for a in basis])
    rhs = ex.column([ex.trace(a).x for a in basis])
    c = ex.solve(gram, rhs)
    cand = _combine(basis, [ex.entry(c, i, 0) for i in range(k)], n)
    if not ex.is_positive_definite(cand):
        cand = _numeric_pd(basis, n)
        if cand is None:
            raise Infeasible(f"{r.label}: no positive-definite admissible metric")
    tr = ex.trace(cand)
    g = ex.scal(ex.ONE / tr, cand)
    if admissibility_residual(r, g) != 0:
        raise Infeasible("post-verification of admissibility failed")
    if install:
        r.metric = g
    return g


def _combine(basis, coeffs, n):
    out = ex.zeros(n)
    for h, c in zip(basis, coeffs):
        out = out + ex.scal(c, h)
    return out


def _numeric_pd(basis, n):
    hs = [ex.to_numpy(h) for h in basis]

    def neg_min_eig(c):
        g = sum(ci * h for ci, h in zip(c, hs))
        tr = np.trace(g).real
        if abs(tr) < 1e-12:
            return 1e6
        return -np.linalg.eigvalsh(g / tr)[0]

    best = None
    rng = np.random.default_rng(0)
    for _ in range(20):
        x0 = rng.normal(size=len(hs))
        res = scipy.optimize.minimize(neg_min_eig, x0, method="Nelder-Mead",
                                      options={"maxiter": 4000, "xatol": 1e-10})
        if best is None or res.fun < best.fun:
            best = res
    if best is None or best.fun >= -1e-9:
        return None
    coeffs = [ex.gq(Fraction(float(x)).limit_denominator(10**6)) for x in best.x]
    cand = _combine(basis, coeffs, n)
    if ex.trace(cand).x < 0:
        cand = -cand
    return cand if ex.is_positive_definite(cand) else None


@dataclass
class BWeightBlock:
    """An eigenspace of rho(a0): the summand C_beta x rho_beta.

    Attributes:
      beta: b-coordinate of the weight, in units of alpha0.
      basis: columns spanning the block inside V.
      m_action: restricted matrices of rho on the block, one per basis column
        of the model's m.
      k_m_character: t-weights of the block (K_M-character).
    """

    beta: Fraction
    basis: DomainMatrix
    m_action: list
    k_m_character: VirtualCharacter

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    @property
    def weight(self) -> Weight:
        return Weight((self.beta,), ())


def decompose_by_b(r: MatrixRep) -> list:
    """Exact eigen-decomposition of rho(a0) into b-weight blocks.

    Raises:
      RequiresAdmissibleMetric: if no metric is installed.
      NonSemisimpleBAction: if rho(a0) is not diagonalizable over Q.
      NotRankOne: on models with delta != 1.
    """
    if r.metric is None:
        raise RequiresAdmissibleMetric(r.label)
    m = r.model
    m.require_rank_one()
    try:
        eig = ex.rational_eigen(r.act(m.a0))
    except ValueError as err:
        raise NonSemisimpleBAction(str(err)) from err
    blocks = []
    for beta, cols in eig:
        linv = ex.left_inverse(cols)
        acts = [ex.restrict(r.act(ex.columns(m.m, [j])), cols, linv)
                for j in range(m.m.shape[1])]
        chi = VirtualCharacter({w.restrict_t(): c.shape[1]
                                for w, c in m.weights_of(r.act, r.dim, basis=cols)})
        blocks.append(BWeightBlock(beta, cols, acts, chi))
    for i, a in enumerate(blocks):
        for b in blocks[i + 1:]:
            if not ex.is_zero(ex.dagger(a.basis) * r.metric * b.basis):
                raise NonSemisimpleBAction("blocks are not metric-orthogonal")
    return sorted(blocks, key=lambda blk: blk.beta)


def b_blocks_paired(blocks: Sequence[BWeightBlock]) -> bool:
    """True iff blocks come in +-beta pairs with equal K_M-characters."""
    by = {b.beta: b for b in blocks}
    for beta, blk in by.items():
        other = by.get(-beta)
        if other is None or other.dim != blk.dim or other.k_m_character != blk.k_m_character:
            return False
    return True


def commutant_dim(r: MatrixRep) -> int:
    """Dimension of the commutant of rho (1 iff irreducible)."""
    n = r.dim
    idn = ex.eye(n)
    rows = [ex.kron(a.transpose(), idn) - ex.kron(idn, a) for a in r.matrices]
    return ex.nullspace(ex.vstack(rows)).shape[1]


def highest_weight(r: MatrixRep) -> Weight:
    """Highest weight of an irreducible representation (lexicographic order).

    Raises:
      NotIrreducible: if the commutant has dimension > 1.
    """
    if commutant_dim(r) != 1:
        raise NotIrreducible(r.label)
    chi = full_h_character(r)
    pos = r.model.positive_roots
    tops = [w for w in chi.support() if all(chi.mult(w + a) == 0 for a in pos)]
    if len(tops) != 1:
        raise NotIrreducible(f"{r.label}: {len(tops)} extremal weights")
    return tops[0]


def parse_rep_spec(model: GroupModel, spec: str) -> MatrixRep:
    """Parses a rep spec such as '1,0', '1,0+theta', '1,0;2' or 'triv'.

    Factors are separated by ';'. For sl2c factors a spec is 'p,q'; for su2 and
    sl2r an integer p; for the real line a rational beta. A '+theta' suffix
    requests the theta-augmentation rho + rho^theta. Several summands can be
    joined with '++'.
    """
    spec = spec.strip()
    if not spec:
        raise ValueError("empty rep spec")
    summands = spec.split("++")
    reps = []
    for s in summands:
        aug = s.endswith("+theta")
        if aug:
            s = s[: -len("+theta")]
        if s == "triv":
            rep = trivial_rep(model)
        else:
            parts = s.split(";")
            if len(parts) != len(model.factors):
                raise ValueError(f"rep spec {s!r} needs {len(model.factors)} factor(s)")
            specs = []
            for f, part in zip(model.factors, parts):
                if f.name == "sl2c":
                    pq = tuple(int(x) for x in part.split(","))
                    if len(pq) != 2 or min(pq) < 0:
                        raise ValueError(f"bad sl2c spec {part!r}")
                    specs.append(pq)
                elif f.name == "r":
                    specs.append(Fraction(part))
                else:
                    p = int(part)
                    if p < 0:
                        raise ValueError(f"bad spec {part!r}")
                    specs.append(p)
            rep = build_irrep(model, specs, "V" + s)
        if aug:
            rep = theta_augment(rep)
        reps.append(rep)
    out = reps[0]
    for r in reps[1:]:
        out = out.direct_sum(r)
    out.label = spec
    return out

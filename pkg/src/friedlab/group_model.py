"""Exact models of real reductive Lie algebras with their Cartan data.

A model is given by a basis of a real Lie algebra g of complex matrices, the
Cartan involution theta(X) = -X^H, an invariant form B and a maximal torus
t of k. Everything else (p, k, b, z(b), m, n, nbar, the compact form u) is
derived by exact linear algebra over Q(i).

Vectors of g (and of g_C) are coefficient columns in the model basis. Elements
of the compact form u = i*p + k are such columns with Gaussian-rational
entries.

B normalization: every sl(2) factor uses B(X, Y) = 2 Re tr(XY), and the real
line uses B(x, y) = xy. With this choice the standard basis vectors have norm
+-4, so every subspace used for Clifford modules has a rational orthonormal
basis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
from sympy.polys.matrices import DomainMatrix

from friedlab import exact as ex
from friedlab.errors import (EllipticClass, InvalidModel, NonSemisimpleAction,
                             NotMaximalTorus, NotRankOne, UnknownPreset)
from friedlab.lie_characters import TorusElement, Weight, WeylGroupData, is_positive

I = (0, 1)


def _m(rows):
    return ex.mat(rows)


SIGMA3 = [[1, 0], [0, -1]]
SIGMA1 = [[0, 1], [1, 0]]
SIGMA2 = [[0, (0, -1)], [(0, 1), 0]]
ISIGMA3 = [[(0, 1), 0], [0, (0, -1)]]
ISIGMA1 = [[0, (0, 1)], [(0, 1), 0]]
ISIGMA2 = [[0, 1], [-1, 0]]


@dataclass(frozen=True)
class Piece:
    """A simple building block of a preset (one direct summand)."""

    name: str
    labels: tuple
    matrices: tuple
    b_scale: Fraction
    t_index: tuple
    weyl: tuple
    rank_gc: int


PIECES = {
    "sl2c": Piece("sl2c", ("H", "P1", "P2", "iH", "iP1", "iP2"),
                  (SIGMA3, SIGMA1, SIGMA2, ISIGMA3, ISIGMA1, ISIGMA2),
                  Fraction(2), (3,), (ISIGMA2,), 2),
    "su2": Piece("su2", ("iH", "iP1", "iP2"), (ISIGMA3, ISIGMA1, ISIGMA2),
                 Fraction(2), (0,), (ISIGMA2,), 1),
    "sl2r": Piece("sl2r", ("H", "P1", "K"), (SIGMA3, SIGMA1, ISIGMA2),
                  Fraction(2), (2,), (), 1),
    "r": Piece("r", ("A",), ([[1]],), Fraction(1), (), (), 1),
}

PRESETS = {
    "sl2c": (("sl2c",), 1),
    "su2": (("su2",), 0),
    "sl2r": (("sl2r",), 0),
    "sl2c_cubed": (("sl2c", "sl2c", "sl2c"), 3),
    "sl2c_x_su2": (("sl2c", "su2"), 1),
    "rline_x_su2": (("r", "su2"), 1),
    "rline": (("r",), 1),
}

B_CONVENTION = ("B(X,Y) = 2 Re tr(XY) on every sl(2) factor; B(x,y) = xy on the "
                "real line")


@dataclass(frozen=True)
class Factor:
    """A direct summand of a product model."""

    name: str
    indices: tuple
    block: tuple


def _realify(m: DomainMatrix) -> list:
    n = m.shape[0]
    vals = [ex.entry(m, i, j) for i in range(n) for j in range(n)]
    return [ex.gq(ex.frac(v.x)) for v in vals] + [ex.gq(ex.frac(v.y)) for v in vals]


def casimir_operator(actions: Sequence[DomainMatrix], gram: DomainMatrix,
                     dim: int) -> DomainMatrix:
    """sum_ij (G^{-1})_ij A_i A_j for a basis with Gram matrix G."""
    n = len(actions)
    out = ex.zeros(dim)
    if n == 0:
        return out
    ginv = ex.inverse(gram)
    for (i, j), c in ginv.to_dok().items():
        out = out + ex.scal(c, actions[i] * actions[j])
    return out


class GroupModel:
    """An exact model of a real reductive Lie algebra with Cartan data.

    Raw data: the bracket (as adjoint matrices), theta, B and a basis of t.
    Derived subspaces are computed lazily so that deliberately corrupted
    models can still be validated.

    Attributes:
      name: preset name.
      labels: basis labels.
      ad: list of adjoint matrices ad(e_i) (n x n).
      theta: matrix of the Cartan involution.
      B: Gram matrix of the invariant form.
      t: columns spanning the maximal torus t of k.
      matrices: optional defining matrices of the basis.
      factors: direct-summand structure.
      rank_gc: complex rank of g_C (metadata).
      expected_delta: fundamental rank recorded in the preset.
    """

    def __init__(self, name: str, labels: Sequence[str], ad: Sequence[DomainMatrix],
                 theta: DomainMatrix, B: DomainMatrix, t: DomainMatrix, *,
                 matrices: Sequence[DomainMatrix] | None = None,
                 weyl_elements: Sequence[DomainMatrix] = (),
                 factors: Sequence[Factor] = (), rank_gc: int | None = None,
                 expected_delta: int | None = None, pieces: Sequence[str] = ()):
        self.name = name
        self.labels = tuple(labels)
        self.ad = list(ad)
        self.theta = theta
        self.B = B
        self.t = t
        self.matrices = list(matrices) if matrices is not None else None
        self.weyl_elements = list(weyl_elements)
        self.factors = tuple(factors)
        self.rank_gc = rank_gc
        self.expected_delta = expected_delta
        self.pieces = tuple(pieces)
        self.b_convention = B_CONVENTION

    # basic algebra -------------------------------------------------------

    @property
    def dim(self) -> int:
        return len(self.ad)

    def ad_of(self, x: DomainMatrix) -> DomainMatrix:
        """ad(x) for a (complex) coefficient column x."""
        out = ex.zeros(self.dim)
        for (i, _), c in x.to_dok().items():
            out = out + ex.scal(c, self.ad[i])
        return out

    def bracket(self, x: DomainMatrix, y: DomainMatrix) -> DomainMatrix:
        return self.ad_of(x) * y

    def form(self, x: DomainMatrix, y: DomainMatrix):
        """Complex-bilinear extension of B."""
        return ex.entry(x.transpose() * self.B * y, 0, 0)

    def gram(self, cols: DomainMatrix, sign: int = 1) -> DomainMatrix:
        g = cols.transpose() * self.B * cols
        return g if sign == 1 else -g

    def basis_vector(self, i: int) -> DomainMatrix:
        return ex.column([int(j == i) for j in range(self.dim)])

    @cached_property
    def _coord_solver(self):
        if self.matrices is None:
            raise InvalidModel("model has no defining matrices")
        cols = [_realify(m) for m in self.matrices]
        r = ex.mat([list(row) for row in zip(*cols)])
        return r, ex.left_inverse(r)

    def coords(self, m: DomainMatrix) -> DomainMatrix:
        """Coordinates of a matrix of g in the model basis (exact)."""
        r, linv = self._coord_solver
        v = ex.column(_realify(m))
        c = linv * v
        if not ex.is_zero(r * c - v):
            raise InvalidModel("matrix does not lie in g")
        return c

    def element_matrix(self, x: DomainMatrix) -> DomainMatrix:
        """Defining matrix of a complex coefficient column x."""
        out = ex.zeros(self.matrices[0].shape[0])
        for (i, _), c in x.to_dok().items():
            out = out + ex.scal(c, self.matrices[i])
        return out

    # Cartan decomposition ------------------------------------------------

    @cached_property
    def p(self) -> DomainMatrix:
        return ex.nullspace(self.theta + ex.eye(self.dim))

    @cached_property
    def k(self) -> DomainMatrix:
        return ex.nullspace(self.theta - ex.eye(self.dim))

    def _intersect_kernel(self, basis: DomainMatrix, ops: Sequence[DomainMatrix]):
        if basis.shape[1] == 0:
            return basis
        if not ops:
            return basis
        stacked = ex.vstack([op * basis for op in ops])
        return basis * ex.nullspace(stacked)

    @cached_property
    def b(self) -> DomainMatrix:
        """b = {a in p : [a, t] = 0}."""
        ops = [self.ad_of(ex.columns(self.t, [j])) for j in range(self.t.shape[1])]
        return self._intersect_kernel(self.p, ops)

    @property
    def delta(self) -> int:
        return self.b.shape[1]

    @cached_property
    def h(self) -> DomainMatrix:
        return ex.hstack([self.b, self.t], nrows=self.dim)

    def centralizer(self, cols: DomainMatrix, within: DomainMatrix | None = None):
        within = ex.eye(self.dim) if within is None else within
        ops = [self.ad_of(ex.columns(cols, [j])) for j in range(cols.shape[1])]
        return self._intersect_kernel(within, ops)

    @cached_property
    def zb(self) -> DomainMatrix:
        """Centralizer z(b) of b in g."""
        return self.centralizer(self.b)

    def _orth_within(self, basis: DomainMatrix, against: DomainMatrix):
        if against.shape[1] == 0 or basis.shape[1] == 0:
            return basis
        cond = against.transpose() * self.B * basis
        return basis * ex.nullspace(cond)

    @cached_property
    def m(self) -> DomainMatrix:
        """B-orthogonal complement of b in z(b)."""
        return self._orth_within(self.zb, self.b)

    @cached_property
    def p_m(self) -> DomainMatrix:
        return self._intersect_kernel(self.m, [self.theta + ex.eye(self.dim)])

    @cached_property
    def k_m(self) -> DomainMatrix:
        return self._intersect_kernel(self.m, [self.theta - ex.eye(self.dim)])

    @cached_property
    def zperp(self) -> DomainMatrix:
        """B-orthogonal complement z^perp(b) of z(b) in g."""
        return self._orth_within(ex.eye(self.dim), self.zb)

    @cached_property
    def p_perp(self) -> DomainMatrix:
        return self._orth_within(self.p, self.zb)

    @cached_property
    def k_perp(self) -> DomainMatrix:
        return self._orth_within(self.k, self.zb)

    @cached_property
    def _split(self):
        """(f_b, eigen-decomposition of ad(f_b) on z^perp(b))."""
        if self.delta == 0:
            return None, []
        fb = ex.zeros(self.dim, 1)
        for j in range(self.delta):
            fb = fb + ex.columns(self.b, [j])
        zp = self.zperp
        if zp.shape[1] == 0:
            return fb, []
        a = ex.restrict(self.ad_of(fb), zp)
        try:
            eig = ex.rational_eigen(a)
        except ValueError as err:
            raise NonSemisimpleAction(str(err)) from err
        if any(q == 0 for q, _ in eig):
            raise NonSemisimpleAction("ad(f_b) has a zero eigenvalue on z^perp(b)")
        return fb, [(q, zp * v) for q, v in eig]

    @cached_property
    def n(self) -> DomainMatrix:
        return ex.hstack([v for q, v in self._split[1] if q > 0], nrows=self.dim)

    @cached_property
    def nbar(self) -> DomainMatrix:
        return ex.hstack([v for q, v in self._split[1] if q < 0], nrows=self.dim)

    @property
    def ell(self) -> int:
        d = self.n.shape[1]
        if d % 2:
            raise InvalidModel("dim n is odd")
        return d // 2

    @cached_property
    def a0(self) -> DomainMatrix:
        """a0 in b with <alpha0, a0> = 1 (rank-one models only)."""
        self.require_rank_one()
        b1 = ex.columns(self.b, [0])
        pos = sorted({q for q, _ in self._split[1] if q > 0})
        if not pos:
            return b1
        # ad(b1) acts on n by the single scalar pos[0] when the model is valid
        return ex.scal(ex.gq(1 / pos[0]), b1)

    @property
    def alpha0(self) -> Weight:
        self.require_rank_one()
        return Weight((1,), (0,) * self.t.shape[1])

    def require_rank_one(self):
        if self.delta != 1:
            raise NotRankOne(f"model {self.name} has delta = {self.delta}")

    @cached_property
    def b_basis(self) -> DomainMatrix:
        """Basis of b used for weight coordinates (a0 when delta = 1)."""
        if self.delta == 1:
            return self.a0
        return self.b

    @cached_property
    def center(self) -> DomainMatrix:
        return self.centralizer(ex.eye(self.dim))

    @property
    def center_compact(self) -> bool:
        return self._intersect_kernel(self.center, [self.theta + ex.eye(self.dim)]).shape[1] == 0

    # weights -------------------------------------------------------------

    @property
    def db(self) -> int:
        return self.b_basis.shape[1]

    @property
    def dt(self) -> int:
        return self.t.shape[1]

    @cached_property
    def weight_gram(self) -> list:
        """Gram matrix of B* on weight coordinates (b..., t...)."""
        gb = self.gram(self.b_basis)
        gt = self.gram(self.t)
        gbi = ex.inverse(gb) if gb.shape[0] else gb
        gti = ex.inverse(gt) if gt.shape[0] else gt
        db, dt = gb.shape[0], gt.shape[0]
        out = [[Fraction(0)] * (db + dt) for _ in range(db + dt)]
        for i in range(db):
            for j in range(db):
                out[i][j] = ex.real_value(ex.entry(gbi, i, j))
        for i in range(dt):
            for j in range(dt):
                out[db + i][db + j] = -ex.real_value(ex.entry(gti, i, j))
        return out

    def inner(self, u: Weight, v: Weight) -> Fraction:
        """B*(u, v) on weights with full (b, t) coordinates."""
        g = self.weight_gram
        a, b = u.coords(), v.coords()
        return sum(g[i][j] * a[i] * b[j] for i in range(len(a)) for j in range(len(b)))

    def inner_t(self, u: Weight, v: Weight) -> Fraction:
        """B* restricted to t-coordinates."""
        db = self.db
        g = self.weight_gram
        return sum(g[db + i][db + j] * u.t[i] * v.t[j]
                   for i in range(len(u.t)) for j in range(len(v.t)))

    def norm2(self, w: Weight) -> Fraction:
        return self.inner(w, w)

    def weight_ops(self, action: Callable[[DomainMatrix], DomainMatrix]):
        """Operators and eigenvalue scales for the joint h-eigen-decomposition."""
        ops, scales = [], []
        for j in range(self.db):
            ops.append(action(ex.columns(self.b_basis, [j])))
            scales.append(ex.ONE)
        for j in range(self.dt):
            ops.append(action(ex.columns(self.t, [j])))
            scales.append(ex.I_UNIT)
        return ops, scales

    def weights_of(self, action: Callable[[DomainMatrix], DomainMatrix], dim: int,
                   basis: DomainMatrix | None = None):
        """Joint h-weights of a representation given by ``action``.

        Returns a list of (Weight, eigenspace columns).
        """
        ops, scales = self.weight_ops(action)
        if basis is not None:
            linv = ex.left_inverse(basis)
            ops = [ex.restrict(o, basis, linv) for o in ops]
            dim = basis.shape[1]
        try:
            pieces = ex.joint_eigen(ops, scales, dim)
        except ValueError as err:
            raise NonSemisimpleAction(str(err)) from err
        out = []
        for key, cols in pieces:
            w = Weight(key[:self.db], key[self.db:])
            out.append((w, cols if basis is None else basis * cols))
        return out

    @cached_property
    def roots(self) -> list:
        """Roots of (g_C, h_C), with multiplicity."""
        out = []
        for w, cols in self.weights_of(self.ad_of, self.dim):
            if not w.is_zero():
                out.extend([w] * cols.shape[1])
        return sorted(out)

    @cached_property
    def positive_roots(self) -> list:
        """Lexicographic positive system (b-coordinates first)."""
        return [r for r in self.roots if is_positive(r)]

    @cached_property
    def k_positive_roots(self) -> list:
        """Positive roots of (k_C, t_C) as b-free weights."""
        if self.k.shape[1] == 0 or self.dt == 0:
            return []
        ops = [self.ad_of(ex.columns(self.t, [j])) for j in range(self.dt)]
        linv = ex.left_inverse(self.k)
        ops = [ex.restrict(o, self.k, linv) for o in ops]
        pieces = ex.joint_eigen(ops, [ex.I_UNIT] * self.dt, self.k.shape[1])
        out = []
        for key, cols in pieces:
            w = Weight((), key)
            if not w.is_zero() and is_positive(w):
                out.extend([w] * cols.shape[1])
        return sorted(out)

    @cached_property
    def weyl_TK(self) -> WeylGroupData:
        """W(T:K) acting on weight coordinates, from representative group elements."""
        hb = ex.hstack([self.b_basis, self.t], nrows=self.dim)
        nh = hb.shape[1]
        gens = []
        for w in self.weyl_elements:
            winv = ex.inverse(w)
            cols = []
            for j in range(nh):
                x = ex.columns(hb, [j])
                y = self.coords(w * self.element_matrix(x) * winv)
                c = ex.solve(hb, y)
                if c is None:
                    raise InvalidModel("Weyl representative does not normalize h")
                cols.append(c)
            a = ex.hstack(cols)
            mw = ex.inverse(a).transpose()
            gens.append([[ex.real_value(ex.entry(mw, i, j)) for j in range(nh)]
                         for i in range(nh)])
        if not gens:
            gens = [[[Fraction(int(i == j)) for j in range(nh)] for i in range(nh)]]
        return WeylGroupData(gens, gram=self.weight_gram, db=self.db)

    def describe(self) -> dict:
        d = {
            "name": self.name,
            "dim_g": self.dim,
            "dim_p": self.p.shape[1],
            "dim_k": self.k.shape[1],
            "delta": self.delta,
            "dim_t": self.dt,
            "dim_m": self.m.shape[1],
            "dim_p_m": self.p_m.shape[1],
            "dim_zperp": self.zperp.shape[1],
            "dim_n": self.n.shape[1] if self.delta else 0,
            "center_compact": self.center_compact,
            "B_convention": self.b_convention,
        }
        if self.delta >= 1:
            d["ell"] = self.ell
        return d


# presets -------------------------------------------------------------------


def model_from_pieces(name: str, piece_names: Sequence[str],
                      expected_delta: int | None = None) -> GroupModel:
    """Builds the direct sum of simple pieces as a block-diagonal matrix algebra."""
    pieces = [PIECES[p] for p in piece_names]
    sizes = [len(p.matrices[0]) for p in pieces]
    N = sum(sizes)
    mats, labels, scales, t_idx, factors = [], [], [], [], []
    weyl = []
    off = 0
    idx = 0
    for pc, sz in zip(pieces, sizes):
        start = idx
        for lab, m in zip(pc.labels, pc.matrices):
            big = [[0] * N for _ in range(N)]
            for i in range(sz):
                for j in range(sz):
                    big[off + i][off + j] = m[i][j]
            mats.append(ex.mat(big))
            labels.append(f"{lab}{'' if len(pieces) == 1 else '_' + str(len(factors) + 1)}")
            scales.append((pc.b_scale, off, sz))
            idx += 1
        t_idx.extend(start + j for j in pc.t_index)
        for g in pc.weyl:
            big = [[int(i == j) for j in range(N)] for i in range(N)]
            for i in range(sz):
                for j in range(sz):
                    big[off + i][off + j] = g[i][j]
            weyl.append(ex.mat(big))
        factors.append(Factor(pc.name, tuple(range(start, idx)), (off, off + sz)))
        off += sz
    n = len(mats)
    bmat = [[Fraction(0)] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            si, oi, zi = scales[i]
            sj, oj, _ = scales[j]
            if oi != oj:
                continue
            tr = ex.trace(mats[i] * mats[j])
            bmat[i][j] = si * ex.frac(tr.x)
    theta_cols = []
    tmp = GroupModel(name, labels, [ex.zeros(n)] * n, ex.eye(n), ex.mat(bmat),
                     ex.zeros(n, 0), matrices=mats)
    for m in mats:
        theta_cols.append(tmp.coords(-ex.dagger(m)))
    theta = ex.hstack(theta_cols)
    ad = []
    for i in range(n):
        cols = [tmp.coords(ex.commutator(mats[i], mats[j])) for j in range(n)]
        ad.append(ex.hstack(cols))
    t = ex.hstack([tmp.basis_vector(i) for i in t_idx], nrows=n)
    rank = sum(p.rank_gc for p in pieces)
    model = GroupModel(name, labels, ad, theta, ex.mat(bmat), t, matrices=mats,
                       weyl_elements=weyl, factors=factors, rank_gc=rank,
                       expected_delta=expected_delta, pieces=piece_names)
    model._coord_solver = tmp._coord_solver
    return model


_CACHE: dict = {}


def build_preset(name: str, validate: bool = True) -> GroupModel:
    """Builds (and by default validates) a named preset model.

    Raises:
      UnknownPreset: for names outside the catalog.
      InvalidModel: if validation fails.
    """
    if name not in PRESETS:
        raise UnknownPreset(name)
    if name in _CACHE:
        return _CACHE[name]
    pieces, delta = PRESETS[name]
    model = model_from_pieces(name, pieces, delta)
    if validate:
        rep = validate_model(model)
        if not rep.passed:
            raise InvalidModel(f"preset {name} failed: {rep.failures()}")
    _CACHE[name] = model
    return model


def preset_names() -> list:
    return sorted(PRESETS)


def factor_model(model: GroupModel, i: int) -> GroupModel:
    """The preset model of the i-th direct summand."""
    pc = model.pieces[i]
    if pc in PRESETS:
        return build_preset(pc)
    return model_from_pieces(pc, (pc,))


# validation ----------------------------------------------------------------


@dataclass
class ValidationReport:
    """Pass/fail entries for every structural invariant of a model."""

    model: str
    checks: list = field(default_factory=list)

    def add(self, name: str, ok: bool, detail: str = ""):
        self.checks.append((name, bool(ok), detail))

    @property
    def passed(self) -> bool:
        return all(ok for _, ok, _ in self.checks)

    def failures(self) -> list:
        return [name for name, ok, _ in self.checks if not ok]

    def get(self, name: str) -> bool:
        for n, ok, _ in self.checks:
            if n == name:
                return ok
        raise KeyError(name)


def _check(report: ValidationReport, name: str, fn: Callable[[], bool | tuple]):
    try:
        res = fn()
    except Exception as err:  # failures are report entries
        report.add(name, False, f"{type(err).__name__}: {err}")
        return
    if isinstance(res, tuple):
        report.add(name, res[0], res[1])
    else:
        report.add(name, res)


def validate_model(m: GroupModel) -> ValidationReport:
    """Checks every structural invariant; failures become report entries."""
    rep = ValidationReport(m.name)
    n = m.dim
    I_n = ex.eye(n)

    def antisym():
        for i in range(n):
            for j in range(n):
                if ex.columns(m.ad[i], [j]) != -ex.columns(m.ad[j], [i]):
                    return False, f"c[{i},{j}] != -c[{j},{i}]"
        return True

    def jacobi():
        for i in range(n):
            for j in range(i + 1, n):
                lhs = ex.commutator(m.ad[i], m.ad[j])
                rhs = m.ad_of(ex.columns(m.ad[i], [j]))
                if not ex.is_zero(lhs - rhs):
                    return False, f"pair ({i},{j})"
        return True

    def theta_inv():
        return ex.is_zero(m.theta * m.theta - I_n)

    def theta_aut():
        for i in range(n):
            ti = m.ad_of(ex.columns(m.theta, [i]))
            if not ex.is_zero(m.theta * m.ad[i] - ti * m.theta):
                return False, f"basis element {i}"
        return True

    def b_sym():
        return ex.is_zero(m.B - m.B.transpose()) and all(
            v.y == 0 for v in m.B.to_dok().values())

    def b_adinv():
        for i in range(n):
            if not ex.is_zero(m.ad[i].transpose() * m.B + m.B * m.ad[i]):
                return False, f"basis element {i}"
        return True

    def b_theta():
        return ex.is_zero(m.theta.transpose() * m.B * m.theta - m.B)

    def signature():
        gp = m.gram(m.p)
        gk = m.gram(m.k, -1)
        cross = m.p.transpose() * m.B * m.k
        ok = (gp.shape[0] == 0 or ex.is_positive_definite(gp)) and \
             (gk.shape[0] == 0 or ex.is_positive_definite(gk)) and ex.is_zero(cross)
        return ok, "B positive on p, negative on k, p orthogonal to k"

    def cartan_brackets():
        def inside(x, sub):
            return ex.solve(sub, x) is not None if sub.shape[1] else ex.is_zero(x)
        for (a, b_, c) in ((m.p, m.p, m.k), (m.k, m.p, m.p), (m.k, m.k, m.k)):
            for i in range(a.shape[1]):
                ad_i = m.ad_of(ex.columns(a, [i]))
                img = ad_i * b_
                for j in range(img.shape[1]):
                    if not inside(ex.columns(img, [j]), c):
                        return False
        return True

    def torus():
        t = m.t
        if ex.solve(m.k, t) is None and t.shape[1]:
            return False, "t not inside k"
        for i in range(t.shape[1]):
            for j in range(t.shape[1]):
                if not ex.is_zero(m.bracket(ex.columns(t, [i]), ex.columns(t, [j]))):
                    return False, "t not abelian"
        cent = m.centralizer(t, within=m.k)
        if cent.shape[1] != t.shape[1]:
            raise NotMaximalTorus(f"centralizer of t in k has dim {cent.shape[1]}")
        return True

    def fundamental_rank():
        ok = m.expected_delta is None or m.delta == m.expected_delta
        return ok, f"delta = {m.delta}"

    def cartan_subalgebra():
        h = m.h
        for i in range(h.shape[1]):
            for j in range(h.shape[1]):
                if not ex.is_zero(m.bracket(ex.columns(h, [i]), ex.columns(h, [j]))):
                    return False, "h not abelian"
        zh = m.centralizer(h)
        ok = zh.shape[1] == h.shape[1]
        if m.rank_gc is not None:
            ok = ok and h.shape[1] == m.rank_gc
        return ok, f"dim h = {h.shape[1]}"

    def parity():
        return (m.p.shape[1] - m.delta) % 2 == 0

    def zperp_split():
        if m.delta == 0:
            return m.zperp.shape[1] == 0, "delta = 0: z(b) = g"
        d = m.zperp.shape[1]
        ok = m.n.shape[1] + m.nbar.shape[1] == d and m.n.shape[1] % 2 == 0
        return ok, f"dim z^perp = {d}, dim n = {m.n.shape[1]}"

    def theta_n():
        if m.delta == 0 or m.n.shape[1] == 0:
            return True
        img = m.theta * m.n
        return ex.rank(ex.hstack([img, m.nbar])) == m.nbar.shape[1] and \
            img.shape[1] == m.nbar.shape[1]

    def scalar_on_n():
        if m.delta != 1 or m.n.shape[1] == 0:
            return True
        ad0 = m.ad_of(m.a0)
        return ex.is_zero(ad0 * m.n - m.n) and ex.is_zero(ad0 * m.nbar + m.nbar)

    def b_isotropic():
        if m.delta == 0 or m.n.shape[1] == 0:
            return True
        return ex.is_zero(m.gram(m.n)) and ex.is_zero(m.gram(m.nbar))

    def pairing():
        if m.delta == 0 or m.n.shape[1] == 0:
            return True
        pr = m.n.transpose() * m.B * m.nbar
        return ex.rank(pr) == m.n.shape[1]

    def projections():
        if m.delta == 0 or m.n.shape[1] == 0:
            return True
        half = ex.scal(ex.gq(Fraction(1, 2)), ex.eye(n))
        pp = half * (I_n - m.theta) * m.n
        pk = half * (I_n + m.theta) * m.n
        dn = m.n.shape[1]
        ok = ex.rank(pp) == dn and ex.rank(pk) == dn
        if m.p_m.shape[1]:
            ok = ok and ex.is_zero(m.p_m.transpose() * m.B * pp)
        if m.k_m.shape[1]:
            ok = ok and ex.is_zero(m.k_m.transpose() * m.B * pk)
        return ok

    def weyl():
        W = m.weyl_TK
        return W.is_orthogonal(), f"|W(T:K)| = {W.order}"

    for name, fn in [("antisymmetry", antisym), ("jacobi", jacobi),
                     ("theta_involution", theta_inv), ("theta_automorphism", theta_aut),
                     ("B_symmetric", b_sym), ("B_ad_invariant", b_adinv),
                     ("B_theta_invariant", b_theta), ("B_signature", signature),
                     ("cartan_brackets", cartan_brackets), ("maximal_torus", torus),
                     ("fundamental_rank", fundamental_rank),
                     ("cartan_subalgebra", cartan_subalgebra), ("parity", parity),
                     ("zperp_split", zperp_split), ("theta_n_is_nbar", theta_n),
                     ("b_scalar_on_n", scalar_on_n), ("B_isotropic_n", b_isotropic),
                     ("B_pairing_n_nbar", pairing), ("n_projections", projections),
                     ("weyl_orthogonal", weyl)]:
        _check(rep, name, fn)
    return rep


CORRUPTIONS = ("structure_constant", "negate_B", "theta", "torus", "B_asymmetric")


def corrupt_model(m: GroupModel, kind: str) -> GroupModel:
    """A copy of the model with one deliberate fault (for negative controls).

    Kinds:
      structure_constant: perturbs one bracket coefficient.
      negate_B: replaces B by -B.
      theta: breaks the involution property.
      torus: replaces t by a non-maximal subspace (or a non-k vector).
      B_asymmetric: perturbs one off-diagonal entry of B.
    """
    ad = list(m.ad)
    theta, B, t = m.theta, m.B, m.t
    n = m.dim
    if kind == "structure_constant":
        # add e_0 to [e_0, e_1] only (antisymmetry and Jacobi break)
        dok = ad[0].to_dok()
        dok[(0, 1)] = dok.get((0, 1), ex.ZERO) + ex.ONE
        ad[0] = DomainMatrix.from_dok(dok, (n, n), ex.K)
    elif kind == "negate_B":
        B = -B
    elif kind == "theta":
        dok = theta.to_dok()
        dok[(0, 0)] = dok.get((0, 0), ex.ZERO) + ex.ONE
        theta = DomainMatrix.from_dok(dok, (n, n), ex.K)
    elif kind == "torus":
        if t.shape[1]:
            t = ex.zeros(n, 0)
        else:
            t = ex.columns(m.p, [0]) if m.p.shape[1] else ex.zeros(n, 0)
    elif kind == "B_asymmetric":
        dok = B.to_dok()
        dok[(0, 1)] = dok.get((0, 1), ex.ZERO) + ex.ONE
        B = DomainMatrix.from_dok(dok, (n, n), ex.K)
    else:
        raise ValueError(f"unknown corruption {kind!r}")
    out = GroupModel(m.name + f"[{kind}]", m.labels, ad, theta, B, t,
                     matrices=m.matrices, weyl_elements=m.weyl_elements,
                     factors=m.factors, rank_gc=m.rank_gc,
                     expected_delta=m.expected_delta, pieces=m.pieces)
    out._coord_solver = m._coord_solver
    return out


# derived data ----------------------------------------------------------------


def fundamental_cartan(m: GroupModel):
    """Returns (b, t, h) bases, checking that t is maximal and h is Cartan.

    Raises:
      NotMaximalTorus: if t is not maximal abelian in k.
    """
    cent = m.centralizer(m.t, within=m.k)
    if cent.shape[1] != m.t.shape[1]:
        raise NotMaximalTorus(f"centralizer of t in k has dim {cent.shape[1]}")
    if m.rank_gc is not None and m.h.shape[1] != m.rank_gc:
        raise NotMaximalTorus("dim h differs from the complex rank")
    return m.b, m.t, m.h


@dataclass(frozen=True)
class ZbSplit:
    m: DomainMatrix
    n: DomainMatrix
    nbar: DomainMatrix
    alpha0: Weight | None
    ell: int


def split_zb(m: GroupModel) -> ZbSplit:
    """The splitting z(b) = b + m and z^perp(b) = n + nbar.

    Raises:
      NotRankOne: when delta = 0 (z^perp(b) path undefined).
      NonSemisimpleAction: when ad(f_b) is not real-diagonalizable with
        nonzero eigenvalues on z^perp(b).
    """
    if m.delta == 0:
        raise NotRankOne("delta = 0: the b-splitting is undefined")
    alpha = m.alpha0 if m.delta == 1 else None
    return ZbSplit(m.m, m.n, m.nbar, alpha, m.ell)


@dataclass(frozen=True)
class CompactFormData:
    """Bases of u, u(b), u^perp(b), u_m (as complex columns) and the trace constant.

    Attributes:
      trace_const: (1/8) Tr[C^{u(b), u^perp(b)}].
    """

    u: DomainMatrix
    ub: DomainMatrix
    uperp: DomainMatrix
    um: DomainMatrix
    trace_const: Fraction


def _times_i(cols: DomainMatrix) -> DomainMatrix:
    return ex.scal(ex.I_UNIT, cols)


def compact_casimir(m: GroupModel, basis: DomainMatrix, action, dim: int) -> DomainMatrix:
    """Casimir of a compact subalgebra with basis columns, w.r.t. -B."""
    acts = [action(ex.columns(basis, [j])) for j in range(basis.shape[1])]
    return casimir_operator(acts, m.gram(basis, -1), dim)


def compact_form_data(m: GroupModel) -> CompactFormData:
    """The compact form u = i p + k and its splitting along b."""
    n = m.dim
    u = ex.hstack([_times_i(m.p), m.k], nrows=n)
    um = ex.hstack([_times_i(m.p_m), m.k_m], nrows=n)
    ub = ex.hstack([_times_i(m.b), um], nrows=n)
    uperp = ex.hstack([_times_i(m.p_perp), m.k_perp], nrows=n)
    const = Fraction(0)
    if m.zperp.shape[1]:
        c = compact_casimir(m, ub, m.ad_of, n)
        tr = ex.trace(ex.restrict(c, m.zperp))
        const = ex.real_value(tr) / 8
    return CompactFormData(u, ub, uperp, um, const)


def ad_determinant_factor(m: GroupModel, t: TorusElement) -> float:
    """|det(1 - Ad(e^a k^{-1}))|_{z^perp(b)}|^{1/2}, from the adjoint action.

    Raises:
      EllipticClass: when a_part vanishes.
    """
    if t.is_elliptic():
        raise EllipticClass("a_part = 0")
    zp = m.zperp
    if zp.shape[1] == 0:
        return 1.0
    if len(t.a_part) != m.db or len(t.angles) != m.dt:
        raise ValueError("torus element incompatible with model")
    gen = np.zeros((zp.shape[1], zp.shape[1]))
    for j, a in enumerate(t.a_part):
        gen = gen + float(a) * ex.to_numpy(
            ex.restrict(m.ad_of(ex.columns(m.b_basis, [j])), zp)).real
    for j, th in enumerate(t.angles):
        gen = gen + th * ex.to_numpy(ex.restrict(m.ad_of(ex.columns(m.t, [j])), zp)).real
    mat = scipy.linalg.expm(gen)
    return math.sqrt(abs(np.linalg.det(np.eye(len(mat)) - mat)))

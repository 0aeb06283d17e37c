"""Exact Gaussian-rational matrix helpers.

Thin wrappers around sympy's sparse ``DomainMatrix`` over ``QQ_I`` (the field
Q(i)). All structural computations in the package run through these helpers so
that residuals are exactly zero rather than small.
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np
from sympy import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

K = QQ_I
ZERO = K(0, 0)
ONE = K(1, 0)
I_UNIT = K(0, 1)


def _q(x) -> object:
    """Converts an int, Fraction or mpq into an element of QQ."""
    if isinstance(x, Fraction):
        return QQ(x.numerator, x.denominator)
    if isinstance(x, int):
        return QQ(x)
    if isinstance(x, Rational):
        return QQ(int(x.numerator), int(x.denominator))
    return QQ.convert(x)


def gq(x, y=0):
    """Returns the Gaussian rational ``x + i*y``.

    Args:
      x: real part, or an existing ``QQ_I`` element, or a Python complex
        number whose parts are exactly representable dyadic rationals.
      y: imaginary part.
    """
    if isinstance(x, type(ONE)):
        return x
    if isinstance(x, complex):
        return K(_q(Fraction(x.real)), _q(Fraction(x.imag)))
    return K(_q(x), _q(y))


def frac(x) -> Fraction:
    """Converts an mpq/QQ element to a ``fractions.Fraction``."""
    return Fraction(int(x.numerator), int(x.denominator))


def re_im(z) -> tuple[Fraction, Fraction]:
    """Returns the real and imaginary parts of a Gaussian rational."""
    return frac(z.x), frac(z.y)


def conj(z):
    """Complex conjugate of a Gaussian rational."""
    return K(z.x, -z.y)


def to_complex(z) -> complex:
    return complex(float(z.x), float(z.y))


def real_value(z) -> Fraction:
    """Returns ``z`` as a Fraction, raising if it has an imaginary part."""
    if z.y != 0:
        raise ValueError(f"expected a real number, got {z}")
    return frac(z.x)


def mat(rows: Sequence[Sequence]) -> DomainMatrix:
    """Builds a sparse Gaussian-rational matrix from nested sequences."""
    rows = [list(r) for r in rows]
    n = len(rows)
    m = len(rows[0]) if n else 0
    dok = {}
    for i, r in enumerate(rows):
        if len(r) != m:
            raise ValueError("ragged rows")
        for j, v in enumerate(r):
            z = gq(v) if not isinstance(v, tuple) else gq(*v)
            if z != ZERO:
                dok[(i, j)] = z
    return DomainMatrix.from_dok(dok, (n, m), K)


def zeros(n: int, m: int | None = None) -> DomainMatrix:
    return DomainMatrix.from_dok({}, (n, n if m is None else m), K)


def eye(n: int) -> DomainMatrix:
    return DomainMatrix.from_dok({(i, i): ONE for i in range(n)}, (n, n), K)


def diag(values: Iterable) -> DomainMatrix:
    vals = [gq(v) for v in values]
    n = len(vals)
    return DomainMatrix.from_dok(
        {(i, i): v for i, v in enumerate(vals) if v != ZERO}, (n, n), K)


def column(values: Iterable) -> DomainMatrix:
    vals = [gq(v) for v in values]
    return DomainMatrix.from_dok(
        {(i, 0): v for i, v in enumerate(vals) if v != ZERO}, (len(vals), 1), K)


def scal(c, a: DomainMatrix) -> DomainMatrix:
    """Scalar multiple ``c * a``."""
    c = gq(c)
    if c == ZERO:
        return zeros(*a.shape)
    return a * c


def entries(a: DomainMatrix) -> dict:
    return a.to_dok()


def entry(a: DomainMatrix, i: int, j: int):
    return a.rep.get(i, {}).get(j, ZERO)


def kron(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    """Kronecker product."""
    (n1, m1), (n2, m2) = a.shape, b.shape
    da, db = a.to_dok(), b.to_dok()
    out = {}
    for (i, j), x in da.items():
        for (k, l), y in db.items():
            out[(i * n2 + k, j * m2 + l)] = x * y
    return DomainMatrix.from_dok(out, (n1 * n2, m1 * m2), K)


def dagger(a: DomainMatrix) -> DomainMatrix:
    """Conjugate transpose."""
    n, m = a.shape
    return DomainMatrix.from_dok(
        {(j, i): conj(v) for (i, j), v in a.to_dok().items()}, (m, n), K)


def conjugate(a: DomainMatrix) -> DomainMatrix:
    """Entrywise complex conjugate."""
    return DomainMatrix.from_dok(
        {k: conj(v) for k, v in a.to_dok().items()}, a.shape, K)


def commutator(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    return a * b - b * a


def anticommutator(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix:
    return a * b + b * a


def trace(a: DomainMatrix):
    t = ZERO
    for i, row in a.rep.items():
        t += row.get(i, ZERO)
    return t


def is_zero(a: DomainMatrix) -> bool:
    return 0 in a.shape or a.is_zero_matrix


def scalar_value(a: DomainMatrix):
    """Returns ``c`` if ``a == c*I`` exactly, otherwise None."""
    n, m = a.shape
    if n != m:
        return None
    if n == 0:
        return ZERO
    c = entry(a, 0, 0)
    return c if is_zero(a - scal(c, eye(n))) else None


def max_abs(a: DomainMatrix) -> float:
    """Largest entry modulus, as a float (0.0 for an exact zero matrix)."""
    best = 0.0
    for row in a.rep.values():
        for v in row.values():
            best = max(best, abs(to_complex(v)))
    return best


def to_numpy(a: DomainMatrix) -> np.ndarray:
    n, m = a.shape
    out = np.zeros((n, m), dtype=complex)
    for i, row in a.rep.items():
        for j, v in row.items():
            out[i, j] = to_complex(v)
    return out


def nullspace(a: DomainMatrix) -> DomainMatrix:
    """Basis of the right kernel, as the columns of the returned matrix."""
    n, m = a.shape
    if n == 0:
        return eye(m)
    ns = a.to_sparse().nullspace().transpose()
    return normalize_columns(ns)


def normalize_columns(a: DomainMatrix) -> DomainMatrix:
    """Scales each column so that its first nonzero entry is 1."""
    n, m = a.shape
    lead = {}
    for (i, j), v in sorted(a.to_dok().items()):
        if j not in lead:
            lead[j] = v
    out = {(i, j): v / lead[j] for (i, j), v in a.to_dok().items()}
    return DomainMatrix.from_dok(out, (n, m), K)


def rank(a: DomainMatrix) -> int:
    if 0 in a.shape:
        return 0
    return a.rank()


def hstack(blocks: Sequence[DomainMatrix], nrows: int | None = None) -> DomainMatrix:
    blocks = [b for b in blocks if b.shape[1] > 0]
    if not blocks:
        return zeros(nrows or 0, 0)
    out = {}
    off = 0
    for b in blocks:
        for (i, j), v in b.to_dok().items():
            out[(i, j + off)] = v
        off += b.shape[1]
    return DomainMatrix.from_dok(out, (blocks[0].shape[0], off), K)


def vstack(blocks: Sequence[DomainMatrix], ncols: int | None = None) -> DomainMatrix:
    blocks = [b for b in blocks if b.shape[0] > 0]
    if not blocks:
        return zeros(0, ncols or 0)
    out = {}
    off = 0
    for b in blocks:
        for (i, j), v in b.to_dok().items():
            out[(i + off, j)] = v
        off += b.shape[0]
    return DomainMatrix.from_dok(out, (off, blocks[0].shape[1]), K)


def block_diag(blocks: Sequence[DomainMatrix]) -> DomainMatrix:
    out = {}
    r = c = 0
    for b in blocks:
        for (i, j), v in b.to_dok().items():
            out[(i + r, j + c)] = v
        r += b.shape[0]
        c += b.shape[1]
    return DomainMatrix.from_dok(out, (r, c), K)


def columns(a: DomainMatrix, idx: Sequence[int]) -> DomainMatrix:
    idx = list(idx)
    pos = {j: k for k, j in enumerate(idx)}
    out = {}
    for (i, j), v in a.to_dok().items():
        if j in pos:
            out[(i, pos[j])] = v
    return DomainMatrix.from_dok(out, (a.shape[0], len(idx)), K)


def col(a: DomainMatrix, j: int) -> list:
    """Column ``j`` as a list of Gaussian rationals."""
    return [entry(a, i, j) for i in range(a.shape[0])]


def submatrix(a: DomainMatrix, rows: Sequence[int], cols: Sequence[int]) -> DomainMatrix:
    rpos = {r: k for k, r in enumerate(rows)}
    cpos = {c: k for k, c in enumerate(cols)}
    out = {}
    for (i, j), v in a.to_dok().items():
        if i in rpos and j in cpos:
            out[(rpos[i], cpos[j])] = v
    return DomainMatrix.from_dok(out, (len(rows), len(cols)), K)


def inverse(a: DomainMatrix) -> DomainMatrix:
    if a.shape == (0, 0):
        return a
    return a.to_sparse().inv()


def solve(a: DomainMatrix, b: DomainMatrix) -> DomainMatrix | None:
    """Exact solution ``x`` of ``a x = b`` when one exists, else None.

    ``a`` may be rectangular with full column rank.
    """
    n, m = a.shape
    if m == 0:
        return zeros(0, b.shape[1]) if is_zero(b) else None
    aug = hstack([a, b])
    r, pivots = aug.rref()
    if any(p >= m for p in pivots):
        return None
    if len(pivots) < m:
        raise ValueError("coefficient matrix lacks full column rank")
    x = {}
    for row, p in enumerate(pivots):
        for j in range(b.shape[1]):
            v = entry(r, row, m + j)
            if v != ZERO:
                x[(p, j)] = v
    return DomainMatrix.from_dok(x, (m, b.shape[1]), K)


def left_inverse(p: DomainMatrix) -> DomainMatrix:
    """Left inverse ``(P^H P)^{-1} P^H`` of a full-column-rank matrix."""
    if p.shape[1] == 0:
        return zeros(0, p.shape[0])
    ph = dagger(p)
    return inverse(ph * p) * ph


def restrict(op: DomainMatrix, basis: DomainMatrix, linv: DomainMatrix | None = None,
             check: bool = True) -> DomainMatrix:
    """Matrix of ``op`` on the invariant subspace spanned by ``basis``.

    Raises ValueError when ``check`` is set and the span is not invariant.
    """
    if linv is None:
        linv = left_inverse(basis)
    img = op * basis
    r = linv * img
    if check and not is_zero(basis * r - img):
        raise ValueError("subspace is not invariant")
    return r


def is_hermitian(a: DomainMatrix) -> bool:
    return is_zero(a - dagger(a))


def is_positive_definite(a: DomainMatrix) -> bool:
    """Exact positive-definiteness test for a Hermitian matrix via LDL^H."""
    if not is_hermitian(a):
        return False
    n = a.shape[0]
    m = [[entry(a, i, j) for j in range(n)] for i in range(n)]
    for k in range(n):
        d = m[k][k]
        if d.y != 0 or d.x <= 0:
            return False
        for i in range(k + 1, n):
            f = m[i][k] / d
            if f == ZERO:
                continue
            for j in range(k + 1, n):
                m[i][j] -= f * m[k][j]
    return True


def from_numpy_rational(a: np.ndarray, max_den: int = 10**6) -> DomainMatrix:
    """Rationalizes a complex float array entrywise (limited denominators)."""
    rows = []
    for r in np.atleast_2d(a):
        rows.append([gq(Fraction(float(v.real)).limit_denominator(max_den),
                        Fraction(float(v.imag)).limit_denominator(max_den))
                     for v in r])
    return mat(rows)


def rational_eigen(a: DomainMatrix, scale=ONE, max_den: int = 10**4):
    """Exact eigen-decomposition for an operator with eigenvalues in ``scale*Q``.

    Candidate eigenvalues come from a floating eigen-solve, are rationalized,
    and then certified by exact null-space dimensions summing to the full size.

    Args:
      a: square matrix.
      scale: the eigenvalues of ``a`` are assumed to be ``scale * q`` with
        ``q`` rational (use ``I_UNIT`` for torus generators).
      max_den: denominator bound for rationalization.

    Returns:
      List of ``(q, basis)`` pairs with ``q`` a Fraction and ``basis`` a
      matrix whose columns span the eigenspace.

    Raises:
      ValueError: when the operator is not diagonalizable with eigenvalues of
        the assumed form.
    """
    n = a.shape[0]
    if n == 0:
        return []
    b = a * (ONE / gq(scale))
    vals = np.linalg.eigvals(to_numpy(b))
    cands = sorted({Fraction(float(v.real)).limit_denominator(max_den) for v in vals})
    out = []
    total = 0
    for q in cands:
        ns = nullspace(b - scal(gq(q), eye(n)))
        if ns.shape[1]:
            out.append((q, ns))
            total += ns.shape[1]
    if total != n:
        raise ValueError("operator is not diagonalizable over the assumed field")
    return out


def joint_eigen(ops: Sequence[DomainMatrix], scales: Sequence, dim: int):
    """Simultaneous eigen-decomposition of commuting operators.

    Returns a list of ``(key, basis)`` with ``key`` a tuple of Fractions, one
    per operator, and ``basis`` columns spanning the joint eigenspace (as
    vectors of the ambient ``dim``-dimensional space).
    """
    pieces = [((), eye(dim))]
    for op, s in zip(ops, scales):
        nxt = []
        for key, basis in pieces:
            linv = left_inverse(basis)
            r = restrict(op, basis, linv)
            for q, sub in rational_eigen(r, s):
                nxt.append((key + (q,), basis * sub))
        pieces = nxt
    return pieces

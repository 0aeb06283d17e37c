"""Weights, Weyl groups and virtual characters.

A weight is stored by its values on a fixed basis of the fundamental Cartan
subalgebra h = b + t: ``b`` holds the real values on the chosen basis of b (for
rank-one models the single basis vector is a0, so ``b == (beta,)`` means
beta * alpha0), and ``t`` holds integers or rationals ``n_j`` such that the
weight takes the value ``i * n_j`` on the j-th basis vector of t.

Virtual characters are finite signed multisets of weights. Equality is exact
multiset equality.
"""

from __future__ import annotations

import cmath
import itertools
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from friedlab.errors import DimensionMismatch, NegativeMultiplicity, NotLiftable


def _fr(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True, order=True)
class Weight:
    """A weight of h, stored by coordinates.

    Attributes:
      b: values on the basis of b (length dim b).
      t: coefficients n_j with value i*n_j on the j-th basis vector of t.
    """

    b: tuple = ()
    t: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(_fr(x) for x in self.b))
        object.__setattr__(self, "t", tuple(_fr(x) for x in self.t))

    @classmethod
    def zero(cls, db: int, dt: int) -> "Weight":
        return cls((0,) * db, (0,) * dt)

    @property
    def b_part(self) -> Fraction:
        """The b-coordinate of a rank-one weight, in units of alpha0."""
        if len(self.b) != 1:
            raise DimensionMismatch(f"b_part needs dim b = 1, got {len(self.b)}")
        return self.b[0]

    @property
    def t_part(self) -> tuple:
        return self.t

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.b), len(self.t)

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for x in self.t)

    def restrict_t(self) -> "Weight":
        """Forgets the b-coordinates (restriction to t)."""
        return Weight((), self.t)

    def _check(self, other: "Weight"):
        if self.shape != other.shape:
            raise DimensionMismatch(f"weight shapes {self.shape} and {other.shape}")

    def __add__(self, other: "Weight") -> "Weight":
        self._check(other)
        return Weight(tuple(x + y for x, y in zip(self.b, other.b)),
                      tuple(x + y for x, y in zip(self.t, other.t)))

    def __neg__(self) -> "Weight":
        return Weight(tuple(-x for x in self.b), tuple(-x for x in self.t))

    def __sub__(self, other: "Weight") -> "Weight":
        return self + (-other)

    def scale(self, c) -> "Weight":
        c = _fr(c)
        return Weight(tuple(c * x for x in self.b), tuple(c * x for x in self.t))

    def is_zero(self) -> bool:
        return not any(self.b) and not any(self.t)

    def coords(self) -> tuple:
        return self.b + self.t

    def __repr__(self) -> str:
        def f(xs):
            return ",".join(str(x) for x in xs)
        return f"W({f(self.b)};{f(self.t)})"


@dataclass(frozen=True)
class TorusElement:
    """The element exp(a) * exp(sum_j theta_j t_j) of H = exp(b) x T.

    The class convention writes such an element as e^a k^{-1}; here the angles
    directly parametrize k^{-1}, so a weight evaluates to
    ``exp(<beta, a>) * prod_j exp(i * n_j * theta_j)``.

    Attributes:
      a_part: coefficients of a on the basis of b (a scalar multiple of a0 for
        rank-one models; a bare number is accepted and wrapped).
      angles: real angles theta_j, one per basis vector of t.
    """

    a_part: tuple = ()
    angles: tuple = ()

    def __post_init__(self):
        a = self.a_part
        if not isinstance(a, (tuple, list)):
            a = (a,)
        object.__setattr__(self, "a_part", tuple(a))
        object.__setattr__(self, "angles", tuple(float(x) for x in self.angles))
        if not all(np.isfinite(x) for x in self.angles):
            raise ValueError("angles must be finite")

    @property
    def a(self) -> float:
        """The scalar a_part of a rank-one element."""
        if len(self.a_part) != 1:
            raise DimensionMismatch("scalar a_part needs dim b = 1")
        return float(self.a_part[0])

    def is_elliptic(self) -> bool:
        return all(float(x) == 0.0 for x in self.a_part)


class VirtualCharacter:
    """An integer-weighted finite multiset of weights.

    Instances are immutable and hashable. Zero multiplicities are never stored.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Weight, int] | Iterable[Weight] | None = None):
        c: Counter = Counter()
        if terms is None:
            pass
        elif isinstance(terms, Mapping):
            for w, m in terms.items():
                c[w] += int(m)
        else:
            for w in terms:
                c[w] += 1
        self._terms = {w: m for w, m in c.items() if m != 0}
        self._hash = None

    @classmethod
    def trivial(cls, db: int = 0, dt: int = 0) -> "VirtualCharacter":
        return cls({Weight.zero(db, dt): 1})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def items(self):
        return sorted(self._terms.items())

    def weights(self) -> list:
        """Weights repeated by multiplicity (requires a genuine character)."""
        out = []
        for w, m in self.items():
            if m < 0:
                raise NegativeMultiplicity(f"weight {w} has multiplicity {m}")
            out.extend([w] * m)
        return out

    def mult(self, w: Weight) -> int:
        return self._terms.get(w, 0)

    def support(self) -> list:
        return sorted(self._terms)

    @property
    def dim(self) -> int:
        """Virtual dimension (sum of multiplicities)."""
        return sum(self._terms.values())

    def is_genuine(self) -> bool:
        return all(m > 0 for m in self._terms.values())

    def is_empty(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, VirtualCharacter):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __add__(self, other: "VirtualCharacter") -> "VirtualCharacter":
        c = Counter(self._terms)
        c.update(other._terms)
        return VirtualCharacter(c)

    def __neg__(self) -> "VirtualCharacter":
        return VirtualCharacter({w: -m for w, m in self._terms.items()})

    def __sub__(self, other: "VirtualCharacter") -> "VirtualCharacter":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            return VirtualCharacter({w: other * m for w, m in self._terms.items()})
        c: Counter = Counter()
        for w1, m1 in self._terms.items():
            for w2, m2 in other._terms.items():
                c[w1 + w2] += m1 * m2
        return VirtualCharacter(c)

    __rmul__ = __mul__

    def map(self, f: Callable[[Weight], Weight]) -> "VirtualCharacter":
        c: Counter = Counter()
        for w, m in self._terms.items():
            c[f(w)] += m
        return VirtualCharacter(c)

    def restrict_t(self) -> "VirtualCharacter":
        return self.map(Weight.restrict_t)

    def shift(self, w0: Weight) -> "VirtualCharacter":
        return self.map(lambda w: w + w0)

    def dual(self) -> "VirtualCharacter":
        return self.map(lambda w: -w)

    def filter(self, pred: Callable[[Weight], bool]) -> "VirtualCharacter":
        return VirtualCharacter({w: m for w, m in self._terms.items() if pred(w)})

    def split(self) -> tuple["VirtualCharacter", "VirtualCharacter"]:
        """Returns the positive and negative parts (both genuine)."""
        pos = {w: m for w, m in self._terms.items() if m > 0}
        neg = {w: -m for w, m in self._terms.items() if m < 0}
        return VirtualCharacter(pos), VirtualCharacter(neg)

    def diff(self, other: "VirtualCharacter") -> dict:
        """Weight-level difference ``self - other`` as a plain dict."""
        return (self - other).terms

    def __repr__(self) -> str:
        inner = ", ".join(f"{m}*{w!r}" for w, m in self.items())
        return f"VirtualCharacter({{{inner}}})"


def character_sum(chars: Iterable[VirtualCharacter]) -> VirtualCharacter:
    out = VirtualCharacter()
    for c in chars:
        out = out + c
    return out


@dataclass
class WeylGroupData:
    """A finite group of linear maps on weight coordinates (b..., t...).

    Attributes:
      generators: rational matrices acting on coordinate column vectors.
      gram: the Gram matrix of B* on weight coordinates, used for the
        orthogonality check.
      db: number of b-coordinates.
      elements: enumerated closure (filled on construction).
    """

    generators: list
    gram: list | None = None
    db: int = 0
    elements: list = field(default_factory=list)
    max_order: int = 10000

    def __post_init__(self):
        gens = [tuple(tuple(_fr(x) for x in row) for row in g) for g in self.generators]
        self.generators = gens
        n = self.dim
        ident = tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))
        seen = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for g in frontier:
                for s in gens:
                    h = _matmul(s, g)
                    if h not in seen:
                        seen.add(h)
                        nxt.append(h)
                        if len(seen) > self.max_order:
                            raise ValueError("Weyl group closure did not terminate")
            frontier = nxt
        self.elements = sorted(seen)

    @property
    def dim(self) -> int:
        if self.generators:
            return len(self.generators[0])
        if self.gram is not None:
            return len(self.gram)
        return 0

    @property
    def order(self) -> int:
        return len(self.elements)

    def is_orthogonal(self) -> bool:
        """Checks that every element preserves the form B*."""
        if self.gram is None:
            return True
        g = tuple(tuple(_fr(x) for x in row) for row in self.gram)
        for w in self.elements:
            wt = tuple(zip(*w))
            if _matmul(_matmul(wt, g), w) != g:
                return False
        return True

    def act(self, w, weight: Weight) -> Weight:
        """Applies the group element ``w`` to a weight.

        Weights without b-coordinates (T-weights) are acted on by the t-block.
        """
        db = self.db
        if len(weight.b) == db:
            v = weight.coords()
            if len(v) != self.dim:
                raise DimensionMismatch("weight incompatible with Weyl group")
            out = [sum(w[i][j] * v[j] for j in range(len(v))) for i in range(len(v))]
            return Weight(tuple(out[:db]), tuple(out[db:]))
        if len(weight.b) == 0 and len(weight.t) == self.dim - db:
            v = weight.t
            blk = [row[db:] for row in w[db:]]
            out = [sum(blk[i][j] * v[j] for j in range(len(v))) for i in range(len(v))]
            return Weight((), tuple(out))
        raise DimensionMismatch("weight incompatible with Weyl group")


def _matmul(a, b):
    return tuple(tuple(sum(a[i][k] * b[k][j] for k in range(len(b)))
                       for j in range(len(b[0]))) for i in range(len(a)))


def weyl_orbit(w: Weight, W: WeylGroupData) -> set:
    """The W-orbit of a weight."""
    return {W.act(g, w) for g in W.elements}


def is_w_invariant(chi: VirtualCharacter, W: WeylGroupData) -> bool:
    """True iff ``chi`` is invariant under every element of ``W``."""
    for g in W.elements:
        if chi.map(lambda w: W.act(g, w)) != chi:
            return False
    return True


@dataclass(frozen=True)
class KCharacter:
    """A T-character certified W(T:K)-invariant, hence an element of R(K)."""

    character: VirtualCharacter
    weyl_order: int


def lift_to_rk(chi_on_T: VirtualCharacter, W: WeylGroupData) -> KCharacter:
    """Lifts a T-character to R(K) by certifying W(T:K)-invariance.

    Since R(K) restricts isomorphically onto the W-invariants of R(T), the
    lift is the character itself once invariance holds.

    Raises:
      NotLiftable: if the character is not W-invariant or not integral.
    """
    for w in chi_on_T.support():
        if not w.is_integral():
            raise NotLiftable(f"non-integral T-weight {w}")
    if not is_w_invariant(chi_on_T, W):
        raise NotLiftable("character is not W(T:K)-invariant")
    return KCharacter(chi_on_T, W.order)


def exterior_power_character(chi: VirtualCharacter, k: int) -> VirtualCharacter:
    """Character of the k-th exterior power of a genuine representation."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    ws = chi.weights()
    if not ws:
        zero = None
    else:
        zero = Weight.zero(*ws[0].shape)
    if k == 0:
        if zero is None:
            return VirtualCharacter({Weight(): 1})
        return VirtualCharacter({zero: 1})
    # coefficient extraction from prod (1 + x e^w)
    layers = [Counter({zero: 1})] + [Counter() for _ in range(k)]
    for w in ws:
        for j in range(k, 0, -1):
            for u, m in layers[j - 1].items():
                layers[j][u + w] += m
    return VirtualCharacter(layers[k])


def exterior_algebra(chi: VirtualCharacter, graded: bool = True) -> VirtualCharacter:
    """sum_k (-1)^k Lambda^k(chi) when graded, else sum_k Lambda^k(chi)."""
    n = len(chi.weights())
    out = VirtualCharacter()
    for k in range(n + 1):
        e = exterior_power_character(chi, k)
        out = out + (e * (-1) ** k if graded else e)
    return out


def exterior_parity(chi: VirtualCharacter) -> tuple[VirtualCharacter, VirtualCharacter]:
    """Returns (Lambda^even(chi), Lambda^odd(chi))."""
    n = len(chi.weights())
    ev, od = VirtualCharacter(), VirtualCharacter()
    for k in range(n + 1):
        e = exterior_power_character(chi, k)
        if k % 2:
            od = od + e
        else:
            ev = ev + e
    return ev, od


def evaluate_weight(w: Weight, t: TorusElement) -> complex:
    if len(w.t) != len(t.angles):
        raise DimensionMismatch("torus element incompatible with weight")
    expo = 0.0
    if w.b:
        if len(w.b) != len(t.a_part):
            raise DimensionMismatch("torus element incompatible with weight")
        expo = sum(float(x) * float(a) for x, a in zip(w.b, t.a_part))
    phase = sum(float(n) * th for n, th in zip(w.t, t.angles))
    return cmath.exp(expo + 1j * phase)


def evaluate_character(chi: VirtualCharacter, t: TorusElement) -> complex:
    """Evaluates sum_w mult(w) * w(t) in floating point.

    See ``evaluate_character_exact`` for the exact cyclotomic variant.
    """
    return complex(sum(m * evaluate_weight(w, t) for w, m in chi.items()))


def evaluate_character_exact(chi: VirtualCharacter, angles_over_pi: Sequence[Fraction]):
    """Exact cyclotomic evaluation at an elliptic element.

    Args:
      chi: a character whose weights have no b-coordinates or zero a-part.
      angles_over_pi: angles theta_j / pi as Fractions.

    Returns:
      A simplified sympy expression.
    """
    import sympy

    total = sympy.Integer(0)
    for w, m in chi.items():
        ph = sum(sympy.Rational(n.numerator, n.denominator)
                 * sympy.Rational(q.numerator, q.denominator)
                 for n, q in zip(w.t, angles_over_pi))
        total += m * sympy.exp(sympy.I * sympy.pi * ph)
    return sympy.nsimplify(sympy.simplify(sympy.expand_complex(total)))


def is_positive(w: Weight) -> bool:
    """Lexicographic positivity on the coordinates (b first, then t)."""
    for x in w.coords():
        if x != 0:
            return x > 0
    return False


def inner(gram, u: Weight, v: Weight) -> Fraction:
    """B*(u, v) given the Gram matrix of B* on weight coordinates."""
    a, b = u.coords(), v.coords()
    return sum(_fr(gram[i][j]) * a[i] * b[j] for i in range(len(a)) for j in range(len(b)))


def decompose_irreducibles(chi: VirtualCharacter, positive_roots: Sequence[Weight],
                           gram_t) -> dict:
    """Virtual multiplicities of irreducible K-representations in ``chi``.

    Uses the Weyl numerator: multiplying a character by the Weyl denominator
    prod_{alpha > 0} (1 - e^{-alpha}) leaves, on dominant weights, exactly the
    multiplicities of the corresponding irreducibles.

    Args:
      chi: a W-invariant T-character (b-free weights).
      positive_roots: positive roots of k_C on t (b-free weights).
      gram_t: Gram matrix of B* on t-coordinates (dominance test).

    Returns:
      Map highest weight -> virtual multiplicity.
    """
    num = chi
    for a in positive_roots:
        num = num * VirtualCharacter({Weight.zero(0, len(a.t)): 1, -a: -1})
    out = {}
    for w, m in num.items():
        if all(inner(gram_t, w, a) >= 0 for a in positive_roots):
            out[w] = m
    return out


def irreducible_character(hw: Weight, positive_roots: Sequence[Weight], gram_t,
                          W: WeylGroupData) -> VirtualCharacter:
    """Weyl character of the irreducible K-representation with highest weight hw.

    Computed by dividing the alternating sum by the Weyl denominator through
    dominant-weight recursion (Freudenthal-free; valid for the small ranks used
    here).
    """
    rho = Weight.zero(0, len(hw.t))
    for a in positive_roots:
        rho = rho + a.scale(Fraction(1, 2))

    def sign(g):
        # the alternating sign lives on the t-block only
        blk = [row[W.db:] for row in g[W.db:]]
        return round(float(np.linalg.det(np.array(blk, dtype=float))))

    alt = VirtualCharacter()
    for g in W.elements:
        alt = alt + VirtualCharacter({W.act(g, hw + rho) - rho: sign(g)})
    # divide alt by prod (1 - e^{-alpha}) by repeated geometric expansion
    q = alt
    for a in positive_roots:
        q = _divide_one_minus(q, a)
    return q


def _divide_one_minus(chi: VirtualCharacter, a: Weight) -> VirtualCharacter:
    """Exact quotient of chi by (1 - e^{-a}), assuming divisibility."""
    rem = Counter(chi.terms)
    out: Counter = Counter()
    guard = 0
    while any(rem.values()):
        guard += 1
        if guard > 10000:
            raise ValueError("character not divisible")
        # take a maximal weight in the direction of a
        top = max((w for w, m in rem.items() if m), key=lambda w: (_dot(w, a), w))
        m = rem[top]
        out[top] += m
        rem[top] -= m
        rem[top - a] += m
        rem = Counter({w: v for w, v in rem.items() if v})
    return VirtualCharacter(out)


def _dot(w: Weight, a: Weight) -> Fraction:
    return sum(x * y for x, y in zip(w.coords(), a.coords()))

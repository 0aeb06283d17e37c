"""Conjugacy-class files: schema v1 I/O, synthetic generation and word enumeration.

Schema v1 (JSON, canonical field order, two-space indent)::

    {
      "schema_version": 1,
      "model": "sl2c",
      "length_unit": "B",
      "records": [
        {"id": "c0001", "ell": 1.23, "a_part": [1.23], "angles": [0.5],
         "chi_orb": "1/2", "m_mult": 1, "n_mult": 1, "convention": null}
      ]
    }

Rationals are "p/q" strings, floats use the shortest round-trip repr.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import numpy as np

from friedlab.errors import (InvariantViolation, NonInvertibleGenerator, Overflow, ParseError,
                             SchemaVersionMismatch)
from friedlab.lie_characters import TorusElement
from friedlab.zeta_engine import ConjugacyClassRecord

SCHEMA_VERSION = 1
RECORD_FIELDS = ("id", "ell", "a_part", "angles", "chi_orb", "m_mult", "n_mult", "convention")
FRIED_CONVENTION = "fried-primitive"


@dataclass
class ClassFile:
    """Header plus records.

    Attributes:
      model: preset name the records refer to.
      records: the class records.
      length_unit: unit of lengths (the B-norm on b).
      schema_version: always 1 for files written here.
      notes: free-form strings (for instance a completeness disclaimer).
    """

    model: str
    records: list = field(default_factory=list)
    length_unit: str = "B"
    schema_version: int = SCHEMA_VERSION
    notes: list = field(default_factory=list)

    def validate(self, b_norm: float | None = None) -> "ClassFile":
        """Raises InvariantViolation on bad or duplicate records."""
        seen = set()
        for r in self.records:
            if r.id in seen:
                raise InvariantViolation(f"duplicate record id {r.id}")
            seen.add(r.id)
            r.validate(b_norm)
        return self


def _frac_str(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def record_to_dict(r: ConjugacyClassRecord) -> dict:
    return {
        "id": r.id,
        "ell": float(r.ell),
        "a_part": [float(a) for a in r.holonomy.a_part],
        "angles": [float(a) for a in r.holonomy.angles],
        "chi_orb": _frac_str(r.chi_orb),
        "m_mult": int(r.m_mult),
        "n_mult": int(r.n_mult),
        "convention": r.convention,
    }


def dumps(cf: ClassFile) -> str:
    """Canonical text form."""
    doc = {
        "schema_version": cf.schema_version,
        "model": cf.model,
        "length_unit": cf.length_unit,
        "notes": list(cf.notes),
        "records": [record_to_dict(r) for r in cf.records],
    }
    return json.dumps(doc, indent=2) + "\n"


def save_classes(cf: ClassFile, path) -> None:
    Path(path).write_text(dumps(cf))


def _record_line(text: str, index: int) -> int | None:
    count = -1
    for n, line in enumerate(text.splitlines(), 1):
        if line.strip().startswith('"id"'):
            count += 1
            if count == index:
                return n
    return None


def _parse_frac(v) -> Fraction:
    if isinstance(v, bool) or not isinstance(v, (str, int)):
        raise TypeError("rational must be a 'p/q' string or an integer")
    return Fraction(v)


def _parse_float(v) -> float:
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise TypeError("expected a number")
    return float(v)


def _parse_int(v) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise TypeError("expected an integer")
    return v


def _parse_record(d: dict) -> ConjugacyClassRecord:
    unknown = set(d) - set(RECORD_FIELDS)
    if unknown:
        raise KeyError(sorted(unknown)[0])
    fields = {}
    for name in ("id", "ell", "a_part", "angles", "chi_orb", "m_mult"):
        if name not in d:
            raise KeyError(name)
    if not isinstance(d["id"], str):
        raise ParseError("id must be a string", None, "id")
    out = {"id": d["id"]}
    parsers = {
        "ell": _parse_float,
        "a_part": lambda v: tuple(_parse_float(x) for x in _as_list(v)),
        "angles": lambda v: tuple(_parse_float(x) for x in _as_list(v)),
        "chi_orb": _parse_frac,
        "m_mult": _parse_int,
        "n_mult": _parse_int,
        "convention": lambda v: v if v is None or isinstance(v, str) else _bad("string"),
    }
    for name, p in parsers.items():
        if name in d:
            try:
                fields[name] = p(d[name])
            except (TypeError, ValueError, ZeroDivisionError) as err:
                raise ParseError(str(err), None, name) from err
    hol = TorusElement(fields.pop("a_part"), fields.pop("angles"))
    return ConjugacyClassRecord(out["id"], fields.pop("ell"), hol, **fields)


def _as_list(v):
    if not isinstance(v, list):
        raise TypeError("expected a list")
    return v


def _bad(kind: str):
    raise TypeError(f"expected {kind}")


def loads(text: str) -> ClassFile:
    """Parses and strictly validates a class file.

    Raises:
      ParseError: malformed JSON or field (with line and field name).
      SchemaVersionMismatch: unsupported schema version.
      InvariantViolation: a record violates its invariants.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(err.msg, err.lineno, None) from err
    if not isinstance(doc, dict):
        raise ParseError("top level must be an object", 1, None)
    ver = doc.get("schema_version")
    if ver != SCHEMA_VERSION:
        raise SchemaVersionMismatch(f"expected schema {SCHEMA_VERSION}, found {ver}")
    for key in ("model", "records"):
        if key not in doc:
            raise ParseError(f"missing {key}", None, key)
    if not isinstance(doc["records"], list):
        raise ParseError("records must be a list", None, "records")
    recs = []
    for i, d in enumerate(doc["records"]):
        line = _record_line(text, i)
        if not isinstance(d, dict):
            raise ParseError("record must be an object", line, None)
        try:
            rec = _parse_record(d)
        except KeyError as err:
            raise ParseError(f"missing or unknown field {err.args[0]}", line, err.args[0]) from err
        except ParseError as err:
            raise ParseError(err.msg, line, err.field) from err
        recs.append(rec)
    cf = ClassFile(doc["model"], recs, doc.get("length_unit", "B"), ver,
                   list(doc.get("notes", [])))
    return cf.validate()


def load_classes(path) -> ClassFile:
    return loads(Path(path).read_text())


# synthetic data ---------------------------------------------------------------

CHI_CHOICES = (Fraction(0), Fraction(1), Fraction(1, 2), Fraction(1, 3))


def synthesize_classes(seed: int, count: int, length_range: tuple[float, float] = (0.5, 4.0),
                       angle_dist: str = "uniform", model: str = "sl2c", dt: int = 1,
                       b_norm: float = 1.0, chi_choices: Sequence = CHI_CHOICES) -> ClassFile:
    """Deterministic random nonelliptic records.

    Args:
      angle_dist: 'uniform' on [-pi, pi), 'zero', or 'rational' (multiples of pi/6).
      b_norm: B-norm of the b basis vector, so that ell = a_part * b_norm.
    """
    if count < 0:
        raise ValueError("count must be nonnegative")
    rng = np.random.default_rng(seed)
    recs = []
    lo, hi = length_range
    for i in range(count):
        ell = float(rng.uniform(lo, hi))
        if angle_dist == "uniform":
            angles = tuple(float(x) for x in rng.uniform(-math.pi, math.pi, dt))
        elif angle_dist == "zero":
            angles = (0.0,) * dt
        elif angle_dist == "rational":
            angles = tuple(float(k) * math.pi / 6 for k in rng.integers(-6, 6, dt))
        else:
            raise ValueError(f"unknown angle distribution {angle_dist}")
        chi = Fraction(chi_choices[int(rng.integers(len(chi_choices)))])
        m = int(rng.integers(1, 3))
        hol = TorusElement((ell / b_norm,), angles)
        recs.append(ConjugacyClassRecord(f"c{i + 1:04d}", ell, hol, chi, m, 1))
    return ClassFile(model, recs).validate(b_norm)


# word enumeration --------------------------------------------------------------


class _Q2:
    """Exact Gaussian rationals as (re, im) pairs of Fractions, minimal arithmetic."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=Fraction(0)):
        self.re, self.im = Fraction(re), Fraction(im)

    def __add__(self, o):
        return _Q2(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return _Q2(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        return _Q2(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def __neg__(self):
        return _Q2(-self.re, -self.im)

    def __eq__(self, o):
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def inv(self):
        d = self.re * self.re + self.im * self.im
        return _Q2(self.re / d, -self.im / d)

    def is_zero(self):
        return self.re == 0 and self.im == 0

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))


def _q2(x) -> _Q2:
    if isinstance(x, _Q2):
        return x
    if isinstance(x, tuple):
        return _Q2(x[0], x[1])
    if isinstance(x, complex):
        return _Q2(Fraction(x.real), Fraction(x.imag))
    return _Q2(Fraction(x))


def _mm(a, b):
    return ((a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]),
            (a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]))


def _as_exact(g):
    rows = [list(r) for r in g]
    if len(rows) != 2 or any(len(r) != 2 for r in rows):
        raise ValueError("generators must be 2x2")
    return tuple(tuple(_q2(x) for x in r) for r in rows)


def _inverse(g):
    det = g[0][0] * g[1][1] - g[0][1] * g[1][0]
    if det.is_zero():
        raise NonInvertibleGenerator("singular generator")
    if not det == _Q2(1):
        raise NonInvertibleGenerator("generator is not unimodular")
    return ((g[1][1], -g[0][1]), (-g[1][0], g[0][0]))


def _canonical_trace(t: _Q2) -> _Q2:
    """Trace up to the sign ambiguity of PSL(2, C)."""
    if t.re < 0 or (t.re == 0 and t.im < 0):
        return -t
    return t


def reduced_words(n_gens: int, max_len: int, cap: int = 10 ** 6):
    """Reduced words as tuples of letters (i, +-1), shortest first.

    Raises:
      Overflow: if more than ``cap`` words would be produced.
    """
    for w, _ in _words_with_products(n_gens, max_len, cap, None):
        yield w


def _words_with_products(n_gens: int, max_len: int, cap: int, mats):
    letters = [(i, s) for i in range(n_gens) for s in (1, -1)]
    total = 0
    frontier = [((), None)]
    for _ in range(max_len):
        nxt = []
        for w, m in frontier:
            for l in letters:
                if w and w[-1] == (l[0], -l[1]):
                    continue
                prod = None
                if mats is not None:
                    g = mats[l]
                    prod = g if m is None else _mm(m, g)
                nxt.append((w + (l,), prod))
        total += len(nxt)
        if total > cap:
            raise Overflow(f"more than {cap} words")
        yield from nxt
        frontier = nxt


def _is_loxodromic(t: complex, tol: float = 1e-12) -> bool:
    return not (abs(t.imag) <= tol and -2 - tol <= t.real <= 2 + tol)


def _expanding_eigenvalue(t: complex) -> complex:
    d = cmath.sqrt(t * t - 4)
    lam = (t + d) / 2
    if abs(lam) < 1:
        lam = (t - d) / 2
    return lam


def _chebyshev_power_trace(tp: _Q2, k: int) -> _Q2:
    """tr(P^k) from tr(P) in SL(2): t_k = t t_{k-1} - t_{k-2}."""
    a, b = _Q2(2), tp
    for _ in range(k - 1):
        a, b = b, tp * b - a
    return b if k >= 1 else a


def enumerate_words(generators: Sequence, max_len: int = 6, b_norm: float = 1.0,
                    cap: int = 10 ** 6, model: str = "sl2c") -> ClassFile:
    """Loxodromic classes from reduced words in exact unimodular 2x2 generators.

    Records are deduplicated by trace up to sign, which identifies a class with
    its inverse (same length and holonomy). For eigenvalue lambda with
    |lambda| > 1: ell = 2 log|lambda|, a_part = ell / b_norm and the torus angle is
    arg(lambda), whose adjoint rotation angle is 2 arg(lambda). A class that is
    the k-th power of a found primitive class gets chi_orb = 1, m_mult = k.

    Raises:
      NonInvertibleGenerator: for singular or non-unimodular generators.
      Overflow: when the word count exceeds ``cap``.
    """
    gens = [_as_exact(g) for g in generators]
    invs = [_inverse(g) for g in gens]
    mats = {}
    for i, (g, gi) in enumerate(zip(gens, invs)):
        mats[(i, 1)], mats[(i, -1)] = g, gi
    traces: dict = {}
    for w, m in _words_with_products(len(gens), max_len, cap, mats):
        t = _canonical_trace(m[0][0] + m[1][1])
        tc = t.to_complex()
        if not _is_loxodromic(tc):
            continue
        traces.setdefault(t, w)
    items = sorted(traces.items(), key=lambda kv: abs(_expanding_eigenvalue(kv[0].to_complex())))
    recs = []
    tset = set(traces)
    powers = {}
    lam_min = min((abs(_expanding_eigenvalue(t.to_complex())) for t in tset), default=2.0)
    for t, _ in items:
        lam = _expanding_eigenvalue(t.to_complex())
        k_best = 1
        k_max = int(math.log(abs(lam)) / math.log(lam_min) + 1e-9)
        for k in range(2, k_max + 1):
            for j in range(k):
                mu = cmath.exp((cmath.log(lam) + 2j * math.pi * j) / k)
                guess = mu + 1 / mu
                for cand in tset:
                    c = cand.to_complex()
                    if abs(abs(c) - abs(guess)) > 1e-6 * max(1.0, abs(c)):
                        continue
                    if _canonical_trace(_chebyshev_power_trace(cand, k)) == t:
                        k_best = max(k_best, k)
        powers[t] = k_best
    for n, (t, w) in enumerate(items, 1):
        lam = _expanding_eigenvalue(t.to_complex())
        ell = 2 * math.log(abs(lam))
        hol = TorusElement((ell / b_norm,), (cmath.phase(lam),))
        recs.append(ConjugacyClassRecord(f"w{n:04d}", ell, hol, Fraction(1), powers[t], 1,
                                         FRIED_CONVENTION))
    notes = [f"completeness: only reduced words of length <= {max_len}; longer classes missing",
             "classes identified by trace up to sign (a class and its inverse are merged)"]
    return ClassFile(model, recs, notes=notes).validate(b_norm)

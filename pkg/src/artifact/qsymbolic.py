"""
Exact rational functions in powers of q.

Every monomial is ``coeff * q^(c0 + c1*s1 + c2*s2 + c3*nu1 + c4*nu2 + c5*nu3)``
with rational ``coeff`` and rational exponent coefficients.  Distinct affine
exponents give linearly independent monomials, so a polynomial is zero exactly
when all merged coefficients vanish and equality of rational functions can be
decided by cross-multiplication without any gcd computation.

Denominators produced by geometric sums are products of binomials
``1 - q^E``.  A :class:`QRational` remembers such a factorisation when it is
known, which keeps sums of many fractions and exact comparisons cheap.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

__all__ = [
    "SYMBOLS",
    "SpectralPoint",
    "ExponentForm",
    "QMonomial",
    "QPolynomial",
    "QRational",
    "PoleAtPoint",
    "zeta_factor",
    "geom_sum",
    "eval_numeric",
    "eq_exact",
    "dual_substitution",
]

SYMBOLS = ("s1", "s2", "nu1", "nu2", "nu3")


class PoleAtPoint(ArithmeticError):
    """Raised when a denominator vanishes at the evaluation point."""


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # floats are only accepted when they are exactly representable halves etc.
        return Fraction(x).limit_denominator(10**6)
    return Fraction(x)


@dataclass(frozen=True)
class SpectralPoint:
    """Complex values of the spectral parameters used for numeric evaluation.

    Only ``s1, s2, nu1, nu2, nu3`` enter exponent forms; ``lam``, ``lam1`` and
    ``lam2`` are carried for the transforms that need them.
    """

    s1: complex = 0.0
    s2: complex = 0.0
    nu1: complex = 0.0
    nu2: complex = 0.0
    nu3: complex = 0.0
    lam: complex = 0.0
    lam1: complex = 0.0
    lam2: complex = 0.0

    def symbols(self) -> tuple:
        return (self.s1, self.s2, self.nu1, self.nu2, self.nu3)

    def dual(self) -> "SpectralPoint":
        """Point with ``(s1, s2)`` replaced by ``((s2-s1)/2, (3 s1 + s2)/2)``."""
        s1, s2 = self.s1, self.s2
        return SpectralPoint((s2 - s1) / 2, (3 * s1 + s2) / 2, self.nu1, self.nu2,
                             self.nu3, self.lam, self.lam1, self.lam2)

    def as_dict(self) -> dict:
        return {k: complex(getattr(self, k)) for k in
                ("s1", "s2", "nu1", "nu2", "nu3", "lam", "lam1", "lam2")}


class ExponentForm:
    """Affine form ``c0 + c1*s1 + c2*s2 + c3*nu1 + c4*nu2 + c5*nu3`` over Q.

    Parameters
    ----------
    c0 : rational
        Constant term.
    c : sequence of 5 rationals, optional
        Coefficients of ``(s1, s2, nu1, nu2, nu3)``.

    Examples
    --------
    >>> ExponentForm.of(2, s1=3, s2=1)
    ExponentForm(2 + 3*s1 + s2)
    """

    __slots__ = ("_key", "_hash")

    def __init__(self, c0=0, c: Iterable = (0, 0, 0, 0, 0)):
        c = tuple(_frac(x) for x in c)
        if len(c) != 5:
            raise ValueError("an exponent form needs exactly five coefficients")
        self._key = (_frac(c0),) + c
        self._hash = hash(self._key)

    @classmethod
    def of(cls, c0=0, **coeffs) -> "ExponentForm":
        unknown = set(coeffs) - set(SYMBOLS)
        if unknown:
            raise KeyError(f"unknown symbols {sorted(unknown)}")
        return cls(c0, [coeffs.get(name, 0) for name in SYMBOLS])

    @classmethod
    def _from_key(cls, key: tuple) -> "ExponentForm":
        obj = cls.__new__(cls)
        obj._key = key
        obj._hash = hash(key)
        return obj

    @property
    def c0(self) -> Fraction:
        return self._key[0]

    @property
    def c(self) -> tuple:
        return self._key[1:]

    @property
    def key(self) -> tuple:
        return self._key

    def is_zero(self) -> bool:
        return not any(self._key)

    def __eq__(self, other) -> bool:
        return isinstance(other, ExponentForm) and self._key == other._key

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "ExponentForm") -> bool:
        return self._key < other._key

    def __add__(self, other: "ExponentForm") -> "ExponentForm":
        return ExponentForm._from_key(tuple(a + b for a, b in zip(self._key, other._key)))

    def __sub__(self, other: "ExponentForm") -> "ExponentForm":
        return ExponentForm._from_key(tuple(a - b for a, b in zip(self._key, other._key)))

    def __neg__(self) -> "ExponentForm":
        return ExponentForm._from_key(tuple(-a for a in self._key))

    def __mul__(self, k) -> "ExponentForm":
        k = _frac(k)
        return ExponentForm._from_key(tuple(k * a for a in self._key))

    __rmul__ = __mul__

    def value(self, pt: SpectralPoint) -> complex:
        """Numeric value of the form at ``pt``."""
        return complex(self.c0) + sum(float(ci) * x for ci, x in zip(self.c, pt.symbols()) if ci)

    def substitute(self, images: Mapping[str, "ExponentForm"]) -> "ExponentForm":
        """Replace symbols by affine forms; unmapped symbols are kept."""
        out = ExponentForm(self.c0)
        for ci, name in zip(self.c, SYMBOLS):
            if ci:
                img = images.get(name)
                if img is None:
                    img = ExponentForm.of(**{name: 1})
                out = out + img * ci
        return out

    def __str__(self) -> str:
        parts = [_fmt_frac(self.c0)]
        for ci, name in zip(self.c, SYMBOLS):
            if ci:
                parts.append(f"{_fmt_frac(ci)}*{name}")
        return " + ".join(parts)

    def pretty(self) -> str:
        out = []
        if self.c0 or not any(self.c):
            out.append(_fmt_frac(self.c0))
        for ci, name in zip(self.c, SYMBOLS):
            if not ci:
                continue
            mag = abs(ci)
            body = name if mag == 1 else f"{_fmt_frac(mag)}*{name}"
            if not out:
                out.append(body if ci > 0 else "-" + body)
            else:
                out.append(("+ " if ci > 0 else "- ") + body)
        return " ".join(out)

    def __repr__(self) -> str:
        return f"ExponentForm({self.pretty()})"


def _fmt_frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


ZERO_FORM = ExponentForm()


@dataclass(frozen=True)
class QMonomial:
    """``coeff * q^expo`` with an exact rational coefficient."""

    coeff: Fraction
    expo: ExponentForm

    def __str__(self) -> str:
        return f"{_fmt_frac(self.coeff)} * q^({self.expo})"


class QPolynomial:
    """Finite sum of :class:`QMonomial` in canonical form.

    Like exponents are merged, zero coefficients dropped and the remaining
    terms are ordered lexicographically on ``(c0, c)``.  Two canonical
    polynomials are equal iff their term lists agree.
    """

    __slots__ = ("_terms", "_tuple")

    def __init__(self, terms: Mapping[tuple, Fraction] | Iterable[QMonomial] = ()):
        acc: dict = {}
        if isinstance(terms, Mapping):
            for k, v in terms.items():
                if v:
                    acc[k] = acc.get(k, 0) + v
        else:
            for m in terms:
                k = m.expo.key
                acc[k] = acc.get(k, 0) + _frac(m.coeff)
        self._terms = {k: v for k, v in acc.items() if v}
        self._tuple = None

    @classmethod
    def _raw(cls, terms: dict) -> "QPolynomial":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._tuple = None
        return obj

    @classmethod
    def constant(cls, c=1) -> "QPolynomial":
        c = _frac(c)
        return cls._raw({ZERO_FORM.key: c} if c else {})

    @classmethod
    def monomial(cls, expo: ExponentForm, coeff=1) -> "QPolynomial":
        coeff = _frac(coeff)
        return cls._raw({expo.key: coeff} if coeff else {})

    @property
    def terms(self) -> tuple:
        if self._tuple is None:
            self._tuple = tuple(QMonomial(self._terms[k], ExponentForm._from_key(k))
                                for k in sorted(self._terms))
        return self._tuple

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, QPolynomial):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __add__(self, other: "QPolynomial") -> "QPolynomial":
        acc = dict(self._terms)
        for k, v in other._terms.items():
            w = acc.get(k, 0) + v
            if w:
                acc[k] = w
            else:
                acc.pop(k, None)
        return QPolynomial._raw(acc)

    def __neg__(self) -> "QPolynomial":
        return QPolynomial._raw({k: -v for k, v in self._terms.items()})

    def __sub__(self, other: "QPolynomial") -> "QPolynomial":
        return self + (-other)

    def __mul__(self, other) -> "QPolynomial":
        if not isinstance(other, QPolynomial):
            c = _frac(other)
            return QPolynomial._raw({k: v * c for k, v in self._terms.items()} if c else {})
        acc: dict = {}
        for ka, va in self._terms.items():
            for kb, vb in other._terms.items():
                k = tuple(x + y for x, y in zip(ka, kb))
                w = acc.get(k, 0) + va * vb
                if w:
                    acc[k] = w
                else:
                    acc.pop(k, None)
        return QPolynomial._raw(acc)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "QPolynomial":
        if n < 0:
            raise ValueError("negative powers of a polynomial are not polynomials")
        out = QPolynomial.constant(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def shift(self, expo: ExponentForm) -> "QPolynomial":
        """Multiply by ``q^expo``."""
        e = expo.key
        return QPolynomial._raw({tuple(x + y for x, y in zip(k, e)): v
                                 for k, v in self._terms.items()})

    def substitute(self, images: Mapping[str, ExponentForm]) -> "QPolynomial":
        return QPolynomial([QMonomial(m.coeff, m.expo.substitute(images)) for m in self.terms])

    def evaluate(self, q: float, pt: SpectralPoint) -> tuple:
        """Return ``(value, scale)`` where scale is the sum of term magnitudes."""
        logq = math.log(q)
        val = 0j
        scale = 0.0
        xs = pt.symbols()
        for k, v in self._terms.items():
            e = complex(k[0]) + sum(float(ci) * x for ci, x in zip(k[1:], xs) if ci)
            t = float(v) * cmath.exp(logq * e)
            val += t
            scale += abs(t)
        return val, scale

    def __str__(self) -> str:
        if not self._terms:
            return "0"
        return " + ".join(str(m) for m in self.terms)

    def __repr__(self) -> str:
        return f"QPolynomial({self})"


ONE = QPolynomial.constant(1)


def _binomial(e: ExponentForm) -> QPolynomial:
    """The polynomial ``1 - q^e``."""
    return QPolynomial._raw({ZERO_FORM.key: Fraction(1), e.key: Fraction(-1)}) if not e.is_zero() \
        else QPolynomial._raw({})


class QRational:
    """Quotient ``num / den`` of q-polynomials.

    Parameters
    ----------
    num, den : QPolynomial
        Numerator and nonzero denominator.

    Notes
    -----
    Instances built from binomial factors keep a factorised denominator
    ``prod (1 - q^E)^m``; :attr:`den` expands it on demand.  Arithmetic never
    cancels common factors except identical binomials, and :func:`eq_exact`
    compares by cross-multiplication.
    """

    __slots__ = ("num", "_den", "_factors")

    def __init__(self, num: QPolynomial, den: QPolynomial | None = None, *,
                 factors: Counter | None = None):
        if den is None and factors is None:
            den = ONE
        if den is not None and den.is_zero():
            raise ZeroDivisionError("denominator is the zero polynomial")
        self.num = num
        self._den = den
        self._factors = None if factors is None else Counter({k: v for k, v in factors.items() if v})

    # -- constructors -----------------------------------------------------
    @classmethod
    def const(cls, c) -> "QRational":
        return cls(QPolynomial.constant(c), factors=Counter())

    @classmethod
    def power(cls, e: ExponentForm, coeff=1) -> "QRational":
        """``coeff * q^e``."""
        return cls(QPolynomial.monomial(e, coeff), factors=Counter())

    @classmethod
    def inverse_binomial(cls, e: ExponentForm) -> "QRational":
        """``1 / (1 - q^e)``."""
        if e.is_zero():
            raise ZeroDivisionError("1 - q^0 vanishes identically")
        num, base = _normalise_binomial(e)
        return cls(num, factors=Counter({base: 1}))

    # -- structure --------------------------------------------------------
    @property
    def den(self) -> QPolynomial:
        if self._den is None:
            d = ONE
            for e, m in sorted(self._factors.items()):
                d = d * _binomial(e) ** m
            self._den = d
        return self._den

    @property
    def factored(self) -> bool:
        return self._factors is not None

    def _common(self, other: "QRational"):
        """Bring two factored fractions to a common denominator."""
        lcm = self._factors | other._factors
        a = self.num * _expand(lcm - self._factors)
        b = other.num * _expand(lcm - other._factors)
        return a, b, lcm

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other) -> "QRational":
        other = _lift(other)
        if self.factored and other.factored:
            a, b, lcm = self._common(other)
            return QRational(a + b, factors=lcm)
        return QRational(self.num * other.den + other.num * self.den, self.den * other.den)

    __radd__ = __add__

    def __neg__(self) -> "QRational":
        return QRational(-self.num, self._den, factors=self._factors)

    def __sub__(self, other) -> "QRational":
        return self + (-_lift(other))

    def __rsub__(self, other) -> "QRational":
        return _lift(other) - self

    def __mul__(self, other) -> "QRational":
        other = _lift(other)
        if self.factored and other.factored:
            return QRational(self.num * other.num, factors=self._factors + other._factors)
        return QRational(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "QRational":
        other = _lift(other)
        if other.num.is_zero():
            raise ZeroDivisionError("division by the zero rational function")
        # dividing by a product of binomials over a monomial keeps the factorisation
        if self.factored and other.factored and len(other.num) == 1 and not other._factors:
            m = other.num.terms[0]
            return QRational(self.num.shift(-m.expo) * (1 / m.coeff), factors=self._factors)
        if self.factored and other.factored and len(other.num) == 1:
            m = other.num.terms[0]
            num = self.num.shift(-m.expo) * (1 / m.coeff) * _expand(other._factors)
            return QRational(num, factors=self._factors)
        return QRational(self.num * other.den, self.den * other.num)

    def __rtruediv__(self, other) -> "QRational":
        return _lift(other) / self

    def __pow__(self, n: int) -> "QRational":
        if n < 0:
            return QRational.const(1) / (self ** (-n))
        out = QRational.const(1)
        for _ in range(n):
            out = out * self
        return out

    def substitute(self, images: Mapping[str, ExponentForm]) -> "QRational":
        """Apply a linear change of the spectral symbols."""
        out = QRational(self.num.substitute(images), factors=Counter())
        if self.factored:
            for e, m in self._factors.items():
                for _ in range(m):
                    out = out * QRational.inverse_binomial(e.substitute(images))
            return out
        return QRational(self.num.substitute(images), self.den.substitute(images))

    def evaluate(self, q: float, pt: SpectralPoint) -> complex:
        return eval_numeric(self, q, pt)

    def to_text(self) -> str:
        """Canonical text ``num / den``."""
        return f"{self.num} / {self.den}"

    def __str__(self) -> str:
        return self.to_text()

    def __repr__(self) -> str:
        return f"QRational({self.to_text()})"


def _normalise_binomial(e: ExponentForm):
    """Write ``1/(1-q^e)`` as ``num/(1-q^base)`` with a canonical ``base``.

    ``1 - q^e`` and ``1 - q^{-e}`` differ by the unit ``-q^{-e}``; the base is
    the larger of ``e`` and ``-e`` so both spellings share one factor.
    """
    ne = -e
    if e.key >= ne.key:
        return ONE, e
    # 1/(1 - q^e) = -q^{-e} / (1 - q^{-e})
    return QPolynomial.monomial(ne, -1), ne


def _expand(factors: Counter) -> QPolynomial:
    out = ONE
    for e, m in sorted(factors.items()):
        for _ in range(m):
            out = out * _binomial(e)
    return out


def _lift(x) -> QRational:
    if isinstance(x, QRational):
        return x
    if isinstance(x, QPolynomial):
        return QRational(x, factors=Counter())
    return QRational.const(x)


def dual_substitution() -> dict:
    """Images of ``(s1, s2)`` under ``s -> ((s2 - s1)/2, (3 s1 + s2)/2)``."""
    half = Fraction(1, 2)
    return {"s1": ExponentForm.of(0, s1=-half, s2=half),
            "s2": ExponentForm.of(0, s1=3 * half, s2=half)}


# -- public operations -------------------------------------------------------

def zeta_factor(e: ExponentForm) -> QRational:
    """Local zeta factor ``1 / (1 - q^{-e})``.

    Parameters
    ----------
    e : ExponentForm
        Argument of the zeta factor.

    Returns
    -------
    QRational
    """
    return QRational.inverse_binomial(-e)


def geom_sum(e: ExponentForm, a: int) -> QRational:
    """Closed form ``q^{a e} / (1 - q^e)`` of ``sum_{k >= a} q^{k e}``.

    The caller is responsible for ``Re(e) < 0`` at evaluation points.
    """
    return QRational.power(e * a) * QRational.inverse_binomial(e)


def eval_numeric(f: QRational, q: float, pt: SpectralPoint) -> complex:
    """Evaluate ``f`` at residue size ``q`` and spectral point ``pt``.

    Raises
    ------
    PoleAtPoint
        If the denominator vanishes relative to the size of the numerator.
    """
    num, nscale = f.num.evaluate(q, pt)
    if f.factored:
        den = 1.0 + 0j
        dscale = 1.0
        logq = math.log(q)
        for e, m in f._factors.items():
            x = cmath.exp(logq * e.value(pt))
            b = 1.0 - x
            den *= b ** m
            dscale *= (1.0 + abs(x)) ** m
    else:
        den, dscale = f.den.evaluate(q, pt)
    if abs(den) < 1e-12 * dscale:
        raise PoleAtPoint(f"denominator vanishes at q={q}, {pt}")
    return num / den


def eq_exact(a: QRational, b: QRational) -> bool:
    """Exact equality of rational functions by cross-multiplication."""
    a, b = _lift(a), _lift(b)
    if a.factored and b.factored:
        x, y, _ = a._common(b)
        return (x - y).is_zero()
    return (a.num * b.den - b.num * a.den).is_zero()

"""
Exact evaluation of nested geometric sums over integer polyhedra.

A :class:`LatticeSum` describes

    sum over integer points (x_1, ..., x_k) of  coeff * q^(E0 + x_1 E_1 + ... + x_k E_k)

where each ``x_i`` has affine lower and upper bounds in the outer indices
(the upper bound may be infinite) and the summation region may be cut by
further affine inequalities.  The closed form is obtained by eliminating the
innermost index with

    sum_{x=L}^{U} y^x = (y^L - y^{U+1}) / (1 - y),

after splitting the region wherever several bounds compete.  A direct
truncated loop over the same region is provided as an independent check.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .qsymbolic import ExponentForm, QRational, SpectralPoint, ZERO_FORM

__all__ = ["Lin", "LatticeSum", "UnsupportedRegion"]


class UnsupportedRegion(ValueError):
    """The region cannot be eliminated with unit-coefficient bounds."""


class Lin:
    """Affine integer form ``const + sum coef[x] * x`` in index variables."""

    __slots__ = ("const", "coef")

    def __init__(self, const: int = 0, coef: Mapping[str, int] | None = None):
        self.const = int(const)
        self.coef = {k: int(v) for k, v in (coef or {}).items() if v}

    @classmethod
    def var(cls, name: str) -> "Lin":
        return cls(0, {name: 1})

    @staticmethod
    def lift(x) -> "Lin":
        return x if isinstance(x, Lin) else Lin(int(x))

    def __add__(self, other) -> "Lin":
        other = Lin.lift(other)
        coef = dict(self.coef)
        for k, v in other.coef.items():
            coef[k] = coef.get(k, 0) + v
        return Lin(self.const + other.const, coef)

    __radd__ = __add__

    def __neg__(self) -> "Lin":
        return Lin(-self.const, {k: -v for k, v in self.coef.items()})

    def __sub__(self, other) -> "Lin":
        return self + (-Lin.lift(other))

    def __rsub__(self, other) -> "Lin":
        return Lin.lift(other) - self

    def __mul__(self, k: int) -> "Lin":
        return Lin(self.const * k, {n: v * k for n, v in self.coef.items()})

    __rmul__ = __mul__

    def key(self) -> tuple:
        return (self.const, tuple(sorted(self.coef.items())))

    def __eq__(self, other) -> bool:
        return isinstance(other, Lin) and self.key() == other.key()

    def __hash__(self) -> int:
        return hash(self.key())

    def without(self, name: str) -> "Lin":
        return Lin(self.const, {k: v for k, v in self.coef.items() if k != name})

    def at(self, env: Mapping[str, int]) -> int:
        return self.const + sum(v * env[k] for k, v in self.coef.items())

    def __repr__(self) -> str:
        parts = [str(self.const)] + [f"{v}*{k}" for k, v in sorted(self.coef.items())]
        return "Lin(" + " + ".join(parts) + ")"


@dataclass
class _Term:
    coeff: QRational
    e0: ExponentForm
    ev: dict
    where: list


@dataclass
class _Piece:
    order: tuple
    lower: dict
    upper: dict
    cons: list
    coeff: QRational
    e0: ExponentForm
    ev: dict


class LatticeSum:
    """A finite combination of geometric series over one integer region.

    Parameters
    ----------
    order : sequence of str
        Index names from outermost to innermost.

    Examples
    --------
    >>> i, j = Lin.var("i"), Lin.var("j")
    >>> S = LatticeSum(["i", "j"])
    >>> S.bound("i", 0); S.bound("j", 0, i)
    >>> S.term(i=ExponentForm(-1), j=ExponentForm(-1))
    """

    def __init__(self, order: Sequence[str]):
        self.order = tuple(order)
        self.lower: dict = {v: [] for v in self.order}
        self.upper: dict = {v: [] for v in self.order}
        self.cons: list = []
        self.terms: list = []

    # -- construction ------------------------------------------------------
    def bound(self, name: str, lo, hi=None) -> "LatticeSum":
        """Add ``lo <= name`` and, if given, ``name <= hi``."""
        self.lower[name].append(Lin.lift(lo))
        if hi is not None:
            self.upper[name].append(Lin.lift(hi))
        return self

    def require(self, g: Lin) -> "LatticeSum":
        """Restrict the region to ``g >= 0``."""
        self.cons.append(Lin.lift(g))
        return self

    def term(self, coeff: QRational | None = None, const: ExponentForm = ZERO_FORM,
             where: Iterable[Lin] = (), **ev: ExponentForm) -> "LatticeSum":
        """Add ``coeff * q^(const + sum idx * ev[idx])`` on the region cut by ``where``."""
        unknown = set(ev) - set(self.order)
        if unknown:
            raise KeyError(f"unknown indices {sorted(unknown)}")
        coeff = QRational.const(1) if coeff is None else coeff
        self.terms.append(_Term(coeff, const, dict(ev), [Lin.lift(g) for g in where]))
        return self

    # -- exact evaluation --------------------------------------------------
    def closed_form(self) -> QRational:
        """Exact value as a rational function of q-powers."""
        total = QRational.const(0)
        for t in self.terms:
            piece = _Piece(self.order,
                           {v: list(b) for v, b in self.lower.items()},
                           {v: list(b) for v, b in self.upper.items()},
                           list(self.cons) + list(t.where), t.coeff, t.e0, dict(t.ev))
            for c in _eliminate(piece):
                total = total + c
        return total

    # -- brute-force evaluation -------------------------------------------
    def brute(self, q: float, pt: SpectralPoint, N: int) -> complex:
        """Direct sum, unbounded indices truncated at ``lower + N``.

        Intended as an oracle for :meth:`closed_form`; the truncation error
        is controlled by the caller through the choice of ``pt`` and ``N``.
        """
        logq = math.log(q)
        total = 0j
        for t in self.terms:
            c = t.coeff.evaluate(q, pt)
            base = logq * t.e0.value(pt)
            steps = {v: logq * t.ev[v].value(pt) if v in t.ev else 0.0 for v in self.order}
            cons = list(self.cons) + list(t.where)
            total += c * _brute_rec(self.order, 0, {}, self.lower, self.upper, cons,
                                    base, steps, N)
        return total


def _brute_rec(order, depth, env, lower, upper, cons, acc, steps, N) -> complex:
    if depth == len(order):
        for g in cons:
            if g.at(env) < 0:
                return 0j
        return cmath.exp(acc)
    v = order[depth]
    lo = max(b.at(env) for b in lower[v])
    hi = min(b.at(env) for b in upper[v]) if upper[v] else lo + N
    out = 0j
    st = steps[v]
    for x in range(lo, hi + 1):
        env[v] = x
        out += _brute_rec(order, depth + 1, env, lower, upper, cons, acc + x * st, steps, N)
    env.pop(v, None)
    return out


def _eliminate(root: _Piece) -> list:
    out = []
    stack = [root]
    while stack:
        p = stack.pop()
        cons = []
        dead = False
        for g in p.cons:
            if not g.coef:
                if g.const < 0:
                    dead = True
                    break
                continue
            if g not in cons:
                cons.append(g)
        if dead:
            continue
        p.cons = cons
        if not p.order:
            out.append(p.coeff * QRational.power(p.e0))
            continue
        v = p.order[-1]
        lowers = list(p.lower[v])
        uppers = list(p.upper[v])
        rest = []
        for g in p.cons:
            a = g.coef.get(v, 0)
            if a == 0:
                rest.append(g)
            elif a == 1:
                lowers.append(-(g.without(v)))
            elif a == -1:
                uppers.append(g.without(v))
            else:
                raise UnsupportedRegion(f"coefficient {a} on {v} in {g}")
        lowers = _prune(lowers, keep_max=True)
        uppers = _prune(uppers, keep_max=False)
        if len(lowers) > 1 or len(uppers) > 1:
            stack.extend(_split(p, v, lowers, uppers, rest))
            continue
        L = lowers[0]
        U = uppers[0] if uppers else None
        E = p.ev.get(v, ZERO_FORM)
        order = p.order[:-1]
        lower = {k: b for k, b in p.lower.items() if k != v}
        upper = {k: b for k, b in p.upper.items() if k != v}
        ev = {k: e for k, e in p.ev.items() if k != v}
        if E.is_zero():
            if U is None:
                raise UnsupportedRegion(f"divergent constant series in {v}")
            span = U - L
            if span.coef:
                raise UnsupportedRegion(f"polynomial count in {v}")
            if span.const >= 0:
                stack.append(_Piece(order, lower, upper, rest, p.coeff * (span.const + 1),
                                    p.e0, ev))
            continue
        inv = QRational.inverse_binomial(E)
        stack.append(_Piece(order, lower, upper,
                            rest + ([U - L] if U is not None else []),
                            p.coeff * inv, *_shift(p.e0, ev, L, E)))
        if U is not None:
            stack.append(_Piece(order, lower, upper, rest + [U - L],
                                -(p.coeff * inv), *_shift(p.e0, ev, U + 1, E)))
    return out


def _shift(e0: ExponentForm, ev: dict, b: Lin, E: ExponentForm):
    """Substitute the index value ``b`` (affine in outer indices) into ``q^{x E}``."""
    e0 = e0 + E * b.const
    ev = dict(ev)
    for k, c in b.coef.items():
        ev[k] = ev.get(k, ZERO_FORM) + E * c
    return e0, ev


def _prune(bounds: list, keep_max: bool) -> list:
    """Drop duplicates and bounds dominated by a constant offset."""
    kept: list = []
    for b in bounds:
        replaced = False
        skip = False
        for idx, k in enumerate(kept):
            diff = b - k
            if not diff.coef:
                better = diff.const > 0 if keep_max else diff.const < 0
                if better:
                    kept[idx] = b
                    replaced = True
                else:
                    skip = True
                break
        if not replaced and not skip:
            kept.append(b)
    return kept


def _split(p: _Piece, v: str, lowers: list, uppers: list, rest: list) -> list:
    """Partition the region so that a single lower and upper bound is active."""
    pieces = []
    low_cases = _dominance_cases(lowers, keep_max=True)
    up_cases = _dominance_cases(uppers, keep_max=False) if uppers else [(None, [])]
    for lb, lc in low_cases:
        for ub, uc in up_cases:
            lower = dict(p.lower)
            upper = dict(p.upper)
            lower[v] = [lb]
            upper[v] = [ub] if ub is not None else []
            pieces.append(_Piece(p.order, lower, upper, rest + lc + uc, p.coeff, p.e0, p.ev))
    return pieces


def _dominance_cases(bounds: list, keep_max: bool) -> list:
    cases = []
    for k, bk in enumerate(bounds):
        cons = []
        for m, bm in enumerate(bounds):
            if m == k:
                continue
            g = bk - bm if keep_max else bm - bk
            # ties go to the earliest bound
            cons.append(g - 1 if m < k else g)
        cases.append((bk, cons))
    return cases

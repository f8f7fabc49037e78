"""
Non-archimedean local quantities.

Schur and Casselman-Shalika values for unramified GL(3), Hecke eigenvalues
and oldform coefficients for GL(2), Gauss sums of characters mod p^r, the
explicit local integrals attached to the degenerate and generic terms of the
fourth-moment expansion, the Type I and Type II local weights, and the
coefficients of the newform sieve.

Conventions
-----------
* ``SatakeGL3.alpha`` are the Satake parameters ``q^{nu_i}`` with product 1.
* ``schur(i, j, a)`` is ``s_{(i+j, j, 0)}(alpha)`` and stands for
  ``lambda_pi(p^{i+j}, p^j)``.
* Inside the Type II and sieve lattice sums the symbol
  ``lambda_pi(p^a, p^b)`` is read as the Whittaker value on
  ``diag(p^{a+b}, p^b, 1)``, i.e. ``schur(a, b)``.
* ``SatakeGL2`` carries the conductor exponent ``r_sigma``; 0 is spherical,
  1 is Steinberg and ``>= 2`` has vanishing Hecke eigenvalues.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .geosum import LatticeSum, Lin
from .qsymbolic import (ExponentForm, QRational, SpectralPoint, dual_substitution,
                        eval_numeric, zeta_factor, PoleAtPoint)

__all__ = [
    "DomainError", "TruncationInsufficient", "NotPrimitive", "SingularSystem",
    "LocalDatum", "SatakeGL3", "SatakeGL2", "CharacterTable", "TruncationSpec",
    "CertifiedValue",
    "schur", "schur_bialternant", "cs_gl3", "hecke_gl2", "sigma_hecke", "atkin_lehner_xi",
    "hm_poly", "p_poly", "n_factor", "n_factor_exact", "gen_double_sum", "gen_double_sum_closed",
    "gauss_sum", "gauss_norm_exact", "dirichlet_characters", "primitive_root",
    "typeI_dual_weight", "typeII_spec_weight", "typeII_dual_weight",
    "whittaker_norm_gl2", "vol_k0",
    "L_pi", "L_pi_tilde", "L_pi_sigma", "L_sigma", "L_sigma_ad", "w0_gl3",
    "degen_lattice", "degen_exact", "degen_nonarch", "degen_unramified_product",
    "gen_nonarch", "sieve_c", "sieve_a", "SieveCoefficients",
]


class DomainError(ValueError):
    """Input outside the region where a formula is stated."""


class TruncationInsufficient(ArithmeticError):
    """The certified tail of a truncated series exceeds the tolerance."""


class NotPrimitive(ValueError):
    """A character does not have the full conductor of its table."""


class SingularSystem(ArithmeticError):
    """A triangular system has a vanishing diagonal entry."""


# ---------------------------------------------------------------------------
# data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LocalDatum:
    """Numerical data of a finite place.

    Parameters
    ----------
    q : int
        Residue field size.
    d : int
        Different exponent.
    r : int
        Level exponent.
    n : int
        Twist exponent.
    ell : int
        Summation index, ``0 <= ell <= n``.
    """

    q: int
    d: int = 0
    r: int = 0
    n: int = 0
    ell: int = 0

    def __post_init__(self):
        if self.q < 2:
            raise DomainError("q must be at least 2")
        if min(self.d, self.r, self.n, self.ell) < 0:
            raise DomainError("exponents must be nonnegative")
        if self.ell > self.n:
            raise DomainError("ell must not exceed n")


@dataclass(frozen=True)
class SatakeGL3:
    """Satake parameters ``(alpha_1, alpha_2, alpha_3)`` with product 1."""

    alpha: tuple

    def __post_init__(self):
        a = tuple(complex(x) for x in self.alpha)
        if len(a) != 3:
            raise DomainError("three Satake parameters are required")
        if abs(a[0] * a[1] * a[2] - 1) > 1e-12:
            raise DomainError("Satake parameters must have product 1")
        object.__setattr__(self, "alpha", a)

    @classmethod
    def from_nu(cls, nu: Sequence[complex], q: float) -> "SatakeGL3":
        """Parameters ``q^{nu_i}``; ``nu`` must sum to zero."""
        nu = [complex(x) for x in nu]
        s = sum(nu)
        if abs(s) > 1e-12:
            raise DomainError("nu must sum to zero")
        a = [cmath.exp(math.log(q) * x) for x in nu]
        # absorb rounding into the last entry so the product is exactly 1
        a[2] = 1 / (a[0] * a[1])
        return cls(tuple(a))

    def e1(self) -> complex:
        return sum(self.alpha)

    def e2(self) -> complex:
        a1, a2, a3 = self.alpha
        return a1 * a2 + a1 * a3 + a2 * a3

    def inverse(self) -> "SatakeGL3":
        """Parameters of the contragredient."""
        a1, a2, a3 = self.alpha
        return SatakeGL3((1 / a1, 1 / a2, a1 * a2))

    def theta(self, q: float) -> float:
        """Departure from temperedness, ``max |log_q |alpha_i||``."""
        return max(abs(math.log(abs(x))) for x in self.alpha) / math.log(q)


@dataclass(frozen=True)
class SatakeGL2:
    """GL(2) local data: ``beta`` (pair ``beta, 1/beta``) and conductor exponent."""

    beta: complex = 1.0
    r_sigma: int = 0

    def __post_init__(self):
        if self.beta == 0:
            raise DomainError("beta must be nonzero")
        if self.r_sigma < 0:
            raise DomainError("conductor exponent must be nonnegative")
        object.__setattr__(self, "beta", complex(self.beta))

    def tempered(self) -> bool:
        return self.r_sigma > 0 or abs(abs(self.beta) - 1) < 1e-12

    def theta(self, q: float) -> float:
        if self.r_sigma:
            return 0.0
        return abs(math.log(abs(self.beta))) / math.log(q)


@dataclass(frozen=True)
class TruncationSpec:
    """Index cutoff ``N`` for infinite sums and the admissible tail."""

    N: int = 60
    tail_tol: float = 1e-12

    def __post_init__(self):
        if self.N < 1 or self.tail_tol <= 0:
            raise DomainError("need N >= 1 and tail_tol > 0")


@dataclass(frozen=True)
class CertifiedValue:
    """A truncated sum together with its certified tail bound."""

    value: complex
    tail_bound: float
    N: int

    def __complex__(self) -> complex:
        return complex(self.value)


# ---------------------------------------------------------------------------
# Schur polynomials and Hecke data
# ---------------------------------------------------------------------------

def _complete_homogeneous(alpha: Sequence[complex], top: int) -> list:
    """``h_0..h_top`` of ``alpha`` by the division-free variable-by-variable recursion."""
    h = [1.0 + 0j] + [0j] * top
    for x in alpha:
        # multiply the generating series by 1/(1 - x t)
        for m in range(1, top + 1):
            h[m] = h[m] + x * h[m - 1]
    return h


def schur(i: int, j: int, a: SatakeGL3) -> complex:
    """Schur polynomial ``s_{(i+j, j, 0)}(alpha)``.

    Uses the Jacobi-Trudi determinant
    ``h_{i+j} h_j - h_{i+j+1} h_{j-1}``, which needs no division and is
    valid for coincident parameters.

    Examples
    --------
    >>> schur(1, 0, SatakeGL3((1, 1, 1)))
    (3+0j)
    """
    if i < 0 or j < 0:
        return 0j
    h = _complete_homogeneous(a.alpha, i + j + 1)
    return h[i + j] * h[j] - (h[i + j + 1] * h[j - 1] if j >= 1 else 0)


def schur_bialternant(i: int, j: int, a: SatakeGL3) -> complex:
    """``s_{(i+j, j, 0)}`` as a ratio of alternants (distinct parameters only)."""
    lam = (i + j, j, 0)
    x = a.alpha
    num = np.array([[x[c] ** (lam[r] + 2 - r) for c in range(3)] for r in range(3)])
    den = np.array([[x[c] ** (2 - r) for c in range(3)] for r in range(3)])
    return complex(np.linalg.det(num) / np.linalg.det(den))


def cs_gl3(i: int, j: int, a: SatakeGL3, q: int) -> complex:
    """Spherical Whittaker value ``q^{-i-j} lambda_pi(p^{i+j}, p^j)``."""
    if i < 0 or j < 0:
        return 0j
    return q ** (-(i + j)) * schur(i, j, a)


def hecke_gl2(ell: int, b: SatakeGL2, q: int) -> complex:
    """Hecke eigenvalue ``lambda_sigma(p^ell)`` of a spherical GL(2) datum.

    Evaluated as ``sum_{k=0}^{ell} beta^{ell - 2k}``, which equals
    ``(beta^{ell+1} - beta^{-ell-1}) / (beta - beta^{-1})`` and has the right
    limit at ``beta = +-1``.
    """
    if ell < 0:
        return 0j
    beta = b.beta
    return sum(beta ** (ell - 2 * k) for k in range(ell + 1))


def sigma_hecke(ell: int, b: SatakeGL2, q: int) -> complex:
    """Hecke eigenvalue respecting the conductor exponent of ``b``."""
    if ell < 0:
        return 0j
    if b.r_sigma == 0:
        return hecke_gl2(ell, b, q)
    if b.r_sigma == 1:
        return complex(q ** (-ell / 2))
    return 1.0 + 0j if ell == 0 else 0j


def _xi_from_lambda(i: int, m: int, lam: complex, q: int) -> complex:
    if i < 0 or i > m:
        raise DomainError("need 0 <= i <= m")
    alpha = q ** -0.5 / (1 + 1 / q) * lam
    norm = 1 - abs(alpha) ** 2
    if norm <= 0:
        raise DomainError("oldform coefficients need |alpha_sigma| < 1")
    if m == 0:
        return 1.0 + 0j
    if m == 1:
        return -alpha / math.sqrt(norm) if i == 0 else 1 / math.sqrt(norm) + 0j
    if i <= m - 3:
        return 0j
    if i == m - 2:
        return 1 / (q * math.sqrt((1 - q ** -2.0) * norm)) + 0j
    if i == m - 1:
        return -lam / math.sqrt(q * (1 - q ** -2.0) * norm)
    return 1 / math.sqrt((1 - q ** -2.0) * norm) + 0j


def atkin_lehner_xi(i: int, m: int, b: SatakeGL2, q: int) -> complex:
    """Coefficient ``xi_sigma(p^i, p^m)`` of the orthonormal oldform basis.

    Parameters
    ----------
    i, m : int
        ``0 <= i <= m``.
    b : SatakeGL2
    q : int

    Raises
    ------
    DomainError
        If ``i`` is outside ``[0, m]``.
    """
    return _xi_from_lambda(i, m, sigma_hecke(1, b, q), q)


def hm_poly(m: int, a: SatakeGL3) -> complex:
    """``h_m`` by ``h_m = e1 h_{m-1} - e2 h_{m-2} + h_{m-3}`` with ``h_0 = 1``."""
    if m < -2:
        raise DomainError("h_m is defined for m >= -2")
    if m < 0:
        return 0j
    e1, e2 = a.e1(), a.e2()
    h = [0j, 0j, 1.0 + 0j]
    for _ in range(m):
        h.append(e1 * h[-1] - e2 * h[-2] + h[-3])
    return h[-1]


def p_poly(j: int, x: complex, y: complex, a: SatakeGL3) -> complex:
    """The five polynomials ``P_j(x, y)`` with coefficients in the Hecke eigenvalues."""
    return _p_generic(j, x, y, a.e1(), a.e2())


def _p_generic(j, x, y, lam, lamt):
    # plain ring arithmetic, shared by the numeric and the exact evaluation
    if j == 0:
        return lam * lamt * x * y - lam * y - lamt * lamt * x * y * y - lamt * (x - y * y) + 1
    if j == 1:
        return 2 * lam * lamt * x * y * y - (lam * lam + lamt) * x * y + lam * (x - y * y) + y
    if j == 2:
        return -(lam * lam * x * y * y) + 2 * lam * x * y - 2 * lamt * x * y * y - x + y * y
    if j == 3:
        return 2 * lam * x * y * y - x * y
    if j == 4:
        return -(x * y * y)
    raise DomainError("P_j is defined for j = 0..4")


def n_factor_exact(ell: int) -> QRational:
    """``N(s, pi; ell)`` as a rational function, Satake parameters ``q^{nu_i}``.

    The recursion for ``h_m`` uses ``alpha_1 alpha_2 alpha_3 = 1``.
    """
    if ell < 0:
        raise DomainError("ell must be nonnegative")
    pw = QRational.power
    lam = pw(_F(nu1=1)) + pw(_F(nu2=1)) + pw(_F(nu3=1))
    lamt = pw(_F(nu1=1, nu2=1)) + pw(_F(nu1=1, nu3=1)) + pw(_F(nu2=1, nu3=1))
    zero = QRational.const(0)
    h = [zero, zero, QRational.const(1)]
    for _ in range(ell + 4):
        h.append(lam * h[-1] - lamt * h[-2] + h[-3])
    A, B = pw(_F(-1, s1=-2)), pw(_F(-1, s1=-1, s2=-1))
    return sum((_p_generic(j, A, B, lam, lamt) * h[2 + ell + j] for j in range(5)), zero)


def _qpow(q: float, e: complex) -> complex:
    return cmath.exp(math.log(q) * e)


def n_factor(ell: int, pt: SpectralPoint, a: SatakeGL3, q: int) -> complex:
    """``N(s, pi; ell) = sum_j P_j(A, B) h_{ell+j}`` with ``A = q^{-1-2s1}``, ``B = q^{-1-s1-s2}``."""
    if ell < 0:
        raise DomainError("ell must be nonnegative")
    A = _qpow(q, -1 - 2 * pt.s1)
    B = _qpow(q, -1 - pt.s1 - pt.s2)
    return sum(p_poly(j, A, B, a) * hm_poly(ell + j, a) for j in range(5))


# ---------------------------------------------------------------------------
# tails of polynomial-times-geometric series
# ---------------------------------------------------------------------------

def _poly_geom_tail(x: float, start: int, power: int, shift: int = 0) -> float:
    """Upper bound for ``sum_{n >= start} (n + shift + 1)^power x^n``, ``0 <= x < 1``."""
    if x <= 0:
        return 0.0 if start > 0 else float((shift + 1) ** power)
    if x >= 1:
        return math.inf
    total = 0.0
    n = start
    while True:
        t = (n + shift + 1) ** power * x ** n
        ratio = ((n + shift + 2) / (n + shift + 1)) ** power * x
        if ratio < 0.9 and t < 1e-40:
            return total + t / (1 - ratio)
        if ratio < 1 and n > start + 10_000:
            return total + t / (1 - ratio)
        total += t
        n += 1


def _poly_geom_total(x: float, power: int, shift: int = 0) -> float:
    return _poly_geom_tail(x, 0, power, shift)


def _schur_grid(a: SatakeGL3, imax: int, jmax: int) -> np.ndarray:
    """``S[i, j] = schur(i, j)`` for ``0 <= i <= imax``, ``0 <= j <= jmax``."""
    top = imax + 2 * jmax + 2
    h = _complete_homogeneous(a.alpha, top)
    S = np.zeros((imax + 1, jmax + 1), dtype=complex)
    for j in range(jmax + 1):
        for i in range(imax + 1):
            S[i, j] = h[i + j] * h[j] - (h[i + j + 1] * h[j - 1] if j else 0)
    return S


# ---------------------------------------------------------------------------
# generic double sum
# ---------------------------------------------------------------------------

def gen_double_sum(ell: int, pt: SpectralPoint, a: SatakeGL3, q: int,
                   trunc: TruncationSpec = TruncationSpec(), *, certificate: bool = False):
    """Truncated ``sum_{i >= ell} sum_{j >= 0} lambda_pi(p^{i+j}, p^j) q^{-i(1+s1+s2) - j(1+2s1)}``.

    Indices run up to ``trunc.N``.  The tail is bounded with
    ``|s_(i+j,j,0)| <= (i+1)^2 (j+1)^2 rho^{i+2j}``, ``rho = max |alpha_k|``.

    Raises
    ------
    TruncationInsufficient
        If ``ell > N`` or the tail bound exceeds ``trunc.tail_tol``.
    """
    N = trunc.N
    if ell < 0:
        raise DomainError("ell must be nonnegative")
    if ell > N:
        raise TruncationInsufficient(f"index range [{ell}, {N}] is empty")
    X = _qpow(q, -(1 + pt.s1 + pt.s2))
    Y = _qpow(q, -(1 + 2 * pt.s1))
    rho = max(abs(x) for x in a.alpha)
    x, y = rho * abs(X), rho ** 2 * abs(Y)
    tail = (_poly_geom_tail(x, N + 1, 2) * _poly_geom_total(y, 2)
            + _poly_geom_total(x, 2) * _poly_geom_tail(y, N + 1, 2))
    if not tail <= trunc.tail_tol:
        raise TruncationInsufficient(f"tail bound {tail:.3e} exceeds {trunc.tail_tol:.1e}")
    S = _schur_grid(a, N, N)
    ip = X ** np.arange(N + 1)
    jp = Y ** np.arange(N + 1)
    val = complex(ip[ell:] @ S[ell:, :] @ jp)
    return CertifiedValue(val, tail, N) if certificate else val


def gen_double_sum_closed(ell: int, pt: SpectralPoint, a: SatakeGL3, q: int) -> complex:
    """Closed form ``B^ell N(ell) / (prod (1 - alpha_k B) prod (1 - alpha_i alpha_j A))``."""
    A = _qpow(q, -1 - 2 * pt.s1)
    B = _qpow(q, -1 - pt.s1 - pt.s2)
    al = a.alpha
    den = 1.0 + 0j
    for x in al:
        den *= 1 - x * B
    for i in range(3):
        for j in range(i + 1, 3):
            den *= 1 - al[i] * al[j] * A
    return B ** ell * n_factor(ell, pt, a, q) / den


# ---------------------------------------------------------------------------
# local L-factors
# ---------------------------------------------------------------------------

def L_pi(s: complex, a: SatakeGL3, q: int) -> complex:
    out = 1.0 + 0j
    for x in a.alpha:
        out /= 1 - x * _qpow(q, -s)
    return out


def L_pi_tilde(s: complex, a: SatakeGL3, q: int) -> complex:
    return L_pi(s, a.inverse(), q)


def L_sigma(s: complex, b: SatakeGL2, q: int) -> complex:
    if b.r_sigma == 0:
        return 1 / ((1 - b.beta * _qpow(q, -s)) * (1 - _qpow(q, -s) / b.beta))
    if b.r_sigma == 1:
        return 1 / (1 - _qpow(q, -s - 0.5))
    return 1.0 + 0j


def L_pi_sigma(s: complex, a: SatakeGL3, b: SatakeGL2, q: int) -> complex:
    out = 1.0 + 0j
    if b.r_sigma == 0:
        for x in a.alpha:
            for y in (b.beta, 1 / b.beta):
                out /= 1 - x * y * _qpow(q, -s)
    elif b.r_sigma == 1:
        for x in a.alpha:
            out /= 1 - x * _qpow(q, -s - 0.5)
    return out


def L_sigma_ad(b: SatakeGL2, q: int) -> complex:
    """``L(1, sigma, Ad)``."""
    if b.r_sigma == 0:
        return 1 / ((1 - 1 / q) * (1 - b.beta ** 2 / q) * (1 - b.beta ** -2 / q))
    if b.r_sigma == 1:
        return 1 / (1 - q ** -2.0) + 0j
    return 1.0 + 0j


def whittaker_norm_gl2(b: SatakeGL2, q: int) -> float:
    """``|W'(I_2)|^2`` for the unit vector spanning the newform line.

    Spherical case: ``zeta(2) / L(1, sigma x sigma-bar)``.  Ramified cases use
    ``zeta(2)^{-1}``, the value for which the newform specialisation of the
    ramified spectral weight holds.
    """
    if b.r_sigma == 0:
        beta, betab = b.beta, b.beta.conjugate()
        acc = 1.0 + 0j
        for x in (beta, 1 / beta):
            for y in (betab, 1 / betab):
                acc *= 1 - x * y / q
        return float(((1 - q ** -2.0) ** -1 * acc).real)
    return 1 - q ** -2.0


def vol_k0(n: int, q: int) -> float:
    """Volume of the Hecke congruence subgroup of level ``p^n`` in ``GL_2(O)``."""
    if n <= 0:
        return 1.0
    return q ** (-n) / (1 + 1 / q)


def w0_gl3(a: SatakeGL3, q: int) -> complex:
    """``W(I_3) = prod_{i<j} (1 - q^{-1} alpha_j / alpha_i)`` for the spherical vector."""
    al = a.alpha
    out = 1.0 + 0j
    for i in range(3):
        for j in range(i + 1, 3):
            out *= 1 - al[j] / al[i] / q
    return out


# ---------------------------------------------------------------------------
# Gauss sums
# ---------------------------------------------------------------------------

def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % k for k in range(2, int(math.isqrt(p)) + 1))


def primitive_root(p: int, rp: int) -> int:
    """Generator of ``(Z/p^rp)^x`` (cyclic for odd ``p`` and for ``p^rp <= 4``)."""
    mod = p ** rp
    phi = mod - mod // p
    if p == 2 and rp > 2:
        raise DomainError("(Z/2^r)^x is not cyclic for r > 2")
    primes = [k for k in range(2, phi + 1) if phi % k == 0 and _is_prime(k)]
    for g in range(1, mod):
        if g % p == 0:
            continue
        if all(pow(g, phi // k, mod) != 1 for k in primes):
            return g
    raise DomainError("no primitive root found")


@dataclass(frozen=True)
class CharacterTable:
    """A character of ``(Z/p^rp)^x`` given by exact exponents.

    ``chi(u) = exp(2 pi i k_u / order)`` for every unit representative ``u``.

    Parameters
    ----------
    p : int
        Prime.
    rp : int
        Modulus exponent, ``1 <= rp <= 3``.
    order : int
        Common denominator of the exponents.
    exps : dict
        Map ``u -> k_u`` over all unit residues ``u`` mod ``p^rp``.
    """

    p: int
    rp: int
    order: int
    exps: dict

    def __post_init__(self):
        if not _is_prime(self.p):
            raise DomainError("only prime residue fields are supported")
        if not 1 <= self.rp <= 3:
            raise DomainError("modulus exponent must be 1, 2 or 3")
        mod = self.p ** self.rp
        units = [u for u in range(mod) if u % self.p]
        if sorted(self.exps) != units:
            raise DomainError("table must list every unit residue")
        for u in units:
            for v in units:
                if (self.exps[u] + self.exps[v] - self.exps[(u * v) % mod]) % self.order:
                    raise DomainError("table is not multiplicative")

    @classmethod
    def from_generator(cls, p: int, rp: int, k: int) -> "CharacterTable":
        """Character sending a primitive root to ``exp(2 pi i k / phi(p^rp))``."""
        mod = p ** rp
        phi = mod - mod // p
        g = primitive_root(p, rp)
        exps = {}
        x = 1
        for m in range(phi):
            exps[x] = (k * m) % phi
            x = (x * g) % mod
        return cls(p, rp, phi, exps)

    @property
    def modulus(self) -> int:
        return self.p ** self.rp

    def value(self, u: int) -> complex:
        return cmath.exp(2j * math.pi * self.exps[u % self.modulus] / self.order)

    def is_primitive(self) -> bool:
        """Nontrivial on ``1 + p^{rp-1}`` (for ``rp = 1``: nontrivial at all)."""
        mod = self.modulus
        step = self.p ** (self.rp - 1)
        if self.rp == 1:
            return any(k % self.order for k in self.exps.values())
        return any(self.exps[(1 + t * step) % mod] % self.order for t in range(1, self.p))


def dirichlet_characters(p: int, rp: int) -> list:
    """All characters mod ``p^rp`` (cyclic unit groups only)."""
    mod = p ** rp
    phi = mod - mod // p
    return [CharacterTable.from_generator(p, rp, k) for k in range(phi)]


def gauss_sum(chi: CharacterTable, q: int | None = None) -> complex:
    """``G(chi) = sum_{u mod p^r, unit} chi(u) exp(2 pi i u / p^r)``.

    Raises
    ------
    NotPrimitive
        If ``chi`` factors through a smaller modulus.
    """
    if q is not None and q != chi.p:
        raise DomainError("q must equal the residue characteristic")
    if not chi.is_primitive():
        raise NotPrimitive("character is not primitive")
    mod = chi.modulus
    return sum(chi.value(u) * cmath.exp(2j * math.pi * u / mod) for u in chi.exps)


@lru_cache(maxsize=None)
def _cyclotomic(n: int) -> tuple:
    """Integer coefficients (low degree first) of the n-th cyclotomic polynomial."""
    poly = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            poly = _polydiv_exact(poly, list(_cyclotomic(d)))
    return tuple(poly)


def _polydiv_exact(num: list, den: list) -> list:
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1] // den[-1]
        out[k] = c
        for t, dv in enumerate(den):
            num[k + t] -= c * dv
    if any(num):
        raise ArithmeticError("inexact cyclotomic division")
    return out


def gauss_norm_exact(chi: CharacterTable) -> int | None:
    """Return ``|G(chi)|^2`` computed exactly in ``Z[zeta_L]``, or ``None`` if not rational.

    Elements are integer vectors in powers of ``zeta_L`` with
    ``L = lcm(order, p^rp)``, reduced modulo the ``L``-th cyclotomic polynomial.
    """
    if not chi.is_primitive():
        raise NotPrimitive("character is not primitive")
    mod = chi.modulus
    L = math.lcm(chi.order, mod)
    g = [0] * L
    for u, k in chi.exps.items():
        g[(k * (L // chi.order) + u * (L // mod)) % L] += 1
    gbar = [0] * L
    for e, c in enumerate(g):
        gbar[(-e) % L] += c
    prod = [0] * L
    for e1, c1 in enumerate(g):
        if c1:
            for e2, c2 in enumerate(gbar):
                if c2:
                    prod[(e1 + e2) % L] += c1 * c2
    red = _reduce_mod(prod, list(_cyclotomic(L)))
    if any(red[1:]):
        return None
    return red[0]


def _reduce_mod(poly: list, mod: list) -> list:
    poly = list(poly)
    dm = len(mod) - 1
    for k in range(len(poly) - 1, dm - 1, -1):
        c = poly[k]
        if c:
            for t, mv in enumerate(mod):
                poly[k - dm + t] -= c * mv
    out = poly[:dm] + [0] * max(0, dm - len(poly))
    return out


# ---------------------------------------------------------------------------
# Type I dual weights
# ---------------------------------------------------------------------------

def typeI_dual_weight(pt: SpectralPoint, lam: complex, datum: LocalDatum, a: SatakeGL3,
                      case: str, *, xi: complex = 1.0, r_xi: int = 0) -> complex:
    """Local dual weight of Type I.

    Parameters
    ----------
    pt : SpectralPoint
        ``pt.s1`` plays the role of the single variable ``s``.
    lam : complex
        Mellin variable.
    datum : LocalDatum
        ``datum.r`` is the relevant level exponent in the ramified cases.
    a : SatakeGL3
    case : {"unramified", "small_q", "large_q"}
    xi : complex, optional
        ``xi(varpi)`` of the Hecke character, used when unramified.
    r_xi : int, optional
        Conductor exponent of ``xi``; every case vanishes unless it is 0.

    Notes
    -----
    Central characters are trivial, ``Vol(O^x) = q^{-d/2}`` and the maximal
    compact subgroup has volume 1.
    """
    q = datum.q
    s = complex(pt.s1)
    lam = complex(lam)
    th = a.theta(q)
    if not (-0.5 + th < s.real < (1 - th) / 2):
        raise DomainError("Re(s) outside the stated strip")
    if not (-0.5 < lam.real < 0.5 - 2 * s.real - th):
        raise DomainError("Re(lambda) outside the stated strip")
    if r_xi:
        return 0j
    vol_units = q ** (-datum.d / 2)
    if case == "unramified":
        at = a.inverse()
        X = np.conj(xi) * _qpow(q, -(0.5 + 2 * s - lam))
        Lt = 1.0 + 0j
        for x in at.alpha:
            Lt /= 1 - x * X
        return w0_gl3(a, q) * Lt / (1 - xi * _qpow(q, -(0.5 + lam)))
    if case == "small_q":
        rt = datum.r
        return _qpow(q, (1.5 - lam) * rt) * vol_k0(rt, q) * vol_units ** 4
    if case == "large_q":
        at = a.inverse()
        X = np.conj(xi) * _qpow(q, -(0.5 + 2 * s - lam))
        Lt = 1.0 + 0j
        for x in at.alpha:
            Lt /= 1 - x * X
        return _qpow(q, datum.r * (0.5 - lam)) * vol_units ** 2 * w0_gl3(a, q) * Lt
    raise DomainError(f"unknown case {case!r}")


# ---------------------------------------------------------------------------
# Type II weights
# ---------------------------------------------------------------------------

def _type2_lattice(q: int, a: SatakeGL3, b: SatakeGL2, M: int, xk1: complex, xk2: complex,
                   xd1: complex, xl1: complex, xl2: complex, N: int, tail_tol: float):
    """Oldform lattice sum shared by the ramified Type II weights and the sieve.

    Returns ``(value, tail)`` for

        sum_{d1+d2=M} Vol(K0[d2]) sum_{l=0}^{d2-r_sigma} q^{-l}
          sum_{k1,k2<=l} xi(k1,l) xi(k2,l) xk1^k1 xk2^k2 xd1^d1
          sum_{min(l1,d2)=0} sum_{l2>=0} schur(l2+k2, l1+d1) conj(lambda_sigma(l2)) xl1^l1 xl2^l2
    """
    lam_sig = [np.conj(sigma_hecke(m, b, q)) for m in range(N + 1)]
    lam1 = sigma_hecke(1, b, q)
    S = _schur_grid(a, N + M + 1, N + M + 1)
    rho = max(abs(x) for x in a.alpha)
    if b.r_sigma == 0:
        bmax = max(abs(b.beta), 1 / abs(b.beta))
    else:
        bmax = 1.0
    pl2 = xl2 ** np.arange(N + 1) * np.array(lam_sig)
    pl1 = xl1 ** np.arange(N + 1)
    total = 0j
    tail = 0.0
    for d2 in range(M + 1):
        d1 = M - d2
        vol = vol_k0(d2, q)
        for l in range(0, d2 - b.r_sigma + 1):
            xis = [_xi_from_lambda(k, l, lam1, q) for k in range(l + 1)]
            for k1 in range(l + 1):
                if xis[k1] == 0:
                    continue
                for k2 in range(l + 1):
                    if xis[k2] == 0:
                        continue
                    w = vol * q ** (-l) * xis[k1] * xis[k2] * xk1 ** k1 * xk2 ** k2 * xd1 ** d1
                    if d2 == 0:
                        block = S[k2:k2 + N + 1, d1:d1 + N + 1]
                        inner = pl2 @ block @ pl1
                        l1_tail = True
                    else:
                        inner = pl2 @ S[k2:k2 + N + 1, d1]
                        l1_tail = False
                    total += w * inner
                    # |schur(a, b)| <= (a+1)^2 (b+1)^2 rho^{a+2b}; |lambda(l2)| <= (l2+1) bmax^l2
                    x2 = abs(xl2) * rho * bmax
                    x1 = abs(xl1) * rho ** 2
                    c = abs(w) * rho ** (k2 + 2 * d1) * (k2 + 1) ** 2 * (d1 + 1) ** 2
                    t = _poly_geom_tail(x2, N + 1, 3, k2)
                    if l1_tail:
                        t = (t * _poly_geom_total(x1, 2, d1)
                             + _poly_geom_total(x2, 3, k2) * _poly_geom_tail(x1, N + 1, 2, d1))
                    tail += c * t
    if not tail <= tail_tol:
        raise TruncationInsufficient(f"tail bound {tail:.3e} exceeds {tail_tol:.1e}")
    return total, tail


def typeII_spec_weight(pt: SpectralPoint, datum: LocalDatum, a: SatakeGL3, b: SatakeGL2,
                       trunc: TruncationSpec = TruncationSpec(N=160), *, certificate: bool = False):
    """Local spectral weight of Type II.

    For ``r = 0`` the closed product
    ``lambda_sigma(p^n) |W'(I_2)|^2 L(1/2+s1, pi x sigma) conj(L(1/2+conj(s2), sigma))``
    (zero unless ``sigma`` is spherical).  For ``r >= 1`` the oldform lattice
    sum with prefactor ``|W'(I_2)|^2 L(1/2+s2, sigma) q^{(1-3s1-s2)d + r}``;
    its ``l2``-sum supplies ``L(1/2+s1, pi x sigma)``.  The weight is 0 when
    ``r_sigma > r``.
    """
    q = datum.q
    s1, s2 = complex(pt.s1), complex(pt.s2)
    th_pi, th_sig = a.theta(q), b.theta(q)
    if not (s1.real > -0.5 + th_pi + th_sig and s2.real > -0.5 + th_sig):
        raise DomainError("spectral point outside the region of absolute convergence")
    norm = whittaker_norm_gl2(b, q)
    if datum.r == 0:
        if b.r_sigma:
            val = 0j
        else:
            val = (sigma_hecke(datum.n, b, q) * norm * L_pi_sigma(0.5 + s1, a, b, q)
                   * np.conj(L_sigma(0.5 + np.conj(s2), b, q)))
        return CertifiedValue(val, 0.0, 0) if certificate else val
    if b.r_sigma > datum.r:
        return CertifiedValue(0j, 0.0, 0) if certificate else 0j
    total, tail = _type2_lattice(
        q, a, b, datum.r,
        xk1=_qpow(q, 0.5 - s2), xk2=_qpow(q, 0.5 - s1), xd1=_qpow(q, -(1 + 2 * s1)),
        xl1=_qpow(q, -(1 + 2 * s1)), xl2=_qpow(q, -(0.5 + s1)),
        N=trunc.N, tail_tol=trunc.tail_tol)
    pre = norm * L_sigma(0.5 + s2, b, q) * _qpow(q, (1 - 3 * s1 - s2) * datum.d) * q ** datum.r
    val = pre * total
    return CertifiedValue(val, abs(pre) * tail, trunc.N) if certificate else val


def typeII_dual_weight(pt: SpectralPoint, datum: LocalDatum, a: SatakeGL3, b: SatakeGL2,
                       branch: str, trunc: TruncationSpec = TruncationSpec(N=160)) -> complex:
    """Local dual weight of Type II at ``s^dual = ((s2-s1)/2, (3s1+s2)/2)``.

    Parameters
    ----------
    pt : SpectralPoint
        The original point ``s``; the dual variables are formed internally.
    branch : {"unramified", "v_divides_q", "v_divides_n"}
    """
    q = datum.q
    s1, s2 = complex(pt.s1), complex(pt.s2)
    th_pi, th_sig = a.theta(q), b.theta(q)
    sd1, sd2 = (s2 - s1) / 2, (3 * s1 + s2) / 2
    if not (sd1.real > -0.5 + th_pi + th_sig and sd2.real > -0.5 + th_sig):
        raise DomainError("dual point outside the region of absolute convergence")
    norm = whittaker_norm_gl2(b, q)
    if branch in ("unramified", "v_divides_q") and b.r_sigma:
        return 0j
    Lps = L_pi_sigma((1 + s2 - s1) / 2, a, b, q)
    Ls = L_sigma((1 + 3 * s1 + s2) / 2, b, q)
    if branch == "unramified":
        if datum.r or datum.n:
            raise DomainError("unramified branch needs r = n = 0")
        return norm * Lps * Ls
    if branch == "v_divides_q":
        r = datum.r
        if r < 1:
            raise DomainError("v | q needs r >= 1")
        bracket = sigma_hecke(r, b, q) - _qpow(q, -(1 + 3 * s1 + s2) / 2) * sigma_hecke(r - 1, b, q)
        return _qpow(q, (1 - 3 * s1 - s2) * r / 2) * bracket * norm * Lps * Ls
    if branch == "v_divides_n":
        if datum.r:
            raise DomainError("v | n branch needs r = 0")
        n = datum.n
        total = 0j
        for ell in range(n + 1):
            part, _ = _type2_lattice(
                q, a, b, ell,
                xk1=_qpow(q, (1 - 3 * s1 - s2) / 2), xk2=_qpow(q, (1 - s2 + s1) / 2),
                xd1=_qpow(q, -(1 + s2 - s1)), xl1=_qpow(q, -(1 + s2 - s1)),
                xl2=_qpow(q, -(1 + s2 - s1) / 2), N=trunc.N, tail_tol=trunc.tail_tol)
            total += _qpow(q, (1 + 2 * s2) * ell) * part
        pre = _qpow(q, (1 - 2 * s2) * datum.d) * norm * _qpow(q, -(0.5 + s2) * n) * Ls
        return pre * total
    raise DomainError(f"unknown branch {branch!r}")


# ---------------------------------------------------------------------------
# degenerate local integrals
# ---------------------------------------------------------------------------

def _F(c0=0, **kw) -> ExponentForm:
    return ExponentForm.of(c0, **kw)


def _z(e: ExponentForm) -> QRational:
    return zeta_factor(e)


def _Lpi_inv() -> QRational:
    """``W(I_3) = L(pi)^{-1}``, ``L(pi) = zeta(1+nu1-nu2) zeta(1+nu1-nu3) zeta(1+nu2-nu3)``."""
    L = _z(_F(1, nu1=1, nu2=-1)) * _z(_F(1, nu1=1, nu3=-1)) * _z(_F(1, nu2=1, nu3=-1))
    return QRational.const(1) / L


def _twist_weight(n: int, ell: int) -> ExponentForm:
    """Exponent of ``q^{-n/2 + (2 ell - n) s2}``."""
    return _F(Fraction(-n, 2), s2=2 * ell - n)


def _w2_ramified(r: int, d: int) -> list:
    """Level-aligned ``w2`` term as ``[(prefactor, LatticeSum)]``."""
    S = LatticeSum(["ip", "i", "j", "jp"])
    ip, i, j, jp = (Lin.var(x) for x in ("ip", "i", "j", "jp"))
    S.bound("ip", 0).bound("i", 0).bound("j", r).bound("jp", 0, j + d)
    S.require(ip + j - i - jp + d)
    S.term(ip=_F(-1, nu1=-1, nu2=1), jp=_F(0, nu3=1, s1=1, s2=-1),
           i=_F(0, nu2=-1, nu3=1), j=_F(-1, nu1=-1, nu3=-1, s1=-2))
    pre = (QRational.power(_F(r - 2 * d, s2=d, s1=-d, nu1=-d))
           * _z(_F(0, s2=1, s1=-1, nu1=-1)) * _Lpi_inv())
    return [(pre, S)]


def _w2_unramified(n: int, d: int) -> list:
    out = []
    for ell in range(n + 1):
        S = LatticeSum(["rp", "ip", "j", "i", "jp"])
        rp, ip, j, i, jp = (Lin.var(x) for x in ("rp", "ip", "j", "i", "jp"))
        S.bound("rp", -d).bound("ip", 0).bound("j", -d).bound("i", 0, ip + j + d)
        S.bound("jp", 0).bound("jp", ell - rp)
        S.term(ip=_F(-1, nu1=-1, nu2=1), jp=_F(-1, nu1=-1, s1=-1, s2=-1),
               i=_F(0, nu2=-1, nu3=1), j=_F(-1, nu1=-1, nu3=-1, s1=-2),
               rp=_F(0, s2=-1, s1=1, nu1=1))
        pre = QRational.power(_twist_weight(n, ell) + _F(ell - 2 * d)) * _Lpi_inv()
        out.append((pre, S))
    return out


def _w1w2_ramified(r: int, d: int) -> list:
    T = _F(1, nu1=1, s1=1, s2=1)
    S = LatticeSum(["l", "k", "i", "j"])
    l, k, i, j = (Lin.var(x) for x in ("l", "k", "i", "j"))
    S.bound("l", 0).bound("k", 0, l + d).bound("i", -l - d).bound("j", -l)
    el, ek = _F(-1, nu2=-1, s1=-1, s2=-1), _F(0, nu1=-1, s1=-1, s2=1)
    ei, ej = _F(-1, nu2=-1, nu3=-1, s1=-2), _F(-1, nu2=-1, nu3=1)
    for cap in (True, False):
        for low in (True, False):
            where = []
            c0, evl, evi, evj = _F(r), el, ei, ej
            if cap:
                # r - i - l >= 0 contributes -(r - i - l) T
                where.append(r - i - l)
                c0 = c0 - T * r
                evi, evl = evi + T, evl + T
            else:
                where.append(i + l - r - 1)
            if low:
                # min = i + d <= 0
                where += [j - i - d, -(i + d)]
                c0 = c0 + _F(d)
                evi = evi + _F(1)
            else:
                where += [i + d - j - 1, -j]
                evj = evj + _F(1)
            S.term(const=c0, where=where, l=evl, k=ek, i=evi, j=evj)
    pre = QRational.power(_F(-2 * d)) * _Lpi_inv() * _z(T)
    return [(pre, S)]


def _w1w2_unramified(n: int, d: int) -> list:
    T = _F(1, nu1=1, s1=1, s2=1)
    w2 = (_z(T) * _z(_F(1, nu2=1, nu3=1, s1=2)) * _z(_F(1, nu2=1, nu3=-1))
          / _z(_F(2, nu2=2, s1=2)) * QRational.power(_F(-Fraction(1, 2) * d, nu2=d, nu3=d, s1=2 * d)))
    out = []
    for ell in range(n + 1):
        S = LatticeSum(["j", "k", "i"])
        j, k, i = (Lin.var(x) for x in ("j", "k", "i"))
        S.bound("j", -d).bound("k", 0, j + d).bound("i", 0, j + d)
        ej, ek, ei = _F(-1, nu2=-1, s1=-1, s2=-1), _F(1, nu2=2, s1=2), _F(0, nu1=-1, s1=-1, s2=1)
        # max{0, ell + i - j - d}
        S.term(const=_F(ell), where=[j + d - ell - i], j=ej, k=ek, i=ei)
        S.term(const=_F(ell) - T * (ell - d), where=[ell + i - j - d - 1],
               j=ej + T, k=ek, i=ei - T)
        pre = (QRational.power(_twist_weight(n, ell) + _F(-Fraction(d, 2)))
               * _Lpi_inv() * w2)
        out.append((pre, S))
    return out


def _w1w2w1_ramified(r: int, d: int) -> list:
    S = LatticeSum(["j", "k", "i"])
    j, k, i = (Lin.var(x) for x in ("j", "k", "i"))
    S.bound("j", -d).bound("k", 0).bound("i", 0, j + k + d)
    U = _F(1, nu2=1, nu3=1, s1=2)
    ej, ek, ei = _F(-1, nu1=1, nu3=-1), _F(-1, s2=1, s1=-1, nu3=-1), _F(0, nu1=-1, s1=-1, s2=-1)
    S.term(const=-U * r, where=[r + d - i], j=ej, k=ek, i=ei + U)
    S.term(const=U * d, where=[i - r - d - 1], j=ej, k=ek, i=ei)
    pre = (QRational.power(_F(r - Fraction(5 * d, 2))) * _Lpi_inv()
           * _z(_F(0, nu2=1, nu3=-1)) * _z(_F(0, nu1=1, nu3=-1))
           / _z(_F(1, nu1=-1, nu3=1)) / _z(_F(1, s2=-1, s1=1, nu3=1))
           * _z(U) * _z(_F(0, s2=1, s1=-1, nu3=-1)))
    return [(pre, S)]


def _w1w2w1_unramified(n: int, d: int) -> list:
    common = (_z(_F(1, nu2=1, nu3=1, s1=2)) * _z(_F(0, nu1=1, nu3=-1)) * _z(_F(0, nu2=1, nu3=-1))
              * _z(_F(0, s2=1, s1=-1, nu3=-1)) * _Lpi_inv()
              / _z(_F(1, nu1=-1, nu3=1)) / _z(_F(1, s2=-1, s1=1, nu3=1)))
    ej = _F(-1, nu1=1, nu3=-1)
    out = []
    for ell in range(n + 1):
        w = QRational.power(_twist_weight(n, ell) + _F(ell, nu2=d, nu3=d, s1=2 * d)) * common
        # first bracket: finite i-range, j >= -d with max{0, ell - j}
        A = LatticeSum(["i", "j"])
        i, j = Lin.var("i"), Lin.var("j")
        A.bound("i", 0, ell + d).bound("j", -d)
        eA = _F(0, s2=-1, s1=1, nu3=1) * ell
        ei = _F(0, s2=1, s1=-1, nu3=-1) + _F(0, nu1=-1, s1=-1, s2=-1)
        A.term(const=eA, where=[j - ell], i=ei, j=ej)
        A.term(const=eA + _F(-ell), where=[ell - 1 - j], i=ei, j=ej + _F(1))
        preA = w * _z(_F(1, s2=-1, s1=1, nu3=1)) * QRational.power(_F(-d, s2=-d, s1=d, nu3=d))
        out.append((preA, A))
        # second bracket: i > ell + d with the cone condition on k
        B = LatticeSum(["j", "i", "k"])
        j, i, k = (Lin.var(x) for x in ("j", "i", "k"))
        B.bound("j", -d).bound("i", ell + d + 1).bound("k", 0)
        ek = _F(-1, s2=1, s1=-1, nu3=-1)
        eiB = _F(0, nu1=-1, s1=-1, s2=-1)
        B.term(where=[j - ell, k - i + j + d], j=ej, i=eiB, k=ek)
        B.term(where=[ell - 1 - j, k - i + ell + d], j=ej, i=eiB, k=ek)
        out.append((w * QRational.power(_F(-d)), B))
    return out


_BRANCHES = {
    ("w2", True): _w2_ramified, ("w2", False): _w2_unramified,
    ("w1w2", True): _w1w2_ramified, ("w1w2", False): _w1w2_unramified,
    ("w1w2w1", True): _w1w2w1_ramified, ("w1w2w1", False): _w1w2w1_unramified,
}


def _resolve(weyl: str, side: str, datum: LocalDatum):
    if weyl not in ("w2", "w1w2", "w1w2w1"):
        raise DomainError(f"unknown Weyl element {weyl!r}")
    if side not in ("spec", "dual"):
        raise DomainError(f"unknown side {side!r}")
    r, n = (datum.r, datum.n) if side == "spec" else (datum.n, datum.r)
    if r and n:
        raise DomainError("level and twist exponents cannot both be positive at one place")
    return r, n


def degen_lattice(weyl: str, side: str, datum: LocalDatum) -> list:
    """The lattice sums behind a degenerate local integral.

    Returns a list of ``(prefactor, LatticeSum)`` whose combined value is the
    integral, written in the variables of the spec side.  For the dual side
    the roles of ``r`` and ``n`` are exchanged and callers evaluate at the dual
    point.
    """
    r, n = _resolve(weyl, side, datum)
    if r >= 1:
        return _BRANCHES[(weyl, True)](r, datum.d)
    return _BRANCHES[(weyl, False)](n, datum.d)


def degen_exact(weyl: str, side: str, datum: LocalDatum) -> QRational:
    """Exact value of a degenerate local integral as a rational function.

    On the dual side the result is expressed in the original ``s`` via
    ``s -> ((s2 - s1)/2, (3 s1 + s2)/2)``.
    """
    total = QRational.const(0)
    for pre, S in degen_lattice(weyl, side, datum):
        total = total + pre * S.closed_form()
    if side == "dual":
        total = total.substitute(dual_substitution())
    return total


def degen_nonarch(weyl: str, side: str, datum: LocalDatum, pt: SpectralPoint,
                  trunc: TruncationSpec | None = None, *, method: str = "exact") -> complex:
    """Numeric value of a degenerate non-archimedean local integral.

    Parameters
    ----------
    weyl : {"w2", "w1w2", "w1w2w1"}
    side : {"spec", "dual"}
    datum : LocalDatum
    pt : SpectralPoint
        Point in the original variables.
    trunc : TruncationSpec, optional
        Only used by ``method="brute"``.
    method : {"exact", "brute"}
        ``"exact"`` evaluates the eliminated closed form; ``"brute"`` sums the
        lattice directly with every unbounded index cut at ``trunc.N`` steps.

    Raises
    ------
    DomainError
        At a pole of the closed form.
    """
    if abs(pt.nu1 + pt.nu2 + pt.nu3) > 1e-12:
        raise DomainError("nu must sum to zero")
    if method == "exact":
        try:
            return eval_numeric(degen_exact(weyl, side, datum), datum.q, pt)
        except PoleAtPoint as exc:
            raise DomainError(str(exc)) from exc
    if method == "brute":
        trunc = trunc or TruncationSpec(N=30)
        at = pt if side == "spec" else pt.dual()
        return sum(eval_numeric(pre, datum.q, at) * S.brute(datum.q, at, trunc.N)
                   for pre, S in degen_lattice(weyl, side, datum))
    raise DomainError(f"unknown method {method!r}")


def degen_unramified_product(weyl: str, side: str = "spec") -> QRational:
    """Closed zeta-product stated for the degenerate integrals at an unramified place."""
    z = _z
    Linv = _Lpi_inv()
    if weyl == "w2":
        f = (Linv / z(_F(2, nu1=2, s1=2)) * z(_F(1, nu1=1, nu3=1, s1=2)) * z(_F(1, nu1=1, nu2=1, s1=2))
             * z(_F(1, nu1=1, nu2=-1)) * z(_F(1, nu1=1, nu3=-1)) * z(_F(0, s2=1, s1=-1, nu1=-1))
             * z(_F(1, nu1=1, s1=1, s2=1)))
    elif weyl == "w1w2":
        f = (Linv * z(_F(1, nu1=1, s1=1, s2=1)) / z(_F(2, nu2=2, s1=2)) * z(_F(1, nu2=1, s1=1, s2=1))
             * z(_F(0, s2=1, s1=-1, nu2=-1)) * z(_F(1, nu1=1, nu2=1, s1=2)) * z(_F(0, nu1=1, nu2=-1))
             * z(_F(1, nu2=1, nu3=1, s1=2)) * z(_F(1, nu2=1, nu3=-1)))
    elif weyl == "w1w2w1":
        f = (Linv / z(_F(2, nu3=2, s1=2)) * z(_F(1, s1=1, s2=1, nu3=1)) * z(_F(1, nu1=1, nu3=1, s1=2))
             * z(_F(1, nu2=1, nu3=1, s1=2)) * z(_F(0, nu1=1, nu3=-1)) * z(_F(0, s2=1, s1=-1, nu3=-1))
             * z(_F(0, nu2=1, nu3=-1)))
    else:
        raise DomainError(f"unknown Weyl element {weyl!r}")
    if side == "dual":
        f = f.substitute(dual_substitution())
    return f


# ---------------------------------------------------------------------------
# generic local integrals
# ---------------------------------------------------------------------------

def gen_nonarch(side: str, datum: LocalDatum, pt: SpectralPoint, a: SatakeGL3) -> complex:
    """Generic (non-degenerate) non-archimedean local integral.

    ``W(I_3) = L(pi)^{-1}`` is :func:`w0_gl3`; the L-factors use the Satake
    parameters ``a``.  On the dual side ``pt`` is the original point: the
    unramified branch is the spec formula at the dual point, while the
    branches at ``v | n`` and ``v | q`` are evaluated as stated, in ``s``.
    """
    q = datum.q
    s1, s2 = complex(pt.s1), complex(pt.s2)
    if datum.r and datum.n:
        raise DomainError("level and twist exponents cannot both be positive")
    W = w0_gl3(a, q)

    def LL(p):
        return L_pi(1 + p.s1 + p.s2, a, q) * L_pi_tilde(1 + 2 * p.s1, a, q)

    if side == "spec":
        if datum.r:
            return q ** datum.r * W * LL(pt) / _zeta_num(2 + 3 * s1 + s2, q)
        n = datum.n
        return W * sum(n_factor(ell, pt, a, q) * LL(pt)
                       / _qpow(q, (0.5 + s2) * n + ell * (s1 - s2)) for ell in range(n + 1))
    if side == "dual":
        if datum.r:
            return _qpow(q, -(s1 + s2) * datum.r) * W * n_factor(datum.r, pt, a, q) * LL(pt)
        if datum.n:
            n = datum.n
            acc = sum(_qpow(q, -(1 + 2 * s2) * ell) for ell in range(n + 1))
            return (_qpow(q, (0.5 + s2) * n) * W * acc * _zeta_num(1 + 2 * s2, q)
                    / _zeta_num(2 + 3 * s1 + s2, q) * LL(pt))
        pd = pt.dual()
        return W * n_factor(0, pd, a, q) * LL(pd)
    raise DomainError(f"unknown side {side!r}")


def _zeta_num(s: complex, q: int) -> complex:
    return 1 / (1 - _qpow(q, -s))


# ---------------------------------------------------------------------------
# newform sieve
# ---------------------------------------------------------------------------

def sieve_c(m: int, datum: LocalDatum, a: SatakeGL3, b: SatakeGL2,
            trunc: TruncationSpec = TruncationSpec(N=160), *, certificate: bool = False):
    """Sieve coefficient ``c(sigma; p^m)`` at ``s = 0``.

    ``|W'(I_2)|^2 q^{m+d} L(1, sigma, Ad) L(1/2, sigma)`` times the oldform
    lattice sum of level ``p^m``.
    """
    if m < 1:
        raise DomainError("m must be at least 1")
    q = datum.q
    total, tail = _type2_lattice(q, a, b, m, xk1=q ** 0.5, xk2=q ** 0.5, xd1=1 / q,
                                 xl1=1 / q, xl2=q ** -0.5, N=trunc.N, tail_tol=trunc.tail_tol)
    pre = whittaker_norm_gl2(b, q) * q ** (m + datum.d) * L_sigma_ad(b, q) * L_sigma(0.5, b, q)
    val = pre * total
    return CertifiedValue(val, abs(pre) * tail, trunc.N) if certificate else val


@dataclass
class SieveCoefficients:
    """Solution ``a(p^1), ..., a(p^r)`` of the triangular sieve system."""

    a: list
    growth_constant: float
    residual: float
    c: np.ndarray = field(repr=False)

    def __getitem__(self, k):
        return self.a[k]

    def __len__(self) -> int:
        return len(self.a)

    def __iter__(self):
        return iter(self.a)


def sieve_a(r: int, datum: LocalDatum, a: SatakeGL3, b_family: Sequence[SatakeGL2] | None = None,
            trunc: TruncationSpec = TruncationSpec(N=160)) -> SieveCoefficients:
    """Solve ``sum_{j=i}^{r} a(p^j) c(p^i, p^j) = 1_{i=r}`` for ``1 <= i <= r``.

    Row ``i`` uses the representation of conductor exponent ``i``: entry
    ``i - 1`` of ``b_family`` if supplied, else ``SatakeGL2(1, r_sigma=i)``.
    Row 1 is therefore Steinberg and rows ``i >= 2`` do not depend on the
    choice of ``beta``.

    Raises
    ------
    SingularSystem
        If a diagonal entry vanishes.
    """
    if r < 1:
        raise DomainError("r must be at least 1")
    fam = list(b_family or [])
    C = np.zeros((r + 1, r + 1), dtype=complex)
    for i in range(1, r + 1):
        b = fam[i - 1] if i - 1 < len(fam) else SatakeGL2(1.0, r_sigma=i)
        if b.r_sigma != i:
            b = SatakeGL2(b.beta, r_sigma=i)
        for j in range(i, r + 1):
            C[i, j] = sieve_c(j, datum, a, b, trunc)
    coeff = [0j] * (r + 1)
    for i in range(r, 0, -1):
        if abs(C[i, i]) < 1e-12:
            raise SingularSystem(f"c(p^{i}, p^{i}) vanishes")
        rhs = (1.0 if i == r else 0.0) - sum(coeff[j] * C[i, j] for j in range(i + 1, r + 1))
        coeff[i] = rhs / C[i, i]
    resid = max(abs(sum(coeff[j] * C[i, j] for j in range(i, r + 1)) - (1.0 if i == r else 0.0))
                for i in range(1, r + 1))
    growth = max(abs(coeff[j]) * math.factorial(j) / math.factorial(r) for j in range(1, r + 1))
    return SieveCoefficients(coeff[1:], growth, resid, C)

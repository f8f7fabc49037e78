"""
Numerical special functions for the archimedean transforms.

Everything here is written from classical series, integral representations
and recurrences so that library implementations remain available as
independent oracles in the tests.  Accuracy targets are stated per function;
all routines accept complex parameters and real positive arguments unless
noted otherwise.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .qsymbolic import SpectralPoint

__all__ = [
    "ContourTooShort", "Divergent", "OutOfRange", "ParameterOverflow",
    "PoleAtNonpositiveInteger", "PoleInC", "QuadratureSpec", "SpectralPoint",
    "bessel_k", "cgamma", "gauss_legendre", "hyp2f1", "hyp3f2_unit",
    "gl3_whittaker", "kirillov_wn", "legendre_conical", "loggamma",
    "rgamma", "whittaker_w",
]


class PoleAtNonpositiveInteger(ValueError):
    """Gamma evaluated at (or within 1e-12 of) a pole."""


class OutOfRange(ValueError):
    """Argument outside the validated range of a routine."""


class ParameterOverflow(ValueError):
    """Parameters too large for the confluent hypergeometric routines."""


class Divergent(ArithmeticError):
    """A hypergeometric series does not converge at the requested argument."""


class PoleInC(ValueError):
    """Lower hypergeometric parameter is a nonpositive integer."""


class ContourTooShort(ArithmeticError):
    """The truncated contour misses more than the requested tolerance."""


@dataclass(frozen=True)
class QuadratureSpec:
    """Truncation and resolution of a line integral.

    Parameters
    ----------
    T : float
        Cutoff: lines are integrated over ``|Im| <= T`` (or ``|t| <= T``).
    nodes : int
        Number of nodes on the truncated line, at least 64.
    tol : float
        Target relative error used by the tail checks.
    shift : float
        Real part of vertical contours.
    """

    T: float = 12.0
    nodes: int = 256
    tol: float = 1e-10
    shift: float = 0.4

    def __post_init__(self):
        if not self.T > 0:
            raise ValueError("T must be positive")
        if int(self.nodes) < 64:
            raise ValueError("at least 64 nodes are required")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@lru_cache(maxsize=64)
def _leggauss(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def gauss_legendre(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights on ``[a, b]``."""
    x, w = _leggauss(int(n))
    h = 0.5 * (b - a)
    return a + h * (x + 1.0), h * w


# ---------------------------------------------------------------------------
# Gamma
# ---------------------------------------------------------------------------

_LANCZOS_G = 7.0
_LANCZOS = np.array([
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2 * math.pi)


def _lgamma_right(z):
    """log Gamma for Re z >= 1/2 (Lanczos, g=7)."""
    z = z - 1.0
    x = np.full_like(z, _LANCZOS[0])
    for k in range(1, 9):
        x = x + _LANCZOS[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(x)


def _log_sin_pi(z):
    """log sin(pi z), stable for large |Im z| (branch immaterial mod 2 pi i)."""
    up = z.imag >= 0
    w = np.where(up, z, np.conj(z))
    e = np.exp(2j * np.pi * w)
    out = -1j * np.pi * w + np.log1p(-e) - math.log(2.0) + 0.5j * np.pi
    return np.where(up, out, np.conj(out))


def _pole_mask(z):
    r = np.round(z.real)
    return (r <= 0) & (np.abs(z - r) < 1e-12)


def loggamma(z):
    """log Gamma(z) for complex ``z`` (scalar or array).

    The imaginary part is determined only modulo ``2 pi``; the function is
    meant for products and ratios of Gamma values.

    Raises
    ------
    PoleAtNonpositiveInteger
        If any entry lies within 1e-12 of ``0, -1, -2, ...``.
    """
    za = np.asarray(z, dtype=complex)
    if np.any(_pole_mask(za)):
        raise PoleAtNonpositiveInteger(f"Gamma pole at {z}")
    left = za.real < 0.5
    out = np.empty_like(za)
    if np.any(~left):
        out[~left] = _lgamma_right(za[~left])
    if np.any(left):
        zl = za[left]
        out[left] = math.log(math.pi) - _log_sin_pi(zl) - _lgamma_right(1.0 - zl)
    return out[()] if out.ndim == 0 else out


def cgamma(z):
    """Gamma function of complex argument, relative accuracy about 1e-14.

    Examples
    --------
    >>> abs(cgamma(0.5) - math.sqrt(math.pi)) < 1e-14
    True
    """
    za = np.asarray(z, dtype=complex)
    if za.ndim == 0 and za.imag == 0 and 0 < za.real <= 170 and za.real == int(za.real):
        return complex(math.factorial(int(za.real) - 1))
    out = np.exp(loggamma(za))
    return complex(out) if np.ndim(out) == 0 else out


def rgamma(z):
    """Reciprocal Gamma, equal to zero at the poles of Gamma."""
    za = np.asarray(z, dtype=complex)
    pole = _pole_mask(za)
    safe = np.where(pole, 0.5, za)
    out = np.where(pole, 0.0, np.exp(-loggamma(safe)))
    return complex(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# K-Bessel of complex order
# ---------------------------------------------------------------------------

def _bessel_k_vec(nu: complex, x: np.ndarray, rtol: float = 1e-13) -> np.ndarray:
    """K_nu(x) for an array of positive x by a tilted cosh integral.

    Uses ``K_nu(x) = 1/2 int_R exp(-x cosh w + nu w) dw`` on the line
    ``w = u + i alpha``.  The tilt removes the oscillation near ``u = 0``
    (``x sin alpha = Im nu`` when possible) so that no catastrophic
    cancellation occurs for large imaginary order.
    """
    nu = complex(nu)
    if nu.real < 0:
        nu = -nu
    t, sig = nu.imag, nu.real
    at = abs(t)
    delta = min(0.5, 1.0 / max(at, 1.0))
    alpha = np.minimum(np.arcsin(np.minimum(at / x, 1.0)), 0.5 * np.pi - delta)
    alpha = math.copysign(1.0, t) * alpha if t != 0 else np.zeros_like(x)
    ca = np.cos(alpha)
    # half-width: exp(-x cos(a) (cosh L - 1) + sig L) <= e^-40
    L = np.full_like(x, 2.0)
    for _ in range(6):
        L = np.arccosh(1.0 + (40.0 + sig * L) / (x * ca))
    Lmax = float(np.max(L))
    h = 0.25
    A = alpha[:, None]
    X = x[:, None]

    def trap(h, offset):
        u = np.arange(-Lmax + offset, Lmax + 1e-12, 2 * h if offset else h)
        w = u[None, :] + 1j * A
        g = np.exp(-X * np.cosh(w) + nu * w)
        return g.sum(axis=1), np.abs(g).sum(axis=1)

    s, mag = trap(h, 0.0)
    val = 0.5 * h * s
    for _ in range(12):
        h2 = 0.5 * h
        s_new, m_new = trap(h2, h2)
        s = s + s_new
        mag = mag + m_new
        new = 0.5 * h2 * s
        err = np.abs(new - val)
        val, h = new, h2
        if np.all(err <= rtol * np.maximum(np.abs(val), 1e-300) + 1e-15 * 0.5 * h * mag):
            break
    return val


def bessel_k(order, x):
    """Modified Bessel function of the second kind ``K_order(x)``.

    Parameters
    ----------
    order : complex
        ``|Im(order)| <= 200``.
    x : float or array of float
        ``1e-6 <= x <= 1e3``.

    Returns
    -------
    complex or ndarray
        Relative accuracy about 1e-11.

    Raises
    ------
    OutOfRange
    """
    nu = complex(order)
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if abs(nu.imag) > 200 or abs(nu.real) > 50:
        raise OutOfRange(f"order {order} outside supported range")
    if np.any(xa < 1e-6) or np.any(xa > 1e3):
        raise OutOfRange("x must lie in [1e-6, 1e3]")
    out = _bessel_k_vec(nu, xa)
    return complex(out[0]) if np.ndim(x) == 0 else out


# ---------------------------------------------------------------------------
# Double-exponential quadrature on (0, inf)
# ---------------------------------------------------------------------------

def _de_halfline(f, rtol=1e-12, tau=4.5, h0=0.25, levels=7):
    """Integrate ``f`` over (0, inf) with the map ``t = exp(pi/2 sinh tau)``.

    ``f`` receives an array of ``t`` values (shape (n,)) and may return an
    array of shape (m, n); the result then has shape (m,).
    """
    def nodes(h, offset, step):
        tt = np.arange(-tau + offset, tau + 1e-12, step)
        e = 0.5 * np.pi * np.sinh(tt)
        t = np.exp(e)
        return t, t * 0.5 * np.pi * np.cosh(tt)

    h = h0
    t, jac = nodes(h, 0.0, h)
    s = (f(t) * jac).sum(axis=-1)
    val = h * s
    for _ in range(levels):
        h2 = 0.5 * h
        t, jac = nodes(h2, h2, h)
        s = s + (f(t) * jac).sum(axis=-1)
        new = h2 * s
        done = np.all(np.abs(new - val) <= rtol * np.maximum(np.abs(new), 1e-300))
        val, h = new, h2
        if done:
            break
    return val


# ---------------------------------------------------------------------------
# Confluent hypergeometric U and Whittaker W
# ---------------------------------------------------------------------------

def _tricomi_u_integral(a: complex, b: complex, z: np.ndarray) -> np.ndarray:
    """U(a, b, z) for Re a >= 1 from its Laplace integral."""
    la = loggamma(a)

    def f(t):
        lt = np.log(t)[None, :]
        return np.exp(-z[:, None] * t[None, :] + (a - 1) * lt
                      + (b - a - 1) * np.log1p(t)[None, :] - la)

    return _de_halfline(f, rtol=1e-13)


def _tricomi_u_poly(m: int, b: complex, z: np.ndarray) -> np.ndarray:
    """U(-m, b, z) = (-1)^m sum_s C(m,s) (b+s)_(m-s) (-z)^s."""
    out = np.zeros(z.shape, dtype=complex)
    for s_ in range(m + 1):
        poch = 1.0 + 0j
        for k in range(s_, m):
            poch *= b + k
        out = out + math.comb(m, s_) * poch * (-z) ** s_
    return (-1) ** m * out


def _tricomi_u(a: complex, b: complex, z: np.ndarray) -> np.ndarray:
    if _is_nonpos_int(a, 1e-14):
        return _tricomi_u_poly(-round(a.real), b, z)
    a2 = a - b + 1
    if _is_nonpos_int(a2, 1e-14):
        return np.exp((1 - b) * np.log(z)) * _tricomi_u_poly(-round(a2.real), 2 - b, z)
    m = max(0, math.ceil(1.0 - a.real))
    if m == 0:
        return _tricomi_u_integral(a, b, z)
    hi = _tricomi_u_integral(a + m + 1, b, z)
    cur = _tricomi_u_integral(a + m, b, z)
    for k in range(m, 0, -1):
        ak = a + k
        lo = (2 * ak - b + z) * cur - ak * (ak - b + 1) * hi
        hi, cur = cur, lo
    return cur


def whittaker_w(kappa, nu, z):
    """Whittaker function ``W_{kappa,nu}(z)`` for real ``z > 0``.

    Computed as ``exp(-z/2) z^(1/2+nu) U(1/2-kappa+nu, 1+2nu, z)``, with
    ``U`` from its Laplace integral after shifting the first parameter to
    ``Re >= 1`` and recurring back down.

    Parameters
    ----------
    kappa, nu : complex
        ``|kappa|, |nu| <= 100``.
    z : float or array
        ``0 < z <= 1e3``.

    Raises
    ------
    ParameterOverflow
    """
    kappa, nu = complex(kappa), complex(nu)
    za = np.atleast_1d(np.asarray(z, dtype=float))
    if abs(kappa) > 100 or abs(nu) > 100:
        raise ParameterOverflow("parameters exceed 100 in modulus")
    if np.any(za <= 0) or np.any(za > 1e3):
        raise ParameterOverflow("z must lie in (0, 1e3]")
    if nu.real < 0:
        nu = -nu
    u = _tricomi_u(0.5 - kappa + nu, 1 + 2 * nu, za)
    out = np.exp(-0.5 * za + (0.5 + nu) * np.log(za)) * u
    return complex(out[0]) if np.ndim(z) == 0 else out


# ---------------------------------------------------------------------------
# Gauss hypergeometric function
# ---------------------------------------------------------------------------

def _f21_series(a, b, c, z, tol=1e-17, kmax=4000):
    """Direct series, vectorized over broadcast parameter arrays."""
    a, b, c, z = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c, z)))
    term = np.ones(a.shape, dtype=complex)
    total = term.copy()
    for k in range(kmax):
        term = term * (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total = total + term
        if np.all(np.abs(term) <= tol * np.abs(total)):
            break
    else:
        raise Divergent("2F1 series did not converge")
    return total


def _is_nonpos_int(c, eps=1e-12):
    r = round(c.real)
    return r <= 0 and abs(c - r) < eps


def hyp2f1(a, b, c, z):
    """Gauss hypergeometric function ``2F1(a, b; c; z)`` for ``|z| <= 1``.

    Uses the series near 0, the Pfaff transformation for ``Re z < 1/2`` and
    the connection formula around 1.

    Raises
    ------
    PoleInC
        If ``c`` is a nonpositive integer.
    Divergent
        At ``|z| = 1`` when ``Re(c - a - b) <= 0``, or for ``|z| > 1``.
    """
    a, b, c, z = complex(a), complex(b), complex(c), complex(z)
    if _is_nonpos_int(c):
        raise PoleInC(f"c = {c}")
    if abs(z) > 1 + 1e-14:
        raise Divergent("|z| > 1")
    if abs(z) <= 0.75:
        return complex(_f21_series(a, b, c, z))
    if abs(z - 1) < 1e-15:
        s = c - a - b
        if s.real <= 0:
            raise Divergent("2F1 at z=1 requires Re(c-a-b) > 0")
        return complex(cgamma(c) * cgamma(s) * rgamma(c - a) * rgamma(c - b))
    w = z / (z - 1)
    if abs(w) <= 0.75:
        return complex((1 - z) ** (-a) * _f21_series(a, c - b, c, w))
    if abs(1 - z) <= 0.75:
        return _f21_one_minus(a, b, c, z)
    # inside the disc the direct series still converges geometrically
    s = c - a - b
    if abs(z) >= 1 - 1e-9 and s.real <= 0:
        raise Divergent("no convergent representation on this arc")
    return complex(_f21_series(a, b, c, z, tol=1e-16, kmax=200000))


def _f21_one_minus(a, b, c, z):
    s = c - a - b
    if abs(s - round(s.real)) < 1e-7:
        eps = 1e-5
        return 0.5 * (_f21_one_minus(a, b + eps, c, z) + _f21_one_minus(a, b - eps, c, z))
    w = 1 - z
    t1 = cgamma(c) * cgamma(s) * rgamma(c - a) * rgamma(c - b) * _f21_series(a, b, 1 - s, w)
    t2 = (w ** s * cgamma(c) * cgamma(-s) * rgamma(a) * rgamma(b)
          * _f21_series(c - a, c - b, 1 + s, w))
    return complex(t1 + t2)


# ---------------------------------------------------------------------------
# 3F2 at unit argument
# ---------------------------------------------------------------------------

@lru_cache(maxsize=1)
def _bernoulli_numbers(m: int = 40):
    """Bernoulli numbers B_0..B_m (B_1 = -1/2) as Fractions."""
    from fractions import Fraction
    B = [Fraction(0)] * (m + 1)
    for n in range(m + 1):
        B[n] = Fraction(1) if n == 0 else -sum(math.comb(n + 1, k) * B[k] for k in range(n)) / (n + 1)
    return tuple(B)


def _bernoulli_poly(n: int, x: complex) -> complex:
    B = _bernoulli_numbers()
    return sum(math.comb(n, k) * float(B[k]) * x ** (n - k) for k in range(n + 1))


def _hurwitz_zeta(s: complex, N: int, M: int = 12) -> complex:
    """sum_{k>=N} k^-s for Re s > 1 and N large, by Euler-Maclaurin."""
    B = _bernoulli_numbers()
    out = N ** (1 - s) / (s - 1) + 0.5 * N ** (-s)
    poch = s
    for m in range(1, M + 1):
        if m > 1:
            poch = poch * (s + 2 * m - 3) * (s + 2 * m - 2)
        out += float(B[2 * m]) / math.factorial(2 * m) * poch * N ** (-s - 2 * m + 1)
    return out


def _log_gamma_ratio_coeffs(a: complex, b: complex, J: int) -> list:
    """d_n with log(Gamma(k+a)/Gamma(k+b)) = (a-b) log k + sum_n d_n k^-n."""
    return [(-1) ** (n + 1) * (_bernoulli_poly(n + 1, a) - _bernoulli_poly(n + 1, b)) / (n * (n + 1))
            for n in range(1, J + 1)]


def _exp_series(d: list, J: int) -> list:
    """Coefficients c_0..c_J of exp(sum_{n>=1} d_n x^n)."""
    c = [1.0 + 0j] + [0j] * J
    for m in range(1, J + 1):
        c[m] = sum(n * d[n - 1] * c[m - n] for n in range(1, m + 1)) / m
    return c


def _f32_terms(a, b, n):
    t = np.empty(n, dtype=complex)
    t[0] = 1.0
    for k in range(1, n):
        km = k - 1
        t[k] = t[km] * (a[0] + km) * (a[1] + km) * (a[2] + km) / ((b[0] + km) * (b[1] + km) * k)
    return t


def hyp3f2_unit(a1, a2, a3, b1, b2):
    """``3F2(a1, a2, a3; b1, b2; 1)``, relative accuracy about 1e-11.

    Terminating series are summed exactly as finite sums.  Otherwise the
    first ``N`` terms are summed directly and the remainder is obtained from
    the large-``k`` expansion of the term,

        t_k ~ C k^(-1-s) sum_j c_j k^-j ,   s = b1 + b2 - a1 - a2 - a3,

    summed termwise with Hurwitz zeta values.

    Raises
    ------
    Divergent
        If ``Re(s) <= 0``.
    PoleInC
        If a lower parameter is a nonpositive integer.
    """
    a = [complex(a1), complex(a2), complex(a3)]
    b = [complex(b1), complex(b2)]
    for bb in b:
        if _is_nonpos_int(bb):
            raise PoleInC(f"lower parameter {bb}")
    for ai in a:
        if _is_nonpos_int(ai):
            n = -round(ai.real) + 1
            return complex(np.sum(_f32_terms(a, b, n)))
    s = b[0] + b[1] - sum(a)
    if s.real <= 0:
        raise Divergent("3F2 at 1 requires positive parametric excess")
    scale = max(abs(v) for v in a + b + [1.0])
    N = int(min(200000, max(200, 40 * scale * scale)))
    J = 14
    terms = _f32_terms(a, b, N)
    head = np.sum(terms)
    d = [0j] * J
    for x, y in ((a[0], b[0]), (a[1], b[1]), (a[2], 1.0 + 0j)):
        for i, v in enumerate(_log_gamma_ratio_coeffs(x, y, J)):
            d[i] += v
    c = _exp_series(d, J)
    lc = (loggamma(b[0]) + loggamma(b[1]) - loggamma(a[0]) - loggamma(a[1]) - loggamma(a[2]))
    tail = sum(c[j] * _hurwitz_zeta(1 + s + j, N) for j in range(J + 1))
    return complex(head + np.exp(lc) * tail)


# ---------------------------------------------------------------------------
# Conical Legendre function
# ---------------------------------------------------------------------------

def _conical_large(t, x):
    """Expansion in 1/x^2 with its conjugate partner; needs t away from 0."""
    out = 0.0
    for sgn in (1.0, -1.0):
        it = 1j * sgn * t
        lg = loggamma(-it) - loggamma(0.5 - it) - 0.5 * math.log(math.pi)
        f = _f21_series(0.5 * (0.5 + it), 0.5 * (1.5 + it), 1.0 + it, 1.0 / (x * x))
        out = out + np.exp(lg + (-0.5 - it) * np.log(2.0 * x)) * f
    return out


def _conical_laplace(t, x, rtol=1e-14):
    """(1/pi) int_0^pi (x + sqrt(x^2-1) cos phi)^(-1/2+it) dphi by trapezoid.

    The integrand extends to a smooth even periodic function, so the rule
    converges geometrically; the node count is doubled until it settles.
    """
    w = math.sqrt(x * x - 1.0)
    tt = np.asarray(t, dtype=float)[..., None]

    def f(phi):
        return np.exp((-0.5 + 1j * tt) * np.log(x + w * np.cos(phi)))

    n = 32
    phi = np.linspace(0.0, math.pi, n + 1)
    vals = f(phi)
    s = vals[..., 1:-1].sum(axis=-1) + 0.5 * (vals[..., 0] + vals[..., -1])
    mag = np.abs(vals).sum(axis=-1)
    val = s / n
    while n < 2 ** 19:
        mid = f((np.arange(n) + 0.5) * math.pi / n)
        s = s + mid.sum(axis=-1)
        mag = mag + np.abs(mid).sum(axis=-1)
        n *= 2
        new = s / n
        done = np.all(np.abs(new - val) <= rtol * mag / n)
        val = new
        if done:
            break
    return val


def legendre_conical(t, x):
    """Conical function ``P_{-1/2+it}(x)`` for real ``t`` and ``x >= 1``.

    For ``x <= 10`` (or ``|t| < 1e-3``) the Laplace integral is used; beyond
    that the hypergeometric expansion in ``1/x^2``.

    Parameters
    ----------
    t : float or array
        ``|t| <= 100``.
    x : float
        ``1 <= x <= 1e4``.

    Returns
    -------
    float or ndarray
        Real values, relative accuracy about 1e-10.

    Raises
    ------
    OutOfRange
    """
    ta = np.asarray(t, dtype=float)
    if np.any(np.abs(ta) > 100):
        raise OutOfRange("|t| must not exceed 100")
    x = float(x)
    if x < 1.0 or x > 1e4:
        raise OutOfRange("x must lie in [1, 1e4]")
    tt = np.atleast_1d(ta)
    if x == 1.0:
        out = np.ones(tt.shape)
    elif x <= 10.0:
        out = _conical_laplace(tt, x).real
    else:
        out = np.empty(tt.shape)
        big = np.abs(tt) >= 1e-3
        if np.any(big):
            out[big] = _conical_large(tt[big], x).real
        if np.any(~big):
            out[~big] = _conical_laplace(tt[~big], x).real
    return float(out[0]) if ta.ndim == 0 else out


# ---------------------------------------------------------------------------
# GL(3) spherical Whittaker function
# ---------------------------------------------------------------------------

def _gl3_kernel(l1, l2, nu):
    """Gamma part of the double Mellin-Barnes integrand (without powers)."""
    lg = -loggamma(0.5 * (l1 + l2)) - math.log(4.0) - (l1 + l2) * math.log(math.pi)
    for v in nu:
        lg = lg + loggamma(0.5 * (l1 + v)) + loggamma(0.5 * (l2 - v))
    return np.exp(lg)


def gl3_whittaker(y1, y2, pt: SpectralPoint, quad: QuadratureSpec = QuadratureSpec()):
    """Spherical Whittaker function ``W(diag(y1 y2, y2, 1))`` of GL(3, R).

    Evaluates

        pi^(3/2) (2 pi i)^-2 int int y2^(1-l1) y1^(1-l2) G(l1, l2) dl2 dl1,
        G = prod_j Gamma((l1+nu_j)/2) Gamma((l2-nu_j)/2)
            / (4 pi^(l1+l2) Gamma((l1+l2)/2)),

    on the lines ``Re l1 = Re l2 = quad.shift`` truncated at ``quad.T``.
    Arrays of ``y1`` and ``y2`` give the full grid ``W[i, j] = W(y1[i], y2[j])``
    through one matrix product.

    Raises
    ------
    ContourTooShort
        When the integrand at the cutoff exceeds ``quad.tol`` relative to its
        peak.
    """
    nu = (complex(pt.nu1), complex(pt.nu2), complex(pt.nu3))
    c = float(quad.shift)
    if c <= max(abs(v.real) for v in nu):
        raise ContourTooShort("contour must lie right of all Gamma poles")
    n = int(quad.nodes)
    u = np.linspace(-quad.T, quad.T, n)
    h = u[1] - u[0]
    l1 = c + 1j * u[:, None]
    l2 = c + 1j * u[None, :]
    G = _gl3_kernel(l1, l2, nu)
    edge = max(np.abs(G[0, :]).max(), np.abs(G[:, 0]).max(), np.abs(G[-1, :]).max(),
               np.abs(G[:, -1]).max())
    if edge > quad.tol * np.abs(G).max():
        raise ContourTooShort(f"integrand at |Im| = {quad.T} is {edge:.2e} of its peak")
    ya = np.atleast_1d(np.asarray(y1, dtype=float))
    za = np.atleast_1d(np.asarray(y2, dtype=float))
    Z = np.exp(np.log(za)[:, None] * (1 - (c + 1j * u))[None, :])   # (nz, n) over l1
    A = np.exp(np.log(ya)[:, None] * (1 - (c + 1j * u))[None, :])   # (na, n) over l2
    W = A @ G.T @ Z.T  # (na, nz)
    W = W * (h * h) / (4 * np.pi ** 2) * np.pi ** 1.5
    if np.ndim(y1) == 0 and np.ndim(y2) == 0:
        return complex(W[0, 0])
    return W


# ---------------------------------------------------------------------------
# Kirillov model vectors of GL(2, R)
# ---------------------------------------------------------------------------

def _log_inv_sqrt_gamma_prod(p1, p2) -> complex:
    """Logarithm of ``1 / sqrt(Gamma(p1) Gamma(p2))`` on the principal branch."""
    lg = complex(loggamma(p1) + loggamma(p2))
    im = math.remainder(lg.imag, 2 * math.pi)
    if im == -math.pi:
        im = math.pi
    return -0.5 * complex(lg.real, im)


def _inv_sqrt_gamma_prod(p1, p2) -> complex:
    """``1 / sqrt(Gamma(p1) Gamma(p2))`` on the principal branch, without overflow."""
    return cmath.exp(_log_inv_sqrt_gamma_prod(p1, p2))


def kirillov_wn(n: int, nu, a):
    """K-isotypic Kirillov vector ``W_n(a)`` of a GL(2, R) representation.

    ``W_n(a) = i^(n sgn a) W_{sgn(a) n, nu}(4 pi |a|)
    / sqrt(Gamma(1/2 - nu + sgn(a) n) Gamma(1/2 + nu + sgn(a) n))``, taken to
    be zero whenever ``1/2 +- nu + sgn(a) n`` is a nonpositive integer.
    """
    nu = complex(nu)
    aa = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(aa == 0):
        raise ValueError("a must be nonzero")
    out = np.zeros(aa.shape, dtype=complex)
    for sg in (1, -1):
        mask = np.sign(aa) == sg
        if not np.any(mask):
            continue
        m = sg * n
        p1, p2 = 0.5 - nu + m, 0.5 + nu + m
        if _is_nonpos_int(p1) or _is_nonpos_int(p2):
            continue
        w = whittaker_w(m, nu, 4 * np.pi * np.abs(aa[mask]))
        out[mask] = (1j) ** m * w * _inv_sqrt_gamma_prod(p1, p2)
    return complex(out[0]) if np.ndim(a) == 0 else out

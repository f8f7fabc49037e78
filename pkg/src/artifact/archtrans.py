"""
Archimedean transforms and local integrals at a real place.

The test function enters only through its spherical transform: a
:class:`TestSpectrum` supplies ``beta(t) = Sh(it)``, and every weight below is
a line integral against ``beta(t) t sinh(pi t)`` (or ``t tanh(pi t)``).

Conventions
-----------
* ``V`` is the inverse spherical transform, a function of
  ``u = y + 1/y - 2 + x^2/y``.
* ``f(x) = int_0^inf V(y + 1/y - 2 + x^2/y) y^s2 d^x y`` is the unipotent
  transform, ``fhat`` its Fourier transform with ``e(-xy)``, and Mellin
  transforms are over ``(0, inf)`` against ``y^lam d^x y``.
* Contour integrals ``(1/2 pi i) int_(c)`` are evaluated on truncated vertical
  lines with Gauss-Legendre nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .nonarch import DomainError, TruncationInsufficient, TruncationSpec
from .qsymbolic import SpectralPoint
from .specfun import (
    QuadratureSpec, _bessel_k_vec, _conical_large, _conical_laplace, 
    _f21_series, _leggauss, _log_inv_sqrt_gamma_prod, _is_nonpos_int, cgamma, gauss_legendre, gl3_whittaker,
    hyp3f2_unit, kirillov_wn, loggamma, rgamma,
)

__all__ = [
    "IdentityReport", "QuadratureFail", "TestSpectrum", "arch_degen", "arch_gen",
    "arch_gen_quadrature", "dual_weight_arch", "dual_w1w2_inner", "dual_w1w2w1_inner",
    "dual_w2_inner", "fhat", "fourier_of_unipotent", "hecke_psi", "hecke_psi_numeric",
    "inverse_selberg", "kernel_identity_check", "mellin_f", "mellin_fhat",
    "numeric_mellin", "s_series", "spherical_transform_numeric", "unipotent_transform",
]


class QuadratureFail(ArithmeticError):
    """A line integral could not be certified at the requested tolerance."""


# ---------------------------------------------------------------------------
# Test spectra and reports
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TestSpectrum:
    """Even, rapidly decaying spectral datum ``beta(t) = Sh(it)``.

    Parameters
    ----------
    family : {"gaussian", "zero"}
        ``gaussian`` is ``sum_k A_k exp(-(t/w_k)^2)``.
    params : tuple of (A, w) pairs
    """

    __test__ = False  # not a pytest class

    family: str = "gaussian"
    params: tuple = ((1.0, 1.0),)

    def __post_init__(self):
        if self.family not in ("gaussian", "zero"):
            raise ValueError(f"unknown family {self.family!r}")
        if self.family == "gaussian":
            for _, w in self.params:
                if not w > 0:
                    raise ValueError("widths must be positive")

    @classmethod
    def zero(cls) -> "TestSpectrum":
        return cls("zero", ())

    def __add__(self, other: "TestSpectrum") -> "TestSpectrum":
        return TestSpectrum("gaussian", tuple(self.params) + tuple(other.params))

    def scaled(self, c: complex) -> "TestSpectrum":
        return TestSpectrum(self.family, tuple((c * A, w) for A, w in self.params))

    @property
    def width(self) -> float:
        return max((w for _, w in self.params), default=1.0)

    def value(self, t):
        """``beta(t)``; even in ``t``."""
        t = np.asarray(t, dtype=complex)
        out = np.zeros(t.shape, dtype=complex)
        if self.family == "zero":
            return out
        for A, w in self.params:
            out = out + A * np.exp(-(t / w) ** 2)
        return out

    def sh(self, nu):
        """Spherical transform ``Sh(nu) = beta(-i nu)``."""
        return self.value(-1j * np.asarray(nu, dtype=complex))

    def is_zero(self) -> bool:
        return self.family == "zero" or all(A == 0 for A, _ in self.params)


@dataclass
class IdentityReport:
    """Outcome of comparing two evaluations of one identity."""

    identity: str
    lhs: complex
    rhs: complex
    abs_err: float
    rel_err: float
    tol: float
    passed: bool
    meta: dict = field(default_factory=dict)

    @classmethod
    def compare(cls, identity: str, lhs, rhs, tol: float, **meta) -> "IdentityReport":
        lhs, rhs = complex(lhs), complex(rhs)
        abs_err = abs(lhs - rhs)
        rel_err = abs_err / abs(rhs) if abs(rhs) >= 1e-14 else abs_err
        ok = bool(np.isfinite(rel_err) and rel_err <= tol)
        return cls(identity, lhs, rhs, abs_err, rel_err, tol, ok, dict(meta))

    def to_dict(self) -> dict:
        c = lambda z: [z.real, z.imag]
        return {"identity": self.identity, "lhs": c(self.lhs), "rhs": c(self.rhs),
                "abs_err": self.abs_err, "rel_err": self.rel_err, "tol": self.tol,
                "passed": self.passed, "meta": self.meta}


def _t_rule(beta: TestSpectrum, quad: QuadratureSpec):
    """Gauss-Legendre rule on ``[0, T]`` for even t-integrands."""
    T = quad.T * beta.width
    if not beta.is_zero():
        tail = abs(complex(beta.value(T))) * T * math.exp(math.pi * T / 2)
        if tail > quad.tol:
            raise QuadratureFail(f"beta is not negligible at the cutoff T={T}")
    return gauss_legendre(0.0, T, quad.nodes)


def _lg(*zs):
    return sum(loggamma(z) for z in zs)


def _sinh_weight(t):
    """t sinh(pi t)."""
    return t * np.sinh(np.pi * t)


# ---------------------------------------------------------------------------
# Inverse spherical transform and the unipotent chain
# ---------------------------------------------------------------------------

def _conical_any(t, x):
    if x == 1.0:
        return np.ones_like(t)
    if x <= 10.0:
        return _conical_laplace(t, x).real
    out = np.empty_like(t)
    big = np.abs(t) >= 1e-3
    if np.any(big):
        out[big] = _conical_large(t[big], x).real
    if np.any(~big):
        out[~big] = _conical_laplace(t[~big], x).real
    return out


def inverse_selberg(u, beta: TestSpectrum, quad: QuadratureSpec = QuadratureSpec()):
    """Inverse spherical transform

        V(u) = 1/(4 pi) int_R P_{-1/2+it}(1 + u/2) beta(t) t tanh(pi t) dt.

    Parameters
    ----------
    u : float or array, ``0 <= u <= 1e4``
    """
    ua = np.atleast_1d(np.asarray(u, dtype=float))
    if np.any(ua < 0) or np.any(ua > 1e4):
        raise DomainError("u must lie in [0, 1e4]")
    if beta.is_zero():
        out = np.zeros(ua.shape)
    else:
        t, w = _t_rule(beta, quad)
        wt = w * beta.value(t).real * t * np.tanh(np.pi * t) / (2 * np.pi)
        out = np.array([np.dot(_conical_any(t, 1.0 + 0.5 * x), wt) for x in ua])
    return float(out[0]) if np.ndim(u) == 0 else out


@lru_cache(maxsize=16)
def _v_table(beta: TestSpectrum, quad: QuadratureSpec, R: float = 14.0, deg: int = 160):
    """Chebyshev interpolant of V as a function of the distance r, u = 2 cosh r - 2."""
    t, w = _t_rule(beta, quad)
    wt = w * beta.value(t).real * t * np.tanh(np.pi * t) / (2 * np.pi)

    def V_of_r(r):
        return np.array([np.dot(_conical_any(t, math.cosh(x)), wt) for x in np.atleast_1d(r)])

    cheb = np.polynomial.Chebyshev.interpolate(V_of_r, deg, domain=[0.0, R])
    return cheb, R


def _v_fast(u, beta, quad):
    cheb, R = _v_table(beta, quad)
    r = np.arccosh(1.0 + 0.5 * np.asarray(u))
    return np.where(r <= R, cheb(np.minimum(r, R)), 0.0)


def unipotent_transform(x, s2, beta: TestSpectrum, quad: QuadratureSpec = QuadratureSpec(),
                        step: float = 0.02):
    """``f(x) = int_0^inf V(y + 1/y - 2 + x^2/y) y^s2 d^x y`` (two-stage oracle)."""
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    if beta.is_zero():
        return np.zeros(xa.shape, dtype=complex) if np.ndim(x) else 0j
    L = 16.0 + 2 * math.log1p(float(np.max(np.abs(xa))))
    ell = np.arange(-L, L + 1e-12, step)
    y = np.exp(ell)
    u = y[None, :] + 1.0 / y[None, :] - 2.0 + xa[:, None] ** 2 / y[None, :]
    vals = _v_fast(np.minimum(u, 1e300), beta, quad) * np.exp(complex(s2) * ell)[None, :]
    out = vals.sum(axis=1) * step
    return complex(out[0]) if np.ndim(x) == 0 else out


def fourier_of_unipotent(y, s2, beta, quad: QuadratureSpec = QuadratureSpec(), X: float = 60.0,
                         n: int = 4000):
    """Direct Fourier transform ``2 int_0^inf f(x) cos(2 pi x y) dx`` of the unipotent transform."""
    x, w = gauss_legendre(0.0, X, n)
    f = unipotent_transform(x, s2, beta, quad)
    ya = np.atleast_1d(np.asarray(y, dtype=float))
    out = 2 * (np.cos(2 * np.pi * np.outer(ya, x)) * (f * w)[None, :]).sum(axis=1)
    return complex(out[0]) if np.ndim(y) == 0 else out


def spherical_transform_numeric(nu, beta: TestSpectrum, quad: QuadratureSpec = QuadratureSpec(),
                                hi: float = 12.0, nodes: int = 1500) -> complex:
    """Forward transform of ``V`` back to ``Sh(nu)`` for ``0 < Re nu < 1``.

    ``Sh(nu) = int_R int_0^inf V(y + 1/y - 2 + x^2/y) y^(nu - 1/2) d^x y dx``,
    computed as the integral over ``R`` of the unipotent transform with
    ``s2 = nu - 1/2``; an oracle for :func:`inverse_selberg`.
    """
    nu = complex(nu)
    if not 0 < nu.real < 1:
        raise DomainError("0 < Re nu < 1 is required")
    f = lambda x: unipotent_transform(x, nu - 0.5, beta, quad)
    return 2 * numeric_mellin(f, 1.0, lo=-30.0, hi=hi, n=nodes)


def numeric_mellin(func, lam, lo: float = -40.0, hi: float = 6.0, n: int = 3000,
                   subtract_origin: bool = False):
    """``int_0^inf func(x) x^lam d^x x`` in the log variable.

    With ``subtract_origin`` the term ``func(0) exp(-x^2)`` is removed and
    its transform ``func(0) Gamma(lam/2) / 2`` added back, which makes a
    nonzero value at the origin harmless.
    """
    lam = complex(lam)
    xi, w = gauss_legendre(lo, hi, n)
    x = np.exp(xi)
    f = np.asarray(func(x), dtype=complex)
    if subtract_origin:
        f0 = complex(np.asarray(func(np.array([0.0])))[0])
        f = f - f0 * np.exp(-x * x)
        return complex(np.sum(f * np.exp(lam * xi) * w) + f0 * cgamma(lam / 2) / 2)
    return complex(np.sum(f * np.exp(lam * xi) * w))


# ---------------------------------------------------------------------------
# Kernel identity, Fourier transform and Mellin transforms
# ---------------------------------------------------------------------------

def _bessel_matrix(t, x, h: float = 0.05):
    """``K_{it}(x)`` for all pairs ``(t_i, x_j)`` with real ``t``.

    Trapezoid rule for ``int_0^inf exp(-x cosh u) cos(t u) du``, written as
    one matrix product; absolute error about 1e-16 for ``|t| <= 20``.
    """
    t = np.asarray(t, dtype=float)
    x = np.asarray(x, dtype=float)
    U = math.acosh(40.0 / float(np.min(x))) if np.min(x) < 40.0 else 1.0
    u = np.arange(0.0, U + h, h)
    wu = np.full(u.shape, h)
    wu[0] = 0.5 * h
    C = np.cos(np.outer(t, u)) * wu[None, :]
    E = np.exp(-np.outer(np.cosh(u), x))
    return C @ E


def kernel_identity_check(x: float, y: float, beta: TestSpectrum,
                          quad: QuadratureSpec = QuadratureSpec(), tol: float = 1e-5,
                          nb: int = 400) -> IdentityReport:
    """Compare ``V(y + 1/y - 2 + x^2/y)`` with the Bessel double integral

        (8 sqrt(y) / pi^2) int_R int_0^inf K_{it}(2 pi b) K_{it}(2 pi b y)
                           cos(2 pi b x) db beta(t) t sinh(pi t) dt.
    """
    if not y > 0:
        raise DomainError("y must be positive")
    u = y + 1.0 / y - 2.0 + x * x / y
    lhs = inverse_selberg(u, beta, quad)
    if beta.is_zero():
        return IdentityReport.compare("kernel-identity", lhs, 0.0, tol, x=x, y=y)
    t, wt = _t_rule(beta, quad)
    # the integrand is bounded at b = 0 (log-singular for t = 0) and decays
    # like exp(-2 pi b (1 + y)); the cut at exp(-40) is far below 1e-12
    bmax = 40.0 / (2 * np.pi * min(1.0, y))
    # log nodes below b0, linear nodes above it resolving cos(2 pi b x)
    b0 = min(1.0 / (1.0 + abs(x)), 0.5 * bmax)
    xi, wl = gauss_legendre(-40.0, math.log(b0), nb)
    bl, wr = gauss_legendre(b0, bmax, nb // 2 + int(12 * abs(x) * (bmax - b0)))
    b = np.concatenate([np.exp(xi), bl])
    wb = np.concatenate([wl * np.exp(xi), wr])
    K1 = _bessel_matrix(t, 2 * np.pi * b)
    K2 = _bessel_matrix(t, 2 * np.pi * b * y)
    inner = (K1 * K2 * (np.cos(2 * np.pi * b * x) * wb)[None, :]).sum(axis=1)
    tw = beta.value(t).real * _sinh_weight(t) * wt
    rhs = 8 * math.sqrt(y) / np.pi ** 2 * 2 * np.dot(inner, tw)
    return IdentityReport.compare("kernel-identity", lhs, rhs, tol, x=x, y=y, u=u)


def fhat(y, s2, beta: TestSpectrum, quad: QuadratureSpec = QuadratureSpec()):
    """Closed line integral for the Fourier transform of the unipotent transform,

        fhat(y) = 2 |y|^(-1/2-s2) / pi^(5/2+s2)
                  int_R beta(t) t sinh(pi t) K_{it}(2 pi |y|)
                  Gamma((s2+1/2+it)/2) Gamma((s2+1/2-it)/2) dt.
    """
    s2 = complex(s2)
    if abs(s2.real) >= 0.5:
        raise DomainError("|Re s2| < 1/2 is required")
    ya = np.abs(np.atleast_1d(np.asarray(y, dtype=float)))
    if np.any(ya == 0):
        raise DomainError("y must be nonzero")
    if beta.is_zero():
        return np.zeros(ya.shape, dtype=complex) if np.ndim(y) else 0j
    t, wt = _t_rule(beta, quad)
    g = np.exp(_lg((s2 + 0.5 + 1j * t) / 2, (s2 + 0.5 - 1j * t) / 2))
    tw = beta.value(t) * _sinh_weight(t) * g * wt
    K = _bessel_matrix(t, 2 * np.pi * ya)
    out = 2 * (tw[:, None] * K).sum(axis=0)
    out = out * 2 * ya ** (-0.5 - s2) / np.pi ** (2.5 + s2)
    return complex(out[0]) if np.ndim(y) == 0 else out


def mellin_fhat(lam, s2, beta: TestSpectrum, quad: QuadratureSpec = QuadratureSpec()):
    """Closed form of ``int_0^inf fhat(y) y^lam d^x y``:

        pi^(-lam) / (2 pi^2) int_R beta(t) t sinh(pi t)
            Gamma((lam-1/2-s2+-it)/2) Gamma((s2+1/2+-it)/2) dt.

    Requires ``Re(lam) > 1/2 + Re(s2) + 0.1``.
    """
    lam, s2 = complex(lam), complex(s2)
    if lam.real <= 0.5 + s2.real + 0.1:
        raise DomainError("Re(lam) > 1/2 + Re(s2) + 0.1 is required")
    if beta.is_zero():
        return 0j
    t, wt = _t_rule(beta, quad)
    it = 1j * t
    g = np.exp(_lg((lam - 0.5 - s2 + it) / 2, (lam - 0.5 - s2 - it) / 2,
                   (s2 + 0.5 + it) / 2, (s2 + 0.5 - it) / 2))
    val = 2 * np.sum(beta.value(t) * _sinh_weight(t) * g * wt)
    return complex(np.pi ** (-lam) / (2 * np.pi ** 2) * val)


def mellin_f(lam, s2, beta: TestSpectrum, quad: QuadratureSpec = QuadratureSpec()):
    """Closed form of ``int_0^inf f(x) x^lam d^x x``:

        pi^(-5/2) Gamma(lam/2) / (16 Gamma((1-lam)/2))
            int_R Gamma(1/4+s2/2+-it/2) Gamma(1/4-s2/2+-it/2-lam/2)
                  beta(t) t sinh(pi t) dt,

    valid for ``|Re s2| < 1/2`` and ``0 < Re lam < 1/2 - Re s2``.
    """
    lam, s2 = complex(lam), complex(s2)
    if not (abs(s2.real) < 0.5 and 0 < lam.real < 0.5 - s2.real):
        raise DomainError("lam outside the strip 0 < Re lam < 1/2 - Re s2")
    if beta.is_zero():
        return 0j
    t, wt = _t_rule(beta, quad)
    it = 1j * t
    g = np.exp(_lg(0.25 + s2 / 2 + it / 2, 0.25 + s2 / 2 - it / 2,
                   0.25 - s2 / 2 + it / 2 - lam / 2, 0.25 - s2 / 2 - it / 2 - lam / 2))
    val = 2 * np.sum(beta.value(t) * _sinh_weight(t) * g * wt)
    pref = np.pi ** -2.5 * cgamma(lam / 2) / (16 * cgamma((1 - lam) / 2))
    return complex(pref * val)


# ---------------------------------------------------------------------------
# Hecke integrals of Kirillov vectors
# ---------------------------------------------------------------------------

def _f21_regularized_half(a, b, c):
    """``2F1(a, b; c; 1/2) / Gamma(c)`` as ``(mantissa, log scale)``, vectorized over ``c``.

    Where ``Re c`` is small, the value is carried down from ``c + m`` with
    the contiguous relation in ``c`` (stable downward at ``z = 1/2``),
    renormalizing as it grows.
    """
    a, b, c = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (a, b, c)))
    mant = np.empty(c.shape, dtype=complex)
    logs = np.zeros(c.shape, dtype=complex)
    fa, fb, fc = a.ravel(), b.ravel(), c.ravel()
    rm, rl = mant.ravel(), logs.ravel()
    z = 0.5
    for k in range(fc.size):
        A, B, C = fa[k], fb[k], fc[k]
        m = max(0, math.ceil(2.0 - C.real))
        if m == 0:
            rm[k] = complex(_f21_series(A, B, C, z))
            rl[k] = -complex(loggamma(C))
            continue
        c1 = C + m
        f1 = complex(_f21_series(A, B, c1, z)) * complex(rgamma(c1))
        f2 = complex(_f21_series(A, B, c1 + 1, z)) * complex(rgamma(c1 + 1))
        scale = 0.0
        for j in range(m):
            cc = c1 - j
            f0 = ((cc - 1 - (2 * cc - A - B - 1) * z) * f1 + (cc - A) * (cc - B) * z * f2) / (1 - z)
            f1, f2 = f0, f1
            big = abs(f1)
            if big > 1e100:
                f1, f2 = f1 / big, f2 / big
                scale += math.log(big)
        rm[k], rl[k] = f1, scale
    return mant, logs


def hecke_psi(n: int, nu, lam):
    """Hecke integral ``int_{R^x} W_n(a) |a|^lam d^x a`` in closed form:

        Gamma(lam+1/2+nu) Gamma(lam+1/2-nu) / (4 pi)^lam
        sum_{eps=+-1} i^(eps n) 2F1(lam+nu+1/2, lam-nu+1/2; lam-eps n+1; 1/2)
            / (Gamma(lam-eps n+1) sqrt(Gamma(1/2-nu+eps n) Gamma(1/2+nu+eps n))),

    each term taken to be zero when ``1/2 +- nu + eps n`` is a nonpositive
    integer.  Vectorized over ``lam``; large ``|n|`` is handled in log scale.
    """
    nu = complex(nu)
    la = np.asarray(lam, dtype=complex)
    pre = loggamma(la + 0.5 + nu) + loggamma(la + 0.5 - nu) - la * math.log(4 * math.pi)
    total = np.zeros(la.shape, dtype=complex)
    for eps in (1, -1):
        m = eps * n
        p1, p2 = 0.5 - nu + m, 0.5 + nu + m
        if _is_nonpos_int(p1) or _is_nonpos_int(p2):
            continue
        mant, logs = _f21_regularized_half(la + nu + 0.5, la - nu + 0.5, la - m + 1)
        total = total + (1j) ** m * mant * np.exp(logs + pre + _log_inv_sqrt_gamma_prod(p1, p2))
    return complex(total) if total.ndim == 0 else total


def hecke_psi_numeric(n: int, nu, lam, lo: float = -120.0, nodes: int = 3000):
    """Direct Mellin transform of the Kirillov vector over both signs of ``a``.

    Gauss-Legendre in ``log|a|`` on ``[lo, log(75)]``; the vector decays like
    ``exp(-2 pi |a|)`` above and like ``|a|^(1/2 - |Re nu|)`` below.  ``lam``
    may be an array, in which case the vector is evaluated once for all of it.
    """
    la = np.asarray(lam, dtype=complex)
    xi, w = gauss_legendre(lo, math.log(75.0), nodes)
    a = np.exp(xi)
    vec = (kirillov_wn(n, nu, a) + kirillov_wn(n, nu, -a)) * w
    tot = np.exp(np.multiply.outer(la, xi)) @ vec
    return complex(tot) if la.ndim == 0 else tot


# ---------------------------------------------------------------------------
# The series over K-types
# ---------------------------------------------------------------------------

def _k_types(nu_sigma: complex, disc: bool, N: int):
    """Half-indices n with 2n in the K-type set, |n| <= N."""
    if disc:
        nmin = math.ceil((2 * nu_sigma.real + 1) / 2 - 1e-12)
        return [n for n in range(-N, N + 1) if abs(n) >= nmin]
    return list(range(-N, N + 1))


def s_series(lam1, lam2, pt: SpectralPoint, nu_sigma, disc: bool = False,
             trunc: TruncationSpec = TruncationSpec(N=100, tail_tol=1e-2), *,
             certificate: bool = False):
    """Series over K-types

        sum_n Gamma(|n| + 1/2 - lam1/2 + (s2-s1)/2) / Gamma(|n| + 1/2 + lam1/2 - (s2-s1)/2)
              Psi(W_n; -lam2 + (s2-s1)/2) conj(Psi(W_n; conj((3 s1 + s2)/2))).

    Vectorized over ``lam1`` and ``lam2`` (broadcast).  Since
    ``|Psi(W_n; lam)| ~ |n|^(|Re lam| - 1/2)``, the terms decay like ``|n|^-p``
    with

        p = 1 + Re lam1 - Re(s2-s1) - |Re(lam2 - (s2-s1)/2)| - |Re(3 s1 + s2)/2|,

    as a sum of several oscillating power laws, so no tail model is fitted.  The certificate is ``max |S_N - S_(N/2)|`` over the broadcast
    grid, relative to ``max |S_N|``; it bounds the
    neglected tail whenever the decay is at least quadratic in ``N``.

    Raises
    ------
    DomainError
        Outside the convergence region.
    TruncationInsufficient
        When the certificate exceeds ``trunc.tail_tol`` relative.
    """
    s1, s2 = complex(pt.s1), complex(pt.s2)
    nu_sigma = complex(nu_sigma)
    l1 = np.asarray(lam1, dtype=complex)
    l2 = np.asarray(lam2, dtype=complex)
    d = (s2 - s1) / 2
    theta = abs(nu_sigma.real) if not disc else 0.0
    w = (3 * s1 + s2) / 2
    if np.any(0.5 - l1.real / 2 + d.real <= 0):
        raise DomainError("1/2 - lam1/2 + (s2-s1)/2 > 0 is required")
    if not (-0.5 + theta < w.real < 1):
        raise DomainError("-1/2 + theta < Re(3 s1 + s2)/2 < 1 is required")
    if np.any((l2 - l1).real - s1.real >= 0):
        raise DomainError("Re(lam2 - lam1) - Re(s1) < 0 is required")
    shape = np.broadcast_shapes(l1.shape, l2.shape)
    wc = np.conj(w)
    N = int(trunc.N)
    g = {}
    # each term factors as (lam1 part) * (lam2 part) * constant
    for n in _k_types(nu_sigma, disc, N):
        k = abs(n)
        ratio = np.exp(loggamma(k + 0.5 - l1 / 2 + d) - loggamma(k + 0.5 + l1 / 2 - d))
        term = ratio * (hecke_psi(n, nu_sigma, -l2 + d) * np.conj(hecke_psi(n, nu_sigma, wc)))
        g[k] = g.get(k, 0) + np.broadcast_to(term, shape)
    total = sum(g.values(), np.zeros(shape, dtype=complex))
    err = np.zeros(shape)
    if N >= 2:
        half = sum((v for k, v in g.items() if k <= N // 2), np.zeros(shape, dtype=complex))
        err = np.abs(total - half)
        scale = max(float(np.max(np.abs(total))), 1e-300)
        if np.max(err) > trunc.tail_tol * scale:
            raise TruncationInsufficient(
                f"K-type series certificate {float(np.max(err)) / scale:.2e} exceeds {trunc.tail_tol}")
    val = complex(total) if total.ndim == 0 else total
    if certificate:
        return val, float(np.max(err))
    return val


# ---------------------------------------------------------------------------
# Dual weight assembly
# ---------------------------------------------------------------------------

def dual_weight_arch(pt: SpectralPoint, nu_sigma, beta: TestSpectrum,
                     quad: QuadratureSpec = QuadratureSpec(), *, disc: bool = False,
                     c1: float | None = None, c2: float | None = None,
                     lam_T: float = 20.0, lam_h: float = 0.125, lam_nodes: int = 6,
                     trunc: TruncationSpec = TruncationSpec(N=40, tail_tol=1.0)) -> complex:
    """Archimedean dual weight

        pi^(s1-s2) / (16 pi^2) int_R Gamma(1/4 + s2/2 +- it/2) I(t) beta(t) t sinh(pi t) dt,

    with ``I(t)`` the double contour integral over ``(lam1, lam2)`` of

        Gamma((lam1+s1-s2)/2) prod_j Gamma((lam1+nu_j)/2) Gamma((lam2-nu_j)/2)
        / (Gamma((1-lam1-s1+s2)/2) Gamma((lam1+lam2)/2))
        Gamma(1/4 +- it/2 - lam1/2 - s1/2) S(lam1, lam2) pi^(-lam2).

    The slowest operation of the module.  The t-dependence factors out of
    the double contour, so the K-type series is evaluated once per node
    pair.  Both lines use composite rules with panels of width ``lam_h``
    (``lam_nodes`` points each) where poles approach them: for ``lam1`` the
    moving poles at ``1/2 - s1 +- it``, for ``lam2`` those at ``nu_j``.

    Raises
    ------
    ContourTooShort
        When the contour shifts violate ``theta < c1, c2 < 1``,
        ``c2 - c1 - Re s1 < 1`` or ``c1 < 1/2 - Re s1``.
    """
    from .specfun import ContourTooShort
    s1, s2 = complex(pt.s1), complex(pt.s2)
    nu = (complex(pt.nu1), complex(pt.nu2), complex(pt.nu3))
    c1 = quad.shift if c1 is None else c1
    c2 = quad.shift if c2 is None else c2
    theta = max(abs(v.real) for v in nu)
    if not (theta < c1 < 1 and theta < c2 < 1 and c2 - c1 - s1.real < 1):
        raise ContourTooShort("contour shifts violate theta < c1, c2 < 1, c2 - c1 - Re s1 < 1")
    if not c1 < 0.5 - s1.real:
        raise ContourTooShort("c1 < 1/2 - Re s1 is required to separate the t-dependent poles")
    if beta.is_zero():
        return 0j
    t, wt = _t_rule(beta, quad)
    u1, w1 = _panel_rule(lam_T, float(t[-1]) + 1.0, lam_h, lam_nodes)
    u2, w2 = _panel_rule(lam_T, 2.0 + max(abs(v.imag) for v in nu), lam_h, lam_nodes)
    L1 = c1 + 1j * u1
    L2 = c2 + 1j * u2
    # lam1-only and lam2-only factors
    g1 = loggamma((L1 + s1 - s2) / 2) - loggamma((1 - L1 - s1 + s2) / 2)
    g2 = -L2 * math.log(math.pi)
    for v in nu:
        g1 = g1 + loggamma((L1 + v) / 2)
        g2 = g2 + loggamma((L2 - v) / 2)
    G12 = np.exp(g1[:, None] + g2[None, :] - loggamma((L1[:, None] + L2[None, :]) / 2))
    S = s_series(L1[:, None], L2[None, :], pt, nu_sigma, disc, trunc)
    inner = (G12 * S * w2[None, :]).sum(axis=1) / (2 * np.pi)      # over lam2
    it = 1j * t
    A = np.exp(loggamma(0.25 + it[:, None] / 2 - L1[None, :] / 2 - s1 / 2)
               + loggamma(0.25 - it[:, None] / 2 - L1[None, :] / 2 - s1 / 2))
    I_t = (A * (inner * w1)[None, :]).sum(axis=1) / (2 * np.pi)     # over lam1
    outer = np.exp(_lg(0.25 + s2 / 2 + it / 2, 0.25 + s2 / 2 - it / 2))
    val = 2 * np.sum(outer * I_t * beta.value(t) * _sinh_weight(t) * wt)
    return complex(np.pi ** (s1 - s2) / (16 * np.pi ** 2) * val)


# ---------------------------------------------------------------------------
# Vertical-line Mellin-Barnes integrals and the dual-side reductions
# ---------------------------------------------------------------------------

def _panel_rule(T: float, core: float, h: float, n: int):
    """Symmetric composite Gauss-Legendre rule on ``[-T, T]``.

    Panels of width ``h`` cover ``|u| <= core`` (where poles may sit close to
    the line); beyond, panel widths grow geometrically.
    """
    edges = list(np.arange(0.0, min(core, T) + 1e-12, h))
    if edges[-1] < min(core, T):
        edges.append(min(core, T))
    while edges[-1] < T:
        edges.append(min(T, edges[-1] + max(h, 0.3 * edges[-1])))
    edges = np.array(edges)
    x, w = _leggauss(n)
    mid, half = 0.5 * (edges[:-1] + edges[1:]), 0.5 * np.diff(edges)
    u = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    wu = (half[:, None] * w[None, :]).ravel()
    return np.concatenate([-u[::-1], u]), np.concatenate([wu[::-1], wu])


def _mb_line(log_integrand, c: float, T: float, n: int = 24, core: float = 5.0,
             h: float = 0.2) -> complex:
    """``(1/2 pi i) int_{c-iT}^{c+iT} exp(log_integrand(lam)) dlam`` on a panel rule."""
    u, wu = _panel_rule(T, core, h, n)
    vals = np.exp(log_integrand(c + 1j * u))
    return complex(np.sum(vals * wu) / (2 * np.pi))


def _barnes_second(plus, minus, den):
    """Closed form of ``(1/2 pi i) int dlam`` of ``prod Gamma((lam+p)/2) prod Gamma((m-lam)/2)
    / Gamma((e-lam)/2)`` for two ``p``, three ``m`` and ``(e - sum m - sum p)/2 = 0``.

    Equals ``2 prod_{i,j} Gamma((p_i+m_j)/2) / prod_j Gamma((e-m_j)/2)``.
    """
    lg = math.log(2.0) + 0j
    for p in plus:
        for m in minus:
            lg = lg + loggamma((p + m) / 2)
    for m in minus:
        lg = lg - loggamma((den - m) / 2)
    return np.exp(lg)


def _balance(plus, minus, den):
    return den - sum(minus) - sum(plus)


def _dual_w2_params(t, pt):
    s1, s2 = complex(pt.s1), complex(pt.s2)
    n1, n2, n3 = complex(pt.nu1), complex(pt.nu2), complex(pt.nu3)
    it = 1j * t
    plus = (-0.5 - s2 + it, -0.5 - s2 - it)
    minus = (1 - n2 + s2 - s1, 1 - n3 + s2 - s1, 1 - n2 - n3 + s1 + s2)
    den = 2 + n1 - n2 - n3 + s2 - s1
    return plus, minus, den


def _dual_w1w2_params(t, pt):
    s1, s2 = complex(pt.s1), complex(pt.s2)
    n1, n2, n3 = complex(pt.nu1), complex(pt.nu2), complex(pt.nu3)
    it = 1j * t
    plus = (-0.5 - s2 + it, -0.5 - s2 - it)
    minus = (1 + n2 + s1 + s2, 1 + n1 + n2 + s2 - s1, 1 + n2 + n3 + s2 - s1)
    den = 2 + 2 * n2 + s2 - s1
    return plus, minus, den


def _contour_for(plus, minus, den, T, n, core=0.0):
    lo = max(-p.real for p in plus)
    hi = min(m.real for m in minus)
    if not lo < hi:
        raise DomainError("no vertical line separates the pole sequences")
    c = 0.5 * (lo + hi)

    def lf(lam):
        out = -loggamma((den - lam) / 2)
        for p in plus:
            out = out + loggamma((lam + p) / 2)
        for m in minus:
            out = out + loggamma((m - lam) / 2)
        return out

    return _mb_line(lf, c, T, n, core=abs(core) + 5.0)


def dual_w2_inner(t: float, pt: SpectralPoint, method: str = "closed",
                  T: float = 60.0, n: int = 24) -> complex:
    """Inner lambda-integral of the dual ``w2`` weight.

    ``(1/2 pi i) int Gamma((lam-1/2-s2+-it)/2) Gamma((1-nu2+s2-s1-lam)/2)
    Gamma((1-nu3+s2-s1-lam)/2) Gamma((1-nu2-nu3+s1+s2-lam)/2)
    / Gamma((2+nu1-nu2-nu3+s2-s1-lam)/2) dlam``; the closed form is Barnes'
    second lemma, applicable because ``nu1 + nu2 + nu3 = 0``.
    """
    plus, minus, den = _dual_w2_params(t, pt)
    if method == "contour":
        return _contour_for(plus, minus, den, T + abs(t), n, core=t)
    if abs(_balance(plus, minus, den)) > 1e-12:
        raise DomainError("Barnes' second lemma needs nu1 + nu2 + nu3 = 0")
    return complex(_barnes_second(plus, minus, den))


def dual_w1w2_inner(t: float, pt: SpectralPoint, method: str = "closed",
                    T: float = 60.0, n: int = 24) -> complex:
    """Inner integral ``I_2(t)`` of the dual ``w1 w2`` weight.

    Methods
    -------
    contour
        Numerical vertical-line integral.
    closed
        Barnes' second lemma; the integrand is balanced because
        ``nu1 + nu2 + nu3 = 0``.
    hyp3f2
        The single-3F2 expression with Gamma prefactor (kept for comparison;
        it does not reproduce the contour).
    """
    plus, minus, den = _dual_w1w2_params(t, pt)
    if method == "contour":
        return _contour_for(plus, minus, den, T + abs(t), n, core=t)
    if method == "closed":
        if abs(_balance(plus, minus, den)) > 1e-12:
            raise DomainError("balance requires nu1 + nu2 + nu3 = 0")
        return complex(_barnes_second(plus, minus, den))
    if method == "hyp3f2":
        s1, s2 = complex(pt.s1), complex(pt.s2)
        n1, n2, n3 = complex(pt.nu1), complex(pt.nu2), complex(pt.nu3)
        if (1 + n2 - n1).real <= 0:
            raise DomainError("Re(1 + nu2 - nu1) > 0 is required")
        it = 1j * t
        x = (1.5 + n2 + n3 - s1 - s2) / 2
        y = (1.5 + n2 + s1 - s2) / 2
        e = (1 + n1 + n2 + s2 - s1) / 2
        pre = np.exp(_lg(x + it / 2, x - it / 2, y + it / 2, y - it / 2, e)
                     - _lg(1 + n2 - (s1 + s2) / 2, 1 + n2 + (s2 - s1) / 2))
        F = hyp3f2_unit(e, x + it / 2, y + it / 2, 1 + n2 + (s2 - s1) / 2,
                        (3 + 2 * n2 + n3 - s1 - 3 * s2 + it) / 2)
        return complex(pre * F)
    raise ValueError(f"unknown method {method!r}")


def dual_w1w2w1_inner(t: float, pt: SpectralPoint, method: str = "contour",
                      T: float = 60.0, n: int = 24) -> complex:
    """Inner integral ``I_3(t)`` of the dual ``w1 w2 w1`` weight,

    ``(1/2 pi i) int Gamma((lam-1/2-s2+-it)/2) Gamma((1+nu2+nu3+s2-s1-lam)/2)
    Gamma((2+nu2+s1+s2-lam)/2) / Gamma(1+nu2+(s2-s1-lam)/2) dlam``.

    ``method="hyp3f2"`` gives the single-3F2 expression (kept for
    comparison; it does not reproduce the contour).
    """
    s1, s2 = complex(pt.s1), complex(pt.s2)
    n2, n3 = complex(pt.nu2), complex(pt.nu3)
    it = 1j * t
    if method == "contour":
        plus = (-0.5 - s2 + it, -0.5 - s2 - it)
        minus = (1 + n2 + n3 + s2 - s1, 2 + n2 + s1 + s2)
        den = 2 + 2 * n2 + s2 - s1
        return _contour_for(plus, minus, den, T + abs(t), n, core=t)
    if method == "hyp3f2":
        if (n2 / 2 - s1).real <= 0 or (1 - n2 - 2 * n3).real <= 0:
            raise DomainError("nu2/2 - s1 > 0 and Re(1 - nu2 - 2 nu3) > 0 are required")
        a = (1 + 2 * n2 + 2 * n3 - 2 * s1) / 4
        pre = np.exp(_lg(a + it / 2, a - it / 2, (1 + 2 * s1 - n3) / 2)
                     - _lg(2 * a, (1 + n2 - n3) / 2))
        F = hyp3f2_unit((1 + 2 * s1 - n3) / 2, a + it / 2, a - it / 2, (1 + n2 - n3) / 2, 2 * a)
        return complex(pre * F)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Degenerate and generic local integrals
# ---------------------------------------------------------------------------

def _gg_s2(s2, t):
    return _lg((s2 + 0.5 + 1j * t) / 2, (s2 + 0.5 - 1j * t) / 2)


def _spec_kernel(weyl, pt, t):
    """log of (prefactor, t-kernel) for the spec-side degenerate weights."""
    s1, s2 = complex(pt.s1), complex(pt.s2)
    n1, n2, n3 = complex(pt.nu1), complex(pt.nu2), complex(pt.nu3)
    it = 1j * t
    lp = np.log
    if weyl == "w2":
        pre = (_lg((1 + n1 + n2) / 2 + s1, (1 + n1 + n3) / 2 + s1)
               - lp(16) - (2 + n3 + s1 + s2) * lp(np.pi) - _lg((1 + n2 - n3) / 2, 1 + n1 + s1))
        ker = sum(loggamma((0.5 + n1 + s1 + e * it) / 2) + loggamma((-0.5 - n1 - s1 + e * it) / 2)
                  for e in (1, -1))
    elif weyl == "w1w2":
        pre = (_lg((n1 - n2) / 2, (1 + n1 + n2 + 2 * s1) / 2, (1 + n2 + n3 + 2 * s1) / 2)
               - lp(4) - (1.5 + n2 + s1 + s2) * lp(np.pi)
               - _lg((1 - n2 + n1) / 2, (1 + n1 - n3) / 2, 1 + n2 + s1))
        ker = sum(loggamma((0.5 + n2 + s1 + e * it) / 2) + loggamma((-0.5 - n2 - s1 + e * it) / 2)
                  for e in (1, -1))
    elif weyl == "w1w2w1":
        pre = (_lg((1 + n1 + n3 + 2 * s1) / 2, (1 + n2 + n3 + 2 * s1) / 2)
               - lp(4) - (2 + n2 - n1) * lp(np.pi) - _lg(1 + n3 + s1, (1 + n1 - n2) / 2)
               + (-3 * s1 - s2) * lp(2.0) + _lg((n2 - n3) / 2, (n1 - n3) / 2)
               - _lg((1 + n2 - n3) / 2, (1 + n1 - n3) / 2))
        ker = sum(loggamma((1.5 + n2 + 2 * n3 + 3 * s1 + e * it) / 2)
                  + loggamma((0.5 + n2 + s1 + e * it) / 2) for e in (1, -1))
    else:
        raise ValueError(f"unknown Weyl element {weyl!r}")
    return pre, ker + _gg_s2(s2, t)


def _dual_kernel(weyl, pt, t):
    s1, s2 = complex(pt.s1), complex(pt.s2)
    n1, n2, n3 = complex(pt.nu1), complex(pt.nu2), complex(pt.nu3)
    lp = np.log
    if weyl == "w2":
        # the inner closed form carries 2 / (Gamma((1+nu1)/2-s1) Gamma((1+nu1-nu3)/2)
        # Gamma((1+nu1-nu2)/2)); the remaining prefactor is below
        pre = ((n1 + n2 - s1 - s2 - 2) * lp(np.pi) + loggamma(s1 - n1 / 2)
               - loggamma((1 + n2 - n3) / 2) - lp(2))
        ker = np.log(np.array([dual_w2_inner(x, pt) for x in t]))
        return pre, ker + _gg_s2(s2, t)
    if weyl == "w1w2":
        pre = (_lg((n1 - n2) / 2, s1 - n2 / 2) - lp(2) - (1.5 + s1 + s2 + n3) * lp(np.pi)
               - _lg((1 - n2 + n1) / 2, (1 + n1 - n3) / 2))
        ker = np.log(np.array([dual_w1w2_inner(x, pt) for x in t]))
        return pre, ker + _gg_s2(s2, t)
    if weyl == "w1w2w1":
        if (n2 / 2 - s1).real <= 0 or (1 - n2 - 2 * n3).real <= 0:
            raise DomainError("nu2/2 - s1 > 0 and Re(1 - nu2 - 2 nu3) > 0 are required")
        pre = (_lg((n2 - n3) / 2, (n1 - n3) / 2, s1 + (1 + n2) / 2) - lp(2)
               - _lg((1 + n2 - n3) / 2, (1 + n1 - n3) / 2) + (-s1 - s2 - n3 - 2) * lp(np.pi))
        ker = np.log(np.array([dual_w1w2w1_inner(x, pt) for x in t]))
        return pre, ker + _gg_s2(s2, t)
    raise ValueError(f"unknown Weyl element {weyl!r}")


def arch_degen(weyl: str, side: str, pt: SpectralPoint, beta: TestSpectrum,
               quad: QuadratureSpec = QuadratureSpec(), *, half_line: bool = True) -> complex:
    """Archimedean degenerate weight: ``prefactor * int_R beta(t) t sinh(pi t) kernel(t) dt``.

    Spec side kernels are Gamma products.  On the dual side the inner
    lambda-integrals are evaluated as follows: ``w2`` and ``w1w2`` by Barnes'
    second lemma, ``w1w2w1`` by the numerical vertical-line integral.

    With ``half_line`` the even integrand is integrated over ``[0, T]`` and
    doubled; otherwise over ``[-T, T]``.
    """
    if side not in ("spec", "dual"):
        raise ValueError(f"unknown side {side!r}")
    if beta.is_zero():
        return 0j
    if half_line:
        t, wt = _t_rule(beta, quad)
        wt = 2 * wt
    else:
        # split at 0, where Gamma factors may sit close to a pole
        T = quad.T * beta.width
        tn, wn = gauss_legendre(-T, 0.0, quad.nodes)
        tp, wp = gauss_legendre(0.0, T, quad.nodes)
        t, wt = np.concatenate([tn, tp]), np.concatenate([wn, wp])
    pre, ker = (_spec_kernel if side == "spec" else _dual_kernel)(weyl, pt, t)
    val = np.sum(np.exp(pre + ker) * beta.value(t) * _sinh_weight(t) * wt)
    return complex(val)


def _zeta_r(s):
    return np.exp(-0.5 * s * math.log(math.pi) + loggamma(s / 2))


def arch_gen(side: str, pt: SpectralPoint, beta: TestSpectrum,
             quad: QuadratureSpec = QuadratureSpec(), *, w_norm: complex | None = None) -> complex:
    """Generic archimedean weight.

    spec
        ``c/(2 pi^2) int_R zeta(1/2+s2+-it) L(1/2+s1+-it, pi~) beta(t) t sinh(pi t) dt``
        with ``zeta(s) = pi^(-s/2) Gamma(s/2)`` and
        ``L(s, pi~) = prod_j zeta(s - nu_j)``.  For the Whittaker function of
        :func:`gl3_whittaker` the torus integral reduces by Barnes' second
        lemma to this form with ``c = 2 pi^(3/2)`` (the default of ``w_norm``).
    dual
        ``Sh(1/2+s2) / (pi^(1/2+2s2) Gamma(1+s2)) prod_{j, eps} Gamma((1+eps s1+s2-eps nu_j)/2)``.
    """
    s1, s2 = complex(pt.s1), complex(pt.s2)
    nu = (complex(pt.nu1), complex(pt.nu2), complex(pt.nu3))
    if max(abs(s1.real), abs(s2.real)) > 0.1 + 1e-12:
        raise DomainError("|Re s_j| <= 1/10 is required")
    if side == "dual":
        lg = -(0.5 + 2 * s2) * math.log(math.pi) - loggamma(1 + s2)
        for v in nu:
            for e in (1, -1):
                lg = lg + loggamma((1 + e * s1 + s2 - e * v) / 2)
        return complex(beta.sh(0.5 + s2) * np.exp(lg))
    if side != "spec":
        raise ValueError(f"unknown side {side!r}")
    if beta.is_zero():
        return 0j
    c = 2 * math.pi ** 1.5 if w_norm is None else w_norm
    t, wt = _t_rule(beta, quad)
    it = 1j * t
    prod = _zeta_r(0.5 + s2 + it) * _zeta_r(0.5 + s2 - it)
    for v in nu:
        prod = prod * _zeta_r(0.5 + s1 + it - v) * _zeta_r(0.5 + s1 - it - v)
    val = 2 * np.sum(prod * beta.value(t) * _sinh_weight(t) * wt)
    return complex(c / (2 * np.pi ** 2) * val)


def arch_gen_quadrature(pt: SpectralPoint, beta: TestSpectrum,
                        quad: QuadratureSpec = QuadratureSpec(), *,
                        wquad: QuadratureSpec = QuadratureSpec(T=24.0, nodes=512),
                        ly=(-30.0, 2.5), lz=(-20.0, 2.5), step: float = 0.05) -> complex:
    """Generic spec weight by direct quadrature over the torus:

        2 / pi^(5/2+s2) int_R t sinh(pi t) Gamma((s2+1/2+-it)/2) beta(t)
            int int W(diag(yz, z, 1)) K_{it}(2 pi |y|) |y|^(-1/2+s1) |z|^(2 s1) d^x y d^x z dt,

    the torus integral running over both signs of ``y`` and ``z``.
    """
    s1, s2 = complex(pt.s1), complex(pt.s2)
    if beta.is_zero():
        return 0j
    ey = np.arange(ly[0], ly[1] + 1e-12, step)
    ez = np.arange(lz[0], lz[1] + 1e-12, step)
    y, z = np.exp(ey), np.exp(ez)
    W = gl3_whittaker(y, z, pt, wquad)                       # (ny, nz)
    Zint = (W * np.exp(2 * s1 * ez)[None, :]).sum(axis=1) * step   # over z
    t, wt = _t_rule(beta, quad)
    K = _bessel_matrix(t, 2 * np.pi * y)                     # (nt, ny)
    Yint = (K * (Zint * np.exp((-0.5 + s1) * ey))[None, :]).sum(axis=1) * step
    g = np.exp(_gg_s2(s2, t))
    val = 2 * np.sum(_sinh_weight(t) * g * beta.value(t) * 4 * Yint * wt)
    return complex(2 / np.pi ** (2.5 + s2) * val)

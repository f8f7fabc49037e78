"""
Command-line verification driver.

A run is described by a :class:`RunConfig` read from a JSON document with the
keys ``suite, places, points, trunc, quad, tol, out, seed``.  Every identity of
the catalog compares two independent evaluations of one local formula and
returns one or more :class:`~artifact.archtrans.IdentityReport` records.  The
suite report is written atomically, and identical configurations produce
identical report bytes; wall-clock timings go to a sidecar file next to it.

Exit codes: 0 all identities pass, 1 at least one fails, 2 bad
configuration, 3 internal error.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
import os
import sys
import tempfile
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import __version__
from . import archtrans as at
from . import nonarch as na
from . import specfun as sf
from .archtrans import IdentityReport, TestSpectrum
from .nonarch import LocalDatum, SatakeGL2, SatakeGL3, TruncationSpec
from .qsymbolic import QRational, SpectralPoint, eq_exact, eval_numeric, zeta_factor, ExponentForm
from .specfun import QuadratureSpec

__all__ = [
    "ConfigError", "IdentityFailure", "InternalError", "Identity", "RunConfig", "SuiteReport",
    "CATALOG", "SUITES", "DEFAULT_TOL", "list_identities", "load_config", "run_suite", "main",
]

VERSION = __version__
SUITES = ("nonarch", "arch", "sieve", "all")
CONFIG_KEYS = ("suite", "places", "points", "trunc", "quad", "tol", "out", "seed")

#: default tolerance per identity class
DEFAULT_TOL = {
    "exact": 0.0,
    "series": 1e-9,
    "weight": 1e-10,
    "sieve": 1e-10,
    "gamma": 1e-11,
    "ode": 1e-7,
    "special": 1e-9,
    "transform": 1e-5,
    "two_stage": 1e-4,
    "hecke": 1e-6,
    "contour": 1e-5,
    "symmetry": 1e-8,
    "slow": 1e-3,
}


class ConfigError(ValueError):
    """Configuration could not be parsed or validated (exit 2)."""


class IdentityFailure(AssertionError):
    """At least one identity failed (exit 1)."""


class InternalError(RuntimeError):
    """The harness itself failed (exit 3)."""


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    """Validated run configuration.

    Parameters
    ----------
    suite : str or tuple of str
        One of ``nonarch, arch, sieve, all`` or an explicit tuple of identity ids
        (possibly empty).
    places : tuple of LocalDatum
        Finite places for the non-archimedean identities; empty means the
        built-in defaults.
    points : tuple of SpectralPoint
        Spectral points; empty means points drawn from ``seed``.
    trunc, quad : optional
        Overrides for identities that take a truncation or a line-integral rule.
    tol : dict
        Tolerance per identity class, merged over :data:`DEFAULT_TOL`.
    out : str
        Report path.
    seed : int
    """

    suite: str | tuple = "all"
    places: tuple = ()
    points: tuple = ()
    trunc: TruncationSpec | None = None
    quad: QuadratureSpec | None = None
    tol: dict = field(default_factory=dict)
    out: str = "report.json"
    seed: int = 0

    def tolerance(self, cls: str) -> float:
        return float(self.tol.get(cls, DEFAULT_TOL[cls]))

    def echo(self) -> dict:
        """JSON-ready form of the configuration."""
        return {
            "suite": list(self.suite) if isinstance(self.suite, tuple) else self.suite,
            "places": [{"q": p.q, "d": p.d, "r": p.r, "n": p.n, "ell": p.ell} for p in self.places],
            "points": [{k: _cx(v) for k, v in pt.as_dict().items()} for pt in self.points],
            "trunc": None if self.trunc is None else {"N": self.trunc.N, "tail_tol": self.trunc.tail_tol},
            "quad": None if self.quad is None else {"T": self.quad.T, "nodes": self.quad.nodes,
                                                    "tol": self.quad.tol, "shift": self.quad.shift},
            "tol": {k: self.tol[k] for k in sorted(self.tol)},
            "out": self.out,
            "seed": self.seed,
        }


def _parse_complex(v, where: str) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, str):
        try:
            return complex(v.replace(" ", ""))
        except ValueError:
            pass
    raise ConfigError(f"{where}: cannot read {v!r} as a complex number")


def config_from_dict(raw: dict) -> RunConfig:
    """Validate a decoded configuration document."""
    if not isinstance(raw, dict):
        raise ConfigError("configuration must be a table")
    unknown = sorted(set(raw) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown keys {unknown}")
    suite = raw.get("suite", "all")
    if isinstance(suite, list):
        ids = tuple(str(x) for x in suite)
        bad = [x for x in ids if x not in _BY_ID]
        if bad:
            raise ConfigError(f"unknown identity ids {bad}")
        suite = ids
    elif suite not in SUITES:
        raise ConfigError(f"suite must be one of {SUITES} or a list of identity ids")
    places = []
    for k, p in enumerate(raw.get("places", [])):
        try:
            places.append(LocalDatum(**{key: int(p[key]) for key in p}))
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError(f"places[{k}]: {exc}") from exc
    points = []
    for k, p in enumerate(raw.get("points", [])):
        if not isinstance(p, dict):
            raise ConfigError(f"points[{k}] must be a table")
        try:
            vals = {key: _parse_complex(v, f"points[{k}].{key}") for key, v in p.items()}
            pt = SpectralPoint(**vals)
        except TypeError as exc:
            raise ConfigError(f"points[{k}]: {exc}") from exc
        if abs(pt.nu1 + pt.nu2 + pt.nu3) > 1e-12:
            raise ConfigError(f"points[{k}]: nu1 + nu2 + nu3 must vanish")
        points.append(pt)
    trunc = quad = None
    try:
        if raw.get("trunc") is not None:
            trunc = TruncationSpec(**raw["trunc"])
        if raw.get("quad") is not None:
            quad = QuadratureSpec(**raw["quad"])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"trunc/quad: {exc}") from exc
    tol = raw.get("tol", {})
    if not isinstance(tol, dict):
        raise ConfigError("tol must be a table")
    for k, v in tol.items():
        if k not in DEFAULT_TOL:
            raise ConfigError(f"unknown tolerance class {k!r}")
        if not isinstance(v, (int, float)) or not v > 0:
            raise ConfigError(f"tolerance {k!r} must be positive")
    seed = raw.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("seed must be an integer")
    out = raw.get("out", "report.json")
    if not isinstance(out, str) or not out:
        raise ConfigError("out must be a path")
    return RunConfig(suite, tuple(places), tuple(points), trunc, quad,
                     {k: float(v) for k, v in tol.items()}, out, seed)


def load_config(path: str | os.PathLike) -> RunConfig:
    """Read and validate a JSON configuration file."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(raw)


# ---------------------------------------------------------------------------
# run context
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Context:
    """What an identity sees: the configuration and its own random stream."""

    cfg: RunConfig
    rng: np.random.Generator

    def tol(self, cls: str) -> float:
        return self.cfg.tolerance(cls)

    def places(self, default: Sequence[LocalDatum]) -> list:
        return list(self.cfg.places) or list(default)

    def points(self, k: int, scale: float = 0.1, center: float = 0.3) -> list:
        """``k`` points from the configuration, topped up with random admissible ones."""
        pts = list(self.cfg.points[:k])
        while len(pts) < k:
            nu = self.rng.uniform(-0.05, 0.05, 2) + 1j * self.rng.uniform(-0.5, 0.5, 2)
            pts.append(SpectralPoint(
                s1=center + self.rng.uniform(-scale, scale) + 1j * self.rng.uniform(-1, 1),
                s2=center + 0.2 + self.rng.uniform(-scale, scale) + 1j * self.rng.uniform(-1, 1),
                nu1=complex(nu[0]), nu2=complex(nu[1]), nu3=-complex(nu[0] + nu[1])))
        return pts

    def trunc(self, default: TruncationSpec) -> TruncationSpec:
        return self.cfg.trunc or default

    def quad(self, default: QuadratureSpec = QuadratureSpec()) -> QuadratureSpec:
        return self.cfg.quad or default


def _satake(pt: SpectralPoint, q: int) -> SatakeGL3:
    return SatakeGL3.from_nu([pt.nu1, pt.nu2, pt.nu3], q)


def _cx(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _exact(identity: str, ok: bool, **meta) -> IdentityReport:
    return IdentityReport(identity, 0j, 0j, 0.0 if ok else math.inf, 0.0 if ok else math.inf,
                          0.0, bool(ok), dict(meta))


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Identity:
    """One catalog entry.

    ``anchor`` names the formula being checked; ``operation`` is the single
    module function under test.
    """

    id: str
    anchor: str
    module: str
    operation: str
    suite: str
    tol_class: str
    run: Callable[[Context], list] = field(repr=False, compare=False)
    default: bool = True

    def describe(self) -> dict:
        return {"id": self.id, "anchor": self.anchor, "module": self.module,
                "operation": self.operation, "suite": self.suite, "tol_class": self.tol_class,
                "default": self.default}


_UNRAM = ("w2", "w1w2", "w1w2w1")


def _degen_collapse(weyl: str, side: str):
    def run(ctx: Context) -> list:
        val = na.degen_exact(weyl, side, LocalDatum(q=2))
        ok = eq_exact(val, na.degen_unramified_product(weyl, side))
        return [_exact(f"{weyl}/{side}", ok)]
    return run


def _gen_double_series(ctx: Context) -> list:
    out = []
    tol = ctx.tol("series")
    for k, pt in enumerate(ctx.points(20)):
        q = (2, 3, 5)[k % 3]
        a = _satake(pt, q)
        for ell in range(5):
            lhs = na.gen_double_sum(ell, pt, a, q, ctx.trunc(TruncationSpec(N=160, tail_tol=1e-12)))
            rhs = na.gen_double_sum_closed(ell, pt, a, q)
            out.append(IdentityReport.compare(f"q={q},ell={ell}", lhs, rhs, tol, point=k))
    return out


def _twist_poly_zero(ctx: Context) -> list:
    e = ExponentForm.of(2, s1=3, s2=1)
    ok = eq_exact(na.n_factor_exact(0), QRational.const(1) / zeta_factor(e))
    return [_exact("N(s;0)", ok)]


def _twist_poly_numeric(ctx: Context) -> list:
    out = []
    for k, pt in enumerate(ctx.points(5)):
        for q in (2, 3):
            a = _satake(pt, q)
            for ell in range(4):
                out.append(IdentityReport.compare(
                    f"q={q},ell={ell}", na.n_factor(ell, pt, a, q),
                    eval_numeric(na.n_factor_exact(ell), q, pt), ctx.tol("series"), point=k))
    return out


def _schur_bialternant(ctx: Context) -> list:
    out = []
    for k in range(5):
        x = ctx.rng.uniform(0.3, 2.0, 2) * np.exp(1j * ctx.rng.uniform(0, 2 * np.pi, 2))
        a = SatakeGL3((x[0], x[1], 1 / (x[0] * x[1])))
        for i, j in ((2, 1), (3, 0), (1, 3), (4, 2)):
            out.append(IdentityReport.compare(f"({i},{j})", na.schur(i, j, a),
                                              na.schur_bialternant(i, j, a), ctx.tol("series")))
    return out


def _cs_generating(ctx: Context) -> list:
    out = []
    for k, pt in enumerate(ctx.points(3)):
        a = _satake(pt, 3)
        x = 0.3
        lhs = sum(na.schur(i, 0, a) * x ** i for i in range(80))
        rhs = 1 / np.prod([1 - al * x for al in a.alpha])
        out.append(IdentityReport.compare("h-series", lhs, rhs, ctx.tol("series"), point=k))
    return out


def _hecke_gl2(ctx: Context) -> list:
    out = []
    for q in (2, 3, 5):
        for theta in (0.3, 1.1, 2.5):
            b = SatakeGL2(cmath.exp(1j * theta))
            lhs = na.hecke_gl2(1, b, q) ** 2
            rhs = na.hecke_gl2(2, b, q) + 1
            out.append(IdentityReport.compare(f"q={q},theta={theta}", lhs, rhs, ctx.tol("series")))
    return out


def _gauss_norm(ctx: Context) -> list:
    out = []
    for p in (2, 3, 5, 7, 11, 13):
        for rp in (1, 2):
            for k, chi in enumerate(na.dirichlet_characters(p, rp)):
                if not chi.is_primitive():
                    continue
                n = na.gauss_norm_exact(chi)
                out.append(_exact(f"p={p},r={rp},k={k}", n == p ** rp, norm=n))
    return out


def _typeI_unramified(ctx: Context) -> list:
    out = []
    for k in range(10):
        q = (3, 5)[k % 2]
        nu = ctx.rng.uniform(-0.02, 0.02, 2) + 1j * ctx.rng.uniform(-0.5, 0.5, 2)
        a = SatakeGL3.from_nu([nu[0], nu[1], -nu[0] - nu[1]], q)
        # Re s = Re lam balances the two geometric rates of the brute sum
        s = 0.15 + ctx.rng.uniform(-0.005, 0.005) + 1j * ctx.rng.uniform(-1, 1)
        lam = 0.15 + ctx.rng.uniform(-0.005, 0.005) + 1j * ctx.rng.uniform(-1, 1)
        xi = cmath.exp(1j * ctx.rng.uniform(0, 2 * np.pi))
        closed = na.typeI_dual_weight(SpectralPoint(s1=s), lam, LocalDatum(q=q), a, "unramified", xi=xi)
        out.append(IdentityReport.compare(f"q={q}", _typeI_brute(s, lam, a, q, xi, 60), closed,
                                          ctx.tol("weight"), point=k))
    return out


def _typeI_brute(s, lam, a: SatakeGL3, q: int, xi: complex, N: int) -> complex:
    """Truncated Casselman-Shalika times Tate sum."""
    ai = a.inverse()
    w0 = na.w0_gl3(a, q)
    x = xi.conjugate() * q ** (-(2 * s - lam + 0.5))
    y = xi * q ** (-(lam + 0.5))
    first = sum(na.hm_poly(k, ai) * x ** k for k in range(N + 1))
    second = sum(y ** m for m in range(N + 1))
    return w0 * first * second


def _typeII_newform(ctx: Context) -> list:
    out = []
    for k, pt in enumerate(ctx.points(2, scale=0.1, center=0.2)):
        for q in (2, 3):
            a = _satake(pt, q)
            for r in (1, 2, 3):
                for d in (0, 1):
                    b = SatakeGL2(1.0, r_sigma=r)
                    lhs = na.typeII_spec_weight(pt, LocalDatum(q=q, r=r, d=d), a, b)
                    rhs = ((1 - 1 / q) * q ** ((1 - 3 * pt.s1 - pt.s2) * d)
                           * na.L_pi_sigma(0.5 + pt.s1, a, b, q) * na.L_sigma(0.5 + pt.s2, b, q))
                    out.append(IdentityReport.compare(f"q={q},r={r},d={d}", lhs, rhs,
                                                      ctx.tol("weight"), point=k))
    return out


def _cauchy_rankin_selberg(s, a: SatakeGL3, b: SatakeGL2, q: int, N: int = 120) -> complex:
    """``L(s, pi x sigma)`` from the Cauchy identity ``sum s_(i+j,j) lambda(p^i) X^(i+2j)``."""
    X = q ** (-s)
    lam = [na.hecke_gl2(i, b, q) for i in range(N + 1)]
    return sum(na.schur(i, j, a) * lam[i] * X ** (i + 2 * j)
               for i in range(N + 1) for j in range((N - i) // 2 + 1))


def _hecke_series(s, b: SatakeGL2, q: int, start: int = 0, N: int = 200) -> complex:
    """``sum_{m >= start} lambda(p^m) q^(-m s)``."""
    return sum(na.sigma_hecke(m, b, q) * q ** (-m * s) for m in range(start, N + 1))


def _typeII_unramified(ctx: Context) -> list:
    out = []
    for k, pt in enumerate(ctx.points(3, scale=0.1, center=0.2)):
        for q in (2, 3):
            a = _satake(pt, q)
            b = SatakeGL2(cmath.exp(0.4j))
            for n in (0, 2):
                lhs = na.typeII_spec_weight(pt, LocalDatum(q=q, n=n), a, b)
                conj_L = sum(np.conj(na.hecke_gl2(m, b, q)) * q ** (-m * (0.5 + pt.s2)) for m in range(201))
                rhs = (sum(b.beta ** (n - 2 * i) for i in range(n + 1)) * na.whittaker_norm_gl2(b, q)
                       * _cauchy_rankin_selberg(0.5 + pt.s1, a, b, q) * conj_L)
                out.append(IdentityReport.compare(f"q={q},n={n}", lhs, rhs, ctx.tol("weight"), point=k))
    return out


def _typeII_dual(ctx: Context) -> list:
    out = []
    for k, pt in enumerate(ctx.points(2, scale=0.05, center=0.15)):
        for q in (2, 3):
            a = _satake(pt, q)
            b = SatakeGL2(cmath.exp(0.4j))
            unr = na.typeII_dual_weight(pt, LocalDatum(q=q), a, b, "unramified")
            lat = na.typeII_dual_weight(pt, LocalDatum(q=q, n=0), a, b, "v_divides_n")
            out.append(IdentityReport.compare(f"level-0 lattice,q={q}", lat, unr, ctx.tol("weight"), point=k))
            s = (3 * pt.s1 + pt.s2) / 2
            for r in (1, 2):
                vq = na.typeII_dual_weight(pt, LocalDatum(q=q, r=r), a, b, "v_divides_q")
                bracket = q ** ((0.5 + s) * r) * _hecke_series(0.5 + s, b, q, start=r) / _hecke_series(0.5 + s, b, q)
                rhs = q ** ((1 - 3 * pt.s1 - pt.s2) * r / 2) * bracket * unr
                out.append(IdentityReport.compare(f"v|q,r={r},q={q}", vq, rhs, ctx.tol("weight"), point=k))
            zero = na.typeII_dual_weight(pt, LocalDatum(q=q, r=1), a, SatakeGL2(1.0, r_sigma=1), "v_divides_q")
            out.append(IdentityReport.compare(f"ramified sigma,q={q}", zero, 0.0, ctx.tol("weight"), point=k))
    return out


# (weyl, place, lattice cut) combinations where the direct sum converges fast
_DEGEN_BRUTE_CASES = (
    ("w2", LocalDatum(q=2, r=1), 40),
    ("w2", LocalDatum(q=401, r=2, d=1), 8),
    ("w1w2", LocalDatum(q=401, r=2, d=1), 25),
    ("w1w2", LocalDatum(q=401, n=1, d=1), 25),
    ("w1w2w1", LocalDatum(q=401, r=2, d=1), 25),
    ("w1w2w1", LocalDatum(q=401, n=1, d=1), 25),
)


def _degen_brute(ctx: Context) -> list:
    out = []
    pt = SpectralPoint(s1=0.5, s2=0.95, nu1=0.3, nu2=-0.1, nu3=-0.2)
    for weyl, D, N in _DEGEN_BRUTE_CASES:
        lhs = na.degen_nonarch(weyl, "spec", D, pt, TruncationSpec(N=N), method="brute")
        rhs = na.degen_nonarch(weyl, "spec", D, pt)
        out.append(IdentityReport.compare(f"{weyl},q={D.q},r={D.r},n={D.n},d={D.d}", lhs, rhs,
                                          ctx.tol("weight")))
    return out


def _gen_local_spec(ctx: Context) -> list:
    out = []
    for k, pt in enumerate(ctx.points(4)):
        q = 2
        a = _satake(pt, q)
        A, B = q ** (-1 - 2 * pt.s1), q ** (-1 - pt.s1 - pt.s2)
        al = a.alpha
        den = (np.prod([1 - x * B for x in al])
               * np.prod([1 - al[i] * al[j] * A for i, j in ((0, 1), (0, 2), (1, 2))]))
        LL = na.L_pi(1 + pt.s1 + pt.s2, a, q) * na.L_pi_tilde(1 + 2 * pt.s1, a, q)
        for n in (1, 2):
            lhs = na.gen_nonarch("spec", LocalDatum(q=q, n=n), pt, a)
            rhs = 0j
            for ell in range(n + 1):
                N_ell = na.gen_double_sum(ell, pt, a, q, TruncationSpec(N=160)) * den / B ** ell
                rhs += na.w0_gl3(a, q) * N_ell * LL / q ** ((0.5 + pt.s2) * n + ell * (pt.s1 - pt.s2))
            out.append(IdentityReport.compare(f"n={n}", lhs, rhs, ctx.tol("series"), point=k))
    return out


def _sieve_residual(ctx: Context) -> list:
    out = []
    for q in (2, 3, 5, 7):
        a = SatakeGL3.from_nu([0.3j, -0.1j, -0.2j], q)
        for r in range(1, 7):
            sa = na.sieve_a(r, LocalDatum(q=q), a)
            out.append(IdentityReport.compare(f"q={q},r={r}", sa.residual, 0.0, ctx.tol("sieve")))
    return out


def _sieve_growth(ctx: Context) -> list:
    out = []
    for q in (2, 3, 5, 7):
        a = SatakeGL3.from_nu([0.3j, -0.1j, -0.2j], q)
        for r in range(1, 7):
            g = na.sieve_a(r, LocalDatum(q=q), a).growth_constant
            out.append(IdentityReport(f"q={q},r={r}", complex(g), 10.0, 0.0, 0.0, 0.0, g <= 10.0,
                                      {"bound": "|a(p^j)| <= 10 r!/j!"}))
    return out


def _sieve_newform(ctx: Context) -> list:
    out = []
    for q in (2, 3, 5):
        a = SatakeGL3.from_nu([0.3j, -0.1j, -0.2j], q)
        for m in (1, 2, 3):
            b = SatakeGL2(1.0, r_sigma=m)
            lhs = na.sieve_c(m, LocalDatum(q=q), a, b)
            rhs = na.L_sigma_ad(b, q) * na.typeII_spec_weight(SpectralPoint(), LocalDatum(q=q, r=m), a, b)
            out.append(IdentityReport.compare(f"q={q},m={m}", lhs, rhs, ctx.tol("sieve")))
    return out


def _sieve_beta_free(ctx: Context) -> list:
    out = []
    for q in (3, 5):
        a = SatakeGL3.from_nu([0.3j, -0.1j, -0.2j], q)
        for m in (2, 3):
            c1 = na.sieve_c(m, LocalDatum(q=q), a, SatakeGL2(1.0, r_sigma=m))
            c2 = na.sieve_c(m, LocalDatum(q=q), a, SatakeGL2(cmath.exp(0.9j), r_sigma=m))
            out.append(IdentityReport.compare(f"q={q},m={m}", c2, c1, ctx.tol("sieve")))
    return out


def _gamma_fe(ctx: Context) -> list:
    z = ctx.rng.uniform(-10, 10, 100) + 1j * ctx.rng.uniform(-10, 10, 100)
    lhs = sf.cgamma(z + 1)
    rhs = z * sf.cgamma(z)
    rel = np.abs(lhs - rhs) / np.abs(rhs)
    k = int(np.argmax(rel))
    return [IdentityReport.compare("worst of 100", lhs[k], rhs[k], ctx.tol("gamma"),
                                   z=_cx(z[k]))]


def _bessel_ode(ctx: Context) -> list:
    out = []
    h = 2e-3
    for order in (0.5, 2j, 5.5j, 1 + 1j):
        for x in (0.7, 2.0, 6.0):
            f = sf.bessel_k(order, x + h * np.arange(-2, 3))
            # fourth-order central differences
            d1 = (f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h)
            d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
            res = x * x * d2 + x * d1 - (x * x + order * order) * f[2]
            scale = abs(x * x * d2) + abs(x * d1) + abs((x * x + order * order) * f[2])
            out.append(IdentityReport.compare(f"order={order},x={x}", res / scale, 0.0, ctx.tol("ode")))
    return out


def _hyp2f1_euler(ctx: Context) -> list:
    out = []
    # t = sin^2 u makes the Euler integrand a trigonometric polynomial times a smooth factor
    u, w = sf.gauss_legendre(0.0, np.pi / 2, 200)
    sn, cs = np.sin(u), np.cos(u)
    for a, b, c in ((0.3, 1.5, 3.5), (1.2 + 0.5j, 1.0, 2.5), (-0.7, 2.0, 3.5)):
        integ = (2 * sn ** (2 * b - 1) * cs ** (2 * c - 2 * b - 1) * (1 - sn * sn / 2) ** (-a) * w).sum()
        rhs = sf.cgamma(c) / (sf.cgamma(b) * sf.cgamma(c - b)) * integ
        out.append(IdentityReport.compare(f"a={a},b={b},c={c}", sf.hyp2f1(a, b, c, 0.5), rhs,
                                          ctx.tol("special")))
    return out


def _fourier_mellin(ctx: Context) -> list:
    beta = TestSpectrum()
    out = []
    grid = [(lam, s2) for lam in (1.0, 1.3, 1.6) for s2 in (-0.2, 0.0, 0.2)] + [(1.3 + 0.5j, 0.1 - 0.2j)]
    for lam, s2 in grid:
        num = at.numeric_mellin(lambda y: at.fhat(y, s2, beta, ctx.quad()), lam, lo=-30.0, hi=3.0, n=2000)
        out.append(IdentityReport.compare(f"lam={lam},s2={s2}", at.mellin_fhat(lam, s2, beta, ctx.quad()),
                                          num, ctx.tol("transform")))
    return out


def _mellin_two_stage(ctx: Context) -> list:
    beta = TestSpectrum()
    out = []
    for lam, s2 in ((0.3, 0.0), (0.1, 0.1), (0.2 + 0.5j, 0.1), (0.25, -0.2), (0.15 + 0.3j, 0.05j)):
        f = lambda x: at.unipotent_transform(x, s2, beta, ctx.quad())
        num = at.numeric_mellin(f, lam, lo=-30.0, hi=16.0, n=1500, subtract_origin=True)
        out.append(IdentityReport.compare(f"lam={lam},s2={s2}", at.mellin_f(lam, s2, beta, ctx.quad()),
                                          num, ctx.tol("two_stage")))
    return out


def _kernel_identity(ctx: Context) -> list:
    beta = TestSpectrum()
    return [at.kernel_identity_check(x, y, beta, ctx.quad(), tol=ctx.tol("transform"))
            for x in (0.0, 0.5, 1.0) for y in (0.5, 1.0, 2.0)]


def _hecke_mellin(ctx: Context) -> list:
    out = []
    lams = np.array([0.2, 0.7])
    for nu in (0.2j, 1 / 3, 1.5):
        for n in range(-4, 5):
            rhs = at.hecke_psi_numeric(n, nu, lams)
            for lam, r in zip(lams, rhs):
                out.append(IdentityReport.compare(f"n={n},nu={nu},lam={lam}", at.hecke_psi(n, nu, lam), r,
                                                  ctx.tol("hecke")))
    return out


# real parameters satisfying the hypotheses of both hypergeometric reductions
_CONTOUR_POINT = SpectralPoint(s1=-0.15, s2=0.1, nu1=-0.2, nu2=0.3, nu3=-0.1)


def _contour_check(fn: Callable, closed: str, contour: str):
    def run(ctx: Context) -> list:
        out = []
        pt = ctx.cfg.points[0] if ctx.cfg.points else _CONTOUR_POINT
        for t in ctx.rng.uniform(0.0, 4.0, 10):
            lhs = fn(float(t), pt, method=contour)
            rhs = fn(float(t), pt, method=closed)
            out.append(IdentityReport.compare(f"t={t:.4f}", lhs, rhs, ctx.tol("contour")))
        return out
    return run


def _degen_evenness(ctx: Context) -> list:
    beta = TestSpectrum()
    pt = SpectralPoint(s1=-0.15, s2=0.1, nu1=-0.2, nu2=0.3, nu3=-0.1)
    out = []
    for weyl in _UNRAM:
        half = at.arch_degen(weyl, "spec", pt, beta, ctx.quad(), half_line=True)
        full = at.arch_degen(weyl, "spec", pt, beta, ctx.quad(), half_line=False)
        out.append(IdentityReport.compare(weyl, half, full, ctx.tol("symmetry")))
    return out


def _gen_dual_product(ctx: Context) -> list:
    beta = TestSpectrum()
    val = at.arch_gen("dual", SpectralPoint(), beta, ctx.quad())
    return [IdentityReport.compare("s=0,nu=0", val, beta.sh(0.5) * np.pi ** 2.5, ctx.tol("series"))]


def _selberg_round_trip(ctx: Context) -> list:
    beta = TestSpectrum()
    out = []
    for nu in (0.5, 0.5 + 0.3j, 0.3 + 1.0j):
        out.append(IdentityReport.compare(f"nu={nu}", at.spherical_transform_numeric(nu, beta, ctx.quad()),
                                          beta.sh(nu), 1e-4))
    return out


def _bump_generic(ctx: Context) -> list:
    beta = TestSpectrum()
    pt = SpectralPoint(s1=0.05, s2=0.03, nu1=0.1j, nu2=-0.05j, nu3=-0.05j)
    return [IdentityReport.compare("one point", at.arch_gen_quadrature(pt, beta),
                                   at.arch_gen("spec", pt, beta), ctx.tol("slow"))]


def _build_catalog() -> tuple:
    ids = []
    for weyl in _UNRAM:
        for side in ("spec", "dual"):
            ids.append(Identity(
                f"degenerate-{weyl}-{side}-unramified-collapse",
                f"degenerate {weyl} {side} integral at an unramified place: zeta-product",
                "nonarch", "degen_nonarch", "nonarch", "exact", _degen_collapse(weyl, side)))
    ids += [
        Identity("generic-double-series-closed-form",
                 "generic double series over Schur values: B^ell N(ell) / denominator",
                 "nonarch", "gen_double_sum", "nonarch", "series", _gen_double_series),
        Identity("twist-polynomial-at-zero-exact",
                 "N(s;0) = 1 - AB = zeta(2+3s1+s2)^-1", "nonarch", "n_factor", "nonarch", "exact",
                 _twist_poly_zero),
        Identity("twist-polynomial-numeric-vs-exact",
                 "N(s;ell) from the h-recursion, numeric vs rational function",
                 "nonarch", "n_factor", "nonarch", "series", _twist_poly_numeric),
        Identity("schur-jacobi-trudi-vs-bialternant",
                 "Schur value s_(i+j,j,0) as bialternant quotient", "nonarch", "schur_bialternant", "nonarch",
                 "series", _schur_bialternant),
        Identity("complete-homogeneous-generating-series",
                 "sum_i h_i x^i = prod (1 - alpha_k x)^-1", "nonarch", "schur", "nonarch", "series",
                 _cs_generating),
        Identity("hecke-gl2-square-relation", "lambda(p)^2 = lambda(p^2) + 1", "nonarch", "hecke_gl2",
                 "nonarch", "series", _hecke_gl2),
        Identity("gauss-sum-modulus-exact", "|G(chi)|^2 = p^r for primitive chi", "nonarch",
                 "gauss_sum", "nonarch", "exact", _gauss_norm),
        Identity("typeI-unramified-vs-tate-sum",
                 "Type I unramified dual weight: W(I) L(1/2+2s-lam, contragredient) L(1/2+lam)",
                 "nonarch", "typeI_dual_weight", "nonarch", "weight", _typeI_unramified),
        Identity("typeII-newform-specialization",
                 "Type II spectral weight at r = r_sigma: zeta(1)^-1 q^((1-3s1-s2)d) L L",
                 "nonarch", "typeII_spec_weight", "nonarch", "weight", _typeII_newform),
        Identity("typeII-unramified-product",
                 "Type II spectral weight off the level: lambda(p^n) |W'|^2 L(pi x sigma) conj L(sigma)",
                 "nonarch", "typeII_spec_weight", "nonarch", "weight", _typeII_unramified),
        Identity("typeII-dual-specializations",
                 "Type II dual weight: unramified product and vanishing for ramified sigma",
                 "nonarch", "typeII_dual_weight", "nonarch", "weight", _typeII_dual),
        Identity("degenerate-ramified-closed-vs-lattice",
                 "degenerate local integrals at ramified places: elimination vs direct lattice sum",
                 "nonarch", "degen_nonarch", "nonarch", "weight", _degen_brute),
        Identity("generic-local-spec-vs-double-series",
                 "generic local integral at a twist place assembled from the double series",
                 "nonarch", "gen_nonarch", "nonarch", "series", _gen_local_spec),
        Identity("sieve-triangular-residual", "sum_j a(p^j) c(p^i, p^j) = 1_{i=r}", "nonarch",
                 "sieve_a", "sieve", "sieve", _sieve_residual),
        Identity("sieve-growth-envelope", "|a(p^j)| <= 10 r!/j!", "nonarch", "sieve_a", "sieve",
                 "sieve", _sieve_growth),
        Identity("sieve-newform-coefficient", "c(sigma; p^r_sigma) = L(1, Ad) x Type II weight at s=0",
                 "nonarch", "sieve_c", "sieve", "sieve", _sieve_newform),
        Identity("sieve-high-conductor-beta-independence",
                 "c(sigma; p^m) for r_sigma >= 2 does not depend on the Satake parameter",
                 "nonarch", "sieve_c", "sieve", "sieve", _sieve_beta_free),
        Identity("gamma-functional-equation", "Gamma(z+1) = z Gamma(z)", "specfun", "cgamma", "arch",
                 "gamma", _gamma_fe),
        Identity("bessel-k-ode-residual", "x^2 K'' + x K' - (x^2 + order^2) K = 0", "specfun",
                 "bessel_k", "arch", "ode", _bessel_ode),
        Identity("hyp2f1-euler-integral", "Euler integral for 2F1 at z = 1/2", "specfun", "hyp2f1",
                 "arch", "special", _hyp2f1_euler),
        Identity("unipotent-kernel-fourier-mellin",
                 "Mellin transform of the Fourier-transformed unipotent kernel: Gamma-product line integral",
                 "archtrans", "mellin_fhat", "arch", "transform", _fourier_mellin),
        Identity("unipotent-mellin-two-stage",
                 "Mellin transform of the unipotent kernel vs inverse spherical transform then Mellin",
                 "archtrans", "mellin_f", "arch", "two_stage", _mellin_two_stage),
        Identity("inverse-spherical-bessel-kernel-identity",
                 "V(y + 1/y - 2 + x^2/y) as a Bessel double integral", "archtrans",
                 "kernel_identity_check", "arch", "transform", _kernel_identity),
        Identity("hecke-integral-kirillov-mellin",
                 "K-type Hecke integral: 2F1 closed form vs Mellin of the Kirillov vector",
                 "archtrans", "hecke_psi", "arch", "hecke", _hecke_mellin),
        Identity("dual-w2-barnes-second-lemma",
                 "dual w2 inner contour equals a Barnes second lemma product", "archtrans",
                 "dual_w2_inner", "arch", "contour", _contour_check(at.dual_w2_inner, "closed", "contour")),
        Identity("dual-w1w2-hypergeometric-reduction",
                 "dual w1w2 inner contour equals the stated 3F2 at unit argument", "archtrans",
                 "dual_w1w2_inner", "arch", "contour",
                 _contour_check(at.dual_w1w2_inner, "hyp3f2", "contour")),
        Identity("dual-w1w2w1-hypergeometric-reduction",
                 "dual w1w2w1 inner contour equals the stated 3F2 at unit argument", "archtrans",
                 "dual_w1w2w1_inner", "arch", "contour",
                 _contour_check(at.dual_w1w2w1_inner, "hyp3f2", "contour")),
        Identity("dual-w1w2-barnes-reduction",
                 "dual w1w2 inner contour equals a Barnes second lemma product", "archtrans",
                 "dual_w1w2_inner", "arch", "contour",
                 _contour_check(at.dual_w1w2_inner, "closed", "contour")),
        Identity("degenerate-arch-evenness", "degenerate t-integrals: half line doubled = full line",
                 "archtrans", "arch_degen", "arch", "symmetry", _degen_evenness),
        Identity("generic-dual-closed-product", "generic dual term at s = 0, nu = 0: Sh(1/2) pi^(5/2)",
                 "archtrans", "arch_gen", "arch", "series", _gen_dual_product),
        Identity("selberg-round-trip", "spherical transform of the inverse transform returns beta",
                 "archtrans", "spherical_transform_numeric", "arch", "two_stage", _selberg_round_trip),
        Identity("generic-spec-whittaker-quadrature",
                 "generic spectral term: 2-D Whittaker quadrature vs L-factor product", "archtrans",
                 "arch_gen", "arch", "slow", _bump_generic, default=False),
    ]
    return tuple(ids)


CATALOG = _build_catalog()
_BY_ID = {idt.id: idt for idt in CATALOG}


def list_identities() -> list:
    """Catalog entries in a stable order."""
    return [idt.describe() for idt in CATALOG]


def select(suite, catalog: Sequence[Identity] = CATALOG) -> list:
    by_id = {idt.id: idt for idt in catalog}
    if isinstance(suite, (tuple, list)):
        return [by_id[x] for x in suite]
    if suite == "all":
        return [idt for idt in catalog if idt.default]
    return [idt for idt in catalog if idt.default and idt.suite == suite]


# ---------------------------------------------------------------------------
# execution
# ---------------------------------------------------------------------------

@dataclass
class SuiteReport:
    """Outcome of one run.

    ``timings`` (seconds per identity) is kept out of :meth:`to_dict` so the
    report itself is reproducible byte for byte.
    """

    version: str
    config: dict
    entries: list
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> int:
        return sum(1 for e in self.entries if e["passed"])

    @property
    def failed(self) -> int:
        return len(self.entries) - self.passed

    @property
    def exit_code(self) -> int:
        return 0 if self.failed == 0 else 1

    def failing(self) -> list:
        return [e["id"] for e in self.entries if not e["passed"]]

    def to_dict(self) -> dict:
        return {"artifact_version": self.version, "config": self.config,
                "counts": {"passed": self.passed, "failed": self.failed, "total": len(self.entries)},
                "identities": self.entries}


def _jsonable(x):
    if isinstance(x, complex):
        return _cx(x)
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.complexfloating):
        return _cx(x)
    if isinstance(x, np.ndarray):
        return [_jsonable(v) for v in x.tolist()]
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    return x


def _seed_for(seed: int, ident: str) -> np.random.Generator:
    # independent stream per identity, stable under reordering and fan-out
    return np.random.default_rng([seed & 0xFFFFFFFF, *ident.encode()])


def _execute(idt: Identity, cfg: RunConfig) -> tuple:
    """Run one identity in isolation; never raises."""
    t0 = time.perf_counter()
    entry = {"id": idt.id, "anchor": idt.anchor, "module": idt.module, "operation": idt.operation}
    try:
        reports = idt.run(Context(cfg, _seed_for(cfg.seed, idt.id)))
        entry["checks"] = [_jsonable(r.to_dict()) for r in reports]
        entry["passed"] = all(r.passed for r in reports)
        entry["error"] = None
    except Exception as exc:  # isolation: record and continue
        entry["checks"] = []
        entry["passed"] = False
        entry["error"] = f"{type(exc).__name__}: {exc}"
    return entry, time.perf_counter() - t0


def _execute_by_id(ident: str, cfg: RunConfig) -> tuple:
    return _execute(_BY_ID[ident], cfg)


def run_suite(cfg: RunConfig, *, jobs: int = 1, catalog: Sequence[Identity] | None = None,
              write: bool = True) -> SuiteReport:
    """Run every selected identity and write the report to ``cfg.out``.

    Parameters
    ----------
    jobs : int
        Worker processes; identities share no mutable state.
    catalog : sequence of Identity, optional
        Replaces :data:`CATALOG` (used for fixtures); custom catalogs run
        in-process.
    """
    chosen = select(cfg.suite, catalog or CATALOG)
    results = []
    if jobs > 1 and catalog is None and len(chosen) > 1:
        try:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                futures = [pool.submit(_execute_by_id, idt.id, cfg) for idt in chosen]
                results = [f.result() for f in futures]
        except Exception as exc:
            raise InternalError(f"worker pool failed: {exc}") from exc
    else:
        results = [_execute(idt, cfg) for idt in chosen]
    entries = [e for e, _ in results]
    timings = {e["id"]: dt for e, dt in results}
    report = SuiteReport(VERSION, cfg.echo(), entries, timings)
    if write:
        write_report(report, cfg.out)
    return report


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_report(report: SuiteReport, out: str | os.PathLike) -> None:
    """Write the report and its timing sidecar, each atomically."""
    path = Path(out)
    try:
        _atomic_write(path, json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
        side = path.with_name(path.name + ".timings.json")
        _atomic_write(side, json.dumps({k: round(v, 3) for k, v in report.timings.items()},
                                       indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise InternalError(f"cannot write report: {exc}") from exc


def summary(report: SuiteReport) -> str:
    lines = []
    for e in report.entries:
        mark = "PASS" if e["passed"] else "FAIL"
        dt = report.timings.get(e["id"])
        extra = f"  ({e['error']})" if e.get("error") else ""
        worst = max((float(c["rel_err"]) for c in e["checks"]), default=0.0)
        lines.append(f"{mark}  {e['id']:<48} worst rel {worst:9.2e}  {dt:7.2f}s{extra}")
    lines.append(f"{report.passed} passed, {report.failed} failed, {len(report.entries)} total")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="artifact", description="Verify local formula identities.")
    sub = p.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", help="run an identity suite")
    v.add_argument("--suite", required=True, help="nonarch, arch, sieve, all or comma-separated ids")
    v.add_argument("--config", required=True, help="JSON run configuration")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--seed", type=int, default=None)
    sub.add_parser("list", help="print the identity catalog")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code else 0
    if args.command == "list":
        for d in list_identities():
            tag = "" if d["default"] else "  [explicit only]"
            print(f"{d['id']:<48} {d['suite']:<8} {d['module']}.{d['operation']}  | {d['anchor']}{tag}")
        return 0
    try:
        cfg = load_config(args.config)
        suite = args.suite
        if suite not in SUITES:
            ids = tuple(x for x in suite.split(",") if x)
            bad = [x for x in ids if x not in _BY_ID]
            if bad:
                raise ConfigError(f"unknown identity ids {bad}")
            suite = ids
        if args.jobs < 1:
            raise ConfigError("--jobs must be at least 1")
        overrides = {"suite": suite}
        if args.seed is not None:
            overrides["seed"] = args.seed
        cfg = RunConfig(**{**cfg.__dict__, **overrides})
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        report = run_suite(cfg, jobs=args.jobs)
    except InternalError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3
    except Exception:
        traceback.print_exc()
        return 3
    print(summary(report))
    if report.failed:
        print("failing: " + ", ".join(report.failing()))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())

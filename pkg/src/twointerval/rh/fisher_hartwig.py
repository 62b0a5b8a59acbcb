"""Fisher-Hartwig data and Wiener-Hopf factors of the shifted symbol.

For ``sigma`` in {1, tau} the factorization target on the unit circle is

    T(xi) = (lam + sigma^2 f(xi)) / (e^{i pi b} theta_FS(xi) + e^{-i pi b} (1 - theta_FS(xi)))

with ``b`` the exponent ``beta`` (sigma = 1) or ``beta_tilde`` (sigma = tau).
Its logarithm ``L`` is continuous across the Fermi points by construction of
``b``; ``log F+`` and ``-log F-`` are the Cauchy transforms of ``L`` inside
and outside the circle.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..errors import BranchPointError, ConfigurationError
from ..gaussian_core import CovarianceKind
from ..symbol import OccupationSymbol

GL_ORDER = 24
MAX_PANEL = 0.2
CONTINUITY_EPS = 1e-7


class Side(enum.Enum):
    """Fermi point at which a local parametrix is built."""

    L = "L"   # z_F
    R = "R"   # z_F^{-1}

    @classmethod
    def parse(cls, value) -> "Side":
        if isinstance(value, cls):
            return value
        key = str(value).strip().upper()
        if key not in ("L", "R"):
            raise ConfigurationError(f"side must be 'L' or 'R', got {value!r}")
        return cls(key)


def s_alpha(alpha: complex) -> complex:
    """``sin(pi alpha)/pi``."""
    return complex(cmath.sin(math.pi * alpha) / math.pi)


def fh_exponent(lam: complex, fi: float, fo: float, sigma2: float) -> complex:
    """``(1/2 pi i) Log((lam + sigma^2 f_i)/(lam + sigma^2 f_o))``, Re in (-1/2, 1/2]."""
    num = lam + sigma2 * fi
    den = lam + sigma2 * fo
    if num == 0 or den == 0:
        raise BranchPointError(f"lambda = {lam!r} is a branch point of the exponent")
    return cmath.log(num / den) / (2j * math.pi)


def x_log_inside(z: complex, p_fermi: float) -> complex:
    """``log x(z)``, ``x = (z - z_F)/(z - z_F^{-1})``, continuous in the unit disk
    with ``log x(0) = 2 i p_F``."""
    zf = cmath.exp(1j * p_fermi)
    return 2j * p_fermi + cmath.log(1 - z / zf) - cmath.log(1 - z * zf)


def x_log_outside(z: complex, p_fermi: float) -> complex:
    """``log x(z)`` continuous outside the unit disk with ``log x(inf) = 0``."""
    zf = cmath.exp(1j * p_fermi)
    return cmath.log(1 - zf / z) - cmath.log(1 - 1 / (zf * z))


def _gl_panels(breaks: np.ndarray, order: int = GL_ORDER):
    x, w = np.polynomial.legendre.leggauss(order)
    a = breaks[:-1]
    b = breaks[1:]
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _refine(breaks, max_width=MAX_PANEL):
    out = [breaks[0]]
    for a, b in zip(breaks[:-1], breaks[1:]):
        n = max(1, int(math.ceil((b - a) / max_width)))
        out.extend(np.linspace(a, b, n + 1)[1:])
    return np.asarray(out)


@dataclass(frozen=True, eq=False)
class WienerHopfFactor:
    """``F+`` and ``F-`` for one ``sigma``.

    ``F+`` is analytic in the disk, ``F-`` outside it with ``F-(inf) = 1``.
    """

    symbol: OccupationSymbol
    lam: complex
    sigma2: float
    exponent: complex

    def __post_init__(self):
        self._check_continuity()

    # -- target -----------------------------------------------------------
    def log_target(self, theta):
        """Continuous logarithm ``L(theta)`` of the factorization target."""
        theta = np.asarray(theta, dtype=float)
        sym = self.symbol
        f = sym.evaluate(theta)
        inside = sym.in_sea(theta)
        base = self.lam + self.sigma2 * f
        if np.any(base == 0):
            raise BranchPointError(f"lambda = {self.lam!r} lies on the symbol range")
        ipb = 1j * math.pi * self.exponent
        return np.where(inside, np.log(base.astype(complex)) - ipb,
                        np.log(complex(self.lam + self.sigma2 * sym.f_outside)) + ipb)

    def target(self, theta):
        theta = np.asarray(theta, dtype=float)
        sym = self.symbol
        f = sym.evaluate(theta)
        inside = sym.in_sea(theta)
        phase = np.where(inside, np.exp(1j * math.pi * self.exponent),
                         np.exp(-1j * math.pi * self.exponent))
        return (self.lam + self.sigma2 * f) / phase

    def _check_continuity(self):
        pf = self.symbol.fermi_momentum
        eps = CONTINUITY_EPS
        for edge in (pf, -pf):
            inner = edge - math.copysign(eps, edge)
            outer = edge + math.copysign(eps, edge)
            li, lo = self.log_target(np.array([inner, outer]))
            if abs(li - lo) > 1e-5:
                raise BranchPointError(
                    f"factorization target is discontinuous at the Fermi point "
                    f"(|jump| = {abs(li - lo):.3e}); the exponent branch does not "
                    f"cancel the symbol jump for lambda = {self.lam!r}")
        grid = np.linspace(-math.pi, math.pi, 4097)
        if np.any(self.lam + self.sigma2 * self.symbol.evaluate(grid) == 0):
            raise BranchPointError(f"lambda = {self.lam!r} lies on the symbol range")

    # -- quadrature -------------------------------------------------------
    def _breaks(self, theta_star=None, gap=None) -> np.ndarray:
        pf = self.symbol.fermi_momentum
        pts = {-math.pi, -pf, 0.0, pf, math.pi}
        if theta_star is not None:
            ts = float(np.pi - np.mod(np.pi - theta_star, 2 * np.pi))
            pts.add(ts)
            if gap is not None and 0.0 < gap < 0.1:
                h = gap
                while h < 0.3:
                    for s in (ts - h, ts + h):
                        if -math.pi < s < math.pi:
                            pts.add(s)
                    h *= 3.0
        return _refine(np.array(sorted(pts)))

    @cached_property
    def _base_rule(self):
        nodes, weights = _gl_panels(self._breaks())
        return nodes, weights, self.log_target(nodes)

    def mean_log(self) -> complex:
        """``(1/2pi) int L dtheta`` = ``log F+(0)``."""
        _, w, vals = self._base_rule
        return complex(np.sum(w * vals) / (2 * math.pi))

    def _cauchy_part(self, z: complex, theta_star: float, l_star: complex,
                     gap: float | None) -> complex:
        if gap is not None and gap < 0.1:
            # refine toward the nearest circle point; gap == 0 is a boundary value
            nodes, weights = _gl_panels(self._breaks(theta_star, gap))
            vals = self.log_target(nodes)
        else:
            nodes, weights, vals = self._base_rule
        xi = np.exp(1j * nodes)
        integrand = (vals - l_star) * xi / (xi - z)
        return complex(np.sum(weights * integrand) / (2 * math.pi))

    def log_plus(self, z: complex) -> complex:
        """``log F+(z)`` for ``|z| < 1``; on the circle, the inner boundary value."""
        z = complex(z)
        r = abs(z)
        if r > 1.0 + 1e-15:
            raise ValueError("log_plus needs |z| <= 1")
        if r == 0.0:
            return self.mean_log()
        ts = cmath.phase(z)
        l_star = complex(self.log_target(np.array([ts]))[0])
        return l_star + self._cauchy_part(z, ts, l_star, 1.0 - r)

    def log_minus(self, z: complex) -> complex:
        """``log F-(z)`` for ``|z| > 1``; on the circle, the outer boundary value."""
        z = complex(z)
        r = abs(z)
        if r < 1.0 - 1e-15:
            raise ValueError("log_minus needs |z| >= 1")
        ts = cmath.phase(z)
        l_star = complex(self.log_target(np.array([ts]))[0])
        return -self._cauchy_part(z, ts, l_star, r - 1.0)

    def plus(self, z: complex) -> complex:
        return cmath.exp(self.log_plus(z))

    def minus(self, z: complex) -> complex:
        return cmath.exp(self.log_minus(z))

    def residual(self, thetas, offset: float = 1e-9) -> float:
        """``max |F+((1-eps)xi) F-((1+eps)xi) / T(xi) - 1|`` over ``thetas``."""
        worst = 0.0
        for t in np.asarray(thetas, dtype=float):
            xi = cmath.exp(1j * t)
            prod = self.plus((1 - offset) * xi) * self.minus((1 + offset) * xi)
            tgt = complex(self.target(np.array([t]))[0])
            worst = max(worst, abs(prod / tgt - 1.0))
        return worst


@dataclass(frozen=True, eq=False)
class FisherHartwigData:
    """Per-lambda package of exponents, amplitudes and Wiener-Hopf factors."""

    lam: complex
    kind: CovarianceKind
    symbol: OccupationSymbol = field(repr=False)
    beta: complex
    beta_tilde: complex
    r: complex
    r_tilde: complex
    factor: WienerHopfFactor = field(repr=False)
    factor_tilde: WienerHopfFactor = field(repr=False)

    @property
    def s_beta(self) -> complex:
        return s_alpha(self.beta)

    @property
    def s_beta_tilde(self) -> complex:
        return s_alpha(self.beta_tilde)

    @property
    def tau(self) -> complex:
        return self.kind.tau

    @property
    def fermi_momentum(self) -> float:
        return self.symbol.fermi_momentum

    @property
    def fermi_point(self) -> complex:
        return self.symbol.fermi_point

    def F_plus(self, z, tilde: bool = False) -> complex:
        return (self.factor_tilde if tilde else self.factor).plus(z)

    def F_minus(self, z, tilde: bool = False) -> complex:
        return (self.factor_tilde if tilde else self.factor).minus(z)

    # -- local data at the Fermi points ----------------------------------
    def point(self, side: Side) -> complex:
        zf = self.fermi_point
        return zf if Side.parse(side) is Side.L else 1 / zf

    def local_exponents(self, side: Side) -> tuple[complex, complex]:
        """``(beta, beta_tilde)`` as seen by the local parametrix at ``side``.

        The jump is traversed in the opposite direction at ``z_F^{-1}``, which
        flips both exponents; ``r`` and ``r_tilde`` are unchanged.
        """
        if Side.parse(side) is Side.L:
            return self.beta, self.beta_tilde
        return -self.beta, -self.beta_tilde

    def _x_constant(self, side: Side) -> complex:
        # log x_in(z) = +-log(zeta) + c near the Fermi point, zeta on the
        # branch arg in (pi/2, 3pi/2)
        pf = self.fermi_momentum
        zf = self.fermi_point
        if Side.parse(side) is Side.L:
            return 2j * pf - 1j * math.pi - cmath.log(1 - zf * zf)
        return 2j * pf + 1j * math.pi + cmath.log(1 - 1 / (zf * zf))

    def d_factor(self, side: Side, tilde: bool = False) -> complex:
        """Amplitude ``d`` (or ``d_tilde``) matching the middle parametrix to the
        outer one: ``d = e^{-i pi b} F+(z_0) e^{b c}`` with ``x^b ~ zeta^{+-b} e^{b c}``."""
        b = self.beta_tilde if tilde else self.beta
        z0 = self.point(side)
        fac = self.factor_tilde if tilde else self.factor
        return cmath.exp(b * self._x_constant(side) - 1j * math.pi * b) * fac.plus(z0)

    def d(self, side: Side = Side.L) -> complex:
        return self.d_factor(side, tilde=False)

    def d_tilde(self, side: Side = Side.L) -> complex:
        return self.d_factor(side, tilde=True)

    def to_dict(self) -> dict:
        def c(v):
            return [float(complex(v).real), float(complex(v).imag)]
        return {"lambda": c(self.lam), "kind": self.kind.name, "beta": c(self.beta),
                "beta_tilde": c(self.beta_tilde), "r": c(self.r),
                "r_tilde": c(self.r_tilde)}


def fh_data(sym: OccupationSymbol, lam: complex,
            kind: CovarianceKind = CovarianceKind.PLAIN) -> FisherHartwigData:
    """Fisher-Hartwig exponents, amplitudes and Wiener-Hopf factors at ``lam``."""
    kind = CovarianceKind.parse(kind)
    lam = complex(lam)
    fi, fo = sym.jump_values
    t2 = kind.tau2
    for v in (fi, fo):
        for s2 in (1.0, t2):
            if lam + s2 * v == 0:
                raise BranchPointError(
                    f"lambda = {lam!r} is a branch point (lambda = {-s2 * v:g})")
    beta = fh_exponent(lam, fi, fo, 1.0)
    beta_t = fh_exponent(lam, fi, fo, t2)
    # r = sqrt((lam + f_o)(lam + f_i)) on the branch fixed by beta
    r = (lam + fo) * cmath.exp(1j * math.pi * beta)
    r_t = (lam + t2 * fo) * cmath.exp(1j * math.pi * beta_t)
    fac = WienerHopfFactor(sym, lam, 1.0, beta)
    fac_t = fac if t2 == 1.0 else WienerHopfFactor(sym, lam, t2, beta_t)
    return FisherHartwigData(lam=lam, kind=kind, symbol=sym, beta=beta,
                             beta_tilde=beta_t, r=r, r_tilde=r_t,
                             factor=fac, factor_tilde=fac_t)


def mean_log_symbol(sym: OccupationSymbol, lam: complex, sigma2: float,
                    order: int = 64) -> complex:
    """``(1/2pi) int Log(lam + sigma^2 f(theta)) dtheta`` by Gauss-Legendre on
    the sea arc (the outside of the sea is constant)."""
    pf = sym.fermi_momentum
    x, w = np.polynomial.legendre.leggauss(order)
    breaks = np.linspace(0.0, pf, 9)
    total = 0j
    for a, b in zip(breaks[:-1], breaks[1:]):
        p = 0.5 * (b - a) * x + 0.5 * (b + a)
        vals = np.log((lam + sigma2 * sym.evaluate(p)).astype(complex))
        total += 0.5 * (b - a) * np.sum(w * vals)
    outside = (math.pi - pf) * cmath.log(lam + sigma2 * sym.f_outside)
    return (total + outside) / math.pi


@dataclass(frozen=True)
class SzegoReport:
    lhs: complex
    rhs: complex
    residual: float


def szego_check(sym: OccupationSymbol, lam: complex, sigma: str = "1",
                kind: CovarianceKind = CovarianceKind.NEGATIVITY) -> SzegoReport:
    """``log[x^b e^{-i pi b} F+]`` at ``z = 0`` against ``mean Log(lam + sigma^2 f)``.

    ``sigma`` is ``"1"`` or ``"tau"``; with ``sigma="tau"`` the deformation of
    ``kind`` sets ``tau``.
    """
    if sigma not in ("1", "tau"):
        raise ConfigurationError("sigma must be '1' or 'tau'")
    fh = fh_data(sym, lam, kind)
    tilde = sigma == "tau"
    b = fh.beta_tilde if tilde else fh.beta
    fac = fh.factor_tilde if tilde else fh.factor
    lhs = b * 2j * sym.fermi_momentum - 1j * math.pi * b + fac.mean_log()
    rhs = mean_log_symbol(sym, complex(lam), fac.sigma2)
    return SzegoReport(lhs=lhs, rhs=rhs, residual=abs(lhs - rhs))

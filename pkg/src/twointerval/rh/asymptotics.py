"""Large-separation asymptotics of the two-interval determinant ratios.

For ``m = n + l - k`` large compared with ``k`` and ``l``

    D_{k,l,n} / D_{k,l-1,n} ~ G(lam + tau^2 f) R22,
    D_{k,l,n} / D_{k-1,l,n} ~ G(lam + f) R11,

with ``G(g) = exp(mean Log g)`` the geometric mean of the shifted symbol
(equivalently ``x(0)^b e^{-i pi b} F+(0)``) and ``R11``, ``R22`` the diagonal
entries at ``z = 0`` of the small-norm correction. Each Fermi point
contributes ``-beta^2/k`` (``-beta_tilde^2/l``) and a ``1/m^2`` cross term;
the point at ``z_F^{-1}`` is the image of the one at ``z_F`` under
``(beta, beta_tilde, p_F) -> (-beta, -beta_tilde, -p_F)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError
from ..gaussian_core import CovarianceKind, Geometry
from ..orthopoly import Growth
from ..specfun import gamma, rgamma
from ..symbol import OccupationSymbol
from .fisher_hartwig import FisherHartwigData, fh_data, fh_exponent

# Phase pattern (phi1, phi2) of the two cross terms, e^{i phi p_F}, in R11.
# "mirrored" copies the R22 pattern; "printed" has e^{i p_F} in both terms.
PHASE_VARIANTS = {"mirrored": (-1, 1), "printed": (1, 1)}
DEFAULT_PHASE = "printed"
R22_PHASES = (-1, 1)
MEAN_ORDER = 64


def _check_phase(phase: str) -> tuple[int, int]:
    try:
        return PHASE_VARIANTS[phase]
    except KeyError:
        raise ConfigurationError(
            f"phase must be one of {sorted(PHASE_VARIANTS)}, got {phase!r}") from None


def _power(base: float, expo: complex) -> complex:
    return cmath.exp(expo * math.log(base))


def cross_term(beta: complex, beta_t: complex, p: float, k: float, l: float,
               m: float, phases: tuple[int, int]) -> complex:
    """``1/m^2`` contribution of the Fermi point at momentum ``p``.

    The Gamma ratios are written as ``Gamma(1-b)/Gamma(b)`` and
    ``-Gamma(1+b)/Gamma(-b)`` so the term is regular (and zero) at
    ``beta = beta_tilde = 0``. The powers act on ``2k|sin p|`` and
    ``2l|sin p|``; with this branch the two Fermi points are exchanged by
    ``lam -> conj(lam)`` and ``R(conj lam) = conj R(lam)``.
    """
    s = math.sin(p)
    two_k = 2.0 * k * abs(s)
    two_l = 2.0 * l * abs(s)
    a_beta = gamma(1 - beta) * rgamma(beta)            # 1/(Gamma(b)^2 s_b)
    a_minus = -gamma(1 + beta_t) * rgamma(-beta_t)     # 1/(Gamma(-bt)^2 s_bt)
    a_plus = gamma(1 - beta_t) * rgamma(beta_t)        # 1/(Gamma(bt)^2 s_bt)
    kb = _power(two_k, 2 * beta)
    t1 = cmath.exp(1j * phases[0] * p) * kb * _power(two_l, -2 * beta_t) * a_beta * a_minus
    t2 = cmath.exp(1j * phases[1] * p) * kb * _power(two_l, 2 * beta_t) * a_beta * a_plus
    return (t1 + t2) / (m * m * 2j * s)


@dataclass(frozen=True)
class ROutDiagonal:
    """Diagonal of the outer correction at ``z = 0`` with its pieces.

    ``leading`` holds the ``1/k`` and ``1/l`` terms of one Fermi point;
    ``cross`` the ``1/m^2`` terms of both points.
    """

    r11: complex
    r22: complex
    leading11: complex
    leading22: complex
    cross11: complex
    cross22: complex
    phase: str


def r_out_from_exponents(beta: complex, beta_t: complex, p_fermi: float,
                         k: float, l: float, m: float,
                         phase: str = DEFAULT_PHASE) -> ROutDiagonal:
    """``(R11, R22)`` from the exponents and the Fermi momentum."""
    if min(k, l, m) < 1:
        raise ConfigurationError("k, l, m must be >= 1")
    ph11 = _check_phase(phase)
    lead11 = -beta * beta / k
    lead22 = -beta_t * beta_t / l
    c11 = (cross_term(beta, beta_t, p_fermi, k, l, m, ph11)
           + cross_term(-beta, -beta_t, -p_fermi, k, l, m, ph11))
    c22 = (cross_term(beta, beta_t, p_fermi, k, l, m, R22_PHASES)
           + cross_term(-beta, -beta_t, -p_fermi, k, l, m, R22_PHASES))
    return ROutDiagonal(r11=1 + 2 * lead11 + c11, r22=1 + 2 * lead22 + c22,
                        leading11=lead11, leading22=lead22,
                        cross11=c11, cross22=c22, phase=phase)


def r_out_diag(fh: FisherHartwigData, k: float, l: float, m: float,
               phase: str = DEFAULT_PHASE) -> tuple[complex, complex]:
    """``(R11(0), R22(0))`` including both Fermi points."""
    res = r_out_from_exponents(fh.beta, fh.beta_tilde, fh.fermi_momentum,
                               k, l, m, phase)
    return res.r11, res.r22


def exponents(sym: OccupationSymbol, lam: complex,
              kind: CovarianceKind) -> tuple[complex, complex]:
    """``(beta, beta_tilde)`` without building the Wiener-Hopf factors."""
    fi, fo = sym.jump_values
    return (fh_exponent(lam, fi, fo, 1.0), fh_exponent(lam, fi, fo, kind.tau2))


def _sea_rule(sym: OccupationSymbol, order: int = MEAN_ORDER):
    x, w = np.polynomial.legendre.leggauss(order)
    pf = sym.fermi_momentum
    breaks = np.linspace(0.0, pf, 9)
    p = np.concatenate([0.5 * (b - a) * x + 0.5 * (b + a)
                        for a, b in zip(breaks[:-1], breaks[1:])])
    wt = np.concatenate([0.5 * (b - a) * w for a, b in zip(breaks[:-1], breaks[1:])])
    return sym.evaluate(p), wt


def log_geometric_mean(sym: OccupationSymbol, lam, sigma2: float) -> np.ndarray:
    """``(1/2pi) int Log(lam + sigma^2 f) dtheta`` for an array of ``lam``."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    f, wt = _sea_rule(sym)
    pf = sym.fermi_momentum
    inside = np.log(lam[:, None] + sigma2 * f[None, :]) @ wt
    outside = (math.pi - pf) * np.log(lam + sigma2 * sym.f_outside)
    return (inside + outside) / math.pi


def dlog_geometric_mean(sym: OccupationSymbol, lam, sigma2: float) -> np.ndarray:
    """``d/dlam`` of :func:`log_geometric_mean`: the mean of ``1/(lam + sigma^2 f)``."""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    f, wt = _sea_rule(sym)
    pf = sym.fermi_momentum
    inside = (1.0 / (lam[:, None] + sigma2 * f[None, :])) @ wt
    outside = (math.pi - pf) / (lam + sigma2 * sym.f_outside)
    return (inside + outside) / math.pi


def outer_y_at_zero(fh: FisherHartwigData, which: Growth) -> complex:
    """``Y23(0)`` (GROW_L) or ``Y14(0)`` (GROW_K) of the outer parametrix:
    ``x(0)^b e^{-i pi b} F+(0)`` with ``x(0) = z_F^2``."""
    tilde = which is Growth.GROW_L
    b = fh.beta_tilde if tilde else fh.beta
    fac = fh.factor_tilde if tilde else fh.factor
    return cmath.exp(2j * fh.fermi_momentum * b - 1j * math.pi * b + fac.mean_log())


def _growth_sigma2(kind: CovarianceKind, which: Growth) -> float:
    return kind.tau2 if which is Growth.GROW_L else 1.0


def log_ratio_asymptotic(sym: OccupationSymbol, geo: Geometry, lam,
                         kind=CovarianceKind.PLAIN, which=Growth.GROW_L,
                         phase: str = DEFAULT_PHASE) -> np.ndarray:
    """Vectorized ``log(G R)`` using the geometric-mean form of ``G``.

    Cheaper than :func:`det_ratio_asymptotic` (no Wiener-Hopf factors) and
    used on contours and real grids.
    """
    kind = CovarianceKind.parse(kind)
    which = Growth.parse(which)
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    log_g = log_geometric_mean(sym, lam, _growth_sigma2(kind, which))
    log_r = np.array([cmath.log(_r_entry(sym, geo, z, kind, which, phase))
                      for z in lam])
    return log_g + log_r


def _r_entry(sym, geo, lam, kind, which, phase) -> complex:
    b, bt = exponents(sym, complex(lam), kind)
    res = r_out_from_exponents(b, bt, sym.fermi_momentum, geo.k, geo.l, geo.m, phase)
    return res.r22 if which is Growth.GROW_L else res.r11


def dlog_r(sym: OccupationSymbol, geo: Geometry, lam, kind=CovarianceKind.PLAIN,
           which=Growth.GROW_L, phase: str = DEFAULT_PHASE,
           linearized: bool = True, step: float = 1e-3) -> np.ndarray:
    """``d/dlam`` of ``R - 1`` (``linearized``) or of ``log R``.

    Both agree to the retained order in ``1/k``, ``1/l``, ``1/m^2``; the
    linearized form stays accurate near the branch points where ``beta``
    grows logarithmically. A fourth-order central difference is used, with
    the step shrunk near the branch points ``-f_i``, ``-f_o`` (and their
    ``tau^2`` images) so the stencil stays inside the analyticity domain.
    """
    kind = CovarianceKind.parse(kind)
    which = Growth.parse(which)
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    fi, fo = sym.jump_values
    branch = np.array([-fi, -fo, -kind.tau2 * fi, -kind.tau2 * fo], dtype=complex)
    transform = (lambda r: r - 1) if linearized else cmath.log
    out = np.empty(lam.shape, dtype=complex)
    for idx, z in enumerate(lam):
        h = min(step, 0.1 * float(np.min(np.abs(z - branch))))
        vals = [transform(_r_entry(sym, geo, z + c * h, kind, which, phase))
                for c in (-2, -1, 1, 2)]
        out[idx] = (vals[0] - 8 * vals[1] + 8 * vals[2] - vals[3]) / (12 * h)
    return out


def dlog_ratio_asymptotic(sym: OccupationSymbol, geo: Geometry, lam,
                          kind=CovarianceKind.PLAIN, which=Growth.GROW_L,
                          phase: str = DEFAULT_PHASE,
                          linearized: bool = True) -> np.ndarray:
    """``d/dlam log(G R)``; the ``G`` part is exact, the ``R`` part differenced
    (see :func:`dlog_r` for ``linearized``)."""
    kind = CovarianceKind.parse(kind)
    which = Growth.parse(which)
    return (dlog_geometric_mean(sym, lam, _growth_sigma2(kind, which))
            + dlog_r(sym, geo, lam, kind, which, phase, linearized))


def det_ratio_asymptotic(sym: OccupationSymbol, geo: Geometry, lam: complex,
                         kind=CovarianceKind.PLAIN, which=Growth.GROW_L,
                         phase: str = DEFAULT_PHASE) -> complex:
    """Predicted ``D_{k,l,n}/D_{k,l-1,n}`` (GROW_L) or ``D_{k,l,n}/D_{k-1,l,n}``
    (GROW_K) from the outer parametrix and the ``R`` correction."""
    kind = CovarianceKind.parse(kind)
    which = Growth.parse(which)
    fh = fh_data(sym, lam, kind)
    r11, r22 = r_out_diag(fh, geo.k, geo.l, geo.m, phase)
    r = r22 if which is Growth.GROW_L else r11
    return outer_y_at_zero(fh, which) * r

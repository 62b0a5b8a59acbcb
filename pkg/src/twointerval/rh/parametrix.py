"""Outer, middle and inner local solutions of the 4x4 Riemann-Hilbert problem.

Conventions
-----------
* ``zeta = log(z / z_0)`` with ``z_0 = z_F`` (side L) or ``z_F^{-1}`` (side R).
  Region II is the part of a small disk around ``z_0`` inside the unit circle;
  there ``zeta`` carries the continuous argument in ``(pi/2, 3pi/2)``.
* At side R the local problem is that of side L with ``beta -> -beta`` and
  ``beta_tilde -> -beta_tilde``; ``r`` and ``r_tilde`` are unchanged.
* The middle solution pairs ``e^{zeta k} Q`` with ``P`` in the (1,4) block and
  the same with ``l`` in the (2,3) block. The inner solution adds the
  ``Gamma(0, -+m zeta)`` columns that make ``P + s Q Gamma0`` analytic.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .. import specfun
from ..errors import ConfigurationError
from ..gaussian_core import CovarianceKind
from .fisher_hartwig import (FisherHartwigData, Side, s_alpha, x_log_inside,
                             x_log_outside)


@dataclass(frozen=True)
class ParametrixMatrix:
    """A 4x4 local solution evaluated at one point."""

    region: str
    value: np.ndarray
    z: complex
    side: Side | None = None
    zeta: specfun.BranchedComplex | None = None

    def inverse(self) -> np.ndarray:
        return np.linalg.inv(self.value)


def adiag(a, b, c, d) -> np.ndarray:
    """Anti-diagonal matrix with ``a`` at (1,4), ``b`` at (2,3), ``c`` at (3,2), ``d`` at (4,1)."""
    out = np.zeros((4, 4), dtype=complex)
    out[0, 3], out[1, 2], out[2, 1], out[3, 0] = a, b, c, d
    return out


# ---------------------------------------------------------------------------
# outer region


def y_out(fh: FisherHartwigData, z: complex) -> ParametrixMatrix:
    """Outer solution: anti-diagonal inside the unit circle, diagonal outside."""
    z = complex(z)
    pf = fh.fermi_momentum
    b, bt = fh.beta, fh.beta_tilde
    ipb, ipbt = 1j * math.pi * b, 1j * math.pi * bt
    if abs(z) < 1.0:
        lx = x_log_inside(z, pf)
        fp, fpt = fh.F_plus(z), fh.F_plus(z, tilde=True)
        val = adiag(cmath.exp(b * lx - ipb) * fp,
                    cmath.exp(bt * lx - ipbt) * fpt,
                    -cmath.exp(-bt * lx + ipbt) / fpt,
                    -cmath.exp(-b * lx + ipb) / fp)
    elif abs(z) > 1.0:
        lx = x_log_outside(z, pf)
        fm, fmt = fh.F_minus(z), fh.F_minus(z, tilde=True)
        val = np.diag([cmath.exp(b * lx) / fm, cmath.exp(bt * lx) / fmt,
                       cmath.exp(-bt * lx) * fmt, cmath.exp(-b * lx) * fm])
    else:
        raise ValueError("y_out is not defined on the unit circle")
    return ParametrixMatrix("out", val.astype(complex), z)


def circle_jump(fh: FisherHartwigData, theta: float) -> np.ndarray:
    """Jump matrix of the outer problem on the unit circle (anti-diagonal)."""
    f = float(fh.symbol.evaluate(np.array([theta]))[0])
    a = fh.lam + f
    at = fh.lam + fh.kind.tau2 * f
    return adiag(a, at, -1 / at, -1 / a)


def outer_jump_residual(fh: FisherHartwigData, thetas, offset: float = 1e-9) -> float:
    """``max |Y_out(inside) - Y_out(outside) V2|`` (relative) on the circle.

    This is the factorization ``V2 = diag^{-1} a-diag`` with ``diag`` and
    ``a-diag`` the exterior and interior outer solutions.
    """
    worst = 0.0
    for t in np.asarray(thetas, dtype=float):
        xi = cmath.exp(1j * t)
        yin = y_out(fh, (1 - offset) * xi).value
        yo = y_out(fh, (1 + offset) * xi).value
        v2 = circle_jump(fh, t)
        worst = max(worst, np.max(np.abs(yin - yo @ v2)) / np.max(np.abs(yin)))
    return float(worst)


# ---------------------------------------------------------------------------
# local variables


def region_two_zeta(zeta: complex) -> specfun.BranchedComplex:
    """Place ``zeta`` (with ``Re zeta < 0``) on the branch ``arg in (pi/2, 3pi/2)``."""
    zeta = complex(zeta)
    if not zeta.real < 0:
        raise ValueError("region II needs Re zeta < 0 (inside the unit circle)")
    ang = specfun.BranchedComplex.principal_arg(zeta)
    if ang < 0:
        ang += 2 * math.pi
    return specfun.BranchedComplex.from_polar(abs(zeta), ang)


def expm1_complex(w: complex) -> complex:
    """``e^w - 1`` without cancellation for small ``|w|``."""
    x, y = w.real, w.imag
    re = math.expm1(x) * math.cos(y) - 2.0 * math.sin(0.5 * y) ** 2
    return complex(re, math.exp(x) * math.sin(y))


def point_from_zeta(fh: FisherHartwigData, side: Side, zeta) -> complex:
    z0 = fh.point(side)
    return z0 * cmath.exp(specfun.BranchedComplex.coerce(zeta).value)


@dataclass(frozen=True)
class LocalData:
    """Constants of the local problem at one Fermi point."""

    side: Side
    z0: complex
    beta: complex
    beta_tilde: complex
    r: complex
    r_tilde: complex
    d: complex
    d_tilde: complex
    tau: complex

    @classmethod
    def build(cls, fh: FisherHartwigData, side) -> "LocalData":
        side = Side.parse(side)
        b, bt = fh.local_exponents(side)
        return cls(side, fh.point(side), b, bt, fh.r, fh.r_tilde,
                   fh.d(side), fh.d_tilde(side), fh.tau)


def _scaled_q_and_p(i: int, alpha: complex, s: specfun.BranchedComplex):
    """``(e^{s} Q^i_alpha(s), P^i_alpha(s))`` without forming ``Q`` alone."""
    u_rot = specfun.tricomi_u(i - alpha, s.rotate(-math.pi))
    e2 = cmath.exp(2j * math.pi * alpha)
    ratio = specfun.gamma(alpha + 1 - i) * specfun.rgamma(i - alpha)
    eq = -e2 * cmath.exp(s.value) * u_rot + ratio * e2 * specfun.tricomi_u(1 - i + alpha, s)
    p = cmath.exp(1j * math.pi * alpha) * u_rot
    return eq, p


def _block_coefficients(alpha, rr, dd, size):
    """Prefactors of the 2x2 block: rows (Q^0, P^0) and (Q^1, P^1)."""
    g = specfun.gamma(1 - alpha) * specfun.rgamma(alpha)
    lower = -cmath.exp(-2j * math.pi * alpha) * g / (dd * size ** (-alpha))
    return (dd / (rr * size ** alpha), dd / size ** alpha, lower, rr * lower)


def _mid_blocks(loc: LocalData, zeta: specfun.BranchedComplex, k: float, l: float):
    blocks = {}
    for key, alpha, rr, dd, size in (("k", loc.beta, loc.r, loc.d, k),
                                     ("l", loc.beta_tilde, loc.r_tilde, loc.d_tilde, l)):
        s = zeta.scale(size)
        eq0, p0 = _scaled_q_and_p(0, alpha, s)
        eq1, p1 = _scaled_q_and_p(1, alpha, s)
        c11, c14, c41, c44 = _block_coefficients(alpha, rr, dd, size)
        blocks[key] = (c11 * eq0, c14 * p0, c41 * eq1, c44 * p1,
                       eq0 * cmath.exp(-s.value), eq1 * cmath.exp(-s.value), p0, p1)
    return blocks


def y_mid_II(fh: FisherHartwigData, side, zeta, k: float, l: float) -> ParametrixMatrix:
    """Middle solution in region II at ``side`` for ``zeta`` (``Re zeta < 0``)."""
    loc = LocalData.build(fh, side)
    zb = zeta if isinstance(zeta, specfun.BranchedComplex) else region_two_zeta(zeta)
    blk = _mid_blocks(loc, zb, k, l)
    val = np.zeros((4, 4), dtype=complex)
    val[0, 0], val[0, 3], val[3, 0], val[3, 3] = blk["k"][:4]
    val[1, 1], val[1, 2], val[2, 1], val[2, 2] = blk["l"][:4]
    return ParametrixMatrix("mid_II", val, point_from_zeta(fh, loc.side, zb),
                            loc.side, zb)


def y_mid_II_inverse(fh: FisherHartwigData, side, zeta, k: float, l: float) -> np.ndarray:
    """Closed-form inverse of the middle solution (unit determinant per block)."""
    m = y_mid_II(fh, side, zeta, k, l).value
    inv = np.zeros((4, 4), dtype=complex)
    for i, j in ((0, 3), (1, 2)):
        a, b, c, d = m[i, i], m[i, j], m[j, i], m[j, j]
        inv[i, i], inv[i, j], inv[j, i], inv[j, j] = d, -b, -c, a
    return inv


def y_in_II(fh: FisherHartwigData, side, zeta, k: float, l: float,
            m: float) -> ParametrixMatrix:
    """Inner solution in region II, up to terms exponentially small in ``m|zeta|``."""
    loc = LocalData.build(fh, side)
    zb = zeta if isinstance(zeta, specfun.BranchedComplex) else region_two_zeta(zeta)
    mid = y_mid_II(fh, loc.side, zb, k, l).value.copy()
    tau = loc.tau
    g_minus = specfun.scaled_gamma0(zb.scale(m).rotate(-math.pi))   # e^{-m zeta} Gamma0(-m zeta)
    g_plus = specfun.scaled_gamma0(zb.scale(m))                     # e^{m zeta} Gamma0(m zeta)
    b, bt = loc.beta, loc.beta_tilde
    sb, sbt = s_alpha(b), s_alpha(bt)
    q0k, _ = specfun.pq_functions(0, b, zb.scale(k))
    q1k, _ = specfun.pq_functions(1, b, zb.scale(k))
    q0l, _ = specfun.pq_functions(0, bt, zb.scale(l))
    q1l, _ = specfun.pq_functions(1, bt, zb.scale(l))
    gk = specfun.gamma(1 - b) * specfun.rgamma(b)
    gl = specfun.gamma(1 - bt) * specfun.rgamma(bt)
    mid[0, 2] = -tau * loc.d * sb * q0k * g_minus / k ** b
    mid[1, 3] = -loc.d_tilde * sbt * q0l * g_plus / (tau * l ** bt)
    mid[2, 3] = (loc.r_tilde * gl * sbt * q1l * g_plus
                 / (loc.d_tilde * tau * cmath.exp(2j * math.pi * bt) * l ** (-bt)))
    mid[3, 2] = (tau * loc.r * gk * sb * q1k * g_minus
                 / (loc.d * cmath.exp(2j * math.pi * b) * k ** (-b)))
    return ParametrixMatrix("in_II", mid, point_from_zeta(fh, loc.side, zb), loc.side, zb)


# ---------------------------------------------------------------------------
# matching matrices


def delta_r_mid_out(fh: FisherHartwigData, side, zeta, k: float, l: float) -> np.ndarray:
    """First-order (in ``1/zeta``) closed form of ``Y_mid Y_out^{-1} - 1`` in region II.

    With ``s = k zeta``, ``t = l zeta`` and ``g(a) = Gamma(1 + a)/Gamma(-a)``::

        (1,1) =  b^2/s            (4,4) = -b^2/s
        (1,4) = -d^2 g(b) e^{2 pi i b} / (r k^{2b} s)
        (4,1) =  r e^{-2 pi i b} Gamma(1-b) k^{2b} / (d^2 Gamma(b) s)

    and the same for the (2,3) block with ``(bt, t, d_tilde, r_tilde, l)``.
    """
    loc = LocalData.build(fh, side)
    zb = zeta if isinstance(zeta, specfun.BranchedComplex) else region_two_zeta(zeta)
    out = np.zeros((4, 4), dtype=complex)
    for (i, j), alpha, rr, dd, size in (((0, 3), loc.beta, loc.r, loc.d, k),
                                        ((1, 2), loc.beta_tilde, loc.r_tilde, loc.d_tilde, l)):
        s = size * zb.value
        g0 = specfun.gamma(1 + alpha) * specfun.rgamma(-alpha)
        g1 = specfun.gamma(1 - alpha) * specfun.rgamma(alpha)
        k2 = cmath.exp(2 * alpha * math.log(size))
        out[i, i] = alpha ** 2 / s
        out[j, j] = -alpha ** 2 / s
        out[i, j] = -dd ** 2 * g0 * cmath.exp(2j * math.pi * alpha) / (rr * k2 * s)
        out[j, i] = rr * cmath.exp(-2j * math.pi * alpha) * g1 * k2 / (dd ** 2 * s)
    return out


def delta_r_in_mid_matrix(fh: FisherHartwigData, side, k: float, l: float) -> np.ndarray:
    """Coefficient ``M`` of the leading term ``z_0 M / (m (z - z_0))`` of
    ``Y_in Y_mid^{-1} - 1`` as ``k zeta, l zeta -> 0`` and ``m |zeta| -> inf``.

    Obtained from the inner correction columns with ``Q -> q(0)``,
    ``e^{-+m zeta} Gamma0(-+m zeta) -> -+1/(m zeta)`` and the (3,*), (4,*)
    rows of the closed-form middle inverse.
    """
    loc = LocalData.build(fh, side)
    tau = loc.tau
    b, bt = loc.beta, loc.beta_tilde
    d, dt, r, rt = loc.d, loc.d_tilde, loc.r, loc.r_tilde
    sb, sbt = s_alpha(b), s_alpha(bt)
    q0b, q1b = specfun.q_limit_at_zero(0, b), specfun.q_limit_at_zero(1, b)
    q0t, q1t = specfun.q_limit_at_zero(0, bt), specfun.q_limit_at_zero(1, bt)
    gk = specfun.gamma(1 - b) * specfun.rgamma(b)
    gl = specfun.gamma(1 - bt) * specfun.rgamma(bt)
    kb, lb = k ** b, l ** bt
    # correction columns with g_-+ replaced by -+1
    e13 = tau * d * sb * q0b / kb
    e24 = -dt * sbt * q0t / (tau * lb)
    e34 = rt * gl * sbt * q1t * lb / (dt * tau * cmath.exp(2j * math.pi * bt))
    e43 = -tau * r * gk * sb * q1b * kb / (d * cmath.exp(2j * math.pi * b))
    # rows 3 and 4 of the middle inverse at zeta -> 0
    inv32 = cmath.exp(-2j * math.pi * bt) * gl * q1t * lb / dt
    inv33 = dt * q0t / (rt * lb)
    inv41 = cmath.exp(-2j * math.pi * b) * gk * q1b * kb / d
    inv44 = d * q0b / (r * kb)
    out = np.zeros((4, 4), dtype=complex)
    out[0, 1], out[0, 2] = e13 * inv32, e13 * inv33
    out[1, 0], out[1, 3] = e24 * inv41, e24 * inv44
    out[2, 0], out[2, 3] = e34 * inv41, e34 * inv44
    out[3, 1], out[3, 2] = e43 * inv32, e43 * inv33
    return out


def delta_r_in_mid(fh: FisherHartwigData, side, zeta, k: float, l: float,
                   m: float) -> np.ndarray:
    """Leading closed form ``z_0 M / (m (z - z_0))`` at ``zeta``."""
    zb = specfun.BranchedComplex.coerce(zeta)
    pref = 1.0 / (m * expm1_complex(zb.value))
    return pref * delta_r_in_mid_matrix(fh, side, k, l)


def inner_mid_deviation(fh: FisherHartwigData, side, zeta, k: float, l: float,
                        m: float) -> np.ndarray:
    """``Y_in Y_mid^{-1} - 1`` evaluated as ``(Y_in - Y_mid) Y_mid^{-1}``.

    The two forms are equal; the second avoids the cancellation ``1 - 1`` on
    the diagonal blocks when the deviation is far below unit roundoff.
    """
    zb = zeta if isinstance(zeta, specfun.BranchedComplex) else region_two_zeta(zeta)
    y_in = y_in_II(fh, side, zb, k, l, m).value
    y_mid = y_mid_II(fh, side, zb, k, l).value
    return (y_in - y_mid) @ y_mid_II_inverse(fh, side, zb, k, l)


# ---------------------------------------------------------------------------
# monodromy and the inner-region change of basis


def mid_monodromy(fh: FisherHartwigData, side, zeta, k: float, l: float) -> np.ndarray:
    """``M`` with ``Y_mid(e^{-2 pi i} zeta) = Y_mid(zeta) M`` (clockwise loop).

    ``M = 1 + r 2i sin(pi b) e^{-k zeta} E14 + r_tilde 2i sin(pi bt) e^{-l zeta} E23``;
    ``r 2i sin(pi beta) = f_i - f_o`` and ``r_tilde 2i sin(pi beta_tilde) = tau^2 (f_i - f_o)``.
    """
    loc = LocalData.build(fh, side)
    zb = specfun.BranchedComplex.coerce(zeta)
    out = np.eye(4, dtype=complex)
    out[0, 3] = loc.r * 2j * cmath.sin(math.pi * loc.beta) * cmath.exp(-k * zb.value)
    out[1, 2] = loc.r_tilde * 2j * cmath.sin(math.pi * loc.beta_tilde) * cmath.exp(-l * zb.value)
    return out


def monodromy_residual(fh: FisherHartwigData, side, zeta, k: float, l: float) -> float:
    zb = zeta if isinstance(zeta, specfun.BranchedComplex) else region_two_zeta(zeta)
    a = y_mid_II(fh, side, zb.rotate(-2 * math.pi), k, l).value
    b = y_mid_II(fh, side, zb, k, l).value @ mid_monodromy(fh, side, zb, k, l)
    return float(np.max(np.abs(a - b)) / np.max(np.abs(b)))


def full_jump(z: complex, lam: complex, f: float, k: int, l: int, m: int,
              kind: CovarianceKind) -> np.ndarray:
    """Jump matrix of the 4x4 problem on the unit circle."""
    tau = CovarianceKind.parse(kind).tau
    return np.array([[z ** k, 0, tau * f * z ** (-m), lam + f],
                     [0, z ** l, lam + tau ** 2 * f, tau * f * z ** m],
                     [0, 0, z ** (-l), 0],
                     [0, 0, 0, z ** (-k)]], dtype=complex)


def change_of_basis(z: complex, lam: complex, k: int, l: int, m: int,
                    kind: CovarianceKind) -> tuple[np.ndarray, np.ndarray]:
    """``(O_R, O_L)`` of the inner-region transformation."""
    tau = CovarianceKind.parse(kind).tau
    if tau == 0:
        raise ConfigurationError("tau must be nonzero")
    s2 = math.sqrt(2.0)
    t2 = tau * tau
    o_r = np.array([[s2 * z ** (-(k + m)), -t2 * z ** (-(k + m)) / s2, 0, 0],
                    [tau * s2 * z ** (-l), z ** (-l) / (tau * s2), 0, 0],
                    [0, 0, tau / s2, 1 / (tau * s2)],
                    [0, 0, -t2 * z ** (-m) / s2, z ** (-m) / s2]], dtype=complex)
    o_l = np.array([[s2 * z ** (-m), -t2 * z ** (-m) / s2, -t2 * lam * z ** (-m) / s2,
                     lam * z ** (-m) / s2],
                    [tau * s2, 1 / (tau * s2), tau * lam / s2, lam / (tau * s2)],
                    [0, 0, tau * z ** (-l) / s2, z ** (-l) / (tau * s2)],
                    [0, 0, -t2 * z ** (-(k + m)) / s2, z ** (-(k + m)) / s2]],
                   dtype=complex)
    return o_r, o_l


def reduced_jump(z: complex, lam: complex, f: float, k: int, l: int, m: int,
                 kind: CovarianceKind) -> np.ndarray:
    """``v = O_L^{-1} V O_R``; equals ``1 + f E14``."""
    o_r, o_l = change_of_basis(z, lam, k, l, m, kind)
    return np.linalg.solve(o_l, full_jump(z, lam, f, k, l, m, kind) @ o_r)

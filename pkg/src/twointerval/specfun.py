"""Complex special functions with explicit branch (sheet) tracking.

``tricomi_u(a, z)`` is the confluent hypergeometric ``U(a, 1, z)``. On the
principal sheet it is evaluated by

* the logarithmic series for ``|z| <= SERIES_RADIUS``,
* the asymptotic series with optimal truncation for ``|z| >= ASYMPTOTIC_RADIUS``,
* Taylor-series continuation of the differential equation
  ``z w'' + (1 - z) w' - a w = 0`` along the ray through ``z`` in between:
  inward from the asymptotic circle when ``Re z >= 0`` and outward from the
  series circle when ``Re z < 0``. Both directions damp the ``e^z`` solution.

Other sheets follow from ``U(a,1,z e^{2 pi i m}) = U(a,1,z) - 2 pi i m M(a,1,z)/Gamma(a)``.

``incomplete_gamma0`` (``E_1``) is implemented independently (power series and
continued fraction) so that ``U(1, 1, z) = e^z Gamma(0, z)`` is a genuine
cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from . import kernels
from .errors import NumericalError

SERIES_RADIUS = 2.0
ASYMPTOTIC_RADIUS = 32.0
TAYLOR_MAX_STEP = 2.0
ASYMPTOTIC_TOL = 1e-15
POLE_SNAP = 1e-14  # distance in a below which U(a) is taken at the pole
EULER_GAMMA = 0.57721566490153286061


@dataclass(frozen=True)
class BranchedComplex:
    """A point of the logarithmic Riemann surface over ``C \\ {0}``.

    ``value`` is the point in the plane and ``sheet`` counts windings relative
    to the principal branch ``arg in (-pi, pi]``; the continuous argument is
    ``Arg(value) + 2 pi sheet``.
    """

    value: complex
    sheet: int = 0

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))
        object.__setattr__(self, "sheet", int(self.sheet))

    @staticmethod
    def principal_arg(z: complex) -> float:
        ang = math.atan2(z.imag, z.real)
        # only a signed zero sits on the cut; a tiny negative imaginary part
        # whose angle rounds to -pi stays on the lower side
        return math.pi if ang == -math.pi and z.imag == 0.0 else ang

    @classmethod
    def from_polar(cls, modulus: float, argument: float) -> "BranchedComplex":
        sheet = math.ceil((argument - math.pi) / (2 * math.pi))
        phi = argument - 2 * math.pi * sheet
        if phi <= -math.pi:
            phi += 2 * math.pi
            sheet -= 1
        if phi == math.pi:
            val = complex(-modulus, 0.0)
        else:
            val = complex(modulus * math.cos(phi), modulus * math.sin(phi))
        return cls(val, sheet)

    @classmethod
    def coerce(cls, z) -> "BranchedComplex":
        return z if isinstance(z, cls) else cls(complex(z), 0)

    @property
    def modulus(self) -> float:
        return abs(self.value)

    @property
    def argument(self) -> float:
        return self.principal_arg(self.value) + 2 * math.pi * self.sheet

    def log(self) -> complex:
        return complex(math.log(self.modulus), self.argument)

    def power(self, exponent: complex) -> complex:
        return complex(np.exp(exponent * self.log()))

    def rotate(self, angle: float) -> "BranchedComplex":
        """Multiply by ``e^{i angle}``, continuing the argument."""
        return BranchedComplex.from_polar(self.modulus, self.argument + angle)

    def scale(self, factor: float) -> "BranchedComplex":
        if not factor > 0:
            raise ValueError("scale factor must be positive")
        return BranchedComplex(self.value * factor, self.sheet)

    def principal(self) -> "BranchedComplex":
        return BranchedComplex(self.value, 0)

    def conjugate(self) -> "BranchedComplex":
        z = self.value.conjugate()
        if self.principal_arg(self.value) == math.pi:
            # the negative axis belongs to the upper side; conj maps arg pi -> -pi
            return BranchedComplex.from_polar(self.modulus, -self.argument)
        return BranchedComplex(z, -self.sheet)


# ---------------------------------------------------------------------------
# gamma family (thin wrappers over scipy with pole checks)


def _is_nonpositive_integer(z: complex) -> bool:
    z = complex(z)
    return z.imag == 0.0 and z.real <= 0.0 and z.real == math.floor(z.real)


def log_gamma(z: complex) -> complex:
    """Principal branch of ``log Gamma(z)``."""
    if _is_nonpositive_integer(z):
        raise NumericalError(f"log_gamma pole at {z!r}")
    return complex(special.loggamma(complex(z)))


def gamma(z: complex) -> complex:
    if _is_nonpositive_integer(z):
        raise NumericalError(f"gamma pole at {z!r}")
    return complex(special.gamma(complex(z)))


def rgamma(z: complex) -> complex:
    """``1/Gamma(z)``, entire."""
    return complex(special.rgamma(complex(z)))


def digamma(z: complex) -> complex:
    if _is_nonpositive_integer(z):
        raise NumericalError(f"digamma pole at {z!r}")
    return complex(special.psi(complex(z)))


def sin_pi_over_pi(alpha: complex) -> complex:
    """``s_alpha = sin(pi alpha)/pi``."""
    return complex(np.sin(np.pi * complex(alpha)) / np.pi)


# ---------------------------------------------------------------------------
# U(a, 1, z) pieces


def _laguerre_u(n: int, z: complex) -> complex:
    """``U(-n, 1, z) = (-1)^n n! L_n(z)``."""
    total = 0j
    term = 1.0 + 0j
    for k in range(n + 1):
        if k:
            term *= -(n - k + 1) * z / (k * k)
        total += term
    return (-1) ** n * math.factorial(n) * total


def _log_series(a: complex, z: BranchedComplex, with_derivative: bool = False):
    """Logarithmic-case series of ``U(a, 1, z)`` on the sheet of ``z``."""
    zv = z.value
    lnz = z.log()
    ra = rgamma(a)
    kmax = 200
    total = 0j
    dtotal = 0j
    poch = 1.0 + 0j  # (a)_k / (k!)^2
    psi_a = None if _is_nonpositive_integer(a) else complex(special.psi(a))
    harmonic = 0.0
    zpow = 1.0 + 0j
    small = 0
    for k in range(kmax):
        if k:
            poch *= (a + k - 1) / (k * k)
            harmonic += 1.0 / k
            zpow = zpow * zv
            psi_a = psi_a + 1.0 / (a + k - 1)
        bracket = lnz + psi_a + 2 * EULER_GAMMA - 2 * harmonic
        # ra * poch * psi(a + k) stays finite near the poles of psi
        term = ra * poch * zpow * bracket
        total += term
        if with_derivative:
            dterm = ra * poch * (zpow / zv) * (k * bracket + 1.0)
            dtotal += dterm
        if abs(term) <= 1e-17 * max(abs(total), 1e-300) and k > abs(zv):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
    else:
        raise NumericalError(f"log series for U({a}, 1, {zv}) did not converge")
    if with_derivative:
        return -total, -dtotal
    return -total


def _asymptotic(a: complex, b: complex, z: complex):
    """Asymptotic series of ``U(a, b, z)`` with optimal truncation.

    Returns ``(value, relative_error_estimate)``; valid for ``|arg z| < 3pi/2``.
    """
    c = a - b + 1
    term = 1.0 + 0j
    total = 1.0 + 0j
    best = abs(term)
    err = 0.0
    for s in range(1, 400):
        nxt = term * (a + s - 1) * (c + s - 1) / (s * (-z))
        if abs(nxt) > abs(term) and s > 1:
            err = abs(term)
            break
        term = nxt
        total += term
        if abs(term) <= 1e-17 * abs(total):
            err = abs(term)
            break
        best = min(best, abs(term))
    else:
        err = best
    zpow = complex(np.exp(-a * BranchedComplex(z).log()))
    return total * zpow, err / max(abs(total), 1e-300)


def _asymptotic_start(a: complex, unit: complex, rmin: float):
    """Smallest radius ``>= rmin`` on the ray ``unit`` where the asymptotic
    series for ``U`` and ``U'`` is accurate to ``ASYMPTOTIC_TOL``."""
    radius = rmin
    for _ in range(12):
        start = unit * radius
        w0, e0 = _asymptotic(a, 1.0, start)
        dw1, e1 = _asymptotic(a + 1, 2.0, start)
        if max(e0, e1) <= ASYMPTOTIC_TOL:
            return start, w0, -a * dw1
        radius *= 1.4
    raise NumericalError(f"no accurate asymptotic start for U({a}, 1, z)")


def _u_principal(a: complex, z: complex) -> complex:
    r = abs(z)
    if r == 0.0:
        raise NumericalError("U(a, 1, z) is singular at z = 0")
    n = round(-a.real)
    if n >= 0 and abs(a + n) <= POLE_SNAP:
        # U is analytic in a; the log series would form 0 * inf here
        return _laguerre_u(n, z)
    if r <= SERIES_RADIUS:
        return _log_series(a, BranchedComplex(z))
    if r >= ASYMPTOTIC_RADIUS:
        val, err = _asymptotic(a, 1.0, z)
        if err <= ASYMPTOTIC_TOL:
            return val
    unit = z / r
    if z.real >= 0.0:
        start, w0, dw0 = _asymptotic_start(a, unit, max(ASYMPTOTIC_RADIUS, r))
    else:
        start = unit * SERIES_RADIUS
        w0, dw0 = _log_series(a, BranchedComplex(start), with_derivative=True)
    w, _dw, _n, ok = kernels.kummer_taylor_walk(a, start, w0, dw0, z, 0.35,
                                                TAYLOR_MAX_STEP)
    if not ok:
        raise NumericalError(f"Taylor continuation for U({a}, 1, {z}) did not converge")
    return complex(w)


def kummer_m(a: complex, z: complex) -> complex:
    """``M(a, 1, z)`` (single valued)."""
    a = complex(a)
    z = complex(z)
    if abs(z) <= 8.0:
        if z.real < 0:
            return complex(np.exp(z)) * _kummer_series(1 - a, -z)
        return _kummer_series(a, z)
    # connection formula through U on the principal sheet: rotate z by
    # e^{sgn i pi} so that the rotated point stays on the principal sheet
    sgn = -1.0 if BranchedComplex.principal_arg(z) > 0 else 1.0
    # z e^{i sgn pi} = -z, and negating keeps the side of the cut exact
    t1 = complex(np.exp(-sgn * math.pi * 1j * a)) * rgamma(1 - a) * _u_principal(a, z)
    t2 = (complex(np.exp(sgn * math.pi * 1j * (1 - a))) * rgamma(a)
          * complex(np.exp(z)) * _u_principal(1 - a, -z))
    return t1 + t2


def _kummer_series(a: complex, z: complex) -> complex:
    term = 1.0 + 0j
    total = 1.0 + 0j
    for k in range(1, 500):
        term *= (a + k - 1) * z / (k * k)
        total += term
        if abs(term) <= 1e-17 * abs(total) and k > abs(z):
            return total
    raise NumericalError("Kummer series did not converge")


def tricomi_u(a: complex, zeta) -> complex:
    """``U(a, 1, zeta)`` on the sheet recorded in ``zeta``."""
    a = complex(a)
    z = BranchedComplex.coerce(zeta)
    if z.modulus == 0.0:
        raise NumericalError("U(a, 1, z) is singular at z = 0")
    if _is_nonpositive_integer(a):
        return _laguerre_u(int(round(-a.real)), z.value)
    base = _u_principal(a, z.value)
    if z.sheet == 0:
        return base
    return base - 2j * math.pi * z.sheet * rgamma(a) * kummer_m(a, z.value)


def tricomi_u_series(a: complex, zeta) -> complex:
    """Logarithmic series only (diagnostics and overlap tests)."""
    return _log_series(complex(a), BranchedComplex.coerce(zeta))


def tricomi_u_asymptotic(a: complex, zeta) -> tuple[complex, float]:
    """Asymptotic series only, principal sheet; returns value and error estimate."""
    z = BranchedComplex.coerce(zeta)
    if z.sheet != 0:
        raise ValueError("asymptotic form is evaluated on the principal sheet")
    return _asymptotic(complex(a), 1.0, z.value)


# ---------------------------------------------------------------------------
# incomplete gamma Gamma(0, z) = E_1(z)


def _e1_series(z: complex) -> complex:
    total = 0j
    term = 1.0 + 0j
    for k in range(1, int(4 * abs(z)) + 100):
        term *= -z / k
        add = term / k
        total += add
        if abs(add) <= 1e-17 * max(abs(total), 1e-300) and k > abs(z):
            break
    else:
        raise NumericalError("E1 series did not converge")
    return -EULER_GAMMA - BranchedComplex(z).log() - total


def _e1_continued_fraction(z: complex) -> complex:
    return complex(np.exp(-z)) * _scaled_e1_continued_fraction(z)


def _scaled_e1_continued_fraction(z: complex) -> complex:
    # e^z E1(z) = 1 / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...))), modified Lentz
    tiny = 1e-300
    b = z + 1.0
    f = b if b != 0 else tiny
    c = f
    d = 0j
    for n in range(1, 5000):
        an = -(n * n)
        b = z + 2 * n + 1
        d = b + an * d
        d = 1.0 / (d if d != 0 else tiny)
        c = b + an / (c if c != 0 else tiny)
        delta = c * d
        f *= delta
        if abs(delta - 1.0) <= 1e-16:
            return 1.0 / f
    raise NumericalError(f"E1 continued fraction did not converge at {z!r}")


def _use_e1_series(z: complex) -> bool:
    r = abs(z)
    # near the negative axis E_1 ~ e^{-z}/z is as large as the series terms
    return r <= 2.0 or (z.real < 0 and r - abs(z.real) <= 8.0 and r <= 150.0)


def _e1_principal(z: complex) -> complex:
    if _use_e1_series(z):
        return _e1_series(z)
    return _e1_continued_fraction(z)


def incomplete_gamma0(zeta) -> complex:
    """``Gamma(0, zeta)`` on the sheet recorded in ``zeta``.

    Winding once counterclockwise subtracts ``2 pi i``.
    """
    z = BranchedComplex.coerce(zeta)
    if z.modulus == 0.0:
        raise NumericalError("Gamma(0, z) has a logarithmic singularity at z = 0")
    return _e1_principal(z.value) - 2j * math.pi * z.sheet


def scaled_gamma0(zeta) -> complex:
    """``e^{zeta} Gamma(0, zeta)``; the continued fraction is used in scaled form so
    large ``|zeta|`` does not overflow."""
    z = BranchedComplex.coerce(zeta)
    if z.modulus == 0.0:
        raise NumericalError("Gamma(0, z) has a logarithmic singularity at z = 0")
    if _use_e1_series(z.value):
        base = complex(np.exp(z.value)) * _e1_series(z.value)
    else:
        base = _scaled_e1_continued_fraction(z.value)
    if z.sheet == 0:
        return base
    return base - 2j * math.pi * z.sheet * complex(np.exp(z.value))


# ---------------------------------------------------------------------------
# P and Q combinations


def pq_functions(i: int, alpha: complex, zeta) -> tuple[complex, complex]:
    """``(Q^i_alpha(zeta), P^i_alpha(zeta))`` for ``i`` in {0, 1}.

    Q = -e^{2 pi i alpha} U(i - alpha, 1, e^{-i pi} zeta)
        + Gamma(alpha + 1 - i)/Gamma(i - alpha) e^{2 pi i alpha} e^{-zeta} U(1 - i + alpha, 1, zeta)
    P = e^{i pi alpha} U(i - alpha, 1, e^{-i pi} zeta)
    """
    if i not in (0, 1):
        raise ValueError("i must be 0 or 1")
    alpha = complex(alpha)
    if _is_nonpositive_integer(alpha) or _is_nonpositive_integer(-alpha):
        raise NumericalError("alpha must not be an integer")
    z = BranchedComplex.coerce(zeta)
    u_rot = tricomi_u(i - alpha, z.rotate(-math.pi))
    e2 = complex(np.exp(2j * math.pi * alpha))
    ratio = gamma(alpha + 1 - i) * rgamma(i - alpha)
    q = -e2 * u_rot + ratio * e2 * complex(np.exp(-z.value)) * tricomi_u(1 - i + alpha, z)
    p = complex(np.exp(1j * math.pi * alpha)) * u_rot
    return q, p


def q_limit_at_zero(i: int, alpha: complex) -> complex:
    """``lim_{zeta -> 0} Q^i_alpha(zeta) = e^{i pi alpha} / (Gamma(i - alpha) s_alpha)``."""
    return complex(np.exp(1j * math.pi * alpha)) * rgamma(i - alpha) / sin_pi_over_pi(alpha)

"""Change of the root density of ``det(lam + C)`` when one interval grows.

The roots of ``D_{k,l,n}(lam)`` sit at ``lam = -lam_i`` with ``lam_i`` the
covariance eigenvalues. Growing B by one site changes the root measure by

    Delta dw = -(1/2 pi i) [phi(lam + i0) - phi(lam - i0)] dlam,
    phi = d/dlam log(G R),

which splits into a counting part from ``G`` (the symbol's level density
``(1/pi)|dtheta/df|`` at ``f = -lam/sigma^2``, plus atoms from flat parts of
the symbol) and a correction from ``R``. On the real cut ``|Re beta| = 1/2``,
outside the regime where ``R`` is controlled, so integrated quantities are
computed on a circle instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..errors import ContourError, MultivaluedInverseError
from ..gaussian_core import CovarianceKind, Geometry, fmt
from ..orthopoly import Growth
from ..provenance import render_table
from ..symbol import OccupationSymbol
from .asymptotics import (DEFAULT_PHASE, _growth_sigma2, dlog_r,
                          dlog_ratio_asymptotic, exponents)

ETA = 1e-4
INVERSE_GRID = 1025
CIRCLE_RADIUS = 4.0
CIRCLE_NODES = 256
MAX_RE_BETA = 0.1


# -- counting part ---------------------------------------------------------
@dataclass(frozen=True)
class Atom:
    location: float
    weight: float


def counting_atoms(sym: OccupationSymbol, sigma2: float) -> list[Atom]:
    """Point masses of the counting measure from flat parts of the symbol."""
    pf = sym.fermi_momentum
    if sym.representation == "constant":
        return [Atom(-sigma2 * sym.f_inside, 1.0)]
    atoms = [Atom(-sigma2 * sym.f_outside, 1.0 - pf / math.pi)]
    if sym.representation == "step":
        atoms.append(Atom(-sigma2 * sym.f_inside, pf / math.pi))
    return sorted(atoms, key=lambda a: a.location)


def _monotone_pieces(theta: np.ndarray, f: np.ndarray) -> list[slice]:
    sgn = np.sign(np.diff(f))
    pieces, start = [], 0
    for i in range(1, sgn.size):
        if sgn[i] != sgn[i - 1] and sgn[i] != 0:
            pieces.append(slice(start, i + 1))
            start = i
    pieces.append(slice(start, theta.size))
    return pieces


def theta_inverse_slope(sym: OccupationSymbol, f_values, branches: str = "single"):
    """``sum |dtheta/df|`` over the sea arc ``(0, p_F)`` at the given ``f``.

    ``branches="single"`` requires a strictly monotone profile and raises
    :class:`MultivaluedInverseError` otherwise; ``branches="sum"`` (experimental)
    adds the contributions of all monotone pieces.
    """
    f_values = np.asarray(f_values, dtype=float)
    out = np.zeros(f_values.shape)
    if sym.representation != "sampled":
        return out
    theta = np.linspace(0.0, sym.fermi_momentum, INVERSE_GRID)
    f = sym.inside_profile(theta)
    pieces = _monotone_pieces(theta, f)
    if len(pieces) > 1 and branches != "sum":
        raise MultivaluedInverseError(
            "the sea profile is not monotone, theta(f) is multivalued; "
            "pass branches='sum' to add the monotone branches (experimental)")
    for sl in pieces:
        fs, ts = f[sl], theta[sl]
        if fs.size < 2 or fs[0] == fs[-1]:
            continue
        order = np.argsort(fs)
        inv = PchipInterpolator(fs[order], ts[order], extrapolate=False)
        slope = inv.derivative()(f_values)
        out += np.nan_to_num(np.abs(slope))
    return out


def counting_density(sym: OccupationSymbol, lam, sigma2: float,
                     branches: str = "single") -> np.ndarray:
    """Continuous part ``(1/pi)|dtheta/df|`` at ``f = -lam/sigma^2``."""
    lam = np.asarray(lam, dtype=float)
    return theta_inverse_slope(sym, -lam / sigma2, branches) / math.pi


# -- correction part -------------------------------------------------------
def richardson(values4: complex, values2: complex, values1: complex) -> complex:
    """Extrapolate ``g(eta) = g0 + a eta + b eta^2`` from ``g(4e), g(2e), g(e)``."""
    return (8 * values1 - 6 * values2 + values4) / 3


def boundary_jump(fn, x: np.ndarray, eta: float = ETA) -> np.ndarray:
    """``-(1/2 pi i)[fn(x + i0) - fn(x - i0)]`` with Richardson in ``eta``."""
    x = np.asarray(x, dtype=float)
    vals = {}
    for c in (4, 2, 1):
        up = fn(x + 1j * c * eta)
        dn = fn(x - 1j * c * eta)
        vals[c] = -(up - dn) / (2j * math.pi)
    return richardson(vals[4], vals[2], vals[1])


@dataclass(frozen=True)
class DensityResult:
    """Sampled root-density change on a real grid."""

    lam: np.ndarray
    counting: np.ndarray
    correction: np.ndarray
    atoms: list = field(default_factory=list)
    phase: str = DEFAULT_PHASE
    which: str = Growth.GROW_L.value
    kind: str = CovarianceKind.PLAIN.name

    @property
    def total(self) -> np.ndarray:
        return self.counting + self.correction

    def to_csv(self, prov: dict | None = None) -> str:
        rows = [(fmt(x), fmt(c), fmt(d), fmt(c + d))
                for x, c, d in zip(self.lam, self.counting, self.correction)]
        header = ("re_lambda", "density_term_counting", "density_term_correction", "total")
        prov = dict(prov or {})
        prov.setdefault("choices", {}).update({"r11_phase": self.phase})
        prov["atoms"] = [[fmt(a.location), fmt(a.weight)] for a in self.atoms]
        return render_table(header, rows, prov)


def spectral_density_change(sym: OccupationSymbol, geo: Geometry, lam_grid,
                            kind=CovarianceKind.PLAIN, which=Growth.GROW_L,
                            phase: str = DEFAULT_PHASE, eta: float = ETA,
                            branches: str = "single") -> DensityResult:
    """Counting and correction parts of ``Delta dw/dlam`` on ``lam_grid``.

    Atoms of the counting part (flat pieces of the symbol) are returned
    separately. The grid must avoid the branch points ``-f_i``, ``-f_o``.
    """
    kind = CovarianceKind.parse(kind)
    which = Growth.parse(which)
    x = np.asarray(lam_grid, dtype=float)
    sigma2 = _growth_sigma2(kind, which)
    counting = counting_density(sym, x, sigma2, branches)
    if sym.has_jump:
        corr = boundary_jump(lambda z: dlog_r(sym, geo, z, kind, which, phase), x, eta)
    else:
        corr = np.zeros(x.shape, dtype=complex)
    return DensityResult(lam=x, counting=counting, correction=np.real(corr),
                         atoms=counting_atoms(sym, sigma2), phase=phase,
                         which=which.value, kind=kind.name)


# -- integrated quantities on a circle -----------------------------------------
def circle_nodes(radius: float = CIRCLE_RADIUS, count: int = CIRCLE_NODES):
    """Trapezoid nodes and weights ``dlam/(2 pi i)`` on ``|lam| = radius``."""
    t = 2 * math.pi * (np.arange(count) + 0.5) / count
    z = radius * np.exp(1j * t)
    return z, z / count


def check_exponents(sym: OccupationSymbol, nodes, kind: CovarianceKind,
                    bound: float = MAX_RE_BETA) -> None:
    """Raise :class:`ContourError` at the first node with ``|Re beta| >= bound``."""
    for z in np.atleast_1d(nodes):
        for b in exponents(sym, complex(z), kind):
            if abs(b.real) >= bound:
                raise ContourError(
                    f"|Re beta| = {abs(b.real):.3g} >= {bound} at contour node {complex(z)!r}")


def root_moment(sym: OccupationSymbol, geo: Geometry, q: int,
                kind=CovarianceKind.PLAIN, which=Growth.GROW_L,
                phase: str = DEFAULT_PHASE, radius: float = CIRCLE_RADIUS,
                count: int = CIRCLE_NODES) -> complex:
    """``int lam^q Delta dw`` as ``(1/2 pi i) oint lam^q d log(G R)``.

    ``q = 0`` is the total weight (one root per added site).
    """
    kind = CovarianceKind.parse(kind)
    z, w = circle_nodes(radius, count)
    check_exponents(sym, z, kind)
    phi = dlog_ratio_asymptotic(sym, geo, z, kind, which, phase)
    return complex(np.sum(w * z ** q * phi))


def exact_root_moment(eig_big, eig_small, q: int) -> complex:
    """``sum (-lam_i)^q`` over the larger spectrum minus the smaller one."""
    big = np.asarray(eig_big, dtype=complex)
    small = np.asarray(eig_small, dtype=complex)
    return complex(np.sum((-big) ** q) - np.sum((-small) ** q))

"""Entropy and negativity from exact spectra and from the asymptotic ratio.

The entropy change under growing one interval is a sum of the binary entropy
``H((1 + x)/2)`` over the change of the root set of ``det(lam + C)``. With
``phi = d log(G R)/dlam`` it equals ``(1/2 pi i) oint H phi dlam`` over any
contour enclosing the roots and avoiding the cuts ``(-inf, -1]`` and
``[1, inf)`` of ``H``. The contour used here is the circle ``|lam| = 4`` cut
open along ``[1, 4]`` and ``[-4, -1]``; the two lobes around these slits are
collapsed onto them, where the integrand is the jump of ``H`` times ``phi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContourError
from .gaussian_core import (CovarianceKind, Geometry, binary_entropy,
                            build_covariance, fmt, log_negativity, spectrum)
from .orthopoly import Growth
from .provenance import render_table
from .rh.asymptotics import DEFAULT_PHASE, dlog_ratio_asymptotic
from .rh.density import MAX_RE_BETA, check_exponents
from .symbol import OccupationSymbol

RADIUS = 4.0
LOBE_NODES = 64
ARC_NODES = 32
PANEL_ORDER = 8
GRADING_FLOOR = 1e-12
STABILITY_TOL = 1e-6
MAX_DOUBLINGS = 4


# -- entropy kernel ---------------------------------------------------------
def entropy_kernel(lam) -> np.ndarray:
    """``H((1 + lam)/2)`` continued with principal logarithms.

    Analytic off ``(-inf, -1] U [1, inf)``; even in ``lam``.
    """
    lam = np.asarray(lam, dtype=complex)
    nu = (1 + lam) / 2
    return -nu * np.log(nu) - (1 - nu) * np.log(1 - nu)


def entropy_kernel_jump(x) -> np.ndarray:
    """``H(x + i0) - H(x - i0)``: ``-i pi (x - 1)`` for ``x > 1`` and
    ``-i pi (x + 1)`` for ``x < -1``; zero on ``[-1, 1]``."""
    x = np.asarray(x, dtype=float)
    return np.where(x > 1, -1j * math.pi * (x - 1),
                    np.where(x < -1, -1j * math.pi * (x + 1), 0j))


# -- contour --------------------------------------------------------------------
@dataclass(frozen=True)
class Segment:
    """Quadrature nodes on one piece of the contour.

    ``weights`` include ``dlam``. On ``"arc"`` segments the integrand is the
    function itself; on ``"cut"`` segments (collapsed lobes) it is the jump
    supplied by the caller.
    """

    nodes: np.ndarray
    weights: np.ndarray
    role: str


@dataclass(frozen=True)
class ContourSpec:
    """Circle of radius ``radius`` split into two arcs plus two collapsed lobes
    on ``[1, radius]`` and ``[-radius, -1]``."""

    radius: float = RADIUS
    lobe_nodes: int = LOBE_NODES
    arc_nodes: int = ARC_NODES
    segments: tuple = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self._build()))

    def _build(self):
        x, w = np.polynomial.legendre.leggauss(self.arc_nodes)
        for lo, hi in ((0.0, math.pi), (math.pi, 2 * math.pi)):
            t = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
            z = self.radius * np.exp(1j * t)
            yield Segment(z, 0.5 * (hi - lo) * w * 1j * z, "arc")
        panels = max(1, self.lobe_nodes // PANEL_ORDER)
        span = self.radius - 1.0
        # geometric grading toward the branch points at +-1
        breaks = 1.0 + span * (GRADING_FLOOR / span) ** (np.arange(panels + 1) / panels)
        breaks = np.concatenate([breaks, [1.0]])[::-1]
        gx, gw = np.polynomial.legendre.leggauss(PANEL_ORDER)
        pts = np.concatenate([0.5 * (b - a) * gx + 0.5 * (b + a)
                              for a, b in zip(breaks[:-1], breaks[1:])])
        wts = np.concatenate([0.5 * (b - a) * gw for a, b in zip(breaks[:-1], breaks[1:])])
        yield Segment(pts.astype(complex), wts.astype(complex), "cut")
        # the left slit is traversed from -radius to -1 as well
        yield Segment(-pts[::-1].astype(complex), wts[::-1].astype(complex), "cut")

    @property
    def nodes(self) -> np.ndarray:
        return np.concatenate([s.nodes for s in self.segments])

    def arc_nodes_only(self) -> np.ndarray:
        return np.concatenate([s.nodes for s in self.segments if s.role == "arc"])

    def doubled(self) -> "ContourSpec":
        return ContourSpec(self.radius, 2 * self.lobe_nodes, 2 * self.arc_nodes)


def contour_quadrature(fn, contour: ContourSpec, jump=None) -> complex:
    """``oint fn dlam`` over the arcs plus ``int jump dx`` over the slits.

    ``fn`` and ``jump`` are vectorized. Without ``jump`` the slits are
    skipped, which is exact for ``fn`` analytic inside the circle.
    """
    total = 0j
    for seg in contour.segments:
        if seg.role == "arc":
            total += np.sum(seg.weights * fn(seg.nodes))
        elif jump is not None:
            total += np.sum(seg.weights * jump(seg.nodes.real))
    return complex(total)


def check_contour(sym: OccupationSymbol, contour: ContourSpec,
                  kind: CovarianceKind, bound: float = MAX_RE_BETA) -> None:
    """Assert ``|Re beta|, |Re beta_tilde| < bound`` at every node."""
    try:
        check_exponents(sym, contour.nodes, kind, bound)
    except ContourError as exc:
        raise ContourError(f"entropy contour: {exc}") from None


# -- entropy ------------------------------------------------------------------
def spectrum_entropy(eigenvalues) -> float:
    """``sum H((1 + lam)/2)``; real spectra use the real binary entropy,
    complex (deformed) ones the principal continuation."""
    lam = np.asarray(eigenvalues, dtype=complex)
    if np.all(np.abs(lam.imag) < 1e-12) and np.all(np.abs(lam.real) <= 1 + 1e-12):
        return float(np.sum(binary_entropy(np.clip((1 + lam.real) / 2, 0.0, 1.0))))
    return float(np.sum(entropy_kernel(lam)).real)


def _smaller(geo: Geometry, which: Growth) -> Geometry:
    if which is Growth.GROW_L:
        if geo.l < 1:
            raise ContourError("GROW_L needs l >= 1")
        return Geometry(geo.k, geo.l - 1, geo.n)
    if geo.k < 1:
        raise ContourError("GROW_K needs k >= 1")
    return Geometry(geo.k - 1, geo.l, geo.n)


def entropy_change_exact(sym: OccupationSymbol, geo: Geometry,
                         kind=CovarianceKind.PLAIN, which=Growth.GROW_L) -> float:
    """``S(k,l,n) - S(k,l-1,n)`` (GROW_L) or ``S(k,l,n) - S(k-1,l,n)`` from spectra."""
    kind = CovarianceKind.parse(kind)
    which = Growth.parse(which)
    big = spectrum(build_covariance(sym, geo, kind)).eigenvalues
    small = spectrum(build_covariance(sym, _smaller(geo, which), kind)).eigenvalues
    return spectrum_entropy(big) - spectrum_entropy(small)


def _entropy_integral(sym, geo, kind, which, phase, contour) -> float:
    def phi(z):
        return dlog_ratio_asymptotic(sym, geo, z, kind, which, phase)
    total = contour_quadrature(lambda z: entropy_kernel(z) * phi(z), contour,
                               jump=lambda x: entropy_kernel_jump(x) * phi(x + 0j))
    return (total / (2j * math.pi)).real


def entropy_change(sym: OccupationSymbol, geo: Geometry, kind=CovarianceKind.PLAIN,
                   which=Growth.GROW_L, phase: str = DEFAULT_PHASE,
                   contour: ContourSpec | None = None) -> float:
    """Asymptotic entropy change from ``d log(G R)`` on the contour.

    Node counts double until consecutive values differ by less than
    ``STABILITY_TOL``.
    """
    kind = CovarianceKind.parse(kind)
    which = Growth.parse(which)
    contour = contour or ContourSpec()
    check_contour(sym, contour, kind)
    value = _entropy_integral(sym, geo, kind, which, phase, contour)
    for _ in range(MAX_DOUBLINGS):
        contour = contour.doubled()
        new = _entropy_integral(sym, geo, kind, which, phase, contour)
        if abs(new - value) < STABILITY_TOL:
            return new
        value = new
    return value


# -- negativity ---------------------------------------------------------------
def negativity_exact(sym: OccupationSymbol, geo: Geometry) -> float:
    """Logarithmic negativity from the exact deformed spectrum."""
    res = spectrum(build_covariance(sym, geo, CovarianceKind.NEGATIVITY))
    return log_negativity(res)


# -- reports --------------------------------------------------------------------
@dataclass(frozen=True)
class ObservableRow:
    quantity: str
    geometry: str
    kind: str
    asymptotic_value: float | None
    exact_value: float

    @property
    def rel_error(self) -> float | None:
        if self.asymptotic_value is None or self.exact_value == 0:
            return None
        return abs(self.asymptotic_value - self.exact_value) / abs(self.exact_value)

    def cells(self):
        def opt(v):
            return "" if v is None else fmt(v)
        return (self.quantity, self.geometry, self.kind, opt(self.asymptotic_value),
                fmt(self.exact_value), opt(self.rel_error))


OBSERVABLE_HEADER = ("quantity", "geometry", "kind", "asymptotic_value",
                     "exact_value", "rel_error")


def observables_csv(rows, prov: dict | None = None) -> str:
    return render_table(OBSERVABLE_HEADER, [r.cells() for r in rows], prov)

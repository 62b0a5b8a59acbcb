"""Triangular decomposition of the shifted covariance and vector polynomials.

For ``M = lam I + C`` the unpivoted decomposition ``M B = L`` with ``B`` unit
upper triangular and ``L`` lower triangular has diagonal ``eta_i``, the ratio
of consecutive leading principal minors. Column ``i`` of ``B`` only depends on
the leading ``i x i`` block, so ``eta_i`` does not change when the matrix is
extended. With A sites first the last pivot is ``D_{k,l,n} / D_{k,l-1,n}``;
with B sites first it is ``D_{k,l,n} / D_{k-1,l,n}``.

Vector polynomials ``psi = (psi_1, psi_2)`` with ``deg psi_1 <= k`` and
``deg psi_2 <= l`` are identified with coefficient vectors on the sites of A
and B. The moment ``e_s . int z^{-j} f(z) psi(z) dtheta/2pi`` of a site
``(s, j)`` is row ``(s, j)`` of ``M psi``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .errors import NumericalError, SingularMinorError
from .gaussian_core import (CovarianceKind, CovarianceMatrix, Geometry, assemble,
                            build_covariance, char_poly)
from .symbol import OccupationSymbol

LADDER_TOL = 1e-13


class Growth(enum.Enum):
    """Which interval gains a site in a determinant ratio."""

    GROW_L = "grow_l"
    GROW_K = "grow_k"

    @classmethod
    def parse(cls, value) -> "Growth":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("-", "_")
        for member in cls:
            if member.value == key or member.name.lower() == key:
                return member
        raise ValueError(f"unknown growth direction {value!r}")


@dataclass(frozen=True)
class ChiLadder:
    """Pivots of the unpivoted decomposition and the ratios built from them.

    Attributes
    ----------
    etas : ndarray
        ``eta_1..eta_N``; ``prod(etas) = det(lam I + C)``.
    chis : dict
        ``"2+"``: ``D_{k,l,n}/D_{k,l-1,n}``; ``"1+"``: ``D_{k,l,n}/D_{k-1,l,n}``;
        ``"1-"``: ``D_{k,l,n}/D_{k-1,l,n-1}`` (first A site removed);
        ``"2-"``: ``D_{k,l,n}/D_{k,l-1,n+1}`` (first B site removed).
    """

    etas: np.ndarray
    chis: dict = field(default_factory=dict)

    @property
    def determinant(self) -> complex:
        return complex(np.prod(self.etas))


def _shifted(mat: np.ndarray, lam: complex) -> np.ndarray:
    return np.asarray(mat, dtype=complex) + lam * np.eye(mat.shape[0])


def eta_pivots(shifted: np.ndarray) -> np.ndarray:
    """Unpivoted LU pivots of ``shifted``; raises on a vanishing minor."""
    etas, fail = kernels.lu_ladder(shifted, LADDER_TOL)
    if fail >= 0:
        cond = float(np.linalg.cond(shifted[:fail + 1, :fail + 1]))
        raise SingularMinorError(int(fail), complex(etas[fail]), cond)
    return np.asarray(etas)


def ladder_columns(shifted: np.ndarray) -> np.ndarray:
    """Unit upper triangular ``B`` with ``shifted @ B`` lower triangular.

    Column ``i`` solves the ``i - 1`` conditions ``(shifted B^{(i)})_j = 0``
    for ``j < i`` with ``B^{(i)}_i = 1``.
    """
    n = shifted.shape[0]
    b = np.zeros((n, n), dtype=complex)
    for i in range(n):
        b[i, i] = 1.0
        if i:
            rhs = -shifted[:i, i]
            b[:i, i] = np.linalg.solve(shifted[:i, :i], rhs)
    return b


def _reorder_b_first(geo: Geometry) -> np.ndarray:
    a = np.arange(geo.k + 1)
    b = geo.k + 1 + np.arange(geo.l + 1)
    return np.concatenate([b, a])


def chi_ladder(cov: CovarianceMatrix, lam: complex) -> ChiLadder:
    """Pivot ladder of ``lam I + C`` and the four boundary ratios."""
    shifted = _shifted(cov.entries, lam)
    etas = eta_pivots(shifted)
    geo = cov.geometry
    order = _reorder_b_first(geo)
    etas_b = eta_pivots(shifted[np.ix_(order, order)])
    chis = {"2+": complex(etas[-1]), "1+": complex(etas_b[-1])}
    inv_diag = np.diag(np.linalg.inv(shifted))
    chis["1-"] = complex(1.0 / inv_diag[0])
    chis["2-"] = complex(1.0 / inv_diag[geo.k + 1])
    return ChiLadder(etas=etas, chis=chis)


def det_ratio(sym: OccupationSymbol, geo: Geometry, lam: complex,
              kind: CovarianceKind = CovarianceKind.PLAIN,
              which: Growth | str = Growth.GROW_L) -> complex:
    """Ratio of characteristic determinants after growing one interval.

    ``GROW_L``: ``D_{k,l,n} / D_{k,l-1,n}``; ``GROW_K``: ``D_{k,l,n} /
    D_{k-1,l,n}``. ``D_{k,-1,n}`` and ``D_{-1,l,n}`` are the one-interval
    determinants.
    """
    which = Growth.parse(which)
    kind = CovarianceKind.parse(kind)
    a = np.arange(geo.k + 1)
    b = geo.n + np.arange(geo.l + 1)
    if which is Growth.GROW_L:
        mat = assemble(sym, a, b, kind)
    else:
        # B first so that the last site of A is the last pivot
        mat = assemble(sym, a, b, kind)
        order = _reorder_b_first(geo)
        mat = mat[np.ix_(order, order)]
    return complex(eta_pivots(_shifted(mat, lam))[-1])


def det_ratio_direct(sym: OccupationSymbol, geo: Geometry, lam: complex,
                     kind: CovarianceKind = CovarianceKind.PLAIN,
                     which: Growth | str = Growth.GROW_L) -> complex:
    """Same ratio as :func:`det_ratio` from two pivoted determinants."""
    which = Growth.parse(which)
    kind = CovarianceKind.parse(kind)
    a = np.arange(geo.k + 1)
    b = geo.n + np.arange(geo.l + 1)
    num = char_poly(assemble(sym, a, b, kind), lam)
    if which is Growth.GROW_L:
        den = char_poly(assemble(sym, a, b[:-1], kind), lam)
    else:
        den = char_poly(assemble(sym, a[:-1], b, kind), lam)
    return num / den


# ---------------------------------------------------------------------------
# vector orthogonal polynomials


@dataclass(frozen=True)
class VectorOrthoPoly:
    """Polynomial pair with its family label and normalization.

    ``family = (sigma, sign)`` with ``sigma`` in {1, 2} and ``sign`` in
    {"+", "-"}. For ``"+"`` the component ``sigma`` is monic of full degree;
    for ``"-"`` component ``sigma`` takes the value ``1/chi`` at ``z = 0``.
    """

    components: tuple
    family: tuple
    chi: complex
    geometry: Geometry
    kind: CovarianceKind
    lam: complex = 0j

    def evaluate(self, z):
        z = np.asarray(z, dtype=complex)
        p1 = np.polynomial.polynomial.polyval(z, self.components[0])
        p2 = np.polynomial.polynomial.polyval(z, self.components[1])
        return p1, p2

    def vector(self) -> np.ndarray:
        return np.concatenate(self.components)


def _family_site(geo: Geometry, family) -> int:
    sigma, sign = family
    if sigma not in (1, 2) or sign not in ("+", "-"):
        raise ValueError(f"bad family {family!r}")
    if sigma == 1:
        return geo.k if sign == "+" else 0
    return geo.k + 1 + (geo.l if sign == "+" else 0)


def ortho_poly(cov: CovarianceMatrix, lam: complex, family) -> VectorOrthoPoly:
    """Solve the moment conditions for one polynomial family.

    All moments vanish except at the family's site, where the moment is
    ``chi`` for ``"+"`` and 1 for ``"-"``.
    """
    geo = cov.geometry
    shifted = _shifted(cov.entries, lam)
    site = _family_site(geo, family)
    rhs = np.zeros(shifted.shape[0], dtype=complex)
    rhs[site] = 1.0
    try:
        sol = np.linalg.solve(shifted, rhs)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"singular moment system: {exc}") from exc
    if not np.all(np.isfinite(sol)) or sol[site] == 0:
        raise NumericalError("singular moment system")
    chi = 1.0 / sol[site]
    if family[1] == "+":
        sol = sol * chi
        sol[site] = 1.0
    comps = (sol[:geo.k + 1].copy(), sol[geo.k + 1:].copy())
    return VectorOrthoPoly(components=comps, family=tuple(family), chi=complex(chi),
                           geometry=geo, kind=cov.kind, lam=complex(lam))


def moment_residuals(cov: CovarianceMatrix, lam: complex,
                     poly: VectorOrthoPoly) -> float:
    """Max deviation of the exact moments from the defining conditions."""
    shifted = _shifted(cov.entries, lam)
    moments = shifted @ poly.vector()
    target = np.zeros_like(moments)
    site = _family_site(poly.geometry, poly.family)
    target[site] = poly.chi if poly.family[1] == "+" else 1.0
    return float(np.max(np.abs(moments - target)))


# ---------------------------------------------------------------------------
# T(0) entries


@dataclass
class TMatrixReport:
    """T(0) entries from polynomial data next to independent ratios.

    Each row holds ``(name, t_value, chi_value, residual)``.
    ``T_41(0) = -psi_{11-}(0)`` and ``T_32(0) = -psi_{22-}(0)``, so with
    ``psi_{ss-}(0) = 1/chi`` these equal ``-1/chi``; the residuals compare
    against that sign.
    """

    rows: list = field(default_factory=list)

    @property
    def max_residual(self) -> float:
        return max((r[3] for r in self.rows), default=0.0)

    def passed(self, tol: float) -> bool:
        return self.max_residual <= tol

    def to_dict(self) -> dict:
        return {"rows": [{"entry": n, "t_value": [t.real, t.imag],
                          "chi_value": [c.real, c.imag], "residual": r}
                         for n, t, c, r in self.rows],
                "max_residual": self.max_residual}


def _cauchy_coefficient(sym: OccupationSymbol, poly: VectorOrthoPoly,
                        component: int, power: int, nodes: int = 64) -> complex:
    """Coefficient of ``z^power`` in component ``component`` of ``f psi``.

    Computed by panel Gauss-Legendre quadrature over the unit circle, split
    at the sea edges so every panel integrand is smooth.
    """
    geo = poly.geometry
    tau = poly.kind.tau
    pf = sym.fermi_momentum
    edges = [-np.pi, -pf, pf, np.pi] if sym.has_jump else [-np.pi, np.pi]
    x, w = np.polynomial.legendre.leggauss(nodes)
    total = 0j
    for a, b in zip(edges[:-1], edges[1:]):
        # sub-panels keep the polynomial degree per panel small
        npan = max(1, int(np.ceil((b - a) * (geo.n + geo.l + power + 2) / 40.0)))
        for s in range(npan):
            lo = a + (b - a) * s / npan
            hi = a + (b - a) * (s + 1) / npan
            th = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
            wt = 0.5 * (hi - lo) * w
            z = np.exp(1j * th)
            f = sym.evaluate(th)
            p1, p2 = poly.evaluate(z)
            lam = poly.lam
            if component == 0:
                val = (lam + f) * p1 + tau * z ** geo.n * f * p2
            else:
                val = tau * z ** (-geo.n) * f * p1 + (lam + tau * tau * f) * p2
            total += np.sum(wt * val * z ** (-power))
    return total / (2 * np.pi)


def _solve_family(sym, geo, kind, lam, family):
    return ortho_poly(build_covariance(sym, geo, kind), lam, family)


def _minus_ratio(sym, geo: Geometry, kind, lam, sigma: int) -> complex:
    """``chi_{s-}`` as a quotient of two determinants (first site removed)."""
    a = np.arange(geo.k + 1)
    b = geo.n + np.arange(geo.l + 1)
    num = char_poly(assemble(sym, a, b, kind), lam)
    if sigma == 1:
        den = char_poly(assemble(sym, a[1:], b, kind), lam)
    else:
        den = char_poly(assemble(sym, a, b[1:], kind), lam)
    return num / den


def t_matrix_check(sym: OccupationSymbol, lam: complex, geo: Geometry,
                   kind: CovarianceKind = CovarianceKind.PLAIN) -> TMatrixReport:
    """Check the four T(0) entries against determinant ratios.

    * ``T_14(0)``: ``z^k`` coefficient of ``(f psi_{1+})_1`` at ``(k, l-1, n)``
      vs ``D_{k,l-1,n} / D_{k-1,l-1,n}``.
    * ``T_23(0)``: ``z^l`` coefficient of ``(f psi_{2+})_2`` at ``(k-1, l, n)``
      vs ``D_{k-1,l,n} / D_{k-1,l-1,n}``.
    * ``T_41(0) = -psi_{11-}(0)`` and ``T_32(0) = -psi_{22-}(0)`` at
      ``(k-1, l-1, n)`` vs ``-1/chi_{s-}`` from determinant quotients.
    """
    kind = CovarianceKind.parse(kind)
    if geo.k < 1 or geo.l < 1:
        raise ValueError("t_matrix_check needs k, l >= 1")
    report = TMatrixReport()

    g14 = Geometry(geo.k, geo.l - 1, geo.n)
    p14 = _solve_family(sym, g14, kind, lam, (1, "+"))
    t14 = _cauchy_coefficient(sym, p14, 0, g14.k)
    c14 = det_ratio_direct(sym, g14, lam, kind, Growth.GROW_K)
    report.rows.append(("T14", t14, c14, abs(t14 - c14) / max(1.0, abs(c14))))

    g23 = Geometry(geo.k - 1, geo.l, geo.n)
    p23 = _solve_family(sym, g23, kind, lam, (2, "+"))
    t23 = _cauchy_coefficient(sym, p23, 1, g23.l)
    c23 = det_ratio_direct(sym, g23, lam, kind, Growth.GROW_L)
    report.rows.append(("T23", t23, c23, abs(t23 - c23) / max(1.0, abs(c23))))

    g_minus = Geometry(geo.k - 1, geo.l - 1, geo.n)
    for name, sigma in (("T41", 1), ("T32", 2)):
        poly = _solve_family(sym, g_minus, kind, lam, (sigma, "-"))
        comp = poly.components[sigma - 1]
        t_val = -complex(comp[0])
        chi = _minus_ratio(sym, g_minus, kind, lam, sigma)
        target = -1.0 / chi
        report.rows.append((name, t_val, target,
                            abs(t_val - target) / max(1.0, abs(target))))
    return report

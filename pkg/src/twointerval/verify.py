"""Identity suite: exact-path identities, special functions, parametrices and
the asymptotic ratio, each reported as a residual against a threshold."""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass, field

import numpy as np

from . import model, specfun
from .gaussian_core import (CovarianceKind, Geometry, assemble, build_covariance,
                            char_poly)
from .orthopoly import (Growth, chi_ladder, det_ratio, det_ratio_direct,
                        t_matrix_check)
from .rh import parametrix
from .rh.asymptotics import (DEFAULT_PHASE, PHASE_VARIANTS, cross_term,
                             det_ratio_asymptotic, outer_y_at_zero,
                             r_out_from_exponents)
from .rh.fisher_hartwig import Side, fh_data, szego_check
from .symbol import OccupationSymbol, from_occupation, from_step

SEED = 20261016
MUTATIONS = ("r11-phase-flip",)


@dataclass(frozen=True)
class IdentityResult:
    name: str
    symbol: str
    residual: float
    threshold: float
    detail: str = ""
    comparison: str = "le"   # "le": residual <= threshold; "ge": residual >= threshold

    @property
    def passed(self) -> bool:
        if not np.isfinite(self.residual):
            return False
        if self.comparison == "ge":
            return self.residual >= self.threshold
        return self.residual <= self.threshold

    def line(self) -> str:
        op = ">=" if self.comparison == "ge" else "<="
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name} [{self.symbol}] residual={self.residual:.3e} "
                f"{op} {self.threshold:.1e} {self.detail}").rstrip()


@dataclass
class SuiteReport:
    results: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def lines(self) -> list[str]:
        return [r.line() for r in self.results]


# -- exact-path identities ----------------------------------------------------
DETS_LAMBDA = 0.37 + 1.1j


def dets_and_chis(sym: OccupationSymbol, label: str, max_size: int = 5,
                  lam: complex = DETS_LAMBDA) -> IdentityResult:
    """Pivot ratios of the ladder against quotients of determinants."""
    worst = 0.0
    for kind in CovarianceKind:
        for k in range(1, max_size + 1):
            for l in range(1, max_size + 1):
                geo = Geometry(k, l, k + 1 + (l % 2))
                lad = chi_ladder(build_covariance(sym, geo, kind), lam)
                a = np.arange(k + 1)
                b = geo.n + np.arange(l + 1)
                full = char_poly(assemble(sym, a, b, kind), lam)
                refs = {
                    "2+": det_ratio_direct(sym, geo, lam, kind, Growth.GROW_L),
                    "1+": det_ratio_direct(sym, geo, lam, kind, Growth.GROW_K),
                    "1-": full / char_poly(assemble(sym, a[1:], b, kind), lam),
                    "2-": full / char_poly(assemble(sym, a, b[1:], kind), lam),
                }
                for key, ref in refs.items():
                    worst = max(worst, abs(lad.chis[key] - ref) / max(1.0, abs(ref)))
    return IdentityResult("dets_and_chis", label, worst, 1e-8, f"k,l<={max_size}")


def ts_and_chis(sym: OccupationSymbol, label: str, max_size: int = 4,
                lam: complex = DETS_LAMBDA) -> IdentityResult:
    """T(0) entries from the vector polynomials against determinant ratios."""
    worst = 0.0
    for kind in CovarianceKind:
        for k in range(1, max_size + 1):
            for l in range(1, max_size + 1):
                geo = Geometry(k, l, k + 2)
                worst = max(worst, t_matrix_check(sym, lam, geo, kind).max_residual)
    return IdentityResult("ts_and_chis", label, worst, 1e-7, f"k,l<={max_size}")


def weight_sum(spec: model.ReservoirSpec, label: str, samples: int = 257) -> IdentityResult:
    """Chain weights of all normal modes sum to one at every momentum."""
    _, w = model.dispersion_roots_grid(spec, model.sample_momenta(samples))
    return IdentityResult("weight_sum", label, float(np.max(np.abs(w.sum(axis=1) - 1))),
                          1e-10)


# -- special functions ----------------------------------------------------------
def psi_monodromy(count: int = 100, seed: int = SEED) -> IdentityResult:
    """``U(a,1,e^{-2pi i} z)`` against ``e^{2pi i a} U(a,1,z) - 2pi i e^{i pi a}
    e^z U(1-a,1,e^{-i pi} z)/Gamma(a)^2``, relative to ``max(1, |U|)``."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(count):
        a = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        z = specfun.BranchedComplex.from_polar(rng.uniform(0.05, 40.0),
                                               rng.uniform(-math.pi, math.pi))
        lhs = specfun.tricomi_u(a, z.rotate(-2 * math.pi))
        rhs = (cmath.exp(2j * math.pi * a) * specfun.tricomi_u(a, z)
               - 2j * math.pi * specfun.rgamma(a) ** 2 * cmath.exp(1j * math.pi * a)
               * cmath.exp(z.value) * specfun.tricomi_u(1 - a, z.rotate(-math.pi)))
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(lhs)))
    return IdentityResult("psi_monodromy", "-", worst, 1e-9, f"{count} random (a, zeta)")


def u_gamma0(count: int = 50, seed: int = SEED) -> IdentityResult:
    """``U(1,1,z) = e^z Gamma0(z)``."""
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(count):
        z = specfun.BranchedComplex.from_polar(rng.uniform(0.05, 40.0),
                                               rng.uniform(-math.pi, math.pi))
        u = specfun.tricomi_u(1.0, z)
        ref = specfun.scaled_gamma0(z)
        worst = max(worst, abs(u - ref) / max(1.0, abs(ref)))
    return IdentityResult("u_gamma0", "-", worst, 1e-10)


def pq_monodromy(count: int = 40, seed: int = SEED) -> IdentityResult:
    """``(Q, P)(e^{-2 pi i} z) = (Q, P)(z) [[1, 2i sin(pi a)], [0, 1]]``."""
    rng = np.random.default_rng(seed + 2)
    worst = 0.0
    for _ in range(count):
        alpha = complex(rng.uniform(-0.45, 0.45), rng.uniform(-0.5, 0.5))
        i = int(rng.integers(0, 2))
        z = specfun.BranchedComplex.from_polar(rng.uniform(0.1, 20.0),
                                               rng.uniform(-math.pi, math.pi))
        q0, p0 = specfun.pq_functions(i, alpha, z)
        q1, p1 = specfun.pq_functions(i, alpha, z.rotate(-2 * math.pi))
        scale = max(1.0, abs(q0), abs(p0))
        worst = max(worst, abs(q1 - q0) / scale,
                    abs(p1 - (p0 + 2j * cmath.sin(math.pi * alpha) * q0)) / scale)
    return IdentityResult("pq_monodromy", "-", worst, 1e-9)


# -- Fisher-Hartwig data and parametrices ------------------------------------------
def _off_cut_lambdas(count: int, seed: int) -> list[complex]:
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        lam = complex(rng.uniform(-3, 3), rng.uniform(-3, 3))
        if abs(lam.imag) > 0.1 and min(abs(lam - 1), abs(lam + 1)) > 0.1:
            out.append(lam)
    return out


def szego(sym: OccupationSymbol, label: str, count: int = 20,
          seed: int = SEED) -> IdentityResult:
    worst = 0.0
    for lam in _off_cut_lambdas(count, seed + 3):
        for sigma in ("1", "tau"):
            worst = max(worst, szego_check(sym, lam, sigma).residual)
    return IdentityResult("szego", label, worst, 1e-8, f"{count} random lambda")


def wiener_hopf(sym: OccupationSymbol, label: str, lam: complex = 0.3 + 0.7j) -> IdentityResult:
    fh = fh_data(sym, lam, CovarianceKind.NEGATIVITY)
    thetas = np.linspace(-math.pi, math.pi, 41)[:-1] + 0.013
    res = max(fh.factor.residual(thetas), fh.factor_tilde.residual(thetas))
    return IdentityResult("wiener_hopf", label, res, 1e-8)


def loglog_slope(xs, ys) -> float:
    return float(np.polyfit(np.log(xs), np.log(ys), 1)[0])


def mid_out_matching(sym: OccupationSymbol, label: str,
                     lam: complex = 0.3 + 0.7j) -> IdentityResult:
    """Worst decay exponent of ``|Y_mid Y_out^{-1} - 1 - dR|`` in ``|k zeta|``."""
    fh = fh_data(sym, lam, CovarianceKind.NEGATIVITY)
    k = l = 1e12
    sizes = np.array([30.0, 60.0, 120.0, 300.0])
    worst = np.inf
    for side in Side:
        for ang in (2.0, 3.6):
            errs = []
            for s in sizes:
                zb = parametrix.region_two_zeta(s / k * cmath.exp(1j * ang))
                z = parametrix.point_from_zeta(fh, side, zb)
                dev = (parametrix.y_mid_II(fh, side, zb, k, l).value
                       @ np.linalg.inv(parametrix.y_out(fh, z).value) - np.eye(4))
                errs.append(np.max(np.abs(dev - parametrix.delta_r_mid_out(fh, side, zb, k, l))))
            worst = min(worst, -loglog_slope(sizes, errs))
    return IdentityResult("mid_out_matching_slope", label, worst, 1.9,
                          "decay exponent in |k zeta|", comparison="ge")


def in_mid_matching(sym: OccupationSymbol, label: str,
                    lam: complex = -0.4 + 0.5j) -> list[IdentityResult]:
    """Closed-form agreement and ``1/m`` scaling of ``Y_in Y_mid^{-1} - 1``."""
    zeta = 1e-12 * cmath.exp(2.3j)
    k, l = 1.0, 1.3
    ms = np.array([1e21, 1e22])
    worst_rel, worst_slope = 0.0, np.inf
    for kind in CovarianceKind:
        fh = fh_data(sym, lam, kind)
        for side in Side:
            zb = parametrix.region_two_zeta(zeta)
            sizes = []
            for m in ms:
                dev = parametrix.inner_mid_deviation(fh, side, zb, k, l, m)
                ref = parametrix.delta_r_in_mid(fh, side, zb, k, l, m)
                worst_rel = max(worst_rel, np.max(np.abs(dev - ref)) / np.max(np.abs(ref)))
                sizes.append(np.max(np.abs(dev)))
            worst_slope = min(worst_slope, -loglog_slope(ms, sizes))
    return [IdentityResult("in_mid_matrix", label, worst_rel, 1e-8, "m|zeta| >= 1e8"),
            IdentityResult("in_mid_m_slope", label, worst_slope, 0.9,
                           "decay exponent in m", comparison="ge")]


def mid_monodromy(sym: OccupationSymbol, label: str,
                  lam: complex = 0.3 + 0.7j) -> IdentityResult:
    fh = fh_data(sym, lam, CovarianceKind.NEGATIVITY)
    worst = 0.0
    for side in Side:
        for zeta in (0.02 * cmath.exp(2.2j), 0.05 * cmath.exp(3.9j)):
            worst = max(worst, parametrix.monodromy_residual(fh, side, zeta, 40, 30))
    return IdentityResult("mid_monodromy", label, worst, 1e-9)


def basis_change(lam: complex = 0.3 + 0.4j) -> IdentityResult:
    """``O_L^{-1} V O_R = 1 + f E14`` on the unit circle."""
    worst = 0.0
    for kind in CovarianceKind:
        for theta in (0.37, 1.9, -2.4):
            z = cmath.exp(1j * theta)
            v = parametrix.reduced_jump(z, lam, 0.7, 3, 4, 9, kind)
            ref = np.eye(4, dtype=complex)
            ref[0, 3] = 0.7
            worst = max(worst, float(np.max(np.abs(v - ref))))
    return IdentityResult("basis_change", "-", worst, 1e-12)


# -- asymptotic ratio ----------------------------------------------------------------
GO_GEOMETRIES = ((16, 16, 128), (32, 32, 256))
GO_LAMBDA = 2j


def _mutated_ratio(sym, geo, lam, kind, which, phase, mutation):
    ratio = det_ratio_asymptotic(sym, geo, lam, kind, which, phase)
    if mutation is None or which is not Growth.GROW_K:
        return ratio
    if mutation != "r11-phase-flip":
        raise ValueError(f"unknown mutation {mutation!r}")
    fh = fh_data(sym, lam, kind)
    ph = tuple(-p for p in PHASE_VARIANTS[phase])
    res = r_out_from_exponents(fh.beta, fh.beta_tilde, fh.fermi_momentum,
                               geo.k, geo.l, geo.m, phase)
    flipped = (cross_term(fh.beta, fh.beta_tilde, fh.fermi_momentum, geo.k, geo.l, geo.m, ph)
               + cross_term(-fh.beta, -fh.beta_tilde, -fh.fermi_momentum,
                            geo.k, geo.l, geo.m, ph))
    return outer_y_at_zero(fh, which) * (1 + 2 * res.leading11 + flipped)


def go_comparison(sym: OccupationSymbol, label: str, phase: str = DEFAULT_PHASE,
                  mutation: str | None = None,
                  geometries=GO_GEOMETRIES, lam: complex = GO_LAMBDA) -> list[IdentityResult]:
    """Asymptotic ratio against the ladder at two geometries, both kinds and
    both growth directions: error at the first and shrink factor per doubling."""
    out = []
    for kind in CovarianceKind:
        for which in Growth:
            errs = []
            for g in geometries:
                geo = Geometry(*g)
                exact = det_ratio(sym, geo, lam, kind, which)
                pred = _mutated_ratio(sym, geo, lam, kind, which, phase, mutation)
                errs.append(abs(pred / exact - 1))
            tag = f"{kind.name.lower()}/{which.value}"
            out.append(IdentityResult(f"go_rel_error[{tag}]", label, errs[0], 0.05,
                                      f"at {geometries[0]}"))
            if errs[0] > 1e-12:
                out.append(IdentityResult(f"go_shrink[{tag}]", label, errs[0] / errs[1],
                                          2.0, f"{geometries[0]} -> {geometries[1]}",
                                          comparison="ge"))
    return out


PHASE_CASES = dict(p_fermi=(math.pi / 2, math.pi / 3),
                   lambdas=(2j, 3.0, 0.5 + 0.5j, -1.5 + 0.3j),
                   geometries=((16, 16, 128), (32, 32, 256), (16, 8, 160), (8, 16, 100)))


def select_phase(cases: dict = PHASE_CASES) -> tuple[str, dict]:
    """Phase variant of ``R11`` with the smaller summed relative error of the
    GROW_K ratio against the ladder."""
    totals = {v: 0.0 for v in PHASE_VARIANTS}
    for pf in cases["p_fermi"]:
        sym = from_step(pf)
        for lam in cases["lambdas"]:
            for kind in CovarianceKind:
                for g in cases["geometries"]:
                    geo = Geometry(*g)
                    exact = det_ratio(sym, geo, lam, kind, Growth.GROW_K)
                    for v in totals:
                        pred = det_ratio_asymptotic(sym, geo, lam, kind, Growth.GROW_K, v)
                        totals[v] += abs(pred / exact - 1)
    return min(totals, key=totals.get), totals


# -- suite -----------------------------------------------------------------------------
def default_symbols() -> list[tuple[str, OccupationSymbol, model.ReservoirSpec | None]]:
    spec = model.demo_spec()
    return [("step", from_step(math.pi / 2), None),
            ("reservoir", from_occupation(spec, grid_size=64), spec)]


def exact_suite(symbols=None) -> SuiteReport:
    """The exact-path identities (fast)."""
    start = time.perf_counter()
    rep = SuiteReport()
    for label, sym, spec in symbols or default_symbols():
        rep.results.append(dets_and_chis(sym, label))
        rep.results.append(ts_and_chis(sym, label))
        if spec is not None:
            rep.results.append(weight_sum(spec, label))
    rep.seconds = time.perf_counter() - start
    return rep


def full_suite(symbols=None, phase: str = DEFAULT_PHASE,
               mutation: str | None = None, asymptotic_symbols=("step",)) -> SuiteReport:
    """Every identity; the asymptotic ratio comparison runs on the symbols
    named in ``asymptotic_symbols``."""
    start = time.perf_counter()
    symbols = symbols or default_symbols()
    rep = exact_suite(symbols)
    rep.results += [psi_monodromy(), u_gamma0(), pq_monodromy(), basis_change()]
    for label, sym, _ in symbols:
        if not sym.has_jump:
            continue
        rep.results += [szego(sym, label), wiener_hopf(sym, label),
                        mid_monodromy(sym, label), mid_out_matching(sym, label)]
        rep.results += in_mid_matching(sym, label)
    for label, sym, _ in symbols:
        if label in asymptotic_symbols:
            rep.results += go_comparison(sym, label, phase, mutation)
    rep.seconds = time.perf_counter() - start
    return rep

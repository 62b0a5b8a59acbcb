"""Exact path: two-interval covariance matrices and their spectra.

Interval A occupies sites ``0..k`` and interval B sites ``n..n+l``. The
covariance entries are ``f_{x_i - x_j}``. The partial-transpose deformation
multiplies the B-B block by ``tau**2`` and the A-B blocks by ``tau`` with
``tau = i``.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import ConfigurationError, SpectrumError
from .symbol import OccupationSymbol

log = logging.getLogger(__name__)

ENTROPY_CLIP = 1e-8


class CovarianceKind(enum.Enum):
    PLAIN = 1
    NEGATIVITY = 2

    @property
    def tau(self) -> complex:
        return 1.0 + 0j if self is CovarianceKind.PLAIN else 1j

    @property
    def tau2(self) -> float:
        return 1.0 if self is CovarianceKind.PLAIN else -1.0

    @classmethod
    def parse(cls, value) -> "CovarianceKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().upper()
        aliases = {"PLAIN": cls.PLAIN, "1": cls.PLAIN, "ENTROPY": cls.PLAIN,
                   "NEGATIVITY": cls.NEGATIVITY, "I": cls.NEGATIVITY,
                   "1J": cls.NEGATIVITY}
        if key not in aliases:
            raise ConfigurationError(f"unknown covariance kind {value!r}")
        return aliases[key]


@dataclass(frozen=True)
class Geometry:
    """Two intervals: A = {0..k}, B = {n..n+l}."""

    k: int
    l: int
    n: int

    def __post_init__(self):
        for name in ("k", "l", "n"):
            v = getattr(self, name)
            if int(v) != v:
                raise ConfigurationError(f"{name} must be an integer")
            object.__setattr__(self, name, int(v))
        if self.k < 0 or self.l < 0:
            raise ConfigurationError("k and l must be >= 0")
        if self.n < self.k + 1:
            raise ConfigurationError(
                f"intervals overlap: need n >= k + 1 (got k={self.k}, n={self.n})")

    @property
    def m(self) -> int:
        """Distance between the right endpoints, ``n + l - k``."""
        return self.n + self.l - self.k

    @property
    def size(self) -> int:
        return self.k + self.l + 2

    def sites(self) -> np.ndarray:
        return np.concatenate([np.arange(self.k + 1),
                               self.n + np.arange(self.l + 1)])

    def mirror(self) -> "Geometry":
        """Reflect the line: B becomes the left interval."""
        return Geometry(self.l, self.k, self.n + self.l - self.k)

    def label(self) -> str:
        return f"{self.k},{self.l},{self.n}"


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    entries: np.ndarray
    geometry: Geometry
    kind: CovarianceKind
    symbol: OccupationSymbol | None = field(default=None, repr=False)

    @property
    def size(self) -> int:
        return self.entries.shape[0]


@dataclass(frozen=True, eq=False)
class SpectrumResult:
    """Eigenvalues of a covariance matrix and derived quantities.

    ``nu`` holds the pairs ``((1 + lam)/2, (1 - lam)/2)`` row by row.
    """

    eigenvalues: np.ndarray
    kind: CovarianceKind
    geometry: Geometry | None = None

    @property
    def nu(self) -> np.ndarray:
        lam = self.eigenvalues
        return np.stack([(1 + lam) / 2, (1 - lam) / 2], axis=1)

    @property
    def entropy(self) -> float:
        return entropy(self)

    @property
    def log_negativity(self) -> float:
        return log_negativity(self)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "re_lambda", "im_lambda", "nu_plus", "nu_minus"])
        for i, lam in enumerate(np.asarray(self.eigenvalues, dtype=complex)):
            nup, num = (1 + lam) / 2, (1 - lam) / 2
            writer.writerow([i, fmt(lam.real), fmt(lam.imag), fmt_c(nup), fmt_c(num)])
        return buf.getvalue()


def fmt(x: float) -> str:
    """17 significant digits, normalizing negative zero."""
    x = float(x)
    if x == 0.0:
        x = 0.0
    return f"{x:.17g}"


def fmt_c(z: complex) -> str:
    z = complex(z)
    if z.imag == 0.0:
        return fmt(z.real)
    return f"{fmt(z.real)}{'+' if z.imag >= 0 else '-'}{fmt(abs(z.imag))}j"


def _index_sets(sites_a, sites_b):
    sites = np.concatenate([sites_a, sites_b])
    na = len(sites_a)
    return sites, na


def assemble(sym: OccupationSymbol, sites_a, sites_b, kind: CovarianceKind,
             coeffs: np.ndarray | None = None) -> np.ndarray:
    """Deformed covariance on arbitrary site sets (A first, then B)."""
    sites_a = np.asarray(sites_a, dtype=int)
    sites_b = np.asarray(sites_b, dtype=int)
    sites, na = _index_sets(sites_a, sites_b)
    if sites.size == 0:
        return np.zeros((0, 0), dtype=complex)
    lags = np.abs(sites[:, None] - sites[None, :])
    need = int(lags.max()) if lags.size else 0
    if coeffs is None or coeffs.size <= need:
        coeffs = sym.fourier_coeffs(need)
    mat = coeffs[lags].astype(complex)
    tau = kind.tau
    mat[na:, na:] *= tau * tau
    mat[:na, na:] *= tau
    mat[na:, :na] *= tau
    return mat


def build_covariance(sym: OccupationSymbol, geo: Geometry,
                     kind: CovarianceKind = CovarianceKind.PLAIN) -> CovarianceMatrix:
    """Covariance matrix of size ``k + l + 2`` for the two intervals."""
    kind = CovarianceKind.parse(kind)
    entries = assemble(sym, np.arange(geo.k + 1), geo.n + np.arange(geo.l + 1), kind)
    return CovarianceMatrix(entries=entries, geometry=geo, kind=kind, symbol=sym)


def _sort_eigs(vals: np.ndarray) -> np.ndarray:
    order = np.lexsort((vals.imag, vals.real))
    return vals[order]


def spectrum(cov: CovarianceMatrix) -> SpectrumResult:
    """All eigenvalues, ordered by real part then imaginary part."""
    mat = cov.entries
    if not np.all(np.isfinite(mat)):
        raise SpectrumError("covariance matrix has non-finite entries")
    try:
        if cov.kind is CovarianceKind.PLAIN:
            vals = np.linalg.eigvalsh(mat.real).astype(complex)
        else:
            vals = scipy.linalg.eigvals(mat, check_finite=False)
    except np.linalg.LinAlgError as exc:
        cond = float(np.linalg.cond(mat))
        raise SpectrumError(
            f"eigen-solver failed ({exc}); matrix condition number {cond:.3e}") from exc
    return SpectrumResult(eigenvalues=_sort_eigs(np.asarray(vals, dtype=complex)),
                          kind=cov.kind, geometry=cov.geometry)


def binary_entropy(nu):
    """``-nu ln nu - (1 - nu) ln(1 - nu)`` with the 0 ln 0 = 0 convention."""
    nu = np.asarray(nu, dtype=float)
    out = np.zeros_like(nu)
    inner = (nu > 0) & (nu < 1)
    x = nu[inner]
    out[inner] = -x * np.log(x) - (1 - x) * np.log1p(-x)
    return out


def entropy(res: SpectrumResult) -> float:
    """Von Neumann entropy ``sum_i H((1 + lam_i)/2)`` of a plain spectrum."""
    if res.kind is not CovarianceKind.PLAIN:
        raise ValueError("entropy needs a PLAIN spectrum")
    lam = np.asarray(res.eigenvalues)
    if np.any(np.abs(lam.imag) > ENTROPY_CLIP):
        raise SpectrumError("plain spectrum has complex eigenvalues")
    lam = lam.real
    over = np.abs(lam) > 1.0
    if np.any(np.abs(lam) > 1.0 + ENTROPY_CLIP):
        raise SpectrumError(
            f"eigenvalue {lam[np.argmax(np.abs(lam))]!r} outside [-1, 1]")
    if np.any(over):
        log.warning("clipping %d eigenvalue(s) overshooting [-1, 1] by < %g",
                    int(over.sum()), ENTROPY_CLIP)
        lam = np.clip(lam, -1.0, 1.0)
    return float(np.sum(binary_entropy((1 + lam) / 2)))


def log_negativity(res: SpectrumResult) -> float:
    """``sum_i ln(|(1 - lam_i)/2| + |(1 + lam_i)/2|)`` of a deformed spectrum."""
    if res.kind is not CovarianceKind.NEGATIVITY:
        raise ValueError("log_negativity needs a NEGATIVITY spectrum")
    lam = np.asarray(res.eigenvalues, dtype=complex)
    return float(np.sum(np.log(np.abs((1 - lam) / 2) + np.abs((1 + lam) / 2))))


def char_poly(cov: CovarianceMatrix | np.ndarray, lam: complex) -> complex:
    """``det(lam I + cov)`` from a pivoted LU factorization."""
    mat = cov.entries if isinstance(cov, CovarianceMatrix) else np.asarray(cov)
    if mat.shape[0] == 0:
        return 1.0 + 0j
    shifted = mat + lam * np.eye(mat.shape[0])
    lu, piv = scipy.linalg.lu_factor(shifted, check_finite=False)
    sign = (-1.0) ** np.count_nonzero(piv != np.arange(piv.size))
    return complex(sign * np.prod(np.diag(lu)))


def log_char_poly(mat: np.ndarray, lam: complex) -> complex:
    """``log det(lam I + mat)`` (branch fixed by summing pivot logs)."""
    if mat.shape[0] == 0:
        return 0j
    shifted = mat + lam * np.eye(mat.shape[0])
    lu, piv = scipy.linalg.lu_factor(shifted, check_finite=False)
    flips = np.count_nonzero(piv != np.arange(piv.size))
    return complex(np.sum(np.log(np.diag(lu).astype(complex))) + 1j * np.pi * (flips % 2))


def shifted_determinant(sym: OccupationSymbol, sites_a, sites_b,
                        kind: CovarianceKind, lam: complex) -> complex:
    """``det(lam + C)`` for arbitrary site sets; empty sets give 1."""
    mat = assemble(sym, sites_a, sites_b, kind)
    return char_poly(mat, lam)

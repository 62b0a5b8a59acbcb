"""Tight-binding chain whose sites each couple to a ladder of reservoir levels.

Units: hbar = 1 and lattice spacing 1. The chain dispersion is
``eps(p) = hopping_scale * (1 - cos p)`` and the reservoir self energy is

    self_energy(w) = alpha**2 * spacing * sum_n H_n**2 / (w - G_n),
    G_n = spacing * n + band_bottom,   n = 1..N.

A normal mode of momentum p has frequency w solving ``w = eps(p) +
self_energy(w)``; its weight on the chain site is
``1 / (1 + alpha**2 * spacing * sum_n H_n**2 / (w - G_n)**2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Sequence

import numpy as np

from . import kernels
from .errors import ConfigurationError, DegenerateOccupationError, NumericalError

_DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class ReservoirSpec:
    """Parameters of the reservoir-coupled chain.

    Attributes
    ----------
    hopping_scale : float
        Band-width scale of the bare chain, ``eps(p) = hopping_scale (1 - cos p)``.
    coupling : float
        Dimensionless chain-reservoir coupling ``alpha``.
    band_bottom : float
        Offset of the reservoir ladder, ``G_n = level_spacing * n + band_bottom``.
    level_spacing : float
        Spacing of the reservoir ladder, strictly positive.
    couplings : tuple of float
        Per-level couplings ``H_n``, one per reservoir level.
    fermi_energy : float
        Fermi energy of the ground state.
    """

    hopping_scale: float
    coupling: float
    band_bottom: float
    level_spacing: float
    couplings: tuple = field(default_factory=tuple)
    fermi_energy: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "couplings",
                           tuple(float(h) for h in self.couplings))
        if not self.hopping_scale > 0:
            raise ConfigurationError("hopping_scale must be > 0")
        if not self.level_spacing > 0:
            raise ConfigurationError("level_spacing must be > 0")
        if len(self.couplings) < 1:
            raise ConfigurationError("at least one reservoir level is required")
        vals = [self.hopping_scale, self.coupling, self.band_bottom,
                self.level_spacing, self.fermi_energy, *self.couplings]
        if not all(np.isfinite(vals)):
            raise ConfigurationError("reservoir parameters must be finite")

    @property
    def level_count(self) -> int:
        return len(self.couplings)

    @property
    def levels(self) -> np.ndarray:
        """Reservoir frequencies ``G_n`` for n = 1..N."""
        n = np.arange(1, self.level_count + 1)
        return self.level_spacing * n + self.band_bottom

    @property
    def level_strengths(self) -> np.ndarray:
        """``alpha**2 * spacing * H_n**2`` for every level."""
        h = np.asarray(self.couplings)
        return self.coupling ** 2 * self.level_spacing * h ** 2

    def chain_energy(self, p):
        return self.hopping_scale * (1.0 - np.cos(p))

    def self_energy(self, w):
        w = np.asarray(w, dtype=float)
        return np.sum(self.level_strengths / (w[..., None] - self.levels),
                      axis=-1)

    def to_dict(self) -> dict:
        return {
            "hopping_scale": self.hopping_scale,
            "coupling": self.coupling,
            "band_bottom": self.band_bottom,
            "level_spacing": self.level_spacing,
            "couplings": list(self.couplings),
            "fermi_energy": self.fermi_energy,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReservoirSpec":
        known = {"hopping_scale", "coupling", "band_bottom", "level_spacing",
                 "couplings", "fermi_energy", "level_count"}
        extra = set(data) - known
        if extra:
            raise ConfigurationError(f"unknown reservoir fields: {sorted(extra)}")
        try:
            spec = cls(
                hopping_scale=float(data["hopping_scale"]),
                coupling=float(data["coupling"]),
                band_bottom=float(data["band_bottom"]),
                level_spacing=float(data["level_spacing"]),
                couplings=tuple(data["couplings"]),
                fermi_energy=float(data["fermi_energy"]),
            )
        except KeyError as exc:
            raise ConfigurationError(f"missing reservoir field {exc}") from None
        if "level_count" in data and int(data["level_count"]) != spec.level_count:
            raise ConfigurationError("level_count does not match couplings")
        return spec


@dataclass(frozen=True)
class ModeSolution:
    """Normal-mode frequencies at one momentum and their chain weights."""

    roots: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return len(self.roots)


def _coupled(spec: ReservoirSpec):
    c2 = spec.level_strengths
    mask = c2 > 0
    return spec.levels[mask], c2[mask], spec.levels[~mask]


def dispersion_roots_grid(spec: ReservoirSpec, momenta) -> tuple[np.ndarray, np.ndarray]:
    """Roots and weights for an array of momenta.

    Returns arrays of shape ``(len(momenta), N + 1)``, each row sorted in
    ascending frequency. Levels with ``H_n = 0`` stay at ``G_n`` with weight 0.
    """
    p = np.atleast_1d(np.asarray(momenta, dtype=float))
    energies = spec.chain_energy(p)
    poles, c2, loose = _coupled(spec)
    if poles.size == 0:
        roots = np.concatenate(
            [energies[:, None], np.broadcast_to(loose, (p.size, loose.size))],
            axis=1)
        weights = np.zeros_like(roots)
        weights[:, 0] = 1.0
    else:
        coupled = kernels.dispersion_roots(energies, poles, c2)
        if not np.all(np.isfinite(coupled)):
            raise NumericalError("bracketed dispersion root did not converge")
        w = 1.0 / (1.0 + np.sum(c2 / (coupled[..., None] - poles) ** 2, axis=-1))
        roots = np.concatenate(
            [coupled, np.broadcast_to(loose, (p.size, loose.size))], axis=1)
        weights = np.concatenate([w, np.zeros((p.size, loose.size))], axis=1)
    order = np.argsort(roots, axis=1, kind="stable")
    return (np.take_along_axis(roots, order, axis=1),
            np.take_along_axis(weights, order, axis=1))


def dispersion_roots(spec: ReservoirSpec, p: float) -> ModeSolution:
    """All N + 1 normal modes at momentum ``p``."""
    if not np.isfinite(p):
        raise ConfigurationError("momentum must be finite")
    roots, weights = dispersion_roots_grid(spec, [p])
    return ModeSolution(roots=roots[0], weights=weights[0])


def occupation_grid(spec: ReservoirSpec, momenta,
                    side: Literal["inside", "outside"] | None = None) -> np.ndarray:
    """Chain occupation for an array of momenta.

    A root within ``1e-12`` (relative) of the Fermi energy with nonzero weight
    is degenerate: ``side="inside"`` counts it as occupied, ``"outside"`` as
    empty, and ``None`` raises.
    """
    roots, weights = dispersion_roots_grid(spec, momenta)
    ef = spec.fermi_energy
    tol = _DEGENERACY_TOL * max(1.0, abs(ef), spec.hopping_scale)
    at_ef = (np.abs(roots - ef) <= tol) & (weights > 0)
    if at_ef.any():
        if side is None:
            raise DegenerateOccupationError(
                "Fermi energy coincides with a dispersion root; pass side="
                "'inside' or 'outside'")
        below = (roots < ef) & ~at_ef
        if side == "inside":
            below |= at_ef
    else:
        below = roots < ef
    # weights sum to one only up to rounding
    return np.clip(np.sum(np.where(below, weights, 0.0), axis=1), 0.0, 1.0)


def occupation(spec: ReservoirSpec, p: float,
               side: Literal["inside", "outside"] | None = None) -> float:
    """Occupation of the chain mode of momentum ``p``, in [0, 1]."""
    return float(occupation_grid(spec, [p], side=side)[0])


def occupied_root_count(spec: ReservoirSpec, momenta) -> np.ndarray:
    """Number of roots carrying weight below the Fermi energy."""
    roots, weights = dispersion_roots_grid(spec, momenta)
    return np.sum((roots < spec.fermi_energy) & (weights > 0), axis=1)


def fermi_momentum(spec: ReservoirSpec) -> float:
    """Momentum at which the chain mode crosses the Fermi energy.

    Solves ``fermi_energy = eps(p_F) + self_energy(fermi_energy)``, which
    inverts in closed form because ``eps`` is a cosine band.
    """
    ef = spec.fermi_energy
    poles, c2, _ = _coupled(spec)
    if poles.size and np.min(np.abs(ef - poles)) <= _DEGENERACY_TOL * max(1.0, abs(ef)):
        raise NumericalError("Fermi energy sits on a reservoir level")
    shift = float(np.sum(c2 / (ef - poles))) if poles.size else 0.0
    x = 1.0 - (ef - shift) / spec.hopping_scale
    if not -1.0 < x < 1.0:
        raise NumericalError(
            "Fermi energy lies outside the renormalized band: no Fermi momentum "
            f"in (0, pi) (cos p_F would be {x:.6g})")
    return float(np.arccos(x))


def sample_momenta(count: int) -> np.ndarray:
    """Uniform momentum grid on (-pi, pi]."""
    return np.linspace(-np.pi, np.pi, count + 1)[1:]


def check_single_jump(spec: ReservoirSpec, p_fermi: float | None = None,
                      samples: int = 2048) -> float:
    """Verify the occupation has exactly one jump pair at +-p_F.

    Inside the sea exactly one root must lie below the Fermi energy and
    outside none. Returns ``p_F``.
    """
    from .errors import MultipleJumpError

    pf = fermi_momentum(spec) if p_fermi is None else p_fermi
    p = np.linspace(0.0, np.pi, samples + 1)
    p = p[np.abs(p - pf) > 1e-9 * max(1.0, pf)]
    counts = occupied_root_count(spec, p)
    inside = counts[p < pf]
    outside = counts[p > pf]
    if np.any(inside != 1) or np.any(outside != 0):
        raise MultipleJumpError(
            "occupation has more than one jump pair (a reservoir level "
            "intersects the Fermi sea); the asymptotic analysis needs a single "
            "jump at +-p_F")
    return pf


def as_spec(obj) -> ReservoirSpec:
    if isinstance(obj, ReservoirSpec):
        return obj
    if isinstance(obj, dict):
        return ReservoirSpec.from_dict(obj)
    raise ConfigurationError(f"cannot interpret {type(obj).__name__} as a reservoir spec")


def demo_spec(level_count: int = 8, coupling: float = 0.1,
              couplings: Sequence[float] | None = None) -> ReservoirSpec:
    """A reservoir well above a half-filled band, useful in examples."""
    if couplings is None:
        couplings = [1.0 / (1.0 + 0.1 * n) for n in range(level_count)]
    return ReservoirSpec(hopping_scale=1.0, coupling=coupling,
                         band_bottom=2.5, level_spacing=0.25,
                         couplings=tuple(couplings), fermi_energy=1.0)

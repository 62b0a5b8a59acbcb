"""The occupation symbol f on the unit circle.

``f(e^{ip}) = 2 n(p) - 1`` where ``n(p)`` is the mode occupation. It equals
``-1`` outside the Fermi sea ``|p| > p_F`` and is an even function of ``p``.
Inside the sea the profile is either constant (``"step"``), sampled from a
model on a Chebyshev grid (``"sampled"``), or the symbol is a constant on the
whole circle (``"constant"``, a degenerate test input without a sea edge).

Fourier coefficients are ``f_j = (1/2pi) int f(e^{it}) e^{-ijt} dt``. They are
split into the closed-form coefficients of a step with the same jump and a
remainder that is smooth on the closed sea arc, integrated by Gauss-Legendre
quadrature on that arc.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.fft import dct

from .errors import ConfigurationError

REPRESENTATIONS = ("step", "sampled", "constant")


@dataclass(frozen=True, eq=False)
class OccupationSymbol:
    """Even symbol with a single jump pair at ``+-p_F``.

    Attributes
    ----------
    fermi_momentum : float
        Sea edge ``p_F`` in (0, pi).
    representation : str
        One of ``"step"``, ``"sampled"``, ``"constant"``.
    jump_values : tuple of float
        ``(f_i, f_o)``: limits at ``p_F`` from inside and outside the sea.
    nodes, values : ndarray, optional
        Chebyshev (first kind) momenta in ``(0, p_F)`` and the profile there.
    """

    fermi_momentum: float
    representation: str
    jump_values: tuple
    nodes: np.ndarray | None = None
    values: np.ndarray | None = None

    def __post_init__(self):
        if self.representation not in REPRESENTATIONS:
            raise ConfigurationError(
                f"representation must be one of {REPRESENTATIONS}")
        pf = float(self.fermi_momentum)
        if not 0.0 < pf < np.pi:
            raise ConfigurationError("fermi_momentum must lie in (0, pi)")
        object.__setattr__(self, "fermi_momentum", pf)
        fi, fo = (float(v) for v in self.jump_values)
        object.__setattr__(self, "jump_values", (fi, fo))
        if self.representation == "sampled":
            if self.nodes is None or self.values is None:
                raise ConfigurationError("sampled symbols need nodes and values")
            nodes = np.asarray(self.nodes, dtype=float)
            values = np.asarray(self.values, dtype=float)
            if nodes.shape != values.shape or nodes.ndim != 1 or nodes.size < 3:
                raise ConfigurationError("nodes/values must be equal-length 1d arrays")
            expected = chebyshev_nodes(nodes.size, pf)
            if not np.allclose(nodes, expected, rtol=1e-13, atol=1e-15):
                raise ConfigurationError(
                    "sampled nodes must be the first-kind Chebyshev grid on (0, p_F)")
            if np.any(np.abs(values) > 1.0 + 1e-12):
                raise ConfigurationError("profile values must satisfy |f| <= 1")
            object.__setattr__(self, "nodes", nodes)
            object.__setattr__(self, "values", values)
        if max(abs(fi), abs(fo)) > 1.0 + 1e-12:
            raise ConfigurationError("jump values must satisfy |f| <= 1")

    # -- basic data -------------------------------------------------------
    @property
    def f_inside(self) -> float:
        return self.jump_values[0]

    @property
    def f_outside(self) -> float:
        return self.jump_values[1]

    @property
    def fermi_point(self) -> complex:
        """``z_F = e^{i p_F}``."""
        return complex(np.exp(1j * self.fermi_momentum))

    @property
    def has_jump(self) -> bool:
        return self.f_inside != self.f_outside

    @cached_property
    def _cheb_coeffs(self) -> np.ndarray:
        y = np.asarray(self.values, dtype=float)
        c = dct(y, type=2) / y.size
        c[0] *= 0.5
        return c

    @cached_property
    def _cheb_deriv(self) -> np.ndarray:
        return np.polynomial.chebyshev.chebder(self._cheb_coeffs)

    # -- pointwise evaluation -----------------------------------------------
    def inside_profile(self, p):
        """Profile on the closed sea arc ``0 <= |p| <= p_F``."""
        p = np.abs(np.asarray(p, dtype=float))
        if self.representation != "sampled":
            return np.full(p.shape, self.f_inside)
        x = 2.0 * p / self.fermi_momentum - 1.0
        return np.polynomial.chebyshev.chebval(x, self._cheb_coeffs)

    def inside_slope(self, p):
        """``d f / d p`` of the inside profile (zero for step symbols)."""
        p = np.asarray(p, dtype=float)
        if self.representation != "sampled":
            return np.zeros(p.shape)
        x = 2.0 * np.abs(p) / self.fermi_momentum - 1.0
        d = np.polynomial.chebyshev.chebval(x, self._cheb_deriv)
        return np.sign(p) * d * 2.0 / self.fermi_momentum

    def in_sea(self, p):
        """Fermi-sea indicator for momenta wrapped to (-pi, pi]."""
        p = wrap_momentum(p)
        return np.abs(p) < self.fermi_momentum

    def evaluate(self, p):
        """``f(e^{ip})``; the value exactly at the jump is the mean of the limits."""
        p = wrap_momentum(np.asarray(p, dtype=float))
        if self.representation == "constant":
            return np.full(p.shape, self.f_inside)
        a = np.abs(p)
        out = np.where(a < self.fermi_momentum,
                       self.inside_profile(np.minimum(a, self.fermi_momentum)),
                       self.f_outside)
        at_edge = a == self.fermi_momentum
        if np.any(at_edge):
            out = np.where(at_edge, 0.5 * (self.f_inside + self.f_outside), out)
        return out

    __call__ = evaluate

    # -- Fourier coefficients ---------------------------------------------
    def step_coeffs(self, jmax: int) -> np.ndarray:
        """Coefficients ``j = 0..jmax`` of the step with the same jump."""
        j = np.arange(jmax + 1, dtype=float)
        fi, fo = self.jump_values
        if self.representation == "constant":
            out = np.zeros(jmax + 1)
            out[0] = fi
            return out
        pf = self.fermi_momentum
        out = np.empty(jmax + 1)
        out[0] = fo + (fi - fo) * pf / np.pi
        jj = j[1:]
        out[1:] = (fi - fo) * np.sin(jj * pf) / (np.pi * jj)
        return out

    def remainder_coeffs(self, jmax: int) -> np.ndarray:
        """Coefficients of ``f - step``; zero unless the profile is sampled."""
        if self.representation != "sampled":
            return np.zeros(jmax + 1)
        pf = self.fermi_momentum
        nq = max(96, self.nodes.size + int(jmax) + 32)
        x, w = np.polynomial.legendre.leggauss(nq)
        p = 0.5 * pf * (x + 1.0)
        g = (self.inside_profile(p) - self.f_inside) * w * (0.5 * pf) / np.pi
        j = np.arange(jmax + 1)
        return np.cos(np.outer(j, p)) @ g

    def fourier_coeffs(self, jmax: int) -> np.ndarray:
        """``f_0 .. f_jmax`` (the sequence is even: ``f_{-j} = f_j``)."""
        if jmax < 0:
            raise ValueError("jmax must be >= 0")
        return self.step_coeffs(jmax) + self.remainder_coeffs(jmax)

    def coefficient(self, j: int) -> float:
        return float(self.fourier_coeffs(abs(int(j)))[-1])

    # -- inverse profile --------------------------------------------------
    def is_monotone_inside(self) -> bool:
        if self.representation != "sampled":
            return True
        p = np.linspace(0.0, self.fermi_momentum, 2049)
        d = self.inside_slope(p[1:-1])
        return bool(np.all(d <= 1e-12) or np.all(d >= -1e-12))

    def inside_range(self) -> tuple[float, float]:
        if self.representation != "sampled":
            return (self.f_inside, self.f_inside)
        p = np.linspace(0.0, self.fermi_momentum, 2049)
        v = self.inside_profile(p)
        return float(v.min()), float(v.max())

    # -- serialization ----------------------------------------------------
    def to_dict(self) -> dict:
        grid = None
        if self.representation == "sampled":
            grid = {"nodes": [float(v) for v in self.nodes],
                    "values": [float(v) for v in self.values]}
        return {
            "fermi_momentum": self.fermi_momentum,
            "representation": self.representation,
            "jump_values": [self.f_inside, self.f_outside],
            "grid": grid,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "OccupationSymbol":
        try:
            grid = data.get("grid") or {}
            return cls(
                fermi_momentum=float(data["fermi_momentum"]),
                representation=str(data["representation"]),
                jump_values=tuple(data["jump_values"]),
                nodes=None if not grid else np.asarray(grid["nodes"], dtype=float),
                values=None if not grid else np.asarray(grid["values"], dtype=float),
            )
        except (KeyError, TypeError) as exc:
            raise ConfigurationError(f"malformed symbol document: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "OccupationSymbol":
        return cls.from_dict(json.loads(text))

    def __repr__(self):
        return (f"OccupationSymbol(p_F={self.fermi_momentum!r}, "
                f"representation={self.representation!r}, "
                f"jump_values={self.jump_values!r})")


def wrap_momentum(p):
    """Map momenta to (-pi, pi]."""
    p = np.asarray(p, dtype=float)
    inside = (p > -np.pi) & (p <= np.pi)  # exact for in-range values
    return np.where(inside, p, np.pi - np.mod(np.pi - p, 2.0 * np.pi))


def chebyshev_nodes(count: int, p_fermi: float) -> np.ndarray:
    """First-kind Chebyshev points mapped to (0, p_F), in descending order."""
    x = np.cos(np.pi * (np.arange(count) + 0.5) / count)
    return 0.5 * p_fermi * (x + 1.0)


def from_step(p_fermi: float) -> OccupationSymbol:
    """Step symbol: +1 inside the Fermi sea, -1 outside."""
    return OccupationSymbol(p_fermi, "step", (1.0, -1.0))


def constant_symbol(value: float, p_fermi: float = np.pi / 2) -> OccupationSymbol:
    """Symbol equal to ``value`` on the whole circle (no sea edge).

    ``p_fermi`` is nominal; with no jump it never enters a result.
    """
    return OccupationSymbol(p_fermi, "constant", (value, value))


def from_profile(p_fermi: float, profile, grid_size: int = 128,
                 f_outside: float = -1.0) -> OccupationSymbol:
    """Sample an even inside profile ``profile(p)`` on the Chebyshev grid."""
    nodes = chebyshev_nodes(grid_size, p_fermi)
    values = np.asarray(profile(nodes), dtype=float)
    c = dct(values, type=2) / values.size
    c[0] *= 0.5
    f_in = float(np.sum(c))  # interpolant at p = p_F
    return OccupationSymbol(p_fermi, "sampled", (f_in, f_outside),
                            nodes=nodes, values=values)


def from_occupation(model_spec, grid_size: int = 128) -> OccupationSymbol:
    """Symbol ``2 n(p) - 1`` of a reservoir-coupled chain.

    The profile inside the sea is sampled on ``grid_size`` Chebyshev points and
    the inner jump value is the interpolant's limit at ``p_F``. A decoupled
    chain (``coupling == 0``) returns the exact step symbol.
    """
    from . import model

    spec = model.as_spec(model_spec)
    pf = model.check_single_jump(spec)
    if spec.coupling == 0.0 or not np.any(spec.level_strengths > 0):
        return from_step(pf)
    if grid_size < 8:
        raise ConfigurationError("grid_size must be >= 8")

    def profile(p):
        return 2.0 * model.occupation_grid(spec, p) - 1.0

    return from_profile(pf, profile, grid_size=grid_size)


def fourier_coeff(sym: OccupationSymbol, j: int) -> float:
    """Single Fourier coefficient ``f_j``."""
    return sym.coefficient(j)

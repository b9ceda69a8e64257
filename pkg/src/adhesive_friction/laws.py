"""Pointwise constitutive laws for adhesive frictional contact.

Everything here is a pure function of its arguments and accepts scalars or
numpy arrays for the gap. The normal law is the coarse-grained
Lennard-Jones traction between a surface point and a flat half-space;
the two friction laws bound the tangential traction either by a constant
shear strength inside a cutoff distance (``FrictionDI``) or by a shifted
copy of the normal traction (``FrictionEA``).

Sign conventions: positive normal traction is repulsive, gaps are signed
(negative means overlap).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np
from scipy.special import expit

__all__ = [
    "DomainError",
    "AdhesionParams",
    "DerivedAdhesionConstants",
    "FrictionDI",
    "FrictionEA",
    "Frictionless",
    "FrictionLaw",
    "RegularizationConfig",
    "Threshold",
    "lj_potential",
    "normal_traction",
    "normal_traction_derivative",
    "normal_traction_reg",
    "normal_traction_reg_derivative",
    "derived_constants",
    "calibrate_from_physical",
    "t_slide_di",
    "t_slide_di_derivative",
    "mu_di",
    "g_cut_ea",
    "t_slide_ea",
    "t_slide_ea_derivatives",
    "sliding_threshold",
    "threshold_and_derivatives",
    "area_convention",
    "cutoff_gap",
]

_G_EQ_FACTOR = 15.0 ** (-1.0 / 6.0)
_G_MAX_FACTOR = 5.0 ** (-1.0 / 6.0)


class DomainError(ValueError):
    """Raised when a law is evaluated outside its mathematical domain."""


@dataclass(frozen=True)
class AdhesionParams:
    """Hamaker constant and molecular length of the interaction."""

    hamaker: float
    r0: float

    def __post_init__(self):
        if not (self.hamaker > 0 and self.r0 > 0):
            raise DomainError(f"hamaker and r0 must be positive, got {self.hamaker}, {self.r0}")

    @property
    def t0(self) -> float:
        return self.hamaker / (2.0 * math.pi * self.r0**3)


@dataclass(frozen=True)
class DerivedAdhesionConstants:
    g_eq: float
    w_adh: float
    g_max: float
    t_max: float
    t0: float


@dataclass(frozen=True)
class FrictionDI:
    """Distance-independent sliding threshold ``tau_di`` for gaps below ``g_cut``."""

    tau_di: float
    g_cut: float
    k_di: float

    def __post_init__(self):
        if self.tau_di < 0:
            raise DomainError("tau_di must be non-negative")
        if not self.k_di > 0:
            raise DomainError("k_di must be positive")

    @classmethod
    def from_mu(cls, mu: float, p: AdhesionParams, g_cut: float | None = None,
                k_di: float | None = None) -> "FrictionDI":
        """Build the law from ``mu_di = tau_di / t_max``.

        ``g_cut`` defaults to ``g_max`` and ``k_di`` to ``200 / r0``.
        """
        c = derived_constants(p)
        return cls(tau_di=mu * c.t_max,
                   g_cut=c.g_max if g_cut is None else g_cut,
                   k_di=200.0 / p.r0 if k_di is None else k_di)


@dataclass(frozen=True)
class FrictionEA:
    """Local extended Amontons law: threshold proportional to the shifted normal traction."""

    mu_ea: float
    s_cut: float

    def __post_init__(self):
        if self.mu_ea < 0:
            raise DomainError("mu_ea must be non-negative")
        if not 0.0 <= self.s_cut <= 1.0:
            raise DomainError(f"s_cut must lie in [0, 1], got {self.s_cut}")


@dataclass(frozen=True)
class Frictionless:
    pass


FrictionLaw = Union[FrictionDI, FrictionEA, Frictionless]


@dataclass(frozen=True)
class RegularizationConfig:
    """Linear extrapolation point for the normal law and optional EA kink smoothing."""

    g_reg: float
    ea_smoothing: bool = False

    def __post_init__(self):
        if not self.g_reg > 0:
            raise DomainError("g_reg must be positive")

    @classmethod
    def default(cls, p: AdhesionParams, ea_smoothing: bool = False) -> "RegularizationConfig":
        return cls(g_reg=p.r0 * _G_EQ_FACTOR, ea_smoothing=ea_smoothing)


class Threshold(NamedTuple):
    """Sliding threshold together with the area it refers to (``"current"`` or ``"reference"``)."""

    value: np.ndarray | float
    area: str


def _positive(x, name):
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError(f"{name} must be positive")
    return x


def lj_potential(r, eps: float, r0: float):
    """12-6 Lennard-Jones pair potential with its minimum ``-eps`` at ``r0``."""
    r = _positive(r, "r")
    q6 = (r0 / r) ** 6
    return eps * q6 * q6 - 2.0 * eps * q6


def normal_traction(g_n, p: AdhesionParams):
    """Coarse-grained LJ traction per reference area, positive = repulsive."""
    g = _positive(g_n, "g_n")
    q3 = (p.r0 / g) ** 3
    return p.t0 * (q3**3 / 45.0 - q3 / 3.0)


def normal_traction_derivative(g_n, p: AdhesionParams):
    g = _positive(g_n, "g_n")
    q3 = (p.r0 / g) ** 3
    return p.t0 / g * (-q3**3 / 5.0 + q3)


def normal_traction_reg(g_n, p: AdhesionParams, reg: RegularizationConfig):
    """Normal traction linearly extrapolated below ``reg.g_reg``; defined for any gap."""
    g = np.asarray(g_n, dtype=float)
    t_reg = normal_traction(reg.g_reg, p)
    s_reg = normal_traction_derivative(reg.g_reg, p)
    safe = np.where(g >= reg.g_reg, g, reg.g_reg)
    return np.where(g >= reg.g_reg, normal_traction(safe, p), t_reg + s_reg * (g - reg.g_reg))


def normal_traction_reg_derivative(g_n, p: AdhesionParams, reg: RegularizationConfig):
    g = np.asarray(g_n, dtype=float)
    s_reg = normal_traction_derivative(reg.g_reg, p)
    safe = np.where(g >= reg.g_reg, g, reg.g_reg)
    return np.where(g >= reg.g_reg, normal_traction_derivative(safe, p), s_reg)


def derived_constants(p: AdhesionParams) -> DerivedAdhesionConstants:
    return DerivedAdhesionConstants(
        g_eq=p.r0 * _G_EQ_FACTOR,
        w_adh=15.0 ** (1.0 / 3.0) * p.hamaker / (16.0 * math.pi * p.r0**2),
        g_max=p.r0 * _G_MAX_FACTOR,
        t_max=math.sqrt(5.0) * p.hamaker / (9.0 * math.pi * p.r0**3),
        t0=p.t0,
    )


def calibrate_from_physical(t_max: float, w_adh: float) -> AdhesionParams:
    """Return the ``(hamaker, r0)`` pair reproducing a measured peak traction and work of adhesion."""
    if not (t_max > 0 and w_adh > 0):
        raise DomainError("t_max and w_adh must be positive")
    r0 = 16.0 * math.sqrt(5.0) * w_adh / (9.0 * 15.0 ** (1.0 / 3.0) * t_max)
    hamaker = 9.0 * math.pi * r0**3 * t_max / math.sqrt(5.0)
    return AdhesionParams(hamaker=hamaker, r0=r0)


# -- model DI ---------------------------------------------------------------

def t_slide_di(g_n, law: FrictionDI, regularized: bool = True):
    g = np.asarray(g_n, dtype=float)
    if not regularized:
        return np.where(g <= law.g_cut, law.tau_di, 0.0)
    return law.tau_di * expit(-law.k_di * (g - law.g_cut))


def t_slide_di_derivative(g_n, law: FrictionDI):
    g = np.asarray(g_n, dtype=float)
    z = law.k_di * (g - law.g_cut)
    return -law.tau_di * law.k_di * expit(z) * expit(-z)


def mu_di(law: FrictionDI, c: DerivedAdhesionConstants) -> float:
    if not c.t_max > 0:
        raise DomainError("t_max must be positive")
    return law.tau_di / c.t_max


# -- model EA ---------------------------------------------------------------

def g_cut_ea(s_cut: float, c: DerivedAdhesionConstants) -> float:
    if not 0.0 <= s_cut <= 1.0:
        raise DomainError(f"s_cut must lie in [0, 1], got {s_cut}")
    return s_cut * c.g_max + (1.0 - s_cut) * c.g_eq


# half-width of the optional cubic blend around the EA kink, in units of r0
_EA_BLEND_HALF_WIDTH = 0.01


def t_slide_ea_derivatives(g_n, law: FrictionEA, j_cl, p: AdhesionParams,
                           reg: RegularizationConfig):
    """EA threshold per reference area and its partial derivatives.

    Returns ``(value, d/dg_n, d/dj_cl)``. At the kink the derivative of the
    loaded side (``g_n < g_cut``) is reported.
    """
    g = np.asarray(g_n, dtype=float)
    j = np.asarray(j_cl, dtype=float)
    if np.any(j <= 0):
        raise DomainError("j_cl must be positive")
    c = derived_constants(p)
    gc = g_cut_ea(law.s_cut, c)
    tc = normal_traction_reg(gc, p, reg)
    shifted = normal_traction_reg(g, p, reg) - tc
    slope = normal_traction_reg_derivative(g, p, reg)
    inside = g < gc
    base = np.where(inside, shifted, 0.0)
    dbase = np.where(inside, slope, 0.0)

    if reg.ea_smoothing and law.s_cut < 1.0:
        h = _EA_BLEND_HALF_WIDTH * p.r0
        a = gc - h
        f0 = normal_traction_reg(a, p, reg) - tc
        m0 = normal_traction_reg_derivative(a, p, reg)
        # cubic Hermite from (f0, m0) at a to (0, 0) at gc + h
        span = 2.0 * h
        s = (g - a) / span
        h00 = 2 * s**3 - 3 * s**2 + 1
        h10 = s**3 - 2 * s**2 + s
        dh00 = (6 * s**2 - 6 * s) / span
        dh10 = (3 * s**2 - 4 * s + 1) / span
        blend = (g > a) & (g < gc + h)
        base = np.where(blend, f0 * h00 + span * m0 * h10, base)
        dbase = np.where(blend, f0 * dh00 + span * m0 * dh10, dbase)
        base = np.where(g >= gc + h, 0.0, base)
        dbase = np.where(g >= gc + h, 0.0, dbase)

    value = law.mu_ea / j * base
    return value, law.mu_ea / j * dbase, -value / j


def t_slide_ea(g_n, law: FrictionEA, j_cl, p: AdhesionParams, reg: RegularizationConfig):
    return t_slide_ea_derivatives(g_n, law, j_cl, p, reg)[0]


# -- dispatch ---------------------------------------------------------------

def area_convention(law: FrictionLaw) -> str:
    """DI thresholds act per current area, EA (and the normal law) per reference area."""
    return "current" if isinstance(law, FrictionDI) else "reference"


def cutoff_gap(law: FrictionLaw, p: AdhesionParams) -> float:
    """Gap below which a point counts as being in contact for the area observable."""
    c = derived_constants(p)
    if isinstance(law, FrictionDI):
        return law.g_cut
    if isinstance(law, FrictionEA):
        return g_cut_ea(law.s_cut, c)
    return c.g_max


def threshold_and_derivatives(g_n, law: FrictionLaw, j_cl, p: AdhesionParams,
                              reg: RegularizationConfig):
    """``(value, d/dg_n, d/dj_cl)`` of the sliding threshold for any law."""
    g = np.asarray(g_n, dtype=float)
    if isinstance(law, FrictionDI):
        zero = np.zeros_like(g)
        return t_slide_di(g, law), t_slide_di_derivative(g, law), zero
    if isinstance(law, FrictionEA):
        return t_slide_ea_derivatives(g, law, j_cl, p, reg)
    if isinstance(law, Frictionless):
        zero = np.zeros_like(g)
        return zero, zero, zero
    raise TypeError(f"unknown friction law {law!r}")


def sliding_threshold(g_n, law: FrictionLaw, j_cl, p: AdhesionParams,
                      reg: RegularizationConfig) -> Threshold:
    return Threshold(threshold_and_derivatives(g_n, law, j_cl, p, reg)[0], area_convention(law))

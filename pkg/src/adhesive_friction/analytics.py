"""Closed-form companions: JKR loads, extended Amontons fitting, experiment CSVs.

Everything here is in SI units (N, m, Pa, J/m^2) except where a CSV
schema says otherwise.
"""
from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Sequence

import numpy as np

from .laws import DomainError


class DegenerateFitError(ValueError):
    pass


class SchemaError(ValueError):
    pass


@dataclass(frozen=True)
class JkrParams:
    """Elastic sphere on a rigid flat. ``E_star = E / (1 - nu^2)``."""

    youngs_modulus: float
    radius: float
    work_of_adhesion: float
    poisson_ratio: float = 0.5

    def __post_init__(self):
        if not (self.youngs_modulus > 0 and self.radius > 0 and self.work_of_adhesion >= 0):
            raise DomainError("JKR parameters must be positive")
        if not -1.0 < self.poisson_ratio <= 0.5:
            raise DomainError("Poisson ratio out of range")

    @property
    def e_star(self) -> float:
        return self.youngs_modulus / (1.0 - self.poisson_ratio ** 2)


def jkr_normal_load(a, p: JkrParams):
    """Normal load at contact radius ``a``; compression positive, tension negative."""
    a = np.asarray(a, dtype=float)
    if np.any(a <= 0):
        raise DomainError("contact radius must be positive")
    Es = p.e_star
    F = 4.0 * Es * a ** 3 / (3.0 * p.radius) - np.sqrt(8.0 * math.pi * Es * p.work_of_adhesion * a ** 3)
    return F if F.ndim else float(F)


def jkr_area_to_load(A, p: JkrParams):
    A = np.asarray(A, dtype=float)
    if np.any(A <= 0):
        raise DomainError("contact area must be positive")
    return jkr_normal_load(np.sqrt(A / math.pi), p)


def jkr_pull_off_radius(p: JkrParams) -> float:
    """Radius where dF/da = 0 (the load minimum)."""
    return (9.0 * math.pi * p.work_of_adhesion * p.radius ** 2 / (8.0 * p.e_star)) ** (1.0 / 3.0)


def jkr_pull_off_force(p: JkrParams) -> float:
    return -1.5 * math.pi * p.radius * p.work_of_adhesion


def jkr_load_band(A, p: JkrParams, dE: float = 0.1e6, dgamma: float = 1e-3):
    """Min/max load over the four corners ``(E +- dE, w +- dgamma)``."""
    loads = [jkr_area_to_load(A, replace(p, youngs_modulus=p.youngs_modulus + sE * dE,
                                         work_of_adhesion=max(p.work_of_adhesion + sg * dgamma, 0.0)))
             for sE, sg in itertools.product((-1, 1), (-1, 1))]
    loads = np.array(loads)
    return loads.min(axis=0), loads.max(axis=0)


def write_jkr_csv(path, radii, p: JkrParams):
    radii = np.asarray(radii, dtype=float)
    loads = np.atleast_1d(jkr_normal_load(radii, p))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["a_m", "A_m2", "F_n_newton"])
        for a, F in zip(radii, loads):
            w.writerow([repr(float(a)), repr(math.pi * float(a) ** 2), repr(float(F))])


# -- extended Amontons -------------------------------------------------------

def extended_amontons(F_n, A, tau0: float, mu: float):
    A = np.asarray(A, dtype=float)
    if np.any(A < 0):
        raise DomainError("area must be non-negative")
    out = tau0 * A + mu * np.asarray(F_n, dtype=float)
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class AmontonsFit:
    tau0: float
    mu: float
    residual: float


def fit_tau0_mu(A, F_n, F_t, fix_mu: float | None = None) -> AmontonsFit:
    """Least-squares ``F_t = tau0 A + mu F_n``.

    With ``fix_mu = 0`` the estimate is the mean of ``F_t / A``, the usual
    ratio average; other fixed values average ``(F_t - mu F_n) / A``.
    """
    A, F_n, F_t = (np.asarray(v, dtype=float).ravel() for v in (A, F_n, F_t))
    if not len(A) == len(F_n) == len(F_t):
        raise ValueError("A, F_n and F_t must have equal length")
    if len(A) < 2:
        raise DegenerateFitError("need at least two data points")
    if fix_mu is not None:
        if np.any(A <= 0):
            raise DegenerateFitError("ratio estimate needs positive areas")
        tau0 = float(np.mean((F_t - fix_mu * F_n) / A))
        return AmontonsFit(tau0, float(fix_mu), float(np.linalg.norm(F_t - tau0 * A - fix_mu * F_n)))
    X = np.column_stack([A, F_n])
    if np.linalg.matrix_rank(X) < 2:
        raise DegenerateFitError("areas and loads do not separate tau0 from mu")
    coef, *_ = np.linalg.lstsq(X, F_t, rcond=None)
    return AmontonsFit(float(coef[0]), float(coef[1]), float(np.linalg.norm(X @ coef - F_t)))


# -- experiment series -------------------------------------------------------

EXPERIMENT_COLUMNS = ["t_seconds", "F_t_newton", "A_mm2"]


@dataclass
class ExperimentSeries:
    time: np.ndarray          # s
    F_t: np.ndarray           # N
    area: np.ndarray          # m^2
    metadata: dict = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        self.time, self.F_t, self.area = (np.asarray(v, dtype=float) for v in (self.time, self.F_t, self.area))
        if not len(self.time) == len(self.F_t) == len(self.area):
            raise SchemaError("columns have different lengths")
        if np.any(np.diff(self.time) <= 0):
            raise SchemaError("time stamps must increase")
        if np.any(self.area < 0):
            raise SchemaError("areas must be non-negative")

    @property
    def initial_area(self) -> float:
        if "initial_area_mm2" in self.metadata:
            return float(self.metadata["initial_area_mm2"]) * 1e-6
        return float(self.area[0]) if len(self.area) else 0.0

    @property
    def tau0(self) -> float | None:
        v = self.metadata.get("tau0_pa")
        return None if v is None else float(v)

    @property
    def ratio(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(self.area > 0, self.F_t / np.where(self.area > 0, self.area, 1.0), np.nan)


def read_experiment_csv(path) -> ExperimentSeries:
    """Read ``t_seconds, F_t_newton, A_mm2`` with ``# key = value`` header lines."""
    meta, rows = {}, []
    with open(path, newline="") as fh:
        lines = fh.read().splitlines()
    body = []
    for ln in lines:
        s = ln.strip()
        if not s:
            continue
        if s.startswith("#"):
            key, sep, value = s[1:].partition("=")
            if sep:
                meta[key.strip()] = value.strip()
            continue
        body.append(s)
    reader = csv.reader(body)
    header = [h.strip() for h in next(reader, [])]
    if header != EXPERIMENT_COLUMNS:
        raise SchemaError(f"{path}: expected columns {EXPERIMENT_COLUMNS}, got {header}")
    try:
        rows = [[float(v) for v in r] for r in reader]
    except ValueError as exc:
        raise SchemaError(f"{path}: {exc}") from exc
    if any(len(r) != 3 for r in rows):
        raise SchemaError(f"{path}: every row needs three values")
    data = np.array(rows).reshape(-1, 3)
    return ExperimentSeries(data[:, 0], data[:, 1], data[:, 2] * 1e-6, meta, Path(path).stem)


def write_experiment_csv(path, series: ExperimentSeries):
    with open(path, "w", newline="") as fh:
        for k, v in series.metadata.items():
            fh.write(f"# {k} = {v}\n")
        w = csv.writer(fh)
        w.writerow(EXPERIMENT_COLUMNS)
        for t, f, a in zip(series.time, series.F_t, series.area):
            w.writerow([repr(float(t)), repr(float(f)), repr(float(a) * 1e6)])


def fit_series(series: Sequence[ExperimentSeries], params: JkrParams | None = None,
               fix_mu: float | None = 0.0) -> AmontonsFit:
    """Fit over the samples of several series, estimating F_n from each initial area."""
    A, Fn, Ft = [], [], []
    for s in series:
        load = jkr_area_to_load(s.initial_area, params) if params is not None else 0.0
        A.append(s.area)
        Ft.append(s.F_t)
        Fn.append(np.full(len(s.area), load))
    return fit_tau0_mu(np.concatenate(A), np.concatenate(Fn), np.concatenate(Ft), fix_mu)

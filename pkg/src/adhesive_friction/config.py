"""INI scenario files for the command-line driver.

Simulation quantities are nondimensional: lengths in units of L0, forces
per unit thickness in units of E L0. ``length_scale`` and ``width`` record
L0 and W for turning results into physical units; they do not enter the
computation.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import laws
from .fem.solver import SolverConfig
from .laws import AdhesionParams, RegularizationConfig
from .fem.material import Material
from .fem.mesh import generate_cap_mesh
from .simulation import Approach, Hold, PlateContactSimulation, Slide


class ConfigError(ValueError):
    pass


SCHEMA: dict[str, dict[str, type]] = {
    "geometry": {"radius": float, "height": float, "length_scale": float, "width": float,
                 "mesh_density": float},
    "material": {"youngs_modulus": float, "poisson_ratio": float},
    "adhesion": {"hamaker": float, "r0": float, "t_max": float, "w_adh": float},
    "friction": {"law": str, "mu": float, "g_cut": float, "k_di": float, "s_cut": float,
                 "eps_t": float, "ea_smoothing": bool},
    "load": {"preload": float, "slide_distance": float, "slide_increment": float,
             "hold_steps": int, "indent_step": float, "force_step": float},
    "solver": {"rtol": float, "max_iter": int, "max_halvings": int},
    "output": {"directory": str, "snapshots": str, "stretch": float, "contact_fields": bool},
}

REQUIRED = {"friction": ["law"], "load": ["preload", "slide_distance"]}
LAWS = ("di", "ea", "frictionless")


@dataclass
class ScenarioConfig:
    name: str = "scenario"
    radius: float = 47.1
    height: float = 10.0
    length_scale: float = 1.0
    width: float = 1.0
    mesh_density: float = 1.0
    youngs_modulus: float = 1.0
    poisson_ratio: float = 0.4
    adhesion: AdhesionParams = field(default_factory=lambda: laws.calibrate_from_physical(0.165, 0.0135))
    law: str = "di"
    mu: float = 1.0
    g_cut: float | None = None
    k_di: float | None = None
    s_cut: float = 1.0
    eps_t: float | None = None
    ea_smoothing: bool = False
    preload: float = 0.0
    slide_distance: float = 4.0
    slide_increment: float = 0.01
    hold_steps: int = 1
    indent_step: float = 0.05
    force_step: float = 0.05
    solver: SolverConfig = field(default_factory=SolverConfig)
    directory: str = "out"
    snapshots: tuple[float, ...] = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
    stretch: float = 1.0
    contact_fields: bool = True

    def friction_law(self) -> laws.FrictionLaw:
        if self.law == "di":
            return laws.FrictionDI.from_mu(self.mu, self.adhesion, g_cut=self.g_cut, k_di=self.k_di)
        if self.law == "ea":
            return laws.FrictionEA(self.mu, self.s_cut)
        return laws.Frictionless()

    def regularization(self) -> RegularizationConfig:
        reg = RegularizationConfig.default(self.adhesion)
        return RegularizationConfig(reg.g_reg, ea_smoothing=self.ea_smoothing)

    def build_simulation(self, threads: int = 1) -> PlateContactSimulation:
        mesh = generate_cap_mesh(self.radius, self.height, density=self.mesh_density)
        return PlateContactSimulation(mesh, Material(self.youngs_modulus, self.poisson_ratio), self.adhesion,
                                      self.friction_law(), self.regularization(), self.eps_t, self.solver,
                                      threads=threads)

    def program(self):
        return [Approach(self.preload, indent_step=self.indent_step, force_step=self.force_step),
                Hold(self.hold_steps),
                Slide(self.slide_distance, self.slide_increment)]


def _convert(section, key, raw, typ):
    try:
        if typ is bool:
            v = raw.strip().lower()
            if v in ("1", "yes", "true", "on"):
                return True
            if v in ("0", "no", "false", "off"):
                return False
            raise ValueError(raw)
        value = typ(raw)
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot read {raw!r} as {typ.__name__}") from None
    if typ is float and not math.isfinite(value):
        raise ConfigError(f"[{section}] {key}: value must be finite")
    return value


def parse_config(text: str, name: str = "scenario") -> ScenarioConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    values: dict[str, dict] = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        values[section] = {}
        for key, raw in cp.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key [{section}] {key}")
            values[section][key] = _convert(section, key, raw, SCHEMA[section][key])
    for section, keys in REQUIRED.items():
        for key in keys:
            if key not in values.get(section, {}):
                raise ConfigError(f"missing [{section}] {key}")

    cfg = ScenarioConfig(name=name)
    for section in ("geometry", "material", "load"):
        for key, v in values.get(section, {}).items():
            setattr(cfg, key, v)

    adh = values.get("adhesion", {})
    lj, phys = {"hamaker", "r0"} & adh.keys(), {"t_max", "w_adh"} & adh.keys()
    if lj and phys:
        raise ConfigError("give either (hamaker, r0) or (t_max, w_adh), not both")
    if lj:
        if len(lj) != 2:
            raise ConfigError("adhesion needs both hamaker and r0")
        cfg.adhesion = AdhesionParams(adh["hamaker"], adh["r0"])
    elif phys:
        if len(phys) != 2:
            raise ConfigError("adhesion needs both t_max and w_adh")
        cfg.adhesion = laws.calibrate_from_physical(adh["t_max"], adh["w_adh"])

    fr = values["friction"]
    law = fr["law"].strip().lower()
    if law not in LAWS:
        raise ConfigError(f"unknown friction law {fr['law']!r}; expected one of {LAWS}")
    cfg.law = law
    allowed = {"di": {"mu", "g_cut", "k_di"}, "ea": {"mu", "s_cut", "ea_smoothing"},
               "frictionless": set()}[law] | {"law", "eps_t"}
    extra = set(fr) - allowed
    if extra:
        raise ConfigError(f"keys {sorted(extra)} do not apply to friction law {law!r}")
    for key in ("mu", "g_cut", "k_di", "s_cut", "eps_t", "ea_smoothing"):
        if key in fr:
            setattr(cfg, key, fr[key])
    if not 0.0 <= cfg.s_cut <= 1.0:
        raise ConfigError("s_cut must lie in [0, 1]")
    if cfg.mu < 0:
        raise ConfigError("friction coefficient must be non-negative")

    sv = values.get("solver", {})
    cfg.solver = SolverConfig(**sv)

    out = values.get("output", {})
    if "directory" in out:
        cfg.directory = out["directory"]
    if "snapshots" in out:
        try:
            cfg.snapshots = tuple(float(v) for v in out["snapshots"].replace(",", " ").split())
        except ValueError:
            raise ConfigError("snapshots must be a list of numbers") from None
    if "stretch" in out:
        cfg.stretch = out["stretch"]
    if "contact_fields" in out:
        cfg.contact_fields = out["contact_fields"]

    if not cfg.radius > cfg.height > 0:
        raise ConfigError("geometry requires radius > height > 0")
    if cfg.slide_increment <= 0 or cfg.indent_step <= 0 or cfg.force_step <= 0:
        raise ConfigError("load increments must be positive")
    if cfg.hold_steps < 0:
        raise ConfigError("hold_steps must be non-negative")
    if cfg.length_scale <= 0 or cfg.width <= 0:
        raise ConfigError("length_scale and width must be positive")
    if cfg.mesh_density <= 0:
        raise ConfigError("mesh_density must be positive")
    return cfg


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    return parse_config(path.read_text(), name=path.stem)


def preset_names() -> list[str]:
    root = resources.files("adhesive_friction") / "presets"
    return sorted(p.name[:-4] for p in root.iterdir() if p.name.endswith(".ini"))


def load_preset(name: str) -> ScenarioConfig:
    root = resources.files("adhesive_friction") / "presets"
    f = root / f"{name}.ini"
    if not f.is_file():
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(preset_names())}")
    return parse_config(f.read_text(), name=name)

"""Command-line driver: ``mesh``, ``run``, ``compare`` and ``laws``."""
from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import analytics, laws, svg
from .config import ConfigError, ScenarioConfig, load_config, load_preset, preset_names
from .contact import write_contact_field
from .fem.mesh import generate_cap_mesh, write_mesh
from .simulation import TRAJECTORY_COLUMNS, SimulationAborted

log = logging.getLogger("adhesive_friction")

OUTPUT_ENV = "ADHFRIC_OUTPUT_DIR"
SUMMARY_COLUMNS = ["key", "value"]


def _scenario(args) -> ScenarioConfig:
    if getattr(args, "preset", None):
        return load_preset(args.preset)
    if getattr(args, "config", None):
        return load_config(args.config)
    return load_preset("cap_di_zero_load")


def _output_dir(args, cfg: ScenarioConfig | None = None, default="out") -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    if os.environ.get(OUTPUT_ENV):
        return Path(os.environ[OUTPUT_ENV])
    return Path(cfg.directory if cfg is not None else default)


def _write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _tag(u):
    return f"u{u:.2f}"


# -- mesh --------------------------------------------------------------------

def cmd_mesh(args) -> int:
    cfg = _scenario(args)
    density = args.density if args.density is not None else cfg.mesh_density
    mesh = generate_cap_mesh(cfg.radius, cfg.height, density=density)
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    write_mesh(mesh, out)
    if args.svg:
        _write(Path(args.svg), svg.render_mesh(mesh.nodes, mesh.elements, title=f"{mesh.n_elements} elements"))
    print(f"{mesh.n_nodes} nodes, {mesh.n_elements} elements, area {mesh.area():.6g} -> {out}")
    return 0


# -- run ---------------------------------------------------------------------

def _trajectory_rows(traj):
    for r in traj.records:
        yield [r.step, repr(float(r.u_bar)), repr(float(r.F_n)), repr(float(r.F_t)),
               repr(float(r.contact_area)), repr(float(r.stick_fraction)), r.newton_iters]


def _write_bundle(out: Path, cfg: ScenarioConfig, sim, traj, status: str):
    with open(out / "trajectory.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRAJECTORY_COLUMNS)
        w.writerows(_trajectory_rows(traj))

    slide = [r for r in traj.records if r.phase == "slide"]
    u = np.array([r.u_bar for r in slide])
    Ft = np.array([r.F_t for r in slide])
    A = np.array([r.contact_area for r in slide])
    law = cfg.friction_law()
    title = f"{cfg.name}: F_n* = {cfg.preload:g}"
    p = svg.Plot(title, "u_bar / L0", "F_t / (E L0 W)").add(u, Ft, "F_t")
    if isinstance(law, laws.FrictionDI):
        p.add(u, law.tau_di * A, "tau_DI A", dashed=True)
    _write(out / "ft_vs_u.svg", svg.render(p))
    _write(out / "area_vs_u.svg", svg.render(svg.Plot(title, "u_bar / L0", "A / (L0 W)").add(u, A, "A")))
    _write(out / "area_vs_ft.svg", svg.render(svg.Plot(title, "F_t / (E L0 W)", "A / (L0 W)").add(Ft, A, "A")))

    onset = next((r for r in slide if r.stick_fraction == 0.0 and r.contact_area > 0), None)
    rows = [("name", cfg.name), ("status", status), ("law", cfg.law), ("preload", cfg.preload),
            ("mu", cfg.mu), ("n_elements", sim.mesh.n_elements), ("steps", len(traj.records)),
            ("length_scale", cfg.length_scale), ("width", cfg.width)]
    if isinstance(law, laws.FrictionDI):
        rows.append(("tau_di", law.tau_di))
    if isinstance(law, laws.FrictionEA):
        rows.append(("s_cut", law.s_cut))
    if onset is not None:
        rows += [("onset_u_bar", onset.u_bar), ("onset_F_t", onset.F_t),
                 ("onset_area", onset.contact_area)]
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(SUMMARY_COLUMNS)
        for k, v in rows:
            w.writerow([k, repr(float(v)) if isinstance(v, float) else v])


def cmd_run(args) -> int:
    cfg = _scenario(args)
    if args.slide_distance is not None:
        cfg.slide_distance = args.slide_distance
    out = _output_dir(args, cfg) / cfg.name
    out.mkdir(parents=True, exist_ok=True)
    sim = cfg.build_simulation(threads=args.threads)
    mesh = sim.mesh
    write_mesh(mesh, out / "mesh.txt")
    pending = {round(s, 10) for s in cfg.snapshots}
    window = (-25.0, 25.0, -5.0, 6.0)

    def on_step(rec):
        log.info("step %d %s u_bar=%.4f F_n=%+.5f F_t=%+.5f A=%.4f stick=%.3f it=%d", rec.step,
                 rec.phase, rec.u_bar, rec.F_n, rec.F_t, rec.contact_area, rec.stick_fraction,
                 rec.newton_iters)
        key = round(rec.u_bar, 10)
        if rec.phase != "slide" or key not in pending:
            return
        pending.discard(key)
        if cfg.contact_fields:
            (out / "contact_fields").mkdir(exist_ok=True)
            write_contact_field(out / "contact_fields" / f"contact_{_tag(rec.u_bar)}.csv", rec.step,
                                sim.last_evaluation)
        x = sim.current_coordinates()
        _write(out / "snapshots" / f"snapshot_{_tag(rec.u_bar)}.svg",
               svg.render_mesh(x, mesh.elements, plate_height=float(sim.z[-1]), stretch=cfg.stretch,
                               window=(window[0] + rec.u_bar, window[1] + rec.u_bar, window[2], window[3]),
                               title=f"{cfg.name}, u_bar = {rec.u_bar:g}"))

    status, code = "completed", 0
    try:
        traj = sim.run(cfg.program(), callback=on_step, snapshots=cfg.snapshots)
    except SimulationAborted as exc:
        traj, status, code = exc.trajectory, f"failed: {exc}", 1
        log.error("simulation failed: %s", exc)
    _write_bundle(out, cfg, sim, traj, status)
    print(f"{cfg.name}: {status}, {len(traj.records)} steps -> {out}")
    return code


# -- compare -----------------------------------------------------------------

def read_bundle(path: Path):
    path = Path(path)
    with open(path / "trajectory.csv", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != TRAJECTORY_COLUMNS:
            raise ConfigError(f"{path}: trajectory.csv has columns {header}")
        data = np.array([[float(v) for v in r] for r in reader]).reshape(-1, len(TRAJECTORY_COLUMNS))
    summary = {}
    if (path / "summary.csv").exists():
        with open(path / "summary.csv", newline="") as fh:
            summary = {r[0]: r[1] for r in list(csv.reader(fh))[1:]}
    cols = {c: data[:, i] for i, c in enumerate(TRAJECTORY_COLUMNS)}
    return cols, summary


def onset_point(cols):
    """First slide step (``u_bar > 0``) without sticking points."""
    idx = np.nonzero((cols["u_bar"] > 0) & (cols["stick_fraction"] == 0) & (cols["contact_area"] > 0))[0]
    if len(idx) == 0:
        return None
    i = idx[0]
    return float(cols["F_t"][i]), float(cols["contact_area"][i])


def onset_slope(points):
    """Slope dA/dF_t through the onset points.

    Two or more distinct points get an affine least-squares fit; a single
    point falls back to the ratio ``A / F_t`` (a line through the origin).
    """
    pts = np.array(points, dtype=float).reshape(-1, 2)
    if len(pts) == 0:
        return None
    if len(pts) >= 2 and np.ptp(pts[:, 0]) > 1e-12:
        return float(np.polyfit(pts[:, 0], pts[:, 1], 1)[0])
    return float(pts[0, 1] / pts[0, 0]) if pts[0, 0] != 0 else None


def cmd_compare(args) -> int:
    out = _output_dir(args, default="compare")
    out.mkdir(parents=True, exist_ok=True)
    bundles = [(Path(b).name, *read_bundle(b)) for b in args.bundles]
    experiments = [analytics.read_experiment_csv(e) for e in args.experiments]

    ratio = svg.Plot("Simulation: F_t / A during sliding", "u_bar / L0", "F_t / (A E)")
    area = svg.Plot("Area against tangential force", "F_t / max F_t", "A / A(start of sliding)")
    rows, onsets = [], []
    for name, cols, summary in bundles:
        s = cols["u_bar"] > 0
        u, Ft, A = cols["u_bar"][s], cols["F_t"][s], cols["contact_area"][s]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio.add(u, np.where(A > 0, Ft / np.where(A > 0, A, 1), np.nan), name)
        if len(Ft) and np.max(np.abs(Ft)) > 0 and A[0] > 0:
            area.add(Ft / np.max(np.abs(Ft)), A / A[0], name)
        if "tau_di" in summary:
            ratio.hlines.append((float(summary["tau_di"]), f"tau_DI ({name})"))
        o = onset_point(cols)
        if o is not None:
            onsets.append(o)
            rows.append([name, "simulation", repr(o[0]), repr(o[1])])
    _write(out / "ratio_simulation.svg", svg.render(ratio))

    if experiments:
        exp = svg.Plot("Experiment: F_t / A_real", "t / s", "F_t / A_real (MPa)")
        for e in experiments:
            exp.add(e.time, e.ratio * 1e-6, e.name)
            if e.tau0 is not None:
                exp.hlines.append((e.tau0 * 1e-6, f"tau_0 = {e.tau0 * 1e-6:g} MPa"))
            if len(e.F_t) and np.max(np.abs(e.F_t)) > 0 and e.area[0] > 0:
                area.add(e.F_t / np.max(np.abs(e.F_t)), e.area / e.area[0], e.name, dashed=True)
            i = int(np.argmax(e.F_t))
            rows.append([e.name, "experiment", repr(float(e.F_t[i])), repr(float(e.area[i]))])
        _write(out / "ratio_experiment.svg", svg.render(exp))
    _write(out / "area_vs_force.svg", svg.render(area))

    slope = onset_slope(onsets)
    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["source", "kind", "onset_F_t", "onset_area"])
        w.writerows(rows)
        w.writerow(["onset_slope_dA_dFt", "simulation", "" if slope is None else repr(slope), ""])
    print(f"onset slope dA/dF_t = {slope}" if slope is not None else "no sliding onset found")
    return 0


# -- laws --------------------------------------------------------------------

def law_table(cfg: ScenarioConfig, n: int = 400):
    p = cfg.adhesion
    c = laws.derived_constants(p)
    reg = cfg.regularization()
    g = np.linspace(0.8 * c.g_eq, 3.0 * p.r0, n)
    di = laws.FrictionDI.from_mu(cfg.mu, p)
    cols = {"g_n": g, "T_n": laws.normal_traction(g, p), "T_n_reg": laws.normal_traction_reg(g, p, reg),
            "t_slide_di": laws.t_slide_di(g, di)}
    for s, tag in ((0.0, "0"), (0.5, "0.5"), (1.0, "1")):
        cols[f"t_slide_ea_s{tag}"] = laws.t_slide_ea(g, laws.FrictionEA(cfg.mu, s), 1.0, p, reg)
    return cols


def cmd_laws(args) -> int:
    cfg = _scenario(args)
    out = _output_dir(args, default="laws")
    out.mkdir(parents=True, exist_ok=True)
    cols = law_table(cfg, args.points)
    names = list(cols)
    with open(out / "laws.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(names)
        for row in zip(*(cols[k] for k in names)):
            w.writerow([repr(float(v)) for v in row])
    g = cols["g_n"] / cfg.adhesion.r0
    _write(out / "normal_traction.svg", svg.render(
        svg.Plot("Normal traction", "g_n / r0", "T_n / E").add(g, cols["T_n_reg"], "regularized")
        .add(g, cols["T_n"], "exact", dashed=True)))
    thr = svg.Plot("Sliding thresholds", "g_n / r0", "t_slide / E")
    cone = svg.Plot("Tangential traction during sliding", "t_n / E", "t_t / E")
    for k in names[3:]:
        thr.add(g, cols[k], k)
        cone.add(cols["T_n_reg"], cols[k], k)
    _write(out / "thresholds.svg", svg.render(thr))
    _write(out / "cone.svg", svg.render(cone))
    print(f"wrote {len(cols['g_n'])} rows -> {out / 'laws.csv'}")
    return 0


# -- entry point -------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="adhfric", description="Adhesive friction of a soft cap on a rigid plate.")
    ap.add_argument("-v", "--verbose", action="count", default=0)
    sub = ap.add_subparsers(dest="command", required=True)

    def scenario_args(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--config", help="scenario INI file")
        g.add_argument("--preset", help="shipped preset name")

    m = sub.add_parser("mesh", help="generate the cap mesh")
    scenario_args(m)
    m.add_argument("-o", "--output", default="cap_mesh.txt")
    m.add_argument("--density", type=float)
    m.add_argument("--svg", help="also draw the mesh")
    m.set_defaults(func=cmd_mesh)

    r = sub.add_parser("run", help="run a scenario and write its output bundle")
    scenario_args(r)
    r.add_argument("--out", help=f"output root (overrides ${OUTPUT_ENV} and the config)")
    r.add_argument("--threads", type=int, default=1, help="assembly threads")
    r.add_argument("--slide-distance", type=float, help="override the slide distance")
    r.set_defaults(func=cmd_run)

    c = sub.add_parser("compare", help="compare simulation bundles with experiment CSVs")
    c.add_argument("bundles", nargs="*", help="bundle directories written by 'run'")
    c.add_argument("--experiment", dest="experiments", action="append", default=[])
    c.add_argument("--out")
    c.set_defaults(func=cmd_compare)

    lw = sub.add_parser("laws", help="tabulate traction laws")
    scenario_args(lw)
    lw.add_argument("--out")
    lw.add_argument("--points", type=int, default=400)
    lw.set_defaults(func=cmd_laws)

    sub.add_parser("presets", help="list shipped presets").set_defaults(
        func=lambda a: print("\n".join(preset_names())) or 0)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2),
                        format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ConfigError, analytics.SchemaError, laws.DomainError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

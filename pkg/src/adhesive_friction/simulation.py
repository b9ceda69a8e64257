"""Quasi-static load programs for a deformable body against the rigid plate.

A program is a list of phases:

* :class:`Approach` brings the plate into adhesive contact under
  displacement control (frictionless, with pseudo-transient continuation
  across snap-in) and then ramps the normal force to its target with the
  plate height as an extra unknown.
* :class:`Hold` activates friction with a stress-free tangential state and
  keeps the normal force.
* :class:`Slide` moves the plate sideways in increments, keeping the
  normal force constant.
"""
from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field, fields
from typing import Callable, Union

import numpy as np

from . import laws
from .contact import ContactEvaluation, ContactModel
from .fem.assembly import ElementKernel, SparseAssembler, assemble
from .fem.material import ElementInversionError, Material
from .fem.mesh import Mesh
from .fem.solver import NewtonResult, SolverConfig, newton_solve
from .kinematics import RigidSurface
from .laws import AdhesionParams, FrictionLaw, RegularizationConfig

log = logging.getLogger(__name__)

TRAJECTORY_COLUMNS = ["step", "u_bar", "F_n", "F_t", "contact_area", "stick_fraction", "newton_iters"]


@dataclass(frozen=True)
class Approach:
    target_force: float
    indent_step: float = 0.05
    force_step: float = 0.05
    overshoot: float = 0.05
    max_indent: float = 5.0


@dataclass(frozen=True)
class Hold:
    steps: int = 1


@dataclass(frozen=True)
class Slide:
    target: float
    increment: float = 0.01

    def __post_init__(self):
        if not self.increment > 0:
            raise ValueError("slide increment must be positive")


Phase = Union[Approach, Hold, Slide]


@dataclass
class StepRecord:
    step: int
    phase: str
    u_bar: float
    F_n: float
    F_t: float
    contact_area: float
    stick_fraction: float
    newton_iters: int
    plate_height: float
    dissipation: float
    friction: bool


@dataclass
class Trajectory:
    records: list[StepRecord] = field(default_factory=list)
    snapshots: dict[float, np.ndarray] = field(default_factory=dict)
    completed: bool = True
    message: str = ""

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])

    def phase(self, name):
        return [r for r in self.records if r.phase == name]

    def write_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(TRAJECTORY_COLUMNS)
            for r in self.records:
                w.writerow([r.step] + [repr(float(getattr(r, c))) for c in TRAJECTORY_COLUMNS[1:-1]]
                           + [r.newton_iters])


class SimulationAborted(RuntimeError):
    def __init__(self, message, trajectory):
        super().__init__(message)
        self.trajectory = trajectory


class PlateContactSimulation:
    """Deformable body with a clamped boundary set pressed and slid on a rigid plate."""

    def __init__(self, mesh: Mesh, material: Material, params: AdhesionParams,
                 law: FrictionLaw, reg: RegularizationConfig | None = None,
                 eps_t: float | None = None, solver: SolverConfig = SolverConfig(),
                 fixed_set: str = "base", contact_set: str = "contact", threads: int = 1):
        self.mesh = mesh
        self.material = material
        self.kernel = ElementKernel(mesh, material, threads=threads)
        self.contact = ContactModel(mesh, params, law, reg, eps_t, facet_set=contact_set)
        self.solver = solver
        self.n_dof = 2 * mesh.n_nodes
        self.plate_dof = self.n_dof
        self.fixed = np.zeros(self.n_dof + 1, dtype=bool)
        base = mesh.set_nodes(fixed_set)
        self.fixed[2 * base] = True
        self.fixed[2 * base + 1] = True
        self.constants = laws.derived_constants(params)
        ymin = mesh.nodes[mesh.facets(contact_set)].reshape(-1, 2)[:, 1].min()
        self.z = np.zeros(self.n_dof + 1)
        self.z[-1] = ymin - self.constants.g_eq
        self.u_bar = 0.0
        self.friction = False
        self.step_count = 0
        self._assembler: SparseAssembler | None = None
        self._previous: tuple[float, np.ndarray] | None = None
        self.last_evaluation: ContactEvaluation | None = None

    # -- system -------------------------------------------------------------

    def plate(self, z=None, u_bar=None):
        z = self.z if z is None else z
        return RigidSurface(height=float(z[-1]), u_bar=self.u_bar if u_bar is None else u_bar)

    def current_coordinates(self, z=None):
        z = self.z if z is None else z
        return self.mesh.nodes + z[:self.n_dof].reshape(-1, 2)

    def system(self, *, u_bar: float, force_target: float | None):
        """Residual/tangent callable for one load step.

        ``force_target=None`` holds the plate height fixed (displacement
        control); otherwise the plate row enforces ``F_n = force_target``.
        """
        fixed = self.fixed.copy()
        fixed[-1] = force_target is None
        n_total = self.n_dof + 1

        def fn(z, need_tangent):
            x = self.current_coordinates(z)
            ev = self.contact.evaluate(x, self.plate(z, u_bar), self.friction, need_tangent, n_total)
            rc = ev.residual
            if force_target is not None:
                rc = rc.copy()
                rc[-1] -= force_target
            if need_tangent:
                if self._assembler is None:
                    rows = np.concatenate([self.kernel.rows, ev.tangent.rows])
                    cols = np.concatenate([self.kernel.cols, ev.tangent.cols])
                    self._assembler = SparseAssembler(n_total, rows, cols)
                return assemble(self.kernel, z, [(rc, ev.tangent)], n_total, fixed,
                                assembler=self._assembler)
            f_int, _ = self.kernel.forces(z[:self.n_dof], with_tangent=False)
            R = rc.copy()
            R[:self.n_dof] += f_int
            R[fixed] = 0.0
            return R, None

        return fn

    def evaluate(self, z=None) -> ContactEvaluation:
        z = self.z if z is None else z
        return self.contact.evaluate(self.current_coordinates(z), self.plate(z), self.friction,
                                     need_tangent=False)

    def solve_step(self, *, u_bar, force_target, plate_height=None, ptc_fallback=False,
                   extrapolate=False) -> NewtonResult:
        z0 = self.z.copy()
        if extrapolate and self._previous is not None:
            # secant predictor along the sliding path
            u_prev, z_prev = self._previous
            if abs(self.u_bar - u_prev) > 1e-14:
                z0 += (self.z - z_prev) * (u_bar - self.u_bar) / (self.u_bar - u_prev)
        if plate_height is not None:
            z0[-1] = plate_height
        fn = self.system(u_bar=u_bar, force_target=force_target)
        res = newton_solve(fn, z0, self.solver)
        if not res.converged and extrapolate and self._previous is not None:
            res = newton_solve(fn, self.z.copy(), self.solver)
        if not res.converged and ptc_fallback:
            log.debug("Newton failed (u_bar=%g), retrying with continuation", u_bar)
            res = newton_solve(fn, z0, self.solver, ptc=True)
        return res

    def _accept(self, res: NewtonResult, u_bar: float, phase: str, traj: Trajectory):
        self._previous = (self.u_bar, self.z.copy()) if phase == "slide" else None
        self.z = res.z
        self.u_bar = u_bar
        ev = self.evaluate()
        self.last_evaluation = ev
        self.contact.commit(ev, self.plate(), self.friction)
        self.step_count += 1
        traj.records.append(StepRecord(
            step=self.step_count, phase=phase, u_bar=u_bar, F_n=ev.normal_force,
            F_t=ev.tangential_force, contact_area=ev.area, stick_fraction=ev.stick_fraction,
            newton_iters=res.iterations, plate_height=float(self.z[-1]),
            dissipation=self.contact.dissipated, friction=self.friction))
        return ev

    # -- phases -------------------------------------------------------------

    def _approach(self, ph: Approach, traj: Trajectory, callback):
        self.friction = False
        switch = min(ph.target_force, 0.0) - ph.overshoot
        height0 = float(self.z[-1])
        h = ph.indent_step
        F = math.inf
        while F > switch:
            if self.z[-1] - height0 > ph.max_indent:
                raise SimulationAborted("approach did not reach the switching force", traj)
            res = self.solve_step(u_bar=self.u_bar, force_target=None,
                                  plate_height=float(self.z[-1]) + h, ptc_fallback=True)
            if not res.converged:
                raise SimulationAborted("approach step did not converge", traj)
            ev = self._accept(res, self.u_bar, "approach", traj)
            F = ev.normal_force
            if callback:
                callback(traj.records[-1])
        self._ramp_force(F, ph.target_force, ph.force_step, "approach", traj, callback)

    def _ramp_force(self, start, target, step, phase, traj, callback):
        current = start
        inc = math.copysign(step, target - start)
        halvings = 0
        while abs(target - current) > 1e-14:
            nxt = target if abs(target - current) <= abs(inc) else current + inc
            res = self.solve_step(u_bar=self.u_bar, force_target=nxt)
            if not res.converged:
                res = self.solve_step(u_bar=self.u_bar, force_target=nxt, ptc_fallback=True) \
                    if halvings >= self.solver.max_halvings else res
            if not res.converged:
                halvings += 1
                if halvings > self.solver.max_halvings:
                    raise SimulationAborted("force ramp did not converge", traj)
                inc /= 2.0
                continue
            self._accept(res, self.u_bar, phase, traj)
            current = nxt
            if callback:
                callback(traj.records[-1])

    def _hold(self, ph: Hold, force_target: float, traj: Trajectory, callback):
        # friction starts from a stress-free tangential state
        self.friction = True
        ev = self.evaluate()
        self.contact.commit(ev, self.plate(), friction=False)
        for _ in range(ph.steps):
            res = self.solve_step(u_bar=self.u_bar, force_target=force_target)
            if not res.converged:
                raise SimulationAborted("hold step did not converge", traj)
            self._accept(res, self.u_bar, "hold", traj)
            if callback:
                callback(traj.records[-1])

    def _slide(self, ph: Slide, force_target: float, traj: Trajectory, callback, snapshots,
               stop: Callable[[Trajectory], bool] | None):
        direction = math.copysign(1.0, ph.target - self.u_bar) if ph.target != self.u_bar else 1.0
        base_inc = ph.increment
        inc = base_inc
        min_inc = base_inc / 2.0 ** self.solver.max_halvings
        ptc_inc = base_inc / 2.0 ** min(self.solver.ptc_after, self.solver.max_halvings)
        smooth = 0
        pending = sorted(s for s in snapshots if direction * (s - self.u_bar) >= -1e-12)
        while direction * (ph.target - self.u_bar) > 1e-12:
            nxt = self.u_bar + direction * min(inc, abs(ph.target - self.u_bar))
            for s in pending:
                if direction * (s - self.u_bar) > 1e-12 and direction * (nxt - s) > 1e-12:
                    nxt = s
                    break
            # repeated failures usually mean a fold (edge snap-off): let continuation jump it
            use_ptc = inc <= ptc_inc * (1.0 + 1e-9)
            res = self.solve_step(u_bar=nxt, force_target=force_target, ptc_fallback=use_ptc,
                                  extrapolate=True)
            if not res.converged:
                # the floor is on the increment itself, so creeping up to a fold aborts too
                if inc / 2.0 < min_inc * (1.0 - 1e-9):
                    raise SimulationAborted(f"slide step at u_bar={nxt:g} did not converge", traj)
                inc /= 2.0
                smooth = 0
                continue
            if use_ptc:
                inc = base_inc
            self._accept(res, nxt, "slide", traj)
            if callback:
                callback(traj.records[-1])
            for s in list(pending):
                if abs(s - nxt) <= 1e-12:
                    traj.snapshots[s] = self.current_coordinates().copy()
                    pending.remove(s)
            smooth += 1
            if smooth >= self.solver.grow_after and inc < base_inc:
                inc = min(2.0 * inc, base_inc)
                smooth = 0
            if stop is not None and stop(traj):
                break

    def run(self, program: list[Phase], callback=None, snapshots=(),
            stop: Callable[[Trajectory], bool] | None = None) -> Trajectory:
        """Execute the phases in order; raises :class:`SimulationAborted` on failure.

        The exception carries the partial trajectory; the simulation state
        stays at the last converged step.
        """
        if not program:
            raise ValueError("load program has no phases")
        traj = Trajectory()
        force_target = 0.0
        try:
            for ph in program:
                if isinstance(ph, Approach):
                    force_target = ph.target_force
                    self._approach(ph, traj, callback)
                elif isinstance(ph, Hold):
                    self._hold(ph, force_target, traj, callback)
                elif isinstance(ph, Slide):
                    if not self.friction:
                        self._hold(Hold(steps=0), force_target, traj, callback)
                    self._slide(ph, force_target, traj, callback, snapshots, stop)
                else:
                    raise TypeError(f"unknown phase {ph!r}")
        except ElementInversionError as exc:
            traj.completed = False
            raise SimulationAborted(str(exc), traj) from exc
        except SimulationAborted as exc:
            traj.completed = False
            traj.message = str(exc)
            raise
        return traj


def full_sliding_onset(traj: Trajectory, tol: float = 0.0):
    """Index (into ``traj.records``) of the first slide step with no sticking contact point."""
    for i, r in enumerate(traj.records):
        if r.phase == "slide" and r.stick_fraction <= tol and r.contact_area > 0:
            return i
    return None


def record_fields():
    return [f.name for f in fields(StepRecord)]

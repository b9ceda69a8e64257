"""Adhesive frictional contact between a deformable boundary and the rigid plate.

Contact is evaluated at the two Gauss points of every boundary facet.
Normal tractions and EA thresholds are per reference facet length, DI
thresholds per current facet length. Tangential tractions follow a
penalty-regularized stick phase and a return map onto the sliding
threshold; history (committed traction, slip) changes only in
:meth:`ContactModel.commit`.

Sign conventions: ``t_t`` is the tangential traction exerted by the
plate on the body along ``+x``. The normal force ``F_n`` is positive in
tension (net attraction) and negative in compression.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import laws
from .fem.assembly import Triplets
from .fem.mesh import Mesh
from .kinematics import NORMAL, GapState, RigidSurface, surface_stretch
from .laws import AdhesionParams, FrictionDI, FrictionLaw, Frictionless, RegularizationConfig

STICK, SLIDE, SEPARATED = 0, 1, 2
REGIME_NAMES = {STICK: "stick", SLIDE: "slide", SEPARATED: "separated"}

_GP = np.array([-1.0, 1.0]) / math.sqrt(3.0)
_N = np.column_stack([(1 - _GP) / 2, (1 + _GP) / 2])  # (gp, node)


@dataclass
class ContactPointState:
    gap: GapState
    regime: int = STICK
    t_t: float = 0.0
    slip: float = 0.0
    eps_t: float = 0.0


class ReturnMap(NamedTuple):
    t_t: np.ndarray
    regime: np.ndarray
    dt_dslip: np.ndarray        # d t_t / d delta_slip
    dt_dthreshold: np.ndarray   # d t_t / d threshold
    slip_increment: np.ndarray  # irreversible part of delta_slip
    dissipation: np.ndarray     # per unit area, >= 0


def friction_return_map(t_committed, threshold, delta_slip, eps_t) -> ReturnMap:
    """Penalty predictor and radial return onto ``|t_t| <= threshold``.

    ``delta_slip`` is the tangential displacement of the counter-surface
    relative to the point since the last commit.
    """
    t_c = np.asarray(t_committed, dtype=float)
    thr = np.asarray(threshold, dtype=float)
    d = np.asarray(delta_slip, dtype=float)
    if np.any(thr < 0):
        raise ValueError("threshold must be non-negative")
    trial = t_c + eps_t * d
    stick = np.abs(trial) < thr
    sgn = np.sign(trial)
    t = np.where(stick, trial, thr * sgn)
    slip = np.where(stick, 0.0, (trial - t) / eps_t)
    return ReturnMap(
        t_t=t,
        regime=np.where(stick, STICK, SLIDE),
        dt_dslip=np.where(stick, eps_t, 0.0),
        dt_dthreshold=np.where(stick, 0.0, sgn),
        slip_increment=slip,
        dissipation=t * slip,
    )


def normal_contact_traction(g_n, params: AdhesionParams, reg: RegularizationConfig,
                            n_p=NORMAL):
    """Traction vector exerted on the deformable body, per reference area.

    Repulsion pushes the body along the plate normal, adhesion pulls it
    toward the plate.
    """
    T = laws.normal_traction_reg(g_n, params, reg)
    return np.multiply.outer(T, np.asarray(n_p, dtype=float))


def contact_area(g_n, segment_lengths, cutoff: float, width: float = 1.0) -> float:
    """Current contact measure: summed Gauss-point segments whose gap is within ``cutoff``."""
    g = np.asarray(g_n, dtype=float)
    return float(width * np.sum(np.where(g <= cutoff, segment_lengths, 0.0)))


@dataclass
class ContactEvaluation:
    residual: np.ndarray
    tangent: Triplets | None
    g_n: np.ndarray          # (k, 2) per facet Gauss point
    x: np.ndarray            # (k, 2, 2) current point coordinates
    t_n: np.ndarray          # normal traction per reference area
    t_t: np.ndarray          # tangential traction in the law's own area measure
    threshold: np.ndarray
    regime: np.ndarray
    slip_increment: np.ndarray
    dissipation: np.ndarray  # per point, integrated over its segment
    segment: np.ndarray      # current length represented by each Gauss point
    normal_force: float
    tangential_force: float
    area: float
    stick_fraction: float


class ContactModel:
    """Contact of a mesh boundary set with a flat rigid plate.

    The global unknown vector holds nodal displacements followed by a single
    plate dof (vertical plate position) at index ``plate_dof``.
    """

    def __init__(self, mesh: Mesh, params: AdhesionParams, law: FrictionLaw = Frictionless(),
                 reg: RegularizationConfig | None = None, eps_t: float | None = None,
                 facet_set: str = "contact"):
        self.mesh = mesh
        self.params = params
        self.law = law
        self.reg = RegularizationConfig.default(params) if reg is None else reg
        c = laws.derived_constants(params)
        self.constants = c
        self.eps_t = 50.0 * c.t_max / params.r0 if eps_t is None else eps_t
        self.facets = mesh.facets(facet_set)
        X = mesh.nodes[self.facets]                                  # (k, 2 nodes, 2)
        self.ref_length = np.linalg.norm(X[:, 1] - X[:, 0], axis=1)
        self.cutoff = laws.cutoff_gap(law, params)
        self.current_area = isinstance(law, FrictionDI)
        self.plate_dof = 2 * mesh.n_nodes
        k = len(self.facets)
        self.t_committed = np.zeros((k, 2))
        self.x_committed = np.einsum("gn,kni->kgi", _N, X)[..., 0]
        self.u_bar_committed = 0.0
        self.slip = np.zeros((k, 2))
        self.dissipated = 0.0
        fd = np.stack([2 * self.facets[:, 0], 2 * self.facets[:, 0] + 1,
                       2 * self.facets[:, 1], 2 * self.facets[:, 1] + 1,
                       np.full(k, self.plate_dof)], axis=1)           # (k, 5)
        self._ldofs = np.repeat(fd[:, None, :], 2, axis=1)            # (k, gp, 5)

    @property
    def n_points(self) -> int:
        return 2 * len(self.facets)

    def point_coordinates(self, x_nodes):
        xf = x_nodes[self.facets]
        return np.einsum("gn,kni->kgi", _N, xf)

    def evaluate(self, x_nodes, plate: RigidSurface, friction: bool = True,
                 need_tangent: bool = True, n_total: int | None = None) -> ContactEvaluation:
        """Contact residual contribution, tangent and observables at a trial state.

        ``x_nodes`` are current nodal coordinates ``(n, 2)``. The residual
        holds minus the contact forces on the body in the nodal rows and the
        normal-force term ``F_n`` in the plate row.
        """
        n_total = self.plate_dof + 1 if n_total is None else n_total
        p, reg = self.params, self.reg
        xf = x_nodes[self.facets]                          # (k, 2, 2)
        dx = xf[:, 1] - xf[:, 0]
        ell = np.linalg.norm(dx, axis=1)
        e = dx / ell[:, None]
        L = self.ref_length
        j_cl = surface_stretch(L, ell)
        x = np.einsum("gn,kni->kgi", _N, xf)               # (k, gp, 2)
        g = x[..., 1] - plate.height

        T = laws.normal_traction_reg(g, p, reg)
        dT = laws.normal_traction_reg_derivative(g, p, reg)
        jj = np.broadcast_to(j_cl[:, None], g.shape)
        thr, thr_g, thr_j = laws.threshold_and_derivatives(g, self.law, jj, p, reg)

        m = (ell if self.current_area else L)[:, None] / 2.0 * np.ones_like(g)
        if friction and not isinstance(self.law, Frictionless):
            delta = -(x[..., 0] - self.x_committed) + (plate.u_bar - self.u_bar_committed)
            rm = friction_return_map(self.t_committed, thr, delta, self.eps_t)
            t, regime = rm.t_t, rm.regime.copy()
            slip_inc, diss = rm.slip_increment, rm.dissipation * m
        else:
            rm = None
            t = np.zeros_like(g)
            regime = np.full(g.shape, SLIDE)
            slip_inc = np.zeros_like(g)
            diss = np.zeros_like(g)
        outside = g > self.cutoff
        regime[(regime == SLIDE) & outside] = SEPARATED

        half_L = L[:, None] / 2.0
        Na, Nb = _N[:, 0][None, :], _N[:, 1][None, :]
        # local residual [ax, ay, bx, by, plate]
        r = np.zeros(g.shape + (5,))
        r[..., 0] = -Na * t * m
        r[..., 1] = -Na * T * half_L
        r[..., 2] = -Nb * t * m
        r[..., 3] = -Nb * T * half_L
        r[..., 4] = -T * half_L
        R = np.zeros(n_total)
        np.add.at(R, self._ldofs.ravel(), r.ravel())

        tangent = None
        if need_tangent:
            ones = np.ones_like(g)
            zeros = np.zeros_like(g)
            dg = np.stack([zeros, Na * ones, zeros, Nb * ones, -ones], axis=-1)
            dxk = np.stack([Na * ones, zeros, Nb * ones, zeros, zeros], axis=-1)
            dl = np.concatenate([-e, e, np.zeros((len(e), 1))], axis=1)[:, None, :] * ones[..., None]
            dJ = dl / L[:, None, None]
            dm = dl / 2.0 if self.current_area else np.zeros_like(dl)
            if rm is not None:
                dt = (-rm.dt_dslip[..., None] * dxk
                      + rm.dt_dthreshold[..., None] * (thr_g[..., None] * dg + thr_j[..., None] * dJ))
            else:
                dt = np.zeros_like(dg)
            dfx = m[..., None] * dt + t[..., None] * dm          # d(t m)/dz
            dfy = (half_L * dT)[..., None] * dg                   # d(T L/2)/dz
            k_loc = np.empty(g.shape + (5, 5))
            k_loc[..., 0, :] = -Na[..., None] * dfx
            k_loc[..., 1, :] = -Na[..., None] * dfy
            k_loc[..., 2, :] = -Nb[..., None] * dfx
            k_loc[..., 3, :] = -Nb[..., None] * dfy
            k_loc[..., 4, :] = -dfy
            rows = np.repeat(self._ldofs[..., :, None], 5, axis=-1)
            cols = np.repeat(self._ldofs[..., None, :], 5, axis=-2)
            tangent = Triplets(rows.ravel(), cols.ravel(), k_loc.ravel())

        segment = np.broadcast_to((ell / 2.0)[:, None], g.shape)
        active = g <= self.cutoff
        n_active = int(active.sum())
        stick_fraction = float(np.sum(active & (regime == STICK)) / n_active) if n_active else 0.0
        return ContactEvaluation(
            residual=R, tangent=tangent, g_n=g, x=x, t_n=T, t_t=t, threshold=thr,
            regime=regime, slip_increment=slip_inc, dissipation=diss,
            segment=np.array(segment),
            normal_force=float(-np.sum(T * half_L)),
            tangential_force=float(np.sum(t * m)),
            area=contact_area(g, segment, self.cutoff),
            stick_fraction=stick_fraction,
        )

    def commit(self, ev: ContactEvaluation, plate: RigidSurface, friction: bool = True):
        """Store the converged tractions and point positions as the new history."""
        if friction:
            self.t_committed = np.array(ev.t_t, copy=True)
            self.slip = self.slip + ev.slip_increment
            self.dissipated += float(ev.dissipation.sum())
        else:
            self.t_committed = np.zeros_like(self.t_committed)
        self.x_committed = np.array(ev.x[..., 0], copy=True)
        self.u_bar_committed = plate.u_bar

    def history(self):
        return (self.t_committed.copy(), self.x_committed.copy(), self.u_bar_committed,
                self.slip.copy(), self.dissipated)

    def restore(self, h):
        self.t_committed, self.x_committed, self.u_bar_committed, self.slip, self.dissipated = (
            h[0].copy(), h[1].copy(), h[2], h[3].copy(), h[4])


def write_contact_field(path, step: int, ev: ContactEvaluation, append: bool = False):
    """Per-point dump with columns ``step, point_id, x, g_n, t_n, t_t, threshold, regime``."""
    mode = "a" if append else "w"
    with open(path, mode, newline="") as fh:
        w = csv.writer(fh)
        if not append:
            w.writerow(["step", "point_id", "x", "g_n", "t_n", "t_t", "threshold", "regime"])
        for i, (x, g, tn, tt, th, rg) in enumerate(zip(
                ev.x[..., 0].ravel(), ev.g_n.ravel(), ev.t_n.ravel(), ev.t_t.ravel(),
                ev.threshold.ravel(), ev.regime.ravel())):
            w.writerow([step, i, repr(float(x)), repr(float(g)), repr(float(tn)),
                        repr(float(tt)), repr(float(th)), REGIME_NAMES[int(rg)]])

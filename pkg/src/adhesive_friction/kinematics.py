"""Gap kinematics between deformable surface points and a rigid flat plate.

The plate is a horizontal line at height ``height`` translated sideways by
``u_bar``; its outward normal ``(0, 1)`` points toward the deformable body,
which sits above it.
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .laws import DomainError

TANGENT = np.array([1.0, 0.0])
NORMAL = np.array([0.0, 1.0])


@dataclass(frozen=True)
class RigidSurface:
    """Flat rigid line ``y = height``, displaced horizontally by ``u_bar``."""

    height: float = 0.0
    u_bar: float = 0.0
    kind: str = "flat-line"

    def __post_init__(self):
        if self.kind != "flat-line":
            raise NotImplementedError(f"rigid surface kind {self.kind!r} is not implemented")

    @property
    def normal(self) -> np.ndarray:
        return NORMAL.copy()

    @property
    def tangent(self) -> np.ndarray:
        return TANGENT.copy()

    def translated(self, dx: float = 0.0, dy: float = 0.0) -> "RigidSurface":
        return replace(self, height=self.height + dy, u_bar=self.u_bar + dx)


@dataclass(frozen=True)
class GapState:
    g_n: float
    x_p: np.ndarray
    x_k: np.ndarray
    g_t_increment: float = 0.0
    g_t_accumulated: float = 0.0
    j_cl: float = 1.0


def project(x_k, surf: RigidSurface):
    """Closest point on the plate and the plate normal there.

    Works on a single point ``(2,)`` or a stack ``(n, 2)``.
    """
    x_k = np.asarray(x_k, dtype=float)
    x_p = np.array(x_k, copy=True)
    x_p[..., 1] = surf.height
    n_p = np.broadcast_to(NORMAL, x_k.shape).copy()
    return x_p, n_p


def normal_gap(x_k, surf: RigidSurface):
    x_k = np.asarray(x_k, dtype=float)
    x_p, n_p = project(x_k, surf)
    return np.sum((x_k - x_p) * n_p, axis=-1)


def gap_state(x_k, surf: RigidSurface, j_cl: float = 1.0) -> GapState:
    x_k = np.asarray(x_k, dtype=float)
    x_p, _ = project(x_k, surf)
    return GapState(g_n=float(normal_gap(x_k, surf)), x_p=x_p, x_k=x_k, j_cl=j_cl)


def slip_increment(x_k_old, x_k_new, surf_old: RigidSurface, surf_new: RigidSurface):
    """Tangential motion of the point relative to the plate over one step.

    Negative when the plate overtakes a stationary point.
    """
    dx = np.asarray(x_k_new, dtype=float) - np.asarray(x_k_old, dtype=float)
    return dx[..., 0] - (surf_new.u_bar - surf_old.u_bar)


def update_slip(prev: GapState, x_k_new, surf_old: RigidSurface, surf_new: RigidSurface,
                j_cl: float | None = None) -> GapState:
    """Advance a gap state to a new point position and plate placement.

    The accumulated slip adds the full relative tangential increment; the
    contact solver decides how much of it is elastic stick.
    """
    x_k_new = np.asarray(x_k_new, dtype=float)
    inc = float(slip_increment(prev.x_k, x_k_new, surf_old, surf_new))
    x_p, _ = project(x_k_new, surf_new)
    return GapState(
        g_n=float(normal_gap(x_k_new, surf_new)),
        x_p=x_p,
        x_k=x_k_new,
        g_t_increment=inc,
        g_t_accumulated=prev.g_t_accumulated + inc,
        j_cl=prev.j_cl if j_cl is None else j_cl,
    )


def surface_stretch(reference_length, current_length):
    """Current-to-reference length ratio of a boundary facet."""
    ref = np.asarray(reference_length, dtype=float)
    cur = np.asarray(current_length, dtype=float)
    if np.any(ref <= 0) or np.any(cur <= 0):
        raise DomainError("facet lengths must be positive")
    return cur / ref

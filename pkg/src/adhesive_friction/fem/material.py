"""Compressible Neo-Hookean material in plane strain.

Strain energy per reference volume::

    W = mu/2 (I1 - 3) - mu ln J + lam/2 (ln J)^2

with ``I1 = tr(F^T F) + 1`` (out-of-plane stretch fixed to one).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..laws import DomainError


class ElementInversionError(RuntimeError):
    """A deformation gradient with ``det F <= 0`` was encountered."""


@dataclass(frozen=True)
class Material:
    youngs_modulus: float
    poisson_ratio: float

    def __post_init__(self):
        if not self.youngs_modulus > 0:
            raise DomainError("Young's modulus must be positive")
        if not 0.0 <= self.poisson_ratio < 0.5:
            raise DomainError("Poisson ratio must lie in [0, 0.5)")

    @property
    def mu(self) -> float:
        return self.youngs_modulus / (2.0 * (1.0 + self.poisson_ratio))

    @property
    def lam(self) -> float:
        E, nu = self.youngs_modulus, self.poisson_ratio
        return E * nu / ((1.0 + nu) * (1.0 - 2.0 * nu))


def _det_inv(F):
    det = F[..., 0, 0] * F[..., 1, 1] - F[..., 0, 1] * F[..., 1, 0]
    if np.any(det <= 0):
        raise ElementInversionError("det F <= 0")
    inv = np.empty_like(F)
    inv[..., 0, 0] = F[..., 1, 1] / det
    inv[..., 1, 1] = F[..., 0, 0] / det
    inv[..., 0, 1] = -F[..., 0, 1] / det
    inv[..., 1, 0] = -F[..., 1, 0] / det
    return det, inv


def strain_energy(F, m: Material):
    F = np.asarray(F, dtype=float)
    J, _ = _det_inv(F)
    lnJ = np.log(J)
    I1 = np.einsum("...ij,...ij->...", F, F) + 1.0
    return 0.5 * m.mu * (I1 - 3.0) - m.mu * lnJ + 0.5 * m.lam * lnJ**2


def pk1_stress_tangent(F, m: Material):
    """First Piola-Kirchhoff stress ``P`` and ``A = dP/dF`` for a stack of gradients.

    ``F`` has shape ``(..., 2, 2)``; ``A[..., i, J, k, L] = dP_iJ / dF_kL``.
    """
    F = np.asarray(F, dtype=float)
    J, Finv = _det_inv(F)
    lnJ = np.log(J)
    FinvT = np.swapaxes(Finv, -1, -2)
    mu, lam = m.mu, m.lam
    P = mu * F + (lam * lnJ - mu)[..., None, None] * FinvT
    eye = np.eye(2)
    A = (mu * np.einsum("ik,JL->iJkL", eye, eye)
         + (mu - lam * lnJ)[..., None, None, None, None] * np.einsum("...Li,...Jk->...iJkL", Finv, Finv)
         + lam * np.einsum("...Ji,...Lk->...iJkL", Finv, Finv))
    return P, A


def neo_hooke_stress_tangent(F, m: Material):
    """In-plane Cauchy stress and spatial elasticity tensor ``c_ijkl``.

    ``c`` is the tangent of the Truesdell rate of Kirchhoff stress divided
    by ``J``; it satisfies ``A_iJkL F_jJ F_lL = J c_ijkl + delta_ik tau_jl``.
    """
    F = np.asarray(F, dtype=float)
    J, _ = _det_inv(F)
    lnJ = np.log(J)
    b = F @ np.swapaxes(F, -1, -2)
    eye = np.eye(2)
    sigma = (m.mu * (b - eye) + (m.lam * lnJ)[..., None, None] * eye) / J[..., None, None]
    sym = 0.5 * (np.einsum("ik,jl->ijkl", eye, eye) + np.einsum("il,jk->ijkl", eye, eye))
    c = ((m.lam / J)[..., None, None, None, None] * np.einsum("ij,kl->ijkl", eye, eye)
         + (2.0 * (m.mu - m.lam * lnJ) / J)[..., None, None, None, None] * sym)
    return sigma, c

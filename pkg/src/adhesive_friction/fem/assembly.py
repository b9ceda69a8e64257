"""Residual and tangent assembly for plane-strain bilinear quadrilaterals."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .material import Material, pk1_stress_tangent, strain_energy
from .mesh import Mesh, shape_gradients


@dataclass
class Triplets:
    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray

    @classmethod
    def empty(cls):
        z = np.zeros(0, dtype=np.int64)
        return cls(z, z, np.zeros(0))


class SparseAssembler:
    """Sums triplets with a fixed pattern into CSR, reusing the index map.

    The pattern always contains the full diagonal so that Dirichlet rows can
    be replaced by identity without changing the structure.
    """

    def __init__(self, n: int, rows, cols):
        self.n = n
        diag = np.arange(n)
        r = np.concatenate([rows, diag])
        c = np.concatenate([cols, diag])
        keys = r * n + c
        uniq, self.inverse = np.unique(keys, return_inverse=True)
        self.n_input = len(rows)
        self.row_of = uniq // n
        self.col_of = uniq % n
        self.indptr = np.searchsorted(self.row_of, np.arange(n + 1))
        self.diag_pos = np.searchsorted(uniq, diag * n + diag)

    def matrix(self, vals, fixed=None):
        v = np.concatenate([vals, np.zeros(self.n)])
        data = np.bincount(self.inverse, weights=v, minlength=len(self.row_of))
        if fixed is not None:
            fixed = np.asarray(fixed, dtype=bool)
            data[fixed[self.row_of] | fixed[self.col_of]] = 0.0
            data[self.diag_pos[fixed]] = 1.0
        return sp.csr_matrix((data, self.col_of, self.indptr), shape=(self.n, self.n))


@dataclass
class ElementKernel:
    """Precomputed element geometry for repeated residual/tangent evaluation.

    With ``threads > 1`` elements are processed in contiguous chunks whose
    results are concatenated in element order, so the assembled arrays do
    not depend on the thread schedule.
    """

    mesh: Mesh
    material: Material
    threads: int = 1
    G: np.ndarray = field(init=False, repr=False)
    weight: np.ndarray = field(init=False, repr=False)
    edofs: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dN, self.weight = shape_gradients(self.mesh.nodes, self.mesh.elements)
        m = self.mesh.n_elements
        # G maps element dofs (a, k) to displacement-gradient entries (i, J)
        G = np.zeros((m, 4, 2, 2, 4, 2))
        for i in range(2):
            G[:, :, i, :, :, i] = np.swapaxes(dN, -1, -2)
        self.G = G.reshape(m, 4, 4, 8)
        e = self.mesh.elements
        self.edofs = np.stack([2 * e, 2 * e + 1], axis=-1).reshape(m, 8)
        self.rows = np.repeat(self.edofs, 8, axis=1).ravel()
        self.cols = np.tile(self.edofs, (1, 8)).ravel()

    @property
    def n_dof(self) -> int:
        return 2 * self.mesh.n_nodes

    def deformation_gradients(self, u, sl=slice(None)):
        ue = u[self.edofs[sl]]                                        # (m, 8)
        H = np.einsum("mgpq,mq->mgp", self.G[sl], ue).reshape(-1, 4, 2, 2)
        return H + np.eye(2)

    def _chunk(self, u, sl, with_tangent):
        F = self.deformation_gradients(u, sl)
        P, A = pk1_stress_tangent(F, self.material)
        G, w = self.G[sl], self.weight[sl]
        GtW = np.swapaxes(G, -1, -2) * w[..., None, None]             # (m, g, 8, 4)
        fe = np.einsum("mgqp,mgp->mq", GtW, P.reshape(-1, 4, 4))
        if not with_tangent:
            return fe, None
        Ke = (GtW @ A.reshape(-1, 4, 4, 4) @ G).sum(axis=1)           # (m, 8, 8)
        return fe, Ke.reshape(-1, 64)

    def _chunks(self):
        m = self.mesh.n_elements
        n = max(1, min(self.threads, m))
        bounds = np.linspace(0, m, n + 1).astype(int)
        return [slice(a, b) for a, b in zip(bounds[:-1], bounds[1:])]

    def forces(self, u, with_tangent=True):
        """Internal force vector and (optionally) tangent triplets."""
        chunks = self._chunks()
        if len(chunks) == 1:
            parts = [self._chunk(u, chunks[0], with_tangent)]
        else:
            with ThreadPoolExecutor(max_workers=len(chunks)) as pool:
                parts = list(pool.map(lambda s: self._chunk(u, s, with_tangent), chunks))
        fe = np.concatenate([p[0] for p in parts])
        f = np.bincount(self.edofs.ravel(), weights=fe.ravel(), minlength=self.n_dof)
        if not with_tangent:
            return f, None
        Ke = np.concatenate([p[1] for p in parts])
        return f, Triplets(self.rows, self.cols, Ke.ravel())

    def energy(self, u) -> float:
        F = self.deformation_gradients(u)
        return float(np.sum(strain_energy(F, self.material) * self.weight))

    def cauchy_stress(self, u):
        """Cauchy stress at every Gauss point, shape ``(m, 4, 2, 2)``."""
        F = self.deformation_gradients(u)
        P, _ = pk1_stress_tangent(F, self.material)
        J = F[..., 0, 0] * F[..., 1, 1] - F[..., 0, 1] * F[..., 1, 0]
        return np.einsum("...iJ,...jJ->...ij", P, F) / J[..., None, None]


def assemble(kernel: ElementKernel, u, contributions=(), n_total=None, fixed=None,
             assembler: SparseAssembler | None = None):
    """Global residual and tangent.

    ``u`` holds nodal displacements, possibly followed by extra unknowns
    such as the plate position. Each contribution is a ``(vector,
    Triplets)`` pair already signed as a residual term. Rows and columns of
    ``fixed`` dofs are replaced by identity with a zero residual. Pass an
    ``assembler`` built for the same triplet pattern to skip the symbolic
    phase.
    """
    n_total = len(u) if n_total is None else n_total
    f_int, K_int = kernel.forces(u[:kernel.n_dof])
    R = np.zeros(n_total)
    R[:kernel.n_dof] = f_int
    rows, cols, vals = [K_int.rows], [K_int.cols], [K_int.vals]
    for vec, trip in contributions:
        R += vec
        rows.append(trip.rows)
        cols.append(trip.cols)
        vals.append(trip.vals)
    vals = np.concatenate(vals)
    if assembler is None or assembler.n_input != len(vals):
        assembler = SparseAssembler(n_total, np.concatenate(rows), np.concatenate(cols))
    K = assembler.matrix(vals, fixed)
    if fixed is not None:
        R = np.where(np.asarray(fixed, dtype=bool), 0.0, R)
    return R, K


def apply_dirichlet(R, K, fixed):
    fixed = np.asarray(fixed, dtype=bool)
    free = sp.diags((~fixed).astype(float))
    K = (free @ K @ free + sp.diags(fixed.astype(float))).tocsr()
    R = np.where(fixed, 0.0, R)
    return R, K

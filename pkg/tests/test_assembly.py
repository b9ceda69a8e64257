import numpy as np
import pytest
import scipy.sparse as sp

from adhesive_friction.fem.assembly import (ElementKernel, SparseAssembler, Triplets, apply_dirichlet,
                                            assemble)
from adhesive_friction.fem.material import Material
from adhesive_friction.fem.mesh import Mesh, rectangle_mesh

MAT = Material(1.0, 0.3)


def distorted_mesh():
    m = rectangle_mesh(2.0, 1.0, 4, 3)
    rng = np.random.default_rng(0)
    nodes = m.nodes.copy()
    interior = (nodes[:, 0] > 0) & (nodes[:, 0] < 2) & (nodes[:, 1] > 0) & (nodes[:, 1] < 1)
    nodes[interior] += rng.uniform(-0.08, 0.08, (interior.sum(), 2))
    return Mesh(nodes, m.elements, m.sets)


def test_zero_residual_in_reference_state():
    k = ElementKernel(distorted_mesh(), MAT)
    f, _ = k.forces(np.zeros(k.n_dof))
    assert np.abs(f).max() < 1e-14


@pytest.mark.parametrize("F", [np.array([[1.05, 0.02], [-0.01, 0.97]]), np.array([[0.9, 0.3], [0.0, 1.1]])])
def test_patch_test_homogeneous_deformation(F):
    mesh = distorted_mesh()
    k = ElementKernel(mesh, MAT)
    u = (mesh.nodes @ (F - np.eye(2)).T).ravel()
    f, _ = k.forces(u)
    boundary = np.unique(np.concatenate([mesh.set_nodes(s) for s in ("bottom", "top", "left", "right")]))
    inner = np.setdiff1d(np.arange(mesh.n_nodes), boundary)
    assert np.abs(f.reshape(-1, 2)[inner]).max() < 1e-12
    # every Gauss point sees the same gradient
    assert np.allclose(k.deformation_gradients(u), F)


def test_rigid_rotation_is_stress_free():
    mesh = distorted_mesh()
    k = ElementKernel(mesh, MAT)
    th = 0.4
    Q = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    u = (mesh.nodes @ Q.T - mesh.nodes).ravel()
    f, _ = k.forces(u)
    assert np.abs(f).max() < 1e-12


def test_tangent_matches_finite_differences():
    mesh = distorted_mesh()
    k = ElementKernel(mesh, MAT)
    rng = np.random.default_rng(5)
    u = 0.05 * rng.standard_normal(k.n_dof)
    R, K = assemble(k, u)
    K = K.toarray()
    h = 1e-7
    fd = np.empty_like(K)
    for j in range(k.n_dof):
        e = np.zeros(k.n_dof); e[j] = h
        fd[:, j] = (k.forces(u + e, False)[0] - k.forces(u - e, False)[0]) / (2 * h)
    assert np.abs(K - fd).max() / np.abs(K).max() < 1e-6
    assert np.allclose(K, K.T, atol=1e-10)


def test_force_is_energy_gradient():
    mesh = distorted_mesh()
    k = ElementKernel(mesh, MAT)
    rng = np.random.default_rng(6)
    u = 0.05 * rng.standard_normal(k.n_dof)
    f, _ = k.forces(u, False)
    h = 1e-6
    for j in rng.choice(k.n_dof, 8, replace=False):
        e = np.zeros(k.n_dof); e[j] = h
        assert (k.energy(u + e) - k.energy(u - e)) / (2 * h) == pytest.approx(f[j], rel=1e-6, abs=1e-10)


def test_threads_do_not_change_results():
    mesh = distorted_mesh()
    u = 0.03 * np.random.default_rng(7).standard_normal(2 * mesh.n_nodes)
    R1, K1 = assemble(ElementKernel(mesh, MAT, threads=1), u)
    R3, K3 = assemble(ElementKernel(mesh, MAT, threads=3), u)
    assert np.array_equal(R1, R3)
    assert np.array_equal(K1.toarray(), K3.toarray())


def test_dirichlet_rows_are_identity():
    mesh = distorted_mesh()
    k = ElementKernel(mesh, MAT)
    u = 0.02 * np.random.default_rng(8).standard_normal(k.n_dof)
    fixed = np.zeros(k.n_dof, bool)
    fixed[2 * mesh.set_nodes("left")] = True
    R, K = assemble(k, u, fixed=fixed)
    Kd = K.toarray()
    idx = np.nonzero(fixed)[0]
    assert np.all(R[idx] == 0)
    assert np.array_equal(Kd[idx], np.eye(k.n_dof)[idx])
    assert np.array_equal(Kd[:, idx], np.eye(k.n_dof)[:, idx])
    R0, K0 = assemble(k, u)
    R2, K2 = apply_dirichlet(R0, K0, fixed)
    assert np.allclose(K2.toarray(), Kd) and np.array_equal(R2, R)


def test_sparse_assembler_sums_duplicates():
    rows = np.array([0, 1, 0, 2, 0])
    cols = np.array([0, 2, 0, 1, 1])
    vals = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    a = SparseAssembler(3, rows, cols)
    ref = sp.coo_matrix((vals, (rows, cols)), shape=(3, 3)).toarray()
    assert np.array_equal(a.matrix(vals).toarray(), ref)
    fixed = np.array([False, True, False])
    M = a.matrix(vals, fixed).toarray()
    assert M[1, 1] == 1 and M[1, 0] == 0 and M[2, 1] == 0 and M[0, 0] == 4


def test_extra_contributions_and_unknowns():
    mesh = distorted_mesh()
    k = ElementKernel(mesh, MAT)
    n = k.n_dof + 1
    vec = np.zeros(n); vec[-1] = 2.0
    trip = Triplets(np.array([n - 1]), np.array([n - 1]), np.array([3.0]))
    R, K = assemble(k, np.zeros(n), [(vec, trip)], n)
    assert R[-1] == 2.0 and K[n - 1, n - 1] == 3.0

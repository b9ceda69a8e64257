import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from adhesive_friction.fem.material import (ElementInversionError, Material, neo_hooke_stress_tangent,
                                            pk1_stress_tangent, strain_energy)
from adhesive_friction.laws import DomainError

MAT = Material(1.0, 0.4)


def random_F(rng, n, scale=0.3):
    F = np.eye(2) + scale * rng.uniform(-1, 1, (n, 2, 2))
    det = np.linalg.det(F)
    return F[det > 0.2]


def test_lame_constants():
    m = Material(2.0, 0.25)
    assert m.mu == pytest.approx(0.8)
    assert m.lam == pytest.approx(0.8)
    with pytest.raises(DomainError):
        Material(1.0, 0.5)


def test_stress_free_reference():
    P, A = pk1_stress_tangent(np.eye(2)[None], MAT)
    assert np.allclose(P, 0)
    assert strain_energy(np.eye(2)[None], MAT)[0] == pytest.approx(0.0, abs=1e-15)
    # small-strain limit: plane-strain isotropic elasticity
    lam, mu = MAT.lam, MAT.mu
    C = np.einsum("ij,kl->ijkl", np.eye(2), np.eye(2)) * lam + mu * (
        np.einsum("ik,jl->ijkl", np.eye(2), np.eye(2)) + np.einsum("il,jk->ijkl", np.eye(2), np.eye(2)))
    assert np.allclose(A[0], C)


def test_stress_is_energy_gradient():
    rng = np.random.default_rng(1)
    F = random_F(rng, 20)
    P, _ = pk1_stress_tangent(F, MAT)
    h = 1e-7
    for k in range(2):
        for L in range(2):
            E = np.zeros((2, 2)); E[k, L] = h
            fd = (strain_energy(F + E, MAT) - strain_energy(F - E, MAT)) / (2 * h)
            assert np.allclose(P[:, k, L], fd, rtol=1e-6, atol=1e-9)


def test_material_tangent_finite_differences():
    rng = np.random.default_rng(2)
    F = random_F(rng, 20)
    _, A = pk1_stress_tangent(F, MAT)
    h = 1e-6
    for k in range(2):
        for L in range(2):
            E = np.zeros((2, 2)); E[k, L] = h
            fd = (pk1_stress_tangent(F + E, MAT)[0] - pk1_stress_tangent(F - E, MAT)[0]) / (2 * h)
            err = np.abs(A[..., k, L] - fd).max() / np.abs(A).max()
            assert err < 1e-6


@settings(max_examples=40, deadline=None)
@given(st.floats(-0.4, 0.4), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4), st.floats(-0.4, 0.4))
def test_spatial_tangent_relation(a, b, c, d):
    F = np.eye(2) + np.array([[a, b], [c, d]])
    J = np.linalg.det(F)
    if J < 0.2:
        return
    P, A = pk1_stress_tangent(F[None], MAT)
    sigma, cs = neo_hooke_stress_tangent(F[None], MAT)
    tau = J * sigma[0]
    lhs = np.einsum("iJkL,jJ,lL->ijkl", A[0], F, F)
    rhs = J * cs[0] + np.einsum("ik,jl->ijkl", np.eye(2), tau)
    assert np.allclose(lhs, rhs, atol=1e-10)
    assert np.allclose(P[0] @ F.T / J, sigma[0], atol=1e-12)


def test_frame_invariance_of_energy():
    rng = np.random.default_rng(4)
    F = random_F(rng, 10)
    th = 0.7
    Q = np.array([[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]])
    assert np.allclose(strain_energy(Q @ F, MAT), strain_energy(F, MAT))


def test_inverted_gradient_raises():
    with pytest.raises(ElementInversionError):
        pk1_stress_tangent(np.array([[[1.0, 0.0], [0.0, -0.1]]]), MAT)

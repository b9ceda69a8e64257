import numpy as np
import pytest

from adhesive_friction.fem.mesh import (Mesh, MeshError, gauss_jacobians, generate_cap_mesh, read_mesh,
                                        rectangle_mesh, segment_area, write_mesh)


@pytest.fixture(scope="module")
def cap():
    return generate_cap_mesh()


def test_cap_default_size_and_jacobians(cap):
    assert 2500 <= cap.n_elements <= 3500
    assert np.all(gauss_jacobians(cap.nodes, cap.elements) > 0)


def test_cap_area_matches_segment(cap):
    exact = segment_area(47.1, 10.0)
    assert abs(cap.area() - exact) / exact < 5e-3


def test_cap_geometry_and_sets(cap):
    base = cap.set_nodes("base")
    assert np.allclose(cap.nodes[base, 1], 10.0)
    contact = cap.nodes[cap.set_nodes("contact")]
    assert contact[:, 1].min() == pytest.approx(0.0, abs=1e-12)
    r = np.hypot(contact[:, 0], contact[:, 1] - 47.1)
    assert np.allclose(r, 47.1, atol=1e-9)
    assert len(cap.facets("free")) > 0
    cap.validate()


def test_density_scaling():
    coarse = generate_cap_mesh(density=0.5)
    fine = generate_cap_mesh(density=1.0)
    ratio = fine.n_elements / coarse.n_elements
    assert 3.0 < ratio < 5.0
    h = lambda m: np.min(np.diff(np.sort(m.nodes[m.set_nodes("contact"), 0])))
    assert h(coarse) / h(fine) == pytest.approx(2.0, rel=0.05)


def test_degenerate_geometry_rejected():
    with pytest.raises(MeshError):
        generate_cap_mesh(radius=5.0, height=10.0)
    with pytest.raises(MeshError):
        generate_cap_mesh(density=0)


def test_round_trip(tmp_path, cap):
    p = tmp_path / "cap.txt"
    write_mesh(cap, p)
    back = read_mesh(p)
    assert np.array_equal(back.nodes, cap.nodes)
    assert np.array_equal(back.elements, cap.elements)
    assert back.sets.keys() == cap.sets.keys()
    for k in cap.sets:
        assert all(np.array_equal(a, b) for a, b in zip(back.sets[k], cap.sets[k]))
    lines = p.read_text().splitlines()
    assert lines[0] == f"{cap.n_nodes} {cap.n_elements}"
    assert lines[1].split()[0] == "1"


def test_malformed_file(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("3 1\n1 0 0\n2 1 0\n")
    with pytest.raises(MeshError):
        read_mesh(p)


def test_rectangle_mesh_and_validation():
    m = rectangle_mesh(2.0, 1.0, 4, 2)
    assert m.n_elements == 8 and m.area() == pytest.approx(2.0)
    assert len(m.facets("bottom")) == 4
    flipped = Mesh(m.nodes, m.elements[:, ::-1], {})
    with pytest.raises(MeshError):
        flipped.validate()

import numpy as np
import pytest

from ucfem.assembly import assemble_boundary
from ucfem.mesh import build_structured_mesh
from ucfem.trace_space import (SineTraceBasis, coupling_blocks, gram_matrices,
                               interpolated_blocks, nodal_mode_values)


@pytest.fixture(scope="module")
def mesh():
    return build_structured_mesh(20)


def test_gram_identities(mesh):
    basis = SineTraceBasis(5)
    mass, stiff = gram_matrices(basis, mesh)
    np.testing.assert_allclose(mass, np.eye(5), atol=1e-10)
    k = np.arange(1, 6)
    np.testing.assert_allclose(stiff, np.diag(k**2 * np.pi**2), atol=1e-8)


def test_single_mode_gram(mesh):
    mass, _ = gram_matrices(SineTraceBasis(1), mesh)
    np.testing.assert_allclose(mass, [[1.0]], atol=1e-10)


def test_coupling_sums(mesh):
    c_mass, c_stiff = coupling_blocks(SineTraceBasis(1), mesh)
    assert c_mass.shape == (mesh.n_vertices, 1)
    assert c_mass.sum() == pytest.approx(2 * np.sqrt(2) / np.pi, abs=1e-10)
    # hats sum to one on the top edge, so their tangential derivatives sum to zero
    assert abs(c_stiff.sum()) < 1e-10


def test_coupling_rows_only_on_top(mesh):
    c_mass, _ = coupling_blocks(SineTraceBasis(3), mesh)
    rows = np.unique(c_mass.nonzero()[0])
    assert np.all(mesh.vertices[rows, 1] == 1.0)


def test_boundary_values_vanish_off_top():
    basis = SineTraceBasis(3)
    x = np.array([0.3, 0.3, 0.0, 1.0])
    y = np.array([1.0, 0.5, 0.4, 0.9])
    vals = basis.boundary_values(x, y)
    np.testing.assert_allclose(vals[0], np.sqrt(2) * np.sin(np.arange(1, 4) * np.pi * 0.3))
    np.testing.assert_allclose(vals[1:], 0.0, atol=1e-15)


def test_evaluate_and_derivatives():
    basis = SineTraceBasis(2)
    x = np.linspace(0, 1, 7)
    np.testing.assert_allclose(basis.evaluate([1 / np.sqrt(2), 0.0], x), np.sin(np.pi * x), atol=1e-15)
    step = 1e-6
    fd = (basis.values(x + step) - basis.values(x - step)) / (2 * step)
    np.testing.assert_allclose(basis.derivatives(x), fd, atol=1e-6)


def test_interpolated_grams_diagonal(mesh):
    basis = SineTraceBasis(5)
    m_bnd, k_bnd = assemble_boundary(mesh)
    c_mass, c_stiff, m_n, k_n = interpolated_blocks(basis, mesh, m_bnd, k_bnd)
    np.testing.assert_allclose(m_n - np.diag(np.diag(m_n)), 0.0, atol=1e-13)
    np.testing.assert_allclose(k_n - np.diag(np.diag(k_n)), 0.0, atol=1e-11)
    # close to the exact Grams up to O(h^2)
    h = 1 / 20
    k = np.arange(1, 6)
    np.testing.assert_allclose(np.diag(m_n), 1.0, atol=(5 * np.pi * h) ** 2)
    np.testing.assert_allclose(np.diag(k_n) / (k * np.pi) ** 2, 1.0, atol=(5 * np.pi * h) ** 2)
    phi = nodal_mode_values(basis, mesh)
    np.testing.assert_allclose(c_mass.toarray(), m_bnd @ phi, atol=1e-15)


@pytest.mark.parametrize("bad", [0, -1, 2.5])
def test_basis_rejects_bad_size(bad):
    with pytest.raises(ValueError):
        SineTraceBasis(bad)

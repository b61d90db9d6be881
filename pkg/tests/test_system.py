import numpy as np
import pytest
import scipy.io
import scipy.sparse as sp

from ucfem.assembly import assemble_forms, assemble_rhs, scale_forms
from ucfem.manufactured import manufactured
from ucfem.mesh import build_structured_mesh
from ucfem.system import (SolverError, build_system, eliminate_y_check, eliminated_operator,
                          project_trace, solve)
from ucfem.trace_space import SineTraceBasis


def make_system(n=20, N=5, gamma=0.0, solution="simple", trace_modes="interpolated"):
    mesh = build_structured_mesh(n)
    forms = assemble_forms(mesh, SineTraceBasis(N), trace_modes=trace_modes)
    scaled = scale_forms(forms, gamma)
    sol = manufactured(solution)
    rhs = assemble_rhs(mesh, forms.dofmap, sol.q, sol.f, N)
    return build_system(scaled, rhs)


@pytest.fixture(scope="module")
def system20():
    return make_system()


def test_dimension(system20):
    assert system20.shape == (807, 807)
    assert (system20.n_u, system20.n_y, system20.n_z) == (441, 5, 361)


@pytest.mark.parametrize("gamma", [0.0, 1.0])
def test_symmetry(gamma):
    m = make_system(n=10, gamma=gamma).matrix
    assert abs(m - m.T).max() <= 1e-12 * abs(m).max()


def test_zero_data_gives_zero(system20):
    zero = system20.with_rhs(np.zeros(system20.shape[0]))
    sol = solve(zero)
    assert np.abs(sol.u_h.coefficients).max() <= 1e-12
    assert np.abs(sol.y).max() <= 1e-12
    assert np.abs(sol.z_h.coefficients).max() <= 1e-12


def test_linearity(system20, rng):
    b1 = rng.standard_normal(system20.shape[0])
    b2 = rng.standard_normal(system20.shape[0])
    s1 = solve(system20.with_rhs(b1))
    s2 = solve(system20.with_rhs(b2))
    s12 = solve(system20.with_rhs(2.0 * b1 - 3.0 * b2))
    np.testing.assert_allclose(s12.u_h.coefficients,
                               2 * s1.u_h.coefficients - 3 * s2.u_h.coefficients, atol=1e-9)


def test_residual_and_multiplier_support(system20):
    sol = solve(system20)
    assert sol.residual <= 1e-10
    boundary = system20.scaled.dofmap.boundary
    np.testing.assert_array_equal(sol.z_h.coefficients[boundary], 0.0)


def test_recovered_mode_one(system20):
    sol = solve(system20)
    h = system20.scaled.h
    assert sol.y[0] == pytest.approx(1 / np.sqrt(2), abs=h)


def test_recovered_higher_modes(system20):
    sol = solve(system20)
    assert np.abs(sol.y[1:]).max() <= 1e-3


def test_higher_modes_decay():
    # the off-modes are set by the trace error of u_h and vanish under refinement
    amps = [np.abs(solve(make_system(n=n)).y[1:]).max() for n in (20, 40, 80)]
    rates = np.diff(np.log(amps)) / np.log(0.5)
    assert np.all(rates > 1.8)


@pytest.mark.parametrize("trace_modes", ["interpolated", "exact"])
def test_eliminate_y_check(trace_modes):
    system = make_system(N=1, trace_modes=trace_modes)
    sol = solve(system)
    scaled = system.scaled
    assert eliminate_y_check(sol, scaled) <= 1e-10
    np.testing.assert_allclose(project_trace(sol.u_h.coefficients, scaled), sol.y, atol=1e-10)
    if trace_modes == "interpolated":
        # the quadrature projection of sin(pi x) onto the first mode is 1/sqrt(2)
        assert abs(sol.y[0] - 1 / np.sqrt(2)) <= 5 * scaled.h


def test_galerkin_orthogonality(system20):
    sol = solve(system20)
    scaled = system20.scaled
    g = eliminated_operator(scaled)
    x = np.concatenate([sol.u_h.coefficients, sol.z_h.coefficients[system20.interior]])
    rhs = np.concatenate([system20.rhs[system20.u_slice], system20.rhs[system20.z_slice]])
    assert np.abs(g @ x - rhs).max() <= 1e-10 * np.abs(rhs).max()


def test_inf_sup_identity(rng):
    from ucfem.estimator import triple_norm
    from ucfem.fe_space import FeFunction

    system = make_system(n=10, gamma=1.0)
    scaled = system.scaled
    g = eliminated_operator(scaled)
    n_u, n_z = system.n_u, system.n_z
    for _ in range(5):
        u = rng.standard_normal(n_u)
        z = rng.standard_normal(n_z)
        lhs = np.concatenate([u, -z]) @ (g @ np.concatenate([u, z]))
        tn = triple_norm(scaled, FeFunction(scaled.mesh, u), FeFunction(scaled.mesh, np.zeros(n_u)))
        assert lhs == pytest.approx(tn.squared, rel=1e-10)


def test_build_rejects_bad_rhs():
    mesh = build_structured_mesh(4)
    scaled = scale_forms(assemble_forms(mesh, SineTraceBasis(2)))
    with pytest.raises(ValueError):
        build_system(scaled, (np.zeros(3), np.zeros(2), np.zeros(9)))


def test_singular_system_raises(system20):
    broken = system20.__class__(
        sp.csc_matrix(system20.shape), system20.rhs, system20.n_u, system20.n_y,
        system20.n_z, system20.interior, system20.scaled)
    with pytest.raises(SolverError):
        solve(broken)


def test_matrix_market_dump(tmp_path):
    system = make_system(n=4, N=2)
    path = system.dump(tmp_path / "block")
    assert path.suffix == ".mtx" and path.exists()
    header = path.read_text().splitlines()[0]
    assert header == "%%MatrixMarket matrix coordinate real general"
    back = scipy.io.mmread(str(path)).tocsc()
    assert abs(back - system.matrix).max() <= 1e-15 * abs(system.matrix).max()

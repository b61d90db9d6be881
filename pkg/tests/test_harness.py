import csv

import numpy as np
import pytest
import sympy as sym
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from ucfem import UniqueContinuationFEM
from ucfem import cli
from ucfem.experiment import CSV_COLUMNS, make_config, run_experiment
from ucfem.manufactured import manufactured
from ucfem.mesh import build_structured_mesh
from ucfem.noise import _l2_omega, add_noise, noise_field
from ucfem.svg import write_loglog_svg
from ucfem.system import SolverError

X, Y = sym.symbols("x y")
PTS = np.array([[0.1, 0.2], [0.37, 0.81], [0.5, 1.0], [0.93, 0.44]])


@pytest.mark.parametrize("sid,N,expr", [
    ("simple", None, Y * sym.sin(sym.pi * X)),
    ("perturbed", None, Y * sym.sin(sym.pi * X) + Y * sym.sin(2 * sym.pi * X) / 100),
    ("modeN", 3, Y * sym.sin(3 * sym.pi * X)),
])
def test_manufactured_against_symbolic(sid, N, expr):
    sol = manufactured(sid, N)
    lap = -(sym.diff(expr, X, 2) + sym.diff(expr, Y, 2))
    derivs = {
        "u": expr, "f": lap,
        "ux": sym.diff(expr, X), "uy": sym.diff(expr, Y),
        "uxx": sym.diff(expr, X, 2), "uxy": sym.diff(expr, X, Y), "uyy": sym.diff(expr, Y, 2),
    }
    ev = {k: sym.lambdify((X, Y), v, "numpy") for k, v in derivs.items()}
    x, y = PTS[:, 0], PTS[:, 1]
    np.testing.assert_allclose(sol.u(x, y), ev["u"](x, y), atol=1e-13)
    np.testing.assert_allclose(sol.f(x, y), ev["f"](x, y), atol=1e-12)
    np.testing.assert_allclose(sol.gradient(x, y), [ev["ux"](x, y), ev["uy"](x, y)], atol=1e-12)
    hess = sol.hessian(x, y)
    for got, key in zip(hess, ("uxx", "uxy", "uyy")):
        np.testing.assert_allclose(got, np.broadcast_to(ev[key](x, y), x.shape), atol=1e-12)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_mode_trace_vanishes_off_top(N):
    sol = manufactured("modeN", N)
    s = np.linspace(0, 1, 11)
    np.testing.assert_allclose(sol.u(s, 0 * s), 0.0, atol=1e-15)
    np.testing.assert_allclose(sol.u(0 * s, s), 0.0, atol=1e-15)
    np.testing.assert_allclose(sol.u(0 * s + 1, s), 0.0, atol=1e-14)


def test_trace_coefficients():
    np.testing.assert_allclose(manufactured("simple").trace_coefficients(5), [2**-0.5, 0, 0, 0, 0])
    np.testing.assert_allclose(manufactured("perturbed").trace_coefficients(1), [2**-0.5])
    np.testing.assert_allclose(manufactured("perturbed").trace_coefficients(2),
                               [2**-0.5, 0.01 * 2**-0.5])


@pytest.mark.parametrize("sid,N", [("bogus", None), ("modeN", None), ("modeN", 0)])
def test_manufactured_rejects(sid, N):
    with pytest.raises(ValueError):
        manufactured(sid, N)


def test_noise_norm_and_determinism():
    mesh = build_structured_mesh(80)
    g1 = noise_field(1e-2, seed=7)
    g2 = noise_field(1e-2, seed=7)
    g3 = noise_field(1e-2, seed=8)
    assert _l2_omega(g1, mesh) == pytest.approx(1e-2, rel=1e-12)
    x, y = PTS[:, 0], PTS[:, 1]
    np.testing.assert_array_equal(g1(x, y), g2(x, y))
    assert not np.allclose(g1(x, y), g3(x, y))


def test_noise_zero_delta():
    q = manufactured("simple").q
    assert add_noise(q, 0.0) is q
    np.testing.assert_array_equal(noise_field(0.0, 1)(PTS[:, 0], PTS[:, 1]), 0.0)
    with pytest.raises(ValueError):
        noise_field(-1.0, 0)


def test_estimator_params_and_clone():
    model = UniqueContinuationFEM(n=20, n_modes=3, gamma=0.5)
    assert model.get_params() == {"n": 20, "n_modes": 3, "gamma": 0.5,
                                  "trace_modes": "interpolated"}
    twin = clone(model)
    assert twin is not model and twin.get_params() == model.get_params()
    model.set_params(gamma=0.0)
    assert model.gamma == 0.0


def test_predict():
    sol = manufactured("simple")
    model = UniqueContinuationFEM(n=20, n_modes=5)
    with pytest.raises(NotFittedError):
        model.predict(PTS)
    model.fit(sol.q, sol.f)
    pred = model.predict(PTS)
    assert pred.shape == (len(PTS),)
    np.testing.assert_allclose(pred, sol.u(PTS[:, 0], PTS[:, 1]), atol=0.02)
    np.testing.assert_allclose(model.trace(np.array([0.5])), [1.0], atol=0.02)
    with pytest.raises(ValueError):
        model.predict([[1.5, 0.2]])
    with pytest.raises(ValueError):
        model.predict([[0.5, 0.2, 0.1]])


@pytest.mark.parametrize("params", [{"n": 1}, {"n_modes": 0}, {"gamma": -1.0},
                                    {"trace_modes": "spectral"}])
def test_fit_validates(params):
    with pytest.raises(ValueError):
        UniqueContinuationFEM(**params).fit(0.0)


def test_fit_rejects_bad_field():
    with pytest.raises(TypeError):
        UniqueContinuationFEM(n=20).fit("data")


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_cli_run_writes_csv_and_svg(tmp_path, capsys):
    code = cli.main(["run", "--preset", "custom", "--n-list", "20,40,80", "--N", "2",
                     "--out", str(tmp_path), "--dump-matrix"])
    assert code == 0
    rows = read_rows(tmp_path / "custom.csv")
    assert tuple(rows[0]) == CSV_COLUMNS
    assert len(rows) == 4
    for row in rows[1:]:
        assert len(row) == len(CSV_COLUMNS)
        assert "e" in row[CSV_COLUMNS.index("err_h1")]
        assert float(row[CSV_COLUMNS.index("seconds")]) == 0.0
    svg = (tmp_path / "custom.svg").read_text()
    assert svg.startswith("<svg") and "polyline" in svg and "stroke-dasharray" in svg
    assert len(list((tmp_path / "matrices").glob("*.mtx"))) == 3
    assert "fitted rate" in capsys.readouterr().out


def test_cli_timing_column(tmp_path):
    assert cli.main(["run", "--preset", "custom", "--n-list", "20", "--N", "1",
                     "--out", str(tmp_path), "--timing"]) == 0
    rows = read_rows(tmp_path / "custom.csv")
    assert float(rows[1][CSV_COLUMNS.index("seconds")]) > 0


@pytest.mark.parametrize("argv", [
    ["run", "--preset", "fig9"],
    ["run", "--preset", "custom", "--n-list", "40,20"],
    ["run", "--preset", "custom", "--N", "0"],
    ["run", "--preset", "custom", "--gamma", "-1"],
    ["run", "--preset", "custom", "--delta", "-0.1"],
    ["run", "--preset", "fig1", "--solution", "modeN"],
    ["run", "--preset", "custom", "--n-list", "a,b"],
    [],
])
def test_cli_config_errors(argv, tmp_path):
    assert cli.main(argv + (["--out", str(tmp_path)] if argv else [])) == 2


def test_cli_solver_failure(tmp_path, monkeypatch):
    def broken(system, *args, **kwargs):
        raise SolverError("forced", residual=1.0)

    monkeypatch.setattr("ucfem.model.solve", broken)
    code = cli.main(["run", "--preset", "custom", "--n-list", "20", "--out", str(tmp_path)])
    assert code == 3
    rows = read_rows(tmp_path / "custom.csv")
    assert tuple(rows[0]) == CSV_COLUMNS and len(rows) == 1


def test_noise_changes_results(tmp_path):
    clean = run_experiment(make_config("custom", n_list=[20], N=2))
    noisy = run_experiment(make_config("custom", n_list=[20], N=2, delta=1e-2, seed=3))
    assert noisy.records[0].err_h1 != clean.records[0].err_h1


def test_fig4_svg(tmp_path):
    cfg = make_config("fig4", n_list=[20], N=[1, 2], out=tmp_path)
    result = run_experiment(cfg)
    assert len(result.records) == 4
    text = result.svg_path.read_text()
    assert text.count("<polyline") == 2


def test_svg_writer(tmp_path):
    path = write_loglog_svg(tmp_path / "a.svg", [("e <1>", [0.1, 0.05], [1e-2, 5e-3])],
                            "t", "h", "err")
    text = path.read_text()
    assert "e &lt;1&gt;" in text and text.rstrip().endswith("</svg>")
    with pytest.raises(ValueError):
        write_loglog_svg(tmp_path / "b.svg", [], "t", "h", "err")

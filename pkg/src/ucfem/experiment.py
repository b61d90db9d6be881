"""Convergence studies: presets, sweeps over mesh sizes, CSV and SVG output."""
from __future__ import annotations

import csv
import itertools
import logging
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import _validation as val
from .assembly import TRACE_MODES
from .estimator import EstimatorBreakdown, constant_ratio, fit_rate
from .fe_space import error_norms
from .manufactured import SOLUTION_IDS, manufactured
from .model import UniqueContinuationFEM
from .noise import add_noise
from .svg import write_loglog_svg
from .system import eliminate_y_check

logger = logging.getLogger(__name__)

PRESETS = ("fig1", "fig2", "fig3", "fig4", "custom")
DEFAULT_N_LIST = (20, 40, 80, 160)

CSV_COLUMNS = (
    "preset", "solution", "N", "gamma", "n", "h", "err_l2", "err_h1", "est_data",
    "est_jump", "est_trace", "est_residual", "est_total", "ratio_C", "seconds",
)

_PRESET_DEFAULTS = {
    "fig1": dict(solution="simple", N=(5,), gamma=(1.0, 1e-2, 1e-4, 0.0)),
    "fig2": dict(solution="perturbed", N=(1, 2), gamma=(0.0,)),
    "fig3": dict(solution="modeN", N=(1, 2, 3, 4), gamma=(0.0,)),
    "fig4": dict(solution="simple+modeN", N=(1, 2, 3, 4), gamma=(0.0,)),
    "custom": dict(solution="simple", N=(5,), gamma=(0.0,)),
}


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str = "custom"
    n_list: tuple = DEFAULT_N_LIST
    N: tuple = (5,)
    gamma: tuple = (0.0,)
    solution: str = "simple"
    delta: float = 0.0
    seed: int = 0
    out: Path | None = None
    dump_matrix: bool = False
    trace_modes: str = "interpolated"
    timing: bool = False

    def series(self) -> list[tuple[str, int, float]]:
        """``(solution id, N, gamma)`` for every curve of the study, in output order."""
        if self.solution == "simple+modeN":
            return [(sid, N, g) for sid in ("simple", "modeN") for N in self.N for g in self.gamma]
        return [(self.solution, N, g) for N, g in itertools.product(self.N, self.gamma)]


def _as_tuple(value):
    if value is None:
        return None
    if isinstance(value, (list, tuple)):
        return tuple(value)
    return (value,)


def make_config(preset: str = "custom", **overrides) -> ExperimentConfig:
    """Build a validated configuration; ``None`` overrides keep the preset defaults."""
    if preset not in PRESETS:
        raise ValueError(f"unknown preset {preset!r}; expected one of {PRESETS}")
    params = dict(_PRESET_DEFAULTS[preset])
    for key, value in overrides.items():
        if value is None:
            continue
        params[key] = _as_tuple(value) if key in ("N", "gamma", "n_list") else value
    if preset != "custom" and "solution" in overrides and overrides["solution"] is not None \
            and overrides["solution"] != _PRESET_DEFAULTS[preset]["solution"]:
        raise ValueError(f"preset {preset} fixes the solution; use --preset custom")

    cfg = ExperimentConfig(preset=preset, **params)
    if cfg.solution not in SOLUTION_IDS and cfg.solution != "simple+modeN":
        raise ValueError(f"unknown solution {cfg.solution!r}; expected one of {SOLUTION_IDS}")
    if cfg.trace_modes not in TRACE_MODES:
        raise ValueError(f"trace_modes must be one of {TRACE_MODES}")
    n_list = tuple(val.check_mesh_sizes(cfg.n_list))
    N = tuple(val.check_n_modes(v) for v in cfg.N)
    gamma = tuple(val.check_gamma(v) for v in cfg.gamma)
    delta = float(cfg.delta)
    if not np.isfinite(delta) or delta < 0:
        raise ValueError(f"delta must be non-negative, got {cfg.delta}")
    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, (int, np.integer)):
        raise ValueError(f"seed must be an integer, got {cfg.seed!r}")
    out = Path(cfg.out) if cfg.out is not None else None
    return replace(cfg, n_list=n_list, N=N, gamma=gamma, delta=delta, out=out)


@dataclass
class ConvergenceRecord:
    preset: str
    solution: str
    N: int
    gamma: float
    n: int
    h: float
    err_l2: float
    err_h1: float
    estimate: EstimatorBreakdown
    ratio_C: float
    seconds: float
    residual: float = float("nan")
    y_deviation: float = float("nan")
    symmetry_error: float = float("nan")
    condition: float | None = None

    def csv_row(self, timing: bool = True) -> list[str]:
        e = self.estimate
        fmt = "{:.10e}".format
        return [
            self.preset, self.solution, str(self.N), fmt(self.gamma), str(self.n), fmt(self.h),
            fmt(self.err_l2), fmt(self.err_h1), fmt(e.data_term), fmt(e.jump_term),
            fmt(e.trace_term), fmt(e.residual_term), fmt(e.total), fmt(self.ratio_C),
            fmt(self.seconds if timing else 0.0),
        ]


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list = field(default_factory=list)
    csv_path: Path | None = None
    svg_path: Path | None = None

    def curve(self, solution: str, N: int, gamma: float):
        """Records of one curve, sorted by mesh size."""
        rows = [r for r in self.records
                if r.solution == solution and r.N == N and r.gamma == gamma]
        return sorted(rows, key=lambda r: r.n)


def symmetry_error(matrix) -> float:
    diff = abs(matrix - matrix.T)
    scale = abs(matrix).max()
    return float(diff.max() / scale) if scale > 0 else 0.0


def run_case(solution_id: str, N: int, gamma: float, n: int, *, preset: str = "custom",
             delta: float = 0.0, seed: int = 0, trace_modes: str = "interpolated",
             dump_dir: Path | None = None) -> ConvergenceRecord:
    """Solve one configuration on one mesh and evaluate errors and the estimator."""
    exact = manufactured(solution_id, N)
    q = add_noise(exact.q, delta, seed) if delta > 0 else exact.q
    start = time.perf_counter()
    model = UniqueContinuationFEM(n=n, n_modes=N, gamma=gamma, trace_modes=trace_modes)
    model.fit(q, exact.f)
    seconds = time.perf_counter() - start

    if dump_dir is not None:
        dump_dir.mkdir(parents=True, exist_ok=True)
        name = f"{preset}_{exact.name}_N{N}_gamma{gamma:g}_n{n}.mtx"
        model.system_.dump(dump_dir / name)

    err_l2, _, err_h1 = error_norms(exact.u, exact.gradient, model.u_h_)
    return ConvergenceRecord(
        preset=preset,
        solution=exact.name,
        N=N,
        gamma=gamma,
        n=n,
        h=model.h_,
        err_l2=err_l2,
        err_h1=err_h1,
        estimate=model.estimate_,
        ratio_C=constant_ratio(exact, model.u_h_),
        seconds=seconds,
        residual=model.solution_.residual,
        y_deviation=eliminate_y_check(model.solution_, model.scaled_forms_),
        symmetry_error=symmetry_error(model.system_.matrix),
    )


def _write_svg(result: ExperimentResult, path: Path) -> Path:
    cfg = result.config
    if cfg.preset == "fig4":
        series = []
        for sid, label in (("simple", "u = y sin(pi x)"), ("modeN", "u = y sin(N pi x)")):
            xs, ys = [], []
            for N in cfg.N:
                name = "simple" if sid == "simple" else f"mode{N}"
                curve = result.curve(name, N, cfg.gamma[0])
                if curve:
                    xs.append(float(N))
                    ys.append(curve[-1].ratio_C)
            if xs:
                series.append((label, xs, ys))
        return write_loglog_svg(path, series, "fig4: ratio C(u) at the finest mesh",
                                "N", "C(u)", reference_slope=None)
    series = []
    for sid, N, g in cfg.series():
        name = manufactured(sid, N).name
        curve = result.curve(name, N, g)
        if curve:
            label = f"{name}, N={N}, gamma={g:g}"
            series.append((label, [r.h for r in curve], [r.err_h1 for r in curve]))
    return write_loglog_svg(path, series, f"{cfg.preset}: H1 error", "h", "H1 error",
                            reference_slope=1.0)


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run every curve of ``config`` over its mesh sizes.

    When ``config.out`` is set, rows are appended to ``<preset>.csv`` as they
    are computed (so a solver failure leaves a partial file) and the plot is
    written to ``<preset>.svg`` at the end.
    """
    result = ExperimentResult(config)
    out = config.out
    writer = handle = None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        result.csv_path = out / f"{config.preset}.csv"
        handle = open(result.csv_path, "w", newline="", encoding="utf-8")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
    dump_dir = out / "matrices" if (out is not None and config.dump_matrix) else None
    try:
        for sid, N, g in config.series():
            for n in config.n_list:
                rec = run_case(sid, N, g, n, preset=config.preset, delta=config.delta,
                               seed=config.seed, trace_modes=config.trace_modes,
                               dump_dir=dump_dir)
                logger.info("%s %s N=%d gamma=%g n=%d: H1 error %.4e, estimator %.4e (%.2fs)",
                            config.preset, rec.solution, N, g, n, rec.err_h1,
                            rec.estimate.total, rec.seconds)
                result.records.append(rec)
                if writer is not None:
                    writer.writerow(rec.csv_row(config.timing))
                    handle.flush()
    finally:
        if handle is not None:
            handle.close()
    if out is not None:
        result.svg_path = _write_svg(result, out / f"{config.preset}.svg")
    return result


def fit_rate_table(result: ExperimentResult) -> list[str]:
    """One summary line per curve with its fitted H1 rate."""
    lines = []
    seen = []
    for rec in result.records:
        key = (rec.solution, rec.N, rec.gamma)
        if key not in seen:
            seen.append(key)
    for solution, N, g in seen:
        curve = result.curve(solution, N, g)
        pairs = [(r.h, r.err_h1) for r in curve]
        rate = fit_rate(pairs) if len(pairs) >= 3 else float("nan")
        lines.append(f"{solution:>10s} N={N} gamma={g:<8g} finest H1 error {curve[-1].err_h1:.4e}"
                     f"  C(u) {curve[-1].ratio_C:.4f}  fitted rate {rate:.3f}")
    return lines

"""Monte Carlo experiment runner and timing harness.

Sweeps (channel model, estimator, activation stride, SNR) cells over seeded
trials, scoring reconstruction error, credible-interval calibration and
spectral efficiency, and writes `results.csv` / `summary.json` / `meta.json`
(plus an optional `errors.csv` with raw per-entry errors for scatter plots).

Runs are deterministic for a fixed config: every trial derives its generator
from the master seed and a counter (see `seeding`), learned-kernel
hyperparameters are fitted once per (stride, SNR) cell on the first trial and
reused, and rows are sorted before writing. Wall-clock columns are the only
nondeterministic output. Per-row `wall_time_ms` measures the marginal
per-trial estimator cost; one-off setup work (Gram factorization, fits) is
shared across trials and reported by `timing_scan` instead.
"""

import csv
import json
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .covariance import (
    GridShape,
    kronecker_covariance,
    side_correlation,
    weichselberger_covariance,
)
from .estimators import ls_estimate, mixing_matrix
from .gpr import ComplexGPR, fit_hyperparameters
from .kernels import SpatialCovarianceKernel, make_kernel
from .linalg import chol_solve, cholesky_with_jitter
from .metrics import (
    ellipse_from_cov,
    interval_coverage,
    nmse_db,
    spectral_efficiency,
)
from .seeding import rng_from, standard_complex_normal, substream_seed
from .sounding import full_pilot_matrix, make_plan, observe, split_grid

SCHEMA_VERSION = 1

RESULT_COLUMNS = [
    "schema_version",
    "model",
    "estimator",
    "delta",
    "pilot_len",
    "snr_db",
    "trial",
    "nmse_db",
    "se_true",
    "se_est",
    "relative_se",
    "coverage",
    "area95",
    "axis_ratio",
    "wall_time_ms",
    "jitter_used",
    "error",
]

ERROR_COLUMNS = ["model", "estimator", "delta", "snr_db", "trial", "re_err", "im_err"]

#: estimator name -> kernel family for the GP-based estimators
GPR_FAMILIES = {
    "SC_GPR": "SC",
    "RBF_GPR": "RBF",
    "MATERN_GPR": "MATERN15",
    "RQ_GPR": "RQ",
}
FULL_PILOT_ESTIMATORS = ("LS", "MMSE_FULL")
ESTIMATOR_CHOICES = tuple(GPR_FAMILIES) + FULL_PILOT_ESTIMATORS

#: substream tag for the coupling-matrix draw (outside the trial counter space)
_COUPLING_TAG = 0xC0FFEE
#: trial counters live at (1 << 48) | (snr_index << 32) | trial
_TRIAL_BASE = 1 << 48


@dataclass
class FitSettings:
    """Budget and overrides for marginal-likelihood hyperparameter fits."""

    max_iters: int = 50
    restart: bool = True
    init: dict = field(default_factory=dict)  # per-family parameter overrides
    bounds: dict = field(default_factory=dict)


@dataclass
class ExperimentConfig:
    n_rx: int = 36
    n_tx: int = 36
    model: str = "weichselberger"
    strides: tuple = (2, 3, 4)
    snr_db: tuple = (-10.0, -5.0, 0.0, 5.0, 10.0, 15.0, 20.0)
    trials: int = 200
    estimators: tuple = ESTIMATOR_CHOICES
    seed: int = 12345
    fit: FitSettings = field(default_factory=FitSettings)
    output_dir: str = "results"
    dump_errors: bool = False
    dump_error_trials: int = 2
    # covariance construction: uniform angular window per side
    spacing_wl: float = 0.5
    spread_rad: float = np.pi / 6
    mean_angle_rad: float = 1.2

    def __post_init__(self):
        self.model = self.model.lower()
        if self.model not in ("kronecker", "weichselberger"):
            raise ValueError(f"unknown channel model {self.model!r}")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        self.strides = tuple(int(s) for s in self.strides)
        if any(s < 1 or s > self.n_tx for s in self.strides):
            raise ValueError("strides must lie in 1..n_tx")
        self.snr_db = tuple(float(s) for s in self.snr_db)
        self.estimators = tuple(self.estimators)
        unknown = set(self.estimators) - set(ESTIMATOR_CHOICES)
        if unknown:
            raise ValueError(f"unknown estimators: {sorted(unknown)}")
        if isinstance(self.fit, dict):
            self.fit = FitSettings(**self.fit)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)

    @classmethod
    def from_json(cls, path):
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self):
        data = asdict(self)
        data["strides"] = list(self.strides)
        data["snr_db"] = list(self.snr_db)
        data["estimators"] = list(self.estimators)
        return data

    @property
    def shape(self):
        return GridShape(self.n_rx, self.n_tx)


def build_covariance(cfg):
    """Channel covariance for the configured model.

    Both models share the per-side angular-window correlations. The
    joint-eigenbasis model couples the side eigenbases through a power
    matrix: the separable per-mode powers modulated entrywise by seeded
    i.i.d. unit-rate exponential draws, then renormalized to a unit diagonal.
    The exponential modulation makes the covariance non-separable while the
    mode-power weighting keeps the spatial-correlation strength of the
    underlying array geometry.
    """
    side_tx = side_correlation(cfg.n_tx, cfg.spacing_wl, cfg.mean_angle_rad, cfg.spread_rad)
    side_rx = side_correlation(cfg.n_rx, cfg.spacing_wl, cfg.mean_angle_rad, cfg.spread_rad)
    if cfg.model == "kronecker":
        return kronecker_covariance(side_tx, side_rx)
    lam_tx, u_tx = np.linalg.eigh(side_tx)
    lam_rx, u_rx = np.linalg.eigh(side_rx)
    rng = rng_from(substream_seed(cfg.seed, _COUPLING_TAG))
    modulation = rng.exponential(size=(cfg.n_rx, cfg.n_tx))
    coupling = np.outer(np.clip(lam_rx, 0.0, None), np.clip(lam_tx, 0.0, None)) * modulation
    return weichselberger_covariance(u_tx, u_rx, coupling)


@dataclass
class _CellStats:
    """Streaming accumulator for one (model, estimator, delta, snr) cell."""

    n_err: int = 0
    s_re: float = 0.0
    s_im: float = 0.0
    s_rere: float = 0.0
    s_imim: float = 0.0
    s_reim: float = 0.0
    coverage_sum: float = 0.0
    coverage_trials: int = 0
    nmse_linear: list = field(default_factory=list)
    nmse_db_vals: list = field(default_factory=list)
    se_true: list = field(default_factory=list)
    se_est: list = field(default_factory=list)
    relative_se: list = field(default_factory=list)
    wall_ms: list = field(default_factory=list)
    jitter: float = 0.0
    errors: int = 0

    def add_errors(self, err):
        re, im = np.real(err).ravel(), np.imag(err).ravel()
        self.n_err += len(re)
        self.s_re += float(re.sum())
        self.s_im += float(im.sum())
        self.s_rere += float((re * re).sum())
        self.s_imim += float((im * im).sum())
        self.s_reim += float((re * im).sum())

    def pooled_cov(self):
        n = self.n_err
        if n < 2:
            return np.zeros((2, 2))
        mre, mim = self.s_re / n, self.s_im / n
        c_rr = (self.s_rere - n * mre * mre) / (n - 1)
        c_ii = (self.s_imim - n * mim * mim) / (n - 1)
        c_ri = (self.s_reim - n * mre * mim) / (n - 1)
        return np.array([[c_rr, c_ri], [c_ri, c_ii]])


def _mean_ci(values):
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if len(values) == 0:
        return None, None
    mean = float(values.mean())
    if len(values) < 2:
        return mean, 0.0
    half = 1.959963984540054 * float(values.std(ddof=1)) / np.sqrt(len(values))
    return mean, half


class _GprCell:
    """Precomputed linear read-out of one GP estimator on one sounding plan."""

    def __init__(self, estimator, cov, plan, train0, noise_var, fit_cfg):
        family = GPR_FAMILIES[estimator]
        self.fit_iterations = 0
        if family == "SC":
            kernel = SpatialCovarianceKernel(cov)
        else:
            report = fit_hyperparameters(
                family,
                train0,
                init=fit_cfg.init.get(family),
                bounds=fit_cfg.bounds.get(family),
                max_iters=fit_cfg.max_iters,
                restart=fit_cfg.restart,
                # stable per-family restart stream (hash() is salted per process)
                seed=substream_seed(0, int.from_bytes(family.encode(), "little")),
            )
            kernel = report.kernel
            self.fit_iterations = report.iterations
        model = ComplexGPR(kernel, noise_var=noise_var)
        model.fit(train0.inputs, train0.values)
        shape = plan.shape
        grid, _ = split_grid(shape, np.arange(shape.n_tx))
        weights, var = model.prediction_operator(grid)
        self.weights = weights
        self.var_map = var.reshape(shape.n_rx, shape.n_tx, order="F")
        self.jitter = model.jitter_
        self.shape = shape

    def estimate(self, train_values):
        mean = self.weights.conj().T @ train_values
        return mean.reshape(self.shape.n_rx, self.shape.n_tx, order="F")


class _MmseFullCell:
    """Precomputed full-pilot linear MMSE read-out for one SNR."""

    def __init__(self, cov, pilots, noise_var):
        a = mixing_matrix(pilots, cov.shape.n_rx)
        ar = a @ cov.matrix
        system = ar @ a.conj().T + noise_var * np.eye(a.shape[0])
        lower, self.jitter = cholesky_with_jitter(0.5 * (system + system.conj().T))
        self.weights = chol_solve(lower, ar)  # u_hat = weights^H y
        self.shape = cov.shape

    def estimate(self, y_block):
        u_hat = self.weights.conj().T @ y_block.flatten(order="F")
        return u_hat.reshape(self.shape.n_rx, self.shape.n_tx, order="F")


def run_experiment(cfg, progress=None):
    """Run the configured Monte Carlo sweep and write all output files.

    Parameters
    ----------
    cfg : ExperimentConfig
    progress : callable, optional
        Called with a one-line status string per completed SNR block.

    Returns
    -------
    dict with the output paths and the summary payload.
    """
    out_dir = Path(cfg.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    results_path = out_dir / "results.csv"
    summary_path = out_dir / "summary.json"
    meta_path = out_dir / "meta.json"
    errors_path = out_dir / "errors.csv"

    cov = build_covariance(cfg)
    plans = {d: make_plan(cfg.shape, d) for d in sorted(set(cfg.strides))}
    pilots_full = full_pilot_matrix(cfg.n_tx)
    gpr_estimators = [e for e in cfg.estimators if e in GPR_FAMILIES]
    cells = {}

    error_writer = None
    error_fh = None
    if cfg.dump_errors:
        error_fh = open(errors_path, "w", newline="", encoding="utf-8")
        error_writer = csv.writer(error_fh)
        error_writer.writerow(ERROR_COLUMNS)

    with open(results_path, "w", newline="", encoding="utf-8") as results_fh:
        writer = csv.writer(results_fh)
        writer.writerow(RESULT_COLUMNS)

        for snr_idx, snr in enumerate(cfg.snr_db):
            noise_var = 10.0 ** (-snr / 10.0)
            rho = 10.0 ** (snr / 10.0)
            block_rows = []

            # one-off per-cell setup: fits and factorizations reused by all trials
            operators = {}
            trial0_rng = rng_from(substream_seed(cfg.seed, _TRIAL_BASE | (snr_idx << 32)))
            from .covariance import sample_channel

            h0 = sample_channel(cov, trial0_rng)
            for delta, plan in plans.items():
                train0, _ = observe(h0, plan, noise_var, trial0_rng)
                for estimator in gpr_estimators:
                    operators[(estimator, delta)] = _GprCell(
                        estimator, cov, plan, train0, noise_var, cfg.fit
                    )
            mmse_cell = (
                _MmseFullCell(cov, pilots_full, noise_var)
                if "MMSE_FULL" in cfg.estimators
                else None
            )

            for trial in range(cfg.trials):
                counter = _TRIAL_BASE | (snr_idx << 32) | trial
                rng = rng_from(substream_seed(cfg.seed, counter))
                h_true = sample_channel(cov, rng)
                trains = {d: observe(h_true, plans[d], noise_var, rng)[0] for d in plans}
                # full-pilot received block (drawn even if unused: keeps the
                # stream layout independent of the estimator subset)
                noise_block = standard_complex_normal(rng, (cfg.n_rx, cfg.n_tx))
                y_full = h_true @ pilots_full + np.sqrt(noise_var) * noise_block

                for estimator in cfg.estimators:
                    deltas = sorted(plans) if estimator in GPR_FAMILIES else [None]
                    for delta in deltas:
                        row = {
                            "schema_version": SCHEMA_VERSION,
                            "model": cfg.model,
                            "estimator": estimator,
                            "delta": "" if delta is None else delta,
                            "pilot_len": cfg.n_tx if delta is None else plans[delta].pilot_len,
                            "snr_db": snr,
                            "trial": trial,
                        }
                        key = (estimator, delta)
                        stats = cells.setdefault(
                            (cfg.model, estimator, delta, snr), _CellStats()
                        )
                        try:
                            start = time.perf_counter()
                            var_map = None
                            jitter = 0.0
                            if estimator in GPR_FAMILIES:
                                cell = operators[key]
                                h_hat = cell.estimate(trains[delta].values)
                                var_map = cell.var_map
                                jitter = cell.jitter
                            elif estimator == "LS":
                                h_hat = ls_estimate(y_full, pilots_full)
                            else:  # MMSE_FULL
                                h_hat = mmse_cell.estimate(y_full)
                                jitter = mmse_cell.jitter
                            wall_ms = (time.perf_counter() - start) * 1e3
                            _score(row, stats, h_true, h_hat, var_map, rho, wall_ms, jitter)
                            if (
                                error_writer is not None
                                and trial < cfg.dump_error_trials
                            ):
                                err = (h_true - h_hat).ravel()
                                for e in err:
                                    error_writer.writerow(
                                        [
                                            cfg.model,
                                            estimator,
                                            row["delta"],
                                            snr,
                                            trial,
                                            float(np.real(e)),
                                            float(np.imag(e)),
                                        ]
                                    )
                        except Exception as exc:  # failures recorded, run continues
                            row["error"] = f"{type(exc).__name__}: {exc}"
                            stats.errors += 1
                        block_rows.append(row)

            block_rows.sort(
                key=lambda r: (r["estimator"], str(r["delta"]), r["trial"])
            )
            for row in block_rows:
                writer.writerow([_format_field(row.get(col, "")) for col in RESULT_COLUMNS])
            results_fh.flush()
            if progress is not None:
                progress(f"snr {snr:+.1f} dB done ({cfg.trials} trials)")

    if error_fh is not None:
        error_fh.close()

    summary = _summarize(cfg, cells, plans)
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    meta = {
        "package": "gpmimo",
        "version": __version__,
        "schema_version": SCHEMA_VERSION,
        "config": cfg.to_dict(),
    }
    with open(meta_path, "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")

    return {
        "results": results_path,
        "summary": summary_path,
        "meta": meta_path,
        "errors": errors_path if cfg.dump_errors else None,
        "summary_data": summary,
    }


def _score(row, stats, h_true, h_hat, var_map, rho, wall_ms, jitter):
    err = h_true - h_hat
    value_db = nmse_db(h_true, h_hat)
    linear = float(np.sum(np.abs(err) ** 2) / np.sum(np.abs(h_true) ** 2))
    link = spectral_efficiency(h_true, h_hat, rho)
    cov2 = np.cov(np.stack([np.real(err).ravel(), np.imag(err).ravel()]), ddof=1)
    area95, axis_ratio = ellipse_from_cov(cov2)
    coverage = (
        interval_coverage(err.ravel(), var_map.ravel()) if var_map is not None else np.nan
    )

    row.update(
        nmse_db=value_db,
        se_true=link.se_true,
        se_est=link.se_est,
        relative_se=link.relative_se,
        coverage=coverage,
        area95=area95,
        axis_ratio=axis_ratio,
        wall_time_ms=wall_ms,
        jitter_used=jitter,
        error="",
    )

    stats.add_errors(err)
    stats.nmse_linear.append(linear)
    stats.nmse_db_vals.append(value_db)
    stats.se_true.append(link.se_true)
    stats.se_est.append(link.se_est)
    stats.relative_se.append(link.relative_se)
    stats.wall_ms.append(wall_ms)
    stats.jitter = max(stats.jitter, jitter)
    if var_map is not None:
        stats.coverage_sum += coverage
        stats.coverage_trials += 1


def _format_field(value):
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if np.isnan(value):
            return ""
        return repr(value) if np.isfinite(value) else str(value)
    return value


def _summarize(cfg, cells, plans):
    cell_list = []
    for (model, estimator, delta, snr), stats in sorted(
        cells.items(), key=lambda kv: (kv[0][0], kv[0][3], kv[0][1], str(kv[0][2]))
    ):
        pooled = stats.pooled_cov()
        area95, axis_ratio = ellipse_from_cov(pooled)
        nmse_mean_db, nmse_ci = _mean_ci(stats.nmse_db_vals)
        se_est_mean, se_est_ci = _mean_ci(stats.se_est)
        rel_mean, rel_ci = _mean_ci(stats.relative_se)
        mean_linear = float(np.mean(stats.nmse_linear)) if stats.nmse_linear else None
        pilot_len = cfg.n_tx if delta is None else plans[delta].pilot_len
        cell_list.append(
            {
                "model": model,
                "estimator": estimator,
                "delta": delta,
                "pilot_len": pilot_len,
                "pilot_saving_pct": 100.0 * (1.0 - pilot_len / cfg.n_tx),
                "snr_db": snr,
                "trials": len(stats.nmse_linear),
                "failed_trials": stats.errors,
                "nmse_db": (
                    10.0 * np.log10(mean_linear)
                    if mean_linear not in (None, 0.0)
                    else (-np.inf if mean_linear == 0.0 else None)
                ),
                "nmse_db_trial_mean": nmse_mean_db,
                "nmse_db_trial_ci95": nmse_ci,
                "se_true_mean": _mean_ci(stats.se_true)[0],
                "se_est_mean": se_est_mean,
                "se_est_ci95": se_est_ci,
                "relative_se_mean": rel_mean,
                "relative_se_ci95": rel_ci,
                "coverage": (
                    stats.coverage_sum / stats.coverage_trials
                    if stats.coverage_trials
                    else None
                ),
                "area95": area95,
                "axis_ratio": None if not np.isfinite(axis_ratio) else axis_ratio,
                "err_cov": [
                    [pooled[0, 0], pooled[0, 1]],
                    [pooled[1, 0], pooled[1, 1]],
                ],
                "n_error_samples": stats.n_err,
                "wall_time_ms_median": (
                    float(np.median(stats.wall_ms)) if stats.wall_ms else None
                ),
                "jitter_used": stats.jitter,
            }
        )
    return {"schema_version": SCHEMA_VERSION, "cells": cell_list}


def timing_scan(sizes, stride=2, reps=5, snr_db=0.0, seed=777,
                learned_grid=36, learned_stride=4, learned_iters=20,
                spacing_wl=0.5, spread_rad=np.pi / 6, mean_angle_rad=1.2):
    """Empirical wall-time scaling of the estimators across grid sizes.

    For each square grid size the covariance-indexed GP estimator (Gram
    assembly + factorization + full-grid posterior mean) and least squares
    are timed over ``reps`` repetitions. A learned-kernel GP (budgeted
    marginal-likelihood fit plus posterior) is timed once at the designated
    grid for the cost comparison against the hyperparameter-free estimator.

    Returns
    -------
    dict with per-size medians, fitted log-log slopes and the learned-kernel
    comparison.
    """
    sizes = sorted(int(s) for s in sizes)
    if len(sizes) < 3:
        raise ValueError("timing scan needs at least 3 grid sizes")

    def _setup(n, plan_stride):
        shape = GridShape(n, n)
        side = side_correlation(n, spacing_wl, mean_angle_rad, spread_rad)
        cov = kronecker_covariance(side, side)
        plan = make_plan(shape, plan_stride)
        from .covariance import sample_channel

        noise_var = 10.0 ** (-snr_db / 10.0)
        rng = rng_from(substream_seed(seed, n))
        h = sample_channel(cov, rng)
        train, _ = observe(h, plan, noise_var, rng)
        grid, _ = split_grid(shape, np.arange(n))
        return cov, plan, train, grid, noise_var, h, rng

    rows = []
    for n in sizes:
        cov, plan, train, grid, noise_var, h, rng = _setup(n, stride)
        p = len(train)

        sc_times = []
        for _ in range(reps):
            start = time.perf_counter()
            model = ComplexGPR(SpatialCovarianceKernel(cov), noise_var=noise_var)
            model.fit(train.inputs, train.values)
            model.predict(grid)
            sc_times.append((time.perf_counter() - start) * 1e3)
        rows.append({"estimator": "SC_GPR", "grid": n, "P": p,
                     "median_ms": float(np.median(sc_times))})

        pilots = full_pilot_matrix(n)
        y_full = h @ pilots + np.sqrt(noise_var) * standard_complex_normal(rng, (n, n))
        ls_times = []
        for _ in range(reps):
            start = time.perf_counter()
            ls_estimate(y_full, pilots)
            ls_times.append((time.perf_counter() - start) * 1e3)
        rows.append({"estimator": "LS", "grid": n, "P": n * n,
                     "median_ms": float(np.median(ls_times))})

    slopes = {}
    for estimator in ("SC_GPR", "LS"):
        pts = [(r["P"], r["median_ms"]) for r in rows if r["estimator"] == estimator]
        logs = np.log([p for p, _ in pts]), np.log([t for _, t in pts])
        slopes[estimator] = float(np.polyfit(logs[0], logs[1], 1)[0])

    cov, plan, train, grid, noise_var, _, _ = _setup(learned_grid, learned_stride)
    start = time.perf_counter()
    model = ComplexGPR(SpatialCovarianceKernel(cov), noise_var=noise_var)
    model.fit(train.inputs, train.values)
    model.predict(grid)
    sc_ms = (time.perf_counter() - start) * 1e3
    start = time.perf_counter()
    report = fit_hyperparameters("RBF", train, max_iters=learned_iters, restart=False)
    learned = ComplexGPR(report.kernel, noise_var=noise_var)
    learned.fit(train.inputs, train.values)
    learned.predict(grid)
    rbf_ms = (time.perf_counter() - start) * 1e3

    return {
        "rows": rows,
        "slopes": slopes,
        "learned": {
            "grid": learned_grid,
            "P": len(train),
            "iters": learned_iters,
            "rbf_ms": rbf_ms,
            "sc_ms": sc_ms,
            "ratio": rbf_ms / sc_ms,
        },
    }

"""Estimation-quality and link-level metrics.

Covers normalized mean-square error in dB, 95% credible-ellipse statistics of
complex error clouds (area, axis ratio, interval coverage), and spectral
efficiency of a multi-stream link with a linear MMSE detector built from the
channel estimate.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import chol_solve, cholesky_with_jitter

#: chi-square(2) quantile at 0.95; scales the empirical error covariance to
#: the 95% ellipse
CHI2_2_095 = 5.991464547107979

#: two-sided 95% gaussian quantile for per-component credible intervals
Z_95 = 1.959963984540054


@dataclass
class EllipseStats:
    """95% credible-ellipse summary of a complex error cloud."""

    area95: float
    axis_ratio: float
    coverage: float


@dataclass
class LinkReport:
    """Spectral efficiency of one channel realization under estimated CSI."""

    se_true: float
    se_est: float
    relative_se: float
    sinr: np.ndarray


def nmse_db(h_true, h_est):
    """Normalized MSE ``|H - H_hat|_F^2 / |H|_F^2`` in dB (-inf for exact)."""
    h_true = np.asarray(h_true)
    h_est = np.asarray(h_est)
    if h_true.shape != h_est.shape:
        raise ValueError("true and estimated channels disagree in shape")
    denom = float(np.sum(np.abs(h_true) ** 2))
    if denom == 0.0:
        raise ValueError("true channel has zero energy")
    num = float(np.sum(np.abs(h_true - h_est) ** 2))
    if num == 0.0:
        return -np.inf
    return 10.0 * np.log10(num / denom)


def error_covariance_2d(errors, ddof=1):
    """Empirical 2x2 covariance of (Re e, Im e), mean subtracted."""
    errors = np.asarray(errors).ravel()
    stacked = np.stack([np.real(errors), np.imag(errors)])
    return np.cov(stacked, ddof=ddof) if len(errors) > 1 else np.zeros((2, 2))


def ellipse_from_cov(cov2):
    """(area95, axis_ratio) of the 95% ellipse of a 2x2 covariance."""
    cov2 = np.asarray(cov2, dtype=float)
    det = float(np.linalg.det(cov2))
    area95 = float(np.pi * CHI2_2_095 * np.sqrt(max(det, 0.0)))
    lam = np.linalg.eigvalsh(cov2)
    axis_ratio = float(np.sqrt(lam[1] / lam[0])) if lam[0] > 0.0 else np.inf
    return area95, axis_ratio


def interval_coverage(errors, post_var):
    """Fraction of per-component errors within +-1.96 posterior stddevs.

    Each entry's total complex variance splits evenly between the real and
    imaginary components (properness), so the per-component deviation is
    ``sqrt(post_var / 2)``. The real and imaginary indicators are averaged
    together.
    """
    errors = np.asarray(errors).ravel()
    post_var = np.asarray(post_var, dtype=float).ravel()
    if len(errors) != len(post_var):
        raise ValueError("errors and posterior variances disagree in length")
    if np.any(post_var < 0.0):
        raise ValueError("posterior variances must be nonnegative")
    sigma = np.sqrt(post_var / 2.0)
    hit_re = np.abs(np.real(errors)) <= Z_95 * sigma
    hit_im = np.abs(np.imag(errors)) <= Z_95 * sigma
    return float((np.mean(hit_re) + np.mean(hit_im)) / 2.0)


def ellipse_stats(errors, post_var=None):
    """Credible-ellipse statistics of a complex error cloud.

    Parameters
    ----------
    errors : array-like
        Complex per-entry estimation errors (any shape, flattened).
    post_var : array-like, optional
        Matching total posterior variances; when omitted (estimators without
        calibrated uncertainty) the coverage is reported as NaN.

    Returns
    -------
    EllipseStats
    """
    errors = np.asarray(errors).ravel()
    if len(errors) == 0:
        raise ValueError("needs at least one error sample")
    area95, axis_ratio = ellipse_from_cov(error_covariance_2d(errors))
    coverage = np.nan if post_var is None else interval_coverage(errors, post_var)
    return EllipseStats(area95=area95, axis_ratio=axis_ratio, coverage=coverage)


def lmmse_detector(h_est, snr):
    """Linear MMSE receive filter ``(H H^H + (n_tx/snr) I)^{-1} H``."""
    h_est = np.asarray(h_est, dtype=complex)
    if snr <= 0:
        raise ValueError("snr must be positive")
    n_rx, n_tx = h_est.shape
    system = h_est @ h_est.conj().T + (n_tx / snr) * np.eye(n_rx)
    lower, _ = cholesky_with_jitter(0.5 * (system + system.conj().T))
    return chol_solve(lower, h_est)


def sinr_per_stream(h_true, detector, snr):
    """Post-equalization SINR of each spatial stream.

    The detector may come from an imperfect channel estimate; the signal and
    interference terms always use the true channel columns.
    """
    h_true = np.asarray(h_true, dtype=complex)
    n_tx = h_true.shape[1]
    cross = detector.conj().T @ h_true  # (k, j): response of stream j in branch k
    signal = np.abs(np.diag(cross)) ** 2
    interference = np.sum(np.abs(cross) ** 2, axis=1) - signal
    noise = (n_tx / snr) * np.sum(np.abs(detector) ** 2, axis=0)
    denom = interference + noise
    # an all-zero detector column carries no stream: SINR 0, not 0/0
    out = np.zeros_like(signal)
    live = denom > 0.0
    out[live] = signal[live] / denom[live]
    return out


def spectral_efficiency(h_true, h_est, snr):
    """Sum spectral efficiency under a detector built from the estimate.

    Parameters
    ----------
    h_true : ndarray
        True channel (used in the SINR terms).
    h_est : ndarray
        Channel estimate (enters only through the detector).
    snr : float
        Transmit SNR (linear).

    Returns
    -------
    LinkReport
        ``se_true`` uses the perfect-CSI detector, ``se_est`` the estimated
        one; ``relative_se = se_est / se_true``.
    """
    h_true = np.asarray(h_true, dtype=complex)
    h_est = np.asarray(h_est, dtype=complex)
    if h_true.shape != h_est.shape:
        raise ValueError("true and estimated channels disagree in shape")
    sinr_est = sinr_per_stream(h_true, lmmse_detector(h_est, snr), snr)
    sinr_true = sinr_per_stream(h_true, lmmse_detector(h_true, snr), snr)
    se_est = float(np.sum(np.log2(1.0 + sinr_est)))
    se_true = float(np.sum(np.log2(1.0 + sinr_true)))
    relative = se_est / se_true if se_true > 0 else np.nan
    return LinkReport(se_true=se_true, se_est=se_est, relative_se=relative, sinr=sinr_est)

"""Classical channel estimators: least squares and linear MMSE.

The least-squares and full-pilot MMSE estimators operate on the raw received
pilot block; the subsampled MMSE estimator operates on de-spread per-entry
observations selected by grid indices and also returns its error covariance.
All solves go through the shared Cholesky/jitter helpers.
"""

from dataclasses import dataclass

import numpy as np

from .linalg import chol_solve, cholesky_with_jitter


@dataclass(frozen=True)
class Observation:
    """De-spread observations of selected entries of the vectorized channel.

    ``indices`` are the rows of the implicit 0/1 selector: observation ``p``
    measures entry ``indices[p]`` of the column-major vectorized channel.
    """

    y: np.ndarray
    indices: np.ndarray
    noise_var: float

    def __post_init__(self):
        if len(self.y) != len(self.indices):
            raise ValueError("observations and selector indices disagree in length")
        if self.noise_var < 0:
            raise ValueError("noise variance must be nonnegative")


def selector_matrix(indices, n):
    """Explicit ``P x n`` 0/1 selector with canonical rows (for oracles)."""
    indices = np.asarray(indices, dtype=int)
    b = np.zeros((len(indices), n), dtype=complex)
    b[np.arange(len(indices)), indices] = 1.0
    return b


def ls_estimate(y_rx, pilots):
    """Least-squares channel estimate from a received pilot block.

    ``h_ls = Y S^H (S S^H)^{-1}`` for received block ``Y`` and pilot matrix
    ``S`` (one row per transmitting antenna).

    Parameters
    ----------
    y_rx : ndarray
        ``n_rx x T`` received block.
    pilots : ndarray
        ``n x T`` pilot matrix with full row rank.

    Returns
    -------
    ndarray
        ``n_rx x n`` estimate.
    """
    y_rx = np.asarray(y_rx, dtype=complex)
    pilots = np.asarray(pilots, dtype=complex)
    if y_rx.shape[1] != pilots.shape[1]:
        raise ValueError("received block and pilots disagree in slot count")
    if pilots.shape[0] > pilots.shape[1]:
        raise ValueError("pilot matrix has more rows than slots")
    gram = pilots @ pilots.conj().T
    if np.linalg.matrix_rank(gram) < gram.shape[0]:
        raise ValueError("pilot matrix is rank deficient")
    # h = (Y S^H) G^{-1}  via a Hermitian solve on the right
    return np.linalg.solve(gram.T, (y_rx @ pilots.conj().T).T).T


def mixing_matrix(pilots, n_rx):
    """Vectorized-model mixing matrix ``A = X^T (x) I`` of a pilot block."""
    return np.kron(np.asarray(pilots, dtype=complex).T, np.eye(n_rx))


def mmse_full(y, pilots, cov, noise_var):
    """Linear MMSE estimate from the vectorized received pilot block.

    ``u_hat = R A^H (A R A^H + noise_var I)^{-1} y`` with
    ``A = pilots^T (x) I`` and ``y = vec(Y)`` column-major.

    Parameters
    ----------
    y : ndarray
        Vectorized received block, length ``T * n_rx``.
    pilots : ndarray
        ``n_tx x T`` transmitted pilot matrix (the full transmit block).
    cov : ChannelCovariance
    noise_var : float

    Returns
    -------
    ndarray
        ``n_rx x n_tx`` estimate.
    """
    y = np.asarray(y, dtype=complex).ravel()
    shape = cov.shape
    a = mixing_matrix(pilots, shape.n_rx)
    if a.shape != (len(y), shape.n_entries):
        raise ValueError(
            f"mixing matrix is {a.shape}, expected ({len(y)}, {shape.n_entries})"
        )
    ar = a @ cov.matrix
    system = ar @ a.conj().T + noise_var * np.eye(len(y))
    system = 0.5 * (system + system.conj().T)
    lower, _ = cholesky_with_jitter(system)
    u_hat = ar.conj().T @ chol_solve(lower, y)
    return u_hat.reshape(shape.n_rx, shape.n_tx, order="F")


def mmse_subsampled(obs, cov, return_error_cov=True):
    """Linear MMSE estimate of the full vectorized channel from selected entries.

    ``u_hat = R B^H (B R B^H + noise_var I)^{-1} y`` with error covariance
    ``C = R - R B^H (B R B^H + noise_var I)^{-1} B R`` for the 0/1 selector
    ``B`` encoded by ``obs.indices``.

    Parameters
    ----------
    obs : Observation
    cov : ChannelCovariance
    return_error_cov : bool
        Skip the (dense) error covariance when only the estimate is needed.

    Returns
    -------
    (u_hat, error_cov) : (ndarray, ndarray or None)
    """
    r = cov.matrix
    idx = np.asarray(obs.indices, dtype=int)
    if idx.min(initial=0) < 0 or (len(idx) and idx.max() >= cov.shape.n_entries):
        raise ValueError("selector indices fall outside the vectorized grid")
    k = r[np.ix_(idx, idx)] + obs.noise_var * np.eye(len(idx))
    scale = float(np.real(np.trace(r[np.ix_(idx, idx)]))) / max(len(idx), 1)
    lower, _ = cholesky_with_jitter(k, scale=scale if scale > 0 else None)
    r_cols = r[:, idx]
    u_hat = r_cols @ chol_solve(lower, np.asarray(obs.y, dtype=complex))
    if not return_error_cov:
        return u_hat, None
    error_cov = r - r_cols @ chol_solve(lower, r_cols.conj().T)
    error_cov = 0.5 * (error_cov + error_cov.conj().T)
    return u_hat, error_cov

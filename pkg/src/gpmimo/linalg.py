"""Hermitian solves via Cholesky with a shared diagonal-jitter ladder.

All linear systems in the package are positive (semi)definite and are solved
through these helpers; no explicit matrix inverses. When a factorization
fails, a small diagonal jitter proportional to the mean diagonal is added and
escalated tenfold up to a hard cap, after which the system is declared
ill-conditioned.
"""

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

JITTER_START_FRACTION = 1e-12
JITTER_MAX_FRACTION = 1e-6


class IllConditionedKernelError(np.linalg.LinAlgError):
    """Hermitian system could not be factorized even at maximum jitter."""


def cholesky_with_jitter(mat, scale=None):
    """Lower-triangular Cholesky factor of ``mat`` plus escalating jitter.

    Parameters
    ----------
    mat : ndarray
        Hermitian positive (semi)definite matrix.
    scale : float, optional
        Reference for jitter sizing; defaults to the mean diagonal of ``mat``.

    Returns
    -------
    (lower, jitter) : (ndarray, float)
        Factor of ``mat + jitter * I`` and the jitter actually used.
    """
    n = mat.shape[0]
    if scale is None:
        scale = float(np.real(np.trace(mat))) / max(n, 1)
    jitter = 0.0
    eye = None
    while True:
        try:
            shifted = mat if jitter == 0.0 else mat + jitter * eye
            return np.linalg.cholesky(shifted), jitter
        except np.linalg.LinAlgError:
            if scale <= 0.0:
                raise IllConditionedKernelError(
                    "matrix is not positive definite and has a nonpositive "
                    "diagonal scale; jitter cannot help"
                ) from None
            if eye is None:
                eye = np.eye(n, dtype=mat.dtype)
            jitter = JITTER_START_FRACTION * scale if jitter == 0.0 else jitter * 10.0
            if jitter > JITTER_MAX_FRACTION * scale:
                raise IllConditionedKernelError(
                    f"factorization failed at maximum jitter {jitter:.3e}"
                ) from None


def chol_solve(lower, rhs):
    """Solve ``A x = rhs`` given the lower Cholesky factor of ``A``."""
    return cho_solve((lower, True), rhs)


def chol_forward(lower, rhs):
    """Solve ``L v = rhs`` (forward substitution only)."""
    return solve_triangular(lower, rhs, lower=True)


def solve_hermitian(mat, rhs, scale=None):
    """Solve a Hermitian PSD system with the jitter ladder.

    Returns ``(x, jitter)``.
    """
    lower, jitter = cholesky_with_jitter(mat, scale=scale)
    return chol_solve(lower, rhs), jitter


def logdet_from_factor(lower):
    """log det(A) from the lower Cholesky factor of ``A``."""
    return 2.0 * float(np.sum(np.log(np.real(np.diag(lower)))))

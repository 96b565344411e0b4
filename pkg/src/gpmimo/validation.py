"""Input-validation helpers shared across the package.

Tolerances follow the package-wide contracts: Hermitian symmetry to 1e-12
(relative), positive semidefiniteness to -1e-10 times the largest eigenvalue,
unit diagonals to 1e-9, unitarity to 1e-10.
"""

import numpy as np

HERMITIAN_RTOL = 1e-12
PSD_TOL = 1e-10
UNIT_DIAG_TOL = 1e-9
UNITARY_TOL = 1e-10


def as_complex_matrix(a, name="matrix"):
    a = np.asarray(a)
    if a.ndim != 2:
        raise ValueError(f"{name} must be 2-D, got shape {a.shape}")
    return a.astype(np.complex128, copy=False)


def check_square(a, name="matrix"):
    a = as_complex_matrix(a, name)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"{name} must be square, got shape {a.shape}")
    return a


def check_hermitian(a, rtol=HERMITIAN_RTOL, name="matrix"):
    a = check_square(a, name)
    scale = np.max(np.abs(a)) or 1.0
    if np.max(np.abs(a - a.conj().T)) > rtol * scale:
        raise ValueError(f"{name} is not Hermitian within tolerance {rtol:g}")
    return a


def check_psd(a, tol=PSD_TOL, name="matrix", eigvals=None):
    """Raise unless min eigenvalue >= -tol * max eigenvalue."""
    a = check_square(a, name)
    if eigvals is None:
        eigvals = np.linalg.eigvalsh(a)
    lo, hi = float(eigvals.min()), float(eigvals.max())
    if lo < -tol * max(hi, 0.0):
        raise ValueError(
            f"{name} is not PSD: min eigenvalue {lo:.3e} vs max {hi:.3e}"
        )
    return a


def check_unit_diagonal(a, tol=UNIT_DIAG_TOL, name="matrix"):
    a = check_square(a, name)
    if np.max(np.abs(np.diag(a) - 1.0)) > tol:
        raise ValueError(f"{name} does not have a unit diagonal within {tol:g}")
    return a


def check_unitary(u, tol=UNITARY_TOL, name="matrix"):
    u = check_square(u, name)
    gram = u.conj().T @ u
    if np.max(np.abs(gram - np.eye(u.shape[0]))) > tol:
        raise ValueError(f"{name} is not unitary within tolerance {tol:g}")
    return u


def check_finite(a, name="array"):
    a = np.asarray(a)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def check_grid_indices(z, shape, name="indices"):
    """Validate (n, 2) integer grid indices against a GridShape."""
    z = np.asarray(z)
    if z.ndim != 2 or z.shape[1] != 2:
        raise ValueError(f"{name} must have shape (n, 2), got {z.shape}")
    if not np.issubdtype(z.dtype, np.integer):
        raise ValueError(f"{name} must be integer grid coordinates")
    r, t = z[:, 0], z[:, 1]
    if r.min(initial=0) < 0 or t.min(initial=0) < 0:
        raise ValueError(f"{name} contains negative coordinates")
    if len(z) and (r.max() >= shape.n_rx or t.max() >= shape.n_tx):
        raise ValueError(f"{name} fall outside the {shape.n_rx}x{shape.n_tx} grid")
    return z

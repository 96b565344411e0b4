"""Channel covariance models and correlated channel sampling.

The channel over an ``n_rx x n_tx`` antenna grid is treated as a zero-mean
proper complex random field with covariance ``R = E[u u^H]`` over the
column-major vectorization ``u`` (entry ``(r, t)`` sits at ``n = r + t*n_rx``).
Two constructions are provided: a separable (transmit x receive) product
model and a joint-eigenbasis model with a full power-coupling matrix. Both
are normalized to unit per-entry power, so an SNR of ``1/noise_var`` is the
per-entry channel power over the noise power.

All angles are in radians and antenna spacings in wavelengths.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import toeplitz

from .seeding import rng_from, standard_complex_normal
from . import validation

MODEL_TAGS = ("kronecker", "weichselberger", "custom")

#: quadrature order for the angular-spectrum integral
QUAD_ORDER = 64


@dataclass(frozen=True)
class GridShape:
    """Dimensions of the receive x transmit antenna grid."""

    n_rx: int
    n_tx: int

    def __post_init__(self):
        if self.n_rx < 1 or self.n_tx < 1:
            raise ValueError(f"antenna counts must be >= 1, got {self}")

    @property
    def n_entries(self):
        return self.n_rx * self.n_tx

    def vec_index(self, r, t):
        """Column-major vectorization index of grid entry (r, t), 0-based."""
        return np.asarray(r) + np.asarray(t) * self.n_rx


@dataclass
class ChannelCovariance:
    """Hermitian PSD covariance of the vectorized channel, unit diagonal.

    Attributes
    ----------
    shape : GridShape
        Grid the covariance is indexed over.
    matrix : ndarray
        ``(n_rx*n_tx, n_rx*n_tx)`` complex Hermitian PSD matrix.
    model_tag : str
        One of ``kronecker``, ``weichselberger``, ``custom``.
    """

    shape: GridShape
    matrix: np.ndarray
    model_tag: str = "custom"
    # cached sampling factors; kron_sides = (left_rx, right_tx) when separable
    _sqrt: np.ndarray = field(default=None, repr=False, compare=False)
    _kron_sides: tuple = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.model_tag not in MODEL_TAGS:
            raise ValueError(f"unknown model tag {self.model_tag!r}")
        self.matrix = validation.as_complex_matrix(self.matrix, "covariance")
        n = self.shape.n_entries
        if self.matrix.shape != (n, n):
            raise ValueError(
                f"covariance is {self.matrix.shape}, expected ({n}, {n})"
            )

    def validate(self, unit_diagonal=True, eigvals=None):
        """Check the Hermitian / PSD / unit-diagonal invariants."""
        validation.check_hermitian(self.matrix, name="covariance")
        validation.check_psd(self.matrix, name="covariance", eigvals=eigvals)
        if unit_diagonal:
            validation.check_unit_diagonal(self.matrix, name="covariance")
        return self

    def sqrt_factor(self):
        """Factor ``F`` with ``F F^H = matrix`` (eigendecomposition, clamped).

        Negative eigenvalues from numerical error are clamped to zero.
        """
        if self._sqrt is None:
            w, v = np.linalg.eigh(self.matrix)
            self._sqrt = v * np.sqrt(np.clip(w, 0.0, None))
        return self._sqrt


def side_correlation(n, spacing_wl=0.5, center_rad=0.0, spread_rad=np.pi / 6):
    """Spatial correlation of a uniform linear array under a uniform
    power-angular spectrum.

    Entry ``(p, q)`` is the normalized integral of
    ``exp(1j * 2*pi * spacing_wl * (p - q) * sin(theta))`` over the angular
    window ``[center - spread/2, center + spread/2]``, evaluated with
    fixed-order Gauss-Legendre quadrature.

    Parameters
    ----------
    n : int
        Number of array elements.
    spacing_wl : float
        Element spacing in wavelengths.
    center_rad, spread_rad : float
        Center and total width of the angular window, radians.

    Returns
    -------
    ndarray
        ``n x n`` Hermitian Toeplitz matrix with unit diagonal, PSD up to
        quadrature rounding.
    """
    if n < 1:
        raise ValueError(f"array size must be >= 1, got {n}")
    if not 0.0 < spread_rad <= np.pi:
        raise ValueError(f"angle spread must be in (0, pi], got {spread_rad}")
    if spacing_wl <= 0.0:
        raise ValueError(f"element spacing must be positive, got {spacing_wl}")

    nodes, weights = np.polynomial.legendre.leggauss(QUAD_ORDER)
    theta = center_rad + 0.5 * spread_rad * nodes
    w = 0.5 * spread_rad * weights / spread_rad  # normalized to sum ~ 1
    lags = np.arange(n)
    phases = np.exp(2j * np.pi * spacing_wl * np.outer(lags, np.sin(theta)))
    col = phases @ w
    return toeplitz(col, col.conj())


def kronecker_covariance(r_tx, r_rx, validate=True):
    """Separable channel covariance from per-side correlation matrices.

    For the column-major vectorization the product covariance is
    ``R = r_tx^T (x) r_rx`` so that the covariance between entries
    ``(r, t)`` and ``(r', t')`` equals ``r_rx[r, r'] * r_tx[t', t]``.

    Parameters
    ----------
    r_tx, r_rx : ndarray
        Hermitian PSD transmit / receive correlation matrices with unit
        diagonals.

    Returns
    -------
    ChannelCovariance
    """
    r_tx = validation.as_complex_matrix(r_tx, "transmit correlation")
    r_rx = validation.as_complex_matrix(r_rx, "receive correlation")
    if validate:
        for name, side in (("transmit correlation", r_tx), ("receive correlation", r_rx)):
            validation.check_hermitian(side, name=name)
            validation.check_psd(side, name=name)
            validation.check_unit_diagonal(side, name=name)

    shape = GridShape(n_rx=r_rx.shape[0], n_tx=r_tx.shape[0])
    cov = ChannelCovariance(shape, np.kron(r_tx.T, r_rx), model_tag="kronecker")

    # separable square roots let samples be drawn as small two-sided products
    wt, vt = np.linalg.eigh(r_tx)
    wr, vr = np.linalg.eigh(r_rx)
    left_rx = vr * np.sqrt(np.clip(wr, 0.0, None))
    right_tx = (np.sqrt(np.clip(wt, 0.0, None))[:, None] * vt.conj().T)
    cov._kron_sides = (left_rx, right_tx)
    return cov


def weichselberger_covariance(u_tx, u_rx, coupling, normalize=True, validate=True):
    """Joint-eigenbasis channel covariance with a full power-coupling matrix.

    The covariance is ``(u_tx (x) u_rx) diag(vec(coupling)) (u_tx (x) u_rx)^H``
    with the coupling vectorized column-major. With ``normalize=True`` the
    result is rescaled (congruence by a positive diagonal) to a unit diagonal,
    which preserves Hermitian symmetry and positive semidefiniteness.

    Parameters
    ----------
    u_tx, u_rx : ndarray
        Unitary transmit / receive eigenbases.
    coupling : ndarray
        ``n_rx x n_tx`` entrywise-nonnegative power-coupling matrix.
    normalize : bool
        Rescale to a unit diagonal (default). With ``False`` the raw matrix is
        returned and the unit-diagonal invariant is not enforced.

    Returns
    -------
    ChannelCovariance
    """
    u_tx = validation.check_unitary(u_tx, name="transmit basis")
    u_rx = validation.check_unitary(u_rx, name="receive basis")
    coupling = np.asarray(coupling, dtype=float)
    expected = (u_rx.shape[0], u_tx.shape[0])
    if coupling.shape != expected:
        raise ValueError(f"coupling is {coupling.shape}, expected {expected}")
    if np.any(coupling < 0.0):
        raise ValueError("coupling entries must be nonnegative")

    basis = np.kron(u_tx, u_rx)
    lam = coupling.flatten(order="F")
    mat = (basis * lam) @ basis.conj().T
    if normalize:
        d = np.real(np.diag(mat))
        if np.any(d <= 0.0):
            raise ValueError("coupling produces zero-power grid entries")
        scale = 1.0 / np.sqrt(d)
        mat = mat * np.outer(scale, scale)
    mat = 0.5 * (mat + mat.conj().T)

    shape = GridShape(n_rx=u_rx.shape[0], n_tx=u_tx.shape[0])
    cov = ChannelCovariance(shape, mat, model_tag="weichselberger")
    if validate:
        cov.validate(unit_diagonal=normalize)
    return cov


def exponential_coupling(shape, seed, rate=1.0):
    """Reproducible i.i.d. exponential power-coupling matrix."""
    rng = rng_from(seed)
    return rng.exponential(scale=1.0 / rate, size=(shape.n_rx, shape.n_tx))


def sample_channel(cov, seed, size=None):
    """Draw correlated proper complex channel matrices.

    ``u = F g`` with ``F F^H = cov.matrix`` and ``g`` i.i.d. CN(0, 1); the
    vector is reshaped column-major to ``n_rx x n_tx``. Deterministic given
    the seed. Separable covariances use their per-side factors, which is
    equivalent in distribution and much cheaper for large grids.

    Parameters
    ----------
    cov : ChannelCovariance
    seed : int or numpy.random.Generator
    size : int, optional
        Number of draws; ``None`` returns a single ``n_rx x n_tx`` matrix,
        an integer returns an ``(size, n_rx, n_tx)`` stack.

    Returns
    -------
    ndarray
    """
    rng = rng_from(seed)
    n_draws = 1 if size is None else int(size)
    n_rx, n_tx = cov.shape.n_rx, cov.shape.n_tx

    g = standard_complex_normal(rng, (n_draws, n_rx, n_tx))
    if cov._kron_sides is not None:
        left_rx, right_tx = cov._kron_sides
        h = np.einsum("ij,njk,kl->nil", left_rx, g, right_tx)
    else:
        factor = cov.sqrt_factor()
        # column-major vectorization of each draw, u = F g, back to the grid
        gv = g.transpose(0, 2, 1).reshape(n_draws, -1)
        u = gv @ factor.T
        h = u.reshape(n_draws, n_tx, n_rx).transpose(0, 2, 1)
    return h[0] if size is None else h

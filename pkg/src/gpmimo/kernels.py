"""Covariance functions over the antenna index grid.

Two families are provided. The covariance-indexed kernel reads its values
straight out of a channel covariance matrix (no hyperparameters, Hermitian
PSD by construction), while the stationary distance kernels (RBF, Matern 3/2,
rational quadratic) depend on inputs only through the Euclidean distance of
the integer grid coordinates and carry learnable scale / lengthscale
hyperparameters with the bounds used by the experiment runner.

All kernels return complex arrays for a uniform interface, even when the
underlying family is real-valued.
"""

from dataclasses import dataclass

import numpy as np

from . import validation

#: hyperparameter initialization and box bounds per family
DEFAULT_INIT = {
    "RBF": {"scale": 1.0, "lengthscale": 0.5},
    "MATERN15": {"scale": 1.0, "lengthscale": 0.5},
    "RQ": {"scale": 1.0, "lengthscale": 0.5, "alpha": 0.5},
}
DEFAULT_BOUNDS = {
    "RBF": {"scale": (1e-2, 1e2), "lengthscale": (1e-2, 10.0)},
    "MATERN15": {"scale": (1e-2, 1e2), "lengthscale": (1e-2, 10.0)},
    "RQ": {"scale": (1e-2, 1e2), "lengthscale": (1e-2, 5.0), "alpha": (1e-1, 5.0)},
}


@dataclass
class GramSet:
    """Gram matrices of one train/test split: K, K_* and K_**."""

    k_train: np.ndarray  # (P, P)
    k_cross: np.ndarray  # (P, M)
    k_test: np.ndarray  # (M, M)


def _as_inputs(z):
    z = np.asarray(z)
    if z.ndim == 1:
        z = z[None, :]
    if z.ndim != 2 or z.shape[1] != 2:
        raise ValueError(f"grid inputs must have shape (n, 2), got {z.shape}")
    return z


def _sqdist(z1, z2):
    d = z1[:, None, :].astype(float) - z2[None, :, :].astype(float)
    return np.sum(d * d, axis=-1)


class Kernel:
    """Base class: callable on (n, 2) integer grid inputs.

    Subclasses implement ``__call__`` and expose their free hyperparameters
    through ``theta`` (log space) for the derivative-free optimizer.
    """

    #: ordered names of the free hyperparameters
    param_names = ()

    def __call__(self, z1, z2=None):
        raise NotImplementedError

    def diag(self, z):
        z = _as_inputs(z)
        return np.real(np.einsum("ii->i", self(z, z)))

    def get_params(self):
        return {name: getattr(self, name) for name in self.param_names}

    def set_params(self, **params):
        for name, value in params.items():
            if name not in self.param_names:
                raise ValueError(f"unknown parameter {name!r} for {type(self).__name__}")
            setattr(self, name, float(value))
        return self

    @property
    def theta(self):
        """Free hyperparameters in log space."""
        return np.log([getattr(self, name) for name in self.param_names])

    def with_theta(self, theta):
        """Copy of the kernel with log-space hyperparameters ``theta``."""
        new = type(self)(**self.get_params())
        for name, value in zip(self.param_names, np.exp(theta)):
            setattr(new, name, float(value))
        return new

    def theta_bounds(self, bounds=None):
        """Log-space box bounds, defaulting to the family table."""
        table = dict(DEFAULT_BOUNDS[self.family])
        if bounds:
            table.update(bounds)
        return np.log([table[name] for name in self.param_names])


class SpatialCovarianceKernel(Kernel):
    """Kernel indexed directly from a channel covariance matrix.

    ``k((r, t), (r', t'))`` is the covariance between the two grid entries in
    the column-major vectorization; Gram matrices are submatrices of the
    channel covariance, hence Hermitian PSD for any index set. There are no
    hyperparameters to learn.
    """

    family = "SC"
    param_names = ()

    def __init__(self, cov):
        self.cov = cov

    def __call__(self, z1, z2=None):
        shape = self.cov.shape
        z1 = validation.check_grid_indices(_as_inputs(z1), shape, "kernel inputs")
        z2 = z1 if z2 is None else validation.check_grid_indices(
            _as_inputs(z2), shape, "kernel inputs"
        )
        idx1 = shape.vec_index(z1[:, 0], z1[:, 1])
        idx2 = shape.vec_index(z2[:, 0], z2[:, 1])
        return self.cov.matrix[np.ix_(idx1, idx2)]

    def diag(self, z):
        shape = self.cov.shape
        z = validation.check_grid_indices(_as_inputs(z), shape, "kernel inputs")
        idx = shape.vec_index(z[:, 0], z[:, 1])
        return np.real(self.cov.matrix[idx, idx])

    def get_params(self):
        return {"cov": self.cov}


class RBFKernel(Kernel):
    """Squared-exponential kernel on grid distance."""

    family = "RBF"
    param_names = ("scale", "lengthscale")

    def __init__(self, scale=1.0, lengthscale=0.5):
        self.scale = float(scale)
        self.lengthscale = float(lengthscale)

    def __call__(self, z1, z2=None):
        z1 = _as_inputs(z1)
        z2 = z1 if z2 is None else _as_inputs(z2)
        d2 = _sqdist(z1, z2)
        return (self.scale * np.exp(-d2 / (2.0 * self.lengthscale**2))).astype(complex)


class Matern15Kernel(Kernel):
    """Matern kernel at fixed smoothness 3/2 (closed form, no Bessel calls)."""

    family = "MATERN15"
    param_names = ("scale", "lengthscale")
    nu = 1.5

    def __init__(self, scale=1.0, lengthscale=0.5):
        self.scale = float(scale)
        self.lengthscale = float(lengthscale)

    def __call__(self, z1, z2=None):
        z1 = _as_inputs(z1)
        z2 = z1 if z2 is None else _as_inputs(z2)
        arg = np.sqrt(3.0 * _sqdist(z1, z2)) / self.lengthscale
        return (self.scale * (1.0 + arg) * np.exp(-arg)).astype(complex)


class RationalQuadraticKernel(Kernel):
    """Rational quadratic kernel, a scale mixture of squared exponentials."""

    family = "RQ"
    param_names = ("scale", "lengthscale", "alpha")

    def __init__(self, scale=1.0, lengthscale=0.5, alpha=0.5):
        self.scale = float(scale)
        self.lengthscale = float(lengthscale)
        self.alpha = float(alpha)

    def __call__(self, z1, z2=None):
        z1 = _as_inputs(z1)
        z2 = z1 if z2 is None else _as_inputs(z2)
        d2 = _sqdist(z1, z2)
        base = 1.0 + d2 / (2.0 * self.alpha * self.lengthscale**2)
        return (self.scale * base ** (-self.alpha)).astype(complex)


KERNEL_FAMILIES = {
    "SC": SpatialCovarianceKernel,
    "RBF": RBFKernel,
    "MATERN15": Matern15Kernel,
    "RQ": RationalQuadraticKernel,
}


def make_kernel(family, cov=None, **params):
    """Instantiate a kernel family by name.

    The covariance-indexed family requires ``cov``; the distance families
    accept hyperparameter overrides on top of the family defaults.
    """
    family = family.upper()
    if family not in KERNEL_FAMILIES:
        raise ValueError(f"unknown kernel family {family!r}")
    if family == "SC":
        if cov is None:
            raise ValueError("the covariance-indexed kernel requires a channel covariance")
        return SpatialCovarianceKernel(cov)
    settings = dict(DEFAULT_INIT[family])
    settings.update(params)
    return KERNEL_FAMILIES[family](**settings)


def gram(kernel, train, test):
    """Assemble the GramSet for a training/test split.

    Parameters
    ----------
    kernel : Kernel
    train : TrainingSet
    test : TestSet

    Returns
    -------
    GramSet
    """
    k_train = kernel(train.inputs)
    k_cross = kernel(train.inputs, test.inputs)
    k_test = kernel(test.inputs)
    return GramSet(k_train=k_train, k_cross=k_cross, k_test=k_test)

"""Reduced-pilot sounding plans and de-spread noisy observations.

Only every ``stride``-th transmit antenna is activated during training, so the
pilot length drops from the full array size to the number of active antennas.
De-spreading the received block with the pilot matrix (orthonormal rows)
yields one noisy sample per (receive antenna, active transmit antenna) grid
entry; those samples form the training set for the grid regressors, and the
remaining grid entries form the test set.

Indices are 0-based: active antennas are ``0, stride, 2*stride, ...``.
"""

from dataclasses import dataclass

import numpy as np

from .covariance import GridShape
from .seeding import rng_from, standard_complex_normal
from . import validation


@dataclass(frozen=True)
class SoundingPlan:
    """Activation pattern, pilot matrix and selection matrix for one sweep.

    Attributes
    ----------
    shape : GridShape
    stride : int
        Spacing between active transmit antennas.
    active : ndarray
        Sorted 0-based indices of the active transmit antennas.
    pilot : ndarray
        ``n_active x pilot_len`` pilot matrix with orthonormal rows.
    selection : ndarray
        ``n_tx x n_active`` 0/1 antenna-selection matrix (canonical columns).
    pilot_len : int
    """

    shape: GridShape
    stride: int
    active: np.ndarray
    pilot: np.ndarray
    selection: np.ndarray
    pilot_len: int

    @property
    def n_active(self):
        return len(self.active)


@dataclass(frozen=True)
class TrainingSet:
    """Observed grid entries: inputs (r, t) and de-spread complex samples."""

    inputs: np.ndarray  # (P, 2) int
    values: np.ndarray  # (P,) complex
    noise_var: float
    shape: GridShape

    @property
    def vec_indices(self):
        return self.shape.vec_index(self.inputs[:, 0], self.inputs[:, 1])

    def __len__(self):
        return len(self.values)


@dataclass(frozen=True)
class TestSet:
    """Unobserved grid entries, column-major over the inactive columns."""

    inputs: np.ndarray  # (M, 2) int
    shape: GridShape

    @property
    def vec_indices(self):
        return self.shape.vec_index(self.inputs[:, 0], self.inputs[:, 1])

    def __len__(self):
        return len(self.inputs)


def _column_major_inputs(n_rx, columns):
    cols = np.asarray(columns, dtype=int)
    r = np.tile(np.arange(n_rx), len(cols))
    t = np.repeat(cols, n_rx)
    return np.stack([r, t], axis=1)


def make_plan(shape, stride, pilot_len=None):
    """Build the equispaced sounding plan for one training sweep.

    The pilot matrix is the first ``n_active`` rows of the unitary DFT of
    size ``pilot_len`` (constant modulus, exactly orthonormal rows). The
    default pilot length is the minimum, one slot per active antenna.

    Parameters
    ----------
    shape : GridShape
    stride : int
        Activation stride, >= 1.
    pilot_len : int, optional
        Number of training slots; must be >= the number of active antennas.

    Returns
    -------
    SoundingPlan
    """
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {stride}")
    active = np.arange(0, shape.n_tx, int(stride))
    n_active = len(active)
    t = n_active if pilot_len is None else int(pilot_len)
    if t < n_active:
        raise ValueError(
            f"pilot length {t} is shorter than the {n_active} active antennas"
        )
    grid = np.arange(t)
    pilot = np.exp(-2j * np.pi * np.outer(grid[:n_active], grid) / t) / np.sqrt(t)
    selection = np.eye(shape.n_tx)[:, active]
    return SoundingPlan(
        shape=shape,
        stride=int(stride),
        active=active,
        pilot=pilot,
        selection=selection,
        pilot_len=t,
    )


def split_grid(shape, active):
    """Training/test grid inputs for an active-column set, column-major."""
    active = np.asarray(active, dtype=int)
    inactive = np.setdiff1d(np.arange(shape.n_tx), active)
    return (
        _column_major_inputs(shape.n_rx, active),
        _column_major_inputs(shape.n_rx, inactive),
    )


def observe(h_true, plan, noise_var, seed, via_pilots=False):
    """Synthesize de-spread noisy observations of the sounded columns.

    By default noise is injected entrywise on the sounded sub-matrix, which
    matches the statistics of transmitting the pilot block and de-spreading
    (the pilot rows are orthonormal, so the de-spread noise stays i.i.d. with
    the same variance). ``via_pilots=True`` runs the explicit transmit /
    de-spread pipeline instead; the equivalence of the two paths is covered
    by the test suite.

    Parameters
    ----------
    h_true : ndarray
        True ``n_rx x n_tx`` channel matrix.
    plan : SoundingPlan
    noise_var : float
        Noise variance per received entry, >= 0.
    seed : int or numpy.random.Generator
    via_pilots : bool
        Use the full pilot transmit + de-spread pipeline.

    Returns
    -------
    (TrainingSet, TestSet)
    """
    h_true = np.asarray(h_true, dtype=complex)
    if h_true.shape != (plan.shape.n_rx, plan.shape.n_tx):
        raise ValueError(
            f"channel is {h_true.shape}, plan expects "
            f"({plan.shape.n_rx}, {plan.shape.n_tx})"
        )
    if noise_var < 0:
        raise ValueError("noise variance must be nonnegative")
    validation.check_finite(h_true, "channel matrix")
    rng = rng_from(seed)

    if via_pilots:
        noise = standard_complex_normal(rng, (plan.shape.n_rx, plan.pilot_len))
        received = h_true @ plan.selection @ plan.pilot + np.sqrt(noise_var) * noise
        despread = received @ plan.pilot.conj().T
    else:
        noise = standard_complex_normal(rng, (plan.shape.n_rx, plan.n_active))
        despread = h_true[:, plan.active] + np.sqrt(noise_var) * noise

    train_inputs, test_inputs = split_grid(plan.shape, plan.active)
    train = TrainingSet(
        inputs=train_inputs,
        values=despread.flatten(order="F"),
        noise_var=float(noise_var),
        shape=plan.shape,
    )
    test = TestSet(inputs=test_inputs, shape=plan.shape)
    return train, test


def full_pilot_matrix(n_tx, pilot_len=None):
    """Unitary-DFT pilot matrix for full-array training (rows orthonormal)."""
    t = n_tx if pilot_len is None else int(pilot_len)
    if t < n_tx:
        raise ValueError(f"full-array training needs pilot_len >= {n_tx}")
    grid = np.arange(t)
    return np.exp(-2j * np.pi * np.outer(grid[:n_tx], grid) / t) / np.sqrt(t)

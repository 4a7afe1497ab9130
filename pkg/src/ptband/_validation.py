"""Input validation helpers shared by the functional API and the estimators.

scikit-learn's ``check_array`` rejects complex input, so amplitude arrays are
validated here instead.
"""

import numbers

import numpy as np


def check_finite_scalar(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Real):
        raise TypeError(f"{name} must be a real number, got {type(value).__name__}")
    value = float(value)
    if not np.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


def check_n_cells(n_cells):
    if isinstance(n_cells, bool) or not isinstance(n_cells, numbers.Integral):
        raise TypeError(f"N must be an integer, got {type(n_cells).__name__}")
    if n_cells < 2:
        raise ValueError(f"N must be at least 2, got {n_cells}")
    return int(n_cells)


def check_state(state, dim=None, name="state"):
    """Return ``state`` as a finite 1-D complex array of length ``dim``."""
    arr = np.asarray(state, dtype=complex)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be 1-D, got shape {arr.shape}")
    if dim is not None and arr.shape[0] != dim:
        raise ValueError(f"{name} has {arr.shape[0]} amplitudes, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite amplitudes")
    return arr


def check_states(X, dim=None, name="X"):
    """Return ``X`` as a finite 2-D complex array with ``dim`` columns.

    A single 1-D state is promoted to one row.
    """
    arr = np.asarray(X, dtype=complex)
    if arr.ndim == 1:
        arr = arr[np.newaxis, :]
    if arr.ndim != 2:
        raise ValueError(f"{name} must be 2-D (n_samples, n_sites), got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ValueError(f"{name} has no samples")
    if dim is not None and arr.shape[1] != dim:
        raise ValueError(f"{name} has {arr.shape[1]} sites per sample, expected {dim}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite amplitudes")
    return arr


def check_times(times):
    arr = np.atleast_1d(np.asarray(times, dtype=float))
    if arr.ndim != 1:
        raise ValueError(f"times must be 1-D, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("times must be finite")
    return arr

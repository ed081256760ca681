"""Input validation helpers shared by the library and the estimators."""

import numbers

import numpy as np


def check_positive_int(value, name):
    if isinstance(value, bool) or not isinstance(value, numbers.Integral):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < 1:
        raise ValueError(f"{name} must be >= 1, got {value}")
    return int(value)


def check_positive_float(value, name):
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ValueError(f"{name} must be a real number, got {value!r}") from None
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"{name} must be finite and > 0, got {value}")
    return value


def check_vector(values, name, *, dtype=float, ndim=1):
    """Return `values` as a finite array of the given dimensionality."""
    arr = np.asarray(values, dtype=dtype)
    if arr.ndim == 0 and ndim == 1:
        arr = arr.reshape(1)
    if arr.ndim != ndim:
        raise ValueError(f"{name} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError(f"{name} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    return arr


def check_positions(positions):
    """Element positions in wavelengths: finite, strictly increasing.

    Accepts a 1-D vector or an ``(n, 1)`` column, which is what sklearn-style
    callers tend to pass as ``X``.
    """
    arr = np.asarray(positions, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    arr = check_vector(arr, "positions")
    if arr.size > 1 and np.any(np.diff(arr) <= 0):
        raise ValueError("positions must be strictly increasing")
    return arr


def check_angles(theta_deg):
    arr = np.asarray(theta_deg, dtype=float)
    if arr.ndim == 2 and arr.shape[1] == 1:
        arr = arr[:, 0]
    return check_vector(arr, "theta_deg")


def check_unit_interval(values, name, *, closed_right=True, open_left=False):
    arr = np.asarray(values, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite values")
    low_ok = arr > 0 if open_left else arr >= 0
    high_ok = arr <= 1 if closed_right else arr < 1
    if not np.all(low_ok & high_ok):
        left = "(" if open_left else "["
        right = "]" if closed_right else ")"
        raise ValueError(f"{name} must lie in {left}0, 1{right}")
    return arr

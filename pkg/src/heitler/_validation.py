"""Input checks shared by the estimator wrappers."""

import numpy as np
from sklearn.utils import check_array

from .exceptions import InvalidParameterError


def check_grid(X, name="X"):
    """Accept a 1-D grid or an ``(n, 1)`` column and return a float 1-D array."""
    arr = check_array(X, ensure_2d=False, dtype=np.float64, input_name=name)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise InvalidParameterError(f"{name} must have a single column, got {arr.shape[1]}")
        arr = arr[:, 0]
    return np.ascontiguousarray(arr)


def check_targets(y, n, name="y"):
    arr = check_array(y, ensure_2d=False, dtype=np.float64, input_name=name)
    if arr.ndim != 1 or arr.size != n:
        raise InvalidParameterError(f"{name} must be 1-D with {n} entries")
    return arr


def check_sigma(sigma, n):
    if sigma is None:
        return None
    arr = check_targets(sigma, n, "sigma")
    if np.any(arr <= 0):
        raise InvalidParameterError("sigma must be strictly positive")
    return arr

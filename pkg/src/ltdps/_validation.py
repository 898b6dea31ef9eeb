"""Input checking shared by the estimators and the CLI."""
from __future__ import annotations

import numpy as np

from .exceptions import DomainError
from .grid import GridTopology
from .paths import MobilePath, as_path


def check_paths(X, grid: GridTopology, min_len: int = 2) -> list[MobilePath]:
    if isinstance(X, (str, MobilePath)):
        raise TypeError("expected an iterable of paths, got a single path")
    return [as_path(p).validate(grid, min_len=min_len) for p in X]


def check_transitions(X, grid: GridTopology) -> np.ndarray:
    """Coerce ``X`` to an int array of shape (n, 2): columns current AP, next region."""
    arr = np.asarray(X)
    if arr.ndim == 1 and arr.size == 2:
        arr = arr.reshape(1, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise DomainError(f"expected (n, 2) array of (current_ap, next_region), got shape {arr.shape}")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        if not np.all(np.equal(np.mod(arr, 1), 0)):
            raise DomainError("AP and region ids must be integers")
        arr = arr.astype(np.int64)
    for a, g in arr:
        grid.check_ap(int(a))
        grid.check_region(int(g))
    return arr.astype(np.int64, copy=False)


def check_aps(X, grid: GridTopology) -> np.ndarray:
    """Accept a 1-D array of current APs or the (n, 2) transition layout."""
    arr = np.asarray(X)
    if arr.ndim == 2:
        arr = check_transitions(arr, grid)[:, 0]
    elif arr.ndim == 0:
        arr = arr.reshape(1)
    for a in arr:
        grid.check_ap(int(a))
    return arr.astype(np.int64, copy=False)


def transitions_of(path: MobilePath) -> tuple[np.ndarray, np.ndarray]:
    """Split a path into model inputs ``(prev_ap, region)`` and targets (next AP)."""
    X = np.array([(a, g2) for (a, _), (_, g2) in zip(path.steps, path.steps[1:])],
                 dtype=np.int64).reshape(-1, 2)
    y = np.array(path.aps[1:], dtype=np.int64)
    return X, y

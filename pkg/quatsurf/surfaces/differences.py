"""Finite differences of node fields.

Fourth-order central differences inside, second-order central next to the
boundary and second-order one-sided on non-periodic boundaries. Periodic
directions wrap. Fields have the grid axes first; any trailing axes are
carried along.
"""

import numpy as np


def _diff_axis(values: np.ndarray, h: float, axis: int, periodic: bool) -> np.ndarray:
    v = np.moveaxis(np.asarray(values), axis, 0)
    if periodic:
        out = (
            -np.roll(v, -2, axis=0)
            + 8.0 * np.roll(v, -1, axis=0)
            - 8.0 * np.roll(v, 1, axis=0)
            + np.roll(v, 2, axis=0)
        ) / (12.0 * h)
        return np.moveaxis(out, 0, axis)
    n = v.shape[0]
    if n < 5:
        raise ValueError("finite differences need at least 5 nodes per direction")
    out = np.empty_like(v)
    out[2:-2] = (-v[4:] + 8.0 * v[3:-1] - 8.0 * v[1:-3] + v[:-4]) / (12.0 * h)
    out[1] = (v[2] - v[0]) / (2.0 * h)
    out[-2] = (v[-1] - v[-3]) / (2.0 * h)
    out[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    out[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return np.moveaxis(out, 0, axis)


def diff_x(values: np.ndarray, hx: float) -> np.ndarray:
    """Derivative along the first grid axis (never periodic)."""
    return _diff_axis(values, hx, 0, periodic=False)


def diff_y(values: np.ndarray, hy: float, periodic: bool) -> np.ndarray:
    """Derivative along the second grid axis."""
    return _diff_axis(values, hy, 1, periodic=periodic)


def grid_gradient(values: np.ndarray, grid) -> tuple:
    """(d/dx, d/dy) of a node field on ``grid``."""
    return diff_x(values, grid.hx), diff_y(values, grid.hy, grid.periodic_y)

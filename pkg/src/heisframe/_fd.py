"""Finite-difference derivatives on uniform grids, along one array axis."""

import numpy as np

# one-sided stencils for the first two / last two nodes, scaled by 1/(12 h)
_D1_O4_EDGE = (
    np.array([-25.0, 48.0, -36.0, 16.0, -3.0]),
    np.array([-3.0, -10.0, 18.0, -6.0, 1.0]),
)
# scaled by 1/(12 h^2)
_D2_O4_EDGE = (
    np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]),
    np.array([10.0, -15.0, -4.0, 14.0, -6.0, 1.0]),
)


def _check(n, order):
    need = {2: 4, 4: 6}
    if order not in need:
        raise ValueError(f"unsupported difference order {order}")
    if n < need[order]:
        raise ValueError(f"order-{order} differences need at least {need[order]} nodes, got {n}")


def _edges(f, out, stencils, scale):
    w = len(stencils[0])
    for i, st in enumerate(stencils):
        out[i] = np.tensordot(st, f[:w], axes=(0, 0)) * scale
    for i, st in enumerate(stencils):
        # mirror: first derivative flips sign under reflection, second does not
        out[-1 - i] = np.tensordot(st, f[::-1][:w], axes=(0, 0)) * scale
    return out


def diff1(f, h, axis=0, order=4):
    """First derivative of samples ``f`` with spacing ``h`` along ``axis``."""
    f = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
    _check(f.shape[0], order)
    if order == 2:
        out = np.gradient(f, h, axis=0, edge_order=2)
    else:
        out = np.empty_like(f)
        out[2:-2] = (-f[4:] + 8.0 * f[3:-1] - 8.0 * f[1:-3] + f[:-4]) / (12.0 * h)
        _edges(f, out, _D1_O4_EDGE, 1.0 / (12.0 * h))
        out[-2:] *= -1.0
    return np.moveaxis(out, 0, axis)


def diff2(f, h, axis=0, order=4):
    """Second derivative of samples ``f`` with spacing ``h`` along ``axis``."""
    f = np.moveaxis(np.asarray(f, dtype=float), axis, 0)
    _check(f.shape[0], order)
    out = np.empty_like(f)
    if order == 2:
        out[1:-1] = (f[2:] - 2.0 * f[1:-1] + f[:-2]) / h**2
        out[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h**2
        out[-1] = (2.0 * f[-1] - 5.0 * f[-2] + 4.0 * f[-3] - f[-4]) / h**2
    else:
        out[2:-2] = (-f[4:] + 16.0 * f[3:-1] - 30.0 * f[2:-2] + 16.0 * f[1:-3] - f[:-4]) / (
            12.0 * h**2
        )
        _edges(f, out, _D2_O4_EDGE, 1.0 / (12.0 * h**2))
    return np.moveaxis(out, 0, axis)


def uniform_spacing(grid, rtol=1e-9):
    """Spacing of a uniform 1-D grid; ValueError if the grid is not uniform."""
    grid = np.asarray(grid, dtype=float)
    if grid.ndim != 1 or grid.size < 2:
        raise ValueError("grid must be 1-D with at least two nodes")
    steps = np.diff(grid)
    h = (grid[-1] - grid[0]) / (grid.size - 1)
    if h == 0 or np.max(np.abs(steps - h)) > rtol * max(abs(h), np.max(np.abs(grid))):
        raise ValueError("grid is not uniformly spaced")
    return float(h)

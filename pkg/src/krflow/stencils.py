"""Fourth-order finite-difference stencils on uniform grids.

All radial fields in this package live on uniform grids in the logarithmic
radius rho = log|z|^2.  Interior nodes use centered 5-point stencils; the
outermost rows use one-sided stencils of the same order, so differentiating
a smooth field never drops below fourth-order accuracy anywhere on the grid.
The stencil weights are hard-coded rationals: applying an operator to exactly
constant (or, for ``diff1``, exactly linear) data returns exact zeros / exact
slopes in floating point, which the flow engine relies on for its fixed-point
behavior.
"""

from __future__ import annotations

import numpy as np

# One-sided weights (forward; reversed and sign-flipped for the right edge).
_D1_FWD = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
_D2_FWD = np.array([45.0, -154.0, 214.0, -156.0, 61.0, -10.0]) / 12.0


def spacing(grid: np.ndarray) -> float:
    """Grid spacing; raises if the grid is not uniform to round-off."""
    d = np.diff(grid)
    h = float(d[0])
    if not np.allclose(d, h, rtol=1e-12, atol=1e-12 * max(1.0, abs(h))):
        raise ValueError("grid is not uniform")
    return h


def _left_ghosts(y: np.ndarray, h: float) -> np.ndarray:
    """Two ghost values below the grid from the flat-model closure.

    Radial quantities that are smooth at the origin behave like
    v(rho) = v_inf + c1 e^rho + c2 e^{2 rho} + ... as rho -> -infinity.
    Fitting the two-exponential model through the first three nodes leaves a
    misfit of order e^{3 rho}, far below stencil truncation, and exactly
    constant data yields ghosts equal to v0 with no rounding.  A plain
    one-sided stencil instead puts a kink in the error profile at the
    boundary, which curvature formulas amplify by e^{-rho}/h^2.
    """
    w = np.exp(h)
    d1 = y[1] - y[0]
    d2 = y[2] - y[1]
    beta = (d2 - w * d1) / (w * (w - 1.0))
    alpha = d1 - beta
    g1 = y[0] - (alpha / w + beta / (w * w))
    g2 = y[0] - (alpha * (w + 1.0) / w**2 + beta * (w * w + 1.0) / w**4)
    return np.array([g2, g1])


def _right_ghosts(y: np.ndarray, h: float) -> np.ndarray:
    """Two ghost values above the grid from the far-field closure.

    Complete ends of the radial class are asymptotically cone- or
    cylinder-like: the log-eigenvalue fields approach an affine function of
    rho plus an exponentially decaying correction.  Fitting
    v = p + q rho + r e^{-(rho - rho_max)} through the last three nodes
    extends that structure (an affine extension carries no curvature, so
    truncation injects none); exactly constant or affine data extends with
    r = 0 and no model error.
    """
    d1 = y[-1] - y[-2]
    d2 = y[-2] - y[-3]
    em1 = np.expm1(h)
    r = (d1 - d2) / (em1 * em1)
    qh = d1 + r * em1
    g1 = y[-1] + qh + r * np.expm1(-h)
    g2 = y[-1] + 2.0 * qh + r * np.expm1(-2.0 * h)
    return np.array([g1, g2])


def diff1(
    values: np.ndarray, h: float, left_closure: bool = False, right_closure: bool = False
) -> np.ndarray:
    """First derivative, 4th order (centered interior, one-sided edges).

    With ``left_closure`` the two left rows use centered stencils over
    flat-model ghost nodes; with ``right_closure`` the two right rows use
    centered stencils over affine ghost nodes.
    """
    y = np.asarray(values, dtype=float)
    out = np.empty_like(y)
    out[2:-2] = (y[:-4] - 8.0 * y[1:-3] + 8.0 * y[3:-1] - y[4:]) / (12.0 * h)
    if left_closure:
        g = _left_ghosts(y, h)
        out[0] = (g[0] - 8.0 * g[1] + 8.0 * y[1] - y[2]) / (12.0 * h)
        out[1] = (g[1] - 8.0 * y[0] + 8.0 * y[2] - y[3]) / (12.0 * h)
    else:
        for i in (0, 1):
            out[i] = np.dot(_D1_FWD, y[i : i + 5]) / h
    if right_closure:
        r = _right_ghosts(y, h)
        out[-2] = (y[-4] - 8.0 * y[-3] + 8.0 * y[-1] - r[0]) / (12.0 * h)
        out[-1] = (y[-3] - 8.0 * y[-2] + 8.0 * r[0] - r[1]) / (12.0 * h)
    else:
        for i in (0, 1):
            out[-1 - i] = -np.dot(_D1_FWD, y[-1 - i : -6 - i : -1]) / h
    return out


def diff2(
    values: np.ndarray, h: float, left_closure: bool = False, right_closure: bool = False
) -> np.ndarray:
    """Second derivative, 4th order (centered interior, one-sided edges).

    Closure flags as in :func:`diff1`.
    """
    y = np.asarray(values, dtype=float)
    out = np.empty_like(y)
    out[2:-2] = (
        -y[:-4] + 16.0 * y[1:-3] - 30.0 * y[2:-2] + 16.0 * y[3:-1] - y[4:]
    ) / (12.0 * h * h)
    h2 = h * h
    if left_closure:
        g = _left_ghosts(y, h)
        out[0] = (-g[0] + 16.0 * g[1] - 30.0 * y[0] + 16.0 * y[1] - y[2]) / (12.0 * h2)
        out[1] = (-g[1] + 16.0 * y[0] - 30.0 * y[1] + 16.0 * y[2] - y[3]) / (12.0 * h2)
    else:
        for i in (0, 1):
            out[i] = np.dot(_D2_FWD, y[i : i + 6]) / h2
    if right_closure:
        r = _right_ghosts(y, h)
        out[-2] = (-y[-4] + 16.0 * y[-3] - 30.0 * y[-2] + 16.0 * y[-1] - r[0]) / (12.0 * h2)
        out[-1] = (-y[-3] + 16.0 * y[-2] - 30.0 * y[-1] + 16.0 * r[0] - r[1]) / (12.0 * h2)
    else:
        for i in (0, 1):
            out[-1 - i] = np.dot(_D2_FWD, y[-1 - i : -7 - i : -1]) / h2
    return out


def diff1_matrix(m: int, h: float, left_closure: bool = False, right_closure: bool = False):
    """Sparse matrix form of :func:`diff1` (the operator is linear)."""
    from scipy.sparse import lil_matrix

    D = lil_matrix((m, m))
    c = np.array([1.0, -8.0, 0.0, 8.0, -1.0]) / (12.0 * h)
    for k, ck in enumerate(c):
        if ck == 0.0:
            continue
        idx = np.arange(2, m - 2)
        D[idx, idx + k - 2] = ck
    # boundary rows extracted by applying the operator to basis vectors
    probe = np.zeros(m)
    for j in range(6):
        probe[:] = 0.0
        probe[j] = 1.0
        col = diff1(probe, h, left_closure=left_closure, right_closure=right_closure)
        for i in (0, 1):
            if col[i] != 0.0:
                D[i, j] = col[i]
        probe[j] = 0.0
    for j in range(m - 6, m):
        probe[:] = 0.0
        probe[j] = 1.0
        col = diff1(probe, h, left_closure=left_closure, right_closure=right_closure)
        for i in (m - 2, m - 1):
            if col[i] != 0.0:
                D[i, j] = col[i]
        probe[j] = 0.0
    return D.tocsr()


def trapezoid(values: np.ndarray, h: float) -> float:
    """Composite trapezoidal rule with uniform spacing."""
    y = np.asarray(values, dtype=float)
    return h * (float(np.sum(y)) - 0.5 * (float(y[0]) + float(y[-1])))


def cumulative_trapezoid(values: np.ndarray, h: float) -> np.ndarray:
    """Cumulative trapezoidal integral, zero at the first node."""
    y = np.asarray(values, dtype=float)
    out = np.zeros_like(y)
    np.cumsum(0.5 * h * (y[1:] + y[:-1]), out=out[1:])
    return out


def simpson(values: np.ndarray, h: float) -> float:
    """Composite Simpson rule; falls back to trapezoid on the last interval
    when the number of intervals is odd."""
    y = np.asarray(values, dtype=float)
    m = len(y) - 1
    if m < 2:
        return trapezoid(y, h)
    stop = m if m % 2 == 0 else m - 1
    s = float(y[0]) + float(y[stop])
    s += 4.0 * float(np.sum(y[1:stop:2])) + 2.0 * float(np.sum(y[2:stop:2]))
    total = s * h / 3.0
    if m % 2 == 1:
        total += 0.5 * h * (float(y[-2]) + float(y[-1]))
    return total

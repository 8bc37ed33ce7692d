"""NumPy reference implementations of the hot kernels.

These define the semantics; the compiled backend must agree with them to
floating-point roundoff. Keep the arithmetic here in the same order and
form as in ``_kernels.pyx``.
"""

import collections

import numpy as np

THICKNESS_FLOOR = 1e-9


def tdf_grid(x0, y0, length, cos_t, sin_t, ta, tb, nx, ny, spacing):
    """Implicit bar field at every node of an (nx x ny)-element mesh.

    Returns shape ``(nx + 1, ny + 1)`` indexed ``[ix, iy]``.
    """
    xs = np.arange(nx + 1) * spacing
    ys = np.arange(ny + 1) * spacing
    dx = xs[:, None] - x0
    dy = ys[None, :] - y0
    x1 = cos_t * dx + sin_t * dy
    y1 = -sin_t * dx + cos_t * dy
    t = 0.5 * (ta + tb) + 0.5 * (tb - ta) * x1 / length
    np.maximum(t, THICKNESS_FLOOR, out=t)
    u = x1 / length
    v = y1 / t
    u2 = u * u
    v2 = v * v
    return 1.0 - (u2 * u2 * u2 + v2 * v2 * v2) ** (1.0 / 6.0)


def tdf_points(x0, y0, length, cos_t, sin_t, ta, tb, xs, ys):
    """Implicit bar field at an arbitrary list of points (flat arrays)."""
    dx = np.asarray(xs, dtype=float) - x0
    dy = np.asarray(ys, dtype=float) - y0
    x1 = cos_t * dx + sin_t * dy
    y1 = -sin_t * dx + cos_t * dy
    t = 0.5 * (ta + tb) + 0.5 * (tb - ta) * x1 / length
    t = np.maximum(t, THICKNESS_FLOOR)
    u = x1 / length
    v = y1 / t
    u2 = u * u
    v2 = v * v
    return 1.0 - (u2 * u2 * u2 + v2 * v2 * v2) ** (1.0 / 6.0)


def heaviside(phi, eps, alpha):
    """Regularized step: alpha below -eps, 1 above +eps, cubic blend between."""
    phi = np.asarray(phi, dtype=float)
    scaled = phi / eps
    mid = 0.75 * (1.0 - alpha) * (scaled - scaled**3 / 3.0) + 0.5 * (1.0 + alpha)
    out = np.where(phi > eps, 1.0, np.where(phi < -eps, alpha, mid))
    return out if out.ndim else float(out)


def heaviside_derivative(phi, eps, alpha):
    """Derivative of :func:`heaviside`: nonzero only inside the blend band."""
    phi = np.asarray(phi, dtype=float)
    inside = np.abs(phi) <= eps
    d = 0.75 * (1.0 - alpha) * (1.0 / eps - phi * phi / (eps * eps * eps))
    out = np.where(inside, d, 0.0)
    return out if out.ndim else float(out)


def grid_connected(solid, seeds, targets):
    """Breadth-first search over 4-connected solid elements.

    ``solid`` and ``targets`` are boolean (nx, ny) masks; ``seeds`` is an
    (k, 2) integer array of starting elements. True iff some target element
    is reachable from some seed through solid elements.
    """
    solid = np.asarray(solid, dtype=bool)
    targets = np.asarray(targets, dtype=bool)
    nx, ny = solid.shape
    visited = np.zeros_like(solid)
    queue = collections.deque()
    for ex, ey in np.asarray(seeds, dtype=int).reshape(-1, 2):
        if 0 <= ex < nx and 0 <= ey < ny and solid[ex, ey] and not visited[ex, ey]:
            if targets[ex, ey]:
                return True
            visited[ex, ey] = True
            queue.append((ex, ey))
    while queue:
        ex, ey = queue.popleft()
        for px, py in ((ex - 1, ey), (ex + 1, ey), (ex, ey - 1), (ex, ey + 1)):
            if 0 <= px < nx and 0 <= py < ny and solid[px, py] and not visited[px, py]:
                if targets[px, py]:
                    return True
                visited[px, py] = True
                queue.append((px, py))
    return False

"""Independent oracles shared across test modules.

These deliberately avoid the production code paths they are used to check.
"""

import numpy as np


def union_find_connected(solid, seeds, targets) -> bool:
    """Union-find counterpart of the production flood search."""
    solid = np.asarray(solid, dtype=bool)
    targets = np.asarray(targets, dtype=bool)
    nx, ny = solid.shape
    parent = list(range(nx * ny))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    def union(i, j):
        ri, rj = find(i), find(j)
        if ri != rj:
            parent[ri] = rj

    for ex in range(nx):
        for ey in range(ny):
            if not solid[ex, ey]:
                continue
            if ex + 1 < nx and solid[ex + 1, ey]:
                union(ex * ny + ey, (ex + 1) * ny + ey)
            if ey + 1 < ny and solid[ex, ey + 1]:
                union(ex * ny + ey, ex * ny + ey + 1)

    roots = {
        find(ex * ny + ey)
        for ex, ey in np.asarray(seeds, dtype=int).reshape(-1, 2)
        if 0 <= ex < nx and 0 <= ey < ny and solid[ex, ey]
    }
    for ex in range(nx):
        for ey in range(ny):
            if targets[ex, ey] and solid[ex, ey] and find(ex * ny + ey) in roots:
                return True
    return False

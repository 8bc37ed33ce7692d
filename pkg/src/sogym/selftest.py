"""Built-in oracle checks, runnable from the CLI without pytest.

Each check pits a production code path against an independent route:
dense assembly versus the sparse solver, finite differences versus the
analytic gradients, union-find versus the flood search, and the closed-form
step values. Prints one line per check.
"""

from __future__ import annotations

import numpy as np

from . import fea, optimizer
from .problems import BoundaryProblem
from .projection import DensityField, ProjectionParams, heaviside, heaviside_derivative


def _dense_compliance(field: DensityField, mesh: fea.Mesh, lc: fea.LoadCase, nu: float) -> float:
    """Brute-force dense assembly and solve, independent of the sparse path."""
    ke = fea.element_stiffness(nu)
    K = np.zeros((mesh.n_dofs, mesh.n_dofs))
    for ex in range(mesh.nx):
        for ey in range(mesh.ny):
            nodes = [
                mesh.node_id(ex, ey),
                mesh.node_id(ex + 1, ey),
                mesh.node_id(ex + 1, ey + 1),
                mesh.node_id(ex, ey + 1),
            ]
            dofs = [d for n in nodes for d in (2 * n, 2 * n + 1)]
            K[np.ix_(dofs, dofs)] += field.moduli[ex, ey] * ke
    free = np.setdiff1d(np.arange(mesh.n_dofs), lc.fixed_dofs)
    u = np.zeros(mesh.n_dofs)
    u[free] = np.linalg.solve(K[np.ix_(free, free)], lc.force[free])
    return float(lc.force @ u)


def _cantilever(nx: int, ny: int) -> BoundaryProblem:
    return BoundaryProblem(
        support_boundary="left",
        support_length=1.0,
        support_start=0.0,
        load_boundary="right",
        load_position=0.5,
        load_angle_deg=270.0,
        volume_target=0.3,
        height=ny / 50,
        width=nx / 50,
    )


def check_heaviside() -> bool:
    p = ProjectionParams()
    ok = abs(heaviside(-p.epsilon, p) - p.alpha) < 1e-12
    ok &= abs(heaviside(0.0, p) - 0.5 * (1 + p.alpha)) < 1e-12
    ok &= abs(heaviside(p.epsilon, p) - 1.0) < 1e-12
    h = 1e-7
    for phi in (-0.5 * p.epsilon, 0.0, 0.5 * p.epsilon):
        fd = (heaviside(phi + h, p) - heaviside(phi - h, p)) / (2 * h)
        ok &= abs(heaviside_derivative(phi, p) - fd) < 1e-5 * max(abs(fd), 1.0)
    return bool(ok)


def check_dense_fea(quick: bool = False) -> bool:
    rng = np.random.default_rng(7)
    cases = 3 if quick else 10
    for _ in range(cases):
        nx, ny = int(rng.integers(2, 7)), int(rng.integers(2, 7))
        problem = _cantilever(nx, ny)
        domain = problem.domain()
        mesh = fea.Mesh.from_domain(domain)
        lc = fea.build_loadcase(problem, mesh)
        rho = rng.uniform(0.1, 1.0, size=(nx, ny))
        field = DensityField(rho=rho)
        result = fea.analyze(field, mesh, lc)
        dense = _dense_compliance(field, mesh, lc, fea.POISSON_RATIO)
        if abs(result.compliance - dense) > 1e-8 * abs(dense):
            return False
        if abs(result.compliance - 2 * result.strain_energy.sum()) > 1e-9 * abs(result.compliance):
            return False
    return True


def check_gradients(quick: bool = False) -> bool:
    problem = _cantilever(12, 12)
    # the optimizer-grade band keeps random designs away from the flat and
    # kinked regions of the environment projection
    ctx = optimizer._ProblemContext.build(problem, params=optimizer.OPT_PROJECTION)
    lo, hi = optimizer.design_bounds(ctx.domain, 3)
    rng = np.random.default_rng(11)
    step = 1e-6
    designs = 1 if quick else 3
    for _ in range(designs):
        x = lo + rng.uniform(0.1, 0.9, size=lo.shape) * (hi - lo)
        _, dc, _, dv = optimizer.objective_and_gradients(x, problem, ctx)
        fd_c = np.zeros_like(x)
        fd_v = np.zeros_like(x)
        for j in range(len(x)):
            xp, xm = x.copy(), x.copy()
            xp[j] += step
            xm[j] -= step
            cp, vp, _ = optimizer.evaluate_design(ctx, xp)
            cm, vm, _ = optimizer.evaluate_design(ctx, xm)
            fd_c[j] = (cp - cm) / (2 * step)
            fd_v[j] = (vp - vm) / (2 * step)
        scale_c = max(np.abs(fd_c).max(), 1e-12)
        scale_v = max(np.abs(fd_v).max(), 1e-12)
        if np.abs(dc - fd_c).max() > 1e-3 * scale_c:
            return False
        if np.abs(dv - fd_v).max() > 1e-3 * scale_v:
            return False
    return True


def _union_find_connected(solid, seeds, targets) -> bool:
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
    seed_roots = {
        find(ex * ny + ey) for ex, ey in seeds if 0 <= ex < nx and 0 <= ey < ny and solid[ex, ey]
    }
    for ex in range(nx):
        for ey in range(ny):
            if targets[ex, ey] and solid[ex, ey] and find(ex * ny + ey) in seed_roots:
                return True
    return False


def check_connectivity(quick: bool = False) -> bool:
    from .kernels import backend

    rng = np.random.default_rng(3)
    cases = 100 if quick else 1000
    for _ in range(cases):
        nx, ny = int(rng.integers(2, 12)), int(rng.integers(2, 12))
        solid = rng.random((nx, ny)) < rng.uniform(0.2, 0.8)
        seeds = np.column_stack(
            [rng.integers(0, nx, size=2), rng.integers(0, ny, size=2)]
        )
        targets = rng.random((nx, ny)) < 0.2
        if backend.grid_connected(solid, seeds, targets) != _union_find_connected(
            solid, seeds, targets
        ):
            return False
    return True


def run_selftest(quick: bool = False) -> bool:
    checks = [
        ("heaviside exactness + derivative", check_heaviside),
        ("dense-vs-sparse compliance oracle", lambda: check_dense_fea(quick)),
        ("finite-difference gradient oracle", lambda: check_gradients(quick)),
        ("flood-search vs union-find", lambda: check_connectivity(quick)),
    ]
    all_ok = True
    for name, fn in checks:
        ok = fn()
        all_ok &= ok
        print(f"[{'PASS' if ok else 'FAIL'}] {name}")
    return all_ok

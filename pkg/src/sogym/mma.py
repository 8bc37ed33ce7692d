"""Sequential convex approximation optimizer (moving-asymptote family).

One outer iteration builds a separable convex approximation of the objective
and constraints around the current iterate, controlled by per-variable lower
and upper asymptotes, and solves it with a primal-dual interior-point
subsolver. The globally convergent variant re-solves the subproblem with
stiffened approximations when a trial point turns out non-conservative,
up to a fixed number of inner iterations.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Asymptotes stay within [ASY_MIN, ASY_MAX] times the variable range of the
# current iterate (classic bracket; keeps steps from collapsing or exploding).
ASY_MIN = 0.01
ASY_MAX = 10.0

# Floor of the adaptive approximation weights in the globally convergent mode.
RAA_EPS = 1e-6

_NEWTON_MAX_ITER = 200
_LINESEARCH_MAX_ITER = 50


@dataclass(frozen=True)
class OptimizerConfig:
    """Hybrid optimizer parameters (defaults are the production values)."""

    epsimin: float = 1e-10
    raa0: float = 0.01
    albefa: float = 0.4
    asyinit: float = 0.05
    asyincr: float = 0.8
    asydecr: float = 0.6
    c: float = 1000.0
    d: float = 1.0
    a0: float = 1.0
    a: float = 0.0
    maxinnerit: int = 2
    move: float = 1.0
    switch: float = 2e-5
    max_outer: int = 1000


@dataclass
class MmaState:
    """Mutable per-run state: previous iterates and asymptotes."""

    xmin: np.ndarray
    xmax: np.ndarray
    cfg: OptimizerConfig = field(default_factory=OptimizerConfig)
    iteration: int = 0
    xold1: np.ndarray | None = None
    xold2: np.ndarray | None = None
    low: np.ndarray | None = None
    upp: np.ndarray | None = None


def _update_asymptotes(state: MmaState, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    cfg = state.cfg
    xrange = state.xmax - state.xmin
    if state.iteration <= 2 or state.xold2 is None:
        low = x - cfg.asyinit * xrange
        upp = x + cfg.asyinit * xrange
    else:
        trend = (x - state.xold1) * (state.xold1 - state.xold2)
        factor = np.ones_like(x)
        factor[trend > 0] = cfg.asyincr
        factor[trend < 0] = cfg.asydecr
        low = x - factor * (state.xold1 - state.low)
        upp = x + factor * (state.upp - state.xold1)
        low = np.clip(low, x - ASY_MAX * xrange, x - ASY_MIN * xrange)
        upp = np.clip(upp, x + ASY_MIN * xrange, x + ASY_MAX * xrange)
    return low, upp


def _move_bounds(cfg, x, low, upp, xmin, xmax):
    xrange = xmax - xmin
    alfa = np.maximum(np.maximum(low + cfg.albefa * (x - low), x - cfg.move * xrange), xmin)
    beta = np.minimum(np.minimum(upp - cfg.albefa * (upp - x), x + cfg.move * xrange), xmax)
    return alfa, beta


def _pq_terms(cfg, x, low, upp, xmin, xmax, df0, dfdx, raa0=None, raa=None):
    """Rational-approximation coefficients p0, q0 (objective), P, Q (constraints)."""
    xrange_inv = 1.0 / np.maximum(xmax - xmin, 1e-5)
    ux2 = (upp - x) ** 2
    xl2 = (x - low) ** 2
    r0 = cfg.raa0 if raa0 is None else raa0

    p0 = np.maximum(df0, 0.0)
    q0 = np.maximum(-df0, 0.0)
    pq0 = 0.001 * (p0 + q0) + r0 * xrange_inv
    p0 = (p0 + pq0) * ux2
    q0 = (q0 + pq0) * xl2

    dfdx = np.atleast_2d(dfdx)
    m = dfdx.shape[0]
    rc = np.full(m, cfg.raa0) if raa is None else np.asarray(raa, dtype=float)
    P = np.maximum(dfdx, 0.0)
    Q = np.maximum(-dfdx, 0.0)
    PQ = 0.001 * (P + Q) + rc[:, None] * xrange_inv[None, :]
    P = (P + PQ) * ux2[None, :]
    Q = (Q + PQ) * xl2[None, :]
    return p0, q0, P, Q


def subsolve(low, upp, alfa, beta, p0, q0, P, Q, b, cfg: OptimizerConfig):
    """Primal-dual Newton solve of the separable convex subproblem.

    minimize  sum(p0/(upp-x) + q0/(x-low)) + a0*z + sum(c*y + d*y^2/2)
    s.t.      sum(P_i/(upp-x) + Q_i/(x-low)) - a_i*z - y_i <= b_i,
              alfa <= x <= beta, y >= 0, z >= 0.

    Returns (x, y, z, lam, converged); the barrier parameter is driven down
    to ``cfg.epsimin``.
    """
    n = len(low)
    m = len(b)
    a0 = cfg.a0
    avec = np.full(m, cfg.a)
    cvec = np.full(m, cfg.c)
    dvec = np.full(m, cfg.d)

    x = 0.5 * (alfa + beta)
    y = np.ones(m)
    z = 1.0
    lam = np.ones(m)
    xsi = np.maximum(1.0 / (x - alfa), 1.0)
    eta = np.maximum(1.0 / (beta - x), 1.0)
    mu = np.maximum(1.0, 0.5 * cvec)
    zet = 1.0
    s = np.ones(m)
    converged = True

    epsi = 1.0
    while epsi > cfg.epsimin:
        residual, res_norm, res_max = _residuals(
            x, y, z, lam, xsi, eta, mu, zet, s, low, upp, alfa, beta,
            p0, q0, P, Q, b, a0, avec, cvec, dvec, epsi,
        )
        newton_it = 0
        while res_max > 0.9 * epsi and newton_it < _NEWTON_MAX_ITER:
            newton_it += 1
            ux1 = upp - x
            xl1 = x - low
            ux2 = ux1 * ux1
            xl2 = xl1 * xl1
            plam = p0 + P.T @ lam
            qlam = q0 + Q.T @ lam
            gvec = P @ (1.0 / ux1) + Q @ (1.0 / xl1)
            gg = P / ux2[None, :] - Q / xl2[None, :]
            dpsidx = plam / ux2 - qlam / xl2
            delx = dpsidx - epsi / (x - alfa) + epsi / (beta - x)
            dely = cvec + dvec * y - lam - epsi / y
            delz = a0 - avec @ lam - epsi / z
            dellam = gvec - avec * z - y - b + epsi / lam
            diagx = 2.0 * (plam / (ux2 * ux1) + qlam / (xl2 * xl1)) + xsi / (x - alfa) + eta / (beta - x)
            diagy = dvec + mu / y
            diaglamyi = s / lam + 1.0 / diagy

            # m is small here: solve the (m+1) x (m+1) condensed system.
            blam = dellam + dely / diagy - gg @ (delx / diagx)
            aa = np.zeros((m + 1, m + 1))
            aa[:m, :m] = np.diag(diaglamyi) + (gg / diagx[None, :]) @ gg.T
            aa[:m, m] = avec
            aa[m, :m] = avec
            aa[m, m] = -zet / z
            rhs = np.concatenate([blam, [delz]])
            try:
                sol = np.linalg.solve(aa, rhs)
            except np.linalg.LinAlgError:
                converged = False
                break
            dlam = sol[:m]
            dz = sol[m]
            dx = -delx / diagx - (gg.T @ dlam) / diagx
            dy = -dely / diagy + dlam / diagy
            dxsi = -xsi + epsi / (x - alfa) - (xsi * dx) / (x - alfa)
            deta = -eta + epsi / (beta - x) + (eta * dx) / (beta - x)
            dmu = -mu + epsi / y - (mu * dy) / y
            dzet = -zet + epsi / z - zet * dz / z
            ds = -s + epsi / lam - (s * dlam) / lam

            # longest feasible-ish step, then backtrack on the residual norm
            wvec = np.concatenate([y, [z], lam, xsi, eta, mu, [zet], s])
            dwvec = np.concatenate([dy, [dz], dlam, dxsi, deta, dmu, [dzet], ds])
            step_w = np.max(-1.01 * dwvec / wvec)
            step_a = np.max(-1.01 * dx / (x - alfa))
            step_b = np.max(1.01 * dx / (beta - x))
            steg = 1.0 / max(step_w, step_a, step_b, 1.0)

            old = (x.copy(), y.copy(), z, lam.copy(), xsi.copy(), eta.copy(), mu.copy(), zet, s.copy())
            res_new = 2.0 * res_norm
            ls_it = 0
            while res_new > res_norm and ls_it < _LINESEARCH_MAX_ITER:
                ls_it += 1
                x = old[0] + steg * dx
                y = old[1] + steg * dy
                z = old[2] + steg * dz
                lam = old[3] + steg * dlam
                xsi = old[4] + steg * dxsi
                eta = old[5] + steg * deta
                mu = old[6] + steg * dmu
                zet = old[7] + steg * dzet
                s = old[8] + steg * ds
                residual, res_new, res_max = _residuals(
                    x, y, z, lam, xsi, eta, mu, zet, s, low, upp, alfa, beta,
                    p0, q0, P, Q, b, a0, avec, cvec, dvec, epsi,
                )
                steg *= 0.5
            res_norm = res_new
        if res_max > 0.9 * epsi:
            converged = False
        epsi *= 0.1
    return x, y, z, lam, converged


def _residuals(x, y, z, lam, xsi, eta, mu, zet, s, low, upp, alfa, beta,
               p0, q0, P, Q, b, a0, avec, cvec, dvec, epsi):
    ux1 = upp - x
    xl1 = x - low
    plam = p0 + P.T @ lam
    qlam = q0 + Q.T @ lam
    gvec = P @ (1.0 / ux1) + Q @ (1.0 / xl1)
    rex = plam / (ux1 * ux1) - qlam / (xl1 * xl1) - xsi + eta
    rey = cvec + dvec * y - mu - lam
    rez = a0 - zet - avec @ lam
    relam = gvec - avec * z - y + s - b
    rexsi = xsi * (x - alfa) - epsi
    reeta = eta * (beta - x) - epsi
    remu = mu * y - epsi
    rezet = zet * z - epsi
    res = lam * s - epsi
    residual = np.concatenate([rex, rey, [rez], relam, rexsi, reeta, remu, [rezet], res])
    return residual, float(np.linalg.norm(residual)), float(np.max(np.abs(residual)))


def mma_step(state: MmaState, f0, df0, fval, dfdx, x) -> np.ndarray:
    """One standard outer iteration; updates asymptote memory in ``state``.

    If the subsolver stalls, the asymptotes are pulled halfway in and the
    subproblem is retried once; the retry result is accepted either way.
    """
    cfg = state.cfg
    state.iteration += 1
    x = np.asarray(x, dtype=float)
    fval = np.atleast_1d(np.asarray(fval, dtype=float))
    dfdx = np.atleast_2d(np.asarray(dfdx, dtype=float))

    low, upp = _update_asymptotes(state, x)
    for _ in range(2):
        alfa, beta = _move_bounds(cfg, x, low, upp, state.xmin, state.xmax)
        p0, q0, P, Q = _pq_terms(cfg, x, low, upp, state.xmin, state.xmax, df0, dfdx)
        bvec = P @ (1.0 / (upp - x)) + Q @ (1.0 / (x - low)) - fval
        xnew, _, _, _, ok = subsolve(low, upp, alfa, beta, p0, q0, P, Q, bvec, cfg)
        if ok:
            break
        low = x - 0.5 * (x - low)
        upp = x + 0.5 * (upp - x)

    state.xold2 = state.xold1
    state.xold1 = x.copy()
    state.low = low
    state.upp = upp
    return xnew


def gcmma_step(state: MmaState, f0, df0, fval, dfdx, x, evaluate) -> np.ndarray:
    """One globally-convergent outer iteration.

    ``evaluate(x) -> (f0, fval)`` supplies true function values for the
    conservativeness check. Inner iterations stiffen the approximation at
    most ``maxinnerit`` times; the last trial point is accepted regardless.
    """
    cfg = state.cfg
    state.iteration += 1
    x = np.asarray(x, dtype=float)
    fval = np.atleast_1d(np.asarray(fval, dtype=float))
    dfdx = np.atleast_2d(np.asarray(dfdx, dtype=float))
    m = dfdx.shape[0]

    low, upp = _update_asymptotes(state, x)
    xrange = np.maximum(state.xmax - state.xmin, 1e-5)
    n = len(x)
    raa0 = max(RAA_EPS, 0.1 / n * float(np.abs(df0) @ xrange))
    raa = np.maximum(RAA_EPS, 0.1 / n * np.abs(dfdx) @ xrange)

    alfa, beta = _move_bounds(cfg, x, low, upp, state.xmin, state.xmax)
    xnew = x
    for inner in range(cfg.maxinnerit):
        p0, q0, P, Q = _pq_terms(
            cfg, x, low, upp, state.xmin, state.xmax, df0, dfdx, raa0=raa0, raa=raa
        )
        ux1 = upp - x
        xl1 = x - low
        r0 = f0 - p0 @ (1.0 / ux1) - q0 @ (1.0 / xl1)
        r = fval - P @ (1.0 / ux1) - Q @ (1.0 / xl1)
        xnew, _, _, _, _ = subsolve(low, upp, alfa, beta, p0, q0, P, Q, -r, cfg)

        f0app = r0 + p0 @ (1.0 / (upp - xnew)) + q0 @ (1.0 / (xnew - low))
        fapp = r + P @ (1.0 / (upp - xnew)) + Q @ (1.0 / (xnew - low))
        f0new, fnew = evaluate(xnew)
        fnew = np.atleast_1d(np.asarray(fnew, dtype=float))
        conservative = f0app + 0.5 * cfg.epsimin >= f0new and np.all(
            fapp + 0.5 * cfg.epsimin >= fnew
        )
        if conservative or inner == cfg.maxinnerit - 1:
            break
        raa0, raa = _raise_raa(x, xnew, low, upp, xrange, f0new, f0app, fnew, fapp, raa0, raa)

    state.xold2 = state.xold1
    state.xold1 = x.copy()
    state.low = low
    state.upp = upp
    return xnew


def _raise_raa(x, xnew, low, upp, xrange, f0new, f0app, fnew, fapp, raa0, raa):
    """Stiffen approximation weights where the trial point overshot."""
    xxux = (xnew - x) / (upp - xnew)
    xxxl = (xnew - x) / (xnew - low)
    profile = float((xxux * xxxl) @ ((upp - low) / xrange))
    profile = max(profile, 1e-12)
    if f0new > f0app:
        raa0 = min(1.1 * (raa0 + (f0new - f0app) / profile), 10.0 * raa0)
    grow = fnew > fapp
    raised = np.minimum(1.1 * (raa + (fnew - fapp) / profile), 10.0 * raa)
    raa = np.where(grow, raised, raa)
    return raa0, raa


def detect_oscillation(history, switch: float = OptimizerConfig.switch) -> bool:
    """True when the objective has begun to flip sign in tiny relative steps.

    Needs at least three history entries; fires when the last two deltas
    have opposite signs and both are below ``switch`` in relative magnitude.
    """
    if len(history) < 3:
        return False
    f2, f1, f0 = history[-3], history[-2], history[-1]
    d1 = f1 - f2
    d2 = f0 - f1
    if d1 == 0.0 or d2 == 0.0 or (d1 > 0) == (d2 > 0):
        return False
    r1 = abs(d1) / max(abs(f1), 1e-30)
    r2 = abs(d2) / max(abs(f0), 1e-30)
    return r1 < switch and r2 < switch

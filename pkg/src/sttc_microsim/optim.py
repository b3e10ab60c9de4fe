"""Limited-memory BFGS with a strong-Wolfe line search.

Full-batch deterministic minimizer for smooth objectives: two-loop
recursion over a bounded curvature history, quadratic-interpolation
line search satisfying the strong Wolfe conditions, and a gradient-norm
stopping rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

_C1 = 1e-4
_C2 = 0.9
_MAX_LINE_EVALS = 25


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    grad_norm: float
    n_iter: int
    converged: bool
    message: str
    loss_history: list = field(default_factory=list)


def minimize_lbfgs(
    fun,
    x0,
    max_iter: int = 1000,
    history_size: int = 10,
    gtol: float = 1e-6,
) -> OptimizeResult:
    """Minimize ``fun(x) -> (value, gradient)`` starting from ``x0``.

    Iterates until the gradient 2-norm drops below ``gtol``, the line
    search stalls, or ``max_iter`` iterations have been taken.  Every
    accepted step satisfies the strong Wolfe conditions, so the recorded
    loss history is strictly decreasing.
    """
    x = np.asarray(x0, dtype=float).copy()
    f, g = fun(x)
    history: list[tuple[np.ndarray, np.ndarray, float]] = []
    losses = [float(f)]
    message = "converged"
    n_iter = 0
    while n_iter < max_iter:
        gnorm = float(np.linalg.norm(g))
        if gnorm <= gtol:
            break
        d = _direction(g, history)
        dg = float(d @ g)
        if dg >= 0:  # numerical breakdown of the history; fall back to steepest descent
            d = -g
            dg = -gnorm**2
        step0 = 1.0 if history else min(1.0, 1.0 / max(1.0, gnorm))
        found = _wolfe_search(fun, x, f, g, d, dg, step0)
        if found is None:
            message = "line search failed to make progress"
            break
        step, f_new, g_new = found
        s = step * d
        yv = g_new - g
        sy = float(s @ yv)
        if sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(yv):
            history.append((s, yv, 1.0 / sy))
            if len(history) > history_size:
                history.pop(0)
        x = x + s
        f, g = f_new, g_new
        losses.append(float(f))
        n_iter += 1
    else:
        message = "maximum iterations reached"
    gnorm = float(np.linalg.norm(g))
    return OptimizeResult(
        x=x,
        fun=float(f),
        grad_norm=gnorm,
        n_iter=n_iter,
        converged=gnorm <= gtol,
        message=message if gnorm > gtol else "converged",
        loss_history=losses,
    )


def _direction(g: np.ndarray, history) -> np.ndarray:
    """Two-loop recursion applying the implicit inverse Hessian."""
    q = g.copy()
    alphas = []
    for s, y, rho in reversed(history):
        a = rho * (s @ q)
        alphas.append(a)
        q -= a * y
    if history:
        s, y, _ = history[-1]
        q *= (s @ y) / (y @ y)
    for (s, y, rho), a in zip(history, reversed(alphas)):
        b = rho * (y @ q)
        q += (a - b) * s
    return -q


def _wolfe_search(fun, x, f0, g0, d, dphi0, step0):
    """Bracket-and-zoom strong-Wolfe line search along direction ``d``.

    Returns ``(step, f, g)`` at an acceptable point, or None on failure.
    """
    phi_prev, dphi_prev, a_prev = f0, dphi0, 0.0
    a = step0
    for i in range(_MAX_LINE_EVALS):
        f_a, g_a = fun(x + a * d)
        dphi_a = float(g_a @ d)
        if f_a > f0 + _C1 * a * dphi0 or (i > 0 and f_a >= phi_prev):
            return _zoom(fun, x, f0, dphi0, d, a_prev, phi_prev, dphi_prev, a, f_a)
        if abs(dphi_a) <= -_C2 * dphi0:
            return a, f_a, g_a
        if dphi_a >= 0:
            return _zoom(fun, x, f0, dphi0, d, a, f_a, dphi_a, a_prev, phi_prev)
        a_prev, phi_prev, dphi_prev = a, f_a, dphi_a
        a *= 2.0
    return None


def _zoom(fun, x, f0, dphi0, d, lo, phi_lo, dphi_lo, hi, phi_hi):
    for _ in range(_MAX_LINE_EVALS):
        span = hi - lo
        # Minimizer of the quadratic through (lo, phi_lo, dphi_lo) and (hi, phi_hi),
        # safeguarded away from the bracket ends; bisect when it degenerates.
        denom = 2.0 * (phi_hi - phi_lo - dphi_lo * span)
        if denom != 0:
            a = lo - dphi_lo * span * span / denom
        else:
            a = lo + 0.5 * span
        low, high = (lo, hi) if span > 0 else (hi, lo)
        margin = 0.1 * abs(span)
        if not (low + margin <= a <= high - margin):
            a = lo + 0.5 * span
        f_a, g_a = fun(x + a * d)
        dphi_a = float(g_a @ d)
        if f_a > f0 + _C1 * a * dphi0 or f_a >= phi_lo:
            hi, phi_hi = a, f_a
        else:
            if abs(dphi_a) <= -_C2 * dphi0:
                return a, f_a, g_a
            if dphi_a * span >= 0:
                hi, phi_hi = lo, phi_lo
            lo, phi_lo, dphi_lo = a, f_a, dphi_a
        if abs(hi - lo) < 1e-14 * max(1.0, abs(lo)):
            break
    return None

"""Limited-memory BFGS with a strong-Wolfe line search.

The search direction comes from the standard two-loop recursion; step
lengths are chosen by bracketing and cubic-interpolation zoom so that every
accepted step satisfies both strong Wolfe conditions.
"""
from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .mlp import NumericError

CURVATURE_GUARD = 1e-10


@dataclass(frozen=True)
class LbfgsConfig:
    memory: int = 10
    max_iterations: int = 100
    grad_tolerance: float = 1e-5
    wolfe_c1: float = 1e-4
    wolfe_c2: float = 0.9
    max_line_search_steps: int = 20

    def __post_init__(self):
        if not 0 < self.wolfe_c1 < self.wolfe_c2 < 1:
            raise ValueError("need 0 < c1 < c2 < 1")
        if self.memory < 1:
            raise ValueError("memory must be >= 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if self.max_line_search_steps < 1:
            raise ValueError("max_line_search_steps must be >= 1")


@dataclass(frozen=True)
class IterationRecord:
    iteration: int
    f: float
    grad_inf: float
    step: float
    # for auditing the Wolfe conditions of the step that produced this record
    f_prev: float
    slope_prev: float
    slope: float


@dataclass
class OptimizeResult:
    final_point: np.ndarray
    final_value: float
    final_grad_norm: float
    iterations_used: int
    termination: str
    function_evals: int = 0
    trace: list[IterationRecord] = field(default_factory=list)


def _checked(fun, x):
    f, g = fun(x)
    f = float(f)
    g = np.asarray(g, dtype=np.float64)
    if not math.isfinite(f) or not np.all(np.isfinite(g)):
        raise NumericError(f"non-finite objective or gradient at {x!r}")
    return f, g


def two_loop_direction(history, grad) -> np.ndarray:
    """Return ``-H @ grad`` for the inverse-Hessian approximation implied by ``history``.

    ``history`` holds ``(s, y)`` pairs oldest first. The initial matrix is
    ``gamma * I`` with ``gamma = s.y / y.y`` from the newest pair, or 1 when
    the history is empty.
    """
    g = np.asarray(grad, dtype=np.float64)
    if g.size == 0:
        raise ValueError("empty gradient")
    q = g.copy()
    history = list(history)
    rhos = [1.0 / float(s @ y) for s, y in history]
    alphas = []
    for (s, y), rho in zip(reversed(history), reversed(rhos)):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    if history:
        s, y = history[-1]
        gamma = float(s @ y) / float(y @ y)
    else:
        gamma = 1.0
    r = gamma * q
    for (s, y), rho, a in zip(history, rhos, reversed(alphas)):
        b = rho * float(y @ r)
        r += (a - b) * s
    return -r


def _cubic_min(x1, f1, g1, x2, f2, g2, lo, hi):
    """Minimizer of the cubic through two points with slopes, clipped to [lo, hi]."""
    d1 = g1 + g2 - 3 * (f1 - f2) / (x1 - x2)
    d2_sq = d1 * d1 - g1 * g2
    if d2_sq >= 0:
        d2 = math.sqrt(d2_sq)
        if x1 <= x2:
            t = x2 - (x2 - x1) * ((g2 + d2 - d1) / (g2 - g1 + 2 * d2))
        else:
            t = x1 - (x1 - x2) * ((g1 + d2 - d1) / (g1 - g2 + 2 * d2))
        if math.isfinite(t):
            return min(max(t, lo), hi)
    return (lo + hi) / 2


def strong_wolfe(fun, x, f0, g0, d, alpha0, c1=1e-4, c2=0.9, max_steps=20):
    """Find a step length satisfying the strong Wolfe conditions along ``d``.

    ``fun`` returns ``(value, gradient)``. Returns ``(alpha, f, g, n_evals, ok)``;
    when ``ok`` is False the point returned is the lowest one seen, which
    may be ``alpha = 0``.
    """
    slope0 = float(g0 @ d)
    if slope0 >= 0:
        raise ValueError("d is not a descent direction")
    evals = 0
    best = (0.0, f0, g0)

    def trial(a):
        nonlocal evals, best
        f, g = _checked(fun, x + a * d)
        evals += 1
        if f < best[1]:
            best = (a, f, g)
        return (a, f, float(g @ d), g)

    def armijo_fails(pt):
        return pt[1] > f0 + c1 * pt[0] * slope0

    def curvature_ok(pt):
        return abs(pt[2]) <= -c2 * slope0

    def zoom(lo, hi):
        # invariant: lo satisfies sufficient decrease and has the lowest f so far
        while evals < max_steps:
            left, right = sorted((lo[0], hi[0]))
            width = right - left
            if width <= 1e-14 * max(1.0, right):
                return None
            a = _cubic_min(lo[0], lo[1], lo[2], hi[0], hi[1], hi[2], left + 0.1 * width, right - 0.1 * width)
            pt = trial(a)
            if armijo_fails(pt) or pt[1] >= lo[1]:
                hi = pt
            else:
                if curvature_ok(pt):
                    return pt
                if pt[2] * (hi[0] - lo[0]) >= 0:
                    hi = lo
                lo = pt
        return None

    prev = (0.0, f0, slope0, g0)
    a = alpha0
    found = None
    while evals < max_steps:
        pt = trial(a)
        if armijo_fails(pt) or (evals > 1 and pt[1] >= prev[1]):
            found = zoom(prev, pt)
            break
        if curvature_ok(pt):
            found = pt
            break
        if pt[2] >= 0:
            found = zoom(pt, prev)
            break
        # still descending: extrapolate
        a = _cubic_min(prev[0], prev[1], prev[2], pt[0], pt[1], pt[2], a + 0.01 * (a - prev[0]), 10 * a)
        prev = pt
    if found is not None:
        return found[0], found[1], found[3], evals, True
    a, f, g = best
    return a, f, g, evals, False


def minimize(
    objective: Callable[[np.ndarray], float],
    gradient: Optional[Callable[[np.ndarray], np.ndarray]],
    x0,
    config: LbfgsConfig = LbfgsConfig(),
    trace_path=None,
    callback=None,
) -> OptimizeResult:
    """Minimize ``objective`` from ``x0``.

    If ``gradient`` is None, ``objective`` must return ``(value, gradient)``
    in one call, which avoids a second forward pass for network losses.
    Iterations count outer L-BFGS steps, not function evaluations.
    ``callback(iteration, x)`` is called after every accepted step.
    """
    if gradient is None:
        fun = objective
    else:
        def fun(x):
            return objective(x), gradient(x)

    x = np.array(x0, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise NumericError(f"non-finite starting point {x!r}")
    f, g = _checked(fun, x)
    evals = 1
    history: deque = deque(maxlen=config.memory)
    trace: list[IterationRecord] = []
    termination = "iteration-cap"
    it = 0
    while True:
        gnorm = float(np.max(np.abs(g))) if g.size else 0.0
        if gnorm <= config.grad_tolerance:
            termination = "converged"
            break
        if it >= config.max_iterations:
            termination = "iteration-cap"
            break
        d = two_loop_direction(history, g)
        slope = float(g @ d)
        if not slope < 0:
            # lost descent (should not happen with guarded pairs); restart
            history.clear()
            d = -g
            slope = float(g @ d)
        if history:
            alpha0 = 1.0
        else:
            alpha0 = min(1.0, 1.0 / float(np.sum(np.abs(g))))
        alpha, f_new, g_new, n, ok = strong_wolfe(
            fun, x, f, g, d, alpha0,
            config.wolfe_c1, config.wolfe_c2, config.max_line_search_steps,
        )
        evals += n
        if not ok:
            if alpha > 0:
                x = x + alpha * d
                f, g = f_new, g_new
            termination = "line-search-failure"
            break
        it += 1
        s = alpha * d
        y = g_new - g
        sy = float(s @ y)
        if sy > CURVATURE_GUARD * float(np.linalg.norm(s)) * float(np.linalg.norm(y)):
            history.append((s, y))
        trace.append(IterationRecord(
            it, f_new, float(np.max(np.abs(g_new))), alpha, f, slope, float(g_new @ d)
        ))
        x = x + s
        f, g = f_new, g_new
        if callback is not None:
            callback(it, x)

    result = OptimizeResult(
        final_point=x,
        final_value=f,
        final_grad_norm=float(np.max(np.abs(g))) if g.size else 0.0,
        iterations_used=it,
        termination=termination,
        function_evals=evals,
        trace=trace,
    )
    if trace_path is not None:
        write_trace(result.trace, trace_path)
    return result


def write_trace(trace, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["iteration", "f", "grad_inf", "step"])
        for rec in trace:
            writer.writerow([rec.iteration, repr(rec.f), repr(rec.grad_inf), repr(rec.step)])

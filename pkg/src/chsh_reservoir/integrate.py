"""Adaptive Dormand-Prince 5(4) integrator with cubic Hermite dense output.

Works on arrays of any shape.  Error control uses the max norm over all
entries, so stacked independent trajectories share one step sequence and a
step is accepted only when every trajectory meets the tolerance.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# Dormand & Prince (1980) tableau
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4

SAFETY = 0.9
MIN_FACTOR = 0.2
MAX_FACTOR = 5.0


class IntegrationError(RuntimeError):
    def __init__(self, message: str, tau: float):
        super().__init__(f"{message} (reached tau = {tau:.12g})")
        self.tau = tau


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-9
    abs_tol: float = 1e-12
    max_step: float = 0.01
    initial_step: float = 1e-4

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "initial_step"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)}")
        if self.rel_tol < 1e-14:
            raise ValueError(f"rel_tol {self.rel_tol} is below achievable precision (1e-14)")


def _hermite(t0, t1, y0, y1, f0, f1, t):
    h = t1 - t0
    s = (t - t0) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y0 + h10 * h * f0 + h01 * y1 + h11 * h * f1


def integrate(f: Callable[[float, np.ndarray], np.ndarray], y0: np.ndarray, t_eval,
              cfg: IntegratorConfig = IntegratorConfig(),
              observe: Callable[[float, np.ndarray], np.ndarray] | None = None) -> np.ndarray:
    """Integrate ``dy/dt = f(t, y)`` and return ``y`` at each time in ``t_eval``.

    ``t_eval`` must be ascending; integration starts at ``t_eval[0]``.  If
    ``observe(t, y)`` is given, its (fixed-shape) result is stored instead
    of ``y``.
    """
    t_eval = np.asarray(t_eval, dtype=float)
    if t_eval.ndim != 1 or t_eval.size == 0:
        raise ValueError("t_eval must be a non-empty 1-D sequence")
    if np.any(np.diff(t_eval) < 0):
        raise ValueError("t_eval must be ascending")

    y = np.array(y0, dtype=complex if np.iscomplexobj(y0) else float)
    observe = observe or (lambda _t, v: v)
    out = None

    def store(i, te, v):
        nonlocal out
        val = np.asarray(observe(te, v))
        if out is None:
            out = np.empty((t_eval.size,) + val.shape, dtype=val.dtype)
        out[i] = val


    t = float(t_eval[0])
    t_end = float(t_eval[-1])
    store(0, t, y)
    idx = 1
    fy = f(t, y)
    h = min(cfg.initial_step, cfg.max_step)
    k = [None] * 7

    while idx < t_eval.size:
        if t_end - t <= 0:
            # remaining samples coincide with the current time
            while idx < t_eval.size:
                store(idx, t, y)
                idx += 1
            break
        h = min(h, cfg.max_step)
        # absorb a sliver below the underflow limit into the final step
        last = t + h >= t_end - 1e-12 * max(1.0, abs(t_end))
        if last:
            h = t_end - t
        if h < 1e-14 * max(1.0, abs(t)):
            raise IntegrationError("step size underflow", t)

        k[0] = fy
        for i in range(1, 7):
            acc = y + h * sum(a * k[j] for j, a in enumerate(_A[i]) if a != 0.0)
            k[i] = f(t + _C[i] * h, acc)
        y_new = y + h * sum(b * k[j] for j, b in enumerate(_B5) if b != 0.0)
        err = h * sum(e * k[j] for j, e in enumerate(_E) if e != 0.0)

        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        # max norm: padding entries that stay exactly zero must not dilute the error
        err_norm = float(np.max(np.abs(err) / scale))
        if not np.isfinite(err_norm):
            raise IntegrationError("non-finite state", t)

        if err_norm <= 1.0:
            t_new = t_end if last else t + h
            f_new = k[6]  # FSAL
            while idx < t_eval.size and t_eval[idx] <= t_new:
                te = t_eval[idx]
                y_out = y_new if te == t_new else _hermite(t, t_new, y, y_new, fy, f_new, te)
                store(idx, te, y_out)
                idx += 1
            t, y, fy = t_new, y_new, f_new
            factor = MAX_FACTOR if err_norm == 0 else min(MAX_FACTOR, SAFETY * err_norm ** -0.2)
        else:
            factor = max(MIN_FACTOR, SAFETY * err_norm ** -0.2)
        h *= factor

    return out

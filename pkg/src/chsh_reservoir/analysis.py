"""Sweeps of the maximal CHSH value over scaled time and relative coupling.

Two interchangeable models produce B(tau) for a given r1:

``"analytic"``  exact single-excitation solution (no spontaneous emission)
``"lindblad"``  pseudomode master equation, with optional spontaneous emission
"""
from __future__ import annotations

import bisect
import logging
from dataclasses import dataclass, field
from typing import Callable, Iterator, NamedTuple, Sequence

import numpy as np

from . import analytic, pseudomode
from .analytic import Amplitudes, PSI_10
from .bell import chsh_values
from .integrate import IntegrationError, IntegratorConfig, integrate
from .params import regime

log = logging.getLogger(__name__)

MODELS = ("analytic", "lindblad")
BISECT_TOL = 1e-6
MIN_WIDTH = 1e-6


def _default_r1_values() -> tuple[float, ...]:
    return tuple(round(0.01 * k, 2) for k in range(1, 100))


@dataclass(frozen=True)
class SweepGrid:
    tau_max: float = 20.0
    tau_steps: int = 2000
    r1_values: tuple[float, ...] = field(default_factory=_default_r1_values)

    def __post_init__(self):
        if not self.tau_max > 0:
            raise ValueError(f"tau_max must be positive, got {self.tau_max}")
        if int(self.tau_steps) != self.tau_steps or self.tau_steps < 2:
            raise ValueError(f"tau_steps must be an integer >= 2, got {self.tau_steps}")
        r1 = tuple(float(x) for x in self.r1_values)
        if not r1:
            raise ValueError("r1_values is empty")
        if any(not 0.0 < x < 1.0 for x in r1):
            raise ValueError("r1 values must lie strictly inside (0, 1)")
        if any(b <= a for a, b in zip(r1, r1[1:])):
            raise ValueError("r1 values must be strictly ascending")
        object.__setattr__(self, "r1_values", r1)
        object.__setattr__(self, "tau_steps", int(self.tau_steps))

    @classmethod
    def from_range(cls, r1_min: float = 0.01, r1_max: float = 0.99, r1_steps: int = 99,
                   tau_max: float = 20.0, tau_steps: int = 2000) -> "SweepGrid":
        if r1_steps < 1:
            raise ValueError(f"r1_steps must be >= 1, got {r1_steps}")
        if r1_steps == 1:
            values = (float(r1_min),)
        else:
            values = tuple(float(x) for x in np.round(np.linspace(r1_min, r1_max, r1_steps), 12))
        return cls(tau_max, tau_steps, values)

    @property
    def taus(self) -> np.ndarray:
        return np.linspace(0.0, self.tau_max, self.tau_steps + 1)


class SweepRow(NamedTuple):
    tau: float
    r1: float
    B: float
    violation: float


@dataclass(frozen=True, eq=False)
class SweepResult:
    """B on a (r1, tau) grid; ``B[i, j]`` belongs to ``r1_values[i]``, ``taus[j]``."""

    taus: np.ndarray
    r1_values: tuple[float, ...]
    B: np.ndarray

    @property
    def violation(self) -> np.ndarray:
        return np.maximum(0.0, self.B - 2.0)

    def rows(self) -> Iterator[SweepRow]:
        """Rows in r1-major, then tau order."""
        taus = self.taus.tolist()
        for r1, series in zip(self.r1_values, self.B.tolist()):
            for tau, b in zip(taus, series):
                yield SweepRow(tau, r1, b, max(0.0, b - 2.0))

    def __len__(self) -> int:
        return self.B.size


@dataclass(frozen=True)
class ViolationIntervals:
    """Disjoint, ascending (tau_start, tau_end) intervals with B > 2 inside."""

    intervals: tuple[tuple[float, float], ...] = ()

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)

    def __getitem__(self, i):
        return self.intervals[i]


class ThresholdError(ValueError):
    """Invalid bracket or a detected breakdown of monotonicity."""


# --- B(tau) traces -------------------------------------------------------

class BellTrace:
    """B sampled on a tau grid plus a continuous evaluator for refinement."""

    def __init__(self, taus: np.ndarray, B: np.ndarray, evaluate: Callable[[float], float]):
        self.taus = taus
        self.B = B
        self._evaluate = evaluate

    def __call__(self, tau: float) -> float:
        return self._evaluate(tau)


def _check_model(model: str, gamma_ratio: float):
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")
    if model == "analytic" and gamma_ratio != 0:
        raise ValueError("the analytic model has no spontaneous emission; use model='lindblad'")


def _analytic_trace(S, r1, taus, psi0):
    params, _ = regime(S, r1)

    def evaluate(tau):
        return float(chsh_values(analytic.state_at(float(tau), psi0, params)))

    B = chsh_values(analytic.state_at(taus, psi0, params))
    return BellTrace(taus, B, evaluate)


def _lindblad_trace(S, r1, gamma_ratio, taus, psi0, cfg, fock_cutoff):
    params, decay = regime(S, r1, gamma_ratio)
    gen = pseudomode.build_generator(params, decay, fock_cutoff)
    states = pseudomode.evolve(pseudomode.product_state(psi0, fock_cutoff), gen, taus, cfg)
    B = chsh_values(pseudomode.reduce_qubits(states))
    grid = taus.tolist()

    def evaluate(tau):
        k = max(0, bisect.bisect_right(grid, tau) - 1)
        if tau == grid[k]:
            return float(B[k])
        rho = pseudomode.evolve(states[k], gen, [grid[k], tau], cfg)[-1]
        return float(chsh_values(pseudomode.reduce_qubits(rho)))

    return BellTrace(taus, B, evaluate)


def bell_trace(model: str, S: float, r1: float, taus, gamma_ratio: float = 0.0,
               psi0: Amplitudes = PSI_10, cfg: IntegratorConfig | None = None,
               fock_cutoff: int = 1) -> BellTrace:
    """B(tau) at one r1 on the grid ``taus``."""
    _check_model(model, gamma_ratio)
    taus = np.asarray(taus, dtype=float)
    if model == "analytic":
        return _analytic_trace(S, r1, taus, psi0)
    try:
        return _lindblad_trace(S, r1, gamma_ratio, taus, psi0, cfg or IntegratorConfig(), fock_cutoff)
    except IntegrationError as exc:
        raise IntegrationError(f"r1 = {r1}: {exc}", exc.tau) from exc


# --- sweeps --------------------------------------------------------------

def sweep(model: str, grid: SweepGrid, S: float = 10.0, gamma_ratio: float = 0.0,
          psi0: Amplitudes = PSI_10, cfg: IntegratorConfig | None = None,
          fock_cutoff: int = 1) -> SweepResult:
    """B over every (r1, tau) point of ``grid``.

    The lindblad model integrates all r1 trajectories together with a shared
    adaptive step and only keeps the reduced Bell values.
    """
    _check_model(model, gamma_ratio)
    taus = grid.taus
    r1s = grid.r1_values
    if model == "analytic":
        B = np.stack([_analytic_trace(S, r1, taus, psi0).B for r1 in r1s])
        return SweepResult(taus, r1s, B)

    cfg = cfg or IntegratorConfig()
    pairs = [regime(S, r1, gamma_ratio) for r1 in r1s]
    gen = pseudomode.build_generator_batch([p for p, _ in pairs], pairs[0][1], fock_cutoff)
    rho0 = np.broadcast_to(pseudomode.product_state(psi0, fock_cutoff), (len(r1s), gen.dim, gen.dim))

    def observe(_t, rho):
        return chsh_values(pseudomode.reduce_qubits(pseudomode.hermitian_part(rho)))

    try:
        B = integrate(lambda _t, rho: pseudomode.rhs(rho, gen), rho0, taus, cfg,
                      observe=observe)
    except IntegrationError as exc:
        raise IntegrationError(f"sweep over r1 in [{r1s[0]}, {r1s[-1]}]: {exc}", exc.tau) from exc
    return SweepResult(taus, r1s, np.ascontiguousarray(B.T))


# --- analysis ------------------------------------------------------------

def _refine(f: Callable[[float], float], lo: float, hi: float, lo_in: bool, tol: float) -> float:
    """Bisect for the B = 2 crossing in [lo, hi]; ``lo_in`` says whether B(lo) > 2."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) > 2.0) == lo_in:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _linear_crossing(t0, t1, b0, b1):
    return t0 + (2.0 - b0) * (t1 - t0) / (b1 - b0)


def violation_intervals(taus, B, model: Callable[[float], float] | None = None,
                        tol: float = BISECT_TOL, min_width: float = MIN_WIDTH) -> ViolationIntervals:
    """Maximal tau intervals on which B > 2.

    Crossings between samples are refined by bisection on ``model`` (a
    continuous B(tau)); without a model they are linearly interpolated.
    """
    taus = np.asarray(taus, dtype=float)
    B = np.asarray(B, dtype=float)
    if taus.size < 2 or taus.shape != B.shape:
        raise ValueError("need matching tau and B series with at least two samples")
    inside = B > 2.0
    edges = np.diff(inside.astype(np.int8))
    starts = list(np.nonzero(edges == 1)[0] + 1)
    ends = list(np.nonzero(edges == -1)[0])
    if inside[0]:
        starts.insert(0, 0)
    if inside[-1]:
        ends.append(taus.size - 1)

    def crossing(i):
        # between samples i and i + 1
        if model is None:
            return _linear_crossing(taus[i], taus[i + 1], B[i], B[i + 1])
        return _refine(model, float(taus[i]), float(taus[i + 1]), bool(inside[i]), tol)

    out = []
    for s, e in zip(starts, ends):
        t0 = float(taus[0]) if s == 0 else crossing(s - 1)
        t1 = float(taus[-1]) if e == taus.size - 1 else crossing(e)
        if t1 - t0 >= min_width:
            out.append((t0, t1))
    return ViolationIntervals(tuple(out))


def trace_intervals(trace: BellTrace, tol: float = BISECT_TOL) -> ViolationIntervals:
    return violation_intervals(trace.taus, trace.B, trace, tol)


def count_revivals(intervals: ViolationIntervals) -> int:
    """Violation intervals after the first one."""
    return max(0, len(intervals) - 1)


def max_violation(rows: Sequence[SweepRow]) -> tuple[float, float, float]:
    """(B*, tau*, r1*) of the largest B; ties go to smaller tau, then smaller r1."""
    best = None
    for row in rows:
        key = (-row.B, row.tau, row.r1)
        if best is None or key < best:
            best = key
    if best is None:
        raise ValueError("max_violation of an empty row set")
    return -best[0], best[1], best[2]


# --- spontaneous emission threshold --------------------------------------

class ThresholdResult(NamedTuple):
    gamma_star_over_gamma0: float
    bracket_width: float
    evaluations: tuple[tuple[float, float], ...]  # (gamma/gamma0, V) pairs


def max_margin(S: float, grid: SweepGrid, gamma_ratio: float, psi0: Amplitudes = PSI_10,
               cfg: IntegratorConfig | None = None, fock_cutoff: int = 1) -> float:
    """V(gamma) = max over the grid of B - 2 with gamma1 = gamma2 = gamma."""
    res = sweep("lindblad", grid, S, gamma_ratio, psi0, cfg, fock_cutoff)
    return float(np.max(res.B) - 2.0)


def find_threshold(S: float = 10.0, grid: SweepGrid | None = None,
                   bracket: tuple[float, float] = (0.0, 0.3), tol: float = 1e-3,
                   psi0: Amplitudes = PSI_10, cfg: IntegratorConfig | None = None,
                   fock_cutoff: int = 1, atol: float = 1e-12,
                   monotone_tol: float = 1e-9) -> ThresholdResult:
    """Smallest gamma_S/gamma0 beyond which B <= 2 everywhere on ``grid``.

    Bisection assumes V(gamma) is non-increasing; every evaluation is checked
    against that assumption and a ThresholdError is raised when it fails.
    ``atol`` absorbs rounding when deciding V > 0.
    """
    grid = grid or SweepGrid.from_range(0.05, 0.95, 19)
    lo, hi = map(float, bracket)
    if not (0.0 <= lo < hi):
        raise ThresholdError(f"degenerate bracket {bracket}")
    evals: dict[float, float] = {}

    def V(g):
        v = max_margin(S, grid, g, psi0, cfg, fock_cutoff)
        evals[g] = v
        log.debug("threshold: gamma/gamma0 = %.6g -> V = %.6g", g, v)
        pts = sorted(evals.items())
        for (g_a, v_a), (g_b, v_b) in zip(pts, pts[1:]):
            if v_b > v_a + monotone_tol:
                raise ThresholdError(
                    f"maximal violation is not monotone in gamma: V({g_a:.6g}) = {v_a:.3g} "
                    f"< V({g_b:.6g}) = {v_b:.3g}")
        return v

    if not V(lo) > atol:
        raise ThresholdError(f"no violation at the lower end gamma/gamma0 = {lo}")
    if V(hi) > atol:
        raise ThresholdError(f"still violating at the upper end gamma/gamma0 = {hi}")
    while hi - lo >= tol:
        mid = 0.5 * (lo + hi)
        if V(mid) > atol:
            lo = mid
        else:
            hi = mid
    return ThresholdResult(0.5 * (lo + hi), hi - lo, tuple(sorted(evals.items())))

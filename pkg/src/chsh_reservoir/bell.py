"""Maximal CHSH value of two-qubit states.

Two independent routes:

* ``chsh_max_xstate``: closed form for X states (only diagonal and
  anti-diagonal entries), from the three eigenvalues of T^T T,
      u1 = (rho11 + rho44 - rho22 - rho33)^2
      u2 = 4 (|rho23| + |rho14|)^2
      u3 = 4 (|rho23| - |rho14|)^2
  and B = 2 sqrt(max_{i<j} u_i + u_j).
* ``chsh_max_horodecki``: B = 2 sqrt(m1 + m2) with m1, m2 the two largest
  eigenvalues of T^T T, T_ij = tr(rho sigma_i (x) sigma_j), valid for any
  two-qubit state.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .jacobi import jacobi_eigh
from .states import PAULIS

TSIRELSON = 2.0 * math.sqrt(2.0)
X_TOL = 1e-10

_PAIRS = ((0, 1), (0, 2), (1, 2))
_X_MASK = np.ones((4, 4), dtype=bool)
for _i in range(4):
    _X_MASK[_i, _i] = _X_MASK[_i, 3 - _i] = False

_PAULI_KRON = np.array([[np.kron(a, b) for b in PAULIS] for a in PAULIS])


class BellResult(NamedTuple):
    B: float
    pair: tuple[int, int]  # 1-based indices of the terms attaining the maximum
    violation: float


class NotXStateError(ValueError):
    """The state has coherences outside the X pattern."""


def _result(B: float, pair) -> BellResult:
    return BellResult(B, pair, max(0.0, B - 2.0))


def is_x_state(rho: np.ndarray, tol: float = X_TOL) -> bool:
    return bool(np.all(np.abs(np.asarray(rho)[_X_MASK]) < tol))


def xstate_terms(rho: np.ndarray) -> np.ndarray:
    """The three u terms for an X state; batched over leading axes."""
    rho = np.asarray(rho)
    d = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
    a23 = np.abs(rho[..., 1, 2])
    a14 = np.abs(rho[..., 0, 3])
    u1 = (d[..., 0] + d[..., 3] - d[..., 1] - d[..., 2]) ** 2
    u2 = 4.0 * (a23 + a14) ** 2
    u3 = 4.0 * (a23 - a14) ** 2
    return np.stack([u1, u2, u3], axis=-1)


def chsh_xstate_values(rho: np.ndarray) -> np.ndarray:
    """Vectorised B for a stack of X states (no structure check)."""
    u = xstate_terms(rho)
    sums = np.stack([u[..., i] + u[..., j] for i, j in _PAIRS], axis=-1)
    return 2.0 * np.sqrt(np.maximum(np.max(sums, axis=-1), 0.0))


def chsh_max_xstate(rho: np.ndarray) -> BellResult:
    rho = np.asarray(rho)
    if rho.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {rho.shape}")
    if not is_x_state(rho):
        worst = np.max(np.abs(rho[_X_MASK]))
        raise NotXStateError(f"coherence {worst:.3g} outside the X pattern; use chsh_max_horodecki")
    u = xstate_terms(rho)
    best, pair = -math.inf, None
    for i, j in _PAIRS:
        s = u[i] + u[j]
        if s > best:
            best, pair = s, (i + 1, j + 1)
    return _result(2.0 * math.sqrt(max(best, 0.0)), pair)


def correlation_matrix(rho: np.ndarray) -> np.ndarray:
    """T_ij = tr(rho sigma_i (x) sigma_j)."""
    return np.real(np.einsum("ab,ijba->ij", np.asarray(rho), _PAULI_KRON))


def chsh_max_horodecki(rho: np.ndarray) -> BellResult:
    t = correlation_matrix(rho)
    w, _ = jacobi_eigh(t.T @ t)
    # eigenvalues come back ascending
    m = max(w[1] + w[2], 0.0)
    return _result(2.0 * math.sqrt(m), (2, 3))


def chsh_max(rho: np.ndarray) -> BellResult:
    """Closed form when the X structure holds, Horodecki otherwise."""
    return chsh_max_xstate(rho) if is_x_state(rho) else chsh_max_horodecki(rho)


def chsh_values(rho: np.ndarray) -> np.ndarray:
    """B for a stack of two-qubit states (..., 4, 4), routed like ``chsh_max``."""
    rho = np.asarray(rho)
    if rho.ndim == 2:
        return np.asarray(chsh_max(rho).B)
    out = chsh_xstate_values(rho)
    off = np.all(np.abs(rho[..., _X_MASK]) < X_TOL, axis=-1)
    for idx in zip(*np.nonzero(~off)):
        out[idx] = chsh_max_horodecki(rho[idx]).B
    return out


def violation_margin(rho: np.ndarray) -> float:
    return chsh_max(rho).violation


def chsh_expectation(rho: np.ndarray, a, a2, b, b2) -> np.ndarray:
    """CHSH expectation for (batches of) unit measurement directions.

    Evaluates <A(x)B> + <A(x)B'> + <A'(x)B> - <A'(x)B'> from operator traces,
    without going through the correlation matrix.
    """
    rho4 = np.asarray(rho).reshape(2, 2, 2, 2)

    def obs(n):
        return np.einsum("...k,kij->...ij", np.asarray(n, dtype=float), np.array(PAULIS))

    A, A2, Bo, B2 = obs(a), obs(a2), obs(b), obs(b2)

    def corr(x, y):
        # tr(rho (x (x) y)) = sum rho[i j, k l] x[k, i] y[l, j]
        return np.real(np.einsum("ijkl,...ki,...lj->...", rho4, x, y))

    return corr(A, Bo) + corr(A, B2) + corr(A2, Bo) - corr(A2, B2)


def brute_force_chsh(rho: np.ndarray, n_settings: int, rng: np.random.Generator,
                     chunk: int = 100_000) -> float:
    """Largest |CHSH| over random measurement directions on the Bloch sphere."""
    best = 0.0
    for start in range(0, n_settings, chunk):
        n = min(chunk, n_settings - start)
        dirs = rng.normal(size=(4, n, 3))
        dirs /= np.linalg.norm(dirs, axis=-1, keepdims=True)
        val = chsh_expectation(rho, *dirs)
        best = max(best, float(np.max(np.abs(val))))
    return best


__all__ = [
    "BellResult", "NotXStateError", "TSIRELSON", "brute_force_chsh", "chsh_expectation",
    "chsh_max", "chsh_max_horodecki", "chsh_max_xstate", "chsh_values", "chsh_xstate_values",
    "correlation_matrix", "is_x_state", "violation_margin", "xstate_terms",
]

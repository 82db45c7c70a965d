"""Exact single-excitation dynamics of two qubits sharing a Lorentzian reservoir.

In the basis of coupling-weighted states

    psi_minus = r2 |10> - r1 |01>    (sub-radiant, decoupled)
    psi_plus  = r1 |10> + r2 |01>    (super-radiant)

only the super-radiant component decays, with the memory amplitude E(tau).
All functions accept scalar or array ``tau``.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from .params import DerivedParams

NORM_TOL = 1e-12
DEGENERATE_TOL = 1e-12


class Amplitudes(NamedTuple):
    """Amplitudes of |10> and |01> in the single-excitation state."""

    c1: complex
    c2: complex


class InitialProjection(NamedTuple):
    beta_minus: complex
    beta_plus: complex


PSI_10 = Amplitudes(1.0, 0.0)
PSI_01 = Amplitudes(0.0, 1.0)


def psi_minus(r1: float) -> Amplitudes:
    r2 = math.sqrt(1.0 - r1 * r1)
    return Amplitudes(r2, -r1)


def psi_plus(r1: float) -> Amplitudes:
    r2 = math.sqrt(1.0 - r1 * r1)
    return Amplitudes(r1, r2)


def memory_amplitude(tau, params: DerivedParams):
    """E(tau) = e^{-tau/2} [cosh(w tau/2) + sinh(w tau/2)/w], w = Omega/lam.

    ``w`` is taken as the complex square root of the signed ``Omega^2`` so
    the oscillatory regime needs no separate branch.  The exponential form
    below is algebraically identical and does not overflow for long times.
    """
    tau = np.asarray(tau, dtype=float)
    w_sq = params.omega_sq / params.lam**2
    if abs(w_sq) < DEGENERATE_TOL:
        out = np.exp(-0.5 * tau) * (1.0 + 0.5 * tau)
        return out if out.ndim else float(out)
    w = np.sqrt(complex(w_sq))
    val = 0.5 * ((1 + 1 / w) * np.exp(0.5 * (w - 1) * tau)
                 + (1 - 1 / w) * np.exp(-0.5 * (w + 1) * tau))
    imag = np.max(np.abs(np.imag(val))) if np.size(val) else 0.0
    if imag > 1e-12:
        raise ArithmeticError(f"E(tau) acquired imaginary part {imag:.3g}")
    out = np.real(val)
    return out if out.ndim else float(out)


def project_initial(r1: float, psi0: Amplitudes) -> InitialProjection:
    """Project a normalized single-excitation state onto psi_minus / psi_plus."""
    c1, c2 = complex(psi0[0]), complex(psi0[1])
    norm = abs(c1) ** 2 + abs(c2) ** 2
    if abs(norm - 1.0) > NORM_TOL:
        raise ValueError(f"initial state must be normalized in span{{|10>,|01>}}, norm is {norm}")
    if not 0.0 <= r1 <= 1.0:
        raise ValueError(f"r1 must lie in [0, 1], got {r1}")
    r2 = math.sqrt(1.0 - r1 * r1)
    return InitialProjection(r2 * c1 - r1 * c2, r1 * c1 + r2 * c2)


def amplitudes_at(tau, proj: InitialProjection, params: DerivedParams) -> Amplitudes:
    r1, r2 = params.r1, params.r2
    e = memory_amplitude(tau, params)
    bm, bp = proj
    return Amplitudes(r2 * bm + r1 * bp * e, -r1 * bm + r2 * bp * e)


def evolve_amplitudes(tau, psi0: Amplitudes, params: DerivedParams) -> Amplitudes:
    """Same as ``amplitudes_at`` but anchored on ``psi0``.

    Uses c(tau) = c(0) + (r1, r2) beta_plus (E - 1), algebraically identical
    to the beta decomposition and exact at tau = 0 (no 1 - r1^2 - r2^2
    rounding).
    """
    proj = project_initial(params.r1, psi0)
    shift = proj.beta_plus * (memory_amplitude(tau, params) - 1.0)
    return Amplitudes(complex(psi0[0]) + params.r1 * shift, complex(psi0[1]) + params.r2 * shift)


def density_matrix(amps: Amplitudes) -> np.ndarray:
    """Two-qubit density matrix in {|11>,|10>,|01>,|00>}; batched over array amplitudes."""
    c1 = np.asarray(amps[0], dtype=complex)
    c2 = np.asarray(amps[1], dtype=complex)
    p1, p2 = np.abs(c1) ** 2, np.abs(c2) ** 2
    excess = np.max(p1 + p2) - 1.0
    if excess > NORM_TOL:
        raise ValueError(f"amplitude norm exceeds 1 by {excess:.3g}")
    rho = np.zeros(c1.shape + (4, 4), dtype=complex)
    rho[..., 1, 1] = p1
    rho[..., 2, 2] = p2
    rho[..., 1, 2] = c1 * np.conj(c2)
    rho[..., 2, 1] = np.conj(c1) * c2
    rho[..., 3, 3] = 1.0 - p1 - p2
    return rho


def state_at(tau, psi0: Amplitudes, params: DerivedParams) -> np.ndarray:
    """Reduced two-qubit state at scaled time(s) ``tau`` starting from ``psi0``."""
    return density_matrix(evolve_amplitudes(tau, psi0, params))


def cavity_population(tau, psi0: Amplitudes, params: DerivedParams):
    """Photon population |b|^2 of the pseudomode, from b = i E'(tau)/S times beta_plus.

    Uses E'(tau) = -(2 S^2 / w) e^{-tau/2} sinh(w tau / 2).
    """
    proj = project_initial(params.r1, psi0)
    tau = np.asarray(tau, dtype=float)
    S = params.S
    w_sq = params.omega_sq / params.lam**2
    if abs(w_sq) < DEGENERATE_TOL:
        de = -(S**2) * tau * np.exp(-0.5 * tau)
    else:
        w = np.sqrt(complex(w_sq))
        sinh_over_w = (np.exp(0.5 * (w - 1) * tau) - np.exp(-0.5 * (w + 1) * tau)) / (2 * w)
        de = np.real(-2 * S**2 * sinh_over_w)
    return abs(proj.beta_plus) ** 2 * (de / S) ** 2

"""Master equation for two qubits coupled to one damped cavity mode.

The Lorentzian reservoir is replaced by a single lossy mode (pseudomode) and
each qubit may additionally emit into independent free-space channels:

    d rho/dt = -i[H, rho]
               - lam (a^dag a rho + rho a^dag a - 2 a rho a^dag)
               - gamma_k/2 (s+_k s-_k rho + rho s+_k s-_k - 2 s-_k rho s+_k)
    H = R [(r1 s+_1 + r2 s+_2) a + h.c.]

in the interaction picture at resonance.  Note the cavity term carries ``lam``
(photon population decays at 2 lam) while the qubit terms carry
``gamma_k / 2`` (population decays at gamma_k).

Everything is expressed per unit ``lam``, i.e. derivatives are taken with
respect to scaled time ``tau = lam t``.  States are plain complex arrays of
shape (D, D), D = 4 (N + 1), ordered qubit1 (x) qubit2 (x) Fock(0..N).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .analytic import Amplitudes
from .integrate import IntegratorConfig, integrate
from .params import DecayConfig, DerivedParams
from .states import (SIGMA_PLUS, StateError, destroy, fock_cutoff,
                     partial_trace_cavity)

MAX_CUTOFF = 4

_I2 = np.eye(2, dtype=complex)


def _ops(n_cut: int):
    """Full-space (sigma+_1, sigma+_2, a) for Fock cutoff ``n_cut``."""
    i_f = np.eye(n_cut + 1, dtype=complex)
    a = destroy(n_cut + 1)
    sp1 = np.kron(np.kron(SIGMA_PLUS, _I2), i_f)
    sp2 = np.kron(np.kron(_I2, SIGMA_PLUS), i_f)
    a_full = np.kron(np.kron(_I2, _I2), a)
    return sp1, sp2, a_full


@dataclass(frozen=True, eq=False)
class Generator:
    """Scaled Hamiltonian and jump channels of the master equation.

    ``H`` may carry a leading batch axis (one Hamiltonian per trajectory);
    the dissipative part is shared.
    """

    H: np.ndarray
    cavity_rate: float  # lam / lam = 1 in scaled units, kept for clarity
    qubit_rates: tuple[float, float]  # gamma_k / lam
    N: int
    jumps: tuple[np.ndarray, ...] = field(repr=False, default=())

    @cached_property
    def K(self) -> np.ndarray:
        """Non-Hermitian part -iH - 1/2 sum L^dag L."""
        damp = sum(L.conj().T @ L for L in self.jumps)
        return -1j * self.H - 0.5 * damp

    @property
    def dim(self) -> int:
        return 4 * (self.N + 1)


def _jumps(n_cut: int, cavity_rate: float, qubit_rates) -> tuple[np.ndarray, ...]:
    sp1, sp2, a = _ops(n_cut)
    jumps = [np.sqrt(2.0 * cavity_rate) * a]
    for g, sp in zip(qubit_rates, (sp1, sp2)):
        if g > 0:
            jumps.append(np.sqrt(g) * sp.conj().T)
    return tuple(jumps)


def hamiltonian(params: DerivedParams, N: int = 1) -> np.ndarray:
    """Scaled coupling Hamiltonian H / lam."""
    sp1, sp2, a = _ops(N)
    x = (params.R / params.lam) * (params.r1 * sp1 @ a + params.r2 * sp2 @ a)
    return x + x.conj().T


def build_generator(params: DerivedParams, decay: DecayConfig | None = None, N: int = 1) -> Generator:
    if N < 1 or int(N) != N:
        raise ValueError(f"Fock cutoff must be an integer >= 1, got {N}")
    if N > MAX_CUTOFF:
        raise ValueError(f"Fock cutoff above {MAX_CUTOFF} is not supported, got {N}")
    decay = decay or DecayConfig()
    rates = (decay.gamma1 / params.lam, decay.gamma2 / params.lam)
    return Generator(hamiltonian(params, N), 1.0, rates, int(N), _jumps(int(N), 1.0, rates))


def build_generator_batch(params_list, decay: DecayConfig | None = None, N: int = 1) -> Generator:
    """One generator whose Hamiltonian is stacked over ``params_list``."""
    gens = [build_generator(p, decay, N) for p in params_list]
    if len({g.qubit_rates for g in gens}) != 1:
        raise ValueError("batched trajectories must share the dissipative rates")
    g0 = gens[0]
    return Generator(np.stack([g.H for g in gens]), g0.cavity_rate, g0.qubit_rates, g0.N, g0.jumps)


def rhs(rho: np.ndarray, gen: Generator) -> np.ndarray:
    """d rho / d tau; batched over leading axes of ``rho`` (and ``gen.H``)."""
    if rho.shape[-2:] != (gen.dim, gen.dim):
        raise ValueError(f"state shape {rho.shape[-2:]} does not match generator dimension {gen.dim}")
    K = gen.K
    out = K @ rho + rho @ K.conj().swapaxes(-1, -2)
    for L in gen.jumps:
        out += L @ rho @ L.conj().T
    return out


def evolve(initial: np.ndarray, gen: Generator, tau_grid, cfg: IntegratorConfig | None = None,
           symmetrize: bool = True) -> np.ndarray:
    """States at each time of ``tau_grid``, shape (len(tau_grid), ..., D, D).

    Each output is symmetrised to (rho + rho^dag)/2 unless ``symmetrize`` is
    false, which exposes the raw integrator state for diagnostics.
    """
    cfg = cfg or IntegratorConfig()
    initial = np.asarray(initial, dtype=complex)
    tau_grid = np.asarray(tau_grid, dtype=float)
    if tau_grid.size and tau_grid[0] < 0:
        raise ValueError("tau_grid must start at tau >= 0")

    def f(_t, rho):
        return rhs(rho, gen)

    def sym(_t, rho):
        return hermitian_part(rho)

    return integrate(f, initial, tau_grid, cfg, observe=sym if symmetrize else None)


def hermitian_part(rho: np.ndarray) -> np.ndarray:
    return 0.5 * (rho + rho.conj().swapaxes(-1, -2))


def reduce_qubits(state: np.ndarray) -> np.ndarray:
    """Partial trace over the cavity, giving the two-qubit state in {11,10,01,00}."""
    return partial_trace_cavity(state)


def number_operator(N: int) -> np.ndarray:
    sp1, sp2, a = _ops(N)
    return sp1 @ sp1.conj().T + sp2 @ sp2.conj().T + a.conj().T @ a


def excitation_number(state: np.ndarray):
    """<s+s-_1 + s+s-_2 + a^dag a>; batched over leading axes."""
    n_op = number_operator(fock_cutoff(state))
    return np.real(np.einsum("...ij,ji->...", state, n_op))


def product_state(psi0: Amplitudes, N: int = 1, photons: int = 0) -> np.ndarray:
    """|psi0> (x) |photons><...| for a qubit state in span{|10>, |01>} or the ground state.

    ``psi0`` is given by its (c1, c2) amplitudes; the |00> component is filled
    in so the qubit ket is normalized.
    """
    c1, c2 = complex(psi0[0]), complex(psi0[1])
    p = abs(c1) ** 2 + abs(c2) ** 2
    if p > 1 + 1e-12:
        raise StateError(f"amplitude norm {p} exceeds 1")
    if not 0 <= photons <= N:
        raise StateError(f"photon number {photons} outside cutoff {N}")
    qubits = np.array([0.0, c1, c2, np.sqrt(max(0.0, 1.0 - p))], dtype=complex)
    fock = np.zeros(N + 1, dtype=complex)
    fock[photons] = 1.0
    ket = np.kron(qubits, fock)
    return np.outer(ket, ket.conj())


def embed_qubit_state(rho_q: np.ndarray, N: int = 1) -> np.ndarray:
    """rho_q (x) |0><0| for a two-qubit density matrix."""
    vac = np.zeros((N + 1, N + 1), dtype=complex)
    vac[0, 0] = 1.0
    return np.kron(np.asarray(rho_q, dtype=complex), vac)


def check_full_state(rho: np.ndarray, herm_tol: float = 1e-10, trace_tol: float = 1e-9,
                     eig_tol: float = 1e-8) -> dict:
    """Return the invariant diagnostics of a full state; raise if any fails."""
    fock_cutoff(rho)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    tr = complex(np.trace(rho))
    lo = float(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0])
    diag = {"hermiticity": herm, "trace_error": abs(tr - 1), "min_eig": lo}
    if herm > herm_tol or abs(tr - 1) > trace_tol or lo < -eig_tol:
        raise StateError(f"invalid full state: {diag}")
    return diag

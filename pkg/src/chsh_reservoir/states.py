"""Two-qubit and qubit-qubit-cavity state helpers.

Single-qubit basis order is (|1>, |0>) = (excited, ground) so that the
two-qubit computational basis comes out as {|11>, |10>, |01>, |00>}.
Full states live on qubit1 (x) qubit2 (x) Fock(0..N).
"""
from __future__ import annotations

import numpy as np

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)

# |1><0| in the (|1>, |0>) ordering
SIGMA_PLUS = np.array([[0, 1], [0, 0]], dtype=complex)
SIGMA_MINUS = SIGMA_PLUS.T.copy()

BASIS_LABELS = ("11", "10", "01", "00")


class StateError(ValueError):
    """Raised when a matrix is not a valid density matrix."""


def ket2(label: str) -> np.ndarray:
    """Two-qubit basis ket, e.g. ``ket2("10")``."""
    v = np.zeros(4, dtype=complex)
    v[BASIS_LABELS.index(label)] = 1.0
    return v


def destroy(n_levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n_levels, dtype=float)), 1).astype(complex)


def fock_cutoff(rho: np.ndarray) -> int:
    dim = rho.shape[-1]
    if dim % 4 or dim < 8:
        raise StateError(f"dimension {dim} is not 4*(N+1) with N >= 1")
    return dim // 4 - 1


def check_density_matrix(rho: np.ndarray, herm_tol: float = 1e-12, trace_tol: float = 1e-12,
                         eig_tol: float = 1e-10) -> np.ndarray:
    """Validate Hermiticity, unit trace and positivity; return ``rho``."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise StateError(f"expected a square matrix, got shape {rho.shape}")
    herm_err = np.max(np.abs(rho - rho.conj().T))
    if herm_err > herm_tol:
        raise StateError(f"not Hermitian (max deviation {herm_err:.3g})")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        raise StateError(f"trace is {tr}, expected 1")
    lo = np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))[0]
    if lo < -eig_tol:
        raise StateError(f"negative eigenvalue {lo:.3g}")
    return rho


def partial_trace_cavity(rho: np.ndarray) -> np.ndarray:
    """Trace out the cavity from a (..., 4(N+1), 4(N+1)) state."""
    n = fock_cutoff(rho) + 1
    shape = rho.shape[:-2] + (4, n, 4, n)
    return np.einsum("...injn->...ij", rho.reshape(shape))


def trace_distance(rho: np.ndarray, sigma: np.ndarray) -> float:
    diff = np.asarray(rho) - np.asarray(sigma)
    diff = 0.5 * (diff + diff.conj().T)
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def random_density_matrix(rng: np.random.Generator, dim: int = 4) -> np.ndarray:
    """Random full-rank state ``A A^dag / tr`` with Gaussian complex ``A``."""
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def random_x_state(rng: np.random.Generator) -> np.ndarray:
    """Random two-qubit X state: two random 2x2 positive blocks on {11,00} and {10,01}."""
    rho = np.zeros((4, 4), dtype=complex)
    for idx in ((0, 3), (1, 2)):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        block = a @ a.conj().T
        rho[np.ix_(idx, idx)] = block
    return rho / np.trace(rho).real


def random_unitary_2(rng: np.random.Generator) -> np.ndarray:
    z = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))

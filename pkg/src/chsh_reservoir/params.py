"""Model parameters for two qubits in a common Lorentzian (lossy-cavity) reservoir.

The cavity width ``lam`` is the base rate unit and all dynamics run in scaled
time ``tau = lam * t``.  ``gamma0`` is a reporting unit only: it never enters
the equations of motion by itself.
"""
from __future__ import annotations

import math
from dataclasses import dataclass


class ParameterError(ValueError):
    """Raised for physically invalid parameter combinations."""


@dataclass(frozen=True)
class CouplingConfig:
    alpha1: float
    alpha2: float

    def __post_init__(self):
        if not (self.alpha1 >= 0 and self.alpha2 >= 0):
            raise ParameterError(f"couplings must be non-negative, got {self.alpha1}, {self.alpha2}")
        if self.alpha1 == 0 and self.alpha2 == 0:
            raise ParameterError("at least one coupling must be non-zero")

    @property
    def alpha_total(self) -> float:
        return math.hypot(self.alpha1, self.alpha2)


@dataclass(frozen=True)
class ReservoirSpec:
    lam: float  # spectral width
    W: float  # Lorentzian height, R = alpha_T * W

    def __post_init__(self):
        if not self.lam > 0:
            raise ParameterError(f"lam must be positive, got {self.lam}")
        if not self.W >= 0:
            raise ParameterError(f"W must be non-negative, got {self.W}")


@dataclass(frozen=True)
class DecayConfig:
    gamma1: float = 0.0
    gamma2: float = 0.0
    gamma0: float = 1.0

    def __post_init__(self):
        if not (self.gamma1 >= 0 and self.gamma2 >= 0):
            raise ParameterError(f"spontaneous emission rates must be non-negative, got {self.gamma1}, {self.gamma2}")
        if not self.gamma0 > 0:
            raise ParameterError(f"gamma0 must be positive, got {self.gamma0}")


@dataclass(frozen=True)
class DerivedParams:
    """Quantities derived from a coupling/reservoir pair.

    ``omega_sq`` is kept signed (``lam**2 - 4 R**2``); negative values mean the
    oscillatory (strong coupling) regime.
    """

    r1: float
    r2: float
    alpha_total: float
    R: float
    S: float
    omega_sq: float
    lam: float


def derive_params(coupling: CouplingConfig, reservoir: ReservoirSpec,
                  decay: DecayConfig | None = None) -> DerivedParams:
    # the dataclasses validate themselves; decay is accepted so callers can
    # pass a full configuration through one entry point
    alpha_t = coupling.alpha_total
    if alpha_t == 0:
        raise ParameterError("collective coupling alpha_T is zero")
    lam = reservoir.lam
    R = alpha_t * reservoir.W
    return DerivedParams(
        r1=coupling.alpha1 / alpha_t,
        r2=coupling.alpha2 / alpha_t,
        alpha_total=alpha_t,
        R=R,
        S=R / lam,
        omega_sq=lam * lam - 4.0 * R * R,
        lam=lam,
    )


def params_from_regime(S: float, r1: float, gammaS_over_gamma0: float = 0.0,
                       lam: float = 1.0) -> tuple[CouplingConfig, ReservoirSpec, DecayConfig]:
    """Build a configuration from the coupling strength ``S = R/lam`` and ``r1``.

    ``gamma0`` is tied to the vacuum Rabi frequency, ``gamma0 = R = S * lam``,
    and both qubits get the same spontaneous emission rate
    ``gammaS_over_gamma0 * gamma0``.
    """
    if not S > 0:
        raise ParameterError(f"S must be positive, got {S}")
    if not 0.0 <= r1 <= 1.0:
        raise ParameterError(f"r1 must lie in [0, 1], got {r1}")
    if not gammaS_over_gamma0 >= 0:
        raise ParameterError(f"gammaS/gamma0 must be non-negative, got {gammaS_over_gamma0}")
    r2 = math.sqrt(max(0.0, 1.0 - r1 * r1))
    # alpha_T = 1 so R = W
    coupling = CouplingConfig(alpha1=r1, alpha2=r2)
    R = S * lam
    reservoir = ReservoirSpec(lam=lam, W=R / coupling.alpha_total)
    gamma0 = R
    gs = gammaS_over_gamma0 * gamma0
    return coupling, reservoir, DecayConfig(gamma1=gs, gamma2=gs, gamma0=gamma0)


def regime(S: float, r1: float, gammaS_over_gamma0: float = 0.0,
           lam: float = 1.0) -> tuple[DerivedParams, DecayConfig]:
    """Shortcut returning ``(derived, decay)`` for a regime."""
    coupling, reservoir, decay = params_from_regime(S, r1, gammaS_over_gamma0, lam)
    return derive_params(coupling, reservoir, decay), decay

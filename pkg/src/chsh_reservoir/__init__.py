"""CHSH-violation dynamics of two qubits coupled to a common lossy cavity."""
from .analytic import (PSI_01, PSI_10, Amplitudes, InitialProjection, amplitudes_at,
                       density_matrix, memory_amplitude, project_initial, state_at)
from .bell import (BellResult, chsh_max, chsh_max_horodecki, chsh_max_xstate,
                   violation_margin)
from .integrate import IntegrationError, IntegratorConfig
from .params import (CouplingConfig, DecayConfig, DerivedParams, ParameterError,
                     ReservoirSpec, derive_params, params_from_regime, regime)
from .analysis import (SweepGrid, SweepResult, SweepRow, ViolationIntervals, bell_trace,
                       count_revivals, find_threshold, max_violation, sweep,
                       trace_intervals, violation_intervals)

__version__ = "0.1.0"

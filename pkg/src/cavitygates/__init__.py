"""Cavity-mediated multi-qubit gate laboratory.

Two protocols for entangling N qubits through a classically driven
common cavity mode: a fast geometric-phase gate exp(i theta n^2) driven
through a closed phase-space loop, and an adiabatic gate family
exp(-i I / (delta - n g^2 / Delta)) whose repetitions synthesize
arbitrary symmetric phase gates via linear programming.  Includes the
analytic loss channels for both, full Lindblad cross-checks, and
fidelity estimates for concrete cavity platforms.
"""

from .params import (CavityGatesError, ConvergenceError, DensityOperator,
                     DimensionError, FockCutoffError, InfeasiblePulseError,
                     Pulse, SystemParams)
from .hilbert import (build_displaced_hamiltonian, build_effective_hamiltonian,
                      build_lab_hamiltonian, coherent_state)
from .lindblad import StepOptions, evolve_master_equation
from .channels import DiagonalChannel, PhaseTarget, channel_from_simulation
from .fidelity import (average_gate_fidelity_diagonal, haar_average_fidelity,
                       min_fidelity)
from .protocol_a import (ChannelSolution, EffectiveDriveParams,
                         GeometricPulseDesign, asymptotic_infidelity_a,
                         calibrate_Delta, design_from_shape, design_pulse_a,
                         effective_drive_params, inhomogeneity_bound_a,
                         invert_to_alpha, invert_to_eta,
                         monte_carlo_inhomogeneity_a, optimal_delta_a,
                         optimize_delta_a, protocol_a_infidelity,
                         simulate_protocol_a, solve_channel_a)
from .protocol_b import (AdiabaticPulseConfig, LossCoefficients,
                         cz_design_b, cz_pulse_energy, flat_top_pulse,
                         inhomogeneity_bound_b, loss_coefficients,
                         monte_carlo_inhomogeneity_b, perturbative_phase,
                         predict_fidelity_b, simulate_protocol_b)
from .synthesis import (SynthesisGrid, SynthesisPlan, build_synthesis_lp,
                        plan_channel, synthesize, target_cnz,
                        target_phase_rotation)
from .simplex import simplex_solve
from .ghz import ghz_circuit, ghz_fidelity
from .platforms import (PlatformPreset, cavity_from_geometry, estimate_gate,
                        ghz_estimate, preset, preset_names)

__version__ = "0.1.0"

"""Simulator for a two-level system under bichromatic transversal driving.

Two detuned microwave tones on a qubit realize, in a suitable rotating frame,
a Rabi Hamiltonian whose splitting, drive frequency, phase and
counter-rotating strength are all tunable.  The package builds the lab and
effective Hamiltonians, propagates them (Schroedinger or Lindblad), runs
parameter sweeps and Bloch trajectories, and synthesizes the I/Q waveforms
that would produce a given tone pair.
"""

from .errors import (
    ConfigError,
    InvariantViolation,
    PhysicsError,
    RabiForgeError,
)
from .experiments import (
    SweepResult,
    SweepSpec,
    TrajectoryResult,
    bloch_trajectory,
    compare_rwa,
    figure_preset,
    preset_setting,
    run_sweep,
)
from .frames import FrameSpec, effective_params, transform_hamiltonian
from .iqsynth import SampledWaveform, extract_tones, synthesize_iq, upconvert
from .model import (
    DriveTone,
    EffectiveHamiltonian,
    EffectiveParams,
    GeneralizedRabiParams,
    LabDriveParams,
    LabHamiltonian,
    Regime,
    classify_regime,
    map_from_effective,
)
from .propagator import (
    DecoherenceParams,
    EvolutionResult,
    IntegratorConfig,
    TimeGrid,
    commuting_drive_pe,
    propagate_lindblad,
    propagate_unitary,
    rabi_formula,
)
from .qubit import EXCITED, GROUND, BlochVector

__version__ = "0.1.0"

"""Simulator and numerical security analyzer for classical advantage
distillation over noisy n-dimensional (qunit) key-distribution channels."""

from .adversary import (
    AttackKind,
    AttackReport,
    DimensionGuardError,
    EveBlockHypothesis,
    coherent_attack_error,
    coherent_block_states,
    eve_error_exponent,
    eve_round_states,
    incoherent_attack_error,
)
from .channel import (
    ChannelParams,
    EveConditional,
    TripartiteState,
    channel_conditionals,
    eve_conditionals,
    isotropic_state,
    joint_statistics,
    make_params,
    purify,
)
from .distill import (
    BlockTranscript,
    SessionStats,
    acceptance_probability,
    bob_error_after_ad,
    bob_error_exponent,
    run_session,
    simulate_block,
)
from .matcore import (
    DensityOperator,
    Povm,
    PureState,
    discrimination_error,
    fidelity,
    helstrom_error,
    hermitian_eigensystem,
    kron,
    partial_trace,
    psd_sqrt,
    square_root_measurement,
    trace_norm,
)
from .thresholds import (
    BracketingError,
    ThresholdRecord,
    figure_table,
    find_threshold_numeric,
    quantum_distillability_threshold,
    singlet_fraction,
    threshold_coherent_closed,
    threshold_incoherent_closed,
)

__version__ = "0.1.0"

__all__ = [
    "AttackKind",
    "AttackReport",
    "BlockTranscript",
    "BracketingError",
    "ChannelParams",
    "DensityOperator",
    "DimensionGuardError",
    "EveBlockHypothesis",
    "EveConditional",
    "Povm",
    "PureState",
    "SessionStats",
    "ThresholdRecord",
    "TripartiteState",
    "acceptance_probability",
    "bob_error_after_ad",
    "bob_error_exponent",
    "channel_conditionals",
    "coherent_attack_error",
    "coherent_block_states",
    "discrimination_error",
    "eve_conditionals",
    "eve_error_exponent",
    "eve_round_states",
    "fidelity",
    "figure_table",
    "find_threshold_numeric",
    "helstrom_error",
    "hermitian_eigensystem",
    "incoherent_attack_error",
    "isotropic_state",
    "joint_statistics",
    "kron",
    "make_params",
    "partial_trace",
    "psd_sqrt",
    "purify",
    "quantum_distillability_threshold",
    "run_session",
    "simulate_block",
    "singlet_fraction",
    "square_root_measurement",
    "threshold_coherent_closed",
    "threshold_incoherent_closed",
    "trace_norm",
]

"""Coherence quantifiers built on the Tsallis relative operator entropy."""

from .channels import KrausChannel, apply_channel, selective_measure
from .entropy import d_q, f_q, fidelity, t_q_operator
from .measures import (
    MeasureReport,
    OptimizerConfig,
    c_half,
    c_q,
    c_q_max,
    geometric_coherence,
    tsallis_alpha_coherence,
    tsallis_alpha_coherence_exact,
)
from .states import load_state, maximally_coherent, random_density, save_state

__all__ = [
    "KrausChannel", "apply_channel", "selective_measure",
    "d_q", "f_q", "fidelity", "t_q_operator",
    "MeasureReport", "OptimizerConfig", "c_half", "c_q", "c_q_max",
    "geometric_coherence", "tsallis_alpha_coherence", "tsallis_alpha_coherence_exact",
    "load_state", "maximally_coherent", "random_density", "save_state",
]
__version__ = "0.1.0"

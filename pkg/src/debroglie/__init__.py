"""Chirped-drive engineering of atomic motional states in a gradient field.

Natural units throughout: lengths in d, times in tau, with hbar = F = 1 and
M = 1/2 (see :meth:`debroglie.core.PhysicalParams.natural`).
"""
from .core import (Grid, NaturalUnits, PhysicalParams, SpinorState, make_grid,
                   natural_units, plane_wave_state)
from .pulse import (CombSpec, PulseWaveform, Scheme, chirp_phase, source_trajectory,
                    synthesize_chirped_delta, synthesize_litho_comb,
                    synthesize_monochromatic, synthesize_target_pulse, time_shift)
from .propagator import EvolutionConfig, EvolutionRecord, evolve, project_state2

__all__ = [
    "CombSpec", "EvolutionConfig", "EvolutionRecord", "Grid", "NaturalUnits",
    "PhysicalParams", "PulseWaveform", "Scheme", "SpinorState", "chirp_phase",
    "evolve", "make_grid", "natural_units", "plane_wave_state", "project_state2",
    "source_trajectory", "synthesize_chirped_delta", "synthesize_litho_comb",
    "synthesize_monochromatic", "synthesize_target_pulse", "time_shift",
]

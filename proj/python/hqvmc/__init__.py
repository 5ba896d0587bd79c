"""Hybrid circuit and autoregressive-network variational Monte Carlo."""

from ._core import (
    Hamiltonian,
    RunConfig,
    exact_ground_energy,
    param_count,
    phase_net_param_count,
    preset,
    preset_names,
    run,
)

__all__ = [
    "Hamiltonian",
    "RunConfig",
    "exact_ground_energy",
    "param_count",
    "phase_net_param_count",
    "preset",
    "preset_names",
    "run",
]

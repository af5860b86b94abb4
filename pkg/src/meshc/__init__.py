"""Mach-Zehnder mesh compiler: Bruhat labels, sorting networks, coupled-chip designs."""

from .analysis import (
    DepthCache,
    StageDepths,
    TransmissionParams,
    depth_bound_analytic,
    depth_bound_inequality,
    heatmap,
    iso_transmission_curve,
    lemma_identities_check,
    optimal_chip_size,
    tk_simulate,
    tk_step,
    transmission,
)
from .bruhat import BruhatState, apply_two_mode, bruhat_decompose, swap_rows_mzi
from .circuit import (
    MZI,
    ChipBlock,
    ChipLayout,
    Circuit,
    Coupling,
    PhaseShifter,
    evaluate,
    inverse,
    mzi_count,
    mzi_depth,
    propagate_phases,
)
from .compiler import AngleAssignment, Infeasible, compile, reachable_check, shallowest_compile
from .core import MZIParams, haar_random_unitary, mzi_matrix, random_isometry, zeroing_angles
from .coupled import CoupledCircuit, greedy_coupled, greedy_longrange, stage_depth_mzi
from .networks import (
    block_layout,
    diamond_network,
    full_sorting_network,
    partial_sorting_network,
    reck_network,
)
from .synthesis import parameter_count, synth_boson_sampling, synth_clements, synth_reck

__version__ = "0.1.0"

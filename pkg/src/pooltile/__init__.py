"""Tiled operator pools for ADAPT-VQE on XXZ spin lattices."""

from .pauli import (PauliString, SymmetrySector, YParity, all_z, commutator, commutes, embed,
                    in_sector, multiply, permute_support)
from .statevector import NeelConvention, NeelSpec, StateVector, apply_pauli, apply_rotation, expectation, \
    pool_gradients, prepare_neel
from .lattice import EigensolverError, LatticeKind, LatticeSpec, PauliSum, build_xxz, exact_ground_energy, \
    symmetry_of
from .pools import OperatorPool, Provenance, TileSet, full_pauli_pool, harvest_tiles, tile_pool_1d, tile_pool_2d
from .optimizer import AnsatzEntry, OptimizationResult, OptimizerSettings, ansatz_state, energy_and_gradient, \
    minimize
from .adapt import AdaptConfig, RunRecord, StepRecord, adapt_run, adapt_trials, convergence_trace, trace_to_csv
from .closure import CompletenessReport, ResourceCapError, certify_tiled_completeness, lie_closure, sector_basis
from ._kernels import BACKEND

__version__ = "0.1.0"

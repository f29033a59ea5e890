"""Chain-mapped bosonic baths and matrix-product-state dynamics.

Open two-level systems coupled to one harmonic bath through several channels,
with the bath rotated into a Lanczos or block-Lanczos chain in the interaction
picture and the joint state propagated as an MPS.
"""
from .chainmap import (
    ChainMapping,
    MappingKind,
    TimeDependentCouplings,
    block_lanczos_map,
    couplings_at,
    lanczos_map,
)
from .errors import (
    ChainBathError,
    ConfigError,
    DegenerateSeedError,
    DimensionError,
    InvalidParameterError,
    LanczosBreakdownError,
    NumericalFailureError,
    UnitError,
)
from .evolve import EvolutionConfig, Trajectory, ed_reference, run_trajectory, step
from .model import (
    InteractionHamiltonian,
    OpenSystemModel,
    SingletFissionParams,
    build_singlet_fission,
    build_spin_boson,
    map_model,
    terms_at,
)
from .mps import MPSState, bond_entropy, canonicalize, expectation, product_state, truncate_bond
from .spectral import DiscretizedBath, SpectralDensity, discretize, discretize_shared, eval_density
from .units import HBAR_MEV_PS, WAVENUMBER_PER_MEV, convert

__version__ = "0.1.0"

__all__ = [
    "ChainMapping", "MappingKind", "TimeDependentCouplings", "block_lanczos_map",
    "couplings_at", "lanczos_map",
    "ChainBathError", "ConfigError", "DegenerateSeedError", "DimensionError",
    "InvalidParameterError", "LanczosBreakdownError", "NumericalFailureError", "UnitError",
    "EvolutionConfig", "Trajectory", "ed_reference", "run_trajectory", "step",
    "InteractionHamiltonian", "OpenSystemModel", "SingletFissionParams",
    "build_singlet_fission", "build_spin_boson", "map_model", "terms_at",
    "MPSState", "bond_entropy", "canonicalize", "expectation", "product_state", "truncate_bond",
    "DiscretizedBath", "SpectralDensity", "discretize", "discretize_shared", "eval_density",
    "HBAR_MEV_PS", "WAVENUMBER_PER_MEV", "convert",
]

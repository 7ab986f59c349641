"""Causal structure, Weyl relations, and modular information flow for the
free scalar field on a periodic lattice.

The layers, bottom up: ``grids`` holds 1+1 spacetime test functions and
quadrature; ``propagators`` evaluates the fundamental solutions and causal
pairings; ``causal`` rewrites Weyl-algebra words to normal form and checks
the exponentiated commutation relations; ``lattice`` is the regulated
harmonic chain with its one-particle embedding and dynamics; ``modular``
computes standard-subspace data (Tomita operators, spectra, flow, cutting
projections) and the information functional of coherent waves; ``sweeps``
drives shrinking-diamond experiments on top of it all. ``cli`` exposes the
whole stack as a deterministic command-line harness.
"""

from .errors import (
    CausalFieldError,
    CausalOrderError,
    ConsistencyError,
    GridError,
    ModelError,
    NonStandard,
    NotAFactor,
    RegionExhausted,
    SchemaError,
)
from .grids import (
    Grid2D,
    TestFunction,
    gaussian_bump,
    gradient_action,
    kg_apply,
    overlap_quadrature,
    quadrature,
    radial_bump,
)
from .propagators import (
    KERNEL_KINDS,
    ConeBoundary,
    KernelKind,
    kernel_eval,
    kernel_mode_sum,
    kernel_pointwise,
    kernel_table,
    pair_massless_3p1,
    pair_radial,
    pairing,
)
from .causal import (
    Functional,
    WeylElement,
    bogoliubov_map,
    causal_order,
    delta_L,
    normal_form,
    product_via_relations,
    shift_functional,
    weyl_inverse,
    weyl_product,
    wrap_phase,
)
from .lattice import (
    CauchyData,
    LatticeModel,
    LatticeSpec,
    ModeUnitary,
    Translation,
    build_model,
    classical_evolve,
    embed,
    energy_spectrum_check,
    extend_semigroup,
    gaussian_wave,
    in_future_cone,
    interval_sites,
    symplectic_form,
    time_evolve,
    unembed,
)
from .modular import (
    ModularBlock,
    ModularData,
    Subspace,
    cutting_projection,
    delta_eigenvalues,
    information,
    make_subspace,
    modular_flow,
    subspace_from_generators,
    symplectic_complement,
    tomita,
)
from .sweeps import (
    CONVENTIONS,
    HuygensReport,
    SweepResult,
    SweepSpec,
    SweepStep,
    WaveSpec,
    classical_exit_time,
    diamond_region,
    huygens_contrast,
    run_sweep,
)

__version__ = "0.1.0"

__all__ = [
    "CausalFieldError",
    "CausalOrderError",
    "ConsistencyError",
    "GridError",
    "ModelError",
    "NonStandard",
    "NotAFactor",
    "RegionExhausted",
    "SchemaError",
    "Grid2D",
    "TestFunction",
    "gaussian_bump",
    "gradient_action",
    "kg_apply",
    "overlap_quadrature",
    "quadrature",
    "radial_bump",
    "KERNEL_KINDS",
    "ConeBoundary",
    "KernelKind",
    "kernel_eval",
    "kernel_mode_sum",
    "kernel_pointwise",
    "kernel_table",
    "pair_massless_3p1",
    "pair_radial",
    "pairing",
    "Functional",
    "WeylElement",
    "bogoliubov_map",
    "causal_order",
    "delta_L",
    "normal_form",
    "product_via_relations",
    "shift_functional",
    "weyl_inverse",
    "weyl_product",
    "wrap_phase",
    "CauchyData",
    "LatticeModel",
    "LatticeSpec",
    "ModeUnitary",
    "Translation",
    "build_model",
    "classical_evolve",
    "embed",
    "energy_spectrum_check",
    "extend_semigroup",
    "gaussian_wave",
    "in_future_cone",
    "interval_sites",
    "symplectic_form",
    "time_evolve",
    "unembed",
    "ModularBlock",
    "ModularData",
    "Subspace",
    "cutting_projection",
    "delta_eigenvalues",
    "information",
    "make_subspace",
    "modular_flow",
    "subspace_from_generators",
    "symplectic_complement",
    "tomita",
    "CONVENTIONS",
    "HuygensReport",
    "SweepResult",
    "SweepSpec",
    "SweepStep",
    "WaveSpec",
    "classical_exit_time",
    "diamond_region",
    "huygens_contrast",
    "run_sweep",
    "__version__",
]

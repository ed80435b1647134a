"""Analysis and solution of linear DAEs d/dt Ex = Ax via matrix pencils."""

from .core import (
    MatrixPencil,
    ResolventSample,
    left_pseudo_resolvent,
    probe_regularity,
    resolvent,
    resolvent_norm,
    right_pseudo_resolvent,
    spectral_norm,
)
from .indices import (
    GrowthEstimate,
    RadialityEvidence,
    estimate_resolvent_index_complex,
    estimate_resolvent_index_real,
    index_relations_check,
    integrated_semigroup_order,
    integrated_semigroup_sample,
    verify_radiality,
)
from .models import (
    L2ExampleParams,
    NanorodParams,
    build_l2_example,
    build_nanorod,
    m_k_resolvent,
)
from .phdae import (
    PhPencil,
    PhReport,
    dissipation_trace,
    hamiltonian,
    make_S,
    make_T,
    normalize,
    ph_index_bound_check,
    random_ph_pencil,
    semigroup_condition_check,
    verify_ph_structure,
)
from .solver import (
    QuadratureConfig,
    SolveConfig,
    Trajectory,
    admissible_initial_state,
    bromwich_integral,
    contour_solve,
    matrix_exponential,
    mild_solution_residual,
    weierstrass_solve,
)
from .weierstrass import (
    WeierstrassDecomposition,
    ZeroDynModel,
    build_zero_dynamics,
    decompose,
    reconstruct,
    spectral_projectors,
)

__all__ = [
    "GrowthEstimate",
    "L2ExampleParams",
    "MatrixPencil",
    "NanorodParams",
    "PhPencil",
    "PhReport",
    "QuadratureConfig",
    "RadialityEvidence",
    "ResolventSample",
    "SolveConfig",
    "Trajectory",
    "WeierstrassDecomposition",
    "ZeroDynModel",
    "admissible_initial_state",
    "bromwich_integral",
    "build_l2_example",
    "build_nanorod",
    "build_zero_dynamics",
    "contour_solve",
    "decompose",
    "dissipation_trace",
    "estimate_resolvent_index_complex",
    "estimate_resolvent_index_real",
    "hamiltonian",
    "index_relations_check",
    "integrated_semigroup_order",
    "integrated_semigroup_sample",
    "left_pseudo_resolvent",
    "m_k_resolvent",
    "make_S",
    "make_T",
    "matrix_exponential",
    "mild_solution_residual",
    "normalize",
    "ph_index_bound_check",
    "probe_regularity",
    "random_ph_pencil",
    "reconstruct",
    "resolvent",
    "resolvent_norm",
    "right_pseudo_resolvent",
    "semigroup_condition_check",
    "spectral_norm",
    "spectral_projectors",
    "verify_ph_structure",
    "verify_radiality",
    "weierstrass_solve",
]

"""
choidynamics.core - foliated maps on M_3, their Choi matrices and semigroups.

Modules:

- matrixcore: dense complex matrix utilities (partial transpose, spectra, rank)
- foliated: circulant algebra, the rho/tau/theta families and foliated maps
- choi: Choi matrices and positivity, CP, co-CP, PPT and separability verdicts
- semigroup: closed-form rho and tau semigroups, PPT transition times, scans
- uet: UET/CUET matrices and the CUET construction of PPT block matrices
"""

from .errors import (
    ChoiDynamicsError,
    ConstructionError,
    ConvergenceError,
    DomainError,
    HermiticityError,
    PropertyViolationError,
    SizeError,
    ValidationError,
)
from .foliated import (
    Family,
    FoliatedMap,
    RhoSpec,
    TauSpec,
    ThetaSpec,
    build_map,
    compose,
    horodecki_map,
    make_spec,
    pauli_form,
)
from .choi import (
    CSV_HEADER,
    ChoiMatrix,
    ClassificationReport,
    choi_matrix,
    classify,
    classify_map,
    classify_state,
    foliated_map_from_choi,
    pptes_witness,
    rho_abc_decomposition,
    schmidt_number_of_choi,
    schmidt_number_structured,
)
from .semigroup import (
    GeneratorSpec,
    ScanProperty,
    TrichotomyVerdict,
    evolve,
    transition_time,
    trajectory,
    trichotomy_scan,
)
from .uet import (
    CuetTuple,
    PPTConstruction,
    QStructure,
    assemble_Q,
    construct_ppt,
    cuet_check,
    generate_cuet_tuple,
    is_uet_pair,
)

__all__ = [
    "ChoiDynamicsError",
    "ConstructionError",
    "ConvergenceError",
    "DomainError",
    "HermiticityError",
    "PropertyViolationError",
    "SizeError",
    "ValidationError",
    "Family",
    "FoliatedMap",
    "RhoSpec",
    "TauSpec",
    "ThetaSpec",
    "build_map",
    "compose",
    "horodecki_map",
    "make_spec",
    "pauli_form",
    "CSV_HEADER",
    "ChoiMatrix",
    "ClassificationReport",
    "choi_matrix",
    "classify",
    "classify_map",
    "classify_state",
    "foliated_map_from_choi",
    "pptes_witness",
    "rho_abc_decomposition",
    "schmidt_number_of_choi",
    "schmidt_number_structured",
    "GeneratorSpec",
    "ScanProperty",
    "TrichotomyVerdict",
    "evolve",
    "transition_time",
    "trajectory",
    "trichotomy_scan",
    "CuetTuple",
    "PPTConstruction",
    "QStructure",
    "assemble_Q",
    "construct_ppt",
    "cuet_check",
    "generate_cuet_tuple",
    "is_uet_pair",
]

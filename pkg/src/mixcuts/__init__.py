"""Exact cut generation, separation and hull verification for joint mixing
sets with a linking constraint."""

from .core import (
    AllZeroCut,
    ConditionViolated,
    CutKind,
    DimensionMismatch,
    DomainError,
    EpsilonViolated,
    GroundSetTooLarge,
    InternalInvariant,
    InvalidSequence,
    LinearCut,
    LowerBoundsNotReduced,
    MixcutsError,
    MixingInstance,
    ParseError,
    PreconditionFailed,
    RiskOutOfRange,
    SequenceTheta,
    ValidationError,
    canonicalize,
    complement,
    format_rational,
    load_instance,
    loads_instance,
    parse_rational,
    serialize_instance,
)
from .submodular import (
    PolymatroidVertex,
    SetFunctionOracle,
    greedy_vertex,
    is_submodular,
    separate_polymatroid,
    weighted_combination,
)
from .mixing import (
    MixingSequence,
    all_mixing_cuts,
    column_oracle,
    mix_star_cuts,
    mixing_cut,
    quantile_lower_bounds,
    reduce_lower_bounds,
    separate_mixing,
)
from .aggregated import (
    SubsequenceDecomposition,
    aggregated_cut,
    check_validity,
    decompose,
    dominates_linking,
    l_theta,
    separate_aggregated,
    sequences,
)
from .hull import (
    HullDiagnosis,
    MembershipResult,
    SufficiencyReport,
    VRepresentation,
    check_sufficiency,
    diagnose,
    hull_cut_family,
    linking_oracle,
    membership,
    v_representation,
)
from .counterexample import (
    certify_witness,
    find_minimal_U,
    witness,
    witness_c1,
    witness_c2,
    witness_lw,
)
from .twosided import (
    BandedHullReport,
    TwoSidedData,
    generalized_cut,
    hull_with_bounds,
    to_mixing,
)

__version__ = "0.1.0"

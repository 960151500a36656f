"""subdyn: substitution subshifts, block hierarchies, desubstitution
parsing, suspension tiling flows and ergodic experiments."""

from .errors import (
    InconclusiveError,
    InvalidInputError,
    SubdynError,
    VerificationError,
)
from .substitution import (
    BUILTIN_NAMES,
    FrequencyVector,
    Substitution,
    admissible_words,
    builtin,
    expand,
    is_admissible,
    is_aperiodic_class_check,
    is_primitive,
    load_substitution,
    pf_frequencies,
    substitution_matrix,
)
from .hierarchy import (
    MATERIALIZATION_CAP,
    BlockHierarchy,
    Family,
    Level,
    SequenceWindow,
    build_hierarchy,
    count_occurrences,
    djr_block_occurrences,
    djr_ratio_limit,
    window_from_hierarchy,
)
from .recognizer import (
    LevelDecomposition,
    ParseResult,
    StructureWitness,
    anchor_word,
    decompose,
    find_structure_witness,
    parse,
    parse_threshold,
    same_orbit,
    witness_intervals,
    witness_shift_consistency,
)
from .tiling import (
    GOLDEN,
    SQRT2M1,
    FlowCylinder,
    TileLengths,
    TilingPoint,
    cylinder_measure,
    default_lengths,
    doubling_recode,
    flow,
    flow_exact,
    hits_cylinder,
    word_frequency,
)
from .ergodic import (
    INCONCLUSIVE,
    OFF_DIAGONAL,
    PRODUCT_CONSISTENT,
    JoiningEstimate,
    MeasureEstimate,
    SpectralScan,
    birkhoff,
    correlation_profile,
    correlation_sequence,
    default_lambda_grid,
    djr_weak_mixing_experiment,
    flow_return_ratio,
    joining_estimate,
    occurrence_indicator,
    rigidity_test,
    rotation_coding,
    spectral_scan,
    t_alpha_ergodicity_probe,
)

__version__ = "1.0.0"

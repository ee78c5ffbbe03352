"""Exact computations on the overlapping self-similar set generated by
``x/3``, ``(x + lambda)/3`` and ``(x + 2)/3`` for rational ``lambda``."""

__version__ = "0.1.0"

from .affine import (
    ACCEPTED,
    INCONCLUSIVE,
    REJECTED,
    AffineMap,
    VerifyResult,
    classify_affine,
    embedding_scan,
    verify_affine_inclusion,
)
from .errors import CantorLabError, DomainError, NumericError, ResourceError, ScanExhaustedError
from .numeric import (
    Digit,
    Interval,
    IntervalSet,
    Rational,
    as_rational,
    eval_word_interval,
    eval_word_origin,
    interval_set_algebra,
    rat,
    word,
    word_str,
    words,
)
from .spectrum import (
    SpectrumResult,
    delta_set,
    greedy_triadic_expansion,
    offset_graph,
    rw_step,
    spectrum_brute,
    spectrum_closed_form,
    spectrum_exact,
    upper_bound_witness,
)
from .structure import (
    box_dim_estimate,
    hole_set,
    level_geometry,
    level_set,
    membership_automaton,
    membership_exact,
    primary_hole,
    tss_check_depth,
    tss_exact,
    tss_witness,
    witness_overlap,
)
from .symbolic import (
    COUNTABLY_INFINITE,
    CONTINUUM,
    Finite,
    MultiplicityClass,
    build_sft,
    coding_graph,
    coding_multiplicity,
    count_admissible,
    dimension_pair,
    dimension_residual,
    dimension_solve,
    pair_coincidence,
    sft_dimension,
    sft_growth_rate,
)

"""Lyapunov exponents of non-negative matrix cocycles over symbolic
sequences: word sources and return words, a scaled-product matrix kernel,
exponent traces and hypothesis checks, return-word estimators, and
multifractal spectra of weighted orbit averages."""

from .words import (
    Alphabet,
    FiniteWord,
    WordSource,
    PeriodicSource,
    SubstitutionSource,
    BernoulliSource,
    MarkovSource,
    SquarefreeSource,
    BlockProgram,
    BlockScheduleSource,
    EpochSchedule,
    block_schedule_prefix,
    emit_prefix,
    occurrences,
    empirical_frequency,
    decompose_returns,
    ReturnDecomposition,
    return_rate_trace,
    long_word_mass,
    source_from_description,
)
from .matrices import (
    NonNegMatrix,
    ConeVector,
    ScaledProduct,
    Allowability,
    allowability,
    entry_sum_norm,
    elem_constant,
    hilbert_metric,
    phi,
    birkhoff_tau,
    spectral_radius,
    scaled_multiply,
    log_norm_bounds,
    matrix_to_text,
    matrix_from_text,
    matrix_to_bytes,
    matrix_from_bytes,
)
from .cocycles import (
    CocycleSpec,
    LyapunovTrace,
    lyapunov_trace,
    geometric_checkpoints,
    partial_product,
    evaluate,
    quasi_additivity_defect,
    default_defect_pairs,
    check_positivity_condition,
    PositivityWitness,
    MeasureModel,
    BernoulliMeasure,
    MarkovMeasure,
    PeriodicAtomicMeasure,
    lambda_estimate,
    LambdaEstimate,
    fekete_extrapolate,
    frequency_deviations,
    trace_envelope,
)
from .returns import (
    MarkerSelection,
    select_marker,
    ReturnFormulaEstimate,
    return_formula_estimate,
    quasi_multiplicativity_check,
    periodic_exponent,
)
from .spectrum import (
    WeightedAverageSpec,
    beta_cocycle,
    psi,
    SpectrumPoint,
    spectrum_curve,
    spectrum_to_csv,
    weighted_average_from_description,
)
from . import errors, scenarios, textform

__version__ = "0.1.0"

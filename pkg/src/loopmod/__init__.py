"""Haar-type measure data on finite loops: translations, deviation maps, exact modular cocycles."""

from .enumerate import EnumerationConfig, builtin_loop, enumerate_loops
from .errors import LoopModError
from .identities import builtin, check_identity, compile_translation_word, evaluate_word, parse_identity
from .loop import (
    LoopTable,
    Permutation,
    associativity_witness,
    canonical_form,
    deviation,
    divide,
    multiply,
    translation,
    validate_table,
)
from .measure import (
    Measure,
    cocycle_table,
    deviation_jacobian,
    identity_compatibility,
    invariant_measure_basis,
    modular_function,
    mult_group_size,
    rigidity_report,
    rn_derivative,
    unimodularity_check,
    validate_measure,
    verify_chain_rule,
    verify_cocycle_relation,
)

__version__ = "0.1.0"

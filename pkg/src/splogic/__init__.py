"""Standpoint logic and variable reference logic toolkit."""

from .errors import (
    ArityMismatchError,
    AxiomViolationError,
    EvaluationError,
    FormulaSyntaxError,
    ModelFormatError,
    SplError,
    UndeclaredSymbolError,
    VocabularyError,
)
from .finder import (
    Bounds,
    EquisatReport,
    ExhaustedUnsat,
    ModelFound,
    SearchOutcome,
    SearchTimeout,
    equisat_check,
    find_fosl_model,
    find_v1_model,
)
from .fosl import (
    FoslStructure,
    eval_term,
    fosl_structure_from_dict,
    fosl_structure_to_dict,
    is_model,
    load_fosl_model,
    make_fosl_structure,
    satisfies,
    satisfies_at,
    vocabulary_of_fosl_model,
)
from .generate import (
    generate_formula,
    generate_fosl_structure,
    generate_structure,
    generate_v1_structure,
)
from .parser import parse_formula, parse_raw, print_formula
from .syntax import (
    And,
    Atom,
    Box,
    Const,
    Equal,
    Forall,
    Formula,
    FoslVocabulary,
    Not,
    Term,
    UNIVERSAL_STANDPOINT,
    V1Vocabulary,
    Var,
    all_variables,
    conjoin,
    diamond,
    disjoin,
    exists,
    falsity,
    formula_size,
    free_variables,
    iff,
    implies,
    is_monodic,
    is_sentence,
    make_fosl_vocabulary,
    make_v1_vocabulary,
    or_,
    truth,
    validate_formula,
)
from .translate import (
    axiom_set,
    full_translation,
    labeled_axioms,
    lift_model,
    lower_model,
    translate_formula,
    translated_vocabulary,
    translation_report,
)
from .v1 import (
    IndefiniteIndividual,
    V1Structure,
    eval_term_v1,
    individuals_at,
    is_model_v1,
    load_v1_model,
    make_v1_structure,
    satisfies_at_v1,
    satisfies_v1,
    v1_structure_from_dict,
    v1_structure_to_dict,
    vocabulary_of_v1_model,
)

__version__ = "0.1.0"

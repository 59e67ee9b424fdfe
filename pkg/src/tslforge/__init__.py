"""Toolkit for temporal stream specifications.

Parse and print the block syntax, validate against declared signatures,
evaluate over lasso traces, compare specifications by exhaustive bounded
enumeration, check Mealy-machine controllers for conformance, emit
controller code, and benchmark LLM specification generation end to end.
"""

from .formulas import (
    And,
    Apply,
    Finally,
    Formula,
    FunctionTerm,
    Globally,
    Implies,
    Next,
    Not,
    Or,
    Pred,
    PredicateTerm,
    SignalRef,
    Span,
    TslSpec,
    Until,
    Update,
    WeakUntil,
    desugar,
    desugar_spec,
)
from .parser import ParseError, parse_formula, parse_predicate_term, parse_spec, parse_term
from .printer import format_formula, format_predicate_term, format_term, print_spec
from .errors import FormatError
from .signatures import (
    AtomAlphabet,
    IssueCode,
    SignatureTable,
    SymbolDecl,
    SymbolKind,
    ValidationIssue,
    ValidationReport,
    atom_alphabet,
    load_signatures,
    parse_signatures,
    spec_alphabet,
    validate,
)
from .semantics import (
    AbstractStep,
    BudgetExceeded,
    Conforms,
    Counterexample,
    EquivalentUpTo,
    IncompleteMachine,
    LassoTrace,
    Nonconformance,
    UnknownAtom,
    bounded_equiv,
    check_machine,
    count_lassos,
    distinguish_formulas,
    eval_on_lasso,
    spec_holds,
    trace_from_json,
    trace_to_json,
)
from .machines import (
    GuardLiteral,
    MealyMachine,
    NondeterministicGuards,
    Transition,
    emit_controller,
    load_machine,
    load_machine_file,
)
from .prompting import (
    ExtractionError,
    MissingPart,
    PromptBundle,
    PromptVariant,
    assemble_prompt,
    default_instructions,
    extract_spec,
    load_bundle,
)
from .llm import (
    GenerationRequest,
    GenerationResult,
    HttpProvider,
    MockProvider,
    ProviderError,
    ProviderErrorKind,
    RateLimiter,
    RetryingProvider,
    provider_from_env,
    request_fingerprint,
)
from .bench import (
    BenchmarkCase,
    GenerationSettings,
    MetricsCell,
    MetricsSummary,
    RunRecord,
    discover_cases,
    load_case,
    read_records,
    run_suite,
    run_trial,
    summarize,
)

__version__ = "0.1.0"

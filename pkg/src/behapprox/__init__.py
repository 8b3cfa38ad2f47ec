"""behapprox: optimal target approximations for behavior composition.

Compose a set of nondeterministic available behaviors so they jointly
realize a target behavior, and when no exact composition exists, compute
the largest realizable approximation of the target, run it interactively,
and export the instance for external model checkers.
"""

from .errors import (
    CompositionError,
    ValidationError,
    ProductError,
    ApproxError,
    GameError,
    SessionError,
    ParseError,
    ExportError,
)
from .model import (
    IDLE_ACTION,
    RawBehavior,
    Ltfs,
    SystemSpec,
    validate_behavior,
    is_deterministic,
)
from .product import (
    EnactedSystem,
    FullEnactedSystem,
    enacted_system,
    full_enacted_system,
)
from .simrel import (
    SimulationRelation,
    Partition,
    largest_simulation,
    simulates,
    sim_equivalent,
    bisim_partition,
    quotient,
)
from .approx import (
    ApproxResult,
    PrunedFull,
    approximate,
    compute_approx,
    check_exact,
)
from .game import (
    GameStructure,
    WinningSet,
    build_game,
    solve_safety,
    extract_approx_from_game,
    game_approx,
)
from .engine import (
    ControllerTable,
    constant_controller,
    action_controller,
    RandomResolver,
    AdversarialResolver,
    Session,
    SessionLog,
    StepRecord,
    TraceSet,
    realized_traces_bounded,
    dominates,
)
from .io import (
    ProblemFile,
    parse_problem,
    parse_problem_file,
    parse_target,
    serialize_problem,
    serialize_target,
    export_dot,
    export_ispl,
    run_cli,
)

__version__ = "0.1.0"

__all__ = [
    "CompositionError",
    "ValidationError",
    "ProductError",
    "ApproxError",
    "GameError",
    "SessionError",
    "ParseError",
    "ExportError",
    "IDLE_ACTION",
    "RawBehavior",
    "Ltfs",
    "SystemSpec",
    "validate_behavior",
    "is_deterministic",
    "EnactedSystem",
    "FullEnactedSystem",
    "enacted_system",
    "full_enacted_system",
    "SimulationRelation",
    "Partition",
    "largest_simulation",
    "simulates",
    "sim_equivalent",
    "bisim_partition",
    "quotient",
    "ApproxResult",
    "PrunedFull",
    "approximate",
    "compute_approx",
    "check_exact",
    "GameStructure",
    "WinningSet",
    "build_game",
    "solve_safety",
    "extract_approx_from_game",
    "game_approx",
    "ControllerTable",
    "constant_controller",
    "action_controller",
    "RandomResolver",
    "AdversarialResolver",
    "Session",
    "SessionLog",
    "StepRecord",
    "TraceSet",
    "realized_traces_bounded",
    "dominates",
    "ProblemFile",
    "parse_problem",
    "parse_problem_file",
    "parse_target",
    "serialize_problem",
    "serialize_target",
    "export_dot",
    "export_ispl",
    "run_cli",
    "__version__",
]

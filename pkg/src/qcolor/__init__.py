"""Query-model graph coloring: greedy, randomized and simulated-quantum algorithms."""

from .graph import (
    Coloring,
    EdgeListError,
    GenerationError,
    Graph,
    ValidityReport,
    gen_gnp,
    gen_regular_like,
    gen_single_edge,
    read_edge_list,
    validate_coloring,
    write_edge_list,
)
from .greedy import discover_max_degree, greedy_color
from .grover import (
    GroverInstance,
    GroverOutcome,
    find_conflict,
    find_conflict_amplified,
    grover_success_prob,
    measure_grover,
    statevector_reference,
)
from .oracle import BudgetExhausted, OracleSession, QueryCounts
from .quantum import QuantumBudget, budget_values, quantum_color, quantum_color_auto
from .randomized import (
    EpsilonParams,
    ParameterError,
    PartialColoring,
    color_auto,
    find_conflict_classical,
    lv_color,
    mc_color,
    palette_size,
)

__version__ = "0.1.0"

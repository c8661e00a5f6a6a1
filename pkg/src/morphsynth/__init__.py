"""Combinatorial synthesis of modular systems with interval multiset estimates."""

from .aggregation import (
    Candidate,
    Kernel,
    KernelExtension,
    extend_kernel,
    subsolution,
    supersolution,
)
from .choice import ChoiceInstance, ChoiceItem, ChoiceSolution, evaluate, rank_selection, solve
from .errors import MorphSynthError
from .estimates import (
    Dominance,
    Median,
    MultisetEstimate,
    ProximityVector,
    Scale,
    dominates,
    enumerate_scale,
    generalized_median,
    hasse_edges,
    integrate,
    make_estimate,
    multiset_coefficient,
    parse_estimate,
    proximity,
    set_median,
)
from .improvement import (
    Bottleneck,
    ImprovementAction,
    ImprovementPlan,
    find_bottlenecks,
    plan_improvement,
)
from .model import (
    CompatibilityTable,
    Component,
    DesignAlternative,
    MorphModel,
    builtin_dataset,
    design_space_size,
    load_model,
    parse_model,
    serialize_model,
)
from .synthesis import (
    CompositeSolution,
    ParetoFront,
    bottom_up,
    pareto_filter,
    score,
    synthesize_component,
)

__version__ = "0.1.0"

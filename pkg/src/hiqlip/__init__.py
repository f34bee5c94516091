"""hiqlip: Lipschitz-constant estimation for dense ReLU networks via
Ising/QUBO cut-norm solvers and a multilevel coarsen-solve-refine driver."""

from .baselines import SamplingConfig, brute_force_fgl, mp_bound, sampling_lower_bound
from .cutnorm import (
    CouplingProblem,
    SolverConfig,
    SpinAssignment,
    build_cut_problem,
    build_fgl_problem,
    cut_norm_inf1,
    energy,
    fgl_problem_from_matrix,
    solve,
)
from .errors import CapError, FormatError, HiqlipError, SolverError
from .estimate import Estimate, config_digest
from .hierarchy import (
    Embedding,
    Hierarchy,
    LevelGraph,
    Matching,
    build_hierarchy,
    coarsen_once,
    embed,
    gains,
    hiq_lip_two_layer,
    level_from_problem,
    level_energy,
    problem_from_level,
    project,
    refine_level,
    solve_hierarchical,
)
from .multilayer import (
    block_product,
    hiq_lip_multilayer,
    layerwise_recursion,
    mp_coefficient,
    pair_constants,
)
from .netio import (
    ClassReduction,
    Network,
    class_reduction,
    generate_synthetic,
    load_network,
    save_network,
)

__version__ = "0.1.0"

__all__ = [
    "CapError",
    "ClassReduction",
    "CouplingProblem",
    "Embedding",
    "Estimate",
    "FormatError",
    "Hierarchy",
    "HiqlipError",
    "LevelGraph",
    "Matching",
    "Network",
    "SamplingConfig",
    "SolverConfig",
    "SolverError",
    "SpinAssignment",
    "block_product",
    "brute_force_fgl",
    "build_cut_problem",
    "build_fgl_problem",
    "build_hierarchy",
    "class_reduction",
    "coarsen_once",
    "config_digest",
    "cut_norm_inf1",
    "embed",
    "energy",
    "fgl_problem_from_matrix",
    "gains",
    "generate_synthetic",
    "hiq_lip_multilayer",
    "hiq_lip_two_layer",
    "layerwise_recursion",
    "level_energy",
    "level_from_problem",
    "load_network",
    "mp_bound",
    "mp_coefficient",
    "pair_constants",
    "problem_from_level",
    "project",
    "refine_level",
    "sampling_lower_bound",
    "save_network",
    "solve",
    "solve_hierarchical",
]

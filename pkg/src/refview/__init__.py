"""refview: reference-view selection for bandwidth-constrained interactive
multiview navigation.

Given camera positions on a view line, a client navigation window, and a
budget of deliverable views, the package selects the distortion-minimizing
set of reference views, allowing the network edge to synthesize virtual
references in addition to forwarding camera views. It ships an optimal
polynomial-time solver, two assumption-free exact oracles, checkers for the
structural assumptions the fast solver relies on, a set-cover hardness
gadget, a Gauss-Markov precision analysis, and an experiment/CLI layer.
"""

from .assumptions import (
    AssumptionReport,
    check_independence,
    check_shared_optimality,
    fixture_checker_args,
    fixture_path,
    fixture_scenario,
)
from .distortion import (
    BetaMode,
    ClosedFormEvaluator,
    SynthParams,
    TabulatedEvaluator,
    eval_closed_form,
    load_tabulated,
    read_table_csv,
    reference_distortion,
    write_table_csv,
)
from .dp import (
    DPContext,
    Selection,
    aggregate_distortion,
    check_staircase,
    lambda_select,
    make_context,
    phi,
    psi,
    selection_from_refs,
    solve,
)
from .errors import (
    ConfigError,
    CoverageGap,
    DuplicateKey,
    EmptyCameraSet,
    IndexOutOfRange,
    Infeasible,
    InvalidOrdering,
    InvalidParameters,
    NegativeDistortion,
    NonIntegralPosition,
    NoValidProbe,
    RefViewError,
    TooLarge,
    Unsynthesizable,
)
from .experiments import (
    SweepResult,
    SweepRow,
    psnr_of,
    sweep_camera_randomness,
    sweep_capacity,
    sweep_sampling_distance,
    sweep_window_left,
    sweep_window_size,
    threshold_capacity,
)
from .gaussmarkov import (
    GMChain,
    chain,
    compare_synth_vs_direct,
    conditional_precision,
    covariance_matrix,
    precision_matrix,
)
from .grid import NavigationWindow, ViewGrid, ViewTick, build_grid, window_from_request
from .oracle import exhaustive_solve, treesearch_solve
from .scenario import CandidateMode, Scenario, SolveContext, load_config, parse_config
from .setcover import (
    GadgetInstance,
    SetCoverInstance,
    build_gadget,
    decide,
    min_cover_size,
    read_setcover_csv,
)

__version__ = "0.1.0"

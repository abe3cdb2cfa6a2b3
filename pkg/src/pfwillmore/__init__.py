"""Phase-field approximations of the Willmore energy and its L2 gradient flows.

Library layout:

    grid       periodic grids, FFT transforms, spectral/FD operators
    profiles   double well, optimal 1D profile, asymptotic correctors
    geometry   signed distances, CSG scenes, initial (u, mu) data
    energies   the four diffuse energies, correction terms, L2 gradients,
               finite-difference gradient oracle
    flows      semi-implicit fixed-point steppers and stability diagnostics
    analysis   contours, radii, components, pair distances, time series
    config/io  run configuration, snapshot and CSV formats
    run        experiment driver
    cli        command-line front end
"""

from .analysis import (
    Contour,
    SeriesPoint,
    contour_length,
    count_components,
    estimate_radius,
    extract_contour,
    min_pair_distance,
)
from .config import RunConfig, parse_config
from .energies import (
    EnergyReport,
    RegParams,
    check_gradient,
    eval_bellettini,
    eval_classical,
    eval_discrepancy,
    eval_err,
    eval_j_terms,
    eval_mugnai,
    eval_perimeter,
    grad_bellettini,
    grad_classical,
    grad_err,
    grad_mugnai,
    grad_mugnai_penalty,
)
from .flows import (
    DivergenceError,
    FlowSession,
    ModelParams,
    NonConvergenceError,
    StabilityReport,
    new_session,
    stability_limits,
    step,
)
from .geometry import InitPair, builtin_scene, init_fields, signed_distance
from .grid import PeriodicGrid, make_grid
from .io import Snapshot, read_snapshot, read_series, write_series, write_snapshot
from .profiles import profile_integrals, profile_q, solve_eta1, well
from .run import RunResult, run_flow

__version__ = "0.1.0"

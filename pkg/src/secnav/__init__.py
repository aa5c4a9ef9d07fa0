"""Safe-corridor navigation of a ground entity with landmark localization.

Modules
-------
geometry      convex hulls (Graham, Chan) and point-in-hull tests
motion        battlefield motion model with clamps and process noise
localization  simulated ranging, trilateration and range-residual refinement
ekf           extended Kalman filter over (x, y, v, heading)
scenario      landmark maps, ground-truth routes, safe corridors, file format
navigator     the safety-checked guidance loop and its two estimators
metrics       percent length error, ADE, FDE and batch summaries
experiment    seeded trial batches and result files
cli           ``secnav generate | run | plot``
"""
from .errors import (
    DegenerateGeometry,
    DegenerateInput,
    EmptyCluster,
    InsufficientAnchors,
    NonConvergence,
    ParseError,
    ScenarioError,
    SecNavError,
    SingularInnovation,
    VersionMismatch,
    ZeroLengthTruth,
    ZeroSpeed,
)
from .geometry import ConvexHullPolygon, PathSegment, Point2, chan_hull, graham_scan, point_in_convex_hull
from .motion import ControlInput, EntityState, MotionParams, ProcessNoise, compute_control, step
from .localization import Landmark, LandmarkIndex, MeasurementNoise, lanbloc_fix, lanbloc_measure
from .ekf import BeliefState, FilterConfig, predict, update
from .scenario import (
    BattlefieldMap,
    NoiseConfig,
    SafeCorridor,
    Scenario,
    build_safe_corridor,
    builtin_scenario,
    generate_ground_truth,
    load_scenario,
    save_scenario,
)
from .navigator import APPROACH_BMM, APPROACH_EKF, APPROACHES, Decision, NavConfig, navigate, safety_check
from .metrics import ade, batch_evaluate, fde, percent_error
from .experiment import ExperimentConfig, run_experiment

__version__ = "0.1.0"

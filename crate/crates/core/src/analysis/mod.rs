//! Ordering, modal quantities, comparison metrics and sweeps.

mod campbell;
mod compare;
mod metrics;
mod modal;
mod ordering;
pub mod report;

pub use campbell::{
    campbell_sweep, damped_frequencies, find_crossings, CampbellPoint, CampbellTable, Crossing,
    ModalSolver, OSCILLATION_TOL,
};
pub use compare::{
    compare_methods, compare_sweep, reference_eigenvalues, replay, run_method, sweep_jobs,
    write_replay_csv, ComparisonReport, MethodRun, MethodScore, ReplayColumn, ReplayRow,
    ReplayScenario, ReplayTables, Solver, SweepReport,
};
pub use metrics::{error_metric, ranks, score_metric, RankHistogram, SCORED_RANKS};
pub use modal::{critical_speed_filter, modal_quantities, CriticalSpeedResult, ModalQuantities};
pub use ordering::{canonical_order, canonical_sort, canonical_sort_values, SortMode, PAIR_TOL};

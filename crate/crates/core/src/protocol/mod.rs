//! The extraction protocol: start in the ground state, ramp quadratically
//! into the target point, measure `⟨(H − E₀)²⟩` and convert it to a QFI.

mod crossings;
mod extract;
mod measure;

pub use crossings::{
    scan_ground_crossings, step_intervals, CrossingInterval, CrossingScan, GapMinimum, ScanPoint,
    CROSSING_OVERLAP, MAX_SCAN_STEP,
};
pub use extract::{
    extract_qfi, extract_qfi_sweep, extract_qfim_sum, linear_fit, loglog_slope, qfim_offdiagonal,
    relative_error, ExtractionJob, ExtractionSetup, QfiEstimate, SweepResult,
    DEFAULT_GRID_GAP_FRACTION, DEFAULT_GRID_POPULATION, DEFAULT_GRID_SWITCH_ON,
    NON_ADIABATIC_POPULATION,
};
pub use measure::{measure_sah, measure_variance};

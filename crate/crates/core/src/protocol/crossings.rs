//! Ground-state level-crossing scans over a model constant.

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigensystem, StateVector, DEFAULT_GAP_TOL};
use crate::models::{ModelRegistry, ModelSpec};

/// Successive ground states overlapping less than this mark a crossing.
pub const CROSSING_OVERLAP: f64 = 0.5;

/// Largest grid step for which the scan is considered reliable.
pub const MAX_SCAN_STEP: f64 = 0.01;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub value: f64,
    pub ground_energy: f64,
    pub gap: f64,
    /// Ground state degenerate within the default gap tolerance.
    pub degenerate: bool,
}

/// A run of adjacent grid intervals flagged as crossings, merged.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingInterval {
    pub lo: f64,
    pub hi: f64,
    /// Smallest ground-state overlap across the interval, where defined.
    pub min_overlap: Option<f64>,
    /// Grid points inside the interval where the ground state is degenerate.
    pub degenerate_at: Vec<f64>,
}

impl CrossingInterval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapMinimum {
    pub value: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CrossingScan {
    pub points: Vec<ScanPoint>,
    pub crossings: Vec<CrossingInterval>,
    /// Interior local minima of `E₁ − E₀` along the grid.
    pub gap_minima: Vec<GapMinimum>,
}

/// Merges consecutive flagged grid intervals `[i, i+1]`.
fn merge_flags(grid: &[f64], flags: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    for (i, &f) in flags.iter().enumerate() {
        match (f, open) {
            (true, None) => open = Some(i),
            (false, Some(s)) => {
                out.push((s, i));
                open = None;
            }
            _ => {}
        }
    }
    if let Some(s) = open {
        out.push((s, flags.len()));
    }
    debug_assert!(out.iter().all(|&(_, e)| e < grid.len()));
    out
}

/// Scans the constant `key` of `base` over `grid` with the parameters held at
/// `params`, comparing successive ground states.
///
/// An interval is a crossing when `|⟨φ₀(a)|φ₀(b)⟩| < 0.5` or when either end
/// has a degenerate ground state; adjacent flagged intervals are merged.
pub fn scan_ground_crossings(
    base: &ModelSpec,
    key: &str,
    grid: &[f64],
    params: &[f64],
) -> Result<CrossingScan> {
    if grid.len() < 2 {
        return Err(Error::InvalidInput(
            "a scan needs at least two grid points".into(),
        ));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::InvalidInput(
            "scan grid must be strictly increasing".into(),
        ));
    }
    let widest = grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max);
    if widest > MAX_SCAN_STEP * (1.0 + 1e-9) {
        warn!(
            "scan step {widest} exceeds {MAX_SCAN_STEP}; nearby crossings may merge or be missed"
        );
    }

    let registry = ModelRegistry::builtin();
    let mut points = Vec::with_capacity(grid.len());
    let mut grounds: Vec<Option<StateVector>> = Vec::with_capacity(grid.len());
    for &x in grid {
        let model = registry.build(&base.clone().with(key, x))?;
        let spectrum = eigensystem(&model.hamiltonian(params)?)?;
        let degenerate = spectrum.check_nondegenerate(DEFAULT_GAP_TOL).is_err();
        points.push(ScanPoint {
            value: x,
            ground_energy: spectrum.ground_energy(),
            gap: spectrum.gap0(),
            degenerate,
        });
        grounds.push((!degenerate).then(|| spectrum.ground_state()));
    }

    let mut overlaps = Vec::with_capacity(grid.len() - 1);
    for i in 0..grid.len() - 1 {
        overlaps.push(match (&grounds[i], &grounds[i + 1]) {
            (Some(a), Some(b)) => Some(a.overlap(b)?),
            _ => None,
        });
    }
    let flags: Vec<bool> = overlaps
        .iter()
        .map(|o| o.map_or(true, |o| o < CROSSING_OVERLAP))
        .collect();

    let crossings = merge_flags(grid, &flags)
        .into_iter()
        .map(|(s, e)| CrossingInterval {
            lo: grid[s],
            hi: grid[e],
            min_overlap: overlaps[s..e].iter().flatten().copied().reduce(f64::min),
            degenerate_at: (s..=e)
                .filter(|&k| points[k].degenerate)
                .map(|k| grid[k])
                .collect(),
        })
        .collect();

    let gap_minima = (1..grid.len() - 1)
        .filter(|&k| points[k].gap <= points[k - 1].gap && points[k].gap <= points[k + 1].gap)
        .map(|k| GapMinimum {
            value: grid[k],
            gap: points[k].gap,
        })
        .collect();

    Ok(CrossingScan {
        points,
        crossings,
        gap_minima,
    })
}

/// Merged grid intervals across which `values` jumps by more than
/// `threshold`, or where either end is missing (NaN).
pub fn step_intervals(grid: &[f64], values: &[f64], threshold: f64) -> Result<Vec<(f64, f64)>> {
    if grid.len() != values.len() {
        return Err(Error::InvalidInput(
            "grid and values differ in length".into(),
        ));
    }
    if grid.len() < 2 {
        return Ok(Vec::new());
    }
    let flags: Vec<bool> = values
        .windows(2)
        .map(|w| w[0].is_nan() || w[1].is_nan() || (w[1] - w[0]).abs() > threshold)
        .collect();
    Ok(merge_flags(grid, &flags)
        .into_iter()
        .map(|(s, e)| (grid[s], grid[e]))
        .collect())
}

//! Whole-table verification: sample structures per classification row, then
//! check the closed form against a numeric scan for each.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{NonUnimodularStructure, Structure, UnimodularStructure};
use crate::classify::{classify, CaseLabel, NonUnimodularRow, UnimodularRow};
use crate::compare::compare;
use crate::error::Result;
use crate::parallel::Execution;
use crate::scan::{numeric_scan_with, QMode, ScanOptions};
use crate::tolerances::Tolerances;

pub const DEFAULT_GRID_N: usize = 256;
pub const DEFAULT_SAMPLES: usize = 5;
pub const DEFAULT_SEED: u64 = 1;

/// Sampled constants stay in `[-LIMIT, LIMIT]`.
const LIMIT: f64 = 4.0;
/// Minimum gap between sampled constants meant to differ, and between
/// nonzero constants and zero, so no sample sits near a case boundary.
const GAP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Table {
    Unimodular,
    Nonunimodular,
}

impl Table {
    pub fn rows(&self) -> Vec<CaseLabel> {
        match self {
            Table::Unimodular => UnimodularRow::ALL.iter().map(|&r| CaseLabel::Unimodular(r)).collect(),
            Table::Nonunimodular => NonUnimodularRow::ALL.iter().map(|&r| CaseLabel::Nonunimodular(r)).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproduceOptions {
    pub samples: usize,
    pub seed: u64,
    pub grid_n: usize,
    pub execution: Execution,
    pub tolerances: Tolerances,
}

impl Default for ReproduceOptions {
    fn default() -> Self {
        Self {
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            grid_n: DEFAULT_GRID_N,
            execution: Execution::default(),
            tolerances: Tolerances::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleOutcome {
    pub structure: Structure,
    /// Row assigned by the classifier; must equal the sampled row.
    pub classified_as: CaseLabel,
    pub components: usize,
    pub scan_points: usize,
    pub unmatched_points: usize,
    pub uncovered_components: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowOutcome {
    pub row: CaseLabel,
    pub samples: Vec<SampleOutcome>,
}

impl RowOutcome {
    pub fn passed(&self) -> bool {
        self.samples.iter().all(|s| s.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableOutcome {
    pub table: Table,
    pub seed: u64,
    pub grid_n: usize,
    pub rows: Vec<RowOutcome>,
}

impl TableOutcome {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(RowOutcome::passed)
    }
}

fn magnitude(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo..=hi)
}

/// A value of the given sign (`0` for exactly zero), at least `GAP` from zero.
fn signed(rng: &mut ChaCha8Rng, sign: i8) -> f64 {
    match sign {
        0 => 0.0,
        s => f64::from(s) * magnitude(rng, GAP, LIMIT),
    }
}

/// Sorted triple `c1 >= c2 >= c3` in the given row.
pub fn sample_unimodular(row: UnimodularRow, rng: &mut ChaCha8Rng) -> UnimodularStructure {
    use UnimodularRow::*;
    // sign pattern and which neighbors are equal
    let (signs, eq12, eq23): ([i8; 3], bool, bool) = match row {
        AllEqualNonzero => {
            let s = if rng.random_bool(0.5) { 1 } else { -1 };
            ([s; 3], true, true)
        }
        AllZero => ([0; 3], true, true),
        TopSimpleOthersEqual => {
            let s = [[1, 1, 1], [1, -1, -1], [-1, -1, -1], [0, -1, -1]][rng.random_range(0..4)];
            (s, false, true)
        }
        Heisenberg => ([1, 0, 0], false, true),
        TopDoubleNonzero => {
            let s = [[1, 1, 1], [1, 1, 0], [1, 1, -1], [-1, -1, -1]][rng.random_range(0..4)];
            (s, true, false)
        }
        TopDoubleZero => ([0, 0, -1], true, false),
        DistinctPositive => ([1, 1, 1], false, false),
        DistinctOneNegative => ([1, 1, -1], false, false),
        DistinctTwoNegative => ([1, -1, -1], false, false),
        DistinctNegative => ([-1, -1, -1], false, false),
        DistinctLastZero => ([1, 1, 0], false, false),
        DistinctMiddleZero => ([1, 0, -1], false, false),
        DistinctFirstZero => ([0, -1, -1], false, false),
    };
    loop {
        let mut c = signs.map(|s| signed(rng, s));
        if eq12 {
            c[1] = c[0];
        }
        if eq23 {
            c[2] = c[1];
        }
        let ordered = |a: f64, b: f64, same: bool| if same { a == b } else { a - b >= GAP };
        if ordered(c[0], c[1], eq12) && ordered(c[1], c[2], eq23) {
            return UnimodularStructure::new(c[0], c[1], c[2]).expect("finite");
        }
    }
}

pub fn sample_nonunimodular(row: NonUnimodularRow, rng: &mut ChaCha8Rng) -> NonUnimodularStructure {
    use NonUnimodularRow::*;
    let (alpha, beta) = match row {
        InvariantAboveOne => {
            let alpha = if rng.random_bool(0.3) { 0.0 } else { magnitude(rng, 0.05, 0.6) };
            // D >= 1.25
            let beta_min = (1.25 / (1.0 - alpha * alpha) - 1.0).sqrt();
            (alpha, magnitude(rng, beta_min, LIMIT))
        }
        Hyperbolic => (0.0, 0.0),
        InvariantOne => {
            let alpha = magnitude(rng, 0.1, 0.9);
            (alpha, alpha / (1.0 - alpha * alpha).sqrt())
        }
        InvariantBetweenBetaZero => (magnitude(rng, 0.1, 0.9), 0.0),
        InvariantBetweenGeneral => {
            let alpha = magnitude(rng, 0.1, 0.9);
            let beta_max = alpha / (1.0 - alpha * alpha).sqrt();
            (alpha, magnitude(rng, 0.1 * beta_max, 0.85 * beta_max))
        }
        InvariantZeroBetaZero => (1.0, 0.0),
        InvariantZeroGeneral => (1.0, magnitude(rng, GAP, LIMIT)),
        InvariantNegativeBetaZero => (magnitude(rng, 1.0 + GAP, LIMIT), 0.0),
        InvariantNegativeGeneral => (magnitude(rng, 1.0 + GAP, LIMIT), magnitude(rng, GAP, LIMIT)),
    };
    NonUnimodularStructure::new(alpha, beta).expect("sampled in range")
}

pub fn sample_row(row: CaseLabel, rng: &mut ChaCha8Rng) -> Structure {
    match row {
        CaseLabel::Unimodular(r) => sample_unimodular(r, rng).into(),
        CaseLabel::Nonunimodular(r) => sample_nonunimodular(r, rng).into(),
    }
}

/// Closed form versus scan for one structure.
pub fn verify(s: &Structure, row: CaseLabel, opts: &ReproduceOptions) -> Result<SampleOutcome> {
    let set = classify(s);
    let scan_opts = ScanOptions {
        grid_n: opts.grid_n,
        q_mode: QMode::Free,
        execution: opts.execution,
        tolerances: opts.tolerances,
    };
    let scan = numeric_scan_with(s, &scan_opts)?;
    let report = compare(&set, &scan)?;
    Ok(SampleOutcome {
        structure: *s,
        classified_as: set.case,
        components: set.components.len(),
        scan_points: scan.points.len(),
        unmatched_points: report.unmatched_points.len(),
        uncovered_components: report.uncovered().count(),
        passed: report.matched && set.case == row,
    })
}

/// Samples `opts.samples` structures per row (rows with a single member are
/// sampled once) and verifies each. Deterministic in `opts.seed`.
pub fn reproduce(table: Table, opts: &ReproduceOptions) -> Result<TableOutcome> {
    let mut rows = Vec::new();
    for (n, row) in table.rows().into_iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(n as u64);
        let mut structures: Vec<Structure> = Vec::new();
        for _ in 0..opts.samples {
            let s = sample_row(row, &mut rng);
            if !structures.contains(&s) {
                structures.push(s);
            }
        }
        let samples = structures.iter().map(|s| verify(s, row, opts)).collect::<Result<Vec<_>>>()?;
        rows.push(RowOutcome { row, samples });
    }
    Ok(TableOutcome { table, seed: opts.seed, grid_n: opts.grid_n, rows })
}

//! Report types shared by every output format, and their construction.

use liemag::algebra::{signature_classify, MuConstants, SignatureClass, Structure, StructureCoefficients};
use liemag::classify::{classify, SolutionComponent, SolutionSet};
use liemag::compare::{compare, ComponentCoverage};
use liemag::frame::{Axis, FrameVector};
use liemag::geometry::{
    connection_table, phi_sectional, ricci, sectional, ConnectionTable, ContactCurvature, RicciData,
};
use liemag::magnetic::{solve_q_with, unit_magnetic_residual, QConstraint, ResidualPair, Uvw};
use liemag::reproduce::{reproduce, ReproduceOptions, Table, TableOutcome};
use liemag::scan::{numeric_scan_with, QMode, ScanOptions, ScanResult, ScanStats};
use liemag::tolerances::{Tolerances, MATCH_CHARGE};
use serde::{Deserialize, Serialize};

/// Charges probed when measuring the residual of an any-charge component.
const PROBE_CHARGES: [f64; 3] = [-2.7, 0.0, 3.1];
/// Sample points per component for the residual column.
const RESIDUAL_SAMPLES: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tolerance: f64,
    pub body: Body,
    /// Wall-clock milliseconds; only recorded with `--timing` so that reports
    /// stay byte-identical across runs otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "snake_case")]
pub enum Body {
    Describe(Box<Description>),
    Check(CheckReport),
    Solve(SolveReport),
    Reproduce(TableOutcome),
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match &self.body {
            Body::Describe(_) => 0,
            Body::Check(c) if c.magnetic => 0,
            Body::Check(_) => 1,
            Body::Solve(s) => match &s.comparison {
                Some(c) if !c.matched => 3,
                _ => 0,
            },
            Body::Reproduce(t) if t.passed() => 0,
            Body::Reproduce(_) => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Description {
    pub structure: Structure,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub signature: Option<SignatureClass>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<MuConstants>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub milnor_invariant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients: Option<StructureCoefficients>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uvw: Option<Uvw>,
    pub connection: ConnectionTable,
    pub ricci: RicciData,
    /// `K12`, `K13`, `K23`.
    pub sectional: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact: Option<ContactCurvature>,
}

pub fn describe(s: &Structure) -> Description {
    let k = |i, j| sectional(s, i, j).expect("distinct axes");
    let mut d = Description {
        structure: *s,
        signature: None,
        mu: None,
        milnor_invariant: None,
        coefficients: None,
        uvw: None,
        connection: connection_table(s),
        ricci: ricci(s),
        sectional: [k(Axis::E1, Axis::E2), k(Axis::E1, Axis::E3), k(Axis::E2, Axis::E3)],
        contact: None,
    };
    match s {
        Structure::Unimodular(u) => {
            d.signature = Some(signature_classify(u));
            d.mu = Some(u.mu());
            d.contact = phi_sectional(u).ok();
        }
        Structure::NonUnimodular(n) => {
            d.milnor_invariant = Some(n.milnor_invariant());
            d.coefficients = Some(n.coefficients());
            d.uvw = Some(Uvw::of(n));
        }
    }
    d
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub structure: Structure,
    /// The field after normalization.
    pub x: FrameVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    /// Residuals at the given charge, or at the solved charge (zero when none).
    pub residual: ResidualPair,
    pub first_norm: f64,
    pub second_norm: f64,
    /// Charges for which `x` is magnetic; `None` when there are none.
    pub charge: Option<QConstraint>,
    pub magnetic: bool,
}

pub fn check(s: &Structure, x: FrameVector, q: Option<f64>, tol: &Tolerances) -> liemag::Result<CheckReport> {
    let (charge, at) = match q {
        Some(q) => {
            let r = unit_magnetic_residual(s, x, q)?;
            (r.vanishes(tol.residual).then_some(QConstraint::FixedQ(q)), q)
        }
        None => {
            let c = solve_q_with(s, x, tol)?;
            (c, c.and_then(|c| c.value()).unwrap_or(0.0))
        }
    };
    let residual = unit_magnetic_residual(s, x, at)?;
    Ok(CheckReport {
        structure: *s,
        x,
        q,
        residual,
        first_norm: residual.first.norm(),
        second_norm: residual.second.norm(),
        charge,
        magnetic: charge.is_some(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMode {
    Symbolic,
    Numeric,
    Both,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentRow {
    pub component: SolutionComponent,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionReport {
    pub case: liemag::classify::CaseLabel,
    pub components: Vec<ComponentRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    pub grid_n: usize,
    pub stats: ScanStats,
    pub points: usize,
    pub any_q_points: usize,
    pub max_residual: f64,
    /// Distinct fixed charges among converged points, ascending.
    pub charges: Vec<f64>,
}

impl ScanSummary {
    fn of(scan: &ScanResult) -> ScanSummary {
        let mut charges: Vec<f64> = scan.points.iter().filter_map(|p| p.q.value()).collect();
        charges.sort_by(f64::total_cmp);
        charges.dedup_by(|a, b| (*a - *b).abs() <= MATCH_CHARGE * (1.0 + b.abs()));
        ScanSummary {
            grid_n: scan.grid_n,
            stats: scan.stats,
            points: scan.points.len(),
            any_q_points: scan.points.iter().filter(|p| p.q.is_any()).count(),
            max_residual: scan.max_residual(),
            charges,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonSummary {
    pub matched: bool,
    pub components: Vec<ComponentCoverage>,
    pub unmatched_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub structure: Structure,
    pub mode: SolveMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scan: Option<ScanSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonSummary>,
}

fn solution_report(s: &Structure, set: &SolutionSet) -> SolutionReport {
    SolutionReport {
        case: set.case,
        components: set
            .components
            .iter()
            .map(|&c| ComponentRow { component: c, max_residual: c.max_residual(s, RESIDUAL_SAMPLES, &PROBE_CHARGES) })
            .collect(),
    }
}

pub fn solve(s: &Structure, mode: SolveMode, grid_n: usize, tol: &Tolerances) -> liemag::Result<SolveReport> {
    let set = classify(s);
    let scan = match mode {
        SolveMode::Symbolic => None,
        SolveMode::Numeric | SolveMode::Both => {
            let opts = ScanOptions { q_mode: QMode::Free, tolerances: *tol, ..ScanOptions::new(grid_n) };
            Some(numeric_scan_with(s, &opts)?)
        }
    };
    let comparison = match (mode, &scan) {
        (SolveMode::Both, Some(scan)) => {
            let m = compare(&set, scan)?;
            Some(ComparisonSummary {
                matched: m.matched,
                unmatched_points: m.unmatched_points.len(),
                components: m.components,
            })
        }
        _ => None,
    };
    Ok(SolveReport {
        structure: *s,
        mode,
        solution: (mode != SolveMode::Numeric).then(|| solution_report(s, &set)),
        scan: scan.as_ref().map(ScanSummary::of),
        comparison,
    })
}

pub fn reproduce_table(
    table: Table,
    samples: usize,
    seed: u64,
    grid_n: usize,
    tol: &Tolerances,
) -> liemag::Result<TableOutcome> {
    let opts = ReproduceOptions { samples, seed, grid_n, tolerances: *tol, ..ReproduceOptions::default() };
    reproduce(table, &opts)
}

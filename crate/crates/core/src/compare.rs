//! Cross-check of a closed-form solution set against a numeric scan.

use serde::{Deserialize, Serialize};

use crate::classify::{ComponentKind, SolutionComponent, SolutionSet};
use crate::error::{Error, Result};
use crate::scan::{ScanPoint, ScanResult};
use crate::tolerances::{MATCH_ANGLE, MATCH_CHARGE, MIN_FAMILY_HITS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentCoverage {
    pub component: SolutionComponent,
    pub hits: usize,
    pub required: usize,
}

impl ComponentCoverage {
    pub fn covered(&self) -> bool {
        self.hits >= self.required
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatchReport {
    pub matched: bool,
    /// Set when the closed form contains the whole sphere and the scan covers it.
    pub sphere_coverage: bool,
    pub components: Vec<ComponentCoverage>,
    /// Scan points lying on no component with a compatible charge.
    pub unmatched_points: Vec<ScanPoint>,
}

impl MatchReport {
    pub fn uncovered(&self) -> impl Iterator<Item = &ComponentCoverage> {
        self.components.iter().filter(|c| !c.covered())
    }
}

fn on_component(c: &SolutionComponent, p: &ScanPoint) -> bool {
    c.kind.distance(p.x) < MATCH_ANGLE && c.q.compatible(&p.q, MATCH_CHARGE)
}

pub fn compare(set: &SolutionSet, scan: &ScanResult) -> Result<MatchReport> {
    if set.structure != scan.structure {
        return Err(Error::StructureMismatch);
    }
    let components: Vec<ComponentCoverage> = set
        .components
        .iter()
        .map(|c| ComponentCoverage {
            component: *c,
            hits: scan.points.iter().filter(|p| on_component(c, p)).count(),
            required: match c.kind {
                ComponentKind::PointPair { .. } => 1,
                _ => MIN_FAMILY_HITS,
            },
        })
        .collect();
    let unmatched_points: Vec<ScanPoint> =
        scan.points.iter().filter(|p| !set.components.iter().any(|c| on_component(c, p))).copied().collect();
    let sphere_coverage = components.iter().any(|c| c.component.kind == ComponentKind::FullSphere && c.covered());
    let matched = unmatched_points.is_empty() && components.iter().all(ComponentCoverage::covered);
    Ok(MatchReport { matched, sphere_coverage, components, unmatched_points })
}

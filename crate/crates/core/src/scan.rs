//! Numeric search for unit magnetic fields, independent of the case analysis.
//!
//! The sphere is sampled on a Fibonacci grid. Grid points that are local
//! minima of the residual (or already solve the system) seed a Gauss-Newton
//! refinement in tangent coordinates, with the charge as an extra unknown.
//! Two systems are solved: `A - qB = 0, H = 0` for a single charge, and the
//! charge-free `A = 0, B = 0, H = 0` whose roots are magnetic for every `q`.
//! Here `A` is the curvature trace, `B = nabla_X X` and `H` the harmonic residual.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::algebra::Structure;
use crate::classify::fibonacci_sphere;
use crate::error::{Error, Result};
use crate::frame::FrameVector;
use crate::geometry::Matrix3;
use crate::magnetic::{MagneticForms, QConstraint};
use crate::parallel::{map_collect, Execution};
use crate::tolerances::{
    Tolerances, DEDUP_ANGLE, MATCH_CHARGE, NEWTON_MAX_ITERATIONS, NEWTON_RESIDUAL, NEWTON_STEP, SCAN_ANY_Q,
};

pub const MIN_GRID_N: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "q", rename_all = "snake_case")]
pub enum QMode {
    /// Solve for the charge.
    Free,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub grid_n: usize,
    pub q_mode: QMode,
    pub execution: Execution,
    pub tolerances: Tolerances,
}

impl ScanOptions {
    pub fn new(grid_n: usize) -> Self {
        Self { grid_n, q_mode: QMode::Free, execution: Execution::default(), tolerances: Tolerances::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanPoint {
    pub x: FrameVector,
    pub q: QConstraint,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ScanStats {
    pub grid_points: usize,
    pub seeds: usize,
    pub converged: usize,
    /// Seeds whose refinement ended above the residual tolerance.
    pub rejected: usize,
    pub newton_iterations: usize,
    pub max_newton_iterations: usize,
}

impl ScanStats {
    fn absorb(&mut self, o: &ScanStats) {
        self.grid_points = self.grid_points.max(o.grid_points);
        self.seeds += o.seeds;
        self.converged += o.converged;
        self.rejected += o.rejected;
        self.newton_iterations += o.newton_iterations;
        self.max_newton_iterations = self.max_newton_iterations.max(o.max_newton_iterations);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub structure: Structure,
    pub grid_n: usize,
    pub q_mode: QMode,
    pub points: Vec<ScanPoint>,
    pub stats: ScanStats,
}

impl ScanResult {
    pub fn max_residual(&self) -> f64 {
        self.points.iter().map(|p| p.residual).fold(0.0, f64::max)
    }
}

pub fn numeric_scan(s: &Structure, grid_n: usize, q_mode: QMode) -> Result<ScanResult> {
    numeric_scan_with(s, &ScanOptions { q_mode, ..ScanOptions::new(grid_n) })
}

pub fn numeric_scan_with(s: &Structure, opts: &ScanOptions) -> Result<ScanResult> {
    if opts.grid_n < MIN_GRID_N {
        return Err(Error::GridTooSmall { got: opts.grid_n, min: MIN_GRID_N });
    }
    let forms = MagneticForms::new(s);
    let grid = fibonacci_sphere(opts.grid_n * opts.grid_n);
    let mut stats = ScanStats { grid_points: grid.len(), ..ScanStats::default() };
    let mut points = Vec::new();

    let systems: Vec<System> = match opts.q_mode {
        QMode::Free => vec![System::Any, System::Free],
        QMode::Fixed(q) => vec![System::Fixed(q)],
    };
    for system in systems {
        let (found, st) = run_system(&forms, &grid, system, opts);
        stats.absorb(&st);
        points.extend(found);
    }
    Ok(ScanResult { structure: *s, grid_n: opts.grid_n, q_mode: opts.q_mode, points: dedup(points), stats })
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum System {
    Any,
    Free,
    Fixed(f64),
}

struct Parts {
    a: FrameVector,
    b: FrameVector,
    h: FrameVector,
}

fn parts(forms: &MagneticForms, x: FrameVector) -> Parts {
    Parts { a: forms.curvature_trace(x), b: forms.self_derivative(x), h: forms.harmonic(x) }
}

fn least_squares_charge(p: &Parts) -> f64 {
    let bb = p.b.norm_squared();
    if bb > 0.0 {
        p.a.dot(p.b) / bb
    } else {
        0.0
    }
}

impl System {
    fn initial_charge(&self, p: &Parts) -> f64 {
        match self {
            System::Any => 0.0,
            System::Free => least_squares_charge(p),
            System::Fixed(q) => *q,
        }
    }

    fn residual(&self, p: &Parts, q: f64) -> f64 {
        match self {
            System::Any => (p.a.norm_squared() + p.b.norm_squared() + p.h.norm_squared()).sqrt(),
            _ => ((p.a - p.b * q).norm_squared() + p.h.norm_squared()).sqrt(),
        }
    }

    fn stacked(&self, p: &Parts, q: f64) -> DVector<f64> {
        let mut v: Vec<f64> = Vec::with_capacity(9);
        match self {
            System::Any => {
                v.extend(p.a.to_array());
                v.extend(p.b.to_array());
            }
            _ => v.extend((p.a - p.b * q).to_array()),
        }
        v.extend(p.h.to_array());
        DVector::from_vec(v)
    }

    fn jacobian(&self, forms: &MagneticForms, x: FrameVector, q: f64, p: &Parts, t: [FrameVector; 2]) -> DMatrix<f64> {
        let ja = forms.trace_jacobian(x);
        let jb = forms.derivative_jacobian(x);
        let jh = forms.harmonic_jacobian(x);
        let blocks: Vec<Matrix3> = match self {
            System::Any => vec![ja, jb, jh],
            _ => {
                let mut jf = ja;
                for (m, row) in jf.iter_mut().enumerate() {
                    for (n, v) in row.iter_mut().enumerate() {
                        *v -= q * jb[m][n];
                    }
                }
                vec![jf, jh]
            }
        };
        let free_charge = matches!(self, System::Free);
        let cols = if free_charge { 3 } else { 2 };
        let mut j = DMatrix::zeros(3 * blocks.len(), cols);
        for (bi, block) in blocks.iter().enumerate() {
            for m in 0..3 {
                for (c, tc) in t.iter().enumerate() {
                    j[(3 * bi + m, c)] = (0..3).map(|n| block[m][n] * tc[n]).sum();
                }
            }
        }
        if free_charge {
            for m in 0..3 {
                j[(m, 2)] = -p.b[m];
            }
        }
        j
    }

    fn label(&self, p: &Parts, q: f64, tol: &Tolerances) -> QConstraint {
        if p.b.norm() < SCAN_ANY_Q && p.a.norm() < tol.residual {
            return QConstraint::AnyQ;
        }
        match self {
            System::Fixed(q) => QConstraint::FixedQ(*q),
            System::Free => QConstraint::FixedQ(least_squares_charge(p)),
            System::Any => QConstraint::FixedQ(q),
        }
    }
}

fn tangent_basis(x: FrameVector) -> [FrameVector; 2] {
    let k = (0..3).min_by(|&i, &j| x[i].abs().total_cmp(&x[j].abs())).unwrap_or(0);
    let mut a = FrameVector::ZERO;
    a[k] = 1.0;
    let t1 = (a - x * x.dot(a)).normalized().expect("axis not parallel to x");
    let t2 = FrameVector::from_vector3(&x.to_vector3().cross(&t1.to_vector3()));
    [t1, t2]
}

struct Refined {
    x: FrameVector,
    q: f64,
    residual: f64,
    iterations: usize,
}

fn refine(forms: &MagneticForms, system: System, x0: FrameVector) -> Refined {
    let mut x = x0;
    let mut p = parts(forms, x);
    let mut q = system.initial_charge(&p);
    let mut res = system.residual(&p, q);
    let mut iterations = 0;
    while res >= NEWTON_RESIDUAL && iterations < NEWTON_MAX_ITERATIONS {
        iterations += 1;
        let t = tangent_basis(x);
        let j = system.jacobian(forms, x, q, &p, t);
        let f = system.stacked(&p, q);
        let svd = j.svd(true, true);
        let cutoff = 1e-12 * svd.singular_values.max().max(f64::MIN_POSITIVE);
        let Ok(step) = svd.solve(&(-f), cutoff) else {
            break;
        };
        let dq = if step.len() > 2 { step[2] } else { 0.0 };
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let trial = (x + t[0] * (lambda * step[0]) + t[1] * (lambda * step[1])).normalized();
            if let Some(xt) = trial {
                let pt = parts(forms, xt);
                let qt = q + lambda * dq;
                let rt = system.residual(&pt, qt);
                if rt < res {
                    accepted = Some((xt, pt, qt, rt));
                    break;
                }
            }
            lambda *= 0.5;
        }
        let Some((xt, pt, qt, rt)) = accepted else {
            break;
        };
        x = xt;
        p = pt;
        q = qt;
        res = rt;
        if lambda * step.norm() < NEWTON_STEP {
            break;
        }
    }
    let mut refined = Refined { x, q, residual: res, iterations };
    if res < NEWTON_RESIDUAL * 1e3 {
        polish(forms, system, &mut refined);
    }
    refined
}

/// At a double root the residual grows quadratically along one tangent
/// direction, so Gauss-Newton stalls near the square root of machine
/// precision. The directional derivative has a simple root there; this finds
/// it by Newton on central differences of the residual with the charge
/// eliminated by least squares.
fn polish(forms: &MagneticForms, system: System, r: &mut Refined) {
    let x0 = r.x;
    let t = tangent_basis(x0);
    let reduced = |x: FrameVector| {
        let p = parts(forms, x);
        let q = match system {
            System::Free => least_squares_charge(&p),
            _ => system.initial_charge(&p),
        };
        (system.stacked(&p, q), q)
    };
    let at = |a: f64, b: f64| (x0 + t[0] * a + t[1] * b).normalized();
    let eval = |a: f64, b: f64| at(a, b).map(|x| reduced(x).0);

    let h = 1e-6;
    let mut jac = DMatrix::zeros(if system == System::Any { 9 } else { 6 }, 2);
    for c in 0..2 {
        let (da, db) = if c == 0 { (h, 0.0) } else { (0.0, h) };
        let (Some(fp), Some(fm)) = (eval(da, db), eval(-da, -db)) else {
            return;
        };
        jac.set_column(c, &((fp - fm) / (2.0 * h)));
    }
    let svd = jac.svd(false, true);
    let Some(vt) = svd.v_t.as_ref() else {
        return;
    };
    let (imin, smin) = svd.singular_values.argmin();
    if smin > 1e-4 * svd.singular_values.max().max(1.0) {
        return;
    }
    let n = [vt[(imin, 0)], vt[(imin, 1)]];
    let line = |s: f64| eval(s * n[0], s * n[1]);

    let w = 1e-4;
    let (Some(fp), Some(fm), Some(f0)) = (line(w), line(-w), line(0.0)) else {
        return;
    };
    let curvature = (fp + fm - 2.0 * f0) / (w * w);
    let cc = curvature.norm_squared();
    if cc.sqrt() < 1e-3 {
        // flat along the null direction: a family of solutions
        return;
    }
    let d = 1e-5;
    let mut s = 0.0;
    for _ in 0..8 {
        let (Some(fp), Some(fm)) = (line(s + d), line(s - d)) else {
            return;
        };
        let ds = -((fp - fm) / (2.0 * d)).dot(&curvature) / cc;
        s += ds;
        if s.abs() > 1e-3 {
            return;
        }
        if ds.abs() < 1e-15 {
            break;
        }
    }
    let Some(x) = at(s * n[0], s * n[1]) else {
        return;
    };
    let (f, q) = reduced(x);
    let res = f.norm();
    if res <= r.residual.max(NEWTON_RESIDUAL) {
        r.x = x;
        if system == System::Free {
            r.q = q;
        }
        r.residual = res;
    }
}

/// Indices of grid points that are no worse than every neighbor within `radius`.
fn local_minima(grid: &[FrameVector], values: &[f64], radius: f64, exec: Execution) -> Vec<bool> {
    let cell = |x: FrameVector| x.to_array().map(|v| (v / radius).floor() as i64);
    let mut buckets: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for (i, &x) in grid.iter().enumerate() {
        buckets.entry(cell(x)).or_default().push(i);
    }
    let r2 = radius * radius;
    map_collect(exec, grid.len(), |i| {
        let x = grid[i];
        let c = cell(x);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    let Some(ids) = buckets.get(&[c[0] + dx, c[1] + dy, c[2] + dz]) else {
                        continue;
                    };
                    for &j in ids {
                        if j != i && (grid[j] - x).norm_squared() <= r2 && values[j] < values[i] {
                            return false;
                        }
                    }
                }
            }
        }
        true
    })
}

fn run_system(
    forms: &MagneticForms,
    grid: &[FrameVector],
    system: System,
    opts: &ScanOptions,
) -> (Vec<ScanPoint>, ScanStats) {
    let tol = &opts.tolerances;
    let values: Vec<f64> = map_collect(opts.execution, grid.len(), |i| {
        let p = parts(forms, grid[i]);
        system.residual(&p, system.initial_charge(&p))
    });
    let spacing = (4.0 * std::f64::consts::PI / grid.len() as f64).sqrt();
    let minima = local_minima(grid, &values, 2.0 * spacing, opts.execution);
    let seeds: Vec<usize> = (0..grid.len()).filter(|&i| minima[i] || values[i] < tol.residual).collect();

    let refined: Vec<Refined> = map_collect(opts.execution, seeds.len(), |n| refine(forms, system, grid[seeds[n]]));

    let mut stats = ScanStats { grid_points: grid.len(), seeds: seeds.len(), ..ScanStats::default() };
    let mut points = Vec::new();
    for r in refined {
        stats.newton_iterations += r.iterations;
        stats.max_newton_iterations = stats.max_newton_iterations.max(r.iterations);
        let p = parts(forms, r.x);
        let label = system.label(&p, r.q, tol);
        let residual = match label {
            QConstraint::AnyQ => p.a.norm().max(p.b.norm()).max(p.h.norm()),
            QConstraint::FixedQ(q) => (p.a - p.b * q).norm().max(p.h.norm()),
        };
        if r.residual < tol.residual && residual < tol.residual {
            stats.converged += 1;
            points.push(ScanPoint { x: r.x, q: label, residual });
        } else {
            stats.rejected += 1;
        }
    }
    (points, stats)
}

/// Merges points closer than [`DEDUP_ANGLE`] (as lines, so `x ~ -x`) that carry the
/// same charge constraint. The first occurrence wins.
fn dedup(points: Vec<ScanPoint>) -> Vec<ScanPoint> {
    let size = DEDUP_ANGLE;
    let cell = |x: FrameVector| x.to_array().map(|v| (v / size).floor() as i64);
    let mut buckets: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    let mut kept: Vec<ScanPoint> = Vec::new();
    for p in points {
        let duplicate = [p.x, -p.x].iter().any(|&y| {
            let c = cell(y);
            (-1..=1).any(|dx| {
                (-1..=1).any(|dy| {
                    (-1..=1).any(|dz| {
                        buckets.get(&[c[0] + dx, c[1] + dy, c[2] + dz]).is_some_and(|ids| {
                            ids.iter()
                                .any(|&k| kept[k].x.line_angle(p.x) < DEDUP_ANGLE && kept[k].q.same(&p.q, MATCH_CHARGE))
                        })
                    })
                })
            })
        });
        if !duplicate {
            buckets.entry(cell(p.x)).or_default().push(kept.len());
            kept.push(p);
        }
    }
    kept
}

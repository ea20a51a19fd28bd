//! Markdown, CSV and JSON renderings of a [`Report`].

use std::fmt::Write as _;

use liemag::classify::ComponentKind;
use liemag::frame::{Axis, FrameVector};
use liemag::magnetic::QConstraint;
use liemag::reproduce::TableOutcome;

use crate::report::{Body, CheckReport, Description, Report, SolveReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Md,
}

pub fn render(report: &Report, format: Format, color: bool) -> anyhow::Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Csv => csv(report)?,
        Format::Md => markdown(report, color),
    })
}

fn verdict(ok: bool, yes: &str, no: &str, color: bool) -> String {
    match (ok, color) {
        (true, true) => format!("\x1b[32m{yes}\x1b[0m"),
        (false, true) => format!("\x1b[31m{no}\x1b[0m"),
        (true, false) => yes.to_string(),
        (false, false) => no.to_string(),
    }
}

fn vec3(x: FrameVector) -> String {
    format!("({}, {}, {})", x.x1, x.x2, x.x3)
}

fn charge(q: &Option<QConstraint>) -> String {
    match q {
        Some(QConstraint::AnyQ) => "any q".into(),
        Some(QConstraint::FixedQ(q)) => format!("q = {q}"),
        None => "none".into(),
    }
}

fn markdown(report: &Report, color: bool) -> String {
    let mut out = String::new();
    match &report.body {
        Body::Describe(d) => describe_md(&mut out, d),
        Body::Check(c) => check_md(&mut out, c, color),
        Body::Solve(s) => solve_md(&mut out, s, color),
        Body::Reproduce(t) => reproduce_md(&mut out, t, color),
    }
    if let Some(ms) = report.timing_ms {
        let _ = writeln!(out, "\nElapsed: {ms:.1} ms");
    }
    out
}

fn describe_md(out: &mut String, d: &Description) {
    let _ = writeln!(out, "# {}\n", d.structure);
    if let Some(sig) = &d.signature {
        let p: Vec<String> = sig.pattern.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "- Group: {} (signature {})", sig.group, p.join(""));
    }
    if let Some(mu) = &d.mu {
        let _ = writeln!(out, "- mu = ({}, {}, {})", mu.mu1, mu.mu2, mu.mu3);
    }
    if let Some(dd) = d.milnor_invariant {
        let _ = writeln!(out, "- Milnor invariant D = {dd}");
    }
    if let Some(a) = &d.coefficients {
        let _ = writeln!(out, "- a11 = {}, a12 = {}, a21 = {}, a22 = {}", a.a11, a.a12, a.a21, a.a22);
    }
    if let Some(u) = &d.uvw {
        let _ = writeln!(out, "- u = {}, v = {}, w = {}", u.u, u.v, u.w);
    }
    let rho = d.ricci.principal;
    let _ = writeln!(out, "- Principal Ricci: ({}, {}, {})", rho[0], rho[1], rho[2]);
    let _ = writeln!(out, "- Scalar curvature: {}", d.ricci.scalar);
    let k = d.sectional;
    let _ = writeln!(out, "- Sectional: K12 = {}, K13 = {}, K23 = {}", k[0], k[1], k[2]);
    if let Some(c) = &d.contact {
        let _ = writeln!(
            out,
            "- Contact: phi-sectional = {}, (kappa, mu) = ({}, {}){}",
            c.phi_sectional,
            c.kappa,
            c.mu,
            if c.is_sasakian() { ", Sasakian" } else { "" }
        );
    }
    let _ = writeln!(out, "\n## Levi-Civita connection\n\n| | e1 | e2 | e3 |\n|---|---|---|---|");
    for i in Axis::ALL {
        let row: Vec<String> = Axis::ALL.iter().map(|&j| vec3(d.connection.apply(i.unit(), j.unit()))).collect();
        let _ = writeln!(out, "| nabla_{i} | {} |", row.join(" | "));
    }
}

fn check_md(out: &mut String, c: &CheckReport, color: bool) {
    let _ = writeln!(out, "# Check {} on {}\n", vec3(c.x), c.structure);
    if let Some(q) = c.q {
        let _ = writeln!(out, "- Charge: {q}");
    }
    let _ = writeln!(out, "- First residual: {} (norm {})", vec3(c.residual.first), c.first_norm);
    let _ = writeln!(out, "- Second residual: {} (norm {})", vec3(c.residual.second), c.second_norm);
    let _ = writeln!(out, "- Magnetic for: {}", charge(&c.charge));
    let _ = writeln!(out, "\n{}", verdict(c.magnetic, "magnetic", "not magnetic", color));
}

fn solve_md(out: &mut String, s: &SolveReport, color: bool) {
    let _ = writeln!(out, "# Unit magnetic fields of {}\n", s.structure);
    if let Some(sol) = &s.solution {
        let _ = writeln!(out, "Case: {}\n", sol.case);
        if sol.components.is_empty() {
            let _ = writeln!(out, "No unit magnetic fields.");
        } else {
            let _ = writeln!(out, "| component | charge | max residual |\n|---|---|---|");
            for row in &sol.components {
                let _ = writeln!(out, "| {} | {} | {:.3e} |", row.component.kind, row.component.q, row.max_residual);
            }
        }
    }
    if let Some(scan) = &s.scan {
        let st = &scan.stats;
        let _ = writeln!(out, "\n## Numeric scan (grid {0}x{0})\n", scan.grid_n);
        let _ = writeln!(out, "- Seeds: {}, converged: {}, rejected: {}", st.seeds, st.converged, st.rejected);
        let _ = writeln!(out, "- Distinct solutions: {} ({} for any q)", scan.points, scan.any_q_points);
        let _ = writeln!(out, "- Max residual: {:.3e}", scan.max_residual);
        let charges: Vec<String> = scan.charges.iter().map(|q| q.to_string()).collect();
        let _ = writeln!(
            out,
            "- Fixed charges found: {}",
            if charges.is_empty() { "none".into() } else { charges.join(", ") }
        );
    }
    if let Some(cmp) = &s.comparison {
        let _ = writeln!(out, "\n## Comparison\n\n| component | hits | required |\n|---|---|---|");
        for c in &cmp.components {
            let _ = writeln!(out, "| {} | {} | {} |", c.component, c.hits, c.required);
        }
        let _ = writeln!(out, "\nUnmatched scan points: {}", cmp.unmatched_points);
        let _ = writeln!(out, "\n{}", verdict(cmp.matched, "match", "MISMATCH", color));
    }
}

fn reproduce_md(out: &mut String, t: &TableOutcome, color: bool) {
    let _ = writeln!(out, "# Reproduction ({:?}, seed {}, grid {})\n", t.table, t.seed, t.grid_n);
    let _ = writeln!(out, "| row | samples | passed |\n|---|---|---|");
    for row in &t.rows {
        let ok = row.samples.iter().filter(|s| s.passed).count();
        let _ = writeln!(
            out,
            "| {} | {} | {} |",
            row.row,
            row.samples.len(),
            verdict(
                row.passed(),
                &format!("{ok}/{}", row.samples.len()),
                &format!("{ok}/{}", row.samples.len()),
                color
            )
        );
    }
    let _ = writeln!(out, "\n{}", verdict(t.passed(), "all rows pass", "FAILED", color));
}

fn csv(report: &Report) -> anyhow::Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match &report.body {
        Body::Describe(d) => {
            w.write_record(["quantity", "value"])?;
            let mut put = |k: &str, v: f64| w.write_record([k.to_string(), v.to_string()]);
            for (i, r) in d.ricci.principal.iter().enumerate() {
                put(&format!("rho{}", i + 1), *r)?;
            }
            put("scalar", d.ricci.scalar)?;
            for (name, k) in ["K12", "K13", "K23"].iter().zip(d.sectional) {
                put(name, k)?;
            }
            if let Some(mu) = &d.mu {
                put("mu1", mu.mu1)?;
                put("mu2", mu.mu2)?;
                put("mu3", mu.mu3)?;
            }
            if let Some(dd) = d.milnor_invariant {
                put("D", dd)?;
            }
            if let Some(u) = &d.uvw {
                put("u", u.u)?;
                put("v", u.v)?;
                put("w", u.w)?;
            }
            for i in 0..3 {
                for j in 0..3 {
                    for k in 0..3 {
                        put(&format!("gamma_{}{}^{}", i + 1, j + 1, k + 1), d.connection.gamma[i][j][k])?;
                    }
                }
            }
        }
        Body::Check(c) => {
            w.write_record(["quantity", "value"])?;
            let rows = [
                ("x1", c.x.x1.to_string()),
                ("x2", c.x.x2.to_string()),
                ("x3", c.x.x3.to_string()),
                ("first_norm", c.first_norm.to_string()),
                ("second_norm", c.second_norm.to_string()),
                ("charge", charge(&c.charge)),
                ("magnetic", c.magnetic.to_string()),
            ];
            for (k, v) in rows {
                w.write_record([k, v.as_str()])?;
            }
        }
        Body::Solve(s) => {
            w.write_record(["kind", "axis/plane", "x1", "x2", "x3", "q_kind", "q_value", "max_residual"])?;
            for row in s.solution.iter().flat_map(|sol| &sol.components) {
                let (kind, place, x) = match row.component.kind {
                    ComponentKind::FullSphere => ("full_sphere", String::new(), None),
                    ComponentKind::GreatCircle { plane } => ("great_circle", format!("{}{}", plane.0, plane.1), None),
                    ComponentKind::PointPair { x } => {
                        let axis = Axis::ALL.into_iter().find(|a| x.line_angle(a.unit()) == 0.0);
                        ("point_pair", axis.map(|a| a.to_string()).unwrap_or_default(), Some(x))
                    }
                };
                let coords = x.map(|x| x.to_array().map(|c| c.to_string())).unwrap_or_default();
                let (q_kind, q_value) = match row.component.q {
                    QConstraint::AnyQ => ("any", String::new()),
                    QConstraint::FixedQ(q) => ("fixed", q.to_string()),
                };
                w.write_record([
                    kind,
                    &place,
                    &coords[0],
                    &coords[1],
                    &coords[2],
                    q_kind,
                    &q_value,
                    &row.max_residual.to_string(),
                ])?;
            }
            if let (None, Some(scan)) = (&s.solution, &s.scan) {
                for q in &scan.charges {
                    w.write_record([
                        "scan_charge",
                        "",
                        "",
                        "",
                        "",
                        "fixed",
                        &q.to_string(),
                        &scan.max_residual.to_string(),
                    ])?;
                }
                if scan.any_q_points > 0 {
                    w.write_record(["scan_charge", "", "", "", "", "any", "", &scan.max_residual.to_string()])?;
                }
            }
        }
        Body::Reproduce(t) => {
            w.write_record([
                "row",
                "structure",
                "classified_as",
                "components",
                "scan_points",
                "unmatched_points",
                "uncovered_components",
                "passed",
            ])?;
            for row in &t.rows {
                for s in &row.samples {
                    w.write_record([
                        row.row.to_string(),
                        s.structure.to_string(),
                        s.classified_as.to_string(),
                        s.components.to_string(),
                        s.scan_points.to_string(),
                        s.unmatched_points.to_string(),
                        s.uncovered_components.to_string(),
                        s.passed.to_string(),
                    ])?;
                }
            }
        }
    }
    if let Some(ms) = report.timing_ms {
        // trailing record keeps the table machine-readable
        w.flush()?;
        let mut s = String::from_utf8(w.into_inner()?)?;
        let _ = writeln!(s, "# elapsed_ms,{ms}");
        return Ok(s);
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

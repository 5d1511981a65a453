//! Serialization of profiles and verification reports: JSON, flat CSV and a
//! Markdown summary. Floats in CSV use 17 significant digits.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::profile::{BoundaryReport, Node, OdeTolerances, ProfileSolution};
use crate::verifier::{SweepEntry, VerificationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Md,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "md" => Ok(Format::Md),
            other => Err(format!(
                "unknown format {other:?} (expected json, csv or md)"
            )),
        }
    }
}

pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub t: f64,
    pub h: f64,
    pub hp: f64,
    pub f: f64,
    pub phi: f64,
}

/// Everything the `profile` subcommand emits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileDump {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub coeffs: Vec<f64>,
    #[serde(rename = "L")]
    pub length: f64,
    pub tolerances: OdeTolerances,
    pub nodes: Vec<Node>,
    pub boundary: BoundaryReport,
    pub table: Vec<ProfileRow>,
}

/// `points` uniformly spaced samples of `(t, h, h', f, φ)` on `[0, L]`.
pub fn profile_table(sol: &ProfileSolution, points: usize) -> Result<Vec<ProfileRow>> {
    let l = sol.length();
    let points = points.max(2);
    (0..points)
        .map(|k| {
            let t = if k + 1 == points {
                l
            } else {
                l * k as f64 / (points - 1) as f64
            };
            let [h, hp] = sol.state(t)?;
            Ok(ProfileRow {
                t,
                h,
                hp,
                f: sol.eval_f(t)?,
                phi: sol.eval_phi(t)?,
            })
        })
        .collect()
}

pub fn profile_dump(sol: &ProfileSolution, points: usize) -> Result<ProfileDump> {
    let js = sol.to_json();
    Ok(ProfileDump {
        alpha: js.alpha,
        coeffs: js.coeffs,
        length: js.length,
        tolerances: js.tolerances,
        nodes: js.nodes,
        boundary: sol.boundary_report(),
        table: profile_table(sol, points)?,
    })
}

fn boundary_lines(b: &BoundaryReport) -> Vec<(&'static str, f64)> {
    vec![
        ("|h(0)|", b.h0),
        ("|h'(0)-1|", b.hp0_minus_1),
        ("|h(L)-1|", b.hl_minus_1),
        ("|h'(L)|", b.hpl),
        ("|f(L)|", b.fl),
        ("|f'(L)+1|", b.fpl_plus_1),
        ("parity h at 0", b.parity_h),
        ("parity f at L", b.parity_f_at_l),
    ]
}

pub fn render_profile(dump: &ProfileDump, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(dump).expect("serializable") + "\n",
        Format::Csv => {
            let mut s = String::new();
            if let Some(a) = dump.alpha {
                let _ = writeln!(s, "# alpha={}", num(a));
            }
            let _ = writeln!(s, "# L={}", num(dump.length));
            for (k, v) in boundary_lines(&dump.boundary) {
                let _ = writeln!(s, "# {k}={}", num(v));
            }
            s.push_str("t,h,hp,f,phi\n");
            for r in &dump.table {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{}",
                    num(r.t),
                    num(r.h),
                    num(r.hp),
                    num(r.f),
                    num(r.phi)
                );
            }
            s
        }
        Format::Md => {
            let mut s = String::from("# Profile\n\n");
            if let Some(a) = dump.alpha {
                let _ = writeln!(s, "- alpha: {a}");
            }
            let _ = writeln!(s, "- L: {}", num(dump.length));
            for (k, v) in boundary_lines(&dump.boundary) {
                let _ = writeln!(s, "- {k}: {v:.3e}");
            }
            s.push_str("\n| t | h | h' | f | phi |\n|---|---|---|---|---|\n");
            for r in &dump.table {
                let _ = writeln!(
                    s,
                    "| {:.10} | {:.10} | {:.10} | {:.10} | {:.10} |",
                    r.t, r.h, r.hp, r.f, r.phi
                );
            }
            s
        }
    }
}

/// Per-point quantities written to the flat CSV, in column order.
fn point_values(p: &crate::verifier::PointRecord) -> Vec<(&'static str, f64)> {
    vec![
        ("phi", p.phi),
        ("hp", p.hp.residual),
        ("rr_norm", p.hp.rr_norm),
        ("pir_norm", p.hp.pir_norm),
        ("qch_a", p.qch.a),
        ("qch_b", p.qch.b),
        ("qch_c", p.qch.c),
        ("qch", p.qch.residual),
        ("a_plus_half_b", p.a_plus_half_b_error),
        ("nabla_j", p.kahler.nabla_j),
        ("d_omega", p.kahler.d_omega),
        (
            "symmetry",
            p.symmetry
                .antisym_first_pair
                .max(p.symmetry.antisym_second_pair)
                .max(p.symmetry.pair_exchange),
        ),
        ("bianchi", p.symmetry.bianchi),
        ("j_invariance", p.j_invariance),
        ("scalar_curvature", p.scalar_curvature),
        ("hol_sec", p.hol_sec_probe),
        ("killing", p.killing.metric.max(p.killing.complex_structure)),
    ]
}

pub fn report_csv(r: &VerificationReport) -> String {
    let mut s = String::from("point,t,psi,check,value\n");
    for p in &r.points {
        for (name, v) in point_values(p) {
            let _ = writeln!(
                s,
                "{},{},{},{},{}",
                p.index,
                num(p.point.t),
                num(p.point.psi),
                name,
                num(v)
            );
        }
    }
    s
}

pub fn report_markdown(r: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "# Verification: alpha = {}, n = {}\n",
        r.config.alpha, r.config.n
    );
    let _ = writeln!(s, "- L: {}", num(r.profile.length));
    let _ = writeln!(s, "- points: {}", r.points.len());
    let _ = writeln!(
        s,
        "- orientation: epsilon = {:+}, |nabla J| (+1/-1) = {:.2e}/{:.2e}, |dOmega| (+1/-1) = {:.2e}/{:.2e}",
        r.calibration.epsilon,
        r.calibration.nabla_j[0],
        r.calibration.nabla_j[1],
        r.calibration.d_omega[0],
        r.calibration.d_omega[1]
    );
    let ps = &r.phi_sign_summary;
    let _ = writeln!(
        s,
        "- min phi: {:.10} at t = {:.10} (h = {:.10}); phi(0) = {:.10}",
        ps.min, ps.argmin_t, ps.h_at_min, ps.phi_at_zero
    );
    let ag = &r.aggregates;
    let _ = writeln!(
        s,
        "- scalar curvature: [{:.10}, {:.10}], spread {:.3e}",
        ag.scalar_curvature_min, ag.scalar_curvature_max, ag.scalar_curvature_spread
    );
    let _ = writeln!(s, "- max |R.R|: {:.3e}", ag.max_rr_norm);
    let _ = writeln!(
        s,
        "- a in [{:.8}, {:.8}], b in [{:.8}, {:.8}], c in [{:.8}, {:.8}]\n",
        ag.a_range[0], ag.a_range[1], ag.b_range[0], ag.b_range[1], ag.c_range[0], ag.c_range[1]
    );
    s.push_str("| check | max | mean | tolerance | verdict |\n|---|---|---|---|---|\n");
    for c in &r.checks {
        let _ = writeln!(
            s,
            "| {} | {:.3e} | {:.3e} | {:.1e} | {} |",
            c.name,
            c.max,
            c.mean,
            c.tolerance,
            if c.passed { "pass" } else { "FAIL" }
        );
    }
    s
}

pub fn render_report(r: &VerificationReport, format: Format) -> String {
    match format {
        Format::Json => serde_json::to_string_pretty(r).expect("serializable") + "\n",
        Format::Csv => report_csv(r),
        Format::Md => report_markdown(r),
    }
}

/// One summary row per sweep entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub alpha: f64,
    #[serde(rename = "L")]
    pub length: Option<f64>,
    pub min_phi: Option<f64>,
    pub max_hp: Option<f64>,
    pub max_qch: Option<f64>,
    pub scalar_spread: Option<f64>,
    pub passed: bool,
    pub error: Option<String>,
}

pub fn sweep_rows(entries: &[SweepEntry]) -> Vec<SweepRow> {
    entries
        .iter()
        .map(|e| match &e.report {
            Some(r) => SweepRow {
                alpha: e.alpha,
                length: Some(r.profile.length),
                min_phi: Some(r.phi_sign_summary.min),
                max_hp: r.check("hp").map(|c| c.max),
                max_qch: r.check("qch").map(|c| c.max),
                scalar_spread: Some(r.aggregates.scalar_curvature_spread),
                passed: r.passed(),
                error: None,
            },
            None => SweepRow {
                alpha: e.alpha,
                length: None,
                min_phi: None,
                max_hp: None,
                max_qch: None,
                scalar_spread: None,
                passed: false,
                error: e.error.clone(),
            },
        })
        .collect()
}

#[derive(Serialize)]
struct SweepJson<'a> {
    schema_version: u32,
    rows: &'a [SweepRow],
}

pub fn render_sweep(rows: &[SweepRow], format: Format) -> String {
    let opt = |v: Option<f64>| v.map(num).unwrap_or_default();
    match format {
        Format::Json => {
            serde_json::to_string_pretty(&SweepJson {
                schema_version: crate::verifier::SCHEMA_VERSION,
                rows,
            })
            .expect("serializable")
                + "\n"
        }
        Format::Csv => {
            let mut s = String::from("alpha,L,min_phi,max_hp,max_qch,scalar_spread,passed,error\n");
            for r in rows {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    num(r.alpha),
                    opt(r.length),
                    opt(r.min_phi),
                    opt(r.max_hp),
                    opt(r.max_qch),
                    opt(r.scalar_spread),
                    r.passed,
                    r.error.as_deref().unwrap_or("").replace(',', ";")
                );
            }
            s
        }
        Format::Md => {
            let o = |v: Option<f64>, p: usize| {
                v.map(|x| format!("{x:.p$e}")).unwrap_or_else(|| "-".into())
            };
            let mut s = String::from(
                "| alpha | L | min phi | max hp | max qch | scalar spread | verdict |\n|---|---|---|---|---|---|---|\n",
            );
            for r in rows {
                let verdict = match (&r.error, r.passed) {
                    (Some(e), _) => format!("ERROR: {e}"),
                    (None, true) => "pass".into(),
                    (None, false) => "FAIL".into(),
                };
                let _ = writeln!(
                    s,
                    "| {} | {} | {} | {} | {} | {} | {} |",
                    r.alpha,
                    o(r.length, 10),
                    o(r.min_phi, 6),
                    o(r.max_hp, 2),
                    o(r.max_qch, 2),
                    o(r.scalar_spread, 3),
                    verdict
                );
            }
            s
        }
    }
}

/// Writes `contents` through a temporary file in the same directory and
/// renames it into place.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    let tmp = dir.join(format!(".{name}.{}.tmp", std::process::id()));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

//! End-to-end verification for one family member `(α, n)`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{self, HpResidual, QchFit, SymmetryResiduals, DEFAULT_HP_FLOOR};
use crate::error::{Error, Result};
use crate::geometry::{self, Calibration, ChartPoint, KillingResiduals};
use crate::profile::{BoundaryReport, OdeTolerances, Profile, ProfileSolution};

pub const SCHEMA_VERSION: u32 = 1;

/// Grid size for the minimum of `φ` over `[0, L]`.
pub const PHI_GRID: usize = 2048;

/// Random holomorphic-sectional-curvature probe directions per point.
pub const PROBE_DIRECTIONS: usize = 32;

/// Check names and their default thresholds.
pub const DEFAULT_TOLERANCES: &[(&str, f64)] = &[
    ("energy", 1e-10),
    ("boundary", 1e-7),
    ("parity", 1e-9),
    ("hp", 1e-6),
    ("qch", 1e-6),
    ("a_plus_half_b", 1e-6),
    ("nabla_j", 1e-6),
    ("d_omega", 1e-8),
    ("symmetry", 1e-8),
    ("bianchi", 1e-8),
    ("j_invariance", 1e-7),
    ("hol_sec", 1e-7),
    ("killing", 1e-7),
    ("isometry", 1e-7),
];

pub fn default_tolerances() -> BTreeMap<String, f64> {
    DEFAULT_TOLERANCES
        .iter()
        .map(|(k, v)| (k.to_string(), *v))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationConfig {
    pub alpha: f64,
    pub n: usize,
    pub samples_t: usize,
    pub samples_base: usize,
    pub seed: u64,
    pub tolerances: BTreeMap<String, f64>,
    pub margin: f64,
    pub hp_floor: f64,
    pub ode: OdeTolerances,
}

impl Default for VerificationConfig {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            n: 2,
            samples_t: 10,
            samples_base: 2,
            seed: 0x5eed,
            tolerances: default_tolerances(),
            margin: geometry::DEFAULT_MARGIN,
            hp_floor: DEFAULT_HP_FLOOR,
            ode: OdeTolerances::default(),
        }
    }
}

impl VerificationConfig {
    pub fn new(alpha: f64, n: usize) -> Self {
        Self {
            alpha,
            n,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::Config(format!(
                "n must be at least 2, got {}",
                self.n
            )));
        }
        if self.samples_t == 0 || self.samples_base == 0 {
            return Err(Error::Config("sample counts must be at least 1".into()));
        }
        if !(self.margin > 0.0 && self.margin < 0.5) {
            return Err(Error::Config(format!(
                "margin must lie in (0, 0.5), got {}",
                self.margin
            )));
        }
        for (k, v) in &self.tolerances {
            if !(*v > 0.0) {
                return Err(Error::Config(format!(
                    "tolerance {k} must be positive, got {v}"
                )));
            }
            if !DEFAULT_TOLERANCES.iter().any(|(name, _)| name == k) {
                return Err(Error::Config(format!("unknown check {k}")));
            }
        }
        if !(self.hp_floor > 0.0) {
            return Err(Error::Config("hp_floor must be positive".into()));
        }
        Ok(())
    }

    pub fn tolerance(&self, check: &str) -> f64 {
        self.tolerances.get(check).copied().unwrap_or_else(|| {
            DEFAULT_TOLERANCES
                .iter()
                .find(|(k, _)| *k == check)
                .map(|(_, v)| *v)
                .unwrap_or(0.0)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSummary {
    #[serde(rename = "L")]
    pub length: f64,
    pub coeffs: Vec<f64>,
    pub max_energy_drift: f64,
    pub boundary: BoundaryReport,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KahlerResiduals {
    #[serde(rename = "nablaJ")]
    pub nabla_j: f64,
    #[serde(rename = "dOmega")]
    pub d_omega: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub index: usize,
    pub t_index: usize,
    pub point: ChartPoint,
    pub phi: f64,
    pub hp: HpResidual,
    pub qch: QchFit,
    pub a_plus_half_b_error: f64,
    pub kahler: KahlerResiduals,
    pub symmetry: SymmetryResiduals,
    pub j_invariance: f64,
    pub scalar_curvature: f64,
    pub hol_sec_probe: f64,
    pub killing: KillingResiduals,
    /// Frobenius norm of `R`.
    pub curvature_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub name: String,
    pub max: f64,
    pub mean: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiSignSummary {
    pub min: f64,
    pub argmin_t: f64,
    pub h_at_min: f64,
    pub phi_at_zero: f64,
    pub positive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub scalar_curvature_min: f64,
    pub scalar_curvature_max: f64,
    pub scalar_curvature_spread: f64,
    pub max_rr_norm: f64,
    pub max_pir_norm: f64,
    pub a_range: [f64; 2],
    pub b_range: [f64; 2],
    pub c_range: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub config: VerificationConfig,
    pub calibration: Calibration,
    pub profile: ProfileSummary,
    pub phi_sign_summary: PhiSignSummary,
    pub points: Vec<PointRecord>,
    pub aggregates: Aggregates,
    pub checks: Vec<CheckSummary>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckSummary> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Sampled chart points: interior `t` grid × base points × `ψ ∈ {0, 1}`.
/// Returns `(t_index, point)` pairs in a fixed order.
pub fn sample_points(cfg: &VerificationConfig, sol: &ProfileSolution) -> Vec<(usize, ChartPoint)> {
    let l = sol.length();
    let m2 = 2 * (cfg.n - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut bases = vec![vec![0.0; m2]];
    while bases.len() < cfg.samples_base {
        let w: Vec<f64> = (0..m2).map(|_| rng.random_range(-1.0..=1.0)).collect();
        if w.iter().map(|x| x * x).sum::<f64>() <= 1.0 {
            bases.push(w);
        }
    }
    let ts: Vec<f64> = if cfg.samples_t == 1 {
        vec![0.5 * l]
    } else {
        (0..cfg.samples_t)
            .map(|k| {
                l * (cfg.margin + (1.0 - 2.0 * cfg.margin) * k as f64 / (cfg.samples_t - 1) as f64)
            })
            .collect()
    };
    let mut out = Vec::new();
    for (ti, &t) in ts.iter().enumerate() {
        for base in &bases {
            for psi in [0.0, 1.0] {
                out.push((ti, ChartPoint::new(t, psi, base.clone())));
            }
        }
    }
    out
}

/// Curvature and model tensors at one point, all expressed in the adapted
/// orthonormal frame (metric = identity).
pub struct FrameData {
    pub riemann_coord: algebra::CurvatureTensor,
    pub riemann: algebra::CurvatureTensor,
    pub j: DMatrix<f64>,
    pub p_d: DMatrix<f64>,
    pub pi: algebra::CurvatureTensor,
    pub phi: algebra::CurvatureTensor,
    pub psi: algebra::CurvatureTensor,
}

pub fn frame_data(point: &ChartPoint, sol: &ProfileSolution) -> Result<FrameData> {
    let jet = geometry::metric_jet(point, sol)?;
    let r = geometry::riemann_from_jet(&jet)?;
    let g = jet.matrix();
    let j = geometry::complex_structure(point, sol)?;
    let e = geometry::adapted_frame(&g)?;
    let e_inv = e
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("frame".into()))?;
    let d = g.nrows();
    let id = DMatrix::<f64>::identity(d, d);
    let mut rf = r.in_frame(&e);
    rf.metric = id.clone();
    let jf = &e_inv * &j * &e;
    let pf = &e_inv * geometry_projector(&g, &j) * &e;
    let pi = algebra::pi_tensor(&id, &jf)?;
    let (gd, omega) = algebra::distribution_forms(&id, &jf, &pf);
    let phi = algebra::phi_tensor(&id, &jf, &gd, &omega)?;
    let psi = algebra::psi_tensor(&id, &omega);
    Ok(FrameData {
        riemann_coord: r,
        riemann: rf,
        j: jf,
        p_d: pf,
        pi,
        phi,
        psi,
    })
}

fn geometry_projector(g: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    crate::geometry::projector_for(g, j)
}

/// Probe directions in the orthonormal frame: 4 inside `D`, 4 orthogonal to
/// it, the rest generic.
pub fn probe_directions(d: usize, rng: &mut ChaCha8Rng) -> Vec<DVector<f64>> {
    let mut dirs = Vec::with_capacity(PROBE_DIRECTIONS);
    for k in 0..PROBE_DIRECTIONS {
        let mut v = DVector::<f64>::zeros(d);
        loop {
            for i in 0..d {
                let inside = i < 2;
                let keep = match k {
                    0..=3 => inside,
                    4..=7 => !inside,
                    _ => true,
                };
                v[i] = if keep {
                    rng.random_range(-1.0..=1.0)
                } else {
                    0.0
                };
            }
            if v.norm() > 1e-3 {
                break;
            }
        }
        dirs.push(v.normalize());
    }
    dirs
}

pub fn evaluate_point(
    index: usize,
    t_index: usize,
    point: &ChartPoint,
    sol: &ProfileSolution,
    cfg: &VerificationConfig,
) -> Result<PointRecord> {
    let fd = frame_data(point, sol)?;
    let phi = sol.eval_phi(point.t)?;
    let hp = algebra::hp_residual(&fd.riemann, &fd.pi, phi, cfg.hp_floor)?;
    let qch = algebra::qch_fit(&fd.riemann, &fd.pi, &fd.phi, &fd.psi)?;
    let d = point.dim();
    let id = DMatrix::<f64>::identity(d, d);
    let mut rng =
        ChaCha8Rng::seed_from_u64(cfg.seed ^ (index as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let dirs = probe_directions(d, &mut rng);
    let hol_sec_probe = algebra::probe_qch_law(&fd.riemann, &id, &fd.j, &fd.p_d, &qch, &dirs)?;
    let nabla_j = max_abs(&geometry::nabla_j(point, sol)?);
    let d_omega = max_abs(&geometry::d_omega(point, sol)?);
    Ok(PointRecord {
        index,
        t_index,
        point: point.clone(),
        phi,
        hp,
        a_plus_half_b_error: (qch.a + 0.5 * qch.b - phi).abs(),
        qch,
        kahler: KahlerResiduals { nabla_j, d_omega },
        symmetry: fd.riemann_coord.symmetry_residuals(),
        j_invariance: fd.riemann.j_invariance_residual(&fd.j),
        scalar_curvature: geometry::ricci_scalar(&fd.riemann_coord),
        hol_sec_probe,
        killing: geometry::killing_residuals(point, sol)?,
        curvature_norm: fd.riemann.frobenius(),
    })
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

fn summarize(name: &str, values: &[f64], tol: f64) -> CheckSummary {
    let max = values
        .iter()
        .fold(0.0f64, |m, &v| if v.is_nan() { f64::NAN } else { m.max(v) });
    let mean = if values.is_empty() {
        0.0
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    };
    CheckSummary {
        name: name.to_string(),
        max,
        mean,
        tolerance: tol,
        passed: max <= tol,
    }
}

fn phi_sign_summary(sol: &ProfileSolution) -> Result<PhiSignSummary> {
    let (argmin_t, min) = sol.phi_minimum(PHI_GRID);
    Ok(PhiSignSummary {
        min,
        argmin_t,
        h_at_min: sol.eval_h(argmin_t)?,
        phi_at_zero: sol.eval_phi(0.0)?,
        positive: min > 0.0,
    })
}

/// Largest spread of a per-point quantity within groups of equal `t`.
fn isometry_spread(points: &[PointRecord]) -> Vec<f64> {
    let mut groups: BTreeMap<usize, Vec<&PointRecord>> = BTreeMap::new();
    for p in points {
        groups.entry(p.t_index).or_default().push(p);
    }
    groups
        .values()
        .map(|g| {
            let spread = |f: &dyn Fn(&PointRecord) -> f64| {
                let (lo, hi) = g
                    .iter()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
                        let v = f(p);
                        (lo.min(v), hi.max(v))
                    });
                hi - lo
            };
            [
                spread(&|p| p.hp.residual),
                spread(&|p| p.qch.a),
                spread(&|p| p.qch.b),
                spread(&|p| p.qch.c),
                spread(&|p| p.phi),
                spread(&|p| p.scalar_curvature),
            ]
            .into_iter()
            .fold(0.0, f64::max)
        })
        .collect()
}

pub fn run_verification(cfg: &VerificationConfig) -> Result<VerificationReport> {
    cfg.validate()?;
    let profile = Profile::p_alpha(cfg.alpha)?;
    let sol = ProfileSolution::solve(&profile, &cfg.ode)?;
    verify_solution(cfg, &sol)
}

/// Runs every check on an already solved profile.
pub fn verify_solution(
    cfg: &VerificationConfig,
    sol: &ProfileSolution,
) -> Result<VerificationReport> {
    cfg.validate()?;
    let calibration = geometry::orientation();
    let boundary = sol.boundary_report();
    let samples = sample_points(cfg, sol);
    let points: Vec<PointRecord> = samples
        .par_iter()
        .enumerate()
        .map(|(i, (ti, p))| {
            evaluate_point(i, *ti, p, sol, cfg).map_err(|e| Error::AtPoint {
                index: i,
                t: p.t,
                source: Box::new(e),
            })
        })
        .collect::<Result<_>>()?;

    let col = |f: &dyn Fn(&PointRecord) -> f64| points.iter().map(f).collect::<Vec<f64>>();
    let range = |v: &[f64]| {
        v.iter()
            .fold([f64::INFINITY, f64::NEG_INFINITY], |[lo, hi], &x| {
                [lo.min(x), hi.max(x)]
            })
    };
    let scal = col(&|p| p.scalar_curvature);
    let [smin, smax] = range(&scal);

    let tol = |k: &str| cfg.tolerance(k);
    let checks = vec![
        summarize("energy", &[sol.max_energy_drift()], tol("energy")),
        summarize("boundary", &[boundary.max_endpoint()], tol("boundary")),
        summarize("parity", &[boundary.parity_h], tol("parity")),
        summarize("hp", &col(&|p| p.hp.residual), tol("hp")),
        summarize("qch", &col(&|p| p.qch.residual), tol("qch")),
        summarize(
            "a_plus_half_b",
            &col(&|p| p.a_plus_half_b_error),
            tol("a_plus_half_b"),
        ),
        summarize("nabla_j", &col(&|p| p.kahler.nabla_j), tol("nabla_j")),
        summarize("d_omega", &col(&|p| p.kahler.d_omega), tol("d_omega")),
        summarize(
            "symmetry",
            &col(&|p| {
                p.symmetry
                    .antisym_first_pair
                    .max(p.symmetry.antisym_second_pair)
                    .max(p.symmetry.pair_exchange)
            }),
            tol("symmetry"),
        ),
        summarize("bianchi", &col(&|p| p.symmetry.bianchi), tol("bianchi")),
        summarize(
            "j_invariance",
            &col(&|p| p.j_invariance),
            tol("j_invariance"),
        ),
        summarize("hol_sec", &col(&|p| p.hol_sec_probe), tol("hol_sec")),
        summarize(
            "killing",
            &col(&|p| p.killing.metric.max(p.killing.complex_structure)),
            tol("killing"),
        ),
        summarize("isometry", &isometry_spread(&points), tol("isometry")),
    ];

    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        calibration,
        profile: ProfileSummary {
            length: sol.length(),
            coeffs: sol.profile().coeffs().to_vec(),
            max_energy_drift: sol.max_energy_drift(),
            boundary,
        },
        phi_sign_summary: phi_sign_summary(sol)?,
        aggregates: Aggregates {
            scalar_curvature_min: smin,
            scalar_curvature_max: smax,
            scalar_curvature_spread: smax - smin,
            max_rr_norm: col(&|p| p.hp.rr_norm).into_iter().fold(0.0, f64::max),
            max_pir_norm: col(&|p| p.hp.pir_norm).into_iter().fold(0.0, f64::max),
            a_range: range(&col(&|p| p.qch.a)),
            b_range: range(&col(&|p| p.qch.b)),
            c_range: range(&col(&|p| p.qch.c)),
        },
        points,
        checks,
    })
}

/// Outcome of one sweep entry: a report, or the error that stopped it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub alpha: f64,
    pub report: Option<VerificationReport>,
    pub error: Option<String>,
}

impl SweepEntry {
    pub fn passed(&self) -> bool {
        self.report.as_ref().is_some_and(|r| r.passed())
    }
}

/// Independent runs over `alphas`; output order matches input order and a
/// failing entry does not stop the others.
pub fn sweep(alphas: &[f64], n: usize, template: &VerificationConfig) -> Vec<SweepEntry> {
    alphas
        .par_iter()
        .map(|&alpha| {
            let cfg = VerificationConfig {
                alpha,
                n,
                ..template.clone()
            };
            match run_verification(&cfg) {
                Ok(r) => SweepEntry {
                    alpha,
                    report: Some(r),
                    error: None,
                },
                Err(e) => SweepEntry {
                    alpha,
                    report: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

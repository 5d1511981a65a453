//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line for
//! each, and exits non-zero if any failed.

use std::time::Instant;

use hpkahler::algebra;
use hpkahler::verifier::{self, VerificationConfig, VerificationReport};
use hpkahler::{OdeTolerances, Profile, ProfileSolution};
use nalgebra::{DMatrix, DVector};

const GRID_ALPHAS: [f64; 6] = [-3.5, -3.0, -1.0, 0.5, 1.0, 3.0];
const DIMS: [usize; 2] = [2, 3];

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn solve(alpha: f64) -> ProfileSolution {
    ProfileSolution::solve(&Profile::p_alpha(alpha).unwrap(), &OdeTolerances::default()).unwrap()
}

fn verify(alpha: f64, n: usize) -> VerificationReport {
    verifier::run_verification(&VerificationConfig::new(alpha, n)).unwrap()
}

/// Hand-expanded `P_α'(h)` for `P_α = (1 − h²)(1 + αh²(1 − h²))`.
fn p_alpha_prime(alpha: f64, h: f64) -> f64 {
    let q = 1.0 + alpha * h * h * (1.0 - h * h);
    let dq = alpha * (2.0 * h - 4.0 * h.powi(3));
    -2.0 * h * q + (1.0 - h * h) * dq
}

fn p_alpha_value(alpha: f64, h: f64) -> f64 {
    (1.0 - h * h) * (1.0 + alpha * h * h * (1.0 - h * h))
}

fn max_of(it: impl Iterator<Item = f64>) -> f64 {
    it.fold(0.0, f64::max)
}

fn closed_form_anchor() -> Outcome {
    let sol = solve(0.0);
    let l = sol.length();
    let dl = (l - std::f64::consts::FRAC_PI_2).abs();
    let dh = max_of((0..=4000).map(|k| {
        let t = l * k as f64 / 4000.0;
        (sol.eval_h(t).unwrap() - t.sin()).abs()
    }));
    let mut worst_model = 0.0f64;
    let mut worst_rr = 0.0f64;
    let mut points = usize::MAX;
    for n in DIMS {
        let cfg = VerificationConfig::new(0.0, n);
        let samples = verifier::sample_points(&cfg, &sol);
        points = points.min(samples.len());
        for (_, p) in &samples {
            let fd = verifier::frame_data(p, &sol).unwrap();
            let rn = fd.riemann.frobenius();
            worst_model = worst_model.max(fd.riemann.add_scaled(&fd.pi, -4.0).frobenius() / rn);
            let rr = algebra::derivation_action(&fd.riemann, &fd.riemann)
                .unwrap()
                .frobenius();
            worst_rr = worst_rr.max(rr / (rn * rn));
        }
    }
    outcome(
        dh <= 1e-8 && dl <= 1e-8 && points >= 20 && worst_model <= 1e-6 && worst_rr <= 1e-7,
        format!(
            "max|h-sin t|={dh:.2e} |L-pi/2|={dl:.2e} points/n={points} max|R-4Pi|/|R|={worst_model:.2e} max|R.R|/|R|^2={worst_rr:.2e}"
        ),
    )
}

fn grid_reports() -> Vec<(f64, usize, VerificationReport)> {
    let mut out = Vec::new();
    for &alpha in &GRID_ALPHAS {
        for n in DIMS {
            out.push((alpha, n, verify(alpha, n)));
        }
    }
    out
}

fn hp_identity(grid: &[(f64, usize, VerificationReport)]) -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_phi = 0.0f64;
    let mut min_points = usize::MAX;
    for (alpha, _, r) in grid {
        min_points = min_points.min(r.points.len());
        for p in &r.points {
            worst = worst.max(p.hp.residual);
            // the φ used must be −2P'(h)/h at the point's height
            let h = solve(*alpha).eval_h(p.point.t).unwrap();
            worst_phi = worst_phi.max((p.phi + 2.0 * p_alpha_prime(*alpha, h) / h).abs());
        }
    }
    outcome(
        worst <= 1e-6 && worst_phi <= 1e-8 && min_points >= 20,
        format!("max hp residual={worst:.2e} max|phi-(-2P'(h)/h)|={worst_phi:.2e} min points={min_points}"),
    )
}

fn qch_decomposition(grid: &[(f64, usize, VerificationReport)]) -> Outcome {
    let points = grid.iter().flat_map(|(_, _, r)| r.points.iter());
    let (mut q, mut s) = (0.0f64, 0.0f64);
    for p in points {
        q = q.max(p.qch.residual);
        s = s.max((p.qch.a + 0.5 * p.qch.b - p.phi).abs());
    }
    outcome(
        q <= 1e-6 && s <= 1e-6,
        format!("max qch residual={q:.2e} max|a+b/2-phi|={s:.2e}"),
    )
}

fn kahler_conditions(grid: &[(f64, usize, VerificationReport)]) -> Outcome {
    let points = || grid.iter().flat_map(|(_, _, r)| r.points.iter());
    let nj = max_of(points().map(|p| p.kahler.nabla_j));
    let dw = max_of(points().map(|p| p.kahler.d_omega));
    let cal = &grid[0].2.calibration;
    let chosen = if cal.epsilon > 0.0 { 0 } else { 1 };
    let documented =
        cal.epsilon.abs() == 1.0 && cal.nabla_j[1 - chosen] > 1e3 * cal.nabla_j[chosen].max(1e-15);
    outcome(
        nj <= 1e-6 && dw <= 1e-8 && documented,
        format!(
            "max|nabla J|={nj:.2e} max|dOmega|={dw:.2e} epsilon={:+} (|nabla J| other sign {:.2e})",
            cal.epsilon,
            cal.nabla_j[1 - chosen]
        ),
    )
}

fn profile_integrity() -> Outcome {
    let (mut energy, mut boundary, mut parity) = (0.0f64, 0.0f64, 0.0f64);
    for &alpha in GRID_ALPHAS.iter().chain(&[0.0, -2.9, 0.9]) {
        let sol = solve(alpha);
        let l = sol.length();
        energy = energy.max(sol.max_energy_drift());
        // independent sampling of the invariant along the dense output
        for k in 0..=2000 {
            let t = (-0.25 * l + 1.5 * l * k as f64 / 2000.0).min(1.25 * l);
            let [h, hp] = sol.state(t).unwrap();
            energy = energy.max((hp * hp - p_alpha_value(alpha, h)).abs());
        }
        let [hl, hpl, hppl, _] = sol.jet(l).unwrap();
        let fl = hl * hpl;
        let fpl = hpl * hpl + hl * hppl;
        boundary = boundary
            .max(fl.abs())
            .max((fpl + 1.0).abs())
            .max((hl - 1.0).abs())
            .max(hpl.abs());
        for k in 1..=200 {
            let s = 0.25 * l * k as f64 / 200.0;
            parity = parity.max((sol.state(s).unwrap()[0] + sol.state(-s).unwrap()[0]).abs());
        }
    }
    outcome(
        energy <= 1e-10 && boundary <= 1e-7 && parity <= 1e-9,
        format!("max energy={energy:.2e} max boundary={boundary:.2e} max parity={parity:.2e}"),
    )
}

fn sign_claims() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for alpha in [-2.9, -1.0, 0.0, 0.9] {
        let (_, m) = solve(alpha).phi_minimum(verifier::PHI_GRID);
        ok &= m > 0.0;
        parts.push(format!("min phi({alpha})={m:.4}"));
    }
    for alpha in [-3.0, 1.0] {
        let sol = solve(alpha);
        let (t, m) = sol.phi_minimum(verifier::PHI_GRID);
        ok &= m.abs() <= 1e-6;
        parts.push(format!("min phi({alpha})={m:.1e}"));
        if alpha == -3.0 {
            let h = sol.eval_h(t).unwrap();
            let dev = (h * h - 2.0 / 3.0).abs();
            ok &= dev <= 1e-4;
            parts.push(format!("|h^2-2/3|={dev:.1e}"));
        }
    }
    let mut worst0 = 0.0f64;
    for &alpha in GRID_ALPHAS.iter().chain(&[-2.9, 0.0, 0.9]) {
        worst0 = worst0.max((solve(alpha).eval_phi(0.0).unwrap() - 4.0 * (1.0 - alpha)).abs());
    }
    ok &= worst0 <= 1e-8;
    parts.push(format!("max|phi(0)-4(1-alpha)|={worst0:.1e}"));
    outcome(ok, parts.join(" "))
}

fn non_symmetric_example(grid: &[(f64, usize, VerificationReport)]) -> Outcome {
    let r = &grid
        .iter()
        .find(|(a, n, _)| *a == 1.0 && *n == 2)
        .unwrap()
        .2;
    let rr = r.aggregates.max_rr_norm;
    let spread = r.aggregates.scalar_curvature_spread;
    let hp = r.check("hp").unwrap().max;
    let phi_min = r.phi_sign_summary.min;
    outcome(
        rr > 1e-3 && spread > 1e-3 && hp <= 1e-6 && phi_min >= -1e-12,
        format!("max|R.R|={rr:.3e} scalar spread={spread:.3e} hp={hp:.1e} min phi={phi_min:.1e}"),
    )
}

/// A non-orthonormal Hermitian structure on R⁴ with a J-invariant plane D.
fn dim4_model() -> (DMatrix<f64>, DMatrix<f64>, DMatrix<f64>) {
    let a = DMatrix::from_row_slice(
        4,
        4,
        &[
            1.3, 0.2, -0.4, 0.1, //
            0.0, 0.9, 0.3, -0.2, //
            0.5, -0.1, 1.1, 0.3, //
            -0.2, 0.4, 0.0, 0.8,
        ],
    );
    let ai = a.clone().try_inverse().unwrap();
    let mut j0 = DMatrix::<f64>::zeros(4, 4);
    j0[(1, 0)] = 1.0;
    j0[(0, 1)] = -1.0;
    j0[(3, 2)] = 1.0;
    j0[(2, 3)] = -1.0;
    let mut p0 = DMatrix::<f64>::zeros(4, 4);
    p0[(0, 0)] = 1.0;
    p0[(1, 1)] = 1.0;
    (a.transpose() * &a, &ai * j0 * &a, &ai * p0 * &a)
}

fn basis(i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(4);
    v[i] = 1.0;
    v
}

/// `Π(U, V)X` in operator form.
fn pi_operator(
    g: &DMatrix<f64>,
    j: &DMatrix<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
    x: &DVector<f64>,
) -> DVector<f64> {
    let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * g * b)[(0, 0)];
    let (ju, jv, jx) = (j * u, j * v, j * x);
    (u * ip(v, x) - v * ip(u, x) + &ju * ip(&jv, x) - &jv * ip(&ju, x) - jx * (2.0 * ip(&ju, v)))
        * 0.25
}

fn tensor_algebra(grid: &[(f64, usize, VerificationReport)]) -> Outcome {
    let (g, j, p) = dim4_model();
    let ip = |a: &DVector<f64>, b: &DVector<f64>| (a.transpose() * &g * b)[(0, 0)];
    let hd = |a: &DVector<f64>, b: &DVector<f64>| ip(&(&p * a), &(&p * b));
    let om = |a: &DVector<f64>, b: &DVector<f64>| hd(&(&j * a), b);
    let e: Vec<DVector<f64>> = (0..4).map(basis).collect();

    let pi = algebra::pi_tensor(&g, &j).unwrap();
    let (gd, omega) = algebra::distribution_forms(&g, &j, &p);
    let phi = algebra::phi_tensor(&g, &j, &gd, &omega).unwrap();
    let psi = algebra::psi_tensor(&g, &omega);

    let mut agree = 0.0f64;
    let mut sym = 0.0f64;
    let mut jinv = 0.0f64;
    for x in 0..4 {
        for y in 0..4 {
            for z in 0..4 {
                for u in 0..4 {
                    let (ex, ey, ez, eu) = (&e[x], &e[y], &e[z], &e[u]);
                    let (jx, jy, jz) = (&j * ex, &j * ey, &j * ez);
                    let pi_o = ip(&pi_operator(&g, &j, ex, ey, ez), eu);
                    let phi_o = 0.125
                        * (ip(ey, ez) * hd(ex, eu) - ip(ex, ez) * hd(ey, eu)
                            + ip(ex, eu) * hd(ey, ez)
                            - ip(ey, eu) * hd(ex, ez)
                            + ip(&jy, ez) * om(ex, eu)
                            - ip(&jx, ez) * om(ey, eu)
                            + ip(&jx, eu) * om(ey, ez)
                            - ip(&jy, eu) * om(ex, ez)
                            - 2.0 * ip(&jx, ey) * om(ez, eu)
                            - 2.0 * ip(&jz, eu) * om(ex, ey));
                    let psi_o = -om(ex, ey) * om(ez, eu);
                    for (t, o) in [(&pi, pi_o), (&phi, phi_o), (&psi, psi_o)] {
                        let v = t.get(x, y, z, u);
                        agree = agree.max((v - o).abs());
                        sym = sym
                            .max((v + t.get(y, x, z, u)).abs())
                            .max((v + t.get(x, y, u, z)).abs())
                            .max((v - t.get(z, u, x, y)).abs())
                            .max((v + t.get(y, z, x, u) + t.get(z, x, y, u)).abs());
                        jinv = jinv.max((t.eval(&jx, &jy, ez, eu) - v).abs());
                    }
                }
            }
        }
    }

    // Π.Π by operator action, independent of the library's derivation code
    let mut pipi_oracle = 0.0f64;
    for x in 0..4 {
        for y in 0..4 {
            let op: Vec<DVector<f64>> = (0..4)
                .map(|a| pi_operator(&g, &j, &e[x], &e[y], &e[a]))
                .collect();
            for z1 in 0..4 {
                for z2 in 0..4 {
                    for z3 in 0..4 {
                        for z4 in 0..4 {
                            let s = pi.eval(&op[z1], &e[z2], &e[z3], &e[z4])
                                + pi.eval(&e[z1], &op[z2], &e[z3], &e[z4])
                                + pi.eval(&e[z1], &e[z2], &op[z3], &e[z4])
                                + pi.eval(&e[z1], &e[z2], &e[z3], &op[z4]);
                            pipi_oracle = pipi_oracle.max(s.abs());
                        }
                    }
                }
            }
        }
    }
    let pipi_lib = algebra::derivation_action(&pi, &pi).unwrap().max_norm();

    let points = || grid.iter().flat_map(|(_, _, r)| r.points.iter());
    let curv_sym = max_of(points().map(|p| {
        p.symmetry
            .antisym_first_pair
            .max(p.symmetry.antisym_second_pair)
            .max(p.symmetry.pair_exchange)
    }));
    let bianchi = max_of(points().map(|p| p.symmetry.bianchi));

    outcome(
        agree <= 1e-12 && sym <= 1e-12 && jinv <= 1e-12 && pipi_oracle <= 1e-12 && pipi_lib <= 1e-12 && curv_sym <= 1e-8 && bianchi <= 1e-8,
        format!(
            "oracle diff={agree:.1e} model symmetries={sym:.1e} J-invariance={jinv:.1e} Pi.Pi={pipi_lib:.1e}/{pipi_oracle:.1e} R symmetries={curv_sym:.1e} Bianchi={bianchi:.1e}"
        ),
    )
}

fn validation_boundary() -> Outcome {
    let witness = match Profile::p_alpha(-4.0) {
        Err(hpkahler::Error::PositivityViolation { witness_t, .. }) => Some(witness_t),
        _ => None,
    };
    let validate_witness = Profile::p_alpha_unchecked(-4.0).validate().witness;
    let accepted = Profile::p_alpha(-3.99).is_ok();
    let target = std::f64::consts::FRAC_1_SQRT_2;
    let close = |w: Option<f64>| w.is_some_and(|w| (w - target).abs() <= 1e-9);
    outcome(
        close(witness) && close(validate_witness) && accepted,
        format!("witness={witness:?} validate witness={validate_witness:?} alpha=-3.99 accepted={accepted}"),
    )
}

fn main() {
    let start = Instant::now();
    let grid = grid_reports();
    let results = [
        ("closed-form anchor (alpha=0)", closed_form_anchor()),
        ("HP identity", hp_identity(&grid)),
        ("QCH decomposition", qch_decomposition(&grid)),
        ("Kahler verification", kahler_conditions(&grid)),
        ("profile integrity", profile_integrity()),
        ("sign claims", sign_claims()),
        (
            "non-symmetric example (alpha=1, n=2)",
            non_symmetric_example(&grid),
        ),
        ("tensor algebra (dim 4)", tensor_algebra(&grid)),
        ("validation boundary", validation_boundary()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!(
            "criterion {name}: {} | {}",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!(
        "acceptance: {}/{} passed in {:.1}s",
        results.len() - failed,
        results.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

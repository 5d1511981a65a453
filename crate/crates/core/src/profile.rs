//! Profile polynomials `P`, their admissibility conditions, and the profile
//! function `h` solving `h'' = P'(h)/2`, `h(0) = 0`, `h'(0) = 1`.

use std::f64::consts::FRAC_1_SQRT_2;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ode::{self, StepControl, Trajectory};
use crate::poly::{self, Polynomial};

/// Tolerance used for the boundary clauses when exact rational evaluation
/// does not give zero (coefficients rounded from a real parameter).
pub const CLAUSE_TOL: f64 = 1e-12;

/// Number of samples in the positivity grid on `[0, 1 - 1e-6]`.
pub const POSITIVITY_GRID: usize = 10_000;

/// An even polynomial profile `P`, possibly tagged with the family parameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Profile {
    coeffs: Vec<f64>,
    alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Clause {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationOutcome {
    pub clauses: Vec<Clause>,
    /// A point of `[0, 1)` where `P` is smallest, reported when positivity fails.
    pub witness: Option<f64>,
}

impl ValidationOutcome {
    pub fn passed(&self) -> bool {
        self.clauses.iter().all(|c| c.passed)
    }

    pub fn clause(&self, name: &str) -> Option<&Clause> {
        self.clauses.iter().find(|c| c.name == name)
    }
}

impl Profile {
    /// Wraps raw ascending coefficients without validating them.
    pub fn from_coeffs(coeffs: Vec<f64>) -> Self {
        Self {
            coeffs: Polynomial::new(coeffs).coeffs().to_vec(),
            alpha: None,
        }
    }

    /// `P_α(t) = 1 + (α−1)t² − 2αt⁴ + αt⁶`, unvalidated.
    pub fn p_alpha_unchecked(alpha: f64) -> Self {
        let mut p = Self::from_coeffs(vec![1.0, 0.0, alpha - 1.0, 0.0, -2.0 * alpha, 0.0, alpha]);
        p.alpha = Some(alpha);
        p
    }

    /// The validated family member. `P_α = (1 − t²)(1 + αt²(1 − t²))`, whose
    /// second factor is smallest at `t = 1/√2`, so that point witnesses any
    /// failure of positivity.
    pub fn p_alpha(alpha: f64) -> Result<Self> {
        let p = Self::p_alpha_unchecked(alpha);
        if !(alpha > -4.0) {
            return Err(Error::PositivityViolation {
                witness_t: FRAC_1_SQRT_2,
                value: p.eval(FRAC_1_SQRT_2),
            });
        }
        let outcome = p.validate();
        if !outcome.passed() {
            let failed: Vec<_> = outcome
                .clauses
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.clone())
                .collect();
            return Err(Error::InvalidProfile(failed.join(", ")));
        }
        Ok(p)
    }

    pub fn alpha(&self) -> Option<f64> {
        self.alpha
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.coeffs.clone())
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.polynomial().eval(t)
    }

    pub fn eval_derivative(&self, t: f64) -> f64 {
        self.polynomial().derivative().eval(t)
    }

    pub fn eval_second_derivative(&self, t: f64) -> f64 {
        self.polynomial().derivative().derivative().eval(t)
    }

    /// `P'(s)/s` as an exact polynomial. Only meaningful when `P'(0) = 0`.
    pub fn slope_quotient(&self) -> Polynomial {
        self.polynomial().derivative().shift_down()
    }

    /// Checks evenness, the four boundary clauses and positivity on `[0, 1)`.
    pub fn validate(&self) -> ValidationOutcome {
        let p = self.polynomial();
        let rat = p.to_rational();
        let drat: Vec<BigRational> = rat
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, c)| c * BigRational::from_integer((k as i64).into()))
            .collect();
        let zero = BigRational::zero();
        let one = BigRational::one();

        let exact_clause = |name: &str, value: BigRational, target: f64| {
            let target = BigRational::from_float(target).unwrap_or_else(BigRational::zero);
            let diff = value - target;
            let residual = num_traits::ToPrimitive::to_f64(&diff)
                .unwrap_or(f64::INFINITY)
                .abs();
            Clause {
                name: name.to_string(),
                passed: diff.is_zero() || residual <= CLAUSE_TOL,
                residual,
            }
        };

        let odd_max = p
            .coeffs()
            .iter()
            .skip(1)
            .step_by(2)
            .fold(0.0f64, |m, c| m.max(c.abs()));
        let mut clauses = vec![
            Clause {
                name: "even".into(),
                passed: odd_max == 0.0,
                residual: odd_max,
            },
            exact_clause("P(0)=1", poly::rational_eval(&rat, &zero), 1.0),
            exact_clause("P'(0)=0", poly::rational_eval(&drat, &zero), 0.0),
            exact_clause("P(1)=0", poly::rational_eval(&rat, &one), 0.0),
            exact_clause("P'(1)=-2", poly::rational_eval(&drat, &one), -2.0),
        ];

        // Grid scan on [0, 1 - 1e-6].
        let hi = 1.0 - 1e-6;
        let mut grid_min = f64::INFINITY;
        let mut grid_arg = 0.0;
        for k in 0..POSITIVITY_GRID {
            let t = hi * k as f64 / (POSITIVITY_GRID - 1) as f64;
            let v = p.eval(t);
            if v < grid_min {
                grid_min = v;
                grid_arg = t;
            }
        }

        // Exact root count of P/(1 - t) on [0, 1]. The quotient is positive at
        // t = 1 when P'(1) = -2, so any sign change or tangency inside the
        // interval shows up as a root.
        let quotient = poly::rational_deflate(&rat, &one);
        let q0 = poly::rational_eval(&quotient, &zero);
        let roots = poly::count_distinct_roots(&quotient, &zero, &one) + usize::from(q0.is_zero());
        // P(t) = -(t - 1)·q(t) so q < 0 on [0, 1) means P > 0.
        let q_sign_ok = q0 < zero;

        let positive = grid_min > 0.0 && roots == 0 && q_sign_ok;
        clauses.push(Clause {
            name: "positive on [0,1)".into(),
            passed: positive,
            residual: grid_min.min(0.0).abs(),
        });

        let witness = if positive {
            None
        } else {
            Some(refine_minimum(
                &p,
                grid_arg,
                hi / (POSITIVITY_GRID - 1) as f64,
            ))
        };
        ValidationOutcome { clauses, witness }
    }
}

/// Refines a grid minimiser of `p` by bisecting on the sign of `p'`.
fn refine_minimum(p: &Polynomial, t0: f64, spacing: f64) -> f64 {
    let dp = p.derivative();
    let mut a = (t0 - spacing).max(0.0);
    let mut b = (t0 + spacing).min(1.0);
    if dp.eval(a) > 0.0 || dp.eval(b) < 0.0 {
        return t0;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if dp.eval(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// Tolerances governing the profile integration and its acceptance checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OdeTolerances {
    pub rtol: f64,
    pub atol: f64,
    pub energy_tol: f64,
    pub endpoint_tol: f64,
    pub t_max: f64,
}

impl Default for OdeTolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            energy_tol: 1e-10,
            endpoint_tol: 1e-7,
            t_max: 50.0,
        }
    }
}

/// Dense solution `(h, h')` of the profile equation on `[-L/4, 5L/4]`, with
/// the endpoint `L` (first zero of `h'`).
#[derive(Debug, Clone)]
pub struct ProfileSolution {
    profile: Profile,
    dprofile: Polynomial,
    ddprofile: Polynomial,
    slope_quotient: Polynomial,
    length: f64,
    forward: Trajectory<2>,
    beyond: Trajectory<2>,
    backward: Trajectory<2>,
    tolerances: OdeTolerances,
    max_energy_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub t: f64,
    pub h: f64,
    pub hp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSolutionJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    pub coeffs: Vec<f64>,
    #[serde(rename = "L")]
    pub length: f64,
    pub tolerances: OdeTolerances,
    pub nodes: Vec<Node>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryReport {
    pub h0: f64,
    pub hp0_minus_1: f64,
    pub hl_minus_1: f64,
    pub hpl: f64,
    pub fl: f64,
    pub fpl_plus_1: f64,
    /// `max |h(-t) + h(t)|` over a grid in `(0, L/4]`.
    pub parity_h: f64,
    /// `max |f(L - s) + f(L + s)|` over a grid in `(0, L/4]`.
    pub parity_f_at_l: f64,
}

impl BoundaryReport {
    /// Largest of the six endpoint residuals.
    pub fn max_endpoint(&self) -> f64 {
        [
            self.h0,
            self.hp0_minus_1,
            self.hl_minus_1,
            self.hpl,
            self.fl,
            self.fpl_plus_1,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

const PARITY_GRID: usize = 64;

impl ProfileSolution {
    pub fn solve(profile: &Profile, tol: &OdeTolerances) -> Result<Self> {
        let outcome = profile.validate();
        if !outcome.passed() {
            if let Some(w) = outcome.witness {
                return Err(Error::PositivityViolation {
                    witness_t: w,
                    value: profile.eval(w),
                });
            }
            let failed: Vec<_> = outcome
                .clauses
                .iter()
                .filter(|c| !c.passed)
                .map(|c| c.name.clone())
                .collect();
            return Err(Error::InvalidProfile(failed.join(", ")));
        }

        let p = profile.polynomial();
        let dp = p.derivative();
        let rhs = |y: &[f64; 2]| [y[1], 0.5 * dp.eval(y[0])];
        let ctl = StepControl {
            rtol: tol.rtol,
            atol: tol.atol,
            ..StepControl::default()
        };
        let mut max_drift = 0.0f64;
        let mut check = |t: f64, y: &[f64; 2], monotone: bool| -> Result<()> {
            let drift = (y[1] * y[1] - p.eval(y[0])).abs();
            max_drift = max_drift.max(drift);
            if drift > tol.energy_tol {
                return Err(Error::EnergyDrift {
                    t,
                    drift,
                    tol: tol.energy_tol,
                });
            }
            if monotone && y[1] < 0.0 {
                return Err(Error::NotMonotone { t });
            }
            Ok(())
        };

        let forward = ode::integrate(
            rhs,
            0.0,
            [0.0, 1.0],
            tol.t_max,
            &ctl,
            Some(|y: &[f64; 2]| y[1]),
            |t, y| check(t, y, false),
        )?;
        let length = forward
            .event
            .ok_or(Error::EndpointNotFound { t_max: tol.t_max })?;

        let at_l = forward.eval(length).expect("event lies on the trajectory");
        let beyond = ode::integrate(
            rhs,
            length,
            at_l,
            1.25 * length,
            &ctl,
            None::<fn(&[f64; 2]) -> f64>,
            |t, y| check(t, y, false),
        )?;
        let backward = ode::integrate(
            rhs,
            0.0,
            [0.0, 1.0],
            -0.25 * length,
            &ctl,
            None::<fn(&[f64; 2]) -> f64>,
            |t, y| check(t, y, false),
        )?;

        Ok(Self {
            profile: profile.clone(),
            dprofile: dp.clone(),
            ddprofile: dp.derivative(),
            slope_quotient: profile.slope_quotient(),
            length,
            forward,
            beyond,
            backward,
            tolerances: *tol,
            max_energy_drift: max_drift,
        })
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    /// The endpoint `L`.
    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn tolerances(&self) -> &OdeTolerances {
        &self.tolerances
    }

    /// Largest `|h'² − P(h)|` seen at any accepted step.
    pub fn max_energy_drift(&self) -> f64 {
        self.max_energy_drift
    }

    /// `(h, h')` anywhere in `[-L/4, 5L/4]`.
    pub fn state(&self, t: f64) -> Result<[f64; 2]> {
        let y = if t < 0.0 {
            self.backward.eval(t)
        } else if t <= self.length {
            self.forward.eval(t)
        } else {
            self.beyond.eval(t)
        };
        y.ok_or(Error::OutOfRange {
            t,
            lo: -0.25 * self.length,
            hi: 1.25 * self.length,
        })
    }

    /// `[h, h', h'', h''']` at `t`, with the higher derivatives taken from the
    /// equation: `h'' = P'(h)/2`, `h''' = P''(h)h'/2`.
    pub fn jet(&self, t: f64) -> Result<[f64; 4]> {
        let [h, hp] = self.state(t)?;
        Ok([
            h,
            hp,
            0.5 * self.dprofile.eval(h),
            0.5 * self.ddprofile.eval(h) * hp,
        ])
    }

    fn check_range(&self, t: f64) -> Result<()> {
        if !(0.0..=self.length).contains(&t) {
            return Err(Error::OutOfRange {
                t,
                lo: 0.0,
                hi: self.length,
            });
        }
        Ok(())
    }

    pub fn eval_h(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        Ok(self.state(t)?[0])
    }

    /// `f = h h'`, the length of the circle fibre.
    pub fn eval_f(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        let [h, hp] = self.state(t)?;
        Ok(h * hp)
    }

    /// `φ = −2P'(h)/h`, evaluated through the exact quotient `P'(s)/s` so that
    /// `t = 0` gives `−2P''(0)` without division.
    pub fn eval_phi(&self, t: f64) -> Result<f64> {
        self.check_range(t)?;
        let [h, _] = self.state(t)?;
        Ok(self.phi_at_height(h))
    }

    pub fn phi_at_height(&self, h: f64) -> f64 {
        // adding 0.0 turns a signed zero into +0
        -2.0 * self.slope_quotient.eval(h) + 0.0
    }

    /// Accepted-step nodes on `[0, L]`, ending exactly at `L`.
    pub fn nodes(&self) -> Vec<Node> {
        let mut nodes = vec![Node {
            t: 0.0,
            h: 0.0,
            hp: 1.0,
        }];
        for s in &self.forward.steps {
            let t = s.t1().min(self.length);
            let [h, hp] = if s.t1() >= self.length {
                s.interpolate(self.length)
            } else {
                s.y1
            };
            nodes.push(Node { t, h, hp });
        }
        nodes
    }

    pub fn to_json(&self) -> ProfileSolutionJson {
        ProfileSolutionJson {
            alpha: self.profile.alpha(),
            coeffs: self.profile.coeffs().to_vec(),
            length: self.length,
            tolerances: self.tolerances,
            nodes: self.nodes(),
        }
    }

    pub fn boundary_report(&self) -> BoundaryReport {
        let l = self.length;
        let [h0, hp0] = self.state(0.0).unwrap_or([f64::NAN; 2]);
        let [hl, hpl, hppl, _] = self.jet(l).unwrap_or([f64::NAN; 4]);
        let fl = hl * hpl;
        let fpl = hpl * hpl + hl * hppl;

        let mut parity_h = 0.0f64;
        let mut parity_f = 0.0f64;
        for k in 1..=PARITY_GRID {
            let s = 0.25 * l * k as f64 / PARITY_GRID as f64;
            if let (Ok([a, _]), Ok([b, _])) = (self.state(s), self.state(-s)) {
                parity_h = parity_h.max((a + b).abs());
            } else {
                parity_h = f64::NAN;
            }
            if let (Ok([h1, hp1]), Ok([h2, hp2])) = (self.state(l - s), self.state(l + s)) {
                parity_f = parity_f.max((h1 * hp1 + h2 * hp2).abs());
            } else {
                parity_f = f64::NAN;
            }
        }

        BoundaryReport {
            h0: h0.abs(),
            hp0_minus_1: (hp0 - 1.0).abs(),
            hl_minus_1: (hl - 1.0).abs(),
            hpl: hpl.abs(),
            fl: fl.abs(),
            fpl_plus_1: (fpl + 1.0).abs(),
            parity_h,
            parity_f_at_l: parity_f,
        }
    }

    /// Minimum of `φ` over `[0, L]`: a uniform grid followed by parabolic and
    /// golden-section refinement around the smallest sample.
    pub fn phi_minimum(&self, grid: usize) -> (f64, f64) {
        let l = self.length;
        let phi = |t: f64| self.eval_phi(t.clamp(0.0, l)).unwrap_or(f64::INFINITY);
        let dt = l / (grid - 1) as f64;
        let (mut kmin, mut vmin) = (0usize, f64::INFINITY);
        for k in 0..grid {
            let v = phi(k as f64 * dt);
            if v < vmin {
                vmin = v;
                kmin = k;
            }
        }
        if kmin == 0 || kmin == grid - 1 {
            return (kmin as f64 * dt, vmin);
        }
        let (t0, t1, t2) = (
            (kmin - 1) as f64 * dt,
            kmin as f64 * dt,
            (kmin + 1) as f64 * dt,
        );
        let (f0, f1, f2) = (phi(t0), vmin, phi(t2));
        let denom = f0 - 2.0 * f1 + f2;
        let mut best = (t1, f1);
        if denom > 0.0 {
            let tv = t1 + 0.5 * dt * (f0 - f2) / denom;
            let fv = phi(tv);
            if fv < best.1 {
                best = (tv, fv);
            }
        }
        // golden section on the bracketing cell pair
        let gr = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (t0, t2);
        let mut c = b - gr * (b - a);
        let mut d = a + gr * (b - a);
        let (mut fc, mut fd) = (phi(c), phi(d));
        for _ in 0..80 {
            if fc < fd {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = phi(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = phi(d);
            }
        }
        for (t, v) in [(c, fc), (d, fd)] {
            if v < best.1 {
                best = (t, v);
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn p_alpha_zero_is_one_minus_t_squared() {
        let p = Profile::p_alpha(0.0).unwrap();
        assert_eq!(p.coeffs(), &[1.0, 0.0, -1.0]);
    }

    #[test]
    fn p_alpha_one_coefficients() {
        let p = Profile::p_alpha(1.0).unwrap();
        assert_eq!(p.coeffs(), &[1.0, 0.0, 0.0, 0.0, -2.0, 0.0, 1.0]);
    }

    #[test]
    fn p_alpha_minus_four_rejected_with_witness() {
        match Profile::p_alpha(-4.0) {
            Err(Error::PositivityViolation { witness_t, value }) => {
                assert!((witness_t - FRAC_1_SQRT_2).abs() < 1e-9);
                assert!(value.abs() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(Profile::p_alpha(f64::NAN).is_err());
    }

    #[test]
    fn validate_finds_tangent_root_and_witness() {
        let out = Profile::p_alpha_unchecked(-4.0).validate();
        assert!(!out.passed());
        assert!(!out.clause("positive on [0,1)").unwrap().passed);
        let w = out.witness.unwrap();
        assert!((w - FRAC_1_SQRT_2).abs() < 1e-9, "witness {w}");
    }

    #[test]
    fn validate_one_minus_t_squared() {
        let out = Profile::from_coeffs(vec![1.0, 0.0, -1.0]).validate();
        assert!(out.passed(), "{out:?}");
        assert!(out.witness.is_none());
    }

    #[test]
    fn odd_coefficient_fails_evenness() {
        let out = Profile::from_coeffs(vec![1.0, 0.0, -1.0, 0.5, -0.5]).validate();
        assert!(!out.clause("even").unwrap().passed);
        assert!(!out.passed());
    }

    #[test]
    fn alpha_near_minus_four_accepted() {
        // min of 1 + αu(1-u) on [0,1] is 1 + α/4 = 0.0025
        let out = Profile::p_alpha_unchecked(-3.99).validate();
        assert!(out.passed(), "{out:?}");
        let p = Profile::p_alpha(-3.99).unwrap();
        let q = 1.0 + (-3.99) * 0.25;
        assert!((p.eval(FRAC_1_SQRT_2) / (1.0 - 0.5) - q).abs() < 1e-12);
    }

    #[test]
    fn boundary_clause_failure_reported() {
        // 1 - t⁴ has P'(1) = -4
        let out = Profile::from_coeffs(vec![1.0, 0.0, 0.0, 0.0, -1.0]).validate();
        assert!(!out.clause("P'(1)=-2").unwrap().passed);
        assert!(out.clause("P(1)=0").unwrap().passed);
    }

    #[test]
    fn sine_profile() {
        let sol =
            ProfileSolution::solve(&Profile::p_alpha(0.0).unwrap(), &OdeTolerances::default())
                .unwrap();
        assert!((sol.length() - FRAC_PI_2).abs() < 1e-9);
        assert!((sol.eval_h(0.7).unwrap() - 0.7f64.sin()).abs() < 1e-9);
        let f = sol.eval_f(std::f64::consts::FRAC_PI_4).unwrap();
        assert!((f - 0.5).abs() < 1e-9);
        assert_eq!(sol.eval_f(0.0).unwrap(), 0.0);
        for k in 0..=20 {
            let t = sol.length() * k as f64 / 20.0;
            assert!((sol.eval_phi(t).unwrap() - 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn out_of_range_evaluation() {
        let sol =
            ProfileSolution::solve(&Profile::p_alpha(0.0).unwrap(), &OdeTolerances::default())
                .unwrap();
        assert!(matches!(sol.eval_f(-0.1), Err(Error::OutOfRange { .. })));
        assert!(matches!(sol.eval_phi(2.0), Err(Error::OutOfRange { .. })));
        assert!(sol.state(-0.3).is_ok());
        assert!(sol.state(-0.5).is_err());
    }

    #[test]
    fn endpoint_not_found_when_t_max_too_small() {
        let tol = OdeTolerances {
            t_max: 1.0,
            ..OdeTolerances::default()
        };
        let r = ProfileSolution::solve(&Profile::p_alpha(0.0).unwrap(), &tol);
        assert!(matches!(r, Err(Error::EndpointNotFound { .. })));
    }

    #[test]
    fn energy_drift_detected_with_loose_steps() {
        let tol = OdeTolerances {
            rtol: 1e-3,
            atol: 1e-3,
            ..OdeTolerances::default()
        };
        let r = ProfileSolution::solve(&Profile::p_alpha(1.0).unwrap(), &tol);
        assert!(matches!(r, Err(Error::EnergyDrift { .. })), "{r:?}");
    }

    #[test]
    fn endpoint_data_for_alpha_one() {
        let sol =
            ProfileSolution::solve(&Profile::p_alpha(1.0).unwrap(), &OdeTolerances::default())
                .unwrap();
        let [h, hp, hpp, _] = sol.jet(sol.length()).unwrap();
        assert!((h - 1.0).abs() < 1e-7);
        assert!(hp.abs() < 1e-7);
        assert!((hpp + 1.0).abs() < 1e-7);
        let b = sol.boundary_report();
        assert!(b.max_endpoint() < 1e-7, "{b:?}");
        assert!(b.parity_h < 1e-9);
        assert!(b.parity_f_at_l < 1e-7);
    }

    #[test]
    fn phi_at_origin() {
        for alpha in [-3.5, -1.0, 0.5, 3.0] {
            let sol = ProfileSolution::solve(
                &Profile::p_alpha(alpha).unwrap(),
                &OdeTolerances::default(),
            )
            .unwrap();
            assert!((sol.eval_phi(0.0).unwrap() - 4.0 * (1.0 - alpha)).abs() < 1e-12);
        }
    }

    #[test]
    fn json_shape() {
        let sol =
            ProfileSolution::solve(&Profile::p_alpha(0.5).unwrap(), &OdeTolerances::default())
                .unwrap();
        let v = serde_json::to_value(sol.to_json()).unwrap();
        assert_eq!(v["alpha"], 0.5);
        assert!(v["L"].as_f64().unwrap() > 1.0);
        let nodes = v["nodes"].as_array().unwrap();
        assert_eq!(nodes[0]["t"], 0.0);
        assert_eq!(nodes.last().unwrap()["t"].as_f64(), Some(sol.length()));
        assert!(v["tolerances"]["rtol"].is_number());
    }

    #[test]
    fn state_covers_the_whole_extended_range() {
        for alpha in [-3.5, 0.0, 3.0] {
            let sol = ProfileSolution::solve(
                &Profile::p_alpha(alpha).unwrap(),
                &OdeTolerances::default(),
            )
            .unwrap();
            let l = sol.length();
            let mut prev = sol.state(-0.25 * l).unwrap();
            for k in 1..=20_000 {
                let t = (-0.25 * l + 1.5 * l * k as f64 / 20_000.0).min(1.25 * l);
                let y = sol.state(t).unwrap();
                assert!((y[0] - prev[0]).abs() < 1e-3, "jump at t = {t}");
                prev = y;
            }
        }
    }
}

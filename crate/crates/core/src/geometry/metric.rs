use std::sync::OnceLock;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::base::{connection_one_form, fubini_study, j0};
use super::ChartPoint;
use crate::autodiff::{HyperDual, Real};
use crate::error::{Error, Result};
use crate::profile::{OdeTolerances, Profile, ProfileSolution};

/// Metric components and their exact first and second coordinate partials
/// at one chart point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricJet {
    pub dim: usize,
    /// `g[a·d + b]`
    pub g: Vec<f64>,
    /// `∂_i g_ab` at `dg[(a·d + b)·d + i]`
    pub dg: Vec<f64>,
    /// `∂_i∂_j g_ab` at `ddg[((a·d + b)·d + i)·d + j]`
    pub ddg: Vec<f64>,
}

impl MetricJet {
    pub fn g(&self, a: usize, b: usize) -> f64 {
        self.g[a * self.dim + b]
    }

    pub fn dg(&self, a: usize, b: usize, i: usize) -> f64 {
        self.dg[(a * self.dim + b) * self.dim + i]
    }

    pub fn ddg(&self, a: usize, b: usize, i: usize, j: usize) -> f64 {
        let d = self.dim;
        self.ddg[((a * d + b) * d + i) * d + j]
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.g)
    }
}

/// Jet of an arbitrary metric given as a function of hyper-dual coordinates,
/// returning row-major `d × d` components.
pub fn jet_of<F>(x: &[f64], metric: F) -> MetricJet
where
    F: Fn(&[HyperDual]) -> Vec<HyperDual>,
{
    let d = x.len();
    let mut g = vec![0.0; d * d];
    let mut dg = vec![0.0; d * d * d];
    let mut ddg = vec![0.0; d * d * d * d];
    for i in 0..d {
        for j in i..d {
            let xs: Vec<HyperDual> = x
                .iter()
                .enumerate()
                .map(|(k, &v)| HyperDual::variable(v, k == i, k == j))
                .collect();
            let comps = metric(&xs);
            for ab in 0..d * d {
                let c = comps[ab];
                if i == 0 && j == 0 {
                    g[ab] = c.re;
                }
                if i == j {
                    dg[ab * d + i] = c.e1;
                }
                ddg[(ab * d + i) * d + j] = c.e12;
                ddg[(ab * d + j) * d + i] = c.e12;
            }
        }
    }
    MetricJet { dim: d, g, dg, ddg }
}

/// Values of `h` and `f = hh'` (as scalars in `S`) together with the base
/// data, all evaluated at the coordinates `x`.
struct Fields<S> {
    f: S,
    h: S,
    conn: Vec<S>,
    fs: Vec<S>,
}

fn fields<S: Real>(x: &[S], jet: &[f64; 4]) -> Fields<S> {
    let [h0, h1, h2, h3] = *jet;
    let t = x[0];
    let h = t.chain(h0, h1, h2);
    let hp = t.chain(h1, h2, h3);
    let w = &x[2..];
    Fields {
        f: h * hp,
        h,
        conn: connection_one_form(w),
        fs: fubini_study(w).metric,
    }
}

fn metric_from<S: Real>(fl: &Fields<S>, d: usize) -> Vec<S> {
    let m2 = d - 2;
    let f2 = fl.f * fl.f;
    let h2 = fl.h * fl.h;
    let mut g = vec![S::cst(0.0); d * d];
    g[0] = S::cst(1.0);
    g[d + 1] = f2;
    for k in 0..m2 {
        let v = f2 * fl.conn[k];
        g[d + 2 + k] = v;
        g[(2 + k) * d + 1] = v;
        for l in 0..m2 {
            g[(2 + k) * d + 2 + l] = f2 * fl.conn[k] * fl.conn[l] + h2 * fl.fs[k * m2 + l];
        }
    }
    g
}

/// `J` as a column-action matrix, `J[i·d + j] = Jⁱ_j`:
/// `J∂_t = (ε/f)∂_ψ`, `J∂_ψ = −εf∂_t`, and on base directions the horizontal
/// lift of `J₀` corrected by the `∂_t` component forced by `J² = −1`.
fn structure_from<S: Real>(fl: &Fields<S>, d: usize, eps: f64) -> Vec<S> {
    let m2 = d - 2;
    let mut j = vec![S::cst(0.0); d * d];
    j[d] = fl.f.recip() * eps;
    j[1] = -(fl.f * eps);
    for k in 0..m2 {
        let mut a_of_j0 = S::cst(0.0);
        for m in 0..m2 {
            let c = j0(m, k);
            if c != 0.0 {
                j[(2 + m) * d + 2 + k] = S::cst(c);
                a_of_j0 = a_of_j0 + fl.conn[m] * c;
            }
        }
        j[d + 2 + k] = -a_of_j0;
        j[2 + k] = -(fl.f * fl.conn[k] * eps);
    }
    j
}

fn profile_jet(point: &ChartPoint, sol: &ProfileSolution) -> Result<[f64; 4]> {
    let l = sol.length();
    if !(point.t > 0.0 && point.t < l) {
        return Err(Error::OutOfRange {
            t: point.t,
            lo: 0.0,
            hi: l,
        });
    }
    sol.jet(point.t)
}

pub fn metric_jet(point: &ChartPoint, sol: &ProfileSolution) -> Result<MetricJet> {
    let pj = profile_jet(point, sol)?;
    let d = point.dim();
    let jet = jet_of(&point.coords(), |x| metric_from(&fields(x, &pj), d));
    if jet.matrix().cholesky().is_none() {
        return Err(Error::NotPositiveDefinite { t: point.t });
    }
    Ok(jet)
}

/// Outcome of fixing the sign `ε` in `J∂_t = (ε/f)∂_ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub epsilon: f64,
    /// `max |∇J|` and `max |dΩ|` at the probe point for `ε = +1` and `ε = −1`.
    pub nabla_j: [f64; 2],
    pub d_omega: [f64; 2],
    pub probe_t: f64,
}

/// Probes the round (`α = 0`, `n = 2`) metric at a generic point and keeps
/// the sign for which `J` is parallel and `Ω` closed.
pub fn calibrate_orientation() -> Result<Calibration> {
    let sol = ProfileSolution::solve(&Profile::p_alpha(0.0)?, &OdeTolerances::default())?;
    let point = ChartPoint::new(0.37 * sol.length(), 0.4, vec![0.31, -0.22]);
    let mut nj = [0.0; 2];
    let mut dom = [0.0; 2];
    for (k, eps) in [1.0, -1.0].into_iter().enumerate() {
        nj[k] = max_abs(&super::curvature::nabla_j_with(&point, &sol, eps)?);
        dom[k] = max_abs(&super::curvature::d_omega_with(&point, &sol, eps)?);
    }
    let epsilon = if nj[0] + dom[0] <= nj[1] + dom[1] {
        1.0
    } else {
        -1.0
    };
    Ok(Calibration {
        epsilon,
        nabla_j: nj,
        d_omega: dom,
        probe_t: point.t,
    })
}

pub(crate) fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

static ORIENTATION: OnceLock<Calibration> = OnceLock::new();

/// The calibrated orientation, computed once per process.
pub fn orientation() -> Calibration {
    *ORIENTATION.get_or_init(|| calibrate_orientation().expect("calibration on the round metric"))
}

/// `J` in coordinate components with the calibrated sign.
pub fn complex_structure(point: &ChartPoint, sol: &ProfileSolution) -> Result<DMatrix<f64>> {
    complex_structure_with(point, sol, orientation().epsilon)
}

pub fn complex_structure_with(
    point: &ChartPoint,
    sol: &ProfileSolution,
    eps: f64,
) -> Result<DMatrix<f64>> {
    let pj = profile_jet(point, sol)?;
    let d = point.dim();
    let j = structure_from(&fields(&point.coords(), &pj), d, eps);
    Ok(DMatrix::from_row_slice(d, d, &j))
}

/// `(J, ∂_k J)` for every coordinate `k`, via first-order seeding.
pub(crate) fn structure_derivatives(
    point: &ChartPoint,
    sol: &ProfileSolution,
    eps: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let pj = profile_jet(point, sol)?;
    let d = point.dim();
    let x = point.coords();
    let mut value = Vec::new();
    let mut partials = Vec::with_capacity(d);
    for k in 0..d {
        let xs: Vec<HyperDual> = x
            .iter()
            .enumerate()
            .map(|(i, &v)| HyperDual::variable(v, i == k, false))
            .collect();
        let j = structure_from(&fields(&xs, &pj), d, eps);
        if k == 0 {
            value = j.iter().map(|c| c.re).collect();
        }
        partials.push(j.iter().map(|c| c.e1).collect());
    }
    Ok((value, partials))
}

/// Gram–Schmidt on `(∂_t, ∂_ψ, ∂_{u₁}, ∂_{v₁}, …)` with respect to `g`. The
/// columns of the returned matrix are the frame vectors in coordinates.
pub fn adapted_frame(g: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let d = g.nrows();
    let mut e = DMatrix::<f64>::zeros(d, d);
    for k in 0..d {
        let mut v = nalgebra::DVector::<f64>::zeros(d);
        v[k] = 1.0;
        for _ in 0..2 {
            for m in 0..k {
                let em = e.column(m).clone_owned();
                let c = (em.transpose() * g * &v)[(0, 0)];
                v -= em * c;
            }
        }
        let norm2 = (v.transpose() * g * &v)[(0, 0)];
        if !(norm2 > 0.0) {
            return Err(Error::Singular("adapted frame".into()));
        }
        e.set_column(k, &(v / norm2.sqrt()));
    }
    Ok(e)
}

/// `g`-orthogonal projector onto `D = span{∂_t, J∂_t}`, as a column-action
/// matrix in coordinates.
pub fn distribution_projector(point: &ChartPoint, sol: &ProfileSolution) -> Result<DMatrix<f64>> {
    let g = metric_jet(point, sol)?.matrix();
    let j = complex_structure(point, sol)?;
    Ok(projector_for(&g, &j))
}

pub fn projector_for(g: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    let d = g.nrows();
    let mut e0 = nalgebra::DVector::<f64>::zeros(d);
    e0[0] = 1.0;
    let n0 = (e0.transpose() * g * &e0)[(0, 0)].sqrt();
    e0 /= n0;
    let e1 = j * &e0;
    let n1 = (e1.transpose() * g * &e1)[(0, 0)].sqrt();
    let e1 = e1 / n1;
    &e0 * (e0.transpose() * g) + &e1 * (e1.transpose() * g)
}

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::metric::{max_abs, metric_jet, orientation, structure_derivatives, MetricJet};
use super::ChartPoint;
use crate::algebra::CurvatureTensor;
use crate::error::{Error, Result};
use crate::profile::ProfileSolution;

/// Levi-Civita connection coefficients.
#[derive(Debug, Clone)]
pub struct Christoffels {
    pub dim: usize,
    /// `Γᵏ_ij` at `second[(k·d + i)·d + j]`
    pub second: Vec<f64>,
    /// `Γ_kij = g_km Γᵐ_ij`, same layout
    pub first: Vec<f64>,
    pub inverse_metric: DMatrix<f64>,
}

impl Christoffels {
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.second[(k * self.dim + i) * self.dim + j]
    }
}

pub fn christoffels(jet: &MetricJet) -> Result<Christoffels> {
    let d = jet.dim;
    let ginv = jet
        .matrix()
        .try_inverse()
        .ok_or_else(|| Error::Singular("metric".into()))?;
    let mut first = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                first[(k * d + i) * d + j] =
                    0.5 * (jet.dg(j, k, i) + jet.dg(i, k, j) - jet.dg(i, j, k));
            }
        }
    }
    let mut second = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                second[(k * d + i) * d + j] = (0..d)
                    .map(|m| ginv[(k, m)] * first[(m * d + i) * d + j])
                    .sum();
            }
        }
    }
    Ok(Christoffels {
        dim: d,
        second,
        first,
        inverse_metric: ginv,
    })
}

/// `R_ijkl = g(R(∂_i, ∂_j)∂_k, ∂_l)` with `R(X,Y) = [∇_X, ∇_Y] − ∇_[X,Y]`,
/// from the metric and its first two derivatives.
pub fn riemann_from_jet(jet: &MetricJet) -> Result<CurvatureTensor> {
    let d = jet.dim;
    let c = christoffels(jet)?;
    let idx3 = |a: usize, b: usize, e: usize| (a * d + b) * d + e;
    // ∂_i Γ_ljk
    let dfirst = |i: usize, l: usize, j: usize, k: usize| {
        0.5 * (jet.ddg(k, l, j, i) + jet.ddg(j, l, k, i) - jet.ddg(j, k, l, i))
    };
    let mut comps = vec![0.0; d * d * d * d];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut r = dfirst(i, l, j, k) - dfirst(j, l, i, k);
                    for m in 0..d {
                        r -= jet.dg(l, m, i) * c.second[idx3(m, j, k)];
                        r += jet.dg(l, m, j) * c.second[idx3(m, i, k)];
                        r += c.second[idx3(m, j, k)] * c.first[idx3(l, i, m)];
                        r -= c.second[idx3(m, i, k)] * c.first[idx3(l, j, m)];
                    }
                    comps[((i * d + j) * d + k) * d + l] = r;
                }
            }
        }
    }
    Ok(CurvatureTensor::new(d, comps, jet.matrix()))
}

pub fn riemann(point: &ChartPoint, sol: &ProfileSolution) -> Result<CurvatureTensor> {
    riemann_from_jet(&metric_jet(point, sol)?)
}

/// `Σ R(eᵢ, eⱼ, eⱼ, eᵢ)` over an orthonormal basis, i.e. `gⁱˡgʲᵏR_ijkl`.
pub fn ricci_scalar(r: &CurvatureTensor) -> f64 {
    let d = r.dim;
    let ginv = r
        .metric
        .clone()
        .try_inverse()
        .unwrap_or_else(|| DMatrix::from_element(d, d, f64::NAN));
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    s += ginv[(i, l)] * ginv[(j, k)] * r.get(i, j, k, l);
                }
            }
        }
    }
    s
}

pub fn scalar_curvature(point: &ChartPoint, sol: &ProfileSolution) -> Result<f64> {
    Ok(ricci_scalar(&riemann(point, sol)?))
}

/// `(∇_k J)ⁱ_j` at `[(k·d + i)·d + j]`.
pub fn nabla_j(point: &ChartPoint, sol: &ProfileSolution) -> Result<Vec<f64>> {
    nabla_j_with(point, sol, orientation().epsilon)
}

pub(crate) fn nabla_j_with(
    point: &ChartPoint,
    sol: &ProfileSolution,
    eps: f64,
) -> Result<Vec<f64>> {
    let jet = metric_jet(point, sol)?;
    let c = christoffels(&jet)?;
    let (j, dj) = structure_derivatives(point, sol, eps)?;
    let d = jet.dim;
    let mut out = vec![0.0; d * d * d];
    for k in 0..d {
        for i in 0..d {
            for jj in 0..d {
                let mut v = dj[k][i * d + jj];
                for m in 0..d {
                    v += c.get(i, k, m) * j[m * d + jj];
                    v -= c.get(m, k, jj) * j[i * d + m];
                }
                out[(k * d + i) * d + jj] = v;
            }
        }
    }
    Ok(out)
}

/// `(dΩ)_abc` for `Ω(X, Y) = g(JX, Y)`, at `[(a·d + b)·d + c]`.
pub fn d_omega(point: &ChartPoint, sol: &ProfileSolution) -> Result<Vec<f64>> {
    d_omega_with(point, sol, orientation().epsilon)
}

pub(crate) fn d_omega_with(
    point: &ChartPoint,
    sol: &ProfileSolution,
    eps: f64,
) -> Result<Vec<f64>> {
    let jet = metric_jet(point, sol)?;
    let (j, dj) = structure_derivatives(point, sol, eps)?;
    let d = jet.dim;
    // ∂_k Ω_ab = ∂_k(Jᶜ_a g_cb)
    let d_om = |k: usize, a: usize, b: usize| -> f64 {
        (0..d)
            .map(|c| dj[k][c * d + a] * jet.g(c, b) + j[c * d + a] * jet.dg(c, b, k))
            .sum()
    };
    let mut out = vec![0.0; d * d * d];
    for a in 0..d {
        for b in 0..d {
            for c in 0..d {
                out[(a * d + b) * d + c] = d_om(a, b, c) + d_om(b, c, a) + d_om(c, a, b);
            }
        }
    }
    Ok(out)
}

/// Lie-derivative residuals of `g` and `J` along the circle field `∂_ψ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KillingResiduals {
    pub metric: f64,
    pub complex_structure: f64,
}

/// `∂_ψ` has constant components, so `L_{∂_ψ}T` reduces to `∂_ψ T`.
pub fn killing_residuals(point: &ChartPoint, sol: &ProfileSolution) -> Result<KillingResiduals> {
    let jet = metric_jet(point, sol)?;
    let d = jet.dim;
    let lg = (0..d * d)
        .map(|ab| jet.dg[ab * d + 1].abs())
        .fold(0.0, f64::max);
    let (_, dj) = structure_derivatives(point, sol, orientation().epsilon)?;
    Ok(KillingResiduals {
        metric: lg,
        complex_structure: max_abs(&dj[1]),
    })
}

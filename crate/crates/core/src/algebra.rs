//! Pointwise curvature algebra on a real inner-product space with a
//! compatible complex structure.
//!
//! Matrices follow one convention throughout: `g[(a, b)] = g(e_a, e_b)` and
//! `J` acts on column vectors, so `g(JX, Y) = (JX)ᵀ g Y`. Rank-4 tensors are
//! covariant and stored row-major.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative threshold for "this tensor is effectively zero".
pub const DEFAULT_HP_FLOOR: f64 = 1.0;

/// Gram condition numbers above this are treated as singular.
pub const MAX_GRAM_CONDITION: f64 = 1e12;

#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureTensor {
    pub dim: usize,
    pub components: Vec<f64>,
    pub metric: DMatrix<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymmetryResiduals {
    pub antisym_first_pair: f64,
    pub antisym_second_pair: f64,
    pub pair_exchange: f64,
    pub bianchi: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        self.antisym_first_pair
            .max(self.antisym_second_pair)
            .max(self.pair_exchange)
            .max(self.bianchi)
    }
}

#[derive(Serialize, Deserialize)]
struct TensorJson {
    shape: Vec<usize>,
    data: Vec<f64>,
}

fn is_identity(m: &DMatrix<f64>) -> bool {
    let d = m.nrows();
    (0..d).all(|i| (0..d).all(|j| m[(i, j)] == if i == j { 1.0 } else { 0.0 }))
}

/// Applies `ginv` to every index of a covariant tensor of the given rank.
fn raise_all(data: &[f64], d: usize, rank: usize, ginv: &DMatrix<f64>) -> Vec<f64> {
    let mut cur = data.to_vec();
    for slot in 0..rank {
        let stride = d.pow((rank - 1 - slot) as u32);
        let mut next = vec![0.0; cur.len()];
        for (idx, out) in next.iter_mut().enumerate() {
            let a = (idx / stride) % d;
            let base = idx - a * stride;
            *out = (0..d).map(|m| ginv[(a, m)] * cur[base + m * stride]).sum();
        }
        cur = next;
    }
    cur
}

fn metric_inner(a: &[f64], b: &[f64], d: usize, rank: usize, g: &DMatrix<f64>) -> f64 {
    if is_identity(g) {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let ginv = g.clone().try_inverse().expect("metric invertible");
    let raised = raise_all(b, d, rank, &ginv);
    a.iter().zip(&raised).map(|(x, y)| x * y).sum()
}

impl CurvatureTensor {
    pub fn new(dim: usize, components: Vec<f64>, metric: DMatrix<f64>) -> Self {
        assert_eq!(components.len(), dim.pow(4));
        Self {
            dim,
            components,
            metric,
        }
    }

    pub fn zeros(metric: &DMatrix<f64>) -> Self {
        let d = metric.nrows();
        Self::new(d, vec![0.0; d.pow(4)], metric.clone())
    }

    fn from_fn<F: Fn(usize, usize, usize, usize) -> f64>(metric: &DMatrix<f64>, f: F) -> Self {
        let d = metric.nrows();
        let mut c = Vec::with_capacity(d.pow(4));
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    for u in 0..d {
                        c.push(f(x, y, z, u));
                    }
                }
            }
        }
        Self::new(d, c, metric.clone())
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize, k: usize, l: usize) -> f64 {
        let d = self.dim;
        self.components[((i * d + j) * d + k) * d + l]
    }

    /// `T(X, Y, Z, W)` for arbitrary vectors.
    pub fn eval(
        &self,
        x: &DVector<f64>,
        y: &DVector<f64>,
        z: &DVector<f64>,
        w: &DVector<f64>,
    ) -> f64 {
        let d = self.dim;
        let mut s = 0.0;
        for i in 0..d {
            if x[i] == 0.0 {
                continue;
            }
            for j in 0..d {
                if y[j] == 0.0 {
                    continue;
                }
                for k in 0..d {
                    if z[k] == 0.0 {
                        continue;
                    }
                    for l in 0..d {
                        s += x[i] * y[j] * z[k] * w[l] * self.get(i, j, k, l);
                    }
                }
            }
        }
        s
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(
            self.dim,
            self.components.iter().map(|c| c * s).collect(),
            self.metric.clone(),
        )
    }

    /// `self + s·other`
    pub fn add_scaled(&self, other: &Self, s: f64) -> Self {
        Self::new(
            self.dim,
            self.components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a + s * b)
                .collect(),
            self.metric.clone(),
        )
    }

    pub fn max_norm(&self) -> f64 {
        self.components.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Full contraction `⟨A, B⟩ = A_ijkl B^ijkl` using the stored metric.
    pub fn inner(&self, other: &Self) -> f64 {
        metric_inner(
            &self.components,
            &other.components,
            self.dim,
            4,
            &self.metric,
        )
    }

    pub fn frobenius(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// Components in the frame whose coordinate vectors are the columns of
    /// `frame`. The metric becomes `frameᵀ g frame`.
    pub fn in_frame(&self, frame: &DMatrix<f64>) -> Self {
        let d = self.dim;
        let mut cur = self.components.clone();
        for slot in 0..4 {
            let stride = d.pow(3 - slot as u32);
            let mut next = vec![0.0; cur.len()];
            for (idx, out) in next.iter_mut().enumerate() {
                let a = (idx / stride) % d;
                let base = idx - a * stride;
                *out = (0..d).map(|m| frame[(m, a)] * cur[base + m * stride]).sum();
            }
            cur = next;
        }
        Self::new(d, cur, frame.transpose() * &self.metric * frame)
    }

    /// Algebraic curvature symmetries, each relative to the max norm.
    pub fn symmetry_residuals(&self) -> SymmetryResiduals {
        let d = self.dim;
        let scale = self.max_norm().max(f64::MIN_POSITIVE);
        let mut r = SymmetryResiduals {
            antisym_first_pair: 0.0,
            antisym_second_pair: 0.0,
            pair_exchange: 0.0,
            bianchi: 0.0,
        };
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    for l in 0..d {
                        let v = self.get(i, j, k, l);
                        r.antisym_first_pair =
                            r.antisym_first_pair.max((v + self.get(j, i, k, l)).abs());
                        r.antisym_second_pair =
                            r.antisym_second_pair.max((v + self.get(i, j, l, k)).abs());
                        r.pair_exchange = r.pair_exchange.max((v - self.get(k, l, i, j)).abs());
                        r.bianchi = r
                            .bianchi
                            .max((v + self.get(j, k, i, l) + self.get(k, i, j, l)).abs());
                    }
                }
            }
        }
        r.antisym_first_pair /= scale;
        r.antisym_second_pair /= scale;
        r.pair_exchange /= scale;
        r.bianchi /= scale;
        r
    }

    /// `max |T(JX, JY, Z, W) − T(X, Y, Z, W)|` over basis vectors, relative
    /// to the max norm.
    pub fn j_invariance_residual(&self, j: &DMatrix<f64>) -> f64 {
        let d = self.dim;
        let scale = self.max_norm().max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for x in 0..d {
            for y in 0..d {
                for z in 0..d {
                    for w in 0..d {
                        let mut s = 0.0;
                        for a in 0..d {
                            if j[(a, x)] == 0.0 {
                                continue;
                            }
                            for b in 0..d {
                                s += j[(a, x)] * j[(b, y)] * self.get(a, b, z, w);
                            }
                        }
                        worst = worst.max((s - self.get(x, y, z, w)).abs());
                    }
                }
            }
        }
        worst / scale
    }

    pub fn to_json(&self) -> serde_json::Value {
        let d = self.dim;
        serde_json::to_value(TensorJson {
            shape: vec![d, d, d, d],
            data: self.components.clone(),
        })
        .expect("serializable")
    }

    pub fn from_json(v: &serde_json::Value, metric: DMatrix<f64>) -> Result<Self> {
        let t: TensorJson =
            serde_json::from_value(v.clone()).map_err(|e| Error::Config(e.to_string()))?;
        let d = metric.nrows();
        if t.shape != [d, d, d, d] || t.data.len() != d.pow(4) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: t.shape.first().copied().unwrap_or(0),
            });
        }
        Ok(Self::new(d, t.data, metric))
    }
}

/// `gj[(a, b)] = g(J e_a, e_b)`
fn j_form(g: &DMatrix<f64>, j: &DMatrix<f64>) -> DMatrix<f64> {
    j.transpose() * g
}

fn check_compatible(g: &DMatrix<f64>, j: &DMatrix<f64>) -> Result<()> {
    let d = g.nrows();
    if j.nrows() != d || j.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: j.nrows(),
        });
    }
    let scale = g.amax().max(1.0);
    let jj = j * j + DMatrix::<f64>::identity(d, d);
    let compat = j.transpose() * g * j - g;
    if jj.amax() > 1e-9 || compat.amax() > 1e-9 * scale {
        return Err(Error::Config(
            "J is not a g-compatible complex structure".into(),
        ));
    }
    Ok(())
}

/// The Kähler tensor of constant holomorphic sectional curvature 1.
pub fn pi_tensor(g: &DMatrix<f64>, j: &DMatrix<f64>) -> Result<CurvatureTensor> {
    check_compatible(g, j)?;
    let gj = j_form(g, j);
    Ok(CurvatureTensor::from_fn(g, |x, y, z, u| {
        0.25 * (g[(y, z)] * g[(x, u)] - g[(x, z)] * g[(y, u)] + gj[(y, z)] * gj[(x, u)]
            - gj[(x, z)] * gj[(y, u)]
            - 2.0 * gj[(x, y)] * gj[(z, u)])
    }))
}

/// `(g_D, ω)` for a projector `p_D`: `g_D = g∘(p_D × p_D)`, `ω(X, Y) = g_D(JX, Y)`.
pub fn distribution_forms(
    g: &DMatrix<f64>,
    j: &DMatrix<f64>,
    p_d: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let gd = p_d.transpose() * g * p_d;
    let omega = j.transpose() * &gd;
    (gd, omega)
}

pub fn phi_tensor(
    g: &DMatrix<f64>,
    j: &DMatrix<f64>,
    gd: &DMatrix<f64>,
    omega: &DMatrix<f64>,
) -> Result<CurvatureTensor> {
    check_compatible(g, j)?;
    let ginv = g
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("metric".into()))?;
    let scale = gd.amax().max(1e-300);
    if (gd - gd.transpose()).amax() > 1e-9 * scale
        || (gd * &ginv * gd - gd).amax() > 1e-9 * scale.max(1.0)
    {
        return Err(Error::Config(
            "g_D is not a projector-compressed metric".into(),
        ));
    }
    let gj = j_form(g, j);
    let h = gd;
    let w = omega;
    Ok(CurvatureTensor::from_fn(g, |x, y, z, u| {
        0.125
            * (g[(y, z)] * h[(x, u)] - g[(x, z)] * h[(y, u)] + g[(x, u)] * h[(y, z)]
                - g[(y, u)] * h[(x, z)]
                + gj[(y, z)] * w[(x, u)]
                - gj[(x, z)] * w[(y, u)]
                + gj[(x, u)] * w[(y, z)]
                - gj[(y, u)] * w[(x, z)]
                - 2.0 * gj[(x, y)] * w[(z, u)]
                - 2.0 * gj[(z, u)] * w[(x, y)])
    }))
}

pub fn psi_tensor(g: &DMatrix<f64>, omega: &DMatrix<f64>) -> CurvatureTensor {
    CurvatureTensor::from_fn(g, |x, y, z, u| -omega[(x, y)] * omega[(z, u)])
}

/// Rank-6 result of a curvature operator acting as a derivation, indexed
/// `(X, Y; Z₁, Z₂, Z₃, Z₄)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedSixTensor {
    pub dim: usize,
    pub components: Vec<f64>,
    pub metric: DMatrix<f64>,
}

impl DerivedSixTensor {
    #[inline]
    pub fn get(&self, idx: [usize; 6]) -> f64 {
        let d = self.dim;
        self.components[idx.iter().fold(0, |acc, &i| acc * d + i)]
    }

    pub fn max_norm(&self) -> f64 {
        self.components.iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    pub fn inner(&self, other: &Self) -> f64 {
        metric_inner(
            &self.components,
            &other.components,
            self.dim,
            6,
            &self.metric,
        )
    }

    pub fn frobenius(&self) -> f64 {
        self.inner(self).max(0.0).sqrt()
    }

    /// `self − s·other`
    pub fn sub_scaled(&self, other: &Self, s: f64) -> Self {
        Self {
            dim: self.dim,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| a - s * b)
                .collect(),
            metric: self.metric.clone(),
        }
    }
}

/// `(T.S)(X, Y; Z₁…Z₄) = −Σᵢ S(Z₁, …, T(X, Y)Zᵢ, …, Z₄)` with the
/// endomorphism `T(X, Y)` obtained from `T(X, Y, Z, W) = g(T(X, Y)Z, W)`.
pub fn derivation_action(t: &CurvatureTensor, s: &CurvatureTensor) -> Result<DerivedSixTensor> {
    let d = t.dim;
    if s.dim != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: s.dim,
        });
    }
    let ginv = t
        .metric
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Singular("metric".into()))?;
    let d2 = d * d;
    let d4 = d2 * d2;
    let mut out = vec![0.0; d4 * d2];
    let mut endo = vec![0.0; d2];
    for x in 0..d {
        for y in 0..d {
            // endo[m·d + a] = (T(X, Y) e_a)^m
            for a in 0..d {
                for m in 0..d {
                    endo[m * d + a] = (0..d).map(|w| t.get(x, y, a, w) * ginv[(w, m)]).sum();
                }
            }
            let block = &mut out[(x * d + y) * d4..(x * d + y + 1) * d4];
            for z1 in 0..d {
                for z2 in 0..d {
                    for z3 in 0..d {
                        for z4 in 0..d {
                            let mut acc = 0.0;
                            for m in 0..d {
                                acc += endo[m * d + z1] * s.get(m, z2, z3, z4)
                                    + endo[m * d + z2] * s.get(z1, m, z3, z4)
                                    + endo[m * d + z3] * s.get(z1, z2, m, z4)
                                    + endo[m * d + z4] * s.get(z1, z2, z3, m);
                            }
                            block[((z1 * d + z2) * d + z3) * d + z4] = -acc;
                        }
                    }
                }
            }
        }
    }
    Ok(DerivedSixTensor {
        dim: d,
        components: out,
        metric: t.metric.clone(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HpResidual {
    pub residual: f64,
    /// `‖R.R‖`
    pub rr_norm: f64,
    /// `‖Π.R‖`
    pub pir_norm: f64,
}

/// `‖R.R − φ Π.R‖ / max(‖R.R‖, ‖φ Π.R‖, floor)` in the metric Frobenius norm.
pub fn hp_residual(
    r: &CurvatureTensor,
    pi: &CurvatureTensor,
    phi: f64,
    floor: f64,
) -> Result<HpResidual> {
    let rr = derivation_action(r, r)?;
    let pir = derivation_action(pi, r)?;
    let rr_norm = rr.frobenius();
    let pir_norm = pir.frobenius();
    let diff = rr.sub_scaled(&pir, phi).frobenius();
    let denom = rr_norm.max(phi.abs() * pir_norm).max(floor);
    Ok(HpResidual {
        residual: diff / denom,
        rr_norm,
        pir_norm,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QchFit {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    /// `‖R − aΠ − bΦ − cΨ‖ / ‖R‖`
    pub residual: f64,
    pub gram_condition: f64,
}

impl QchFit {
    /// The law `K(X) = a + b s + c s²` with `s = |X_D|²/|X|²`.
    pub fn law(&self, s: f64) -> f64 {
        self.a + self.b * s + self.c * s * s
    }
}

/// Least-squares projection of `R` onto `span{Π, Φ, Ψ}` via the 3×3 Gram
/// system of Frobenius inner products.
pub fn qch_fit(
    r: &CurvatureTensor,
    pi: &CurvatureTensor,
    phi: &CurvatureTensor,
    psi: &CurvatureTensor,
) -> Result<QchFit> {
    for t in [pi, phi, psi] {
        if t.dim != r.dim {
            return Err(Error::DimensionMismatch {
                expected: r.dim,
                got: t.dim,
            });
        }
    }
    let basis = [pi, phi, psi];
    let mut gram = Matrix3::<f64>::zeros();
    let mut rhs = Vector3::<f64>::zeros();
    for i in 0..3 {
        for j in i..3 {
            let v = basis[i].inner(basis[j]);
            gram[(i, j)] = v;
            gram[(j, i)] = v;
        }
        rhs[i] = basis[i].inner(r);
    }
    let eig = gram.symmetric_eigenvalues();
    let (lo, hi) = (eig.min(), eig.max());
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if !(condition <= MAX_GRAM_CONDITION) {
        return Err(Error::DegenerateGram { condition });
    }
    let coef = gram
        .cholesky()
        .ok_or(Error::DegenerateGram { condition })?
        .solve(&rhs);
    let resid = r
        .add_scaled(pi, -coef[0])
        .add_scaled(phi, -coef[1])
        .add_scaled(psi, -coef[2]);
    let rn = r.frobenius();
    let residual = if rn > 0.0 {
        resid.frobenius() / rn
    } else {
        resid.frobenius()
    };
    Ok(QchFit {
        a: coef[0],
        b: coef[1],
        c: coef[2],
        residual,
        gram_condition: condition,
    })
}

/// `K(X) = R(X, JX, JX, X)/g(X, X)²`.
pub fn holomorphic_sectional_curvature(
    r: &CurvatureTensor,
    g: &DMatrix<f64>,
    j: &DMatrix<f64>,
    x: &DVector<f64>,
) -> Result<f64> {
    let n2 = (x.transpose() * g * x)[(0, 0)];
    if !(n2 > 0.0) {
        return Err(Error::ZeroVector);
    }
    let jx = j * x;
    Ok(r.eval(x, &jx, &jx, x) / (n2 * n2))
}

/// `max |K(X) − (a + b s + c s²)|` over the supplied directions.
pub fn probe_qch_law(
    r: &CurvatureTensor,
    g: &DMatrix<f64>,
    j: &DMatrix<f64>,
    p_d: &DMatrix<f64>,
    fit: &QchFit,
    directions: &[DVector<f64>],
) -> Result<f64> {
    let mut worst = 0.0f64;
    for x in directions {
        let k = holomorphic_sectional_curvature(r, g, j, x)?;
        let px = p_d * x;
        let s = (px.transpose() * g * &px)[(0, 0)] / (x.transpose() * g * x)[(0, 0)];
        worst = worst.max((k - fit.law(s)).abs());
    }
    Ok(worst)
}

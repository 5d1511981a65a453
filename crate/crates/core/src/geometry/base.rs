use crate::autodiff::Real;

/// Fubini–Study data on the affine chart of `ℂPⁿ⁻¹`, for the potential
/// `log(1 + |w|²)` (holomorphic sectional curvature 4).
#[derive(Debug, Clone)]
pub struct BaseData<S> {
    /// Real metric, `2m × 2m`, row-major, ordering `(u₁, v₁, u₂, v₂, …)`.
    pub metric: Vec<S>,
    /// Kähler form `ω(X, Y) = g(J₀X, Y)`, same layout.
    pub kahler_form: Vec<S>,
}

/// Standard complex structure `J₀∂_u = ∂_v` as a column-action matrix entry:
/// `(J₀)ᵐ_k`.
pub(crate) fn j0(m: usize, k: usize) -> f64 {
    if m == k + 1 && k.is_multiple_of(2) {
        1.0
    } else if k == m + 1 && m.is_multiple_of(2) {
        -1.0
    } else {
        0.0
    }
}

fn rho<S: Real>(w: &[S]) -> S {
    w.iter().fold(S::cst(1.0), |acc, &x| acc + x * x)
}

pub fn fubini_study<S: Real>(w: &[S]) -> BaseData<S> {
    let m2 = w.len();
    let m = m2 / 2;
    let inv = rho(w).recip();
    let inv2 = inv * inv;
    let mut metric = vec![S::cst(0.0); m2 * m2];
    for a in 0..m {
        let (ua, va) = (w[2 * a], w[2 * a + 1]);
        for b in 0..m {
            let (ub, vb) = (w[2 * b], w[2 * b + 1]);
            let delta = if a == b { inv } else { S::cst(0.0) };
            let re = delta - (ua * ub + va * vb) * inv2;
            let im = -(ua * vb - va * ub) * inv2;
            metric[2 * a * m2 + 2 * b] = re;
            metric[2 * a * m2 + 2 * b + 1] = im;
            metric[(2 * a + 1) * m2 + 2 * b] = -im;
            metric[(2 * a + 1) * m2 + 2 * b + 1] = re;
        }
    }
    let mut kahler_form = vec![S::cst(0.0); m2 * m2];
    for i in 0..m2 {
        for j in 0..m2 {
            let mut acc = S::cst(0.0);
            for k in 0..m2 {
                let c = j0(k, i);
                if c != 0.0 {
                    acc = acc + metric[k * m2 + j] * c;
                }
            }
            kahler_form[i * m2 + j] = acc;
        }
    }
    BaseData {
        metric,
        kahler_form,
    }
}

/// Local connection potential `A = (i/2)(∂̄ − ∂)log(1 + |w|²)`, which in real
/// coordinates is `Σ (u_a dv_a − v_a du_a)/(1 + |w|²)` and satisfies
/// `dA = 2ω_FS`.
pub fn connection_one_form<S: Real>(w: &[S]) -> Vec<S> {
    let inv = rho(w).recip();
    let mut a = vec![S::cst(0.0); w.len()];
    for k in 0..w.len() / 2 {
        a[2 * k] = -(w[2 * k + 1] * inv);
        a[2 * k + 1] = w[2 * k] * inv;
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd<F: Fn(&[f64]) -> f64>(f: F, x: &[f64], i: usize, h: f64) -> f64 {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        let mut xpp = x.to_vec();
        let mut xmm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        xpp[i] += 2.0 * h;
        xmm[i] -= 2.0 * h;
        (8.0 * (f(&xp) - f(&xm)) - (f(&xpp) - f(&xmm))) / (12.0 * h)
    }

    #[test]
    fn identity_at_origin() {
        let b = fubini_study(&[0.0; 4]);
        for i in 0..4 {
            for j in 0..4 {
                let e = if i == j { 1.0 } else { 0.0 };
                assert_eq!(b.metric[i * 4 + j], e);
            }
        }
        assert!(connection_one_form(&[0.0; 4]).iter().all(|&a| a == 0.0));
    }

    #[test]
    fn metric_symmetric_and_hermitian() {
        let w = [0.3, -0.2, 0.5, 0.1];
        let b = fubini_study(&w);
        for i in 0..4 {
            for j in 0..4 {
                assert!((b.metric[i * 4 + j] - b.metric[j * 4 + i]).abs() < 1e-15);
                // g(J₀X, J₀Y) = g(X, Y)
                let mut gjj = 0.0;
                for k in 0..4 {
                    for l in 0..4 {
                        gjj += j0(k, i) * j0(l, j) * b.metric[k * 4 + l];
                    }
                }
                assert!((gjj - b.metric[i * 4 + j]).abs() < 1e-15);
                assert!((b.kahler_form[i * 4 + j] + b.kahler_form[j * 4 + i]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn connection_curvature_is_twice_kahler_form() {
        for w in [[0.3, -0.2, 0.5, 0.1], [-0.6, 0.4, 0.0, -0.7]] {
            let omega = fubini_study(&w).kahler_form;
            for i in 0..4 {
                for j in 0..4 {
                    // (dA)_ij = ∂_i A_j − ∂_j A_i
                    let di = fd(|x| connection_one_form(x)[j], &w, i, 1e-3);
                    let dj = fd(|x| connection_one_form(x)[i], &w, j, 1e-3);
                    assert!(
                        (di - dj - 2.0 * omega[i * 4 + j]).abs() < 1e-9,
                        "({i},{j}) {} vs {}",
                        di - dj,
                        2.0 * omega[i * 4 + j]
                    );
                }
            }
        }
    }

    #[test]
    fn kahler_form_closed() {
        let w = [0.2, 0.4, -0.3, 0.25];
        for (i, j, k) in [(0, 1, 2), (0, 2, 3), (1, 2, 3), (0, 1, 3)] {
            let f = |a: usize, b: usize| move |x: &[f64]| fubini_study(x).kahler_form[a * 4 + b];
            let d = fd(f(j, k), &w, i, 1e-3) + fd(f(k, i), &w, j, 1e-3) + fd(f(i, j), &w, k, 1e-3);
            assert!(d.abs() < 1e-9, "dω = {d}");
        }
    }

    #[test]
    fn connection_radially_symmetric() {
        let r: f64 = 0.8;
        let norms: Vec<f64> = (0..8)
            .map(|k| {
                let th = k as f64 * 0.7;
                let a = connection_one_form(&[r * th.cos(), r * th.sin()]);
                a[0].hypot(a[1])
            })
            .collect();
        for v in &norms {
            assert!((v - norms[0]).abs() < 1e-15);
        }
    }
}

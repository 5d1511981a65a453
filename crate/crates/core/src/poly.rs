//! Dense real polynomials and exact root counting.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

/// Coefficients in ascending degree: `coeffs[k]` multiplies `t^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<f64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| k as f64 * c)
                .collect(),
        )
    }

    /// Drops the constant term and shifts down: `(p(t) - p(0)) / t`.
    pub fn shift_down(&self) -> Polynomial {
        if self.coeffs.len() == 1 {
            return Polynomial::new(vec![0.0]);
        }
        Polynomial::new(self.coeffs[1..].to_vec())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![0.0; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }

    /// Exact rational image of the (binary floating point) coefficients.
    pub fn to_rational(&self) -> Vec<BigRational> {
        self.coeffs
            .iter()
            .map(|&c| BigRational::from_float(c).unwrap_or_else(BigRational::zero))
            .collect()
    }
}

fn trim(p: &mut Vec<BigRational>) {
    while p.len() > 1 && p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn rational_eval(p: &[BigRational], x: &BigRational) -> BigRational {
    p.iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + c)
}

fn rational_derivative(p: &[BigRational]) -> Vec<BigRational> {
    if p.len() <= 1 {
        return vec![BigRational::zero()];
    }
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * BigRational::from_integer(BigInt::from(k)))
        .collect()
}

/// Remainder of `num` divided by `den` (den must have a nonzero leading term).
fn rational_rem(num: &[BigRational], den: &[BigRational]) -> Vec<BigRational> {
    let mut r = num.to_vec();
    trim(&mut r);
    let dd = den.len() - 1;
    let lead = den[dd].clone();
    while !(r.len() == 1 && r[0].is_zero()) && r.len() > dd {
        let shift = r.len() - 1 - dd;
        let q = r[r.len() - 1].clone() / &lead;
        for (k, c) in den.iter().enumerate() {
            r[shift + k] -= &q * c;
        }
        r.pop();
        if r.is_empty() {
            r.push(BigRational::zero());
        }
        trim(&mut r);
    }
    r
}

/// Divides by `(x - root)`, returning the quotient and discarding the remainder.
pub fn rational_deflate(p: &[BigRational], root: &BigRational) -> Vec<BigRational> {
    let n = p.len();
    if n <= 1 {
        return vec![BigRational::zero()];
    }
    let mut q = vec![BigRational::zero(); n - 1];
    let mut carry = BigRational::zero();
    for k in (1..n).rev() {
        carry = &p[k] + carry * root;
        q[k - 1] = carry.clone();
    }
    q
}

fn sign_changes(seq: &[Vec<BigRational>], x: &BigRational) -> usize {
    let mut changes = 0;
    let mut last = 0i8;
    for p in seq {
        let v = rational_eval(p, x);
        let s = if v.is_zero() {
            0
        } else if v.is_positive() {
            1
        } else {
            -1
        };
        if s != 0 {
            if last != 0 && s != last {
                changes += 1;
            }
            last = s;
        }
    }
    changes
}

/// Number of distinct real roots of `p` in the half-open interval `(a, b]`,
/// counted exactly with a Sturm sequence. Multiple roots count once.
pub fn count_distinct_roots(p: &[BigRational], a: &BigRational, b: &BigRational) -> usize {
    let mut p0 = p.to_vec();
    trim(&mut p0);
    if p0.len() <= 1 {
        return 0;
    }
    let mut seq = vec![p0.clone(), rational_derivative(&p0)];
    loop {
        let n = seq.len();
        let r = rational_rem(&seq[n - 2], &seq[n - 1]);
        if r.len() == 1 && r[0].is_zero() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
        if seq.last().map(|p| p.len()) == Some(1) {
            break;
        }
    }
    let va = sign_changes(&seq, a);
    let vb = sign_changes(&seq, b);
    va.saturating_sub(vb)
}

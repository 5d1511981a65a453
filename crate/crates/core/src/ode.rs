//! Dormand–Prince 5(4) integrator with Hairer's continuous extension.
//!
//! Each accepted step keeps its interpolation coefficients, so the
//! trajectory can be evaluated anywhere inside its span at the accuracy of
//! the method. An optional scalar event function is monitored for a sign
//! change from positive to non-positive; the crossing is refined on the
//! dense output and integration stops there.

use crate::error::{Error, Result};

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            rtol: 1e-12,
            atol: 1e-12,
            max_steps: 1_000_000,
        }
    }
}

/// One accepted step and the data needed to interpolate inside it.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    pub t0: f64,
    pub h: f64,
    pub y0: [f64; N],
    pub y1: [f64; N],
    rcont: [[f64; N]; 4],
}

impl<const N: usize> DenseStep<N> {
    pub fn t1(&self) -> f64 {
        self.t0 + self.h
    }

    pub fn interpolate(&self, t: f64) -> [f64; N] {
        let theta = (t - self.t0) / self.h;
        let theta1 = 1.0 - theta;
        let [r2, r3, r4, r5] = &self.rcont;
        let mut y = [0.0; N];
        for i in 0..N {
            y[i] =
                self.y0[i] + theta * (r2[i] + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
        }
        y
    }

    fn contains(&self, t: f64) -> bool {
        let (lo, hi) = if self.h > 0.0 {
            (self.t0, self.t1())
        } else {
            (self.t1(), self.t0)
        };
        t >= lo && t <= hi
    }
}

/// Piecewise dense trajectory produced by [`integrate`].
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub steps: Vec<DenseStep<N>>,
    /// Time of the detected event, if any. The trajectory ends there.
    pub event: Option<f64>,
    pub t_start: f64,
    pub t_end: f64,
}

impl<const N: usize> Trajectory<N> {
    pub fn eval(&self, t: f64) -> Option<[f64; N]> {
        let forward = self.t_end >= self.t_start;
        let inside = if forward {
            t >= self.t_start && t <= self.t_end
        } else {
            t <= self.t_start && t >= self.t_end
        };
        if !inside || self.steps.is_empty() {
            return None;
        }
        let idx = self
            .steps
            .partition_point(|s| if forward { s.t1() < t } else { s.t1() > t });
        let step = &self.steps[idx.min(self.steps.len() - 1)];
        debug_assert!(step.contains(t) || idx >= self.steps.len() - 1);
        Some(step.interpolate(t))
    }
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates `y' = rhs(y)` (autonomous) from `(t0, y0)` towards `t_end`.
///
/// `on_step` is called after every accepted step with the new state and may
/// abort integration by returning an error. `event`, when given, stops the
/// integration at the first crossing from `> 0` to `<= 0`.
pub fn integrate<const N: usize, F, G, S>(
    rhs: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctl: &StepControl,
    event: Option<G>,
    mut on_step: S,
) -> Result<Trajectory<N>>
where
    F: Fn(&[f64; N]) -> [f64; N],
    G: Fn(&[f64; N]) -> f64,
    S: FnMut(f64, &[f64; N]) -> Result<()>,
{
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let span = (t_end - t0).abs();
    let mut h = dir * (1e-3f64).min(span);
    let mut t = t0;
    let mut y = y0;
    let mut k1 = rhs(&y);
    let mut steps = Vec::new();
    let mut g_prev = event.as_ref().map(|g| g(&y));

    for _ in 0..ctl.max_steps {
        if (t_end - t) * dir <= 0.0 {
            return Ok(Trajectory {
                steps,
                event: None,
                t_start: t0,
                t_end: t,
            });
        }
        if (t + h - t_end) * dir > 0.0 {
            h = t_end - t;
        }
        if h.abs() < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepUnderflow { t });
        }

        let k2 = rhs(&axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(&axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(&axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(&axpy(
            &y,
            h,
            &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
        ));
        let k6 = rhs(&axpy(
            &y,
            h,
            &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
        ));
        let y1 = axpy(
            &y,
            h,
            &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
        );
        let k7 = rhs(&y1);

        let mut err = 0.0;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = ctl.atol + ctl.rtol * y[i].abs().max(y1[i].abs());
            err += (e / sc) * (e / sc);
        }
        let err = (err / N as f64).sqrt();

        if err <= 1.0 {
            let mut rcont = [[0.0; N]; 4];
            for i in 0..N {
                let ydiff = y1[i] - y[i];
                let bspl = h * k1[i] - ydiff;
                rcont[0][i] = ydiff;
                rcont[1][i] = bspl;
                rcont[2][i] = ydiff - h * k7[i] - bspl;
                rcont[3][i] = h
                    * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            }
            let step = DenseStep {
                t0: t,
                h,
                y0: y,
                y1,
                rcont,
            };

            if let (Some(g), Some(gp)) = (event.as_ref(), g_prev) {
                let g1 = g(&y1);
                if gp > 0.0 && g1 <= 0.0 {
                    let te = refine_event(&step, g, gp, g1);
                    steps.push(step);
                    let ye = steps.last().map(|s| s.interpolate(te)).unwrap_or(y1);
                    on_step(te, &ye)?;
                    return Ok(Trajectory {
                        steps,
                        event: Some(te),
                        t_start: t0,
                        t_end: te,
                    });
                }
                g_prev = Some(g1);
            }

            t += h;
            y = y1;
            k1 = k7;
            steps.push(step);
            on_step(t, &y)?;
        }

        let fac = if err == 0.0 {
            10.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 10.0)
        };
        h *= fac;
    }
    Err(Error::StepUnderflow { t })
}

/// Illinois-modified regula falsi on the dense output of one step.
fn refine_event<const N: usize, G>(step: &DenseStep<N>, g: &G, g0: f64, g1: f64) -> f64
where
    G: Fn(&[f64; N]) -> f64,
{
    let (mut a, mut b) = (step.t0, step.t1());
    let (mut ga, mut gb) = (g0, g1);
    if gb == 0.0 {
        return b;
    }
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * gb - b * ga) / (gb - ga);
        let c = if c.is_finite() && (c - a) * (c - b) <= 0.0 {
            c
        } else {
            0.5 * (a + b)
        };
        let gc = g(&step.interpolate(c));
        if gc == 0.0 || (b - a).abs() <= 4.0 * f64::EPSILON * c.abs().max(1.0) {
            return c;
        }
        if (gc > 0.0) == (ga > 0.0) {
            a = c;
            ga = gc;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            b = c;
            gb = gc;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    0.5 * (a + b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn harmonic(y: &[f64; 2]) -> [f64; 2] {
        [y[1], -y[0]]
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let ctl = StepControl::default();
        let traj = integrate(
            harmonic,
            0.0,
            [0.0, 1.0],
            3.0,
            &ctl,
            None::<fn(&[f64; 2]) -> f64>,
            |_, _| Ok(()),
        )
        .unwrap();
        for k in 0..=300 {
            let t = 0.01 * k as f64;
            let y = traj.eval(t).unwrap();
            assert!(
                (y[0] - t.sin()).abs() < 1e-10,
                "t={t} err={}",
                y[0] - t.sin()
            );
            assert!((y[1] - t.cos()).abs() < 1e-10);
        }
    }

    #[test]
    fn event_stops_at_first_crossing() {
        let ctl = StepControl::default();
        let traj = integrate(
            harmonic,
            0.0,
            [0.0, 1.0],
            10.0,
            &ctl,
            Some(|y: &[f64; 2]| y[1]),
            |_, _| Ok(()),
        )
        .unwrap();
        let te = traj.event.unwrap();
        assert!((te - std::f64::consts::FRAC_PI_2).abs() < 1e-11);
        assert_eq!(traj.t_end, te);
    }

    #[test]
    fn backward_integration() {
        let ctl = StepControl::default();
        let traj = integrate(
            harmonic,
            0.0,
            [0.0, 1.0],
            -1.0,
            &ctl,
            None::<fn(&[f64; 2]) -> f64>,
            |_, _| Ok(()),
        )
        .unwrap();
        let y = traj.eval(-0.6).unwrap();
        assert!((y[0] - (-0.6f64).sin()).abs() < 1e-11);
        assert!(traj.eval(0.1).is_none());
    }
}

//! Embedded Dormand–Prince 5(4) integrator for complex state vectors on a
//! real time axis, with PI step-size control and the fourth-order
//! continuous extension for sampling at prescribed times.

use num_complex::Complex64;

use super::trajectory::{StepStats, Trajectory};
use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

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

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;
const BETA: f64 = 0.04;
/// Steps shorter than this fraction of the horizon abort the run.
pub const UNDERFLOW_FRACTION: f64 = 1e-12;

/// Adaptive integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub tol: f64,
    pub max_steps: usize,
}

impl Integrator {
    pub fn new(tol: f64) -> Result<Self> {
        if !(1e-14..=1e-3).contains(&tol) {
            return Err(Error::InvalidTolerance(format!(
                "tol = {tol:e} outside [1e-14, 1e-3]"
            )));
        }
        Ok(Integrator {
            tol,
            max_steps: 5_000_000,
        })
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    /// Integrates from `t = 0` to `t_end`, recording every accepted step.
    pub fn integrate<F>(&self, rhs: F, y0: &[Complex64], t_end: f64) -> Result<Trajectory>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
    {
        self.run(rhs, y0, t_end, None)
    }

    /// Integrates from `t = 0` to `t_end` and records the state only at
    /// `samples` (sorted, within `[0, t_end]`), via dense output.
    pub fn integrate_sampled<F>(
        &self,
        rhs: F,
        y0: &[Complex64],
        t_end: f64,
        samples: &[f64],
    ) -> Result<Trajectory>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
    {
        if samples.windows(2).any(|w| w[1] <= w[0])
            || samples.iter().any(|&s| !(0.0..=t_end).contains(&s))
        {
            return Err(Error::Invalid(
                "sample times must be strictly increasing within [0, t_end]".into(),
            ));
        }
        self.run(rhs, y0, t_end, Some(samples))
    }

    fn run<F>(
        &self,
        mut rhs: F,
        y0: &[Complex64],
        t_end: f64,
        samples: Option<&[f64]>,
    ) -> Result<Trajectory>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
    {
        if !(t_end > 0.0 && t_end.is_finite()) {
            return Err(Error::Invalid(format!("t_end = {t_end} must be positive")));
        }
        let dim = y0.len();
        let zero = Complex64::new(0.0, 0.0);
        let mut stats = StepStats::default();
        let mut traj = Trajectory::default();

        let mut sample_iter = samples.map(|s| s.iter().copied().peekable());
        match sample_iter.as_mut() {
            None => traj.push(0.0, y0.to_vec()),
            Some(it) => {
                while let Some(&s) = it.peek() {
                    if s > 0.0 {
                        break;
                    }
                    traj.push(s, y0.to_vec());
                    it.next();
                }
            }
        }

        let mut y = y0.to_vec();
        let mut k1 = vec![zero; dim];
        let mut k2 = vec![zero; dim];
        let mut k3 = vec![zero; dim];
        let mut k4 = vec![zero; dim];
        let mut k5 = vec![zero; dim];
        let mut k6 = vec![zero; dim];
        let mut k7 = vec![zero; dim];
        let mut tmp = vec![zero; dim];
        let mut y_new = vec![zero; dim];

        rhs(0.0, &y, &mut k1)?;
        stats.rhs_evals += 1;
        let mut h = self.initial_step(&mut rhs, &y, &k1, t_end, &mut stats)?;
        let h_min = UNDERFLOW_FRACTION * t_end;
        let mut t = 0.0;
        let mut fac_old: f64 = 1e-4;
        let mut last_rejected = false;

        while t < t_end {
            if stats.accepted + stats.rejected >= self.max_steps {
                return Err(Error::Invalid(format!(
                    "step budget of {} exhausted at t = {t}",
                    self.max_steps
                )));
            }
            if h < h_min {
                return Err(Error::StepSizeUnderflow { t, h });
            }
            let last = t + h >= t_end;
            if last {
                h = t_end - t;
            }

            stage(&mut tmp, &y, h, &[(A21, &k1)]);
            rhs(t + C2 * h, &tmp, &mut k2)?;
            stage(&mut tmp, &y, h, &[(A31, &k1), (A32, &k2)]);
            rhs(t + C3 * h, &tmp, &mut k3)?;
            stage(&mut tmp, &y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]);
            rhs(t + C4 * h, &tmp, &mut k4)?;
            stage(&mut tmp, &y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]);
            rhs(t + C5 * h, &tmp, &mut k5)?;
            stage(
                &mut tmp,
                &y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            );
            rhs(t + h, &tmp, &mut k6)?;
            stage(
                &mut y_new,
                &y,
                h,
                &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
            );
            rhs(t + h, &y_new, &mut k7)?;
            stats.rhs_evals += 6;

            // Absolute max-norm: every component's local error estimate stays
            // below tol. A relative bound lets momenta that blow up in close
            // encounters carry most of the conservation drift.
            let mut err: f64 = 0.0;
            for i in 0..dim {
                let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                err = err.max(e.norm() / self.tol);
            }
            if !err.is_finite() {
                stats.rejected += 1;
                h *= FAC_MIN;
                last_rejected = true;
                continue;
            }

            let fac11 = err.powf(0.2 - BETA * 0.75);
            if err <= 1.0 {
                stats.accepted += 1;
                stats.max_error_estimate = stats.max_error_estimate.max(err * self.tol);
                let t_new = if last { t_end } else { t + h };

                if let Some(it) = sample_iter.as_mut() {
                    while let Some(&s) = it.peek() {
                        if s > t_new {
                            break;
                        }
                        let theta = (s - t) / h;
                        traj.push(s, dense(&y, &y_new, &k1, &k3, &k4, &k5, &k6, &k7, h, theta));
                        it.next();
                    }
                }

                t = t_new;
                std::mem::swap(&mut y, &mut y_new);
                std::mem::swap(&mut k1, &mut k7);
                if samples.is_none() {
                    traj.push(t, y.clone());
                }

                let mut fac = fac11 / fac_old.powf(BETA);
                fac_old = err.max(1e-4);
                fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_new = h / fac;
                if last_rejected {
                    h_new = h_new.min(h);
                }
                last_rejected = false;
                h = h_new;
            } else {
                stats.rejected += 1;
                h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
                last_rejected = true;
            }
        }
        traj.stats = stats;
        Ok(traj)
    }

    fn initial_step<F>(
        &self,
        rhs: &mut F,
        y: &[Complex64],
        f0: &[Complex64],
        t_end: f64,
        stats: &mut StepStats,
    ) -> Result<f64>
    where
        F: FnMut(f64, &[Complex64], &mut [Complex64]) -> Result<()>,
    {
        let scale = |v: &[Complex64]| -> f64 {
            let s: f64 = v
                .iter()
                .zip(y)
                .map(|(a, b)| (a.norm() / (self.tol * (1.0 + b.norm()))).powi(2))
                .sum();
            (s / v.len().max(1) as f64).sqrt()
        };
        let d0 = scale(y);
        let d1 = scale(f0);
        let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        h0 = h0.min(t_end);
        let y1: Vec<Complex64> = y.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
        let mut f1 = vec![Complex64::new(0.0, 0.0); y.len()];
        rhs(h0, &y1, &mut f1)?;
        stats.rhs_evals += 1;
        let diff: Vec<Complex64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
        let d2 = scale(&diff) / h0;
        let dm = d1.max(d2);
        let h1 = if dm <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / dm).powf(0.2)
        };
        Ok((100.0 * h0).min(h1).min(t_end))
    }
}

fn stage(out: &mut [Complex64], y: &[Complex64], h: f64, terms: &[(f64, &Vec<Complex64>)]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, k) in terms {
            acc += *a * k[i];
        }
        *o = y[i] + h * acc;
    }
}

#[allow(clippy::too_many_arguments)]
fn dense(
    y0: &[Complex64],
    y1: &[Complex64],
    k1: &[Complex64],
    k3: &[Complex64],
    k4: &[Complex64],
    k5: &[Complex64],
    k6: &[Complex64],
    k7: &[Complex64],
    h: f64,
    theta: f64,
) -> Vec<Complex64> {
    let theta1 = 1.0 - theta;
    (0..y0.len())
        .map(|i| {
            let ydiff = y1[i] - y0[i];
            let bspl = h * k1[i] - ydiff;
            let r4 = ydiff - h * k7[i] - bspl;
            let r5 = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
            y0[i] + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

    #[test]
    fn tolerance_range_enforced() {
        assert!(Integrator::new(1e-15).is_err());
        assert!(Integrator::new(1e-2).is_err());
        assert!(Integrator::new(1e-10).is_ok());
    }

    #[test]
    fn constant_field_is_exact() {
        let c = Complex64::new(0.7, -1.3);
        let traj = Integrator::new(1e-10)
            .unwrap()
            .integrate(
                |_, _, dy| {
                    dy[0] = c;
                    Ok(())
                },
                &[Complex64::new(0.0, 0.0)],
                1.0,
            )
            .unwrap();
        assert!((traj.last_state()[0] - c).norm() < 1e-14);
        assert_eq!(*traj.times.last().unwrap(), 1.0);
    }

    #[test]
    fn rotation_returns_home() {
        let tol = 1e-10;
        let traj = Integrator::new(tol)
            .unwrap()
            .integrate(
                |_, y, dy| {
                    dy[0] = I * y[0];
                    Ok(())
                },
                &[Complex64::new(1.0, 0.0)],
                2.0 * PI,
            )
            .unwrap();
        assert!((traj.last_state()[0] - 1.0).norm() < 10.0 * tol);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(traj.times.len(), traj.states.len());
    }

    #[test]
    fn dense_output_tracks_exact_solution() {
        let tol = 1e-9;
        let samples: Vec<f64> = (0..=40).map(|k| k as f64 * 0.1).collect();
        let traj = Integrator::new(tol)
            .unwrap()
            .integrate_sampled(
                |_, y, dy| {
                    dy[0] = I * y[0];
                    dy[1] = -0.5 * y[1];
                    Ok(())
                },
                &[Complex64::new(1.0, 0.0), Complex64::new(2.0, 1.0)],
                4.0,
                &samples,
            )
            .unwrap();
        assert_eq!(traj.times, samples);
        for (t, s) in traj.times.iter().zip(&traj.states) {
            assert!((s[0] - (I * t).exp()).norm() < 20.0 * tol, "t = {t}");
            let exact = Complex64::new(2.0, 1.0) * (-0.5 * t).exp();
            assert!((s[1] - exact).norm() < 20.0 * tol);
        }
    }

    #[test]
    fn blow_up_reports_underflow() {
        // y' = y², y(0) = 1 blows up at t = 1.
        let res = Integrator::new(1e-10).unwrap().integrate(
            |_, y, dy| {
                dy[0] = y[0] * y[0];
                Ok(())
            },
            &[Complex64::new(1.0, 0.0)],
            2.0,
        );
        match res {
            Err(Error::StepSizeUnderflow { t, .. }) => assert!((t - 1.0).abs() < 1e-3),
            other => panic!("expected underflow, got {other:?}"),
        }
    }

    #[test]
    fn rhs_errors_propagate() {
        let res = Integrator::new(1e-8).unwrap().integrate(
            |t, _, dy| {
                if t > 0.5 {
                    return Err(Error::SingularArgument {
                        x: Complex64::new(t, 0.0),
                        dist: 0.0,
                    });
                }
                dy[0] = Complex64::new(1.0, 0.0);
                Ok(())
            },
            &[Complex64::new(0.0, 0.0)],
            1.0,
        );
        assert!(matches!(res, Err(Error::SingularArgument { .. })));
    }
}

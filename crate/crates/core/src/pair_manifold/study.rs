//! ε-ladder studies on the pair manifold: how well pairs stick under `t₃`,
//! how fast `t₂` tears them apart, and how closely projected full
//! trajectories follow the reduced flow.

use serde::{Deserialize, Serialize};

use super::{embed, project_measured, ReducedState};
use crate::bkp_reduced::integrate_reduced;
use crate::dynamics::{flow_rhs, integrate_flow, CMState, Flow};
use crate::elliptic::Lattice;
use crate::error::{Error, Result};
use crate::exec::Execution;

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = x
        .iter()
        .zip(y)
        .filter(|(a, b)| **a > 0.0 && **b > 0.0)
        .map(|(a, b)| (a.ln(), b.ln()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Absolute level below which pair diagnostics are rounding noise.
const ROUNDING_FLOOR: f64 = 1e-14;

fn pair_max<F: Fn(usize) -> f64>(n: usize, f: F) -> f64 {
    (0..n).map(f).fold(0.0, f64::max)
}

fn max_sep_deviation(s: &CMState, eps: f64) -> f64 {
    pair_max(s.n_particles() / 2, |i| (s.x[2 * i + 1] - s.x[2 * i] - eps).norm())
}

fn max_momentum_sum(s: &CMState) -> f64 {
    pair_max(s.n_particles() / 2, |i| (s.p[2 * i] + s.p[2 * i + 1]).norm())
}

/// Pair diagnostics of the `t₃` vector field at an embedded state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OriginRates {
    pub eps: f64,
    /// `maxᵢ |ṗ_{2i−1} + ṗ_{2i}|`.
    pub momentum_sum_rate: f64,
    /// `maxᵢ |ẋ_{2i} − ẋ_{2i−1}|`.
    pub separation_rate: f64,
}

pub fn origin_rates(lat: &Lattice, r: &ReducedState, eps: f64) -> Result<OriginRates> {
    let s = embed(lat, r, eps)?;
    let v = flow_rhs(lat, Flow::T3, &s)?;
    let n = r.n_pairs();
    Ok(OriginRates {
        eps,
        momentum_sum_rate: pair_max(n, |i| (v.dp[2 * i] + v.dp[2 * i + 1]).norm()),
        separation_rate: pair_max(n, |i| (v.dx[2 * i + 1] - v.dx[2 * i]).norm()),
    })
}

/// Pair separation rate under `t₂` at an embedded state, against the
/// closed form `|2(p_{2i} − p_{2i−1})| ≈ 4/ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DestructionRate {
    pub eps: f64,
    /// `|d/dt(x₂ − x₁)|` for the first pair.
    pub rate: f64,
    /// `rate · ε`, close to 4.
    pub scaled_rate: f64,
}

pub fn destruction_rate(lat: &Lattice, r: &ReducedState, eps: f64) -> Result<DestructionRate> {
    let s = embed(lat, r, eps)?;
    let v = flow_rhs(lat, Flow::T2, &s)?;
    let rate = (v.dx[1] - v.dx[0]).norm();
    Ok(DestructionRate {
        eps,
        rate,
        scaled_rate: rate * eps,
    })
}

/// Thresholds and ladders for [`stickiness_report`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StickinessOptions {
    /// ε values for full `t₃` integrations.
    pub eps_list: Vec<f64>,
    /// ε values for the `t = 0` rates, which need no integration.
    pub rate_eps: Vec<f64>,
    /// ε values for the `t₂` rate.
    pub destruction_eps: Vec<f64>,
    pub t_end: f64,
    pub tol: f64,
    pub min_rate_slope: f64,
    /// Largest allowed growth of `C = dev/ε²` per ladder step.
    pub max_c_growth: f64,
    /// Accepted band for `ε·|d/dt(x₂ − x₁)|` under `t₂`.
    pub destruction_band: (f64, f64),
}

impl Default for StickinessOptions {
    fn default() -> Self {
        StickinessOptions {
            eps_list: vec![1e-2, 5e-3, 2.5e-3],
            rate_eps: (0..7).map(|k| 1e-2 / f64::from(1u32 << k)).chain([1e-4]).collect(),
            destruction_eps: vec![1e-2, 1e-3],
            t_end: 0.1,
            tol: 1e-12,
            min_rate_slope: 1.9,
            max_c_growth: 2.0,
            destruction_band: (3.9, 4.1),
        }
    }
}

/// Trajectory metrics of one full integration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickinessRow {
    pub eps: f64,
    /// `maxₜ maxᵢ |x_{2i} − x_{2i−1} − ε|`.
    pub max_sep_deviation: f64,
    /// `max_sep_deviation / ε²`.
    pub c: f64,
    /// `maxₜ maxᵢ |p_{2i−1} + p_{2i}|`.
    pub max_momentum_sum: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StickinessReport {
    pub options: StickinessOptions,
    pub origin: Vec<OriginRates>,
    pub rows: Vec<StickinessRow>,
    pub destruction: Vec<DestructionRate>,
    pub momentum_rate_slope: f64,
    pub separation_rate_slope: f64,
    pub sep_deviation_slope: f64,
    pub momentum_sum_slope: f64,
    /// `C(ε_{k+1}) / C(ε_k)` along the ladder.
    pub c_ratios: Vec<f64>,
    pub rate_pass: bool,
    pub c_stable_pass: bool,
    pub destruction_pass: bool,
}

impl StickinessReport {
    pub fn passed(&self) -> bool {
        self.rate_pass && self.c_stable_pass && self.destruction_pass
    }
}

pub fn stickiness_report(
    lat: &Lattice,
    r: &ReducedState,
    opts: &StickinessOptions,
    exec: Execution,
) -> Result<StickinessReport> {
    if opts.eps_list.len() < 2 || opts.rate_eps.len() < 2 {
        return Err(Error::Invalid("stickiness ladders need at least two entries".into()));
    }
    let origin = exec.try_map(&opts.rate_eps, |&eps| origin_rates(lat, r, eps))?;
    let rows = exec.try_map(&opts.eps_list, |&eps| {
        let s0 = embed(lat, r, eps)?;
        let traj = integrate_flow(lat, Flow::T3, &s0, opts.t_end, opts.tol, None)?;
        let mut dev: f64 = max_sep_deviation(&s0, eps);
        let mut msum: f64 = max_momentum_sum(&s0);
        for y in &traj.states {
            let s = CMState::from_flat(y)?;
            dev = dev.max(max_sep_deviation(&s, eps));
            msum = msum.max(max_momentum_sum(&s));
        }
        Ok(StickinessRow {
            eps,
            max_sep_deviation: dev,
            c: dev / (eps * eps),
            max_momentum_sum: msum,
            steps: traj.stats.accepted,
        })
    })?;
    let destruction = opts
        .destruction_eps
        .iter()
        .map(|&eps| destruction_rate(lat, r, eps))
        .collect::<Result<Vec<_>>>()?;

    let reps: Vec<f64> = origin.iter().map(|o| o.eps).collect();
    let momentum_rate_slope = loglog_slope(&reps, &origin.iter().map(|o| o.momentum_sum_rate).collect::<Vec<_>>());
    let separation_rate_slope = loglog_slope(&reps, &origin.iter().map(|o| o.separation_rate).collect::<Vec<_>>());
    let teps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let sep_deviation_slope = loglog_slope(&teps, &rows.iter().map(|r| r.max_sep_deviation).collect::<Vec<_>>());
    let momentum_sum_slope = loglog_slope(&teps, &rows.iter().map(|r| r.max_momentum_sum).collect::<Vec<_>>());
    let c_ratios: Vec<f64> = rows.windows(2).map(|w| w[1].c / w[0].c).collect();

    // With a single pair both quantities vanish identically; only rounding
    // noise is left to fit.
    let rate_vanishes = origin.iter().all(|o| o.momentum_sum_rate <= ROUNDING_FLOOR);
    let rate_pass = rate_vanishes || momentum_rate_slope >= opts.min_rate_slope;
    let c_stable_pass = rows.windows(2).zip(&c_ratios).all(|(w, q)| {
        w[1].max_sep_deviation <= ROUNDING_FLOOR || (q.is_finite() && *q <= opts.max_c_growth)
    });
    let (lo, hi) = opts.destruction_band;
    let destruction_pass = destruction
        .iter()
        .all(|d| d.scaled_rate >= lo && d.scaled_rate <= hi);
    Ok(StickinessReport {
        options: opts.clone(),
        origin,
        rows,
        destruction,
        momentum_rate_slope,
        separation_rate_slope,
        sep_deviation_slope,
        momentum_sum_slope,
        c_ratios,
        rate_pass,
        c_stable_pass,
        destruction_pass,
    })
}

/// Settings for [`reduction_convergence`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConvergenceOptions {
    pub eps_list: Vec<f64>,
    pub t_end: f64,
    pub tol: f64,
    /// Number of equal sub-intervals at which the trajectories are compared.
    pub samples: usize,
    pub min_order: f64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions {
            eps_list: vec![1e-2, 5e-3, 2.5e-3],
            t_end: 0.05,
            tol: 1e-12,
            samples: 10,
            min_order: 0.9,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    /// `maxₜ maxᵢ |x_{2i−1}(t) − xᵢ^{red}(t)|`.
    pub x_error: f64,
    /// `maxₜ maxᵢ |αᵢ(t) − αᵢ^{red}(t)|`, `α` read with the measured
    /// separation.
    pub alpha_error: f64,
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub options: ConvergenceOptions,
    pub rows: Vec<ConvergenceRow>,
    pub x_order: f64,
    pub alpha_order: f64,
    pub order: f64,
    pub pass: bool,
}

/// Integrates the full `t₃` flow from `embed(r, ε)` and the reduced flow
/// from `r`, projects the full trajectory, and fits the order at which the
/// difference vanishes with `ε`.
pub fn reduction_convergence(
    lat: &Lattice,
    r: &ReducedState,
    opts: &ConvergenceOptions,
    exec: Execution,
) -> Result<ConvergenceReport> {
    if opts.eps_list.len() < 2 || opts.samples == 0 {
        return Err(Error::Invalid("convergence study needs two ε values and one sample".into()));
    }
    let ts: Vec<f64> = (1..=opts.samples)
        .map(|k| opts.t_end * k as f64 / opts.samples as f64)
        .collect();
    let reduced = integrate_reduced(lat, r, opts.t_end, opts.tol, Some(&ts))?;
    let n = r.n_pairs();
    let rows = exec.try_map(&opts.eps_list, |&eps| {
        let s0 = embed(lat, r, eps)?;
        let full = integrate_flow(lat, Flow::T3, &s0, opts.t_end, opts.tol, Some(&ts))?;
        let (mut xe, mut ae): (f64, f64) = (0.0, 0.0);
        for (yf, yr) in full.states.iter().zip(&reduced.states) {
            let proj = project_measured(&CMState::from_flat(yf)?, eps)?;
            let red = ReducedState::from_flat(yr)?;
            for i in 0..n {
                xe = xe.max((proj.x[i] - red.x[i]).norm());
                ae = ae.max((proj.alpha[i] - red.alpha[i]).norm());
            }
        }
        Ok(ConvergenceRow {
            eps,
            x_error: xe,
            alpha_error: ae,
            error: xe.max(ae),
        })
    })?;
    let eps: Vec<f64> = rows.iter().map(|r| r.eps).collect();
    let fit = |f: fn(&ConvergenceRow) -> f64| loglog_slope(&eps, &rows.iter().map(f).collect::<Vec<_>>());
    let x_order = fit(|r| r.x_error);
    let alpha_order = fit(|r| r.alpha_error);
    let order = fit(|r| r.error);
    Ok(ConvergenceReport {
        options: opts.clone(),
        pass: order >= opts.min_order,
        rows,
        x_order,
        alpha_order,
        order,
    })
}

/// Largest deviation of a single-pair reduced trajectory from the straight
/// line `x(0) − 6αt` (with `α` constant).
pub fn single_pair_line_error(lat: &Lattice, r: &ReducedState, t_end: f64, tol: f64) -> Result<f64> {
    if r.n_pairs() != 1 {
        return Err(Error::Invalid("straight-line check needs exactly one pair".into()));
    }
    let traj = integrate_reduced(lat, r, t_end, tol, None)?;
    let (x0, a0) = (r.x[0], r.alpha[0]);
    Ok(traj
        .times
        .iter()
        .zip(&traj.states)
        .map(|(&t, y)| {
            let line = x0 - 6.0 * a0 * t;
            (y[0] - line).norm().max((y[1] - a0).norm())
        })
        .fold(0.0, f64::max))
}

//! The property suites behind `selftest` and the acceptance tests. Each
//! suite returns pass/fail checks with the measured value and threshold.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::verdict::Check;
use crate::bkp_reduced::{
    integrate_reduced, reduced_acceleration, reduced_rhs, second_order_residual,
    second_order_residual_expanded,
};
use crate::dynamics::{hamiltonians, integrate_flow, CMState, Flow};
use crate::elliptic::{lattice_sum, Lattice};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::lax::spectral::{
    compare_zero_loci, default_ladder, polynomial_from_samples, polynomial_roots, spectral_limit,
};
use crate::lax::{bkp_det_drift, char_det_eps, lax_bkp, match_multisets};
use crate::pair_manifold::study::{
    destruction_rate, reduction_convergence, single_pair_line_error, stickiness_report,
    ConvergenceOptions, StickinessOptions,
};
use crate::pair_manifold::ReducedState;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Suite keys in run order, with short titles.
pub const SUITES: [(&str, &str); 10] = [
    ("elliptic", "elliptic identities and lattice-sum oracle"),
    ("phi_expansion", "Laurent expansion of Phi at x = 0"),
    ("conservation", "H1, H2, H3 conserved along t2 and t3"),
    ("stickiness", "pairs stick under t3"),
    ("reduction", "projected full flow converges to reduced flow"),
    ("second_order", "reduced flow solves the pole equations"),
    ("destruction", "t2 separates pairs at rate 4/eps"),
    ("spectral_limit", "eps -> 0 limit of the characteristic determinant"),
    ("bkp_conservation", "det of the BKP Lax matrix conserved"),
    ("zero_locus", "zero loci of R and det BKP Lax (report)"),
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub key: String,
    pub title: String,
    pub passed: bool,
    pub checks: Vec<Check>,
}

pub fn rng_for(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Uniform point of the period cell, `2aω₁ + 2bω₂` with `|a|, |b| ≤ frac`,
/// at least `min_dist` away from the lattice.
pub fn random_cell_point(rng: &mut ChaCha8Rng, lat: &Lattice, frac: f64, min_dist: f64) -> Complex64 {
    loop {
        let a = rng.gen_range(-frac..frac);
        let b = rng.gen_range(-frac..frac);
        let x = 2.0 * a * lat.omega1() + 2.0 * b * lat.omega2();
        if lat.point(x).dist_to_lattice >= min_dist {
            return x;
        }
    }
}

pub fn random_disc(rng: &mut ChaCha8Rng, radius: f64) -> Complex64 {
    let r = radius * rng.gen::<f64>().sqrt();
    Complex64::from_polar(r, rng.gen_range(0.0..std::f64::consts::TAU))
}

/// `n` cell points whose pairwise differences stay `min_sep` away from the
/// lattice.
pub fn spread_positions(rng: &mut ChaCha8Rng, lat: &Lattice, n: usize, min_sep: f64) -> Result<Vec<Complex64>> {
    for _ in 0..10_000 {
        let xs: Vec<Complex64> = (0..n).map(|_| random_cell_point(rng, lat, 0.5, 0.0)).collect();
        let ok = (0..n).all(|i| (i + 1..n).all(|j| lat.point(xs[i] - xs[j]).dist_to_lattice >= min_sep));
        if ok {
            return Ok(xs);
        }
    }
    Err(Error::Invalid(format!("could not place {n} points {min_sep} apart")))
}

pub fn random_full_state(rng: &mut ChaCha8Rng, lat: &Lattice, n: usize) -> Result<CMState> {
    let x = spread_positions(rng, lat, n, 0.45)?;
    let p = (0..n).map(|_| random_disc(rng, 0.5)).collect();
    CMState::new(x, p)
}

pub fn random_reduced_state(rng: &mut ChaCha8Rng, lat: &Lattice, n: usize) -> Result<ReducedState> {
    let x = spread_positions(rng, lat, n, 0.5)?;
    let alpha = (0..n).map(|_| random_disc(rng, 0.3)).collect();
    ReducedState::new(x, alpha)
}

fn rel(a: Complex64, b: Complex64, scale: f64) -> f64 {
    (a - b).norm() / scale.max(f64::MIN_POSITIVE)
}

fn max_of(it: impl IntoIterator<Item = f64>) -> f64 {
    it.into_iter().fold(0.0, |m, v| if v.is_nan() { f64::NAN } else { m.max(v) })
}

/// Runs one suite by key; a computation error turns into a failing check.
pub fn run_suite(key: &str, lat: &Lattice, seed: u64, exec: Execution) -> SuiteResult {
    let (idx, title) = SUITES
        .iter()
        .enumerate()
        .find(|(_, (k, _))| *k == key)
        .map(|(i, (_, t))| (i as u64, *t))
        .unwrap_or((u64::MAX, "unknown suite"));
    let mut rng = rng_for(seed, idx.wrapping_add(1));
    let out = match key {
        "elliptic" => elliptic_identities(lat, &mut rng),
        "phi_expansion" => phi_expansion(lat, &mut rng),
        "conservation" => conservation(lat, &mut rng, exec),
        "stickiness" => stickiness(lat, &mut rng, exec),
        "reduction" => reduction(lat, &mut rng, exec),
        "second_order" => second_order(lat, &mut rng),
        "destruction" => destruction(lat, &mut rng),
        "spectral_limit" => spectral(lat, &mut rng),
        "bkp_conservation" => bkp_conservation(lat, &mut rng),
        "zero_locus" => zero_locus(lat, &mut rng),
        other => Err(Error::Invalid(format!("unknown suite {other}"))),
    };
    let checks = match out {
        Ok(c) => c,
        Err(e) => vec![Check::failed(key, e.to_string())],
    };
    SuiteResult {
        key: key.to_string(),
        title: title.to_string(),
        passed: checks.iter().all(|c| c.passed),
        checks,
    }
}

pub fn run_all(lat: &Lattice, seed: u64, exec: Execution) -> Vec<SuiteResult> {
    SUITES.iter().map(|(k, _)| run_suite(k, lat, seed, exec)).collect()
}

pub fn elliptic_identities(lat: &Lattice, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let tol = 1e-9;
    let pts: Vec<Complex64> = (0..20).map(|_| random_cell_point(rng, lat, 0.5, 0.1)).collect();
    let lambdas: Vec<Complex64> = (0..20).map(|_| random_cell_point(rng, lat, 0.5, 0.1)).collect();
    let (g2, g3) = (lat.g2(), lat.g3());
    let (mut third, mut ode) = (0.0f64, 0.0f64);
    let (mut qp_wp, mut qp_zeta, mut qp_sigma, mut qp_phi) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let shifts = [(lat.omega1(), lat.eta1()), (lat.omega2(), lat.eta2())];
    for (&x, &l) in pts.iter().zip(&lambdas) {
        let w = lat.wp_all(x)?;
        let t = 12.0 * w[0] * w[1];
        third = third.max(rel(w[3], t, w[3].norm().max(t.norm())));
        let lhs = w[1] * w[1];
        let rhs = 4.0 * w[0].powu(3) - g2 * w[0] - g3;
        let scale = max_of([lhs.norm(), 4.0 * w[0].norm().powi(3), (g2 * w[0]).norm(), g3.norm()]);
        ode = ode.max(rel(lhs, rhs, scale));

        let z = lat.zeta(x)?;
        let s = lat.sigma(x);
        let ph = lat.phi_all(x, l)?;
        let zl = lat.zeta(l)?;
        for &(om, eta) in &shifts {
            let y = x + 2.0 * om;
            let wy = lat.wp_all(y)?;
            for k in 0..4 {
                qp_wp = qp_wp.max(rel(wy[k], w[k], w[k].norm()));
            }
            let zy = lat.zeta(y)?;
            let zexp = z + 2.0 * eta;
            qp_zeta = qp_zeta.max(rel(zy, zexp, max_of([zy.norm(), z.norm(), (2.0 * eta).norm()])));
            let sy = lat.sigma(y);
            let sexp = -(2.0 * eta * (x + om)).exp() * s;
            qp_sigma = qp_sigma.max(rel(sy, sexp, sexp.norm()));
            let mult = (2.0 * (eta * l - zl * om)).exp();
            let py = lat.phi_all(y, l)?;
            for k in 0..3 {
                let e = mult * ph[k];
                qp_phi = qp_phi.max(rel(py[k], e, e.norm()));
            }
        }
    }
    let legendre = (lat.eta1() * lat.omega2() - lat.eta2() * lat.omega1() - 0.5 * std::f64::consts::PI * I).norm()
        / (0.5 * std::f64::consts::PI);

    let mut oracle_wp = 0.0f64;
    let mut oracle_zeta = 0.0f64;
    for _ in 0..10 {
        let x = random_cell_point(rng, lat, 0.45, 0.1);
        let w = lat.wp(x, 0)?;
        let ow = lattice_sum::wp_extrapolated(lat, x, lattice_sum::DEFAULT_CUTOFF);
        oracle_wp = oracle_wp.max(rel(w, ow, ow.norm()));
        let z = lat.zeta(x)?;
        let oz = lattice_sum::zeta_extrapolated(lat, x, lattice_sum::DEFAULT_CUTOFF);
        oracle_zeta = oracle_zeta.max(rel(z, oz, oz.norm()));
    }
    Ok(vec![
        Check::at_most("wp''' = 12 wp wp' (20 points, relative)", third, tol),
        Check::at_most("wp'^2 = 4wp^3 - g2 wp - g3 (20 points, relative)", ode, tol),
        Check::at_most("Legendre relation eta1 w2 - eta2 w1 = i pi/2", legendre, tol),
        Check::at_most("wp, wp', wp'', wp''' periodic under 2w1, 2w2", qp_wp, tol),
        Check::at_most("zeta quasi-periodic under 2w1, 2w2", qp_zeta, tol),
        Check::at_most("sigma quasi-periodic under 2w1, 2w2", qp_sigma, tol),
        Check::at_most("Phi, Phi', Phi'' quasi-periodic under 2w1, 2w2", qp_phi, tol),
        Check::at_most("wp vs lattice-sum oracle (10 points, relative)", oracle_wp, 1e-8),
        Check::at_most("zeta vs lattice-sum oracle (10 points, relative)", oracle_zeta, 1e-8),
    ])
}

/// Laurent coefficients `a_{-1}..a_2` of `Φ(·, λ)` at `x = 0` by trapezoidal
/// contour sums on `|x| = radius`.
pub fn phi_laurent(lat: &Lattice, lambda: Complex64, radius: f64, nodes: usize) -> Result<[Complex64; 4]> {
    let mut a = [Complex64::new(0.0, 0.0); 4];
    for j in 0..nodes {
        let x = Complex64::from_polar(radius, std::f64::consts::TAU * j as f64 / nodes as f64);
        let f = lat.phi(x, lambda, 0)?;
        for (slot, k) in a.iter_mut().zip(-1i32..=2) {
            *slot += f * x.powi(-k);
        }
    }
    Ok(a.map(|v| v / nodes as f64))
}

pub fn phi_expansion(lat: &Lattice, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let (mut res, mut lin, mut quad, mut constant, mut pole) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..10 {
        let l = random_cell_point(rng, lat, 0.5, 0.2);
        let [am1, a0, a1, a2] = phi_laurent(lat, l, 0.05, 64)?;
        let w = lat.wp(l, 0)?;
        let wd = lat.wp(l, 1)?;
        res = res.max((am1 - 1.0).norm());
        lin = lin.max(rel(a1, -0.5 * w, (0.5 * w).norm()));
        quad = quad.max(rel(a2, -wd / 6.0, (wd / 6.0).norm()));
        constant = constant.max(a0.norm());
        let x = Complex64::new(1e-5, 0.0);
        pole = pole.max((x * lat.phi(x, l, 0)? - 1.0).norm());
    }
    Ok(vec![
        Check::at_most("residue of Phi at 0 equals 1", res, 1e-6),
        Check::at_most("linear coefficient equals -wp(lambda)/2 (relative)", lin, 1e-6),
        Check::at_most("quadratic coefficient equals -wp'(lambda)/6 (relative)", quad, 1e-6),
        Check::report("constant coefficient |a0|", constant),
        Check::at_most("x Phi(x) at x = 1e-5 equals 1", pole, 1e-4),
    ])
}

/// Largest relative drift of `(H₁, H₂, H₃)` along a trajectory.
pub fn hamiltonian_drift(lat: &Lattice, flow: Flow, s0: &CMState, t_end: f64, tol: f64) -> Result<[f64; 3]> {
    let ts: Vec<f64> = (1..=20).map(|k| t_end * k as f64 / 20.0).collect();
    let traj = integrate_flow(lat, flow, s0, t_end, tol, Some(&ts))?;
    let (a, b, c) = hamiltonians(lat, s0)?;
    let h0 = [a, b, c];
    let mut drift = [0.0f64; 3];
    for y in &traj.states {
        let (a, b, c) = hamiltonians(lat, &CMState::from_flat(y)?)?;
        for (k, h) in [a, b, c].into_iter().enumerate() {
            drift[k] = drift[k].max(rel(h, h0[k], h0[k].norm()));
        }
    }
    Ok(drift)
}

pub fn conservation(lat: &Lattice, rng: &mut ChaCha8Rng, exec: Execution) -> Result<Vec<Check>> {
    let mut cases = Vec::new();
    for n in [2, 4, 6] {
        let s = random_full_state(rng, lat, n)?;
        for flow in [Flow::T2, Flow::T3] {
            cases.push((n, flow, s.clone()));
        }
    }
    let drifts = exec.try_map(&cases, |(_, flow, s)| hamiltonian_drift(lat, *flow, s, 1.0, 1e-10))?;
    Ok(cases
        .iter()
        .zip(drifts)
        .map(|((n, flow, _), d)| {
            let name = format!("N = {n}, t{} flow: max drift of H1, H2, H3", u8::from(*flow));
            Check::at_most(name, max_of(d), 1e-8)
                .with_detail(format!("H1 {:.1e}, H2 {:.1e}, H3 {:.1e}", d[0], d[1], d[2]))
        })
        .collect())
}

pub fn stickiness(lat: &Lattice, rng: &mut ChaCha8Rng, exec: Execution) -> Result<Vec<Check>> {
    let opts = StickinessOptions::default();
    let mut checks = Vec::new();
    for n in [2, 3] {
        let r = random_reduced_state(rng, lat, n)?;
        let rep = stickiness_report(lat, &r, &opts, exec)?;
        checks.push(Check::at_least(
            format!("n = {n}: slope of |p'_(2i-1) + p'_(2i)| at t = 0"),
            rep.momentum_rate_slope,
            opts.min_rate_slope,
        ));
        let worst = rep.c_ratios.iter().copied().fold(0.0, f64::max);
        checks.push(
            Check::at_most(
                format!("n = {n}: C(eps/2)/C(eps), C = max|sep - eps|/eps^2"),
                worst,
                opts.max_c_growth,
            )
            .with_detail(format!(
                "C = {}",
                rep.rows.iter().map(|r| format!("{:.3e}", r.c)).collect::<Vec<_>>().join(", ")
            )),
        );
        checks.push(Check::report(format!("n = {n}: slope of max|sep - eps|"), rep.sep_deviation_slope));
    }
    Ok(checks)
}

pub fn reduction(lat: &Lattice, rng: &mut ChaCha8Rng, exec: Execution) -> Result<Vec<Check>> {
    let opts = ConvergenceOptions::default();
    let mut checks = Vec::new();
    for n in [1, 2, 3] {
        let r = random_reduced_state(rng, lat, n)?;
        let rep = reduction_convergence(lat, &r, &opts, exec)?;
        checks.push(
            Check::at_least(format!("n = {n}: convergence order of projected full flow"), rep.order, opts.min_order)
                .with_detail(format!("x order {:.2}, alpha order {:.2}", rep.x_order, rep.alpha_order)),
        );
        if n == 1 {
            let tol = 1e-12;
            let err = single_pair_line_error(lat, &r, 1.0, tol)?;
            checks.push(Check::at_most("n = 1: reduced trajectory vs x(0) - 6 alpha t", err, 100.0 * tol));
        }
    }
    Ok(checks)
}

pub fn second_order(lat: &Lattice, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let ts: Vec<f64> = (1..=20).map(|k| 0.025 * k as f64).collect();
    for n in [2, 3] {
        let r0 = random_reduced_state(rng, lat, n)?;
        let traj = integrate_reduced(lat, &r0, 0.5, 1e-12, Some(&ts))?;
        let mut worst = 0.0f64;
        for y in std::iter::once(r0.to_flat()).chain(traj.states.iter().cloned()) {
            let r = ReducedState::from_flat(&y)?;
            let xdot = reduced_rhs(lat, &r)?.dx;
            let xddot = reduced_acceleration(lat, &r)?;
            let res = second_order_residual(lat, &r.x, &xdot, &xddot)?;
            worst = worst.max(max_of(res.iter().map(|v| v.norm())));
        }
        checks.push(Check::at_most(format!("n = {n}: pole-equation residual along reduced flow"), worst, 1e-8));

        // Finite-difference cross-check of the analytic acceleration, with
        // the five-point stencil. Each probe is its own integration so the
        // stencil sees step endpoints, not dense output. The step follows
        // the local time scale |ẋ|/|ẍ|, which is short near close encounters.
        let t0 = 0.25;
        let state_at = |t: f64| -> Result<ReducedState> {
            let tr = integrate_reduced(lat, &r0, t, 1e-13, None)?;
            ReducedState::from_flat(tr.last_state())
        };
        let mid = state_at(t0)?;
        let acc = reduced_acceleration(lat, &mid)?;
        let speed = max_of(reduced_rhs(lat, &mid)?.dx.iter().map(|v| v.norm()));
        let h = 1e-3 * (speed / max_of(acc.iter().map(|a| a.norm()))).min(1.0);
        let xd = |k: f64| -> Result<Vec<Complex64>> { Ok(reduced_rhs(lat, &state_at(t0 + k * h)?)?.dx) };
        let (m2, m1, p1, p2) = (xd(-2.0)?, xd(-1.0)?, xd(1.0)?, xd(2.0)?);
        let scale = max_of(acc.iter().map(|a| a.norm())).max(1.0);
        let fd_err = max_of((0..n).map(|i| {
            let d = (m2[i] - 8.0 * m1[i] + 8.0 * p1[i] - p2[i]) / (12.0 * h);
            (d - acc[i]).norm() / scale
        }));
        checks.push(Check::at_most(format!("n = {n}: analytic vs finite-difference acceleration"), fd_err, 1e-5));
    }
    let mut equiv = 0.0f64;
    for k in 0..50 {
        let n = 2 + k % 3;
        let x = spread_positions(rng, lat, n, 0.3)?;
        let xdot: Vec<Complex64> = (0..n).map(|_| random_disc(rng, 2.0)).collect();
        let xddot: Vec<Complex64> = (0..n).map(|_| random_disc(rng, 10.0)).collect();
        let a = second_order_residual(lat, &x, &xdot, &xddot)?;
        let b = second_order_residual_expanded(lat, &x, &xdot, &xddot)?;
        for (u, v) in a.iter().zip(&b) {
            equiv = equiv.max(rel(*u, *v, u.norm().max(v.norm()).max(1.0)));
        }
    }
    checks.push(Check::at_most("compact vs expanded pole equations (50 states)", equiv, 1e-12));
    Ok(checks)
}

pub fn destruction(lat: &Lattice, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let r = random_reduced_state(rng, lat, 2)?;
    [1e-2, 1e-3]
        .into_iter()
        .map(|eps| {
            let d = destruction_rate(lat, &r, eps)?;
            Ok(Check::within(
                format!("eps = {eps:e}: eps |d/dt (x2 - x1)| under t2"),
                d.scaled_rate,
                3.9,
                4.1,
            ))
        })
        .collect()
}

pub fn spectral(lat: &Lattice, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let ladder = default_ladder();
    let (mut limit_err, mut variation, mut bkp_ratio, mut roots) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut min_order = f64::INFINITY;
    for _ in 0..10 {
        let z = random_disc(rng, 1.5);
        let l = random_cell_point(rng, lat, 0.5, 0.2);
        let alpha = random_disc(rng, 0.5);
        let r = ReducedState::new(vec![random_cell_point(rng, lat, 0.5, 0.0)], vec![alpha])?;
        let lim = spectral_limit(lat, &r, z, l, &ladder)?;
        let wl = lat.wp(l, 0)?;
        let exact = z * z - 2.0 * alpha - wl;
        limit_err = limit_err.max(rel(lim.value, exact, exact.norm().max(1.0)));
        min_order = min_order.min(lim.order);

        let bkp = lax_bkp(lat, &r, z, l)?.det()?;
        bkp_ratio = bkp_ratio.max(rel(bkp, -3.0 * lim.value, (3.0 * lim.value).norm().max(1.0)));

        let (rc, _) = polynomial_from_samples(|zz| spectral_limit(lat, &r, zz, l, &ladder).map(|s| s.value), 2, 1.5)?;
        let (bc, _) = polynomial_from_samples(|zz| lax_bkp(lat, &r, zz, l)?.det(), 2, 1.5)?;
        roots = roots.max(match_multisets(&polynomial_roots(&rc)?, &polynomial_roots(&bc)?)?);
    }
    for n in [1, 2, 3] {
        let r = random_reduced_state(rng, lat, n)?;
        for _ in 0..10 {
            let z = random_disc(rng, 1.5);
            let l = random_cell_point(rng, lat, 0.5, 0.2);
            let vals = ladder
                .iter()
                .map(|&e| char_det_eps(lat, &r, e, z, l))
                .collect::<Result<Vec<_>>>()?;
            let last = *vals.last().unwrap();
            variation = variation.max(max_of(vals.iter().map(|v| (v - last).norm() / (1.0 + last.norm()))));
        }
    }
    Ok(vec![
        Check::at_most("det(L_eps - z) variation along the eps ladder (n = 1, 2, 3)", variation, 1e-2),
        Check::at_most("n = 1: limit vs z^2 - 2 alpha - wp(lambda) (10 points)", limit_err, 1e-8),
        Check::at_least("n = 1: observed convergence order in eps", min_order, 1.0),
        Check::at_most("n = 1: det BKP Lax vs -3 R(z, lambda)", bkp_ratio, 1e-8),
        Check::at_most("n = 1: zero loci of R and det BKP Lax coincide", roots, 1e-8),
    ])
}

pub fn bkp_conservation(lat: &Lattice, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in [2, 3] {
        let r = random_reduced_state(rng, lat, n)?;
        let pts: Vec<(Complex64, Complex64)> = (0..5)
            .map(|_| (random_disc(rng, 1.5), random_cell_point(rng, lat, 0.5, 0.2)))
            .collect();
        let drift = bkp_det_drift(lat, &r, &pts, 0.5, 1e-12, 20)?;
        checks.push(Check::at_most(format!("n = {n}: relative drift of det BKP Lax over t in [0, 0.5]"), drift, 1e-6));
    }
    Ok(checks)
}

pub fn zero_locus(lat: &Lattice, rng: &mut ChaCha8Rng) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for n in [2, 3] {
        let r = random_reduced_state(rng, lat, n)?;
        let l = random_cell_point(rng, lat, 0.5, 0.2);
        let rep = compare_zero_loci(lat, &r, l, &default_ladder())?;
        checks.push(Check::report(format!("n = {n}: root mismatch R(z) vs det BKP(z)"), rep.root_mismatch));
        checks.push(Check::report(
            format!("n = {n}: root mismatch R(z) vs det BKP(-z)"),
            rep.reflected_root_mismatch,
        ));
        checks.push(Check::report(
            format!("n = {n}: coefficient spread R(z) vs det BKP(-z)"),
            rep.reflected_coefficient_ratio_spread,
        ));
    }
    Ok(checks)
}

//! Weierstrass elliptic functions on an arbitrary complex lattice.
//!
//! Everything is evaluated from the Jacobi theta series
//! `θ₁(v) = 2 Σ (-1)ⁿ q^{(n+½)²} sin((2n+1)v)` with `v = πx/(2ω₁)` after the
//! argument has been reduced to the period cell centred at the origin.
//! Derivatives of `℘` up to order three come from logarithmic derivatives of
//! `θ₁`, so identities such as `℘‴ = 12℘℘′` are genuine checks rather than
//! restatements of the implementation.

pub mod lattice_sum;

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Highest `θ₁` derivative evaluated. `℘‴` needs the fifth log-derivative.
const THETA_DERIVS: usize = 6;
const MAX_SERIES_TERMS: usize = 64;
const SERIES_CUTOFF: f64 = 1e-17;
/// Relative size of the exclusion disc around lattice points.
pub const SINGULAR_RADIUS_FACTOR: f64 = 1e-6;
const LEGENDRE_TOL: f64 = 1e-9;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Period lattice `2ω₁ℤ + 2ω₂ℤ` with cached series data and invariants.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "LatticeSpec", into = "LatticeSpec")]
pub struct Lattice {
    omega1: Complex64,
    omega2: Complex64,
    tau: Complex64,
    nome_q: Complex64,
    eta1: Complex64,
    eta2: Complex64,
    g2: Complex64,
    g3: Complex64,
    /// `2(-1)ⁿ q^{(n+½)²}` for `n < series_terms`.
    theta_coeffs: Vec<Complex64>,
    theta1_prime0: Complex64,
    singular_radius: f64,
    truncated: bool,
}

/// Serialized form of a lattice: just the two half-periods.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub omega1: Complex64,
    pub omega2: Complex64,
}

impl TryFrom<LatticeSpec> for Lattice {
    type Error = Error;

    fn try_from(spec: LatticeSpec) -> Result<Self> {
        Lattice::new(spec.omega1, spec.omega2)
    }
}

impl From<Lattice> for LatticeSpec {
    fn from(lat: Lattice) -> Self {
        LatticeSpec {
            omega1: lat.omega1,
            omega2: lat.omega2,
        }
    }
}

/// An argument together with its reduction to the fundamental cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticPoint {
    pub x: Complex64,
    /// `x - 2mω₁ - 2nω₂`, inside the cell centred at the origin.
    pub reduced: Complex64,
    pub m: i64,
    pub n: i64,
    pub dist_to_lattice: f64,
}

impl Lattice {
    /// Builds the lattice with half-periods `omega1`, `omega2`.
    ///
    /// Fails when `Im(ω₂/ω₁) <= 0` or when the Legendre relation computed
    /// from the cached quasi-periods misses `iπ/2`.
    pub fn new(omega1: Complex64, omega2: Complex64) -> Result<Self> {
        if !(omega1.is_finite() && omega2.is_finite()) || omega1.norm() == 0.0 {
            return Err(Error::InvalidLattice(format!(
                "half-periods must be finite and nonzero: {omega1}, {omega2}"
            )));
        }
        let tau = omega2 / omega1;
        if tau.im <= 0.0 {
            return Err(Error::InvalidLattice(format!(
                "Im(omega2/omega1) = {} must be positive",
                tau.im
            )));
        }
        let nome_q = (I * PI * tau).exp();
        let qa = nome_q.norm();

        let mut terms = MAX_SERIES_TERMS;
        let mut truncated = true;
        for n in 1..=MAX_SERIES_TERMS {
            let bound = qa.powi((n * n) as i32) * ((2 * n + 1) as f64).powi(5);
            if bound < SERIES_CUTOFF {
                terms = n + 1;
                truncated = false;
                break;
            }
        }
        let theta_coeffs: Vec<Complex64> = (0..terms)
            .map(|n| {
                let h = n as f64 + 0.5;
                let sign = if n % 2 == 0 { 2.0 } else { -2.0 };
                sign * (I * PI * tau * h * h).exp()
            })
            .collect();

        let mut lat = Lattice {
            omega1,
            omega2,
            tau,
            nome_q,
            eta1: Complex64::new(0.0, 0.0),
            eta2: Complex64::new(0.0, 0.0),
            g2: Complex64::new(0.0, 0.0),
            g3: Complex64::new(0.0, 0.0),
            theta_coeffs,
            theta1_prime0: Complex64::new(0.0, 0.0),
            singular_radius: SINGULAR_RADIUS_FACTOR * (2.0 * omega1).norm().min((2.0 * omega2).norm()),
            truncated,
        };

        let d0 = lat.theta1_derivs(Complex64::new(0.0, 0.0));
        lat.theta1_prime0 = d0[1];
        lat.eta1 = -PI * PI / (12.0 * omega1) * d0[3] / d0[1];

        // ζ(ω₂) straight from the series at v = πτ/2, no reduction involved.
        let dh = lat.theta1_derivs(0.5 * PI * tau);
        lat.eta2 = lat.eta1 * omega2 / omega1 + lat.scale() * dh[1] / dh[0];

        let (g2, g3) = eisenstein_invariants(omega1, nome_q, terms.max(8) * 4);
        lat.g2 = g2;
        lat.g3 = g3;

        let residual = lat.legendre_residual();
        if residual.norm() > LEGENDRE_TOL * (1.0 + (lat.eta1 * omega2).norm()) {
            return Err(Error::InvalidLattice(format!(
                "Legendre relation violated by {residual}"
            )));
        }
        Ok(lat)
    }

    /// The lattice with periods `(2, 2i)`, used as the default fixture.
    pub fn lemniscatic() -> Self {
        Lattice::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0))
            .expect("square lattice is valid")
    }

    pub fn omega1(&self) -> Complex64 {
        self.omega1
    }

    pub fn omega2(&self) -> Complex64 {
        self.omega2
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn nome(&self) -> Complex64 {
        self.nome_q
    }

    /// `ζ(ω₁)`.
    pub fn eta1(&self) -> Complex64 {
        self.eta1
    }

    /// `ζ(ω₂)`.
    pub fn eta2(&self) -> Complex64 {
        self.eta2
    }

    pub fn g2(&self) -> Complex64 {
        self.g2
    }

    pub fn g3(&self) -> Complex64 {
        self.g3
    }

    pub fn series_terms(&self) -> usize {
        self.theta_coeffs.len()
    }

    pub fn singular_radius(&self) -> f64 {
        self.singular_radius
    }

    /// Set when the theta series hit the term cap before reaching the
    /// cutoff; results are then less accurate than the nominal 1e-12.
    pub fn accuracy_warning(&self) -> Option<String> {
        self.truncated.then(|| {
            format!(
                "theta series capped at {MAX_SERIES_TERMS} terms for |q| = {:.6}",
                self.nome_q.norm()
            )
        })
    }

    /// `ζ(ω₁)ω₂ − ζ(ω₂)ω₁ − iπ/2`, zero up to rounding.
    pub fn legendre_residual(&self) -> Complex64 {
        self.eta1 * self.omega2 - self.eta2 * self.omega1 - I * (PI / 2.0)
    }

    /// Lattice point `2mω₁ + 2nω₂`.
    pub fn period(&self, m: i64, n: i64) -> Complex64 {
        2.0 * (m as f64 * self.omega1 + n as f64 * self.omega2)
    }

    /// Quasi-period increment `2mη₁ + 2nη₂` of `ζ`.
    pub fn zeta_shift(&self, m: i64, n: i64) -> Complex64 {
        2.0 * (m as f64 * self.eta1 + n as f64 * self.eta2)
    }

    fn scale(&self) -> Complex64 {
        PI / (2.0 * self.omega1)
    }

    /// Reduces `x` to the cell centred at the origin and records the
    /// distance to the nearest lattice point.
    pub fn point(&self, x: Complex64) -> EllipticPoint {
        let u = x / (2.0 * self.omega1);
        let b = u.im / self.tau.im;
        let a = u.re - b * self.tau.re;
        let n = b.round() as i64;
        let m = a.round() as i64;
        let reduced = x - self.period(m, n);
        let mut dist = f64::INFINITY;
        for dm in -2..=2 {
            for dn in -2..=2 {
                dist = dist.min((reduced - self.period(dm, dn)).norm());
            }
        }
        EllipticPoint {
            x,
            reduced,
            m,
            n,
            dist_to_lattice: dist,
        }
    }

    fn regular_point(&self, x: Complex64) -> Result<EllipticPoint> {
        let pt = self.point(x);
        if !(pt.dist_to_lattice > self.singular_radius) {
            return Err(Error::SingularArgument {
                x,
                dist: pt.dist_to_lattice,
            });
        }
        Ok(pt)
    }

    /// `θ₁^{(k)}(v)` for `k = 0..6`, with respect to `v`.
    fn theta1_derivs(&self, v: Complex64) -> [Complex64; THETA_DERIVS] {
        let mut out = [Complex64::new(0.0, 0.0); THETA_DERIVS];
        for (n, c) in self.theta_coeffs.iter().enumerate() {
            let k = (2 * n + 1) as f64;
            let arg = k * v;
            let (s, co) = (arg.sin(), arg.cos());
            // sin^{(j)} cycles through sin, cos, -sin, -cos.
            let cyc = [s, co, -s, -co];
            let mut kp = 1.0;
            for (j, slot) in out.iter_mut().enumerate() {
                *slot += c * kp * cyc[j % 4];
                kp *= k;
            }
        }
        out
    }

    /// Log-derivatives `(log θ₁)^{(j)}(v)`, `j = 1..5`, at a reduced point.
    fn log_theta_derivs(&self, v: Complex64) -> [Complex64; 6] {
        let d = self.theta1_derivs(v);
        let mut moments = [Complex64::new(0.0, 0.0); 6];
        for j in 1..6 {
            moments[j] = d[j] / d[0];
        }
        // Cumulants from moments: f_k = m_k - Σ_{j<k} C(k-1, j-1) f_j m_{k-j}.
        let mut f = [Complex64::new(0.0, 0.0); 6];
        for k in 1..6 {
            let mut acc = moments[k];
            for j in 1..k {
                acc -= binomial(k - 1, j - 1) * f[j] * moments[k - j];
            }
            f[k] = acc;
        }
        f
    }

    /// `[℘, ℘′, ℘″, ℘‴]` at `x`.
    pub fn wp_all(&self, x: Complex64) -> Result<[Complex64; 4]> {
        let pt = self.regular_point(x)?;
        let k = self.scale();
        let f = self.log_theta_derivs(k * pt.reduced);
        let k2 = k * k;
        Ok([
            -self.eta1 / self.omega1 - k2 * f[2],
            -k2 * k * f[3],
            -k2 * k2 * f[4],
            -k2 * k2 * k * f[5],
        ])
    }

    /// `℘^{(order)}(x)` for `order` in `0..=3`.
    pub fn wp(&self, x: Complex64, order: usize) -> Result<Complex64> {
        if order > 3 {
            return Err(Error::InvalidOrder(order));
        }
        Ok(self.wp_all(x)?[order])
    }

    /// `ζ(x)`, quasi-periodic with increments `2η₁`, `2η₂`.
    pub fn zeta(&self, x: Complex64) -> Result<Complex64> {
        let pt = self.regular_point(x)?;
        let k = self.scale();
        let f = self.log_theta_derivs(k * pt.reduced);
        Ok(self.eta1 * pt.reduced / self.omega1 + k * f[1] + self.zeta_shift(pt.m, pt.n))
    }

    /// `[σ, σ′, σ″]` at `x`. Entire, so never fails.
    pub fn sigma_derivs(&self, x: Complex64) -> [Complex64; 3] {
        let pt = self.point(x);
        let x0 = pt.reduced;
        let k = self.scale();
        let th = self.theta1_derivs(k * x0);
        let h1 = self.eta1 * x0 / self.omega1;
        let h2 = self.eta1 / self.omega1;
        let c = (2.0 * self.omega1 / PI) * (0.5 * h1 * x0).exp() / self.theta1_prime0;
        let s0 = c * th[0];
        let s1 = c * (h1 * th[0] + k * th[1]);
        let s2 = c * ((h2 + h1 * h1) * th[0] + 2.0 * h1 * k * th[1] + k * k * th[2]);
        if pt.m == 0 && pt.n == 0 {
            return [s0, s1, s2];
        }
        let (m, n) = (pt.m, pt.n);
        let w = m as f64 * self.omega1 + n as f64 * self.omega2;
        let eta_w = m as f64 * self.eta1 + n as f64 * self.eta2;
        let sign = if (m + n + m * n).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let factor = sign * (2.0 * eta_w * (x0 + w)).exp();
        [
            factor * s0,
            factor * (s1 + 2.0 * eta_w * s0),
            factor * (s2 + 4.0 * eta_w * s1 + 4.0 * eta_w * eta_w * s0),
        ]
    }

    pub fn sigma(&self, x: Complex64) -> Complex64 {
        self.sigma_derivs(x)[0]
    }

    /// `[Φ, Φ′, Φ″]` of `Φ(x, λ) = σ(x+λ) e^{-ζ(λ)x} / (σ(λ)σ(x))`,
    /// derivatives taken in `x`.
    pub fn phi_all(&self, x: Complex64, lambda: Complex64) -> Result<[Complex64; 3]> {
        let zeta_x = self.zeta(x)?;
        let wp_x = self.wp(x, 0)?;
        let zeta_l = self.zeta(lambda)?;
        let sigma_l = self.sigma(lambda);
        let sigma_x = self.sigma(x);

        let s = self.sigma_derivs(x + lambda);
        let e = (-zeta_l * x).exp();
        let a0 = s[0] * e;
        let a1 = (s[1] - zeta_l * s[0]) * e;
        let a2 = (s[2] - 2.0 * zeta_l * s[1] + zeta_l * zeta_l * s[0]) * e;

        let b0 = 1.0 / (sigma_x * sigma_l);
        let b1 = -zeta_x * b0;
        let b2 = (zeta_x * zeta_x + wp_x) * b0;

        Ok([
            a0 * b0,
            a1 * b0 + a0 * b1,
            a2 * b0 + 2.0 * a1 * b1 + a0 * b2,
        ])
    }

    /// `∂ₓ^{order} Φ(x, λ)` for `order` in `0..=2`.
    pub fn phi(&self, x: Complex64, lambda: Complex64, order: usize) -> Result<Complex64> {
        if order > 2 {
            return Err(Error::InvalidOrder(order));
        }
        Ok(self.phi_all(x, lambda)?[order])
    }

    /// Multiplier of `Φ(·, λ)` under `x → x + 2ω_α`, `α ∈ {1, 2}`.
    pub fn phi_multiplier(&self, lambda: Complex64, alpha: usize) -> Result<Complex64> {
        let (omega, eta) = match alpha {
            1 => (self.omega1, self.eta1),
            2 => (self.omega2, self.eta2),
            _ => return Err(Error::InvalidOrder(alpha)),
        };
        let zeta_l = self.zeta(lambda)?;
        Ok((2.0 * (eta * lambda - zeta_l * omega)).exp())
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `g₂`, `g₃` from the Eisenstein series `E₄`, `E₆` in the nome `q`.
fn eisenstein_invariants(omega1: Complex64, q: Complex64, terms: usize) -> (Complex64, Complex64) {
    let q2 = q * q;
    let mut e4 = Complex64::new(1.0, 0.0);
    let mut e6 = Complex64::new(1.0, 0.0);
    let mut qn = Complex64::new(1.0, 0.0);
    for n in 1..=terms {
        qn *= q2;
        let nf = n as f64;
        let r = qn / (1.0 - qn);
        let t4 = 240.0 * nf.powi(3) * r;
        let t6 = 504.0 * nf.powi(5) * r;
        e4 += t4;
        e6 -= t6;
        if t4.norm() < 1e-18 && t6.norm() < 1e-18 {
            break;
        }
    }
    let w2 = omega1 * omega1;
    let w4 = w2 * w2;
    let pi4 = PI.powi(4);
    let g2 = pi4 * e4 / (12.0 * w4);
    let g3 = pi4 * PI * PI * e6 / (216.0 * w4 * w2);
    (g2, g3)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm().max(1e-300)
    }

    fn skew() -> Lattice {
        Lattice::new(c(1.0, 0.2), c(0.3, 0.9)).unwrap()
    }

    #[test]
    fn rejects_lower_half_plane() {
        assert!(matches!(
            Lattice::new(c(1.0, 0.0), c(0.0, -1.0)),
            Err(Error::InvalidLattice(_))
        ));
        assert!(Lattice::new(c(1.0, 0.0), c(2.0, 0.0)).is_err());
    }

    #[test]
    fn lemniscatic_invariants() {
        let lat = Lattice::lemniscatic();
        assert!(lat.g3().norm() < 1e-12);
        assert!(lat.g2().im.abs() < 1e-12);
        assert!(lat.legendre_residual().norm() < 1e-13);
        assert!(lat.accuracy_warning().is_none());
    }

    #[test]
    fn invalid_orders() {
        let lat = Lattice::lemniscatic();
        assert_eq!(lat.wp(c(0.3, 0.1), 4), Err(Error::InvalidOrder(4)));
        assert_eq!(lat.phi(c(0.3, 0.1), c(0.2, 0.1), 3), Err(Error::InvalidOrder(3)));
    }

    #[test]
    fn singular_arguments_refused() {
        let lat = skew();
        let w = lat.period(1, -2);
        assert!(matches!(lat.wp(w, 0), Err(Error::SingularArgument { .. })));
        assert!(matches!(
            lat.zeta(w + c(1e-8, 0.0)),
            Err(Error::SingularArgument { .. })
        ));
        assert!(lat.wp(w + c(1e-4, 0.0), 0).is_ok());
        assert!(lat.phi(c(0.0, 0.0), c(0.3, 0.2), 0).is_err());
    }

    #[test]
    fn periodicity_and_parity() {
        let lat = skew();
        let x = c(0.37, 0.21);
        for order in 0..4 {
            let base = lat.wp(x, order).unwrap();
            let shifted = lat.wp(x + 2.0 * lat.omega1(), order).unwrap();
            assert!(rel(shifted, base) < 1e-11, "order {order}");
            let neg = lat.wp(-x, order).unwrap();
            let sign = if order % 2 == 0 { 1.0 } else { -1.0 };
            assert!(rel(neg, sign * base) < 1e-12);
        }
        assert!(rel(lat.zeta(-x).unwrap(), -lat.zeta(x).unwrap()) < 1e-12);
        assert!(rel(lat.sigma(-x), -lat.sigma(x)) < 1e-12);
    }

    #[test]
    fn sigma_normalisation() {
        let lat = skew();
        assert_eq!(lat.sigma(c(0.0, 0.0)), c(0.0, 0.0));
        let x = 1e-4 * c(1.0, 1.0);
        assert!(rel(lat.sigma(x) / x, c(1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn zeta_derivative_is_minus_wp() {
        let lat = skew();
        let x = c(0.41, -0.27);
        let h = 1e-4;
        let fd = (lat.zeta(x + h).unwrap() - lat.zeta(x - h).unwrap()) / (2.0 * h);
        assert!(rel(fd, -lat.wp(x, 0).unwrap()) < 1e-7);
    }

    #[test]
    fn sigma_log_derivative_is_zeta() {
        let lat = skew();
        for x in [c(0.41, -0.27), c(2.3, 1.7), c(-3.1, 0.4)] {
            let s = lat.sigma_derivs(x);
            assert!(rel(s[1] / s[0], lat.zeta(x).unwrap()) < 1e-11);
            // σ″/σ = ζ² − ℘
            let z = lat.zeta(x).unwrap();
            assert!(rel(s[2] / s[0], z * z - lat.wp(x, 0).unwrap()) < 1e-10);
        }
    }

    #[test]
    fn phi_residue_at_origin() {
        let lat = skew();
        let lambda = c(0.31, 0.17);
        let x = c(1e-5, 0.0);
        let v = x * lat.phi(x, lambda, 0).unwrap();
        assert!((v - 1.0).norm() < 1e-9);
    }

    #[test]
    fn phi_vanishes_where_sigma_numerator_does() {
        let lat = skew();
        let lambda = c(0.31, 0.17);
        // x + λ on the lattice: Φ = 0 and Φ′ stays finite.
        let vals = lat.phi_all(-lambda, lambda).unwrap();
        assert!(vals[0].norm() < 1e-14);
        assert!(vals[1].is_finite() && vals[1].norm() > 1e-3);
    }
}

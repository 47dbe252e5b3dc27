//! Phase space of the elliptic Calogero–Moser system, its first three
//! Hamiltonians and their flows.

pub mod integrator;
pub mod trajectory;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::elliptic::Lattice;
use crate::error::{Error, Result};

pub use integrator::Integrator;
pub use trajectory::{StepStats, Trajectory};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Column groups of a full-state trajectory.
pub const FULL_GROUPS: [&str; 2] = ["x", "p"];

/// Coordinates and momenta of `N` particles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CMState {
    pub x: Vec<Complex64>,
    pub p: Vec<Complex64>,
}

/// A vector field value at a `CMState`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tangent {
    pub dx: Vec<Complex64>,
    pub dp: Vec<Complex64>,
}

/// Which commuting flow `t_a` to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Flow {
    T1,
    T2,
    T3,
}

impl TryFrom<u8> for Flow {
    type Error = Error;

    fn try_from(a: u8) -> Result<Self> {
        match a {
            1 => Ok(Flow::T1),
            2 => Ok(Flow::T2),
            3 => Ok(Flow::T3),
            _ => Err(Error::Invalid(format!("flow index {a} not in {{1, 2, 3}}"))),
        }
    }
}

impl From<Flow> for u8 {
    fn from(f: Flow) -> u8 {
        match f {
            Flow::T1 => 1,
            Flow::T2 => 2,
            Flow::T3 => 3,
        }
    }
}

impl CMState {
    pub fn new(x: Vec<Complex64>, p: Vec<Complex64>) -> Result<Self> {
        if x.len() != p.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: p.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::Invalid("a state needs at least one particle".into()));
        }
        Ok(CMState { x, p })
    }

    pub fn n_particles(&self) -> usize {
        self.x.len()
    }

    /// Fails with `SingularArgument` if two particles sit within the
    /// kernel's singular radius of each other modulo the lattice.
    pub fn check_collisions(&self, lat: &Lattice) -> Result<()> {
        check_pairwise(lat, &self.x)
    }

    /// `[x₁..x_N, p₁..p_N]`.
    pub fn to_flat(&self) -> Vec<Complex64> {
        self.x.iter().chain(&self.p).copied().collect()
    }

    pub fn from_flat(flat: &[Complex64]) -> Result<Self> {
        if flat.len() % 2 != 0 {
            return Err(Error::LengthMismatch {
                expected: flat.len() + 1,
                got: flat.len(),
            });
        }
        let n = flat.len() / 2;
        CMState::new(flat[..n].to_vec(), flat[n..].to_vec())
    }
}

pub(crate) fn check_pairwise(lat: &Lattice, x: &[Complex64]) -> Result<()> {
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            let d = x[i] - x[j];
            let pt = lat.point(d);
            if !(pt.dist_to_lattice > lat.singular_radius()) {
                return Err(Error::SingularArgument {
                    x: d,
                    dist: pt.dist_to_lattice,
                });
            }
        }
    }
    Ok(())
}

/// `(H₁, H₂, H₃)` with
/// `H₁ = −Σpᵢ`, `H₂ = Σpᵢ² − Σ_{i≠j}℘(xᵢ−xⱼ)`,
/// `H₃ = −Σpᵢ³ + 3Σ_{i≠j}pᵢ℘(xᵢ−xⱼ)`.
pub fn hamiltonians(lat: &Lattice, s: &CMState) -> Result<(Complex64, Complex64, Complex64)> {
    let n = s.n_particles();
    let mut h1 = ZERO;
    let mut h2 = ZERO;
    let mut h3 = ZERO;
    for &p in &s.p {
        h1 -= p;
        h2 += p * p;
        h3 -= p * p * p;
    }
    for i in 0..n {
        for j in i + 1..n {
            let wp = lat.wp(s.x[i] - s.x[j], 0)?;
            h2 -= 2.0 * wp;
            h3 += 3.0 * (s.p[i] + s.p[j]) * wp;
        }
    }
    Ok((h1, h2, h3))
}

/// Term magnitudes of `(H₁, H₂, H₃)`: each sum taken with absolute values.
/// On embedded pair states the partner momenta nearly cancel, so this, not
/// `|H_k|`, is the scale rounding errors live on.
pub fn hamiltonian_magnitudes(lat: &Lattice, s: &CMState) -> Result<[f64; 3]> {
    let n = s.n_particles();
    let mut m = [0.0f64; 3];
    for p in s.p.iter().map(|p| p.norm()) {
        m[0] += p;
        m[1] += p * p;
        m[2] += p * p * p;
    }
    for i in 0..n {
        for j in i + 1..n {
            let wp = lat.wp(s.x[i] - s.x[j], 0)?.norm();
            m[1] += 2.0 * wp;
            m[2] += 3.0 * (s.p[i].norm() + s.p[j].norm()) * wp;
        }
    }
    Ok(m)
}

/// Hamiltonian vector field `ẋᵢ = ∂H_a/∂pᵢ`, `ṗᵢ = −∂H_a/∂xᵢ`.
pub fn flow_rhs(lat: &Lattice, flow: Flow, s: &CMState) -> Result<Tangent> {
    let n = s.n_particles();
    let mut dx = vec![ZERO; n];
    let mut dp = vec![ZERO; n];
    flow_rhs_into(lat, flow, &s.x, &s.p, &mut dx, &mut dp)?;
    Ok(Tangent { dx, dp })
}

/// Allocation-free form of [`flow_rhs`] used inside the integrator.
pub fn flow_rhs_into(
    lat: &Lattice,
    flow: Flow,
    x: &[Complex64],
    p: &[Complex64],
    dx: &mut [Complex64],
    dp: &mut [Complex64],
) -> Result<()> {
    let n = x.len();
    match flow {
        Flow::T1 => {
            dx.fill(Complex64::new(-1.0, 0.0));
            dp.fill(ZERO);
        }
        Flow::T2 => {
            for i in 0..n {
                dx[i] = 2.0 * p[i];
                dp[i] = ZERO;
            }
            for i in 0..n {
                for j in i + 1..n {
                    let d1 = lat.wp(x[i] - x[j], 1)?;
                    dp[i] += 2.0 * d1;
                    dp[j] -= 2.0 * d1;
                }
            }
        }
        Flow::T3 => {
            for i in 0..n {
                dx[i] = -3.0 * p[i] * p[i];
                dp[i] = ZERO;
            }
            for i in 0..n {
                for j in i + 1..n {
                    let w = lat.wp_all(x[i] - x[j])?;
                    dx[i] += 3.0 * w[0];
                    dx[j] += 3.0 * w[0];
                    // ℘′ is odd, (pᵢ+pⱼ)℘′(xᵢ−xⱼ) flips sign for the partner.
                    let f = 3.0 * (p[i] + p[j]) * w[1];
                    dp[i] -= f;
                    dp[j] += f;
                }
            }
        }
    }
    Ok(())
}

/// Integrates flow `t_a` from `s0` over `[0, t_end]`. The state layout of
/// the returned trajectory is `[x, p]`.
pub fn integrate_flow(
    lat: &Lattice,
    flow: Flow,
    s0: &CMState,
    t_end: f64,
    tol: f64,
    samples: Option<&[f64]>,
) -> Result<Trajectory> {
    s0.check_collisions(lat)?;
    let n = s0.n_particles();
    let rhs = |_t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let (x, p) = y.split_at(n);
        let (dx, dp) = dy.split_at_mut(n);
        flow_rhs_into(lat, flow, x, p, dx, dp)
    };
    let integ = Integrator::new(tol)?;
    match samples {
        Some(ts) => integ.integrate_sampled(rhs, &s0.to_flat(), t_end, ts),
        None => integ.integrate(rhs, &s0.to_flat(), t_end),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sample_state() -> CMState {
        CMState::new(
            vec![c(0.1, 0.05), c(0.62, 0.31), c(-0.35, 0.52), c(0.2, -0.6)],
            vec![c(0.3, -0.2), c(-0.4, 0.1), c(0.05, 0.25), c(0.2, 0.0)],
        )
        .unwrap()
    }

    #[test]
    fn single_particle_hamiltonians() {
        let lat = Lattice::lemniscatic();
        let p = c(0.7, -0.3);
        let s = CMState::new(vec![c(0.2, 0.1)], vec![p]).unwrap();
        let (h1, h2, h3) = hamiltonians(&lat, &s).unwrap();
        assert_eq!(h1, -p);
        assert_eq!(h2, p * p);
        assert_eq!(h3, -p * p * p);
    }

    #[test]
    fn two_particles_at_rest() {
        let lat = Lattice::lemniscatic();
        let (a, b) = (c(0.1, 0.2), c(0.5, -0.3));
        let s = CMState::new(vec![a, b], vec![c(0.0, 0.0); 2]).unwrap();
        let (_, h2, _) = hamiltonians(&lat, &s).unwrap();
        let expect = -2.0 * lat.wp(a - b, 0).unwrap();
        assert!((h2 - expect).norm() < 1e-14 * expect.norm());
    }

    #[test]
    fn t1_is_uniform_translation() {
        let lat = Lattice::lemniscatic();
        let t = flow_rhs(&lat, Flow::T1, &sample_state()).unwrap();
        assert!(t.dx.iter().all(|&v| v == c(-1.0, 0.0)));
        assert!(t.dp.iter().all(|&v| v == c(0.0, 0.0)));
    }

    #[test]
    fn t3_single_particle() {
        let lat = Lattice::lemniscatic();
        let p = c(0.4, 0.3);
        let s = CMState::new(vec![c(0.2, 0.1)], vec![p]).unwrap();
        let t = flow_rhs(&lat, Flow::T3, &s).unwrap();
        assert_eq!(t.dx[0], -3.0 * p * p);
        assert_eq!(t.dp[0], c(0.0, 0.0));
    }

    #[test]
    fn t3_translation_invariant() {
        let lat = Lattice::lemniscatic();
        let s = sample_state();
        let mut shifted = s.clone();
        for x in &mut shifted.x {
            *x += c(0.37, -0.81);
        }
        let a = flow_rhs(&lat, Flow::T3, &s).unwrap();
        let b = flow_rhs(&lat, Flow::T3, &shifted).unwrap();
        for (u, v) in a.dx.iter().chain(&a.dp).zip(b.dx.iter().chain(&b.dp)) {
            assert!((u - v).norm() < 1e-11 * (1.0 + u.norm()));
        }
    }

    #[test]
    fn vector_fields_match_hamiltonian_gradients() {
        let lat = Lattice::lemniscatic();
        let s = sample_state();
        let h = 1e-5;
        for (flow, pick) in [(Flow::T2, 1usize), (Flow::T3, 2usize)] {
            let field = flow_rhs(&lat, flow, &s).unwrap();
            let ham = |st: &CMState| {
                let hs = hamiltonians(&lat, st).unwrap();
                [hs.0, hs.1, hs.2][pick]
            };
            for i in 0..s.n_particles() {
                let mut plus = s.clone();
                let mut minus = s.clone();
                plus.p[i] += h;
                minus.p[i] -= h;
                let dh_dp = (ham(&plus) - ham(&minus)) / (2.0 * h);
                assert!((dh_dp - field.dx[i]).norm() < 1e-6 * (1.0 + field.dx[i].norm()));

                let mut plus = s.clone();
                let mut minus = s.clone();
                plus.x[i] += h;
                minus.x[i] -= h;
                let dh_dx = (ham(&plus) - ham(&minus)) / (2.0 * h);
                assert!((-dh_dx - field.dp[i]).norm() < 1e-6 * (1.0 + field.dp[i].norm()));
            }
        }
    }

    #[test]
    fn collision_detected() {
        let lat = Lattice::lemniscatic();
        let s = CMState::new(
            vec![c(0.1, 0.1), c(0.1, 0.1) + lat.period(1, 0)],
            vec![c(0.0, 0.0); 2],
        )
        .unwrap();
        assert!(matches!(
            s.check_collisions(&lat),
            Err(Error::SingularArgument { .. })
        ));
        assert!(flow_rhs(&lat, Flow::T3, &s).is_err());
    }

    #[test]
    fn flow_index_parsing() {
        assert_eq!(Flow::try_from(3).unwrap(), Flow::T3);
        assert!(Flow::try_from(4).is_err());
        let f: Flow = serde_json::from_str("2").unwrap();
        assert_eq!(f, Flow::T2);
    }
}

//! Phase-space configurations in which the `2n` particles stick together in
//! pairs: particle `2i` sits at distance `ε` from particle `2i−1` and the
//! momenta follow
//!
//! ```text
//! p_{2i−1} =  1/ε + αᵢε + βᵢε²
//! p_{2i}   = −1/ε − αᵢε + βᵢε²,   βᵢ = β_{i,0} + β_{i,2}ε²
//! ```
//!
//! The separation is fixed to exactly `ε` (all pair scales equal to one), so
//! `(x_{2i−1}, αᵢ)` are coordinates on the pair manifold and the `β`
//! coefficients are functions of them.

pub mod study;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dynamics::{check_pairwise, CMState};
use crate::elliptic::Lattice;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Column groups of a reduced trajectory.
pub const REDUCED_GROUPS: [&str; 2] = ["x", "alpha"];

/// Pair positions `x_{2i−1}` and auxiliary momenta `αᵢ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedState {
    pub x: Vec<Complex64>,
    pub alpha: Vec<Complex64>,
}

impl ReducedState {
    pub fn new(x: Vec<Complex64>, alpha: Vec<Complex64>) -> Result<Self> {
        if x.len() != alpha.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: alpha.len(),
            });
        }
        if x.is_empty() {
            return Err(Error::Invalid("a reduced state needs at least one pair".into()));
        }
        Ok(ReducedState { x, alpha })
    }

    pub fn n_pairs(&self) -> usize {
        self.x.len()
    }

    pub fn check_collisions(&self, lat: &Lattice) -> Result<()> {
        check_pairwise(lat, &self.x)
    }

    /// `[x₁..x_n, α₁..α_n]`.
    pub fn to_flat(&self) -> Vec<Complex64> {
        self.x.iter().chain(&self.alpha).copied().collect()
    }

    pub fn from_flat(flat: &[Complex64]) -> Result<Self> {
        if flat.len() % 2 != 0 {
            return Err(Error::LengthMismatch {
                expected: flat.len() + 1,
                got: flat.len(),
            });
        }
        let n = flat.len() / 2;
        ReducedState::new(flat[..n].to_vec(), flat[n..].to_vec())
    }
}

/// Coefficients of the `β` series; `beta1` vanishes identically when all
/// pair separations are equal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaCoeffs {
    pub beta0: Vec<Complex64>,
    pub beta1: Vec<Complex64>,
    pub beta2: Vec<Complex64>,
}

/// A reduced state's embedding data at a given `ε`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairEmbedding {
    pub epsilon: f64,
    #[serde(flatten)]
    pub coeffs: BetaCoeffs,
}

impl PairEmbedding {
    pub fn new(lat: &Lattice, r: &ReducedState, epsilon: f64) -> Result<Self> {
        Ok(PairEmbedding {
            epsilon,
            coeffs: beta_coeffs(lat, r)?,
        })
    }

    /// `βᵢ = β_{i,0} + β_{i,1}ε + β_{i,2}ε²`.
    pub fn beta(&self, i: usize) -> Complex64 {
        let e = self.epsilon;
        self.coeffs.beta0[i] + self.coeffs.beta1[i] * e + self.coeffs.beta2[i] * e * e
    }
}

/// `β_{i,0} = −½Σ_{j≠i}℘′(xᵢ−xⱼ)` (pair separation stays `ε` to first
/// order) and `β_{i,2} = −αᵢβ_{i,0} − (1/12)Σ_{j≠i}℘‴(xᵢ−xⱼ)` (third-order
/// closure).
pub fn beta_coeffs(lat: &Lattice, r: &ReducedState) -> Result<BetaCoeffs> {
    let n = r.n_pairs();
    let mut s1 = vec![ZERO; n];
    let mut s3 = vec![ZERO; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = lat.wp_all(r.x[i] - r.x[j])?;
            s1[i] += w[1];
            s1[j] -= w[1];
            s3[i] += w[3];
            s3[j] -= w[3];
        }
    }
    let beta0: Vec<Complex64> = s1.iter().map(|s| -0.5 * s).collect();
    let beta2 = (0..n)
        .map(|i| -r.alpha[i] * beta0[i] - s3[i] / 12.0)
        .collect();
    Ok(BetaCoeffs {
        beta0,
        beta1: vec![ZERO; n],
        beta2,
    })
}

/// `α̇ᵢ` from the order-`ε` balance of `ṗ_{2i−1}` with all pair scales one:
/// `α̇ᵢ = −6αᵢΣ_{j≠i}℘′(xᵢ−xⱼ) − 12β_{i,2}`. Agrees with the reduced flow
/// once `β_{i,2}` takes its closure value.
pub fn alpha_rate_from_closure(
    lat: &Lattice,
    r: &ReducedState,
    beta2: &[Complex64],
) -> Result<Vec<Complex64>> {
    let n = r.n_pairs();
    let mut s1 = vec![ZERO; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = lat.wp(r.x[i] - r.x[j], 1)?;
            s1[i] += d;
            s1[j] -= d;
        }
    }
    Ok((0..n)
        .map(|i| -6.0 * r.alpha[i] * s1[i] - 12.0 * beta2[i])
        .collect())
}

/// Smallest `ε` accepted by [`embed`].
pub fn min_epsilon(lat: &Lattice) -> f64 {
    10.0 * lat.singular_radius()
}

/// Full `2n`-particle state on the pair manifold at separation `eps`.
pub fn embed(lat: &Lattice, r: &ReducedState, eps: f64) -> Result<CMState> {
    let min = min_epsilon(lat);
    if !(eps > min) || !eps.is_finite() {
        return Err(Error::EpsilonTooSmall { eps, min });
    }
    let n = r.n_pairs();
    for i in 0..n {
        for j in i + 1..n {
            let d = r.x[i] - r.x[j];
            for shift in [-eps, 0.0, eps] {
                let pt = lat.point(d + shift);
                if !(pt.dist_to_lattice > lat.singular_radius()) {
                    return Err(Error::CrossPairCollision(i, j));
                }
            }
        }
    }
    let emb = PairEmbedding::new(lat, r, eps)?;
    let mut x = Vec::with_capacity(2 * n);
    let mut p = Vec::with_capacity(2 * n);
    for i in 0..n {
        let lead = 1.0 / eps + r.alpha[i] * eps;
        let even = emb.beta(i) * eps * eps;
        x.push(r.x[i]);
        x.push(r.x[i] + eps);
        p.push(lead + even);
        p.push(-lead + even);
    }
    Ok(CMState { x, p })
}

/// Reads `(x_{2i−1}, αᵢ)` back off a full state, with
/// `αᵢ = ((p_{2i−1} − p_{2i})/2 − 1/ε)/ε`.
pub fn project(s: &CMState, eps: f64) -> Result<ReducedState> {
    let n_full = s.n_particles();
    if n_full % 2 != 0 {
        return Err(Error::OddParticleCount(n_full));
    }
    let n = n_full / 2;
    let x = (0..n).map(|i| s.x[2 * i]).collect();
    let alpha = (0..n)
        .map(|i| ((s.p[2 * i] - s.p[2 * i + 1]) / 2.0 - 1.0 / eps) / eps)
        .collect();
    Ok(ReducedState { x, alpha })
}

/// Like [`project`], but reads each pair's scale off the measured
/// separation `dᵢ = x_{2i} − x_{2i−1}`:
/// `αᵢ = ((p_{2i−1} − p_{2i})/2 − 1/dᵢ)/ε`.
///
/// Along the full flow the separation drifts from `ε` at order `ε³`, which
/// [`project`] would turn into an `O(1)` error in `α`.
pub fn project_measured(s: &CMState, eps: f64) -> Result<ReducedState> {
    let n_full = s.n_particles();
    if n_full % 2 != 0 {
        return Err(Error::OddParticleCount(n_full));
    }
    let n = n_full / 2;
    let x = (0..n).map(|i| s.x[2 * i]).collect();
    let alpha = (0..n)
        .map(|i| {
            let d = s.x[2 * i + 1] - s.x[2 * i];
            ((s.p[2 * i] - s.p[2 * i + 1]) / 2.0 - 1.0 / d) / eps
        })
        .collect();
    Ok(ReducedState { x, alpha })
}

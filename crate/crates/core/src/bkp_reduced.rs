//! First-order dynamics of stuck pairs in the gauge where each pair has
//! separation exactly `ε`, and the equivalent second-order equations for the
//! poles of elliptic BKP solutions.
//!
//! With `℘ᵢⱼ = ℘(xᵢ−xⱼ)`:
//!
//! ```text
//! ẋᵢ = −6αᵢ + 6 Σ_{j≠i} ℘ᵢⱼ
//! α̇ᵢ = −12αᵢ Σ_{j≠i} ℘′ᵢⱼ + Σ_{j≠i} ℘‴ᵢⱼ
//! ```
//!
//! Eliminating `α` gives
//! `ẍᵢ + 6Σ_{j≠i}(ẋᵢ+ẋⱼ)℘′ᵢⱼ − 72Σ_{j,k≠i, j≠k}℘ᵢⱼ℘′ᵢₖ = 0`.

use num_complex::Complex64;

use crate::dynamics::{Integrator, Trajectory};
use crate::elliptic::Lattice;
use crate::error::{Error, Result};
use crate::pair_manifold::ReducedState;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedTangent {
    pub dx: Vec<Complex64>,
    pub dalpha: Vec<Complex64>,
}

/// Pairwise `℘` data `w[i][j] = [℘, ℘′, ℘″, ℘‴](xᵢ − xⱼ)`, diagonal zero.
fn pair_table(lat: &Lattice, x: &[Complex64]) -> Result<Vec<Vec<[Complex64; 4]>>> {
    let n = x.len();
    let mut table = vec![vec![[ZERO; 4]; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = lat.wp_all(x[i] - x[j])?;
            table[i][j] = w;
            table[j][i] = [w[0], -w[1], w[2], -w[3]];
        }
    }
    Ok(table)
}

pub fn reduced_rhs(lat: &Lattice, r: &ReducedState) -> Result<ReducedTangent> {
    let n = r.n_pairs();
    let mut dx = vec![ZERO; n];
    let mut dalpha = vec![ZERO; n];
    reduced_rhs_into(lat, &r.x, &r.alpha, &mut dx, &mut dalpha)?;
    Ok(ReducedTangent { dx, dalpha })
}

pub fn reduced_rhs_into(
    lat: &Lattice,
    x: &[Complex64],
    alpha: &[Complex64],
    dx: &mut [Complex64],
    dalpha: &mut [Complex64],
) -> Result<()> {
    let n = x.len();
    let mut s0 = vec![ZERO; n];
    let mut s1 = vec![ZERO; n];
    let mut s3 = vec![ZERO; n];
    for i in 0..n {
        for j in i + 1..n {
            let w = lat.wp_all(x[i] - x[j])?;
            s0[i] += w[0];
            s0[j] += w[0];
            s1[i] += w[1];
            s1[j] -= w[1];
            s3[i] += w[3];
            s3[j] -= w[3];
        }
    }
    for i in 0..n {
        dx[i] = -6.0 * alpha[i] + 6.0 * s0[i];
        dalpha[i] = -12.0 * alpha[i] * s1[i] + s3[i];
    }
    Ok(())
}

/// `ẍ` along the reduced flow, by differentiating `ẋᵢ` in time:
/// `ẍᵢ = −6α̇ᵢ + 6Σ_{j≠i}℘′ᵢⱼ(ẋᵢ − ẋⱼ)`.
pub fn reduced_acceleration(lat: &Lattice, r: &ReducedState) -> Result<Vec<Complex64>> {
    let tan = reduced_rhs(lat, r)?;
    let table = pair_table(lat, &r.x)?;
    let n = r.n_pairs();
    Ok((0..n)
        .map(|i| {
            let mut acc = -6.0 * tan.dalpha[i];
            for j in (0..n).filter(|&j| j != i) {
                acc += 6.0 * table[i][j][1] * (tan.dx[i] - tan.dx[j]);
            }
            acc
        })
        .collect())
}

fn check_lengths(x: &[Complex64], others: &[&[Complex64]]) -> Result<()> {
    for o in others {
        if o.len() != x.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: o.len(),
            });
        }
    }
    Ok(())
}

/// Residual of the pole equations in the compact form, with the triple sum
/// over `j ≠ i`, `k ≠ i`, `j ≠ k`.
pub fn second_order_residual(
    lat: &Lattice,
    x: &[Complex64],
    xdot: &[Complex64],
    xddot: &[Complex64],
) -> Result<Vec<Complex64>> {
    check_lengths(x, &[xdot, xddot])?;
    let table = pair_table(lat, x)?;
    let n = x.len();
    Ok((0..n)
        .map(|i| {
            let mut r = xddot[i];
            for j in (0..n).filter(|&j| j != i) {
                r += 6.0 * (xdot[i] + xdot[j]) * table[i][j][1];
            }
            for j in (0..n).filter(|&j| j != i) {
                for k in (0..n).filter(|&k| k != i && k != j) {
                    r -= 72.0 * table[i][j][0] * table[i][k][1];
                }
            }
            r
        })
        .collect())
}

/// The same residual before `℘‴ = 12℘℘′` is used: the double sum runs over
/// all `j, k ≠ i` (including `j = k`) and `+6Σ℘‴ᵢⱼ` is added.
pub fn second_order_residual_expanded(
    lat: &Lattice,
    x: &[Complex64],
    xdot: &[Complex64],
    xddot: &[Complex64],
) -> Result<Vec<Complex64>> {
    check_lengths(x, &[xdot, xddot])?;
    let table = pair_table(lat, x)?;
    let n = x.len();
    Ok((0..n)
        .map(|i| {
            let mut r = xddot[i];
            for j in (0..n).filter(|&j| j != i) {
                r += 6.0 * (xdot[i] + xdot[j]) * table[i][j][1];
                r += 6.0 * table[i][j][3];
            }
            for j in (0..n).filter(|&j| j != i) {
                for k in (0..n).filter(|&k| k != i) {
                    r -= 72.0 * table[i][j][0] * table[i][k][1];
                }
            }
            r
        })
        .collect())
}

/// Integrates the reduced flow; state layout `[x, α]`.
pub fn integrate_reduced(
    lat: &Lattice,
    r0: &ReducedState,
    t_end: f64,
    tol: f64,
    samples: Option<&[f64]>,
) -> Result<Trajectory> {
    r0.check_collisions(lat)?;
    let n = r0.n_pairs();
    let rhs = |_t: f64, y: &[Complex64], dy: &mut [Complex64]| {
        let (x, a) = y.split_at(n);
        let (dx, da) = dy.split_at_mut(n);
        reduced_rhs_into(lat, x, a, dx, da)
    };
    let integ = Integrator::new(tol)?;
    match samples {
        Some(ts) => integ.integrate_sampled(rhs, &r0.to_flat(), t_end, ts),
        None => integ.integrate(rhs, &r0.to_flat(), t_end),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn fixture() -> ReducedState {
        ReducedState::new(
            vec![c(0.1, 0.0), c(0.6, 0.4), c(-0.3, -0.45)],
            vec![c(0.05, 0.0), c(0.0, -0.02), c(0.1, 0.07)],
        )
        .unwrap()
    }

    #[test]
    fn single_pair_moves_in_a_straight_line() {
        let lat = Lattice::lemniscatic();
        let alpha = c(0.2, -0.1);
        let r = ReducedState::new(vec![c(0.3, 0.1)], vec![alpha]).unwrap();
        let t = reduced_rhs(&lat, &r).unwrap();
        assert_eq!(t.dx[0], -6.0 * alpha);
        assert_eq!(t.dalpha[0], c(0.0, 0.0));
        let res = second_order_residual(&lat, &r.x, &t.dx, &[c(0.0, 0.0)]).unwrap();
        assert_eq!(res[0], c(0.0, 0.0));
    }

    #[test]
    fn translation_invariance() {
        let lat = Lattice::lemniscatic();
        let r = fixture();
        let mut moved = r.clone();
        for x in &mut moved.x {
            *x += c(-0.77, 0.29);
        }
        let a = reduced_rhs(&lat, &r).unwrap();
        let b = reduced_rhs(&lat, &moved).unwrap();
        for (u, v) in a.dx.iter().chain(&a.dalpha).zip(b.dx.iter().chain(&b.dalpha)) {
            assert!((u - v).norm() < 1e-10 * (1.0 + u.norm()));
        }
    }

    #[test]
    fn centre_velocity_identity() {
        let lat = Lattice::lemniscatic();
        let r = fixture();
        let t = reduced_rhs(&lat, &r).unwrap();
        let total: Complex64 = t.dx.iter().sum();
        let mut expect = -6.0 * r.alpha.iter().sum::<Complex64>();
        for i in 0..3 {
            for j in i + 1..3 {
                expect += 12.0 * lat.wp(r.x[i] - r.x[j], 0).unwrap();
            }
        }
        assert!((total - expect).norm() < 1e-12 * expect.norm());
    }

    #[test]
    fn analytic_acceleration_solves_pole_equations() {
        let lat = Lattice::lemniscatic();
        let r = fixture();
        let t = reduced_rhs(&lat, &r).unwrap();
        let acc = reduced_acceleration(&lat, &r).unwrap();
        let res = second_order_residual(&lat, &r.x, &t.dx, &acc).unwrap();
        let scale = acc.iter().map(|a| a.norm()).fold(1.0, f64::max);
        assert!(res.iter().all(|v| v.norm() < 1e-11 * scale), "{res:?}");
    }

    #[test]
    fn compact_and_expanded_forms_agree() {
        let lat = Lattice::lemniscatic();
        let r = fixture();
        let xdot = vec![c(0.3, 0.1), c(-1.0, 0.4), c(0.2, -0.7)];
        let xddot = vec![c(1.0, 0.0), c(0.5, 0.5), c(-2.0, 0.1)];
        let a = second_order_residual(&lat, &r.x, &xdot, &xddot).unwrap();
        let b = second_order_residual_expanded(&lat, &r.x, &xdot, &xddot).unwrap();
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).norm() < 1e-12 * (1.0 + u.norm()));
        }
    }

    #[test]
    fn length_mismatch() {
        let lat = Lattice::lemniscatic();
        let r = fixture();
        let err = second_order_residual(&lat, &r.x, &r.x[..2], &r.x).unwrap_err();
        assert_eq!(err, Error::LengthMismatch { expected: 3, got: 2 });
    }
}

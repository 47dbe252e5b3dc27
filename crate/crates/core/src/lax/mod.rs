//! Lax matrices of the full system, of the pair manifold and of the BKP pole
//! dynamics, with their characteristic determinants.

pub mod matrix;
pub mod spectral;

use num_complex::Complex64;

use crate::bkp_reduced::reduced_rhs;
use crate::dynamics::{integrate_flow, CMState, Flow};
use crate::elliptic::Lattice;
use crate::error::Result;
use crate::pair_manifold::ReducedState;

pub use matrix::{match_multisets, ComplexMatrix};
pub use spectral::{spectral_limit, SpectralLimit, SpectralScan};

/// `L_jk = pⱼδ_jk + (1−δ_jk)Φ(xⱼ−x_k, λ)`.
pub fn lax_cm(lat: &Lattice, s: &CMState, lambda: Complex64) -> Result<ComplexMatrix> {
    lat.zeta(lambda)?;
    let n = s.n_particles();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            m[(j, k)] = if j == k {
                s.p[j]
            } else {
                lat.phi(s.x[j] - s.x[k], lambda, 0)?
            };
        }
    }
    Ok(m)
}

/// Block form of the full Lax matrix restricted to the pair manifold,
/// truncated after the order-`ε` terms. Diagonal blocks are
/// `[[1/ε+αε, −1/ε+℘(λ)ε/2], [1/ε−℘(λ)ε/2, −1/ε−αε]]`; the block coupling
/// pairs `i`, `j` is `[[Φ, Φ−εΦ′], [Φ+εΦ′, Φ]]` at `xᵢ − xⱼ`.
pub fn lax_eps(lat: &Lattice, r: &ReducedState, eps: f64, lambda: Complex64) -> Result<ComplexMatrix> {
    let wp_l = lat.wp(lambda, 0)?;
    let n = r.n_pairs();
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    let inv = 1.0 / eps;
    for i in 0..n {
        let (a, b) = (2 * i, 2 * i + 1);
        m[(a, a)] = inv + r.alpha[i] * eps;
        m[(a, b)] = -inv + 0.5 * wp_l * eps;
        m[(b, a)] = inv - 0.5 * wp_l * eps;
        m[(b, b)] = -inv - r.alpha[i] * eps;
        for j in (0..n).filter(|&j| j != i) {
            let [phi, dphi, _] = lat.phi_all(r.x[i] - r.x[j], lambda)?;
            let (c, d) = (2 * j, 2 * j + 1);
            m[(a, c)] = phi;
            m[(a, d)] = phi - eps * dphi;
            m[(b, c)] = phi + eps * dphi;
            m[(b, d)] = phi;
        }
    }
    Ok(m)
}

/// `S⁻¹ (L^{(ε)} − zI) S` with `S = diag(Sᵢ)`, `Sᵢ = [[1, ε], [1, 0]]`.
///
/// Same determinant as `lax_eps(..).shifted(z)`, but every entry is `O(1)`:
/// diagonal blocks `[[−z−ε(α+℘/2), 1−℘ε²/2], [2α+℘, −z+ε(α+℘/2)]]`, and
/// off-diagonal blocks `[[2Φ+εΦ′, εΦ+ε²Φ′], [−2Φ′, −εΦ′]]`. Built entry by
/// entry so the `1/ε` cancellations never happen in floating point.
pub fn lax_eps_balanced(
    lat: &Lattice,
    r: &ReducedState,
    eps: f64,
    z: Complex64,
    lambda: Complex64,
) -> Result<ComplexMatrix> {
    let wp_l = lat.wp(lambda, 0)?;
    let n = r.n_pairs();
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        let (a, b) = (2 * i, 2 * i + 1);
        let h = r.alpha[i] + 0.5 * wp_l;
        m[(a, a)] = -z - eps * h;
        m[(a, b)] = 1.0 - 0.5 * wp_l * eps * eps;
        m[(b, a)] = 2.0 * h;
        m[(b, b)] = -z + eps * h;
        for j in (0..n).filter(|&j| j != i) {
            let [phi, dphi, _] = lat.phi_all(r.x[i] - r.x[j], lambda)?;
            let (c, d) = (2 * j, 2 * j + 1);
            m[(a, c)] = 2.0 * phi + eps * dphi;
            m[(a, d)] = eps * phi + eps * eps * dphi;
            m[(b, c)] = -2.0 * dphi;
            m[(b, d)] = -eps * dphi;
        }
    }
    Ok(m)
}

/// `det(L^{(ε)}(λ) − zI)`, evaluated through the balanced form.
pub fn char_det_eps(
    lat: &Lattice,
    r: &ReducedState,
    eps: f64,
    z: Complex64,
    lambda: Complex64,
) -> Result<Complex64> {
    lax_eps_balanced(lat, r, eps, z, lambda)?.det()
}

/// Lax matrix of the BKP pole dynamics,
/// `𝓛_jk = (−ẋⱼ + 6Σ_{l≠j}℘(xⱼ−x_l) − 3(z²−℘(λ)))δ_jk
///         − 6(1−δ_jk)(Φ′(xⱼ−x_k) + zΦ(xⱼ−x_k))`,
/// with `ẋ` taken from the reduced flow.
pub fn lax_bkp(
    lat: &Lattice,
    r: &ReducedState,
    z: Complex64,
    lambda: Complex64,
) -> Result<ComplexMatrix> {
    let wp_l = lat.wp(lambda, 0)?;
    let xdot = reduced_rhs(lat, r)?.dx;
    let n = r.n_pairs();
    let mut m = ComplexMatrix::zeros(n, n);
    for j in 0..n {
        let mut wsum = Complex64::new(0.0, 0.0);
        for l in (0..n).filter(|&l| l != j) {
            wsum += lat.wp(r.x[j] - r.x[l], 0)?;
        }
        m[(j, j)] = -xdot[j] + 6.0 * wsum - 3.0 * (z * z - wp_l);
        for k in (0..n).filter(|&k| k != j) {
            let [phi, dphi, _] = lat.phi_all(r.x[j] - r.x[k], lambda)?;
            m[(j, k)] = -6.0 * dphi - 6.0 * z * phi;
        }
    }
    Ok(m)
}

/// Largest matched distance between the eigenvalues of `L^CM(λ)` at
/// `samples` points of a flow trajectory and those at `t = 0`.
pub fn cm_isospectral_drift(
    lat: &Lattice,
    s0: &CMState,
    flow: Flow,
    lambda: Complex64,
    t_end: f64,
    tol: f64,
    samples: usize,
) -> Result<f64> {
    let ts: Vec<f64> = (1..=samples.max(1))
        .map(|k| t_end * k as f64 / samples.max(1) as f64)
        .collect();
    let traj = integrate_flow(lat, flow, s0, t_end, tol, Some(&ts))?;
    let spec0 = lax_cm(lat, s0, lambda)?.eigenvalues()?;
    let mut drift: f64 = 0.0;
    for y in &traj.states {
        let spec = lax_cm(lat, &CMState::from_flat(y)?, lambda)?.eigenvalues()?;
        drift = drift.max(match_multisets(&spec0, &spec)?);
    }
    Ok(drift)
}

/// Largest relative change of `det 𝓛(z, λ)` along the reduced flow, over
/// each `(z, λ)` in `points`.
pub fn bkp_det_drift(
    lat: &Lattice,
    r0: &ReducedState,
    points: &[(Complex64, Complex64)],
    t_end: f64,
    tol: f64,
    samples: usize,
) -> Result<f64> {
    let ts: Vec<f64> = (1..=samples.max(1))
        .map(|k| t_end * k as f64 / samples.max(1) as f64)
        .collect();
    let traj = crate::bkp_reduced::integrate_reduced(lat, r0, t_end, tol, Some(&ts))?;
    let d0 = points
        .iter()
        .map(|&(z, l)| lax_bkp(lat, r0, z, l)?.det())
        .collect::<Result<Vec<_>>>()?;
    let mut drift: f64 = 0.0;
    for y in &traj.states {
        let r = ReducedState::from_flat(y)?;
        for (&(z, l), d) in points.iter().zip(&d0) {
            let dt = lax_bkp(lat, &r, z, l)?.det()?;
            drift = drift.max((dt - d).norm() / d.norm());
        }
    }
    Ok(drift)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pair_manifold::embed;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn two_pairs() -> ReducedState {
        ReducedState::new(vec![c(0.1, 0.0), c(0.6, 0.4)], vec![c(0.05, 0.0), c(0.0, -0.02)]).unwrap()
    }

    #[test]
    fn cm_trace_and_offdiagonals() {
        let lat = Lattice::lemniscatic();
        let s = CMState::new(vec![c(0.1, 0.2), c(0.7, -0.3)], vec![c(0.4, 0.0), c(-0.1, 0.3)]).unwrap();
        let lambda = c(0.33, 0.27);
        let l = lax_cm(&lat, &s, lambda).unwrap();
        assert_eq!(l.trace(), s.p[0] + s.p[1]);
        assert_eq!(l[(0, 1)], lat.phi(s.x[0] - s.x[1], lambda, 0).unwrap());
        assert_eq!(l[(1, 0)], lat.phi(s.x[1] - s.x[0], lambda, 0).unwrap());
    }

    #[test]
    fn eps_matrix_matches_displayed_example() {
        let lat = Lattice::lemniscatic();
        let r = two_pairs();
        let (eps, lambda) = (1e-2, c(0.33, 0.27));
        let m = lax_eps(&lat, &r, eps, lambda).unwrap();
        let wp = lat.wp(lambda, 0).unwrap();
        let x13 = r.x[0] - r.x[1];
        let p13 = lat.phi(x13, lambda, 0).unwrap();
        let d13 = lat.phi(x13, lambda, 1).unwrap();
        let p31 = lat.phi(-x13, lambda, 0).unwrap();
        let d31 = lat.phi(-x13, lambda, 1).unwrap();
        let (a1, a3) = (r.alpha[0], r.alpha[1]);
        let e = eps;
        let expect = [
            [1.0 / e + a1 * e, -1.0 / e + 0.5 * wp * e, p13, p13 - e * d13],
            [1.0 / e - 0.5 * wp * e, -1.0 / e - a1 * e, p13 + e * d13, p13],
            [p31, p31 - e * d31, 1.0 / e + a3 * e, -1.0 / e + 0.5 * wp * e],
            [p31 + e * d31, p31, 1.0 / e - 0.5 * wp * e, -1.0 / e - a3 * e],
        ];
        for (i, row) in expect.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert!((m[(i, j)] - v).norm() < 1e-12, "entry ({i}, {j})");
            }
        }
    }

    #[test]
    fn balanced_form_preserves_determinant() {
        let lat = Lattice::lemniscatic();
        let r = two_pairs();
        let (z, lambda) = (c(0.8, -0.4), c(0.33, 0.27));
        for eps in [0.2, 0.05] {
            let raw = lax_eps(&lat, &r, eps, lambda).unwrap().shifted(z).det().unwrap();
            let bal = char_det_eps(&lat, &r, eps, z, lambda).unwrap();
            assert!((raw - bal).norm() < 1e-10 * (1.0 + bal.norm()), "eps {eps}: {raw} vs {bal}");
        }
    }

    #[test]
    fn single_pair_char_det_closed_form() {
        let lat = Lattice::lemniscatic();
        let alpha = c(0.3, -0.2);
        let r = ReducedState::new(vec![c(0.2, 0.1)], vec![alpha]).unwrap();
        let (z, lambda) = (c(0.5, 0.7), c(0.41, 0.13));
        let wp = lat.wp(lambda, 0).unwrap();
        for eps in [1e-1, 1e-2, 1e-3] {
            let d = char_det_eps(&lat, &r, eps, z, lambda).unwrap();
            let exact = z * z - 2.0 * alpha - wp + eps * eps * (0.25 * wp * wp - alpha * alpha);
            assert!((d - exact).norm() < 1e-12 * (1.0 + exact.norm()));
        }
    }

    #[test]
    fn single_pair_bkp_matrix() {
        let lat = Lattice::lemniscatic();
        let alpha = c(0.3, -0.2);
        let r = ReducedState::new(vec![c(0.2, 0.1)], vec![alpha]).unwrap();
        let (z, lambda) = (c(0.5, 0.7), c(0.41, 0.13));
        let wp = lat.wp(lambda, 0).unwrap();
        let l = lax_bkp(&lat, &r, z, lambda).unwrap();
        let expect = 6.0 * alpha - 3.0 * z * z + 3.0 * wp;
        assert!((l[(0, 0)] - expect).norm() < 1e-13);
        let d = l.det().unwrap();
        assert!((d + 3.0 * (z * z - 2.0 * alpha - wp)).norm() < 1e-12);
    }

    #[test]
    fn cm_spectrum_conserved_along_t2() {
        let lat = Lattice::lemniscatic();
        let s = CMState::new(
            vec![c(0.1, 0.05), c(0.62, 0.31), c(-0.35, 0.52), c(0.2, -0.6)],
            vec![c(0.3, -0.2), c(-0.4, 0.1), c(0.05, 0.25), c(0.2, 0.0)],
        )
        .unwrap();
        let drift = cm_isospectral_drift(&lat, &s, Flow::T2, c(0.33, 0.27), 0.5, 1e-12, 10).unwrap();
        assert!(drift < 1e-6, "{drift}");
    }

    #[test]
    fn bkp_det_conserved_along_reduced_flow() {
        let lat = Lattice::lemniscatic();
        let pts = [(c(0.5, 0.3), c(0.33, 0.27)), (c(-0.7, 0.2), c(0.41, -0.13))];
        let drift = bkp_det_drift(&lat, &two_pairs(), &pts, 0.5, 1e-12, 10).unwrap();
        assert!(drift < 1e-6, "{drift}");
    }

    #[test]
    fn cm_matrix_on_embedding_approaches_block_form() {
        let lat = Lattice::lemniscatic();
        let r = two_pairs();
        let lambda = c(0.33, 0.27);
        let mut devs = Vec::new();
        for eps in [4e-3, 2e-3, 1e-3] {
            let full = lax_cm(&lat, &embed(&lat, &r, eps).unwrap(), lambda).unwrap();
            let block = lax_eps(&lat, &r, eps, lambda).unwrap();
            devs.push(full.max_abs_diff(&block));
        }
        for w in devs.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!(slope > 1.9, "{devs:?}");
        }
    }
}

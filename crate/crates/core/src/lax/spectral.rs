//! The `ε → 0` limit of the characteristic determinant on the pair
//! manifold, determinant scans over `(z, λ)` grids and the comparison of
//! zero loci with the BKP Lax matrix.

use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{char_det_eps, lax_bkp};
use crate::elliptic::Lattice;
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::pair_manifold::ReducedState;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `ε = 1e-2 · 2^{-k}`, `k = 0..5`.
pub fn default_ladder() -> Vec<f64> {
    (0..6).map(|k| 1e-2 / f64::from(1u32 << k)).collect()
}

fn validate_ladder(ladder: &[f64]) -> Result<()> {
    if ladder.len() < 4 {
        return Err(Error::Invalid(format!(
            "epsilon ladder needs at least 4 entries, got {}",
            ladder.len()
        )));
    }
    if ladder.iter().any(|&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::Invalid("epsilon ladder entries must be positive".into()));
    }
    let ratio = ladder[0] / ladder[1];
    if !(ratio > 1.0) {
        return Err(Error::Invalid("epsilon ladder must be decreasing".into()));
    }
    if ladder
        .windows(2)
        .any(|w| ((w[0] / w[1]) / ratio - 1.0).abs() > 1e-9)
    {
        return Err(Error::Invalid("epsilon ladder must be geometric".into()));
    }
    Ok(())
}

/// Richardson extrapolation of `values[k] ≈ v(ladder[k])` to `ε = 0`
/// under an error expansion in even powers of `ε`. Returns the limit and
/// the spread between the last two diagonal entries of the tableau.
pub fn richardson_even(ladder: &[f64], values: &[Complex64]) -> (Complex64, f64) {
    let h: Vec<f64> = ladder.iter().map(|e| e * e).collect();
    let mut table: Vec<Vec<Complex64>> = Vec::with_capacity(values.len());
    for (k, v) in values.iter().enumerate() {
        let mut row = vec![*v];
        for m in 1..=k {
            let factor = h[k - m] / h[k] - 1.0;
            let prev = row[m - 1];
            let above = table[k - 1][m - 1];
            row.push(prev + (prev - above) / factor);
        }
        table.push(row);
    }
    let last = table.last().expect("ladder is non-empty");
    let value = *last.last().unwrap();
    let spread = if last.len() > 1 {
        (value - last[last.len() - 2]).norm()
    } else {
        f64::INFINITY
    };
    (value, spread)
}

/// Observed convergence order of a sequence sampled on a geometric ladder,
/// from the last three values. Differences at rounding level count as
/// converged and give `f64::INFINITY`.
pub fn observed_order(ladder: &[f64], values: &[Complex64]) -> f64 {
    let k = values.len();
    if k < 3 {
        return f64::NAN;
    }
    let scale = values.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let d1 = (values[k - 3] - values[k - 2]).norm();
    let d2 = (values[k - 2] - values[k - 1]).norm();
    let floor = 1e-13 * scale;
    if d2 <= floor {
        return f64::INFINITY;
    }
    (d1 / d2).ln() / (ladder[k - 3] / ladder[k - 2]).ln()
}

/// Outcome of one `ε → 0` extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralLimit {
    pub z: Complex64,
    pub lambda: Complex64,
    pub value: Complex64,
    pub order: f64,
    pub error_estimate: f64,
    pub ladder: Vec<f64>,
    pub ladder_values: Vec<Complex64>,
    /// `max_k |det(L^{(ε_k)} − zI)|`.
    pub max_abs: f64,
}

/// `R(z, λ) = lim_{ε→0} det(L^{(ε)}(λ) − zI)`, extrapolated over `ladder`.
pub fn spectral_limit(
    lat: &Lattice,
    r: &ReducedState,
    z: Complex64,
    lambda: Complex64,
    ladder: &[f64],
) -> Result<SpectralLimit> {
    validate_ladder(ladder)?;
    let ladder_values = ladder
        .iter()
        .map(|&eps| char_det_eps(lat, r, eps, z, lambda))
        .collect::<Result<Vec<_>>>()?;
    let (value, error_estimate) = richardson_even(ladder, &ladder_values);
    let order = observed_order(ladder, &ladder_values);
    if order < 1.0 || order.is_nan() {
        return Err(Error::NoConvergence { order });
    }
    let max_abs = ladder_values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    Ok(SpectralLimit {
        z,
        lambda,
        value,
        order,
        error_estimate,
        ladder: ladder.to_vec(),
        ladder_values,
        max_abs,
    })
}

/// Which determinant a scan samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScanSource {
    /// `det(L^{(ε)} − zI)` at one `ε`.
    Eps { eps: f64 },
    /// Extrapolated `R(z, λ)`.
    Limit { ladder: Vec<f64> },
    /// `det 𝓛(z, λ)` of the BKP Lax matrix.
    Bkp,
}

/// Determinant values on a `z × λ` grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralScan {
    pub z_grid: Vec<Complex64>,
    pub lambda_grid: Vec<Complex64>,
    /// `det_values[i][j]` at `(z_grid[i], lambda_grid[j])`.
    pub det_values: Vec<Vec<Complex64>>,
    pub eps_ladder: Option<Vec<f64>>,
    pub extrapolated: bool,
    pub source: ScanSource,
}

impl SpectralScan {
    pub fn compute(
        lat: &Lattice,
        r: &ReducedState,
        z_grid: &[Complex64],
        lambda_grid: &[Complex64],
        source: ScanSource,
        exec: Execution,
    ) -> Result<Self> {
        if let ScanSource::Limit { ladder } = &source {
            validate_ladder(ladder)?;
        }
        let cells: Vec<(usize, usize)> = (0..z_grid.len())
            .flat_map(|i| (0..lambda_grid.len()).map(move |j| (i, j)))
            .collect();
        let values = exec.try_map(&cells, |&(i, j)| {
            let (z, lambda) = (z_grid[i], lambda_grid[j]);
            match &source {
                ScanSource::Eps { eps } => char_det_eps(lat, r, *eps, z, lambda),
                ScanSource::Limit { ladder } => {
                    spectral_limit(lat, r, z, lambda, ladder).map(|l| l.value)
                }
                ScanSource::Bkp => lax_bkp(lat, r, z, lambda)?.det(),
            }
        })?;
        let mut det_values = vec![vec![ZERO; lambda_grid.len()]; z_grid.len()];
        for (&(i, j), v) in cells.iter().zip(values) {
            det_values[i][j] = v;
        }
        let (eps_ladder, extrapolated) = match &source {
            ScanSource::Limit { ladder } => (Some(ladder.clone()), true),
            _ => (None, false),
        };
        Ok(SpectralScan {
            z_grid: z_grid.to_vec(),
            lambda_grid: lambda_grid.to_vec(),
            det_values,
            eps_ladder,
            extrapolated,
            source,
        })
    }

    fn eps_label(&self) -> String {
        match &self.source {
            ScanSource::Eps { eps } => eps.to_string(),
            ScanSource::Limit { .. } => "extrapolated".to_string(),
            ScanSource::Bkp => "bkp".to_string(),
        }
    }

    /// Columns `Re z, Im z, Re lambda, Im lambda, Re det, Im det, eps`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "Re z,Im z,Re lambda,Im lambda,Re det,Im det,eps")?;
        let label = self.eps_label();
        for (i, z) in self.z_grid.iter().enumerate() {
            for (j, l) in self.lambda_grid.iter().enumerate() {
                let d = self.det_values[i][j];
                writeln!(w, "{},{},{},{},{},{},{}", z.re, z.im, l.re, l.im, d.re, d.im, label)?;
            }
        }
        Ok(())
    }
}

/// Coefficients `c₀..c_degree` of a polynomial known only through
/// evaluations, by discrete Fourier sampling on the circle `|z| = radius`
/// with `degree + 3` nodes. The two surplus coefficients should vanish and
/// are returned as the interpolation residual.
pub fn polynomial_from_samples<F>(f: F, degree: usize, radius: f64) -> Result<(Vec<Complex64>, f64)>
where
    F: Fn(Complex64) -> Result<Complex64>,
{
    let m = degree + 3;
    let nodes: Vec<Complex64> = (0..m)
        .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / m as f64))
        .collect();
    let vals = nodes.iter().map(|&z| f(z)).collect::<Result<Vec<_>>>()?;
    let mut coeffs = Vec::with_capacity(m);
    for j in 0..m {
        let mut acc = ZERO;
        for (k, v) in vals.iter().enumerate() {
            let phase = Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * (j * k) as f64 / m as f64);
            acc += v * phase;
        }
        coeffs.push(acc / (m as f64 * radius.powi(j as i32)));
    }
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    let residual = coeffs[degree + 1..].iter().map(|c| c.norm()).fold(0.0, f64::max) / scale;
    coeffs.truncate(degree + 1);
    Ok((coeffs, residual))
}

/// Roots of `Σ cⱼ zʲ` by simultaneous Weierstrass (Durand–Kerner)
/// iteration.
pub fn polynomial_roots(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut c = coeffs.to_vec();
    while c.len() > 1 && c.last().is_some_and(|v| v.norm() == 0.0) {
        c.pop();
    }
    let deg = c.len() - 1;
    if deg == 0 {
        return Ok(Vec::new());
    }
    let lead = c[deg];
    let monic: Vec<Complex64> = c.iter().map(|v| v / lead).collect();
    let bound = 1.0 + monic[..deg].iter().map(|v| v.norm()).fold(0.0, f64::max);
    let seed = Complex64::new(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..deg).map(|k| bound * 0.5 * seed.powu(k as u32 + 1)).collect();
    let eval = |z: Complex64| monic.iter().rev().fold(ZERO, |acc, &a| acc * z + a);
    for _ in 0..2000 {
        let mut delta: f64 = 0.0;
        for i in 0..deg {
            let mut denom = Complex64::new(1.0, 0.0);
            for j in (0..deg).filter(|&j| j != i) {
                denom *= roots[i] - roots[j];
            }
            if denom.norm() == 0.0 {
                roots[i] += Complex64::new(1e-8, 1e-8);
                continue;
            }
            let step = eval(roots[i]) / denom;
            roots[i] -= step;
            delta = delta.max(step.norm() / (1.0 + roots[i].norm()));
        }
        if delta < 1e-15 {
            return Ok(roots);
        }
    }
    Err(Error::NoConvergence { order: 0.0 })
}

/// Side-by-side zero loci in `z` of `R(z, λ)` and `det 𝓛(z, λ)` at one `λ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroLocusReport {
    pub lambda: Complex64,
    pub limit_coeffs: Vec<Complex64>,
    pub bkp_coeffs: Vec<Complex64>,
    pub limit_roots: Vec<Complex64>,
    pub bkp_roots: Vec<Complex64>,
    /// Largest root distance under the best matching.
    pub root_mismatch: f64,
    /// Spread of `c_R[j] / c_𝓛[j]` relative to the leading ratio.
    pub coefficient_ratio_spread: f64,
    /// The same two measures against `det 𝓛(−z, λ)`.
    pub reflected_root_mismatch: f64,
    pub reflected_coefficient_ratio_spread: f64,
    pub interpolation_residual: f64,
}

fn ratio_spread(a: &[Complex64], b: &[Complex64]) -> f64 {
    let lead = a[a.len() - 1] / b[b.len() - 1];
    let scale = b.iter().map(|c| c.norm()).fold(0.0, f64::max) * lead.norm();
    a.iter()
        .zip(b)
        .map(|(u, v)| (u - lead * v).norm() / scale)
        .fold(0.0, f64::max)
}

/// Compares the zero loci of the extrapolated pair-manifold determinant and
/// of the BKP Lax determinant, both polynomials of degree `2n` in `z`.
pub fn compare_zero_loci(
    lat: &Lattice,
    r: &ReducedState,
    lambda: Complex64,
    ladder: &[f64],
) -> Result<ZeroLocusReport> {
    let degree = 2 * r.n_pairs();
    let radius = 1.5;
    let (limit_coeffs, res_a) = polynomial_from_samples(
        |z| spectral_limit(lat, r, z, lambda, ladder).map(|l| l.value),
        degree,
        radius,
    )?;
    let (bkp_coeffs, res_b) =
        polynomial_from_samples(|z| lax_bkp(lat, r, z, lambda)?.det(), degree, radius)?;
    let limit_roots = polynomial_roots(&limit_coeffs)?;
    let bkp_roots = polynomial_roots(&bkp_coeffs)?;
    let root_mismatch = super::match_multisets(&limit_roots, &bkp_roots)?;
    let coefficient_ratio_spread = ratio_spread(&limit_coeffs, &bkp_coeffs);
    let reflected_roots: Vec<Complex64> = bkp_roots.iter().map(|z| -z).collect();
    let reflected_coeffs: Vec<Complex64> = bkp_coeffs
        .iter()
        .enumerate()
        .map(|(j, c)| if j % 2 == 0 { *c } else { -c })
        .collect();
    let reflected_root_mismatch = super::match_multisets(&limit_roots, &reflected_roots)?;
    let reflected_coefficient_ratio_spread = ratio_spread(&limit_coeffs, &reflected_coeffs);
    Ok(ZeroLocusReport {
        lambda,
        limit_coeffs,
        bkp_coeffs,
        limit_roots,
        bkp_roots,
        root_mismatch,
        coefficient_ratio_spread,
        reflected_root_mismatch,
        reflected_coefficient_ratio_spread,
        interpolation_residual: res_a.max(res_b),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn richardson_removes_even_powers() {
        let ladder = default_ladder();
        let vals: Vec<Complex64> = ladder
            .iter()
            .map(|e| c(2.0, -1.0) + c(3.0, 1.0) * e * e + c(-7.0, 0.0) * e.powi(4))
            .collect();
        let (v, _) = richardson_even(&ladder, &vals);
        assert!((v - c(2.0, -1.0)).norm() < 1e-13);
        assert!((observed_order(&ladder, &vals) - 2.0).abs() < 1e-3);
    }

    #[test]
    fn ladder_validation() {
        assert!(validate_ladder(&[1e-2, 5e-3, 2.5e-3]).is_err());
        assert!(validate_ladder(&[1e-2, 5e-3, 2e-3, 1e-3]).is_err());
        assert!(validate_ladder(&default_ladder()).is_ok());
    }

    #[test]
    fn non_converging_sequence_is_rejected() {
        let lat = Lattice::lemniscatic();
        let r = ReducedState::new(vec![c(0.2, 0.1)], vec![c(0.1, 0.0)]).unwrap();
        // Growing ladder values mimic a 1/ε blow-up.
        let ladder = default_ladder();
        let vals: Vec<Complex64> = ladder.iter().map(|e| c(1.0 / e, 0.0)).collect();
        assert!(observed_order(&ladder, &vals) < 0.0);
        assert!(spectral_limit(&lat, &r, c(0.3, 0.0), c(0.2, 0.3), &ladder).is_ok());
    }

    #[test]
    fn polynomial_round_trip() {
        let roots = [c(1.0, 0.5), c(-0.3, 0.2), c(0.1, -1.1), c(0.7, 0.7)];
        let f = |z: Complex64| Ok(roots.iter().fold(c(2.0, 1.0), |acc, r| acc * (z - r)));
        let (coeffs, residual) = polynomial_from_samples(f, 4, 1.5).unwrap();
        assert!(residual < 1e-13);
        let found = polynomial_roots(&coeffs).unwrap();
        assert!(crate::lax::match_multisets(&found, &roots).unwrap() < 1e-10);
    }
}

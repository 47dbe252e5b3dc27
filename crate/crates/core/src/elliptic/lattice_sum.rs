//! Direct truncated lattice sums for `℘` and `ζ`.
//!
//! Slow and only algebraically convergent, so this is a reference path for
//! checking the theta-series kernel, never used by the dynamics.

use num_complex::Complex64;

use super::Lattice;

/// Truncation used by the reference checks: `|m|, |n| <= 300`.
pub const DEFAULT_CUTOFF: i64 = 300;

/// `Σ′ term(w)` over `w = 2mω₁ + 2nω₂`, `|m|, |n| <= cutoff`, with the
/// outermost shell weighted by `edge`.
fn square_sum<F: Fn(Complex64) -> Complex64>(lat: &Lattice, cutoff: i64, edge: f64, term: F) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for m in -cutoff..=cutoff {
        for n in -cutoff..=cutoff {
            if m == 0 && n == 0 {
                continue;
            }
            let t = term(lat.period(m, n));
            acc += if m.abs() == cutoff || n.abs() == cutoff { edge * t } else { t };
        }
    }
    acc
}

fn wp_weighted(lat: &Lattice, x: Complex64, cutoff: i64, edge: f64) -> Complex64 {
    1.0 / (x * x)
        + square_sum(lat, cutoff, edge, |w| {
            let d = x - w;
            1.0 / (d * d) - 1.0 / (w * w)
        })
}

fn zeta_weighted(lat: &Lattice, x: Complex64, cutoff: i64, edge: f64) -> Complex64 {
    1.0 / x
        + square_sum(lat, cutoff, edge, |w| {
            let iw = 1.0 / w;
            1.0 / (x - w) + iw + x * iw * iw
        })
}

fn wp_prime_weighted(lat: &Lattice, x: Complex64, cutoff: i64, edge: f64) -> Complex64 {
    -2.0 / (x * x * x) + square_sum(lat, cutoff, edge, |w| -2.0 / (x - w).powu(3))
}

/// `x⁻² + Σ′ [(x−w)⁻² − w⁻²]` over `w = 2mω₁ + 2nω₂`, `|m|, |n| <= cutoff`.
pub fn wp(lat: &Lattice, x: Complex64, cutoff: i64) -> Complex64 {
    wp_weighted(lat, x, cutoff, 1.0)
}

/// `x⁻¹ + Σ′ [(x−w)⁻¹ + w⁻¹ + x w⁻²]`, same truncation.
pub fn zeta(lat: &Lattice, x: Complex64, cutoff: i64) -> Complex64 {
    zeta_weighted(lat, x, cutoff, 1.0)
}

/// `℘′ = −2 Σ (x−w)⁻³`, absolutely convergent.
pub fn wp_prime(lat: &Lattice, x: Complex64, cutoff: i64) -> Complex64 {
    wp_prime_weighted(lat, x, cutoff, 1.0)
}

/// Two Richardson levels over cutoffs `c`, `c/2`, `c/4`. With the outer
/// shell at half weight the truncation tail expands in even powers
/// `c⁻², c⁻⁴, …` (the plain truncation also has a `c⁻³` term), and the two
/// levels leave an `O(c⁻⁶)` error.
fn richardson<F: Fn(i64) -> Complex64>(sum: F, cutoff: i64) -> Complex64 {
    let s0 = sum(cutoff);
    let s1 = sum(cutoff / 2);
    let s2 = sum(cutoff / 4);
    let e0 = s0 + (s0 - s1) / 3.0;
    let e1 = s1 + (s1 - s2) / 3.0;
    e0 + (e0 - e1) / 15.0
}

/// `℘` with the truncation tail extrapolated away.
pub fn wp_extrapolated(lat: &Lattice, x: Complex64, cutoff: i64) -> Complex64 {
    richardson(|c| wp_weighted(lat, x, c, 0.5), cutoff)
}

/// `℘′` with the truncation tail extrapolated away.
pub fn wp_prime_extrapolated(lat: &Lattice, x: Complex64, cutoff: i64) -> Complex64 {
    richardson(|c| wp_prime_weighted(lat, x, c, 0.5), cutoff)
}

/// `ζ` with the truncation tail extrapolated away.
pub fn zeta_extrapolated(lat: &Lattice, x: Complex64, cutoff: i64) -> Complex64 {
    richardson(|c| zeta_weighted(lat, x, c, 0.5), cutoff)
}

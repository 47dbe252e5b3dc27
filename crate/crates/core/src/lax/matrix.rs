//! Small dense complex matrices: LU determinant and QR eigenvalues.

use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            entries: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().find(|row| row.len() != c) {
            return Err(Error::LengthMismatch {
                expected: c,
                got: bad.len(),
            });
        }
        Ok(ComplexMatrix {
            rows: r,
            cols: c,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, d) in diag.iter().enumerate() {
            m[(i, i)] = *d;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `self − z·I`.
    pub fn shifted(&self, z: Complex64) -> Self {
        let mut m = self.clone();
        for i in 0..self.rows.min(self.cols) {
            m[(i, i)] -= z;
        }
        m
    }

    /// Largest entry-wise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    fn require_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }

    /// Determinant by LU with partial pivoting. A singular matrix yields
    /// zero (up to rounding).
    pub fn det(&self) -> Result<Complex64> {
        let n = self.require_square()?;
        let mut a = self.entries.clone();
        let mut det = ONE;
        for k in 0..n {
            let (piv, mag) = (k..n)
                .map(|i| (i, a[i * n + k].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if mag == 0.0 {
                return Ok(ZERO);
            }
            if piv != k {
                for j in 0..n {
                    a.swap(k * n + j, piv * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in k + 1..n {
                let f = a[i * n + k] / pivot;
                if f == ZERO {
                    continue;
                }
                for j in k + 1..n {
                    let v = a[k * n + j];
                    a[i * n + j] -= f * v;
                }
            }
        }
        Ok(det)
    }

    /// Eigenvalues by Hessenberg reduction and Wilkinson-shifted QR.
    pub fn eigenvalues(&self) -> Result<Vec<Complex64>> {
        let n = self.require_square()?;
        let mut h = self.clone();
        h.to_hessenberg();
        let mut hi = n.saturating_sub(1);
        let mut iter = 0usize;
        let mut total = 0usize;
        while hi > 0 {
            let mut l = hi;
            while l > 0 {
                let scale = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
                if h[(l, l - 1)].norm() <= f64::EPSILON * scale.max(f64::MIN_POSITIVE) {
                    h[(l, l - 1)] = ZERO;
                    break;
                }
                l -= 1;
            }
            if l == hi {
                hi -= 1;
                iter = 0;
                continue;
            }
            iter += 1;
            total += 1;
            if total > 1000 * n {
                return Err(Error::NoConvergence { order: 0.0 });
            }
            let mu = if iter % 11 == 10 {
                // exceptional shift to break cycles
                h[(hi, hi)] + h[(hi, hi - 1)].norm() * Complex64::new(0.75, 0.4)
            } else {
                wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
            };
            h.qr_step(l, hi, mu);
        }
        Ok((0..n).map(|i| h[(i, i)]).collect())
    }

    fn to_hessenberg(&mut self) {
        let n = self.rows;
        for k in 0..n.saturating_sub(2) {
            let alpha_norm: f64 = (k + 1..n).map(|i| self[(i, k)].norm_sqr()).sum::<f64>().sqrt();
            if alpha_norm == 0.0 {
                continue;
            }
            let x0 = self[(k + 1, k)];
            let phase = if x0.norm() == 0.0 { ONE } else { x0 / x0.norm() };
            let mut v: Vec<Complex64> = (k + 1..n).map(|i| self[(i, k)]).collect();
            v[0] += phase * alpha_norm;
            let vnorm2: f64 = v.iter().map(|c| c.norm_sqr()).sum();
            if vnorm2 == 0.0 {
                continue;
            }
            // A ← (I − 2vv^H/|v|²) A (I − 2vv^H/|v|²)
            for j in 0..n {
                let dot: Complex64 = (k + 1..n).map(|i| v[i - k - 1].conj() * self[(i, j)]).sum();
                let f = 2.0 * dot / vnorm2;
                for i in k + 1..n {
                    self[(i, j)] -= f * v[i - k - 1];
                }
            }
            for i in 0..n {
                let dot: Complex64 = (k + 1..n).map(|j| self[(i, j)] * v[j - k - 1]).sum();
                let f = 2.0 * dot / vnorm2;
                for j in k + 1..n {
                    self[(i, j)] -= f * v[j - k - 1].conj();
                }
            }
        }
    }

    /// One shifted QR sweep on the active Hessenberg block `lo..=hi`.
    fn qr_step(&mut self, lo: usize, hi: usize, mu: Complex64) {
        for i in lo..=hi {
            self[(i, i)] -= mu;
        }
        let mut rotations = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let a = self[(k, k)];
            let b = self[(k + 1, k)];
            let r = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if r == 0.0 { (ONE, ZERO) } else { (a / r, b / r) };
            for j in k..=hi {
                let x = self[(k, j)];
                let y = self[(k + 1, j)];
                self[(k, j)] = c.conj() * x + s.conj() * y;
                self[(k + 1, j)] = -s * x + c * y;
            }
            rotations.push((c, s));
        }
        for (idx, (c, s)) in rotations.into_iter().enumerate() {
            let k = lo + idx;
            for i in lo..=hi.min(k + 2) {
                let x = self[(i, k)];
                let y = self[(i, k + 1)];
                self[(i, k)] = x * c + y * s;
                self[(i, k + 1)] = -x * s.conj() + y * c.conj();
            }
        }
        for i in lo..=hi {
            self[(i, i)] += mu;
        }
    }
}

/// Eigenvalue of `[[a, b], [c, d]]` closer to `d`.
fn wilkinson_shift(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Complex64 {
    let tr_half = 0.5 * (a + d);
    let disc = (0.25 * (a - d) * (a - d) + b * c).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() < (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

/// Smallest total distance `Σ|aᵢ − b_{π(i)}|` over matchings `π`, returned
/// as the largest single distance of the optimal matching. Exhaustive for
/// up to eight values, greedy beyond.
pub fn match_multisets(a: &[Complex64], b: &[Complex64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let n = a.len();
    if n > 8 {
        let mut used = vec![false; n];
        let mut worst: f64 = 0.0;
        for x in a {
            let (j, d) = (0..n)
                .filter(|&j| !used[j])
                .map(|j| (j, (x - b[j]).norm()))
                .fold((usize::MAX, f64::INFINITY), |m, c| if c.1 < m.1 { c } else { m });
            used[j] = true;
            worst = worst.max(d);
        }
        return Ok(worst);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best = (f64::INFINITY, 0.0);
    permute(&mut perm, 0, &mut |p| {
        let total: f64 = p.iter().enumerate().map(|(i, &j)| (a[i] - b[j]).norm()).sum();
        if total < best.0 {
            let worst = p
                .iter()
                .enumerate()
                .map(|(i, &j)| (a[i] - b[j]).norm())
                .fold(0.0, f64::max);
            best = (total, worst);
        }
    });
    Ok(best.1)
}

fn permute<F: FnMut(&[usize])>(perm: &mut Vec<usize>, k: usize, visit: &mut F) {
    if k == perm.len() {
        visit(perm);
        return;
    }
    for i in k..perm.len() {
        perm.swap(k, i);
        permute(perm, k + 1, visit);
        perm.swap(k, i);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn determinant_basics() {
        assert_eq!(ComplexMatrix::identity(4).det().unwrap(), ONE);
        let d = ComplexMatrix::from_diagonal(&[c(2.0, 0.0), c(0.0, 3.0)]);
        assert_eq!(d.det().unwrap(), c(0.0, 6.0));
        let (a, b, cc, dd) = (c(0.3, -1.2), c(2.0, 0.5), c(-0.7, 0.1), c(1.1, 1.9));
        let m = ComplexMatrix::from_rows(vec![vec![a, b], vec![cc, dd]]).unwrap();
        let expect = a * dd - b * cc;
        assert!((m.det().unwrap() - expect).norm() < 1e-14 * expect.norm());
        let sing = ComplexMatrix::from_rows(vec![vec![a, b], vec![2.0 * a, 2.0 * b]]).unwrap();
        assert!(sing.det().unwrap().norm() < 1e-15);
        assert!(ComplexMatrix::zeros(2, 3).det().is_err());
    }

    #[test]
    fn row_swaps_flip_sign() {
        let m = ComplexMatrix::from_rows(vec![
            vec![c(0.0, 0.0), c(1.0, 0.0)],
            vec![c(1.0, 0.0), c(0.0, 0.0)],
        ])
        .unwrap();
        assert_eq!(m.det().unwrap(), c(-1.0, 0.0));
    }

    #[test]
    fn eigenvalues_of_triangular_and_companion() {
        let t = ComplexMatrix::from_rows(vec![
            vec![c(1.0, 1.0), c(2.0, 0.0), c(0.5, 0.0)],
            vec![ZERO, c(-2.0, 0.0), c(1.0, 3.0)],
            vec![ZERO, ZERO, c(0.0, 4.0)],
        ])
        .unwrap();
        let ev = t.eigenvalues().unwrap();
        let gap = match_multisets(&ev, &[c(1.0, 1.0), c(-2.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!(gap < 1e-12);

        // rotation: eigenvalues ±i, equal modulus
        let r = ComplexMatrix::from_rows(vec![vec![ZERO, c(-1.0, 0.0)], vec![ONE, ZERO]]).unwrap();
        let ev = r.eigenvalues().unwrap();
        assert!(match_multisets(&ev, &[c(0.0, 1.0), c(0.0, -1.0)]).unwrap() < 1e-12);
    }

    #[test]
    fn matching_is_order_free() {
        let a = [c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)];
        let b = [c(3.0, 0.0), c(1.0, 0.1), c(2.0, 0.0)];
        assert!((match_multisets(&a, &b).unwrap() - 0.1).abs() < 1e-12);
    }
}

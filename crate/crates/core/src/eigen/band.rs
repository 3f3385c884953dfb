//! Banded Cholesky factorization for symmetric positive-definite matrices.

use crate::error::{Error, Result};

/// Lower factor stored row by row; row `i` holds columns `i-b ..= i`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    band: usize,
    rows: Vec<f64>,
}

impl BandCholesky {
    /// Factors the matrix whose lower-band entries are given by `entry(i, j)`
    /// for `i - band <= j <= i`.
    pub fn factor<F: Fn(usize, usize) -> f64>(n: usize, band: usize, entry: F) -> Result<Self> {
        let w = band + 1;
        let mut rows = vec![0.0; n * w];
        for i in 0..n {
            let first = i.saturating_sub(band);
            for j in first..=i {
                let jfirst = j.saturating_sub(band);
                let k0 = first.max(jfirst);
                let ri = i * w + band - i; // rows[ri + k] is L[i][k]
                let rj = j * w + band - j;
                let mut sum = entry(i, j);
                let li = &rows[ri + k0..ri + j];
                let lj = &rows[rj + k0..rj + j];
                sum -= li.iter().zip(lj).map(|(a, b)| a * b).sum::<f64>();
                if i == j {
                    if !(sum > 0.0) {
                        return Err(Error::Numerics(format!(
                            "matrix not positive definite at row {i}"
                        )));
                    }
                    rows[ri + i] = sum.sqrt();
                } else {
                    rows[ri + j] = sum / rows[rj + j];
                }
            }
        }
        Ok(Self { n, band, rows })
    }

    /// Solves `A x = b` in place.
    pub fn solve(&self, x: &mut [f64]) {
        let w = self.band + 1;
        let b = self.band;
        for i in 0..self.n {
            let first = i.saturating_sub(b);
            let ri = i * w + b - i;
            let s: f64 = self.rows[ri + first..ri + i]
                .iter()
                .zip(&x[first..i])
                .map(|(l, v)| l * v)
                .sum();
            x[i] = (x[i] - s) / self.rows[ri + i];
        }
        for i in (0..self.n).rev() {
            let ri = i * w + b - i;
            x[i] /= self.rows[ri + i];
            let xi = x[i];
            let first = i.saturating_sub(b);
            for k in first..i {
                x[k] -= self.rows[ri + k] * xi;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_pentadiagonal_system() {
        let n = 40;
        let a = |i: usize, j: usize| -> f64 {
            match i.abs_diff(j) {
                0 => 6.0 + i as f64 * 0.1,
                1 => -1.0,
                3 => -0.5,
                _ => 0.0,
            }
        };
        let chol = BandCholesky::factor(n, 3, |i, j| a(i, j)).unwrap();
        let truth: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        let mut rhs: Vec<f64> = (0..n)
            .map(|i| (0..n).map(|j| a(i, j) * truth[j]).sum())
            .collect();
        chol.solve(&mut rhs);
        for (x, t) in rhs.iter().zip(&truth) {
            assert!((x - t).abs() < 1e-12);
        }
    }

    #[test]
    fn indefinite_fails() {
        assert!(BandCholesky::factor(3, 1, |i, j| if i == j { -1.0 } else { 0.0 }).is_err());
    }
}

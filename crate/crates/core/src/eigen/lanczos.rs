//! Shift-invert Lanczos for the lowest eigenpairs of a five-point grid operator.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use super::band::BandCholesky;
use crate::error::{Error, Result};

/// Symmetric operator on an `n1 × n2` grid with nearest-neighbour couplings.
///
/// Unknowns are stored with the shorter axis running fastest so the
/// bandwidth of the matrix equals the shorter grid dimension.
#[derive(Debug, Clone)]
pub struct GridOperator {
    pub n1: usize,
    pub n2: usize,
    transposed: bool,
    diag: Vec<f64>,
    /// coupling to the next unknown along the fast axis
    fast: Vec<f64>,
    /// coupling to the next unknown along the slow axis
    slow: Vec<f64>,
}

impl GridOperator {
    /// `diag(i, j)`, `c1(i, j)` coupling `(i, j)`–`(i+1, j)`, `c2(i, j)`
    /// coupling `(i, j)`–`(i, j+1)`.
    pub fn new<D, C1, C2>(n1: usize, n2: usize, diag: D, c1: C1, c2: C2) -> Self
    where
        D: Fn(usize, usize) -> f64,
        C1: Fn(usize, usize) -> f64,
        C2: Fn(usize, usize) -> f64,
    {
        let transposed = n1 < n2;
        let (slow_n, fast_n) = if transposed { (n2, n1) } else { (n1, n2) };
        let at = |s: usize, f: usize| if transposed { (f, s) } else { (s, f) };
        let len = n1 * n2;
        let mut d = vec![0.0; len];
        let mut fast = vec![0.0; len];
        let mut slow = vec![0.0; len];
        for s in 0..slow_n {
            for f in 0..fast_n {
                let k = s * fast_n + f;
                let (i, j) = at(s, f);
                d[k] = diag(i, j);
                if f + 1 < fast_n {
                    fast[k] = if transposed { c1(i, j) } else { c2(i, j) };
                }
                if s + 1 < slow_n {
                    slow[k] = if transposed { c2(i, j) } else { c1(i, j) };
                }
            }
        }
        Self { n1, n2, transposed, diag: d, fast, slow }
    }

    pub fn len(&self) -> usize {
        self.n1 * self.n2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn fast_n(&self) -> usize {
        if self.transposed {
            self.n1
        } else {
            self.n2
        }
    }

    /// Storage index of grid point `(i, j)`.
    pub fn index(&self, i: usize, j: usize) -> usize {
        if self.transposed {
            j * self.n1 + i
        } else {
            i * self.n2 + j
        }
    }

    /// Lower bound on the spectrum from Gershgorin discs.
    pub fn gershgorin_lower_bound(&self) -> f64 {
        let b = self.fast_n();
        let len = self.len();
        (0..len)
            .map(|k| {
                let mut r = 0.0;
                if k + 1 < len {
                    r += self.fast[k].abs();
                }
                if k >= 1 {
                    r += self.fast[k - 1].abs();
                }
                if k + b < len {
                    r += self.slow[k].abs();
                }
                if k >= b {
                    r += self.slow[k - b].abs();
                }
                self.diag[k] - r
            })
            .fold(f64::INFINITY, f64::min)
    }

    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let b = self.fast_n();
        for k in 0..self.len() {
            let mut v = self.diag[k] * x[k];
            if k + 1 < self.len() {
                v += self.fast[k] * x[k + 1];
            }
            if k >= 1 {
                v += self.fast[k - 1] * x[k - 1];
            }
            if k + b < self.len() {
                v += self.slow[k] * x[k + b];
            }
            if k >= b {
                v += self.slow[k - b] * x[k - b];
            }
            y[k] = v;
        }
    }

    fn shifted_factor(&self, shift: f64) -> Result<BandCholesky> {
        let b = self.fast_n();
        BandCholesky::factor(self.len(), b, |i, j| {
            if i == j {
                self.diag[i] - shift
            } else if i == j + 1 {
                self.fast[j]
            } else if i == j + b {
                self.slow[j]
            } else {
                0.0
            }
        })
    }

    /// Reorders a storage vector into row-major `(i, j)` order.
    pub fn to_grid_order(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for i in 0..self.n1 {
            for j in 0..self.n2 {
                out[i * self.n2 + j] = x[self.index(i, j)];
            }
        }
        out
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lowest `count` eigenpairs of `op`, in ascending order. Vectors are unit
/// Euclidean norm in storage order.
pub fn lowest_eigenpairs(op: &GridOperator, count: usize, seed: u64) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let n = op.len();
    if count == 0 {
        return Ok((vec![], vec![]));
    }
    if count > n {
        return Err(Error::InvalidParameter(format!("{count} states requested from {n} unknowns")));
    }
    let shift = op.gershgorin_lower_bound();
    let shift = shift - 1e-9 * shift.abs().max(f64::MIN_POSITIVE);
    let chol = op.shifted_factor(shift)?;

    let max_dim = n.min((20 * count + 200).max(400)).min(2000);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);

    let mut basis: Vec<Vec<f64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut converged: Option<SymmetricEigen<f64, nalgebra::Dyn>> = None;

    for j in 0..max_dim {
        let mut w = basis[j].clone();
        chol.solve(&mut w);
        let a = dot(&w, &basis[j]);
        alpha.push(a);
        // full reorthogonalization, two passes
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&w, q);
                w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
            }
        }
        let b = dot(&w, &w).sqrt();
        let m = j + 1;
        let exhausted = b <= 1e-14 * a.abs() || m == n;
        if m >= count && (m % 10 == 0 || exhausted || m == max_dim) {
            let t = DMatrix::from_fn(m, m, |r, c| {
                if r == c {
                    alpha[r]
                } else if r == c + 1 {
                    beta[c]
                } else if c == r + 1 {
                    beta[r]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let mut order: Vec<usize> = (0..m).collect();
            order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
            let ok = order[..count].iter().all(|&k| {
                let theta = eig.eigenvalues[k];
                let resid = b * eig.eigenvectors[(m - 1, k)].abs();
                resid <= 1e-11 * theta.abs()
            });
            if ok || exhausted {
                converged = Some(eig);
                break;
            }
        }
        if exhausted {
            break;
        }
        beta.push(b);
        w.iter_mut().for_each(|x| *x /= b);
        basis.push(w);
    }

    let eig = converged.ok_or_else(|| {
        Error::Numerics(format!("Lanczos did not converge within {max_dim} vectors"))
    })?;
    let m = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));

    let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
    let mut hx = vec![0.0; n];
    for &k in &order[..count] {
        let mut x = vec![0.0; n];
        for (r, q) in basis.iter().take(m).enumerate() {
            let c = eig.eigenvectors[(r, k)];
            x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += c * qi);
        }
        let norm = dot(&x, &x).sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        op.apply(&x, &mut hx);
        pairs.push((dot(&x, &hx), x));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs.into_iter().unzip())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dirichlet_square_modes() {
        // -Laplacian on a 30 x 20 unit-spaced grid
        let (n1, n2) = (30, 20);
        let op = GridOperator::new(n1, n2, |_, _| 4.0, |_, _| -1.0, |_, _| -1.0);
        let (vals, vecs) = lowest_eigenpairs(&op, 6, 7).unwrap();
        let mut exact: Vec<f64> = (1..=6)
            .flat_map(|p| (1..=6).map(move |q| (p, q)))
            .map(|(p, q)| {
                4.0 - 2.0 * (PI * p as f64 / (n1 + 1) as f64).cos() - 2.0 * (PI * q as f64 / (n2 + 1) as f64).cos()
            })
            .collect();
        exact.sort_by(f64::total_cmp);
        for (v, e) in vals.iter().zip(&exact) {
            assert!((v - e).abs() < 1e-10, "{v} vs {e}");
        }
        for a in 0..vecs.len() {
            for b in 0..a {
                assert!(dot(&vecs[a], &vecs[b]).abs() < 1e-8);
            }
        }
    }
}

//! Symmetric tridiagonal eigenproblems: Sturm-sequence bisection for the
//! eigenvalues, twisted factorization for the eigenvectors.

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

const PIVOT_FLOOR: f64 = 1e-300;

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert_eq!(off.len() + 1, diag.len().max(1));
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.len() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - x - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -PIVOT_FLOOR;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.len() {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < self.len() { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to full precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        while hi - lo > 4.0 * f64::EPSILON * scale {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector for an accurate eigenvalue `lambda`.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        let guard = |v: f64| if v.abs() < PIVOT_FLOOR { PIVOT_FLOOR.copysign(v) } else { v };
        let mut fwd = vec![0.0; n];
        let mut bwd = vec![0.0; n];
        for i in 0..n {
            let prev = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] / fwd[i - 1] };
            fwd[i] = guard(self.diag[i] - lambda - prev);
        }
        for i in (0..n).rev() {
            let next = if i + 1 == n { 0.0 } else { self.off[i] * self.off[i] / bwd[i + 1] };
            bwd[i] = guard(self.diag[i] - lambda - next);
        }
        let twist = (0..n)
            .min_by(|&a, &b| {
                let ga = (fwd[a] + bwd[a] - (self.diag[a] - lambda)).abs();
                let gb = (fwd[b] + bwd[b] - (self.diag[b] - lambda)).abs();
                ga.total_cmp(&gb)
            })
            .unwrap_or(0);
        let mut x = vec![0.0; n];
        x[twist] = 1.0;
        for i in (0..twist).rev() {
            x[i] = -self.off[i] * x[i + 1] / fwd[i];
        }
        for i in (twist + 1)..n {
            x[i] = -self.off[i - 1] * x[i - 1] / bwd[i];
        }
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        x.iter_mut().for_each(|v| *v /= norm);
        x
    }
}

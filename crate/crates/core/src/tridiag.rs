//! Lowest eigenpairs of a real symmetric tridiagonal matrix.
//!
//! Eigenvalues come from Sturm-sequence bisection, eigenvectors from inverse
//! iteration on a pivoted LU factorization, reorthogonalized within clusters
//! of close eigenvalues.

#[cfg(feature = "parallel")]
use rayon::prelude::*;

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct SymTridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl SymTridiagonal {
    /// `off[i]` couples rows `i` and `i + 1`, so `off.len() == diag.len() - 1`.
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(!diag.is_empty() && off.len() + 1 == diag.len());
        SymTridiagonal { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    fn gershgorin(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let r = if i > 0 { self.off[i - 1].abs() } else { 0.0 }
                + if i + 1 < n { self.off[i].abs() } else { 0.0 };
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    fn norm(&self) -> f64 {
        let (lo, hi) = self.gershgorin();
        lo.abs().max(hi.abs())
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE * self.off.iter().fold(1.0f64, |m, &e| m.max(e * e));
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `k`-th smallest eigenvalue (0-based), bisected to full precision.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let pad = f64::EPSILON * self.norm().max(1.0) * 4.0;
        lo -= pad;
        hi += pad;
        for _ in 0..200 {
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

    /// The `count` smallest eigenvalues in ascending order.
    pub fn lowest_eigenvalues(&self, count: usize) -> Vec<f64> {
        #[cfg(feature = "parallel")]
        let values = (0..count).into_par_iter().map(|k| self.eigenvalue(k)).collect();
        #[cfg(not(feature = "parallel"))]
        let values = (0..count).map(|k| self.eigenvalue(k)).collect();
        values
    }

    /// Eigenvector for an (accurate) eigenvalue by inverse iteration.
    /// Returned with unit Euclidean norm.
    fn inverse_iteration(&self, lambda: f64, seed: u64) -> Vec<f64> {
        let lu = ShiftedLu::factor(self, lambda);
        let mut x = start_vector(self.len(), seed);
        for _ in 0..3 {
            lu.solve_in_place(&mut x);
            normalize(&mut x);
        }
        x
    }

    /// Lowest `count` eigenpairs. Vectors have unit Euclidean norm and a
    /// sign fixed so that their first significant component is positive.
    pub fn lowest_eigenpairs(&self, count: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
        let n = self.len();
        if count > n {
            return Err(Error::config(
                "n_eigenpairs",
                format!("requested {count} eigenpairs from a {n}-point grid"),
            ));
        }
        let values = self.lowest_eigenvalues(count);
        for w in values.windows(2) {
            if w[1] <= w[0] {
                return Err(Error::Numerical(format!(
                    "eigenvalues not strictly ascending: {} then {}",
                    w[0], w[1]
                )));
            }
        }

        #[cfg(feature = "parallel")]
        let mut vectors: Vec<Vec<f64>> = values
            .par_iter()
            .enumerate()
            .map(|(k, &lam)| self.inverse_iteration(lam, k as u64))
            .collect();
        #[cfg(not(feature = "parallel"))]
        let mut vectors: Vec<Vec<f64>> = values
            .iter()
            .enumerate()
            .map(|(k, &lam)| self.inverse_iteration(lam, k as u64))
            .collect();

        // Modified Gram-Schmidt inside clusters of close eigenvalues.
        let cluster_tol = 1e-3 * self.norm();
        let mut cluster_start = 0;
        for j in 0..count {
            if j > 0 && values[j] - values[j - 1] > cluster_tol {
                cluster_start = j;
            }
            let (done, rest) = vectors.split_at_mut(j);
            let v = &mut rest[0];
            // inputs are already orthogonal to ~1e-9, so one pass suffices
            for u in &done[cluster_start..j] {
                let c = dot(u, v);
                axpy(-c, u, v);
            }
            let norm = normalize(v);
            if !(norm > 1e-3) {
                return Err(Error::Numerical(format!(
                    "inverse iteration lost eigenvector {j} (lambda = {}) to reorthogonalization",
                    values[j]
                )));
            }
            fix_sign(v);
        }
        Ok((values, vectors))
    }
}

/// LU factorization of `T - lambda·I` with partial (row) pivoting.
/// The upper factor has two superdiagonals.
struct ShiftedLu {
    u0: Vec<f64>,
    u1: Vec<f64>,
    u2: Vec<f64>,
    mult: Vec<f64>,
    swapped: Vec<bool>,
}

impl ShiftedLu {
    fn factor(t: &SymTridiagonal, lambda: f64) -> Self {
        let n = t.len();
        let tiny = f64::EPSILON * t.norm().max(f64::MIN_POSITIVE);
        let mut u0 = vec![0.0; n];
        let mut u1 = vec![0.0; n];
        let mut u2 = vec![0.0; n];
        let mut mult = vec![0.0; n.saturating_sub(1)];
        let mut swapped = vec![false; n.saturating_sub(1)];

        u0[0] = t.diag[0] - lambda;
        u1[0] = if n > 1 { t.off[0] } else { 0.0 };
        for i in 0..n - 1 {
            let sub = t.off[i];
            let next_diag = t.diag[i + 1] - lambda;
            let next_sup = if i + 2 < n { t.off[i + 1] } else { 0.0 };
            if sub.abs() > u0[i].abs() {
                let (p0, p1, p2) = (u0[i], u1[i], u2[i]);
                let m = p0 / sub;
                u0[i] = sub;
                u1[i] = next_diag;
                u2[i] = next_sup;
                u0[i + 1] = p1 - m * next_diag;
                u1[i + 1] = p2 - m * next_sup;
                mult[i] = m;
                swapped[i] = true;
            } else {
                let m = if u0[i] == 0.0 { 0.0 } else { sub / u0[i] };
                u0[i + 1] = next_diag - m * u1[i];
                u1[i + 1] = next_sup - m * u2[i];
                mult[i] = m;
            }
        }
        for p in u0.iter_mut() {
            if p.abs() < tiny {
                *p = if *p < 0.0 { -tiny } else { tiny };
            }
        }
        ShiftedLu {
            u0,
            u1,
            u2,
            mult,
            swapped,
        }
    }

    fn solve_in_place(&self, y: &mut [f64]) {
        let n = y.len();
        for i in 0..n - 1 {
            if self.swapped[i] {
                y.swap(i, i + 1);
            }
            y[i + 1] -= self.mult[i] * y[i];
        }
        y[n - 1] /= self.u0[n - 1];
        if n > 1 {
            y[n - 2] = (y[n - 2] - self.u1[n - 2] * y[n - 1]) / self.u0[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            y[i] = (y[i] - self.u1[i] * y[i + 1] - self.u2[i] * y[i + 2]) / self.u0[i];
        }
    }
}

fn start_vector(n: usize, seed: u64) -> Vec<f64> {
    // splitmix64; any vector with no special structure will do
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ 0xD1B5_4A32_D192_ED03;
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            0.5 + (z >> 11) as f64 / (1u64 << 53) as f64
        })
        .collect()
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let norm = scale * v.iter().map(|x| (x / scale) * (x / scale)).sum::<f64>().sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
    norm
}

fn fix_sign(v: &mut [f64]) {
    let peak = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = v.iter().find(|x| x.abs() > 1e-8 * peak) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

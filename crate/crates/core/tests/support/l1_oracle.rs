//! Exhaustive-support least-squares oracle for small equality-constrained
//! ℓ1 programs `min ‖x‖₁ s.t. Φx = y`.
//!
//! An optimum of the linear program is attained at a basic solution whose
//! support columns are linearly independent, so scanning every support of
//! size up to `rank Φ`, fitting it by least squares and keeping the exact
//! fits finds the optimum value. Only practical for N ≤ 12 or so.

use nalgebra::{DMatrix, DVector};

#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub x: Vec<f64>,
    pub l1: f64,
    /// No other basic solution reaches the same ℓ1 within `tie_tol`.
    pub unique: bool,
}

fn subsets(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if cur.len() == k {
            visit(cur);
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            rec(i + 1, n, k, cur, visit);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), &mut visit);
}

/// Least-squares fit on `support`, `None` when the columns are dependent or
/// the fit leaves a residual above `feas_tol`.
fn fit(phi: &DMatrix<f64>, y: &DVector<f64>, support: &[usize], feas_tol: f64) -> Option<Vec<f64>> {
    let a = DMatrix::from_fn(phi.nrows(), support.len(), |i, j| phi[(i, support[j])]);
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    if svd.singular_values.min() <= 1e-10 * smax.max(1.0) {
        return None;
    }
    let coef = svd.solve(y, 0.0).ok()?;
    if (&a * &coef - y).norm() > feas_tol {
        return None;
    }
    let mut x = vec![0.0; phi.ncols()];
    for (j, &k) in support.iter().enumerate() {
        x[k] = coef[j];
    }
    Some(x)
}

/// The minimum-ℓ1 exact solution over all supports of size `1..=max_size`.
pub fn exhaustive_l1(
    phi: &DMatrix<f64>,
    y: &[f64],
    max_size: usize,
    feas_tol: f64,
    tie_tol: f64,
) -> Option<OracleSolution> {
    let yv = DVector::from_column_slice(y);
    if yv.norm() <= feas_tol {
        return Some(OracleSolution { x: vec![0.0; phi.ncols()], l1: 0.0, unique: true });
    }
    let mut candidates: Vec<(f64, Vec<f64>)> = Vec::new();
    for k in 1..=max_size.min(phi.ncols()).min(phi.nrows()) {
        subsets(phi.ncols(), k, |support| {
            if let Some(x) = fit(phi, &yv, support, feas_tol) {
                candidates.push((x.iter().map(|v| v.abs()).sum(), x));
            }
        });
    }
    let (l1, x) = candidates.iter().min_by(|a, b| a.0.total_cmp(&b.0))?.clone();
    let unique = candidates
        .iter()
        .all(|(v, other)| *v > l1 + tie_tol || other.iter().zip(&x).all(|(a, b)| (a - b).abs() <= tie_tol));
    Some(OracleSolution { x, l1, unique })
}

/// 1-based indices with `|x_n| > threshold`.
pub fn support_of(x: &[f64], threshold: f64) -> Vec<usize> {
    x.iter().enumerate().filter(|(_, v)| v.abs() > threshold).map(|(k, _)| k + 1).collect()
}

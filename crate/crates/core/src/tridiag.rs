//! Thomas algorithm for tridiagonal systems.

/// Solves `A x = rhs` in place for tridiagonal `A` with sub-diagonal
/// `lower[1..]`, diagonal `diag` and super-diagonal `upper[..n-1]`
/// (`lower[0]` and `upper[n-1]` are ignored). `scratch` must hold `n` values.
///
/// No pivoting: intended for diagonally dominant matrices.
pub fn solve_in_place(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &mut [f64], scratch: &mut [f64]) {
    let n = diag.len();
    debug_assert!(lower.len() == n && upper.len() == n && rhs.len() == n && scratch.len() >= n);
    if n == 0 {
        return;
    }
    let mut denom = diag[0];
    scratch[0] = upper[0] / denom;
    rhs[0] /= denom;
    for i in 1..n {
        denom = diag[i] - lower[i] * scratch[i - 1];
        scratch[i] = if i + 1 < n { upper[i] / denom } else { 0.0 };
        rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / denom;
    }
    for i in (0..n - 1).rev() {
        rhs[i] -= scratch[i] * rhs[i + 1];
    }
}

/// Smallest row margin `|d_i| − |l_i| − |u_i|`; non-negative for a
/// (weakly) diagonally dominant matrix.
pub fn dominance_margin(lower: &[f64], diag: &[f64], upper: &[f64]) -> f64 {
    let n = diag.len();
    (0..n)
        .map(|i| {
            let l = if i > 0 { lower[i].abs() } else { 0.0 };
            let u = if i + 1 < n { upper[i].abs() } else { 0.0 };
            diag[i].abs() - l - u
        })
        .fold(f64::INFINITY, f64::min)
}

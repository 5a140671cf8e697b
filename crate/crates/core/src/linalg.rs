//! Dense row-major Cholesky factorization and triangular solves.

/// Lower-triangular Cholesky factor of the symmetric `n x n` matrix `a`
/// (row-major), or `None` if a pivot is not strictly positive.
pub fn cholesky(a: &[f64], n: usize) -> Option<Vec<f64>> {
    debug_assert_eq!(a.len(), n * n);
    let mut l = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..=i {
            let dot: f64 = (0..j).map(|k| l[i * n + k] * l[j * n + k]).sum();
            let v = a[i * n + j] - dot;
            if i == j {
                if !(v > 0.0) || !v.is_finite() {
                    return None;
                }
                l[i * n + i] = v.sqrt();
            } else {
                l[i * n + j] = v / l[j * n + j];
            }
        }
    }
    Some(l)
}

/// Factorizes `a + jitter I`, escalating `jitter` through `ladder` (absolute
/// values, tried in order) until the factorization succeeds.
pub fn cholesky_with_jitter(a: &[f64], n: usize, ladder: &[f64]) -> Option<(Vec<f64>, f64)> {
    ladder.iter().find_map(|&jitter| {
        let mut m = a.to_vec();
        if jitter > 0.0 {
            for i in 0..n {
                m[i * n + i] += jitter;
            }
        }
        cholesky(&m, n).map(|l| (l, jitter))
    })
}

/// Solves `L x = b` for lower-triangular `L`.
pub fn forward_solve(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for i in 0..n {
        let row = &l[i * n..i * n + i];
        let s: f64 = row.iter().zip(&x[..i]).map(|(a, b)| a * b).sum();
        x[i] = (x[i] - s) / l[i * n + i];
    }
    x
}

/// Solves `L^T x = b` for lower-triangular `L`.
pub fn backward_solve_transposed(l: &[f64], n: usize, b: &[f64]) -> Vec<f64> {
    let mut x = b.to_vec();
    for i in (0..n).rev() {
        let s: f64 = ((i + 1)..n).map(|k| l[k * n + i] * x[k]).sum();
        x[i] = (x[i] - s) / l[i * n + i];
    }
    x
}

/// `L L^T` for a lower-triangular factor.
pub fn reconstruct(l: &[f64], n: usize) -> Vec<f64> {
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            a[i * n + j] = (0..=i.min(j)).map(|k| l[i * n + k] * l[j * n + k]).sum();
        }
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_solve_3x3() {
        let a = [4.0, 12.0, -16.0, 12.0, 37.0, -43.0, -16.0, -43.0, 98.0];
        let l = cholesky(&a, 3).unwrap();
        assert_eq!(l, vec![2.0, 0.0, 0.0, 6.0, 1.0, 0.0, -8.0, 5.0, 3.0]);
        assert_eq!(reconstruct(&l, 3), a.to_vec());
        let b = [1.0, 2.0, 3.0];
        let y = forward_solve(&l, 3, &b);
        let x = backward_solve_transposed(&l, 3, &y);
        for i in 0..3 {
            let ax: f64 = (0..3).map(|j| a[i * 3 + j] * x[j]).sum();
            assert!((ax - b[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn jitter_rescues_singular_matrix() {
        let a = [1.0, 1.0, 1.0, 1.0];
        assert!(cholesky(&a, 2).is_none());
        let (_, jitter) = cholesky_with_jitter(&a, 2, &[0.0, 1e-12, 1e-9]).unwrap();
        assert_eq!(jitter, 1e-12);
        assert!(cholesky_with_jitter(&[-1.0], 1, &[0.0, 1e-6]).is_none());
    }
}

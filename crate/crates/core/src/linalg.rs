//! Tridiagonal solves.

use std::ops::{Div, Mul, Sub};

/// Solves `lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i]` by the
/// Thomas algorithm (no pivoting; the systems assembled in this crate are
/// diagonally dominant or Hermitian-shifted). `lower[0]` and
/// `upper[n-1]` are ignored.
pub fn solve_tridiagonal<T>(lower: &[T], diag: &[T], upper: &[T], rhs: &[T]) -> Vec<T>
where
    T: Copy + Sub<Output = T> + Mul<Output = T> + Div<Output = T>,
{
    let n = diag.len();
    assert!(lower.len() == n && upper.len() == n && rhs.len() == n && n > 0);
    let mut c = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    c.push(upper[0] / diag[0]);
    d.push(rhs[0] / diag[0]);
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c.push(upper[i] / m);
        d.push((rhs[i] - lower[i] * d[i - 1]) / m);
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] = x[i] - c[i] * x[i + 1];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;
    use proptest::prelude::*;

    fn apply<T>(lower: &[T], diag: &[T], upper: &[T], x: &[T]) -> Vec<T>
    where
        T: Copy + std::ops::Add<Output = T> + Mul<Output = T>,
    {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut s = diag[i] * x[i];
                if i > 0 {
                    s = s + lower[i] * x[i - 1];
                }
                if i + 1 < n {
                    s = s + upper[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    #[test]
    fn discrete_laplacian() {
        let n = 5;
        let x = solve_tridiagonal(&vec![-1.0; n], &vec![2.0; n], &vec![-1.0; n], &vec![1.0; n]);
        // exact solution of -x'' = 1 with zero Dirichlet ends: i(n+1-i)/2
        for (i, xi) in x.iter().enumerate() {
            let k = (i + 1) as f64;
            assert!((xi - k * (6.0 - k) / 2.0).abs() < 1e-13);
        }
    }

    proptest! {
        #[test]
        fn complex_residual(n in 1usize..40, seed in proptest::collection::vec(-1.0f64..1.0, 160)) {
            let z = |k: usize| Complex64::new(seed[k % 160], seed[(k * 7 + 3) % 160]);
            let lower: Vec<_> = (0..n).map(|i| z(i)).collect();
            let upper: Vec<_> = (0..n).map(|i| z(i + 50)).collect();
            let diag: Vec<_> = (0..n).map(|i| z(i + 100) + Complex64::new(3.0, 1.0)).collect();
            let x: Vec<_> = (0..n).map(|i| z(i + 20)).collect();
            let b = apply(&lower, &diag, &upper, &x);
            let sol = solve_tridiagonal(&lower, &diag, &upper, &b);
            for (a, e) in sol.iter().zip(&x) {
                prop_assert!((a - e).norm() < 1e-10);
            }
        }
    }
}

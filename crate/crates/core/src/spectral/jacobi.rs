//! Cyclic Jacobi diagonalization of real symmetric matrices.

/// Eigen-decomposition of a real symmetric `n×n` matrix (row-major).
///
/// Returns the eigenvalues (unsorted) and a row-major matrix whose columns
/// are the matching orthonormal eigenvectors. Sweeps stop once the
/// off-diagonal Frobenius norm falls below `tol` times the full norm.
pub fn symmetric_eigen(a: &[f64], n: usize, tol: f64) -> (Vec<f64>, Vec<f64>) {
    assert_eq!(a.len(), n * n, "matrix must be n×n");
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for k in 0..n {
        v[k * n + k] = 1.0;
    }
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    if frob == 0.0 {
        return (vec![0.0; n], v);
    }
    let off_norm = |a: &[f64]| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    for _sweep in 0..100 {
        if off_norm(&a) <= tol * frob {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() <= f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                a[p * n + p] -= t * apq;
                a[q * n + q] += t * apq;
                a[p * n + q] = 0.0;
                a[q * n + p] = 0.0;
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let g = a[r * n + p];
                    let h = a[r * n + q];
                    let rp = c * g - s * h;
                    let rq = s * g + c * h;
                    a[r * n + p] = rp;
                    a[p * n + r] = rp;
                    a[r * n + q] = rq;
                    a[q * n + r] = rq;
                }
                for r in 0..n {
                    let g = v[r * n + p];
                    let h = v[r * n + q];
                    v[r * n + p] = c * g - s * h;
                    v[r * n + q] = s * g + c * h;
                }
            }
        }
    }
    let eig = (0..n).map(|k| a[k * n + k]).collect();
    (eig, v)
}

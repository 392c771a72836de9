use crate::error::{check_dim, Result};
use crate::linalg::{norm, CsrMatrix, Vector};

pub const DEFAULT_LSQR_ITERATIONS: usize = 100;

/// Least-squares iterate after `iterations` steps of Golub–Kahan
/// bidiagonalisation (Paige–Saunders LSQR), started from zero. Stops early
/// when the residual vanishes or the bidiagonalisation breaks down.
pub fn lsqr_solve(a: &CsrMatrix, b: &[f64], iterations: usize) -> Result<Vector> {
    check_dim("lsqr right-hand side", a.n_rows(), b.len())?;
    let n = a.n_cols();
    let mut x = vec![0.0; n];
    let b_norm = norm(b);
    if b_norm == 0.0 {
        return Ok(Vector::from_vec_unchecked(x));
    }

    let mut u: Vec<f64> = b.iter().map(|v| v / b_norm).collect();
    let mut beta;
    let mut v = a.matvec_transpose(&u)?.into_inner();
    let mut alpha = norm(&v);
    if alpha == 0.0 {
        return Ok(Vector::from_vec_unchecked(x));
    }
    v.iter_mut().for_each(|t| *t /= alpha);
    let mut w = v.clone();
    let mut phi_bar = b_norm;
    let mut rho_bar = alpha;

    for _ in 0..iterations {
        let av = a.matvec(&v)?;
        u.iter_mut().zip(av.iter()).for_each(|(ui, avi)| *ui = avi - alpha * *ui);
        beta = norm(&u);
        if beta > 0.0 {
            u.iter_mut().for_each(|t| *t /= beta);
            let atu = a.matvec_transpose(&u)?;
            v.iter_mut().zip(atu.iter()).for_each(|(vi, ai)| *vi = ai - beta * *vi);
            alpha = norm(&v);
            if alpha > 0.0 {
                v.iter_mut().for_each(|t| *t /= alpha);
            }
        } else {
            alpha = 0.0;
        }

        let rho = rho_bar.hypot(beta);
        let c = rho_bar / rho;
        let s = beta / rho;
        let theta = s * alpha;
        rho_bar = -c * alpha;
        let phi = c * phi_bar;
        phi_bar *= s;

        let step = phi / rho;
        let shrink = theta / rho;
        for i in 0..n {
            x[i] += step * w[i];
            w[i] = v[i] - shrink * w[i];
        }
        if alpha == 0.0 || phi_bar <= f64::EPSILON * b_norm {
            break;
        }
    }
    Vector::new(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_recovers_rhs() {
        let b = [1.5, -2.0, 0.25];
        let x = lsqr_solve(&CsrMatrix::identity(3), &b, 2).unwrap();
        for (xi, bi) in x.iter().zip(&b) {
            assert!((xi - bi).abs() < 1e-10);
        }
    }

    #[test]
    fn zero_rhs() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        assert_eq!(lsqr_solve(&a, &[0.0; 3], 10).unwrap().as_slice(), &[0.0, 0.0]);
        assert!(lsqr_solve(&a, &[0.0; 2], 10).is_err());
    }

    #[test]
    fn overdetermined_consistent() {
        let a = CsrMatrix::from_dense(&[vec![1.0, 2.0], vec![3.0, 4.0], vec![5.0, 6.0]]).unwrap();
        let b = a.matvec(&[0.5, -1.0]).unwrap();
        let x = lsqr_solve(&a, &b, 10).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-10 && (x[1] + 1.0).abs() < 1e-10);
    }
}

use nalgebra::{Complex, DMatrix};

use crate::scalar::{self, Real};

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi
/// rotations.
///
/// Returns eigenvalues in ascending order and the matching orthonormal
/// eigenvectors as columns. Only the upper triangle is trusted after
/// symmetrisation; repeated eigenvalues are handled like any others.
pub fn hermitian_eigen<T: Real>(h: &DMatrix<Complex<T>>) -> (Vec<T>, DMatrix<Complex<T>>) {
    let n = h.nrows();
    assert_eq!(n, h.ncols(), "Hermitian eigenproblem needs a square matrix");
    let half = scalar::creal(T::lit(0.5));
    let mut a = (h + h.adjoint()) * half;
    let mut v = DMatrix::<Complex<T>>::identity(n, n);
    let scale = a.iter().fold(T::zero(), |acc, z| acc + scalar::abs2(*z)).sqrt();
    let eps = T::default_epsilon();
    for _ in 0..MAX_SWEEPS {
        let mut off = T::zero();
        for p in 0..n {
            for q in p + 1..n {
                off += scalar::abs2(a[(p, q)]);
            }
        }
        if off.sqrt() <= eps * scale || scale == T::zero() {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let c = a[(p, q)];
                let mc = scalar::modulus(c);
                if mc == T::zero() {
                    continue;
                }
                let phase = c / mc;
                let (app, aqq) = (a[(p, p)].re, a[(q, q)].re);
                let theta = (aqq - app) / (mc + mc);
                let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                // J on columns (p, q): [[cs, sn], [-sn e^{-i phi}, cs e^{-i phi}]].
                let jpp = scalar::creal(cs);
                let jpq = scalar::creal(sn);
                let jqp = phase.conj() * (-sn);
                let jqq = phase.conj() * cs;
                for k in 0..n {
                    let (x, y) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = x * jpp + y * jqp;
                    a[(k, q)] = x * jpq + y * jqq;
                }
                for k in 0..n {
                    let (x, y) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = jpp.conj() * x + jqp.conj() * y;
                    a[(q, k)] = jpq.conj() * x + jqq.conj() * y;
                }
                a[(p, q)] = scalar::czero();
                a[(q, p)] = scalar::czero();
                for k in 0..n {
                    let (x, y) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = x * jpp + y * jqp;
                    v[(k, q)] = x * jpq + y * jqq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.partial_cmp(&a[(j, j)].re).expect("finite eigenvalues"));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    (values, vectors)
}

/// Singular values in descending order, from the eigenvalues of `M^H M`.
///
/// Squaring costs relative accuracy only for values far below the largest,
/// which callers compare against thresholds of order one.
pub fn singular_values_desc<T: Real>(m: &DMatrix<Complex<T>>) -> Vec<T> {
    let (vals, _) = hermitian_eigen(&(m.adjoint() * m));
    vals.into_iter().rev().map(|x| x.max(T::zero()).sqrt()).collect()
}

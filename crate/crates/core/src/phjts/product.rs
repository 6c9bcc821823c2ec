use nalgebra::{Complex, DMatrix};

use super::linalg::singular_values_desc;
use super::{FactorKind, JtsElement};
use crate::error::{bail, Result};
use crate::scalar::{self, Real};

/// The Jordan triple product `{x, y, z}`.
///
/// Matrix factors use `x conj(y)^T z + z conj(y)^T x` (types II and III are
/// the restrictions to antisymmetric and symmetric matrices); the spin factor
/// uses `<x,y> z + <z,y> x - (x^T z) conj(y)`. Both are linear and symmetric
/// in `x, z` and conjugate-linear in `y`, and `D(e,e) e = 2e` for a tripotent.
pub fn triple_product<T: Real>(x: &JtsElement<T>, y: &JtsElement<T>, z: &JtsElement<T>) -> Result<JtsElement<T>> {
    x.same_factor(y)?;
    x.same_factor(z)?;
    Ok(triple_unchecked(x, y, z))
}

pub(crate) fn triple_unchecked<T: Real>(x: &JtsElement<T>, y: &JtsElement<T>, z: &JtsElement<T>) -> JtsElement<T> {
    let factor = x.factor();
    match factor.kind() {
        FactorKind::IV { .. } => {
            let (xs, ys, zs) = (x.coords(), y.coords(), z.coords());
            let xy = scalar::hermitian(xs, ys);
            let zy = scalar::hermitian(zs, ys);
            let xz = scalar::bilinear(xs, zs);
            let coords = (0..xs.len()).map(|i| xy * zs[i] + zy * xs[i] - xz * ys[i].conj()).collect();
            JtsElement::new(factor, coords).expect("length preserved")
        }
        _ => {
            let xm = x.to_matrix().expect("matrix factor");
            let yh = y.to_matrix().expect("matrix factor").adjoint();
            let zm = z.to_matrix().expect("matrix factor");
            let m = &xm * &yh * &zm + &zm * &yh * &xm;
            JtsElement::from_matrix_projected(factor, &m)
        }
    }
}

/// `Q(x) y = {x, y, x} / 2`.
pub fn quadratic_map<T: Real>(x: &JtsElement<T>, y: &JtsElement<T>) -> Result<JtsElement<T>> {
    Ok(triple_product(x, y, x)?.scale_real(T::lit(0.5)))
}

/// Odd power `x^(k)`: `x^(1) = x`, `x^(2p+1) = Q(x) x^(2p-1)`.
pub fn odd_power<T: Real>(x: &JtsElement<T>, k: i64) -> Result<JtsElement<T>> {
    if k < 1 || k % 2 == 0 {
        bail!(Argument, "odd power needs an odd positive exponent, got {k}");
    }
    let half = T::lit(0.5);
    let mut acc = x.clone();
    for _ in 0..(k - 1) / 2 {
        acc = triple_unchecked(x, &acc, x).scale_real(half);
    }
    Ok(acc)
}

/// `||x^(3) - x|| <= tol`.
pub fn is_tripotent<T: Real>(x: &JtsElement<T>, tol: T) -> bool {
    let cube = triple_unchecked(x, x, x).scale_real(T::lit(0.5));
    (&cube - x).norm() <= tol
}

/// Matrix of the complex-linear operator `D(x,y) = {x, y, .}` in coordinates.
pub fn d_operator<T: Real>(x: &JtsElement<T>, y: &JtsElement<T>) -> Result<DMatrix<Complex<T>>> {
    x.same_factor(y)?;
    let factor = x.factor();
    let n = factor.ambient_dim();
    let mut m = DMatrix::from_element(n, n, scalar::czero());
    for k in 0..n {
        let col = triple_unchecked(x, y, &JtsElement::basis(factor, k));
        for (i, v) in col.coords().iter().enumerate() {
            m[(i, k)] = *v;
        }
    }
    Ok(m)
}

/// Largest singular value of a complex matrix; zero for empty matrices.
pub(crate) fn operator_norm<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    if m.is_empty() {
        return T::zero();
    }
    singular_values_desc(m).first().copied().unwrap_or_else(T::zero)
}

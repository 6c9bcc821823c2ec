use nalgebra::{Complex, DMatrix};
use serde::Serialize;

use super::linalg::hermitian_eigen;
use super::{FactorKind, JtsElement};
use crate::error::{bail, Result};
use crate::scalar::{self, Real};

/// `x = sum_i lambda_i e_i` with `lambda_1 > ... > lambda_s > 0` and pairwise
/// orthogonal tripotents `e_i`.
#[derive(Clone, Debug)]
pub struct SpectralDecomposition<T: Real> {
    pub lambdas: Vec<T>,
    pub tripotents: Vec<JtsElement<T>>,
    /// `||x - sum lambda_i e_i||`.
    pub residual: T,
}

impl<T: Real> SpectralDecomposition<T> {
    pub fn len(&self) -> usize {
        self.lambdas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lambdas.is_empty()
    }

    /// `sum lambda_i e_i` in the factor of `like`.
    pub fn reconstruct(&self, like: &JtsElement<T>) -> JtsElement<T> {
        self.lambdas
            .iter()
            .zip(&self.tripotents)
            .fold(JtsElement::zero(like.factor()), |acc, (l, e)| acc.axpy(scalar::creal(*l), e))
    }
}

/// Serialisable summary for reports.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralSummary {
    pub lambdas: Vec<f64>,
    /// Interleaved `[re, im, ...]` coordinates of each tripotent.
    pub tripotents: Vec<Vec<f64>>,
    pub residual: f64,
}

impl<T: Real> From<&SpectralDecomposition<T>> for SpectralSummary {
    fn from(s: &SpectralDecomposition<T>) -> Self {
        SpectralSummary {
            lambdas: s.lambdas.iter().map(|l| l.to_f64_lossy()).collect(),
            tripotents: s
                .tripotents
                .iter()
                .map(|e| scalar::complex_to_interleaved(&scalar::point_to_f64(e.coords())))
                .collect(),
            residual: s.residual.to_f64_lossy(),
        }
    }
}

/// Spectral decomposition of `x`.
///
/// Matrix factors go through the Hermitian eigenproblem of the dilation
/// `[[0, M], [M^H, 0]]`, whose positive eigenpairs are `(s_k, (u_k; v_k)/sqrt 2)`:
/// singular values within the relative grouping gap are merged and each
/// group contributes the partial isometry `sum u_k v_k^H`, re-(anti)symmetrised
/// for types II and III. The spin factor uses the closed form `x = l1 e + mu conj(e)` with `e^T e = 0`.
/// Values at or below `tol * lambda_1` are discarded. `x = 0` gives the
/// empty decomposition.
pub fn spectral_decompose<T: Real>(x: &JtsElement<T>, tol: T) -> Result<SpectralDecomposition<T>> {
    if !x.is_finite() {
        bail!(Argument, "spectral decomposition of a non-finite element");
    }
    if !(tol > T::zero()) {
        bail!(Argument, "tolerance must be positive");
    }
    if x.is_zero() {
        return Ok(SpectralDecomposition { lambdas: vec![], tripotents: vec![], residual: T::zero() });
    }
    let (lambdas, tripotents) = match x.factor().kind() {
        FactorKind::I { p: 1, .. } => {
            let n = x.norm();
            (vec![n], vec![x.scale_real(T::one() / n)])
        }
        FactorKind::IV { .. } => spin_decompose(x, tol),
        _ => matrix_decompose(x, tol),
    };
    let mut out = SpectralDecomposition { lambdas, tripotents, residual: T::zero() };
    out.residual = (x - &out.reconstruct(x)).norm();
    Ok(out)
}

fn matrix_decompose<T: Real>(x: &JtsElement<T>, tol: T) -> (Vec<T>, Vec<JtsElement<T>>) {
    let m = x.to_matrix().expect("matrix factor");
    let (rows, cols) = m.shape();
    // Hermitian dilation [[0, M], [M^H, 0]]: eigenpairs (+-s, (u; +-v)/sqrt 2).
    let mut dil = DMatrix::from_element(rows + cols, rows + cols, scalar::czero());
    dil.view_mut((0, rows), (rows, cols)).copy_from(&m);
    dil.view_mut((rows, 0), (cols, rows)).copy_from(&m.adjoint());
    let (values, vectors) = hermitian_eigen(&dil);
    let order: Vec<usize> = (0..rows + cols).rev().filter(|&k| values[k] > T::zero()).collect();
    let sigma: Vec<T> = order.iter().map(|&k| values[k]).collect();
    let Some(&top) = sigma.first() else {
        return (Vec::new(), Vec::new());
    };
    let cutoff = tol * top;
    let gap = T::grouping_gap();

    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (pos, &s) in sigma.iter().enumerate() {
        if s <= cutoff {
            break;
        }
        match groups.last_mut() {
            Some(g) if sigma[pos - 1] - s <= gap * sigma[pos - 1] => g.push(pos),
            _ => groups.push(vec![pos]),
        }
    }

    let two = scalar::creal(T::lit(2.0));
    let mut lambdas = Vec::with_capacity(groups.len());
    let mut tripotents = Vec::with_capacity(groups.len());
    for g in groups {
        let mut p = DMatrix::from_element(rows, cols, scalar::czero());
        let mut sum = T::zero();
        for &pos in &g {
            let w = vectors.column(order[pos]);
            let u = w.rows(0, rows);
            let v = w.rows(rows, cols);
            p += (u * v.adjoint()) * two;
            sum += sigma[pos];
        }
        lambdas.push(sum / T::lit(g.len() as f64));
        tripotents.push(JtsElement::from_matrix_projected(x.factor(), &p));
    }
    (lambdas, tripotents)
}

/// The two spin-factor spectral values `(l1, l2)`, `l1 >= l2 >= 0`.
pub(crate) fn spin_values<T: Real>(xs: &[Complex<T>]) -> (T, T, Complex<T>) {
    let a = scalar::norm2(xs);
    let q = scalar::bilinear(xs, xs);
    let b = scalar::modulus(q);
    // a^2 - b^2 = 4 sum_{i<j} Im(conj(x_i) x_j)^2 (Lagrange identity for the real and
    // imaginary parts), free of the cancellation in the direct difference.
    let mut wedge = T::zero();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            let w = (xs[i].conj() * xs[j]).im;
            wedge += w * w;
        }
    }
    let disc = (wedge.sqrt() + wedge.sqrt()).min(a);
    let l1 = ((a + disc) * T::lit(0.5)).sqrt();
    let l2 = if l1 > T::zero() { b / (l1 + l1) } else { T::zero() };
    (l1, l2, q)
}

fn spin_decompose<T: Real>(x: &JtsElement<T>, tol: T) -> (Vec<T>, Vec<JtsElement<T>>) {
    let xs = x.coords();
    let (l1, l2, q) = spin_values(xs);
    if l2 <= tol * l1 {
        return (vec![l1], vec![x.scale_real(T::one() / l1)]);
    }
    if l1 - l2 <= T::grouping_gap() * l1 {
        // Complex multiple of a real vector: a single maximal tripotent.
        let l = (l1 + l2) * T::lit(0.5);
        return (vec![l], vec![x.scale_real(T::one() / l)]);
    }
    // x = l1 e + mu conj(e), mu = x^T x / (2 l1); solve l1 x - mu conj(x) = (l1^2 - |mu|^2) e.
    let mu = q / (l1 + l1);
    let denom = l1 * l1 - l2 * l2;
    let coords1: Vec<Complex<T>> = xs.iter().map(|z| (*z * l1 - mu * z.conj()) / denom).collect();
    let e1 = JtsElement::new(x.factor(), coords1).expect("length preserved");
    let rest = x.axpy(scalar::creal(-l1), &e1);
    let e2 = rest.scale_real(T::one() / l2);
    (vec![l1, l2], vec![e1, e2])
}

/// The spectral norm `lambda_1(x)`; zero for `x = 0`.
pub fn spectral_norm<T: Real>(x: &JtsElement<T>) -> T {
    match x.factor().kind() {
        FactorKind::I { p: 1, .. } => x.norm(),
        FactorKind::IV { .. } => spin_values(x.coords()).0,
        _ => {
            if x.is_zero() {
                return T::zero();
            }
            super::product::operator_norm(&x.to_matrix().expect("matrix factor"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phjts::{is_tripotent, CartanFactor};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn diag(f: CartanFactor, d: &[f64]) -> JtsElement<f64> {
        let (p, q) = f.kind().matrix_shape().unwrap();
        let mut m = DMatrix::from_element(p, q, c(0.0, 0.0));
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = c(*v, 0.0);
        }
        JtsElement::from_matrix(f, &m).unwrap()
    }

    #[test]
    fn diagonal_matrix_decomposes_into_units() {
        let f = CartanFactor::type_i(2, 2).unwrap();
        let s = spectral_decompose(&diag(f, &[3.0, 1.0]), 1e-9).unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.lambdas[0] - 3.0).abs() < 1e-12 && (s.lambdas[1] - 1.0).abs() < 1e-12);
        assert!((&s.tripotents[0] - &diag(f, &[1.0, 0.0])).norm() < 1e-12);
        assert!((&s.tripotents[1] - &diag(f, &[0.0, 1.0])).norm() < 1e-12);
        assert!((spectral_norm(&diag(f, &[3.0, 1.0])) - 3.0).abs() < 1e-12);
    }

    #[test]
    fn equal_values_merge() {
        let f = CartanFactor::type_i(2, 2).unwrap();
        let s = spectral_decompose(&diag(f, &[2.0, 2.0]), 1e-9).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.lambdas[0] - 2.0).abs() < 1e-12);
        assert!((&s.tripotents[0] - &diag(f, &[1.0, 1.0])).norm() < 1e-12);
    }

    #[test]
    fn zero_gives_empty_decomposition() {
        let f = CartanFactor::type_iii(3).unwrap();
        let s = spectral_decompose(&JtsElement::<f64>::zero(f), 1e-9).unwrap();
        assert!(s.is_empty());
        assert_eq!(spectral_norm(&JtsElement::<f64>::zero(f)), 0.0);
    }

    #[test]
    fn non_finite_rejected() {
        let f = CartanFactor::type_iv(3).unwrap();
        let x = JtsElement::new(f, vec![c(f64::NAN, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(matches!(spectral_decompose(&x, 1e-9), Err(crate::Error::Argument(_))));
    }

    #[test]
    fn spin_factor_cases() {
        let f = CartanFactor::type_iv(3).unwrap();
        // Isotropic unit vector: a primitive tripotent.
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let e = JtsElement::new(f, vec![c(r, 0.0), c(0.0, r), c(0.0, 0.0)]).unwrap();
        let s = spectral_decompose(&e, 1e-9).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.lambdas[0] - 1.0).abs() < 1e-12);
        // A real unit vector is (1/sqrt 2) times a maximal tripotent.
        let u = JtsElement::new(f, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        let s = spectral_decompose(&u, 1e-9).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.lambdas[0] - r).abs() < 1e-12);
        assert!(is_tripotent(&s.tripotents[0], 1e-12));
        assert!((spectral_norm(&u) - r).abs() < 1e-12);
    }

    #[test]
    fn row_vector_norm_is_euclidean() {
        let f = CartanFactor::type_i(1, 3).unwrap();
        let x = JtsElement::new(f, vec![c(3.0, 0.0), c(0.0, 4.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(spectral_norm(&x), 5.0);
    }
}

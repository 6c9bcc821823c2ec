use std::ops::{Add, Neg, Sub};

use nalgebra::{Complex, DMatrix};

use super::{CartanFactor, FactorKind};
use crate::error::{bail, Result};
use crate::scalar::{self, czero, Real};

/// A vector of a factor's ambient space.
///
/// Coordinates are orthonormal for the trace form normalised so that
/// primitive tripotents have unit length:
///
/// * type I: the `p x q` entries, row-major;
/// * type II: the strict upper triangle `a_ij`, `i < j`, row-major;
/// * type III: the upper triangle row-major, diagonal entries as `a_ii` and
///   off-diagonal entries as `sqrt(2) a_ij`;
/// * type IV: the vector itself.
///
/// Antisymmetry and symmetry are therefore structural: only the
/// independent entries are stored.
#[derive(Clone, Debug, PartialEq)]
pub struct JtsElement<T: Real> {
    factor: CartanFactor,
    coords: Vec<Complex<T>>,
}

impl<T: Real> JtsElement<T> {
    pub fn new(factor: CartanFactor, coords: Vec<Complex<T>>) -> Result<Self> {
        if coords.len() != factor.ambient_dim() {
            bail!(
                Structural,
                "{factor} has ambient dimension {}, got {} coordinates",
                factor.ambient_dim(),
                coords.len()
            );
        }
        Ok(JtsElement { factor, coords })
    }

    pub fn zero(factor: CartanFactor) -> Self {
        JtsElement { factor, coords: vec![czero(); factor.ambient_dim()] }
    }

    /// The `k`-th coordinate unit vector.
    pub fn basis(factor: CartanFactor, k: usize) -> Self {
        let mut e = Self::zero(factor);
        e.coords[k] = Complex::new(T::one(), T::zero());
        e
    }

    /// Builds an element from its full matrix. Type II/III inputs must be
    /// exactly antisymmetric/symmetric.
    pub fn from_matrix(factor: CartanFactor, m: &DMatrix<Complex<T>>) -> Result<Self> {
        let Some((rows, cols)) = factor.kind().matrix_shape() else {
            bail!(Structural, "{factor} is not a matrix factor");
        };
        if m.nrows() != rows || m.ncols() != cols {
            bail!(Structural, "{factor} expects a {rows}x{cols} matrix, got {}x{}", m.nrows(), m.ncols());
        }
        match factor.kind() {
            FactorKind::II { n } => {
                for i in 0..n {
                    for j in i..n {
                        if m[(i, j)] != -m[(j, i)] {
                            bail!(Argument, "type II element must be antisymmetric (entry {i},{j})");
                        }
                    }
                }
            }
            FactorKind::III { n } => {
                for i in 0..n {
                    for j in i + 1..n {
                        if m[(i, j)] != m[(j, i)] {
                            bail!(Argument, "type III element must be symmetric (entry {i},{j})");
                        }
                    }
                }
            }
            _ => {}
        }
        Ok(Self::from_matrix_projected(factor, m))
    }

    /// Reads the independent entries of `m`, averaging the mirrored pair for
    /// type II/III. Used on products whose (anti)symmetry holds only up to
    /// rounding.
    pub(crate) fn from_matrix_projected(factor: CartanFactor, m: &DMatrix<Complex<T>>) -> Self {
        let half = T::lit(0.5);
        let coords = match factor.kind() {
            FactorKind::I { .. } => {
                let (p, q) = (m.nrows(), m.ncols());
                (0..p).flat_map(|i| (0..q).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
            }
            FactorKind::II { n } => {
                let mut v = Vec::with_capacity(factor.ambient_dim());
                for i in 0..n {
                    for j in i + 1..n {
                        v.push((m[(i, j)] - m[(j, i)]) * half);
                    }
                }
                v
            }
            FactorKind::III { n } => {
                let r2 = T::lit(std::f64::consts::SQRT_2);
                let mut v = Vec::with_capacity(factor.ambient_dim());
                for i in 0..n {
                    v.push(m[(i, i)]);
                    for j in i + 1..n {
                        v.push((m[(i, j)] + m[(j, i)]) * half * r2);
                    }
                }
                v
            }
            FactorKind::IV { .. } => unreachable!("spin factor has no matrix form"),
        };
        JtsElement { factor, coords }
    }

    /// The full matrix of a matrix-type element; `None` for the spin factor.
    pub fn to_matrix(&self) -> Option<DMatrix<Complex<T>>> {
        let (rows, cols) = self.factor.kind().matrix_shape()?;
        let mut m = DMatrix::from_element(rows, cols, czero());
        match self.factor.kind() {
            FactorKind::I { .. } => {
                for i in 0..rows {
                    for j in 0..cols {
                        m[(i, j)] = self.coords[i * cols + j];
                    }
                }
            }
            FactorKind::II { n } => {
                let mut k = 0;
                for i in 0..n {
                    for j in i + 1..n {
                        m[(i, j)] = self.coords[k];
                        m[(j, i)] = -self.coords[k];
                        k += 1;
                    }
                }
            }
            FactorKind::III { n } => {
                let r2 = T::lit(std::f64::consts::FRAC_1_SQRT_2);
                let mut k = 0;
                for i in 0..n {
                    m[(i, i)] = self.coords[k];
                    k += 1;
                    for j in i + 1..n {
                        m[(i, j)] = self.coords[k] * r2;
                        m[(j, i)] = self.coords[k] * r2;
                        k += 1;
                    }
                }
            }
            FactorKind::IV { .. } => unreachable!(),
        }
        Some(m)
    }

    pub fn factor(&self) -> CartanFactor {
        self.factor
    }

    pub fn coords(&self) -> &[Complex<T>] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<Complex<T>> {
        self.coords
    }

    /// Norm of the normalised trace form (Euclidean norm of the coordinates).
    pub fn norm(&self) -> T {
        scalar::euclid(&self.coords)
    }

    pub fn inner(&self, other: &Self) -> Complex<T> {
        scalar::hermitian(&self.coords, &other.coords)
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|z| z.re.is_zero() && z.im.is_zero())
    }

    pub fn is_finite(&self) -> bool {
        scalar::all_finite(&self.coords)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        JtsElement { factor: self.factor, coords: self.coords.iter().map(|z| *z * s).collect() }
    }

    pub fn scale_real(&self, s: T) -> Self {
        self.scale(Complex::new(s, T::zero()))
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: Complex<T>, other: &Self) -> Self {
        assert_eq!(self.factor, other.factor, "axpy across factors");
        JtsElement {
            factor: self.factor,
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| *a + *b * s).collect(),
        }
    }

    pub(crate) fn same_factor(&self, other: &Self) -> Result<()> {
        if self.factor != other.factor {
            bail!(Structural, "operands belong to {} and {}", self.factor, other.factor);
        }
        if self.coords.len() != other.coords.len() {
            bail!(Structural, "coordinate lengths differ: {} vs {}", self.coords.len(), other.coords.len());
        }
        Ok(())
    }
}

impl<T: Real> Add for &JtsElement<T> {
    type Output = JtsElement<T>;

    /// Panics if the operands belong to different factors.
    fn add(self, rhs: Self) -> JtsElement<T> {
        self.axpy(Complex::new(T::one(), T::zero()), rhs)
    }
}

impl<T: Real> Sub for &JtsElement<T> {
    type Output = JtsElement<T>;

    fn sub(self, rhs: Self) -> JtsElement<T> {
        self.axpy(Complex::new(-T::one(), T::zero()), rhs)
    }
}

impl<T: Real> Neg for &JtsElement<T> {
    type Output = JtsElement<T>;

    fn neg(self) -> JtsElement<T> {
        self.scale_real(-T::one())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    #[test]
    fn type_iii_coordinates_are_trace_orthonormal() {
        let f = CartanFactor::type_iii(2).unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 1.0), c(2.0, 1.0), c(-1.0, 0.0)]);
        let x = JtsElement::from_matrix(f, &m).unwrap();
        let trace_norm2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        assert!((x.norm().powi(2) - trace_norm2).abs() < 1e-12);
        assert!((x.to_matrix().unwrap() - m).norm() < 1e-14);
    }

    #[test]
    fn type_ii_norm_is_half_trace() {
        let f = CartanFactor::type_ii(3).unwrap();
        let x = JtsElement::<f64>::new(f, vec![c(1.0, 0.0), c(0.0, 2.0), c(3.0, 0.0)]).unwrap();
        let m = x.to_matrix().unwrap();
        assert_eq!(m[(1, 0)], -m[(0, 1)]);
        let trace_norm2: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        assert!((x.norm().powi(2) - trace_norm2 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn asymmetric_input_rejected_exactly() {
        let f = CartanFactor::type_iii(2).unwrap();
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(2.0 + 1e-15, 0.0), c(0.0, 0.0)]);
        assert!(JtsElement::from_matrix(f, &m).is_err());
        let g = CartanFactor::type_ii(2).unwrap();
        let a = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)]);
        assert!(JtsElement::from_matrix(g, &a).is_ok());
        assert!(JtsElement::from_matrix(g, &a.transpose().map(|z| z * 2.0)).is_ok());
    }

    #[test]
    fn wrong_length_is_structural() {
        let f = CartanFactor::type_iv(3).unwrap();
        let err = JtsElement::<f64>::new(f, vec![c(1.0, 0.0)]).unwrap_err();
        assert!(matches!(err, crate::Error::Structural(_)));
    }
}

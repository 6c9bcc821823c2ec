use std::fmt;

use nalgebra::{Complex, RealField};
use num_traits::{FromPrimitive, ToPrimitive};

/// Real scalar the toolkit computes in: `f32` or `f64`.
pub trait Real:
    RealField + Copy + FromPrimitive + ToPrimitive + rustfft::FftNum + fmt::Display + Send + Sync + 'static
{
    /// Converts an `f64` constant. Every supported scalar represents all finite `f64` values
    /// up to rounding, so this never fails.
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// Relative gap below which neighbouring spectral values are merged.
    fn grouping_gap() -> Self {
        let eps = Self::default_epsilon();
        let floor = Self::lit(1e-8);
        let scaled = eps * Self::lit(1e3);
        if scaled > floor {
            scaled
        } else {
            floor
        }
    }
}

impl Real for f64 {}
impl Real for f32 {}


pub(crate) fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

pub(crate) fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

/// Squared modulus without the square root.
pub(crate) fn abs2<T: Real>(z: Complex<T>) -> T {
    z.re * z.re + z.im * z.im
}

pub(crate) fn modulus<T: Real>(z: Complex<T>) -> T {
    abs2(z).sqrt()
}

/// Hermitian pairing `sum x_i conj(y_i)`.
pub(crate) fn hermitian<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter().zip(y).fold(czero(), |acc, (a, b)| acc + *a * b.conj())
}

/// Bilinear pairing `sum x_i y_i`.
pub(crate) fn bilinear<T: Real>(x: &[Complex<T>], y: &[Complex<T>]) -> Complex<T> {
    x.iter().zip(y).fold(czero(), |acc, (a, b)| acc + *a * *b)
}

pub(crate) fn norm2<T: Real>(x: &[Complex<T>]) -> T {
    x.iter().fold(T::zero(), |acc, z| acc + abs2(*z))
}

pub(crate) fn euclid<T: Real>(x: &[Complex<T>]) -> T {
    norm2(x).sqrt()
}

pub(crate) fn all_finite<T: Real>(x: &[Complex<T>]) -> bool {
    x.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Converts an `f64` point into the working scalar.
pub fn point_from_f64<T: Real>(x: &[Complex<f64>]) -> Vec<Complex<T>> {
    x.iter().map(|z| Complex::new(T::lit(z.re), T::lit(z.im))).collect()
}

/// Converts a working-scalar point back to `f64`.
pub fn point_to_f64<T: Real>(x: &[Complex<T>]) -> Vec<Complex<f64>> {
    x.iter().map(|z| Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())).collect()
}

/// Decodes the interleaved `[re, im, re, im, ...]` wire layout.
pub fn complex_from_interleaved(values: &[f64]) -> Option<Vec<Complex<f64>>> {
    if values.len() % 2 != 0 {
        return None;
    }
    Some(values.chunks(2).map(|p| Complex::new(p[0], p[1])).collect())
}

pub fn complex_to_interleaved(values: &[Complex<f64>]) -> Vec<f64> {
    values.iter().flat_map(|z| [z.re, z.im]).collect()
}

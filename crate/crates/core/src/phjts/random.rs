use nalgebra::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::{spectral_decompose, CartanFactor, JtsElement};
use crate::scalar::Real;

/// Standard complex Gaussian, `E|z|^2 = 1`.
pub fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    Complex::new(T::lit(re * s), T::lit(im * s))
}

/// Element with independent standard complex Gaussian coordinates.
pub fn random_element<T: Real, R: Rng + ?Sized>(factor: CartanFactor, rng: &mut R) -> JtsElement<T> {
    let coords = (0..factor.ambient_dim()).map(|_| complex_gaussian(rng)).collect();
    JtsElement::new(factor, coords).expect("length matches factor")
}

/// Maximum spectral length over `trials` Gaussian elements.
///
/// Gaussian elements avoid the lower-rank strata almost surely, so this
/// attains the rank of the triple system. Deterministic for a fixed seed.
pub fn system_rank(factor: &CartanFactor, trials: usize, seed: u64) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials.max(1))
        .map(|_| {
            let x: JtsElement<f64> = random_element(*factor, &mut rng);
            spectral_decompose(&x, 1e-9).map(|s| s.len()).unwrap_or(0)
        })
        .max()
        .unwrap_or(0)
}

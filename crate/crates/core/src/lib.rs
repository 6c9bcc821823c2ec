//! Numerical toolkit for bounded symmetric domains and squeezing functions.
//!
//! The algebraic layer ([`phjts`]) implements the Hermitian Jordan triple
//! systems attached to the four classical Cartan factors: triple products,
//! tripotents, spectral and Pierce decompositions, and rank. [`symdomain`]
//! realises products of factors as spectral-norm unit balls. [`kobayashi`]
//! evaluates the Kobayashi distances needed by the squeezing estimates,
//! [`squeezing`] turns them into certified bounds, and [`wlc`] runs the
//! inscribed-polydisk/Koebe pipeline on polyhedral convex bodies.
//!
//! All numerical code is generic over the scalar through [`Real`]; the
//! aliases at the crate root fix the common `f64` instantiation.

pub mod error;
pub mod kobayashi;
pub mod phjts;
pub mod scalar;
pub mod squeezing;
pub mod symdomain;
pub mod wlc;

pub use error::{Error, Result};
pub use nalgebra::Complex;
pub use phjts::{CartanFactor, FactorKind, JtsElement, PierceDecomposition, SpectralDecomposition};
pub use scalar::Real;
pub use symdomain::DomainSpec;

/// Double-precision Jordan triple element.
pub type Element = phjts::JtsElement<f64>;
/// Single-precision Jordan triple element.
pub type Element32 = phjts::JtsElement<f32>;
pub type Spectral = phjts::SpectralDecomposition<f64>;
pub type Pierce = phjts::PierceDecomposition<f64>;
pub type Stratum = symdomain::BoundaryStratum<f64>;
pub type Embedding = symdomain::PolydiskEmbedding<f64>;
pub type RemovedSet = kobayashi::RemovedSet<f64>;
pub type Bound = squeezing::SqueezeBound<f64>;
pub type Certificate = squeezing::HardyCertificate<f64>;
pub type Body = wlc::ConvexBody<f64>;
pub type Frame = wlc::WlcFrame<f64>;

/// Complex point of `C^n` in `f64`.
pub type Point = Vec<Complex<f64>>;

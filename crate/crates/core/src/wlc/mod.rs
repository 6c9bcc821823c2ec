//! Special coordinates and the Koebe lower bound for convex bodies.
//!
//! A convex body is weakly linearly convex with the supporting complex
//! hyperplane at a boundary point read off an active constraint. At a base
//! point `z0` the pipeline finds successive nearest boundary points on
//! shrinking orthogonal slices, normalises them to the unit vectors with a
//! unitary and a diagonal scaling, and straightens the supporting
//! hyperplanes to `{Z_j = 1}` with a unipotent lower-triangular map. The
//! largest polydisc `c D^n` inside the result gives `s(z0) >= c / (16 sqrt n)`.

mod body;
mod frame;

pub use body::{ball_polytope, polydisk_polygon, BodyDescriptor, ConvexBody, INTERIOR_MARGIN};
pub use frame::{
    build_frame, inscribed_polydisk_radius, koebe_lower_bound, subspace_boundary_distance, FrameReport,
    FrameResiduals, SliceContact, WlcFrame, TIE_TOLERANCE,
};

use nalgebra::Complex;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{bail, Result};
use crate::scalar::Real;
use crate::squeezing::{Provenance, Side, SqueezeBound};

/// The Koebe bound as a one-sided squeezing bound.
pub fn koebe_bound<T: Real>(frame: &WlcFrame<T>) -> SqueezeBound<T> {
    SqueezeBound {
        lower: frame.bound,
        upper: T::one(),
        exact: false,
        provenance: vec![Provenance {
            side: Side::Lower,
            result: "Koebe quarter bound in special coordinates".into(),
            detail: format!(
                "c = {} (largest polydisc in the normalised body), n = {}; valid for convex bodies, which are contractible with connected hyperplane slices",
                frame.c,
                frame.dim()
            ),
        }],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HhrScan<T> {
    /// Minimum Koebe bound over the grid; a sampled infimum only.
    pub min_bound: T,
    pub argmin: usize,
    pub bounds: Vec<T>,
}

/// Runs the frame pipeline at every grid point in parallel.
pub fn hhr_scan<T: Real>(body: &ConvexBody<T>, grid: &[Vec<Complex<T>>]) -> Result<HhrScan<T>> {
    if grid.is_empty() {
        bail!(Argument, "scan grid is empty");
    }
    for (i, z) in grid.iter().enumerate() {
        if z.len() != body.dim() {
            bail!(Structural, "grid point {i} has {} coordinates, body dimension is {}", z.len(), body.dim());
        }
        if !body.contains(z) {
            bail!(Argument, "grid point {i} is not interior to the body");
        }
    }
    let bounds: Vec<T> = grid.par_iter().map(|z| build_frame(body, z).map(|f| f.bound)).collect::<Result<_>>()?;
    let (argmin, min_bound) = bounds
        .iter()
        .copied()
        .enumerate()
        .fold((0, bounds[0]), |(i0, b0), (i, b)| if b < b0 { (i, b) } else { (i0, b0) });
    Ok(HhrScan { min_bound, argmin, bounds })
}

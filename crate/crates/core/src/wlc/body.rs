use minilp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::scalar::{self, Real};

/// Required slack of the interior point against every constraint.
pub const INTERIOR_MARGIN: f64 = 1e-10;

/// Bounded polyhedron `{x in C^n : Re<x, nu_k> < b_k}` with
/// `<x, nu> = sum x_i conj(nu_i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexBody<T: Real> {
    normals: Vec<Vec<Complex<T>>>,
    offsets: Vec<T>,
    interior_point: Vec<Complex<T>>,
    /// Per real coordinate `[min, max]` over the closed body.
    bbox: Vec<[f64; 2]>,
}

/// Wire form; complex vectors are interleaved `[re, im, ...]`. The
/// optional `z0` is a base point for callers and is not part of the body.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyDescriptor {
    pub normals: Vec<Vec<f64>>,
    pub offsets: Vec<f64>,
    pub interior_point: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z0: Option<Vec<f64>>,
}

fn interleaved(v: &[f64], what: &str) -> Result<Vec<Complex<f64>>> {
    match scalar::complex_from_interleaved(v) {
        Some(p) => Ok(p),
        None => bail!(Argument, "{what} needs an even number of reals, got {}", v.len()),
    }
}

impl BodyDescriptor {
    pub fn base_point(&self) -> Result<Option<Vec<Complex<f64>>>> {
        self.z0.as_deref().map(|z| interleaved(z, "z0")).transpose()
    }
}

/// `Re<x, nu>`.
pub(crate) fn re_pair<T: Real>(x: &[Complex<T>], nu: &[Complex<T>]) -> T {
    scalar::hermitian(x, nu).re
}

impl<T: Real> ConvexBody<T> {
    pub fn new(normals: Vec<Vec<Complex<T>>>, offsets: Vec<T>, interior_point: Vec<Complex<T>>) -> Result<Self> {
        let n = interior_point.len();
        if n == 0 {
            bail!(Argument, "body dimension must be positive");
        }
        if normals.len() != offsets.len() {
            bail!(Structural, "{} normals but {} offsets", normals.len(), offsets.len());
        }
        for (k, nu) in normals.iter().enumerate() {
            if nu.len() != n {
                bail!(Structural, "normal {k} has {} coordinates, body dimension is {n}", nu.len());
            }
            if !scalar::all_finite(nu) || scalar::euclid(nu) == T::zero() {
                bail!(Argument, "normal {k} must be finite and nonzero");
            }
        }
        if offsets.iter().any(|b| !b.is_finite()) || !scalar::all_finite(&interior_point) {
            bail!(Argument, "offsets and interior point must be finite");
        }
        let mut body = ConvexBody { normals, offsets, interior_point, bbox: Vec::new() };
        let margin = body.margin(&body.interior_point);
        if !(margin > T::lit(INTERIOR_MARGIN)) {
            bail!(Argument, "interior point is not strictly feasible (margin {margin})");
        }
        body.bbox = body.support_box()?;
        Ok(body)
    }

    /// Linear image of a validated body: boundedness is inherited, so the
    /// support problems are skipped and the box is left empty.
    pub(crate) fn image_of_bounded(normals: Vec<Vec<Complex<T>>>, offsets: Vec<T>, interior_point: Vec<Complex<T>>) -> Result<Self> {
        let body = ConvexBody { normals, offsets, interior_point, bbox: Vec::new() };
        let margin = body.margin(&body.interior_point);
        if !(margin > T::zero()) {
            bail!(Consistency, "image body lost its interior point (margin {margin})");
        }
        Ok(body)
    }

    pub fn from_descriptor(d: &BodyDescriptor) -> Result<Self> {
        let conv = |v: Vec<Complex<f64>>| scalar::point_from_f64::<T>(&v);
        let normals = d
            .normals
            .iter()
            .enumerate()
            .map(|(k, v)| interleaved(v, &format!("normal {k}")).map(conv))
            .collect::<Result<Vec<_>>>()?;
        let offsets = d.offsets.iter().map(|b| T::lit(*b)).collect();
        let p = conv(interleaved(&d.interior_point, "interior point")?);
        Self::new(normals, offsets, p)
    }

    pub fn descriptor(&self) -> BodyDescriptor {
        let il = |v: &[Complex<T>]| scalar::complex_to_interleaved(&scalar::point_to_f64(v));
        BodyDescriptor {
            normals: self.normals.iter().map(|v| il(v)).collect(),
            offsets: self.offsets.iter().map(|b| b.to_f64_lossy()).collect(),
            interior_point: il(&self.interior_point),
            z0: None,
        }
    }

    pub fn dim(&self) -> usize {
        self.interior_point.len()
    }

    pub fn normals(&self) -> &[Vec<Complex<T>>] {
        &self.normals
    }

    pub fn offsets(&self) -> &[T] {
        &self.offsets
    }

    pub fn interior_point(&self) -> &[Complex<T>] {
        &self.interior_point
    }

    /// Real bounding box, `[min, max]` per real coordinate (re, im
    /// interleaved). Empty for bodies produced by [`super::build_frame`].
    pub fn bounding_box(&self) -> &[[f64; 2]] {
        &self.bbox
    }

    /// `min_k (b_k - Re<x, nu_k>)`; positive exactly on the interior.
    pub fn margin(&self, x: &[Complex<T>]) -> T {
        self.normals
            .iter()
            .zip(&self.offsets)
            .map(|(nu, b)| *b - re_pair(x, nu))
            .fold(T::max_value().expect("bounded real"), |a, m| a.min(m))
    }

    pub fn contains(&self, x: &[Complex<T>]) -> bool {
        x.len() == self.dim() && self.margin(x) > T::zero()
    }

    /// `t * body + v`.
    pub fn affine_image(&self, t: T, v: &[Complex<T>]) -> Result<Self> {
        if !(t > T::zero()) || v.len() != self.dim() {
            bail!(Argument, "affine image needs t > 0 and a shift of the body dimension");
        }
        let offsets = self.normals.iter().zip(&self.offsets).map(|(nu, b)| t * *b + re_pair(v, nu)).collect();
        let p = self.interior_point.iter().zip(v).map(|(x, s)| *x * t + *s).collect();
        Self::new(self.normals.clone(), offsets, p)
    }

    fn support_box(&self) -> Result<Vec<[f64; 2]>> {
        let n2 = 2 * self.dim();
        let mut out = Vec::with_capacity(n2);
        for axis in 0..n2 {
            let mut pair = [0.0; 2];
            for (slot, dir) in [(0usize, OptimizationDirection::Minimize), (1, OptimizationDirection::Maximize)] {
                let mut lp = Problem::new(dir);
                let vars: Vec<_> = (0..n2)
                    .map(|i| lp.add_var(if i == axis { 1.0 } else { 0.0 }, (f64::NEG_INFINITY, f64::INFINITY)))
                    .collect();
                for (nu, b) in self.normals.iter().zip(&self.offsets) {
                    let terms: Vec<_> = nu
                        .iter()
                        .enumerate()
                        .flat_map(|(i, c)| [(vars[2 * i], c.re.to_f64_lossy()), (vars[2 * i + 1], c.im.to_f64_lossy())])
                        .collect();
                    lp.add_constraint(&terms[..], ComparisonOp::Le, b.to_f64_lossy());
                }
                match lp.solve() {
                    Ok(sol) => pair[slot] = sol.objective(),
                    Err(minilp::Error::Unbounded) => bail!(Argument, "body is unbounded along real axis {axis}"),
                    Err(minilp::Error::Infeasible) => bail!(Argument, "body constraints are infeasible"),
                }
            }
            out.push(pair);
        }
        Ok(out)
    }

    /// `count` interior points drawn uniformly by rejection from the
    /// bounding box, each with margin above `margin_floor`.
    pub fn sample_interior(&self, count: usize, seed: u64, margin_floor: T) -> Result<Vec<Vec<Complex<T>>>> {
        if self.bbox.is_empty() {
            bail!(Unsupported, "body has no bounding box to sample from");
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let limit = 10_000usize.saturating_mul(count.max(1));
        let mut tries = 0usize;
        while out.len() < count {
            tries += 1;
            if tries > limit {
                bail!(Argument, "rejection sampling found only {} of {count} interior points", out.len());
            }
            let x: Vec<Complex<T>> = (0..self.dim())
                .map(|i| {
                    let [a, b] = self.bbox[2 * i];
                    let [c, d] = self.bbox[2 * i + 1];
                    Complex::new(T::lit(rng.gen_range(a..=b)), T::lit(rng.gen_range(c..=d)))
                })
                .collect();
            if self.margin(&x) > margin_floor {
                out.push(x);
            }
        }
        Ok(out)
    }
}

/// Product of regular `m`-gons inscribed in the unit circle, one per
/// coordinate: `Re(x_i e^{-i theta_k}) < cos(pi/m)`.
pub fn polydisk_polygon<T: Real>(n: usize, m: usize) -> Result<ConvexBody<T>> {
    if n == 0 || m < 3 {
        bail!(Argument, "need n >= 1 and m >= 3");
    }
    let b = T::lit((std::f64::consts::PI / m as f64).cos());
    let mut normals = Vec::with_capacity(n * m);
    for i in 0..n {
        for k in 0..m {
            let th = std::f64::consts::TAU * k as f64 / m as f64;
            let mut nu = vec![scalar::czero(); n];
            nu[i] = Complex::new(T::lit(th.cos()), T::lit(th.sin()));
            normals.push(nu);
        }
    }
    ConvexBody::new(normals, vec![b; n * m], vec![scalar::czero(); n])
}

/// Circumscribed polytope of the unit ball of `C^2` with unit normals
/// `(cos a e^{ib}, sin a e^{ic})` on a grid of `2 * half_alpha + 1` values
/// of `a in [0, pi/2]` (so `a = pi/4` is included) and `phases` phases.
pub fn ball_polytope<T: Real>(half_alpha: usize, phases: usize) -> Result<ConvexBody<T>> {
    if half_alpha == 0 || phases < 3 {
        bail!(Argument, "need half_alpha >= 1 and phases >= 3");
    }
    let na = 2 * half_alpha;
    let cis = |t: f64| Complex::new(T::lit(t.cos()), T::lit(t.sin()));
    let mut normals = Vec::new();
    for ia in 0..=na {
        let a = std::f64::consts::FRAC_PI_2 * ia as f64 / na as f64;
        let (ca, sa) = if ia == 0 {
            (1.0, 0.0)
        } else if ia == na {
            (0.0, 1.0)
        } else {
            (a.cos(), a.sin())
        };
        let betas = if ia == na { 1 } else { phases };
        let gammas = if ia == 0 { 1 } else { phases };
        for ib in 0..betas {
            for ig in 0..gammas {
                let b = std::f64::consts::TAU * ib as f64 / phases as f64;
                let g = std::f64::consts::TAU * ig as f64 / phases as f64;
                normals.push(vec![cis(b) * T::lit(ca), cis(g) * T::lit(sa)]);
            }
        }
    }
    let k = normals.len();
    ConvexBody::new(normals, vec![T::one(); k], vec![scalar::czero(); 2])
}

//! Kobayashi distances on balanced realisations.
//!
//! Only what the squeezing bounds need is provided: `K(0, w)` on any
//! bounded symmetric domain (closed form through the domain norm), the
//! Mobius distance of the ball, the max rule for products, and sampled
//! upper envelopes of distances to a removed set.

use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::phjts::{complex_gaussian, spectral_norm};
use crate::scalar::{self, Real};
use crate::symdomain::{membership, DomainSpec, Membership};

fn require_interior<T: Real>(domain: &DomainSpec, w: &[Complex<T>], what: &str) -> Result<()> {
    match membership(domain, w)? {
        Membership::Interior => Ok(()),
        m => bail!(Argument, "{what} must be an interior point, got {m:?}"),
    }
}

/// `K_D(0, w) = atanh |w|_D` for a balanced realisation.
pub fn dist_from_origin<T: Real>(domain: &DomainSpec, w: &[Complex<T>]) -> Result<T> {
    require_interior(domain, w, "w")?;
    Ok(domain.norm(w)?.atanh())
}

/// Kobayashi distance of the unit ball of `C^n`.
///
/// The Mobius numerator `|z-w|^2 - (|z|^2|w|^2 - |<w,z>|^2)` is evaluated
/// with the Lagrange identity for the bracket so nearby points do not
/// cancel catastrophically.
pub fn ball_distance<T: Real>(z: &[Complex<T>], w: &[Complex<T>]) -> Result<T> {
    if z.len() != w.len() {
        bail!(Structural, "points have lengths {} and {}", z.len(), w.len());
    }
    if !(scalar::all_finite(z) && scalar::all_finite(w)) {
        bail!(Argument, "non-finite coordinates");
    }
    let (nz, nw) = (scalar::norm2(z), scalar::norm2(w));
    if !(nz < T::one() && nw < T::one()) {
        bail!(Argument, "ball distance needs points of the open unit ball");
    }
    let diff = z.iter().zip(w).fold(T::zero(), |acc, (a, b)| acc + scalar::abs2(*a - *b));
    let mut lagrange = T::zero();
    for i in 0..z.len() {
        for j in i + 1..z.len() {
            lagrange += scalar::abs2(z[i] * w[j] - z[j] * w[i]);
        }
    }
    let denom = scalar::abs2(scalar::creal(T::one()) - scalar::hermitian(w, z));
    let num = diff - lagrange;
    let t2 = if num > T::zero() { num / denom } else { T::zero() };
    let t = t2.sqrt();
    if t >= T::one() {
        bail!(Consistency, "Mobius image left the ball (|phi_z(w)| = {t})");
    }
    Ok(t.atanh())
}

/// Max of factor distances on a product of balls and discs.
///
/// Higher-rank factors are accepted when one of the two factor components
/// is the origin, where the closed form `atanh |w|` applies.
pub fn product_distance<T: Real>(domain: &DomainSpec, z: &[Complex<T>], w: &[Complex<T>]) -> Result<T> {
    require_interior(domain, z, "z")?;
    require_interior(domain, w, "w")?;
    let zs = domain.split(z)?;
    let ws = domain.split(w)?;
    let mut best = T::zero();
    for (k, (a, b)) in zs.iter().zip(&ws).enumerate() {
        let d = if domain.factors()[k].rank() == 1 {
            ball_distance(a.coords(), b.coords())?
        } else if a.is_zero() {
            spectral_norm(b).atanh()
        } else if b.is_zero() {
            spectral_norm(a).atanh()
        } else {
            bail!(
                Unsupported,
                "two-point distance on the rank-{} factor {} needs one point at the origin",
                domain.factors()[k].rank(),
                domain.factors()[k]
            );
        };
        best = best.max(d);
    }
    Ok(best)
}

/// Which coordinate a slice `{z_k = 0}` annihilates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SliceCoord {
    Last,
    /// Zero-based.
    Index(usize),
}

impl SliceCoord {
    /// Parses `z_n=0`, `z_2=0` or `z2 = 0`; indices are one-based.
    pub fn parse(equation: &str) -> Result<Self> {
        let s: String = equation.chars().filter(|c| !c.is_whitespace()).collect();
        let Some(lhs) = s.strip_suffix("=0") else {
            bail!(Argument, "slice equation {equation:?} must have the form z_k=0");
        };
        let Some(idx) = lhs.strip_prefix('z') else {
            bail!(Argument, "slice equation {equation:?} must have the form z_k=0");
        };
        let idx = idx.strip_prefix('_').unwrap_or(idx);
        if idx == "n" {
            return Ok(SliceCoord::Last);
        }
        match idx.parse::<usize>() {
            Ok(k) if k >= 1 => Ok(SliceCoord::Index(k - 1)),
            _ => bail!(Argument, "slice index {idx:?} must be `n` or a positive integer"),
        }
    }

    pub fn resolve(self, dim: usize) -> Result<usize> {
        match self {
            SliceCoord::Last if dim > 0 => Ok(dim - 1),
            SliceCoord::Index(k) if k < dim => Ok(k),
            _ => bail!(Structural, "slice coordinate out of range for dimension {dim}"),
        }
    }

    fn equation(self) -> String {
        match self {
            SliceCoord::Last => "z_n=0".into(),
            SliceCoord::Index(k) => format!("z_{}=0", k + 1),
        }
    }
}

/// A set removed from the ambient domain, given as a sampler.
#[derive(Clone, Debug, PartialEq)]
pub enum RemovedSet<T: Real> {
    /// Finite point cloud.
    Points(Vec<Vec<Complex<T>>>),
    /// The analytic slice `{z in D : z_k = 0}` with a base sample budget.
    Slice { coord: SliceCoord, samples: usize },
    /// Closed Euclidean ball intersected with the domain.
    Ball { center: Vec<Complex<T>>, radius: T, samples: usize },
}

/// JSON form of a [`RemovedSet`]. Points are interleaved `[re, im, ...]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum RemovedSetDescriptor {
    Points { data: Vec<Vec<f64>> },
    Slice { equation: String, samples: usize },
    Ball { center: Vec<f64>, radius: f64, samples: usize },
}

fn interleaved<T: Real>(v: &[f64]) -> Result<Vec<Complex<T>>> {
    match scalar::complex_from_interleaved(v) {
        Some(p) => Ok(scalar::point_from_f64(&p)),
        None => bail!(Argument, "interleaved coordinates need an even count, got {}", v.len()),
    }
}

impl<T: Real> RemovedSet<T> {
    pub fn from_descriptor(d: &RemovedSetDescriptor) -> Result<Self> {
        Ok(match d {
            RemovedSetDescriptor::Points { data } => {
                if data.is_empty() {
                    bail!(Argument, "a point set needs at least one point");
                }
                RemovedSet::Points(data.iter().map(|p| interleaved(p)).collect::<Result<_>>()?)
            }
            RemovedSetDescriptor::Slice { equation, samples } => {
                if *samples == 0 {
                    bail!(Argument, "slice sample budget must be positive");
                }
                RemovedSet::Slice { coord: SliceCoord::parse(equation)?, samples: *samples }
            }
            RemovedSetDescriptor::Ball { center, radius, samples } => {
                if !(radius.is_finite() && *radius >= 0.0) || *samples == 0 {
                    bail!(Argument, "ball needs a finite radius >= 0 and a positive sample budget");
                }
                RemovedSet::Ball { center: interleaved(center)?, radius: T::lit(*radius), samples: *samples }
            }
        })
    }

    pub fn descriptor(&self) -> RemovedSetDescriptor {
        match self {
            RemovedSet::Points(ps) => RemovedSetDescriptor::Points {
                data: ps.iter().map(|p| scalar::complex_to_interleaved(&scalar::point_to_f64(p))).collect(),
            },
            RemovedSet::Slice { coord, samples } => {
                RemovedSetDescriptor::Slice { equation: coord.equation(), samples: *samples }
            }
            RemovedSet::Ball { center, radius, samples } => RemovedSetDescriptor::Ball {
                center: scalar::complex_to_interleaved(&scalar::point_to_f64(center)),
                radius: radius.to_f64_lossy(),
                samples: *samples,
            },
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: RemovedSetDescriptor =
            serde_json::from_str(s).map_err(|e| crate::Error::Argument(format!("removed set: {e}")))?;
        Self::from_descriptor(&d)
    }

    /// Checks dimensions against the domain and that listed points are interior.
    pub fn validate(&self, domain: &DomainSpec) -> Result<()> {
        let n = domain.total_dim();
        match self {
            RemovedSet::Points(ps) => {
                for p in ps {
                    require_interior(domain, p, "removed point")?;
                }
            }
            RemovedSet::Slice { coord, .. } => {
                coord.resolve(n)?;
            }
            RemovedSet::Ball { center, .. } => {
                if center.len() != n {
                    bail!(Structural, "ball centre has {} coordinates, domain dimension is {n}", center.len());
                }
            }
        }
        Ok(())
    }

    /// Number of samples emitted up to and including `level`.
    pub fn budget(&self, level: usize) -> usize {
        match self {
            RemovedSet::Points(ps) => ps.len(),
            RemovedSet::Slice { samples, .. } | RemovedSet::Ball { samples, .. } => {
                samples.saturating_mul(4usize.saturating_pow(level as u32))
            }
        }
    }

    /// `z` lies in the set within `tol`.
    pub fn contains(&self, domain: &DomainSpec, z: &[Complex<T>], tol: T) -> Result<bool> {
        Ok(match self {
            RemovedSet::Points(ps) => ps.iter().any(|p| {
                let d: Vec<_> = p.iter().zip(z).map(|(a, b)| *a - *b).collect();
                scalar::euclid(&d) <= tol
            }),
            RemovedSet::Slice { coord, .. } => scalar::modulus(z[coord.resolve(domain.total_dim())?]) <= tol,
            RemovedSet::Ball { center, radius, .. } => {
                let d: Vec<_> = center.iter().zip(z).map(|(a, b)| *a - *b).collect();
                scalar::euclid(&d) <= *radius + tol
            }
        })
    }

    /// Sample `index` of the stream for `seed`, or `None` when the draw
    /// falls outside the domain interior. Stateless: each index owns a
    /// ChaCha stream.
    pub fn sample(&self, domain: &DomainSpec, index: usize, seed: u64) -> Option<Vec<Complex<T>>> {
        let point = match self {
            RemovedSet::Points(ps) => ps.get(index).cloned()?,
            RemovedSet::Slice { coord, .. } => {
                let n = domain.total_dim();
                let k = coord.resolve(n).ok()?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(index as u64);
                let mut g: Vec<Complex<T>> = (0..n).map(|_| complex_gaussian(&mut rng)).collect();
                g[k] = scalar::czero();
                let norm = domain.norm(&g).ok()?;
                if n == 1 || norm == T::zero() {
                    vec![scalar::czero(); n]
                } else {
                    let u: f64 = rng.gen();
                    let r = T::lit(u.powf(1.0 / (2.0 * (n - 1) as f64)));
                    g.iter().map(|c| *c * (r / norm)).collect()
                }
            }
            RemovedSet::Ball { center, radius, .. } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(index as u64);
                let g: Vec<Complex<T>> = (0..center.len()).map(|_| complex_gaussian(&mut rng)).collect();
                let gn = scalar::euclid(&g);
                if gn == T::zero() {
                    return None;
                }
                // Half the budget sits on the sphere, where minimisers of a
                // distance to the ball live.
                let frac = if rng.gen::<bool>() {
                    1.0
                } else {
                    rng.gen::<f64>().powf(1.0 / (2.0 * center.len() as f64))
                };
                let s = *radius * T::lit(frac) / gn;
                center.iter().zip(&g).map(|(c, d)| *c + *d * s).collect()
            }
        };
        matches!(membership(domain, &point), Ok(Membership::Interior)).then_some(point)
    }
}

/// Upper estimate of `K(z; S)` from the samples up to one level.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LevelEstimate<T> {
    pub level: usize,
    pub samples: usize,
    pub value: T,
}

/// Nonincreasing envelope of sampled upper estimates of `K(z; S)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetDistance<T> {
    pub levels: Vec<LevelEstimate<T>>,
    /// `z` lies in `S`; every level reports 0.
    pub degenerate: bool,
}

impl<T: Real> SetDistance<T> {
    /// Estimate at the finest level.
    pub fn value(&self) -> T {
        self.levels.last().map(|l| l.value).unwrap_or_else(T::zero)
    }

    pub fn finest_level(&self) -> usize {
        self.levels.last().map(|l| l.level).unwrap_or(0)
    }
}

/// Kobayashi distance between two interior points where this module can
/// evaluate it.
pub fn distance<T: Real>(domain: &DomainSpec, z: &[Complex<T>], w: &[Complex<T>]) -> Result<T> {
    require_interior(domain, z, "z")?;
    require_interior(domain, w, "w")?;
    if z.iter().all(|c| *c == scalar::czero()) {
        return dist_from_origin(domain, w);
    }
    if w.iter().all(|c| *c == scalar::czero()) {
        return dist_from_origin(domain, z);
    }
    product_distance(domain, z, w)
}

/// Sampled upper envelope of `K(z; S) = inf_{w in S} K(z, w)`.
///
/// Level `L` uses the first `N * 4^L` samples of a seeded stream, so the
/// sample sets are nested and the envelope is nonincreasing by
/// construction. Finite point sets have a single exact level.
pub fn dist_to_set<T: Real>(
    domain: &DomainSpec,
    z: &[Complex<T>],
    set: &RemovedSet<T>,
    levels: usize,
    seed: u64,
    tol: T,
) -> Result<SetDistance<T>> {
    require_interior(domain, z, "z")?;
    set.validate(domain)?;
    let levels = match set {
        RemovedSet::Points(_) => 1,
        _ => levels.max(1),
    };
    if set.contains(domain, z, tol)? {
        let levels = (0..levels).map(|l| LevelEstimate { level: l, samples: set.budget(l), value: T::zero() }).collect();
        return Ok(SetDistance { levels, degenerate: true });
    }
    let mut out = Vec::with_capacity(levels);
    let mut best: Option<T> = None;
    let mut start = 0;
    for level in 0..levels {
        let end = set.budget(level);
        let chunk = (start..end)
            .into_par_iter()
            .map(|i| match set.sample(domain, i, seed) {
                Some(w) => distance(domain, z, &w).map(Some),
                None => Ok(None),
            })
            .try_fold(|| None, |acc: Option<T>, d| d.map(|d| min_opt(acc, d)))
            .try_reduce(|| None, |a, b| Ok(min_opt(a, b)))?;
        best = min_opt(best, chunk);
        let Some(value) = best else {
            bail!(Argument, "removed-set sampler produced no interior points after {end} draws");
        };
        out.push(LevelEstimate { level, samples: end, value });
        start = end;
    }
    Ok(SetDistance { levels: out, degenerate: false })
}

fn min_opt<T: Real>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y < x { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

//! Squeezing-function constants and two-sided bounds.
//!
//! Every bound is a [`SqueezeBound`] carrying the results it came from, so
//! callers can tell an exact value from a sampled envelope.

mod hardy;

pub use hardy::{hardy_certificate, CertificateStatus, HardyCertificate, RhoReport, DEFAULT_RHO_SCHEDULE};

use nalgebra::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::kobayashi::{dist_to_set, RemovedSet, SetDistance};
use crate::scalar::Real;
use crate::symdomain::DomainSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Lower,
    Upper,
    Both,
}

/// Where one side of a bound comes from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub side: Side,
    pub result: String,
    pub detail: String,
}

impl Provenance {
    fn new(side: Side, result: &str, detail: impl Into<String>) -> Self {
        Provenance { side, result: result.into(), detail: detail.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SqueezeBound<T> {
    pub lower: T,
    pub upper: T,
    /// The two sides agree by a theorem, not by coincidence.
    pub exact: bool,
    pub provenance: Vec<Provenance>,
}

impl<T: Real> SqueezeBound<T> {
    fn checked(lower: T, upper: T, exact: bool, provenance: Vec<Provenance>) -> Result<Self> {
        let slack = T::lit(1e-12);
        if !(lower >= T::zero() && lower <= upper + slack && upper <= T::one() + slack) {
            bail!(Consistency, "bound [{lower}, {upper}] is not an interval inside [0, 1]");
        }
        if exact && (upper - lower).abs() > slack {
            bail!(Consistency, "exact bound with distinct sides [{lower}, {upper}]");
        }
        Ok(SqueezeBound { lower, upper: upper.min(T::one()), exact, provenance })
    }

    pub fn contains(&self, s: T, tol: T) -> bool {
        s >= self.lower - tol && s <= self.upper + tol
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }
}

/// `s_D = 1/sqrt(rank D)` for a bounded symmetric domain, products included.
pub fn exact_constant<T: Real>(domain: &DomainSpec) -> SqueezeBound<T> {
    let r = domain.rank();
    let s = T::one() / T::from_usize(r).expect("rank fits").sqrt();
    let ranks: Vec<String> = domain.factors().iter().map(|f| format!("{f}:{}", f.rank())).collect();
    let mut provenance =
        vec![Provenance::new(Side::Both, "symmetric-domain squeezing constant", format!("rank {r} = {}", ranks.join(" + ")))];
    if domain.factors().len() > 1 {
        provenance.push(Provenance::new(Side::Both, "rank additivity over products", format!("{} factors", domain.factors().len())));
    }
    SqueezeBound { lower: s, upper: s, exact: true, provenance }
}

/// `(sum 1/s_i^2)^(-1/2)`, the elementary lower bound for a product.
pub fn product_lower_bound<T: Real>(parts: &[T]) -> Result<T> {
    if parts.is_empty() {
        bail!(Argument, "product bound needs at least one factor value");
    }
    let mut acc = T::zero();
    for s in parts {
        if !(*s > T::zero() && *s <= T::one()) {
            bail!(Argument, "factor squeezing values must lie in (0, 1], got {s}");
        }
        acc += T::one() / (*s * *s);
    }
    Ok(T::one() / acc.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuxDirection {
    StdToAux,
    AuxToStd,
}

/// Interval forced on the other squeezing function by
/// `s/sqrt(r) <= s_aux <= sqrt(r) s`, capped at 1.
pub fn aux_conversion<T: Real>(value: T, rank: usize, direction: AuxDirection) -> Result<[T; 2]> {
    if !(value > T::zero() && value <= T::one()) {
        bail!(Argument, "squeezing value must lie in (0, 1], got {value}");
    }
    if rank == 0 {
        bail!(Argument, "rank must be at least 1");
    }
    let sr = T::from_usize(rank).expect("rank fits").sqrt();
    // The relation is symmetric in the two functions, so both directions
    // produce the same interval shape.
    let _ = direction;
    Ok([value / sr, (value * sr).min(T::one())])
}

/// Two-sided bound for `D = Omega \ S` together with the distance envelope
/// it was computed from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RemovedSetBound<T> {
    pub bound: SqueezeBound<T>,
    pub distance: SetDistance<T>,
}

/// `tanh(K)/sqrt(r) <= s_D(z) <= tanh(K)` with `K` the sampled envelope of
/// `K_Omega(z; S)`.
///
/// The envelope approaches `K` from above, so both reported sides are
/// over-estimates of the sides at the true distance; the provenance records
/// the level used.
pub fn removed_set_bounds<T: Real>(
    domain: &DomainSpec,
    z: &[Complex<T>],
    set: &RemovedSet<T>,
    levels: usize,
    seed: u64,
    tol: T,
) -> Result<RemovedSetBound<T>> {
    if !domain.is_irreducible() {
        bail!(Unsupported, "removed-set bounds are certified for irreducible ambient domains only");
    }
    if domain.total_dim() < 2 {
        bail!(Unsupported, "removed-set bounds need ambient dimension at least 2");
    }
    let distance = dist_to_set(domain, z, set, levels, seed, tol)?;
    let r = domain.rank();
    if distance.degenerate {
        let prov = vec![Provenance::new(Side::Both, "removed-set bound", "z lies in S; no information")];
        let bound = SqueezeBound { lower: T::zero(), upper: T::zero(), exact: true, provenance: prov };
        return Ok(RemovedSetBound { bound, distance });
    }
    let k = distance.value();
    let t = k.tanh();
    let sr = T::from_usize(r).expect("rank fits").sqrt();
    let level = format!(
        "K_hat = {k} at level {} ({} samples), approximates K from above",
        distance.finest_level(),
        distance.levels.last().map(|l| l.samples).unwrap_or(0)
    );
    let exact = r == 1;
    let provenance = if exact {
        vec![Provenance::new(Side::Both, "removed-set equality for the ball", level)]
    } else {
        vec![
            Provenance::new(Side::Lower, "removed-set lower bound tanh(K)/sqrt(rank)", format!("rank {r}; {level}")),
            Provenance::new(Side::Upper, "removed-set upper bound tanh(K)", level),
        ]
    };
    let lower = if exact { t } else { t / sr };
    let bound = SqueezeBound::checked(lower, t, exact, provenance)?;
    Ok(RemovedSetBound { bound, distance })
}

/// User-asserted hypotheses on the domain; echoed, never verified.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExclusionHypotheses {
    pub contractible: bool,
    pub pseudoconvex: bool,
    pub dim: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExclusionRule {
    /// Contractible pseudoconvex: no product of `m` or more irreducible factors.
    #[serde(rename = "a")]
    IrreducibleFactors,
    /// Pseudoconvex, `n >= 4`: no product of `m` factors of dimension at least 2.
    #[serde(rename = "b")]
    HighDimensionalFactors,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostic {
    pub rule: ExclusionRule,
    pub m: usize,
    pub message: String,
    pub hypotheses: ExclusionHypotheses,
}

/// Product decompositions ruled out by a squeezing value `s > 1/sqrt(m)`.
pub fn product_exclusion<T: Real>(s: T, hyp: ExclusionHypotheses) -> Result<Vec<Diagnostic>> {
    if !(s > T::zero() && s <= T::one()) {
        bail!(Argument, "squeezing value must lie in (0, 1], got {s}");
    }
    let n = hyp.dim;
    let beats = |m: usize| s > T::one() / T::from_usize(m).expect("m fits").sqrt();
    let mut out = Vec::new();
    if hyp.contractible && hyp.pseudoconvex && n >= 2 {
        for m in (2..=n).filter(|m| beats(*m)) {
            out.push(Diagnostic {
                rule: ExclusionRule::IrreducibleFactors,
                m,
                message: format!("(a): not a product of {m} or more irreducible factors"),
                hypotheses: hyp,
            });
        }
    }
    if hyp.pseudoconvex && n >= 4 {
        for m in (2..=n / 2).filter(|m| beats(*m)) {
            out.push(Diagnostic {
                rule: ExclusionRule::HighDimensionalFactors,
                m,
                message: format!("(b): not a product of {m} factors of dimension >= 2"),
                hypotheses: hyp,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phjts::CartanFactor;

    const H: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn exact_examples() {
        for n in 1..=4 {
            assert_eq!(exact_constant::<f64>(&DomainSpec::ball(n).unwrap()).lower, 1.0);
        }
        let b = exact_constant::<f64>(&DomainSpec::polydisc(2).unwrap());
        assert!((b.lower - H).abs() < 1e-15 && b.exact);
        let d = DomainSpec::new(vec![CartanFactor::type_i(2, 2).unwrap(), CartanFactor::type_iv(5).unwrap()]).unwrap();
        assert_eq!(exact_constant::<f64>(&d).upper, 0.5);
    }

    #[test]
    fn product_bound_examples() {
        assert!((product_lower_bound(&[1.0, 1.0]).unwrap() - H).abs() < 1e-15);
        let v = product_lower_bound(&[H, 1.0 / 3f64.sqrt()]).unwrap();
        assert!((v - 1.0 / 5f64.sqrt()).abs() < 1e-15);
        assert_eq!(product_lower_bound(&[0.3]).unwrap(), 0.3);
        assert!(product_lower_bound(&[0.0, 1.0]).is_err());
        assert!(product_lower_bound::<f64>(&[]).is_err());
    }

    #[test]
    fn aux_examples() {
        let [lo, hi] = aux_conversion(1.0, 2, AuxDirection::StdToAux).unwrap();
        assert!((lo - H).abs() < 1e-15 && hi == 1.0);
        assert_eq!(aux_conversion(0.4, 1, AuxDirection::StdToAux).unwrap(), [0.4, 0.4]);
        assert_eq!(aux_conversion(0.5, 4, AuxDirection::AuxToStd).unwrap(), [0.25, 1.0]);
        assert!(aux_conversion(1.5, 2, AuxDirection::AuxToStd).is_err());
        assert!(aux_conversion(0.5, 0, AuxDirection::AuxToStd).is_err());
    }

    #[test]
    fn exclusion_examples() {
        let both = ExclusionHypotheses { contractible: true, pseudoconvex: true, dim: 3 };
        let d = product_exclusion(0.8, both).unwrap();
        assert_eq!(d.iter().map(|x| x.m).collect::<Vec<_>>(), vec![2, 3]);
        assert!(d.iter().all(|x| x.rule == ExclusionRule::IrreducibleFactors));
        assert!(product_exclusion(0.5, both).unwrap().is_empty());
        let pc = ExclusionHypotheses { contractible: false, pseudoconvex: true, dim: 4 };
        assert!(product_exclusion(0.6, pc).unwrap().is_empty());
        let d = product_exclusion(0.75, pc).unwrap();
        assert_eq!(d.len(), 1);
        assert_eq!((d[0].rule, d[0].m), (ExclusionRule::HighDimensionalFactors, 2));
        // Strict inequality at the threshold.
        assert!(product_exclusion(1.0 / 2f64.sqrt(), ExclusionHypotheses { dim: 2, ..both }).unwrap().is_empty());
    }

    #[test]
    fn removed_point_from_ball_is_norm() {
        let d = DomainSpec::ball(2).unwrap();
        let z: [Complex<f64>; 2] = [Complex::new(0.3, 0.2), Complex::new(-0.1, 0.4)];
        let s = RemovedSet::Points(vec![vec![Complex::new(0.0, 0.0); 2]]);
        let b = removed_set_bounds(&d, &z, &s, 1, 0, 1e-12).unwrap().bound;
        let n = crate::scalar::euclid(&z);
        assert!(b.exact && (b.lower - n).abs() < 1e-14 && (b.upper - n).abs() < 1e-14);
    }

    #[test]
    fn removed_point_from_type_i() {
        let d = DomainSpec::single(CartanFactor::type_i(2, 2).unwrap());
        let c = |x: f64| Complex::new(x, 0.0);
        let z = [c(0.5), c(0.0), c(0.0), c(0.2)];
        let s = RemovedSet::Points(vec![vec![c(0.0); 4]]);
        let b = removed_set_bounds(&d, &z, &s, 1, 0, 1e-12).unwrap().bound;
        assert!(!b.exact);
        assert!((b.upper - 0.5).abs() < 1e-14 && (b.lower - 0.5 * H).abs() < 1e-14);
        assert!(removed_set_bounds(&DomainSpec::polydisc(2).unwrap(), &z[..2], &s, 1, 0, 1e-12).is_err());
    }
}

//! Bounded symmetric domains realised as spectral-norm unit balls.
//!
//! A [`DomainSpec`] is a finite product of Cartan factors. Points are
//! concatenated factor coordinates; each factor may carry a scalar
//! realisation scale `s`, in which case that factor's part of the domain is
//! `s * {x : |x|_spec < 1}`.

use nalgebra::Complex;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{bail, Result};
use crate::phjts::{
    self, spectral_decompose, spectral_norm, tripotent_rank, CartanFactor, FactorKind, JtsElement,
};
use crate::scalar::{self, Real};

/// Half-width of the band around 1 classified as boundary.
pub const BOUNDARY_BAND: f64 = 1e-10;
/// Spectral values at least `1 - STRATUM_THRESHOLD` count as unit values.
pub const STRATUM_THRESHOLD: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DomainDescriptor", into = "DomainDescriptor")]
pub struct DomainSpec {
    factors: Vec<CartanFactor>,
    scales: Vec<f64>,
}

/// Wire form: `{"factors":[{"kind":"I","p":2,"q":3},{"kind":"IV","n":5}]}`,
/// with an optional `"scales"` array.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDescriptor {
    pub factors: Vec<CartanFactor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scales: Option<Vec<f64>>,
}

impl TryFrom<DomainDescriptor> for DomainSpec {
    type Error = crate::Error;

    fn try_from(d: DomainDescriptor) -> Result<Self> {
        match d.scales {
            None => DomainSpec::new(d.factors),
            Some(s) => DomainSpec::with_scales(d.factors, s),
        }
    }
}

impl From<DomainSpec> for DomainDescriptor {
    fn from(d: DomainSpec) -> Self {
        let scales = if d.scales.iter().all(|s| *s == 1.0) { None } else { Some(d.scales) };
        DomainDescriptor { factors: d.factors, scales }
    }
}

impl DomainSpec {
    pub fn new(factors: Vec<CartanFactor>) -> Result<Self> {
        let n = factors.len();
        Self::with_scales(factors, vec![1.0; n])
    }

    pub fn with_scales(factors: Vec<CartanFactor>, scales: Vec<f64>) -> Result<Self> {
        if factors.is_empty() {
            bail!(Argument, "a domain needs at least one factor");
        }
        if scales.len() != factors.len() {
            bail!(Argument, "{} scales for {} factors", scales.len(), factors.len());
        }
        if scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            bail!(Argument, "realisation scales must be positive and finite");
        }
        Ok(DomainSpec { factors, scales })
    }

    pub fn single(factor: CartanFactor) -> Self {
        DomainSpec { factors: vec![factor], scales: vec![1.0] }
    }

    /// The unit ball of `C^n`.
    pub fn ball(n: usize) -> Result<Self> {
        Ok(Self::single(CartanFactor::ball(n)?))
    }

    /// The polydisc `D^n`.
    pub fn polydisc(n: usize) -> Result<Self> {
        Self::new(vec![CartanFactor::disc(); n])
    }

    /// Same factors, each rescaled to its normalised realisation.
    pub fn normalized(&self) -> Self {
        let scales = self.factors.iter().map(|f| normalize_realization(*f).scale).collect();
        DomainSpec { factors: self.factors.clone(), scales }
    }

    pub fn factors(&self) -> &[CartanFactor] {
        &self.factors
    }

    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn total_dim(&self) -> usize {
        self.factors.iter().map(|f| f.ambient_dim()).sum()
    }

    /// Sum of the factor ranks.
    pub fn rank(&self) -> usize {
        self.factors.iter().map(|f| f.rank()).sum()
    }

    pub fn is_irreducible(&self) -> bool {
        self.factors.len() == 1
    }

    /// Coordinate range of factor `k` inside a domain point.
    pub fn factor_range(&self, k: usize) -> std::ops::Range<usize> {
        let start: usize = self.factors[..k].iter().map(|f| f.ambient_dim()).sum();
        start..start + self.factors[k].ambient_dim()
    }

    pub(crate) fn check_point<T: Real>(&self, z: &[Complex<T>]) -> Result<()> {
        if z.len() != self.total_dim() {
            bail!(Structural, "point has {} coordinates, domain dimension is {}", z.len(), self.total_dim());
        }
        if !scalar::all_finite(z) {
            bail!(Argument, "point has non-finite coordinates");
        }
        Ok(())
    }

    /// Factor components of `z` in unscaled triple-system coordinates.
    pub fn split<T: Real>(&self, z: &[Complex<T>]) -> Result<Vec<JtsElement<T>>> {
        self.check_point(z)?;
        (0..self.factors.len())
            .map(|k| {
                let inv = T::one() / T::lit(self.scales[k]);
                let coords = z[self.factor_range(k)].iter().map(|c| *c * inv).collect();
                JtsElement::new(self.factors[k], coords)
            })
            .collect()
    }

    /// Inverse of [`DomainSpec::split`].
    pub fn join<T: Real>(&self, parts: &[JtsElement<T>]) -> Result<Vec<Complex<T>>> {
        if parts.len() != self.factors.len() {
            bail!(Structural, "{} parts for {} factors", parts.len(), self.factors.len());
        }
        let mut out = Vec::with_capacity(self.total_dim());
        for (k, part) in parts.iter().enumerate() {
            if part.factor() != self.factors[k] {
                bail!(Structural, "part {k} belongs to {}, expected {}", part.factor(), self.factors[k]);
            }
            let s = T::lit(self.scales[k]);
            out.extend(part.coords().iter().map(|c| *c * s));
        }
        Ok(out)
    }

    /// Minkowski functional of the domain: max over factors of the scaled
    /// spectral norm.
    pub fn norm<T: Real>(&self, z: &[Complex<T>]) -> Result<T> {
        Ok(self.split(z)?.iter().map(spectral_norm).fold(T::zero(), |a, b| if b > a { b } else { a }))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Interior,
    Boundary,
    Exterior,
}

/// Classifies `z` against the unit sphere of the domain norm with a band of
/// [`BOUNDARY_BAND`].
pub fn membership<T: Real>(domain: &DomainSpec, z: &[Complex<T>]) -> Result<Membership> {
    let n = domain.norm(z)?;
    let band = T::lit(BOUNDARY_BAND);
    Ok(if n < T::one() - band {
        Membership::Interior
    } else if n <= T::one() + band {
        Membership::Boundary
    } else {
        Membership::Exterior
    })
}

/// The scalar map `Lambda = id / sqrt(rank)` taking a factor to its
/// normalised realisation: Shilov boundary at Euclidean distance 1 and
/// `dist(0, boundary) = 1/sqrt(rank)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RealizationScaling {
    pub factor: CartanFactor,
    pub scale: f64,
}

impl RealizationScaling {
    pub fn apply<T: Real>(&self, x: &JtsElement<T>) -> JtsElement<T> {
        x.scale_real(T::lit(self.scale))
    }
}

pub fn normalize_realization(factor: CartanFactor) -> RealizationScaling {
    RealizationScaling { factor, scale: 1.0 / (factor.rank() as f64).sqrt() }
}

/// A boundary point written as `x = e + v`, `e` a tripotent of rank `j` and
/// `v` in `V_0(e)` with `|v| < 1`. Coordinates are unscaled.
#[derive(Clone, Debug)]
pub struct BoundaryStratum<T: Real> {
    pub j: usize,
    pub e: JtsElement<T>,
    pub v: JtsElement<T>,
    /// `||x - (e + v)||`.
    pub reconstruction_residual: T,
    /// `||D(e,e) v||`.
    pub peirce_residual: T,
    pub v_norm: T,
}

/// Locates the boundary stratum of `x` for an irreducible domain.
pub fn boundary_stratum<T: Real>(domain: &DomainSpec, x: &[Complex<T>], tol: T) -> Result<BoundaryStratum<T>> {
    if !domain.is_irreducible() {
        bail!(Unsupported, "boundary strata are defined here for irreducible domains only");
    }
    match membership(domain, x)? {
        Membership::Boundary => {}
        other => bail!(Precondition, "boundary stratum needs a boundary point, got {other:?}"),
    }
    let xe = domain.split(x)?.remove(0);
    let spec = spectral_decompose(&xe, tol)?;
    let unit = T::one() - T::lit(STRATUM_THRESHOLD);
    let factor = xe.factor();
    let mut e = JtsElement::zero(factor);
    let mut v = JtsElement::zero(factor);
    for (l, t) in spec.lambdas.iter().zip(&spec.tripotents) {
        if *l >= unit {
            e = &e + t;
        } else {
            v = v.axpy(scalar::creal(*l), t);
        }
    }
    let j = tripotent_rank(&e, tol.max(T::lit(1e-8)))?;
    let reconstruction_residual = (&xe - &(&e + &v)).norm();
    let peirce_residual = phjts::triple_product(&e, &e, &v)?.norm();
    let v_norm = spectral_norm(&v);
    let check = tol.max(T::lit(1e-8)) * (T::one() + xe.norm());
    if peirce_residual > check {
        bail!(Consistency, "stratum remainder is not in V_0(e) (residual {peirce_residual})");
    }
    if !(v_norm < unit) {
        bail!(Consistency, "stratum remainder has spectral norm {v_norm}");
    }
    Ok(BoundaryStratum { j, e, v, reconstruction_residual, peirce_residual, v_norm })
}

/// `x` lies on the Shilov boundary: its stratum index equals the rank.
pub fn shilov_membership<T: Real>(domain: &DomainSpec, x: &[Complex<T>], tol: T) -> Result<bool> {
    let s = boundary_stratum(domain, x, tol)?;
    Ok(s.j == domain.factors()[0].rank())
}

/// `rank` mutually orthogonal primitive tripotents of the factor.
pub fn frame<T: Real>(factor: CartanFactor) -> Vec<JtsElement<T>> {
    let r = factor.rank();
    let one = scalar::creal(T::one());
    let matrix_unit = |entries: &[(usize, usize, Complex<T>)]| {
        let (p, q) = factor.kind().matrix_shape().expect("matrix factor");
        let mut m = nalgebra::DMatrix::from_element(p, q, scalar::czero());
        for &(i, j, v) in entries {
            m[(i, j)] = v;
        }
        JtsElement::from_matrix(factor, &m).expect("frame element is structurally valid")
    };
    match factor.kind() {
        FactorKind::I { .. } | FactorKind::III { .. } => (0..r).map(|j| matrix_unit(&[(j, j, one)])).collect(),
        FactorKind::II { .. } => {
            (0..r).map(|j| matrix_unit(&[(2 * j, 2 * j + 1, one), (2 * j + 1, 2 * j, -one)])).collect()
        }
        FactorKind::IV { n } => {
            let h = T::lit(std::f64::consts::FRAC_1_SQRT_2);
            [h, -h]
                .into_iter()
                .map(|s| {
                    let mut coords = vec![scalar::czero(); n];
                    coords[0] = scalar::creal(h);
                    coords[1] = Complex::new(T::zero(), s);
                    JtsElement::new(factor, coords).expect("length matches")
                })
                .collect()
        }
    }
}

/// The totally geodesic polydisc `zeta -> sum zeta_j e_j` over the
/// concatenated factor frames; `|phi(zeta)|_D = max |zeta_j|`.
#[derive(Clone, Debug)]
pub struct PolydiskEmbedding<T: Real> {
    domain: DomainSpec,
    /// `(factor index, frame tripotent)` per polydisc coordinate.
    axes: Vec<(usize, JtsElement<T>)>,
}

pub fn maximal_polydisk<T: Real>(domain: &DomainSpec) -> PolydiskEmbedding<T> {
    let axes = domain
        .factors()
        .iter()
        .enumerate()
        .flat_map(|(k, f)| frame::<T>(*f).into_iter().map(move |e| (k, e)))
        .collect();
    PolydiskEmbedding { domain: domain.clone(), axes }
}

impl<T: Real> PolydiskEmbedding<T> {
    pub fn rank(&self) -> usize {
        self.axes.len()
    }

    pub fn domain(&self) -> &DomainSpec {
        &self.domain
    }

    pub fn eval(&self, zeta: &[Complex<T>]) -> Result<Vec<Complex<T>>> {
        if zeta.len() != self.axes.len() {
            bail!(Structural, "polydisc point has {} coordinates, rank is {}", zeta.len(), self.axes.len());
        }
        let mut parts: Vec<JtsElement<T>> = self.domain.factors().iter().map(|f| JtsElement::zero(*f)).collect();
        for ((k, e), z) in self.axes.iter().zip(zeta) {
            parts[*k] = parts[*k].axpy(*z, e);
        }
        self.domain.join(&parts)
    }

    /// The `j`-th axis disc `zeta -> phi(zeta eps_j)`.
    pub fn axis(&self, j: usize, zeta: Complex<T>) -> Vec<Complex<T>> {
        let mut z = vec![scalar::czero(); self.axes.len()];
        z[j] = zeta;
        self.eval(&z).expect("axis point has the right length")
    }
}

/// Random boundary point of an unscaled factor.
///
/// A Gaussian element supplies the spectral frame; its spectral values are
/// replaced by `1 >= l_2 >= ... >= 0`, each drawn uniformly with atoms of
/// mass 1/3 at both 0 and 1 so every stratum, the Shilov boundary
/// included, receives positive mass.
pub fn sample_boundary<T: Real, R: Rng + ?Sized>(factor: CartanFactor, rng: &mut R) -> JtsElement<T> {
    loop {
        let g: JtsElement<T> = phjts::random_element(factor, rng);
        let Ok(spec) = spectral_decompose(&g, T::lit(1e-9)) else { continue };
        if spec.is_empty() {
            continue;
        }
        let mut values: Vec<f64> = (1..spec.len())
            .map(|_| match rng.gen_range(0..3) {
                0 => 0.0,
                1 => 1.0,
                _ => rng.gen::<f64>(),
            })
            .collect();
        values.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        let mut x = spec.tripotents[0].clone();
        for (l, e) in values.iter().zip(&spec.tripotents[1..]) {
            x = x.axpy(scalar::creal(T::lit(*l)), e);
        }
        return x;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phjts::{are_orthogonal, is_tripotent};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    fn i22() -> CartanFactor {
        CartanFactor::type_i(2, 2).unwrap()
    }

    #[test]
    fn membership_examples() {
        for d in [DomainSpec::ball(3).unwrap(), DomainSpec::single(i22()), DomainSpec::polydisc(2).unwrap()] {
            let zero = vec![c(0.0, 0.0); d.total_dim()];
            assert_eq!(membership(&d, &zero).unwrap(), Membership::Interior);
        }
        let d = DomainSpec::single(i22());
        let z = vec![c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.3, 0.0)];
        assert_eq!(membership(&d, &z).unwrap(), Membership::Boundary);
        let p = DomainSpec::polydisc(2).unwrap();
        assert_eq!(membership(&p, &[c(0.5, 0.0), c(0.99, 0.0)]).unwrap(), Membership::Interior);
        assert_eq!(membership(&p, &[c(0.5, 0.0), c(1.01, 0.0)]).unwrap(), Membership::Exterior);
        assert!(membership(&p, &[c(0.5, 0.0)]).is_err());
    }

    #[test]
    fn strata_of_diagonal_points() {
        let d = DomainSpec::single(i22());
        let s = boundary_stratum(&d, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)], 1e-9).unwrap();
        assert_eq!(s.j, 1);
        assert!((s.e.coords()[0] - c(1.0, 0.0)).norm() < 1e-12);
        assert!((s.v.coords()[3] - c(0.5, 0.0)).norm() < 1e-12);
        let id = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let s = boundary_stratum(&d, &id, 1e-9).unwrap();
        assert_eq!(s.j, 2);
        assert!(s.v.norm() < 1e-12);
        assert!(shilov_membership(&d, &id, 1e-9).unwrap());
        let e11 = [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(!shilov_membership(&d, &e11, 1e-9).unwrap());
        assert!(boundary_stratum(&d, &[c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)], 1e-9).is_err());
    }

    #[test]
    fn ball_boundary_is_shilov() {
        let d = DomainSpec::ball(2).unwrap();
        let s = 0.6_f64;
        let z = [c(s, 0.0), c(0.0, (1.0 - s * s).sqrt())];
        assert_eq!(boundary_stratum(&d, &z, 1e-9).unwrap().j, 1);
        assert!(shilov_membership(&d, &z, 1e-9).unwrap());
    }

    #[test]
    fn products_rejected_for_strata() {
        let d = DomainSpec::polydisc(2).unwrap();
        assert!(matches!(boundary_stratum(&d, &[c(1.0, 0.0), c(0.0, 0.0)], 1e-9), Err(crate::Error::Unsupported(_))));
    }

    #[test]
    fn frames_are_orthogonal_primitive() {
        for f in [
            CartanFactor::type_i(2, 3).unwrap(),
            CartanFactor::type_ii(5).unwrap(),
            CartanFactor::type_iii(2).unwrap(),
            CartanFactor::type_iv(3).unwrap(),
        ] {
            let fr = frame::<f64>(f);
            assert_eq!(fr.len(), f.rank());
            for (i, a) in fr.iter().enumerate() {
                assert!(is_tripotent(a, 1e-12));
                assert_eq!(tripotent_rank(a, 1e-12).unwrap(), 1);
                assert!((a.norm() - 1.0).abs() < 1e-12, "primitive tripotents have unit length");
                for b in &fr[i + 1..] {
                    assert!(are_orthogonal(a, b, 1e-12).unwrap());
                }
            }
        }
    }

    #[test]
    fn polydisk_of_type_i_is_diagonal() {
        let d = DomainSpec::single(i22());
        let phi = maximal_polydisk::<f64>(&d);
        let z = phi.eval(&[c(0.3, 0.1), c(-0.2, 0.5)]).unwrap();
        assert_eq!(z, vec![c(0.3, 0.1), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.5)]);
        assert!(phi.eval(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn normalized_scales() {
        assert_eq!(normalize_realization(CartanFactor::ball(4).unwrap()).scale, 1.0);
        assert!((normalize_realization(i22()).scale - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        let f = CartanFactor::type_iii(3).unwrap();
        let shilov = frame::<f64>(f).iter().fold(JtsElement::zero(f), |a, e| &a + e);
        assert!((shilov.norm() - 3f64.sqrt()).abs() < 1e-12);
        assert!((normalize_realization(f).apply(&shilov).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn domain_json() {
        let d: DomainSpec = serde_json::from_str(r#"{"factors":[{"kind":"I","p":2,"q":3},{"kind":"IV","n":5}]}"#).unwrap();
        assert_eq!(d.rank(), 4);
        assert_eq!(d.total_dim(), 11);
        assert_eq!(
            serde_json::to_string(&d).unwrap(),
            r#"{"factors":[{"kind":"I","p":2,"q":3},{"kind":"IV","n":5}]}"#
        );
        assert!(serde_json::from_str::<DomainSpec>(r#"{"factors":[]}"#).is_err());
    }
}

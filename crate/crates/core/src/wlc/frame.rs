use nalgebra::{Complex, DMatrix, DVector};
use serde::Serialize;

use super::body::{re_pair, ConvexBody};
use crate::error::{bail, Result};
use crate::scalar::{self, Real};

/// Relative tolerance under which two slice distances count as tied.
pub const TIE_TOLERANCE: f64 = 1e-12;

/// Closest boundary point of the body within an affine slice.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceContact<T: Real> {
    pub distance: T,
    pub contact: Vec<Complex<T>>,
    /// Index of the constraint attaining the distance (lowest on ties).
    pub constraint: usize,
}

fn check_orthonormal<T: Real>(h: &[Vec<Complex<T>>], n: usize) -> Result<()> {
    if h.is_empty() {
        bail!(Argument, "subspace basis is empty");
    }
    for (i, a) in h.iter().enumerate() {
        if a.len() != n {
            bail!(Structural, "basis vector {i} has {} coordinates, expected {n}", a.len());
        }
        for (j, b) in h.iter().enumerate().skip(i) {
            let target = if i == j { T::one() } else { T::zero() };
            if scalar::modulus(scalar::hermitian(a, b) - scalar::creal(target)) > T::lit(1e-10) {
                bail!(Argument, "subspace basis is not orthonormal");
            }
        }
    }
    Ok(())
}

/// `sup { r : z0 + (H ∩ B_r) ⊂ body }` and the point where it is attained.
///
/// For a halfspace the slice distance is `(b - Re<z0, nu>) / |P_H nu|`;
/// constraints with `P_H nu = 0` never bound the slice.
pub fn subspace_boundary_distance<T: Real>(
    body: &ConvexBody<T>,
    z0: &[Complex<T>],
    h: &[Vec<Complex<T>>],
) -> Result<SliceContact<T>> {
    let n = body.dim();
    if z0.len() != n {
        bail!(Structural, "base point has {} coordinates, body dimension is {n}", z0.len());
    }
    if !body.contains(z0) {
        bail!(Argument, "base point is not interior to the body");
    }
    check_orthonormal(h, n)?;
    let mut best: Option<(T, usize, Vec<Complex<T>>)> = None;
    for (k, (nu, b)) in body.normals().iter().zip(body.offsets()).enumerate() {
        let mut proj = vec![scalar::czero(); n];
        for e in h {
            let coef = scalar::hermitian(nu, e);
            for (p, x) in proj.iter_mut().zip(e) {
                *p += *x * coef;
            }
        }
        let pn = scalar::euclid(&proj);
        if pn <= T::lit(1e-12) * scalar::euclid(nu) {
            continue;
        }
        let r = (*b - re_pair(z0, nu)) / pn;
        let better = match &best {
            None => true,
            Some((r0, _, _)) => r < *r0 * (T::one() - T::lit(TIE_TOLERANCE)),
        };
        if better {
            let dir = proj.iter().map(|p| *p / pn).collect();
            best = Some((r, k, dir));
        }
    }
    let Some((distance, constraint, dir)) = best else {
        bail!(Argument, "no constraint bounds the slice; the body is unbounded along it");
    };
    let contact = z0.iter().zip(&dir).map(|(z, d): (&Complex<T>, &Complex<T>)| *z + *d * distance).collect();
    Ok(SliceContact { distance, contact, constraint })
}

/// Orthonormal basis of the Hermitian complement of orthonormal `us`.
fn complement<T: Real>(us: &[Vec<Complex<T>>], n: usize) -> Vec<Vec<Complex<T>>> {
    let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
    for i in 0..n {
        if basis.len() + us.len() == n {
            break;
        }
        let mut v = vec![scalar::czero(); n];
        v[i] = scalar::creal(T::one());
        // Two passes of Gram-Schmidt keep the result orthogonal to rounding.
        for _ in 0..2 {
            for q in us.iter().chain(&basis) {
                let c = scalar::hermitian(&v, q);
                for (x, y) in v.iter_mut().zip(q) {
                    *x -= *y * c;
                }
            }
        }
        let nv = scalar::euclid(&v);
        if nv > T::lit(1e-6) {
            basis.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    basis
}

/// Defects of the special-coordinate frame; all vanish for an exact frame.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FrameResiduals<T> {
    /// `|U U^H - I|_max`.
    pub unitary: T,
    /// Largest normalised Hermitian pairing between distinct contact directions.
    pub orthogonality: T,
    /// Largest `|Re<a^j, nu> - b|` over active constraints plus any infeasibility of contacts.
    pub contact: T,
    /// Distance of each image hyperplane from `{Z_j = 1}`.
    pub hyperplane: T,
    /// `|pi_j(A Dscale U (a^j - z0)) - 1|`.
    pub unit_boundary: T,
    /// Largest discarded above-diagonal entry relative to the diagonal.
    pub dropped_upper: T,
}

impl<T: Real> FrameResiduals<T> {
    pub fn max(&self) -> T {
        [self.unitary, self.orthogonality, self.contact, self.hyperplane, self.unit_boundary, self.dropped_upper]
            .into_iter()
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Special coordinates at a base point: `Z = A Dscale U (x - z0)`.
#[derive(Clone, Debug)]
pub struct WlcFrame<T: Real> {
    pub z0: Vec<Complex<T>>,
    pub contacts: Vec<Vec<Complex<T>>>,
    pub distances: Vec<T>,
    /// Rows are the conjugated unit contact directions.
    pub u: DMatrix<Complex<T>>,
    /// Diagonal of `Dscale`, i.e. `1 / distances`.
    pub dscale: Vec<T>,
    /// Lower triangular with unit diagonal.
    pub a: DMatrix<Complex<T>>,
    /// Constraint index chosen as supporting hyperplane at each contact.
    pub active: Vec<usize>,
    /// The body in special coordinates.
    pub image: ConvexBody<T>,
    /// `max_k (max_i |mu_ki| / b'_k) - 1` before `A`: positive when the
    /// cross-polytope `|Z_1| + ... + |Z_n| < 1` is not contained.
    pub cross_polytope_excess: T,
    pub c: T,
    pub bound: T,
    pub residuals: FrameResiduals<T>,
}

/// Builds the special-coordinate frame of the body at `z0`.
pub fn build_frame<T: Real>(body: &ConvexBody<T>, z0: &[Complex<T>]) -> Result<WlcFrame<T>> {
    let n = body.dim();
    if z0.len() != n {
        bail!(Structural, "base point has {} coordinates, body dimension is {n}", z0.len());
    }
    if !body.contains(z0) {
        bail!(Argument, "base point is not interior to the body");
    }
    let mut units: Vec<Vec<Complex<T>>> = Vec::with_capacity(n);
    let mut contacts = Vec::with_capacity(n);
    let mut distances = Vec::with_capacity(n);
    let mut active = Vec::with_capacity(n);
    for _ in 0..n {
        let h = complement(&units, n);
        let sc = subspace_boundary_distance(body, z0, &h)?;
        let dir: Vec<_> = sc.contact.iter().zip(z0).map(|(a, z)| (*a - *z) / sc.distance).collect();
        units.push(dir);
        contacts.push(sc.contact);
        distances.push(sc.distance);
        active.push(sc.constraint);
    }
    let u = DMatrix::from_fn(n, n, |i, j| units[i][j].conj());
    let dscale: Vec<T> = distances.iter().map(|d| T::one() / *d).collect();
    let d_vec = DVector::from_iterator(n, distances.iter().map(|d| scalar::creal(*d)));

    // Normal of each constraint in Y = Dscale U (x - z0) coordinates.
    let mu_of = |nu: &[Complex<T>]| -> DVector<Complex<T>> {
        let v = &u * DVector::from_column_slice(nu);
        v.component_mul(&d_vec)
    };
    let shifted: Vec<T> = body.normals().iter().zip(body.offsets()).map(|(nu, b)| *b - re_pair(z0, nu)).collect();
    let mut excess = T::lit(-1.0);
    for (nu, b) in body.normals().iter().zip(&shifted) {
        let mu = mu_of(nu);
        let m = mu.iter().map(|x| scalar::modulus(*x)).fold(T::zero(), |a, v| a.max(v));
        excess = excess.max(m / *b - T::one());
    }

    let mut a = DMatrix::from_element(n, n, scalar::czero());
    let mut dropped = T::zero();
    for j in 0..n {
        let mu = mu_of(&body.normals()[active[j]]);
        let pivot = mu[j].conj();
        if scalar::modulus(pivot) == T::zero() {
            bail!(Consistency, "active constraint {} has no component along contact {j}", active[j]);
        }
        for i in 0..n {
            let v = mu[i].conj() / pivot;
            if i <= j {
                a[(j, i)] = v;
            } else {
                dropped = dropped.max(scalar::modulus(v));
            }
        }
        a[(j, j)] = scalar::creal(T::one());
    }

    // nu' = (A M)^{-H} nu = A^{-H} mu.
    let ah = a.adjoint();
    let mut image_normals = Vec::with_capacity(body.normals().len());
    for nu in body.normals() {
        let Some(v) = ah.solve_upper_triangular(&mu_of(nu)) else {
            bail!(Consistency, "triangular factor is singular");
        };
        image_normals.push(v.iter().copied().collect::<Vec<_>>());
    }
    let image = ConvexBody::image_of_bounded(image_normals, shifted.clone(), vec![scalar::czero(); n])?;
    let c = inscribed_polydisk_radius(&image)?;
    let bound = c / (T::lit(16.0) * T::from_usize(n).expect("fits").sqrt());

    let zero = T::zero();
    let mut res = FrameResiduals {
        unitary: zero,
        orthogonality: zero,
        contact: zero,
        hyperplane: zero,
        unit_boundary: zero,
        dropped_upper: dropped,
    };
    let uu = &u * u.adjoint();
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { T::one() } else { T::zero() };
            res.unitary = res.unitary.max(scalar::modulus(uu[(i, j)] - scalar::creal(target)));
            if i < j {
                res.orthogonality = res.orthogonality.max(scalar::modulus(scalar::hermitian(&units[i], &units[j])));
            }
        }
    }
    let m_full = &a * DMatrix::from_diagonal(&DVector::from_iterator(n, dscale.iter().map(|s| scalar::creal(*s)))) * &u;
    for j in 0..n {
        let k = active[j];
        let scale = T::one() + body.offsets()[k].abs();
        let on = (re_pair(&contacts[j], &body.normals()[k]) - body.offsets()[k]).abs() / scale;
        let infeasible = (-body.margin(&contacts[j])).max(T::zero()) / scale;
        res.contact = res.contact.max(on).max(infeasible);
        let nu_img = &image.normals()[k];
        let b_img = image.offsets()[k];
        let hyper = nu_img
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let target = if i == j { scalar::creal(T::one()) } else { scalar::czero() };
                scalar::abs2(*v / b_img - target)
            })
            .fold(T::zero(), |acc, v| acc + v)
            .sqrt();
        res.hyperplane = res.hyperplane.max(hyper);
        let rel: Vec<_> = contacts[j].iter().zip(z0).map(|(x, z)| *x - *z).collect();
        let zj = (&m_full * DVector::from_vec(rel))[j];
        res.unit_boundary = res.unit_boundary.max(scalar::modulus(zj - scalar::creal(T::one())));
    }

    Ok(WlcFrame {
        z0: z0.to_vec(),
        contacts,
        distances,
        u,
        dscale,
        a,
        active,
        image,
        cross_polytope_excess: excess,
        c,
        bound,
        residuals: res,
    })
}

/// Largest `c` with `c D^n` inside a body containing 0:
/// `min_k b_k / sum_i |nu_ki|`.
pub fn inscribed_polydisk_radius<T: Real>(body: &ConvexBody<T>) -> Result<T> {
    let zero = vec![scalar::czero(); body.dim()];
    if !body.contains(&zero) {
        bail!(Argument, "the origin is not interior to the body");
    }
    let c = body
        .normals()
        .iter()
        .zip(body.offsets())
        .map(|(nu, b)| *b / nu.iter().fold(T::zero(), |a, x| a + scalar::modulus(*x)))
        .fold(T::max_value().expect("bounded real"), |a, v| a.min(v));
    Ok(c)
}

/// `c / (16 sqrt n)`, a lower bound for the squeezing function at the base point.
pub fn koebe_lower_bound<T: Real>(frame: &WlcFrame<T>) -> T {
    frame.bound
}

/// JSON-friendly dump of a frame with row-major interleaved matrices.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FrameReport {
    pub n: usize,
    pub z0: Vec<f64>,
    pub contact_points: Vec<Vec<f64>>,
    pub distances: Vec<f64>,
    pub active_constraints: Vec<usize>,
    #[serde(rename = "U")]
    pub u: Vec<Vec<f64>>,
    #[serde(rename = "Dscale")]
    pub dscale: Vec<f64>,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub c: f64,
    pub bound: f64,
    pub cross_polytope_excess: f64,
    pub residuals: FrameResiduals<f64>,
}

impl<T: Real> WlcFrame<T> {
    pub fn dim(&self) -> usize {
        self.z0.len()
    }

    pub fn report(&self) -> FrameReport {
        let il = |v: &[Complex<T>]| scalar::complex_to_interleaved(&scalar::point_to_f64(v));
        let rows = |m: &DMatrix<Complex<T>>| {
            (0..m.nrows()).map(|i| il(&m.row(i).iter().copied().collect::<Vec<_>>())).collect()
        };
        let f = |x: T| x.to_f64_lossy();
        let r = &self.residuals;
        FrameReport {
            n: self.dim(),
            z0: il(&self.z0),
            contact_points: self.contacts.iter().map(|c| il(c)).collect(),
            distances: self.distances.iter().map(|d| f(*d)).collect(),
            active_constraints: self.active.clone(),
            u: rows(&self.u),
            dscale: self.dscale.iter().map(|d| f(*d)).collect(),
            a: rows(&self.a),
            c: f(self.c),
            bound: f(self.bound),
            cross_polytope_excess: f(self.cross_polytope_excess),
            residuals: FrameResiduals {
                unitary: f(r.unitary),
                orthogonality: f(r.orthogonality),
                contact: f(r.contact),
                hyperplane: f(r.hyperplane),
                unit_boundary: f(r.unit_boundary),
                dropped_upper: f(r.dropped_upper),
            },
        }
    }
}

use nalgebra::{Complex, DMatrix};

use super::product::{d_operator, is_tripotent, operator_norm, triple_unchecked};
use super::linalg::{hermitian_eigen, singular_values_desc};
use super::{FactorKind, JtsElement};
use crate::error::{bail, Result};
use crate::scalar::{self, Real};

/// `V = V_0(e) + V_1(e) + V_2(e)`, the eigenspaces of `D(e,e)`.
#[derive(Clone, Debug)]
pub struct PierceDecomposition<T: Real> {
    pub e: JtsElement<T>,
    /// Orthonormal bases of `V_0`, `V_1`, `V_2`.
    pub bases: [Vec<JtsElement<T>>; 3],
    pub dims: [usize; 3],
    /// Eigenvalues of `D(e,e)` in ascending order.
    pub eigenvalues: Vec<T>,
}

/// Pierce decomposition relative to the tripotent `e`.
///
/// `D(e,e)` is assembled column by column from the triple product and
/// diagonalised as a Hermitian matrix. An eigenvalue farther than `tol` from
/// `{0, 1, 2}`, or a violation of `{V_a, V_b, V_c} in V_(a-b+c)` on the basis
/// triples, is reported as a consistency error: it means the triple product
/// itself is wrong.
pub fn pierce_decompose<T: Real>(e: &JtsElement<T>, tol: T) -> Result<PierceDecomposition<T>> {
    if !is_tripotent(e, tol) {
        bail!(Precondition, "Pierce decomposition needs a tripotent");
    }
    let factor = e.factor();
    let n = factor.ambient_dim();
    let d = d_operator(e, e)?;
    let herm_defect = operator_norm(&(&d - d.adjoint()));
    if herm_defect > tol {
        bail!(Consistency, "D(e,e) is not self-adjoint (defect {herm_defect})");
    }
    let sym = (&d + d.adjoint()) * scalar::creal(T::lit(0.5));
    let (values, vectors) = hermitian_eigen(&sym);

    let mut bases: [Vec<JtsElement<T>>; 3] = [vec![], vec![], vec![]];
    let mut eigenvalues = Vec::with_capacity(n);
    for (k, &lambda) in values.iter().enumerate() {
        let slot = (lambda.to_f64_lossy().round().clamp(0.0, 2.0)) as usize;
        if (lambda - T::lit(slot as f64)).abs() > tol {
            bail!(Consistency, "D(e,e) has eigenvalue {lambda} outside {{0,1,2}}");
        }
        eigenvalues.push(lambda);
        let v: Vec<Complex<T>> = vectors.column(k).iter().copied().collect();
        bases[slot].push(JtsElement::new(factor, v)?);
    }
    let dims = [bases[0].len(), bases[1].len(), bases[2].len()];
    let out = PierceDecomposition { e: e.clone(), bases, dims, eigenvalues };
    check_multiplication_rule(&out, &d, tol)?;
    Ok(out)
}

fn check_multiplication_rule<T: Real>(p: &PierceDecomposition<T>, d: &DMatrix<Complex<T>>, tol: T) -> Result<()> {
    // The first basis vector of each space, plus the normalised sum of the
    // space's basis, exercises every (a, b, c) combination.
    let probes: Vec<Vec<JtsElement<T>>> = p
        .bases
        .iter()
        .map(|b| {
            let mut v: Vec<JtsElement<T>> = b.iter().take(1).cloned().collect();
            if b.len() > 1 {
                let sum = b.iter().skip(1).fold(b[0].clone(), |acc, x| &acc + x);
                v.push(sum.scale_real(T::one() / sum.norm()));
            }
            v
        })
        .collect();
    for (a, pa) in probes.iter().enumerate() {
        for (b, pb) in probes.iter().enumerate() {
            for (c, pc) in probes.iter().enumerate() {
                let target = a as i64 - b as i64 + c as i64;
                for x in pa {
                    for y in pb {
                        for z in pc {
                            let w = triple_unchecked(x, y, z);
                            let wv = nalgebra::DVector::from_column_slice(w.coords());
                            let defect = if (0..=2).contains(&target) {
                                let lhs = d * &wv;
                                (lhs - wv * scalar::creal(T::lit(target as f64))).norm()
                            } else {
                                wv.norm()
                            };
                            if defect > tol * T::lit(10.0) {
                                bail!(
                                    Consistency,
                                    "{{V_{a}, V_{b}, V_{c}}} leaves V_{target} (defect {defect})"
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

/// `D(e1, e2) = 0` up to `tol` in operator norm.
pub fn are_orthogonal<T: Real>(e1: &JtsElement<T>, e2: &JtsElement<T>, tol: T) -> Result<bool> {
    e1.same_factor(e2)?;
    if !is_tripotent(e1, tol) || !is_tripotent(e2, tol) {
        bail!(Precondition, "orthogonality is defined for tripotents");
    }
    Ok(operator_norm(&d_operator(e1, e2)?) <= tol)
}

/// `e` is dominated by `e'`: `e' - e` is a tripotent orthogonal to `e`.
pub fn dominates<T: Real>(e: &JtsElement<T>, e_prime: &JtsElement<T>, tol: T) -> Result<bool> {
    e.same_factor(e_prime)?;
    if !is_tripotent(e, tol) || !is_tripotent(e_prime, tol) {
        bail!(Precondition, "dominance is defined for tripotents");
    }
    let diff = e_prime - e;
    if diff.norm() <= tol {
        return Ok(true);
    }
    if !is_tripotent(&diff, tol) {
        return Ok(false);
    }
    are_orthogonal(e, &diff, tol)
}

/// Number of mutually orthogonal primitive tripotents summing to `e`.
///
/// Matrix factors count unit singular values (halved for type II, whose
/// primitive tripotents have two); the spin factor splits on `|e^T e|`,
/// which is `0` for primitive and `||e||^2 = 2` for maximal tripotents.
pub fn tripotent_rank<T: Real>(e: &JtsElement<T>, tol: T) -> Result<usize> {
    if e.norm() <= tol {
        bail!(Precondition, "rank of the zero tripotent is undefined");
    }
    if !is_tripotent(e, tol) {
        bail!(Precondition, "rank is defined for tripotents");
    }
    let half = T::lit(0.5);
    let rank = match e.factor().kind() {
        FactorKind::IV { .. } => {
            let q = scalar::modulus(scalar::bilinear(e.coords(), e.coords()));
            if q < half * scalar::norm2(e.coords()) {
                1
            } else {
                2
            }
        }
        kind => {
            let m = e.to_matrix().expect("matrix factor");
            let count = singular_values_desc(&m).iter().filter(|s| **s > half).count();
            if matches!(kind, FactorKind::II { .. }) {
                count / 2
            } else {
                count
            }
        }
    };
    Ok(rank)
}

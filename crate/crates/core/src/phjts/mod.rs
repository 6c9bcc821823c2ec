//! Hermitian Jordan triple systems of the classical Cartan factors.

mod element;
mod factor;
mod linalg;
mod pierce;
mod product;
mod random;
mod spectral;

pub use element::JtsElement;
pub use factor::{CartanFactor, FactorDescriptor, FactorKind};
pub use linalg::{hermitian_eigen, singular_values_desc};
pub use pierce::{are_orthogonal, dominates, pierce_decompose, tripotent_rank, PierceDecomposition};
pub use product::{d_operator, is_tripotent, odd_power, quadratic_map, triple_product};
pub use random::{complex_gaussian, random_element, system_rank};
pub use spectral::{spectral_decompose, spectral_norm, SpectralDecomposition, SpectralSummary};

pub(crate) use product::operator_norm;

/// Operator norm of `D(e1, e2)`, the quantity bounded by [`are_orthogonal`].
pub fn orthogonality_defect<T: crate::Real>(e1: &JtsElement<T>, e2: &JtsElement<T>) -> crate::Result<T> {
    Ok(operator_norm(&d_operator(e1, e2)?))
}

/// Left side minus right side of the Jordan identity
/// `{x,y,{u,v,w}} - {{x,y,u},v,w} - {u,v,{x,y,w}} + {u,{y,x,v},w}`.
pub fn jordan_identity_residual<T: crate::Real>(
    x: &JtsElement<T>,
    y: &JtsElement<T>,
    u: &JtsElement<T>,
    v: &JtsElement<T>,
    w: &JtsElement<T>,
) -> crate::Result<T> {
    let t = triple_product;
    let lhs1 = t(x, y, &t(u, v, w)?)?;
    let lhs2 = t(&t(x, y, u)?, v, w)?;
    let rhs1 = t(u, v, &t(x, y, w)?)?;
    let rhs2 = t(u, &t(y, x, v)?, w)?;
    Ok((&(&(&lhs1 - &lhs2) - &rhs1) + &rhs2).norm())
}

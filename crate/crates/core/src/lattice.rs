//! Ordering and meets in the lattice of projectors.

use crate::error::Result;
use crate::linalg::{eigh, ComplexMatrix, ToleranceConfig};
use crate::operators::{make_projector, projector_from_subspace, same_dim, Projector, Subspace};

/// `lower <= upper`, tested algebraically as `upper * lower = lower`
/// within `tol.membership`.
pub fn leq(lower: &Projector, upper: &Projector, tol: &ToleranceConfig) -> Result<bool> {
    Ok(order_residual(lower, upper)? <= tol.membership)
}

/// `|upper * lower - lower|_HS`
pub fn order_residual(lower: &Projector, upper: &Projector) -> Result<f64> {
    same_dim(lower.dim(), upper.dim())?;
    Ok((&(upper.matrix() * lower.matrix()) - lower.matrix()).hs_norm())
}

/// `|PP' - P'P|_HS`
pub fn commutator_norm(p: &Projector, q: &Projector) -> Result<f64> {
    same_dim(p.dim(), q.dim())?;
    Ok((&(p.matrix() * q.matrix()) - &(q.matrix() * p.matrix())).hs_norm())
}

/// Greatest lower bound: the projector onto `ran(P) ∩ ran(P')`.
///
/// Commuting pairs (commutator below `eig_zero`) take the product `PP'`;
/// everything else goes through [`glb_eigenspace`].
pub fn glb(p: &Projector, q: &Projector, tol: &ToleranceConfig) -> Result<Projector> {
    if commutator_norm(p, q)? <= tol.eig_zero {
        if let Ok(meet) = glb_commuting(p, q, tol) {
            return Ok(meet);
        }
    }
    glb_eigenspace(p, q, tol)
}

/// Meet of commuting projectors as their product.
pub fn glb_commuting(p: &Projector, q: &Projector, tol: &ToleranceConfig) -> Result<Projector> {
    same_dim(p.dim(), q.dim())?;
    make_projector(&(p.matrix() * q.matrix()).hermitian_part(), tol)
}

/// Meet as the eigenvalue-1 eigenspace of `(P + P')/2`.
///
/// A unit vector `v` has `<v|(P+P')/2|v> = 1` exactly when `Pv = v` and
/// `P'v = v`, so the top eigenspace is the intersection. Eigenvalues within
/// `tol.membership` of 1 are kept.
pub fn glb_eigenspace(p: &Projector, q: &Projector, tol: &ToleranceConfig) -> Result<Projector> {
    Ok(projector_from_subspace(&intersection(p, q, tol)?))
}

/// Orthonormal basis of `ran(P) ∩ ran(P')`, ordered by decreasing eigenvalue
/// of `(P + P')/2`.
pub fn intersection(p: &Projector, q: &Projector, tol: &ToleranceConfig) -> Result<Subspace> {
    same_dim(p.dim(), q.dim())?;
    let avg = p.matrix().try_add(q.matrix())?.scale(0.5);
    let es = eigh(&avg, tol)?;
    let basis = es
        .eigenvalues
        .iter()
        .zip(es.eigenvectors)
        .filter(|(&r, _)| r >= 1.0 - tol.membership)
        .map(|(_, v)| v)
        .collect();
    Subspace::new(p.dim(), basis, tol)
}

/// `I - P`
pub fn orthocomplement(p: &Projector) -> Projector {
    let n = p.dim();
    let m: ComplexMatrix = &ComplexMatrix::identity(n) - p.matrix();
    Projector::from_parts(m, n - p.rank())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hs_distance, C64};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn diag(d: &[f64]) -> Projector {
        make_projector(&ComplexMatrix::from_diag(d), &tol()).unwrap()
    }

    fn ket(v: &[f64]) -> Projector {
        let v: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        make_projector(&ComplexMatrix::pure(&v), &tol()).unwrap()
    }

    fn s() -> f64 {
        0.5f64.sqrt()
    }

    #[test]
    fn leq_examples() {
        assert!(leq(&diag(&[1.0, 0.0, 0.0]), &diag(&[1.0, 1.0, 0.0]), &tol()).unwrap());
        assert!(!leq(&diag(&[1.0, 1.0, 0.0]), &diag(&[1.0, 0.0, 0.0]), &tol()).unwrap());
        assert!(leq(&ket(&[s(), s()]), &Projector::identity(2), &tol()).unwrap());
        assert!(leq(&diag(&[1.0, 1.0]), &diag(&[1.0, 1.0, 0.0]), &tol()).is_err());
    }

    #[test]
    fn glb_examples() {
        let meet = glb(&diag(&[1.0, 1.0, 0.0]), &diag(&[0.0, 1.0, 1.0]), &tol()).unwrap();
        assert_eq!(meet.rank(), 1);
        assert!(hs_distance(meet.matrix(), &ComplexMatrix::from_diag(&[0.0, 1.0, 0.0])).unwrap() < 1e-15);

        let meet = glb(&ket(&[1.0, 0.0]), &ket(&[s(), s()]), &tol()).unwrap();
        assert!(meet.is_zero());
        assert!(meet.matrix().hs_norm() < 1e-15);

        let p = ket(&[s(), s()]);
        let meet = glb(&p, &p, &tol()).unwrap();
        assert_eq!(meet.rank(), 1);
        assert!(hs_distance(meet.matrix(), p.matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn glb_paths_agree_on_commuting_pairs() {
        let p = diag(&[1.0, 1.0, 0.0, 1.0]);
        let q = diag(&[0.0, 1.0, 1.0, 1.0]);
        let a = glb_commuting(&p, &q, &tol()).unwrap();
        let b = glb_eigenspace(&p, &q, &tol()).unwrap();
        assert_eq!(a.rank(), 2);
        assert_eq!(b.rank(), 2);
        assert!(hs_distance(a.matrix(), b.matrix()).unwrap() < 1e-14);
    }

    #[test]
    fn glb_of_non_commuting_planes_in_three_dims() {
        // span{e1, e2} and span{e1, (e2+e3)/sqrt2} meet in span{e1}.
        let p = diag(&[1.0, 1.0, 0.0]);
        let q = &ComplexMatrix::from_diag(&[1.0, 0.0, 0.0])
            + &ComplexMatrix::pure(&[C64::new(0.0, 0.0), C64::new(s(), 0.0), C64::new(s(), 0.0)]);
        let q = make_projector(&q, &tol()).unwrap();
        assert!(commutator_norm(&p, &q).unwrap() > 0.1);
        let meet = glb(&p, &q, &tol()).unwrap();
        assert_eq!(meet.rank(), 1);
        assert!(hs_distance(meet.matrix(), &ComplexMatrix::from_diag(&[1.0, 0.0, 0.0])).unwrap() < 1e-14);
    }

    #[test]
    fn orthocomplement_examples() {
        let c = orthocomplement(&diag(&[1.0, 0.0]));
        assert_eq!(c.matrix(), &ComplexMatrix::from_diag(&[0.0, 1.0]));
        assert_eq!(c.rank(), 1);

        let c = orthocomplement(&Projector::zero(3));
        assert_eq!(c.matrix(), &ComplexMatrix::identity(3));
        assert_eq!(c.rank(), 3);

        let c = orthocomplement(&ket(&[s(), s()]));
        assert!(hs_distance(c.matrix(), ket(&[s(), -s()]).matrix()).unwrap() < 1e-15);
    }
}

//! Lüders update, mutual improvement of compatible assignments, and pooling.
//!
//! When `rho_A` and `rho_B` are compatible, the meet `Q_glb` of their support
//! projectors is a property the system is known to possess once both
//! assignments are taken into account. Replacing each assignment by its
//! Lüders state on `Q_glb` discards the part of it that contradicts this.
//! Afterwards both improved states have exactly `Q_glb` as support, so they
//! agree on every sharp property; a convex average pools what remains.

use crate::compatibility::check_first_bfm;
use crate::error::{Error, Result};
use crate::linalg::{hs_distance, ToleranceConfig};
use crate::operators::{event_probability, make_density, same_dim, support, DensityOperator, Projector};

/// Pooling weight when both assignments are trusted equally.
pub const EQUAL_TRUST_WEIGHT: f64 = 0.5;

/// `P rho P / Tr(rho P)`, the Lüders state of `rho` on `P`.
///
/// `P rho P` is the Hilbert-Schmidt projection of `rho` onto operators
/// supported in `ran(P)`, but after renormalization the result is in general
/// not the nearest density operator there: for `rho = diag(.5, .3, .2)` and
/// `P = diag(1, 1, 0)`, `diag(.6, .4, 0)` is closer than `diag(.625, .375, 0)`.
pub fn luders_update(
    rho: &DensityOperator,
    p: &Projector,
    tol: &ToleranceConfig,
) -> Result<DensityOperator> {
    Ok(luders_with_probability(rho, p, tol)?.0)
}

/// As [`luders_update`], also returning `Tr(rho P)`.
pub fn luders_with_probability(
    rho: &DensityOperator,
    p: &Projector,
    tol: &ToleranceConfig,
) -> Result<(DensityOperator, f64)> {
    same_dim(rho.dim(), p.dim())?;
    let prob = event_probability(rho, p)?;
    if prob <= tol.eig_zero {
        return Err(Error::ZeroProbability { p: prob });
    }
    let projected = &(p.matrix() * rho.matrix()) * p.matrix();
    let updated = make_density(&projected.unscale(prob).hermitian_part(), tol)?;
    Ok((updated, prob))
}

#[derive(Debug, Clone)]
pub struct ImprovementResult {
    pub improved_a: DensityOperator,
    pub improved_b: DensityOperator,
    pub glb: Projector,
    /// `Tr(rho_A Q_glb)`
    pub prob_a: f64,
    /// `Tr(rho_B Q_glb)`
    pub prob_b: f64,
    pub supports_equal: bool,
    /// Pairwise HS distances between `supp(improved_a)`, `supp(improved_b)`
    /// and `Q_glb`: (a, b), (a, glb), (b, glb).
    pub support_gaps: [f64; 3],
}

/// Lüders-update both assignments onto the meet of their supports.
///
/// Fails with [`Error::NumericalFault`] if the improved supports do not all
/// coincide with the meet, which cannot happen in exact arithmetic.
pub fn improve(
    a: &DensityOperator,
    b: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<ImprovementResult> {
    let report = check_first_bfm(a, b, tol)?;
    if !report.first_bfm {
        return Err(Error::Incompatible);
    }
    let glb = report.glb_projector;
    let (improved_a, prob_a) = luders_with_probability(a, &glb, tol)?;
    let (improved_b, prob_b) = luders_with_probability(b, &glb, tol)?;

    let (qa, _) = support(&improved_a, tol)?;
    let (qb, _) = support(&improved_b, tol)?;
    let support_gaps = [
        hs_distance(qa.matrix(), qb.matrix())?,
        hs_distance(qa.matrix(), glb.matrix())?,
        hs_distance(qb.matrix(), glb.matrix())?,
    ];
    let supports_equal = support_gaps.iter().all(|&g| g <= tol.membership);
    if !supports_equal {
        return Err(Error::NumericalFault(format!(
            "improved supports differ from the meet (gaps {support_gaps:?})"
        )));
    }
    Ok(ImprovementResult {
        improved_a,
        improved_b,
        glb,
        prob_a,
        prob_b,
        supports_equal,
        support_gaps,
    })
}

/// `w * improved_A + (1 - w) * improved_B` for `0 < w < 1`.
pub fn pool(
    a: &DensityOperator,
    b: &DensityOperator,
    w: f64,
    tol: &ToleranceConfig,
) -> Result<DensityOperator> {
    if !(w > 0.0 && w < 1.0) {
        return Err(Error::WeightOutOfRange(w));
    }
    let imp = improve(a, b, tol)?;
    let mixed = &imp.improved_a.matrix().scale(w) + &imp.improved_b.matrix().scale(1.0 - w);
    make_density(&mixed, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::leq;
    use crate::linalg::{ComplexMatrix, C64};
    use crate::operators::{is_sharp, make_projector};

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn diag_state(d: &[f64]) -> DensityOperator {
        make_density(&ComplexMatrix::from_diag(d), &tol()).unwrap()
    }

    fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        hs_distance(a, b).unwrap()
    }

    fn qutrit_pair() -> (DensityOperator, DensityOperator) {
        (
            diag_state(&[0.5, 0.5, 0.0]),
            diag_state(&[0.0, 1.0 / 3.0, 2.0 / 3.0]),
        )
    }

    #[test]
    fn luders_examples() {
        let s = 0.5f64.sqrt();
        let plus = DensityOperator::pure(&[C64::new(s, 0.0), C64::new(s, 0.0)], &tol()).unwrap();
        let p0 = make_projector(&ComplexMatrix::from_diag(&[1.0, 0.0]), &tol()).unwrap();
        let (rho_l, p) = luders_with_probability(&plus, &p0, &tol()).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
        assert!(dist(rho_l.matrix(), &ComplexMatrix::from_diag(&[1.0, 0.0])) < 1e-15);
        assert!(is_sharp(&rho_l, &p0, &tol()).unwrap().sharp);

        let rho = diag_state(&[0.2, 0.3, 0.5]);
        let same = luders_update(&rho, &Projector::identity(3), &tol()).unwrap();
        assert!(dist(same.matrix(), rho.matrix()) < 1e-15);

        let p2 = make_projector(&ComplexMatrix::from_diag(&[0.0, 0.0, 1.0]), &tol()).unwrap();
        assert_eq!(
            luders_update(&diag_state(&[0.5, 0.5, 0.0]), &p2, &tol()).unwrap_err(),
            Error::ZeroProbability { p: 0.0 }
        );
    }

    #[test]
    fn improve_qutrit() {
        let (a, b) = qutrit_pair();
        let imp = improve(&a, &b, &tol()).unwrap();
        let e2 = ComplexMatrix::from_diag(&[0.0, 1.0, 0.0]);
        assert!(dist(imp.improved_a.matrix(), &e2) < 1e-15);
        assert!(dist(imp.improved_b.matrix(), &e2) < 1e-15);
        assert!((imp.prob_a - 0.5).abs() < 1e-15);
        assert!((imp.prob_b - 1.0 / 3.0).abs() < 1e-15);
        assert!(imp.supports_equal);
    }

    #[test]
    fn improve_identical_pure() {
        let pure = diag_state(&[0.0, 1.0]);
        let imp = improve(&pure, &pure, &tol()).unwrap();
        assert!(dist(imp.improved_a.matrix(), pure.matrix()) < 1e-15);
        assert!(dist(imp.improved_b.matrix(), pure.matrix()) < 1e-15);
    }

    #[test]
    fn improve_rejects_incompatible() {
        assert_eq!(
            improve(&diag_state(&[1.0, 0.0]), &diag_state(&[0.0, 1.0]), &tol()).unwrap_err(),
            Error::Incompatible
        );
    }

    #[test]
    fn pool_examples() {
        let (a, b) = qutrit_pair();
        for w in [0.1, 0.3, EQUAL_TRUST_WEIGHT, 0.9] {
            let rho = pool(&a, &b, w, &tol()).unwrap();
            assert!(dist(rho.matrix(), &ComplexMatrix::from_diag(&[0.0, 1.0, 0.0])) < 1e-15);
        }
        let rho = diag_state(&[0.2, 0.3, 0.5]);
        for w in [0.1, 0.7] {
            let pooled = pool(&rho, &rho, w, &tol()).unwrap();
            assert!(dist(pooled.matrix(), rho.matrix()) < 1e-15);
        }
        for w in [0.0, 1.0, 1.5, -0.2, f64::NAN] {
            assert!(matches!(pool(&a, &b, w, &tol()), Err(Error::WeightOutOfRange(_))));
        }
    }

    #[test]
    fn pool_support_below_meet() {
        let a = diag_state(&[0.3, 0.3, 0.4, 0.0]);
        let b = diag_state(&[0.0, 0.2, 0.2, 0.6]);
        let pooled = pool(&a, &b, 0.25, &tol()).unwrap();
        let imp = improve(&a, &b, &tol()).unwrap();
        let (q, _) = support(&pooled, &tol()).unwrap();
        assert!(leq(&q, &imp.glb, &tol()).unwrap());
        // 0.25 * (0, 3/7, 4/7, 0) + 0.75 * (0, 1/2, 1/2, 0)
        let expected = [0.0, 0.25 * 3.0 / 7.0 + 0.375, 0.25 * 4.0 / 7.0 + 0.375, 0.0];
        assert!(dist(pooled.matrix(), &ComplexMatrix::from_diag(&expected)) < 1e-15);
    }
}

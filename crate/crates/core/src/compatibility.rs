//! Compatibility of two state assignments for one system.
//!
//! Two density operators can describe the same individual system only if
//! their supports intersect nontrivially (the first BFM condition). The
//! second BFM condition asks for pure-state expansions of both that share a
//! common pure state with positive weight. A pure state can appear in some
//! expansion of `rho` exactly when it lies in `ran(rho^{1/2})`, so the
//! second condition is the nontriviality of `ran(rho_A^{1/2}) ∩
//! ran(rho_B^{1/2})`.
//!
//! In finite dimension `ran(rho^{1/2}) = supp(rho)` and the two conditions
//! coincide; both are still computed independently here, through different
//! matrices, and reported side by side. In infinite dimension the range of
//! `rho^{1/2}` can be a proper, non-closed subset of the support and the
//! second condition is strictly stronger than the first; it is not known to
//! be necessary for compatibility. That regime cannot be represented in
//! finite arithmetic and is not modelled, and nothing in this crate labels a
//! pair incompatible on the strength of the second condition alone.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::lattice::{glb, intersection};
use crate::linalg::{eigh, hs_distance, pinv_psd, sqrt_psd, vnorm, ComplexMatrix, ToleranceConfig, C64};
use crate::operators::{
    projector_from_subspace, require_unit, same_dim, support, DensityOperator, Projector, Subspace,
};

/// Which pair of subspaces a report's intersection was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntersectionOf {
    /// `supp(rho_A) ∩ supp(rho_B)`
    Supports,
    /// `ran(rho_A^{1/2}) ∩ ran(rho_B^{1/2})`
    SqrtRanges,
}

#[derive(Debug, Clone)]
pub struct CompatibilityReport {
    pub first_bfm: bool,
    pub second_bfm: bool,
    pub intersection_of: IntersectionOf,
    pub intersection_dim: usize,
    pub glb_projector: Projector,
    /// Deterministic unit vector in the intersection, present iff it is nontrivial.
    pub witness: Option<Vec<C64>>,
    pub residuals: BTreeMap<String, f64>,
}

impl CompatibilityReport {
    /// Verdict of the condition this report was computed for.
    pub fn compatible(&self) -> bool {
        self.first_bfm
    }

    /// In finite dimension the two conditions must agree.
    pub fn conditions_agree(&self) -> bool {
        self.first_bfm == self.second_bfm
    }
}

/// `rho = sum_i weights[i] |states[i]><states[i]|`, with
/// `states[common_index]` the state shared with the partner assignment.
#[derive(Debug, Clone)]
pub struct PureDecomposition {
    pub weights: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    pub common_index: usize,
}

impl PureDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.states[0].len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (w, v) in self.weights.iter().zip(&self.states) {
            m = &m + &ComplexMatrix::pure(v).scale(*w);
        }
        m
    }

    pub fn weight_sum(&self) -> f64 {
        self.weights.iter().sum()
    }

    pub fn common_weight(&self) -> f64 {
        self.weights[self.common_index]
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

/// Common pure state `phi` with an expansion of each assignment containing it.
#[derive(Debug, Clone)]
pub struct CommonDecomposition {
    pub common_state: Vec<C64>,
    pub a: PureDecomposition,
    pub b: PureDecomposition,
}

/// Canonical unit vector in `ran(Q)`: the normalised image `Q e_j` of the
/// standard basis vector with the largest `Q_jj` (lowest index among
/// near-ties), phased so its first non-negligible coordinate is real positive.
/// Depends on `Q` only, never on the eigenvector gauge.
fn canonical_witness(q: &Projector, tol: &ToleranceConfig) -> Option<Vec<C64>> {
    if q.is_zero() {
        return None;
    }
    let m = q.matrix();
    let n = q.dim();
    let mut best = 0;
    for j in 1..n {
        if m[(j, j)].re > m[(best, best)].re + 1e-12 {
            best = j;
        }
    }
    let mut phi = m.column(best);
    let norm = vnorm(&phi);
    if norm <= tol.membership {
        return None;
    }
    let lead = phi.iter().copied().find(|z| z.norm() > tol.membership)?;
    let phase = lead.conj() / (lead.norm() * norm);
    for z in &mut phi {
        *z *= phase;
    }
    Some(phi)
}

/// Projector onto `ran(rho^{1/2})`: eigenvectors of the computed square root
/// with eigenvalue above `sqrt(eig_zero)`.
fn sqrt_range(rho: &DensityOperator, tol: &ToleranceConfig) -> Result<Projector> {
    let root = sqrt_psd(rho.matrix(), tol)?;
    let cutoff = tol.eig_zero.sqrt();
    let es = eigh(&root, tol)?;
    let basis = es
        .eigenvalues
        .iter()
        .zip(es.eigenvectors)
        .filter(|(&r, _)| r > cutoff)
        .map(|(_, v)| v)
        .collect();
    Ok(projector_from_subspace(&Subspace::new(rho.dim(), basis, tol)?))
}

struct Meet {
    glb: Projector,
    a: Projector,
    b: Projector,
}

fn support_meet(a: &DensityOperator, b: &DensityOperator, tol: &ToleranceConfig) -> Result<Meet> {
    let (qa, _) = support(a, tol)?;
    let (qb, _) = support(b, tol)?;
    Ok(Meet {
        glb: glb(&qa, &qb, tol)?,
        a: qa,
        b: qb,
    })
}

fn sqrt_range_meet(a: &DensityOperator, b: &DensityOperator, tol: &ToleranceConfig) -> Result<Meet> {
    let ra = sqrt_range(a, tol)?;
    let rb = sqrt_range(b, tol)?;
    Ok(Meet {
        glb: glb(&ra, &rb, tol)?,
        a: ra,
        b: rb,
    })
}

fn build_report(
    of: IntersectionOf,
    primary: Meet,
    other: Meet,
    tol: &ToleranceConfig,
) -> Result<CompatibilityReport> {
    let intersection_dim = primary.glb.rank();
    let witness = canonical_witness(&primary.glb, tol);
    let mut residuals = BTreeMap::new();
    if let Some(phi) = &witness {
        let q_phi = primary.glb.matrix().matvec(phi)?;
        let r: Vec<C64> = q_phi.iter().zip(phi).map(|(x, y)| x - y).collect();
        residuals.insert("witness_residual".to_string(), vnorm(&r));
    }
    let (supports, ranges) = match of {
        IntersectionOf::Supports => (&primary, &other),
        IntersectionOf::SqrtRanges => (&other, &primary),
    };
    residuals.insert(
        "range_support_gap_a".to_string(),
        hs_distance(supports.a.matrix(), ranges.a.matrix())?,
    );
    residuals.insert(
        "range_support_gap_b".to_string(),
        hs_distance(supports.b.matrix(), ranges.b.matrix())?,
    );
    Ok(CompatibilityReport {
        first_bfm: supports.glb.rank() >= 1,
        second_bfm: ranges.glb.rank() >= 1,
        intersection_of: of,
        intersection_dim,
        glb_projector: primary.glb,
        witness,
        residuals,
    })
}

/// First BFM condition: `dim(supp(rho_A) ∩ supp(rho_B)) >= 1`.
///
/// The report's glb and witness come from the supports; `second_bfm` is
/// evaluated alongside from the square-root ranges.
pub fn check_first_bfm(
    a: &DensityOperator,
    b: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<CompatibilityReport> {
    same_dim(a.dim(), b.dim())?;
    build_report(
        IntersectionOf::Supports,
        support_meet(a, b, tol)?,
        sqrt_range_meet(a, b, tol)?,
        tol,
    )
}

/// Second BFM condition in range form:
/// `dim(ran(rho_A^{1/2}) ∩ ran(rho_B^{1/2})) >= 1`.
pub fn check_second_bfm(
    a: &DensityOperator,
    b: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<CompatibilityReport> {
    same_dim(a.dim(), b.dim())?;
    build_report(
        IntersectionOf::SqrtRanges,
        sqrt_range_meet(a, b, tol)?,
        support_meet(a, b, tol)?,
        tol,
    )
}

/// `|Q phi - phi|` with `Q` the support projector of `rho`.
pub fn sqrt_range_residual(phi: &[C64], rho: &DensityOperator, tol: &ToleranceConfig) -> Result<f64> {
    same_dim(rho.dim(), phi.len())?;
    require_unit(phi, tol)?;
    let (q, _) = support(rho, tol)?;
    let q_phi = q.matrix().matvec(phi)?;
    let r: Vec<C64> = q_phi.iter().zip(phi).map(|(x, y)| x - y).collect();
    Ok(vnorm(&r))
}

/// Whether `phi` can appear with positive weight in some pure-state
/// expansion of `rho`. In finite dimension this is membership in the support.
pub fn in_sqrt_range(phi: &[C64], rho: &DensityOperator, tol: &ToleranceConfig) -> Result<bool> {
    Ok(sqrt_range_residual(phi, rho, tol)? <= tol.membership)
}

/// Largest `p` with `rho - p |phi><phi|` positive semidefinite:
/// `1 / <phi| rho^+ |phi>`.
pub fn max_pure_weight(rho: &DensityOperator, phi: &[C64], tol: &ToleranceConfig) -> Result<f64> {
    let residual = sqrt_range_residual(phi, rho, tol)?;
    if residual > tol.membership {
        return Err(Error::NotInSupport { residual });
    }
    let pinv = pinv_psd(rho.matrix(), tol)?;
    let q = pinv.sandwich(phi, phi)?.re;
    Ok(1.0 / q)
}

fn decompose_with(
    rho: &DensityOperator,
    phi: &[C64],
    tol: &ToleranceConfig,
) -> Result<PureDecomposition> {
    let p = max_pure_weight(rho, phi, tol)?.min(1.0);
    let rest = rho.matrix() - &ComplexMatrix::pure(phi).scale(p);
    let es = eigh(&rest.hermitian_part(), tol)?;
    let mut weights = vec![p];
    let mut states = vec![phi.to_vec()];
    for (r, v) in es.eigenvalues.into_iter().zip(es.eigenvectors) {
        if r > tol.eig_zero {
            weights.push(r);
            states.push(v);
        }
    }
    Ok(PureDecomposition {
        weights,
        states,
        common_index: 0,
    })
}

/// Pure-state expansions of both assignments sharing the report's witness
/// with the maximal admissible weight.
pub fn common_pure_decomposition(
    a: &DensityOperator,
    b: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<CommonDecomposition> {
    let report = check_first_bfm(a, b, tol)?;
    let phi = match (report.first_bfm, report.witness) {
        (true, Some(phi)) => phi,
        _ => return Err(Error::Incompatible),
    };
    Ok(CommonDecomposition {
        a: decompose_with(a, &phi, tol)?,
        b: decompose_with(b, &phi, tol)?,
        common_state: phi,
    })
}

/// Orthonormal basis of the support intersection; exposed for callers that
/// need more than the single witness.
pub fn support_intersection(
    a: &DensityOperator,
    b: &DensityOperator,
    tol: &ToleranceConfig,
) -> Result<Subspace> {
    same_dim(a.dim(), b.dim())?;
    let (qa, _) = support(a, tol)?;
    let (qb, _) = support(b, tol)?;
    intersection(&qa, &qb, tol)
}

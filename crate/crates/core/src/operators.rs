//! Validated density operators, projectors and subspaces, event
//! probabilities, and the sharp-property test.

use crate::error::{Error, Result};
use crate::linalg::{eigh, vdot, vnorm, ComplexMatrix, ToleranceConfig, C64};

/// A state assignment: trace-one, positive semidefinite, Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl DensityOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `Tr(rho^2)`
    pub fn purity(&self) -> f64 {
        self.matrix.as_slice().iter().map(C64::norm_sqr).sum()
    }

    /// Pure state `|v><v|` for a unit vector `v`.
    pub fn pure(v: &[C64], tol: &ToleranceConfig) -> Result<Self> {
        check_unit(v, tol)?;
        make_density(&ComplexMatrix::pure(v), tol)
    }
}

/// A property or event: Hermitian and idempotent.
#[derive(Debug, Clone, PartialEq)]
pub struct Projector {
    matrix: ComplexMatrix,
    rank: usize,
}

impl Projector {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn is_zero(&self) -> bool {
        self.rank == 0
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::zeros(dim, dim),
            rank: 0,
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim),
            rank: dim,
        }
    }

    /// Orthonormal basis of the range, read off the spectrum.
    pub fn range(&self, tol: &ToleranceConfig) -> Result<Subspace> {
        let es = eigh(&self.matrix, tol)?;
        let basis = es
            .eigenvalues
            .iter()
            .zip(es.eigenvectors)
            .filter(|(&r, _)| r > 0.5)
            .map(|(_, v)| v)
            .collect();
        Ok(Subspace {
            ambient: self.dim(),
            basis,
        })
    }

    /// Projector built from an already-trusted matrix and rank.
    pub(crate) fn from_parts(matrix: ComplexMatrix, rank: usize) -> Self {
        Self { matrix, rank }
    }
}

/// Subspace of `C^n` held as an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<C64>>,
}

impl Subspace {
    /// Validates that `basis` is orthonormal within `tol.membership`.
    pub fn new(ambient: usize, basis: Vec<Vec<C64>>, tol: &ToleranceConfig) -> Result<Self> {
        if let Some(v) = basis.iter().find(|v| v.len() != ambient) {
            return Err(Error::DimMismatch(ambient, v.len()));
        }
        let mut acc = 0.0;
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                acc += (vdot(u, v) - target).norm_sqr();
            }
        }
        let residual = acc.sqrt();
        if residual > tol.membership {
            return Err(Error::NotOrthonormal { residual });
        }
        Ok(Self { ambient, basis })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub(crate) fn from_trusted(ambient: usize, basis: Vec<Vec<C64>>) -> Self {
        Self { ambient, basis }
    }
}

fn check_unit(v: &[C64], tol: &ToleranceConfig) -> Result<()> {
    let norm = vnorm(v);
    if (norm - 1.0).abs() > tol.membership {
        return Err(Error::NotUnitVector { norm });
    }
    Ok(())
}

pub(crate) fn require_unit(v: &[C64], tol: &ToleranceConfig) -> Result<()> {
    check_unit(v, tol)
}

pub(crate) fn same_dim(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimMismatch(a, b))
    }
}

/// Validate `m` as a density operator.
///
/// Negative eigenvalues within `eig_zero` are clamped to zero and the trace is
/// renormalised when it is within `trace_one` of 1. Exactly valid input is
/// returned unchanged.
pub fn make_density(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<DensityOperator> {
    m.require_square()?;
    let residual = m.hermiticity_residual();
    if residual > tol.hermiticity {
        return Err(Error::NotHermitian { residual });
    }
    let es = eigh(m, tol)?;
    let min_eigenvalue = es.min_eigenvalue();
    if min_eigenvalue < -tol.eig_zero {
        return Err(Error::NotPsd { min_eigenvalue });
    }
    let mut matrix = if min_eigenvalue < 0.0 {
        es.reassemble(|r| r.max(0.0)).hermitian_part()
    } else {
        m.hermitian_part()
    };
    let trace = matrix.trace().re;
    if (trace - 1.0).abs() > tol.trace_one {
        return Err(Error::TraceNotOne { trace });
    }
    if trace != 1.0 {
        matrix = matrix.unscale(trace);
    }
    Ok(DensityOperator { matrix })
}

/// Validate `m` as an orthogonal projector.
pub fn make_projector(m: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Projector> {
    m.require_square()?;
    let residual = m.hermiticity_residual();
    if residual > tol.hermiticity {
        return Err(Error::NotHermitian { residual });
    }
    let matrix = m.hermitian_part();
    let residual = (&(&matrix * &matrix) - &matrix).hs_norm();
    if residual > tol.idempotency {
        return Err(Error::NotIdempotent { residual });
    }
    let trace = matrix.trace().re;
    let rank = trace.round().max(0.0);
    if (trace - rank).abs() > tol.idempotency {
        return Err(Error::NonIntegerRank { trace });
    }
    Ok(Projector {
        matrix,
        rank: rank as usize,
    })
}

/// `sum_k |k><k|` over the basis vectors of `s`.
pub fn projector_from_subspace(s: &Subspace) -> Projector {
    let n = s.ambient_dim();
    let mut m = ComplexMatrix::zeros(n, n);
    for v in s.basis() {
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += v[i] * v[j].conj();
            }
        }
    }
    Projector {
        matrix: m.hermitian_part(),
        rank: s.dim(),
    }
}

/// Support projector and orthonormal support basis: eigenvectors of `rho`
/// whose eigenvalue exceeds `eig_zero`.
pub fn support(rho: &DensityOperator, tol: &ToleranceConfig) -> Result<(Projector, Subspace)> {
    let es = eigh(rho.matrix(), tol)?;
    let basis: Vec<Vec<C64>> = es
        .eigenvalues
        .iter()
        .zip(es.eigenvectors)
        .filter(|(&r, _)| r > tol.eig_zero)
        .map(|(_, v)| v)
        .collect();
    let subspace = Subspace::from_trusted(rho.dim(), basis);
    Ok((projector_from_subspace(&subspace), subspace))
}

/// `Tr(P rho)`, clamped into `[0, 1]`.
pub fn event_probability(rho: &DensityOperator, p: &Projector) -> Result<f64> {
    same_dim(rho.dim(), p.dim())?;
    // Tr(P rho) = sum_ij P_ij rho_ji = <P^dag, rho>_HS, and P is Hermitian.
    let t = crate::linalg::hs_inner(p.matrix(), rho.matrix())?.re;
    Ok(t.clamp(0.0, 1.0))
}

/// Outcome of [`is_sharp`] with both residuals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sharpness {
    /// Conjunction of both criteria.
    pub sharp: bool,
    /// `|Tr(P rho) - 1|`
    pub trace_residual: f64,
    /// `|PQ - Q|_HS` with `Q` the support projector of `rho`.
    pub support_residual: f64,
    pub by_trace: bool,
    pub by_support: bool,
}

impl Sharpness {
    /// The two criteria are mathematically equivalent; disagreement means the
    /// tolerances are too tight or too loose for this input.
    pub fn numerical_fault(&self) -> bool {
        self.by_trace != self.by_support
    }
}

/// Whether `p` has probability one in `rho`, tested both as `Tr(P rho) = 1`
/// and as `PQ = Q` (i.e. `P >= Q`). Both use `tol.membership`.
pub fn is_sharp(rho: &DensityOperator, p: &Projector, tol: &ToleranceConfig) -> Result<Sharpness> {
    same_dim(rho.dim(), p.dim())?;
    let trace_residual = (event_probability(rho, p)? - 1.0).abs();
    let (q, _) = support(rho, tol)?;
    let support_residual = (&(p.matrix() * q.matrix()) - q.matrix()).hs_norm();
    let by_trace = trace_residual <= tol.membership;
    let by_support = support_residual <= tol.membership;
    Ok(Sharpness {
        sharp: by_trace && by_support,
        trace_residual,
        support_residual,
        by_trace,
        by_support,
    })
}

//! Seeded generators for property suites.
//!
//! All randomness comes from ChaCha20 seeded with a `u64` through
//! `SeedableRng::seed_from_u64`, so a seed reproduces its sequence on every
//! platform. Complex Gaussian entries have independent standard-normal real
//! and imaginary parts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{vdot, vnorm, ComplexMatrix, ToleranceConfig, C64};
use crate::operators::{make_density, projector_from_subspace, DensityOperator, Projector, Subspace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Seed(pub u64);

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Stateful generator; every method draws from one seeded stream.
pub struct Sampler {
    rng: ChaCha20Rng,
    tol: ToleranceConfig,
}

impl Sampler {
    pub fn new(seed: Seed) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed.0),
            tol: ToleranceConfig::default(),
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha20Rng {
        &mut self.rng
    }

    pub fn range(&mut self, lo: usize, hi_inclusive: usize) -> usize {
        self.rng.random_range(lo..=hi_inclusive)
    }

    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }

    pub fn gaussian(&mut self) -> C64 {
        C64::new(
            self.rng.sample(StandardNormal),
            self.rng.sample(StandardNormal),
        )
    }

    pub fn gaussian_vector(&mut self, n: usize) -> Vec<C64> {
        (0..n).map(|_| self.gaussian()).collect()
    }

    /// Random unit vector.
    pub fn unit_vector(&mut self, n: usize) -> Vec<C64> {
        loop {
            let v = self.gaussian_vector(n);
            let norm = vnorm(&v);
            if norm > 1e-6 {
                return v.into_iter().map(|z| z / norm).collect();
            }
        }
    }

    /// Columns of a random unitary, as `n` orthonormal vectors.
    pub fn unitary_columns(&mut self, n: usize) -> Vec<Vec<C64>> {
        loop {
            let raw: Vec<Vec<C64>> = (0..n).map(|_| self.gaussian_vector(n)).collect();
            if let Some(q) = orthonormalize(&raw) {
                return q;
            }
        }
    }

    /// Random combination `sum_i c_i basis_i` with Gaussian coefficients,
    /// `count` times, orthonormalised.
    pub fn vectors_in(&mut self, basis: &[Vec<C64>], count: usize) -> Vec<Vec<C64>> {
        if count == 0 {
            return Vec::new();
        }
        let n = basis[0].len();
        loop {
            let raw: Vec<Vec<C64>> = (0..count)
                .map(|_| {
                    let coeffs = self.gaussian_vector(basis.len());
                    combine(n, basis, &coeffs)
                })
                .collect();
            if let Some(q) = orthonormalize(&raw) {
                return q;
            }
        }
    }

    /// `G G^dag / Tr(G G^dag)` with `G = B C`, `B` the given orthonormal
    /// basis and `C` a square complex Gaussian matrix: full rank on `span(B)`.
    pub fn density_on(&mut self, basis: &[Vec<C64>]) -> DensityOperator {
        let n = basis[0].len();
        let r = basis.len();
        let cols: Vec<Vec<C64>> = (0..r)
            .map(|_| {
                let coeffs = self.gaussian_vector(r);
                combine(n, basis, &coeffs)
            })
            .collect();
        gram_state(n, &cols, &self.tol)
    }

    pub fn density(&mut self, dim: usize, rank: usize) -> Result<DensityOperator> {
        if rank == 0 || rank > dim {
            return Err(Error::BadRank { rank, dim });
        }
        let cols: Vec<Vec<C64>> = (0..rank).map(|_| self.gaussian_vector(dim)).collect();
        Ok(gram_state(dim, &cols, &self.tol))
    }

    pub fn projector(&mut self, dim: usize, rank: usize) -> Result<Projector> {
        if rank > dim {
            return Err(Error::BadRank { rank, dim });
        }
        let cols = self.unitary_columns(dim);
        Ok(projector_from_subspace(&Subspace::from_trusted(
            dim,
            cols[..rank].to_vec(),
        )))
    }

    pub fn subprojector(&mut self, p: &Projector, rank: usize) -> Result<Projector> {
        if rank > p.rank() {
            return Err(Error::BadRank {
                rank,
                dim: p.rank(),
            });
        }
        let range = p.range(&self.tol)?;
        let basis = self.vectors_in(range.basis(), rank);
        Ok(projector_from_subspace(&Subspace::from_trusted(p.dim(), basis)))
    }

    /// Random `P' >= Q`: the range of `q` plus `extra` random directions
    /// from its orthocomplement.
    pub fn superprojector(&mut self, q: &Projector, extra: usize) -> Result<Projector> {
        let comp = crate::lattice::orthocomplement(q);
        if extra > comp.rank() {
            return Err(Error::BadRank {
                rank: extra,
                dim: comp.rank(),
            });
        }
        let mut basis = q.range(&self.tol)?.basis().to_vec();
        let comp_basis = comp.range(&self.tol)?;
        basis.extend(self.vectors_in(comp_basis.basis(), extra));
        Ok(projector_from_subspace(&Subspace::from_trusted(q.dim(), basis)))
    }

    /// Random state of the given rank with support inside `ran(P)`.
    pub fn density_in(&mut self, p: &Projector, rank: usize) -> Result<DensityOperator> {
        if rank == 0 || rank > p.rank() {
            return Err(Error::BadRank {
                rank,
                dim: p.rank(),
            });
        }
        let range = p.range(&self.tol)?;
        let basis = self.vectors_in(range.basis(), rank);
        Ok(self.density_on(&basis))
    }

    pub fn compatible_pair(
        &mut self,
        dim: usize,
        overlap: usize,
    ) -> Result<(DensityOperator, DensityOperator)> {
        if overlap > dim || dim == 0 || (overlap == 0 && dim < 2) {
            return Err(Error::BadDims(format!(
                "overlap {overlap} in dimension {dim}"
            )));
        }
        let free = dim - overlap;
        let lo = usize::from(overlap == 0);
        let extra_a = self.range(lo, free - lo);
        let extra_b = self.range(lo, free - extra_a);

        let u = self.unitary_columns(dim);
        let shared = &u[..overlap];
        let only_a = &u[overlap..overlap + extra_a];
        let fresh_b = &u[overlap + extra_a..overlap + extra_a + extra_b];

        let mut basis_a = shared.to_vec();
        basis_a.extend_from_slice(only_a);

        // Tilt B's private directions toward A's so the supports do not
        // commute; the fresh components keep the intersection exactly `shared`.
        let mut raw_b = shared.to_vec();
        for f in fresh_b {
            let tilt = if only_a.is_empty() {
                vec![C64::new(0.0, 0.0); dim]
            } else {
                let coeffs = self.gaussian_vector(only_a.len());
                combine(dim, only_a, &coeffs)
            };
            raw_b.push(f.iter().zip(&tilt).map(|(x, y)| x + y).collect());
        }
        let basis_b = orthonormalize(&raw_b).expect("independent by construction");

        Ok((self.density_on(&basis_a), self.density_on(&basis_b)))
    }

    pub fn sharp_scenario(&mut self, dim: usize) -> (DensityOperator, Projector) {
        let rank = self.range(1, dim);
        let prank = self.range(rank, dim);
        let u = self.unitary_columns(dim);
        let rho = self.density_on(&u[..rank]);
        let p = projector_from_subspace(&Subspace::from_trusted(dim, u[..prank].to_vec()));
        (rho, p)
    }

    pub fn mixture(&mut self, rho: &DensityOperator, k: usize) -> Result<Vec<(f64, DensityOperator)>> {
        if k == 0 {
            return Err(Error::BadRank {
                rank: 0,
                dim: rho.dim(),
            });
        }
        if k == 1 {
            return Ok(vec![(1.0, rho.clone())]);
        }
        let n = rho.dim();
        let es = crate::linalg::eigh(rho.matrix(), &self.tol)?;
        let (roots, vecs): (Vec<f64>, Vec<Vec<C64>>) = es
            .eigenvalues
            .iter()
            .zip(es.eigenvectors)
            .filter(|(&r, _)| r > self.tol.eig_zero)
            .map(|(&r, v)| (r.sqrt(), v))
            .unzip();
        let rank = roots.len();
        let m = k.max(rank);

        // Columns of an m x rank isometry V give the ensemble
        // psi_j = sum_i V[j][i] sqrt(r_i) |i>, which sums back to rho.
        let iso = self.vectors_in(&standard_basis(m), rank);
        let psis: Vec<Vec<C64>> = (0..m)
            .map(|j| {
                let coeffs: Vec<C64> = (0..rank).map(|i| iso[i][j] * roots[i]).collect();
                combine(n, &vecs, &coeffs)
            })
            .collect();

        let mut order: Vec<usize> = (0..m).collect();
        order.shuffle(&mut self.rng);
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); k];
        for (pos, &j) in order.iter().enumerate() {
            let g = if pos < k { pos } else { self.rng.random_range(0..k) };
            groups[g].push(j);
        }

        let mut out = Vec::with_capacity(k);
        for g in groups {
            let mut m_g = ComplexMatrix::zeros(n, n);
            for &j in &g {
                m_g = &m_g + &ComplexMatrix::pure(&psis[j]);
            }
            let w = m_g.trace().re;
            out.push((w, make_density(&m_g.unscale(w), &self.tol)?));
        }
        Ok(out)
    }
}

fn standard_basis(n: usize) -> Vec<Vec<C64>> {
    (0..n).map(|i| crate::linalg::basis_vector(n, i)).collect()
}

fn combine(n: usize, basis: &[Vec<C64>], coeffs: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n];
    for (b, c) in basis.iter().zip(coeffs) {
        for (o, x) in out.iter_mut().zip(b) {
            *o += c * x;
        }
    }
    out
}

fn gram_state(n: usize, cols: &[Vec<C64>], tol: &ToleranceConfig) -> DensityOperator {
    let mut m = ComplexMatrix::zeros(n, n);
    for c in cols {
        m = &m + &ComplexMatrix::pure(c);
    }
    let t = m.trace().re;
    make_density(&m.unscale(t), tol).expect("Gram matrix is a valid state")
}

/// Modified Gram-Schmidt with one reorthogonalisation pass; `None` if the
/// input is numerically dependent.
pub fn orthonormalize(vectors: &[Vec<C64>]) -> Option<Vec<Vec<C64>>> {
    let mut out: Vec<Vec<C64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        let mut w = v.clone();
        let start = vnorm(&w);
        for _ in 0..2 {
            for q in &out {
                let c = vdot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let norm = vnorm(&w);
        if norm <= 1e-8 * start.max(1e-300) {
            return None;
        }
        out.push(w.into_iter().map(|z| z / norm).collect());
    }
    Some(out)
}

/// Random state of the given rank: `G G^dag / Tr(G G^dag)` with `G` a
/// `dim x rank` complex Gaussian matrix.
pub fn random_density(dim: usize, rank: usize, seed: Seed) -> Result<DensityOperator> {
    Sampler::new(seed).density(dim, rank)
}

/// Random projector `W <= P` of the given rank.
pub fn random_subprojector(p: &Projector, rank: usize, seed: Seed) -> Result<Projector> {
    Sampler::new(seed).subprojector(p, rank)
}

/// Two states whose supports intersect in exactly `overlap_dim` dimensions.
pub fn random_compatible_pair(
    dim: usize,
    overlap_dim: usize,
    seed: Seed,
) -> Result<(DensityOperator, DensityOperator)> {
    Sampler::new(seed).compatible_pair(dim, overlap_dim)
}

/// A state together with a projector that is sharp in it.
pub fn random_sharp_scenario(dim: usize, seed: Seed) -> (DensityOperator, Projector) {
    Sampler::new(seed).sharp_scenario(dim)
}

/// `k` weighted components `(w_k, rho_k)` with `sum_k w_k rho_k = rho`.
pub fn random_mixture(
    rho: &DensityOperator,
    k: usize,
    seed: Seed,
) -> Result<Vec<(f64, DensityOperator)>> {
    Sampler::new(seed).mixture(rho, k)
}

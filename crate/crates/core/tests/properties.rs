use nalgebra::DMatrix;
use proptest::prelude::*;

use qcompat::cli::statefile::StateFile;
use qcompat::compatibility::{common_pure_decomposition, in_sqrt_range};
use qcompat::lattice::{glb, glb_commuting, glb_eigenspace, leq};
use qcompat::linalg::{eigh, hs_distance, pinv_psd, sqrt_psd, ComplexMatrix, ToleranceConfig, C64};
use qcompat::operators::{is_sharp, make_density, make_projector, projector_from_subspace, support, Subspace};
use qcompat::pooling::{improve, luders_update, pool};
use qcompat::testkit::{Sampler, Seed};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn dist(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    hs_distance(a, b).unwrap()
}

fn random_hermitian(s: &mut Sampler, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_columns(n, &(0..n).map(|_| s.gaussian_vector(n)).collect::<Vec<_>>());
    g.hermitian_part()
}

fn config() -> ProptestConfig {
    ProptestConfig::with_cases(64)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn eigh_reconstructs_and_matches_nalgebra(seed in any::<u64>(), n in 2usize..=12) {
        let mut s = Sampler::new(Seed(seed));
        let m = random_hermitian(&mut s, n);
        let es = eigh(&m, &tol()).unwrap();
        prop_assert!(dist(&es.reassemble(|x| x), &m) <= 1e-12 * m.hs_norm().max(1.0));

        let v = ComplexMatrix::from_columns(n, &es.eigenvectors);
        prop_assert!(dist(&(&v.adjoint() * &v), &ComplexMatrix::identity(n)) <= 1e-12);
        prop_assert!(es.eigenvalues.windows(2).all(|w| w[0] >= w[1]));

        let na = DMatrix::<C64>::from_fn(n, n, |i, j| m[(i, j)]);
        let mut oracle: Vec<f64> = na.symmetric_eigenvalues().iter().copied().collect();
        oracle.sort_by(|a, b| b.total_cmp(a));
        for (ours, theirs) in es.eigenvalues.iter().zip(&oracle) {
            prop_assert!((ours - theirs).abs() <= 1e-10, "{ours} vs {theirs}");
        }
    }

    #[test]
    fn sqrt_and_pinv_identities(seed in any::<u64>(), n in 2usize..=10) {
        let mut s = Sampler::new(Seed(seed));
        let rank = s.range(1, n);
        let rho = s.density(n, rank).unwrap();
        let m = rho.matrix();
        let r = sqrt_psd(m, &tol()).unwrap();
        prop_assert!(dist(&(&r * &r), m) <= 10.0 * tol().eig_zero);
        prop_assert!(r.hermiticity_residual() <= 1e-12);

        let pinv = pinv_psd(m, &tol()).unwrap();
        prop_assert!(dist(&(&(m * &pinv) * m), m) <= 1e-8);
        prop_assert!(dist(&(&(&pinv * m) * &pinv), &pinv) <= 1e-6 * pinv.hs_norm().max(1.0));
    }

    #[test]
    fn hs_triangle_inequality(seed in any::<u64>(), n in 1usize..=8) {
        let mut s = Sampler::new(Seed(seed));
        let [a, b, c] = [0, 1, 2].map(|_| random_hermitian(&mut s, n));
        prop_assert!(dist(&a, &c) <= dist(&a, &b) + dist(&b, &c) + 1e-12);
        prop_assert!((dist(&a, &b) - dist(&b, &a)).abs() <= 1e-15);
    }

    #[test]
    fn mixture_components_inherit_sharp_properties(seed in any::<u64>(), n in 2usize..=8, k in 1usize..=5) {
        let mut s = Sampler::new(Seed(seed));
        let (rho, p) = s.sharp_scenario(n);
        let parts = s.mixture(&rho, k).unwrap();
        prop_assert_eq!(parts.len(), k);
        let sum = parts
            .iter()
            .fold(ComplexMatrix::zeros(n, n), |acc, (w, c)| &acc + &c.matrix().scale(*w));
        prop_assert!(dist(&sum, rho.matrix()) <= 1e-10);
        for (_, component) in &parts {
            prop_assert!(is_sharp(component, &p, &tol()).unwrap().sharp);
        }
    }

    #[test]
    fn luders_keeps_commuting_sharp_properties(seed in any::<u64>(), n in 2usize..=8) {
        let mut s = Sampler::new(Seed(seed));
        let basis = s.unitary_columns(n);
        let span = |s: &mut Sampler| {
            let cols: Vec<_> = basis
                .iter()
                .enumerate()
                .filter(|(i, _)| *i == 0 || s.uniform() < 0.6)
                .map(|(_, c)| c.clone())
                .collect();
            projector_from_subspace(&Subspace::new(n, cols, &tol()).unwrap())
        };
        let p = span(&mut s);
        let p2 = span(&mut s);
        let rank = s.range(1, p2.rank());
        let rho = s.density_in(&p2, rank).unwrap();
        prop_assert!(is_sharp(&rho, &p2, &tol()).unwrap().sharp);
        let rho_l = luders_update(&rho, &p, &tol()).unwrap();
        prop_assert!(is_sharp(&rho_l, &p, &tol()).unwrap().sharp);
        prop_assert!(is_sharp(&rho_l, &p2, &tol()).unwrap().sharp);
    }

    #[test]
    fn decomposition_states_lie_in_sqrt_ranges(seed in any::<u64>(), n in 2usize..=8) {
        let mut s = Sampler::new(Seed(seed));
        let overlap = s.range(1, n);
        let (a, b) = s.compatible_pair(n, overlap).unwrap();
        let d = common_pure_decomposition(&a, &b, &tol()).unwrap();
        for (rho, dec) in [(&a, &d.a), (&b, &d.b)] {
            for v in &dec.states {
                prop_assert!(in_sqrt_range(v, rho, &tol()).unwrap());
            }
        }
    }

    #[test]
    fn supports_are_sharp_in_states_below_the_meet(seed in any::<u64>(), n in 2usize..=8) {
        let mut s = Sampler::new(Seed(seed));
        let overlap = s.range(1, n);
        let (a, b) = s.compatible_pair(n, overlap).unwrap();
        let (qa, _) = support(&a, &tol()).unwrap();
        let (qb, _) = support(&b, &tol()).unwrap();
        let meet = glb(&qa, &qb, &tol()).unwrap();
        let rank = s.range(1, meet.rank());
        let sigma = s.density_in(&meet, rank).unwrap();
        prop_assert!(is_sharp(&sigma, &qa, &tol()).unwrap().sharp);
        prop_assert!(is_sharp(&sigma, &qb, &tol()).unwrap().sharp);
    }

    #[test]
    fn glb_is_greatest_lower_bound(seed in any::<u64>(), n in 2usize..=7) {
        let mut s = Sampler::new(Seed(seed));
        let overlap = s.range(0, n - 1);
        let (a, b) = s.compatible_pair(n, overlap).unwrap();
        let (p, _) = support(&a, &tol()).unwrap();
        let (q, _) = support(&b, &tol()).unwrap();
        let meet = glb(&p, &q, &tol()).unwrap();
        prop_assert_eq!(meet.rank(), overlap);
        prop_assert!(leq(&meet, &p, &tol()).unwrap());
        prop_assert!(leq(&meet, &q, &tol()).unwrap());
        if meet.rank() < p.rank() {
            for _ in 0..8 {
                let bigger = s.subprojector(&p, meet.rank() + 1).unwrap();
                prop_assert!(!leq(&bigger, &q, &tol()).unwrap());
            }
        }
        let r = s.range(0, meet.rank());
        let sub = s.subprojector(&meet, r).unwrap();
        prop_assert!(leq(&glb(&sub, &p, &tol()).unwrap(), &sub, &tol()).unwrap());
    }

    #[test]
    fn glb_paths_agree_on_commuting_projectors(seed in any::<u64>(), n in 2usize..=9) {
        let mut s = Sampler::new(Seed(seed));
        let basis = s.unitary_columns(n);
        let pick = |s: &mut Sampler| -> Vec<bool> { (0..n).map(|_| s.uniform() < 0.5).collect() };
        let (mp, mq) = (pick(&mut s), pick(&mut s));
        let span = |mask: &[bool]| {
            let cols = basis.iter().zip(mask).filter(|(_, &m)| m).map(|(c, _)| c.clone()).collect();
            projector_from_subspace(&Subspace::new(n, cols, &tol()).unwrap())
        };
        let (p, q) = (span(&mp), span(&mq));
        let both: Vec<bool> = mp.iter().zip(&mq).map(|(a, b)| *a && *b).collect();
        let expected = span(&both);
        let fast = glb_commuting(&p, &q, &tol()).unwrap();
        let slow = glb_eigenspace(&p, &q, &tol()).unwrap();
        prop_assert!(dist(fast.matrix(), expected.matrix()) <= 1e-10);
        prop_assert!(dist(slow.matrix(), expected.matrix()) <= 1e-8);
    }

    #[test]
    fn pooled_states_are_valid(seed in any::<u64>(), n in 2usize..=8) {
        let mut s = Sampler::new(Seed(seed));
        let overlap = s.range(1, n);
        let (a, b) = s.compatible_pair(n, overlap).unwrap();
        let meet = improve(&a, &b, &tol()).unwrap().glb;
        for w in [0.1, 0.5, 0.9] {
            let pooled = pool(&a, &b, w, &tol()).unwrap();
            prop_assert!(make_density(pooled.matrix(), &tol()).is_ok());
            let (q, _) = support(&pooled, &tol()).unwrap();
            prop_assert!(leq(&q, &meet, &tol()).unwrap());
        }
    }

    #[test]
    fn state_file_round_trip(bits in prop::collection::vec((any::<u64>(), any::<u64>()), 1..=16)) {
        let finite = |b: u64| {
            let x = f64::from_bits(b);
            if x.is_finite() { x } else { 0.5 }
        };
        let n = (bits.len() as f64).sqrt().floor() as usize;
        let data: Vec<C64> = bits[..n * n].iter().map(|&(re, im)| C64::new(finite(re), finite(im))).collect();
        let m = ComplexMatrix::new(n, n, data).unwrap();
        let text = StateFile::from_matrix(&m, Some("x".into())).to_json();
        let back = StateFile::parse(&text).unwrap().to_matrix().unwrap();
        for (x, y) in back.as_slice().iter().zip(m.as_slice()) {
            prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
            prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}

#[test]
fn renormalized_projection_is_not_always_nearest() {
    let rho = make_density(&ComplexMatrix::from_diag(&[0.5, 0.3, 0.2]), &tol()).unwrap();
    let p = make_projector(&ComplexMatrix::from_diag(&[1.0, 1.0, 0.0]), &tol()).unwrap();
    let rho_l = luders_update(&rho, &p, &tol()).unwrap();
    // Shifting the projected spectrum by (1 - p) / rank gives the nearest state here.
    let shifted = ComplexMatrix::from_diag(&[0.6, 0.4, 0.0]);
    let d_l = dist(rho.matrix(), rho_l.matrix());
    let d_s = dist(rho.matrix(), &shifted);
    assert!((d_l * d_l - 0.06125).abs() < 1e-14);
    assert!((d_s * d_s - 0.06).abs() < 1e-14);
    assert!(d_s < d_l);
}

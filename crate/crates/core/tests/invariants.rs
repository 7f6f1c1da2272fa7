use decohere::capacity::{
    brute_force_capacity_oracle, closed_form_capacity, coherent_information, fejer_eigenvalues,
    maximize_diagonal, spectrum_comp_mixed_weak,
};
use decohere::channels::{
    apply, channel_distance, complementary, compose, pinch, symmetries, ChannelSpec, Family,
    KrausChannel,
};
use decohere::matrix::{
    hermitian_eigenvalues, hermitian_eigs, majorizes, von_neumann_entropy, ComplexMatrix,
    DensityMatrix, Spectrum,
};
use decohere::random::{random_density_matrix, random_hermitian, random_simplex_point};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn specs_up_to(max_d: usize, xs: &[f64]) -> Vec<ChannelSpec> {
    let mut out = Vec::new();
    for d in 2..=max_d {
        for family in Family::ALL {
            for k in family.valid_ks(d) {
                for &x in xs {
                    out.push(ChannelSpec::new(family, d, k, x).unwrap());
                }
            }
        }
    }
    out
}

fn tenth_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eig_round_trip(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = random_hermitian(&mut rng, n);
        let e = hermitian_eigs(&h).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&h).unwrap() <= 1e-9);
        prop_assert!(e.vectors.unitarity_residual().unwrap() <= 1e-9);
    }

    #[test]
    fn entropy_bounds(seed in any::<u64>(), n in 1usize..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(&mut rng, n);
        let s = von_neumann_entropy(&rho).unwrap();
        prop_assert!(s >= 0.0);
        prop_assert!(s <= (n as f64).log2() + 1e-12);
    }

    #[test]
    fn entropy_is_schur_concave(seed in any::<u64>(), n in 2usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_simplex_point(&mut rng, n);
        let b = random_simplex_point(&mut rng, n);
        let (sa, sb) = (Spectrum::new(a), Spectrum::new(b));
        if majorizes(&sa, &sb).unwrap() {
            prop_assert!(sa.entropy_bits().unwrap() <= sb.entropy_bits().unwrap() + 1e-12);
        }
        // a doubly stochastic average of a is always majorized by a
        let avg: Vec<f64> = sa.values().iter().map(|_| sa.sum() / n as f64).collect();
        let savg = Spectrum::new(avg);
        prop_assert!(majorizes(&sa, &savg).unwrap());
        prop_assert!(sa.entropy_bits().unwrap() <= savg.entropy_bits().unwrap() + 1e-12);
    }

    #[test]
    fn coherent_information_is_concave_on_diagonals(
        seed in any::<u64>(),
        family_idx in 0usize..3,
        t in 0.01f64..0.99,
        x in 0.0f64..=1.0,
    ) {
        let family = Family::ALL[family_idx];
        let k = match family { Family::Fully => 1, Family::Block => 2, Family::Weak => 3 };
        let ch = ChannelSpec::new(family, 6, k, x).unwrap().build().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_simplex_point(&mut rng, 6);
        let q = random_simplex_point(&mut rng, 6);
        let mid: Vec<f64> = p.iter().zip(&q).map(|(a, b)| t * a + (1.0 - t) * b).collect();
        let ic = |v: &[f64]| coherent_information(&ch, &DensityMatrix::diagonal(v).unwrap()).unwrap();
        prop_assert!(ic(&mid) >= t * ic(&p) + (1.0 - t) * ic(&q) - 1e-9);
    }
}

#[test]
fn schur_horn_sampling() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for d in 2..=8 {
        for _ in 0..500 {
            let rho = random_density_matrix(&mut rng, d);
            let eigs = rho.spectrum().unwrap();
            let diag = Spectrum::new(rho.matrix().diagonal_real());
            assert!(majorizes(&eigs, &diag).unwrap());
        }
    }
}

#[test]
fn pinching_identities() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for spec in specs_up_to(6, &[0.0, 0.3, 0.7, 1.0]) {
        let ch = spec.build().unwrap();
        let comp = complementary(&ch);
        let dk = spec.dephasing_partition();
        let full = decohere::channels::Partition::singletons(spec.d).unwrap();
        for _ in 0..20 {
            let rho = random_density_matrix(&mut rng, spec.d);
            let out = apply(&ch, &rho).unwrap();
            // D ∘ ch = D
            let lhs = pinch(&out, &dk).unwrap();
            let rhs = pinch(&rho, &dk).unwrap();
            assert!(lhs.matrix().max_abs_diff(rhs.matrix()).unwrap() <= 1e-12, "{spec}");
            // ch^c ∘ D = ch^c (full dephasing for every family)
            let env = apply(&comp, &rho).unwrap();
            let env_d = apply(&comp, &pinch(&rho, &full).unwrap()).unwrap();
            assert!(env.matrix().max_abs_diff(env_d.matrix()).unwrap() <= 1e-12, "{spec}");
            if spec.family == Family::Weak {
                // ch ∘ D = D
                let dr = pinch(&rho, &full).unwrap();
                let through = apply(&ch, &dr).unwrap();
                assert!(through.matrix().max_abs_diff(dr.matrix()).unwrap() <= 1e-12);
            }
        }
    }
}

#[test]
fn degradability_identity_everywhere() {
    for spec in specs_up_to(8, &tenth_grid()) {
        let ch = spec.build().unwrap();
        let comp = complementary(&ch);
        let residual = channel_distance(&compose(&comp, &ch).unwrap(), &comp).unwrap();
        assert!(residual <= 1e-10, "{spec}: {residual:e}");
    }
}

#[test]
fn unitality_and_covariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    for spec in specs_up_to(6, &[0.2, 0.9]) {
        let ch = spec.build().unwrap();
        let comp = complementary(&ch);
        let mixed = DensityMatrix::maximally_mixed(spec.d);
        let out = apply(&ch, &mixed).unwrap();
        assert!(out.matrix().max_abs_diff(mixed.matrix()).unwrap() <= 1e-12);

        let rho = random_density_matrix(&mut rng, spec.d);
        let base = ch.apply_matrix(rho.matrix()).unwrap();
        let base_env = comp.apply_matrix(rho.matrix()).unwrap();
        for sym in symmetries(&spec) {
            let moved = sym.input.conjugate(rho.matrix()).unwrap();
            let lhs = ch.apply_matrix(&moved).unwrap();
            let rhs = sym.input.conjugate(&base).unwrap();
            assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12, "{spec}");
            let lhs = comp.apply_matrix(&moved).unwrap();
            let rhs = sym.environment.conjugate(&base_env).unwrap();
            assert!(lhs.max_abs_diff(&rhs).unwrap() <= 1e-12, "{spec}");
        }
    }
}

#[test]
fn twirl_of_diagonal_state_is_maximally_mixed() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    for spec in specs_up_to(8, &[0.5]) {
        let p = random_simplex_point(&mut rng, spec.d);
        let rho_d = ComplexMatrix::from_diagonal(&p);
        let ops = decohere::channels::symmetry_operators(&spec);
        assert_eq!(ops.len(), spec.d);
        let mut avg = ComplexMatrix::zeros(spec.d, spec.d);
        for u in &ops {
            avg = &avg + &u.conjugate(&rho_d).unwrap();
        }
        let avg = avg.scale_real(1.0 / ops.len() as f64);
        let target = DensityMatrix::maximally_mixed(spec.d);
        assert!(avg.max_abs_diff(target.matrix()).unwrap() <= 1e-12, "{spec}");
    }
}

#[test]
fn capacity_is_nonincreasing_in_noise() {
    for d in [2, 5, 8, 12] {
        for family in Family::ALL {
            for k in family.valid_ks(d) {
                let mut last = f64::INFINITY;
                for i in 0..=100 {
                    let spec = ChannelSpec::new(family, d, k, i as f64 / 100.0).unwrap();
                    let q = closed_form_capacity(&spec);
                    assert!(q >= -1e-9);
                    assert!(q <= last + 1e-12, "{spec}");
                    last = q;
                }
            }
        }
    }
}

#[test]
fn endpoint_anchors() {
    for d in 2..=12 {
        let log_d = (d as f64).log2();
        for family in Family::ALL {
            for k in family.valid_ks(d) {
                let q0 = closed_form_capacity(&ChannelSpec::new(family, d, k, 0.0).unwrap());
                assert!((q0 - log_d).abs() <= 1e-12);
                let q1 = closed_form_capacity(&ChannelSpec::new(family, d, k, 1.0).unwrap());
                match family {
                    Family::Fully => assert!(q1.abs() <= 1e-12),
                    Family::Block => assert!((q1 - (k as f64).log2()).abs() <= 1e-12),
                    Family::Weak if k == d => assert!((q1 - log_d).abs() <= 1e-12),
                    Family::Weak => {}
                }
            }
        }
    }
}

#[test]
fn fejer_matches_environment_state() {
    for d in 2..=9 {
        for k in 1..=d {
            for x in [0.3, 1.0] {
                let spec = ChannelSpec::weak(d, k, x).unwrap();
                let comp = complementary(&spec.build().unwrap());
                let env = apply(&comp, &DensityMatrix::maximally_mixed(d)).unwrap();
                // circulant block on the window labels 1..=d
                let block = ComplexMatrix::from_fn(d, d, |r, c| env.matrix()[(r + 1, c + 1)] / x);
                let direct = hermitian_eigenvalues(&block).unwrap();
                let fejer = Spectrum::new(fejer_eigenvalues(d, k).unwrap().lambdas);
                assert!(direct.max_abs_diff(&fejer).unwrap() <= 1e-9, "d={d} k={k}");

                let full = env.spectrum().unwrap();
                let predicted = spectrum_comp_mixed_weak(d, k, x).unwrap();
                assert!(full.max_abs_diff(&predicted).unwrap() <= 1e-9, "d={d} k={k}");
                assert!((predicted.sum() - 1.0).abs() <= 1e-12);
            }
        }
    }
}

#[test]
fn optimizer_matches_closed_form_on_grid() {
    for spec in specs_up_to(8, &tenth_grid()) {
        let ch = spec.build().unwrap();
        let opt = maximize_diagonal(&ch, 1e-9, 100_000).unwrap();
        assert!(opt.converged, "{spec}");
        let gap = (opt.value - closed_form_capacity(&spec)).abs();
        assert!(gap <= 1e-6, "{spec}: {gap:e}");
        assert!((opt.point.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
        assert!(opt.point.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn oracle_never_beats_diagonal_optimum() {
    for spec in specs_up_to(4, &[0.0, 0.5, 1.0]) {
        let ch = spec.build().unwrap();
        let diag = maximize_diagonal(&ch, 1e-9, 100_000).unwrap().value;
        let oracle = brute_force_capacity_oracle(&ch, 500, 300, 99).unwrap();
        assert!(oracle <= diag + 1e-4, "{spec}: {oracle} vs {diag}");
    }
    let id = KrausChannel::identity(3);
    let oracle = brute_force_capacity_oracle(&id, 3_000, 2_000, 5).unwrap();
    assert!((oracle - 3f64.log2()).abs() <= 1e-3);
}

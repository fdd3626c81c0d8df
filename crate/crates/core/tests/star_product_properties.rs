use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use starquant::catalog::{
    catalog_entries, livine_scheme, matrix_units_scheme, mub_qubit_scheme, pauli_scheme,
    LivineNormalization, PauliVariant,
};
use starquant::matrix::{Matrix, ToleranceConfig, C64};
use starquant::operator_space::hs_inner;
use starquant::random::{random_operator, random_unitary};
use starquant::scheme::Scheme;
use starquant::star_product::{
    associativity_residual, cubic_unitary_residual, intertwiner, reconstruct, star_kernel,
    star_multiply, symbol, SymbolVector,
};

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn complete(s: &Scheme) -> Scheme {
    let q = s.quantizers_or_canonical(&tol()).unwrap();
    s.clone().with_quantizers(q).unwrap()
}

/// Direct evaluation of the kernel sum, independent of `star_multiply`.
fn oracle_star(s: &Scheme, fa: &[C64], fb: &[C64]) -> Vec<C64> {
    let q = s.quantizers().unwrap();
    let d = s.d();
    let mut a = Matrix::zeros(d, d);
    let mut b = Matrix::zeros(d, d);
    for k in 0..s.n() {
        a = &a + &q[k].scale(fa[k]);
        b = &b + &q[k].scale(fb[k]);
    }
    let ab = &a * &b;
    s.dequantizers().iter().map(|u| hs_inner(u, &ab).unwrap()).collect()
}

#[test]
fn homomorphism_round_trip_and_associativity_for_catalog() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for entry in catalog_entries() {
        let s = complete(&entry.scheme);
        if !s.is_tomographic(&tol()) {
            continue;
        }
        let k = star_kernel(&s).unwrap();
        assert_eq!(k.values().len(), s.n().pow(3));
        for _ in 0..10 {
            let a = random_operator(s.d(), s.d(), &mut rng);
            let b = random_operator(s.d(), s.d(), &mut rng);
            let (fa, fb) = (symbol(&s, &a).unwrap(), symbol(&s, &b).unwrap());
            let prod = star_multiply(&k, &fa, &fb).unwrap();
            let direct = symbol(&s, &(&a * &b)).unwrap();
            assert!(prod.max_abs_diff(&direct) < 1e-9, "{}", entry.name);
            let oracle = SymbolVector::new(oracle_star(&s, &fa.values, &fb.values), s.tag());
            assert!(prod.max_abs_diff(&oracle) < 1e-10, "{}", entry.name);
            assert!(reconstruct(&s, &fa).unwrap().max_abs_diff(&a) < 1e-10, "{}", entry.name);
        }
        if s.n() <= 12 {
            assert!(associativity_residual(&k) < 1e-10, "{}", entry.name);
        }
    }
}

#[test]
fn kernel_entries_match_trace_formula() {
    let s = livine_scheme(LivineNormalization::Dequantizer);
    let k = star_kernel(&s).unwrap();
    let q = s.quantizers().unwrap();
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                let direct = hs_inner(&s.dequantizers()[a], &(&q[b] * &q[c])).unwrap();
                assert!((k.get(a, b, c) - direct).norm() < 1e-15);
            }
        }
    }
}

#[test]
fn intertwiners() {
    let mu = matrix_units_scheme(2).unwrap();
    let pauli = pauli_scheme(PauliVariant::Hermitian);
    let k = intertwiner(&mu, &pauli, &tol()).unwrap();
    let id = Matrix::identity(4);
    assert!((&k.backward * &k.forward).max_abs_diff(&id) < 1e-12);
    assert!((&k.forward * &k.backward).max_abs_diff(&id) < 1e-12);
    let self_k = intertwiner(&pauli, &pauli, &tol()).unwrap();
    assert!(self_k.forward.max_abs_diff(&id) < 1e-15);

    let mub = mub_qubit_scheme();
    let k = intertwiner(&pauli, &mub, &tol()).unwrap();
    assert_eq!(k.forward.shape(), (6, 4));
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..100 {
        let a = random_operator(2, 2, &mut rng);
        let f = symbol(&pauli, &a).unwrap();
        let g = k.to_target(&f, "mub").unwrap();
        assert!(g.max_abs_diff(&symbol(&mub, &a).unwrap()) < 1e-12);
        assert!(k.to_source(&g, "pauli").unwrap().max_abs_diff(&f) < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_scheme_star_product_is_associative(seed in any::<u64>(), extra in 0usize..3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_operator(4, 4 + extra, &mut rng);
        let ops = (0..u.cols())
            .map(|k| starquant::operator_space::devectorize_rect(&u.column(k), 2, 2).unwrap())
            .collect();
        let s = complete(&Scheme::new(2, ops).unwrap());
        let k = star_kernel(&s).unwrap();
        let scale = k.values().iter().map(|z| z.norm()).fold(1.0, f64::max).powi(2);
        prop_assert!(associativity_residual(&k) < 1e-10 * scale);
    }

    #[test]
    fn cubic_identity_for_random_unitaries(seed in any::<u64>(), n in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let u = random_unitary(n, &mut rng);
        prop_assert!(cubic_unitary_residual(&u, &tol()).unwrap() < 1e-12);
    }
}

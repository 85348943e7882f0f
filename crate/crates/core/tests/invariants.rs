use std::sync::OnceLock;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sic_core::arith;
use sic_core::clifford::{self, SymplecticMatrix};
use sic_core::exec::Exec;
use sic_core::linalg::{self, CVec};
use sic_core::sic::{self, Fiducial, SearchOptions};
use sic_core::wh::{self, DisplacementIndex, TensorSplit};
use sic_core::Complex64;

fn odd_dim() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![3u64, 5, 7, 9, 15])
}

fn fiducial(d: u64) -> &'static Fiducial {
    static CACHE: OnceLock<Vec<Fiducial>> = OnceLock::new();
    let all = CACHE.get_or_init(|| [3u64, 5, 7].iter().map(|&d| sic::search_fiducial(d, &SearchOptions::default()).unwrap()).collect());
    all.iter().find(|f| f.d == d).unwrap()
}

fn vector(d: usize) -> impl Strategy<Value = CVec> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), d)
        .prop_filter("nonzero", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
        .prop_map(|v| CVec::from_iterator(v.len(), v.into_iter().map(|(a, b)| Complex64::new(a, b))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn ladder_keeps_square_free_part(d in 4u64..2000) {
        let next = arith::ladder_next(d).unwrap();
        let (_, a) = arith::squarefree_decompose((d + 1) * (d - 3));
        let (_, b) = arith::squarefree_decompose((next + 1) * (next - 3));
        prop_assert_eq!(a, b);
    }

    #[test]
    fn crt_split_multiplies_back(d in 2u64..100_000) {
        let split = arith::crt_split(d);
        prop_assert_eq!(split.product(), d);
        let atoms = split.atoms();
        for (k, a) in atoms.iter().enumerate() {
            for b in &atoms[k + 1..] {
                prop_assert_eq!(arith::gcd(*a, *b), 1);
            }
        }
    }

    #[test]
    fn tensor_split_is_a_bijection(m1 in prop::sample::select(vec![3u64, 5, 7, 9]), m2 in prop::sample::select(vec![5u64, 7, 11, 13])) {
        prop_assume!(arith::gcd(m1, m2) == 1);
        let split = TensorSplit::new(m1, m2).unwrap();
        let mut seen = vec![false; (m1 * m2) as usize];
        for k in 0..m1 * m2 {
            let pos = split.tensor_position(k);
            prop_assert!(!seen[pos]);
            seen[pos] = true;
        }
        let v = CVec::from_fn((m1 * m2) as usize, |k, _| Complex64::new(k as f64, 1.0));
        prop_assert!(linalg::max_abs_vec(&(split.from_tensor(&split.to_tensor(&v)) - &v)) < 1e-15);
    }

    #[test]
    fn symplectic_form_is_antisymmetric(d in odd_dim(), a in 0u64..225, b in 0u64..225) {
        let p = DisplacementIndex::from_linear((a % (d * d)) as usize, d);
        let q = DisplacementIndex::from_linear((b % (d * d)) as usize, d);
        let pq = wh::symplectic_form(p, q).unwrap();
        let qp = wh::symplectic_form(q, p).unwrap();
        prop_assert_eq!((pq + qp) % d, 0);
        prop_assert_eq!(wh::symplectic_form(p, p).unwrap(), 0);
    }

    #[test]
    fn symplectic_matrices_preserve_the_form(d in odd_dim(), seed in any::<u64>(), a in 0u64..225, b in 0u64..225) {
        let f = SymplecticMatrix::random(d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let p = DisplacementIndex::from_linear((a % (d * d)) as usize, d);
        let q = DisplacementIndex::from_linear((b % (d * d)) as usize, d);
        prop_assert_eq!(wh::symplectic_form(f.apply(p), f.apply(q)).unwrap(), wh::symplectic_form(p, q).unwrap());
        prop_assert!(f.multiply(&f.inverse()).unwrap().is_identity());
    }

    #[test]
    fn weil_representation_is_projective(d in prop::sample::select(vec![3u64, 5, 7]), s1 in any::<u64>(), s2 in any::<u64>()) {
        let f = SymplecticMatrix::random(d, &mut ChaCha8Rng::seed_from_u64(s1)).unwrap();
        let g = SymplecticMatrix::random(d, &mut ChaCha8Rng::seed_from_u64(s2)).unwrap();
        prop_assert!(clifford::representation_residual(&f, &g).unwrap() < 1e-9);
        let u = clifford::weil_representative(&f).unwrap();
        prop_assert!(clifford::cyclotomic_phase_residual(&u.matrix, d) < 1e-9);
    }

    #[test]
    fn potential_respects_welch_bound(v in prop::sample::select(vec![3usize, 5, 7]).prop_flat_map(vector)) {
        let (f, _) = sic::potential_and_gradient(&v);
        prop_assert!(f / v.norm().powi(8) >= sic::potential_minimum(v.len() as u64) - 1e-12);
    }

    #[test]
    fn sic_test_ignores_global_phase(d in prop::sample::select(vec![3u64, 5, 7]), theta in 0.0f64..6.3, scale in 0.1f64..10.0) {
        let f = fiducial(d);
        let rotated = f.vector.map(|z| z * Complex64::from_polar(scale, theta));
        let g = Fiducial::from_slice(d, rotated.as_slice()).unwrap();
        let r = sic::verify_sic(&g, 1e-10);
        prop_assert!(r.is_sic, "deviation {}", r.max_modulus_deviation);
    }

    #[test]
    fn clifford_image_of_a_sic_is_a_sic(d in prop::sample::select(vec![3u64, 5, 7]), seed in any::<u64>(), shift in 0usize..49) {
        let f = fiducial(d);
        let u = clifford::weil_representative(&SymplecticMatrix::random(d, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap()).unwrap();
        let moved = wh::apply_displacement(DisplacementIndex::from_linear(shift % (d * d) as usize, d), &(&u.matrix * &f.vector));
        let g = Fiducial::from_slice(d, moved.as_slice()).unwrap();
        prop_assert!(sic::verify_sic(&g, 1e-10).is_sic);
    }

    #[test]
    fn parallel_and_sequential_agree(n in 0usize..64) {
        let f = |k: usize| (k as f64).sin();
        prop_assert_eq!(Exec::Parallel.map(n, f), Exec::Sequential.map(n, f));
    }
}

#[test]
fn zauner_matrix_has_order_three() {
    for d in (3..=51).step_by(2) {
        assert_eq!(clifford::element_order(&SymplecticMatrix::zauner(d).unwrap()), 3, "d = {d}");
    }
}

#[test]
fn defining_relation_holds_over_all_of_sl2() {
    for d in [3u64, 5] {
        for f in clifford::enumerate_sl2(d).unwrap() {
            let u = clifford::weil_representative(&f).unwrap();
            assert!(clifford::defining_relation_residual(&u.matrix, &f) < 1e-10);
        }
    }
}

#[test]
fn tensor_split_factorizes_displacements() {
    for (m1, m2) in [(3, 5), (5, 3), (3, 7), (7, 5)] {
        assert!(wh::tensor_split_residual(&TensorSplit::new(m1, m2).unwrap()) < 1e-11);
    }
}

mod common;

use common::*;
use ksmagic::quantum::{estimate_xks_with, exact_xks_form, measure, PreparedContext};
use ksmagic::{
    estimate_xks, exact_xks, make_state, run_context, MagicArray, PauliString, Permutation, ShotRecord, StateKind,
    XksForm,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn p(s: &str) -> PauliString {
    PauliString::parse(s).unwrap()
}

fn mermin_peres() -> MagicArray {
    MagicArray::build(2, &Permutation::new(vec![2, 1]).unwrap()).unwrap()
}

#[test]
fn expectation_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for seed in 0..200 {
        let q = rng.random_range(1..=4);
        let op = random_pauli(&mut rng, q);
        let psi = make_state(StateKind::Random(seed), q).unwrap();
        let applied = dense_apply(&dense(&op), psi.amplitudes());
        let oracle: num_complex::Complex64 = psi.amplitudes().iter().zip(&applied).map(|(a, b)| a.conj() * b).sum();
        let got = psi.expectation(&op).unwrap();
        assert!((got - oracle).norm() < 1e-12, "{op}: {got} vs {oracle}");
        if op.is_hermitian() {
            assert!(got.im.abs() < 1e-10);
        }
        let direct = psi.apply(&op).unwrap();
        assert!(direct.amplitudes().iter().zip(&applied).all(|(a, b)| (a - b).norm() < 1e-12));
    }
}

#[test]
fn ghz_yy_expectation() {
    let ghz = make_state(StateKind::Ghz, 2).unwrap();
    let oracle = dense_apply(&dense(&p("YY")), ghz.amplitudes());
    let v: num_complex::Complex64 = ghz.amplitudes().iter().zip(&oracle).map(|(a, b)| a.conj() * b).sum();
    assert!((v.re + 1.0).abs() < 1e-12);
    assert!((ghz.expectation(&p("YY")).unwrap().re + 1.0).abs() < 1e-12);
}

#[test]
fn third_column_product_is_minus_one_on_any_state() {
    let c3 = mermin_peres().col_product(3).unwrap();
    for seed in 0..20 {
        let psi = make_state(StateKind::Random(seed), 2).unwrap();
        assert!((psi.expectation(&c3).unwrap().re + 1.0).abs() < 1e-12);
    }
}

#[test]
fn exact_values_for_both_forms() {
    let a = mermin_peres();
    for seed in 0..100 {
        let psi = make_state(StateKind::Random(seed), 2).unwrap();
        assert!((exact_xks_form(&a, XksForm::TwoQubit, &psi).unwrap() - 6.0).abs() < 1e-9);
        assert!((exact_xks(&a, &psi).unwrap() - 6.0).abs() < 1e-9);
    }
    let rev = MagicArray::build(4, &Permutation::reversal(4).unwrap()).unwrap();
    for seed in 0..20 {
        let psi = make_state(StateKind::Random(seed), 4).unwrap();
        assert!((exact_xks(&rev, &psi).unwrap() - 6.0).abs() < 1e-9);
    }
    let psi3 = make_state(StateKind::Ghz, 3).unwrap();
    assert!(exact_xks(&a, &psi3).is_err());
}

#[test]
fn born_statistics_for_x_on_zero() {
    let zero = make_state(StateKind::Basis(0), 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let n = 10_000;
    let plus = (0..n).filter(|_| measure(&p("X"), &zero, &mut rng).unwrap().0 == 1).count();
    let freq = plus as f64 / n as f64;
    assert!((freq - 0.5).abs() <= 0.01, "{freq}");
}

#[test]
fn commuting_context_product_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for seed in 0..200 {
        let psi = make_state(StateKind::Random(seed), 2).unwrap();
        let r = run_context(&[p("ZI"), p("IX"), p("ZX")], &psi, 0.0, &mut rng).unwrap();
        assert_eq!(r.product, 1);
        assert_eq!(r.outcomes.iter().product::<i8>(), r.product);
    }
}

#[test]
fn sampled_product_tracks_exact_expectation() {
    // context whose product is not a scalar: ZI, IZ on a random state
    let psi = make_state(StateKind::Random(5), 2).unwrap();
    let exact = psi.expectation(&p("ZZ")).unwrap().re;
    let ctx = PreparedContext::new("zz", &[p("ZI"), p("IZ")], 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(43);
    let n = 100_000;
    let sum: i64 = (0..n).map(|_| ctx.shot(&psi, 0.0, &mut rng).unwrap().product as i64).sum();
    let mean = sum as f64 / n as f64;
    let se = ((1.0 - mean * mean) / n as f64).sqrt();
    assert!((mean - exact).abs() <= 3.0 * se, "{mean} vs {exact} (se {se})");
}

#[test]
fn complete_flip_noise_decorrelates_contexts() {
    let a = mermin_peres();
    let psi = make_state(StateKind::Random(1), 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(44);
    let est = estimate_xks(&a, &psi, 20_000, 0.5, &mut rng).unwrap();
    assert!((est.value - 1.0).abs() <= 3.0 * est.standard_error, "{est:?}");
    assert!((est.exact - 6.0).abs() < 1e-9);
}

#[test]
fn shot_stream_is_reproducible_and_serializable() {
    let a = mermin_peres();
    let psi = make_state(StateKind::Random(2), 2).unwrap();
    let collect = |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut shots = Vec::new();
        let est = estimate_xks_with(&a, XksForm::General, &psi, 50, 0.1, &mut rng, &mut |r| {
            shots.push(r.clone());
            Ok(())
        })
        .unwrap();
        (est, shots)
    };
    let (e1, s1) = collect(7);
    let (e2, s2) = collect(7);
    assert_eq!(e1, e2);
    assert_eq!(s1, s2);
    assert_eq!(s1.len(), 50 * 5);
    let line = serde_json::to_string(&s1[0]).unwrap();
    let back: ShotRecord = serde_json::from_str(&line).unwrap();
    assert_eq!(back, s1[0]);
    assert!(line.starts_with("{\"context\":\"R1\""));
}

#[test]
fn odd_q_product_term_is_measured_as_one_operator() {
    let a = MagicArray::build(3, &Permutation::cyclic_shift(3).unwrap()).unwrap();
    let psi = make_state(StateKind::Random(3), 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(45);
    let est = estimate_xks(&a, &psi, 1000, 0.0, &mut rng).unwrap();
    assert_eq!(est.value, 7.0);
    let last = est.contexts.last().unwrap();
    assert_eq!((last.context.as_str(), last.num_cells, last.mean), ("R3*C4", 1, -1.0));
    assert!(est.contexts.iter().all(|c| !c.order_dependent));
}

#[test]
fn estimate_rejects_bad_arguments() {
    let a = mermin_peres();
    let psi = make_state(StateKind::Random(0), 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert!(estimate_xks(&a, &psi, 0, 0.0, &mut rng).is_err());
    assert!(estimate_xks(&a, &psi, 10, 0.7, &mut rng).is_err());
    let psi3 = make_state(StateKind::Random(0), 3).unwrap();
    assert!(estimate_xks(&a, &psi3, 10, 0.0, &mut rng).is_err());
}

//! Decomposition and measure invariants over random states.

use algoprob::measures::{
    algorithmic_measure, born_measure, copy_count_measure, flat_measure, total_variation,
    ContinuerSet, Evidence,
};
use algoprob::statevec::{
    check_orthonormal, decompose, inner_product, random_completion, StateVector, ORTHONORMAL_TOL,
};
use algoprob::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_state(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    StateVector::new(
        (0..n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect(),
    )
    .unwrap()
    .normalized()
    .unwrap()
}

fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("m{i}")).collect()
}

/// Random orthonormal set of `k` vectors in dimension `n`.
fn random_continuers(rng: &mut ChaCha8Rng, n: usize, k: usize) -> Vec<StateVector> {
    let full = random_completion(&[], n, rng.random()).unwrap();
    full.into_iter().take(k).collect()
}

#[test]
fn reconstruction_holds_for_1000_random_decompositions() {
    let mut rng = ChaCha8Rng::seed_from_u64(2026);
    for _ in 0..1000 {
        let n = rng.random_range(2..=64);
        let k = rng.random_range(1..=n);
        let psi = random_state(&mut rng, n);
        let cont = random_continuers(&mut rng, n, k);
        let d = decompose(&psi, &cont).unwrap();
        let err = d.reconstruct(n).unwrap().sub(&psi).unwrap().norm();
        assert!(err <= 1e-9, "n={n} k={k} err={err}");
        assert!((d.total_weight() - 1.0).abs() < 1e-9);
        assert!(d.dead_coefficient.im == 0.0 && d.dead_coefficient.re >= 0.0);
        if k == n {
            assert!(d.dead_coefficient.re < 1e-9);
        }
    }
}

#[test]
fn completions_are_orthonormal_and_extend_input() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..50 {
        let n = rng.random_range(1..=40);
        let k = rng.random_range(0..=n);
        let part = random_continuers(&mut rng, n, k);
        let seed = rng.random();
        let full = random_completion(&part, n, seed).unwrap();
        assert_eq!(full.len(), n);
        assert_eq!(&full[..k], &part[..]);
        check_orthonormal(&full, ORTHONORMAL_TOL).unwrap();
        assert_eq!(full, random_completion(&part, n, seed).unwrap());
    }
}

#[test]
fn born_depends_only_on_branch_overlaps_across_completions() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for _ in 0..100 {
        let n = rng.random_range(2..=32);
        let k = rng.random_range(1..n);
        let psi = random_state(&mut rng, n);
        let cont = random_continuers(&mut rng, n, k);
        let expected: Vec<f64> = cont
            .iter()
            .map(|c| inner_product(c, &psi).unwrap().norm_sqr())
            .collect();
        for seed in 0..10 {
            // Embed the same k continuers in a different full basis.
            let full = random_completion(&cont, n, seed).unwrap();
            let d = decompose(&psi, &full).unwrap();
            let born = born_measure(
                &ContinuerSet::new(labels(n), Evidence::Amplitudes(d.coefficients)).unwrap(),
            )
            .unwrap();
            for (p, e) in born.probabilities.iter().zip(&expected) {
                assert!((p - e).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn algorithmic_from_amplitude_bits_equals_born() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..200 {
        let n = rng.random_range(2..=16);
        let amps: Vec<Complex64> = (0..n)
            .map(|_| {
                Complex64::from_polar(
                    rng.random_range(0.01..1.0),
                    rng.random_range(0.0..std::f64::consts::TAU),
                )
            })
            .collect();
        let bits: Vec<f64> = amps.iter().map(|a| -a.norm_sqr().log2()).collect();
        let born = born_measure(&ContinuerSet::new(labels(n), Evidence::Amplitudes(amps)).unwrap())
            .unwrap();
        let alg = algorithmic_measure(
            &ContinuerSet::new(labels(n), Evidence::EntropyBits(bits)).unwrap(),
        )
        .unwrap();
        for (a, b) in alg.probabilities.iter().zip(&born.probabilities) {
            assert!((a - b).abs() < 1e-12);
        }
    }
}

#[test]
fn large_entropy_differences_do_not_underflow() {
    let set = ContinuerSet::new(
        labels(3),
        Evidence::EntropyBits(vec![5000.0, 5001.0, 9000.0]),
    )
    .unwrap();
    let p = algorithmic_measure(&set).unwrap().probabilities;
    assert!((p[0] - 2.0 / 3.0).abs() < 1e-15);
    assert!((p[1] - 1.0 / 3.0).abs() < 1e-15);
    assert_eq!(p[2], 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn algorithmic_branch_dependence(
        bits in prop::collection::vec(0.0f64..200.0, 2..12),
        j in any::<prop::sample::Index>(),
        bump in -50.0f64..50.0,
    ) {
        let n = bits.len();
        let j = j.index(n);
        let before = algorithmic_measure(&ContinuerSet::new(labels(n), Evidence::EntropyBits(bits.clone())).unwrap()).unwrap();
        let mut perturbed = bits.clone();
        perturbed[j] = (perturbed[j] + bump).max(0.0);
        let after = algorithmic_measure(&ContinuerSet::new(labels(n), Evidence::EntropyBits(perturbed)).unwrap()).unwrap();
        for i in (0..n).filter(|&i| i != j) {
            prop_assert_eq!(before.log_weights[i], after.log_weights[i]);
        }
    }

    #[test]
    fn algorithmic_shift_invariance(
        bits in prop::collection::vec(0.0f64..100.0, 1..12),
        shift in 0.0f64..500.0,
    ) {
        let n = bits.len();
        let base = algorithmic_measure(&ContinuerSet::new(labels(n), Evidence::EntropyBits(bits.clone())).unwrap()).unwrap();
        let shifted = algorithmic_measure(&ContinuerSet::new(
            labels(n),
            Evidence::EntropyBits(bits.iter().map(|b| b + shift).collect()),
        ).unwrap()).unwrap();
        for (a, b) in base.probabilities.iter().zip(&shifted.probabilities) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn equal_entropies_give_uniform(h in 0.0f64..3000.0, n in 1usize..50) {
        let p = algorithmic_measure(&ContinuerSet::new(labels(n), Evidence::EntropyBits(vec![h; n])).unwrap()).unwrap();
        for x in p.probabilities {
            prop_assert_eq!(x, 1.0 / n as f64);
        }
    }

    #[test]
    fn measures_are_distributions(counts in prop::collection::vec(1i64..1000, 1..20)) {
        let n = counts.len();
        let set = ContinuerSet::new(labels(n), Evidence::Counts(counts.clone())).unwrap();
        let copy = copy_count_measure(&set).unwrap();
        let flat = flat_measure(&set).unwrap();
        prop_assert!((copy.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert!((flat.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let tv = total_variation(&copy.probabilities, &flat.probabilities).unwrap();
        prop_assert!((0.0..=1.0).contains(&tv));
        if counts.iter().all(|&c| c == counts[0]) {
            prop_assert!(tv < 1e-12);
        }
    }
}

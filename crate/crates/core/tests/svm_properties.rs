use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use ecoc_core::svm::{train, KernelSpec, SvmConfig};

fn problem(seed: u64, n: usize, overlap: f64) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut draw = |shift: f64| -> Vec<f64> { vec![shift + rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)] };
    let pos = (0..n).map(|_| draw(1.0 - overlap)).collect();
    let neg = (0..n).map(|_| draw(overlap - 1.0)).collect();
    (pos, neg)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn dual_feasible(seed: u64, n in 3usize..25, overlap in 0.0f64..1.5, c in 0.1f64..10.0, rbf: bool) {
        let (pos, neg) = problem(seed, n, overlap);
        let kernel = if rbf { KernelSpec::Rbf { gamma: 0.7 } } else { KernelSpec::Linear };
        let cfg = SvmConfig { c, kernel, ..SvmConfig::default() };
        let model = train(&pos, &neg, &cfg).unwrap();
        prop_assert!(model.converged);
        let sum: f64 = model.dual_coefs.iter().sum();
        prop_assert!(sum.abs() <= 1e-6);
        for &coef in &model.dual_coefs {
            prop_assert!(coef.abs() <= c + 1e-12 && coef != 0.0);
        }
    }

    #[test]
    fn decision_is_invariant_to_cache_size(seed: u64) {
        let (pos, neg) = problem(seed, 20, 0.8);
        let small = SvmConfig { cache_bytes: 1, ..SvmConfig::default() };
        let a = train(&pos, &neg, &small).unwrap();
        let b = train(&pos, &neg, &SvmConfig::default()).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn separable_problems_train_perfectly() {
    for seed in 0..10 {
        let (pos, neg) = problem(seed, 40, -1.0);
        let model = train(&pos, &neg, &SvmConfig { kernel: KernelSpec::Linear, ..SvmConfig::default() }).unwrap();
        assert!(pos.iter().all(|p| model.predict(p).unwrap() == 1));
        assert!(neg.iter().all(|p| model.predict(p).unwrap() == -1));
    }
}

use proptest::prelude::*;

use ecoc_core::coding::{
    build_matching_code, dense_random, one_vs_all, one_vs_one, parse_matrix, sparse_random, Strategy, WeightOrientation,
};

#[test]
fn fixed_strategies_keep_their_invariants() {
    for n in 3..=16 {
        for strategy in [Strategy::Ovo, Strategy::Ova, Strategy::Dense, Strategy::Sparse] {
            let m = strategy.build_fixed(n, 5).unwrap();
            assert_eq!(m.n_columns(), strategy.column_count(n), "{strategy} N={n}");
            assert_eq!(m.n_classes(), n);
            assert!(m.has_distinct_rows(), "{strategy} N={n}");
            if !strategy.is_random() || n >= 6 {
                m.check_invariants().unwrap();
            }
            assert_eq!(parse_matrix(&m.to_text()).unwrap(), m);
        }
    }
}

#[test]
fn ova_two_classes_negated_pair() {
    let m = one_vs_all(2).unwrap();
    assert_eq!(m.rows(), [vec![1, -1], vec![-1, 1]]);
}

#[test]
fn random_codes_are_seeded() {
    assert_eq!(dense_random(9, 3).unwrap(), dense_random(9, 3).unwrap());
    assert_ne!(dense_random(9, 3).unwrap(), dense_random(9, 4).unwrap());
    let big = sparse_random(50, 1).unwrap();
    let zeros = big.rows().iter().flatten().filter(|&&v| v == 0).count();
    let share = zeros as f64 / (big.n_classes() * big.n_columns()) as f64;
    assert!((share - 0.5).abs() < 0.05, "{share}");
}

#[test]
fn ovo_pairs_in_lexicographic_order() {
    let m = one_vs_one(4).unwrap();
    let pairs: Vec<_> = m.columns().iter().map(|c| (c.positive[0], c.negative[0])).collect();
    assert_eq!(pairs, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matching_code_is_a_merge_tree(n in 2usize..20, salt in 0u64..1000) {
        let code = build_matching_code(n, WeightOrientation::Perf, |a, b| {
            let h = a.iter().chain(b).fold(salt, |acc, &c| acc.wrapping_mul(31).wrapping_add(c as u64 + 1));
            Ok((h % 101) as f64 / 100.0)
        }).unwrap();
        let m = &code.matrix;
        prop_assert_eq!(m.n_columns(), n - 1);
        m.check_invariants().unwrap();
        // each class pair is split by exactly one column: the merge of their subsets
        for a in 0..n {
            for b in a + 1..n {
                let split = (0..m.n_columns()).filter(|&j| m.cell(a, j) * m.cell(b, j) == -1).count();
                prop_assert_eq!(split, 1);
            }
        }
        // the root column covers every class
        let last = m.column(n - 2);
        prop_assert_eq!(last.positive.len() + last.negative.len(), n);
        prop_assert!(last.positive.contains(&0));
    }
}

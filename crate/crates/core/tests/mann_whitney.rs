use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tiepe::mann_whitney_u;
use tiepe::stats::normal_p_value;

/// U of `a`: pairs (x in a, y in b) with x > y.
fn pair_count(a: &[f64], b: &[f64]) -> f64 {
    a.iter().map(|x| b.iter().filter(|y| x > *y).count() as f64).sum()
}

/// Exact two-sided p-value by listing every split of the pooled sample.
fn enumeration_oracle(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let centre = (a.len() * b.len()) as f64 / 2.0;
    let observed = (pair_count(a, b) - centre).abs();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != a.len() {
            continue;
        }
        let (ga, gb): (Vec<f64>, Vec<f64>) = {
            let mut ga = Vec::new();
            let mut gb = Vec::new();
            for (i, v) in pooled.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    ga.push(*v)
                } else {
                    gb.push(*v)
                }
            }
            (ga, gb)
        };
        total += 1;
        if (pair_count(&ga, &gb) - centre).abs() >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

#[test]
fn exact_p_matches_enumeration_for_small_samples() {
    for n in 2..=10usize {
        for mask in 1u32..(1 << n) - 1 {
            let (a, b): (Vec<f64>, Vec<f64>) = (1..=n).map(|v| v as f64).partition(|&v| mask >> (v as usize - 1) & 1 == 1);
            let r = mann_whitney_u(&a, &b).unwrap();
            assert!(r.exact);
            assert_eq!(r.u, pair_count(&a, &b));
            let oracle = enumeration_oracle(&a, &b);
            assert!((r.p_value - oracle).abs() < 1e-12, "{a:?} {b:?}: {} vs {oracle}", r.p_value);
        }
    }
}

#[test]
fn separated_triples() {
    let r = mann_whitney_u(&[1., 2., 3.], &[4., 5., 6.]).unwrap();
    assert_eq!(r.u, 0.0);
    assert!((r.p_value - 0.1).abs() < 1e-15);
}

fn permutation_p(a: &[f64], b: &[f64], resamples: usize, seed: u64) -> f64 {
    let mut pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let centre = (a.len() * b.len()) as f64 / 2.0;
    let observed = (pair_count(a, b) - centre).abs();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0;
    for _ in 0..resamples {
        pooled.shuffle(&mut rng);
        let (x, y) = pooled.split_at(a.len());
        if (pair_count(x, y) - centre).abs() >= observed {
            hits += 1;
        }
    }
    (hits as f64 + 1.0) / (resamples as f64 + 1.0)
}

#[test]
fn fifteen_per_group_against_permutation_test() {
    // disjoint supports
    let low: Vec<f64> = (0..15).map(|i| 1.0 + 0.01 * i as f64).collect();
    let high: Vec<f64> = (0..15).map(|i| 2.0 + 0.01 * i as f64).collect();
    let r = mann_whitney_u(&low, &high).unwrap();
    assert!(r.p_value < 0.001);
    assert!(permutation_p(&low, &high, 100_000, 1) < 0.001);

    // overlapping groups: the normal approximation tracks the permutation p
    let a: Vec<f64> = (0..15).map(|i| (i * 7 % 15) as f64 + 0.3).collect();
    let b: Vec<f64> = (0..15).map(|i| (i * 4 % 15) as f64 + 3.1).collect();
    let r = mann_whitney_u(&a, &b).unwrap();
    let perm = permutation_p(&a, &b, 100_000, 2);
    assert!((r.p_value - perm).abs() < 0.01, "{} vs {perm}", r.p_value);
}

#[test]
fn normal_approximation_is_loose_for_tiny_groups() {
    // n1 = n2 = 2, U = 0: exact p = 2/6, the normal tail is 0.245
    let (a, b) = ([1., 2.], [3., 4.]);
    let exact = mann_whitney_u(&a, &b).unwrap().p_value;
    assert!((exact - 1.0 / 3.0).abs() < 1e-12);
    assert!((exact - normal_p_value(&a, &b).unwrap()).abs() > 0.05);
}

fn distinct_groups() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (3usize..=6, 3usize..=6).prop_flat_map(|(n1, n2)| {
        Just((1..=n1 + n2).map(|v| v as f64).collect::<Vec<_>>()).prop_shuffle().prop_map(move |v| {
            let (a, b) = v.split_at(n1);
            (a.to_vec(), b.to_vec())
        })
    })
    .prop_filter("n1 + n2 <= 12", |(a, b)| a.len() + b.len() <= 12)
}

fn groups() -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    (
        prop::collection::vec((0i32..40).prop_map(f64::from), 1..25),
        prop::collection::vec((0i32..40).prop_map(f64::from), 1..25),
    )
}

proptest! {
    #[test]
    fn swapping_groups_mirrors_u((a, b) in groups()) {
        let ab = mann_whitney_u(&a, &b).unwrap();
        let ba = mann_whitney_u(&b, &a).unwrap();
        prop_assert!((ab.u + ba.u - (a.len() * b.len()) as f64).abs() < 1e-9);
        prop_assert!((ab.p_value - ba.p_value).abs() < 1e-12);
        prop_assert!(ab.u >= 0.0 && ab.u <= (a.len() * b.len()) as f64);
        prop_assert!((0.0..=1.0).contains(&ab.p_value));
    }

    #[test]
    fn positive_scaling_changes_nothing((a, b) in groups(), k in 0.01f64..100.0) {
        let r = mann_whitney_u(&a, &b).unwrap();
        let sa: Vec<f64> = a.iter().map(|v| v * k).collect();
        let sb: Vec<f64> = b.iter().map(|v| v * k).collect();
        let s = mann_whitney_u(&sa, &sb).unwrap();
        prop_assert_eq!(r.u, s.u);
        prop_assert!((r.p_value - s.p_value).abs() < 1e-12);
    }

    #[test]
    fn large_shift_reaches_the_smallest_p((a, b) in groups()) {
        let shifted: Vec<f64> = b.iter().map(|v| v + 1000.0).collect();
        let r = mann_whitney_u(&a, &shifted).unwrap();
        prop_assert_eq!(r.u, 0.0);
        prop_assert!(r.p_value <= mann_whitney_u(&a, &b).unwrap().p_value + 1e-12);
    }

    #[test]
    fn normal_tracks_exact_from_three_per_group((a, b) in distinct_groups()) {
        let r = mann_whitney_u(&a, &b).unwrap();
        prop_assert!(r.exact);
        prop_assert!((r.p_value - normal_p_value(&a, &b).unwrap()).abs() <= 0.05);
    }
}

use mlcc::rng::RandomSource;
use mlcc::stats::{
    friedman_mean_ranks, multi_problem_wilcoxon, single_problem_compare, wilcoxon_signed_rank,
    wilcoxon_signed_rank_with, PValueMethod, Sign, SignSummary, StatsError,
};

fn brute_force_p(diffs: &[f64]) -> (f64, f64, f64) {
    let d: Vec<f64> = diffs.iter().copied().filter(|x| *x != 0.0).collect();
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let rank: Vec<f64> = abs
        .iter()
        .map(|a| {
            let below = abs.iter().filter(|b| *b < a).count() as f64;
            let equal = abs.iter().filter(|b| *b == a).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let total: f64 = rank.iter().sum();
    let r_plus: f64 = rank.iter().zip(&d).filter(|(_, x)| **x > 0.0).map(|(r, _)| r).sum();
    let observed = (r_plus - total / 2.0).abs();
    let n = d.len();
    let mut extreme = 0u64;
    for mask in 0u32..(1 << n) {
        let s: f64 = (0..n).filter(|k| mask >> k & 1 == 1).map(|k| rank[k]).sum();
        if (s - total / 2.0).abs() >= observed - 1e-9 {
            extreme += 1;
        }
    }
    (r_plus, total - r_plus, extreme as f64 / (1u64 << n) as f64)
}

fn random_diffs(rng: &mut RandomSource, n: usize) -> Vec<f64> {
    // Small integer grid so ties and zeros show up often.
    (0..n).map(|_| (rng.below(9) as f64 - 4.0) * 0.5).collect()
}

#[test]
fn exact_path_matches_enumeration() {
    let mut rng = RandomSource::new(20);
    let mut checked = 0;
    while checked < 50 {
        let n = 1 + rng.below(12);
        let diffs = random_diffs(&mut rng, n);
        let Ok(w) = wilcoxon_signed_rank(&diffs, 0.05) else {
            continue;
        };
        let (rp, rm, p) = brute_force_p(&diffs);
        assert_eq!(w.method, PValueMethod::Exact);
        assert_eq!((w.r_plus, w.r_minus), (rp, rm));
        assert!((w.p_value - p).abs() < 1e-12, "{diffs:?}: {} vs {p}", w.p_value);
        checked += 1;
    }
}

#[test]
fn rank_sums_are_conserved() {
    let mut rng = RandomSource::new(21);
    for _ in 0..1000 {
        let n = 1 + rng.below(40);
        let diffs: Vec<f64> = (0..n).map(|_| rng.normal(0.0, 1.0).round()).collect();
        if let Ok(w) = wilcoxon_signed_rank(&diffs, 0.05) {
            let m = w.n as f64;
            assert_eq!(w.r_plus + w.r_minus, m * (m + 1.0) / 2.0);
        }
    }
}

#[test]
fn normal_path_tracks_exact_at_twenty() {
    let mut rng = RandomSource::new(22);
    for _ in 0..200 {
        let diffs: Vec<f64> = (0..20).map(|_| rng.normal(0.3, 1.0)).collect();
        let exact = wilcoxon_signed_rank_with(&diffs, 0.05, PValueMethod::Exact).unwrap();
        let normal = wilcoxon_signed_rank_with(&diffs, 0.05, PValueMethod::Normal).unwrap();
        assert!((exact.p_value - normal.p_value).abs() < 0.02);
    }
    let big: Vec<f64> = (1..=30).map(f64::from).collect();
    assert_eq!(wilcoxon_signed_rank(&big, 0.05).unwrap().method, PValueMethod::Normal);
}

#[test]
fn all_zero_differences_are_rejected() {
    assert_eq!(wilcoxon_signed_rank(&[0.0; 5], 0.05), Err(StatsError::AllZero));
    assert_eq!(single_problem_compare(&[1.0; 5], &[1.0; 5], 0.05), Ok(Sign::Equal));
}

#[test]
fn dominated_algorithm_gets_minus_and_zero_r_minus() {
    let a: Vec<f64> = (0..25).map(|k| k as f64).collect();
    let b: Vec<f64> = a.iter().map(|x| x + 10.0).collect();
    assert_eq!(single_problem_compare(&a, &b, 0.05), Ok(Sign::Minus));
    assert_eq!(single_problem_compare(&b, &a, 0.05), Ok(Sign::Plus));
    let w = multi_problem_wilcoxon(&a[..12], &b[..12], 0.05).unwrap();
    assert_eq!(w.r_minus, 0.0);
    assert!(w.r_plus > 0.0);
}

#[test]
fn sign_summary_p_minus_n() {
    let signs = std::iter::repeat_n(Sign::Minus, 15)
        .chain(std::iter::repeat_n(Sign::Equal, 10))
        .chain(std::iter::repeat_n(Sign::Plus, 5));
    let s: SignSummary = signs.collect();
    assert_eq!((s.minus, s.equal, s.plus, s.p_n), (15, 10, 5, 10));
    assert_eq!(s.to_string(), "15/10/5 (10)");
}

#[test]
fn friedman_hand_ranked_fixture() {
    // Row ranks by hand: (1,2,3), (2.5,1,2.5), (3,1,2).
    let errors = vec![
        vec![0.1, 0.2, 0.3],
        vec![5.0, 1.0, 5.0],
        vec![9.0, 2.0, 4.0],
    ];
    let ranks = friedman_mean_ranks(&errors).unwrap();
    let expected = [6.5 / 3.0, 4.0 / 3.0, 7.5 / 3.0];
    for (r, e) in ranks.iter().zip(expected) {
        assert!((r - e).abs() < 1e-12);
    }
    assert!((ranks.iter().sum::<f64>() - 6.0).abs() < 1e-12);
}

#[test]
fn identical_columns_share_ranks() {
    let errors = vec![vec![1.0, 1.0], vec![3.0, 3.0]];
    assert_eq!(friedman_mean_ranks(&errors).unwrap(), vec![1.5, 1.5]);
}

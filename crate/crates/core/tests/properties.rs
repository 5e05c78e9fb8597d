//! Property tests for the spec-level invariants that hold on all inputs,
//! not just the published examples.

use proptest::prelude::*;

use snooptest::distributions::{std_normal_cdf, std_normal_quantile};
use snooptest::lottery::{
    counts_from_history, parse_draw_csv, simulate_history, write_draw_csv, CountVector, Game,
    DrawHistory, LotteryConfig, SampleKind,
};
use snooptest::normality::{moment_stats, NormalityStats};
use snooptest::snoopsim::EmpiricalDistribution;
use snooptest::uniformity::{pearson_test, z_test_number, NullModel, TailSide};
use snooptest::RngState;

fn null_model() -> impl Strategy<Value = NullModel> {
    (8u32..80, 1u64..1_000_000).prop_flat_map(|(v, n)| {
        (1u32..v).prop_map(move |k| NullModel::new(v, k, n).unwrap())
    })
}

proptest! {
    // Z^(K) = sqrt((V-1)/(V-K)) * Z_iid and the matching variance shrink,
    // for every admissible input.
    #[test]
    fn z_scaling_identity(model in null_model(), frac in 0.0f64..=1.0) {
        let count = (frac * model.n as f64) as u64;
        let r = z_test_number(count, &model, TailSide::Left).unwrap();
        let v = f64::from(model.pool_size);
        let k = f64::from(model.draw_size);
        let factor = ((v - 1.0) / (v - k)).sqrt();
        let expect = factor * r.statistic_iid;
        prop_assert!((r.statistic_corrected - expect).abs() <= 1e-12 * expect.abs().max(1.0));
        let var_expect = (v - k) / (v - 1.0) * r.sigma_iid * r.sigma_iid;
        prop_assert!((r.sigma_k * r.sigma_k - var_expect).abs() <= 1e-12 * var_expect);
        prop_assert!((0.0..=1.0).contains(&r.p_value));
    }

    // K = 1 is the i.i.d. case: both corrections are the identity.
    #[test]
    fn k1_reduces_to_iid(v in 3u32..60, n in 1u64..100_000, frac in 0.0f64..=1.0) {
        let model = NullModel::new(v, 1, n).unwrap();
        let count = (frac * n as f64) as u64;
        let r = z_test_number(count, &model, TailSide::Left).unwrap();
        prop_assert_eq!(r.statistic_iid, r.statistic_corrected);
        prop_assert_eq!(r.sigma_iid, r.sigma_k);
    }

    // Relabeling the numbers must not move the Pearson statistic.
    #[test]
    fn pearson_permutation_invariance(
        counts in prop::collection::vec(0u64..500, 8..40),
        shuffle_seed in 0u64..1000,
    ) {
        let total: u64 = counts.iter().sum();
        prop_assume!(total > 0);
        let v = counts.len() as u32;
        let model = NullModel::new(v, 2, total).unwrap();
        let base = pearson_test(&CountVector::from_counts(counts.clone()), &model).unwrap();

        let mut permuted = counts;
        let mut stream = RngState::new(shuffle_seed).stream();
        snooptest::rng::partial_shuffle(&mut permuted, v as usize, &mut stream);
        let shuffled = pearson_test(&CountVector::from_counts(permuted), &model).unwrap();
        let tol = 1e-10 * base.statistic_iid.max(1.0);
        prop_assert!((base.statistic_iid - shuffled.statistic_iid).abs() <= tol);
        prop_assert!((base.statistic_corrected - shuffled.statistic_corrected).abs() <= tol);
    }

    // Sample II counts decompose exactly into samples I and III.
    #[test]
    fn sample_counts_decompose(
        games in 1u64..60,
        frac in 0.0f64..=1.0,
        seed in 0u64..10_000,
    ) {
        let cfg = LotteryConfig::new(49, 6, games).unwrap();
        let h = simulate_history(cfg, frac, RngState::new(seed)).unwrap();
        let i = counts_from_history(&h, SampleKind::MainOnly).unwrap();
        let ii = counts_from_history(&h, SampleKind::WithAdditional).unwrap();
        match counts_from_history(&h, SampleKind::AdditionalOnly) {
            Ok(iii) => {
                for m in 1..=49 {
                    prop_assert_eq!(ii.count(m), i.count(m) + iii.count(m));
                }
            }
            Err(_) => {
                for m in 1..=49 {
                    prop_assert_eq!(ii.count(m), i.count(m));
                }
            }
        }
    }

    // The five statistics derived from any (skew, kurt) pair satisfy the
    // additivity and dominance identities exactly.
    #[test]
    fn normality_statistic_identities(
        n in 4usize..1_000_000,
        skew in -5.0f64..5.0,
        kurt in 0.0f64..50.0,
    ) {
        let s = NormalityStats::from_moments(n, skew, kurt);
        prop_assert!((s.jb - (s.gamma1_sq + s.gamma2_sq)).abs() <= 1e-12 * s.jb.max(1.0));
        prop_assert_eq!(s.gamma_max_sq, s.gamma1_sq.max(s.gamma2_sq));
        prop_assert_eq!(s.gamma_min_sq, s.gamma1_sq.min(s.gamma2_sq));
        prop_assert!(s.gamma_min_sq <= s.jb / 2.0 + 1e-15);
        prop_assert!(s.jb / 2.0 <= s.gamma_max_sq + 1e-15);
    }

    // Affine maps with any nonzero slope leave all five statistics in
    // place (squares kill the sign of the slope).
    #[test]
    fn normality_statistics_affine_invariant(
        seed in 0u64..10_000,
        a in prop::sample::select(vec![-25.0, -1.5, -0.01, 0.02, 0.9, 40.0]),
        b in -100.0f64..100.0,
    ) {
        let mut stream = RngState::new(seed).stream();
        let x: Vec<f64> = (0..300).map(|_| stream.next_gamma(2.0)).collect();
        let mx = moment_stats(&x).unwrap();
        let sx = NormalityStats::from_moments(mx.n, mx.skew, mx.kurt);
        let y: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        let my = moment_stats(&y).unwrap();
        let sy = NormalityStats::from_moments(my.n, my.skew, my.kurt);
        for (p, q) in [
            (sx.gamma1_sq, sy.gamma1_sq),
            (sx.gamma2_sq, sy.gamma2_sq),
            (sx.jb, sy.jb),
            (sx.gamma_max_sq, sy.gamma_max_sq),
            (sx.gamma_min_sq, sy.gamma_min_sq),
        ] {
            prop_assert!((p - q).abs() <= 1e-9 * p.abs().max(1.0), "{} vs {}", p, q);
        }
    }

    // quantile is the generalized inverse of the ECDF.
    #[test]
    fn ecdf_quantile_consistency(
        values in prop::collection::vec(-1e6f64..1e6, 1..200),
        p in 0.001f64..=1.0,
    ) {
        let d = EmpiricalDistribution::new(values).unwrap();
        let q = d.quantile(p).unwrap();
        prop_assert!(d.ecdf(q) >= p);
        // No smaller sample value reaches p.
        let idx = d.values().partition_point(|v| *v < q);
        if idx > 0 {
            prop_assert!(d.ecdf(d.values()[idx - 1]) < p);
        }
    }

    // cdf(quantile(p)) = p on the central range, and the symmetry
    // identity holds everywhere.
    #[test]
    fn normal_cdf_identities(p in 0.001f64..0.999, z in -37.0f64..37.0) {
        let x = std_normal_quantile(p).unwrap();
        prop_assert!((std_normal_cdf(x).unwrap() - p).abs() < 1e-9);
        let s = std_normal_cdf(z).unwrap() + std_normal_cdf(-z).unwrap();
        prop_assert!((s - 1.0).abs() < 1e-12);
    }

    // Writing and re-parsing a history is the identity, and the written
    // form is canonical.
    #[test]
    fn draw_csv_round_trip(
        raw_games in prop::collection::vec(
            (prop::sample::subsequence((1u32..=49).collect::<Vec<_>>(), 7).prop_shuffle(), any::<bool>()),
            1..25,
        ),
    ) {
        let games: Vec<Game> = raw_games
            .iter()
            .map(|(nums, with_add)| {
                let main = nums[..6].to_vec();
                let add = with_add.then(|| nums[6]);
                Game::new(main, add, 49).unwrap()
            })
            .collect();
        let dates: Vec<String> = (0..games.len())
            .map(|i| format!("19{:02}-01-{:02}", 55 + i / 28, (i % 28) + 1))
            .collect();
        let history = DrawHistory::new(49, 6, games, dates).unwrap();
        let text = write_draw_csv(&history);
        let parsed = parse_draw_csv(&text, 49).unwrap();
        prop_assert_eq!(&parsed, &history);
        prop_assert_eq!(write_draw_csv(&parsed), text);
    }
}

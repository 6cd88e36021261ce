//! Property tests for the numeric invariants.

use proptest::prelude::*;

use gi_core::chess::pgn::format_eval_value;
use gi_core::metrics::{game_intelligence, generalized_gi, gpl, rgi_percentile, MovePair};
use gi_core::reward::{expected_value, OutcomeDistribution, RewardScheme};
use gi_core::stats::u_statistic;
use gi_core::wdl::{wdl_decompose, CentipawnEval, DrawModel, Perspective};

fn chess() -> RewardScheme {
    RewardScheme::chess()
}

prop_compose! {
    fn arb_dist()(raw in prop::collection::vec(1e-6..1.0f64, 3)) -> OutcomeDistribution {
        let sum: f64 = raw.iter().sum();
        OutcomeDistribution::validate(raw.into_iter().map(|x| x / sum).collect()).unwrap()
    }
}

proptest! {
    #[test]
    fn ev_is_linear_in_mixtures(p in arb_dist(), q in arb_dist(), alpha in 0.0..=1.0f64) {
        let scheme = chess();
        let mixed = p.mix(&q, alpha);
        let lhs = expected_value(&mixed, &scheme).unwrap();
        let rhs = alpha * expected_value(&p, &scheme).unwrap()
            + (1.0 - alpha) * expected_value(&q, &scheme).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn ev_stays_in_value_range(d in arb_dist()) {
        let scheme = chess();
        let ev = expected_value(&d, &scheme).unwrap();
        prop_assert!(ev >= scheme.min_value() - 1e-12 && ev <= scheme.max_value() + 1e-12);
    }

    #[test]
    fn gpl_is_permutation_invariant(
        evs in prop::collection::vec((0.0..=1.0f64, 0.0..=1.0f64), 1..20),
        seed in any::<u64>(),
    ) {
        let scheme = chess();
        let pairs: Vec<MovePair> = evs
            .iter()
            .enumerate()
            .map(|(i, &(b, p))| MovePair {
                best_eval: OutcomeDistribution::validate(vec![b, 0.0, 1.0 - b]).unwrap(),
                played_eval: OutcomeDistribution::validate(vec![p, 0.0, 1.0 - p]).unwrap(),
                ply_index: i + 1,
            })
            .collect();
        // a cheap deterministic shuffle
        let mut shuffled = pairs.clone();
        let n = shuffled.len();
        for i in 0..n {
            let j = ((seed as usize).wrapping_mul(31).wrapping_add(i * 17)) % n;
            shuffled.swap(i, j);
        }
        let a = gpl(&pairs, &scheme).unwrap();
        let b = gpl(&shuffled, &scheme).unwrap();
        prop_assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn ggi_with_unit_weights_is_gi(reward in 0.0..=1.0f64, gpl_value in -2.0..2.0f64) {
        prop_assert_eq!(
            generalized_gi(1.0, 1.0, reward, gpl_value),
            game_intelligence(reward, gpl_value)
        );
    }

    #[test]
    fn rgi_percentile_bounds(values in prop::collection::vec(-10.0..10.0f64, 2..30), index in 0usize..30) {
        let index = index % values.len();
        let m = values.len() as f64;
        let p = rgi_percentile(&values, index).unwrap();
        prop_assert!(p >= 0.0);
        prop_assert!(p <= 100.0 * (m - 1.0) / m + 1e-12);
    }

    #[test]
    fn u_statistics_sum_to_product(
        a in prop::collection::vec(-5.0..5.0f64, 1..15),
        b in prop::collection::vec(-5.0..5.0f64, 1..15),
    ) {
        let ua = u_statistic(&a, &b);
        let ub = u_statistic(&b, &a);
        prop_assert_eq!(ua + ub, (a.len() * b.len()) as f64);
    }

    #[test]
    fn decompose_is_always_on_the_simplex(score in 0.0..=1.0f64, c in -2000.0..2000.0f64) {
        let t = wdl_decompose(score, c, DrawModel::default());
        prop_assert!(t.win >= 0.0 && t.draw >= 0.0 && t.loss >= 0.0);
        prop_assert!((t.win + t.draw + t.loss - 1.0).abs() < 1e-9);
    }

    #[test]
    fn decompose_reconstructs_unclamped_scores(c in -1400.0..1400.0f64) {
        // scores generated by the engine curve never clamp in-range
        let score = 1.0 / (1.0 + (-0.00368208 * c).exp());
        let t = wdl_decompose(score, c, DrawModel::default());
        prop_assert!((t.win + 0.5 * t.draw - score).abs() < 1e-9);
    }

    #[test]
    fn eval_comment_format_round_trips(cp in -1500i32..=1500) {
        let eval = CentipawnEval::cp(cp, Perspective::FirstPlayer);
        let text = format_eval_value(&eval);
        let pawns: f64 = text.parse().unwrap();
        prop_assert_eq!((pawns * 100.0).round() as i32, cp);
    }
}

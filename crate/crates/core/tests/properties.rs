//! Generated-case invariants of the modifications and the clustering.

mod common;

use proptest::prelude::*;
use robust_esm::critical_periods::{cluster_gap_hours, HourSpan};
use robust_esm::modifications::{smooth_uniform, ModificationState, DEFAULT_ALPHA};
use robust_esm::robustify::optimize_year;
use robust_esm::solver::SolverSettings;
use robust_esm::{CostModel, TechnologyCatalog};

use common::close;

fn gap_series() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![3 => Just(0.0), 2 => 0.0..50.0f64, 1 => 1e-9..1e-5f64], 1..120)
}


proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn mod1_conserves_total_gap(gaps in gap_series(), w in 0usize..30, smooth in any::<bool>(), rounds in 1usize..4) {
        let mut state = ModificationState::new(gaps.len(), DEFAULT_ALPHA).unwrap();
        let mut before = state.demand_additions.clone();
        for _ in 0..rounds {
            state.mod1_demand_increase(&gaps, smooth.then_some(w)).unwrap();
            for (b, a) in before.iter().zip(&state.demand_additions) {
                prop_assert!(a >= b);
            }
            before = state.demand_additions.clone();
        }
        let total: f64 = gaps.iter().sum();
        prop_assert!(close(state.demand_additions.iter().sum(), rounds as f64 * total));
        prop_assert!(close(smooth_uniform(&gaps, w).iter().sum(), total));
    }

    #[test]
    fn clusters_cover_gap_hours_disjointly(gaps in gap_series(), join in 0usize..10) {
        let eps = 1e-6;
        let spans = cluster_gap_hours(&gaps, join, eps);
        for pair in spans.windows(2) {
            prop_assert!(pair[0].end < pair[1].start);
            prop_assert!(pair[1].start - pair[0].end > join);
        }
        for (t, &g) in gaps.iter().enumerate() {
            let covering = spans.iter().filter(|s| s.contains(t)).count();
            if g > eps {
                prop_assert_eq!(covering, 1);
            } else {
                prop_assert!(covering <= 1);
            }
        }
        for s in &spans {
            prop_assert!(gaps[s.start] > eps && gaps[s.end] > eps);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn identity_splice_keeps_optimum(
        data in prop::collection::vec(((0.0..1.0f64, 0.0..1.0f64), 10.0..100.0f64), 4..16),
        a in 0usize..16,
        len in 1usize..16,
    ) {
        let (cf, demand): (Vec<_>, Vec<_>) = data.into_iter().unzip();
        let reference = common::reference_scenario(&cf, demand);
        let h = reference.horizon();
        let start = a % h;
        let span = HourSpan::new(start, (start + len - 1).min(h - 1)).unwrap();
        let catalog = TechnologyCatalog::reference(1e4);
        let cm = CostModel::default();
        let settings = SolverSettings::default();
        let mut state = ModificationState::new(h, DEFAULT_ALPHA).unwrap();
        let (_, before) = optimize_year(&reference, &catalog, &cm, &state, &settings, "before").unwrap();
        let spliced = state.mod2_splice(&reference, &reference, span, 1).unwrap();
        prop_assert_eq!(&spliced, &reference);
        let (_, after) = optimize_year(&spliced, &catalog, &cm, &state, &settings, "after").unwrap();
        prop_assert!((after - before).abs() <= 1e-8 * before.abs().max(1.0), "{} vs {}", before, after);
    }
}

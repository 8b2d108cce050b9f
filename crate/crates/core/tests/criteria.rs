use mmr_core::criteria::{
    choose_bayes, choose_maximin, choose_mmr, profile_weakly_dominated, rank_rules, regret_of_action,
    weakly_dominated, Criterion, DecisionProblem, Prior, RiskProfile,
};
use mmr_core::engine::{max_regret_over_grid, Constraint, ReplicationPlan, StateGrid, SweepOptions, TableSettings};
use mmr_core::treat::{treatment_grid, EmptyArm, TreatmentModel, TreatmentRule};
use mmr_core::{Panel, TieBreak};
use proptest::prelude::*;

fn labels(prefix: &str, k: usize) -> Vec<String> {
    (0..k).map(|i| format!("{prefix}{i}")).collect()
}

// Welfare values on a coarse lattice so ties actually occur.
fn problem_strategy() -> impl Strategy<Value = DecisionProblem> {
    (1usize..=6, 1usize..=6).prop_flat_map(|(a, s)| {
        prop::collection::vec(prop::collection::vec(0u8..=10, s), a).prop_map(move |rows| {
            let welfare = rows
                .into_iter()
                .map(|r| r.into_iter().map(|v| v as f64 / 10.0).collect())
                .collect();
            DecisionProblem::new(labels("c", a), labels("s", s), welfare).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn regret_is_nonnegative_and_zero_only_at_the_best(p in problem_strategy()) {
        for s in p.states() {
            let best = p.actions().iter().map(|c| p.welfare(c, s).unwrap()).fold(f64::MIN, f64::max);
            for c in p.actions() {
                let r = regret_of_action(&p, c, s).unwrap();
                prop_assert!(r >= 0.0);
                prop_assert_eq!(r == 0.0, p.welfare(c, s).unwrap() == best);
            }
        }
    }

    #[test]
    fn unique_mmr_choice_is_not_dominated(p in problem_strategy()) {
        let choice = choose_mmr(&p, None).unwrap();
        if choice.ties.len() == 1 && p.actions().len() > 1 {
            prop_assert!(!weakly_dominated(&p, &choice.label).unwrap());
        }
    }

    #[test]
    fn full_subset_matches_no_subset(p in problem_strategy()) {
        let all: Vec<&str> = p.states().iter().map(String::as_str).collect();
        let prior = Prior::uniform(all.len()).unwrap();
        prop_assert_eq!(choose_bayes(&p, &prior, None).unwrap(), choose_bayes(&p, &prior, Some(&all)).unwrap());
        prop_assert_eq!(choose_maximin(&p, None).unwrap(), choose_maximin(&p, Some(&all)).unwrap());
        prop_assert_eq!(choose_mmr(&p, None).unwrap(), choose_mmr(&p, Some(&all)).unwrap());
    }

    #[test]
    fn affine_maps_keep_the_chosen_action(
        p in problem_strategy(),
        alpha in prop::sample::select(vec![0.5, 2.0, 3.0, 10.0]),
        beta in prop::sample::select(vec![-3.0, 0.0, 0.25, 7.0]),
    ) {
        let q = p.affine(alpha, beta).unwrap();
        let prior = Prior::uniform(p.states().len()).unwrap();
        let (b0, b1) = (choose_bayes(&p, &prior, None).unwrap(), choose_bayes(&q, &prior, None).unwrap());
        prop_assert_eq!((&b0.label, &b0.ties), (&b1.label, &b1.ties));
        let (m0, m1) = (choose_maximin(&p, None).unwrap(), choose_maximin(&q, None).unwrap());
        prop_assert_eq!((&m0.label, &m0.ties), (&m1.label, &m1.ties));
        let (r0, r1) = (choose_mmr(&p, None).unwrap(), choose_mmr(&q, None).unwrap());
        prop_assert_eq!((&r0.label, &r0.ties), (&r1.label, &r1.ties));
    }
}

#[test]
fn single_state_mmr_is_the_best_action() {
    let p = DecisionProblem::from_rows(&["a", "b", "c"], &["s"], vec![vec![0.2], vec![0.9], vec![0.5]]).unwrap();
    let c = choose_mmr(&p, None).unwrap();
    assert_eq!((c.label.as_str(), c.value), ("b", 0.0));
    let c = choose_bayes(&p, &Prior::uniform(1).unwrap(), None).unwrap();
    assert_eq!(c.label, "b");
}

#[test]
fn dominating_profile_wins_everywhere() {
    let grid = StateGrid::new(
        vec![
            mmr_core::engine::Axis::new("e_a1", vec![0.0, 0.5, 1.0]).unwrap(),
            mmr_core::engine::Axis::new("e_a0", vec![0.0, 1.0]).unwrap(),
            mmr_core::engine::Axis::new("e_b1", vec![0.0, 0.5, 1.0]).unwrap(),
            mmr_core::engine::Axis::new("e_b0", vec![0.0, 1.0]).unwrap(),
            mmr_core::engine::Axis::fixed("p", 0.5).unwrap(),
        ],
        Constraint::Unrestricted,
    )
    .unwrap();
    let plan = ReplicationPlan::new(400, 11, 6).unwrap();
    let brute = SweepOptions {
        mode: mmr_core::engine::SweepMode::BruteForce,
        ..Default::default()
    };
    let ammr = max_regret_over_grid(&TreatmentModel, &TreatmentRule::Ammr(TieBreak::A), &grid, &plan, &brute).unwrap();
    let profile = RiskProfile::from_grid("ammr", &ammr).unwrap();
    // the same rule with every state's welfare raised is a dominating profile
    let mut better = profile.clone();
    better.rule_id = "better".into();
    for e in &mut better.per_state {
        e.expected_welfare += 0.01;
    }
    let optimum: Vec<f64> = ammr.rows.iter().map(|r| r.estimate.expected_welfare + r.estimate.regret).collect();
    let prior = Prior::uniform(optimum.len()).unwrap();
    let profiles = vec![profile, better];
    for crit in [Criterion::Bayes, Criterion::Maximin, Criterion::Mmr] {
        assert_eq!(rank_rules(&profiles, crit, Some(&prior), &optimum).unwrap().label, "better");
    }
    assert!(profile_weakly_dominated(&profiles, "ammr").unwrap());
}

#[test]
fn maximin_ignores_the_data_on_the_unrestricted_treatment_grid() {
    let mut settings = TableSettings::treatment_defaults();
    settings.density = 5;
    settings.replicates = 300;
    let grid = treatment_grid(Panel::A, &settings, 0.6).unwrap();
    let plan = ReplicationPlan::new(settings.replicates, settings.seed, 10).unwrap();
    let brute = SweepOptions {
        mode: mmr_core::engine::SweepMode::BruteForce,
        ..Default::default()
    };
    let rules = [
        TreatmentRule::Ammr(TieBreak::A),
        TreatmentRule::Es(TieBreak::A, EmptyArm::Half),
        TreatmentRule::ZN,
        TreatmentRule::ZNu,
    ];
    let mut profiles = Vec::new();
    let mut optimum = Vec::new();
    for rule in rules {
        let result = max_regret_over_grid(&TreatmentModel, &rule, &grid, &plan, &brute).unwrap();
        optimum = result.rows.iter().map(|r| r.estimate.expected_welfare + r.estimate.regret).collect();
        profiles.push(RiskProfile::from_grid(mmr_core::engine::DecisionRule::id(&rule), &result).unwrap());
    }
    let choice = rank_rules(&profiles, Criterion::Maximin, None, &optimum).unwrap();
    assert_eq!(choice.value, 0.0);
    assert_eq!(choice.ties.len(), rules.len());
    assert_eq!(choice.label, profiles[0].rule_id);
}

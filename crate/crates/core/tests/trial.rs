use mmr_core::engine::{estimate_risk, exact_risk_small, ReplicationPlan, Spacing, StateGrid, SweepOptions};
use mmr_core::trial::{
    compare_max_regret, regret_from_error_prob, rule_es_trial, trial_grid, NpTest, TrialModel, TrialRule, TrialSample,
    TrialState,
};
use mmr_core::{TieBreak, Treatment};
use proptest::prelude::*;

#[test]
fn welfare_plus_regret_is_the_best_arm() {
    let grid = trial_grid(11, Spacing::Endpoints).unwrap();
    for (per_arm, replicates) in [(3, 1), (20, 400)] {
        let c = compare_max_regret(per_arm, 0.05, &grid, replicates, 5, &SweepOptions::default()).unwrap();
        for row in &c.rows {
            for risk in [&row.es, &row.np] {
                assert_eq!(risk.expected_welfare, row.state.best() - risk.regret);
                assert!((risk.expected_welfare + risk.regret - row.state.best()).abs() <= f64::EPSILON);
                assert!(risk.regret >= 0.0);
            }
        }
    }
}

#[test]
fn one_subject_per_arm() {
    let c = compare_max_regret(1, 0.05, &trial_grid(101, Spacing::Endpoints).unwrap(), 1, 0, &SweepOptions::default())
        .unwrap();
    assert!(c.exact);
    // ES with ties to a picks b only when b succeeds and a fails
    let row = c
        .rows
        .iter()
        .find(|r| (r.state.p_a - 0.6).abs() < 1e-9 && (r.state.p_b - 0.4).abs() < 1e-9)
        .unwrap();
    assert!((row.es.regret - 0.032).abs() < 1e-12);
}

/// Exact probability that the z-test picks `b` when both arms succeed with
/// probability `p`.
fn exact_size(test: &NpTest, n: usize, p: f64) -> f64 {
    let mut pmf = vec![(1.0 - p).powi(n as i32)];
    for k in 1..=n {
        let prev = pmf[k - 1];
        pmf.push(if p == 1.0 { 0.0 } else { prev * (n - k + 1) as f64 / k as f64 * p / (1.0 - p) });
    }
    if p == 1.0 {
        pmf[n] = 1.0;
    }
    let mut size = 0.0;
    for ka in 0..=n {
        for kb in 0..=n {
            if test.decide(&TrialSample::new(n, n, ka, kb).unwrap()) == Treatment::B {
                size += pmf[ka] * pmf[kb];
            }
        }
    }
    size
}

#[test]
fn np_test_size_on_the_diagonal() {
    let test = NpTest::new(0.05).unwrap();
    // away from the boundary the size stays within Monte Carlo noise of alpha
    for n in [25, 50, 100] {
        for i in 20..=80 {
            let size = exact_size(&test, n, i as f64 / 100.0);
            assert!(size <= 0.05 + 3.0 * (size * (1.0 - size) / 5000.0).sqrt(), "n {n} p {i}%: {size}");
        }
    }
    // discreteness pushes the size above alpha near the boundary
    let size = exact_size(&test, 100, 0.97);
    assert!((size - 0.0623).abs() < 1e-4, "{size}");
    let size = exact_size(&test, 25, 0.5);
    assert!((size - 0.0595).abs() < 1e-4, "{size}");
}

#[test]
#[ignore = "pooled z-test size is 0.059 at n = 25 near p = 1/2, so estimates cross the bound, and 0.0623 at n = 100, p = 0.97"]
fn np_test_controls_type_one_error() {
    let grid = trial_grid(101, Spacing::Endpoints).unwrap();
    for per_arm in [25, 50, 100] {
        let c = compare_max_regret(per_arm, 0.05, &grid, 5000, 20191203, &SweepOptions::default()).unwrap();
        for row in c.rows.iter().filter(|r| r.state.p_a == r.state.p_b) {
            let se = (row.np.prob_choose_b * (1.0 - row.np.prob_choose_b) / 5000.0).sqrt();
            assert!(row.np.prob_choose_b <= 0.05 + 3.0 * se, "{row:?}");
        }
    }
}

#[test]
fn es_is_symmetric_and_np_is_not() {
    let model = TrialModel::balanced(4);
    let values = [0.0, 0.2, 0.5, 0.7, 1.0];
    let mut np_asymmetric = false;
    for &a in &values {
        for &b in &values {
            let es = TrialRule::Es(TieBreak::Randomize);
            let here = exact_risk_small(&model, &es, &[a, b], 8).unwrap();
            let there = exact_risk_small(&model, &es, &[b, a], 8).unwrap();
            assert!((here.regret - there.regret).abs() <= 1e-12);
            let es_a = exact_risk_small(&model, &TrialRule::Es(TieBreak::A), &[a, b], 8).unwrap();
            let es_b = exact_risk_small(&model, &TrialRule::Es(TieBreak::B), &[b, a], 8).unwrap();
            assert!((es_a.regret - es_b.regret).abs() <= 1e-12);
            let np = TrialRule::np(0.05).unwrap();
            let here = exact_risk_small(&model, &np, &[a, b], 8).unwrap();
            let there = exact_risk_small(&model, &np, &[b, a], 8).unwrap();
            np_asymmetric |= (here.regret - there.regret).abs() > 1e-6;
        }
    }
    assert!(np_asymmetric);
}

struct OraclePair {
    exact: f64,
    mc: f64,
    reported_se: f64,
    /// Standard deviation of the estimate implied by the exact choice probability.
    true_sd: f64,
}

/// Both trial rules at every state of `grid`, for every balanced trial with
/// at most 12 subjects.
fn oracle_pairs(grid: &StateGrid) -> Vec<OraclePair> {
    let mut out = Vec::new();
    for per_arm in 1..=6 {
        let exact = compare_max_regret(per_arm, 0.05, grid, 1, 0, &SweepOptions::default()).unwrap();
        assert!(exact.exact);
        let model = TrialModel::balanced(per_arm);
        let plan = ReplicationPlan::new(5000, 20191203, model.total()).unwrap();
        for row in &exact.rows {
            let state = [row.state.p_a, row.state.p_b];
            for (rule, oracle) in [(TrialRule::Es(TieBreak::A), &row.es), (TrialRule::np(0.05).unwrap(), &row.np)] {
                let mc = estimate_risk(&model, &rule, &state, &plan, 0).unwrap();
                let p = oracle.prob_choose_b;
                out.push(OraclePair {
                    exact: oracle.regret,
                    mc: mc.regret,
                    reported_se: mc.mc_stderr,
                    true_sd: (row.state.p_b - row.state.p_a).abs() * (p * (1.0 - p) / 5000.0).sqrt(),
                });
            }
        }
    }
    out
}

fn share_within(pairs: &[OraclePair], sigma: impl Fn(&OraclePair) -> f64) -> f64 {
    let agree = pairs.iter().filter(|p| (p.mc - p.exact).abs() <= 4.0 * sigma(p) + 1e-12).count();
    agree as f64 / pairs.len() as f64
}

#[test]
fn monte_carlo_matches_exact_on_coarse_grids() {
    let pairs = oracle_pairs(&trial_grid(5, Spacing::Endpoints).unwrap());
    let share = share_within(&pairs, |p| p.reported_se);
    assert!(share >= 0.99, "{share}");
}

// On finer grids some states make a choice so unlikely that 5000 replicates
// never see it; the reported stderr is then zero, so judge those against the
// exact standard deviation instead.
#[test]
fn monte_carlo_error_is_within_four_true_standard_deviations() {
    let pairs = oracle_pairs(&trial_grid(11, Spacing::Endpoints).unwrap());
    let share = share_within(&pairs, |p| p.true_sd);
    assert!(share >= 0.99, "{share}");
}

#[test]
fn es_beats_np_at_moderate_sizes() {
    let grid = trial_grid(21, Spacing::Endpoints).unwrap();
    let c = compare_max_regret(25, 0.05, &grid, 2000, 20191203, &SweepOptions::default()).unwrap();
    assert!(c.max_regret_es < c.max_regret_np, "{}", c.summary());
    assert!(c.to_csv(Some(4)).starts_with("p_a,p_b,regret_es,regret_np\n"));
}

#[test]
fn regret_from_error_probability() {
    let s = TrialState::new(0.7, 0.4).unwrap();
    let r = regret_from_error_prob(&s, 0.25).unwrap();
    assert!((r.regret - 0.25 * 0.3).abs() < 1e-15);
    assert!(regret_from_error_prob(&s, 1.5).is_err());
    assert_eq!(regret_from_error_prob(&TrialState::new(0.5, 0.5).unwrap(), 0.9).unwrap().regret, 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn smaller_alpha_never_switches_to_b(
        n_a in 1usize..60, n_b in 1usize..60, fa in 0.0f64..=1.0, fb in 0.0f64..=1.0,
        alpha in 0.001f64..0.5, shrink in 0.01f64..1.0,
    ) {
        let sample = TrialSample::new(n_a, n_b, (fa * n_a as f64) as usize, (fb * n_b as f64) as usize).unwrap();
        let loose = NpTest::new(alpha).unwrap();
        let strict = NpTest::new(alpha * shrink).unwrap();
        prop_assert!(strict.critical_value() >= loose.critical_value());
        if loose.decide(&sample) == Treatment::A {
            prop_assert_eq!(strict.decide(&sample), Treatment::A);
        }
    }

    #[test]
    fn np_choosing_b_implies_es_chooses_b(n in 1usize..60, ka in 0usize..60, kb in 0usize..60) {
        let sample = TrialSample::new(n, n, ka.min(n), kb.min(n)).unwrap();
        if NpTest::new(0.05).unwrap().decide(&sample) == Treatment::B {
            prop_assert_eq!(rule_es_trial(&sample), Treatment::B);
        }
    }
}

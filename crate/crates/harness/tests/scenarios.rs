use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rsm_core::problem::{ElementSet, SelectionSequence};
use rsm_core::{AttackerKind, SelectorKind};
use rsm_harness::config::{RunConfig, UavParams, WsnParams};
use rsm_harness::results::summarize;
use rsm_harness::run_monte_carlo;
use rsm_harness::scenario::{
    build_scenario, double_integrator, generate_uav_scenario, generate_wsn_scenario, trial_seed,
    wsn_trajectory,
};

fn config(text: &str) -> RunConfig {
    RunConfig::from_toml(text).unwrap()
}

#[test]
fn uav_ground_set_has_sixty_ids() {
    let c = config("[run]\nkind = \"uav_navigation\"\nhorizon = 5\nalpha = 8\nbeta = 6\n");
    let s = build_scenario(&c, 1).unwrap();
    let g = s.objective.grounds();
    let mut ids: Vec<usize> = g.all().map(|e| e.global_id).collect();
    ids.sort_unstable();
    ids.dedup();
    assert_eq!(ids.len(), 60);
    assert!((1..=5).all(|t| g.step(t).len() == 12));
    assert!(s.submodular());
}

#[test]
fn uav_bank_layout() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let model = generate_uav_scenario(&mut rng, &UavParams::default(), 3).unwrap();
    let bank = model.sensors(1);
    assert_eq!(bank.len(), 12);
    assert_eq!(bank[0].c, DMatrix::identity(3, 6));
    assert_eq!(bank[0].r, DMatrix::identity(3, 3) * 2.0);
    assert_eq!(bank[1].r[(0, 0)], 0.25);
    assert_eq!(bank[1].c[(0, 2)], 1.0);
    for s in &bank[2..] {
        assert_eq!(s.c.shape(), (1, 6));
        assert!((0.5..=2.0).contains(&s.r[(0, 0)]));
    }
    for t in 2..=3 {
        assert_eq!(model.sensors(t), bank);
    }
    assert_eq!(model.dynamics(), &double_integrator(1.0));
}

#[test]
fn gps_alone_matches_hand_value() {
    // P_1 = F F' + I has position block 3 I; GPS with R = 2 I gives
    // det(P_1) / det(P_1|1) = det(I + R^-1 3 I) = 2.5^3.
    let c = config("[run]\nkind = \"uav_navigation\"\nhorizon = 1\nalpha = 1\nbeta = 0\n");
    let s = build_scenario(&c, 9).unwrap();
    let gps = s.objective.grounds().step(1)[0];
    let seq = SelectionSequence::from_sets(vec![ElementSet::singleton(gps)]);
    let f = s.objective.evaluate(&seq).unwrap();
    assert!((f - 3.0 * 2.5f64.ln()).abs() < 1e-12, "{f}");
}

#[test]
fn wsn_sensor_at_target_has_floor_noise() {
    let params = WsnParams {
        side: 0.0,
        ..WsnParams::default()
    };
    let model = generate_wsn_scenario(&mut ChaCha8Rng::seed_from_u64(0), &params, 2).unwrap();
    for t in 1..=2 {
        assert_eq!(model.sensors(t).len(), 100);
        for s in model.sensors(t) {
            assert_eq!(s.r, DMatrix::identity(3, 3) * 0.25);
            assert_eq!(s.c, DMatrix::identity(3, 6));
        }
    }
}

#[test]
fn wsn_trajectory_crosses_at_constant_altitude() {
    let path = wsn_trajectory(&mut ChaCha8Rng::seed_from_u64(4), 100.0, 5);
    assert_eq!(path.len(), 5);
    for (i, p) in path.iter().enumerate() {
        assert_eq!(p.z, path[0].z);
        assert!((p.x - 100.0 * (i + 1) as f64 / 6.0).abs() < 1e-9);
        assert!((0.0..=100.0).contains(&p.y));
    }
}

#[test]
fn wsn_noise_grows_with_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let model = generate_wsn_scenario(&mut rng, &WsnParams::default(), 1).unwrap();
    let max_d2 = 3.0 * 100.0f64.powi(2);
    for s in model.sensors(1) {
        let r = s.r[(0, 0)];
        assert!((0.25..=0.25 + 0.01 * max_d2).contains(&r));
        assert_eq!(s.r, DMatrix::identity(3, 3) * r);
    }
}

#[test]
fn identical_wsn_sensors_make_ram_and_greedy_agree() {
    let c = config(
        "[run]\nkind = \"wsn_tracking\"\nhorizon = 2\nalpha = 3\nbeta = 0\ntrials = 3\n\
         selectors = [\"ram\", \"greedy\"]\n[wsn_tracking]\nsensors = 20\ngamma = 0.0\n",
    );
    let rows = run_monte_carlo(&c).unwrap().rows;
    let (ram, greedy): (Vec<_>, Vec<_>) =
        rows.iter().partition(|r| r.selector == SelectorKind::Ram);
    assert_eq!(ram.len(), 6);
    for (a, b) in ram.iter().zip(&greedy) {
        assert_eq!((a.trial, a.step), (b.trial, b.step));
        assert_eq!(a.f_value, b.f_value);
    }
}

#[test]
fn ram_without_failures_reproduces_greedy_rows() {
    let c = config(
        "[run]\nkind = \"uav_navigation\"\nhorizon = 3\nalpha = 4\nbeta = 0\ntrials = 4\n\
         selectors = [\"ram\", \"greedy\"]\n",
    );
    let rows = run_monte_carlo(&c).unwrap().rows;
    let ram: Vec<_> = rows
        .iter()
        .filter(|r| r.selector == SelectorKind::Ram)
        .collect();
    let greedy: Vec<_> = rows
        .iter()
        .filter(|r| r.selector == SelectorKind::Greedy)
        .collect();
    assert_eq!(ram.len(), 12);
    for (a, b) in ram.iter().zip(&greedy) {
        assert_eq!(
            (a.trial, a.step, a.f_value, a.error),
            (b.trial, b.step, b.f_value, b.error)
        );
    }
}

#[test]
fn runs_are_reproducible_and_trials_are_stable() {
    let text = |trials: usize| {
        format!(
            "[run]\nkind = \"uav_navigation\"\nhorizon = 2\nalpha = 5\nbeta = 2\ntrials = {trials}\n\
             seed = 17\nselectors = [\"ram\", \"random\"]\nattackers = [\"worst\", \"random\"]\n"
        )
    };
    let a = run_monte_carlo(&config(&text(5))).unwrap();
    let b = run_monte_carlo(&config(&text(5))).unwrap();
    assert_eq!(a, b);
    let short = run_monte_carlo(&config(&text(3))).unwrap();
    assert_eq!(short.rows[..], a.rows[..short.rows.len()]);
    assert_ne!(trial_seed(17, 0), trial_seed(17, 1));
    assert_ne!(trial_seed(17, 0), trial_seed(18, 0));
}

#[test]
fn rows_cover_every_pair_and_step() {
    let c = config(
        "[run]\nkind = \"synthetic\"\nhorizon = 2\nalpha = 2\nbeta = 1\ntrials = 3\n\
         attackers = [\"worst\", \"greedy\", \"random\"]\n",
    );
    let rows = run_monte_carlo(&c).unwrap().rows;
    assert_eq!(rows.len(), 3 * 3 * 3 * 2);
    for s in [
        SelectorKind::Ram,
        SelectorKind::Greedy,
        SelectorKind::Random,
    ] {
        for a in [
            AttackerKind::Worst,
            AttackerKind::Greedy,
            AttackerKind::Random,
        ] {
            let n = rows
                .iter()
                .filter(|r| r.selector == s && r.attacker == a)
                .count();
            assert_eq!(n, 6, "{s} vs {a}");
        }
    }
    assert!(rows.iter().all(|r| r.bound_apriori.is_none()));
}

#[test]
fn summary_means_are_row_means() {
    let c =
        config("[run]\nkind = \"uav_navigation\"\nhorizon = 3\nalpha = 4\nbeta = 2\ntrials = 7\n");
    let rows = run_monte_carlo(&c).unwrap().rows;
    let summary = summarize(&rows);
    assert_eq!(summary.len(), 3 * 3);
    for (key, s) in &summary {
        let errors: Vec<f64> = rows
            .iter()
            .filter(|r| {
                r.selector == key.selector && r.attacker == key.attacker && r.step == key.step
            })
            .map(|r| r.error)
            .collect();
        let mean = errors.iter().sum::<f64>() / errors.len() as f64;
        assert_eq!(s.error.count, 7);
        assert!((s.error.mean - mean).abs() <= 1e-12 * mean.abs().max(1.0));
    }
}

#[test]
fn bounds_fill_only_ram_rows() {
    let c = config(
        "[run]\nkind = \"synthetic\"\nhorizon = 2\nalpha = 2\nbeta = 1\ntrials = 2\nbounds = true\n",
    );
    let rows = run_monte_carlo(&c).unwrap().rows;
    for r in &rows {
        let filled = r.bound_apriori.is_some();
        assert_eq!(filled, r.selector == SelectorKind::Ram);
        if let Some(b) = r.bound_apriori {
            assert!((0.0..=1.0).contains(&b));
        }
    }
}

#[test]
fn error_is_baseline_minus_value() {
    let c = config("[run]\nkind = \"wsn_tracking\"\nhorizon = 2\nalpha = 2\nbeta = 1\n[wsn_tracking]\nsensors = 10\n");
    let s = build_scenario(&c, trial_seed(0, 0)).unwrap();
    let rows = run_monte_carlo(&c).unwrap().rows;
    for r in &rows {
        assert_eq!(r.error, s.objective.cost(r.step, r.f_value));
        assert!(r.error > 0.0);
    }
}

//! Discrete-event simulations of the retry schedules, compared with the
//! closed-form expectations.

use qrs_core::noise::{
    cat_error_distribution, cat_time, expected_parallel_time, outer_round_length,
    survival_probability, zz_layer_survival, Cond, Condition, InstructionRates, PostSelection,
    ReductionTable, ZAZB_LAYER_DURATION, ZAZB_STATS, ZZ_STATS,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Time units for `n` parallel tasks, each retried until it succeeds: one
/// unit for the success and half a unit per failure.
fn parallel_retry(n: usize, p: f64, rng: &mut ChaCha8Rng) -> f64 {
    let mut worst = 0u32;
    for _ in 0..n {
        let mut fails = 0;
        while !rng.gen_bool(p) {
            fails += 1;
        }
        worst = worst.max(fails);
    }
    1.0 + 0.5 * worst as f64
}

fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn parallel_retry_time_matches_simulation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let samples: Vec<f64> = (0..1_000_000).map(|_| parallel_retry(3, 0.9, &mut rng)).collect();
    let (mean, se) = mean_and_stderr(&samples);
    let want = expected_parallel_time(3, 0.9).unwrap();
    assert!((mean - want).abs() <= 3.0 * se, "simulated {mean} ± {se}, formula {want}");
    assert_eq!(expected_parallel_time(1, 0.5).unwrap(), 1.5);
    assert_eq!(expected_parallel_time(7, 1.0).unwrap(), 1.0);
}

fn uniform_condition(r: f64) -> Condition {
    Condition { r_half: r, r_whole: r, r_inter: r }
}

fn post_selection(r: f64) -> PostSelection {
    let c = uniform_condition(r);
    PostSelection {
        conditions: [c, c, c],
        reduction: [ReductionTable::default(), ReductionTable::default(), ReductionTable::default()],
    }
}

/// One cat preparation: two non-FT layers (the second restarts the whole
/// preparation on a post-selection hit), then `2R` verification layers,
/// each a parallel `Z^αZ^β` layer plus a `ZZ` layer that restarts
/// everything on a hit. Aborted layers cost half their duration.
fn simulate_cat(n: usize, r: usize, ps: &PostSelection, rates: &InstructionRates, rng: &mut ChaCha8Rng) -> f64 {
    let layer = ZAZB_LAYER_DURATION * rates.tau_meas;
    let tau_zz = ZZ_STATS.duration * rates.tau_meas;
    let p_c1 = survival_probability(&ZAZB_STATS, ps.condition(Cond::C1));
    let q2 = survival_probability(&ZAZB_STATS, ps.condition(Cond::C3)).powf(n as f64 / 2.0);
    let p2 = zz_layer_survival(n, ps.condition(Cond::C2));
    let mut time = 0.0;
    'attempt: loop {
        loop {
            time += layer * parallel_retry(n / 2, p_c1, rng);
            if rng.gen_bool(q2) {
                time += layer;
                break;
            }
            time += layer / 2.0;
        }
        for _ in 0..2 * r {
            time += layer * parallel_retry(n / 2, p_c1, rng);
            if rng.gen_bool(p2) {
                time += tau_zz;
            } else {
                time += tau_zz / 2.0;
                continue 'attempt;
            }
        }
        return time;
    }
}

#[test]
fn cat_time_matches_event_simulation() {
    let rates = InstructionRates::default();
    for (n, r, rate) in [(40, 1, 1e-4), (20, 2, 3e-4), (40, 0, 2e-4)] {
        let ps = post_selection(rate);
        let want = cat_time(n, r, &ps, &rates).unwrap().cat;
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64 + r as u64);
        let samples: Vec<f64> = (0..200_000).map(|_| simulate_cat(n, r, &ps, &rates, &mut rng)).collect();
        let (mean, se) = mean_and_stderr(&samples);
        assert!(((mean - want) / want).abs() < 0.01, "n = {n}, R = {r}: {mean} ± {se} vs {want}");
    }
}

#[test]
fn cat_time_pins_without_post_selection() {
    let rates = InstructionRates::default();
    let t = cat_time(40, 1, &PostSelection::trivial(), &rates).unwrap();
    assert_eq!((t.one_layer, t.non_ft, t.cat), (15000.0, 30000.0, 68160.0));
    // τ_NonFT + 2R(τ_OneLayer + 34 τ_meas)
    assert_eq!(t.cat, t.non_ft + 2.0 * (t.one_layer + 34.0 * 120.0));
    let t0 = cat_time(40, 0, &PostSelection::trivial(), &rates).unwrap();
    assert_eq!(t0.cat, t0.non_ft);
}

/// Idle rounds between two extractions of one block: `m − 2` rows, each
/// with six fixed `ZZ` layers and `2(d−1+M)` cat consumptions per attempt;
/// an attempt is repeated if any of its `d−1+M` cats carried a fault.
fn simulate_outer_round(m: usize, checks: usize, tau_cat: f64, p_cat: f64, rates: &InstructionRates, rng: &mut ChaCha8Rng) -> f64 {
    let tau_zz = ZZ_STATS.duration * rates.tau_meas;
    let mut time = 0.0;
    for _ in 0..m - 2 {
        time += 6.0 * tau_zz;
        loop {
            time += 2.0 * checks as f64 * (tau_zz + tau_cat);
            let faulty = (0..checks).any(|_| rng.gen_bool(p_cat));
            if !faulty {
                break;
            }
        }
    }
    time / rates.tau_idle
}

#[test]
fn outer_round_length_matches_event_simulation() {
    let rates = InstructionRates::default();
    let ps = PostSelection::trivial();
    let cat = cat_error_distribution(40, 1, &ps, &rates).unwrap();
    let want = outer_round_length(20, 5, 1, cat.timing.cat, cat.p_cat, &rates).unwrap();
    assert!((want - 1_832_849.936_855_452_4).abs() < 1e-6, "{want}");
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let samples: Vec<f64> =
        (0..100_000).map(|_| simulate_outer_round(20, 5, cat.timing.cat, cat.p_cat, &rates, &mut rng)).collect();
    let (mean, se) = mean_and_stderr(&samples);
    assert!(((mean - want) / want).abs() < 0.01, "{mean} ± {se} vs {want}");
}

#[test]
fn outer_round_length_is_linear_in_rows() {
    let rates = InstructionRates::default();
    let a = outer_round_length(12, 5, 2, 7e4, 0.01, &rates).unwrap();
    let b = outer_round_length(22, 5, 2, 7e4, 0.01, &rates).unwrap();
    assert!((b / a - 2.0).abs() < 1e-12);
    assert!(outer_round_length(12, 5, 2, 7e4, 0.2, &rates).is_err());
}

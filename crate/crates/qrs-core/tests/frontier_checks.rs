use qrs_core::failure::{CollisionFractions, ProtocolParams};
use qrs_core::frontier::{best_overhead_at, crossover, curve, pareto, qubit_counts, sweep, Grid};
use qrs_core::noise::{InstructionRates, PostSelection};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Physical qubits: 378 per qudit plus 44 per interior crossing and 22 per
/// edge link; logical: 11 per data qudit outside the `2(d−1)` check qudits
/// of each of the `m − 2` data rows.
#[test]
fn qubit_counts_match_hand_values() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let d = rng.gen_range(3..=9usize);
        let n = rng.gen_range(2 * d - 1..=80usize);
        let m = rng.gen_range(3..=50usize);
        let c = qubit_counts(n, m, d);
        let physical = 378 * n * m + 44 * (n - 1) * (m - 1) + 22 * (n - 1) + 22 * (m - 1);
        let logical = 11 * (m - 2) * (n - 2 * (d - 1));
        assert_eq!((c.physical, c.logical), (physical as u64, logical as u64));
        assert!((c.overhead - physical as f64 / logical as f64).abs() < 1e-9);
    }
    assert_eq!(qubit_counts(20, 10, 3).physical, 83_740);
}

fn synthetic(c: f64, s: f64) -> Vec<(f64, f64)> {
    (0..=24).map(|i| 10f64.powf(-16.0 + 0.5 * i as f64)).map(|l| (l, c * l.powf(-s))).collect()
}

/// Power-law baselines `c L^{−s}` cross where `c_a L^{−s_a} = c_b L^{−s_b}`.
#[test]
fn crossover_of_power_laws() {
    for (ca, sa, cb, sb) in [(2.0f64, 0.1, 30.0, 0.02), (5.0, 0.05, 1.0, 0.12), (0.5, 0.2, 40.0, 0.05)] {
        let want = (ca / cb).powf(1.0 / (sa - sb));
        let got = crossover(&synthetic(ca, sa), &synthetic(cb, sb)).unwrap().unwrap();
        assert!(((got - want) / want).abs() < 0.01, "{got} vs {want}");
    }
    assert_eq!(crossover(&synthetic(1.0, 0.1), &synthetic(2.0, 0.1)).unwrap(), None);
}

/// Overheads linear in `log10(1/L)` are not straight in log–log space, so
/// interpolation error shows up; the sampled grid keeps it under 1%.
#[test]
fn crossover_of_log_linear_baselines() {
    let line = |a: f64, b: f64| -> Vec<(f64, f64)> {
        (0..=100).map(|i| 10f64.powf(-16.0 + 0.1 * i as f64)).map(|l| (l, a + b * (-l.log10()))).collect()
    };
    // 10 + 5x = 40 + 2x at x = log10(1/L) = 10.
    let got = crossover(&line(10.0, 5.0), &line(40.0, 2.0)).unwrap().unwrap();
    assert!(((got - 1e-10) / 1e-10).abs() < 0.01, "{got}");
}

#[test]
fn pareto_front_is_monotone() {
    let grid = Grid {
        n: vec![20, 30, 40],
        m: vec![5, 10, 20],
        d: vec![3, 4, 5, 6],
        big_m: vec![1, 2],
        r: vec![1],
        max_physical: 500_000,
    };
    let (points, skipped) = sweep(
        &grid,
        2048,
        &InstructionRates::default(),
        &PostSelection::trivial(),
        &CollisionFractions::analytic(),
    );
    assert!(skipped.is_empty());
    let front = pareto(&points);
    assert!(!front.is_empty());
    for w in front.windows(2) {
        assert!(w[0].ler() <= w[1].ler());
        assert!(w[0].overhead() > w[1].overhead());
    }
    for p in &points {
        assert!(front.iter().any(|f| f.ler() <= p.ler() && f.overhead() <= p.overhead()));
    }
    let target = front[front.len() / 2].ler();
    assert_eq!(best_overhead_at(&front, target), Some(front[front.len() / 2].overhead()));
    assert_eq!(curve(&front).len(), front.len());
}

#[test]
fn single_point_grid() {
    let grid = Grid { n: vec![40], m: vec![20], d: vec![5], big_m: vec![1], r: vec![1], max_physical: 500_000 };
    assert_eq!(grid.points(), vec![ProtocolParams { n: 40, m: 20, d: 5, big_m: 1, r: 1 }]);
    let infeasible = Grid { n: vec![8], m: vec![3], d: vec![5], big_m: vec![3], r: vec![1], max_physical: 500_000 };
    assert!(infeasible.points().is_empty());
}

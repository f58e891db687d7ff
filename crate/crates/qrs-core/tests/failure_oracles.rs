use num_bigint::BigUint;
use qrs_core::decode::Combinations;
use qrs_core::failure::{
    build_time_like_matrix, d_k, d_k_recurrence_check, ordered_bell, slf_weight_prob, tlf_case1,
    tlf_case2, tlf_case3, total_failure, with_identity, CollisionFractions, ProtocolParams,
    WeightSources,
};
use qrs_core::noise::{cat_error_distribution, outer_round_length, InstructionRates, PostSelection};
use qrs_core::{FieldCtx, FieldElement};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs()
}

#[test]
fn kernel_count_recurrence_holds_exactly() {
    for q in [8, 2048] {
        for big_m in 1..=8 {
            for k in 1..=10 {
                assert!(d_k_recurrence_check(k, big_m, q), "q = {q}, M = {big_m}, k = {k}");
            }
        }
    }
}

/// Ordered set partitions of `b` elements correspond to maps onto an
/// initial segment `{0, …, j−1}` of block labels.
fn ordered_partitions_bruteforce(b: u32) -> u64 {
    if b == 0 {
        return 1;
    }
    let mut count = 0;
    for code in 0..(b as u64).pow(b) {
        let mut used = 0u32;
        let mut c = code;
        for _ in 0..b {
            used |= 1 << (c % b as u64);
            c /= b as u64;
        }
        if (used + 1).is_power_of_two() {
            count += 1;
        }
    }
    count
}

#[test]
fn ordered_bell_numbers() {
    let table = [1u64, 1, 3, 13, 75, 541, 4683, 47293];
    for (b, &want) in table.iter().enumerate() {
        assert_eq!(ordered_bell(b), BigUint::from(want));
        assert_eq!(ordered_partitions_bruteforce(b as u32), want);
    }
}

#[test]
fn time_like_bounds_by_hand() {
    let p = 5.578e-5;
    let q = 2048u64;
    let qm1 = 2047.0f64;
    // D_3 = q − 1 for M = 2.
    assert!(close(tlf_case1(20, 5, 2, q, p).unwrap(), 20.0 * p / (qm1 * qm1), 1e-12));
    assert_eq!(tlf_case1(20, 5, 3, q, p).unwrap(), 0.0);
    assert!(close(tlf_case3(5, 1, q, 0.01).unwrap(), 10.0 / qm1 * 1e-4, 1e-12));
    assert!(close(tlf_case3(5, 2, q, 0.01).unwrap(), 4.0 / qm1 * 1e-6, 1e-12));
    assert_eq!(tlf_case3(5, 2, q, 0.0).unwrap(), 0.0);
    // d = M + 2: only k = d − 1 contributes to case 2.
    let d3 = d_k(3, 2, q).to_string().parse::<f64>().unwrap();
    let want = p * 20.0 * (d3 / qm1.powi(3) + 1.0 / qm1.powi(2));
    assert!(close(tlf_case2(20, 4, 2, q, p).unwrap(), want, 1e-12));
    for d in 3..=9 {
        for big_m in 1..=d - 2 {
            let c1 = tlf_case1(40, d, big_m, q, p).unwrap();
            let c2 = tlf_case2(40, d, big_m, q, p).unwrap();
            assert!(c2 >= c1);
            let lead1 = p * 40.0 * (d - 2 - big_m) as f64 / qm1.powi(big_m as i32);
            if lead1 > 0.0 {
                assert!((0.5..=2.0).contains(&(c1 / lead1)), "d = {d}, M = {big_m}");
            }
            let lead2 = 2.0 * p * 40.0 * (d - 1 - big_m) as f64 / qm1.powi(big_m as i32);
            assert!((0.5..=2.0).contains(&(c2 / lead2)), "d = {d}, M = {big_m}");
        }
    }
}

/// Smallest weight of a nonzero kernel vector of `h`, by enumerating the
/// kernel from a basis.
fn min_distance(f: &FieldCtx, h: &qrs_core::matrix::Matrix) -> usize {
    let basis = h.nullspace(f);
    let q = f.q() as u64;
    let mut best = usize::MAX;
    for code in 1..q.pow(basis.len() as u32) {
        let mut c = code;
        let mut v = vec![FieldElement::ZERO; h.cols()];
        for b in &basis {
            let a = f.el((c % q) as u32);
            c /= q;
            for (x, &y) in v.iter_mut().zip(b) {
                *x = f.add(*x, f.mul(a, y));
            }
        }
        best = best.min(v.iter().filter(|x| !x.is_zero()).count());
    }
    best
}

#[test]
fn time_like_matrices_have_full_distance() {
    let f = FieldCtx::with_degree(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for (d, big_m) in [(5, 2), (5, 1), (4, 2), (6, 3)] {
        let beta = build_time_like_matrix(&f, d, big_m, None, &mut rng).unwrap();
        assert_eq!((beta.rows(), beta.cols()), (big_m, d - 1));
        assert_eq!(min_distance(&f, &with_identity(&beta)), big_m + 1);
        let nu: Vec<FieldElement> = (1..d as u32).map(|i| f.el(i + 2)).collect();
        let scaled = build_time_like_matrix(&f, d, big_m, Some(&nu), &mut rng).unwrap();
        assert_eq!(min_distance(&f, &with_identity(&scaled)), big_m + 1);
    }
    let beta = build_time_like_matrix(&f, 6, 1, None, &mut rng).unwrap();
    assert!(beta.row(0).iter().all(|x| !x.is_zero()));
}

#[test]
fn weight_probability_low_orders() {
    let src = WeightSources { p_static: 1e-3, p_z_round: 2e-4, p_x_round: 5e-5 };
    assert_eq!(slf_weight_prob(0, 30, &src), 1.0);
    assert!(close(slf_weight_prob(1, 30, &src), 30.0 * 1.25e-3, 1e-12));
    // e = 2: C(n,2) Σ_{a+b+c=2} 2!/(a!b!c!) p_s^a B_b p_z^b B_c p_x^c.
    let (s, z, x) = (src.p_static, src.p_z_round, src.p_x_round);
    let inner = s * s + 3.0 * z * z + 3.0 * x * x + 2.0 * (s * z + s * x + z * x);
    assert!(close(slf_weight_prob(2, 30, &src), 435.0 * inner, 1e-12));
    assert_eq!(slf_weight_prob(3, 30, &WeightSources::default()), 0.0);
}

#[test]
fn noiseless_model_never_fails() {
    let p = ProtocolParams { n: 40, m: 20, d: 5, big_m: 1, r: 1 };
    let b = total_failure(
        &p,
        2048,
        &InstructionRates::noiseless(),
        &PostSelection::trivial(),
        &CollisionFractions::analytic(),
    )
    .unwrap();
    assert_eq!(b.total, 0.0);
    assert_eq!(b.ler_per_lqr, 0.0);
}

/// Regression pin for `(n, m, d, M, R) = (40, 20, 5, 1, 1)` at the default
/// rates, with every term recomputed from its closed form.
#[test]
fn pinned_breakdown_at_defaults() {
    let rates = InstructionRates::default();
    let ps = PostSelection::trivial();
    let p = ProtocolParams { n: 40, m: 20, d: 5, big_m: 1, r: 1 };
    let b = total_failure(&p, 2048, &rates, &ps, &CollisionFractions::analytic()).unwrap();
    assert!(close(b.ler_per_lqr, 2.241671063057222e-12, 1e-9), "{}", b.ler_per_lqr);
    assert!(close(b.total, 1.4462436265640435e-3, 1e-9));

    let qm1 = 2047.0f64;
    let p_zz = 5.578e-5;
    let d2 = 2047.0;
    let d3 = 2048.0f64 * 2048.0 - 1.0 - 3.0 * 2047.0;
    assert!(close(b.tlf1, p_zz * 40.0 * (d2 / qm1.powi(2) + d3 / qm1.powi(3)), 1e-12));
    let cat = cat_error_distribution(40, 1, &ps, &rates).unwrap();
    assert!(close(cat.p_consumption, 40.0 * p_zz, 1e-12));
    assert_eq!(cat.timing.cat, 68160.0);
    assert!(close(b.tlf3, 10.0 / qm1 * cat.p_cat * cat.p_cat, 1e-12));
    assert!(close(b.cat_burst, 2.0 * 5.0 * cat.p_cat_state_failure, 1e-12));
    let tau_zz = 34.0 * 120.0;
    let n_or = 18.0 / 8.0 * (6.0 * tau_zz + 10.0 * (tau_zz + 68160.0) / (1.0 - 5.0 * cat.p_cat));
    assert!(close(b.n_outer_round, n_or, 1e-12));
    assert!(close(outer_round_length(20, 5, 1, 68160.0, cat.p_cat, &rates).unwrap(), n_or, 1e-12));
    let sum = b.tlf1 + b.tlf2 + b.tlf3 + b.slf + b.cat_burst;
    assert!(close(b.total, 2.0 * sum, 1e-12));
    assert!(close(b.ler_per_lqr, b.total / (11.0 * 32.0 * n_or), 1e-12));
}

/// Every derived quantity is nondecreasing when one base rate grows.
#[test]
fn failure_grows_with_every_rate() {
    let ps = PostSelection::trivial();
    let fr = CollisionFractions::analytic();
    let p = ProtocolParams { n: 30, m: 10, d: 4, big_m: 2, r: 1 };
    let base = InstructionRates::default();
    let at = |r: &InstructionRates| total_failure(&p, 2048, r, &ps, &fr).unwrap().total;
    let t0 = at(&base);
    for bump in 0..4 {
        let mut r = base;
        match bump {
            0 => r.p_half *= 2.0,
            1 => r.p_whole *= 2.0,
            2 => r.p_inter *= 2.0,
            _ => r.p_idle *= 2.0,
        }
        assert!(at(&r) >= t0, "rate {bump}");
    }
}

#[test]
fn combinations_enumerate_every_subset_once() {
    let mut c = Combinations::new(6, 3);
    let mut seen = 0;
    while let Some(s) = c.next_subset() {
        assert!(s.windows(2).all(|w| w[0] < w[1]));
        seen += 1;
    }
    assert_eq!(seen, 20);
}

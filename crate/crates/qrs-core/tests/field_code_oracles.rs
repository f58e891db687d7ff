use std::collections::HashMap;

use qrs_core::decode::decode_min_weight;
use qrs_core::failure::d_k;
use qrs_core::grs::{mds_weight_count, power_matrix, random_points, GrsCode};
use qrs_core::matrix::Matrix;
use qrs_core::{FieldCtx, FieldElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Visit every vector of GF(q)^n.
fn for_each_vector(f: &FieldCtx, n: usize, mut visit: impl FnMut(&[FieldElement])) {
    let q = f.q();
    let mut digits = vec![0u32; n];
    let mut v = vec![FieldElement::ZERO; n];
    loop {
        visit(&v);
        let mut i = 0;
        loop {
            if i == n {
                return;
            }
            digits[i] += 1;
            if digits[i] == q {
                digits[i] = 0;
                v[i] = FieldElement::ZERO;
                i += 1;
            } else {
                v[i] = f.el(digits[i]);
                break;
            }
        }
    }
}

fn weight(v: &[FieldElement]) -> usize {
    v.iter().filter(|x| !x.is_zero()).count()
}

fn nonzero_vec(f: &FieldCtx, n: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    (0..n).map(|_| f.random_nonzero(rng)).collect()
}

/// Horner evaluation of `Σ c_j x^j`.
fn eval_poly(f: &FieldCtx, coeffs: &[FieldElement], x: FieldElement) -> FieldElement {
    coeffs.iter().rev().fold(FieldElement::ZERO, |acc, &c| f.add(f.mul(acc, x), c))
}

#[test]
fn multiplication_matches_shift_and_add() {
    for s in [3, 4] {
        let f = FieldCtx::with_degree(s).unwrap();
        for a in f.elements() {
            for b in f.elements() {
                assert_eq!(f.mul(a, b), f.mul_reference(a, b));
            }
            if !a.is_zero() {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), FieldElement::ONE);
            }
            assert_eq!(f.trace(a), f.trace_reference(a));
        }
    }
    let f = FieldCtx::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100_000 {
        let (a, b) = (f.random(&mut rng), f.random(&mut rng));
        assert_eq!(f.mul(a, b), f.mul_reference(a, b));
    }
}

/// Minimum distance of 50 random GRS codes, by direct polynomial
/// evaluation of every message, equals `n − k + 1`.
#[test]
fn random_grs_codes_are_mds() {
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    for trial in 0..50 {
        let f = FieldCtx::with_degree(if trial % 2 == 0 { 3 } else { 4 }).unwrap();
        let k = rng.gen_range(1..=if f.q() == 8 { 4 } else { 3 });
        let n = rng.gen_range(k + 1..f.q() as usize);
        let alpha = random_points(&f, n, &mut rng);
        let v = nonzero_vec(&f, n, &mut rng);
        let mut best = usize::MAX;
        for_each_vector(&f, k, |msg| {
            if msg.iter().all(|m| m.is_zero()) {
                return;
            }
            let w = (0..n).filter(|&i| !f.mul(v[i], eval_poly(&f, msg, alpha[i])).is_zero()).count();
            best = best.min(w);
        });
        assert_eq!(best, n - k + 1, "n = {n}, k = {k}, q = {}", f.q());
        let code = GrsCode::new(&f, k, alpha.clone(), v.clone()).unwrap();
        assert_eq!(code.min_distance_bruteforce(&f).unwrap(), n - k + 1);
    }
}

#[test]
fn mds_weight_count_matches_enumeration() {
    let f = FieldCtx::with_degree(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let alpha = random_points(&f, 7, &mut rng);
    let v = nonzero_vec(&f, 7, &mut rng);
    let mut counts = [0u64; 8];
    for_each_vector(&f, 3, |msg| {
        let c: Vec<FieldElement> = (0..7).map(|i| f.mul(v[i], eval_poly(&f, msg, alpha[i]))).collect();
        counts[weight(&c)] += 1;
    });
    for w in 0..=7 {
        assert_eq!(mds_weight_count(7, 5, w, 8).unwrap(), counts[w].into(), "w = {w}");
    }
}

/// Every coset's minimum-weight members, by enumerating all of GF(q)^n.
fn coset_leaders(f: &FieldCtx, h: &Matrix) -> HashMap<Vec<u32>, (usize, Vec<Vec<FieldElement>>)> {
    let mut table: HashMap<Vec<u32>, (usize, Vec<Vec<FieldElement>>)> = HashMap::new();
    for_each_vector(f, h.cols(), |e| {
        let key: Vec<u32> = h.mul_vec(f, e).iter().map(|s| s.bits()).collect();
        let w = weight(e);
        let entry = table.entry(key).or_insert((usize::MAX, Vec::new()));
        if w < entry.0 {
            *entry = (w, vec![e.to_vec()]);
        } else if w == entry.0 {
            entry.1.push(e.to_vec());
        }
    });
    table
}

fn check_decoder(f: &FieldCtx, n: usize, d: usize, syndromes: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let alpha = random_points(f, n, &mut rng);
    let v = nonzero_vec(f, n, &mut rng);
    let h = power_matrix(f, d - 1, &alpha, &v);
    let table = coset_leaders(f, &h);
    assert_eq!(table.len(), (f.q() as usize).pow(d as u32 - 1));
    for i in 0..syndromes {
        let y: Vec<FieldElement> = (0..d - 1).map(|_| f.random(&mut rng)).collect();
        let key: Vec<u32> = y.iter().map(|s| s.bits()).collect();
        let (w, leaders) = &table[&key];
        let got = decode_min_weight(f, &h, &y, n, i as u64).unwrap();
        assert_eq!(got.weight, *w);
        let mut a = got.corrections.clone();
        let mut b = leaders.clone();
        a.sort();
        b.sort();
        assert_eq!(a, b, "syndrome {key:?}");
        assert!(got.chosen < got.corrections.len());
    }
}

/// `decode_min_weight` returns exactly the minimum-weight coset members on
/// 500 random syndromes.
#[test]
fn decoder_matches_exhaustive_coset_search() {
    check_decoder(&FieldCtx::with_degree(3).unwrap(), 7, 4, 250, 7);
    check_decoder(&FieldCtx::with_degree(4).unwrap(), 5, 3, 250, 8);
}

/// `D_k` equals the number of full-support kernel vectors of an `M × k`
/// matrix whose every `M` columns are independent.
#[test]
fn kernel_counts_match_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for (s, kmax) in [(3, 6), (4, 5)] {
        let f = FieldCtx::with_degree(s).unwrap();
        for big_m in 1..=4 {
            for k in 1..=kmax {
                let alpha = random_points(&f, k, &mut rng);
                let v = nonzero_vec(&f, k, &mut rng);
                let beta = power_matrix(&f, big_m, &alpha, &v);
                let mut count = 0u64;
                for_each_vector(&f, k, |x| {
                    if weight(x) == k && beta.mul_vec(&f, x).iter().all(|s| s.is_zero()) {
                        count += 1;
                    }
                });
                assert_eq!(d_k(k, big_m, f.q() as u64), count.into(), "q = {}, M = {big_m}, k = {k}", f.q());
            }
        }
    }
}

/// Inclusion–exclusion over supports: the `q^{k−M}` kernel vectors of an
/// `M × k` matrix with every `M` columns independent split by support size.
#[test]
fn kernel_counts_partition_the_kernel() {
    for q in [8i128, 2048] {
        for big_m in 1..=8usize {
            for k in big_m..=10usize {
                let mut total: i128 = 1;
                for j in big_m + 1..=k {
                    let c = binom(k as i128, j as i128);
                    let dj: i128 = d_k(j, big_m, q as u64).try_into().unwrap();
                    total += c * dj;
                }
                assert_eq!(total, q.pow((k - big_m) as u32));
            }
        }
    }
}

fn binom(n: i128, k: i128) -> i128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

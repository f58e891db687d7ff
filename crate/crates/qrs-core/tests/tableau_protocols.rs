use qrs_core::grs::{random_points, syndrome};
use qrs_core::matrix::Matrix;
use qrs_core::qrs::{build_qrs, qudit_pairing};
use qrs_core::tableau::{
    cat_generators, cat_preparation_run, clean_z_error, consume_cat, extract_block, fault_sets,
    prepare_cat, prepare_cat_on, sweep_cat_preparation, teleport, BlockCode, CatLayout,
    ExtractionParams, FaultAlphabet, FaultEvent, PauliKind, QuditPauli, Runner, Tableau,
};
use qrs_core::{FieldCtx, FieldElement};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_nonzero_vec(f: &FieldCtx, n: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    (0..n).map(|_| f.random_nonzero(rng)).collect()
}

fn random_vec(f: &FieldCtx, n: usize, rng: &mut ChaCha8Rng) -> Vec<FieldElement> {
    (0..n).map(|_| f.random(rng)).collect()
}

fn random_code(f: &FieldCtx, n: usize, d: usize, rng: &mut ChaCha8Rng) -> BlockCode {
    let alpha = random_points(f, n, rng);
    let v = random_nonzero_vec(f, n, rng);
    let code = build_qrs(f, n, d, &alpha, &v).unwrap();
    BlockCode::new(f, code.hx(), code.hz())
}

#[test]
fn cat_rows_commute_for_random_coefficients() {
    let f = FieldCtx::with_degree(5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let c = rng.gen_range(1..=8);
        let g = random_nonzero_vec(&f, c, &mut rng);
        let gens = cat_generators(c, &(0..c).collect::<Vec<_>>(), &g, PauliKind::X);
        for a in &gens {
            for b in &gens {
                assert!(a.commutes(&f, b));
            }
        }
        let t = prepare_cat(&f, &g).unwrap();
        assert!(t.is_consistent(&f));
        for s in &gens {
            assert_eq!(t.peek(&f, s), Some(FieldElement::ZERO));
        }
    }
}

#[test]
fn qubit_cat_is_the_ordinary_cat() {
    let f = FieldCtx::new(1, 0b11).unwrap();
    let g = vec![FieldElement::ONE; 4];
    let t = prepare_cat(&f, &g).unwrap();
    let xxxx = QuditPauli::x_vec(&g);
    assert_eq!(t.peek(&f, &xxxx), Some(FieldElement::ZERO));
    for i in 1..4 {
        let zz = QuditPauli::single(4, PauliKind::Z, &[(i - 1, FieldElement::ONE), (i, FieldElement::ONE)]);
        assert_eq!(t.peek(&f, &zz), Some(FieldElement::ZERO));
    }
    let z0 = QuditPauli::single(4, PauliKind::Z, &[(0, FieldElement::ONE)]);
    assert_eq!(t.peek(&f, &z0), None);
}

#[test]
fn cleaning_leaves_one_z_and_keeps_the_syndrome() {
    let f = FieldCtx::with_degree(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let c = rng.gen_range(2..=9);
        let g = random_nonzero_vec(&f, c, &mut rng);
        let err = QuditPauli::from_parts(random_vec(&f, c, &mut rng), random_vec(&f, c, &mut rng));
        let clean = clean_z_error(&f, &g, &err).unwrap();
        assert!(clean.z_weight() <= 1);
        assert_eq!(clean.x_part(), err.x_part());
        for s in cat_generators(c, &(0..c).collect::<Vec<_>>(), &g, PauliKind::X) {
            assert_eq!(s.symplectic(&f, &clean), s.symplectic(&f, &err));
        }
    }
    let g = vec![f.el(3), f.el(7)];
    let x_only = QuditPauli::x_vec(&[f.el(1), f.el(9)]);
    assert_eq!(clean_z_error(&f, &g, &x_only).unwrap(), x_only);
}

/// Cat consumption on a data block: `η = Σ γ_i η_i` equals the pairing of
/// the check with the planted Z error, and the syndrome entry.
fn check_eta_identity(f: &FieldCtx, n: usize, d: usize, trials: usize, seed: u64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let code = random_code(f, n, d, &mut rng);
    let data: Vec<usize> = (0..n).collect();
    let mut prepared = Vec::new();
    for j in 0..code.hx.rows() {
        let row = code.hx.row(j).to_vec();
        let (idx, gammas): (Vec<usize>, Vec<FieldElement>) =
            row.iter().enumerate().filter(|(_, g)| !g.is_zero()).map(|(i, &g)| (i, g)).unzip();
        let mut t = Tableau::product(2 * n, PauliKind::Z);
        code.encode(f, &mut t, &data, &mut rng);
        let cat: Vec<usize> = idx.iter().map(|&i| n + i).collect();
        prepare_cat_on(f, &mut t, &cat, &gammas, PauliKind::X, &mut rng).unwrap();
        prepared.push((row, idx, gammas, cat, t));
    }
    for trial in 0..trials {
        let (row, idx, gammas, cat, t) = &prepared[trial % prepared.len()];
        let e = random_vec(f, n, &mut rng);
        let mut run = Runner::new(f, t.clone(), &[], ChaCha8Rng::seed_from_u64(trial as u64));
        let mut planted = QuditPauli::identity(2 * n);
        for i in 0..n {
            planted.set(i, FieldElement::ZERO, e[i]);
        }
        run.apply(&planted);
        let block: Vec<usize> = idx.clone();
        let eta = consume_cat(&mut run, &block, cat, gammas, PauliKind::X);
        assert_eq!(eta, qudit_pairing(f, row, &e).unwrap());
        let y = syndrome(f, &code.hx, &e).unwrap();
        assert_eq!(eta, y[trial % prepared.len()]);
        // The block keeps its stabilizers after the frame update.
        let labels = code.labels(f, &run.tab, &data).unwrap();
        let expected: Vec<FieldElement> =
            code.generators(2 * n, &data).iter().map(|g| g.symplectic(f, &planted)).collect();
        assert_eq!(labels, expected);
    }
}

#[test]
fn cat_consumption_reports_the_pairing() {
    let f = FieldCtx::with_degree(4).unwrap();
    for (d, seed) in [(3, 1), (4, 2)] {
        check_eta_identity(&f, 8, d, 100, seed);
    }
    let big = FieldCtx::default();
    check_eta_identity(&big, 20, 5, 100, 3);
}

fn random_pauli(f: &FieldCtx, n: usize, rng: &mut ChaCha8Rng) -> QuditPauli {
    QuditPauli::from_parts(random_vec(f, n, rng), random_vec(f, n, rng))
}

#[test]
fn teleportation_transports_the_frame() {
    let f = FieldCtx::with_degree(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let n = 7;
    let code = random_code(&f, n, 3, &mut rng);
    let (data, via, dest): (Vec<usize>, Vec<usize>, Vec<usize>) =
        ((0..n).collect(), (n..2 * n).collect(), (2 * n..3 * n).collect());
    for trial in 0..30 {
        let mut t = Tableau::product(3 * n, PauliKind::Z);
        code.encode(&f, &mut t, &data, &mut rng);
        let e = random_pauli(&f, n, &mut rng);
        t.apply_pauli(&f, &e.embed(3 * n, &data));
        let before = code.labels(&f, &t, &data).unwrap();
        let mut run = Runner::new(&f, t, &[], ChaCha8Rng::seed_from_u64(trial));
        teleport(&mut run, &data, &via, &dest);
        run.finish().unwrap();
        assert_eq!(code.labels(&f, &run.tab, &dest).unwrap(), before);
    }
}

/// A single fault during teleportation only disturbs its own column: the
/// change in the destination labels is explained by a Pauli on that column.
#[test]
fn teleportation_faults_stay_in_their_column() {
    let f = FieldCtx::with_degree(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let n = 6;
    let code = random_code(&f, n, 3, &mut rng);
    let (data, via, dest): (Vec<usize>, Vec<usize>, Vec<usize>) =
        ((0..n).collect(), (n..2 * n).collect(), (2 * n..3 * n).collect());
    let mut base = Tableau::product(3 * n, PauliKind::Z);
    code.encode(&f, &mut base, &data, &mut rng);
    let gens = code.generators(n, &(0..n).collect::<Vec<_>>());
    let mut clean = Runner::new(&f, base.clone(), &[], ChaCha8Rng::seed_from_u64(0));
    teleport(&mut clean, &data, &via, &dest);
    let reference = code.labels(&f, &clean.tab, &dest).unwrap();
    let mut checked = 0;
    for step in &clean.transcript {
        for _ in 0..20 {
            let pauli = step.qudits.iter().map(|&q| (q, f.random(&mut rng), f.random(&mut rng))).collect();
            let fault = [FaultEvent { step: step.step, pauli, flip: f.random(&mut rng) }];
            let mut run = Runner::new(&f, base.clone(), &fault, ChaCha8Rng::seed_from_u64(0));
            teleport(&mut run, &data, &via, &dest);
            run.finish().unwrap();
            let shift: Vec<FieldElement> = code
                .labels(&f, &run.tab, &dest)
                .unwrap()
                .iter()
                .zip(&reference)
                .map(|(&a, &b)| f.add(a, b))
                .collect();
            let column = step.qudits.iter().map(|&q| q % n).next().unwrap();
            // shift_r = r_z[col]·x + r_x[col]·z for unknown (x, z).
            let a = Matrix::from_rows(
                &gens.iter().map(|g| vec![g.z_part()[column], g.x_part()[column]]).collect::<Vec<_>>(),
            );
            assert!(a.solve(&f, &shift).is_some(), "fault at step {} spread", step.step);
            checked += 1;
        }
    }
    assert!(checked > 0);
}

#[test]
fn single_faults_with_one_round_leave_at_most_one_x() {
    let f = FieldCtx::with_degree(3).unwrap();
    let g: Vec<FieldElement> = [3, 5, 1, 6].iter().map(|&i| f.el(i)).collect();
    let report = sweep_cat_preparation(&f, &g, 1, 1, FaultAlphabet::Full, 1).unwrap();
    // 3 + 3·3 two-qudit steps (8⁵ − 1 events each) and 3·2 one-qudit steps (8³ − 1).
    assert_eq!(report.runs, 12 * 32_767 + 6 * 511);
    assert!(report.accepted > 0);
    assert!(report.violations.is_empty(), "{:?}", report.violations.first().map(|v| &v.0));
}

#[test]
fn single_faults_without_verification_spread() {
    let f = FieldCtx::with_degree(3).unwrap();
    let g: Vec<FieldElement> = [3, 5, 1, 6].iter().map(|&i| f.el(i)).collect();
    let report = sweep_cat_preparation(&f, &g, 0, 1, FaultAlphabet::Elementary, 1).unwrap();
    assert!(!report.violations.is_empty());
    let worst = report.violations.iter().filter_map(|v| v.1.residual.as_ref()).map(|r| r.x_weight).max();
    assert!(worst >= Some(2));
}

#[test]
fn double_faults_with_two_rounds_leave_at_most_two_x() {
    let f = FieldCtx::with_degree(2).unwrap();
    let g: Vec<FieldElement> = [1, 2, 3, 1].iter().map(|&i| f.el(i)).collect();
    let report = sweep_cat_preparation(&f, &g, 2, 2, FaultAlphabet::Elementary, 3).unwrap();
    assert!(report.violations.is_empty(), "{:?}", report.violations.first().map(|v| &v.0));
}

/// Faults on the ancilla-pair measurement never put X on the cat, and
/// faults on a cat–ancilla measurement put X only on the cat qudit touched.
#[test]
fn verification_faults_spread_as_expected() {
    let f = FieldCtx::with_degree(3).unwrap();
    let g: Vec<FieldElement> = [3, 5, 1, 6].iter().map(|&i| f.el(i)).collect();
    let clean = cat_preparation_run(&f, &g, 1, &[], 9).unwrap();
    let mut seen = [0usize; 2];
    for step in &clean.transcript {
        let kind = match step.label {
            "ancilla_zazb" => 0,
            "cat_ancilla_zz" => 1,
            _ => continue,
        };
        for set in fault_sets(&f, std::slice::from_ref(step), 1, FaultAlphabet::Full) {
            let out = cat_preparation_run(&f, &g, 1, &set, 9).unwrap();
            let residual = out.residual.expect("still a cat");
            let support: Vec<usize> = (0..4).filter(|&i| !residual.x_error[i].is_zero()).collect();
            if kind == 0 {
                assert!(support.is_empty(), "step {}", step.step);
            } else {
                let touched = step.qudits.iter().copied().filter(|&q| q < 4).collect::<Vec<_>>();
                assert!(support.iter().all(|q| touched.contains(q)), "step {}", step.step);
            }
            seen[kind] += 1;
        }
    }
    assert!(seen[0] > 0 && seen[1] > 0);
}

#[test]
fn block_extraction_survives_a_flipped_check() {
    let f = FieldCtx::with_degree(4).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let n = 8;
    let d = 4;
    let code = random_code(&f, n, d, &mut rng);
    let beta = |rng: &mut ChaCha8Rng| Matrix::from_rows(&[random_nonzero_vec(&f, d - 1, rng)]);
    let params =
        ExtractionParams { beta_x: beta(&mut rng), beta_z: beta(&mut rng), cat_rounds: 1, max_attempts: 10 };
    let data: Vec<usize> = (0..n).collect();
    let layout = CatLayout { cat: (n..2 * n).collect(), ancillas: (2 * n..3 * n).collect() };
    let mut base = Tableau::product(3 * n, PauliKind::Z);
    code.encode(&f, &mut base, &data, &mut rng);
    let e = random_pauli(&f, n, &mut rng);
    base.apply_pauli(&f, &e.embed(3 * n, &data));
    let want_x = syndrome(&f, &code.hx, e.z_part()).unwrap();
    let want_z = syndrome(&f, &code.hz, e.x_part()).unwrap();

    let mut run = Runner::new(&f, base.clone(), &[], ChaCha8Rng::seed_from_u64(1));
    let clean = extract_block(&mut run, &code, &data, &layout, &params).unwrap();
    assert_eq!((clean.y_x.clone(), clean.y_z.clone()), (want_x.clone(), want_z.clone()));
    assert_eq!(clean.attempts, (1, 1));

    let flips: Vec<usize> = clean
        .transcript
        .iter()
        .filter(|s| s.label == "data_cat_xx")
        .map(|s| s.step)
        .collect();
    for &step in flips.iter().step_by(3) {
        let fault = [FaultEvent::flip(step, f.el(5))];
        let mut run = Runner::new(&f, base.clone(), &fault, ChaCha8Rng::seed_from_u64(1));
        let out = extract_block(&mut run, &code, &data, &layout, &params).unwrap();
        run.finish().unwrap();
        assert_eq!((out.y_x, out.y_z), (want_x.clone(), want_z.clone()));
        assert!(out.attempts.0 + out.attempts.1 >= 3, "flip at {step} went unnoticed");
    }
}

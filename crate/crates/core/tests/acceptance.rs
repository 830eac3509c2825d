//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line.
//! Everything is exact; the only tolerances are literal equality.

use hurwitz_forms::fuzz::{eval_move, invariance_fuzz, random_kernel_vector, verify_single_move};
use hurwitz_forms::hurwitz::HurwitzTuple;
use hurwitz_forms::invariant::{
    compute_invariant, degenerate_submodule, invariant_ranks, kernel, unimodularity_certificate,
    InvariantOptions, QEvaluator,
};
use hurwitz_forms::linalg::Matrix;
use hurwitz_forms::meyer::{fibration_signature, meyer_cocycle, prop_b1_check, random_symplectic};
use hurwitz_forms::reps::{
    builtin_row, builtin_tuple, coinvariants_rank, evaluate_tuple, load_representation_json,
    Representation,
};
use hurwitz_forms::ring::{RingDescriptor, RingElement};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The eleven table rows: (genus, row label, expected class, expected sigma).
const ROWS: [(u32, &str, &str, i64); 11] = [
    (2, "xi1", "(-1)^12 0^64", -12),
    (2, "xi2", "(-1)^20 1^2 0^94", -18),
    (2, "xi3", "H_1^4 (E8)^3 0^124", -24),
    (2, "xi1#id:xi1", "(-1)^28 1^4 0^124", -24),
    (3, "xi1", "(E8)^2 0^146", -16),
    (3, "xi1#id:xi1", "H_1^6 (E8)^4 0^286", -32),
    (3, "xi1#d:xi1", "1^6 (-1)^38 0^286", -32),
    (3, "xi2", "H_1^6 (E8)^4 0^286", -32),
    (3, "xi3", "H_1^12 (E8)^6 0^426", -48),
    (3, "xi2#id:xi1", "H_1^12 (E8)^6 0^426", -48),
    (3, "xi2#d:xi1", "1^12 (-1)^60 0^426", -48),
];

fn report(criterion: u32, desc: &str, pass: bool, detail: &str) {
    let tag = if pass { "PASS" } else { "FAIL" };
    println!("{tag} criterion {criterion}: {desc}{detail}");
    assert!(pass, "criterion {criterion} failed: {desc}{detail}");
}

fn symplectic_z(genus: u32) -> Representation {
    Representation::symplectic(genus, RingDescriptor::Integer).unwrap()
}

#[test]
fn criterion_1_table_reproduction() {
    let mut detail = String::new();
    let mut ok = true;
    for (genus, label, expected, _) in ROWS {
        let started = std::time::Instant::now();
        let rep = symplectic_z(genus);
        let t = builtin_row(genus, label).unwrap();
        let ev = evaluate_tuple(&t, &rep).unwrap();
        let inv = compute_invariant(
            &ev,
            rep.psi.as_ref().unwrap(),
            Some(genus),
            &InvariantOptions::default(),
        )
        .unwrap();
        let matched = inv.form_class.matches_string(expected);
        detail.push_str(&format!(
            "\n  g={genus} {label}: computed '{}' expected '{}' {} ({:?})",
            inv.form_class.class_string,
            expected,
            if matched { "ok" } else { "MISMATCH" },
            started.elapsed(),
        ));
        if inv.form_class.definite_even_disclaimer {
            detail.push_str(" [definite even rank>=16: class by rank+parity+signature]");
        }
        ok &= matched;
    }
    report(1, "Table reproduction (symplectic column over Z)", ok, &detail);
}

#[test]
fn criterion_2_signature_identity() {
    let mut detail = String::new();
    let mut ok = true;
    for (genus, label, _, sigma) in ROWS {
        let rep = symplectic_z(genus);
        let t = builtin_row(genus, label).unwrap();
        let ev = evaluate_tuple(&t, &rep).unwrap();
        let r = fibration_signature(&ev).unwrap();
        let pass = r.agree && r.sigma_meyer == sigma && r.sigma_form == sigma;
        detail.push_str(&format!(
            "\n  g={genus} {label}: sigma_meyer={} sigma_form={} expected={} {}",
            r.sigma_meyer,
            r.sigma_form,
            sigma,
            if pass { "ok" } else { "MISMATCH" }
        ));
        ok &= pass;
    }
    report(2, "signature identity (cocycle sum = form route = table)", ok, &detail);
}

#[test]
fn criterion_3_rank_formulas() {
    let mut ok = true;
    let mut detail = String::new();
    let mut check = |genus: u32, t: &HurwitzTuple, what: &str| {
        let rep = symplectic_z(genus);
        let ev = evaluate_tuple(t, &rep).unwrap();
        let (kr, mz) = invariant_ranks(&ev).unwrap();
        let b1 = coinvariants_rank(&ev).unwrap() as i64;
        let (m_ns, _) = ev.type_count();
        let g = genus as i64;
        let m = ev.len() as i64;
        let pred_mz = m_ns as i64 - 4 * g + 2 * b1;
        let pred_kr = 2 * g * m - 2 * g + b1;
        let pass = mz as i64 == pred_mz && kr as i64 == pred_kr;
        if !pass {
            detail.push_str(&format!(
                "\n  {what}: mz={mz} (pred {pred_mz}) kr={kr} (pred {pred_kr})"
            ));
        }
        ok &= pass;
    };
    for genus in [2u32, 3] {
        for name in ["xi1", "xi2", "xi3"] {
            let t = builtin_tuple(genus, name).unwrap();
            check(genus, &t, &format!("g={genus} {name}"));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(1234);
    let names = ["xi1", "xi2", "xi3"];
    for i in 0..50 {
        let genus = if rng.gen_bool(0.5) { 2 } else { 3 };
        let a = builtin_tuple(genus, names[rng.gen_range(0..3)]).unwrap();
        let b = builtin_tuple(genus, names[rng.gen_range(0..3)]).unwrap();
        let h_len = rng.gen_range(0..=3usize);
        let letters: Vec<hurwitz_forms::hurwitz::SignedLetter> = (0..h_len)
            .map(|_| hurwitz_forms::hurwitz::SignedLetter {
                letter: rng.gen_range(0..a.alphabet.len() as u16),
                inv: rng.gen_bool(0.5),
            })
            .collect();
        let h = hurwitz_forms::hurwitz::Word::from_letters(&letters);
        let sum = a.fiber_sum(&b, &h).unwrap();
        check(genus, &sum, &format!("random sum #{i} (g={genus})"));
    }
    report(
        3,
        "rank formulas on builtins and 50 random fiber sums",
        ok,
        &detail,
    );
}

#[test]
fn criterion_4_unimodularity() {
    let mut ok = true;
    let mut detail = String::new();
    for (genus, label, _, _) in ROWS {
        let rep = symplectic_z(genus);
        let t = builtin_row(genus, label).unwrap();
        let ev = evaluate_tuple(&t, &rep).unwrap();
        let psi = rep.psi.as_ref().unwrap();
        let inv =
            compute_invariant(&ev, psi, Some(genus), &InvariantOptions::default()).unwrap();
        let cert = unimodularity_certificate(&ev, psi, &inv).unwrap();
        let pass =
            cert.det_is_unit && cert.all_cokernels_torsion_free && cert.psi_unimodular;
        detail.push_str(&format!(
            "\n  g={genus} {label}: det(W)={} cokernels torsion-free={} ({})",
            cert.det_w
                .as_ref()
                .map(|d| d.to_string())
                .unwrap_or_else(|| "-".into()),
            cert.all_cokernels_torsion_free,
            cert.verdict
        ));
        ok &= pass;
    }
    report(4, "unimodularity: det(W) = ±1 with torsion-free cokernel certificate", ok, &detail);
}

#[test]
fn criterion_5_hurwitz_invariance_fuzz() {
    let mut ok = true;
    let mut detail = String::new();
    for (genus, seed) in [(2u32, 101u64), (3, 102)] {
        let rep = symplectic_z(genus);
        let t = builtin_tuple(genus, "xi1").unwrap();
        let r = invariance_fuzz(&t, &rep, None, 500, 20, 10, seed).unwrap();
        let pass = r.passed();
        detail.push_str(&format!(
            "\n  g={genus} xi1: 500 steps, class '{}' -> '{}', {} base-change pairs, failures: {:?}",
            r.baseline_summary,
            r.walked_summary,
            r.base_change_pairs_checked,
            r.failures
        ));
        ok &= pass;
    }
    report(
        5,
        "500-step Hurwitz fuzz preserves the invariant; Q = Q'∘(B⊗B) on random moves",
        ok,
        &detail,
    );
}

#[test]
fn criterion_6_ell_independence() {
    let mut ok = true;
    let mut detail = String::new();
    for name in ["xi1", "xi2"] {
        let rep = symplectic_z(2);
        let t = builtin_tuple(2, name).unwrap();
        let ev = evaluate_tuple(&t, &rep).unwrap();
        let psi = rep.psi.as_ref().unwrap();
        let m = ev.len();
        let w1 = compute_invariant(&ev, psi, Some(2), &InvariantOptions { ell: 1 })
            .unwrap()
            .w;
        for ell in [m.div_ceil(2), m] {
            let we = compute_invariant(&ev, psi, Some(2), &InvariantOptions { ell })
                .unwrap()
                .w;
            let pass = w1 == we;
            if !pass {
                detail.push_str(&format!("\n  {name}: W at ell=1 differs from ell={ell}"));
            }
            ok &= pass;
        }
    }
    report(
        6,
        "W is entrywise independent of ell on g=2 xi1 and xi2",
        ok,
        &detail,
    );
}

#[test]
fn criterion_7_meyer_cocycle() {
    let mut ok = true;
    let mut detail = String::new();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for genus in [2u32, 3] {
        let id = Matrix::identity(RingDescriptor::Integer, 2 * genus as usize);
        for trial in 0..25 {
            let a = random_symplectic(genus, 12, &mut rng).unwrap();
            let b = random_symplectic(genus, 12, &mut rng).unwrap();
            let c = random_symplectic(genus, 12, &mut rng).unwrap();
            if meyer_cocycle(&id, &b).unwrap() != 0 || meyer_cocycle(&a, &id).unwrap() != 0 {
                detail.push_str(&format!("\n  g={genus} #{trial}: normalization failed"));
                ok = false;
            }
            let lhs = meyer_cocycle(&a, &b).unwrap()
                + meyer_cocycle(&a.mul(&b).unwrap(), &c).unwrap();
            let rhs = meyer_cocycle(&a, &b.mul(&c).unwrap()).unwrap()
                + meyer_cocycle(&b, &c).unwrap();
            if lhs != rhs {
                detail.push_str(&format!("\n  g={genus} #{trial}: cocycle identity failed"));
                ok = false;
            }
        }
    }
    for trial in 0..25 {
        let a = random_symplectic(2, 10, &mut rng).unwrap();
        let b = random_symplectic(2, 10, &mut rng).unwrap();
        if !prop_b1_check(&a, &b).unwrap() {
            detail.push_str(&format!("\n  B.1 pair #{trial}: isomorphism failed"));
            ok = false;
        }
    }
    report(
        7,
        "Meyer cocycle normalization + identity (50 triples) and B.1 (25 pairs)",
        ok,
        &detail,
    );
}

#[test]
fn criterion_8_quantum_pipeline() {
    let mut ok = true;
    let mut detail = String::new();
    // braid relation over Z[zeta16]
    let rep = Representation::quantum_su2_level2_g1().unwrap();
    let c1 = rep.generator(0);
    let c2 = rep.generator(1);
    let braid = c1.mul(c2).unwrap().mul(c1).unwrap() == c2.mul(c1).unwrap().mul(c2).unwrap();
    if !braid {
        detail.push_str("\n  braid relation failed");
    }
    ok &= braid;
    // Eq.-(5) base change is a ring homomorphism on random elements
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut hom_ok = true;
    for _ in 0..200 {
        let mut coeffs = [0i64; 8];
        let mut coeffs2 = [0i64; 8];
        for i in 0..8 {
            coeffs[i] = rng.gen_range(-9..=9);
            coeffs2[i] = rng.gen_range(-9..=9);
        }
        let a = RingElement::cyclotomic(coeffs);
        let b = RingElement::cyclotomic(coeffs2);
        let bc = |x: &RingElement| x.base_change_eq5(2).unwrap();
        if bc(&a.mul(&b).unwrap()) != bc(&a).mul(&bc(&b)).unwrap()
            || bc(&a.add(&b).unwrap()) != bc(&a).add(&bc(&b)).unwrap()
        {
            hom_ok = false;
        }
    }
    if !hom_ok {
        detail.push_str("\n  base change is not a homomorphism");
    }
    ok &= hom_ok;
    // reduced twists square to the identity
    let reduced = rep.reduce_eq5(2).unwrap();
    let squares = (0..2u16).all(|i| {
        let m = reduced.generator(i);
        m.mul(m).unwrap().is_identity()
    });
    if !squares {
        detail.push_str("\n  reduced twists do not square to identity");
    }
    ok &= squares;
    // the shipped psi fixture matches the reduction of the printed matrices
    let fixture = include_str!("fixtures/quantum_reduced_psi.json");
    let loaded = load_representation_json(fixture).unwrap();
    let same_matrices = (0..2u16).all(|i| loaded.generator(i) == reduced.generator(i));
    if !same_matrices {
        detail.push_str("\n  fixture matrices differ from the Eq.-(5) reduction");
    }
    ok &= same_matrices;
    // full invariance fuzz over F2[y]/(y^2) with the file-loaded psi
    let al = loaded.alphabet.clone();
    let c1_idx = al.index_of("c1").unwrap();
    let c2_idx = al.index_of("c2").unwrap();
    let t = HurwitzTuple::new(
        al,
        None,
        vec![
            hurwitz_forms::hurwitz::TwistWord::plain(c1_idx),
            hurwitz_forms::hurwitz::TwistWord::plain(c1_idx),
            hurwitz_forms::hurwitz::TwistWord::plain(c2_idx),
            hurwitz_forms::hurwitz::TwistWord::plain(c2_idx),
        ],
    )
    .unwrap();
    let r = invariance_fuzz(&t, &loaded, None, 500, 20, 10, 88).unwrap();
    if !r.passed() {
        detail.push_str(&format!("\n  F2y fuzz failures: {:?}", r.failures));
    }
    detail.push_str(&format!(
        "\n  braid ok; base change hom ok; squares ok; F2y fuzz class '{}' (stable: {})",
        r.baseline_summary, r.classification_stable
    ));
    ok &= r.passed();
    report(
        8,
        "quantum pipeline: braid over Z[zeta16], Eq.(5) homomorphism, squares, F2y fuzz",
        ok,
        &detail,
    );
}

#[test]
fn criterion_9_degenerate_radical() {
    let mut ok = true;
    let mut detail = String::new();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for (genus, label, _, _) in ROWS {
        let rep = symplectic_z(genus);
        let t = builtin_row(genus, label).unwrap();
        let ev = evaluate_tuple(&t, &rep).unwrap();
        let psi = rep.psi.as_ref().unwrap();
        let kern = kernel(&ev).unwrap();
        let degen = degenerate_submodule(&ev).unwrap();
        let degen_rows: Vec<Vec<RingElement>> =
            (0..degen.rows()).map(|i| degen.row_vec(i)).collect();
        let rand_rows: Vec<Vec<RingElement>> = (0..100)
            .map(|_| random_kernel_vector(&kern.basis, &mut rng).unwrap())
            .collect();
        let qe = QEvaluator::new(&ev, psi, 1).unwrap();
        let left = qe.gram(&degen_rows, &rand_rows).unwrap();
        let right = qe.gram(&rand_rows, &degen_rows).unwrap();
        let pass = left.is_zero() && right.is_zero();
        if !pass {
            detail.push_str(&format!("\n  g={genus} {label}: nonzero radical pairing"));
        }
        ok &= pass;
    }
    report(
        9,
        "diagonal and componentwise-fixed vectors pair to zero against 100 random kernel vectors",
        ok,
        &detail,
    );
}

/// The verifier itself must catch a broken move (harness meta-check backing
/// the fuzz criteria).
#[test]
fn fuzz_harness_detects_corruption() {
    let rep = symplectic_z(2);
    let t = builtin_tuple(2, "xi1").unwrap();
    let ev = evaluate_tuple(&t, &rep).unwrap();
    let psi = rep.psi.clone().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    // correct move verifies
    let spec = hurwitz_forms::hurwitz::MoveSpec::Elementary {
        index: 3,
        direction: hurwitz_forms::hurwitz::MoveDirection::Forward,
    };
    let mv = eval_move(&spec, &rep).unwrap();
    assert!(verify_single_move(&ev, &mv, &psi, 4, &mut rng).is_ok());
}

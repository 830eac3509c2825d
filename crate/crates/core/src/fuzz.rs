//! Invariance fuzzing: random Hurwitz walks must preserve the classification
//! data, single moves must verify Q = Q'∘(B⊗B) through the explicit base
//! change, and every move must preserve the evaluated product.

use crate::error::{Error, Result};
use crate::hurwitz::{HurwitzTuple, MoveSpec};
use crate::invariant::{
    base_change_map, compute_invariant, gamma_k, kernel, EvalMove, InvariantOptions, QEvaluator,
};
use crate::linalg::Matrix;
use crate::reps::{evaluate_tuple, EvaluatedTuple, Representation};
use crate::ring::RingElement;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug)]
pub struct FuzzReport {
    pub steps: u64,
    pub seed: u64,
    pub classification_stable: bool,
    pub product_preserved: bool,
    pub base_change_moves_checked: usize,
    pub base_change_pairs_checked: usize,
    pub failures: Vec<String>,
    pub baseline_summary: String,
    pub walked_summary: String,
}

impl FuzzReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// The criterion-style invariance suite: walk `steps` random moves, compare
/// the invariant key, then verify `moves` random single moves with
/// `pairs_per_move` random kernel-vector pairs each.
pub fn invariance_fuzz(
    tuple: &HurwitzTuple,
    rep: &Representation,
    psi: Option<&Matrix>,
    steps: u64,
    moves: usize,
    pairs_per_move: usize,
    seed: u64,
) -> Result<FuzzReport> {
    let psi = match psi.or(rep.psi.as_ref()) {
        Some(p) => p.clone(),
        None => return Err(Error::Schema("no psi available for fuzzing".into())),
    };
    let mut failures = Vec::new();
    let ev = evaluate_tuple(tuple, rep)?;
    let baseline = compute_invariant(&ev, &psi, rep.genus, &InvariantOptions::default())?;
    let product_before = ev.product()?;
    let walked = tuple.random_walk(steps, seed);
    let ev_walked = evaluate_tuple(&walked, rep)?;
    // relation (1) conjugates the product; after global moves the product is
    // conjugate to the identity, hence still the identity
    let product_preserved = ev_walked.product()? == product_before;
    if !product_preserved {
        failures.push("evaluated product changed under the walk".into());
    }
    let after = compute_invariant(&ev_walked, &psi, rep.genus, &InvariantOptions::default())?;
    let classification_stable = baseline.invariance_key() == after.invariance_key();
    if !classification_stable {
        failures.push(format!(
            "invariant key changed: {:?} vs {:?}",
            baseline.invariance_key(),
            after.invariance_key()
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
    let mut pairs_checked = 0usize;
    for k in 0..moves {
        let spec = tuple.random_move(&mut rng);
        let mv = eval_move(&spec, rep)?;
        match verify_single_move(&ev, &mv, &psi, pairs_per_move, &mut rng) {
            Ok(n) => pairs_checked += n,
            Err(msg) => failures.push(format!("move {k}: {msg}")),
        }
    }
    Ok(FuzzReport {
        steps,
        seed,
        classification_stable,
        product_preserved,
        base_change_moves_checked: moves,
        base_change_pairs_checked: pairs_checked,
        failures,
        baseline_summary: baseline.form_class.class_string.clone(),
        walked_summary: after.form_class.class_string.clone(),
    })
}

/// Evaluate a symbolic move for the matrix-level base change.
pub fn eval_move(spec: &MoveSpec, rep: &Representation) -> Result<EvalMove> {
    match spec {
        MoveSpec::Elementary { index, direction } => Ok(match direction {
            crate::hurwitz::MoveDirection::Forward => EvalMove::Forward(*index),
            crate::hurwitz::MoveDirection::Backward => EvalMove::Backward(*index),
        }),
        MoveSpec::GlobalConjugate(w) => {
            // evaluate the word through a one-entry helper tuple
            let letters = w
                .flatten_limited(1 << 20)
                .ok_or_else(|| Error::Schema("conjugator too long to evaluate".into()))?;
            let mut m = Matrix::identity(rep.ring, rep.dim);
            for l in letters {
                let f = if l.inv {
                    rep.generator_inverse(l.letter)
                } else {
                    rep.generator(l.letter)
                };
                m = m.mul(f)?;
            }
            Ok(EvalMove::Conjugate(m))
        }
    }
}

/// Check one move: B maps the kernel into the moved kernel and Q agrees on
/// `pairs` random kernel-vector pairs. Returns the number of pairs checked.
pub fn verify_single_move(
    ev: &EvaluatedTuple,
    mv: &EvalMove,
    psi: &Matrix,
    pairs: usize,
    rng: &mut ChaCha8Rng,
) -> std::result::Result<usize, String> {
    let mut run = || -> Result<std::result::Result<usize, String>> {
        let kern = kernel(ev)?;
        let (b, moved) = base_change_map(ev, mv)?;
        let g1_moved = gamma_k(&moved, 1)?;
        let qe = QEvaluator::new(ev, psi, 1)?;
        let qe_moved = QEvaluator::new(&moved, psi, 1)?;
        let mut xs = Vec::with_capacity(pairs);
        let mut ys = Vec::with_capacity(pairs);
        for _ in 0..pairs {
            xs.push(random_kernel_vector(&kern.basis, rng)?);
            ys.push(random_kernel_vector(&kern.basis, rng)?);
        }
        let xs_b: Vec<Vec<RingElement>> = xs
            .iter()
            .map(|v| b.row_times(v))
            .collect::<Result<_>>()?;
        let ys_b: Vec<Vec<RingElement>> = ys
            .iter()
            .map(|v| b.row_times(v))
            .collect::<Result<_>>()?;
        for im in xs_b.iter().chain(&ys_b) {
            if g1_moved.row_times(im)?.iter().any(|x| !x.is_zero()) {
                return Ok(Err("B image left the moved kernel".into()));
            }
        }
        let before = qe.gram(&xs, &ys)?;
        let after = qe_moved.gram(&xs_b, &ys_b)?;
        if before != after {
            return Ok(Err("Q != Q' o (B x B)".into()));
        }
        Ok(Ok(pairs))
    };
    match run() {
        Ok(r) => r,
        Err(e) => Err(format!("verification error: {e}")),
    }
}

/// A random integer combination of kernel basis rows (coefficients in ±3).
pub fn random_kernel_vector(
    basis: &Matrix,
    rng: &mut ChaCha8Rng,
) -> Result<Vec<RingElement>> {
    let desc = basis.descriptor();
    let n = basis.cols();
    let mut out = vec![RingElement::zero(desc); n];
    for i in 0..basis.rows() {
        let c = rng.gen_range(-3i64..=3);
        if c == 0 {
            continue;
        }
        let ce = RingElement::from_i64(desc, c);
        for (o, x) in out.iter_mut().zip(basis.row(i)) {
            if x.is_zero() {
                continue;
            }
            *o = o.add(&ce.mul(x)?)?;
        }
    }
    Ok(out)
}

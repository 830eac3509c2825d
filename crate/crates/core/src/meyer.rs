//! The signature 2-cocycle on Sp(2g,ℤ): the space V_{A,B}, its symmetric
//! form, the cocycle value as its signature, the fibration signature via the
//! cocycle sum, and the cross-check against the bilinear-form route.
//!
//! The form on V_{A,B} = {(x,y) : x(1−A) + y(B−1) = 0} is
//! ⟨(x₁,y₁),(x₂,y₂)⟩ = ω(x₁ + y₁·B, y₂·(1−B)), which is the form the pairing
//! Q_ω induces through the 3-tuple splitting; it is symmetric on V.

use crate::error::{Error, Result};
use crate::invariant::{compute_invariant, kernel, InvariantOptions, QEvaluator};
use crate::linalg::kernel::kernel_basis;
use crate::linalg::signature::{rational_rank, signature};
use crate::linalg::Matrix;
use crate::reps::{omega_matrix, transvection, EvaluatedTuple};
use crate::ring::{RingDescriptor, RingElement};
use num_integer::Integer;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// ω-preservation check: M·Ω·Mᵀ = Ω.
pub fn is_symplectic(m: &Matrix) -> Result<bool> {
    if !m.is_square() || m.rows() % 2 != 0 {
        return Ok(false);
    }
    let g = (m.rows() / 2) as u32;
    let omega = omega_matrix(m.descriptor(), g);
    Ok(m.mul(&omega)?.mul(&m.transpose())? == omega)
}

/// The space V_{A,B} with its symmetric form, over ℚ.
#[derive(Clone, Debug)]
pub struct MeyerFormData {
    pub a: Matrix,
    pub b: Matrix,
    /// Basis rows of V_{A,B} ⊂ ℚ^{2g} × ℚ^{2g}.
    pub v_basis: Matrix,
    /// Gram matrix of ⟨,⟩ on the basis.
    pub form: Matrix,
}

/// Build V_{A,B} and its form for symplectic integer matrices A, B.
pub fn meyer_form(a: &Matrix, b: &Matrix) -> Result<MeyerFormData> {
    if a.descriptor() != RingDescriptor::Integer || b.descriptor() != RingDescriptor::Integer {
        return Err(Error::UnsupportedRing {
            op: "meyer_form",
            ring: a.descriptor().name(),
        });
    }
    if !is_symplectic(a)? || !is_symplectic(b)? {
        return Err(Error::NotSymplectic);
    }
    let q = RingDescriptor::Rational;
    let to_q = |m: &Matrix| {
        m.map_entries(q, |e| {
            Ok(RingElement::from_bigint(q, e.as_bigint().unwrap()))
        })
    };
    let aq = to_q(a)?;
    let bq = to_q(b)?;
    let d = aq.rows();
    let g = (d / 2) as u32;
    let ident = Matrix::identity(q, d);
    // rows (x, y) with x(1−A) + y(B−1) = 0: left kernel of [(1−A); (B−1)]
    let stacked = ident.sub(&aq)?.vstack(&bq.sub(&ident)?)?;
    let v_basis = kernel_basis(&stacked)?.rows;
    let omega = omega_matrix(q, g);
    let one_minus_b = ident.sub(&bq)?;
    let nv = v_basis.rows();
    let mut form = Matrix::zeros(q, nv, nv);
    for i in 0..nv {
        let u = v_basis.row(i);
        let (x1, y1) = u.split_at(d);
        let left = add_vecs(x1, &bq.row_times(y1)?)?;
        for j in 0..nv {
            let v = v_basis.row(j);
            let y2 = &v[d..];
            let right = one_minus_b.row_times(y2)?;
            // ω(left, right)
            let mut acc = RingElement::zero(q);
            for (ai, li) in left.iter().enumerate() {
                if li.is_zero() {
                    continue;
                }
                for (bj, rj) in right.iter().enumerate() {
                    let w = omega.get(ai, bj);
                    if w.is_zero() || rj.is_zero() {
                        continue;
                    }
                    acc = acc.add(&li.mul(w)?.mul(rj)?)?;
                }
            }
            form.set(i, j, acc);
        }
    }
    if !form.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    Ok(MeyerFormData {
        a: a.clone(),
        b: b.clone(),
        v_basis,
        form,
    })
}

fn add_vecs(a: &[RingElement], b: &[RingElement]) -> Result<Vec<RingElement>> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

/// The cocycle value c(A,B): the signature of ⟨,⟩ on V_{A,B}.
pub fn meyer_cocycle(a: &Matrix, b: &Matrix) -> Result<i64> {
    let data = meyer_form(a, b)?;
    let (p, n, _) = signature(&data.form)?;
    Ok(p as i64 - n as i64)
}

/// Per-term report of the cocycle sum.
#[derive(Clone, Debug)]
pub struct SignatureReport {
    /// σ from the cocycle sum: Σ c(z₁⋯z_{i−1}, z_i) + m − m_ns.
    pub sigma_meyer: i64,
    /// σ from the form route: signature(W) + m − m_ns.
    pub sigma_form: i64,
    pub agree: bool,
    pub per_term: Vec<i64>,
    pub m: usize,
    pub m_ns: usize,
}

/// Compute the total-space signature along both routes and compare.
pub fn fibration_signature(ev: &EvaluatedTuple) -> Result<SignatureReport> {
    if ev.ring != RingDescriptor::Integer {
        return Err(Error::UnsupportedRing {
            op: "fibration_signature",
            ring: ev.ring.name(),
        });
    }
    if !ev.product()?.is_identity() {
        return Err(Error::ProductNotIdentity("cocycle sum needs a relator".into()));
    }
    let m = ev.len();
    let (m_ns, _) = ev.type_count();
    let mut per_term = Vec::with_capacity(m - 1);
    let mut total = 0i64;
    let mut prefix = ev.mats[0].clone();
    for i in 1..m {
        let c = meyer_cocycle(&prefix, &ev.mats[i])?;
        per_term.push(c);
        total += c;
        prefix = prefix.mul(&ev.mats[i])?;
    }
    let sigma_meyer = total + m as i64 - m_ns as i64;
    let g = (ev.dim / 2) as u32;
    let omega = omega_matrix(ev.ring, g);
    let inv = compute_invariant(ev, &omega, Some(g), &InvariantOptions::default())?;
    let sigma_form = inv.sigma_total.ok_or(Error::NotSymmetric)?;
    Ok(SignatureReport {
        sigma_meyer,
        sigma_form,
        agree: sigma_meyer == sigma_form,
        per_term,
        m,
        m_ns,
    })
}

/// Verify that the 3-tuple (A, B, B⁻¹A⁻¹) realizes (V_{A,B}, ⟨,⟩) ⊕ (M, 0):
/// the splitting carries Ker Γ_z onto V_{A,B} with exact form agreement, the
/// diagonal being the zero summand. The splitting composes (a,b,c) ↦
/// (a−b, b−c) with the V-coordinate change (x,y) ↦ (x+y, −y·B⁻¹).
pub fn prop_b1_check(a: &Matrix, b: &Matrix) -> Result<bool> {
    let data = meyer_form(a, b)?;
    let q = RingDescriptor::Rational;
    let to_q = |m: &Matrix| {
        m.map_entries(q, |e| {
            Ok(RingElement::from_bigint(q, e.as_bigint().unwrap()))
        })
    };
    let aq = to_q(a)?;
    let bq = to_q(b)?;
    let d = aq.rows();
    let c = aq.mul(&bq)?.inverse()?;
    let ev = EvaluatedTuple::from_matrices(vec![aq.clone(), bq.clone(), c])?;
    let kern = kernel(&ev)?;
    let dim_v = data.v_basis.rows();
    // rank match: Ker Γ_z ≅ V ⊕ M
    if kern.rank() != dim_v + d {
        return Ok(false);
    }
    let b_inv = bq.inverse()?;
    let ident = Matrix::identity(q, d);
    let membership = ident.sub(&aq)?.vstack(&bq.sub(&ident)?)?;
    let phi = |v: &[RingElement]| -> Result<Vec<RingElement>> {
        let (av, rest) = v.split_at(d);
        let (bv, cv) = rest.split_at(d);
        let mut out = Vec::with_capacity(2 * d);
        for (x, y) in av.iter().zip(cv) {
            out.push(x.sub(y)?); // a − c
        }
        let diff: Vec<RingElement> = cv
            .iter()
            .zip(bv)
            .map(|(x, y)| x.sub(y))
            .collect::<Result<_>>()?;
        out.extend(b_inv.row_times(&diff)?); // (c − b)·B⁻¹
        Ok(out)
    };
    let g = (d / 2) as u32;
    let omega = omega_matrix(q, g);
    let qe = QEvaluator::new(&ev, &omega, 1)?;
    let kern_rows: Vec<Vec<RingElement>> =
        (0..kern.rank()).map(|i| kern.basis.row_vec(i)).collect();
    let images: Vec<Vec<RingElement>> = kern_rows.iter().map(|v| phi(v)).collect::<Result<_>>()?;
    // images live in V
    for im in &images {
        if membership.row_times(im)?.iter().any(|x| !x.is_zero()) {
            return Ok(false);
        }
    }
    // and surject onto it
    let image_mat = Matrix::from_rows(q, images.clone())?;
    if rational_rank(&image_mat)? != dim_v {
        return Ok(false);
    }
    // form agreement: Q(v, w) = ⟨φv, φw⟩
    let gram_q = qe.gram(&kern_rows, &kern_rows)?;
    let bq_m = to_q(b)?;
    let one_minus_b = ident.sub(&bq_m)?;
    for (i, u) in images.iter().enumerate() {
        let (x1, y1) = u.split_at(d);
        let left = add_vecs(x1, &bq_m.row_times(y1)?)?;
        for (j, v) in images.iter().enumerate() {
            let y2 = &v[d..];
            let right = one_minus_b.row_times(y2)?;
            let mut acc = RingElement::zero(q);
            for (ai, li) in left.iter().enumerate() {
                if li.is_zero() {
                    continue;
                }
                for (bj, rj) in right.iter().enumerate() {
                    let w = omega.get(ai, bj);
                    if w.is_zero() || rj.is_zero() {
                        continue;
                    }
                    acc = acc.add(&li.mul(w)?.mul(rj)?)?;
                }
            }
            if &acc != gram_q.get(i, j) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Random element of Sp(2g,ℤ) as a word of at most `max_len` transvections
/// along random primitive vectors.
pub fn random_symplectic(genus: u32, max_len: usize, rng: &mut ChaCha8Rng) -> Result<Matrix> {
    let desc = RingDescriptor::Integer;
    let d = 2 * genus as usize;
    let omega = omega_matrix(desc, genus);
    let mut m = Matrix::identity(desc, d);
    let len = rng.gen_range(1..=max_len.max(1));
    for _ in 0..len {
        let mut v = vec![0i64; d];
        while v.iter().all(|&x| x == 0) {
            for x in v.iter_mut() {
                *x = rng.gen_range(-2..=2);
            }
        }
        let mut g = 0i64;
        for &x in &v {
            g = g.gcd(&x);
        }
        for x in v.iter_mut() {
            *x /= g;
        }
        let t = transvection(desc, &omega, &v)?;
        m = m.mul(&t)?;
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::rand_core::SeedableRng;

    #[test]
    fn normalization() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for g in [1u32, 2] {
            let id = Matrix::identity(RingDescriptor::Integer, 2 * g as usize);
            for _ in 0..5 {
                let b = random_symplectic(g, 8, &mut rng).unwrap();
                assert_eq!(meyer_cocycle(&id, &b).unwrap(), 0);
                assert_eq!(meyer_cocycle(&b, &id).unwrap(), 0);
            }
        }
    }

    #[test]
    fn cocycle_identity_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for g in [1u32, 2] {
            for _ in 0..6 {
                let a = random_symplectic(g, 6, &mut rng).unwrap();
                let b = random_symplectic(g, 6, &mut rng).unwrap();
                let c = random_symplectic(g, 6, &mut rng).unwrap();
                let lhs = meyer_cocycle(&a, &b).unwrap()
                    + meyer_cocycle(&a.mul(&b).unwrap(), &c).unwrap();
                let rhs = meyer_cocycle(&a, &b.mul(&c).unwrap()).unwrap()
                    + meyer_cocycle(&b, &c).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn cocycle_bounded_by_dim_v() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..8 {
            let a = random_symplectic(2, 8, &mut rng).unwrap();
            let b = random_symplectic(2, 8, &mut rng).unwrap();
            let data = meyer_form(&a, &b).unwrap();
            let c = meyer_cocycle(&a, &b).unwrap();
            assert!(c.unsigned_abs() as usize <= data.v_basis.rows());
        }
    }

    #[test]
    fn rejects_non_symplectic() {
        let m = Matrix::from_i64(RingDescriptor::Integer, &[vec![1, 1], vec![1, 1]]);
        let id = Matrix::identity(RingDescriptor::Integer, 2);
        assert!(matches!(
            meyer_cocycle(&m, &id),
            Err(Error::NotSymplectic)
        ));
    }

    #[test]
    fn prop_b1_identity_case() {
        // A = B = id: V = M × M with zero form; Ker Γ_z = M³
        let id = Matrix::identity(RingDescriptor::Integer, 4);
        let data = meyer_form(&id, &id).unwrap();
        assert_eq!(data.v_basis.rows(), 8);
        assert!(data.form.is_zero());
        assert!(prop_b1_check(&id, &id).unwrap());
    }

    #[test]
    fn prop_b1_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for g in [1u32, 2] {
            for _ in 0..4 {
                let a = random_symplectic(g, 6, &mut rng).unwrap();
                let b = random_symplectic(g, 6, &mut rng).unwrap();
                assert!(prop_b1_check(&a, &b).unwrap());
            }
        }
    }

    #[test]
    fn sigma_on_xi1_g2() {
        let rep =
            crate::reps::Representation::symplectic(2, RingDescriptor::Integer).unwrap();
        let t = crate::reps::builtin_tuple(2, "xi1").unwrap();
        let ev = crate::reps::evaluate_tuple(&t, &rep).unwrap();
        let report = fibration_signature(&ev).unwrap();
        assert_eq!(report.sigma_meyer, -12);
        assert_eq!(report.sigma_form, -12);
        assert!(report.agree);
    }
}

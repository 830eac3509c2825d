//! The bilinear-form invariant: the maps Γ_{z,k}, their common kernel, the
//! degenerate submodule, the quotient M_z, the pairing Q_{ψ,ℓ}, the reduced
//! form matrix W, and its classification.

use crate::error::{Error, Result};
use crate::linalg::kernel::{field_rref, kernel_basis};
use crate::linalg::signature::signature;
use crate::linalg::zlattice::{
    self, from_bigint_rows, quotient_complement, row_hnf, saturate, to_bigint_rows,
    LatticeSolver,
};
use crate::linalg::{classify_form, FormClass, Matrix};
use crate::reps::EvaluatedTuple;
use crate::ring::{RingDescriptor, RingElement};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Diagnosis of e_{z₁}⋯e_{z_m} for the kernel reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProductScalar {
    Identity,
    Scalar(RingElement),
    NonScalar,
}

impl ProductScalar {
    pub fn describe(&self) -> String {
        match self {
            ProductScalar::Identity => "identity".into(),
            ProductScalar::Scalar(c) => format!("scalar {c}"),
            ProductScalar::NonScalar => "non-scalar".into(),
        }
    }
}

/// Kernel of Γ_z with bookkeeping about how it was obtained.
#[derive(Clone, Debug)]
pub struct KernelData {
    /// Rows spanning Ker(Γ_z) ⊂ M^m; a saturated basis over ℤ, a basis over
    /// fields, a generating set over 𝔽_p[y]/(y^p).
    pub basis: Matrix,
    pub annihilator_exponents: Option<Vec<u32>>,
    pub product_scalar: ProductScalar,
    /// Set when the scalar hypothesis fails and the full intersection
    /// over all k was computed.
    pub outside_lemma_hypotheses: bool,
}

impl KernelData {
    /// Number of basis rows (over 𝔽_p[y]/(y^p): minimal generators).
    pub fn rank(&self) -> usize {
        self.basis.rows()
    }
}

/// The matrix of Γ_{z,k} as a (d·m × d) block matrix acting on row vectors
/// of M^m (k is 1-based; indices of the tuple are of period m).
pub fn gamma_k(ev: &EvaluatedTuple, k: usize) -> Result<Matrix> {
    let m = ev.len();
    let d = ev.dim;
    if k < 1 || k > m {
        return Err(Error::IndexRange(k, m + 1));
    }
    let pos = |t: isize| -> usize { (t - 1).rem_euclid(m as isize) as usize };
    let mut blocks = vec![Matrix::zeros(ev.ring, d, d); m];
    let ident = Matrix::identity(ev.ring, d);
    let kk = k as isize;
    blocks[pos(kk - 1)] = blocks[pos(kk - 1)].add(&ident)?;
    blocks[pos(kk)] = blocks[pos(kk)].sub(&ident)?;
    // suffix products S_{j+1} = e_{z_{j+1}} ⋯ e_{z_{m+k-1}}, built from the top
    let mut s = ident;
    let m_i = m as isize;
    let mut j = m_i + kk - 2;
    while j >= kk {
        s = ev.mats[pos(j + 1)].mul(&s)?;
        blocks[pos(j)] = blocks[pos(j)].add(&s)?;
        blocks[pos(j + 1)] = blocks[pos(j + 1)].sub(&s)?;
        j -= 1;
    }
    let mut rows: Vec<Vec<RingElement>> = Vec::with_capacity(d * m);
    for b in &blocks {
        for i in 0..d {
            rows.push(b.row_vec(i));
        }
    }
    Matrix::from_rows(ev.ring, rows)
}

/// All m maps stacked side by side: the matrix of ⊕_k Γ_{z,k}.
fn gamma_full(ev: &EvaluatedTuple) -> Result<Matrix> {
    let mut out = gamma_k(ev, 1)?;
    for k in 2..=ev.len() {
        out = out.hstack(&gamma_k(ev, k)?)?;
    }
    Ok(out)
}

/// Whether 1−c acts injectively on M (non-zero-divisor test per ring).
fn one_minus_injective(c: &RingElement) -> bool {
    let one = RingElement::one(c.descriptor());
    let diff = match one.sub(c) {
        Ok(x) => x,
        Err(_) => return false,
    };
    match c.descriptor() {
        RingDescriptor::TruncatedPoly(_) => diff.is_unit(),
        _ => !diff.is_zero(),
    }
}

/// The diagonal rows (x,…,x) for basis vectors x.
fn diagonal_rows(ev: &EvaluatedTuple) -> Matrix {
    let m = ev.len();
    let d = ev.dim;
    let mut out = Matrix::zeros(ev.ring, d, d * m);
    for j in 0..d {
        for p in 0..m {
            out.set(j, p * d + j, RingElement::one(ev.ring));
        }
    }
    out
}

/// Kernel of Γ_z, using the reduction: product = id ⇒ Ker Γ_{z,1} alone;
/// product = c·id with 1−c injective ⇒ the diagonal; otherwise the full
/// intersection over all k (flagged as outside the scalar hypotheses).
pub fn kernel(ev: &EvaluatedTuple) -> Result<KernelData> {
    let product = ev.product()?;
    if product.is_identity() {
        let g1 = gamma_k(ev, 1)?;
        let kb = kernel_basis(&g1)?;
        return Ok(KernelData {
            basis: kb.rows,
            annihilator_exponents: kb.annihilator_exponents,
            product_scalar: ProductScalar::Identity,
            outside_lemma_hypotheses: false,
        });
    }
    if let Some(c) = product.scalar_of() {
        if one_minus_injective(&c) {
            return Ok(KernelData {
                basis: diagonal_rows(ev),
                annihilator_exponents: None,
                product_scalar: ProductScalar::Scalar(c),
                outside_lemma_hypotheses: false,
            });
        }
        let g = gamma_full(ev)?;
        let kb = kernel_basis(&g)?;
        return Ok(KernelData {
            basis: kb.rows,
            annihilator_exponents: kb.annihilator_exponents,
            product_scalar: ProductScalar::Scalar(c),
            outside_lemma_hypotheses: true,
        });
    }
    let g = gamma_full(ev)?;
    let kb = kernel_basis(&g)?;
    Ok(KernelData {
        basis: kb.rows,
        annihilator_exponents: kb.annihilator_exponents,
        product_scalar: ProductScalar::NonScalar,
        outside_lemma_hypotheses: true,
    })
}

/// Rows generating Diag(M) + ⊕_i Ker(1−e_{z_i}) inside M^m; over ℤ the raw
/// generators (saturation happens in the quotient step).
pub fn degenerate_submodule(ev: &EvaluatedTuple) -> Result<Matrix> {
    let m = ev.len();
    let d = ev.dim;
    let ident = Matrix::identity(ev.ring, d);
    let mut rows: Vec<Vec<RingElement>> = Vec::new();
    let diag = diagonal_rows(ev);
    for i in 0..diag.rows() {
        rows.push(diag.row_vec(i));
    }
    for (p, e) in ev.mats.iter().enumerate() {
        let fixed = kernel_basis(&ident.sub(e)?)?.rows;
        for i in 0..fixed.rows() {
            let mut row = vec![RingElement::zero(ev.ring); d * m];
            row[p * d..(p + 1) * d].clone_from_slice(fixed.row(i));
            rows.push(row);
        }
    }
    Matrix::from_rows(ev.ring, rows)
}

/// The quotient data: a lifted basis of M_z = Ker Γ_z / degenerate part,
/// with the kernel and the torsion index of the unsaturated quotient.
#[derive(Clone, Debug)]
pub struct MzData {
    pub kernel: KernelData,
    /// Lifted basis rows of M_z inside M^m (minimal generators over
    /// 𝔽_p[y]/(y^p)).
    pub basis: Matrix,
    /// Index of the raw degenerate span inside its saturation over ℤ
    /// (the torsion killed by the free quotient); None when not applicable.
    pub torsion_index: Option<BigInt>,
}

pub fn mz_basis(ev: &EvaluatedTuple) -> Result<MzData> {
    let kern = kernel(ev)?;
    let degen = degenerate_submodule(ev)?;
    match ev.ring {
        RingDescriptor::Integer => mz_basis_integer(ev, kern, &degen),
        RingDescriptor::Rational | RingDescriptor::IntegerModP(_) => {
            mz_basis_field(ev, kern, &degen)
        }
        RingDescriptor::TruncatedPoly(p) => mz_basis_local(ev, kern, &degen, p),
        other => Err(Error::UnsupportedRing {
            op: "mz_basis",
            ring: other.name(),
        }),
    }
}

fn mz_basis_integer(ev: &EvaluatedTuple, kern: KernelData, degen: &Matrix) -> Result<MzData> {
    let n = ev.dim * ev.len();
    let k = to_bigint_rows(&kern.basis);
    let d_raw = to_bigint_rows(degen);
    let d_sat = saturate(&d_raw, n);
    let solver = LatticeSolver::new(&k, n);
    let mut c_sat = Vec::with_capacity(d_sat.len());
    for row in &d_sat {
        let x = solver.solve(row).ok_or(Error::NotInKernel)?;
        c_sat.push(x);
    }
    // torsion index: degenerate generators against the saturated basis
    let sat_solver = LatticeSolver::new(&d_sat, n);
    let mut c_raw = Vec::with_capacity(d_raw.len());
    for row in &d_raw {
        let x = sat_solver
            .solve(row)
            .expect("raw generators lie in their saturation");
        c_raw.push(x);
    }
    let (h, _, rank) = row_hnf(&c_raw, d_sat.len(), false);
    let mut index = BigInt::one();
    for row in h.iter().take(rank) {
        let piv = row.iter().find(|x| !x.is_zero()).unwrap();
        index *= piv.abs();
    }
    let r = k.len();
    let lift = quotient_complement(&c_sat, r);
    let mut basis_rows = Vec::with_capacity(lift.len());
    for w in &lift {
        let mut v = vec![BigInt::from(0); n];
        for (coef, krow) in w.iter().zip(&k) {
            if coef.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(krow) {
                *x += coef * y;
            }
        }
        basis_rows.push(v);
    }
    Ok(MzData {
        kernel: kern,
        basis: from_bigint_rows(&basis_rows, n),
        torsion_index: Some(index),
    })
}

fn mz_basis_field(ev: &EvaluatedTuple, kern: KernelData, degen: &Matrix) -> Result<MzData> {
    let desc = ev.ring;
    let n = ev.dim * ev.len();
    // echelonize the kernel so membership solves read off pivot columns
    let (krows, kpivots) = field_rref(&kern.basis)?;
    let kern_ech = if krows.is_empty() {
        Matrix::zeros(desc, 0, n)
    } else {
        Matrix::from_rows(desc, krows.clone())?
    };
    let r = kern_ech.rows();
    // degenerate rows in kernel coordinates
    let mut c_rows: Vec<Vec<RingElement>> = Vec::with_capacity(degen.rows());
    for i in 0..degen.rows() {
        let mut rem = degen.row_vec(i);
        let mut coeff = vec![RingElement::zero(desc); r];
        for (t, &pc) in kpivots.iter().enumerate() {
            if rem[pc].is_zero() {
                continue;
            }
            let f = rem[pc].clone();
            for (x, y) in rem.iter_mut().zip(&krows[t]) {
                let s = f.mul(y)?;
                *x = x.sub(&s)?;
            }
            coeff[t] = f;
        }
        if rem.iter().any(|x| !x.is_zero()) {
            return Err(Error::NotInKernel);
        }
        c_rows.push(coeff);
    }
    let c = Matrix::from_rows(desc, c_rows)?;
    let (_, cpivots) = field_rref(&c)?;
    let pivot_set: std::collections::HashSet<usize> = cpivots.iter().copied().collect();
    let mut basis_rows = Vec::new();
    for f in (0..r).filter(|t| !pivot_set.contains(t)) {
        basis_rows.push(kern_ech.row_vec(f));
    }
    let basis = if basis_rows.is_empty() {
        Matrix::zeros(desc, 0, n)
    } else {
        Matrix::from_rows(desc, basis_rows)?
    };
    Ok(MzData {
        kernel: KernelData {
            basis: kern_ech,
            ..kern
        },
        basis,
        torsion_index: None,
    })
}

/// 𝔽_p[y]/(y^p): the quotient is handled through the underlying 𝔽_p vector
/// space of M^m (p·d·m coordinates), where y acts as a coordinate shift.
/// The lifted vectors minimally generate Ker/(degenerate) by Nakayama.
fn mz_basis_local(
    ev: &EvaluatedTuple,
    kern: KernelData,
    degen: &Matrix,
    p: u64,
) -> Result<MzData> {
    let n = ev.dim * ev.len();
    let y = RingElement::poly_y(p);
    let expand = |m: &Matrix| -> Result<Vec<Vec<u64>>> {
        // all y^j multiples of the rows, as F_p vectors
        let mut out = Vec::new();
        for i in 0..m.rows() {
            let mut row = m.row_vec(i);
            for _ in 0..p {
                if row.iter().all(|x| x.is_zero()) {
                    break;
                }
                out.push(fp_flatten(&row, p));
                row = row
                    .iter()
                    .map(|x| x.mul(&y))
                    .collect::<Result<Vec<_>>>()?;
            }
        }
        Ok(out)
    };
    let k_span = expand(&kern.basis)?;
    let mut s_span = expand(degen)?;
    // + yK
    for i in 0..kern.basis.rows() {
        let mut row: Vec<RingElement> = kern
            .basis
            .row(i)
            .iter()
            .map(|x| x.mul(&y))
            .collect::<Result<_>>()?;
        for _ in 1..p {
            if row.iter().all(|x| x.is_zero()) {
                break;
            }
            s_span.push(fp_flatten(&row, p));
            row = row
                .iter()
                .map(|x| x.mul(&y))
                .collect::<Result<Vec<_>>>()?;
        }
    }
    let mut reducer = FpReducer::new(p, p as usize * n);
    for row in &s_span {
        reducer.insert(row.clone());
    }
    let s_dim = reducer.rank();
    let mut basis_rows = Vec::new();
    for row in &k_span {
        if reducer.insert(row.clone()) {
            basis_rows.push(fp_unflatten(row, ev.ring, p, n));
        }
    }
    let _ = s_dim;
    let basis = if basis_rows.is_empty() {
        Matrix::zeros(ev.ring, 0, n)
    } else {
        Matrix::from_rows(ev.ring, basis_rows)?
    };
    Ok(MzData {
        kernel: kern,
        basis,
        torsion_index: None,
    })
}

fn fp_flatten(row: &[RingElement], p: u64) -> Vec<u64> {
    let n = row.len();
    let mut out = vec![0u64; p as usize * n];
    for (i, e) in row.iter().enumerate() {
        for (layer, &c) in e.as_poly().unwrap().iter().enumerate() {
            out[layer * n + i] = c;
        }
    }
    out
}

fn fp_unflatten(bits: &[u64], desc: RingDescriptor, p: u64, n: usize) -> Vec<RingElement> {
    (0..n)
        .map(|i| {
            let coeffs: Vec<i64> = (0..p as usize).map(|l| bits[l * n + i] as i64).collect();
            RingElement::poly_coeffs(p, &coeffs)
        })
        .map(|e| {
            debug_assert_eq!(e.descriptor(), desc);
            e
        })
        .collect()
}

/// Incremental 𝔽_p row reduction.
struct FpReducer {
    p: u64,
    cols: usize,
    rows: Vec<Vec<u64>>,
    pivots: Vec<usize>,
}

impl FpReducer {
    fn new(p: u64, cols: usize) -> Self {
        FpReducer {
            p,
            cols,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Reduce against the current span; true when the row added new content.
    fn insert(&mut self, mut row: Vec<u64>) -> bool {
        let p = self.p;
        for (r, &pc) in self.rows.iter().zip(&self.pivots) {
            if row[pc] != 0 {
                let f = row[pc];
                for (x, y) in row.iter_mut().zip(r) {
                    *x = (*x + (p - f % p) % p * *y % p) % p;
                }
            }
        }
        match row.iter().position(|&x| x != 0) {
            None => false,
            Some(pc) => {
                // normalize pivot to 1
                let inv = mod_inverse(row[pc], p);
                for x in row.iter_mut() {
                    *x = *x * inv % p;
                }
                debug_assert!(row.len() == self.cols);
                self.rows.push(row);
                self.pivots.push(pc);
                true
            }
        }
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p prime, a != 0
    let mut acc: u128 = 1;
    let mut base = a as u128 % p as u128;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

// ---------------------------------------------------------------------------
// the pairing Q_{ψ,ℓ}

/// Precomputed sequences for evaluating Q_{ψ,ℓ} on many vector pairs.
pub struct QEvaluator<'a> {
    ev: &'a EvaluatedTuple,
    psi: &'a Matrix,
    ell: usize,
}

impl<'a> QEvaluator<'a> {
    pub fn new(ev: &'a EvaluatedTuple, psi: &'a Matrix, ell: usize) -> Result<Self> {
        let m = ev.len();
        if ell < 1 || ell > m {
            return Err(Error::IndexRange(ell, m + 1));
        }
        if psi.rows() != ev.dim || psi.cols() != ev.dim {
            return Err(Error::Dim("psi must be dim x dim".into()));
        }
        Ok(QEvaluator { ev, psi, ell })
    }

    fn comp<'b>(&self, v: &'b [RingElement], t: usize) -> &'b [RingElement] {
        let m = self.ev.len();
        let d = self.ev.dim;
        let p = (t - 1) % m;
        &v[p * d..(p + 1) * d]
    }

    /// ū_k sequences (first slot of Eq. (4), entrywise involuted), k = 1..m−1.
    fn u_seq(&self, x: &[RingElement]) -> Result<Vec<Vec<RingElement>>> {
        let m = self.ev.len();
        let ell = self.ell;
        let mut out = Vec::with_capacity(m - 1);
        let mut u: Vec<RingElement> = Vec::new();
        for k in 1..m {
            if k == 1 {
                u = sub_vecs(self.comp(x, ell), self.comp(x, ell + 1))?;
            } else {
                let e = &self.ev.mats[(k + ell - 2) % m];
                let shifted = e.row_times_ref(&u)?;
                let base = sub_vecs(self.comp(x, k + ell - 1), self.comp(x, k + ell))?;
                u = add_vecs(&base, &shifted)?;
            }
            out.push(u.iter().map(|e| e.involute()).collect());
        }
        Ok(out)
    }

    /// P·w_kᵀ columns for the second slot, k = 1..m−1.
    fn w_cols(&self, yv: &[RingElement]) -> Result<Vec<Vec<RingElement>>> {
        let m = self.ev.len();
        let d = self.ev.dim;
        let ell = self.ell;
        let mut out = Vec::with_capacity(m - 1);
        for k in 1..m {
            let inv = &self.ev.invs[(k + ell - 1) % m];
            let yk = self.comp(yv, k + ell);
            let w = sub_vecs(yk, &inv.row_times_ref(yk)?)?;
            // column P·wᵀ
            let mut col = vec![RingElement::zero(self.ev.ring); d];
            for (b, wb) in w.iter().enumerate() {
                if wb.is_zero() {
                    continue;
                }
                for (a, c) in col.iter_mut().enumerate() {
                    let pab = self.psi.get(a, b);
                    if pab.is_zero() {
                        continue;
                    }
                    *c = c.add(&pab.mul(wb)?)?;
                }
            }
            out.push(col);
        }
        Ok(out)
    }

    /// Gram block Q(x_i, y_j) for two families of kernel vectors.
    pub fn gram(&self, xs: &[Vec<RingElement>], ys: &[Vec<RingElement>]) -> Result<Matrix> {
        let u_all: Vec<Vec<Vec<RingElement>>> =
            xs.iter().map(|x| self.u_seq(x)).collect::<Result<_>>()?;
        let w_all: Vec<Vec<Vec<RingElement>>> =
            ys.iter().map(|y| self.w_cols(y)).collect::<Result<_>>()?;
        let mut out = Matrix::zeros(self.ev.ring, xs.len(), ys.len());
        for (i, useq) in u_all.iter().enumerate() {
            for (j, wseq) in w_all.iter().enumerate() {
                let mut acc = RingElement::zero(self.ev.ring);
                for (uk, wk) in useq.iter().zip(wseq) {
                    for (ua, wa) in uk.iter().zip(wk) {
                        if ua.is_zero() || wa.is_zero() {
                            continue;
                        }
                        acc = acc.add(&ua.mul(wa)?)?;
                    }
                }
                out.set(i, j, acc);
            }
        }
        Ok(out)
    }
}

fn add_vecs(a: &[RingElement], b: &[RingElement]) -> Result<Vec<RingElement>> {
    a.iter().zip(b).map(|(x, y)| x.add(y)).collect()
}

fn sub_vecs(a: &[RingElement], b: &[RingElement]) -> Result<Vec<RingElement>> {
    a.iter().zip(b).map(|(x, y)| x.sub(y)).collect()
}

impl Matrix {
    /// v·M without consuming v (helper shared with the Q evaluator).
    pub(crate) fn row_times_ref(&self, v: &[RingElement]) -> Result<Vec<RingElement>> {
        self.row_times(v)
    }
}

/// Membership test for Ker Γ_z: under the identity product a single Γ₁
/// suffices; otherwise every k is checked.
pub fn kernel_membership(ev: &EvaluatedTuple, v: &[RingElement]) -> Result<bool> {
    let product = ev.product()?;
    let ks: Vec<usize> = if product.is_identity() {
        vec![1]
    } else {
        (1..=ev.len()).collect()
    };
    for k in ks {
        let g = gamma_k(ev, k)?;
        if g.row_times(v)?.iter().any(|x| !x.is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The literal pairing of Eq. (4) on two kernel vectors (membership is
/// checked; use the gram evaluator for bulk work).
pub fn q_pairing(
    ev: &EvaluatedTuple,
    psi: &Matrix,
    x: &[RingElement],
    y: &[RingElement],
    ell: usize,
) -> Result<RingElement> {
    if !kernel_membership(ev, x)? || !kernel_membership(ev, y)? {
        return Err(Error::NotInKernel);
    }
    let qe = QEvaluator::new(ev, psi, ell)?;
    let g = qe.gram(&[x.to_vec()], &[y.to_vec()])?;
    Ok(g.get(0, 0).clone())
}

/// Fast exact rank bookkeeping: kernel_rank = dm − rank(Γ₁) and
/// mz_rank = kernel_rank − rank(degenerate span). The degenerate span is
/// block-structured, so its rank is Σ_i null(1−e_i) plus the diagonal's
/// contribution d − dim ∩_i Ker(1−e_i).
pub fn invariant_ranks(ev: &EvaluatedTuple) -> Result<(usize, usize)> {
    if !matches!(
        ev.ring,
        RingDescriptor::Integer | RingDescriptor::Rational
    ) {
        return Err(Error::UnsupportedRing {
            op: "invariant_ranks",
            ring: ev.ring.name(),
        });
    }
    if !ev.product()?.is_identity() {
        return Err(Error::ProductNotIdentity("rank formulas need a relator".into()));
    }
    let d = ev.dim;
    let m = ev.len();
    let g1 = gamma_k(ev, 1)?;
    let kernel_rank = d * m - crate::linalg::signature::rational_rank(&g1)?;
    let ident = Matrix::identity(ev.ring, d);
    let mut fixed_total = 0usize;
    let mut stacked_cols: Option<Matrix> = None;
    for e in &ev.mats {
        let diff = ident.sub(e)?;
        fixed_total += d - crate::linalg::signature::rational_rank(&diff)?;
        stacked_cols = Some(match stacked_cols {
            None => diff.transpose(),
            Some(s) => s.vstack(&diff.transpose())?,
        });
    }
    // ∩_i Ker(1−e_i) = left kernel of [ (1−e_1) | (1−e_2) | … ]
    let invariants = d - crate::linalg::signature::rational_rank(&stacked_cols.unwrap())?;
    let degenerate_rank = fixed_total + d - invariants;
    Ok((kernel_rank, kernel_rank - degenerate_rank))
}

// ---------------------------------------------------------------------------
// the full invariant

#[derive(Clone, Debug)]
pub struct InvariantOptions {
    /// Offset ℓ of Eq. (4); the map is ℓ-independent when the product is the
    /// identity, so 1 is the default.
    pub ell: usize,
}

impl Default for InvariantOptions {
    fn default() -> Self {
        InvariantOptions { ell: 1 }
    }
}

/// Everything the invariant pipeline produces for one tuple.
#[derive(Clone, Debug)]
pub struct InvariantResult {
    pub kernel_rank: usize,
    pub mz_rank: usize,
    /// Matrix of Q on the lifted basis of M_z.
    pub w: Matrix,
    pub form_class: FormClass,
    /// det W (nondegenerate part), when the ring supports determinants.
    pub determinant: Option<RingElement>,
    pub b1: Option<usize>,
    pub m: usize,
    pub m_ns: usize,
    pub m_sep: usize,
    /// Signature p − n of W over ℤ/ℚ.
    pub sigma_w: Option<i64>,
    /// σ of the total space: sigma_w + m − m_ns (Lefschetz case).
    pub sigma_total: Option<i64>,
    pub predicted_mz: Option<i64>,
    pub predicted_kernel: Option<i64>,
    pub predictions_hold: Option<bool>,
    pub torsion_index: Option<BigInt>,
    pub product_scalar: ProductScalar,
    pub outside_lemma_hypotheses: bool,
}

impl InvariantResult {
    /// The tuple of invariants Theorem-3.2-style fuzzing must preserve.
    pub fn invariance_key(&self) -> (usize, usize, crate::linalg::classify::ClassKey, Option<BigInt>) {
        (
            self.kernel_rank,
            self.mz_rank,
            self.form_class.key(),
            self.determinant
                .as_ref()
                .and_then(|d| d.as_bigint().map(|b| b.abs())),
        )
    }
}

/// Compute the bilinear-form invariant of an evaluated tuple with the given
/// invariant bilinear function ψ. The evaluated product must be the
/// identity; otherwise the Lemma-3.4 diagnosis is reported in the error.
pub fn compute_invariant(
    ev: &EvaluatedTuple,
    psi: &Matrix,
    genus: Option<u32>,
    opts: &InvariantOptions,
) -> Result<InvariantResult> {
    let product = ev.product()?;
    if !product.is_identity() {
        let diag = match product.scalar_of() {
            Some(c) => ProductScalar::Scalar(c),
            None => ProductScalar::NonScalar,
        };
        return Err(Error::ProductNotIdentity(diag.describe()));
    }
    let mz = mz_basis(ev)?;
    let kernel_rank = mz.kernel.rank();
    let mz_rank = mz.basis.rows();
    let (m_ns, m_sep) = ev.type_count();
    let m = ev.len();
    let b1 = crate::reps::coinvariants_rank(ev).ok();
    let w = {
        let qe = QEvaluator::new(ev, psi, opts.ell)?;
        let rows: Vec<Vec<RingElement>> = (0..mz_rank).map(|i| mz.basis.row_vec(i)).collect();
        qe.gram(&rows, &rows)?
    };
    let zero_pad = kernel_rank - mz_rank;
    let form_class = classify_form(&w.direct_sum_zero(zero_pad))?;
    let determinant = w.det().ok();
    let sigma_w = if matches!(ev.ring, RingDescriptor::Integer | RingDescriptor::Rational)
        && w.is_symmetric()
    {
        let (p, n, _) = signature(&w)?;
        Some(p as i64 - n as i64)
    } else {
        None
    };
    let sigma_total = sigma_w.map(|s| s + m as i64 - m_ns as i64);
    let (predicted_mz, predicted_kernel, predictions_hold) = match (genus, b1, ev.ring) {
        (Some(g), Some(b1), RingDescriptor::Integer | RingDescriptor::Rational) => {
            let g = g as i64;
            let pm = m_ns as i64 - 4 * g + 2 * b1 as i64;
            let pk = 2 * g * m as i64 - 2 * g + b1 as i64;
            let holds = pm == mz_rank as i64 && pk == kernel_rank as i64;
            (Some(pm), Some(pk), Some(holds))
        }
        _ => (None, None, None),
    };
    Ok(InvariantResult {
        kernel_rank,
        mz_rank,
        w,
        form_class,
        determinant,
        b1,
        m,
        m_ns,
        m_sep,
        sigma_w,
        sigma_total,
        predicted_mz,
        predicted_kernel,
        predictions_hold,
        torsion_index: mz.torsion_index,
        product_scalar: mz.kernel.product_scalar.clone(),
        outside_lemma_hypotheses: mz.kernel.outside_lemma_hypotheses,
    })
}

// ---------------------------------------------------------------------------
// base change maps for single moves

/// A single move at the evaluated-matrix level.
#[derive(Clone, Debug)]
pub enum EvalMove {
    Forward(usize),
    Backward(usize),
    /// Conjugation of every entry by a fixed matrix.
    Conjugate(Matrix),
}

/// The kernel isomorphism B for a single move, with the moved tuple.
/// B satisfies Q_z(x, y) = Q_{z'}(x·B, y·B) and maps Ker Γ_z into Ker Γ_{z'}.
pub fn base_change_map(ev: &EvaluatedTuple, mv: &EvalMove) -> Result<(Matrix, EvaluatedTuple)> {
    let m = ev.len();
    let d = ev.dim;
    let ident = Matrix::identity(ev.ring, d);
    let mut b = Matrix::identity(ev.ring, d * m);
    let set_block = |bm: &mut Matrix, r: usize, c: usize, blk: &Matrix| {
        for i in 0..d {
            for j in 0..d {
                bm.set(r * d + i, c * d + j, blk.get(i, j).clone());
            }
        }
    };
    let moved = match mv {
        EvalMove::Forward(i) => {
            let i = *i;
            if i < 1 || i >= m {
                return Err(Error::IndexRange(i, m));
            }
            let e_next = ev.mats[i].clone();
            let zero = Matrix::zeros(ev.ring, d, d);
            set_block(&mut b, i - 1, i - 1, &zero);
            set_block(&mut b, i - 1, i, &e_next);
            set_block(&mut b, i, i - 1, &ident);
            set_block(&mut b, i, i, &ident.sub(&e_next)?);
            let mut mats = ev.mats.clone();
            let mut invs = ev.invs.clone();
            let mut flags = ev.separating.clone();
            let new_conj = ev.invs[i].mul(&ev.mats[i - 1])?.mul(&ev.mats[i])?;
            let new_conj_inv = ev.invs[i].mul(&ev.invs[i - 1])?.mul(&ev.mats[i])?;
            mats[i - 1] = ev.mats[i].clone();
            invs[i - 1] = ev.invs[i].clone();
            mats[i] = new_conj;
            invs[i] = new_conj_inv;
            flags.swap(i - 1, i);
            EvaluatedTuple {
                ring: ev.ring,
                dim: d,
                mats,
                invs,
                separating: flags,
            }
        }
        EvalMove::Backward(i) => {
            let i = *i;
            if i < 1 || i >= m {
                return Err(Error::IndexRange(i, m));
            }
            // inverse of the forward block [[0, E],[I, I−E]] with E = old E_i
            let e_inv = ev.invs[i - 1].clone();
            set_block(&mut b, i - 1, i - 1, &ident.sub(&e_inv)?);
            set_block(&mut b, i - 1, i, &ident);
            set_block(&mut b, i, i - 1, &e_inv);
            set_block(&mut b, i, i, &Matrix::zeros(ev.ring, d, d));
            let mut mats = ev.mats.clone();
            let mut invs = ev.invs.clone();
            let mut flags = ev.separating.clone();
            let new_mat = ev.mats[i - 1].mul(&ev.mats[i])?.mul(&ev.invs[i - 1])?;
            let new_inv = ev.mats[i - 1].mul(&ev.invs[i])?.mul(&ev.invs[i - 1])?;
            mats[i] = ev.mats[i - 1].clone();
            invs[i] = ev.invs[i - 1].clone();
            mats[i - 1] = new_mat;
            invs[i - 1] = new_inv;
            flags.swap(i - 1, i);
            EvaluatedTuple {
                ring: ev.ring,
                dim: d,
                mats,
                invs,
                separating: flags,
            }
        }
        EvalMove::Conjugate(c) => {
            let c_inv = c.inverse()?;
            for r in 0..m {
                set_block(&mut b, r, r, c);
            }
            let mats: Vec<Matrix> = ev
                .mats
                .iter()
                .map(|e| c_inv.mul(e)?.mul(c))
                .collect::<Result<_>>()?;
            let invs: Vec<Matrix> = ev
                .invs
                .iter()
                .map(|e| c_inv.mul(e)?.mul(c))
                .collect::<Result<_>>()?;
            EvaluatedTuple {
                ring: ev.ring,
                dim: d,
                mats,
                invs,
                separating: ev.separating.clone(),
            }
        }
    };
    Ok((b, moved))
}

// ---------------------------------------------------------------------------
// unimodularity certificate

#[derive(Clone, Debug)]
pub struct LetterCokernel {
    pub index: usize,
    pub smith_diagonal: Vec<BigInt>,
    pub torsion_free: bool,
}

/// The Corollary-style certificate: per-entry Smith diagonals of 1−e_{z_i}
/// (torsion-free cokernels) alongside the direct det(W) = ±1 check.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub per_letter: Vec<LetterCokernel>,
    pub all_cokernels_torsion_free: bool,
    pub psi_unimodular: bool,
    pub det_w: Option<BigInt>,
    pub det_is_unit: bool,
    pub verdict: String,
}

pub fn unimodularity_certificate(
    ev: &EvaluatedTuple,
    psi: &Matrix,
    inv: &InvariantResult,
) -> Result<Certificate> {
    if ev.ring != RingDescriptor::Integer {
        return Err(Error::UnsupportedRing {
            op: "unimodularity_certificate",
            ring: ev.ring.name(),
        });
    }
    let psi_det = psi.det()?;
    let psi_unimodular = psi_det
        .as_bigint()
        .map(|d| d.abs() == BigInt::one())
        .unwrap_or(false);
    let ident = Matrix::identity(ev.ring, ev.dim);
    let mut per_letter = Vec::with_capacity(ev.len());
    for (i, e) in ev.mats.iter().enumerate() {
        let diff = ident.sub(e)?;
        let snf = zlattice::smith_normal_form(&diff)?;
        let diag: Vec<BigInt> = snf
            .diagonal
            .iter()
            .map(|x| x.as_bigint().unwrap().clone())
            .collect();
        let torsion_free = diag
            .iter()
            .all(|x| x.is_zero() || x.abs() == BigInt::one());
        per_letter.push(LetterCokernel {
            index: i + 1,
            smith_diagonal: diag,
            torsion_free,
        });
    }
    let all_tf = per_letter.iter().all(|l| l.torsion_free);
    let det_w = inv
        .determinant
        .as_ref()
        .and_then(|d| d.as_bigint().cloned());
    let det_is_unit = det_w
        .as_ref()
        .map(|d| d.abs() == BigInt::one())
        .unwrap_or(false);
    let verdict = if psi_unimodular && all_tf {
        "unimodular by torsion-free cokernels".to_string()
    } else if det_is_unit {
        "unimodular by direct determinant".to_string()
    } else {
        "not certified".to_string()
    };
    Ok(Certificate {
        per_letter,
        all_cokernels_torsion_free: all_tf,
        psi_unimodular,
        det_w,
        det_is_unit,
        verdict,
    })
}

//! Classification of symmetric bilinear forms in the notation used by the
//! fibration tables: "1^p (-1)^n 0^z" for odd unimodular forms,
//! "H_1^a (E8)^b 0^z" for even ones, "H_y^k 0^z" for alternating forms over
//! 𝔽₂[y]/(y²) with image in (y).

use super::kernel::{field_rref, kernel_basis};
use super::signature::signature;
use super::{zlattice, Matrix};
use crate::error::{Error, Result};
use crate::ring::{RingDescriptor, RingElement};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
    #[serde(rename = "n/a")]
    NA,
}

/// Classification record for a symmetric form, including the zero radical.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FormClass {
    /// Rank of the nondegenerate part.
    pub rank: usize,
    /// (positive, negative) inertia of the nondegenerate part, when defined.
    pub signature: Option<(usize, usize)>,
    pub parity: Parity,
    /// Determinant of the nondegenerate part (ring-element string), when
    /// computed.
    pub determinant: Option<String>,
    /// All diagonal values zero (meaningful in characteristic 2).
    pub alternating: Option<bool>,
    /// Size of the zero radical block.
    pub zero_block: usize,
    /// Table-notation class string.
    pub class_string: String,
    /// Set for definite even forms of rank ≥ 16, where rank+signature+parity
    /// do not pin the genus (E₈² vs D₁₆⁺).
    pub definite_even_disclaimer: bool,
}

impl FormClass {
    /// Key used for "exact match at the level of (rank, signature, parity,
    /// zero-block)" comparisons.
    pub fn key(&self) -> ClassKey {
        ClassKey {
            rank: self.rank,
            signature: self.signature.map(|(p, n)| p as i64 - n as i64),
            parity: self.parity,
            zero_block: self.zero_block,
            alternating: self.alternating,
        }
    }

    /// Semantic agreement with a printed class string, at the level of
    /// (rank, signature, parity, zero-block) plus the alternating flag when
    /// both sides define one.
    pub fn matches_string(&self, s: &str) -> bool {
        let k = match parse_class_string(s) {
            Ok(k) => k,
            Err(_) => return false,
        };
        let me = self.key();
        let alt_ok = match (me.alternating, k.alternating) {
            (Some(a), Some(b)) => a == b,
            _ => true,
        };
        me.rank == k.rank
            && me.signature == k.signature
            && me.parity == k.parity
            && me.zero_block == k.zero_block
            && alt_ok
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ClassKey {
    pub rank: usize,
    pub signature: Option<i64>,
    pub parity: Parity,
    pub zero_block: usize,
    pub alternating: Option<bool>,
}

/// The negative-definite E₈ form (even, unimodular, signature −8): the
/// negated Cartan matrix of the E₈ diagram.
pub fn e8_form(desc: RingDescriptor) -> Matrix {
    // Bourbaki numbering: chain 1-3-4-5-6-7-8 with 2 attached to 4.
    let edges = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)];
    let mut m = Matrix::zeros(desc, 8, 8);
    for i in 0..8 {
        m.set(i, i, RingElement::from_i64(desc, -2));
    }
    for &(a, b) in &edges {
        m.set(a - 1, b - 1, RingElement::from_i64(desc, 1));
        m.set(b - 1, a - 1, RingElement::from_i64(desc, 1));
    }
    m
}

/// The rank-2 hyperbolic form [[0,c],[c,0]].
pub fn hyperbolic_form(c: &RingElement) -> Matrix {
    let desc = c.descriptor();
    let mut m = Matrix::zeros(desc, 2, 2);
    m.set(0, 1, c.clone());
    m.set(1, 0, c.clone());
    m
}

/// Classify a symmetric bilinear form over its coefficient ring. The zero
/// radical is split off as "0^z"; the nondegenerate part is classified by
/// rank, signature and parity (ℤ), rank and signature (ℚ), rank and
/// discriminant class (ℤ/P), or Arf-type data (𝔽_p[y]/(y^p)).
pub fn classify_form(w: &Matrix) -> Result<FormClass> {
    if !w.is_square() {
        return Err(Error::NotSquare {
            rows: w.rows(),
            cols: w.cols(),
        });
    }
    if !w.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    match w.descriptor() {
        RingDescriptor::Integer => classify_integer(w),
        RingDescriptor::Rational => classify_rational(w),
        RingDescriptor::IntegerModP(p) => classify_modp(w, p),
        RingDescriptor::TruncatedPoly(p) => classify_fpy(w, p),
        other => Err(Error::UnsupportedRing {
            op: "classify_form",
            ring: other.name(),
        }),
    }
}

fn classify_integer(w: &Matrix) -> Result<FormClass> {
    let n = w.rows();
    let a = zlattice::to_bigint_rows(w);
    let radical = zlattice::left_kernel(&a, n);
    let z = radical.len();
    let rank = n - z;
    if rank == 0 {
        return Ok(FormClass {
            rank: 0,
            signature: Some((0, 0)),
            parity: Parity::NA,
            determinant: None,
            alternating: None,
            zero_block: z,
            class_string: zero_string(z),
            definite_even_disclaimer: false,
        });
    }
    // complement of the saturated radical carries the nondegenerate part
    let w0 = if z == 0 {
        w.clone()
    } else {
        let lift = zlattice::quotient_complement(&radical, n);
        let l = zlattice::from_bigint_rows(&lift, n);
        l.mul(w)?.mul(&l.transpose())?
    };
    let det = w0.det()?;
    let det_big = det.as_bigint().unwrap().clone();
    let unimodular = det_big.magnitude() == BigInt::one().magnitude();
    let (p, ng, z0) = signature(&w0)?;
    debug_assert_eq!(z0, 0);
    let odd = (0..rank).any(|i| !(w0.get(i, i).as_bigint().unwrap() % BigInt::from(2)).is_zero());
    let parity = if odd { Parity::Odd } else { Parity::Even };
    let alternating = None;
    let sig = p as i64 - ng as i64;
    let class_string;
    let mut disclaimer = false;
    if !unimodular {
        class_string = append_zero(&format!("nonunimodular(det={det_big})"), z);
    } else if odd {
        class_string = append_zero(&odd_string(p, ng), z);
    } else {
        debug_assert_eq!(sig.rem_euclid(8), 0, "even unimodular signature is 8-divisible");
        let b = (sig.unsigned_abs() / 8) as usize;
        let a_h = (rank - 8 * b) / 2;
        let mut s = String::new();
        if a_h > 0 {
            s.push_str(&format!("H_1^{a_h}"));
        }
        if b > 0 {
            if !s.is_empty() {
                s.push(' ');
            }
            // paper convention: E8 denotes the signature −8 form
            if sig <= 0 {
                s.push_str(&format!("(E8)^{b}"));
            } else {
                s.push_str(&format!("(E8+)^{b}"));
            }
        }
        if s.is_empty() {
            s = "0^0".into();
        }
        disclaimer = (p == 0 || ng == 0) && rank >= 16;
        class_string = append_zero(&s, z);
    }
    Ok(FormClass {
        rank,
        signature: Some((p, ng)),
        parity,
        determinant: Some(det_big.to_string()),
        alternating,
        zero_block: z,
        class_string,
        definite_even_disclaimer: disclaimer,
    })
}

fn odd_string(p: usize, n: usize) -> String {
    let mut s = String::new();
    if p > 0 {
        s.push_str(&format!("1^{p}"));
    }
    if n > 0 {
        if !s.is_empty() {
            s.push(' ');
        }
        s.push_str(&format!("(-1)^{n}"));
    }
    s
}

fn zero_string(z: usize) -> String {
    if z == 0 {
        "0^0".into()
    } else {
        format!("0^{z}")
    }
}

fn append_zero(core: &str, z: usize) -> String {
    if z == 0 {
        core.to_string()
    } else {
        format!("{core} 0^{z}")
    }
}

fn classify_rational(w: &Matrix) -> Result<FormClass> {
    let n = w.rows();
    let (p, ng, z) = signature(w)?;
    let rank = n - z;
    let det = w.det()?;
    Ok(FormClass {
        rank,
        signature: Some((p, ng)),
        parity: Parity::NA,
        determinant: Some(det.to_string()),
        alternating: None,
        zero_block: z,
        class_string: append_zero(&odd_string(p, ng), z),
        definite_even_disclaimer: false,
    })
}

fn classify_modp(w: &Matrix, p: u64) -> Result<FormClass> {
    let n = w.rows();
    let rad = kernel_basis(w)?.rows;
    let z = rad.rows();
    let rank = n - z;
    let alternating = Some((0..n).all(|i| w.get(i, i).is_zero()));
    // discriminant class of the nondegenerate part: det of a maximal
    // nonsingular principal block, found by restricting to complement coords
    let class_string;
    let mut det_str = None;
    if rank == 0 {
        class_string = zero_string(z);
    } else {
        let w0 = field_complement_restrict(w, &rad)?;
        let det = w0.det()?;
        det_str = Some(det.to_string());
        let disc = if p == 2 {
            "1".to_string()
        } else {
            let r = det.as_modp().unwrap();
            if is_square_mod_p(r, p) {
                "square".into()
            } else {
                "nonsquare".into()
            }
        };
        class_string = append_zero(&format!("W(F_{p})[rank={rank},disc={disc}]"), z);
    }
    Ok(FormClass {
        rank,
        signature: None,
        parity: Parity::NA,
        determinant: det_str,
        alternating,
        zero_block: z,
        class_string,
        definite_even_disclaimer: false,
    })
}

fn is_square_mod_p(r: u64, p: u64) -> bool {
    if r == 0 {
        return true;
    }
    let mut acc: u128 = 1;
    let mut base = r as u128 % p as u128;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc == 1
}

/// Restrict a field form to a complement of its radical.
fn field_complement_restrict(w: &Matrix, radical: &Matrix) -> Result<Matrix> {
    let desc = w.descriptor();
    let n = w.rows();
    let (_, pivots) = field_rref(radical)?;
    let pivot_set: std::collections::HashSet<usize> = pivots.iter().copied().collect();
    let free: Vec<usize> = (0..n).filter(|c| !pivot_set.contains(c)).collect();
    let mut rows = Vec::with_capacity(free.len());
    for &i in &free {
        let mut r = Vec::with_capacity(free.len());
        for &j in &free {
            r.push(w.get(i, j).clone());
        }
        rows.push(r);
    }
    if rows.is_empty() {
        Ok(Matrix::zeros(desc, 0, 0))
    } else {
        Matrix::from_rows(desc, rows)
    }
}

/// 𝔽_p[y]/(y^p): with image in (y^{p−1}) write W = y^{p−1}·W̄ and classify W̄
/// over 𝔽_p; for p = 2 that is the rank/alternating (Arf-type) data. Forms
/// with unit entries are reported by the rank of the mod-y reduction only.
fn classify_fpy(w: &Matrix, p: u64) -> Result<FormClass> {
    let n = w.rows();
    let fp = RingDescriptor::IntegerModP(p);
    let layer = |k: usize| -> Matrix {
        Matrix::from_fn(fp, n, n, |i, j| {
            RingElement::from_i64(fp, w.get(i, j).as_poly().unwrap()[k] as i64)
        })
        .expect("layer")
    };
    let mod_y = layer(0);
    let in_top_ideal = (0..n).all(|i| {
        (0..n).all(|j| {
            w.get(i, j)
                .as_poly()
                .unwrap()
                .iter()
                .take(p as usize - 1)
                .all(|&c| c == 0)
        })
    });
    if !mod_y.is_zero() {
        // units present: rank of the mod-y reduction is still intrinsic
        let rad = kernel_basis(&mod_y)?.rows;
        let rank = n - rad.rows();
        let alternating = Some((0..n).all(|i| mod_y.get(i, i).is_zero()));
        return Ok(FormClass {
            rank,
            signature: None,
            parity: Parity::NA,
            determinant: None,
            alternating,
            zero_block: n - rank,
            class_string: append_zero(&format!("unit[rank={rank}]"), n - rank),
            definite_even_disclaimer: false,
        });
    }
    if !in_top_ideal {
        // intermediate y-powers (possible only for p > 2): rank data only
        return Ok(FormClass {
            rank: 0,
            signature: None,
            parity: Parity::NA,
            determinant: None,
            alternating: None,
            zero_block: n,
            class_string: format!("partial[n={n}]"),
            definite_even_disclaimer: false,
        });
    }
    let top = layer(p as usize - 1);
    let rad = kernel_basis(&top)?.rows;
    let z = top.rows() - rad.rows();
    let rank = n - rad.rows();
    let zero = n - rank;
    let _ = z;
    let alternating = (0..n).all(|i| top.get(i, i).is_zero());
    let class_string = if p == 2 {
        if rank == 0 {
            zero_string(zero)
        } else if alternating {
            append_zero(&format!("H_y^{}", rank / 2), zero)
        } else {
            append_zero(&format!("<y>^{rank}"), zero)
        }
    } else {
        let disc = if rank == 0 {
            "0".to_string()
        } else {
            let w0 = field_complement_restrict(&top, &rad)?;
            let det = w0.det()?;
            let r = det.as_modp().unwrap();
            if is_square_mod_p(r, p) {
                "square".into()
            } else {
                "nonsquare".into()
            }
        };
        append_zero(&format!("Wy(F_{p})[rank={rank},disc={disc}]"), zero)
    };
    Ok(FormClass {
        rank,
        signature: None,
        parity: Parity::NA,
        determinant: None,
        alternating: Some(alternating),
        zero_block: zero,
        class_string,
        definite_even_disclaimer: false,
    })
}

/// Parse a Table-notation class string back to its invariants. Accepts the
/// block orders and spellings used in the fibration table: "1^p", "(-1)^q",
/// "H_1^a", "(E8)^b", "E8^b", "H_y^k", "<y>^r", "0^z".
pub fn parse_class_string(s: &str) -> Result<ClassKey> {
    let mut rank = 0usize;
    let mut sig = 0i64;
    let mut zero = 0usize;
    let mut saw_odd = false;
    let mut saw_even_block = false;
    let mut saw_hy = false;
    let mut saw_y_diag = false;
    let bad = || Error::Parse {
        what: "class string",
        text: s.to_string(),
    };
    for tok in s.split_whitespace() {
        let (base, exp) = match tok.split_once('^') {
            Some((b, e)) => {
                let e: usize = e.parse().map_err(|_| bad())?;
                (b, e)
            }
            None => (tok, 1usize),
        };
        match base {
            "1" => {
                rank += exp;
                sig += exp as i64;
                saw_odd = true;
            }
            "(-1)" | "-1" => {
                rank += exp;
                sig -= exp as i64;
                saw_odd = true;
            }
            "H_1" | "(H_1)" => {
                rank += 2 * exp;
                saw_even_block = true;
            }
            "(E8)" | "E8" => {
                rank += 8 * exp;
                sig -= 8 * exp as i64;
                saw_even_block = true;
            }
            "(E8+)" => {
                rank += 8 * exp;
                sig += 8 * exp as i64;
                saw_even_block = true;
            }
            "H_y" => {
                rank += 2 * exp;
                saw_hy = true;
            }
            "<y>" => {
                rank += exp;
                saw_y_diag = true;
            }
            "0" => {
                zero += exp;
            }
            _ => return Err(bad()),
        }
    }
    let over_f2y = saw_hy || saw_y_diag;
    let parity = if over_f2y {
        Parity::NA
    } else if saw_odd {
        Parity::Odd
    } else if saw_even_block {
        Parity::Even
    } else {
        Parity::NA
    };
    Ok(ClassKey {
        rank,
        signature: if over_f2y { None } else { Some(sig) },
        parity,
        zero_block: zero,
        alternating: if over_f2y {
            Some(saw_hy && !saw_y_diag)
        } else {
            None
        },
    })
}

/// Compare two class strings at the level of (rank, signature, parity,
/// zero-block).
pub fn class_strings_agree(a: &str, b: &str) -> bool {
    match (parse_class_string(a), parse_class_string(b)) {
        (Ok(x), Ok(y)) => {
            x.rank == y.rank
                && x.signature == y.signature
                && x.parity == y.parity
                && x.zero_block == y.zero_block
        }
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn e8_properties() {
        let m = e8_form(RingDescriptor::Integer);
        let c = classify_form(&m).unwrap();
        assert_eq!(c.rank, 8);
        assert_eq!(c.signature, Some((0, 8)));
        assert_eq!(c.parity, Parity::Even);
        assert_eq!(c.class_string, "(E8)^1");
    }

    #[test]
    fn hyperbolic_over_f2y() {
        let y = RingElement::poly_coeffs(2, &[0, 1]);
        let m = hyperbolic_form(&y);
        let c = classify_form(&m).unwrap();
        assert_eq!(c.class_string, "H_y^1");
        assert_eq!(c.alternating, Some(true));
    }

    #[test]
    fn diag_minus_one_with_zero_block() {
        let mut rows = vec![vec![0i64; 76]; 76];
        for (i, row) in rows.iter_mut().enumerate().take(12) {
            row[i] = -1;
        }
        let m = Matrix::from_i64(RingDescriptor::Integer, &rows);
        let c = classify_form(&m).unwrap();
        assert_eq!(c.class_string, "(-1)^12 0^64");
        assert_eq!(c.parity, Parity::Odd);
        assert_eq!(c.zero_block, 64);
    }

    #[test]
    fn indefinite_even_rank_32() {
        // H^4 ⊕ (E8)^3: rank 32, signature −24
        let one = RingElement::from_i64(RingDescriptor::Integer, 1);
        let mut m = hyperbolic_form(&one);
        for _ in 0..3 {
            m = block_diag(&m, &hyperbolic_form(&one));
        }
        for _ in 0..3 {
            m = block_diag(&m, &e8_form(RingDescriptor::Integer));
        }
        let c = classify_form(&m).unwrap();
        assert_eq!(c.rank, 32);
        assert_eq!(c.signature, Some((4, 28)));
        assert_eq!(c.class_string, "H_1^4 (E8)^3");
        assert!(!c.definite_even_disclaimer);
    }

    #[test]
    fn definite_even_rank_16_disclaimer() {
        let m = block_diag(
            &e8_form(RingDescriptor::Integer),
            &e8_form(RingDescriptor::Integer),
        );
        let c = classify_form(&m).unwrap();
        assert_eq!(c.class_string, "(E8)^2");
        assert!(c.definite_even_disclaimer);
    }

    #[test]
    fn nonunimodular_reported() {
        let m = Matrix::from_i64(RingDescriptor::Integer, &[vec![2, 0], vec![0, 1]]);
        let c = classify_form(&m).unwrap();
        assert!(c.class_string.starts_with("nonunimodular(det=2)"));
    }

    #[test]
    fn parse_table_strings() {
        let k = parse_class_string("(-1)^20 1^2 0^94").unwrap();
        assert_eq!(k.rank, 22);
        assert_eq!(k.signature, Some(-18));
        assert_eq!(k.parity, Parity::Odd);
        assert_eq!(k.zero_block, 94);
        assert!(class_strings_agree("(-1)^20 1^2 0^94", "1^2 (-1)^20 0^94"));
        assert!(!class_strings_agree("(-1)^20 1^2 0^94", "1^2 (-1)^20 0^93"));
        let k2 = parse_class_string("H_1^4 (E8)^3 0^124").unwrap();
        assert_eq!(k2.rank, 32);
        assert_eq!(k2.signature, Some(-24));
        assert_eq!(k2.parity, Parity::Even);
        let k3 = parse_class_string("H_y^28 0^87").unwrap();
        assert_eq!(k3.rank, 56);
        assert_eq!(k3.alternating, Some(true));
    }

    fn block_diag(a: &Matrix, b: &Matrix) -> Matrix {
        let n = a.rows() + b.rows();
        let desc = a.descriptor();
        let mut m = Matrix::zeros(desc, n, n);
        for i in 0..a.rows() {
            for j in 0..a.cols() {
                m.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                m.set(a.rows() + i, a.cols() + j, b.get(i, j).clone());
            }
        }
        m
    }

    #[test]
    fn congruence_invariance_over_z() {
        // S·W·Sᵀ with unimodular S preserves the key
        let one = RingElement::from_i64(RingDescriptor::Integer, 1);
        let w = block_diag(&hyperbolic_form(&one), &e8_form(RingDescriptor::Integer));
        // product of elementary shears is unimodular by construction
        let mut s = Matrix::identity(RingDescriptor::Integer, 10);
        for &(i, j, c) in &[
            (0usize, 1usize, 2i64),
            (2, 7, -1),
            (3, 6, 1),
            (4, 9, 2),
            (5, 1, -2),
            (7, 0, 1),
            (9, 4, 5),
            (1, 8, 3),
        ] {
            let mut e = Matrix::identity(RingDescriptor::Integer, 10);
            e.set(i, j, RingElement::from_i64(RingDescriptor::Integer, c));
            s = s.mul(&e).unwrap();
        }
        let w2 = s.mul(&w).unwrap().mul(&s.transpose()).unwrap();
        let c1 = classify_form(&w).unwrap();
        let c2 = classify_form(&w2).unwrap();
        assert_eq!(c1.key(), c2.key());
        assert_eq!(c1.class_string, c2.class_string);
    }
}

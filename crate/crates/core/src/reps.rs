//! Concrete representations of Dehn-twist alphabets: the symplectic
//! representation with its chain curve table, the built-in fibration words,
//! the genus-1 SU(2) level-2 quantum representation over ℤ[ζ₁₆], the Eq.-(5)
//! reduction, and a validated loader for external representation files.

use crate::error::{Error, Result};
use crate::hurwitz::{Alphabet, HurwitzTuple, TwistWord, Word, WordNode};
use crate::linalg::Matrix;
use crate::ring::{RingDescriptor, RingElement};
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::sync::Arc;

/// Homology classes of the chain curves, fixing the transvection data.
///
/// With symplectic basis a₁,b₁,…,a_g,b_g and ω(a_i,b_i) = 1:
/// [γ₁] = b₁, [γ_{2i}] = a_i, [γ_{2i+1}] = b_{i+1} − b_i, [γ_{2g+1}] = −b_g,
/// and the 3-chain boundary letter d carries b₂ (zero at genus 1).
#[derive(Clone, Debug)]
pub struct CurveTable {
    pub genus: u32,
    pub alphabet: Arc<Alphabet>,
    /// One homology class in ℤ^{2g} per letter.
    pub classes: Vec<Vec<i64>>,
}

impl CurveTable {
    pub fn chain(genus: u32) -> Result<Self> {
        if genus < 1 {
            return Err(Error::BadGenus(genus, "chain curve table"));
        }
        let g = genus as usize;
        let d = 2 * g;
        let basis = |k: usize| -> Vec<i64> {
            let mut v = vec![0i64; d];
            v[k] = 1;
            v
        };
        let a = |i: usize| basis(2 * (i - 1)); // a_i, 1-based
        let b = |i: usize| basis(2 * (i - 1) + 1); // b_i, 1-based
        let mut classes = Vec::with_capacity(2 * g + 2);
        classes.push(b(1)); // c1
        for i in 1..=g {
            classes.push(a(i)); // c_{2i}
            if i < g {
                let mut v = b(i + 1);
                for (x, y) in v.iter_mut().zip(b(i)) {
                    *x -= y;
                }
                classes.push(v); // c_{2i+1}
            }
        }
        classes.push(b(g).iter().map(|x| -x).collect()); // c_{2g+1}
        classes.push(if g >= 2 { b(2) } else { vec![0; d] }); // d
        Ok(CurveTable {
            genus,
            alphabet: Alphabet::builtin_chain(genus),
            classes,
        })
    }
}

/// Gram matrix of the symplectic form on ℤ^{2g} (basis a₁,b₁,…).
pub fn omega_matrix(desc: RingDescriptor, genus: u32) -> Matrix {
    let g = genus as usize;
    let mut m = Matrix::zeros(desc, 2 * g, 2 * g);
    for i in 0..g {
        m.set(2 * i, 2 * i + 1, RingElement::from_i64(desc, 1));
        m.set(2 * i + 1, 2 * i, RingElement::from_i64(desc, -1));
    }
    m
}

/// The transvection x ↦ x + ω(x,v)·v on row vectors: I + Ω·vᵀ·v.
pub fn transvection(desc: RingDescriptor, omega: &Matrix, class: &[i64]) -> Result<Matrix> {
    let d = omega.rows();
    let v: Vec<RingElement> = class
        .iter()
        .map(|&x| RingElement::from_i64(desc, x))
        .collect();
    // col = Ω·vᵀ
    let mut col = vec![RingElement::zero(desc); d];
    for (i, c) in col.iter_mut().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            if vj.is_zero() {
                continue;
            }
            *c = c.add(&omega.get(i, j).mul(vj)?)?;
        }
    }
    let mut t = Matrix::identity(desc, d);
    for i in 0..d {
        if col[i].is_zero() {
            continue;
        }
        for j in 0..d {
            if v[j].is_zero() {
                continue;
            }
            let cur = t.get(i, j).add(&col[i].mul(&v[j])?)?;
            t.set(i, j, cur);
        }
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PsiSymmetry {
    Symmetric,
    Skew,
    Hermitian,
    SkewHermitian,
}

/// A validated matrix representation of a twist alphabet, with an optional
/// invariant bilinear function ψ.
#[derive(Clone, Debug)]
pub struct Representation {
    pub ring: RingDescriptor,
    pub dim: usize,
    pub alphabet: Arc<Alphabet>,
    pub genus: Option<u32>,
    mats: Vec<Matrix>,
    invs: Vec<Matrix>,
    pub psi: Option<Matrix>,
    pub psi_symmetry: Option<PsiSymmetry>,
    /// Curve homology classes, when the letters come from curves.
    pub classes: Option<Vec<Vec<i64>>>,
    /// Note about central scalars (quantum representations act through a
    /// central extension; relation words may evaluate to scalar·id).
    pub central_note: Option<String>,
}

impl Representation {
    pub fn new(
        ring: RingDescriptor,
        alphabet: Arc<Alphabet>,
        mats: Vec<Matrix>,
        psi: Option<Matrix>,
        psi_symmetry: Option<PsiSymmetry>,
    ) -> Result<Self> {
        if mats.len() != alphabet.len() {
            return Err(Error::Dim("one matrix per letter".into()));
        }
        let dim = mats.first().map(|m| m.rows()).unwrap_or(0);
        let mut invs = Vec::with_capacity(mats.len());
        for (i, m) in mats.iter().enumerate() {
            if !m.is_square() || m.rows() != dim || m.descriptor() != ring {
                return Err(Error::Schema(format!(
                    "generator {} is not a {dim}x{dim} matrix over {}",
                    alphabet.letters[i],
                    ring.name()
                )));
            }
            let inv = m
                .inverse()
                .map_err(|_| Error::Schema(format!("generator {} is singular", alphabet.letters[i])))?;
            invs.push(inv);
        }
        let rep = Representation {
            ring,
            dim,
            alphabet,
            genus: None,
            mats,
            invs,
            psi,
            psi_symmetry,
            classes: None,
            central_note: None,
        };
        rep.validate_psi()?;
        Ok(rep)
    }

    /// ψ-invariance Ē·P·Eᵀ = P for every generator, plus the declared
    /// symmetry of P itself.
    pub fn validate_psi(&self) -> Result<()> {
        let p = match &self.psi {
            None => return Ok(()),
            Some(p) => p,
        };
        if !p.is_square() || p.rows() != self.dim {
            return Err(Error::Schema("psi dimension mismatch".into()));
        }
        if let Some(sym) = self.psi_symmetry {
            let pt = p.transpose();
            let ok = match sym {
                PsiSymmetry::Symmetric => pt == *p,
                PsiSymmetry::Skew => pt == p.neg(),
                PsiSymmetry::Hermitian => pt.involute_entrywise() == *p,
                PsiSymmetry::SkewHermitian => pt.involute_entrywise() == p.neg(),
            };
            if !ok {
                return Err(Error::Schema(format!("psi is not {sym:?}")));
            }
        }
        for (i, e) in self.mats.iter().enumerate() {
            let lhs = e.involute_entrywise().mul(p)?.mul(&e.transpose())?;
            if lhs != *p {
                return Err(Error::PsiNotInvariant(self.alphabet.letters[i].clone()));
            }
        }
        Ok(())
    }

    pub fn generator(&self, letter: u16) -> &Matrix {
        &self.mats[letter as usize]
    }

    pub fn generator_inverse(&self, letter: u16) -> &Matrix {
        &self.invs[letter as usize]
    }

    /// The standard symplectic representation on H₁(Σ_g) over ℤ, ℚ or ℤ/P:
    /// each letter acts by the transvection along its chain curve class.
    pub fn symplectic(genus: u32, ring: RingDescriptor) -> Result<Self> {
        match ring {
            RingDescriptor::Integer | RingDescriptor::Rational | RingDescriptor::IntegerModP(_) => {}
            other => {
                return Err(Error::UnsupportedRing {
                    op: "symplectic_rep",
                    ring: other.name(),
                })
            }
        }
        let table = CurveTable::chain(genus)?;
        let omega = omega_matrix(ring, genus);
        let mats: Vec<Matrix> = table
            .classes
            .iter()
            .map(|v| transvection(ring, &omega, v))
            .collect::<Result<_>>()?;
        let mut rep = Representation::new(
            ring,
            table.alphabet.clone(),
            mats,
            Some(omega),
            Some(PsiSymmetry::Skew),
        )?;
        rep.genus = Some(genus);
        rep.classes = Some(table.classes);
        Ok(rep)
    }

    /// The genus-1 SU(2) level-2 quantum representation over ℤ[ζ₁₆], with the
    /// matrices printed for ρ(c₁), ρ(c₂). No invariant ψ ships with it; supply
    /// one through the file loader for Q-computations.
    pub fn quantum_su2_level2_g1() -> Result<Self> {
        let desc = RingDescriptor::Cyclotomic16;
        let one = RingElement::one(desc);
        let zero = RingElement::zero(desc);
        let zeta = RingElement::zeta_pow;
        // (ζ + ζ⁸)/(1 + ζ), ζ⁴(1−ζ⁷)/(1−ζ), ζ³(1−ζ⁷)/(1−ζ): exact divisions
        let e13 = zeta(1).add(&zeta(8))?.div_exact(&one.add(&zeta(1))?)?;
        let geo = one.sub(&zeta(7))?.div_exact(&one.sub(&zeta(1))?)?;
        let r31 = zeta(4).mul(&geo)?;
        let r32 = zeta(3).mul(&geo)?;
        let c1 = Matrix::from_rows(
            desc,
            vec![
                vec![one.clone(), zero.clone(), e13],
                vec![zero.clone(), zeta(3).neg(), zero.clone()],
                vec![zero.clone(), zero.clone(), one.neg()],
            ],
        )?;
        let c2 = Matrix::from_rows(
            desc,
            vec![
                vec![zero.clone(), zeta(2), zero.clone()],
                vec![zeta(6).neg(), zero.clone(), zero.clone()],
                vec![r31, r32, zeta(3).neg()],
            ],
        )?;
        let alphabet = Alphabet::new(vec!["c1".into(), "c2".into()], vec![false, false])?;
        let mut rep = Representation::new(desc, alphabet, vec![c1, c2], None, None)?;
        rep.genus = Some(1);
        rep.central_note = Some(
            "acts through a central Z-extension; relation words may evaluate to scalar*id"
                .into(),
        );
        Ok(rep)
    }

    /// Entrywise Eq.-(5) reduction ζ ↦ 1+y; ψ-invariance is re-verified on
    /// the image when ψ is present.
    pub fn reduce_eq5(&self, p: u64) -> Result<Self> {
        if self.ring != RingDescriptor::Cyclotomic16 {
            return Err(Error::UnsupportedRing {
                op: "reduce_representation",
                ring: self.ring.name(),
            });
        }
        let mats: Vec<Matrix> = self
            .mats
            .iter()
            .map(|m| m.base_change_eq5(p))
            .collect::<Result<_>>()?;
        let psi = self.psi.as_ref().map(|m| m.base_change_eq5(p)).transpose()?;
        let mut rep = Representation::new(
            RingDescriptor::truncated_poly(p)?,
            self.alphabet.clone(),
            mats,
            psi,
            self.psi_symmetry,
        )?;
        rep.genus = self.genus;
        rep.central_note = self.central_note.clone();
        Ok(rep)
    }

    /// Replace ψ (re-validating invariance). Used to run Q-computations with
    /// a file-supplied bilinear function.
    pub fn with_psi(&self, psi: Matrix, symmetry: Option<PsiSymmetry>) -> Result<Self> {
        let mut rep = self.clone();
        rep.psi = Some(psi);
        rep.psi_symmetry = symmetry;
        rep.validate_psi()?;
        Ok(rep)
    }
}

/// Built-in fibration words: ξ₁ = (c₁⋯c_{2g}·c_{2g+1}²·c_{2g}⋯c₁)²,
/// ξ₂ = (c₁⋯c_{2g+1})^{2g+2}, ξ₃ = (c₁⋯c_{2g})^{4g+2}.
pub fn builtin_tuple(genus: u32, name: &str) -> Result<HurwitzTuple> {
    if genus < 2 {
        return Err(Error::BadGenus(genus, "builtin fibration words"));
    }
    let alphabet = Alphabet::builtin_chain(genus);
    let g = genus as usize;
    // letter c_i has index i-1
    let ci = |i: usize| (i - 1) as u16;
    let word: Vec<u16> = match name {
        "xi1" => {
            let mut inner: Vec<u16> = (1..=2 * g).map(ci).collect();
            inner.push(ci(2 * g + 1));
            inner.push(ci(2 * g + 1));
            inner.extend((1..=2 * g).rev().map(ci));
            let mut w = inner.clone();
            w.extend(inner);
            w
        }
        "xi2" => {
            let block: Vec<u16> = (1..=2 * g + 1).map(ci).collect();
            block.repeat(2 * g + 2)
        }
        "xi3" => {
            let block: Vec<u16> = (1..=2 * g).map(ci).collect();
            block.repeat(4 * g + 2)
        }
        other => return Err(Error::UnknownBuiltin(other.into())),
    };
    let entries = word.into_iter().map(TwistWord::plain).collect();
    HurwitzTuple::new(alphabet, Some(genus), entries)
}

/// A table-row tuple: either a builtin word ("xi1") or a twist fiber sum
/// "xi2#d:xi1" gluing along the word after '#' ("id" for the plain sum).
pub fn builtin_row(genus: u32, label: &str) -> Result<HurwitzTuple> {
    match label.split_once('#') {
        None => builtin_tuple(genus, label),
        Some((first, rest)) => {
            let (h_word, second) = rest
                .split_once(':')
                .ok_or_else(|| Error::UnknownBuiltin(label.into()))?;
            let t1 = builtin_tuple(genus, first)?;
            let t2 = builtin_tuple(genus, second)?;
            let h = if h_word == "id" {
                Word::empty()
            } else {
                crate::hurwitz::parse_word(&t1.alphabet, h_word)?
            };
            t1.fiber_sum(&t2, &h)
        }
    }
}

/// A tuple evaluated under a representation: one matrix (and its inverse)
/// per entry, plus the separating flags carried by the base letters.
#[derive(Clone, Debug)]
pub struct EvaluatedTuple {
    pub ring: RingDescriptor,
    pub dim: usize,
    pub mats: Vec<Matrix>,
    pub invs: Vec<Matrix>,
    pub separating: Vec<bool>,
}

impl EvaluatedTuple {
    /// Wrap raw matrices (all flagged non-separating).
    pub fn from_matrices(mats: Vec<Matrix>) -> Result<Self> {
        if mats.is_empty() {
            return Err(Error::EmptyTuple);
        }
        let ring = mats[0].descriptor();
        let dim = mats[0].rows();
        let mut invs = Vec::with_capacity(mats.len());
        for m in &mats {
            if m.descriptor() != ring || m.rows() != dim || !m.is_square() {
                return Err(Error::Dim("entry matrices must share a square shape".into()));
            }
            invs.push(m.inverse()?);
        }
        let separating = vec![false; mats.len()];
        Ok(EvaluatedTuple {
            ring,
            dim,
            mats,
            invs,
            separating,
        })
    }

    pub fn len(&self) -> usize {
        self.mats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mats.is_empty()
    }

    /// Ordered product of the entry matrices.
    pub fn product(&self) -> Result<Matrix> {
        let mut p = Matrix::identity(self.ring, self.dim);
        for m in &self.mats {
            p = p.mul(m)?;
        }
        Ok(p)
    }

    pub fn type_count(&self) -> (usize, usize) {
        let ns = self.separating.iter().filter(|&&s| !s).count();
        (ns, self.len() - ns)
    }
}

/// Evaluate a symbolic tuple under a representation. Word nodes are
/// memoized per call, so tuples produced by long random walks evaluate in
/// time linear in the number of moves.
pub fn evaluate_tuple(t: &HurwitzTuple, rep: &Representation) -> Result<EvaluatedTuple> {
    // map tuple letters to representation letters by name
    let map: Vec<u16> = t
        .alphabet
        .letters
        .iter()
        .map(|name| rep.alphabet.index_of(name))
        .collect::<Result<_>>()
        .map_err(|_| {
            Error::AlphabetMismatch(format!(
                "tuple letters {:?} not all present in representation {:?}",
                t.alphabet.letters, rep.alphabet.letters
            ))
        })?;
    let mut cache: HashMap<usize, (Matrix, Matrix)> = HashMap::new();
    let mut mats = Vec::with_capacity(t.len());
    let mut invs = Vec::with_capacity(t.len());
    let mut separating = Vec::with_capacity(t.len());
    for e in &t.entries {
        let letter = map[e.base as usize];
        let (cw, cw_inv) = eval_word(&e.conj, rep, &map, &mut cache)?;
        let base = rep.generator(letter);
        let base_inv = rep.generator_inverse(letter);
        mats.push(cw_inv.mul(base)?.mul(&cw)?);
        invs.push(cw_inv.mul(base_inv)?.mul(&cw)?);
        separating.push(rep.alphabet.separating[letter as usize]);
    }
    Ok(EvaluatedTuple {
        ring: rep.ring,
        dim: rep.dim,
        mats,
        invs,
        separating,
    })
}

fn eval_word(
    w: &Word,
    rep: &Representation,
    map: &[u16],
    cache: &mut HashMap<usize, (Matrix, Matrix)>,
) -> Result<(Matrix, Matrix)> {
    let node = match &w.node {
        None => {
            let id = Matrix::identity(rep.ring, rep.dim);
            return Ok((id.clone(), id));
        }
        Some(n) => n,
    };
    let key = Arc::as_ptr(node) as usize;
    if let Some(hit) = cache.get(&key) {
        return Ok(hit.clone());
    }
    let pair = match node.as_ref() {
        WordNode::Flat(ls) => {
            let mut m = Matrix::identity(rep.ring, rep.dim);
            let mut mi = Matrix::identity(rep.ring, rep.dim);
            for l in ls {
                let letter = map[l.letter as usize];
                let (f, fi) = if l.inv {
                    (rep.generator_inverse(letter), rep.generator(letter))
                } else {
                    (rep.generator(letter), rep.generator_inverse(letter))
                };
                m = m.mul(f)?;
                mi = fi.mul(&mi)?;
            }
            (m, mi)
        }
        WordNode::Cat(a, b) => {
            let (ma, mai) = eval_word(a, rep, map, cache)?;
            let (mb, mbi) = eval_word(b, rep, map, cache)?;
            (ma.mul(&mb)?, mbi.mul(&mai)?)
        }
        WordNode::Inv(x) => {
            let (mx, mxi) = eval_word(x, rep, map, cache)?;
            (mxi, mx)
        }
    };
    cache.insert(key, pair.clone());
    Ok(pair)
}

/// Rank of M / span{ x·(1−e_z) }: the first Betti number of the total space
/// when the entries are a fibration monodromy (coinvariants of H₁(Σ_g)).
pub fn coinvariants_rank(ev: &EvaluatedTuple) -> Result<usize> {
    let d = ev.dim;
    let ident = Matrix::identity(ev.ring, d);
    let mut stacked: Option<Matrix> = None;
    for m in &ev.mats {
        let diff = ident.sub(m)?;
        stacked = Some(match stacked {
            None => diff,
            Some(s) => s.vstack(&diff)?,
        });
    }
    let stacked = stacked.ok_or(Error::EmptyTuple)?;
    let rank = match ev.ring {
        RingDescriptor::Integer | RingDescriptor::Rational => {
            crate::linalg::signature::rational_rank(&stacked)?
        }
        RingDescriptor::IntegerModP(_) => {
            crate::linalg::kernel::field_rref(&stacked)?.1.len()
        }
        other => {
            return Err(Error::UnsupportedRing {
                op: "coinvariants_rank",
                ring: other.name(),
            })
        }
    };
    Ok(d - rank)
}

// ---------------------------------------------------------------------------
// representation file schema

#[derive(Debug, Serialize, Deserialize)]
pub struct RepFileGenerator {
    pub matrix: Vec<Vec<String>>,
    pub separating: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<Vec<i64>>,
}

/// JSON schema for externally supplied representations.
#[derive(Debug, Serialize, Deserialize)]
pub struct RepFile {
    pub ring: String,
    pub dim: usize,
    pub generators: std::collections::BTreeMap<String, RepFileGenerator>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi_symmetry: Option<PsiSymmetry>,
}

/// Load and fully validate a representation from its JSON schema.
pub fn load_representation_json(text: &str) -> Result<Representation> {
    let file: RepFile = serde_json::from_str(text)?;
    let ring = RingDescriptor::parse(&file.ring)?;
    let mut letters = Vec::new();
    let mut flags = Vec::new();
    let mut mats = Vec::new();
    for (name, gen) in &file.generators {
        letters.push(name.clone());
        flags.push(gen.separating);
        let m = Matrix::parse_entries(ring, &gen.matrix)?;
        if m.rows() != file.dim || m.cols() != file.dim {
            return Err(Error::Schema(format!(
                "generator {name}: expected {0}x{0} matrix",
                file.dim
            )));
        }
        mats.push(m);
    }
    let alphabet = Alphabet::new(letters, flags)?;
    let psi = file
        .psi
        .as_ref()
        .map(|p| Matrix::parse_entries(ring, p))
        .transpose()?;
    Representation::new(ring, alphabet, mats, psi, file.psi_symmetry)
}

pub fn load_representation(path: &std::path::Path) -> Result<Representation> {
    let text = std::fs::read_to_string(path)?;
    load_representation_json(&text)
}

pub fn representation_to_file(rep: &Representation) -> RepFile {
    let mut generators = std::collections::BTreeMap::new();
    for (i, name) in rep.alphabet.letters.iter().enumerate() {
        generators.insert(
            name.clone(),
            RepFileGenerator {
                matrix: rep.generator(i as u16).entry_strings(),
                separating: rep.alphabet.separating[i],
                class: rep.classes.as_ref().map(|c| c[i].clone()),
            },
        );
    }
    RepFile {
        ring: rep.ring.name(),
        dim: rep.dim,
        generators,
        psi: rep.psi.as_ref().map(|p| p.entry_strings()),
        psi_symmetry: rep.psi_symmetry,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hurwitz::MoveDirection;

    #[test]
    fn chain_adjacency_pattern() {
        for g in [2u32, 3] {
            let table = CurveTable::chain(g).unwrap();
            let omega = omega_matrix(RingDescriptor::Integer, g);
            let pair = |u: &[i64], v: &[i64]| -> i64 {
                let mut s = 0i64;
                for (i, &x) in u.iter().enumerate() {
                    for (j, &y) in v.iter().enumerate() {
                        let w = omega.get(i, j);
                        if !w.is_zero() {
                            let w: i64 = w.to_string().parse().unwrap();
                            s += x * w * y;
                        }
                    }
                }
                s
            };
            let n = 2 * g as usize + 1; // chain letters only
            for i in 0..n {
                for j in 0..n {
                    let w = pair(&table.classes[i], &table.classes[j]);
                    if i.abs_diff(j) == 1 {
                        assert_eq!(w.abs(), 1, "adjacent {i},{j}");
                    } else {
                        assert_eq!(w, 0, "non-adjacent {i},{j}");
                    }
                }
            }
        }
    }

    #[test]
    fn transvection_fixes_its_class() {
        let g = 2;
        let rep = Representation::symplectic(g, RingDescriptor::Integer).unwrap();
        let table = CurveTable::chain(g).unwrap();
        for (i, v) in table.classes.iter().enumerate() {
            let m = rep.generator(i as u16);
            let row: Vec<RingElement> = v
                .iter()
                .map(|&x| RingElement::from_i64(RingDescriptor::Integer, x))
                .collect();
            assert_eq!(m.row_times(&row).unwrap(), row);
        }
    }

    #[test]
    fn zero_class_transvection_is_identity() {
        // at genus 1 the letter d has zero class and is flagged separating
        let rep = Representation::symplectic(1, RingDescriptor::Integer).unwrap();
        let d_idx = rep.alphabet.index_of("d").unwrap();
        assert!(rep.alphabet.separating[d_idx as usize]);
        assert!(rep.generator(d_idx).is_identity());
    }

    #[test]
    fn builtin_words_evaluate_to_identity() {
        for g in [2u32, 3] {
            for ring in [RingDescriptor::Integer, RingDescriptor::IntegerModP(5)] {
                let rep = Representation::symplectic(g, ring).unwrap();
                for name in ["xi1", "xi2", "xi3"] {
                    let t = builtin_tuple(g, name).unwrap();
                    let ev = evaluate_tuple(&t, &rep).unwrap();
                    assert!(
                        ev.product().unwrap().is_identity(),
                        "{name} at g={g} over {ring:?}"
                    );
                }
            }
        }
    }

    #[test]
    fn builtin_lengths_and_types() {
        let cases = [
            (2u32, "xi1", 20usize),
            (2, "xi2", 30),
            (2, "xi3", 40),
            (3, "xi1", 28),
            (3, "xi2", 56),
            (3, "xi3", 84),
        ];
        for (g, name, m) in cases {
            let t = builtin_tuple(g, name).unwrap();
            assert_eq!(t.len(), m, "{name} g={g}");
            assert_eq!(t.type_count(&t.alphabet.separating).unwrap(), (m, 0));
        }
        assert!(builtin_tuple(1, "xi1").is_err());
        assert!(builtin_tuple(2, "xi9").is_err());
    }

    #[test]
    fn three_chain_relation_forces_d_class() {
        // (T₁T₂T₃)⁴ = double transvection along the class of d
        for g in [2u32, 3] {
            let rep = Representation::symplectic(g, RingDescriptor::Integer).unwrap();
            let t123 = rep
                .generator(0)
                .mul(rep.generator(1))
                .unwrap()
                .mul(rep.generator(2))
                .unwrap();
            let p4 = t123.mul(&t123).unwrap().mul(&t123).unwrap().mul(&t123).unwrap();
            let table = CurveTable::chain(g).unwrap();
            let u = &table.classes[2 * g as usize + 1];
            let omega = omega_matrix(RingDescriptor::Integer, g);
            let single = transvection(RingDescriptor::Integer, &omega, u).unwrap();
            let double = single.mul(&single).unwrap();
            assert_eq!(p4, double, "g={g}");
        }
    }

    #[test]
    fn move_preserves_product_and_entries_roundtrip() {
        let g = 2;
        let rep = Representation::symplectic(g, RingDescriptor::Integer).unwrap();
        let t = builtin_tuple(g, "xi1").unwrap();
        let before = evaluate_tuple(&t, &rep).unwrap();
        let moved = t.hurwitz_move(5, MoveDirection::Forward).unwrap();
        let after = evaluate_tuple(&moved, &rep).unwrap();
        assert_eq!(before.product().unwrap(), after.product().unwrap());
        let back = moved.hurwitz_move(5, MoveDirection::Backward).unwrap();
        let restored = evaluate_tuple(&back, &rep).unwrap();
        for (a, b) in before.mats.iter().zip(&restored.mats) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn psi_invariance_for_builtins() {
        for g in [1u32, 2, 3] {
            Representation::symplectic(g, RingDescriptor::Integer)
                .unwrap()
                .validate_psi()
                .unwrap();
        }
    }

    #[test]
    fn quantum_matrices() {
        let rep = Representation::quantum_su2_level2_g1().unwrap();
        let c1 = rep.generator(0);
        let c2 = rep.generator(1);
        // entry (2,2) of ρ(c₁) is −ζ³
        assert_eq!(c1.get(1, 1), &RingElement::zeta_pow(3).neg());
        // (ζ+ζ⁸)/(1+ζ) resolved exactly
        assert_eq!(
            c1.get(0, 2),
            &RingElement::cyclotomic([0, 1, -1, 1, -1, 1, -1, 1])
        );
        // braid relation
        let lhs = c1.mul(c2).unwrap().mul(c1).unwrap();
        let rhs = c2.mul(c1).unwrap().mul(c2).unwrap();
        assert_eq!(lhs, rhs);
        // determinants are ζ-power units
        for m in [c1, c2] {
            let d = m.det().unwrap();
            assert!(d.is_unit());
            assert_eq!(d, RingElement::zeta_pow(3));
        }
    }

    #[test]
    fn quantum_reduction_squares_to_identity() {
        let rep = Representation::quantum_su2_level2_g1().unwrap();
        let red = rep.reduce_eq5(2).unwrap();
        for i in 0..2u16 {
            let m = red.generator(i);
            assert!(m.mul(m).unwrap().is_identity());
        }
        // identity maps to identity, and reduction is multiplicative
        let id = Matrix::identity(RingDescriptor::Cyclotomic16, 3);
        assert!(id.base_change_eq5(2).unwrap().is_identity());
        let prod = rep.generator(0).mul(rep.generator(1)).unwrap();
        assert_eq!(
            prod.base_change_eq5(2).unwrap(),
            red.generator(0).mul(red.generator(1)).unwrap()
        );
    }

    #[test]
    fn coinvariants_examples() {
        // trivial action: b₁ = dim M
        let g1 = Representation::symplectic(1, RingDescriptor::Integer).unwrap();
        let al = g1.alphabet.clone();
        let d_idx = al.index_of("d").unwrap();
        let t = HurwitzTuple::new(
            al,
            Some(1),
            vec![TwistWord::plain(d_idx), TwistWord::plain(d_idx)],
        )
        .unwrap();
        let ev = evaluate_tuple(&t, &g1).unwrap();
        assert_eq!(coinvariants_rank(&ev).unwrap(), 2);
        // ξ₁ at g=2: b₁ = 0
        let rep = Representation::symplectic(2, RingDescriptor::Integer).unwrap();
        let xi1 = builtin_tuple(2, "xi1").unwrap();
        let ev = evaluate_tuple(&xi1, &rep).unwrap();
        assert_eq!(coinvariants_rank(&ev).unwrap(), 0);
        // invariant under moves
        let walked = xi1.random_walk(40, 9);
        let ev2 = evaluate_tuple(&walked, &rep).unwrap();
        assert_eq!(coinvariants_rank(&ev2).unwrap(), 0);
    }

    #[test]
    fn rep_file_round_trip() {
        let rep = Representation::symplectic(2, RingDescriptor::Integer).unwrap();
        let file = representation_to_file(&rep);
        let text = serde_json::to_string_pretty(&file).unwrap();
        let loaded = load_representation_json(&text).unwrap();
        assert_eq!(loaded.dim, 4);
        assert_eq!(loaded.alphabet.letters.len(), 6);
        // invariance failure is reported with the offending generator
        let mut bad: RepFile = serde_json::from_str(&text).unwrap();
        bad.psi = Some(
            Matrix::identity(RingDescriptor::Integer, 4).entry_strings(),
        );
        bad.psi_symmetry = None;
        let err = load_representation_json(&serde_json::to_string(&bad).unwrap()).unwrap_err();
        assert!(matches!(err, Error::PsiNotInvariant(_)));
    }

    #[test]
    fn fiber_sum_of_builtins() {
        let t1 = builtin_tuple(2, "xi1").unwrap();
        let sum = t1.fiber_sum(&t1, &Word::empty()).unwrap();
        assert_eq!(sum.len(), 40);
        assert_eq!(sum.type_count(&sum.alphabet.separating).unwrap(), (40, 0));
        let rep = Representation::symplectic(2, RingDescriptor::Integer).unwrap();
        let ev = evaluate_tuple(&sum, &rep).unwrap();
        assert!(ev.product().unwrap().is_identity());
    }
}

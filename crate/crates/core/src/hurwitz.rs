//! Symbolic Hurwitz tuples and the two Hurwitz relations.
//!
//! Tuple entries are twist words: a positive generator letter conjugated by
//! a word. Moves rewrite words symbolically; conjugators are shared
//! persistent ropes so that long random walks stay linear in the number of
//! moves, and flat segments are freely reduced (adjacent x·x⁻¹ cancelled).

use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::Arc;

/// One signed generator letter; `letter` indexes into an [`Alphabet`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SignedLetter {
    pub letter: u16,
    pub inv: bool,
}

impl SignedLetter {
    pub fn flip(self) -> Self {
        SignedLetter {
            letter: self.letter,
            inv: !self.inv,
        }
    }
}

/// Generator letters with their separating flags.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    pub letters: Vec<String>,
    pub separating: Vec<bool>,
}

impl Alphabet {
    pub fn new(letters: Vec<String>, separating: Vec<bool>) -> Result<Arc<Self>> {
        if letters.len() != separating.len() {
            return Err(Error::Dim("alphabet flags length".into()));
        }
        Ok(Arc::new(Alphabet {
            letters,
            separating,
        }))
    }

    /// The chain alphabet c1..c_{2g+1} plus the 3-chain boundary letter d.
    pub fn builtin_chain(genus: u32) -> Arc<Self> {
        let mut letters: Vec<String> = (1..=2 * genus + 1).map(|i| format!("c{i}")).collect();
        letters.push("d".into());
        // d bounds disks at genus 1 only; every chain curve is non-separating
        let mut separating = vec![false; letters.len()];
        if genus == 1 {
            *separating.last_mut().unwrap() = true;
        }
        Arc::new(Alphabet {
            letters,
            separating,
        })
    }

    pub fn index_of(&self, name: &str) -> Result<u16> {
        self.letters
            .iter()
            .position(|l| l == name)
            .map(|i| i as u16)
            .ok_or_else(|| Error::UnknownLetter(name.into()))
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }
}

const FLAT_MAX: usize = 4096;

#[derive(Debug)]
pub(crate) enum WordNode {
    Flat(Vec<SignedLetter>),
    Cat(Word, Word),
    Inv(Word),
}

/// A word in the generators: persistent rope with freely reduced flat
/// segments.
#[derive(Clone, Debug, Default)]
pub struct Word {
    pub(crate) node: Option<Arc<WordNode>>,
    len: u64,
}

impl Word {
    pub fn empty() -> Self {
        Word::default()
    }

    pub fn letter(l: SignedLetter) -> Self {
        Word {
            node: Some(Arc::new(WordNode::Flat(vec![l]))),
            len: 1,
        }
    }

    pub fn from_letters(ls: &[SignedLetter]) -> Self {
        let reduced = reduce_flat(ls);
        if reduced.is_empty() {
            return Word::empty();
        }
        let len = reduced.len() as u64;
        Word {
            node: Some(Arc::new(WordNode::Flat(reduced))),
            len,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.node.is_none()
    }

    /// Letter count (saturating; an upper bound after deep sharing since
    /// junction cancellation is not tracked inside ropes).
    pub fn len(&self) -> u64 {
        self.len
    }

    pub fn concat(a: &Word, b: &Word) -> Word {
        let (an, bn) = match (&a.node, &b.node) {
            (None, _) => return b.clone(),
            (_, None) => return a.clone(),
            (Some(x), Some(y)) => (x, y),
        };
        // structural undo: w · w⁻¹ and w⁻¹ · w vanish
        if let WordNode::Inv(x) = bn.as_ref() {
            if x.node.as_ref().is_some_and(|xn| Arc::ptr_eq(xn, an)) {
                return Word::empty();
            }
        }
        if let WordNode::Inv(x) = an.as_ref() {
            if x.node.as_ref().is_some_and(|xn| Arc::ptr_eq(xn, bn)) {
                return Word::empty();
            }
        }
        if let (WordNode::Flat(x), WordNode::Flat(y)) = (an.as_ref(), bn.as_ref()) {
            if x.len() + y.len() <= FLAT_MAX {
                let mut joined = x.clone();
                // cancel across the junction
                let mut i = 0usize;
                while !joined.is_empty()
                    && i < y.len()
                    && *joined.last().unwrap() == y[i].flip()
                {
                    joined.pop();
                    i += 1;
                }
                joined.extend_from_slice(&y[i..]);
                if joined.is_empty() {
                    return Word::empty();
                }
                let len = joined.len() as u64;
                return Word {
                    node: Some(Arc::new(WordNode::Flat(joined))),
                    len,
                };
            }
        }
        let len = a.len.saturating_add(b.len);
        Word {
            node: Some(Arc::new(WordNode::Cat(a.clone(), b.clone()))),
            len,
        }
    }

    pub fn concat3(a: &Word, b: &Word, c: &Word) -> Word {
        Word::concat(&Word::concat(a, b), c)
    }

    pub fn inverse(&self) -> Word {
        let node = match &self.node {
            None => return Word::empty(),
            Some(n) => n,
        };
        match node.as_ref() {
            WordNode::Flat(ls) => {
                let inv: Vec<SignedLetter> = ls.iter().rev().map(|l| l.flip()).collect();
                Word {
                    node: Some(Arc::new(WordNode::Flat(inv))),
                    len: self.len,
                }
            }
            WordNode::Inv(w) => w.clone(),
            WordNode::Cat(_, _) => Word {
                node: Some(Arc::new(WordNode::Inv(self.clone()))),
                len: self.len,
            },
        }
    }

    /// Materialize as a freely reduced letter sequence, when at most `limit`
    /// letters long.
    pub fn flatten_limited(&self, limit: usize) -> Option<Vec<SignedLetter>> {
        let mut out = Vec::new();
        if self.flatten_into(&mut out, false, limit) {
            Some(reduce_flat(&out))
        } else {
            None
        }
    }

    fn flatten_into(&self, out: &mut Vec<SignedLetter>, invert: bool, limit: usize) -> bool {
        let node = match &self.node {
            None => return true,
            Some(n) => n,
        };
        match node.as_ref() {
            WordNode::Flat(ls) => {
                if out.len() + ls.len() > limit {
                    return false;
                }
                if invert {
                    out.extend(ls.iter().rev().map(|l| l.flip()));
                } else {
                    out.extend_from_slice(ls);
                }
                true
            }
            WordNode::Inv(w) => w.flatten_into(out, !invert, limit),
            WordNode::Cat(a, b) => {
                if invert {
                    b.flatten_into(out, true, limit) && a.flatten_into(out, true, limit)
                } else {
                    a.flatten_into(out, false, limit) && b.flatten_into(out, false, limit)
                }
            }
        }
    }
}

fn reduce_flat(ls: &[SignedLetter]) -> Vec<SignedLetter> {
    let mut out: Vec<SignedLetter> = Vec::with_capacity(ls.len());
    for &l in ls {
        if out.last().is_some_and(|&last| last == l.flip()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// A conjugated positive generator: the group element conj⁻¹ · base · conj.
#[derive(Clone, Debug)]
pub struct TwistWord {
    pub base: u16,
    pub conj: Word,
}

impl TwistWord {
    pub fn plain(base: u16) -> Self {
        TwistWord {
            base,
            conj: Word::empty(),
        }
    }

    /// The entry as a group word.
    pub fn group_word(&self) -> Word {
        let b = Word::letter(SignedLetter {
            letter: self.base,
            inv: false,
        });
        Word::concat3(&self.conj.inverse(), &b, &self.conj)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MoveDirection {
    Forward,
    Backward,
}

/// A single Hurwitz relation instance.
#[derive(Clone, Debug)]
pub enum MoveSpec {
    /// Relation (2) at index i (1-based, 1 ≤ i < m).
    Elementary { index: usize, direction: MoveDirection },
    /// Relation (1): conjugate every entry by the word.
    GlobalConjugate(Word),
}

/// Ordered tuple of twist words; the contract is that the evaluated product
/// of the entries is the identity under any compatible representation.
#[derive(Clone, Debug)]
pub struct HurwitzTuple {
    pub alphabet: Arc<Alphabet>,
    pub genus: Option<u32>,
    pub entries: Vec<TwistWord>,
}

impl HurwitzTuple {
    pub fn new(
        alphabet: Arc<Alphabet>,
        genus: Option<u32>,
        entries: Vec<TwistWord>,
    ) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyTuple);
        }
        for e in &entries {
            if e.base as usize >= alphabet.len() {
                return Err(Error::UnknownLetter(format!("#{}", e.base)));
            }
        }
        Ok(HurwitzTuple {
            alphabet,
            genus,
            entries,
        })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Relation (2): forward replaces (z_i, z_{i+1}) by
    /// (z_{i+1}, z_{i+1}⁻¹ z_i z_{i+1}); backward is its inverse.
    pub fn hurwitz_move(&self, index: usize, direction: MoveDirection) -> Result<Self> {
        let m = self.len();
        if index < 1 || index >= m {
            return Err(Error::IndexRange(index, m));
        }
        let mut entries = self.entries.clone();
        let a = entries[index - 1].clone();
        let b = entries[index].clone();
        match direction {
            MoveDirection::Forward => {
                entries[index - 1] = b.clone();
                entries[index] = TwistWord {
                    base: a.base,
                    conj: Word::concat(&a.conj, &b.group_word()),
                };
            }
            MoveDirection::Backward => {
                entries[index - 1] = TwistWord {
                    base: b.base,
                    conj: Word::concat(&b.conj, &a.group_word().inverse()),
                };
                entries[index] = a;
            }
        }
        Ok(HurwitzTuple {
            alphabet: self.alphabet.clone(),
            genus: self.genus,
            entries,
        })
    }

    /// Relation (1): conjugate every entry by w.
    pub fn global_conjugate(&self, w: &Word) -> Self {
        let entries = self
            .entries
            .iter()
            .map(|e| TwistWord {
                base: e.base,
                conj: Word::concat(&e.conj, w),
            })
            .collect();
        HurwitzTuple {
            alphabet: self.alphabet.clone(),
            genus: self.genus,
            entries,
        }
    }

    pub fn apply(&self, spec: &MoveSpec) -> Result<Self> {
        match spec {
            MoveSpec::Elementary { index, direction } => self.hurwitz_move(*index, *direction),
            MoveSpec::GlobalConjugate(w) => Ok(self.global_conjugate(w)),
        }
    }

    /// Twist fiber sum: concatenation with the h-conjugated second tuple.
    pub fn fiber_sum(&self, other: &HurwitzTuple, h: &Word) -> Result<Self> {
        if self.alphabet.letters != other.alphabet.letters {
            return Err(Error::AlphabetMismatch(format!(
                "{:?} vs {:?}",
                self.alphabet.letters, other.alphabet.letters
            )));
        }
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|e| TwistWord {
            base: e.base,
            conj: Word::concat(&e.conj, h),
        }));
        Ok(HurwitzTuple {
            alphabet: self.alphabet.clone(),
            genus: self.genus,
            entries,
        })
    }

    /// Apply `steps` seeded random moves: 90% elementary (uniform index and
    /// direction), 10% global conjugation by a random word of length ≤ 4.
    pub fn random_walk(&self, steps: u64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut t = self.clone();
        let m = t.len();
        for _ in 0..steps {
            if m >= 2 && rng.gen_range(0..10) < 9 {
                let index = rng.gen_range(1..m);
                let direction = if rng.gen_bool(0.5) {
                    MoveDirection::Forward
                } else {
                    MoveDirection::Backward
                };
                t = t.hurwitz_move(index, direction).expect("index in range");
            } else {
                let len = rng.gen_range(1..=4usize);
                let ls: Vec<SignedLetter> = (0..len)
                    .map(|_| SignedLetter {
                        letter: rng.gen_range(0..t.alphabet.len() as u16),
                        inv: rng.gen_bool(0.5),
                    })
                    .collect();
                t = t.global_conjugate(&Word::from_letters(&ls));
            }
        }
        t
    }

    /// Sample a random single move (for base-change verification).
    pub fn random_move(&self, rng: &mut ChaCha8Rng) -> MoveSpec {
        let m = self.len();
        if m >= 2 && rng.gen_range(0..10) < 8 {
            MoveSpec::Elementary {
                index: rng.gen_range(1..m),
                direction: if rng.gen_bool(0.5) {
                    MoveDirection::Forward
                } else {
                    MoveDirection::Backward
                },
            }
        } else {
            let len = rng.gen_range(1..=4usize);
            let ls: Vec<SignedLetter> = (0..len)
                .map(|_| SignedLetter {
                    letter: rng.gen_range(0..self.alphabet.len() as u16),
                    inv: rng.gen_bool(0.5),
                })
                .collect();
            MoveSpec::GlobalConjugate(Word::from_letters(&ls))
        }
    }

    /// (m_ns, m − m_ns) from the separating flags: conjugation preserves the
    /// flag, so only base letters are consulted.
    pub fn type_count(&self, separating: &[bool]) -> Result<(usize, usize)> {
        let m = self.len();
        let mut ns = 0usize;
        for e in &self.entries {
            let flag = separating
                .get(e.base as usize)
                .ok_or_else(|| Error::MissingFlag(format!("#{}", e.base)))?;
            if !flag {
                ns += 1;
            }
        }
        Ok((ns, m - ns))
    }
}

/// Parse the compact word syntax: tokens "c1", "c2^-1", "c5^2", optionally
/// followed by "| ^n" repeating the whole word n times.
pub fn parse_word(alphabet: &Alphabet, text: &str) -> Result<Word> {
    let letters = parse_signed_letters(alphabet, text)?;
    Ok(Word::from_letters(&letters))
}

fn parse_signed_letters(alphabet: &Alphabet, text: &str) -> Result<Vec<SignedLetter>> {
    let bad = |t: &str| Error::Parse {
        what: "word",
        text: t.to_string(),
    };
    let (body, reps) = match text.split_once('|') {
        Some((b, r)) => {
            let r = r.trim();
            let r = r.strip_prefix('^').ok_or_else(|| bad(text))?;
            let n: usize = r.trim().parse().map_err(|_| bad(text))?;
            (b, n)
        }
        None => (text, 1),
    };
    let mut letters = Vec::new();
    for tok in body.split_whitespace() {
        let (name, pow) = match tok.split_once('^') {
            Some((n, p)) => {
                let p: i64 = p.parse().map_err(|_| bad(tok))?;
                if p == 0 {
                    return Err(bad(tok));
                }
                (n, p)
            }
            None => (tok, 1),
        };
        let idx = alphabet.index_of(name)?;
        for _ in 0..pow.unsigned_abs() {
            letters.push(SignedLetter {
                letter: idx,
                inv: pow < 0,
            });
        }
    }
    let mut out = Vec::with_capacity(letters.len() * reps);
    for _ in 0..reps {
        out.extend_from_slice(&letters);
    }
    Ok(out)
}

/// Parse a tuple given as a compact word of positive letters; each letter
/// becomes an entry with empty conjugator.
pub fn parse_tuple_word(
    alphabet: &Arc<Alphabet>,
    genus: Option<u32>,
    text: &str,
) -> Result<HurwitzTuple> {
    let letters = parse_signed_letters(alphabet, text)?;
    if letters.iter().any(|l| l.inv) {
        return Err(Error::Parse {
            what: "tuple word (negative powers are not twists)",
            text: text.to_string(),
        });
    }
    let entries = letters
        .into_iter()
        .map(|l| TwistWord::plain(l.letter))
        .collect();
    HurwitzTuple::new(alphabet.clone(), genus, entries)
}

/// Parse a move script: ';'-separated moves "f <i>", "b <i>", "g <word>".
pub fn parse_move_script(alphabet: &Alphabet, text: &str) -> Result<Vec<MoveSpec>> {
    let mut out = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let bad = || Error::Parse {
            what: "move script",
            text: part.to_string(),
        };
        let (op, rest) = part.split_at(1);
        let rest = rest.trim();
        match op {
            "f" | "b" => {
                let index: usize = rest.parse().map_err(|_| bad())?;
                out.push(MoveSpec::Elementary {
                    index,
                    direction: if op == "f" {
                        MoveDirection::Forward
                    } else {
                        MoveDirection::Backward
                    },
                });
            }
            "g" => out.push(MoveSpec::GlobalConjugate(parse_word(alphabet, rest)?)),
            _ => return Err(bad()),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy_alphabet() -> Arc<Alphabet> {
        Alphabet::new(
            vec!["a".into(), "b".into(), "s".into()],
            vec![false, false, true],
        )
        .unwrap()
    }

    fn flat(t: &TwistWord) -> (u16, Vec<SignedLetter>) {
        (t.base, t.conj.flatten_limited(1 << 20).unwrap())
    }

    #[test]
    fn forward_move_at_one() {
        // (a, b) -> (b, b⁻¹ a b)
        let al = toy_alphabet();
        let t = HurwitzTuple::new(
            al.clone(),
            None,
            vec![TwistWord::plain(0), TwistWord::plain(1)],
        )
        .unwrap();
        let t2 = t.hurwitz_move(1, MoveDirection::Forward).unwrap();
        assert_eq!(t2.entries[0].base, 1);
        assert!(t2.entries[0].conj.is_empty());
        assert_eq!(t2.entries[1].base, 0);
        assert_eq!(
            t2.entries[1].conj.flatten_limited(16).unwrap(),
            vec![SignedLetter {
                letter: 1,
                inv: false
            }]
        );
    }

    #[test]
    fn forward_then_backward_restores() {
        let al = toy_alphabet();
        let conj = parse_word(&al, "b a^-1").unwrap();
        let t = HurwitzTuple::new(
            al,
            None,
            vec![
                TwistWord { base: 0, conj },
                TwistWord::plain(1),
                TwistWord::plain(0),
            ],
        )
        .unwrap();
        for i in 1..3 {
            let roundtrip = t
                .hurwitz_move(i, MoveDirection::Forward)
                .unwrap()
                .hurwitz_move(i, MoveDirection::Backward)
                .unwrap();
            for (x, y) in t.entries.iter().zip(&roundtrip.entries) {
                assert_eq!(flat(x), flat(y));
            }
        }
    }

    #[test]
    fn move_index_out_of_range() {
        let al = toy_alphabet();
        let t = HurwitzTuple::new(al, None, vec![TwistWord::plain(0), TwistWord::plain(1)])
            .unwrap();
        assert!(t.hurwitz_move(0, MoveDirection::Forward).is_err());
        assert!(t.hurwitz_move(2, MoveDirection::Forward).is_err());
    }

    #[test]
    fn global_conjugate_empty_is_identity() {
        let al = toy_alphabet();
        let t = HurwitzTuple::new(al, None, vec![TwistWord::plain(0)]).unwrap();
        let t2 = t.global_conjugate(&Word::empty());
        assert_eq!(flat(&t.entries[0]), flat(&t2.entries[0]));
    }

    #[test]
    fn fiber_sum_concatenates() {
        let al = toy_alphabet();
        let t1 = HurwitzTuple::new(
            al.clone(),
            None,
            vec![TwistWord::plain(0), TwistWord::plain(1)],
        )
        .unwrap();
        let t2 = HurwitzTuple::new(al.clone(), None, vec![TwistWord::plain(2)]).unwrap();
        let s = t1.fiber_sum(&t2, &Word::empty()).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.entries[2].conj.is_empty());
        let h = parse_word(&al, "a b").unwrap();
        let s2 = t1.fiber_sum(&t2, &h).unwrap();
        assert_eq!(
            s2.entries[2].conj.flatten_limited(16).unwrap().len(),
            2
        );
    }

    #[test]
    fn random_walk_deterministic() {
        let al = toy_alphabet();
        let t = HurwitzTuple::new(
            al,
            None,
            vec![TwistWord::plain(0), TwistWord::plain(1), TwistWord::plain(2)],
        )
        .unwrap();
        assert_eq!(t.random_walk(0, 7).len(), 3);
        let a = t.random_walk(200, 42);
        let b = t.random_walk(200, 42);
        for (x, y) in a.entries.iter().zip(&b.entries) {
            assert_eq!(x.base, y.base);
            assert_eq!(x.conj.len(), y.conj.len());
        }
        let c = t.random_walk(200, 43);
        let same = a
            .entries
            .iter()
            .zip(&c.entries)
            .all(|(x, y)| x.base == y.base && x.conj.len() == y.conj.len());
        assert!(!same);
    }

    #[test]
    fn type_count_rides_base_letters() {
        let al = toy_alphabet();
        let t = HurwitzTuple::new(
            al.clone(),
            None,
            vec![TwistWord::plain(0), TwistWord::plain(2), TwistWord::plain(2)],
        )
        .unwrap();
        assert_eq!(t.type_count(&al.separating).unwrap(), (1, 2));
        let walked = t.random_walk(50, 3);
        assert_eq!(walked.type_count(&al.separating).unwrap(), (1, 2));
    }

    #[test]
    fn word_parsing_with_repeat() {
        let al = toy_alphabet();
        let w = parse_word(&al, "a b^2 a^-1 | ^2").unwrap();
        // free reduction cancels the a^-1·a junction between the two copies
        let f = w.flatten_limited(64).unwrap();
        assert_eq!(f.len(), 6);
        assert!(parse_word(&al, "q").is_err());
        assert!(parse_word(&al, "a^0").is_err());
        let t = parse_tuple_word(&al, None, "a b b a | ^2");
        assert_eq!(t.unwrap().len(), 8);
        assert!(parse_tuple_word(&al, None, "a b^-1").is_err());
    }

    #[test]
    fn free_reduction_at_junctions() {
        let al = toy_alphabet();
        let w = parse_word(&al, "a b").unwrap();
        let r = Word::concat(&w, &w.inverse());
        assert!(r.is_empty());
        let s = Word::concat(
            &parse_word(&al, "a b b^-1").unwrap(),
            &parse_word(&al, "a^-1 s").unwrap(),
        );
        assert_eq!(s.flatten_limited(8).unwrap().len(), 1);
    }

    #[test]
    fn long_walk_words_stay_shared() {
        // 500 moves on a 4-entry tuple must not materialize huge words
        let al = toy_alphabet();
        let t = HurwitzTuple::new(
            al,
            None,
            vec![
                TwistWord::plain(0),
                TwistWord::plain(1),
                TwistWord::plain(0),
                TwistWord::plain(1),
            ],
        )
        .unwrap();
        let walked = t.random_walk(500, 11);
        assert_eq!(walked.len(), 4);
        // lengths can be astronomical; the rope must report them without
        // materializing
        let _total: u64 = walked
            .entries
            .iter()
            .map(|e| e.conj.len())
            .fold(0, |a, b| a.saturating_add(b));
    }
}

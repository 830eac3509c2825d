//! JSON schemas: tuple files, invariant results, signature and fuzz reports.

use crate::error::{Error, Result};
use crate::fuzz::FuzzReport;
use crate::hurwitz::{Alphabet, HurwitzTuple, SignedLetter, TwistWord, Word};
use crate::invariant::{Certificate, InvariantResult, ProductScalar};
use crate::meyer::SignatureReport;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Tuple file: { "genus": g, "alphabet": "builtin-chain" | "custom",
/// "entries": [ {"base": "c1", "conj": ["c2","c3^-1"]}, … ],
/// "letters": [...] (custom alphabets only) }.
#[derive(Debug, Serialize, Deserialize)]
pub struct TupleFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    pub alphabet: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub letters: Option<Vec<LetterDecl>>,
    pub entries: Vec<TupleEntry>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LetterDecl {
    pub name: String,
    pub separating: bool,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct TupleEntry {
    pub base: String,
    #[serde(default)]
    pub conj: Vec<String>,
}

const SERIALIZE_LIMIT: usize = 100_000;

pub fn tuple_from_json(text: &str) -> Result<HurwitzTuple> {
    let file: TupleFile = serde_json::from_str(text)?;
    let alphabet = match file.alphabet.as_str() {
        "builtin-chain" => {
            let genus = file
                .genus
                .ok_or_else(|| Error::Schema("builtin-chain alphabet needs a genus".into()))?;
            Alphabet::builtin_chain(genus)
        }
        "custom" => {
            let decls = file
                .letters
                .as_ref()
                .ok_or_else(|| Error::Schema("custom alphabet needs letters".into()))?;
            Alphabet::new(
                decls.iter().map(|d| d.name.clone()).collect(),
                decls.iter().map(|d| d.separating).collect(),
            )?
        }
        other => return Err(Error::Schema(format!("unknown alphabet kind {other}"))),
    };
    let mut entries = Vec::with_capacity(file.entries.len());
    for e in &file.entries {
        let base = alphabet.index_of(&e.base)?;
        let mut letters = Vec::with_capacity(e.conj.len());
        for tok in &e.conj {
            letters.push(parse_letter_token(&alphabet, tok)?);
        }
        entries.push(TwistWord {
            base,
            conj: Word::from_letters(&letters),
        });
    }
    HurwitzTuple::new(alphabet, file.genus, entries)
}

pub fn tuple_to_file(t: &HurwitzTuple, builtin_chain: bool) -> Result<TupleFile> {
    let mut entries = Vec::with_capacity(t.len());
    for e in &t.entries {
        let letters = e.conj.flatten_limited(SERIALIZE_LIMIT).ok_or_else(|| {
            Error::Schema("conjugator too long to serialize; reduce the walk length".into())
        })?;
        entries.push(TupleEntry {
            base: t.alphabet.letters[e.base as usize].clone(),
            conj: letters
                .iter()
                .map(|l| letter_token(&t.alphabet, *l))
                .collect(),
        });
    }
    Ok(TupleFile {
        genus: t.genus,
        alphabet: if builtin_chain {
            "builtin-chain".into()
        } else {
            "custom".into()
        },
        letters: if builtin_chain {
            None
        } else {
            Some(
                t.alphabet
                    .letters
                    .iter()
                    .zip(&t.alphabet.separating)
                    .map(|(name, &separating)| LetterDecl {
                        name: name.clone(),
                        separating,
                    })
                    .collect(),
            )
        },
        entries,
    })
}

fn parse_letter_token(alphabet: &Alphabet, tok: &str) -> Result<SignedLetter> {
    let (name, inv) = match tok.strip_suffix("^-1") {
        Some(n) => (n, true),
        None => (tok, false),
    };
    Ok(SignedLetter {
        letter: alphabet.index_of(name.trim())?,
        inv,
    })
}

fn letter_token(alphabet: &Alphabet, l: SignedLetter) -> String {
    let name = &alphabet.letters[l.letter as usize];
    if l.inv {
        format!("{name}^-1")
    } else {
        name.clone()
    }
}

/// JSON view of an invariant computation.
#[derive(Debug, Serialize, Deserialize)]
pub struct InvariantJson {
    pub ring: String,
    pub m: usize,
    pub fibration_type: (usize, usize),
    pub kernel_rank: usize,
    pub mz_rank: usize,
    pub class_string: String,
    pub form_class: crate::linalg::FormClass,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub w: Option<Vec<Vec<String>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub determinant: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_w: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma_total: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_mz: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predicted_kernel: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub predictions_hold: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub torsion_index: Option<String>,
    pub product: String,
    pub outside_lemma_hypotheses: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateJson>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CertificateJson {
    pub per_letter_smith_diagonals: Vec<Vec<String>>,
    pub all_cokernels_torsion_free: bool,
    pub psi_unimodular: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub det_w: Option<String>,
    pub det_is_unit: bool,
    pub verdict: String,
}

impl InvariantJson {
    pub fn from_result(
        ring: String,
        inv: &InvariantResult,
        include_w: bool,
        cert: Option<&Certificate>,
    ) -> Self {
        InvariantJson {
            ring,
            m: inv.m,
            fibration_type: (inv.m_ns, inv.m_sep),
            kernel_rank: inv.kernel_rank,
            mz_rank: inv.mz_rank,
            class_string: inv.form_class.class_string.clone(),
            form_class: inv.form_class.clone(),
            w: if include_w {
                Some(inv.w.entry_strings())
            } else {
                None
            },
            determinant: inv.determinant.as_ref().map(|d| d.to_string()),
            b1: inv.b1,
            sigma_w: inv.sigma_w,
            sigma_total: inv.sigma_total,
            predicted_mz: inv.predicted_mz,
            predicted_kernel: inv.predicted_kernel,
            predictions_hold: inv.predictions_hold,
            torsion_index: inv.torsion_index.as_ref().map(|t| t.to_string()),
            product: match &inv.product_scalar {
                ProductScalar::Identity => "identity".into(),
                other => other.describe(),
            },
            outside_lemma_hypotheses: inv.outside_lemma_hypotheses,
            certificate: cert.map(|c| CertificateJson {
                per_letter_smith_diagonals: c
                    .per_letter
                    .iter()
                    .map(|l| l.smith_diagonal.iter().map(|x| x.to_string()).collect())
                    .collect(),
                all_cokernels_torsion_free: c.all_cokernels_torsion_free,
                psi_unimodular: c.psi_unimodular,
                det_w: c.det_w.as_ref().map(|d| d.to_string()),
                det_is_unit: c.det_is_unit,
                verdict: c.verdict.clone(),
            }),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct SignatureJson {
    pub sigma_meyer: i64,
    pub sigma_form: i64,
    pub agree: bool,
    pub per_term: Vec<i64>,
    pub m: usize,
    pub m_ns: usize,
}

impl From<&SignatureReport> for SignatureJson {
    fn from(r: &SignatureReport) -> Self {
        SignatureJson {
            sigma_meyer: r.sigma_meyer,
            sigma_form: r.sigma_form,
            agree: r.agree,
            per_term: r.per_term.clone(),
            m: r.m,
            m_ns: r.m_ns,
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
pub struct FuzzJson {
    pub steps: u64,
    pub seed: u64,
    pub passed: bool,
    pub classification_stable: bool,
    pub product_preserved: bool,
    pub base_change_moves_checked: usize,
    pub base_change_pairs_checked: usize,
    pub failures: Vec<String>,
    pub baseline_class: String,
    pub walked_class: String,
}

impl From<&FuzzReport> for FuzzJson {
    fn from(r: &FuzzReport) -> Self {
        FuzzJson {
            steps: r.steps,
            seed: r.seed,
            passed: r.passed(),
            classification_stable: r.classification_stable,
            product_preserved: r.product_preserved,
            base_change_moves_checked: r.base_change_moves_checked,
            base_change_pairs_checked: r.base_change_pairs_checked,
            failures: r.failures.clone(),
            baseline_class: r.baseline_summary.clone(),
            walked_class: r.walked_summary.clone(),
        }
    }
}

/// Shared Arc alias so downstream crates don't need to name the container.
pub type SharedAlphabet = Arc<Alphabet>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reps::builtin_tuple;

    #[test]
    fn tuple_round_trip() {
        let t = builtin_tuple(2, "xi1").unwrap();
        let moved = t
            .hurwitz_move(3, crate::hurwitz::MoveDirection::Forward)
            .unwrap();
        let file = tuple_to_file(&moved, true).unwrap();
        let text = serde_json::to_string_pretty(&file).unwrap();
        let back = tuple_from_json(&text).unwrap();
        assert_eq!(back.len(), 20);
        assert_eq!(back.genus, Some(2));
        for (a, b) in moved.entries.iter().zip(&back.entries) {
            assert_eq!(a.base, b.base);
            assert_eq!(
                a.conj.flatten_limited(1000),
                b.conj.flatten_limited(1000)
            );
        }
    }

    #[test]
    fn custom_alphabet_round_trip() {
        let text = r#"{
            "alphabet": "custom",
            "letters": [
                {"name": "t1", "separating": false},
                {"name": "t2", "separating": true}
            ],
            "entries": [
                {"base": "t1", "conj": ["t2", "t1^-1"]},
                {"base": "t2"}
            ]
        }"#;
        let t = tuple_from_json(text).unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.type_count(&t.alphabet.separating).unwrap(), (1, 1));
        let file = tuple_to_file(&t, false).unwrap();
        let text2 = serde_json::to_string(&file).unwrap();
        let t2 = tuple_from_json(&text2).unwrap();
        assert_eq!(t2.alphabet.letters, t.alphabet.letters);
    }

    #[test]
    fn rejects_bad_schema() {
        assert!(tuple_from_json("{}").is_err());
        assert!(tuple_from_json(r#"{"alphabet":"builtin-chain","entries":[]}"#).is_err());
        assert!(
            tuple_from_json(r#"{"alphabet":"custom","letters":[],"entries":[{"base":"x"}]}"#)
                .is_err()
        );
    }
}

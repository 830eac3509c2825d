//! Command-line front end: invariant computation, table reproduction,
//! two-route signatures, invariance fuzzing, and move scripts.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hurwitz_forms::fuzz::invariance_fuzz;
use hurwitz_forms::hurwitz::{parse_move_script, parse_tuple_word, HurwitzTuple};
use hurwitz_forms::invariant::{
    compute_invariant, unimodularity_certificate, InvariantOptions, InvariantResult,
};
use hurwitz_forms::io::{
    tuple_from_json, tuple_to_file, FuzzJson, InvariantJson, SignatureJson,
};
use hurwitz_forms::linalg::classify::class_strings_agree;
use hurwitz_forms::meyer::fibration_signature;
use hurwitz_forms::reps::{
    builtin_row, evaluate_tuple, load_representation, EvaluatedTuple, Representation,
};
use hurwitz_forms::ring::RingDescriptor;
use rayon::prelude::*;
use serde::Deserialize;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "hurwitz-forms",
    about = "Bilinear-form invariants of Lefschetz fibration monodromies over exact rings",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct TupleSource {
    /// Built-in fibration word or fiber sum: xi1 | xi2 | xi3 | "xi1#id:xi1" |
    /// "xi2#d:xi1" (the word after '#' conjugates the second factor)
    #[arg(long)]
    builtin: Option<String>,
    /// Tuple JSON file
    #[arg(long)]
    tuple_file: Option<PathBuf>,
    /// Inline tuple word, e.g. "c1 c2 c3 c4 c5^2 c4 c3 c2 c1 | ^2"
    #[arg(long)]
    word: Option<String>,
}

#[derive(Args, Clone)]
struct RepSource {
    /// Coefficient ring: Z | Q | Zmod:P | Fpy:p | Zzeta16
    #[arg(long, default_value = "Z")]
    ring: String,
    /// Representation file (JSON schema); default is the symplectic
    /// representation t the given genus over --ring
    #[arg(long)]
    rep_file: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the bilinear-form invariant of one tuple
    Invariant {
        #[arg(long)]
        genus: Option<u32>,
        #[command(flatten)]
        tuple: TupleSource,
        #[command(flatten)]
        rep: RepSource,
        /// Offset ell of the pairing (default 1; the result is
        /// ell-independent for relators)
        #[arg(long, default_value_t = 1)]
        ell: usize,
        /// Include the unimodularity certificate
        #[arg(long)]
        certificate: bool,
        /// Include the W matrix entries in JSON output
        #[arg(long)]
        with_w: bool,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Recompute the fibration table rows (symplectic column and sigma)
    Table {
        #[arg(long)]
        genus: u32,
        /// Pre-apply a random walk of this many moves to every row
        #[arg(long)]
        fuzz: Option<u64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Total-space signature by the cocycle sum and the form route
    Signature {
        #[arg(long)]
        genus: Option<u32>,
        #[command(flatten)]
        tuple: TupleSource,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the invariance suite on one tuple
    Fuzz {
        #[arg(long)]
        genus: Option<u32>,
        #[command(flatten)]
        tuple: TupleSource,
        #[command(flatten)]
        rep: RepSource,
        #[arg(long, default_value_t = 500)]
        steps: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random single moves for the base-change verification
        #[arg(long, default_value_t = 20)]
        moves: usize,
        /// Random kernel-vector pairs per move
        #[arg(long, default_value_t = 10)]
        pairs: usize,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Apply a move script to a tuple file and write the result
    Moves {
        #[arg(long)]
        tuple_file: PathBuf,
        /// Script: ';'-separated "f <i>" (forward), "b <i>" (backward),
        /// "g <word>" (global conjugation)
        #[arg(long)]
        script: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}

fn resolve_tuple(src: &TupleSource, genus: Option<u32>) -> Result<HurwitzTuple> {
    let picked = [
        src.builtin.is_some(),
        src.tuple_file.is_some(),
        src.word.is_some(),
    ]
    .iter()
    .filter(|&&b| b)
    .count();
    if picked != 1 {
        bail!("exactly one of --builtin, --tuple-file, --word must be given");
    }
    if let Some(name) = &src.builtin {
        let g = genus.ok_or_else(|| anyhow!("--genus is required with --builtin"))?;
        return Ok(builtin_row(g, name)?);
    }
    if let Some(path) = &src.tuple_file {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        let t = tuple_from_json(&text)?;
        if t.is_empty() {
            bail!("tuple file has no entries");
        }
        return Ok(t);
    }
    let word = src.word.as_ref().unwrap();
    let g = genus.ok_or_else(|| anyhow!("--genus is required with --word"))?;
    let alphabet = hurwitz_forms::hurwitz::Alphabet::builtin_chain(g);
    Ok(parse_tuple_word(&alphabet, Some(g), word)?)
}

fn resolve_rep(src: &RepSource, genus: Option<u32>) -> Result<Representation> {
    if let Some(path) = &src.rep_file {
        return Ok(load_representation(path)?);
    }
    let ring = RingDescriptor::parse(&src.ring)?;
    let g = genus.ok_or_else(|| anyhow!("--genus is required for the symplectic representation"))?;
    Ok(Representation::symplectic(g, ring)?)
}

fn write_out(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("writing {}", path.display()))?,
        None => println!("{text}"),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Invariant {
            genus,
            tuple,
            rep,
            ell,
            certificate,
            with_w,
            json,
            out,
        } => {
            let t = resolve_tuple(&tuple, genus)?;
            let genus = genus.or(t.genus);
            let rep = resolve_rep(&rep, genus)?;
            let psi = rep
                .psi
                .clone()
                .ok_or_else(|| anyhow!("representation carries no psi; supply one via --rep-file"))?;
            let ev = evaluate_tuple(&t, &rep)?;
            let inv = compute_invariant(&ev, &psi, rep.genus.or(genus), &InvariantOptions { ell })?;
            let cert = if certificate {
                Some(unimodularity_certificate(&ev, &psi, &inv)?)
            } else {
                None
            };
            if json {
                let j = InvariantJson::from_result(rep.ring.name(), &inv, with_w, cert.as_ref());
                write_out(&out, &serde_json::to_string_pretty(&j)?)?;
            } else {
                write_out(&out, &render_invariant(&rep, &inv, cert.as_ref()))?;
            }
            Ok(0)
        }
        Command::Table {
            genus,
            fuzz,
            seed,
            json,
            out,
        } => table_command(genus, fuzz, seed, json, out),
        Command::Signature {
            genus,
            tuple,
            json,
            out,
        } => {
            let t = resolve_tuple(&tuple, genus)?;
            let genus = genus.or(t.genus);
            let rep = resolve_rep(
                &RepSource {
                    ring: "Z".into(),
                    rep_file: None,
                },
                genus,
            )?;
            let ev = evaluate_tuple(&t, &rep)?;
            let r = fibration_signature(&ev)?;
            if json {
                write_out(&out, &serde_json::to_string_pretty(&SignatureJson::from(&r))?)?;
            } else {
                write_out(
                    &out,
                    &format!(
                        "sigma_meyer = {}\nsigma_form  = {}\nagree = {}\nper-term cocycle values: {:?}",
                        r.sigma_meyer, r.sigma_form, r.agree, r.per_term
                    ),
                )?;
            }
            Ok(if r.agree { 0 } else { 1 })
        }
        Command::Fuzz {
            genus,
            tuple,
            rep,
            steps,
            seed,
            moves,
            pairs,
            json,
            out,
        } => {
            if steps < 1 {
                bail!("--steps must be at least 1");
            }
            let t = resolve_tuple(&tuple, genus)?;
            let genus = genus.or(t.genus);
            let rep = resolve_rep(&rep, genus)?;
            let r = invariance_fuzz(&t, &rep, None, steps, moves, pairs, seed)?;
            if json {
                write_out(&out, &serde_json::to_string_pretty(&FuzzJson::from(&r))?)?;
            } else {
                let mut s = format!(
                    "steps = {}, seed = {}\nclassification stable: {}\nproduct preserved: {}\nbase-change checks: {} moves, {} pairs\nclass: '{}' -> '{}'",
                    r.steps,
                    r.seed,
                    r.classification_stable,
                    r.product_preserved,
                    r.base_change_moves_checked,
                    r.base_change_pairs_checked,
                    r.baseline_summary,
                    r.walked_summary
                );
                if !r.failures.is_empty() {
                    s.push_str(&format!("\nfailures: {:?}", r.failures));
                }
                write_out(&out, &s)?;
            }
            Ok(if r.passed() { 0 } else { 1 })
        }
        Command::Moves {
            tuple_file,
            script,
            out,
        } => {
            let text = std::fs::read_to_string(&tuple_file)
                .with_context(|| format!("reading {}", tuple_file.display()))?;
            let mut t = tuple_from_json(&text)?;
            let is_builtin = text.contains("builtin-chain");
            let moves = parse_move_script(&t.alphabet, &script)?;
            for mv in &moves {
                t = t.apply(mv)?;
            }
            let file = tuple_to_file(&t, is_builtin)?;
            std::fs::write(&out, serde_json::to_string_pretty(&file)?)
                .with_context(|| format!("writing {}", out.display()))?;
            println!("applied {} moves -> {}", moves.len(), out.display());
            Ok(0)
        }
    }
}

fn render_invariant(
    rep: &Representation,
    inv: &InvariantResult,
    cert: Option<&hurwitz_forms::invariant::Certificate>,
) -> String {
    let mut s = String::new();
    s.push_str(&format!("ring: {}\n", rep.ring.name()));
    s.push_str(&format!(
        "m = {}, type = ({}, {})\n",
        inv.m, inv.m_ns, inv.m_sep
    ));
    s.push_str(&format!("class: {}\n", inv.form_class.class_string));
    s.push_str(&format!(
        "kernel rank = {}, M_z rank = {}\n",
        inv.kernel_rank, inv.mz_rank
    ));
    if let Some(sig) = inv.sigma_w {
        s.push_str(&format!("signature(W) = {sig}"));
        if let Some(st) = inv.sigma_total {
            s.push_str(&format!(", sigma(total space) = {st}"));
        }
        s.push('\n');
    }
    if let Some(d) = &inv.determinant {
        s.push_str(&format!("det(W) = {d}\n"));
    }
    if let Some(b1) = inv.b1 {
        s.push_str(&format!("b1 = {b1}\n"));
    }
    if let (Some(pm), Some(pk), Some(h)) =
        (inv.predicted_mz, inv.predicted_kernel, inv.predictions_hold)
    {
        s.push_str(&format!(
            "predicted ranks: mz = {pm}, kernel = {pk} ... {}\n",
            if h { "consistent" } else { "INCONSISTENT" }
        ));
    }
    if let Some(t) = &inv.torsion_index {
        s.push_str(&format!("quotient torsion index = {t}\n"));
    }
    if inv.form_class.definite_even_disclaimer {
        s.push_str(
            "note: definite even form of rank >= 16; class stated by rank/parity/signature only\n",
        );
    }
    if let Some(c) = cert {
        s.push_str(&format!(
            "certificate: {} (cokernels torsion-free: {}, det unit: {})\n",
            c.verdict, c.all_cokernels_torsion_free, c.det_is_unit
        ));
    }
    s
}

#[derive(Debug, Deserialize)]
struct TableData {
    rows: Vec<TableRow>,
}

#[derive(Debug, Deserialize)]
struct TableRow {
    genus: u32,
    label: String,
    display: String,
    #[serde(rename = "type")]
    fibration_type: (usize, usize),
    sigma: i64,
    #[serde(default)]
    note: Option<String>,
    q_class: String,
}

fn table_command(
    genus: u32,
    fuzz: Option<u64>,
    seed: u64,
    json: bool,
    out: Option<PathBuf>,
) -> Result<i32> {
    if genus != 2 && genus != 3 {
        bail!("table rows exist for genus 2 and 3");
    }
    let data: TableData = serde_json::from_str(include_str!("../data/table1.json"))?;
    let rows: Vec<&TableRow> = data.rows.iter().filter(|r| r.genus == genus).collect();
    let results: Vec<Result<RowResult>> = rows
        .par_iter()
        .map(|row| compute_row(row, fuzz, seed))
        .collect();
    let mut all_ok = true;
    let mut lines = Vec::new();
    let mut json_rows = Vec::new();
    for (row, res) in rows.iter().zip(results) {
        let r = res?;
        all_ok &= r.class_ok && r.sigma_ok && r.type_ok;
        let mark = |b: bool| if b { "ok " } else { "XX " };
        lines.push(format!(
            "{:<16} type ({:>2},{:>1}) {}  sigma {:>4} vs {:>4} {}  Q {} vs expected {} {}  [quantum columns: n/a (representation not in paper)]{}",
            row.display,
            r.m_ns,
            r.m_sep,
            mark(r.type_ok),
            r.sigma,
            row.sigma,
            mark(r.sigma_ok),
            r.class,
            row.q_class,
            mark(r.class_ok),
            row.note
                .as_ref()
                .map(|n| format!("  ({n})"))
                .unwrap_or_default(),
        ));
        json_rows.push(serde_json::json!({
            "row": row.display,
            "label": row.label,
            "type": [r.m_ns, r.m_sep],
            "type_expected": row.fibration_type,
            "type_ok": r.type_ok,
            "sigma": r.sigma,
            "sigma_expected": row.sigma,
            "sigma_ok": r.sigma_ok,
            "class": r.class,
            "class_expected": row.q_class,
            "class_ok": r.class_ok,
            "quantum_columns": "n/a (representation not in paper)",
        }));
    }
    let text = if json {
        serde_json::to_string_pretty(&serde_json::json!({
            "genus": genus,
            "fuzz": fuzz,
            "seed": seed,
            "all_ok": all_ok,
            "rows": json_rows,
        }))?
    } else {
        let mut s = format!("fibration table, genus {genus}");
        if let Some(f) = fuzz {
            s.push_str(&format!(" (after {f} random moves per row, seed {seed})"));
        }
        s.push('\n');
        s.push_str(&lines.join("\n"));
        s.push_str(&format!(
            "\n{} rows, all checks {}",
            lines.len(),
            if all_ok { "ok" } else { "FAILED" }
        ));
        s
    };
    write_out(&out, &text)?;
    Ok(if all_ok { 0 } else { 1 })
}

struct RowResult {
    m_ns: usize,
    m_sep: usize,
    sigma: i64,
    class: String,
    class_ok: bool,
    sigma_ok: bool,
    type_ok: bool,
}

fn compute_row(row: &TableRow, fuzz: Option<u64>, seed: u64) -> Result<RowResult> {
    let rep = Representation::symplectic(row.genus, RingDescriptor::Integer)?;
    let mut t = builtin_row(row.genus, &row.label)?;
    if let Some(steps) = fuzz {
        t = t.random_walk(steps, seed);
    }
    let ev: EvaluatedTuple = evaluate_tuple(&t, &rep)?;
    let psi = rep.psi.clone().unwrap();
    let inv = compute_invariant(&ev, &psi, Some(row.genus), &InvariantOptions::default())?;
    let sigma = inv
        .sigma_total
        .ok_or_else(|| anyhow!("no signature for row {}", row.label))?;
    let (m_ns, m_sep) = ev.type_count();
    Ok(RowResult {
        m_ns,
        m_sep,
        sigma,
        class: inv.form_class.class_string.clone(),
        class_ok: class_strings_agree(&inv.form_class.class_string, &row.q_class)
            || inv.form_class.matches_string(&row.q_class),
        sigma_ok: sigma == row.sigma,
        type_ok: (m_ns, m_sep) == (row.fibration_type.0, row.fibration_type.1),
    })
}

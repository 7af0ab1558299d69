//! Reproducible test corpora stored as JSON Lines.
//!
//! One entry per line:
//!
//! ```text
//! {"v":1,"params":{"u":2,"v":3},"matrix":{"a":"2401","b":"12975","c":"250","d":"1351"},
//!  "expected_status":"Member","expected_word":["3","1","-1","5","1","-1","2","0"],
//!  "provenance":"worked-example"}
//! ```
//!
//! `"v"` is the schema version, so the group parameters live under
//! `"params"`. Matrix entries and word exponents are decimal strings;
//! a bare JSON number in their place is rejected rather than risk a lossy
//! float round trip.

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::int::{int, Int};
use crate::matgroup::{decide, word_to_matrix, GroupWord, Mat2, MatGroupError, Status};
use crate::oracle::{
    enumerate_members, random_group_word, sample_ambient, seeded_rng, Counterexample, EnumConfig, OracleError,
    ValidationReport, STREAM_WORDS,
};
use crate::transforms::{Params, TransformError};

pub const SCHEMA_VERSION: u32 = 1;

/// Entry bound for ambient samples in generated corpora.
pub const AMBIENT_BOUND: i64 = 30;
/// Caps for the random member words in generated corpora.
pub const MEMBER_MAX_LEN: usize = 12;
pub const MEMBER_MAX_EXP: i64 = 5;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("line {line}: {source}")]
    Json { line: usize, source: serde_json::Error },
    #[error("line {line}: {message}")]
    Invalid { line: usize, message: String },
    #[error(transparent)]
    Params(#[from] TransformError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Decide(#[from] MatGroupError),
    #[error("oracle disagrees with decide on {matrix}: {detail}")]
    OracleDisagreement { matrix: String, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusEntry<T> {
    pub params: Params<T>,
    pub matrix: Mat2<T>,
    pub expected_status: Status,
    pub expected_word: Option<GroupWord<T>>,
    pub provenance: String,
}

impl<T: Int> CorpusEntry<T> {
    /// Checks that a word is present exactly for members and evaluates to
    /// the matrix.
    pub fn check(&self) -> Result<(), String> {
        match (&self.expected_status, &self.expected_word) {
            (Status::Member, None) => Err("member entry without expected_word".into()),
            (Status::Member, Some(w)) => {
                if w.params() != &self.params {
                    Err("expected_word parameters differ from the entry's".into())
                } else if word_to_matrix(w) != self.matrix {
                    Err("expected_word does not evaluate to the matrix".into())
                } else {
                    Ok(())
                }
            }
            (s, Some(_)) => Err(format!("{s} entry carries an expected_word")),
            (_, None) => Ok(()),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    v: u32,
    params: RawParams,
    matrix: RawMatrix,
    expected_status: String,
    expected_word: Option<Vec<String>>,
    provenance: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawParams {
    u: serde_json::Number,
    v: serde_json::Number,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMatrix {
    a: String,
    b: String,
    c: String,
    d: String,
}

fn to_raw<T: Int>(e: &CorpusEntry<T>) -> RawEntry {
    let number = |x: &T| x.to_string().parse::<serde_json::Number>().expect("integers are JSON numbers");
    let [a, b, c, d] = e.matrix.entries().map(|x| x.to_string());
    RawEntry {
        v: SCHEMA_VERSION,
        params: RawParams { u: number(e.params.u()), v: number(e.params.v()) },
        matrix: RawMatrix { a, b, c, d },
        expected_status: e.expected_status.as_str().to_string(),
        expected_word: e.expected_word.as_ref().map(|w| w.alphas().iter().map(|x| x.to_string()).collect()),
        provenance: e.provenance.clone(),
    }
}

fn from_raw<T: Int>(raw: RawEntry, line: usize) -> Result<CorpusEntry<T>, CorpusError> {
    let invalid = |message: String| CorpusError::Invalid { line, message };
    if raw.v != SCHEMA_VERSION {
        return Err(invalid(format!("unsupported schema version {}", raw.v)));
    }
    let integer = |s: &str, what: &str| s.parse::<T>().map_err(|_| invalid(format!("{what}: {s:?} is not an integer")));
    let params = Params::new(integer(&raw.params.u.to_string(), "u")?, integer(&raw.params.v.to_string(), "v")?)
        .map_err(|e| invalid(e.to_string()))?;
    let m = &raw.matrix;
    let matrix = Mat2::new(integer(&m.a, "a")?, integer(&m.b, "b")?, integer(&m.c, "c")?, integer(&m.d, "d")?)
        .map_err(|e| invalid(e.to_string()))?;
    let expected_status: Status = raw.expected_status.parse().map_err(invalid)?;
    let expected_word = raw
        .expected_word
        .map(|alphas| {
            let alphas = alphas.iter().map(|s| integer(s, "expected_word")).collect::<Result<Vec<T>, _>>()?;
            GroupWord::new(alphas, params.clone()).map_err(|e| invalid(e.to_string()))
        })
        .transpose()?;
    let entry = CorpusEntry { params, matrix, expected_status, expected_word, provenance: raw.provenance };
    entry.check().map_err(invalid)?;
    Ok(entry)
}

/// Serializes one entry as a single JSON line without the newline.
pub fn entry_to_line<T: Int>(e: &CorpusEntry<T>) -> String {
    serde_json::to_string(&to_raw(e)).expect("corpus entries serialize")
}

/// Parses one line; `line` is used in error messages only.
pub fn entry_from_line<T: Int>(s: &str, line: usize) -> Result<CorpusEntry<T>, CorpusError> {
    let raw: RawEntry = serde_json::from_str(s).map_err(|source| CorpusError::Json { line, source })?;
    from_raw(raw, line)
}

pub fn write_corpus_to<T: Int, W: Write>(mut out: W, entries: &[CorpusEntry<T>]) -> io::Result<()> {
    for e in entries {
        writeln!(out, "{}", entry_to_line(e))?;
    }
    out.flush()
}

/// Reads entries, skipping blank lines; line numbers in errors are 1-based.
pub fn read_corpus_from<T: Int, R: BufRead>(input: R) -> Result<Vec<CorpusEntry<T>>, CorpusError> {
    let mut entries = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line_no = i + 1;
        let text = line.map_err(|e| CorpusError::Invalid { line: line_no, message: e.to_string() })?;
        if text.trim().is_empty() {
            continue;
        }
        entries.push(entry_from_line(&text, line_no)?);
    }
    Ok(entries)
}

pub fn write_corpus<T: Int>(path: &Path, entries: &[CorpusEntry<T>]) -> Result<(), CorpusError> {
    let io_err = |source| CorpusError::Io { path: path.to_path_buf(), source };
    let file = fs::File::create(path).map_err(io_err)?;
    write_corpus_to(io::BufWriter::new(file), entries).map_err(io_err)
}

pub fn read_corpus<T: Int>(path: &Path) -> Result<Vec<CorpusEntry<T>>, CorpusError> {
    let file = fs::File::open(path).map_err(|source| CorpusError::Io { path: path.to_path_buf(), source })?;
    read_corpus_from(BufReader::new(file))
}

/// Builds a corpus: for `(2,3)` the worked-example matrix first, then
/// `n_members` images of random reduced words, then `n_ambient_samples`
/// ambient matrices with entries bounded by [`AMBIENT_BOUND`].
///
/// Every ambient verdict is checked against a bounded enumeration: a
/// matrix within the bound is a member exactly when the enumeration
/// reaches it.
pub fn generate_corpus<T: Int>(
    seed: u64,
    u: &T,
    v: &T,
    n_members: usize,
    n_ambient_samples: usize,
) -> Result<Vec<CorpusEntry<T>>, CorpusError> {
    let params = Params::new(u.clone(), v.clone())?;
    if params.is_sanov() {
        return Err(TransformError::SanovParams.into());
    }
    let mut entries = Vec::with_capacity(n_members + n_ambient_samples + 1);
    let member = |w: GroupWord<T>, provenance: String| CorpusEntry {
        params: params.clone(),
        matrix: word_to_matrix(&w),
        expected_status: Status::Member,
        expected_word: Some(w),
        provenance,
    };
    if *u == int(2) && *v == int(3) {
        let alphas = [3, 1, -1, 5, 1, -1, 2, 0].map(int).to_vec();
        let w = GroupWord::new(alphas, params.clone())?;
        entries.push(member(w, "worked-example".into()));
    }
    let mut rng = seeded_rng(seed, STREAM_WORDS);
    for i in 0..n_members {
        let w = random_group_word(&mut rng, &params, MEMBER_MAX_LEN, MEMBER_MAX_EXP);
        entries.push(member(w, format!("random-word seed={seed} index={i}")));
    }
    if n_ambient_samples > 0 {
        let bound: T = int(AMBIENT_BOUND);
        let mut cfg = EnumConfig::new(params.clone(), bound.clone(), AMBIENT_BOUND as u32, 4 * AMBIENT_BOUND as usize);
        cfg.ambient_samples = 0;
        let known = enumerate_members(&cfg)?;
        for (i, m) in sample_ambient(&params, &bound, n_ambient_samples, seed).into_iter().enumerate() {
            let d = decide(&m, &params)?;
            let expected = known.get(&m);
            if expected != d.word.as_ref() {
                return Err(CorpusError::OracleDisagreement {
                    matrix: m.to_string(),
                    detail: format!("decided {}, enumeration {}", d.status, if expected.is_some() { "reaches it" } else { "does not" }),
                });
            }
            entries.push(CorpusEntry {
                params: params.clone(),
                matrix: m,
                expected_status: d.status,
                expected_word: d.word,
                provenance: format!("ambient-sample seed={seed} index={i}"),
            });
        }
    }
    Ok(entries)
}

/// Re-decides every entry and reports disagreements with the recorded
/// status or word.
pub fn verify_corpus<T: Int>(entries: &[CorpusEntry<T>]) -> ValidationReport {
    entries
        .par_iter()
        .map(|e| {
            let mut r = ValidationReport { checked: 1, ..Default::default() };
            match decide(&e.matrix, &e.params) {
                Ok(d) => {
                    match d.status {
                        Status::Member => r.decided_member += 1,
                        _ => r.decided_nonmember += 1,
                    }
                    if d.status != e.expected_status {
                        r.status_mismatches += 1;
                        r.counterexamples.push(Counterexample::new(
                            "status_mismatch",
                            &e.matrix,
                            format!("expected {}, decided {} ({})", e.expected_status, d.status, e.provenance),
                        ));
                    } else if d.word != e.expected_word && !d.sanov {
                        r.word_mismatches += 1;
                        r.counterexamples.push(Counterexample::new(
                            "word_mismatch",
                            &e.matrix,
                            format!("recorded and decided words differ ({})", e.provenance),
                        ));
                    }
                }
                Err(err) => {
                    r.errors += 1;
                    r.counterexamples.push(Counterexample::new("error", &e.matrix, err.to_string()));
                }
            }
            r
        })
        .reduce(ValidationReport::default, ValidationReport::merge)
        .finish()
}

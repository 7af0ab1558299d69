//! Brute-force ground truth for the membership decision.
//!
//! [`enumerate_members`] lists every element of `G_{u,v}` reachable by a
//! reduced alternating word within the configured caps whose entries stay
//! within `max_entry`; [`cross_validate`] runs [`decide`] against that list
//! and against random matrices of the ambient congruence group.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64(seed)`, with
//! one stream per purpose ([`STREAM_WORDS`], [`STREAM_AMBIENT`]) selected by
//! `set_stream`, so the word sampler and the matrix sampler do not shift each
//! other when one of them draws more.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::int::{int, Int};
use crate::matgroup::{check_ca_consistency, decide, in_ambient, GroupWord, Mat2, MatGroupError, Status};
use crate::transforms::Params;

pub const STREAM_WORDS: u64 = 1;
pub const STREAM_AMBIENT: u64 = 2;

pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("frontier of {frontier} words exceeds the node budget {budget}")]
    ResourceCap { frontier: usize, budget: usize },
    #[error("{matrix} is reached by two reduced words {first:?} and {second:?}")]
    Collision { matrix: String, first: Vec<String>, second: Vec<String> },
    #[error("u = v = 2 is outside the transform-based decision; use the ambient test")]
    SanovParams,
    #[error("bounds must be at least 1")]
    InvalidBounds,
    #[error(transparent)]
    Decide(#[from] MatGroupError),
}

/// Caps for the bounded enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumConfig<T> {
    pub params: Params<T>,
    /// Bound on `|a|, |b|, |c|, |d|`.
    pub max_entry: T,
    /// Bound on `|alpha_i|`.
    pub max_exp: u32,
    /// Bound on the number of generator blocks.
    pub max_word_len: usize,
    /// Largest frontier a single breadth-first level may hold.
    pub node_budget: usize,
    /// Drop a branch as soon as its matrix leaves the entry bound.
    pub prune: bool,
    /// Random ambient matrices checked by [`cross_validate`].
    pub ambient_samples: usize,
    pub seed: u64,
}

impl<T: Int> EnumConfig<T> {
    pub fn new(params: Params<T>, max_entry: T, max_exp: u32, max_word_len: usize) -> Self {
        Self {
            params,
            max_entry,
            max_exp,
            max_word_len,
            node_budget: 20_000_000,
            prune: true,
            ambient_samples: 1000,
            seed: 0,
        }
    }

    fn validate(&self) -> Result<(), OracleError> {
        if self.max_entry < T::one() || self.max_exp < 1 || self.max_word_len < 1 {
            return Err(OracleError::InvalidBounds);
        }
        Ok(())
    }

    /// Whether a word stays within the exponent and length caps.
    pub fn within_caps(&self, w: &GroupWord<T>) -> bool {
        let cap = int::<T>(self.max_exp.into());
        let blocks = w.alphas().iter().filter(|x| !x.is_zero()).count();
        blocks <= self.max_word_len && w.alphas().iter().all(|x| x.abs() <= cap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Gen {
    R,
    L,
}

#[derive(Debug, Clone)]
struct Node<T> {
    matrix: Mat2<T>,
    blocks: Vec<(Gen, i64)>,
}

impl<T: Int> Node<T> {
    fn word(&self, params: &Params<T>) -> GroupWord<T> {
        let mut alphas: Vec<T> = Vec::with_capacity(self.blocks.len() + 2);
        if self.blocks.first().is_some_and(|(g, _)| *g == Gen::L) {
            alphas.push(T::zero());
        }
        alphas.extend(self.blocks.iter().map(|&(_, e)| int(e)));
        if self.blocks.last().is_some_and(|(g, _)| *g == Gen::R) {
            alphas.push(T::zero());
        }
        GroupWord::new(alphas, params.clone()).expect("alternating blocks form a reduced word")
    }
}

/// Every element of `G_{u,v}` with entries bounded by `max_entry` that is
/// reachable by a reduced word within the caps, mapped to that word.
///
/// Words are grown breadth first, one generator block per level, never
/// repeating the generator just used. With `prune` set, a branch stops as
/// soon as its matrix leaves the entry bound; products of blocks with
/// partial quotients of absolute value at least two only grow, which the
/// differential tests check against the unpruned run. Two words reaching the
/// same matrix would contradict freeness and abort the run.
pub fn enumerate_members<T: Int>(cfg: &EnumConfig<T>) -> Result<BTreeMap<Mat2<T>, GroupWord<T>>, OracleError> {
    cfg.validate()?;
    let (u, v) = (cfg.params.u().clone(), cfg.params.v().clone());
    let exps: Vec<i64> = (1..=i64::from(cfg.max_exp)).flat_map(|e| [e, -e]).collect();
    let mut map = BTreeMap::new();
    map.insert(Mat2::identity(), GroupWord::identity(cfg.params.clone()));
    let mut frontier = vec![Node { matrix: Mat2::<T>::identity(), blocks: Vec::new() }];
    for _ in 0..cfg.max_word_len {
        let children: Vec<Node<T>> = frontier
            .par_iter()
            .flat_map_iter(|node| {
                let last = node.blocks.last().map(|&(g, _)| g);
                let gens = [Gen::R, Gen::L].into_iter().filter(move |g| Some(*g) != last);
                let (u, v) = (&u, &v);
                let exps = &exps;
                gens.flat_map(move |g| {
                    exps.iter().filter_map(move |&e| {
                        let mut matrix = node.matrix.clone();
                        match g {
                            Gen::R => matrix.mul_r_power(&int(e), v),
                            Gen::L => matrix.mul_l_power(&int(e), u),
                        }
                        if cfg.prune && matrix.max_abs_entry() > cfg.max_entry {
                            return None;
                        }
                        let mut blocks = node.blocks.clone();
                        blocks.push((g, e));
                        Some(Node { matrix, blocks })
                    })
                })
            })
            .collect();
        if children.len() > cfg.node_budget {
            return Err(OracleError::ResourceCap { frontier: children.len(), budget: cfg.node_budget });
        }
        for child in &children {
            if child.matrix.max_abs_entry() > cfg.max_entry {
                continue;
            }
            let word = child.word(&cfg.params);
            if let Some(prev) = map.insert(child.matrix.clone(), word.clone()) {
                return Err(OracleError::Collision {
                    matrix: child.matrix.to_string(),
                    first: prev.alphas().iter().map(|x| x.to_string()).collect(),
                    second: word.alphas().iter().map(|x| x.to_string()).collect(),
                });
            }
        }
        if children.is_empty() {
            break;
        }
        frontier = children;
    }
    Ok(map)
}

/// Random matrices of the ambient group with entries bounded by `bound`.
///
/// A second column `(b, d)` with `v | b`, `d = 1 (mod uv)` and
/// `gcd(b, d) = 1` is drawn uniformly from the box, the extended Euclidean
/// algorithm gives one solution of `a d - c b = 1`, and the solution family
/// `(a + t b, c + t d)` is scanned over one period of `t` for the entry that
/// also meets `a = 1 (mod uv)` and `u | c` with the smallest entries.
/// Draws that fail or leave the box are rejected.
pub fn sample_ambient<T: Int>(params: &Params<T>, bound: &T, count: usize, seed: u64) -> Vec<Mat2<T>> {
    let mut rng = seeded_rng(seed, STREAM_AMBIENT);
    let u = params.u().to_i128().expect("u fits in i128");
    let v = params.v().to_i128().expect("v fits in i128");
    let bound = bound.to_i128().unwrap_or(i128::MAX).min(i128::from(i64::MAX));
    let uv = u * v;
    let k_range = ((-bound - 1).div_euclid(uv) + 1)..=((bound - 1).div_euclid(uv));
    let m_range = -(bound / v)..=(bound / v);
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0usize;
    let max_attempts = count.saturating_mul(10_000).max(10_000);
    while out.len() < count && attempts < max_attempts {
        attempts += 1;
        let d = 1 + uv * rng.gen_range(k_range.clone());
        let b = v * rng.gen_range(m_range.clone());
        let (g, x, y) = ext_gcd(d, b);
        if g != 1 {
            continue;
        }
        let (a0, c0) = (x, -y);
        let centre = if b != 0 { -(a0 / b) } else { -(c0 / d) };
        let best = ((centre - uv)..=(centre + uv))
            .map(|t| (a0 + t * b, c0 + t * d))
            .filter(|&(a, c)| (a - 1).rem_euclid(uv) == 0 && c.rem_euclid(u) == 0)
            .min_by_key(|&(a, c)| a.abs().max(c.abs()));
        let Some((a, c)) = best else { continue };
        if a.abs() > bound || c.abs() > bound {
            continue;
        }
        let m = Mat2::new(from_i128(a), from_i128(b), from_i128(c), from_i128(d))
            .expect("column completion has determinant one");
        debug_assert!(in_ambient(&m, params.u(), params.v()));
        out.push(m);
    }
    out
}

fn from_i128<T: Int>(x: i128) -> T {
    T::from_i128(x).expect("sampled entries fit the integer type")
}

/// `(g, x, y)` with `a x + b y = g = gcd(a, b) >= 0`.
fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

/// A random reduced word: an even number (at most `max_len`) of exponents
/// in `[-max_exp, max_exp]`, nonzero except possibly the first and last.
pub fn random_group_word<T: Int, R: Rng>(rng: &mut R, params: &Params<T>, max_len: usize, max_exp: i64) -> GroupWord<T> {
    let len = 2 * rng.gen_range(0..=max_len / 2);
    let alphas = (0..len)
        .map(|i| {
            if i == 0 || i + 1 == len {
                rng.gen_range(-max_exp..=max_exp)
            } else {
                let e = rng.gen_range(1..=max_exp);
                if rng.gen_bool(0.5) {
                    e
                } else {
                    -e
                }
            }
        })
        .map(int)
        .collect();
    GroupWord::new(alphas, params.clone()).expect("interior exponents are nonzero").canonical()
}

/// A single failed check.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Counterexample {
    pub kind: String,
    pub matrix: [String; 4],
    pub detail: String,
}

impl Counterexample {
    pub fn new<T: Int>(kind: &str, m: &Mat2<T>, detail: impl Into<String>) -> Self {
        Self { kind: kind.to_string(), matrix: m.entries().map(|x| x.to_string()), detail: detail.into() }
    }
}

/// Aggregated outcome of a validation run; merging is associative.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Matrices the check ran on.
    pub checked: usize,
    /// Members found by enumeration.
    pub enumerated: usize,
    pub decided_member: usize,
    pub decided_nonmember: usize,
    /// Ambient samples decided `NotMember` and absent from the enumeration.
    pub nonmembers_confirmed: usize,
    /// Ambient samples decided `Member` with a word outside the caps.
    pub members_beyond_caps: usize,
    pub word_mismatches: usize,
    pub nonmember_contradictions: usize,
    pub status_mismatches: usize,
    pub ca_inconsistencies: usize,
    pub errors: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl ValidationReport {
    pub fn success(&self) -> bool {
        self.counterexamples.is_empty()
    }

    pub fn merge(mut self, other: Self) -> Self {
        self.checked += other.checked;
        self.enumerated += other.enumerated;
        self.decided_member += other.decided_member;
        self.decided_nonmember += other.decided_nonmember;
        self.nonmembers_confirmed += other.nonmembers_confirmed;
        self.members_beyond_caps += other.members_beyond_caps;
        self.word_mismatches += other.word_mismatches;
        self.nonmember_contradictions += other.nonmember_contradictions;
        self.status_mismatches += other.status_mismatches;
        self.ca_inconsistencies += other.ca_inconsistencies;
        self.errors += other.errors;
        self.counterexamples.extend(other.counterexamples);
        self
    }

    pub(crate) fn finish(mut self) -> Self {
        self.counterexamples.sort();
        self
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut value = serde_json::to_value(self).expect("report serializes");
        value["success"] = serde_json::Value::Bool(self.success());
        value
    }
}

pub fn cross_validate<T: Int>(cfg: &EnumConfig<T>) -> Result<ValidationReport, OracleError> {
    cross_validate_with(cfg, &[])
}

/// Checks [`decide`] against the enumeration and against random ambient
/// matrices plus the given `probes`.
///
/// * every enumerated matrix must be decided `Member` with its word;
/// * a sampled matrix absent from the enumeration must be decided
///   `NotMember`, unless its recovered word exceeds the caps (then the
///   enumeration could not have seen it); a `Member` verdict with a word
///   inside the caps means the enumeration or the decision is wrong;
/// * the `c/a` cross-check must agree on all of them.
pub fn cross_validate_with<T: Int>(cfg: &EnumConfig<T>, probes: &[Mat2<T>]) -> Result<ValidationReport, OracleError> {
    if cfg.params.is_sanov() {
        return Err(OracleError::SanovParams);
    }
    let members = enumerate_members(cfg)?;
    let params = &cfg.params;

    let enumerated: Vec<(&Mat2<T>, &GroupWord<T>)> = members.iter().collect();
    let from_enumeration = enumerated
        .par_iter()
        .map(|(m, expected)| {
            let mut r = ValidationReport { checked: 1, enumerated: 1, ..Default::default() };
            match decide(m, params) {
                Ok(d) if d.status == Status::Member => {
                    r.decided_member += 1;
                    if d.word.as_ref() != Some(*expected) {
                        r.word_mismatches += 1;
                        r.counterexamples.push(Counterexample::new(
                            "word_mismatch",
                            m,
                            format!("expected {:?}, decided {:?}", alphas(expected), d.word.as_ref().map(alphas)),
                        ));
                    }
                }
                Ok(d) => {
                    r.decided_nonmember += 1;
                    r.nonmember_contradictions += 1;
                    r.counterexamples.push(Counterexample::new(
                        "nonmember_contradiction",
                        m,
                        format!("enumerated with word {:?} but decided {}", alphas(expected), d.status),
                    ));
                }
                Err(e) => push_error(&mut r, m, &e),
            }
            check_ca(&mut r, m, params);
            r
        })
        .reduce(ValidationReport::default, ValidationReport::merge);

    let mut samples = sample_ambient(params, &cfg.max_entry, cfg.ambient_samples, cfg.seed);
    samples.extend(probes.iter().cloned());
    let from_samples = samples
        .par_iter()
        .filter(|m| !members.contains_key(*m))
        .map(|m| {
            let mut r = ValidationReport { checked: 1, ..Default::default() };
            match decide(m, params) {
                Ok(d) if d.status == Status::Member => {
                    r.decided_member += 1;
                    let word = d.word.expect("members carry words");
                    if cfg.within_caps(&word) && m.max_abs_entry() <= cfg.max_entry {
                        r.nonmember_contradictions += 1;
                        r.counterexamples.push(Counterexample::new(
                            "missed_by_enumeration",
                            m,
                            format!("decided member with in-cap word {:?}", alphas(&word)),
                        ));
                    } else {
                        r.members_beyond_caps += 1;
                    }
                }
                Ok(d) => {
                    r.decided_nonmember += 1;
                    if d.status == Status::NotMember {
                        r.nonmembers_confirmed += 1;
                    }
                }
                Err(e) => push_error(&mut r, m, &e),
            }
            if in_ambient(m, params.u(), params.v()) {
                check_ca(&mut r, m, params);
            }
            r
        })
        .reduce(ValidationReport::default, ValidationReport::merge);

    Ok(from_enumeration.merge(from_samples).finish())
}

fn alphas<T: Int>(w: &GroupWord<T>) -> Vec<String> {
    w.alphas().iter().map(|x| x.to_string()).collect()
}

fn push_error<T: Int>(r: &mut ValidationReport, m: &Mat2<T>, e: &MatGroupError) {
    r.errors += 1;
    r.counterexamples.push(Counterexample::new("error", m, e.to_string()));
}

fn check_ca<T: Int>(r: &mut ValidationReport, m: &Mat2<T>, params: &Params<T>) {
    match check_ca_consistency(m, params) {
        Ok(true) => {}
        Ok(false) => {
            r.ca_inconsistencies += 1;
            r.counterexamples.push(Counterexample::new("ca_inconsistency", m, "c/a and b/d verdicts differ"));
        }
        Err(e) => push_error(r, m, &e),
    }
}

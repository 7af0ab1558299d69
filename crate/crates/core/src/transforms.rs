//! Rewriting of continued-fraction words.
//!
//! * [`f_legacy`] removes interior partial quotients equal to one, first
//!   occurrence first, without looking at the group parameters.
//! * [`f_uv`] is the parameter-aware replacement: it only rewrites a `1` or
//!   a `2` in position one when the leading entry is not divisible by the
//!   current parameter, and swaps `u` and `v` on every recursive call.
//! * [`g_uv`] goes the other way, from a rigid expansion back to the short
//!   one; its output always equals `short_cf(evaluate(w))`.
//!
//! All three are head-recursive and linear. They are driven here by a loop
//! over a cursor into the input word that collects the emitted prefix
//! segments (with a pending negation flag for the `-f(...)` branches) and
//! joins them with `(+)` from the right at the end, so arbitrarily long
//! words never touch the call stack.

use std::collections::VecDeque;
use std::fmt;

use thiserror::Error;

use crate::cf::{in_a1, in_a2, CfError, CfWord, RightFold};
use crate::int::{int, Int};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TransformError {
    #[error("unsupported parameters u={u}, v={v}: both must be integers >= 2")]
    UnsupportedParams { u: String, v: String },
    #[error("u=v=2 (uv = 4) has no transform family; membership there is the ambient congruence test")]
    SanovParams,
    #[error("{0} is not a short continued fraction (interior entries >= 1, last entry > 1)")]
    NotInA1(String),
    #[error("{0} has an entry of absolute value <= 1 after the first")]
    NotInA2(String),
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Word(#[from] CfError),
}

/// The pair `(u, v)` naming the generators `L_u` and `R_v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Params<T> {
    u: T,
    v: T,
}

impl<T: Int> Params<T> {
    /// Accepts `u, v >= 2`, including the Sanov pair `(2, 2)`.
    pub fn new(u: T, v: T) -> Result<Self, TransformError> {
        let two = int::<T>(2);
        if u < two || v < two {
            return Err(TransformError::UnsupportedParams { u: u.to_string(), v: v.to_string() });
        }
        Ok(Self { u, v })
    }

    pub fn from_i64(u: i64, v: i64) -> Result<Self, TransformError> {
        Self::new(int(u), int(v))
    }

    pub fn u(&self) -> &T {
        &self.u
    }

    pub fn v(&self) -> &T {
        &self.v
    }

    pub fn swapped(&self) -> Self {
        Self { u: self.v.clone(), v: self.u.clone() }
    }

    /// `uv = 4`, i.e. `u = v = 2`.
    pub fn is_sanov(&self) -> bool {
        self.u.clone() * self.v.clone() == int(4)
    }

    fn require_transform_family(&self) -> Result<(), TransformError> {
        if self.is_sanov() {
            Err(TransformError::SanovParams)
        } else {
            Ok(())
        }
    }
}

impl<T: Int> fmt::Display for Params<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.u, self.v)
    }
}

/// Which case of a transform's definition a recursive call took.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Branch {
    /// No further recursion: `r = 0`, or no interior `1` left for `f`.
    Terminal,
    /// The `1` in position one is removed and the rest is negated.
    Flip,
    /// A `2` in position one is rewritten and recursion continues.
    TwoExtend,
    /// A `2` in the last position is rewritten; recursion stops.
    TwoEnd,
    /// The leading entry is emitted unchanged.
    Pass,
}

/// One recursive call of a transform, as recorded by the traced variants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Call<T> {
    /// Rendered function name with its parameters, e.g. `f_{3,2}`.
    pub function: String,
    pub input: Vec<T>,
    pub branch: Branch,
}

/// A recorded run: every recursive call plus the derivation rendered one
/// rewrite per line.
///
/// The first line is the initial call, each later line starts with `= `.
/// Words print as `[[...]]` and concatenation as ` (+) `. When a pass-through
/// step follows a non-negated prefix its entry is written into that prefix,
/// so `[[3]] (+) ([[-2]] (+) f(...))` shows as `[[3,-2]] (+) f(...)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation<T> {
    pub calls: Vec<Call<T>>,
    pub lines: Vec<String>,
}

impl<T> Derivation<T> {
    /// Number of rewrite lines after the initial call.
    pub fn step_count(&self) -> usize {
        self.lines.len().saturating_sub(1)
    }
}

pub fn f_legacy<T: Int>(w: &CfWord<T>) -> Result<CfWord<T>, TransformError> {
    require_a1(w)?;
    drive(Legacy, w, false).map(|(out, _)| out)
}

pub fn f_legacy_traced<T: Int>(w: &CfWord<T>) -> Result<(CfWord<T>, Derivation<T>), TransformError> {
    require_a1(w)?;
    drive(Legacy, w, true).map(|(out, d)| (out, d.expect("tracing on")))
}

/// The parameter-aware elimination of ones. `w` must be a short continued
/// fraction; the value is preserved exactly.
pub fn f_uv<T: Int>(params: &Params<T>, w: &CfWord<T>) -> Result<CfWord<T>, TransformError> {
    params.require_transform_family()?;
    require_a1(w)?;
    drive(Fuv(params.clone()), w, false).map(|(out, _)| out)
}

pub fn f_uv_traced<T: Int>(
    params: &Params<T>,
    w: &CfWord<T>,
) -> Result<(CfWord<T>, Derivation<T>), TransformError> {
    params.require_transform_family()?;
    require_a1(w)?;
    drive(Fuv(params.clone()), w, true).map(|(out, d)| (out, d.expect("tracing on")))
}

/// From a word with every tail entry of absolute value at least two back to
/// the short continued fraction of the same value.
pub fn g_uv<T: Int>(params: &Params<T>, w: &CfWord<T>) -> Result<CfWord<T>, TransformError> {
    params.require_transform_family()?;
    require_a2(w)?;
    drive(Guv(params.clone()), w, false).map(|(out, _)| absorb_trailing_one(out))
}

pub fn g_uv_traced<T: Int>(
    params: &Params<T>,
    w: &CfWord<T>,
) -> Result<(CfWord<T>, Derivation<T>), TransformError> {
    params.require_transform_family()?;
    require_a2(w)?;
    let (out, d) = drive(Guv(params.clone()), w, true)?;
    let mut d = d.expect("tracing on");
    let short = absorb_trailing_one(out.clone());
    if short != out {
        d.lines.push(format!("= {short}"));
    }
    Ok((short, d))
}

/// `[..., q, 1] = [..., q + 1]`. The first rule of `g` run on a final
/// `[q0, -2]` leaves such a tail, which the short form does not allow.
fn absorb_trailing_one<T: Int>(w: CfWord<T>) -> CfWord<T> {
    let mut q = w.into_coeffs();
    if q.len() >= 2 && q[q.len() - 1].is_one() {
        q.pop();
        let last = q.last_mut().expect("length checked");
        *last = last.clone() + T::one();
    }
    CfWord::from_vec_unchecked(q)
}

/// `[a, 1, b] = [a + 1, -(b + 1)]` for `b` outside `{-1, 0}`.
pub fn rewrite_one<T: Int>(alpha: &T, beta: &T) -> Result<CfWord<T>, TransformError> {
    if beta.is_zero() || *beta == -T::one() {
        return Err(TransformError::Domain(format!("rewrite_one needs beta outside {{-1, 0}}, got {beta}")));
    }
    Ok(CfWord::from_vec_unchecked(vec![alpha.clone() + T::one(), -(beta.clone() + T::one())]))
}

/// `[a, b, c] = [a + 1, -2, 2, -2, ..., (-1)^b (c + 1)]` with `b - 1`
/// alternating twos, for `b > 0` and `c` outside `{-1, 0}`.
pub fn expand_positive<T: Int>(alpha: &T, beta: &T, gamma: &T) -> Result<CfWord<T>, TransformError> {
    if !beta.is_positive() {
        return Err(TransformError::Domain(format!("expand_positive needs beta > 0, got {beta}")));
    }
    if gamma.is_zero() || *gamma == -T::one() {
        return Err(TransformError::Domain(format!("expand_positive needs gamma outside {{-1, 0}}, got {gamma}")));
    }
    let count = beta
        .to_usize()
        .ok_or_else(|| TransformError::Domain(format!("beta = {beta} is too large to expand")))?;
    let two = int::<T>(2);
    let mut coeffs = Vec::with_capacity(count + 1);
    coeffs.push(alpha.clone() + T::one());
    coeffs.extend((1..count).map(|k| if k % 2 == 1 { -two.clone() } else { two.clone() }));
    let last = gamma.clone() + T::one();
    coeffs.push(if count % 2 == 1 { -last } else { last });
    Ok(CfWord::from_vec_unchecked(coeffs))
}

fn require_a1<T: Int>(w: &CfWord<T>) -> Result<(), TransformError> {
    if in_a1(w) {
        Ok(())
    } else {
        Err(TransformError::NotInA1(w.to_string()))
    }
}

fn require_a2<T: Int>(w: &CfWord<T>) -> Result<(), TransformError> {
    if in_a2(w) {
        Ok(())
    } else {
        Err(TransformError::NotInA2(w.to_string()))
    }
}

/// The argument of the pending recursive call: a few rewritten leading
/// entries followed by an untouched (possibly negated) slice of the input.
struct Cursor<'a, T> {
    front: VecDeque<T>,
    tail: &'a [T],
    negated: bool,
}

impl<'a, T: Int> Cursor<'a, T> {
    fn new(tail: &'a [T]) -> Self {
        Self { front: VecDeque::new(), tail, negated: false }
    }

    fn len(&self) -> usize {
        self.front.len() + self.tail.len()
    }

    fn get(&self, i: usize) -> T {
        if i < self.front.len() {
            self.front[i].clone()
        } else {
            let x = self.tail[i - self.front.len()].clone();
            if self.negated {
                -x
            } else {
                x
            }
        }
    }

    fn pull(&mut self, k: usize) {
        while self.front.len() < k {
            let (x, rest) = self.tail.split_first().expect("cursor index in range");
            self.tail = rest;
            self.front.push_back(if self.negated { -x.clone() } else { x.clone() });
        }
    }

    fn pop(&mut self) -> T {
        self.pull(1);
        self.front.pop_front().expect("pulled")
    }

    fn set(&mut self, i: usize, value: T) {
        self.pull(i + 1);
        self.front[i] = value;
    }

    fn negate(&mut self) {
        self.front.iter_mut().for_each(|x| *x = -x.clone());
        self.negated = !self.negated;
    }

    fn to_vec(&self) -> Vec<T> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }
}

enum Step<T> {
    /// The current call evaluates to this word outright.
    Done { word: Vec<T>, branch: Branch },
    /// The current call is `head (+) f(cursor)`, or `head (+) -f(cursor)`
    /// when `negate` is set.
    Split { head: Vec<T>, negate: bool, branch: Branch },
}

trait Rule<T: Int> {
    /// Name of the function the next call is made to, e.g. `f_{2,3}`.
    fn name(&self) -> String;
    fn step(&mut self, c: &mut Cursor<'_, T>) -> Result<Step<T>, TransformError>;
}

struct Legacy;

impl<T: Int> Rule<T> for Legacy {
    fn name(&self) -> String {
        "f".to_string()
    }

    fn step(&mut self, c: &mut Cursor<'_, T>) -> Result<Step<T>, TransformError> {
        let r = c.len() - 1;
        let Some(j) = (1..r).find(|&i| c.get(i).is_one()) else {
            return Ok(Step::Done { word: c.to_vec(), branch: Branch::Terminal });
        };
        let mut head: Vec<T> = (0..j).map(|_| c.pop()).collect();
        let last = head.last_mut().expect("j >= 1");
        *last = last.clone() + T::one();
        c.pop();
        c.set(0, c.get(0) + T::one());
        Ok(Step::Split { head, negate: true, branch: Branch::Flip })
    }
}

struct Fuv<T>(Params<T>);

impl<T: Int> Rule<T> for Fuv<T> {
    fn name(&self) -> String {
        format!("f_{{{}}}", self.0)
    }

    fn step(&mut self, c: &mut Cursor<'_, T>) -> Result<Step<T>, TransformError> {
        let r = c.len() - 1;
        if r == 0 {
            return Ok(Step::Done { word: c.to_vec(), branch: Branch::Terminal });
        }
        let (q0, q1) = (c.get(0), c.get(1));
        let two = int::<T>(2);
        let step = if !self.0.v.is_divisor_of(&q0) && (q1.is_one() || q1 == two) {
            let head = vec![q0 + T::one()];
            if q1.is_one() {
                if r < 2 {
                    return Err(TransformError::Domain(format!(
                        "{}: a trailing 1 has no successor to absorb it",
                        Rule::<T>::name(self)
                    )));
                }
                c.pop();
                c.pop();
                c.set(0, c.get(0) + T::one());
                Step::Split { head, negate: true, branch: Branch::Flip }
            } else if r > 1 {
                c.pop();
                c.set(1, c.get(1) + T::one());
                c.set(0, -two);
                Step::Split { head, negate: false, branch: Branch::TwoExtend }
            } else {
                let mut word = head;
                word.push(-two);
                return Ok(Step::Done { word, branch: Branch::TwoEnd });
            }
        } else {
            Step::Split { head: vec![c.pop()], negate: false, branch: Branch::Pass }
        };
        self.0 = self.0.swapped();
        Ok(step)
    }
}

struct Guv<T>(Params<T>);

impl<T: Int> Rule<T> for Guv<T> {
    fn name(&self) -> String {
        format!("g_{{{}}}", self.0)
    }

    fn step(&mut self, c: &mut Cursor<'_, T>) -> Result<Step<T>, TransformError> {
        let r = c.len() - 1;
        if r == 0 {
            return Ok(Step::Done { word: c.to_vec(), branch: Branch::Terminal });
        }
        let (q0, q1) = (c.get(0), c.get(1));
        let two = int::<T>(2);
        let u_is_two = self.0.u == two;
        // With u = 2 and q1 = -2 the two-rule needs q2 > 0: it continues
        // with q2 - 1, and a negative start there would leave an interior
        // entry below one. The first rule covers q2 < 0 exactly.
        let two_rule = u_is_two && q1 == -two.clone() && (r == 1 || c.get(2).is_positive());
        let step = if q1.is_negative() && !two_rule {
            c.pop();
            c.set(0, q1 + T::one());
            c.negate();
            Step::Split { head: vec![q0 - T::one(), T::one()], negate: false, branch: Branch::Flip }
        } else if two_rule {
            let head = vec![q0 - T::one(), two];
            if r == 1 {
                return Ok(Step::Done { word: head, branch: Branch::TwoEnd });
            }
            c.pop();
            c.pop();
            c.set(0, c.get(0) - T::one());
            Step::Split { head, negate: false, branch: Branch::TwoExtend }
        } else {
            Step::Split { head: vec![c.pop()], negate: false, branch: Branch::Pass }
        };
        self.0 = self.0.swapped();
        Ok(step)
    }
}

fn drive<T: Int, R: Rule<T>>(
    mut rule: R,
    w: &CfWord<T>,
    trace: bool,
) -> Result<(CfWord<T>, Option<Derivation<T>>), TransformError> {
    let mut cursor = Cursor::new(w.coeffs());
    let mut frames: Vec<(Vec<T>, bool)> = Vec::new();
    let mut recorder = trace.then(|| Recorder::new(rule.name(), w.coeffs()));
    let last = loop {
        let name = rule.name();
        let input = if trace { cursor.to_vec() } else { Vec::new() };
        match rule.step(&mut cursor)? {
            Step::Done { word, branch } => {
                if let Some(rec) = recorder.as_mut() {
                    rec.done(Call { function: name, input, branch }, &word);
                }
                break word;
            }
            Step::Split { head, negate, branch } => {
                if let Some(rec) = recorder.as_mut() {
                    let next = format!("{}({})", rule.name(), fmt_coeffs(&cursor.to_vec()));
                    rec.split(Call { function: name, input, branch }, &head, negate, next);
                }
                frames.push((head, negate));
            }
        }
    };
    let mut fold = RightFold::new(last);
    for (head, negate) in frames.into_iter().rev() {
        fold.prepend(head, negate)?;
    }
    let out = fold.finish()?;
    let derivation = recorder.map(|rec| rec.finish(&out));
    Ok((out, derivation))
}

fn fmt_coeffs<T: Int>(q: &[T]) -> String {
    let body: Vec<String> = q.iter().map(|x| x.to_string()).collect();
    format!("[[{}]]", body.join(","))
}

struct Recorder<T> {
    calls: Vec<Call<T>>,
    lines: Vec<String>,
    frames: Vec<(Vec<T>, bool)>,
}

impl<T: Int> Recorder<T> {
    fn new(name: String, input: &[T]) -> Self {
        Self { calls: Vec::new(), lines: vec![format!("{name}({})", fmt_coeffs(input))], frames: Vec::new() }
    }

    fn split(&mut self, call: Call<T>, head: &[T], negate: bool, next: String) {
        let merge = call.branch == Branch::Pass && self.frames.last().is_some_and(|(_, neg)| !neg);
        if merge {
            self.frames.last_mut().expect("checked").0.extend(head.iter().cloned());
        } else {
            self.frames.push((head.to_vec(), negate));
        }
        self.calls.push(call);
        self.lines.push(format!("= {}", self.render(&next, false)));
    }

    fn done(&mut self, call: Call<T>, word: &[T]) {
        self.calls.push(call);
        self.lines.push(format!("= {}", self.render(&fmt_coeffs(word), true)));
    }

    fn finish(mut self, out: &CfWord<T>) -> Derivation<T> {
        let flat = format!("= {out}");
        if self.lines.last() != Some(&flat) {
            self.lines.push(flat);
        }
        Derivation { calls: self.calls, lines: self.lines }
    }

    fn render(&self, innermost: &str, is_word: bool) -> String {
        let mut s = innermost.to_string();
        for (i, (seg, neg)) in self.frames.iter().enumerate().rev() {
            let rhs = match (i + 1 == self.frames.len(), *neg) {
                (true, false) => s,
                (true, true) if is_word => format!("-({s})"),
                (true, true) => format!("-{s}"),
                (false, false) => format!("({s})"),
                (false, true) => format!("-({s})"),
            };
            s = format!("{} (+) {rhs}", fmt_coeffs(seg));
        }
        s
    }
}

//! Matrices in SL(2, Z), words in the generators `L_u = [[1,0],[u,1]]` and
//! `R_v = [[1,v],[0,1]]`, and the membership decision for the group they
//! generate.
//!
//! A matrix `[[a, b], [c, d]]` of the ambient congruence group lies in
//! `G_{u,v}` exactly when `f_{u,v}` applied to the short continued fraction
//! of `b/d` has `v | q_i` at even and `u | q_i` at odd positions. In that
//! case the entries are `v*alpha_0, u*alpha_1, ...` for the exponents of the
//! alternating product `R_v^alpha_0 L_u^alpha_1 ... L_u^alpha_r`; only the
//! final `L_u` exponent is invisible in `b/d` and is read off the residual.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

use crate::cf::{divisibility_by_index, satisfies_divisibility, short_cf, CfWord};
use crate::int::{int, Int};
use crate::transforms::{f_uv, f_uv_traced, Params, TransformError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatGroupError {
    #[error("determinant of [[{a}, {b}], [{c}, {d}]] is not 1")]
    NotUnimodular { a: String, b: String, c: String, d: String },
    #[error("malformed matrix {0:?}, expected four integers \"a b c d\"")]
    Parse(String),
    #[error("invalid group word: {0}")]
    InvalidWord(String),
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),
    #[error(transparent)]
    Params(#[from] TransformError),
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
}

/// A 2x2 integer matrix of determinant one, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mat2<T> {
    a: T,
    b: T,
    c: T,
    d: T,
}

impl<T: Int> Mat2<T> {
    pub fn new(a: T, b: T, c: T, d: T) -> Result<Self, MatGroupError> {
        if a.clone() * d.clone() - b.clone() * c.clone() != T::one() {
            return Err(MatGroupError::NotUnimodular {
                a: a.to_string(),
                b: b.to_string(),
                c: c.to_string(),
                d: d.to_string(),
            });
        }
        Ok(Self { a, b, c, d })
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self, MatGroupError> {
        Self::new(int(a), int(b), int(c), int(d))
    }

    pub fn identity() -> Self {
        Self { a: T::one(), b: T::zero(), c: T::zero(), d: T::one() }
    }

    /// `R_v^n = [[1, n v], [0, 1]]`.
    pub fn r_power(n: &T, v: &T) -> Self {
        Self { a: T::one(), b: n.clone() * v.clone(), c: T::zero(), d: T::one() }
    }

    /// `L_u^n = [[1, 0], [n u, 1]]`.
    pub fn l_power(n: &T, u: &T) -> Self {
        Self { a: T::one(), b: T::zero(), c: n.clone() * u.clone(), d: T::one() }
    }

    pub fn a(&self) -> &T {
        &self.a
    }

    pub fn b(&self) -> &T {
        &self.b
    }

    pub fn c(&self) -> &T {
        &self.c
    }

    pub fn d(&self) -> &T {
        &self.d
    }

    pub fn entries(&self) -> [&T; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn max_abs_entry(&self) -> T {
        self.entries().into_iter().map(|x| x.abs()).max().expect("four entries")
    }

    pub fn multiply(&self, rhs: &Self) -> Self {
        let (a, b, c, d) = (&self.a, &self.b, &self.c, &self.d);
        let (e, f, g, h) = (&rhs.a, &rhs.b, &rhs.c, &rhs.d);
        Self {
            a: a.clone() * e.clone() + b.clone() * g.clone(),
            b: a.clone() * f.clone() + b.clone() * h.clone(),
            c: c.clone() * e.clone() + d.clone() * g.clone(),
            d: c.clone() * f.clone() + d.clone() * h.clone(),
        }
    }

    pub fn inverse(&self) -> Self {
        Self { a: self.d.clone(), b: -self.b.clone(), c: -self.c.clone(), d: self.a.clone() }
    }

    /// `self * R_v^n` in place.
    pub fn mul_r_power(&mut self, n: &T, v: &T) {
        let step = n.clone() * v.clone();
        self.b = self.b.clone() + self.a.clone() * step.clone();
        self.d = self.d.clone() + self.c.clone() * step;
    }

    /// `self * L_u^n` in place.
    pub fn mul_l_power(&mut self, n: &T, u: &T) {
        let step = n.clone() * u.clone();
        self.a = self.a.clone() + self.b.clone() * step.clone();
        self.c = self.c.clone() + self.d.clone() * step;
    }
}

impl<T: Int> fmt::Display for Mat2<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {} {}", self.a, self.b, self.c, self.d)
    }
}

impl<T: Int> FromStr for Mat2<T> {
    type Err = MatGroupError;

    /// Row-major `"a b c d"`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || MatGroupError::Parse(s.to_string());
        let parts = s
            .split_whitespace()
            .map(|tok| tok.parse::<T>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        let [a, b, c, d]: [T; 4] = parts.try_into().map_err(|_| bad())?;
        Self::new(a, b, c, d)
    }
}

/// Exponents of `R_v^alpha_0 L_u^alpha_1 R_v^alpha_2 ... L_u^alpha_r`.
///
/// Either empty (the identity) or of even length, with every exponent other
/// than the first and the last nonzero. Because the group is free on its two
/// generators this form is unique for every element except the identity,
/// which is always written as the empty word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GroupWord<T> {
    alphas: Vec<T>,
    params: Params<T>,
}

impl<T: Int> GroupWord<T> {
    pub fn new(alphas: Vec<T>, params: Params<T>) -> Result<Self, MatGroupError> {
        if alphas.len() % 2 == 1 {
            return Err(MatGroupError::InvalidWord(format!(
                "{} exponents; the alternating form starts with R_v and ends with L_u",
                alphas.len()
            )));
        }
        if alphas.len() > 2 {
            if let Some(i) = alphas[1..alphas.len() - 1].iter().position(|x| x.is_zero()) {
                return Err(MatGroupError::InvalidWord(format!("interior exponent {} is zero", i + 1)));
            }
        }
        Ok(Self { alphas, params })
    }

    pub fn identity(params: Params<T>) -> Self {
        Self { alphas: Vec::new(), params }
    }

    pub fn alphas(&self) -> &[T] {
        &self.alphas
    }

    pub fn params(&self) -> &Params<T> {
        &self.params
    }

    /// The same element with `[0, 0]` collapsed to the empty word.
    pub fn canonical(self) -> Self {
        if self.alphas.iter().all(|x| x.is_zero()) {
            Self::identity(self.params)
        } else {
            self
        }
    }
}

pub fn word_to_matrix<T: Int>(w: &GroupWord<T>) -> Mat2<T> {
    let (u, v) = (w.params.u(), w.params.v());
    let mut m = Mat2::identity();
    for (i, alpha) in w.alphas.iter().enumerate() {
        if alpha.is_zero() {
            continue;
        }
        if i % 2 == 0 {
            m.mul_r_power(alpha, v);
        } else {
            m.mul_l_power(alpha, u);
        }
    }
    m
}

/// Membership in the ambient congruence group: `a = d = 1 (mod uv)`,
/// `v | b`, `u | c`.
pub fn in_ambient<T: Int>(m: &Mat2<T>, u: &T, v: &T) -> bool {
    let uv = u.clone() * v.clone();
    uv.is_divisor_of(&(m.a.clone() - T::one()))
        && uv.is_divisor_of(&(m.d.clone() - T::one()))
        && v.is_divisor_of(&m.b)
        && u.is_divisor_of(&m.c)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Member,
    NotMember,
    NotInAmbient,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Member => "Member",
            Status::NotMember => "NotMember",
            Status::NotInAmbient => "NotInAmbient",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "Member" => Ok(Status::Member),
            "NotMember" => Ok(Status::NotMember),
            "NotInAmbient" => Ok(Status::NotInAmbient),
            other => Err(format!("unknown status {other:?}")),
        }
    }
}

/// Intermediate words of a decision, in the order they were computed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecisionTrace<T> {
    /// `("C(b/d)", short_cf(b/d))` then `("f_{u,v}", transformed)`.
    pub steps: Vec<(String, CfWord<T>)>,
    /// Per-index `(u, v)`-divisibility of the transformed word.
    pub divisibility: Vec<bool>,
    /// The transform's derivation, first line `(f_{u,v} o C)(b/d) = ...`.
    pub derivation: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision<T> {
    pub status: Status,
    /// Present exactly when `status` is `Member` and the route recovers words.
    pub word: Option<GroupWord<T>>,
    pub trace: Option<DecisionTrace<T>>,
    /// Decided by the ambient congruences alone (`u = v = 2`).
    pub sanov: bool,
}

impl<T> Decision<T> {
    fn bare(status: Status) -> Self {
        Self { status, word: None, trace: None, sanov: false }
    }
}

/// Decides whether `m` lies in `G_{u,v}` and recovers its word.
///
/// The pair `(2, 2)` is answered by [`decide_sanov`].
pub fn decide<T: Int>(m: &Mat2<T>, params: &Params<T>) -> Result<Decision<T>, MatGroupError> {
    decide_inner(m, params, false)
}

/// [`decide`], also recording the intermediate continued fractions.
pub fn decide_traced<T: Int>(m: &Mat2<T>, params: &Params<T>) -> Result<Decision<T>, MatGroupError> {
    decide_inner(m, params, true)
}

fn decide_inner<T: Int>(m: &Mat2<T>, params: &Params<T>, trace: bool) -> Result<Decision<T>, MatGroupError> {
    if params.is_sanov() {
        return Ok(decide_sanov(m));
    }
    let (u, v) = (params.u(), params.v());
    if !in_ambient(m, u, v) {
        return Ok(Decision::bare(Status::NotInAmbient));
    }
    let ratio = Ratio::new(m.b.clone(), m.d.clone());
    let short = short_cf(&ratio);
    let (word, derivation) = if trace {
        let (w, d) = f_uv_traced(params, &short).map_err(internal)?;
        (w, Some(d))
    } else {
        (f_uv(params, &short).map_err(internal)?, None)
    };
    let trace = derivation.map(|d| {
        let mut lines = d.lines;
        lines[0] = format!(
            "(f_{{{params}}} o C)({}) = {}",
            crate::cf::format_rational(&ratio),
            lines[0]
        );
        DecisionTrace {
            steps: vec![("C(b/d)".to_string(), short.clone()), (format!("f_{{{params}}}"), word.clone())],
            divisibility: divisibility_by_index(&word, u, v).collect(),
            derivation: lines,
        }
    });
    if !satisfies_divisibility(&word, u, v) {
        return Ok(Decision { status: Status::NotMember, word: None, trace, sanov: false });
    }
    let recovered = recover_word(m, params, &word)?;
    Ok(Decision { status: Status::Member, word: Some(recovered), trace, sanov: false })
}

fn internal(e: TransformError) -> MatGroupError {
    MatGroupError::InternalInconsistency(e.to_string())
}

/// Exponents from a divisibility-satisfying word, plus the trailing `L_u`
/// power read off `N^-1 M`.
fn recover_word<T: Int>(m: &Mat2<T>, params: &Params<T>, word: &CfWord<T>) -> Result<GroupWord<T>, MatGroupError> {
    let (u, v) = (params.u(), params.v());
    if word.len().is_multiple_of(2) {
        return Err(MatGroupError::InternalInconsistency(format!(
            "{word} satisfies ({params})-divisibility but ends on an L_u entry"
        )));
    }
    let mut alphas: Vec<T> = word
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, q)| q.clone() / if i % 2 == 0 { v.clone() } else { u.clone() })
        .collect();
    let partial = word_to_matrix(&GroupWord { alphas: alphas.clone(), params: params.clone() });
    let residual = partial.inverse().multiply(m);
    let unipotent = residual.a.is_one() && residual.b.is_zero() && residual.d.is_one();
    if !unipotent || !u.is_divisor_of(&residual.c) {
        return Err(MatGroupError::InternalInconsistency(format!(
            "residual {residual} after {word} is not a power of L_{u}"
        )));
    }
    alphas.push(residual.c.clone() / u.clone());
    let recovered = GroupWord::new(alphas, params.clone())?.canonical();
    if word_to_matrix(&recovered) != *m {
        return Err(MatGroupError::InternalInconsistency(format!(
            "recovered word does not reproduce {m}"
        )));
    }
    Ok(recovered)
}

/// `G_{2,2}` is the whole ambient group, so membership is the congruence
/// test. No word is produced.
pub fn decide_sanov<T: Int>(m: &Mat2<T>) -> Decision<T> {
    let two = int::<T>(2);
    let status = if in_ambient(m, &two, &two) { Status::Member } else { Status::NotMember };
    Decision { status, word: None, trace: None, sanov: true }
}

/// Runtime cross-check: the `c/a` analysis agrees with the `b/d` one.
///
/// Swapping both rows and columns sends `R_v` to `L_v` and `L_u` to `R_u`,
/// so `c/a` plays the role of `b/d` for `G_{v,u}`: it is transformed by
/// `f_{v,u}` and tested for `(v, u)`-divisibility, while `b/d` goes through
/// `f_{u,v}` and `(u, v)`-divisibility. The two verdicts must match.
pub fn check_ca_consistency<T: Int>(m: &Mat2<T>, params: &Params<T>) -> Result<bool, MatGroupError> {
    let (u, v) = (params.u(), params.v());
    if m.a.is_zero() {
        return Err(MatGroupError::DivisionByZero("c/a with a = 0"));
    }
    if m.d.is_zero() {
        return Err(MatGroupError::DivisionByZero("b/d with d = 0"));
    }
    let ca = f_uv(&params.swapped(), &short_cf(&Ratio::new(m.c.clone(), m.a.clone())))?;
    let bd = f_uv(params, &short_cf(&Ratio::new(m.b.clone(), m.d.clone())))?;
    Ok(satisfies_divisibility(&ca, v, u) == satisfies_divisibility(&bd, u, v))
}

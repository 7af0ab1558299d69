//! Finite continued-fraction words and exact rational values.
//!
//! A [`CfWord`] is a finite integer sequence `[[q0, q1, ..., qr]]` whose
//! entries after the first are nonzero. It is a formal object: two
//! different words may evaluate to the same rational. The subsets checked by
//! [`in_a0`], [`in_a1`] and [`in_a2`] single out words whose proper
//! suffixes never vanish, the canonical short expansion, and the "rigid"
//! expansions with every tail entry of absolute value at least two.

use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use thiserror::Error;

use crate::int::Int;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CfError {
    #[error("a continued-fraction word needs at least one entry")]
    Empty,
    #[error("entry {index} is zero; only the leading entry may vanish")]
    ZeroEntry { index: usize },
    #[error("the suffix starting at index {index} evaluates to zero")]
    SuffixZero { index: usize },
    #[error("concatenation produced a zero at index {index}")]
    NotInA { index: usize },
    #[error("malformed word {0:?}, expected e.g. \"[[9,1,1,5]]\"")]
    ParseWord(String),
    #[error("malformed rational {0:?}, expected \"p/q\" or an integer")]
    ParseRational(String),
    #[error("zero denominator")]
    ZeroDenominator,
}

/// A word `[[q0, ..., qr]]` with `qi != 0` for `i >= 1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CfWord<T> {
    coeffs: Vec<T>,
}

impl<T: Int> CfWord<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self, CfError> {
        if coeffs.is_empty() {
            return Err(CfError::Empty);
        }
        if let Some(index) = coeffs.iter().skip(1).position(|q| q.is_zero()) {
            return Err(CfError::ZeroEntry { index: index + 1 });
        }
        Ok(Self { coeffs })
    }

    pub fn from_i64s(coeffs: &[i64]) -> Result<Self, CfError> {
        Self::new(coeffs.iter().map(|&q| crate::int::int(q)).collect())
    }

    pub fn single(q0: T) -> Self {
        Self { coeffs: vec![q0] }
    }

    pub(crate) fn from_vec_unchecked(coeffs: Vec<T>) -> Self {
        debug_assert!(!coeffs.is_empty() && coeffs.iter().skip(1).all(|q| !q.is_zero()));
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<T> {
        self.coeffs
    }

    /// Number of entries, `r + 1`.
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// The index `r` of the last entry.
    pub fn depth(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn first(&self) -> &T {
        &self.coeffs[0]
    }
}

impl<T: Int> fmt::Display for CfWord<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[[")?;
        for (i, q) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{q}")?;
        }
        f.write_str("]]")
    }
}

impl<T: Int> FromStr for CfWord<T> {
    type Err = CfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CfError::ParseWord(s.to_string());
        let inner = s
            .trim()
            .strip_prefix("[[")
            .and_then(|rest| rest.strip_suffix("]]"))
            .ok_or_else(bad)?;
        let coeffs = inner
            .split(',')
            .map(|tok| tok.trim().parse::<T>().map_err(|_| bad()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(coeffs)
    }
}

/// Canonical text form of a rational: `num/den`, or just `num` when the
/// denominator is one.
pub fn format_rational<T: Int>(x: &Ratio<T>) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_rational<T: Int>(s: &str) -> Result<Ratio<T>, CfError> {
    let bad = || CfError::ParseRational(s.to_string());
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let num: T = num.parse().map_err(|_| bad())?;
    let den: T = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(CfError::ZeroDenominator);
    }
    Ok(Ratio::new(num, den))
}

/// Exact value `q0 + 1/(q1 + 1/(... + 1/qr))`.
///
/// Evaluated right to left on the continuant pair; a proper suffix that
/// evaluates to zero means the word is outside `A0` and is reported with
/// its starting index.
pub fn evaluate<T: Int>(w: &CfWord<T>) -> Result<Ratio<T>, CfError> {
    let (num, den) = continuants(w.coeffs())?;
    Ok(Ratio::new(num, den))
}

/// `(p, q)` with `p/q` the value of `coeffs`, `gcd(p, q) = 1`.
fn continuants<T: Int>(coeffs: &[T]) -> Result<(T, T), CfError> {
    let (last, rest) = coeffs.split_last().ok_or(CfError::Empty)?;
    let mut num = last.clone();
    let mut den = T::one();
    for (i, q) in rest.iter().enumerate().rev() {
        if num.is_zero() {
            return Err(CfError::SuffixZero { index: i + 1 });
        }
        let next = q.clone() * num.clone() + den;
        den = std::mem::replace(&mut num, next);
    }
    Ok((num, den))
}

/// The short continued fraction of `x`: the unique word in `A1` that
/// evaluates to `x`.
///
/// Floor division keeps every partial quotient after the first positive
/// for negative inputs as well. The Euclidean recurrence never ends on a
/// quotient of 1 after the first step (the last divisor is strictly smaller
/// than the last dividend and divides it), so no trailing fold is needed.
pub fn short_cf<T: Int>(x: &Ratio<T>) -> CfWord<T> {
    let mut num = x.numer().clone();
    let mut den = x.denom().clone();
    let mut coeffs = Vec::new();
    loop {
        let (q, r) = num.div_mod_floor(&den);
        coeffs.push(q);
        if r.is_zero() {
            break;
        }
        num = std::mem::replace(&mut den, r);
    }
    debug_assert!(coeffs.len() == 1 || !coeffs.last().unwrap().is_one());
    CfWord::from_vec_unchecked(coeffs)
}

/// `a (+) b`: plain concatenation when `b` starts with a nonzero entry,
/// otherwise `b`'s leading zero is dropped and its next entry is added to
/// the last entry of `a`.
///
/// `a (+) [[0]]` is `a`, the value-preserving reading of the merge case when
/// `b` has nothing after its zero.
pub fn concat<T: Int>(a: &CfWord<T>, b: &CfWord<T>) -> Result<CfWord<T>, CfError> {
    let mut out = a.coeffs.clone();
    let (p0, tail) = b.coeffs.split_first().expect("words are nonempty");
    if !p0.is_zero() {
        out.extend(b.coeffs.iter().cloned());
        return Ok(CfWord::from_vec_unchecked(out));
    }
    if let Some((p1, rest)) = tail.split_first() {
        let m = out.len() - 1;
        out[m] = out[m].clone() + p1.clone();
        if m > 0 && out[m].is_zero() {
            return Err(CfError::NotInA { index: m });
        }
        out.extend(rest.iter().cloned());
    }
    Ok(CfWord::from_vec_unchecked(out))
}

pub fn negate<T: Int>(w: &CfWord<T>) -> CfWord<T> {
    CfWord::from_vec_unchecked(w.coeffs.iter().map(|q| -q.clone()).collect())
}

/// Every proper suffix `[[qi, ..., qr]]`, `0 < i <= r`, is nonzero.
pub fn in_a0<T: Int>(w: &CfWord<T>) -> bool {
    continuants(w.coeffs()).is_ok()
}

/// Short shape: `qi >= 1` for `0 < i < r` and `qr > 1` when `r > 0`.
///
/// Both conditions force every proper suffix to be at least one, so `A0`
/// membership follows without evaluating.
pub fn in_a1<T: Int>(w: &CfWord<T>) -> bool {
    let q = w.coeffs();
    let r = w.depth();
    let interior_ok = q[1..r.max(1)].iter().all(|x| *x >= T::one());
    let last_ok = r == 0 || q[r] > T::one();
    interior_ok && last_ok
}

/// `|qi| > 1` for `0 < i <= r`. Such suffixes have absolute value above
/// one, so `A0` membership follows.
pub fn in_a2<T: Int>(w: &CfWord<T>) -> bool {
    w.coeffs().iter().skip(1).all(|x| x.abs() > T::one())
}

/// `v` divides every even-indexed entry and `u` every odd-indexed one.
pub fn satisfies_divisibility<T: Int>(w: &CfWord<T>, u: &T, v: &T) -> bool {
    divisibility_by_index(w, u, v).all(|ok| ok)
}

/// Per-index verdicts of the `(u, v)`-divisibility check.
pub fn divisibility_by_index<'a, T: Int>(
    w: &'a CfWord<T>,
    u: &'a T,
    v: &'a T,
) -> impl Iterator<Item = bool> + 'a {
    w.coeffs()
        .iter()
        .enumerate()
        .map(move |(i, q)| if i % 2 == 0 { v.is_divisor_of(q) } else { u.is_divisor_of(q) })
}

/// Builds `S1 (+) s1(S2 (+) s2(... (+) sk T))` from the right without
/// quadratic copying: entries are kept reversed and the accumulated sign is
/// applied lazily.
#[derive(Debug)]
pub(crate) struct RightFold<T> {
    rev: Vec<T>,
    negated: bool,
}

impl<T: Int> RightFold<T> {
    pub(crate) fn new(last: Vec<T>) -> Self {
        debug_assert!(!last.is_empty());
        let mut rev = last;
        rev.reverse();
        Self { rev, negated: false }
    }

    /// Replaces the accumulator `X` with `seg (+) X` or `seg (+) -X`.
    pub(crate) fn prepend(&mut self, seg: Vec<T>, negate_rest: bool) -> Result<(), CfError> {
        debug_assert!(!seg.is_empty());
        // The stored entries are `(-1)^negated` times the true ones; pick the
        // new factor so the rest stays untouched and flip the segment instead.
        let negated = self.negated ^ negate_rest;
        let mut seg: Vec<T> = if negated { seg.into_iter().map(|q| -q).collect() } else { seg };
        if self.rev.last().is_some_and(|p0| p0.is_zero()) {
            self.rev.pop();
            if let Some(p1) = self.rev.pop() {
                let m = seg.len() - 1;
                seg[m] = seg[m].clone() + p1;
                if m > 0 && seg[m].is_zero() {
                    return Err(CfError::NotInA { index: m });
                }
            }
        }
        self.rev.extend(seg.into_iter().rev());
        self.negated = negated;
        Ok(())
    }

    pub(crate) fn finish(self) -> Result<CfWord<T>, CfError> {
        let Self { mut rev, negated } = self;
        rev.reverse();
        if negated {
            rev.iter_mut().for_each(|q| *q = -q.clone());
        }
        CfWord::new(rev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_traits::Zero;
    use proptest::prelude::*;

    type W = CfWord<BigInt>;

    fn w(q: &[i64]) -> W {
        W::from_i64s(q).unwrap()
    }

    fn r(n: i64, d: i64) -> Ratio<BigInt> {
        Ratio::new(n.into(), d.into())
    }

    #[test]
    fn construction_rejects_interior_zero() {
        assert_eq!(W::from_i64s(&[]), Err(CfError::Empty));
        assert_eq!(W::from_i64s(&[1, 0, 2]), Err(CfError::ZeroEntry { index: 1 }));
        assert!(W::from_i64s(&[0, 3]).is_ok());
    }

    #[test]
    fn text_forms() {
        let word: W = " [[9, 1,-2]] ".parse().unwrap();
        assert_eq!(word, w(&[9, 1, -2]));
        assert_eq!(word.to_string(), "[[9,1,-2]]");
        assert!("[9,1]".parse::<W>().is_err());
        assert!("[[]]".parse::<W>().is_err());
        assert!("[[1,0]]".parse::<W>().is_err());

        assert_eq!(parse_rational::<BigInt>("-14/4").unwrap(), r(-7, 2));
        assert_eq!(format_rational(&r(-7, 2)), "-7/2");
        assert_eq!(format_rational(&r(10, 2)), "5");
        assert_eq!(parse_rational::<BigInt>("1/0"), Err(CfError::ZeroDenominator));
        assert!(parse_rational::<BigInt>("1/x").is_err());
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(evaluate(&w(&[5])).unwrap(), r(5, 1));
        assert_eq!(evaluate(&w(&[9, 1, 1, 1, 1, 9, 2, 2, 5])).unwrap(), r(12975, 1351));
        assert_eq!(evaluate(&w(&[9, 2, -3, 10, 3, -2, 6])).unwrap(), r(12975, 1351));
        assert_eq!(evaluate(&w(&[1, -1])).unwrap(), r(0, 1));
    }

    #[test]
    fn evaluate_reports_zero_suffix() {
        // [[1, -1]] is zero, so the suffix at index 2 of [[4, 1, 1, -1]] vanishes.
        assert_eq!(evaluate(&w(&[4, 1, 1, -1])), Err(CfError::SuffixZero { index: 2 }));
        assert!(!in_a0(&w(&[4, 1, 1, -1])));
        assert!(in_a0(&w(&[1, -1])));
    }

    #[test]
    fn short_cf_examples() {
        assert_eq!(short_cf(&r(12975, 1351)), w(&[9, 1, 1, 1, 1, 9, 2, 2, 5]));
        assert_eq!(short_cf(&r(0, 1)), w(&[0]));
        assert_eq!(short_cf(&r(-7, 2)), w(&[-4, 2]));
        assert_eq!(short_cf(&r(1, 2)), w(&[0, 2]));
        assert_eq!(short_cf(&r(-1, 3)), w(&[-1, 1, 2]));
    }

    #[test]
    fn concat_examples() {
        assert_eq!(concat(&w(&[1, 2]), &w(&[3, 4])).unwrap(), w(&[1, 2, 3, 4]));
        assert_eq!(concat(&w(&[1, 2]), &w(&[0, 4])).unwrap(), w(&[1, 6]));
        assert_eq!(concat(&w(&[3, -2]), &w(&[0, 2, 5])), Err(CfError::NotInA { index: 1 }));
        assert_eq!(concat(&w(&[3, -2]), &w(&[0])).unwrap(), w(&[3, -2]));
        // A zero produced in the leading slot is still a word.
        assert_eq!(concat(&w(&[-2]), &w(&[0, 2, 5])).unwrap(), w(&[0, 5]));
    }

    #[test]
    fn negate_examples() {
        assert_eq!(negate(&w(&[0])), w(&[0]));
        assert_eq!(negate(&w(&[2, -3, 1])), w(&[-2, 3, -1]));
        assert_eq!(negate(&negate(&w(&[9, 1, 5]))), w(&[9, 1, 5]));
    }

    #[test]
    fn subset_predicates() {
        assert!(in_a1(&w(&[9, 1, 1, 1, 1, 9, 2, 2, 5])));
        assert!(in_a2(&w(&[9, 2, -3, 10, 3, -2, 6])));
        assert!(!in_a1(&w(&[3, 1])));
        assert!(in_a1(&w(&[-3])));
        assert!(!in_a1(&w(&[3, -2, 5])));
        assert!(!in_a2(&w(&[3, 1, 5])));
        assert!(in_a2(&w(&[0])));
    }

    #[test]
    fn divisibility_examples() {
        let two = BigInt::from(2);
        let three = BigInt::from(3);
        assert!(satisfies_divisibility(&w(&[9, 2, -3, 10, 3, -2, 6]), &two, &three));
        assert!(!satisfies_divisibility(&w(&[10, -3, 2, 9, 2, 2, 5]), &two, &three));
        for (u, v) in [(2, 3), (7, 5), (1, 1)] {
            assert!(satisfies_divisibility(&w(&[0]), &BigInt::from(u), &BigInt::from(v)));
        }
    }

    fn word_strategy() -> impl Strategy<Value = Vec<i64>> {
        (-30i64..30, prop::collection::vec((-30i64..30).prop_filter("nonzero", |x| *x != 0), 0..8))
            .prop_map(|(q0, rest)| std::iter::once(q0).chain(rest).collect())
    }

    /// Value of `a (+) b` from the parts: the last entry of `a` gets
    /// `1/E(b)` added in both cases, since a leading zero in `b` makes
    /// `1/E(b) = p1 + 1/(p2 + ...)`.
    fn concat_value(a: &W, b: &W) -> Option<Ratio<BigInt>> {
        let tail = evaluate(b).ok()?;
        if tail.is_zero() {
            return None;
        }
        let mut acc = Ratio::from(a.coeffs().last().unwrap().clone()) + tail.recip();
        for q in a.coeffs().iter().rev().skip(1) {
            if acc.is_zero() {
                return None;
            }
            acc = Ratio::from(q.clone()) + acc.recip();
        }
        Some(acc)
    }

    proptest! {
        #[test]
        fn short_cf_round_trips(n in any::<i64>(), d in 1i64..i64::MAX) {
            let x = r(n, d);
            let c = short_cf(&x);
            prop_assert!(in_a1(&c));
            prop_assert_eq!(evaluate(&c).unwrap(), x);
        }

        #[test]
        fn short_cf_inverts_evaluate_on_a1(q0 in -50i64..50, mid in prop::collection::vec(1i64..40, 0..8), last in 2i64..40) {
            let mut q = vec![q0];
            q.extend(mid);
            q.push(last);
            let word = w(&q);
            prop_assert_eq!(short_cf(&evaluate(&word).unwrap()), word);
        }

        #[test]
        fn negation_is_odd(q in word_strategy()) {
            let word = w(&q);
            if let Ok(x) = evaluate(&word) {
                prop_assert_eq!(evaluate(&negate(&word)).unwrap(), -x);
            } else {
                prop_assert!(!in_a0(&negate(&word)));
            }
        }

        #[test]
        fn concat_matches_split_evaluation(a in word_strategy(), b in word_strategy()) {
            let (a, b) = (w(&a), w(&b));
            if let (Ok(joined), Some(expected)) = (concat(&a, &b), concat_value(&a, &b)) {
                if let Ok(x) = evaluate(&joined) {
                    prop_assert_eq!(x, expected);
                }
            }
        }

        #[test]
        fn right_fold_agrees_with_nested_concat(
            segs in prop::collection::vec((word_strategy(), any::<bool>()), 1..5),
            last in word_strategy(),
        ) {
            let mut fold = RightFold::new(w(&last).into_coeffs());
            let mut nested = Ok(w(&last));
            for (seg, neg) in segs.iter().rev() {
                let seg = w(seg);
                let folded = fold.prepend(seg.coeffs().to_vec(), *neg);
                nested = nested.and_then(|x| concat(&seg, &if *neg { negate(&x) } else { x }));
                prop_assert_eq!(folded.is_ok(), nested.is_ok());
                if folded.is_err() {
                    return Ok(());
                }
            }
            prop_assert_eq!(fold.finish().unwrap(), nested.unwrap());
        }
    }
}

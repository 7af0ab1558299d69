//! Independent reference implementations and random generators shared by
//! the integration tests. Nothing here calls into the crate's arithmetic.

#![allow(dead_code)]

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const PAIRS: [(i64, i64); 6] = [(2, 3), (3, 2), (2, 5), (3, 3), (4, 2), (5, 7)];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

pub fn bigs(xs: &[i64]) -> Vec<BigInt> {
    xs.iter().copied().map(BigInt::from).collect()
}

/// Value of `[q0, ..., qr]` by folding `q + 1/x` from the right; `None`
/// when some tail evaluates to zero.
pub fn eval(qs: &[BigInt]) -> Option<BigRational> {
    let (last, rest) = qs.split_last()?;
    let mut x = BigRational::from_integer(last.clone());
    for q in rest.iter().rev() {
        if x.is_zero() {
            return None;
        }
        x = BigRational::from_integer(q.clone()) + x.recip();
    }
    Some(x)
}

/// Short continued fraction by repeated floor and reciprocal.
pub fn short_cf(x: &BigRational) -> Vec<BigInt> {
    let mut out = Vec::new();
    let mut x = x.clone();
    loop {
        let q = x.floor();
        out.push(q.to_integer());
        let frac = x - q;
        if frac.is_zero() {
            return out;
        }
        x = frac.recip();
    }
}

pub type M2 = [BigInt; 4];

pub fn mul(x: &M2, y: &M2) -> M2 {
    [
        &x[0] * &y[0] + &x[1] * &y[2],
        &x[0] * &y[1] + &x[1] * &y[3],
        &x[2] * &y[0] + &x[3] * &y[2],
        &x[2] * &y[1] + &x[3] * &y[3],
    ]
}

/// `R_v^{a0} L_u^{a1} R_v^{a2} ...` by multiplying generator powers.
pub fn word_matrix(alphas: &[i64], u: i64, v: i64) -> M2 {
    let mut m: M2 = [big(1), big(0), big(0), big(1)];
    for (i, &a) in alphas.iter().enumerate() {
        let g: M2 = if i % 2 == 0 { [big(1), big(v * a), big(0), big(1)] } else { [big(1), big(0), big(u * a), big(1)] };
        m = mul(&m, &g);
    }
    m
}

/// Drops an all-zero word to the empty word, as the library names the
/// identity.
pub fn canonical(alphas: Vec<i64>) -> Vec<i64> {
    if alphas.iter().all(|&a| a == 0) {
        Vec::new()
    } else {
        alphas
    }
}

pub fn nonzero(rng: &mut impl Rng, max: i64) -> i64 {
    let x = rng.gen_range(1..=max);
    if rng.gen_bool(0.5) {
        x
    } else {
        -x
    }
}

/// Coefficients in `[-50, 50]`, interior at least 1, last above 1, length
/// at most 12.
pub fn random_a1(rng: &mut impl Rng) -> Vec<BigInt> {
    let len = rng.gen_range(1..=12);
    (0..len)
        .map(|i| {
            big(match i {
                0 => rng.gen_range(-50..=50),
                _ if i + 1 == len => rng.gen_range(2..=50),
                _ => rng.gen_range(1..=50),
            })
        })
        .collect()
}

/// First coefficient in `[-50, 50]`, the rest in `[-50, -2] u [2, 50]`.
pub fn random_a2(rng: &mut impl Rng) -> Vec<BigInt> {
    let len = rng.gen_range(1..=12);
    (0..len)
        .map(|i| {
            big(if i == 0 {
                rng.gen_range(-50..=50)
            } else {
                let x = rng.gen_range(2..=50);
                if rng.gen_bool(0.5) {
                    x
                } else {
                    -x
                }
            })
        })
        .collect()
}

/// `[v a0, u a1, v a2, ...]` with `a_i` nonzero after the first, so every
/// tail entry has absolute value at least two.
pub fn random_divisible_a2(rng: &mut impl Rng, u: i64, v: i64) -> Vec<BigInt> {
    let len = rng.gen_range(1..=12);
    (0..len)
        .map(|i| {
            let a = if i == 0 { rng.gen_range(-5..=5) } else { nonzero(rng, 5) };
            big(a * if i % 2 == 0 { v } else { u })
        })
        .collect()
}

/// Exponents of a reduced word: even length at most `max_len`, interior
/// entries in `[-max_exp, max_exp] \ {0}`, ends in `[-max_exp, max_exp]`.
pub fn random_exponents(rng: &mut impl Rng, max_len: usize, max_exp: i64) -> Vec<i64> {
    let len = 2 * rng.gen_range(0..=max_len / 2);
    let alphas = (0..len)
        .map(|i| if i == 0 || i + 1 == len { rng.gen_range(-max_exp..=max_exp) } else { nonzero(rng, max_exp) })
        .collect();
    canonical(alphas)
}

pub fn gcd(a: &BigInt, b: &BigInt) -> BigInt {
    a.gcd(b)
}

pub fn is_unimodular(m: &M2) -> bool {
    (&m[0] * &m[3] - &m[1] * &m[2]).is_one()
}

pub fn abs_max(m: &M2) -> BigInt {
    m.iter().map(|x| x.abs()).max().unwrap()
}

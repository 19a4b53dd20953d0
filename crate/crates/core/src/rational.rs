//! The ground field: arbitrary-precision rationals.
//!
//! `BigRational` already maintains the invariants we rely on (always in lowest
//! terms, positive denominator), so the workbench uses it directly under the
//! alias [`Rat`] together with a few parsing/formatting helpers shared by the
//! text formats.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, Zero};

/// Exact rational scalar used everywhere in this crate.
pub type Rat = BigRational;

/// Shorthand for an integer rational.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Shorthand for `n/d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Render as `num/den`, or just `num` when the denominator is one.
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `num` or `num/den`. Whitespace is not accepted.
pub fn parse_rat(s: &str) -> Option<Rat> {
    match s.split_once('/') {
        None => s.parse::<BigInt>().ok().map(Rat::from_integer),
        Some((n, d)) => {
            let n = n.parse::<BigInt>().ok()?;
            let d = d.parse::<BigInt>().ok()?;
            if d.is_zero() {
                None
            } else {
                Some(Rat::new(n, d))
            }
        }
    }
}

/// Reduce a rational mod a prime, if the denominator is invertible.
pub fn rat_mod_p(x: &Rat, p: u64) -> Option<u64> {
    let p_big = BigInt::from(p);
    let num = ((x.numer() % &p_big) + &p_big) % &p_big;
    let den = ((x.denom() % &p_big) + &p_big) % &p_big;
    let num = num.to_u64_digits().1.first().copied().unwrap_or(0);
    let den = den.to_u64_digits().1.first().copied().unwrap_or(0);
    if den == 0 {
        return None;
    }
    Some(mul_mod(num, inv_mod(den, p), p))
}

pub(crate) fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub(crate) fn inv_mod(a: u64, p: u64) -> u64 {
    // Fermat: p is prime and a != 0 mod p.
    pow_mod(a % p, p - 2, p)
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        exp >>= 1;
    }
    acc
}

/// Sign of a permutation given as the image vector `perm[i] = sigma(i)`.
pub fn perm_sign(perm: &[usize]) -> i32 {
    let mut seen = vec![false; perm.len()];
    let mut sign = 1i32;
    for start in 0..perm.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0usize;
        let mut at = start;
        while !seen[at] {
            seen[at] = true;
            at = perm[at];
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

/// Parity (as a sign) of the permutation sorting `keys` into non-decreasing
/// order, counting inversions. Equal keys contribute no inversion, which makes
/// this the sign of the *stable* sort.
pub fn sort_sign_by_key<T: Ord>(keys: &[T]) -> i32 {
    let mut sign = 1i32;
    for i in 0..keys.len() {
        for j in (i + 1)..keys.len() {
            if keys[i] > keys[j] {
                sign = -sign;
            }
        }
    }
    sign
}

pub fn is_zero(x: &Rat) -> bool {
    x.is_zero()
}

pub fn abs(x: &Rat) -> Rat {
    x.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["3", "-7/2", "0", "22/7"] {
            let x = parse_rat(s).unwrap();
            assert_eq!(format_rat(&x), s);
        }
        assert!(parse_rat("1/0").is_none());
        assert!(parse_rat("a").is_none());
    }

    #[test]
    fn modular_reduction() {
        let p = 1_000_000_007u64;
        let x = ratio(3, 4);
        let m = rat_mod_p(&x, p).unwrap();
        assert_eq!(mul_mod(m, 4, p), 3);
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(perm_sign(&[0, 1, 2]), 1);
        assert_eq!(perm_sign(&[1, 0, 2]), -1);
        assert_eq!(perm_sign(&[1, 2, 0]), 1);
        assert_eq!(sort_sign_by_key(&[2, 1]), -1);
        assert_eq!(sort_sign_by_key(&[1, 1]), 1);
    }
}

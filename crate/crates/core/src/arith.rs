//! Elementary integer arithmetic: gcds, deterministic primality, and
//! trial-division factorization.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use std::collections::BTreeMap;

/// Gcd of the absolute values of a list; the empty list has gcd 0.
pub fn gcd_list<'a, I>(values: I) -> BigInt
where
    I: IntoIterator<Item = &'a BigInt>,
{
    values
        .into_iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 { a } else { gcd_u64(b, a % b) }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc: u64 = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin over the full u64 range.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    // These witnesses decide primality for every n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Factorization of n >= 1 into prime powers by trial division, with a
/// primality short-circuit so large prime cofactors do not trigger the
/// full division loop.
pub fn factor(n: u64) -> BTreeMap<u64, u64> {
    let mut out = BTreeMap::new();
    let mut m = n;
    let push = |p: u64, out: &mut BTreeMap<u64, u64>, m: &mut u64| {
        let mut e = 0;
        while *m % p == 0 {
            *m /= p;
            e += 1;
        }
        if e > 0 {
            out.insert(p, e);
        }
    };
    push(2, &mut out, &mut m);
    let mut p = 3u64;
    while m > 1 {
        if is_prime(m) {
            *out.entry(m).or_insert(0) += 1;
            break;
        }
        while p.checked_mul(p).map_or(false, |sq| sq <= m) && m % p != 0 {
            p += 2;
        }
        if p.checked_mul(p).map_or(true, |sq| sq > m) {
            // m is prime (should have been caught above, but keep it sound)
            *out.entry(m).or_insert(0) += 1;
            break;
        }
        push(p, &mut out, &mut m);
    }
    out
}

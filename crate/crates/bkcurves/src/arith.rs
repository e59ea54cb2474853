//! Integer utilities: primality, factorization, divisor enumeration and
//! a few 2-adic helpers. Everything here is exact; `u128` is wide enough
//! for every parameter the rest of the crate feeds in, and callers that
//! might overflow it are expected to guard first.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

pub fn mulmod(a: u128, b: u128, m: u128) -> u128 {
    // schoolbook double-and-add; m < 2^127 so a+a never overflows
    debug_assert!(m > 0 && m < 1 << 127);
    let (mut a, mut b, mut acc) = (a % m, b % m, 0u128);
    while b > 0 {
        if b & 1 == 1 {
            acc = (acc + a) % m;
        }
        a = (a + a) % m;
        b >>= 1;
    }
    acc
}

pub fn powmod(mut base: u128, mut exp: u128, m: u128) -> u128 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u128;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Miller-Rabin. Deterministic for n < 3.3e24 via the standard witness
/// set; the extra fixed witnesses make a false positive implausible for
/// anything the crate can feed in above that.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    let witnesses: &[u128] = &[
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, // proven below 3.3e24
        41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
    ];
    'outer: for &a in witnesses {
        let a = a % n;
        if a == 0 {
            continue;
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn pollard_rho(n: u128) -> u128 {
    // Brent's cycle variant with deterministic parameter sweep.
    debug_assert!(n > 1 && !is_prime(n) && n % 2 == 1);
    for c in 1u128.. {
        let f = |x: u128| (mulmod(x, x, n) + c) % n;
        let (mut x, mut y, mut d) = (2u128, 2u128, 1u128);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd_u128(x.abs_diff(y), n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

pub fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Prime factorization of `n`, sorted, as `(prime, exponent)` pairs.
pub fn factor(n: u128) -> Vec<(u128, u32)> {
    let mut n = n;
    let mut primes = Vec::new();
    for p in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
    }
    let mut stack = vec![n];
    while let Some(m) = stack.pop() {
        if m == 1 {
            continue;
        }
        if is_prime(m) {
            primes.push(m);
            continue;
        }
        let d = pollard_rho(m);
        stack.push(d);
        stack.push(m / d);
    }
    primes.sort_unstable();
    let mut out: Vec<(u128, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// All divisors of `n`, ascending.
pub fn divisors(n: u128) -> Vec<u128> {
    let mut divs = vec![1u128];
    for (p, e) in factor(n) {
        let len = divs.len();
        let mut pe = 1u128;
        for _ in 0..e {
            pe *= p;
            for i in 0..len {
                divs.push(divs[i] * pe);
            }
        }
    }
    divs.sort_unstable();
    divs
}

/// 2-adic valuation of `n > 0`.
pub fn v2(n: u128) -> u32 {
    debug_assert!(n > 0);
    n.trailing_zeros()
}

/// Largest odd divisor of `n > 0`.
pub fn odd_part(n: &BigUint) -> BigUint {
    debug_assert!(!n.is_zero());
    let mut n = n.clone();
    while (&n % 2u8).is_zero() {
        n >>= 1;
    }
    n
}

pub fn is_power_of_two(n: u64) -> bool {
    n != 0 && n & (n - 1) == 0
}

/// `p^e` as a big integer.
pub fn big_pow(p: u64, e: u32) -> BigUint {
    BigUint::from(p).pow(e)
}

/// `p^e + 1` as a big integer.
pub fn power_plus_one(p: u64, e: u32) -> BigUint {
    big_pow(p, e) + 1u8
}

/// Convert, erroring out instead of truncating.
pub fn to_u128(n: &BigUint) -> Option<u128> {
    n.to_u128()
}

/// Multiplicative order of `a` modulo `m`, given the factorization of a
/// multiple `bound` of the order (usually the group order).
pub fn order_mod(a: u128, m: u128, bound: u128, bound_factors: &[(u128, u32)]) -> u128 {
    debug_assert_eq!(powmod(a, bound, m), 1 % m);
    let mut ord = bound;
    for &(p, e) in bound_factors {
        for _ in 0..e {
            if ord % p == 0 && powmod(a, ord / p, m) == 1 {
                ord /= p;
            } else {
                break;
            }
        }
    }
    ord
}

/// Least `n >= 1` with `ord | base^n - 1`, i.e. the multiplicative order
/// of `base` modulo `ord`. Requires `gcd(base, ord) = 1`.
pub fn multiplicative_order_of_base(base: u64, ord: &BigUint) -> u32 {
    assert!(!ord.is_zero());
    if ord.is_one() {
        return 1;
    }
    let base = BigUint::from(base);
    let mut acc = &base % ord;
    let mut n = 1u32;
    while !acc.is_one() {
        acc = acc * &base % ord;
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u128> = (2..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(primes, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]);
    }

    #[test]
    fn factor_known() {
        assert_eq!(factor(1), vec![]);
        assert_eq!(factor(28), vec![(2, 2), (7, 1)]);
        assert_eq!(factor(19684), vec![(2, 2), (7, 1), (19, 1), (37, 1)]);
        // 3^12 + 1
        assert_eq!(factor(531442), vec![(2, 1), (41, 1), (6481, 1)]);
    }

    #[test]
    fn divisors_of_56() {
        assert_eq!(divisors(56), vec![1, 2, 4, 7, 8, 14, 28, 56]);
    }

    #[test]
    fn factor_large_semiprime() {
        // (3^29 + 1) / 4 has a large prime factor; round-trips exactly.
        let n: u128 = 68630377364884;
        let f = factor(n);
        let back: u128 = f.iter().map(|&(p, e)| p.pow(e)).product();
        assert_eq!(back, n);
        assert!(f.iter().all(|&(p, _)| is_prime(p)));
    }

    #[test]
    fn order_mod_cyclic() {
        // 3 has order 5 mod 11^... : ord(3 mod 242) etc. keep it simple:
        let fs = factor(10);
        assert_eq!(order_mod(3, 11, 10, &fs), 5);
        assert_eq!(order_mod(2, 11, 10, &fs), 10);
    }

    #[test]
    fn base_order_examples() {
        assert_eq!(multiplicative_order_of_base(3, &BigUint::from(8u8)), 2);
        assert_eq!(multiplicative_order_of_base(3, &BigUint::from(20u8)), 4);
        assert_eq!(multiplicative_order_of_base(3, &BigUint::from(160u8)), 8);
    }
}

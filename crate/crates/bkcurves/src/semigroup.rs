//! The Weierstrass semigroup of `B_k` at its point at infinity —
//! generated by `p` and `p^k + 1` — together with gap enumeration and
//! explicit monomial bases of the Riemann-Roch spaces `L(n·P)`.
//!
//! The pole order of `x^i y^j` at infinity is `i·p + j·(p^k+1)`
//! (valuations `v(x) = -p`, `v(y) = -(p^k+1)`), and the monomials with
//! `0 <= j <= p-1` and pole order at most `n` form a basis of `L(n·P)`.
//! Everything here is exponent arithmetic; no function-field symbolics.

use serde::Serialize;

use crate::arith;
use crate::{ClassifiedError, ErrorClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SemigroupError {
    #[error("p must be an odd prime and k >= 1")]
    BadParameters,
    #[error("p^k + 1 does not fit in 64 bits; semigroup enumeration is a desk-scale tool")]
    TooLarge,
}

impl ClassifiedError for SemigroupError {
    fn class(&self) -> ErrorClass {
        match self {
            SemigroupError::BadParameters => ErrorClass::InvalidInput,
            SemigroupError::TooLarge => ErrorClass::GuardExceeded,
        }
    }
}

/// The numerical semigroup `<p, p^k + 1>`. The generators are coprime,
/// so there are finitely many gaps; their number equals the genus
/// `p^k (p-1)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeierstrassSemigroup {
    pub p: u64,
    pub k: u32,
    /// The second generator, `m = p^k + 1`.
    pub m: u64,
}

/// A basis monomial `x^i y^j` of some `L(n·P)`, tagged with its pole
/// order at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RRMonomial {
    pub i: u64,
    pub j: u64,
    pub pole_order: u64,
}

impl WeierstrassSemigroup {
    pub fn new(p: u64, k: u32) -> Result<Self, SemigroupError> {
        if p < 3 || p % 2 == 0 || !arith::is_prime(p as u128) || k == 0 {
            return Err(SemigroupError::BadParameters);
        }
        let m = arith::to_u128(&arith::power_plus_one(p, k))
            .filter(|&m| m <= u64::MAX as u128)
            .ok_or(SemigroupError::TooLarge)? as u64;
        // the Frobenius bound p*m must stay representable too
        if p.checked_mul(m).is_none() {
            return Err(SemigroupError::TooLarge);
        }
        Ok(WeierstrassSemigroup { p, k, m })
    }

    /// Largest integer not representable as `a·p + b·m`:
    /// `p·m - p - m` for coprime generators.
    pub fn frobenius_bound(&self) -> u64 {
        self.p * self.m - self.p - self.m
    }

    /// Whether `n` is a pole number, i.e. `n = a·p + b·m` with
    /// nonnegative `a`, `b`.
    pub fn is_pole_number(&self, n: u64) -> bool {
        let mut rest = n;
        loop {
            if rest % self.p == 0 {
                return true;
            }
            if rest < self.m {
                return false;
            }
            rest -= self.m;
        }
    }

    /// All gap numbers, ascending. Sieves reachability up to the
    /// Frobenius bound; the count always equals the genus.
    pub fn gaps(&self) -> Vec<u64> {
        let bound = self.frobenius_bound();
        let len = bound as usize + 1;
        let mut reachable = vec![false; len.max(1)];
        if !reachable.is_empty() {
            reachable[0] = true;
            for n in 1..len {
                let via_p = n as u64 >= self.p && reachable[n - self.p as usize];
                let via_m = n as u64 >= self.m && reachable[n - self.m as usize];
                reachable[n] = via_p || via_m;
            }
        }
        (0..len as u64).filter(|&n| !reachable[n as usize]).collect()
    }

    /// Monomial basis of `L(n·P)`: all `x^i y^j` with `0 <= j <= p-1`
    /// and `i·p + j·m <= n`. The pole orders are pairwise distinct
    /// because `j` stays below `p`.
    pub fn rr_basis(&self, n: u64) -> Vec<RRMonomial> {
        let mut basis = Vec::new();
        for j in 0..self.p.min(n / self.m + 1) {
            let jm = j * self.m;
            if jm > n {
                break;
            }
            for i in 0..=(n - jm) / self.p {
                basis.push(RRMonomial { i, j, pole_order: i * self.p + jm });
            }
        }
        basis.sort_by_key(|mono| (mono.pole_order, mono.j));
        basis
    }

    /// `dim L(n·P)`; for `n >= 2g - 1` this equals `n - g + 1`.
    pub fn rr_dim(&self, n: u64) -> u64 {
        let mut dim = 0;
        for j in 0..self.p {
            let jm = j.checked_mul(self.m);
            match jm {
                Some(jm) if jm <= n => dim += (n - jm) / self.p + 1,
                _ => break,
            }
        }
        dim
    }
}

/// Valuation at infinity of `x^(p^(k-1)) / y`, evaluated from
/// `v(x) = -p` and `v(y) = -(p^k + 1)`; the arithmetic forces the value
/// 1, i.e. the function is a uniformizer, and this is checked.
pub fn uniformizer_valuation(p: u64, k: u32) -> Result<i64, SemigroupError> {
    if p < 3 || p % 2 == 0 || !arith::is_prime(p as u128) || k == 0 {
        return Err(SemigroupError::BadParameters);
    }
    let vx = num_bigint::BigInt::from(arith::big_pow(p, k - 1)) * p;
    let vy = num_bigint::BigInt::from(arith::power_plus_one(p, k));
    let v = -vx + vy;
    assert_eq!(v, num_bigint::BigInt::from(1), "valuation identity violated");
    Ok(1)
}

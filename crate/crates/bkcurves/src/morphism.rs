//! Morphisms `B_k → B_l`: the arithmetic existence criterion for
//! `p^l + 1 | p^k + 1`, the closed-form gcd of `p^a + 1` and `p^b + 1`,
//! the Riemann-Hurwitz degree bound, the explicit covering map
//! `(x, y) ↦ (x^t, y)` of degree `t = (p^k+1)/(p^l+1)`, and the
//! consistency gate on a claimed totally-ramified degree.
//!
//! Every closed form here is double-checked against an independent
//! big-integer computation at construction time; a mismatch is an
//! internal inconsistency and never a silent fallback.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;
use serde::Serialize;

use crate::arith;
use crate::curve::{CurveBk, CurveError, CurvePoint, Sign};
use crate::field::FieldCtx;
use crate::guard::{Guard, GuardExceeded};
use crate::{ClassifiedError, ErrorClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MorphismError {
    #[error("p^{l}+1 does not divide p^{k}+1 (p={p})")]
    NotDivisible { p: u64, k: u32, l: u32 },
    #[error("the point does not lie on the source curve")]
    NotOnSource,
    #[error("parameters violate the statement's hypotheses: {0}")]
    PreconditionViolated(String),
    #[error(transparent)]
    Guard(#[from] GuardExceeded),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

impl ClassifiedError for MorphismError {
    fn class(&self) -> ErrorClass {
        match self {
            MorphismError::Guard(_) => ErrorClass::GuardExceeded,
            MorphismError::Curve(e) => e.class(),
            MorphismError::Inconsistency(_) => ErrorClass::Inconsistency,
            _ => ErrorClass::InvalidInput,
        }
    }
}

/// Outcome of the divisibility criterion, carrying both sides of the
/// equivalence: `p^l+1 | p^k+1` iff `l | k` with odd quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DivisibilityWitness {
    pub divides: bool,
    pub l_divides_k: bool,
    pub quotient_odd: bool,
}

/// Compute both sides of the equivalence independently — big-integer
/// division on one side, parity of `k/l` on the other — and require
/// them to agree.
pub fn divides_power_plus_one(p: u64, l: u32, k: u32) -> Result<DivisibilityWitness, MorphismError> {
    assert!(l >= 1 && k >= 1, "exponents must be positive");
    let divides = (arith::power_plus_one(p, k) % arith::power_plus_one(p, l)).is_zero();
    let l_divides_k = k % l == 0;
    let quotient_odd = l_divides_k && (k / l) % 2 == 1;
    let witness = DivisibilityWitness { divides, l_divides_k, quotient_odd };
    if divides != (l_divides_k && quotient_odd) {
        return Err(MorphismError::Inconsistency(format!(
            "divisibility equivalence fails at p={p} l={l} k={k}: {witness:?}"
        )));
    }
    Ok(witness)
}

/// `gcd(p^a + 1, p^b + 1)` via the closed form — `p^gcd(a,b) + 1` when
/// both `a/gcd` and `b/gcd` are odd, else `2` — cross-checked against
/// the Euclidean gcd.
pub fn gcd_of_power_plus_ones(p: u64, a: u32, b: u32) -> Result<BigUint, MorphismError> {
    assert!(a >= 1 && b >= 1, "exponents must be positive");
    let g = a.gcd(&b);
    let closed = if (a / g) % 2 == 1 && (b / g) % 2 == 1 {
        arith::power_plus_one(p, g)
    } else {
        BigUint::from(2u8)
    };
    let euclid = arith::power_plus_one(p, a).gcd(&arith::power_plus_one(p, b));
    if closed != euclid {
        return Err(MorphismError::Inconsistency(format!(
            "gcd closed form fails at p={p} a={a} b={b}: closed {closed}, euclid {euclid}"
        )));
    }
    Ok(closed)
}

/// Riemann-Hurwitz bound on the degree of any morphism `B_k → B_l`:
/// `floor((p^(k+1) - p^k - 2) / (p^(l+1) - p^l - 2))`.
pub fn degree_bound(p: u64, k: u32, l: u32) -> BigUint {
    assert!(l >= 1 && l < k, "need 1 <= l < k");
    let num = arith::big_pow(p, k + 1) - arith::big_pow(p, k) - 2u8;
    let den = arith::big_pow(p, l + 1) - arith::big_pow(p, l) - 2u8;
    num / den
}

/// The two auxiliary comparisons sitting between the trivial degree
/// facts and the Riemann-Hurwitz bound, as exact cross-multiplied
/// inequalities. Both must hold whenever `1 < l < k`:
/// `(p^k+1)/p > bound` and `2(p^k+1)/(p^l+1) > bound`.
pub fn degree_bound_inequalities(p: u64, k: u32, l: u32) -> (bool, bool) {
    assert!(l >= 1 && l < k, "need 1 <= l < k");
    let num = arith::big_pow(p, k + 1) - arith::big_pow(p, k) - 2u8;
    let den = arith::big_pow(p, l + 1) - arith::big_pow(p, l) - 2u8;
    let pk1 = arith::power_plus_one(p, k);
    let pl1 = arith::power_plus_one(p, l);
    let first = &pk1 * &den > BigUint::from(p) * &num;
    let second = 2u8 * &pk1 * &den > &num * &pl1;
    (first, second)
}

/// The explicit covering map `(x, y) ↦ (x^t, y)` from `B_k` to `B_l`,
/// of degree `t = (p^k+1)/(p^l+1)`, totally ramified at infinity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MorphismSpec {
    pub p: u64,
    pub k: u32,
    pub l: u32,
    /// The exponent and degree, `t = (p^k+1)/(p^l+1)`.
    #[serde(serialize_with = "crate::serial::biguint")]
    pub t: BigUint,
}

impl MorphismSpec {
    /// Exists exactly when `p^l + 1` divides `p^k + 1`.
    pub fn build(p: u64, k: u32, l: u32) -> Result<MorphismSpec, MorphismError> {
        let witness = divides_power_plus_one(p, l, k)?;
        if !witness.divides {
            return Err(MorphismError::NotDivisible { p, k, l });
        }
        let t = arith::power_plus_one(p, k) / arith::power_plus_one(p, l);
        let spec = MorphismSpec { p, k, l, t };
        debug_assert!(spec.alternating_sum_identity_holds());
        Ok(spec)
    }

    pub fn degree(&self) -> &BigUint {
        &self.t
    }

    /// `t = sum_{i<m} (-1)^i p^(l i)` with `m = k/l` odd — the factor
    /// that multiplies `p^l + 1` back up to `p^k + 1`.
    pub fn alternating_sum_identity_holds(&self) -> bool {
        let m = self.k / self.l;
        let mut total = BigInt::zero();
        for i in 0..m {
            let term = BigInt::from(arith::big_pow(self.p, self.l * i));
            if i % 2 == 0 {
                total += term;
            } else {
                total -= term;
            }
        }
        total == BigInt::from(self.t.clone())
            && &self.t * arith::power_plus_one(self.p, self.l) == arith::power_plus_one(self.p, self.k)
    }

    /// Apply the map to a rational point of `B_{k,c}`; the image is
    /// checked against `B_{l,c}` and must land on it.
    pub fn apply(&self, pt: &CurvePoint, ctx: &FieldCtx, c: Sign) -> Result<CurvePoint, MorphismError> {
        let source = CurveBk::new(self.p, self.k, c)?;
        let target = CurveBk::new(self.p, self.l, c)?;
        if !source.contains(pt, ctx)? {
            return Err(MorphismError::NotOnSource);
        }
        let image = match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine(x, y) => CurvePoint::Affine(x.pow(&self.t), y.clone()),
        };
        if !target.contains(&image, ctx)? {
            return Err(MorphismError::Inconsistency(format!(
                "image of {pt} under x^{} misses the target curve",
                self.t
            )));
        }
        Ok(image)
    }

    /// Fibers of the map over the rational points of the target that
    /// are hit, by exhaustive transport of `B_{k,c}(ctx)`. Checks that
    /// the fiber over infinity is exactly the point at infinity and
    /// that no fiber exceeds the degree.
    pub fn fiber_census(
        &self,
        ctx: &FieldCtx,
        c: Sign,
        guard: &Guard,
    ) -> Result<FiberCensus, MorphismError> {
        let source = CurveBk::new(self.p, self.k, c)?;
        let points = source.enumerate_points(ctx, guard)?;
        let mut fibers: BTreeMap<CurvePoint, u64> = BTreeMap::new();
        for pt in &points {
            let image = self.apply(pt, ctx, c)?;
            *fibers.entry(image).or_insert(0) += 1;
        }
        let infinity_fiber = fibers.get(&CurvePoint::Infinity).copied().unwrap_or(0);
        if infinity_fiber != 1 {
            return Err(MorphismError::Inconsistency(format!(
                "fiber over infinity has size {infinity_fiber}, expected 1 (total ramification)"
            )));
        }
        let max_fiber = fibers.values().copied().max().unwrap_or(0);
        if BigUint::from(max_fiber) > self.t {
            return Err(MorphismError::Inconsistency(format!(
                "a fiber of size {max_fiber} exceeds the degree {}",
                self.t
            )));
        }
        Ok(FiberCensus {
            degree: self.t.clone(),
            source_points: points.len() as u64,
            infinity_fiber,
            max_fiber,
            fibers,
        })
    }
}

/// Fiber statistics of one covering map over one field of definition.
#[derive(Debug, Clone, Serialize)]
pub struct FiberCensus {
    #[serde(serialize_with = "crate::serial::biguint")]
    pub degree: BigUint,
    pub source_points: u64,
    pub infinity_fiber: u64,
    pub max_fiber: u64,
    #[serde(skip)]
    pub fibers: BTreeMap<CurvePoint, u64>,
}

/// Verdict of the totally-ramified degree gate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", content = "detail")]
pub enum RamificationVerdict {
    /// The claimed degree matches the only value the hypotheses allow.
    Consistent,
    /// No morphism with the claimed data can exist; the failing clause.
    Impossible(ImpossibleReason),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ImpossibleReason {
    /// `p^l + 1` does not divide `p^k + 1`.
    NotDivisible,
    /// Divisibility holds but the degree is not `(p^k+1)/(p^l+1)`.
    WrongDegree {
        #[serde(serialize_with = "crate::serial::biguint")]
        expected: BigUint,
    },
}

/// Gate for a claimed totally-ramified morphism `B_k → B_l` of degree
/// `d` coprime to `p`, within the stated scope `1 < l < k`: the only
/// consistent degree is `(p^k+1)/(p^l+1)`, and only when the
/// divisibility holds. The hypothesis "a morphism exists" is not
/// machine-checkable, so this verifies the forced conclusions.
pub fn decide_totally_ramified(
    p: u64,
    k: u32,
    l: u32,
    d: &BigUint,
) -> Result<RamificationVerdict, MorphismError> {
    if l <= 1 || l >= k {
        return Err(MorphismError::PreconditionViolated(format!(
            "the statement requires 1 < l < k, got l={l}, k={k}"
        )));
    }
    if (d % p).is_zero() {
        return Err(MorphismError::PreconditionViolated(
            "the claimed degree must be coprime to p".into(),
        ));
    }
    let witness = divides_power_plus_one(p, l, k)?;
    if !witness.divides {
        return Ok(RamificationVerdict::Impossible(ImpossibleReason::NotDivisible));
    }
    let expected = arith::power_plus_one(p, k) / arith::power_plus_one(p, l);
    if *d == expected {
        Ok(RamificationVerdict::Consistent)
    } else {
        Ok(RamificationVerdict::Impossible(ImpossibleReason::WrongDegree { expected }))
    }
}

/// Whether `(a·base + 1) / (d·base + 1)` is an integer. For
/// `1 <= a <= base` integrality forces `d = a`; the test suite sweeps
/// that implication.
pub fn product_plus_one_divisible(a: u64, base: u64, d: u64) -> bool {
    let num = a as u128 * base as u128 + 1;
    let den = d as u128 * base as u128 + 1;
    num % den == 0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guard::Guard;

    #[test]
    fn divisibility_witness_examples() {
        let w = divides_power_plus_one(3, 1, 3).unwrap();
        assert!(w.divides && w.l_divides_k && w.quotient_odd);
        let w = divides_power_plus_one(3, 1, 2).unwrap();
        assert!(!w.divides && w.l_divides_k && !w.quotient_odd);
        for p in [3, 5, 7] {
            for l in 1..=6 {
                let w = divides_power_plus_one(p, l, l).unwrap();
                assert!(w.divides && w.quotient_odd);
            }
        }
    }

    #[test]
    fn divisibility_equivalence_sweep() {
        for p in [3u64, 5, 7] {
            for l in 1..=30 {
                for k in 1..=30 {
                    divides_power_plus_one(p, l, k).unwrap();
                }
            }
        }
    }

    #[test]
    fn gcd_examples() {
        assert_eq!(gcd_of_power_plus_ones(3, 2, 4).unwrap(), BigUint::from(2u8));
        assert_eq!(gcd_of_power_plus_ones(3, 3, 9).unwrap(), BigUint::from(28u8));
        assert_eq!(gcd_of_power_plus_ones(3, 2, 6).unwrap(), BigUint::from(10u8));
    }

    #[test]
    fn gcd_closed_form_sweep() {
        for p in [3u64, 5, 7] {
            for a in 1..=30 {
                for b in 1..=30 {
                    gcd_of_power_plus_ones(p, a, b).unwrap();
                }
            }
        }
    }

    #[test]
    fn degree_bound_examples() {
        assert_eq!(degree_bound(3, 3, 1), BigUint::from(13u8));
        assert_eq!(degree_bound(3, 2, 1), BigUint::from(4u8));
    }

    #[test]
    fn degree_bound_inequalities_hold_in_scope() {
        for p in [3u64, 5, 7] {
            for l in 2..20u32 {
                for k in (l + 1)..=20 {
                    let (first, second) = degree_bound_inequalities(p, k, l);
                    assert!(first, "first inequality fails at p={p} k={k} l={l}");
                    assert!(second, "second inequality fails at p={p} k={k} l={l}");
                }
            }
        }
    }

    #[test]
    fn build_examples() {
        assert_eq!(MorphismSpec::build(3, 3, 1).unwrap().t, BigUint::from(7u8));
        assert_eq!(MorphismSpec::build(5, 3, 1).unwrap().t, BigUint::from(21u8));
        assert!(matches!(
            MorphismSpec::build(3, 2, 1),
            Err(MorphismError::NotDivisible { .. })
        ));
    }

    #[test]
    fn alternating_sum_identity_on_divisible_sweep() {
        for p in [3u64, 5] {
            for l in 1..=5u32 {
                for k in (l + 1)..=15 {
                    if let Ok(spec) = MorphismSpec::build(p, k, l) {
                        assert!(spec.alternating_sum_identity_holds());
                        assert!(
                            spec.t <= degree_bound(p, k, l),
                            "degree above bound at p={p} k={k} l={l}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn apply_basics() {
        let spec = MorphismSpec::build(3, 3, 1).unwrap();
        let ctx = FieldCtx::get(3, 2).unwrap();
        assert_eq!(
            spec.apply(&CurvePoint::Infinity, &ctx, Sign::Minus).unwrap(),
            CurvePoint::Infinity
        );
        // x = 0 fibers agree: (0, y) stays (0, y)
        let source = CurveBk::new(3, 3, Sign::Minus).unwrap();
        for pt in source.enumerate_points(&ctx, &Guard::default()).unwrap() {
            if let CurvePoint::Affine(x, y) = &pt {
                if x.is_zero() {
                    let image = spec.apply(&pt, &ctx, Sign::Minus).unwrap();
                    assert_eq!(image, CurvePoint::Affine(x.clone(), y.clone()));
                }
            }
        }
        // a pair off the curve is rejected
        let off = CurvePoint::Affine(ctx.one(), ctx.one());
        assert!(matches!(
            spec.apply(&off, &ctx, Sign::Minus),
            Err(MorphismError::NotOnSource)
        ));
    }

    #[test]
    fn exhaustive_transport_3_3_1() {
        let spec = MorphismSpec::build(3, 3, 1).unwrap();
        let target = CurveBk::new(3, 1, Sign::Minus).unwrap();
        let source = CurveBk::new(3, 3, Sign::Minus).unwrap();
        for n in 1..=4 {
            let ctx = FieldCtx::get(3, n).unwrap();
            for pt in source.enumerate_points(&ctx, &Guard::default()).unwrap() {
                let image = spec.apply(&pt, &ctx, Sign::Minus).unwrap();
                assert!(target.contains(&image, &ctx).unwrap());
            }
        }
    }

    #[test]
    fn exhaustive_transport_5_3_1() {
        let spec = MorphismSpec::build(5, 3, 1).unwrap();
        let source = CurveBk::new(5, 3, Sign::Minus).unwrap();
        let target = CurveBk::new(5, 1, Sign::Minus).unwrap();
        let ctx = FieldCtx::get(5, 2).unwrap();
        for pt in source.enumerate_points(&ctx, &Guard::default()).unwrap() {
            let image = spec.apply(&pt, &ctx, Sign::Minus).unwrap();
            assert!(target.contains(&image, &ctx).unwrap());
        }
    }

    #[test]
    fn fiber_census_3_3_1() {
        let spec = MorphismSpec::build(3, 3, 1).unwrap();
        let ctx = FieldCtx::get(3, 4).unwrap();
        let census = spec.fiber_census(&ctx, Sign::Minus, &Guard::default()).unwrap();
        assert_eq!(census.infinity_fiber, 1);
        assert!(census.max_fiber <= 7);
        let total: u64 = census.fibers.values().sum();
        assert_eq!(total, census.source_points);
    }

    #[test]
    fn totally_ramified_gate() {
        // l = 1 is outside the converse statement's scope
        assert!(matches!(
            decide_totally_ramified(3, 3, 1, &BigUint::from(7u8)),
            Err(MorphismError::PreconditionViolated(_))
        ));
        // (3,6,2): only 73 = 730/10 is consistent
        assert_eq!(
            decide_totally_ramified(3, 6, 2, &BigUint::from(73u8)).unwrap(),
            RamificationVerdict::Consistent
        );
        assert_eq!(
            decide_totally_ramified(3, 6, 2, &BigUint::from(7u8)).unwrap(),
            RamificationVerdict::Impossible(ImpossibleReason::WrongDegree {
                expected: BigUint::from(73u8)
            })
        );
        // (3,4,2): 10 does not divide 82, every coprime degree is impossible
        for d in [1u8, 2, 4, 5, 7, 8, 41, 82] {
            assert_eq!(
                decide_totally_ramified(3, 4, 2, &BigUint::from(d)).unwrap(),
                RamificationVerdict::Impossible(ImpossibleReason::NotDivisible)
            );
        }
        // degree divisible by p violates the hypotheses
        assert!(matches!(
            decide_totally_ramified(3, 6, 2, &BigUint::from(9u8)),
            Err(MorphismError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn product_plus_one_examples() {
        assert!(product_plus_one_divisible(2, 9, 2)); // 19/19
        assert!(!product_plus_one_divisible(2, 9, 1)); // 19/10
        for (a, base) in [(1u64, 5u64), (3, 7), (9, 9), (200, 200)] {
            assert!(product_plus_one_divisible(a, base, a));
        }
    }

    #[test]
    fn product_plus_one_forces_equality() {
        for base in 1..=200u64 {
            for a in 1..=base {
                for d in 1..=200u64 {
                    if product_plus_one_divisible(a, base, d) {
                        assert_eq!(d, a, "integrality without d=a at a={a} base={base} d={d}");
                    }
                }
            }
        }
    }
}

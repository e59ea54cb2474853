//! Quotients of `B_k` by candidate subgroups: the two components of the
//! ramification divisor, the quotient-genus formula, and an exact
//! Riemann-Hurwitz consistency check. The formulas take a parameter
//! bundle `(m, t, r)` and are evaluated in exact rational arithmetic;
//! a non-integral output is reported, not rejected, because the same
//! formulas are later consumed as a pure Diophantine condition applied
//! to candidates before any subgroup is exhibited.
//!
//! The orbit verifier checks the combinatorics behind the formulas on
//! actual rational points: the x = 0 fiber has `p` points, the origin
//! is fixed, the remaining `p-1` points fall into `(p-1)/t` orbits of
//! length `t`, nothing off the fiber sits in a short orbit, and the
//! p-part translates move the fiber entirely off itself.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::autgroup::{valid_pair, AutError, SubgroupParams};
use crate::curve::{genus, CurveBk, CurveError, CurvePoint, Sign};
use crate::field::{FieldCtx, FieldError};
use crate::guard::{Guard, GuardExceeded};
use crate::{ClassifiedError, ErrorClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QuotientError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Aut(#[from] AutError),
    #[error(transparent)]
    Guard(#[from] GuardExceeded),
    #[error("orbit structure violates the predicted pattern: {0}")]
    StructureMismatch(String),
}

impl ClassifiedError for QuotientError {
    fn class(&self) -> ErrorClass {
        match self {
            QuotientError::InvalidParams(_) => ErrorClass::InvalidInput,
            QuotientError::Field(e) => e.class(),
            QuotientError::Curve(e) => e.class(),
            QuotientError::Aut(e) => e.class(),
            QuotientError::Guard(_) => ErrorClass::GuardExceeded,
            QuotientError::StructureMismatch(_) => ErrorClass::Inconsistency,
        }
    }
}

fn check_formula_preconditions(params: &SubgroupParams) -> Result<(), QuotientError> {
    let p = params.p;
    if params.t == 0 || (p - 1) % params.t != 0 {
        return Err(QuotientError::InvalidParams(format!(
            "t={} must divide p-1={}",
            params.t,
            p - 1
        )));
    }
    if !(&params.m % params.t).is_zero() {
        return Err(QuotientError::InvalidParams(format!(
            "t={} must divide m={}",
            params.t, params.m
        )));
    }
    Ok(())
}

/// The ramification contributions of a quotient by `G` of order
/// `m·p^r`: the affine part
/// `Δ_1 = ((p-1)/t)(m p^r - p^r t) + m p^r - p^r`
/// and the infinity part `d_P = m p^r - 1 + p^r - 1`.
pub fn different_components(params: &SubgroupParams) -> Result<(BigUint, BigUint), QuotientError> {
    check_formula_preconditions(params)?;
    let p = params.p;
    let pr = arith::big_pow(p, params.r);
    let mpr = &params.m * &pr;
    let delta1 = (&mpr - &pr * params.t) * ((p - 1) / params.t) + &mpr - &pr;
    let d_infinity = &mpr - 1u8 + &pr - 1u8;
    Ok((delta1, d_infinity))
}

/// Genus of the quotient: `(p-1)(t(p^r + p^k) - p^r m) / (2 p^r m t)`,
/// exact rational, plus a flag telling whether it is a nonnegative
/// integer (necessary for the parameters to come from a subgroup).
pub fn quotient_genus(params: &SubgroupParams) -> Result<(BigRational, bool), QuotientError> {
    check_formula_preconditions(params)?;
    let p = params.p;
    let pr = BigInt::from(arith::big_pow(p, params.r));
    let pk = BigInt::from(arith::big_pow(p, params.k));
    let m = BigInt::from(params.m.clone());
    let t = BigInt::from(params.t);
    let num = BigInt::from(p - 1) * (&t * (&pr + &pk) - &pr * &m);
    let den = BigInt::from(2) * &pr * &m * &t;
    let g = BigRational::new(num, den);
    let integral = g.is_integer() && !g.is_negative();
    Ok((g, integral))
}

/// Exact Riemann-Hurwitz bookkeeping:
/// `2 g(B_k) - 2 = |G| (2 g_Q - 2) + Δ_1 + d_P`. The genus formula is
/// derived from this identity, so any `false` is an implementation
/// fault, not a theory statement.
pub fn rh_consistency(params: &SubgroupParams) -> Result<bool, QuotientError> {
    let (delta1, d_infinity) = different_components(params)?;
    let (gq, _) = quotient_genus(params)?;
    let lhs = BigRational::from_integer(
        BigInt::from(genus(params.p, params.k)) * 2 - 2,
    );
    let order = BigRational::from_integer(BigInt::from(params.group_order()));
    let rhs = order * (gq * BigInt::from(2) - BigRational::from_integer(BigInt::from(2)))
        + BigRational::from_integer(BigInt::from(delta1))
        + BigRational::from_integer(BigInt::from(d_infinity));
    Ok(lhs == rhs)
}

/// Everything the quotient formulas say about one parameter bundle.
#[derive(Debug, Clone, Serialize)]
pub struct QuotientGenusReport {
    pub params: SubgroupParams,
    #[serde(serialize_with = "crate::serial::biguint")]
    pub delta1: BigUint,
    #[serde(serialize_with = "crate::serial::biguint")]
    pub d_infinity: BigUint,
    #[serde(serialize_with = "crate::serial::biguint")]
    pub group_order: BigUint,
    #[serde(serialize_with = "crate::serial::rational")]
    pub genus_quotient: BigRational,
    pub integral: bool,
    pub rh_consistent: bool,
}

pub fn quotient_report(params: &SubgroupParams) -> Result<QuotientGenusReport, QuotientError> {
    let (delta1, d_infinity) = different_components(params)?;
    let (genus_quotient, integral) = quotient_genus(params)?;
    let rh_consistent = rh_consistency(params)?;
    Ok(QuotientGenusReport {
        params: params.clone(),
        delta1,
        d_infinity,
        group_order: params.group_order(),
        genus_quotient,
        integral,
        rh_consistent,
    })
}

/// Minimal extension degree hosting the orbit verification: the scaling
/// generator of order `N = (p^k+1)(p-1)` (its presence already forces
/// the full x = 0 fiber into the field).
pub fn orbit_field_degree(p: u64, k: u32) -> u32 {
    crate::field::min_extension_with_order(p, &crate::autgroup::scaling_order(p, k))
        .expect("N is coprime to p")
}

/// What the orbit verifier observed.
#[derive(Debug, Clone, Serialize)]
pub struct OrbitReport {
    pub s: u64,
    /// Order of the cyclic group generated by the s-th scaling power.
    pub m: u64,
    /// Predicted short-orbit length on the x = 0 fiber.
    pub t: u64,
    pub fiber_size: u64,
    pub origin_fixed: bool,
    pub short_orbit_count: u64,
    pub off_fiber_points_checked: u64,
    pub translate_samples: u64,
}

/// Verify the orbit combinatorics of `C = <scaling^s>` on
/// `B_{k,+1}(ctx)`. `s` must divide `N`; `ctx` must host the scaling
/// generator.
pub fn verify_orbit_structure(
    p: u64,
    k: u32,
    s: u64,
    ctx: &FieldCtx,
    guard: &Guard,
) -> Result<OrbitReport, QuotientError> {
    let n_total = crate::autgroup::scaling_order(p, k);
    if s == 0 || !(&n_total % s).is_zero() {
        return Err(QuotientError::InvalidParams(format!(
            "s={s} must be a positive divisor of {n_total}"
        )));
    }
    let m = (&n_total / s).to_u64().expect("divisor of an enumerable order");
    let t = (p - 1) / num_integer::Integer::gcd(&(p - 1), &s);
    let curve = CurveBk::new(p, k, Sign::Plus)?;
    let gamma = ctx.root_of_unity(&n_total)?;
    let lambda = gamma.pow_u64(s);
    let mu = lambda.pow(curve.exponent());

    // the x = 0 fiber
    let fiber = ctx.solve_additive(&ctx.one(), &ctx.zero())?;
    if fiber.len() as u64 != p {
        return Err(QuotientError::StructureMismatch(format!(
            "x = 0 fiber has {} points, expected p = {p}",
            fiber.len()
        )));
    }

    // (0,0) is in the fiber and fixed (scaling is linear)
    let origin_fixed = fiber.iter().any(|y| y.is_zero());
    if !origin_fixed {
        return Err(QuotientError::StructureMismatch("origin missing from the fiber".into()));
    }

    // the remaining p-1 fiber points fall into (p-1)/t orbits of size t
    let mut seen: Vec<crate::field::FieldElem> = Vec::new();
    let mut orbit_count = 0u64;
    for y in fiber.iter().filter(|y| !y.is_zero()) {
        if seen.contains(y) {
            continue;
        }
        let mut current = y.clone();
        let mut len = 0u64;
        loop {
            seen.push(current.clone());
            current = &mu * &current;
            len += 1;
            if &current == y {
                break;
            }
            if len > m {
                return Err(QuotientError::StructureMismatch(
                    "orbit on the fiber did not close".into(),
                ));
            }
        }
        if len != t {
            return Err(QuotientError::StructureMismatch(format!(
                "fiber orbit of length {len}, predicted t = {t}"
            )));
        }
        orbit_count += 1;
    }
    if orbit_count != (p - 1) / t {
        return Err(QuotientError::StructureMismatch(format!(
            "{orbit_count} fiber orbits, predicted (p-1)/t = {}",
            (p - 1) / t
        )));
    }

    // no affine point with x != 0 lies in a short orbit
    let points = curve.enumerate_points(ctx, guard)?;
    let mut off_fiber = 0u64;
    for pt in &points {
        let CurvePoint::Affine(x, y) = pt else { continue };
        if x.is_zero() {
            continue;
        }
        off_fiber += 1;
        let len = pair_orbit_len(&lambda, &mu, x, y, m);
        if len != m {
            return Err(QuotientError::StructureMismatch(format!(
                "point with x != 0 has orbit length {len} < m = {m}"
            )));
        }
    }

    // sampled p-part translates push the fiber off itself
    let mut samples = 0u64;
    let one = ctx.one();
    let map = ctx.additive_map(&one)?;
    let exp2k = arith::big_pow(p, 2 * k);
    let shear_exp = arith::power_plus_one(p, k);
    'outer: for d in ctx.elements().filter(|d| !d.is_zero()) {
        let dk = d.pow(&exp2k);
        let constraint = if k % 2 == 0 { &dk + &d } else { &dk - &d };
        if !constraint.is_zero() {
            continue;
        }
        for e in map.solutions(&d.pow(&shear_exp)) {
            if !valid_pair(p, k, &d, &e) {
                continue;
            }
            for y in &fiber {
                let image = crate::autgroup::apply_translation(
                    p,
                    k,
                    ctx,
                    &d,
                    &e,
                    &CurvePoint::Affine(ctx.zero(), y.clone()),
                )?;
                match image {
                    CurvePoint::Affine(ix, _) if !ix.is_zero() => {}
                    _ => {
                        return Err(QuotientError::StructureMismatch(
                            "a nontrivial translate kept a fiber point on x = 0".into(),
                        ))
                    }
                }
            }
            samples += 1;
            if samples >= 8 {
                break 'outer;
            }
        }
    }

    Ok(OrbitReport {
        s,
        m,
        t,
        fiber_size: p,
        origin_fixed,
        short_orbit_count: orbit_count,
        off_fiber_points_checked: off_fiber,
        translate_samples: samples,
    })
}

fn pair_orbit_len(
    lambda: &crate::field::FieldElem,
    mu: &crate::field::FieldElem,
    x: &crate::field::FieldElem,
    y: &crate::field::FieldElem,
    cap: u64,
) -> u64 {
    let mut cx = lambda * x;
    let mut cy = mu * y;
    let mut len = 1;
    while (&cx != x || &cy != y) && len <= cap {
        cx = lambda * &cx;
        cy = mu * &cy;
        len += 1;
    }
    len
}

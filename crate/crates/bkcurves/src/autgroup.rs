//! The known automorphism subgroup of `B_k` with `c = +1`, acting on
//! points. Every element fixes the point at infinity and has a unique
//! normal form: a shear-translation `(x, y) ↦ (x + d, y + e + L_d(x))`
//! composed after a scaling `(x, y) ↦ (γ^s x, γ^(s(p^k+1)) y)`, where
//! `γ` has exact order `N = (p^k+1)(p-1)`.
//!
//! The pair `(d, e)` is constrained by `d^(p^(2k)) + (-1)^k d = 0` and
//! `e^p + e = d^(p^k+1)`; the slots ranging over all solutions give the
//! p-part of order `p^(2k+1)`. The `c = -1` model is reached through
//! the sign-flip isomorphism rather than by separate formulas.
//!
//! Actions are verified on rational points instead of symbolically: the
//! defining identities are polynomial, so exhaustive desk-scale checks
//! over a large enough field are decisive.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::curve::{CurveBk, CurveError, CurvePoint, Sign};
use crate::field::{FieldCtx, FieldElem, FieldError};
use crate::guard::{Guard, GuardExceeded};
use crate::{ClassifiedError, ErrorClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AutError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Guard(#[from] GuardExceeded),
    #[error("the pair (d, e) violates the defining constraints: {0}")]
    InvalidParameters(String),
    #[error("the point does not lie on the curve")]
    NotOnSource,
    #[error("the context does not host the requested structure: {0}")]
    CtxTooSmall(String),
    #[error("s must be a positive divisor of (p^k+1)(p-1)")]
    InvalidS,
    #[error("r must satisfy 0 <= r <= 2k")]
    InvalidR,
    #[error("no normal form reproduces the composite action: {0}")]
    NormalFormNotFound(String),
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

impl ClassifiedError for AutError {
    fn class(&self) -> ErrorClass {
        match self {
            AutError::Field(e) => e.class(),
            AutError::Curve(e) => e.class(),
            AutError::Guard(_) => ErrorClass::GuardExceeded,
            AutError::NormalFormNotFound(_) | AutError::Inconsistency(_) => ErrorClass::Inconsistency,
            _ => ErrorClass::InvalidInput,
        }
    }
}

/// Order of the scaling subgroup: `N = (p^k + 1)(p - 1)`.
pub fn scaling_order(p: u64, k: u32) -> BigUint {
    arith::power_plus_one(p, k) * (p - 1)
}

/// An automorphism of `B_{k,+1}` in normal form: the shear-translation
/// for `(d, e)` applied after the `s`-th power of the scaling generator.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Automorphism {
    pub p: u64,
    pub k: u32,
    pub d: FieldElem,
    pub e: FieldElem,
    pub s: u64,
}

/// `L_d(x) = sum_{i<k} (-1)^i d^(p^(k+i)) x^(p^i)` — the shear term in
/// the y-coordinate of the translation part.
pub fn shear_term(p: u64, k: u32, d: &FieldElem, x: &FieldElem) -> FieldElem {
    let ctx = d.ctx();
    let mut acc = ctx.zero();
    for i in 0..k {
        let coeff = d.pow(&arith::big_pow(p, k + i));
        let term = &coeff * &x.pow(&arith::big_pow(p, i));
        if i % 2 == 0 {
            acc = &acc + &term;
        } else {
            acc = &acc - &term;
        }
    }
    acc
}

/// Whether `(d, e)` satisfies `d^(p^(2k)) + (-1)^k d = 0` and
/// `e^p + e = d^(p^k+1)`. The second exponent is what the transform
/// identity for the shear actually forces (expand
/// `(y+e+L_d(x))^p + (y+e+L_d(x)) - (x+d)^(p^k+1)`: the cross terms
/// telescope and leave exactly `e^p + e - d^(p^k+1)`); for `k = 1` it
/// coincides with `d^(p+1)`.
pub fn valid_pair(p: u64, k: u32, d: &FieldElem, e: &FieldElem) -> bool {
    let dk = d.pow(&arith::big_pow(p, 2 * k));
    let first = if k % 2 == 0 { &dk + d } else { &dk - d };
    let second = e.pow_u64(p) + e - d.pow(&arith::power_plus_one(p, k));
    first.is_zero() && second.is_zero()
}

/// Scaling action `(x, y) ↦ (γ^s x, γ^(s(p^k+1)) y)`; infinity is fixed.
pub fn apply_scaling(
    p: u64,
    k: u32,
    ctx: &FieldCtx,
    s: u64,
    pt: &CurvePoint,
) -> Result<CurvePoint, AutError> {
    let curve = CurveBk::new(p, k, Sign::Plus)?;
    if !curve.contains(pt, ctx)? {
        return Err(AutError::NotOnSource);
    }
    let gamma = ctx.root_of_unity(&scaling_order(p, k))?;
    let image = match pt {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Affine(x, y) => {
            let lambda = gamma.pow_u64(s);
            let mu = lambda.pow(curve.exponent());
            CurvePoint::Affine(&lambda * x, &mu * y)
        }
    };
    debug_assert!(curve.contains(&image, ctx).unwrap_or(false));
    Ok(image)
}

/// Shear-translation action
/// `(x, y) ↦ (x + d, y + e + L_d(x))`; infinity is fixed. The `(d, e)`
/// constraints are enforced.
pub fn apply_translation(
    p: u64,
    k: u32,
    ctx: &FieldCtx,
    d: &FieldElem,
    e: &FieldElem,
    pt: &CurvePoint,
) -> Result<CurvePoint, AutError> {
    ctx.ensure_same(d)?;
    ctx.ensure_same(e)?;
    if !valid_pair(p, k, d, e) {
        return Err(AutError::InvalidParameters(format!("d={d}, e={e}")));
    }
    let curve = CurveBk::new(p, k, Sign::Plus)?;
    if !curve.contains(pt, ctx)? {
        return Err(AutError::NotOnSource);
    }
    let image = match pt {
        CurvePoint::Infinity => CurvePoint::Infinity,
        CurvePoint::Affine(x, y) => {
            CurvePoint::Affine(x + d, &(y + e) + &shear_term(p, k, d, x))
        }
    };
    if !curve.contains(&image, ctx)? {
        return Err(AutError::Inconsistency(format!(
            "translation by (d={d}, e={e}) moved {pt} off the curve"
        )));
    }
    Ok(image)
}

impl Automorphism {
    pub fn identity(p: u64, k: u32, ctx: &FieldCtx) -> Automorphism {
        Automorphism { p, k, d: ctx.zero(), e: ctx.zero(), s: 0 }
    }

    pub fn is_identity(&self) -> bool {
        let n = scaling_order(self.p, self.k);
        self.d.is_zero() && self.e.is_zero() && (BigUint::from(self.s) % n).is_zero()
    }

    pub fn ctx(&self) -> &FieldCtx {
        self.d.ctx()
    }

    /// Apply to a rational point of `B_{k,+1}`: scaling first, then the
    /// shear-translation.
    pub fn apply(&self, pt: &CurvePoint) -> Result<CurvePoint, AutError> {
        let ctx = self.ctx();
        let scaled = apply_scaling(self.p, self.k, ctx, self.s, pt)?;
        apply_translation(self.p, self.k, ctx, &self.d, &self.e, &scaled)
    }

    /// Whether the element permutes the rational point set of
    /// `B_{k,+1}(ctx)` (and fixes infinity).
    pub fn preserves_point_set(&self, guard: &Guard) -> Result<bool, AutError> {
        let ctx = self.ctx();
        let curve = CurveBk::new(self.p, self.k, Sign::Plus)?;
        let mut points = curve.enumerate_points(ctx, guard)?;
        if self.apply(&CurvePoint::Infinity)? != CurvePoint::Infinity {
            return Ok(false);
        }
        let mut images = points
            .iter()
            .map(|pt| self.apply(pt))
            .collect::<Result<Vec<_>, _>>()?;
        points.sort();
        images.sort();
        images.dedup();
        Ok(points == images)
    }
}

/// Minimal `n` such that `F_{p^n}` hosts the whole group: an element of
/// order `N = (p^k+1)(p-1)`, all `p^(2k)` admissible `d`, and for each
/// of them the full fiber of `e`-solutions. Ascending search; the first
/// two conditions are pure order arithmetic, the third is checked by
/// the linear solver in the candidate field.
pub fn field_of_definition(p: u64, k: u32, guard: &Guard) -> Result<u32, AutError> {
    let n_order = scaling_order(p, k);
    // all d-solutions lie in F_{p^n} iff (k odd) 2k | n,
    // or (k even) 2(p^(2k)-1) | p^n - 1
    let d_order = if k % 2 == 0 {
        Some((arith::big_pow(p, 2 * k) - 1u8) * 2u8)
    } else {
        None
    };
    for n in 1.. {
        let q1 = arith::big_pow(p, n) - 1u8;
        if !(&q1 % &n_order).is_zero() {
            continue;
        }
        match &d_order {
            Some(m) => {
                if !(&q1 % m).is_zero() {
                    continue;
                }
            }
            None => {
                if n % (2 * k) != 0 {
                    continue;
                }
            }
        }
        guard.check(p, n)?;
        let ctx = FieldCtx::get(p, n)?;
        if p_part_complete(p, k, &ctx)? {
            return Ok(n);
        }
    }
    unreachable!()
}

fn p_part_complete(p: u64, k: u32, ctx: &FieldCtx) -> Result<bool, AutError> {
    let map = ctx.additive_map(&ctx.one())?;
    if map.kernel_dim() != 1 {
        return Ok(false);
    }
    let ds = admissible_d(p, k, ctx);
    if BigUint::from(ds.len()) != arith::big_pow(p, 2 * k) {
        return Ok(false);
    }
    let exp = arith::power_plus_one(p, k);
    Ok(ds.iter().all(|d| map.image_contains(&d.pow(&exp))))
}

/// All `d` in `ctx` with `d^(p^(2k)) + (-1)^k d = 0`, in lex order.
fn admissible_d(p: u64, k: u32, ctx: &FieldCtx) -> Vec<FieldElem> {
    let exp = arith::big_pow(p, 2 * k);
    ctx.elements()
        .filter(|d| {
            let dk = d.pow(&exp);
            let lhs = if k % 2 == 0 { &dk + d } else { &dk - d };
            lhs.is_zero()
        })
        .collect()
}

/// All `(d, e)` pairs over `ctx`: the p-part, of order `p^(2k+1)`.
/// The count is asserted; a context below the field of definition is
/// rejected.
pub fn enumerate_p_part(p: u64, k: u32, ctx: &FieldCtx) -> Result<Vec<(FieldElem, FieldElem)>, AutError> {
    let map = ctx.additive_map(&ctx.one())?;
    let exp = arith::power_plus_one(p, k);
    let mut pairs = Vec::new();
    for d in admissible_d(p, k, ctx) {
        for e in map.solutions(&d.pow(&exp)) {
            pairs.push((d.clone(), e));
        }
    }
    let expected = arith::big_pow(p, 2 * k + 1);
    if BigUint::from(pairs.len()) != expected {
        return Err(AutError::CtxTooSmall(format!(
            "found {} pairs, the full p-part has {expected}",
            pairs.len()
        )));
    }
    Ok(pairs)
}

/// The translation subgroup: the `p` elements with `d = 0`,
/// `e^p + e = 0`. The quotient of the curve by this subgroup is
/// rational, which is what makes it special in the quotient analysis.
pub fn translations(p: u64, k: u32, ctx: &FieldCtx) -> Result<Vec<Automorphism>, AutError> {
    let sols = ctx.solve_additive(&ctx.one(), &ctx.zero())?;
    if sols.len() as u64 != p {
        return Err(AutError::CtxTooSmall(format!(
            "only {} translations live in this context, expected {p}",
            sols.len()
        )));
    }
    Ok(sols
        .into_iter()
        .map(|e| Automorphism { p, k, d: ctx.zero(), e, s: 0 })
        .collect())
}

/// The full known group over `ctx`: every `(d, e)` pair combined with
/// every power of the scaling generator; `p^(2k+1) · N` elements.
pub fn enumerate_full_group(p: u64, k: u32, ctx: &FieldCtx) -> Result<Vec<Automorphism>, AutError> {
    let n = scaling_order(p, k)
        .to_u64()
        .ok_or_else(|| AutError::CtxTooSmall("scaling order exceeds u64".into()))?;
    // the scaling generator must exist in ctx
    ctx.root_of_unity(&BigUint::from(n))?;
    let pairs = enumerate_p_part(p, k, ctx)?;
    let mut group = Vec::with_capacity(pairs.len() * n as usize);
    for s in 0..n {
        for (d, e) in &pairs {
            group.push(Automorphism { p, k, d: d.clone(), e: e.clone(), s });
        }
    }
    Ok(group)
}

/// Normal form of `a1 ∘ a2` (apply `a2` first), derived numerically:
/// act on two points with distinct x to solve for the scaling and the
/// translation data, then verify the form on every rational point of
/// the curve. Failure to verify contradicts the unique-decomposition
/// structure and is reported as fatal.
pub fn compose(a1: &Automorphism, a2: &Automorphism, guard: &Guard) -> Result<Automorphism, AutError> {
    if a1.p != a2.p || a1.k != a2.k || a1.ctx() != a2.ctx() {
        return Err(AutError::InvalidParameters("mismatched automorphism contexts".into()));
    }
    let (p, k) = (a1.p, a1.k);
    let ctx = a1.ctx().clone();
    let curve = CurveBk::new(p, k, Sign::Plus)?;
    let points = curve.enumerate_points(&ctx, guard)?;
    let composite = |pt: &CurvePoint| -> Result<CurvePoint, AutError> { a1.apply(&a2.apply(pt)?) };

    // two affine points with distinct x pin down the scaling and shift
    let mut sample: Vec<(FieldElem, FieldElem)> = Vec::new();
    for pt in &points {
        if let CurvePoint::Affine(x, y) = pt {
            if !sample.iter().any(|(sx, _)| sx == x) {
                sample.push((x.clone(), y.clone()));
            }
            if sample.len() == 2 {
                break;
            }
        }
    }
    if sample.len() < 2 {
        return Err(AutError::CtxTooSmall("need two affine points with distinct x".into()));
    }
    let (x1, y1) = &sample[0];
    let (x2, _) = &sample[1];
    let img1 = composite(&CurvePoint::Affine(x1.clone(), y1.clone()))?;
    let img2 = composite(&CurvePoint::Affine(sample[1].0.clone(), sample[1].1.clone()))?;
    let (cx1, cy1) = match &img1 {
        CurvePoint::Affine(x, y) => (x, y),
        CurvePoint::Infinity => return Err(AutError::Inconsistency("affine point sent to infinity".into())),
    };
    let cx2 = match &img2 {
        CurvePoint::Affine(x, _) => x,
        CurvePoint::Infinity => return Err(AutError::Inconsistency("affine point sent to infinity".into())),
    };
    let lambda = &(cx1 - cx2) * &(x1 - x2).inv().expect("distinct x");
    let d = cx1 - &(&lambda * x1);

    let n = scaling_order(p, k)
        .to_u64()
        .ok_or_else(|| AutError::CtxTooSmall("scaling order exceeds u64".into()))?;
    let gamma = ctx.root_of_unity(&BigUint::from(n))?;
    let mut s = None;
    let mut power = ctx.one();
    for cand in 0..n {
        if power == lambda {
            s = Some(cand);
            break;
        }
        power = &power * &gamma;
    }
    let Some(s) = s else {
        return Err(AutError::NormalFormNotFound(
            "composite scaling is not a power of the generator".into(),
        ));
    };
    let mu = lambda.pow(curve.exponent());
    let e = &(cy1 - &(&mu * y1)) - &shear_term(p, k, &d, &(&lambda * x1));

    if !valid_pair(p, k, &d, &e) {
        return Err(AutError::NormalFormNotFound(format!(
            "recovered pair (d={d}, e={e}) violates the constraints"
        )));
    }
    let result = Automorphism { p, k, d, e, s };
    for pt in &points {
        if composite(pt)? != result.apply(pt)? {
            return Err(AutError::NormalFormNotFound(format!(
                "normal form disagrees with the composite at {pt}"
            )));
        }
    }
    Ok(result)
}

// ---------------------------------------------------------------------------
// subgroup parameters for the quotient analysis
// ---------------------------------------------------------------------------

/// Parameter bundle of a candidate subgroup `G = U ⋊ C`: `C` is the
/// cyclic group generated by the `s`-th power of the scaling generator
/// (order `m = N/s`), `U` is a p-subgroup of order `p^r` meeting the
/// translations trivially, and `t` is the order of the induced scaling
/// on the y-coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SubgroupParams {
    pub p: u64,
    pub k: u32,
    /// `N = (p^k+1)(p-1)`, the order of the full scaling group.
    #[serde(serialize_with = "crate::serial::biguint")]
    pub n_total: BigUint,
    /// Index of the cyclic part: `C = <generator^s>`.
    #[serde(serialize_with = "crate::serial::biguint")]
    pub s: BigUint,
    /// `|C| = N / s`.
    #[serde(serialize_with = "crate::serial::biguint")]
    pub m: BigUint,
    /// Order of the y-scaling: `t = (p-1)/gcd(s, p-1)`; divides both
    /// `p-1` and `m`.
    pub t: u64,
    /// `|U| = p^r`, `0 <= r <= 2k`.
    pub r: u32,
}

impl SubgroupParams {
    /// From a divisor `s | N` and a p-part exponent `r`.
    pub fn from_generator_index(p: u64, k: u32, s: &BigUint, r: u32) -> Result<Self, AutError> {
        let n_total = scaling_order(p, k);
        if s.is_zero() || !(&n_total % s).is_zero() {
            return Err(AutError::InvalidS);
        }
        if r > 2 * k {
            return Err(AutError::InvalidR);
        }
        let m = &n_total / s;
        let s_mod = (s % (p - 1)).to_u64().expect("residue fits");
        let t = (p - 1) / (p - 1).gcd(&s_mod);
        Ok(SubgroupParams { p, k, n_total, s: s.clone(), m, t, r })
    }

    /// From raw `(m, t, r)`, for parameter sweeps where no subgroup is
    /// exhibited; `m` must divide `N`, `t` must divide both `p-1` and
    /// `m`, and `r <= 2k`.
    pub fn from_parts(p: u64, k: u32, m: &BigUint, t: u64, r: u32) -> Result<Self, AutError> {
        let n_total = scaling_order(p, k);
        if m.is_zero() || !(&n_total % m).is_zero() {
            return Err(AutError::InvalidS);
        }
        if r > 2 * k {
            return Err(AutError::InvalidR);
        }
        if t == 0 || (p - 1) % t != 0 || !(m % t).is_zero() {
            return Err(AutError::InvalidParameters(format!(
                "t={t} must divide p-1={} and m={m}",
                p - 1
            )));
        }
        let s = &n_total / m;
        Ok(SubgroupParams { p, k, n_total, s, m: m.clone(), t, r })
    }

    /// `|G| = m · p^r`.
    pub fn group_order(&self) -> BigUint {
        &self.m * arith::big_pow(self.p, self.r)
    }
}

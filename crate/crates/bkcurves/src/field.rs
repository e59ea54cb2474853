//! Extension fields `F_{p^n}` for odd `p`, with exact element arithmetic.
//!
//! Every context is canonical: the defining modulus is the
//! lexicographically smallest monic irreducible polynomial of degree `n`
//! over `F_p` (coefficients compared low-degree-first), so two contexts
//! with equal `(p, n)` are interchangeable bit for bit. Contexts are
//! cached process-wide and shared behind an `Arc`.
//!
//! Besides the four field operations the module provides the pieces the
//! curve machinery needs: multiplicative orders, deterministic roots of
//! unity, the least extension containing a given root of unity, and a
//! linear solver for the additive map `y ↦ y^p + c·y` (an `F_p`-linear
//! endomorphism; its kernel and image are computed once per `(ctx, c)`
//! and cached).

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock, RwLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::arith;
use crate::{ClassifiedError, ErrorClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("characteristic {0} must be odd")]
    NotOdd(u64),
    #[error("extension degree must be at least 1")]
    BadDegree,
    #[error("elements belong to different field contexts")]
    CtxMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("the zero element has no multiplicative order")]
    ZeroElement,
    #[error("no element of order {ord} in this field (it does not divide p^n - 1)")]
    OrderNotAvailable { ord: BigUint },
    #[error("arguments are not coprime")]
    NotCoprime,
    #[error("the additive-map coefficient must be nonzero")]
    ZeroCoefficient,
    #[error("coefficient must lie in the prime subfield")]
    NotInPrimeSubfield,
    #[error("coefficient vector does not match the field degree")]
    BadElement,
    #[error("field too large for order computations (p^n - 1 exceeds 128 bits)")]
    FieldTooLarge,
}

impl ClassifiedError for FieldError {
    fn class(&self) -> ErrorClass {
        match self {
            FieldError::FieldTooLarge => ErrorClass::GuardExceeded,
            _ => ErrorClass::InvalidInput,
        }
    }
}

// ---------------------------------------------------------------------------
// polynomial arithmetic over F_p on raw coefficient vectors (low-to-high)
// ---------------------------------------------------------------------------

fn inv_mod_p(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p
    arith::powmod(a as u128, (p - 2) as u128, p as u128) as u64
}

fn poly_trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

/// Reduce `a` modulo the monic polynomial `m`, returning exactly
/// `deg(m)` coefficients.
fn poly_mod(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    let dm = m.len() - 1;
    poly_trim(&mut a);
    while a.len() > dm {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - dm;
        if lead != 0 {
            for (i, &mc) in m.iter().enumerate() {
                let idx = shift + i;
                a[idx] = (a[idx] + (p - mc % p) % p * lead) % p;
            }
        }
        a.pop();
        poly_trim(&mut a);
    }
    a.resize(dm, 0);
    a
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_mod(prod, m, p)
}

fn poly_pow_bits(base: &[u64], exp: &BigUint, m: &[u64], p: u64) -> Vec<u64> {
    let n = m.len() - 1;
    let mut one = vec![0u64; n];
    one[0] = 1;
    if exp.is_zero() {
        return one;
    }
    let mut acc = one;
    for i in (0..exp.bits()).rev() {
        acc = poly_mulmod(&acc, &acc, m, p);
        if exp.bit(i) {
            acc = poly_mulmod(&acc, base, m, p);
        }
    }
    acc
}

/// Remainder of `a` by `b` (b nonzero), both trimmed.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let mut bb = b.to_vec();
    poly_trim(&mut bb);
    let binv = inv_mod_p(*bb.last().unwrap(), p);
    while r.len() >= bb.len() && !r.is_empty() {
        let c = (*r.last().unwrap() * binv) % p;
        let shift = r.len() - bb.len();
        for (i, &bc) in bb.iter().enumerate() {
            r[shift + i] = (r[shift + i] + (p - bc % p) % p * c) % p;
        }
        poly_trim(&mut r);
        if r.len() < bb.len() {
            break;
        }
    }
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    poly_trim(&mut a);
    poly_trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Inverse of `a` modulo the irreducible monic `m`, by extended Euclid.
fn poly_invmod(a: &[u64], m: &[u64], p: u64) -> Option<Vec<u64>> {
    let n = m.len() - 1;
    let mut r0 = m.to_vec();
    let mut r1 = a.to_vec();
    poly_trim(&mut r0);
    poly_trim(&mut r1);
    if r1.is_empty() {
        return None;
    }
    let mut t0: Vec<u64> = vec![];
    let mut t1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        // quotient of r0 by r1
        let mut q = vec![0u64; r0.len().saturating_sub(r1.len()) + 1];
        let mut rem = r0.clone();
        let linv = inv_mod_p(*r1.last().unwrap(), p);
        while rem.len() >= r1.len() && !rem.is_empty() {
            let c = (*rem.last().unwrap() * linv) % p;
            let shift = rem.len() - r1.len();
            q[shift] = c;
            for (i, &bc) in r1.iter().enumerate() {
                rem[shift + i] = (rem[shift + i] + (p - bc % p) % p * c) % p;
            }
            poly_trim(&mut rem);
        }
        // t2 = t0 - q*t1
        let mut qt = vec![0u64; q.len() + t1.len()];
        for (i, &qc) in q.iter().enumerate() {
            if qc == 0 {
                continue;
            }
            for (j, &tc) in t1.iter().enumerate() {
                qt[i + j] = (qt[i + j] + qc * tc) % p;
            }
        }
        let len = t0.len().max(qt.len());
        let mut t2 = vec![0u64; len];
        for (i, slot) in t2.iter_mut().enumerate() {
            let a = t0.get(i).copied().unwrap_or(0);
            let b = qt.get(i).copied().unwrap_or(0);
            *slot = (a + p - b % p) % p;
        }
        poly_trim(&mut t2);
        r0 = r1;
        r1 = rem;
        t0 = t1;
        t1 = t2;
    }
    // r0 is the gcd; must be a nonzero constant since m is irreducible
    if r0.len() != 1 {
        return None;
    }
    let scale = inv_mod_p(r0[0], p);
    let mut out: Vec<u64> = t0.iter().map(|&c| c * scale % p).collect();
    out.resize(n, 0);
    Some(out)
}

/// Irreducibility over `F_p` of the monic polynomial `m`:
/// `x^(p^n) ≡ x (mod m)` together with `gcd(x^(p^(n/q)) - x, m) = 1`
/// for every prime `q | n`.
fn is_irreducible(m: &[u64], p: u64) -> bool {
    let n = m.len() - 1;
    if n == 1 {
        return true;
    }
    let mut x = vec![0u64; n];
    x[1] = 1;
    let xq = poly_pow_bits(&x, &BigUint::from(p).pow(n as u32), m, p);
    if xq != x {
        return false;
    }
    for (q, _) in arith::factor(n as u128) {
        let d = n as u32 / q as u32;
        let xd = poly_pow_bits(&x, &BigUint::from(p).pow(d), m, p);
        let diff: Vec<u64> = xd.iter().zip(&x).map(|(&a, &b)| (a + p - b) % p).collect();
        let g = poly_gcd(&diff, m, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

/// The lexicographically smallest monic irreducible of degree `n`,
/// low-degree coefficients compared first.
fn canonical_modulus(p: u64, n: u32) -> Vec<u64> {
    let n = n as usize;
    if n == 1 {
        return vec![0, 1];
    }
    let mut tail = vec![0u64; n];
    loop {
        let mut m = tail.clone();
        m.push(1);
        if is_irreducible(&m, p) {
            return m;
        }
        // lex increment: last coefficient is least significant
        let mut i = n;
        loop {
            assert!(i > 0, "no irreducible polynomial found, which cannot happen");
            i -= 1;
            tail[i] += 1;
            if tail[i] < p {
                break;
            }
            tail[i] = 0;
        }
    }
}

// ---------------------------------------------------------------------------
// FieldCtx
// ---------------------------------------------------------------------------

struct Inner {
    p: u64,
    n: u32,
    modulus: Vec<u64>,
    size: BigUint,
    group_order: BigUint,
    generator: OnceLock<Result<Vec<u64>, FieldError>>,
    group_factors: OnceLock<Result<Vec<(u128, u32)>, FieldError>>,
    solvers: RwLock<HashMap<u64, Arc<AdditiveMap>>>,
}

/// A finite field `F_{p^n}` with its canonical defining modulus.
#[derive(Clone)]
pub struct FieldCtx(Arc<Inner>);

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldCtx(F_{}^{})", self.0.p, self.0.n)
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.0.p == other.0.p && self.0.n == other.0.n
    }
}
impl Eq for FieldCtx {}

static REGISTRY: OnceLock<Mutex<HashMap<(u64, u32), FieldCtx>>> = OnceLock::new();

impl FieldCtx {
    /// The canonical `F_{p^n}`. Contexts are cached process-wide.
    pub fn get(p: u64, n: u32) -> Result<FieldCtx, FieldError> {
        if p % 2 == 0 {
            return Err(FieldError::NotOdd(p));
        }
        if !arith::is_prime(p as u128) {
            return Err(FieldError::NotPrime(p));
        }
        if n == 0 {
            return Err(FieldError::BadDegree);
        }
        let registry = REGISTRY.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = registry.lock().unwrap();
        if let Some(ctx) = map.get(&(p, n)) {
            return Ok(ctx.clone());
        }
        let modulus = canonical_modulus(p, n);
        debug_assert!(is_irreducible(&modulus, p));
        let size = BigUint::from(p).pow(n);
        let ctx = FieldCtx(Arc::new(Inner {
            p,
            n,
            modulus,
            group_order: &size - 1u8,
            size,
            generator: OnceLock::new(),
            group_factors: OnceLock::new(),
            solvers: RwLock::new(HashMap::new()),
        }));
        map.insert((p, n), ctx.clone());
        Ok(ctx)
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> u32 {
        self.0.n
    }

    /// Number of elements, `p^n`.
    pub fn size(&self) -> &BigUint {
        &self.0.size
    }

    pub fn size_u128(&self) -> Option<u128> {
        arith::to_u128(&self.0.size)
    }

    /// Order of the multiplicative group, `p^n - 1`.
    pub fn group_order(&self) -> &BigUint {
        &self.0.group_order
    }

    /// The defining modulus, low-degree coefficients first, monic.
    pub fn modulus(&self) -> &[u64] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem { ctx: self.clone(), coeffs: vec![0; self.0.n as usize] }
    }

    pub fn one(&self) -> FieldElem {
        self.from_residue(1)
    }

    pub fn neg_one(&self) -> FieldElem {
        self.from_residue(self.0.p - 1)
    }

    /// Embed a residue of the prime subfield.
    pub fn from_residue(&self, r: u64) -> FieldElem {
        let mut coeffs = vec![0; self.0.n as usize];
        coeffs[0] = r % self.0.p;
        FieldElem { ctx: self.clone(), coeffs }
    }

    /// Embed a signed integer constant (e.g. `-1`).
    pub fn from_int(&self, v: i64) -> FieldElem {
        let p = self.0.p as i64;
        self.from_residue(v.rem_euclid(p) as u64)
    }

    /// Build an element from exactly `n` coefficients (each reduced mod `p`).
    pub fn elem(&self, coeffs: &[u64]) -> Result<FieldElem, FieldError> {
        if coeffs.len() != self.0.n as usize {
            return Err(FieldError::BadElement);
        }
        Ok(FieldElem {
            ctx: self.clone(),
            coeffs: coeffs.iter().map(|&c| c % self.0.p).collect(),
        })
    }

    /// Element at position `idx` in coefficient-lexicographic order
    /// (the constant coefficient varies slowest).
    pub fn elem_at_lex(&self, idx: u128) -> FieldElem {
        let p = self.0.p as u128;
        let n = self.0.n as usize;
        let mut coeffs = vec![0u64; n];
        let mut rest = idx;
        for slot in coeffs.iter_mut().rev() {
            *slot = (rest % p) as u64;
            rest /= p;
        }
        assert_eq!(rest, 0, "element index out of range");
        FieldElem { ctx: self.clone(), coeffs }
    }

    /// All elements in coefficient-lexicographic order. The field size
    /// must fit in a `u128`; enumerative callers are expected to guard.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> + '_ {
        let q = self.size_u128().expect("field too large to enumerate");
        (0..q).map(move |i| self.elem_at_lex(i))
    }

    fn group_factors(&self) -> Result<&[(u128, u32)], FieldError> {
        self.0
            .group_factors
            .get_or_init(|| match arith::to_u128(&self.0.group_order) {
                Some(m) => Ok(arith::factor(m)),
                None => Err(FieldError::FieldTooLarge),
            })
            .as_deref()
            .map_err(Clone::clone)
    }

    /// The first element in coefficient-lexicographic order that
    /// generates the multiplicative group.
    pub fn generator(&self) -> Result<FieldElem, FieldError> {
        let coeffs = self
            .0
            .generator
            .get_or_init(|| {
                let factors = self.group_factors()?.to_vec();
                let order = &self.0.group_order;
                let q = self.size_u128().ok_or(FieldError::FieldTooLarge)?;
                for idx in 1..q {
                    let candidate = self.elem_at_lex(idx);
                    let primitive = factors.iter().all(|&(f, _)| {
                        let e = order / BigUint::from(f);
                        !candidate.pow(&e).is_one()
                    });
                    if primitive {
                        return Ok(candidate.coeffs);
                    }
                }
                unreachable!("every finite field has a primitive element")
            })
            .clone()?;
        Ok(FieldElem { ctx: self.clone(), coeffs })
    }

    /// A deterministic element of exact multiplicative order `ord`:
    /// the canonical generator raised to `(p^n - 1)/ord`.
    pub fn root_of_unity(&self, ord: &BigUint) -> Result<FieldElem, FieldError> {
        if ord.is_zero() || !(&self.0.group_order % ord).is_zero() {
            return Err(FieldError::OrderNotAvailable { ord: ord.clone() });
        }
        let g = self.generator()?;
        Ok(g.pow(&(&self.0.group_order / ord)))
    }

    /// Cached linear solver for `y ↦ y^p + c·y`; `c` must be a nonzero
    /// element of the prime subfield.
    pub fn additive_map(&self, c: &FieldElem) -> Result<Arc<AdditiveMap>, FieldError> {
        self.ensure_same(c)?;
        if c.coeffs[1..].iter().any(|&x| x != 0) {
            return Err(FieldError::NotInPrimeSubfield);
        }
        let c0 = c.coeffs[0];
        if c0 == 0 {
            return Err(FieldError::ZeroCoefficient);
        }
        if let Some(solver) = self.0.solvers.read().unwrap().get(&c0) {
            return Ok(solver.clone());
        }
        let solver = Arc::new(AdditiveMap::build(self, c0));
        self.0.solvers.write().unwrap().insert(c0, solver.clone());
        Ok(solver)
    }

    /// All `y` with `y^p + c·y = u`, sorted; empty when `u` is not in
    /// the image of the map.
    pub fn solve_additive(&self, c: &FieldElem, u: &FieldElem) -> Result<Vec<FieldElem>, FieldError> {
        self.ensure_same(u)?;
        Ok(self.additive_map(c)?.solutions(u))
    }

    /// `Err(CtxMismatch)` unless `e` belongs to this context.
    pub fn ensure_same(&self, e: &FieldElem) -> Result<(), FieldError> {
        if e.ctx == *self {
            Ok(())
        } else {
            Err(FieldError::CtxMismatch)
        }
    }
}

/// Least `n` such that `F_{p^n}` contains an element of multiplicative
/// order `ord`, i.e. the multiplicative order of `p` modulo `ord`.
pub fn min_extension_with_order(p: u64, ord: &BigUint) -> Result<u32, FieldError> {
    if ord.is_zero() {
        return Err(FieldError::NotCoprime);
    }
    if !(ord % p).is_zero() || ord.is_one() {
        Ok(arith::multiplicative_order_of_base(p, ord))
    } else {
        Err(FieldError::NotCoprime)
    }
}

// ---------------------------------------------------------------------------
// FieldElem
// ---------------------------------------------------------------------------

/// An element of a [`FieldCtx`], stored as `n` residues mod `p`
/// (coefficients of the residue polynomial, low degree first).
#[derive(Clone)]
pub struct FieldElem {
    ctx: FieldCtx,
    coeffs: Vec<u64>,
}

impl FieldElem {
    pub fn ctx(&self) -> &FieldCtx {
        &self.ctx
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// True when the element lies in the prime subfield.
    pub fn in_prime_subfield(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn assert_same(&self, other: &FieldElem) {
        assert!(
            self.ctx == other.ctx,
            "field context mismatch: F_{}^{} vs F_{}^{}",
            self.ctx.0.p,
            self.ctx.0.n,
            other.ctx.0.p,
            other.ctx.0.n
        );
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<FieldElem, FieldError> {
        let inv = poly_invmod(&self.coeffs, &self.ctx.0.modulus, self.ctx.0.p)
            .ok_or(FieldError::DivisionByZero)?;
        Ok(FieldElem { ctx: self.ctx.clone(), coeffs: inv })
    }

    /// `self^exp` for an arbitrary-precision exponent. For nonzero
    /// bases the exponent is reduced modulo `p^n - 1` first, so
    /// parameter-sized exponents such as `p^k + 1` cost nothing extra.
    pub fn pow(&self, exp: &BigUint) -> FieldElem {
        if exp.is_zero() {
            return self.ctx.one();
        }
        if self.is_zero() {
            return self.ctx.zero();
        }
        let reduced = exp % &self.ctx.0.group_order;
        if reduced.is_zero() {
            return self.ctx.one();
        }
        let coeffs = poly_pow_bits(&self.coeffs, &reduced, &self.ctx.0.modulus, self.ctx.0.p);
        FieldElem { ctx: self.ctx.clone(), coeffs }
    }

    pub fn pow_u64(&self, exp: u64) -> FieldElem {
        self.pow(&BigUint::from(exp))
    }

    /// The Frobenius `self^p`.
    pub fn frobenius(&self) -> FieldElem {
        self.pow_u64(self.ctx.0.p)
    }

    /// Least `e >= 1` with `self^e = 1`; divides `p^n - 1`.
    pub fn multiplicative_order(&self) -> Result<BigUint, FieldError> {
        if self.is_zero() {
            return Err(FieldError::ZeroElement);
        }
        let factors = self.ctx.group_factors()?.to_vec();
        let mut ord = self.ctx.0.group_order.clone();
        for (f, e) in factors {
            let f = BigUint::from(f);
            for _ in 0..e {
                let candidate = &ord / &f;
                if (&ord % &f).is_zero() && self.pow(&candidate).is_one() {
                    ord = candidate;
                } else {
                    break;
                }
            }
        }
        Ok(ord)
    }

    /// Position in coefficient-lexicographic order.
    pub fn lex_index(&self) -> u128 {
        let p = self.ctx.0.p as u128;
        self.coeffs.iter().fold(0u128, |acc, &c| acc * p + c as u128)
    }
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        self.ctx == other.ctx && self.coeffs == other.coeffs
    }
}
impl Eq for FieldElem {}

impl Hash for FieldElem {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.ctx.0.p.hash(state);
        self.ctx.0.n.hash(state);
        self.coeffs.hash(state);
    }
}

impl PartialOrd for FieldElem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FieldElem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.ctx.0.p, self.ctx.0.n, &self.coeffs).cmp(&(other.ctx.0.p, other.ctx.0.n, &other.coeffs))
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coeffs)
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl serde::Serialize for FieldElem {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.coeffs.serialize(serializer)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $body:expr) => {
        impl $trait for &FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                self.assert_same(rhs);
                let p = self.ctx.0.p;
                #[allow(clippy::redundant_closure_call)]
                let coeffs = $body(self, rhs, p);
                FieldElem { ctx: self.ctx.clone(), coeffs }
            }
        }
        impl $trait for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                $trait::$method(&self, &rhs)
            }
        }
        impl $trait<&FieldElem> for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &FieldElem) -> FieldElem {
                $trait::$method(&self, rhs)
            }
        }
    };
}

binop!(Add, add, |a: &FieldElem, b: &FieldElem, p: u64| {
    a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + y) % p).collect::<Vec<_>>()
});

binop!(Sub, sub, |a: &FieldElem, b: &FieldElem, p: u64| {
    a.coeffs.iter().zip(&b.coeffs).map(|(&x, &y)| (x + p - y) % p).collect::<Vec<_>>()
});

binop!(Mul, mul, |a: &FieldElem, b: &FieldElem, p: u64| {
    poly_mulmod(&a.coeffs, &b.coeffs, &a.ctx.0.modulus, p)
});

impl Neg for &FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        let p = self.ctx.0.p;
        FieldElem {
            ctx: self.ctx.clone(),
            coeffs: self.coeffs.iter().map(|&c| (p - c) % p).collect(),
        }
    }
}
impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        -&self
    }
}

// ---------------------------------------------------------------------------
// The additive map y ↦ y^p + c·y
// ---------------------------------------------------------------------------

/// Precomputed solver for `y ↦ y^p + c·y` on a fixed context. The map
/// is `F_p`-linear, so solving reduces to one Gaussian elimination per
/// `(ctx, c)`; each fiber is then either empty or a coset of the kernel
/// of size `p^dim`.
#[derive(Debug)]
pub struct AdditiveMap {
    p: u64,
    n: usize,
    rank: usize,
    /// Row operations applied to the identity (left inverse bookkeeping).
    transform: Vec<Vec<u64>>,
    /// Pivot column of each of the first `rank` rows.
    pivot_cols: Vec<usize>,
    /// Kernel basis as coefficient vectors.
    kernel: Vec<Vec<u64>>,
    ctx: FieldCtx,
}

impl AdditiveMap {
    fn build(ctx: &FieldCtx, c0: u64) -> AdditiveMap {
        let p = ctx.0.p;
        let n = ctx.0.n as usize;
        // columns: image of each basis monomial X^j
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut basis = vec![0u64; n];
            basis[j] = 1;
            let frob = poly_pow_bits(&basis, &BigUint::from(p), &ctx.0.modulus, p);
            let col: Vec<u64> = frob.iter().zip(&basis).map(|(&f, &b)| (f + c0 * b) % p).collect();
            cols.push(col);
        }
        // row-major matrix
        let mut m: Vec<Vec<u64>> = (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect();
        let mut t: Vec<Vec<u64>> = (0..n)
            .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
            .collect();
        // Gauss-Jordan to RREF
        let mut pivot_cols = Vec::new();
        let mut row = 0usize;
        for col in 0..n {
            let Some(src) = (row..n).find(|&r| m[r][col] != 0) else { continue };
            m.swap(row, src);
            t.swap(row, src);
            let inv = inv_mod_p(m[row][col], p);
            for j in 0..n {
                m[row][j] = m[row][j] * inv % p;
                t[row][j] = t[row][j] * inv % p;
            }
            for r in 0..n {
                if r != row && m[r][col] != 0 {
                    let factor = m[r][col];
                    for j in 0..n {
                        m[r][j] = (m[r][j] + (p - factor) * m[row][j]) % p;
                        t[r][j] = (t[r][j] + (p - factor) * t[row][j]) % p;
                    }
                }
            }
            pivot_cols.push(col);
            row += 1;
            if row == n {
                break;
            }
        }
        let rank = row;
        // kernel basis: one vector per free column
        let mut kernel = Vec::new();
        for free in 0..n {
            if pivot_cols.contains(&free) {
                continue;
            }
            let mut v = vec![0u64; n];
            v[free] = 1;
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = (p - m[r][free] % p) % p;
            }
            kernel.push(v);
        }
        kernel.sort_unstable();
        AdditiveMap { p, n, rank, transform: t, pivot_cols, kernel, ctx: ctx.clone() }
    }

    pub fn kernel_dim(&self) -> usize {
        self.n - self.rank
    }

    fn transformed(&self, u: &FieldElem) -> Vec<u64> {
        (0..self.n)
            .map(|r| {
                self.transform[r]
                    .iter()
                    .zip(u.coeffs())
                    .fold(0u64, |acc, (&t, &c)| (acc + t * c) % self.p)
            })
            .collect()
    }

    /// Whether `u` lies in the image of the map.
    pub fn image_contains(&self, u: &FieldElem) -> bool {
        let v = self.transformed(u);
        v[self.rank..].iter().all(|&x| x == 0)
    }

    /// Number of preimages of `u`: zero or `p^kernel_dim`.
    pub fn preimage_count(&self, u: &FieldElem) -> u64 {
        if self.image_contains(u) {
            self.p.pow(self.kernel_dim() as u32)
        } else {
            0
        }
    }

    /// All solutions of `y^p + c·y = u`, sorted.
    pub fn solutions(&self, u: &FieldElem) -> Vec<FieldElem> {
        let v = self.transformed(u);
        if v[self.rank..].iter().any(|&x| x != 0) {
            return Vec::new();
        }
        let mut particular = vec![0u64; self.n];
        for (r, &pc) in self.pivot_cols.iter().enumerate() {
            particular[pc] = v[r];
        }
        let dim = self.kernel_dim();
        let count = self.p.pow(dim as u32);
        let mut out = Vec::with_capacity(count as usize);
        for mut idx in 0..count {
            let mut y = particular.clone();
            for basis in &self.kernel {
                let scale = idx % self.p;
                idx /= self.p;
                if scale != 0 {
                    for (yi, &bi) in y.iter_mut().zip(basis) {
                        *yi = (*yi + scale * bi) % self.p;
                    }
                }
            }
            out.push(FieldElem { ctx: self.ctx.clone(), coeffs: y });
        }
        out.sort_unstable();
        out
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    fn f(p: u64, n: u32) -> FieldCtx {
        FieldCtx::get(p, n).unwrap()
    }

    #[test]
    fn construction_guards() {
        assert_eq!(FieldCtx::get(2, 1).unwrap_err(), FieldError::NotOdd(2));
        assert_eq!(FieldCtx::get(9, 1).unwrap_err(), FieldError::NotPrime(9));
        assert_eq!(FieldCtx::get(3, 0).unwrap_err(), FieldError::BadDegree);
        assert_eq!(f(3, 1).modulus(), &[0, 1]);
    }

    #[test]
    fn canonical_moduli_match_independent_search() {
        // frozen from an independent implementation of the same rule
        assert_eq!(f(3, 2).modulus(), &[1, 0, 1]);
        assert_eq!(f(3, 3).modulus(), &[1, 0, 2, 1]);
        assert_eq!(f(3, 4).modulus(), &[1, 0, 1, 1, 1]);
        assert_eq!(f(3, 6).modulus(), &[1, 0, 0, 0, 1, 1, 1]);
        assert_eq!(f(3, 8).modulus(), &[1, 0, 0, 0, 0, 1, 1, 0, 1]);
        assert_eq!(f(3, 9).modulus(), &[1, 0, 0, 0, 0, 0, 2, 1, 0, 1]);
        assert_eq!(f(5, 2).modulus(), &[1, 1, 1]);
        assert_eq!(f(5, 4).modulus(), &[1, 0, 1, 1, 1]);
        assert_eq!(f(7, 2).modulus(), &[1, 0, 1]);
    }

    #[test]
    fn prime_field_arithmetic() {
        let f3 = f(3, 1);
        let two = f3.from_residue(2);
        assert_eq!(&two + &two, f3.one());
        assert_eq!(&two * &two, f3.one());
        assert_eq!(-&f3.one(), two);
    }

    #[test]
    fn inverses_in_f9() {
        let f9 = f(3, 2);
        let mut seen = 0;
        for a in f9.elements().filter(|a| !a.is_zero()) {
            assert_eq!(&a * &a.inv().unwrap(), f9.one());
            seen += 1;
        }
        assert_eq!(seen, 8);
        assert_eq!(f9.zero().inv().unwrap_err(), FieldError::DivisionByZero);
    }

    #[test]
    fn generator_of_f9_has_order_8() {
        let f9 = f(3, 2);
        let g = f9.generator().unwrap();
        assert_eq!(g.pow_u64(8), f9.one());
        assert_eq!(g.multiplicative_order().unwrap(), BigUint::from(8u8));
        // lex-first generator with modulus X^2+1 is 1 + X
        assert_eq!(g.coeffs(), &[1, 1]);
    }

    #[test]
    fn orders_exhaustive_small() {
        // order of every nonzero element divides q-1, computed two ways
        for (p, n) in [(3, 1), (3, 2), (3, 3), (5, 1), (5, 2)] {
            let ctx = f(p, n);
            for a in ctx.elements().filter(|a| !a.is_zero()) {
                let ord = a.multiplicative_order().unwrap();
                // brute force: smallest e with a^e = 1
                let mut acc = a.clone();
                let mut e = BigUint::one();
                while !acc.is_one() {
                    acc = &acc * &a;
                    e += 1u8;
                }
                assert_eq!(ord, e);
            }
        }
    }

    #[test]
    fn order_of_minus_one() {
        let f9 = f(3, 2);
        assert_eq!(f9.neg_one().multiplicative_order().unwrap(), BigUint::from(2u8));
        assert_eq!(f9.one().multiplicative_order().unwrap(), BigUint::one());
        assert_eq!(f9.zero().multiplicative_order().unwrap_err(), FieldError::ZeroElement);
    }

    #[test]
    fn roots_of_unity() {
        let f9 = f(3, 2);
        let g = f9.root_of_unity(&BigUint::from(8u8)).unwrap();
        assert_eq!(g.multiplicative_order().unwrap(), BigUint::from(8u8));
        assert!(matches!(
            f9.root_of_unity(&BigUint::from(20u8)),
            Err(FieldError::OrderNotAvailable { .. })
        ));
        let f81 = f(3, 4);
        let z = f81.root_of_unity(&BigUint::from(20u8)).unwrap();
        assert_eq!(z.multiplicative_order().unwrap(), BigUint::from(20u8));
    }

    #[test]
    fn root_of_unity_orders_exhaustive() {
        for (p, n) in [(3, 1), (3, 2), (3, 3), (3, 4)] {
            let ctx = f(p, n);
            let q1 = arith::to_u128(ctx.group_order()).unwrap();
            for d in arith::divisors(q1) {
                let d = BigUint::from(d);
                let z = ctx.root_of_unity(&d).unwrap();
                assert_eq!(z.multiplicative_order().unwrap(), d);
            }
        }
    }

    #[test]
    fn min_extension_examples() {
        assert_eq!(min_extension_with_order(3, &BigUint::from(8u8)).unwrap(), 2);
        assert_eq!(min_extension_with_order(3, &BigUint::from(20u8)).unwrap(), 4);
        assert_eq!(min_extension_with_order(3, &BigUint::from(160u16)).unwrap(), 8);
        assert_eq!(min_extension_with_order(3, &BigUint::from(9u8)).unwrap_err(), FieldError::NotCoprime);
    }

    #[test]
    fn min_extension_is_minimal() {
        for (p, ord) in [(3u64, 8u32), (3, 20), (3, 160), (5, 24), (7, 16)] {
            let ord = BigUint::from(ord);
            let n = min_extension_with_order(p, &ord).unwrap();
            let q1 = BigUint::from(p).pow(n) - 1u8;
            assert!((&q1 % &ord).is_zero());
            for m in 1..n {
                let q1 = BigUint::from(p).pow(m) - 1u8;
                assert!(!(&q1 % &ord).is_zero(), "ord {ord} already available at degree {m}");
            }
        }
    }

    #[test]
    fn solve_additive_prime_field() {
        let f3 = f(3, 1);
        let c = f3.from_int(-1);
        // y^3 - y = 0 holds for every element of F_3
        let zero_fiber = f3.solve_additive(&c, &f3.zero()).unwrap();
        assert_eq!(zero_fiber.len(), 3);
        // ... so nothing maps to 1
        assert!(f3.solve_additive(&c, &f3.one()).unwrap().is_empty());
    }

    #[test]
    fn solve_additive_f9_plus() {
        let f9 = f(3, 2);
        let sols = f9.solve_additive(&f9.one(), &f9.zero()).unwrap();
        assert_eq!(sols.len(), 3);
        for y in &sols {
            assert_eq!(&y.pow_u64(3) + y, f9.zero());
        }
    }

    #[test]
    fn solve_additive_rejects_bad_coefficient() {
        let f9 = f(3, 2);
        assert_eq!(
            f9.solve_additive(&f9.zero(), &f9.one()).unwrap_err(),
            FieldError::ZeroCoefficient
        );
        let x = f9.elem(&[0, 1]).unwrap();
        assert_eq!(f9.additive_map(&x).unwrap_err(), FieldError::NotInPrimeSubfield);
    }

    #[test]
    fn fiber_sizes_sum_to_field_size() {
        for (p, n, c) in [(3u64, 2u32, 1i64), (3, 3, -1), (3, 4, 1), (5, 2, -1), (7, 1, 1)] {
            let ctx = f(p, n);
            let c = ctx.from_int(c);
            let map = ctx.additive_map(&c).unwrap();
            let total: u64 = ctx.elements().map(|u| map.preimage_count(&u)).sum();
            assert_eq!(BigUint::from(total), *ctx.size());
            for u in ctx.elements() {
                let sols = map.solutions(&u);
                assert_eq!(sols.len() as u64, map.preimage_count(&u));
                for y in sols {
                    assert_eq!(&y.pow_u64(p) + &(&c * &y), u);
                }
            }
        }
    }

    #[test]
    fn ctx_mismatch_is_reported() {
        let f9 = f(3, 2);
        let f27 = f(3, 3);
        assert_eq!(f9.ensure_same(&f27.one()).unwrap_err(), FieldError::CtxMismatch);
    }

    #[test]
    #[should_panic(expected = "field context mismatch")]
    fn operators_panic_on_mismatch() {
        let _ = f(3, 2).one() + f(3, 3).one();
    }

    #[test]
    fn field_axioms_exhaustive_f27() {
        let ctx = f(3, 3);
        let all: Vec<FieldElem> = ctx.elements().collect();
        for a in &all {
            for b in &all {
                assert_eq!(a + b, b + a);
                assert_eq!(a * b, b * a);
                for c in &all {
                    assert_eq!(&(a + b) + c, a + &(b + c));
                    assert_eq!(&(a * b) * c, a * &(b * c));
                    assert_eq!(a * &(b + c), &(a * b) + &(a * c));
                }
            }
        }
    }

    #[test]
    fn lex_enumeration_round_trips() {
        let ctx = f(3, 3);
        for (i, a) in ctx.elements().enumerate() {
            assert_eq!(a.lex_index(), i as u128);
            assert_eq!(ctx.elem_at_lex(i as u128), a);
        }
    }
}

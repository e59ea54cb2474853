//! Exact arithmetic for the curve family `y^p + c*y = x^(p^k + 1)` over
//! finite fields of odd characteristic.
//!
//! The crate builds everything from exact integer and finite-field
//! arithmetic: no floating point is used anywhere a result is asserted
//! (the single analytic check, the reciprocal-root modulus of an
//! L-polynomial, is a cross-validation and is tolerance-gated).
//!
//! The main entry points, by theme:
//!
//! * [`field`] — extension fields `F_{p^n}` with canonical moduli,
//!   multiplicative orders, roots of unity and the linear solver for
//!   `y ↦ y^p + c·y`.
//! * [`curve`] — the curves themselves: membership, enumeration,
//!   counting, and the sign-flip isomorphism between `c = -1` and
//!   `c = +1` models.
//! * [`zeta`] — L-polynomials from point counts and the divisibility
//!   obstruction to morphisms.
//! * [`semigroup`] — the Weierstrass semigroup at the point at infinity
//!   and bases of the Riemann-Roch spaces `L(n·P)`.
//! * [`morphism`] — the arithmetic existence criterion, the explicit
//!   covering map `(x, y) ↦ (x^t, y)`, and the totally-ramified degree
//!   gate.
//! * [`autgroup`] — the known automorphism subgroup: the scaling part,
//!   the p-part, Artin-Schreier translations, composition in normal
//!   form.
//! * [`quotient`] — quotient-genus formulas with exact Riemann-Hurwitz
//!   bookkeeping, and empirical orbit verification.
//! * [`galois`] — the layered decision procedure for existence of
//!   Galois covers between members of the family.
//! * [`selftest`] — the acceptance suite behind `bkcurves selftest`.
//!
//! A narrative guide with runnable examples lives in the `book/`
//! directory of the repository; every code snippet there is compiled
//! and run as a doc-test.

pub mod arith;
pub mod autgroup;
pub mod curve;
pub mod field;
pub mod galois;
pub mod guard;
pub mod morphism;
pub mod quotient;
pub mod selftest;
pub mod semigroup;
pub mod zeta;

pub use curve::{CurveBk, CurvePoint, Sign};
pub use field::{FieldCtx, FieldElem};
pub use guard::Guard;

/// Serde helpers: big integers are always emitted as decimal strings so
/// values past 64 bits survive any JSON reader losslessly.
pub mod serial {
    use num_bigint::{BigInt, BigUint};
    use num_rational::BigRational;
    use serde::ser::SerializeSeq;
    use serde::Serializer;

    pub fn biguint<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn bigint<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn bigint_vec<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for c in v {
            seq.serialize_element(&c.to_string())?;
        }
        seq.end()
    }

    pub fn biguint_vec<S: Serializer>(v: &[BigUint], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for c in v {
            seq.serialize_element(&c.to_string())?;
        }
        seq.end()
    }

    /// Rationals are emitted as "num/den" (or plain "num" for integers).
    pub fn rational<S: Serializer>(v: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        use num_traits::One;
        if v.denom().is_one() {
            s.serialize_str(&v.numer().to_string())
        } else {
            s.serialize_str(&format!("{}/{}", v.numer(), v.denom()))
        }
    }
}

/// Coarse classification of library errors, used by the CLI to pick
/// exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad or out-of-domain input.
    InvalidInput,
    /// The requested computation would enumerate a field larger than
    /// the configured guard allows.
    GuardExceeded,
    /// An internal invariant that must hold by theorem was violated;
    /// either a bug or a certificate that a stated result fails.
    Inconsistency,
}

/// Implemented by every error type in the crate.
pub trait ClassifiedError {
    fn class(&self) -> ErrorClass;
}

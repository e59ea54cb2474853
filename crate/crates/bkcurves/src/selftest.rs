//! The acceptance suite: ten criteria covering every module, each
//! with its expected values pinned in code. The CLI `selftest`
//! subcommand and the `acceptance` integration-test target both run
//! these; guarded criteria degrade to an explicit skip (with reason)
//! when the enumeration guard is below what they need.

use std::fmt::Write as _;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith;
use crate::autgroup;
use crate::curve::{self, CurveBk, CurvePoint, Sign};
use crate::field::FieldCtx;
use crate::galois::{self, Outcome, RuleId};
use crate::guard::Guard;
use crate::morphism;
use crate::quotient;
use crate::semigroup::WeierstrassSemigroup;
use crate::zeta;
use crate::{ClassifiedError, ErrorClass};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    /// Guarded prerequisite unavailable; not a failure.
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
    /// A failure that certifies an internal invariant violation rather
    /// than a plain mismatch; the CLI exits 3 on these.
    pub inconsistency: bool,
    pub millis: u128,
}

impl CriterionResult {
    pub fn line(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        };
        format!(
            "criterion {:>2} {:<22} {} ({} ms) {}",
            self.id, self.name, status, self.millis, self.detail
        )
    }
}

enum CheckError {
    Fail(String),
    Inconsistent(String),
    Skip(String),
}

type Check = Result<String, CheckError>;

fn classify<E: ClassifiedError + std::fmt::Display>(e: E) -> CheckError {
    match e.class() {
        ErrorClass::Inconsistency => CheckError::Inconsistent(e.to_string()),
        ErrorClass::GuardExceeded => CheckError::Skip(e.to_string()),
        ErrorClass::InvalidInput => CheckError::Fail(e.to_string()),
    }
}

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(CheckError::Fail(format!($($msg)*)));
        }
    };
}

fn require_field(guard: &Guard, p: u64, n: u32) -> Result<(), CheckError> {
    if guard.allows(p, n) {
        Ok(())
    } else {
        Err(CheckError::Skip(format!(
            "requires enumerating F_{p}^{n}, beyond the configured guard"
        )))
    }
}

pub const CRITERIA: [(u32, &str); 10] = [
    (1, "gap-genus duality"),
    (2, "riemann-roch dims"),
    (3, "point counts"),
    (4, "l-polynomials"),
    (5, "explicit morphism"),
    (6, "automorphisms"),
    (7, "quotient genus"),
    (8, "orbit structure"),
    (9, "galois soundness"),
    (10, "arithmetic sweeps"),
];

pub fn run_criterion(id: u32, guard: &Guard) -> CriterionResult {
    let name = CRITERIA.iter().find(|(i, _)| *i == id).map(|(_, n)| *n).unwrap_or("?");
    let start = Instant::now();
    let outcome = match id {
        1 => criterion_gaps(),
        2 => criterion_riemann_roch(),
        3 => criterion_counts(guard),
        4 => criterion_lpolynomials(guard),
        5 => criterion_morphism(guard),
        6 => criterion_automorphisms(guard),
        7 => criterion_quotient(),
        8 => criterion_orbits(guard),
        9 => criterion_galois(),
        10 => criterion_arithmetic(),
        _ => Err(CheckError::Fail(format!("unknown criterion {id}"))),
    };
    let millis = start.elapsed().as_millis();
    match outcome {
        Ok(detail) => CriterionResult { id, name, status: Status::Pass, detail, inconsistency: false, millis },
        Err(CheckError::Fail(detail)) => {
            CriterionResult { id, name, status: Status::Fail, detail, inconsistency: false, millis }
        }
        Err(CheckError::Inconsistent(detail)) => {
            CriterionResult { id, name, status: Status::Fail, detail, inconsistency: true, millis }
        }
        Err(CheckError::Skip(detail)) => {
            CriterionResult { id, name, status: Status::Skipped, detail, inconsistency: false, millis }
        }
    }
}

pub fn run_all(guard: &Guard) -> Vec<CriterionResult> {
    CRITERIA.iter().map(|(id, _)| run_criterion(*id, guard)).collect()
}

// --- criterion 1 -----------------------------------------------------------

fn criterion_gaps() -> Check {
    let mut checked = 0;
    for p in [3u64, 5, 7] {
        for k in 1..=4u32 {
            let sg = WeierstrassSemigroup::new(p, k).map_err(classify)?;
            let gaps = sg.gaps();
            ensure!(
                BigUint::from(gaps.len()) == curve::genus(p, k),
                "gap count != genus at p={p} k={k}"
            );
            checked += 1;
        }
    }
    Ok(format!("{checked} semigroups, gap count equals genus exactly"))
}

// --- criterion 2 -----------------------------------------------------------

fn criterion_riemann_roch() -> Check {
    let mut dims = 0u64;
    for k in 1..=3u32 {
        let sg = WeierstrassSemigroup::new(3, k).map_err(classify)?;
        let g = sg.gaps().len() as u64;
        let mut pole_numbers_seen = 0u64;
        for n in 0..=2 * g + 50 {
            if sg.is_pole_number(n) {
                pole_numbers_seen += 1;
            }
            let dim = sg.rr_dim(n);
            ensure!(dim == pole_numbers_seen, "dim L({n}P) mismatch at k={k}");
            if n >= (2 * g).saturating_sub(1) {
                ensure!(dim == n - g + 1, "dim L({n}P) != n-g+1 at k={k}");
            }
            dims += 1;
        }
    }
    Ok(format!("{dims} dimensions match the gap sieve and the n-g+1 law"))
}

// --- criterion 3 -----------------------------------------------------------

fn criterion_counts(guard: &Guard) -> Check {
    require_field(guard, 3, 2)?;
    // independent oracle: direct double loop over all 81 pairs
    let ctx = FieldCtx::get(3, 2).map_err(classify)?;
    let c = ctx.one();
    let mut naive = 1u64;
    for x in ctx.elements() {
        for y in ctx.elements() {
            if curve::on_curve_with_coeff(&ctx, &c, 1, &x, &y) {
                naive += 1;
            }
        }
    }
    ensure!(naive == 28, "brute-force count of B_1(+1) over F_9 is {naive}, expected 28");
    let fast = CurveBk::new(3, 1, Sign::Plus)
        .map_err(classify)?
        .count_points(2, guard)
        .map_err(classify)?;
    ensure!(fast == BigUint::from(28u8), "solver count {fast} != 28");

    let mut weil_checked = 0;
    for (p, k, nmax) in [(3u64, 1u32, 4u32), (3, 2, 4), (5, 1, 2)] {
        for sign in [Sign::Plus, Sign::Minus] {
            let cur = CurveBk::new(p, k, sign).map_err(classify)?;
            for n in 1..=nmax {
                if !guard.allows(p, n) {
                    continue;
                }
                let count = cur.count_points(n, guard).map_err(classify)?;
                ensure!(
                    curve::weil_bound_holds(&count, &arith::big_pow(p, n), cur.genus()),
                    "Weil bound fails at p={p} k={k} c={sign} n={n}"
                );
                weil_checked += 1;
            }
        }
    }
    Ok(format!("28 points over F_9 by two routes; {weil_checked} counts inside the Weil interval"))
}

// --- criterion 4 -----------------------------------------------------------

fn criterion_lpolynomials(guard: &Guard) -> Check {
    require_field(guard, 3, 9)?;
    let l1m = zeta::lpolynomial(&CurveBk::new(3, 1, Sign::Minus).map_err(classify)?, guard)
        .map_err(classify)?;
    ensure!(l1m.degree() == 6, "deg L(B_1) = {}", l1m.degree());
    let l2m = zeta::lpolynomial(&CurveBk::new(3, 2, Sign::Minus).map_err(classify)?, guard)
        .map_err(classify)?;
    ensure!(l2m.degree() == 18, "deg L(B_2) = {}", l2m.degree());
    // functional equation and root moduli are re-validated explicitly
    ensure!(l1m.functional_equation_holds(), "functional equation fails for L(B_1)");
    ensure!(l2m.functional_equation_holds(), "functional equation fails for L(B_2)");
    l1m.weil_root_check(1e-6).map_err(classify)?;
    l2m.weil_root_check(1e-6).map_err(classify)?;
    ensure!(l1m.divides(&l2m).map_err(classify)?, "L(B_1) does not divide L(B_2)");
    let l1p = zeta::lpolynomial(&CurveBk::new(3, 1, Sign::Plus).map_err(classify)?, guard)
        .map_err(classify)?;
    ensure!(l1p != l1m, "the two sign models have equal L-polynomials at k=1");
    Ok("degree 6 and 18 reconstructions exact; divisibility and sign-split verified".into())
}

// --- criterion 5 -----------------------------------------------------------

fn criterion_morphism(guard: &Guard) -> Check {
    require_field(guard, 3, 4)?;
    require_field(guard, 5, 2)?;
    let spec = morphism::MorphismSpec::build(3, 3, 1).map_err(classify)?;
    ensure!(spec.t == BigUint::from(7u8), "degree of the (3,3,1) map is {}", spec.t);
    let bound = morphism::degree_bound(3, 3, 1);
    ensure!(spec.t <= bound, "degree exceeds the bound {bound}");
    let mut transported = 0u64;
    for n in 1..=4 {
        let ctx = FieldCtx::get(3, n).map_err(classify)?;
        let census = spec.fiber_census(&ctx, Sign::Minus, guard).map_err(classify)?;
        ensure!(census.infinity_fiber == 1, "infinity fiber not a single point at n={n}");
        ensure!(
            BigUint::from(census.max_fiber) <= spec.t,
            "fiber larger than the degree at n={n}"
        );
        transported += census.source_points;
    }
    let spec5 = morphism::MorphismSpec::build(5, 3, 1).map_err(classify)?;
    ensure!(spec5.t == BigUint::from(21u8), "degree of the (5,3,1) map is {}", spec5.t);
    let ctx = FieldCtx::get(5, 2).map_err(classify)?;
    let census = spec5.fiber_census(&ctx, Sign::Minus, guard).map_err(classify)?;
    ensure!(census.infinity_fiber == 1, "infinity fiber not a single point over F_25");
    transported += census.source_points;
    Ok(format!("{transported} points transported exhaustively; total ramification at infinity"))
}

// --- criterion 6 -----------------------------------------------------------

fn criterion_automorphisms(guard: &Guard) -> Check {
    require_field(guard, 3, 4)?;
    let ctx = FieldCtx::get(3, 4).map_err(classify)?;
    let pairs = autgroup::enumerate_p_part(3, 1, &ctx).map_err(classify)?;
    ensure!(pairs.len() == 27, "p-part of (3,1) has {} pairs, expected 27", pairs.len());
    let group = autgroup::enumerate_full_group(3, 1, &ctx).map_err(classify)?;
    ensure!(group.len() == 216, "full group of (3,1) has {} elements, expected 216", group.len());
    for auto in &group {
        ensure!(
            auto.preserves_point_set(guard).map_err(classify)?,
            "an element does not permute the F_81 points"
        );
        match auto.apply(&CurvePoint::Infinity) {
            Ok(CurvePoint::Infinity) => {}
            _ => return Err(CheckError::Fail("infinity is not fixed".into())),
        }
    }

    require_field(guard, 3, 8)?;
    let big = FieldCtx::get(3, 8).map_err(classify)?;
    let pairs2 = autgroup::enumerate_p_part(3, 2, &big).map_err(classify)?;
    ensure!(pairs2.len() == 243, "p-part of (3,2) has {} pairs, expected 243", pairs2.len());
    // sampled verification over the 6561-element field
    let curve2 = CurveBk::new(3, 2, Sign::Plus).map_err(classify)?;
    let points = curve2.enumerate_points(&big, guard).map_err(classify)?;
    for (d, e) in pairs2.iter().step_by(48) {
        for pt in &points {
            autgroup::apply_translation(3, 2, &big, d, e, pt).map_err(classify)?;
        }
    }
    Ok("group order 216 preserves B_1(F_81); 243 pairs at k=2 with sampled action checks".into())
}

// --- criterion 7 -----------------------------------------------------------

fn criterion_quotient() -> Check {
    for p in [3u64, 5] {
        for k in 1..=6u32 {
            let identity = autgroup::SubgroupParams::from_parts(p, k, &BigUint::one(), 1, 0)
                .map_err(classify)?;
            let (g, integral) = quotient::quotient_genus(&identity).map_err(classify)?;
            ensure!(
                integral && g == BigRational::from_integer(BigInt::from(curve::genus(p, k))),
                "identity quotient at p={p} k={k} is {g}"
            );
            let full = autgroup::SubgroupParams::from_parts(
                p,
                k,
                &autgroup::scaling_order(p, k),
                p - 1,
                0,
            )
            .map_err(classify)?;
            let (g, _) = quotient::quotient_genus(&full).map_err(classify)?;
            ensure!(g.is_zero(), "full scaling quotient at p={p} k={k} has genus {g}");
        }
    }
    let sp = autgroup::SubgroupParams::from_parts(3, 3, &BigUint::from(7u8), 1, 0)
        .map_err(classify)?;
    let (g, integral) = quotient::quotient_genus(&sp).map_err(classify)?;
    ensure!(
        integral && g == BigRational::from_integer(BigInt::from(3)),
        "order-7 quotient of B_3 has genus {g}, expected 3"
    );

    let mut tuples = 0u64;
    for p in [3u64, 5, 7] {
        for k in 1..=6u32 {
            let n = autgroup::scaling_order(p, k);
            let Some(n128) = n.to_u128() else {
                return Err(CheckError::Fail("scaling order exceeds u128".into()));
            };
            for m in arith::divisors(n128) {
                let m = BigUint::from(m);
                for t in arith::divisors((p - 1) as u128) {
                    let t = t as u64;
                    if !(&m % t).is_zero() {
                        continue;
                    }
                    for r in 0..=2 * k {
                        let sp = autgroup::SubgroupParams::from_parts(p, k, &m, t, r)
                            .map_err(classify)?;
                        if !quotient::rh_consistency(&sp).map_err(classify)? {
                            return Err(CheckError::Inconsistent(format!(
                                "Riemann-Hurwitz bookkeeping fails at p={p} k={k} m={m} t={t} r={r}"
                            )));
                        }
                        tuples += 1;
                    }
                }
            }
        }
    }
    ensure!(tuples >= 10_000, "grid only produced {tuples} tuples");
    Ok(format!("{tuples} parameter tuples satisfy the Riemann-Hurwitz identity exactly"))
}

// --- criterion 8 -----------------------------------------------------------

fn criterion_orbits(guard: &Guard) -> Check {
    require_field(guard, 3, 2)?;
    require_field(guard, 3, 6)?;
    let f9 = FieldCtx::get(3, 2).map_err(classify)?;
    let mut reports = String::new();
    for s in [1u64, 2, 4, 8] {
        let rep = quotient::verify_orbit_structure(3, 1, s, &f9, guard).map_err(classify)?;
        ensure!(
            rep.short_orbit_count == 2 / rep.t,
            "orbit count mismatch at s={s}: {rep:?}"
        );
        let _ = write!(reports, "s={s}:t={} ", rep.t);
    }
    let f729 = FieldCtx::get(3, 6).map_err(classify)?;
    for (s, expect_t) in [(7u64, 2u64), (8, 1)] {
        let rep = quotient::verify_orbit_structure(3, 3, s, &f729, guard).map_err(classify)?;
        ensure!(rep.t == expect_t, "t mismatch at (3,3,s={s})");
        ensure!(rep.short_orbit_count == 2 / expect_t, "orbit count mismatch at (3,3,s={s})");
        ensure!(rep.translate_samples > 0, "no shear translates sampled at (3,3,s={s})");
        let _ = write!(reports, "k3/s={s}:t={} ", rep.t);
    }
    Ok(format!("orbit pattern matches predictions ({})", reports.trim_end()))
}

// --- criterion 9 -----------------------------------------------------------

fn criterion_galois() -> Check {
    // layered verdicts on the named cases
    let v = galois::decide_galois(3, 3, 1).map_err(classify)?;
    ensure!(
        v.outcome == Outcome::Exists { group_order: BigUint::from(7u8) },
        "(3,3,1) is {:?}",
        v.outcome
    );
    let sols = v.solutions.as_ref().ok_or_else(|| CheckError::Fail("census missing".into()))?;
    let ruled = sols
        .iter()
        .find(|s| s.r == 0 && s.t == 2 && s.m == BigUint::from(8u8))
        .ok_or_else(|| CheckError::Fail("(t=2, m=8, r=0) candidate missing".into()))?;
    ensure!(
        ruled.ruled_out.iter().any(|r| r.rule == RuleId::CyclicGate),
        "(t=2, m=8, r=0) not excluded by the cyclic gate"
    );
    let v = galois::decide_galois(3, 4, 2).map_err(classify)?;
    ensure!(
        v.outcome == Outcome::NoGaloisMorphism && v.reasons == vec![RuleId::PowerOfTwo],
        "(3,4,2) decided as {:?} via {:?}",
        v.outcome,
        v.reasons
    );
    let v = galois::decide_galois(3, 6, 3).map_err(classify)?;
    ensure!(
        v.outcome == Outcome::NoGaloisMorphism && v.reasons == vec![RuleId::DoubleCover],
        "(3,6,3) decided as {:?} via {:?}",
        v.outcome,
        v.reasons
    );
    for (k, l) in [(5u32, 3u32), (7, 3), (5, 4)] {
        let v = galois::decide_galois(3, k, l).map_err(classify)?;
        ensure!(
            v.outcome == Outcome::NoGaloisMorphism && v.reasons == vec![RuleId::SmallIndex],
            "(3,{k},{l}) decided as {:?} via {:?}",
            v.outcome,
            v.reasons
        );
    }

    // full soundness sweep: exclusion verdicts never leave survivors
    let mut decided = 0u64;
    for p in [3u64, 5] {
        for l in 2..=11u32 {
            for k in (l + 1)..=12 {
                let v = galois::decide_galois(p, k, l).map_err(classify)?;
                ensure!(v.cross_checked, "census unavailable at p={p} k={k} l={l}");
                if v.outcome == Outcome::NoGaloisMorphism {
                    ensure!(v.survivors == 0, "survivors at p={p} k={k} l={l}");
                }
                decided += 1;
            }
        }
    }

    // lemma engines against brute force
    galois::lemma_no_solutions_gcd2(3, 8, 2, 1).map_err(classify)?;
    let rep = galois::lemma_euclid_chain(3, 1, 2, 3).map_err(classify)?;
    ensure!(rep.chain_verified && rep.q_steps == 3, "worked chain instance broken");
    let rep = galois::lemma_euclid_chain(3, 1, 1, 3).map_err(classify)?;
    let conc = rep
        .conclusion
        .ok_or_else(|| CheckError::Fail("terminal equality not forced for t=1".into()))?;
    ensure!(
        conc.t_is_one && conc.remainder_zero && conc.steps_odd,
        "chain conclusion wrong for t=1"
    );
    for p in [3u64, 5] {
        for l in 1..=4u32 {
            for t in arith::divisors((p - 1) as u128) {
                for kr in 1..=16u32 {
                    match galois::lemma_euclid_chain(p, l, t as u64, kr) {
                        Ok(_) => {}
                        Err(galois::GaloisError::PreconditionNotMet(_)) => {}
                        Err(e) => return Err(classify(e)),
                    }
                }
            }
        }
    }
    Ok(format!("{decided} pairs decided; exclusions carry zero survivors; lemma engines agree"))
}

// --- criterion 10 ----------------------------------------------------------

fn criterion_arithmetic() -> Check {
    for p in [3u64, 5, 7] {
        for a in 1..=30u32 {
            for b in 1..=30u32 {
                morphism::divides_power_plus_one(p, a, b).map_err(classify)?;
                morphism::gcd_of_power_plus_ones(p, a, b).map_err(classify)?;
            }
        }
    }
    let mut checked = 0u64;
    for base in 1..=200u64 {
        for a in 1..=base {
            for d in 1..=200u64 {
                if morphism::product_plus_one_divisible(a, base, d) {
                    ensure!(d == a, "integrality without d=a at a={a} base={base} d={d}");
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("2700 closed-form identities and {checked} forced equalities verified"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn criteria_catalog_is_complete() {
        assert_eq!(CRITERIA.len(), 10);
        let ids: Vec<u32> = CRITERIA.iter().map(|(i, _)| *i).collect();
        assert_eq!(ids, (1..=10).collect::<Vec<_>>());
    }

    #[test]
    fn tight_guard_skips_instead_of_failing() {
        let tight = Guard::new(10);
        for id in [3, 4, 5, 6, 8] {
            let res = run_criterion(id, &tight);
            assert_eq!(res.status, Status::Skipped, "criterion {id}: {}", res.detail);
        }
    }

    #[test]
    fn unknown_criterion_fails_cleanly() {
        let res = run_criterion(99, &Guard::default());
        assert_eq!(res.status, Status::Fail);
    }

    #[test]
    fn result_lines_render() {
        let res = run_criterion(1, &Guard::default());
        assert_eq!(res.status, Status::Pass);
        assert!(res.line().contains("criterion  1"));
        assert!(res.line().contains("PASS"));
    }
}

//! Quadratic-residue conditions along orbits and the 2-adic valuation
//! pattern of `(s, A)`.
//!
//! For a side square `A` of a state with doubled area `s`, the residue to
//! test depends only on the parities of `s` and `A`:
//!
//! | s    | A    | condition                       |
//! |------|------|---------------------------------|
//! | even | even | `s/2` is not a square mod `A/2` |
//! | even | odd  | `s/2` is not a square mod `A`   |
//! | odd  | odd  | `(s+A)/2` is not a square mod `A` |
//! | odd  | even | none (uncovered)                |

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lattice::Quadruple;
use crate::orbit::{for_each_orbit_state, is_square, ComponentLabel, SearchOptions, SearchReport};

pub const DEFAULT_RESIDUE_BUDGET: u64 = 1_000_000;
/// Side squares along a bound-2000 orbit reach about `2 * 10^6`.
pub const AUDIT_RESIDUE_BUDGET: u64 = 10_000_000;
/// Violating states listed verbatim; the rest are only counted.
const MAX_LISTED: usize = 1000;

/// Jacobi symbol `(a / n)` for odd positive `n`.
pub fn jacobi(a: i64, n: i64) -> Result<i8> {
    if n <= 0 || n % 2 == 0 {
        return Err(Error::InvalidModulus(n));
    }
    let mut a = a.rem_euclid(n) as u64;
    let mut n = n as u64;
    let mut sign = 1i8;
    while a != 0 {
        let z = a.trailing_zeros();
        a >>= z;
        if z % 2 == 1 && (n % 8 == 3 || n % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && n % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut n);
        a %= n;
    }
    Ok(if n == 1 { sign } else { 0 })
}

/// Exponent of 2 in `n`.
pub fn v2(n: i64) -> Result<u32> {
    if n == 0 {
        return Err(Error::Undefined);
    }
    Ok(n.trailing_zeros())
}

pub fn is_qr(r: i64, m: i64) -> Result<bool> {
    is_qr_with_budget(r, m, DEFAULT_RESIDUE_BUDGET)
}

/// Whether `x^2 = r (mod m)` has a solution, by scanning `x <= m/2`.
pub fn is_qr_with_budget(r: i64, m: i64, budget: u64) -> Result<bool> {
    if m < 1 {
        return Err(Error::InvalidModulus(m));
    }
    if m as u64 > budget {
        return Err(Error::ResidueBudgetExceeded { modulus: m as u64, budget });
    }
    let m = m as u64;
    let r = r.rem_euclid(m as i64) as u64;
    // sq = x^2 mod m, advanced by 2x + 1.
    let mut sq = 0u64;
    for x in 0..=m / 2 {
        if sq == r {
            return Ok(true);
        }
        sq += (2 * x + 1) % m;
        if sq >= m {
            sq -= m;
        }
    }
    Ok(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ObstructionCase {
    EvenEven,
    EvenOdd,
    OddOdd,
    Uncovered,
}

/// The case and, when covered, the pair `(r, m)` such that the condition
/// says `r` is not a square modulo `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Condition {
    pub case: ObstructionCase,
    pub residue: Option<(i64, i64)>,
}

pub fn condition_for(s: i64, side: i64) -> Condition {
    let (case, residue) = match (s.rem_euclid(2), side.rem_euclid(2)) {
        (0, 0) => (ObstructionCase::EvenEven, Some((s / 2, side / 2))),
        (0, _) => (ObstructionCase::EvenOdd, Some((s / 2, side))),
        (_, 1) => (ObstructionCase::OddOdd, Some(((s + side) / 2, side))),
        _ => (ObstructionCase::Uncovered, None),
    };
    Condition { case, residue }
}

/// Condition attached to side `A = b + c`.
pub fn obstruction_case(q: Quadruple) -> Result<Condition> {
    let side = q.side(0)?;
    if side < 1 {
        return Err(Error::NotATriangleState { a: q.a, b: q.b, c: q.c, s: q.s });
    }
    Ok(condition_for(q.s, side))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct CaseTally {
    pub holds: u64,
    pub violations: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SideTally {
    pub cases: BTreeMap<ObstructionCase, CaseTally>,
    pub uncovered: u64,
    /// Degenerate side (`<= 0`).
    pub skipped: u64,
    /// Jacobi symbol `(r / m)` over covered checks with odd `m`, keyed by value.
    pub jacobi: BTreeMap<i8, u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub component: ComponentLabel,
    pub state: Quadruple,
    /// 0, 1, 2 for `A`, `B`, `C` of the canonical state (`A >= B >= C`).
    pub side: usize,
    pub case: ObstructionCase,
    pub residue: i64,
    pub modulus: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValuationInventory {
    /// Pair `(v2(s), v2(A))` with the number of occurrences.
    pub pairs: BTreeMap<String, u64>,
    pub nonconforming: Vec<(u32, u32)>,
    pub conforms: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AuditReport {
    pub schema_version: u32,
    pub start: Quadruple,
    pub bound: u64,
    pub states: u64,
    pub sides: [SideTally; 3],
    pub total_violations: u64,
    /// First violations in visiting order.
    pub violations: Vec<Violation>,
    pub valuation: ValuationInventory,
}

impl AuditReport {
    pub fn residue_conditions_hold(&self) -> bool {
        self.total_violations == 0
    }

    pub fn passed(&self) -> bool {
        self.residue_conditions_hold() && self.valuation.conforms
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("audit report serializes")
    }
}

/// The listed pattern: `u = 1: v = 2`; `u = 2: v in {4, 5}`; odd `u >= 3`:
/// `v in {u+1, u+3, ..., 2u} + {2u+1}`; even `u >= 4`:
/// `v in {u, u+2, ..., 2u} + {2u+1}`.
pub fn pair_conforms(u: u32, v: u32) -> bool {
    match u {
        0 => false,
        1 => v == 2,
        2 => v == 4 || v == 5,
        _ if u % 2 == 1 => v == 2 * u + 1 || v == 2 * u || (v > u && v < 2 * u && (v - u) % 2 == 1),
        _ => v == 2 * u + 1 || (v >= u && v <= 2 * u && (v - u) % 2 == 0),
    }
}

/// Valuation pair of a state and side, when both `s` and the side are even
/// and nonzero.
fn valuation_pair(s: i64, side: i64) -> Option<(u32, u32)> {
    if s == 0 || side == 0 || s % 2 != 0 || side % 2 != 0 {
        return None;
    }
    Some((s.trailing_zeros(), side.trailing_zeros()))
}

struct StateResult {
    checks: [(Condition, Option<bool>, Option<i8>); 3],
}

fn check_state(q: &Quadruple, budget: u64) -> Result<StateResult> {
    let sides = q.raw_sides()?;
    let mut checks = [(condition_for(0, 0), None, None); 3];
    for (i, &x) in sides.iter().enumerate() {
        if x < 1 {
            continue;
        }
        let cond = condition_for(q.s, x);
        let (qr, jac) = match cond.residue {
            Some((r, m)) => {
                let jac = if m % 2 == 1 { Some(jacobi(r, m)?) } else { None };
                (Some(is_qr_with_budget(r, m, budget)?), jac)
            }
            None => (None, None),
        };
        checks[i] = (cond, qr, jac);
    }
    Ok(StateResult { checks })
}

/// Evaluates the residue conditions on all three sides of every state in the
/// orbit of `q` up to `bound`, and collects the valuation pairs of every
/// side over states where `s` and that side are both even.
pub fn audit_orbit(q: Quadruple, bound: u64, opts: &SearchOptions, budget: u64) -> Result<AuditReport> {
    let mut states: Vec<(ComponentLabel, Quadruple)> = Vec::new();
    let comps = for_each_orbit_state(q, bound, opts, &mut |l, s| states.push((l, *s)))?;
    let start = comps[0].start;

    let results: Vec<StateResult> = states.par_iter().map(|(_, s)| check_state(s, budget)).collect::<Result<_>>()?;

    let mut sides: [SideTally; 3] = Default::default();
    let mut violations = Vec::new();
    let mut total_violations = 0;
    let mut pairs: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    for ((label, state), res) in states.iter().zip(&results) {
        let raw = state.raw_sides()?;
        for (i, (cond, qr, jac)) in res.checks.iter().enumerate() {
            let tally = &mut sides[i];
            if raw[i] < 1 {
                tally.skipped += 1;
                continue;
            }
            if let Some(p) = valuation_pair(state.s, raw[i]) {
                *pairs.entry(p).or_default() += 1;
            }
            let Some(violated) = qr else {
                tally.uncovered += 1;
                continue;
            };
            if let Some(j) = jac {
                *tally.jacobi.entry(*j).or_default() += 1;
            }
            let entry = tally.cases.entry(cond.case).or_default();
            if *violated {
                entry.violations += 1;
                total_violations += 1;
                if violations.len() < MAX_LISTED {
                    let (r, m) = cond.residue.expect("covered case has a residue");
                    violations.push(Violation {
                        component: *label,
                        state: *state,
                        side: i,
                        case: cond.case,
                        residue: r,
                        modulus: m,
                    });
                }
            } else {
                entry.holds += 1;
            }
        }
    }
    let nonconforming: Vec<(u32, u32)> = pairs.keys().copied().filter(|&(u, v)| !pair_conforms(u, v)).collect();
    Ok(AuditReport {
        schema_version: crate::orbit::SCHEMA_VERSION,
        start,
        bound,
        states: states.len() as u64,
        sides,
        total_violations,
        violations,
        valuation: ValuationInventory {
            pairs: pairs.iter().map(|(&(u, v), &n)| (format!("{u},{v}"), n)).collect(),
            conforms: nonconforming.is_empty(),
            nonconforming,
        },
    })
}

/// Distinct valuation pairs over all sides of the orbit, with the
/// conformance flag.
pub fn valuation_pairs(q: Quadruple, bound: u64, opts: &SearchOptions) -> Result<(BTreeSet<(u32, u32)>, bool)> {
    let mut out = BTreeSet::new();
    for_each_orbit_state(q, bound, opts, &mut |_, s| {
        if let Ok(sides) = s.raw_sides() {
            out.extend(sides.iter().filter_map(|&x| valuation_pair(s.s, x)));
        }
    })?;
    let conforms = out.iter().all(|&(u, v)| pair_conforms(u, v));
    Ok((out, conforms))
}

/// Every perfect-square area `N^2 <= bound / 2` is missing from the combined
/// reach set.
pub fn square_absence_check(report: &SearchReport) -> bool {
    (0..=report.bound / 2).filter(|&n| is_square(n)).all(|n| !report.combined.contains(2 * n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::orbit::search;
    use proptest::prelude::*;

    fn legendre(a: i64, p: i64) -> i8 {
        let a = a.rem_euclid(p);
        if a == 0 {
            0
        } else if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    fn is_prime(n: i64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn jacobi_examples() {
        assert_eq!(jacobi(5, 1).unwrap(), 1);
        assert_eq!(jacobi(3, 7).unwrap(), -1);
        assert_eq!(jacobi(2, 15).unwrap(), 1);
        assert!(!is_qr(2, 15).unwrap());
        assert!(matches!(jacobi(3, 8), Err(Error::InvalidModulus(8))));
        assert!(jacobi(3, -7).is_err());
        assert_eq!(jacobi(-1, 7).unwrap(), -1);
        assert_eq!(jacobi(6, 9).unwrap(), 0);
    }

    #[test]
    fn jacobi_matches_legendre_for_small_primes() {
        for p in (3..500).filter(|&p| is_prime(p)) {
            for a in 0..p {
                assert_eq!(jacobi(a, p).unwrap(), legendre(a, p), "({a}/{p})");
            }
        }
    }

    #[test]
    fn v2_examples() {
        assert_eq!(v2(12).unwrap(), 2);
        assert_eq!(v2(11365).unwrap(), 0);
        assert_eq!(v2(64).unwrap(), 6);
        assert_eq!(v2(-8).unwrap(), 3);
        assert!(matches!(v2(0), Err(Error::Undefined)));
    }

    #[test]
    fn is_qr_examples() {
        assert!(is_qr(0, 1).unwrap());
        assert!(!is_qr(3, 7).unwrap());
        assert!(is_qr(2, 7).unwrap());
        assert!(is_qr(-1, 5).unwrap());
        assert!(matches!(is_qr(1, 2_000_000), Err(Error::ResidueBudgetExceeded { .. })));
        assert!(is_qr(1, 0).is_err());
    }

    #[test]
    fn is_qr_matches_full_enumeration() {
        for m in 1..120i64 {
            for r in 0..m {
                let full = (0..m).any(|x| x * x % m == r);
                assert_eq!(is_qr(r, m).unwrap(), full, "{r} mod {m}");
            }
        }
    }

    #[test]
    fn case_examples() {
        let h = obstruction_case(Quadruple::new(8, -4, 9, 2)).unwrap();
        assert_eq!(h, Condition { case: ObstructionCase::EvenOdd, residue: Some((1, 5)) });
        let g = obstruction_case(Quadruple::new(8, -3, 5, 1)).unwrap();
        assert_eq!(g.case, ObstructionCase::Uncovered);
        assert_eq!(obstruction_case(Quadruple::new(12, -3, 5, 3)).unwrap().case, ObstructionCase::Uncovered);
    }

    #[test]
    fn case_depends_only_on_parities() {
        for s in -9..=9i64 {
            for x in 1..=12i64 {
                let c = condition_for(s, x).case;
                let expected = match (s.rem_euclid(2), x % 2) {
                    (0, 0) => ObstructionCase::EvenEven,
                    (0, 1) => ObstructionCase::EvenOdd,
                    (1, 1) => ObstructionCase::OddOdd,
                    _ => ObstructionCase::Uncovered,
                };
                assert_eq!(c, expected);
                assert_eq!(c, condition_for(s + 2, x + 2).case);
            }
        }
    }

    #[test]
    fn pair_examples() {
        assert!(pair_conforms(1, 2));
        assert!(!pair_conforms(2, 6));
        for v in [4, 6, 8, 9] {
            assert!(pair_conforms(4, v));
        }
        assert!(!pair_conforms(4, 5) && !pair_conforms(4, 7) && !pair_conforms(4, 10));
        for v in [4, 6, 7] {
            assert!(pair_conforms(3, v));
        }
        assert!(!pair_conforms(3, 5) && !pair_conforms(2, 7) && !pair_conforms(5, 4));
        for v in [6, 8, 10, 11] {
            assert!(pair_conforms(5, v));
        }
    }

    #[test]
    fn single_state_audit() {
        let q = Quadruple::new(8, -3, 5, 1);
        let r = audit_orbit(q, 1, &SearchOptions::default(), AUDIT_RESIDUE_BUDGET).unwrap();
        assert_eq!(r.states, 1);
        // Canonical state (-3, 5, 8; 1) has sides (13, 5, 2): C is uncovered.
        assert_eq!(r.sides[2].uncovered, 1);
        assert_eq!(r.sides[0].cases[&ObstructionCase::OddOdd].holds, 1);
        assert_eq!(r.sides[1].cases[&ObstructionCase::OddOdd].holds, 1);
    }

    #[test]
    fn square_absence_examples() {
        let opts = SearchOptions::default();
        assert!(square_absence_check(&search(&fixtures::g(), 600, &opts).unwrap()));
        assert!(!square_absence_check(&search(&fixtures::h(), 200, &opts).unwrap()));
        assert!(square_absence_check(&search(&fixtures::g(), 1, &opts).unwrap()));
    }

    proptest! {
        #[test]
        fn jacobi_multiplicative(a in -500i64..500, b in -500i64..500, n in 0i64..400, m in 0i64..400) {
            let (n, m) = (2 * n + 1, 2 * m + 1);
            prop_assert_eq!(jacobi(a * b, n).unwrap(), jacobi(a, n).unwrap() * jacobi(b, n).unwrap());
            prop_assert_eq!(jacobi(a, n * m).unwrap(), jacobi(a, n).unwrap() * jacobi(a, m).unwrap());
        }

        #[test]
        fn is_qr_crt(r in -1000i64..1000, m1 in 1i64..300, m2 in 1i64..300) {
            prop_assume!(gcd(m1, m2) == 1);
            prop_assert_eq!(
                is_qr(r, m1 * m2).unwrap(),
                is_qr(r, m1).unwrap() && is_qr(r, m2).unwrap()
            );
        }
    }

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 { a } else { gcd(b, a % b) }
    }
}

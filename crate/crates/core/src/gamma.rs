//! Which of the two half-product equations a pair uses.
//!
//! For coprime `(a, b)` exactly one of
//!
//! ```text
//!   (1)  a·x + b·y     = (a − 1)(b − 1)/2
//!   (2)  a·x + b·y + 1 = (a − 1)(b − 1)/2
//! ```
//!
//! has a nonnegative solution, and that solution is unique. Γ(a, b) names
//! the equation used by the reduced pair `(a/d, b/d)`.
//!
//! [`gamma_criterion`] decides Γ from the parity of a modular inverse in
//! O(log max(a, b)) steps. [`gamma_oracle`] decides it by enumerating
//! solutions, and exists to certify the criterion.

use std::fmt;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{self, gcd_u64, mod_inverse_u64, Natural, ReducedPair};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EquationTag {
    Eq1,
    Eq2,
}

impl EquationTag {
    pub fn as_u8(self) -> u8 {
        match self {
            EquationTag::Eq1 => 1,
            EquationTag::Eq2 => 2,
        }
    }

    pub fn from_u8(v: u8) -> Option<Self> {
        match v {
            1 => Some(EquationTag::Eq1),
            2 => Some(EquationTag::Eq2),
            _ => None,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            EquationTag::Eq1 => EquationTag::Eq2,
            EquationTag::Eq2 => EquationTag::Eq1,
        }
    }

    /// Eq1 when `theta` is odd, Eq2 when even.
    fn from_parity(odd: bool) -> Self {
        if odd {
            EquationTag::Eq1
        } else {
            EquationTag::Eq2
        }
    }
}

impl fmt::Display for EquationTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_u8())
    }
}

impl Serialize for EquationTag {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_u8(self.as_u8())
    }
}

impl<'de> Deserialize<'de> for EquationTag {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = u8::deserialize(deserializer)?;
        EquationTag::from_u8(v).ok_or_else(|| {
            serde::de::Error::custom(format!("equation tag must be 1 or 2, got {v}"))
        })
    }
}

/// A nonnegative `(x, y)` solving the tagged equation for some coprime pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationSolution {
    pub tag: EquationTag,
    pub x: Natural,
    pub y: Natural,
}

impl EquationSolution {
    /// Plugs the solution back into its equation for the pair `(a, b)`.
    pub fn satisfies(&self, a: &Natural, b: &Natural) -> bool {
        let (Some(a1), Some(b1)) = (
            a.checked_sub(&Natural::one()),
            b.checked_sub(&Natural::one()),
        ) else {
            return false;
        };
        let product = a1 * b1;
        if product.is_odd() {
            return false;
        }
        let lhs = a * &self.x + b * &self.y;
        let lhs = match self.tag {
            EquationTag::Eq1 => lhs,
            EquationTag::Eq2 => lhs + 1,
        };
        lhs * 2 == product
    }
}

/// Every nonnegative solution of both equations for a coprime pair.
///
/// Enumerates the variable attached to the larger coefficient and tests
/// whether the remainder is divisible by the smaller one.
pub fn solve_brute(a: &Natural, b: &Natural) -> Result<Vec<EquationSolution>> {
    if a.is_zero() || b.is_zero() {
        return Err(Error::ZeroInput(a.clone(), b.clone()));
    }
    if !arith::gcd(a, b)?.is_one() {
        return Err(Error::NotCoprime {
            a: a.clone(),
            b: b.clone(),
        });
    }

    let swapped = a > b;
    let (small, large) = if swapped { (b, a) } else { (a, b) };
    // Coprime members are never both even, so the product is even.
    let target1 = ((a - 1u64) * (b - 1u64)) / 2;

    let mut found = Vec::new();
    let targets = [
        (EquationTag::Eq1, Some(target1.clone())),
        (EquationTag::Eq2, target1.checked_sub(&Natural::one())),
    ];
    for (tag, target) in targets {
        let Some(target) = target else { continue };
        let mut large_part = Natural::zero();
        let mut k = Natural::zero();
        while large_part <= target {
            let rest = &target - &large_part;
            if small.divides(&rest) {
                let other = rest / small;
                let (x, y) = if swapped {
                    (k.clone(), other)
                } else {
                    (other, k.clone())
                };
                found.push(EquationSolution { tag, x, y });
            }
            large_part = large_part + large;
            k = k + 1u64;
        }
    }
    found.sort_by(|p, q| (p.tag, &p.x, &p.y).cmp(&(q.tag, &q.x, &q.y)));
    Ok(found)
}

/// Which rule of the parity criterion decided a pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Branch {
    /// One reduced member divides the other, so Γ = 1.
    Divisible,
    /// a/d odd: Γ = 1 iff Θ(b, a) is odd.
    OddFirst { theta_ba: Natural },
    /// a/d even: Γ = 1 iff Θ(a, b) is odd.
    EvenFirst { theta_ab: Natural },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Classification {
    pub reduced: ReducedPair,
    pub branch: Branch,
    pub tag: EquationTag,
}

/// Γ(a, b) by the parity criterion, with the values it was decided on.
pub fn classify(a: &Natural, b: &Natural) -> Result<Classification> {
    let reduced = arith::reduce(a, b)?;
    let (branch, tag) = if reduced.is_divisible() {
        (Branch::Divisible, EquationTag::Eq1)
    } else if reduced.a.is_odd() {
        let theta_ba = arith::mod_inverse(&reduced.b, &reduced.a)?;
        let tag = EquationTag::from_parity(theta_ba.is_odd());
        (Branch::OddFirst { theta_ba }, tag)
    } else {
        let theta_ab = arith::mod_inverse(&reduced.a, &reduced.b)?;
        let tag = EquationTag::from_parity(theta_ab.is_odd());
        (Branch::EvenFirst { theta_ab }, tag)
    };
    Ok(Classification {
        reduced,
        branch,
        tag,
    })
}

pub fn gamma_criterion(a: &Natural, b: &Natural) -> Result<EquationTag> {
    classify(a, b).map(|c| c.tag)
}

/// Word-sized [`gamma_criterion`] for tight loops.
///
/// # Panics
///
/// If either input is zero.
pub fn gamma_u64(a: u64, b: u64) -> EquationTag {
    assert!(a != 0 && b != 0, "gamma is defined on positive integers");
    let d = gcd_u64(a, b);
    let (a, b) = (a / d, b / d);
    if a == 1 || b == 1 {
        return EquationTag::Eq1;
    }
    let theta = if a & 1 == 1 {
        mod_inverse_u64(b, a)
    } else {
        mod_inverse_u64(a, b)
    };
    EquationTag::from_parity(theta.expect("reduced pair is coprime") & 1 == 1)
}

/// Γ(a, b) by enumeration over the reduced pair.
///
/// Fails with [`Error::TheoremViolation`] unless exactly one solution exists.
pub fn gamma_oracle(a: &Natural, b: &Natural) -> Result<EquationTag> {
    let reduced = arith::reduce(a, b)?;
    let solutions = solve_brute(&reduced.a, &reduced.b)?;
    match solutions.as_slice() {
        [only] => Ok(only.tag),
        _ => Err(Error::TheoremViolation {
            a: a.clone(),
            b: b.clone(),
            found: solutions.len(),
        }),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Every coprime pair with a ≤ b has exactly one solution across both equations.
    ExactlyOne,
    /// The parity criterion agrees with enumeration on every ordered pair.
    CriterionVsOracle,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "reason", rename_all = "snake_case")]
pub enum Violation {
    SolutionCount {
        solutions: Vec<EquationSolution>,
    },
    Disagreement {
        criterion: EquationTag,
        oracle: Option<EquationTag>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub a: Natural,
    pub b: Natural,
    #[serde(flatten)]
    pub violation: Violation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub check: Check,
    pub limit: u64,
    pub pairs_checked: u64,
    pub counterexamples: Vec<Counterexample>,
}

impl VerificationReport {
    pub fn is_clean(&self) -> bool {
        self.counterexamples.is_empty()
    }

    /// One `counterexample` record per line, then a `summary` record.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for c in &self.counterexamples {
            let mut rec = serde_json::to_value(c)?;
            rec["record"] = "counterexample".into();
            rec["check"] = serde_json::to_value(self.check)?;
            writeln!(out, "{rec}")?;
        }
        let summary = serde_json::json!({
            "record": "summary",
            "check": self.check,
            "limit": self.limit,
            "pairs_checked": self.pairs_checked,
            "counterexamples": self.counterexamples.len(),
        });
        writeln!(out, "{summary}")
    }
}

fn merge_columns(
    check: Check,
    limit: u64,
    columns: Vec<(u64, Vec<Counterexample>)>,
) -> VerificationReport {
    let pairs_checked = columns.iter().map(|(n, _)| n).sum();
    let counterexamples = columns.into_iter().flat_map(|(_, c)| c).collect();
    VerificationReport {
        check,
        limit,
        pairs_checked,
        counterexamples,
    }
}

fn check_limit(limit: u64) -> Result<()> {
    if limit < 2 {
        return Err(Error::InvalidArgument(format!(
            "verification limit must be at least 2, got {limit}"
        )));
    }
    Ok(())
}

/// Checks every coprime pair `1 ≤ a ≤ b ≤ limit` for exactly one solution.
///
/// Columns `b` run on the current rayon pool; the report is ordered by `(b, a)`.
pub fn verify_exactly_one(limit: u64) -> Result<VerificationReport> {
    check_limit(limit)?;
    let columns = (1..=limit)
        .into_par_iter()
        .map(|b| {
            let mut checked = 0;
            let mut bad = Vec::new();
            for a in (1..=b).filter(|&a| gcd_u64(a, b) == 1) {
                checked += 1;
                let (na, nb) = (Natural::from(a), Natural::from(b));
                let solutions = solve_brute(&na, &nb).expect("coprime positive pair");
                if solutions.len() != 1 {
                    bad.push(Counterexample {
                        a: na,
                        b: nb,
                        violation: Violation::SolutionCount { solutions },
                    });
                }
            }
            (checked, bad)
        })
        .collect();
    Ok(merge_columns(Check::ExactlyOne, limit, columns))
}

/// Compares [`gamma_criterion`] with [`gamma_oracle`] on every `1 ≤ a, b ≤ limit`.
pub fn verify_criterion(limit: u64) -> Result<VerificationReport> {
    check_limit(limit)?;
    let columns = (1..=limit)
        .into_par_iter()
        .map(|b| {
            let nb = Natural::from(b);
            let mut bad = Vec::new();
            for a in 1..=limit {
                let na = Natural::from(a);
                let criterion = gamma_criterion(&na, &nb).expect("positive pair");
                let oracle = gamma_oracle(&na, &nb).ok();
                if oracle != Some(criterion) {
                    bad.push(Counterexample {
                        a: na,
                        b: nb.clone(),
                        violation: Violation::Disagreement { criterion, oracle },
                    });
                }
            }
            (limit, bad)
        })
        .collect();
    Ok(merge_columns(Check::CriterionVsOracle, limit, columns))
}

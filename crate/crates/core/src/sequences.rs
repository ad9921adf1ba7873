//! Sequence families and the Δ operator.
//!
//! Sequences are 1-indexed. Δ of a sequence is the list of Γ(a_n, a_{n+1})
//! over consecutive terms. All terms are exact; nothing here touches floats.

use std::fs;
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{self, Natural};
use crate::error::{Error, Result};
use crate::gamma::{gamma_criterion, EquationTag};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum SequenceSpec {
    /// F_1 = F_2 = 1.
    Fibonacci,
    /// n^k.
    Power {
        k: u32,
    },
    /// ⌈2^(n+k−1) / (2^k + 1)⌉.
    CeilPow2 {
        k: u32,
    },
    /// a + (n − 1)·r.
    Arithmetic {
        a: Natural,
        r: Natural,
    },
    /// a·r^(n−1) + 1.
    ShiftedGeometric {
        a: Natural,
        r: Natural,
    },
    /// a_1 = a, a_2 = b, a_n = k·a_(n−1) + a_(n−2).
    Recurrence2 {
        a: Natural,
        b: Natural,
        k: Natural,
    },
    Explicit {
        terms: Vec<Natural>,
    },
}

impl SequenceSpec {
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: &str| Err(Error::InvalidSequence(msg.to_owned()));
        match self {
            SequenceSpec::Fibonacci => Ok(()),
            SequenceSpec::Power { k } if *k < 1 => fail("power requires k >= 1"),
            SequenceSpec::CeilPow2 { k } if *k < 1 => fail("ceilpow2 requires k >= 1"),
            SequenceSpec::Arithmetic { a, r } if a.is_zero() || r.is_zero() => {
                fail("arithmetic progression requires a >= 1 and r >= 1")
            }
            SequenceSpec::ShiftedGeometric { a, r } if a.is_zero() || *r < Natural::from(2u8) => {
                fail("shifted geometric progression requires a >= 1 and r >= 2")
            }
            SequenceSpec::Recurrence2 { a, b, k } if a.is_zero() || b.is_zero() || k.is_zero() => {
                fail("order-2 recurrence requires a, b, k >= 1")
            }
            SequenceSpec::Explicit { terms } if terms.iter().any(Natural::is_zero) => {
                fail("explicit sequences must have positive terms")
            }
            _ => Ok(()),
        }
    }

    /// Reads one decimal natural per line.
    pub fn load_explicit(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let terms = text
            .lines()
            .map(|l| l.strip_suffix('\r').unwrap_or(l))
            .filter(|l| !l.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Natural>>>()?;
        let spec = SequenceSpec::Explicit { terms };
        spec.validate()?;
        Ok(spec)
    }
}

/// A generator bound to one spec. Recurrence families memoize their prefix.
#[derive(Clone, Debug)]
pub struct Sequence {
    spec: SequenceSpec,
    memo: Vec<Natural>,
}

impl Sequence {
    pub fn new(spec: SequenceSpec) -> Result<Self> {
        spec.validate()?;
        let memo = match &spec {
            SequenceSpec::Fibonacci => vec![Natural::one(), Natural::one()],
            SequenceSpec::Recurrence2 { a, b, .. } => vec![a.clone(), b.clone()],
            _ => Vec::new(),
        };
        Ok(Sequence { spec, memo })
    }

    pub fn spec(&self) -> &SequenceSpec {
        &self.spec
    }

    pub fn term(&mut self, n: u64) -> Result<Natural> {
        if n == 0 {
            return Err(Error::InvalidArgument(
                "sequences are indexed from 1".into(),
            ));
        }
        let exponent = |e: u64| {
            u32::try_from(e).map_err(|_| Error::InvalidArgument(format!("index {n} is too large")))
        };
        let two = || Natural::from(2u8);
        Ok(match &self.spec {
            SequenceSpec::Fibonacci | SequenceSpec::Recurrence2 { .. } => {
                self.extend_recurrence(n)?;
                self.memo[(n - 1) as usize].clone()
            }
            SequenceSpec::Power { k } => Natural::from(n).pow(*k),
            SequenceSpec::CeilPow2 { k } => {
                let numerator = two().pow(exponent(n + u64::from(*k) - 1)?);
                let shift = two().pow(*k);
                let denominator = &shift + 1;
                (numerator + shift) / denominator
            }
            SequenceSpec::Arithmetic { a, r } => a + &(r * (n - 1)),
            SequenceSpec::ShiftedGeometric { a, r } => a * &r.pow(exponent(n - 1)?) + 1,
            SequenceSpec::Explicit { terms } => {
                terms
                    .get((n - 1) as usize)
                    .cloned()
                    .ok_or(Error::IndexOutOfRange {
                        index: n,
                        len: terms.len(),
                    })?
            }
        })
    }

    fn extend_recurrence(&mut self, n: u64) -> Result<()> {
        let k = match &self.spec {
            SequenceSpec::Fibonacci => Natural::one(),
            SequenceSpec::Recurrence2 { k, .. } => k.clone(),
            _ => unreachable!("only recurrences are memoized"),
        };
        let n = usize::try_from(n)
            .map_err(|_| Error::InvalidArgument(format!("index {n} is too large")))?;
        while self.memo.len() < n {
            let len = self.memo.len();
            let next = &k * &self.memo[len - 1] + &self.memo[len - 2];
            self.memo.push(next);
        }
        Ok(())
    }

    /// Terms `a_start ..= a_(start+len−1)`.
    pub fn window(&mut self, start: u64, len: u64) -> Result<Vec<Natural>> {
        (start..start + len).map(|n| self.term(n)).collect()
    }
}

pub fn term(spec: &SequenceSpec, n: u64) -> Result<Natural> {
    Sequence::new(spec.clone())?.term(n)
}

/// Γ(a_n, a_(n+1)) for `n = start .. start + tags.len()`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaSequence {
    pub start: u64,
    pub tags: Vec<EquationTag>,
}

/// One consecutive pair with its gcd and Γ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeltaRow {
    pub n: u64,
    pub a_n: Natural,
    pub a_next: Natural,
    pub gcd: Natural,
    pub gamma: EquationTag,
}

fn check_window(start: u64, count: u64) -> Result<()> {
    if start == 0 || count == 0 {
        return Err(Error::InvalidArgument(
            "delta windows need start >= 1 and count >= 1".into(),
        ));
    }
    Ok(())
}

/// Materializes `count + 1` terms, then evaluates each consecutive pair in parallel.
pub fn delta_rows(spec: &SequenceSpec, start: u64, count: u64) -> Result<Vec<DeltaRow>> {
    check_window(start, count)?;
    let terms = Sequence::new(spec.clone())?.window(start, count + 1)?;
    terms
        .par_windows(2)
        .enumerate()
        .map(|(i, pair)| {
            let (a_n, a_next) = (&pair[0], &pair[1]);
            Ok(DeltaRow {
                n: start + i as u64,
                gcd: arith::gcd(a_n, a_next)?,
                gamma: gamma_criterion(a_n, a_next)?,
                a_n: a_n.clone(),
                a_next: a_next.clone(),
            })
        })
        .collect()
}

pub fn delta(spec: &SequenceSpec, start: u64, count: u64) -> Result<DeltaSequence> {
    check_window(start, count)?;
    let terms = Sequence::new(spec.clone())?.window(start, count + 1)?;
    let tags = terms
        .par_windows(2)
        .map(|p| gamma_criterion(&p[0], &p[1]))
        .collect::<Result<_>>()?;
    Ok(DeltaSequence { start, tags })
}

pub fn gcd_consecutive(spec: &SequenceSpec, start: u64, count: u64) -> Result<Vec<Natural>> {
    check_window(start, count)?;
    let terms = Sequence::new(spec.clone())?.window(start, count + 1)?;
    terms.windows(2).map(|p| arith::gcd(&p[0], &p[1])).collect()
}

pub const DELTA_CSV_HEADER: &str = "n,a_n,a_{n+1},gcd,gamma";

pub fn write_delta_csv<W: Write>(rows: &[DeltaRow], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{DELTA_CSV_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{},{},{}", r.n, r.a_n, r.a_next, r.gcd, r.gamma)?;
    }
    Ok(())
}

pub fn write_delta_jsonl<W: Write>(rows: &[DeltaRow], mut out: W) -> std::io::Result<()> {
    for r in rows {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}

//! Pattern analytics over tag sequences.
//!
//! Covers run-length encoding, the point where Δ((n^k)) settles into
//! 1, 2, 1, 2, …, the truncated polynomial g(x) and threshold M_k that bound
//! that point, and the period of (Γ(k, n))_n for fixed k.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::Natural;
use crate::error::{Error, Result};
use crate::gamma::{gamma_criterion, EquationTag};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Run {
    pub tag: EquationTag,
    pub length: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunLengthPattern {
    pub runs: Vec<Run>,
}

impl RunLengthPattern {
    pub fn total_len(&self) -> u64 {
        self.runs.iter().map(|r| r.length).sum()
    }

    pub fn expand(&self) -> Vec<EquationTag> {
        self.runs
            .iter()
            .flat_map(|r| std::iter::repeat_n(r.tag, r.length as usize))
            .collect()
    }
}

/// Renders as `1x3 2x3 1x3`.
impl fmt::Display for RunLengthPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, r) in self.runs.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}x{}", r.tag, r.length)?;
        }
        Ok(())
    }
}

pub fn run_length(tags: &[EquationTag]) -> Result<RunLengthPattern> {
    if tags.is_empty() {
        return Err(Error::InvalidArgument(
            "cannot run-length encode an empty sequence".into(),
        ));
    }
    let mut runs: Vec<Run> = Vec::new();
    for &tag in tags {
        match runs.last_mut() {
            Some(last) if last.tag == tag => last.length += 1,
            _ => runs.push(Run { tag, length: 1 }),
        }
    }
    Ok(RunLengthPattern { runs })
}

pub fn is_constant(tags: &[EquationTag]) -> bool {
    tags.windows(2).all(|w| w[0] == w[1])
}

pub fn is_strictly_alternating(tags: &[EquationTag]) -> bool {
    tags.windows(2).all(|w| w[0] != w[1])
}

/// 1-based index of the earliest suffix that alternates 1, 2, 1, 2, … to the
/// end of the window and starts with 1.
pub fn alternation_onset(tags: &[EquationTag]) -> Option<usize> {
    if tags.is_empty() {
        return None;
    }
    let mut start = tags.len() - 1;
    while start > 0 && tags[start - 1] != tags[start] {
        start -= 1;
    }
    let first_one = if tags[start] == EquationTag::Eq1 {
        start
    } else {
        start + 1
    };
    (first_one < tags.len()).then_some(first_one + 1)
}

/// Integer polynomial with coefficients in ascending degree order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IntPolynomial {
    #[serde(serialize_with = "serialize_coefficients")]
    coefficients: Vec<BigInt>,
}

fn serialize_coefficients<S: serde::Serializer>(
    coefficients: &[BigInt],
    serializer: S,
) -> std::result::Result<S::Ok, S::Error> {
    serializer.collect_seq(coefficients.iter().map(|c| c.to_string()))
}

impl IntPolynomial {
    pub fn new(mut coefficients: Vec<BigInt>) -> Self {
        while coefficients.last().is_some_and(Zero::is_zero) {
            coefficients.pop();
        }
        IntPolynomial { coefficients }
    }

    pub fn from_i64(coefficients: &[i64]) -> Self {
        Self::new(coefficients.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `c·x^degree`.
    pub fn monomial(c: BigInt, degree: usize) -> Self {
        let mut coefficients = vec![BigInt::zero(); degree + 1];
        coefficients[degree] = c;
        Self::new(coefficients)
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coefficients
    }

    pub fn is_zero(&self) -> bool {
        self.coefficients.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coefficients.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&BigInt> {
        self.coefficients.last()
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coefficients
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// p(−x).
    pub fn reflect(&self) -> Self {
        Self::new(
            self.coefficients
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    pub fn add(&self, other: &Self) -> Self {
        let len = self.coefficients.len().max(other.coefficients.len());
        let zero = BigInt::zero();
        Self::new(
            (0..len)
                .map(|i| {
                    self.coefficients.get(i).unwrap_or(&zero)
                        + other.coefficients.get(i).unwrap_or(&zero)
                })
                .collect(),
        )
    }

    pub fn neg(&self) -> Self {
        Self::new(self.coefficients.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// `self · other mod x^keep`.
    pub fn mul_truncated(&self, other: &Self, keep: usize) -> Self {
        let mut out = vec![BigInt::zero(); keep];
        for (i, a) in self.coefficients.iter().enumerate().take(keep) {
            for (j, b) in other.coefficients.iter().enumerate().take(keep - i) {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// An integer `B` with no real root ≥ `B`: one past the ceiling of the
    /// Cauchy bound `1 + max|a_i| / |a_lead|`. `None` for the zero polynomial.
    pub fn cauchy_bound(&self) -> Option<BigInt> {
        let (lead, rest) = self.coefficients.split_last()?;
        let max = rest.iter().map(|c| c.abs()).max().unwrap_or_default();
        Some(BigInt::one() + max.div_ceil(&lead.abs()) + 1)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in self.coefficients.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mag = c.abs();
            match i {
                0 => write!(f, "{mag}")?,
                _ if mag.is_one() => {}
                _ => write!(f, "{mag}")?,
            }
            match i {
                0 => {}
                1 => f.write_str("x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

/// g(x) = (1 + x + … + x^(k−1))^k mod x^k.
pub fn g_polynomial(k: u32) -> Result<IntPolynomial> {
    if k == 0 {
        return Err(Error::InvalidArgument("g(x) requires k >= 1".into()));
    }
    let k = k as usize;
    let base = IntPolynomial::new(vec![BigInt::one(); k]);
    let mut acc = IntPolynomial::from_i64(&[1]);
    for _ in 0..k {
        acc = acc.mul_truncated(&base, k);
    }
    Ok(acc)
}

/// The threshold M_k with the data that certifies it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MkCertificate {
    pub k: u32,
    pub m_k: u64,
    pub g: IntPolynomial,
    /// Polynomials in n that must all be positive for every n ≥ M_k.
    pub constraints: Vec<IntPolynomial>,
    /// Every constraint is positive from here on by its root bound.
    pub root_bound: u64,
}

/// The sign conditions defining M_k, each written as `p(n) > 0`.
///
/// Odd k: `0 < n^k − g(n) < n^k` and `0 < g(−n) < n^k`.
/// Even k: `0 < n^k + g(−n) < n^k` and `0 < g(n) < n^k`.
pub fn mk_constraints(k: u32) -> Result<Vec<IntPolynomial>> {
    let g = g_polynomial(k)?;
    let g_neg = g.reflect();
    let nk = IntPolynomial::monomial(BigInt::one(), k as usize);
    Ok(if k % 2 == 1 {
        vec![nk.sub(&g), g.clone(), g_neg.clone(), nk.sub(&g_neg)]
    } else {
        vec![nk.add(&g_neg), g_neg.neg(), g.clone(), nk.sub(&g)]
    })
}

/// Smallest positive M such that every constraint holds for all n ≥ M.
///
/// Past each constraint's Cauchy bound the sign equals the leading
/// coefficient's, which must be positive; below the bound every integer is
/// checked directly.
pub fn mk_certificate(k: u32) -> Result<MkCertificate> {
    let constraints = mk_constraints(k)?;
    let mut bound = BigInt::one();
    for p in &constraints {
        let positive_lead = p.leading().is_some_and(Signed::is_positive);
        if !positive_lead {
            return Err(Error::InvalidArgument(format!(
                "constraint {p} is not eventually positive for k = {k}"
            )));
        }
        bound = bound.max(p.cauchy_bound().expect("nonzero polynomial"));
    }
    let root_bound = u64::try_from(&bound)
        .map_err(|_| Error::InvalidArgument(format!("root bound {bound} is too large")))?;

    let holds = |n: u64| {
        let n = BigInt::from(n);
        constraints.iter().all(|p| p.eval(&n).is_positive())
    };
    let last_failure = (1..=root_bound).rev().find(|&n| !holds(n));
    let m_k = last_failure.map_or(1, |n| n + 1);
    Ok(MkCertificate {
        k,
        m_k,
        g: g_polynomial(k)?,
        constraints,
        root_bound,
    })
}

pub fn compute_mk(k: u32) -> Result<u64> {
    mk_certificate(k).map(|c| c.m_k)
}

pub fn gamma_fixed_k(k: &Natural, n: &Natural) -> Result<EquationTag> {
    gamma_criterion(k, n)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PeriodReport {
    pub k: u64,
    pub period: u64,
    pub ones_per_period: u64,
    pub twos_per_period: u64,
    pub witness: Vec<EquationTag>,
    /// Number of terms the period was verified over; a multiple of `period`.
    pub window: u64,
}

/// The least period of (Γ(k, n))_{n ≥ 1}, searched among divisors of k
/// (k odd) or 2k (k even) and verified over the first `window` terms.
///
/// `window` is rounded down to a multiple of the divisor bound so the
/// verified span always holds whole periods.
pub fn detect_period(k: u64, window: u64) -> Result<PeriodReport> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    let min_window = k
        .checked_mul(4)
        .ok_or_else(|| Error::InvalidArgument(format!("k = {k} is too large")))?;
    if window < min_window {
        return Err(Error::InvalidArgument(format!(
            "window must be at least 4k = {min_window}, got {window}"
        )));
    }
    let bound = if k % 2 == 1 { k } else { 2 * k };
    let window = window - window % bound;

    let nk = Natural::from(k);
    let tags = (1..=window)
        .into_par_iter()
        .map(|n| gamma_fixed_k(&nk, &Natural::from(n)))
        .collect::<Result<Vec<_>>>()?;

    let period = (1..=bound)
        .filter(|t| bound % t == 0)
        .find(|&t| {
            let t = t as usize;
            tags.iter().zip(&tags[t..]).all(|(x, y)| x == y)
        })
        .ok_or(Error::NoPeriod { k, bound, window })?;

    let witness = tags[..period as usize].to_vec();
    let ones = witness.iter().filter(|t| **t == EquationTag::Eq1).count() as u64;
    Ok(PeriodReport {
        k,
        period,
        ones_per_period: ones,
        twos_per_period: period - ones,
        witness,
        window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{gcd_u64, theta};
    use crate::gamma::gamma_oracle;
    use crate::sequences::{delta, SequenceSpec};

    fn tags(v: &[u8]) -> Vec<EquationTag> {
        v.iter()
            .map(|&t| EquationTag::from_u8(t).unwrap())
            .collect()
    }

    fn n(v: u64) -> Natural {
        Natural::from(v)
    }

    fn binomial(n: u64, r: u64) -> BigInt {
        (0..r).fold(BigInt::one(), |acc, i| acc * (n - i) / (i + 1))
    }

    /// Expands the full product with no truncation, then drops high terms.
    fn g_by_full_expansion(k: usize) -> Vec<i128> {
        let mut acc = vec![1i128];
        for _ in 0..k {
            let mut next = vec![0i128; acc.len() + k - 1];
            for (i, a) in acc.iter().enumerate() {
                for j in 0..k {
                    next[i + j] += a;
                }
            }
            acc = next;
        }
        acc.truncate(k);
        acc
    }

    /// Brute-force g(n) from the definition, evaluated in i128.
    fn g_eval(coeffs: &[i128], n: i128) -> i128 {
        coeffs.iter().rev().fold(0, |acc, c| acc * n + c)
    }

    fn mk_conditions_hold(k: u32, coeffs: &[i128], n: i128) -> bool {
        let nk = n.pow(k);
        let (gp, gm) = (g_eval(coeffs, n), g_eval(coeffs, -n));
        if k % 2 == 1 {
            0 < nk - gp && nk - gp < nk && 0 < gm && gm < nk
        } else {
            0 < nk + gm && nk + gm < nk && 0 < gp && gp < nk
        }
    }

    /// Smallest M whose predecessor fails while every n in [M, M + 1000] passes.
    fn naive_mk(k: u32) -> u64 {
        let coeffs = g_by_full_expansion(k as usize);
        let mut m = 1u64;
        loop {
            let window_ok = (m..=m + 1000).all(|v| mk_conditions_hold(k, &coeffs, v as i128));
            let pred_fails = m == 1 || !mk_conditions_hold(k, &coeffs, (m - 1) as i128);
            if window_ok && pred_fails {
                return m;
            }
            m += 1;
        }
    }

    #[test]
    fn run_length_examples() {
        let rl = run_length(&tags(&[1, 1, 1, 2, 2, 2, 1, 1, 1])).unwrap();
        assert_eq!(rl.to_string(), "1x3 2x3 1x3");
        let rl = run_length(&tags(&[1, 2, 1, 2])).unwrap();
        assert_eq!(rl.to_string(), "1x1 2x1 1x1 2x1");
        let d = delta(&SequenceSpec::Power { k: 4 }, 1, 10).unwrap();
        let rl = run_length(&d.tags).unwrap();
        assert_eq!(rl.to_string(), "1x1 2x1 1x3 2x2 1x1 2x2");
        assert_eq!(rl.total_len(), 10);
        assert_eq!(rl.expand(), d.tags);
        assert!(run_length(&[]).is_err());
    }

    #[test]
    fn onset_examples() {
        assert_eq!(alternation_onset(&tags(&[1, 2, 1, 2, 1, 2])), Some(1));
        assert_eq!(alternation_onset(&tags(&[2, 2, 1, 2, 1, 2])), Some(3));
        assert_eq!(alternation_onset(&tags(&[2, 1, 2])), Some(2));
        assert_eq!(alternation_onset(&tags(&[1, 2, 2])), None);
        assert_eq!(alternation_onset(&tags(&[1])), Some(1));
        assert_eq!(alternation_onset(&[]), None);
        let m4 = compute_mk(4).unwrap();
        let d = delta(&SequenceSpec::Power { k: 4 }, 1, 40).unwrap();
        assert!(alternation_onset(&d.tags).unwrap() as u64 <= m4 + 1);
    }

    #[test]
    fn g_examples() {
        assert_eq!(g_polynomial(1).unwrap(), IntPolynomial::from_i64(&[1]));
        assert_eq!(g_polynomial(2).unwrap(), IntPolynomial::from_i64(&[1, 2]));
        assert_eq!(
            g_polynomial(3).unwrap(),
            IntPolynomial::from_i64(&[1, 3, 6])
        );
        assert_eq!(g_polynomial(3).unwrap().to_string(), "1 + 3x + 6x^2");
        assert!(g_polynomial(0).is_err());
    }

    #[test]
    fn g_matches_full_expansion_and_binomials() {
        for k in 1..=12u32 {
            let g = g_polynomial(k).unwrap();
            let full = g_by_full_expansion(k as usize);
            let got: Vec<BigInt> = g.coefficients().to_vec();
            let expected: Vec<BigInt> = full.iter().map(|&c| BigInt::from(c)).collect();
            assert_eq!(got, expected, "k={k}");
            for (j, c) in got.iter().enumerate() {
                // below x^k the truncation never bites: compositions of j into k parts
                assert_eq!(*c, binomial(j as u64 + k as u64 - 1, k as u64 - 1));
            }
        }
    }

    #[test]
    fn mk_examples() {
        assert_eq!(compute_mk(1).unwrap(), 2);
        assert_eq!(compute_mk(2).unwrap(), 3);
        assert_eq!(compute_mk(3).unwrap(), 7);
        assert!(compute_mk(0).is_err());
    }

    #[test]
    fn mk_matches_naive_scan() {
        for k in 1..=8 {
            assert_eq!(compute_mk(k).unwrap(), naive_mk(k), "k={k}");
        }
    }

    #[test]
    fn mk_certificate_bounds_cover_the_answer() {
        // i128 holds n^k up to the root bound for k ≤ 8
        for k in 1..=8 {
            let c = mk_certificate(k).unwrap();
            assert!(c.m_k <= c.root_bound + 1);
            let coeffs: Vec<i128> =
                c.g.coefficients()
                    .iter()
                    .map(|v| i128::try_from(v).unwrap())
                    .collect();
            for v in c.m_k..=c.root_bound + 50 {
                assert!(mk_conditions_hold(k, &coeffs, v as i128));
            }
        }
    }

    #[test]
    fn power_delta_alternates_by_mk_plus_one() {
        for k in 1..=6u32 {
            let m = compute_mk(k).unwrap();
            let window = m + 20;
            let d = delta(&SequenceSpec::Power { k }, 1, window).unwrap();
            let onset = alternation_onset(&d.tags).unwrap() as u64;
            assert!(onset <= m + 1, "k={k} onset={onset} M={m}");
        }
    }

    #[test]
    fn polynomial_ops() {
        let p = IntPolynomial::from_i64(&[1, -3, 0, 2]);
        assert_eq!(p.degree(), Some(3));
        assert_eq!(p.eval(&BigInt::from(2)), BigInt::from(1 - 6 + 16));
        assert_eq!(p.reflect(), IntPolynomial::from_i64(&[1, 3, 0, -2]));
        assert_eq!(p.sub(&p), IntPolynomial::new(vec![]));
        assert!(p.sub(&p).is_zero());
        assert_eq!(p.to_string(), "1 - 3x + 2x^3");
        assert_eq!(IntPolynomial::from_i64(&[0, -1]).to_string(), "-x");
        // roots of 2x^3 - 3x + 1 are 1, (−1 ± √3)/2; bound must exceed all of them
        let b = p.cauchy_bound().unwrap();
        assert!(b >= BigInt::from(2));
    }

    #[test]
    fn fixed_k_examples() {
        let cases = [(3, 1, 1u8), (3, 2, 2), (3, 3, 1), (2, 3, 2)];
        for (k, m, t) in cases {
            let tag = EquationTag::from_u8(t).unwrap();
            assert_eq!(gamma_oracle(&n(k), &n(m)).unwrap(), tag);
            assert_eq!(gamma_fixed_k(&n(k), &n(m)).unwrap(), tag);
        }
        for k in 1..50 {
            assert_eq!(gamma_fixed_k(&n(k), &n(k)).unwrap(), EquationTag::Eq1);
        }
    }

    #[test]
    fn period_examples() {
        let oracle: Vec<_> = (1..=12)
            .map(|m| gamma_oracle(&n(3), &n(m)).unwrap())
            .collect();
        assert_eq!(&oracle[..3], tags(&[1, 2, 1]).as_slice());
        let r = detect_period(3, 12).unwrap();
        assert_eq!(r.period, 3);
        assert_eq!(r.witness, tags(&[1, 2, 1]));
        assert_eq!((r.ones_per_period, r.twos_per_period), (2, 1));

        let oracle: Vec<_> = (1..=16)
            .map(|m| gamma_oracle(&n(2), &n(m)).unwrap())
            .collect();
        assert_eq!(&oracle[..4], tags(&[1, 1, 2, 1]).as_slice());
        let r = detect_period(2, 16).unwrap();
        assert_eq!(r.period, 4);
        assert_eq!(r.witness, tags(&[1, 1, 2, 1]));
        assert_eq!((r.ones_per_period, r.twos_per_period), (3, 1));

        let r = detect_period(1, 4).unwrap();
        assert_eq!(r.period, 1);
        assert_eq!(r.witness, tags(&[1]));
        assert_eq!((r.ones_per_period, r.twos_per_period), (1, 0));

        assert!(detect_period(3, 11).is_err());
        assert!(detect_period(0, 10).is_err());
    }

    #[test]
    fn period_window_is_whole_periods() {
        let r = detect_period(5, 23).unwrap();
        assert_eq!(r.window, 20);
        assert_eq!(r.window % r.period, 0);
    }

    #[test]
    fn period_counts() {
        for k in 1..=30u64 {
            let window = if k % 2 == 1 { 6 * k } else { 8 * k };
            let r = detect_period(k, window).unwrap();
            let (expected_period, surplus) = if k % 2 == 1 { (k, 1) } else { (2 * k, 2) };
            assert_eq!(r.period, expected_period, "k={k}");
            assert_eq!(r.ones_per_period, r.twos_per_period + surplus, "k={k}");
        }
    }

    #[test]
    fn reflection_identity_for_odd_k() {
        for k in (3..=99u64).step_by(2) {
            for s in 1..=(k - 1) / 2 {
                if k % s == 0 {
                    continue;
                }
                let r = gcd_u64(k, s);
                let sum = theta(&n(s), &n(k)).unwrap() + theta(&n(k - s), &n(k)).unwrap();
                assert_eq!(sum, n(k / r), "k={k} s={s}");
            }
        }
    }
}

//! Empirical density of Γ = 1 over the triangle 1 ≤ a ≤ b ≤ x.
//!
//! One sweep over columns `b = 1..=x_max` yields the running counts at every
//! requested checkpoint. Columns are evaluated on the current rayon pool and
//! summed in column order, so results do not depend on the worker count.
//!
//! Besides Γ on the reduced pair, each column also tallies whether
//! `a·x + b·y = (a − 1)(b − 1)/2` is solvable for the *unreduced* pair, and
//! keeps diagonal counts separate so either diagonal convention can be read
//! off the same scan.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{gcd_u64, mod_inverse_u64};
use crate::error::{Error, Result};
use crate::gamma::{gamma_u64, EquationTag};

/// Pair counts over some region of the triangle.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub pairs: u64,
    /// Pairs with Γ(a, b) = 1.
    pub gamma1: u64,
    /// Pairs whose unreduced equation (1) has a nonnegative solution.
    pub unreduced_eq1: u64,
}

impl Tally {
    fn add(&mut self, other: &Tally) {
        self.pairs += other.pairs;
        self.gamma1 += other.gamma1;
        self.unreduced_eq1 += other.unreduced_eq1;
    }

    fn minus(&self, other: &Tally) -> Tally {
        Tally {
            pairs: self.pairs - other.pairs,
            gamma1: self.gamma1 - other.gamma1,
            unreduced_eq1: self.unreduced_eq1 - other.unreduced_eq1,
        }
    }

    fn record(&mut self, a: u64, b: u64) {
        self.pairs += 1;
        self.gamma1 += u64::from(gamma_u64(a, b) == EquationTag::Eq1);
        self.unreduced_eq1 += u64::from(unreduced_eq1_solvable(a, b));
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Diagonal {
    Include,
    Exclude,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// Γ(a, b) = 1 on the reduced pair.
    Gamma,
    /// Equation (1) solvable for (a, b) as given.
    UnreducedEq1,
}

/// An exact fraction of pair counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Ratio {
    pub numerator: u64,
    pub denominator: u64,
}

impl Ratio {
    pub fn to_f64(self) -> f64 {
        self.numerator as f64 / self.denominator as f64
    }

    /// Fixed-point rendering rounded half to even. `None` when the
    /// denominator is zero.
    pub fn to_decimal(self, places: u32) -> Option<String> {
        if self.denominator == 0 {
            return None;
        }
        let den = u128::from(self.denominator);
        let scale = 10u128.pow(places);
        let scaled = u128::from(self.numerator) * scale;
        let (mut q, r) = (scaled / den, scaled % den);
        if 2 * r > den || (2 * r == den && q % 2 == 1) {
            q += 1;
        }
        let (int, frac) = (q / scale, q % scale);
        Some(if places == 0 {
            int.to_string()
        } else {
            format!("{int}.{frac:0width$}", width = places as usize)
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DensitySample {
    pub x: u64,
    pub coprime_only: bool,
    /// Counts over 1 ≤ a ≤ b ≤ x (restricted to gcd(a, b) = 1 when `coprime_only`).
    pub all: Tally,
    /// The a = b part of `all`.
    pub diagonal: Tally,
}

impl DensitySample {
    pub fn total_pairs(&self) -> u64 {
        self.all.pairs
    }

    pub fn gamma1_pairs(&self) -> u64 {
        self.all.gamma1
    }

    /// Γ = 1 fraction with the diagonal included: H(x), or G(x) when coprime-only.
    pub fn ratio(&self) -> Ratio {
        self.ratio_with(Diagonal::Include, Criterion::Gamma)
    }

    pub fn ratio_with(&self, diagonal: Diagonal, criterion: Criterion) -> Ratio {
        let tally = match diagonal {
            Diagonal::Include => self.all,
            Diagonal::Exclude => self.all.minus(&self.diagonal),
        };
        let numerator = match criterion {
            Criterion::Gamma => tally.gamma1,
            Criterion::UnreducedEq1 => tally.unreduced_eq1,
        };
        Ratio {
            numerator,
            denominator: tally.pairs,
        }
    }
}

/// Whether `a·x + b·y = (a − 1)(b − 1)/2` has a nonnegative solution for the
/// pair exactly as given, without dividing out gcd(a, b).
pub fn unreduced_eq1_solvable(a: u64, b: u64) -> bool {
    assert!(a != 0 && b != 0, "pair members must be positive");
    let product = u128::from(a - 1) * u128::from(b - 1);
    if product % 2 == 1 {
        return false;
    }
    let target = product / 2;
    let d = gcd_u64(a, b);
    if target % u128::from(d) != 0 {
        return false;
    }
    let (a, b, target) = (a / d, b / d, target / u128::from(d));
    if a == 1 {
        return true;
    }
    // least y ≥ 0 with b·y ≡ target (mod a); solvable iff it fits under the target
    let inv = mod_inverse_u64(b, a).expect("reduced members are coprime");
    let y = (target % u128::from(a)) * u128::from(inv) % u128::from(a);
    u128::from(b) * y <= target
}

fn column(b: u64, coprime_only: bool) -> (Tally, Tally) {
    let mut all = Tally::default();
    for a in 1..=b {
        if coprime_only && gcd_u64(a, b) != 1 {
            continue;
        }
        all.record(a, b);
    }
    let mut diagonal = Tally::default();
    if !coprime_only || b == 1 {
        diagonal.record(b, b);
    }
    (all, diagonal)
}

/// Evenly spaced checkpoints `⌈i·x_max / samples⌉` for `i = 1..=samples`,
/// deduplicated; always ends at `x_max`.
pub fn even_checkpoints(x_max: u64, samples: u64) -> Vec<u64> {
    let mut out: Vec<u64> = (1..=samples)
        .map(|i| {
            let num = u128::from(i) * u128::from(x_max);
            num.div_ceil(u128::from(samples)) as u64
        })
        .collect();
    out.dedup();
    out
}

pub fn density_scan(
    x_max: u64,
    checkpoints: &[u64],
    coprime_only: bool,
) -> Result<Vec<DensitySample>> {
    if x_max == 0 {
        return Err(Error::InvalidArgument("x_max must be at least 1".into()));
    }
    if checkpoints.windows(2).any(|w| w[0] > w[1]) {
        return Err(Error::InvalidArgument("checkpoints must be sorted".into()));
    }
    if let Some(bad) = checkpoints.iter().find(|&&c| c == 0 || c > x_max) {
        return Err(Error::InvalidArgument(format!(
            "checkpoint {bad} is outside 1..={x_max}"
        )));
    }

    let columns: Vec<(Tally, Tally)> = (1..=x_max)
        .into_par_iter()
        .map(|b| column(b, coprime_only))
        .collect();

    let mut samples = Vec::with_capacity(checkpoints.len());
    let mut pending = checkpoints.iter().peekable();
    let (mut all, mut diagonal) = (Tally::default(), Tally::default());
    for (b, (col, diag)) in (1..=x_max).zip(&columns) {
        all.add(col);
        diagonal.add(diag);
        while pending.next_if(|&&c| c == b).is_some() {
            samples.push(DensitySample {
                x: b,
                coprime_only,
                all,
                diagonal,
            });
        }
    }
    Ok(samples)
}

pub const CSV_HEADER: &str = "x,total_pairs,gamma1_pairs,ratio";

pub fn write_csv<W: Write>(samples: &[DensitySample], mut out: W) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for s in samples {
        let ratio = s.ratio().to_decimal(8).unwrap_or_else(|| "nan".into());
        writeln!(
            out,
            "{},{},{},{}",
            s.x,
            s.total_pairs(),
            s.gamma1_pairs(),
            ratio
        )?;
    }
    Ok(())
}

pub fn emit_csv(samples: &[DensitySample], destination: impl AsRef<Path>) -> Result<()> {
    let path = destination.as_ref();
    if samples.is_empty() {
        return Err(Error::InvalidArgument("no samples to write".into()));
    }
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_csv(samples, &mut out)
        .and_then(|_| out.flush())
        .map_err(|e| Error::io(path, e))
}

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 20.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 50.0;

fn nice_step(span: u64) -> u64 {
    let raw = (span / 10).max(1);
    let mag = 10u64.pow(raw.ilog10());
    [1, 2, 5, 10]
        .into_iter()
        .map(|m| m * mag)
        .find(|&s| s >= raw)
        .unwrap_or(10 * mag)
}

/// A standalone SVG: ratio against x, vertical axis fixed to [0, 1].
pub fn render_svg(samples: &[DensitySample]) -> String {
    let x_max = samples.iter().map(|s| s.x).max().unwrap_or(1).max(1);
    let plot_w = WIDTH - LEFT - RIGHT;
    let plot_h = HEIGHT - TOP - BOTTOM;
    let px = |x: f64| LEFT + plot_w * x / x_max as f64;
    let py = |y: f64| TOP + plot_h * (1.0 - y);
    let name = if samples.first().is_some_and(|s| s.coprime_only) {
        "G(x)"
    } else {
        "H(x)"
    };

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">{name} for 1 ≤ x ≤ {x_max}</text>"#,
        LEFT + plot_w / 2.0,
        TOP - 10.0
    );

    // axes
    let (x0, y0, x1, y1) = (px(0.0), py(0.0), px(x_max as f64), py(1.0));
    let _ = writeln!(
        svg,
        r#"<g stroke="black" stroke-width="1"><line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}"/><line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}"/></g>"#
    );
    for i in 0..=10 {
        let v = f64::from(i) / 10.0;
        let y = py(v);
        let _ = writeln!(
            svg,
            r##"<line x1="{}" y1="{y}" x2="{x0}" y2="{y}" stroke="black"/><line x1="{x0}" y1="{y}" x2="{x1}" y2="{y}" stroke="#ddd"/><text x="{}" y="{}" text-anchor="end">{v:.1}</text>"##,
            x0 - 5.0,
            x0 - 8.0,
            y + 4.0
        );
    }
    let step = nice_step(x_max);
    for t in (0..=x_max).step_by(step as usize) {
        let x = px(t as f64);
        let _ = writeln!(
            svg,
            r#"<line x1="{x}" y1="{y0}" x2="{x}" y2="{}" stroke="black"/><text x="{x}" y="{}" text-anchor="middle">{t}</text>"#,
            y0 + 5.0,
            y0 + 18.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">x</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 10.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{}" text-anchor="middle" transform="rotate(-90 15 {})">ratio</text>"#,
        TOP + plot_h / 2.0,
        TOP + plot_h / 2.0
    );

    let points: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.ratio().denominator > 0)
        .map(|s| (px(s.x as f64), py(s.ratio().to_f64())))
        .collect();
    let path: Vec<String> = points
        .iter()
        .map(|(x, y)| format!("{x:.2},{y:.2}"))
        .collect();
    let _ = writeln!(
        svg,
        r#"<polyline fill="none" stroke="steelblue" stroke-width="1" points="{}"/>"#,
        path.join(" ")
    );
    let _ = writeln!(svg, r#"<g fill="steelblue">"#);
    for (x, y) in &points {
        let _ = writeln!(svg, r#"<circle cx="{x:.2}" cy="{y:.2}" r="1.5"/>"#);
    }
    svg.push_str("</g>\n</svg>\n");
    svg
}

pub fn emit_svg(samples: &[DensitySample], destination: impl AsRef<Path>) -> Result<()> {
    let path = destination.as_ref();
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(
            "a plot needs at least two samples".into(),
        ));
    }
    std::fs::write(path, render_svg(samples)).map_err(|e| Error::io(path, e))
}

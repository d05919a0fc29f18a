//! Branching statistics and dimension estimates.

mod logs;

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::ops::RangeInclusive;

use num::bigint::{BigInt, BigUint};
use num::{Integer, Signed};

use crate::algebra::{format_rational, Elem, LaurentVector, Rational};
use crate::cantor::CantorTree;
use crate::error::{Error, Result};

pub use logs::LogValue;

/// `floor(N^n - R3 N^{n - 1/(n+1)})` for `N = q^{(n+1) M}`.
pub fn regularized_branching(q: u32, m: i64, n: usize, r3: Rational) -> Result<BigUint> {
    if r3.is_negative() || m <= 0 {
        return Err(Error::Precondition("need R3 >= 0 and M > 0".into()));
    }
    let (n, m) = (n as u32, m as u32);
    let b = BigInt::from(q);
    let full = b.pow(n * (n + 1) * m);
    let lower = b.pow(m * (n * n + n - 1));
    let num = full * BigInt::from(*r3.denom()) - lower * BigInt::from(*r3.numer());
    let fl = num.div_floor(&BigInt::from(*r3.denom()));
    fl.to_biguint()
        .filter(|v| *v >= BigUint::from(1u32))
        .ok_or_else(|| Error::Precondition("N^n - R3 N^(n-1/(n+1)) is below 1".into()))
}

/// `log floor(N^n - R3 N^{n-1/(n+1)}) / log N * (n+1) / (n lambda)`.
pub fn theoretical_lower_bound(
    q: u32,
    m: i64,
    r3: Rational,
    n: usize,
    lambda: Rational,
) -> Result<LogValue> {
    let b = regularized_branching(q, m, n, r3)?;
    let p = (n as i64 + 1) * m;
    let nq = n as i64;
    Ok(LogValue::log(q, b).scale(Rational::new(nq + 1, p * nq) / lambda))
}

/// Running `alpha_l = log(b_1 ... b_l) / (l log N)` for `l = 1..=b.len()`.
pub fn mass_alpha_of(q: u32, log_n: i64, b: &[u128]) -> Vec<LogValue> {
    let mut counts: BTreeMap<u128, i64> = BTreeMap::new();
    let mut out = Vec::with_capacity(b.len());
    for (i, &bl) in b.iter().enumerate() {
        *counts.entry(bl).or_insert(0) += 1;
        let l = i as i64 + 1;
        let mut v = LogValue::rational(q, Rational::from_integer(0));
        for (&arg, &c) in &counts {
            v = v.add(&LogValue::log(q, BigUint::from(arg)).scale(Rational::new(c, l * log_n)));
        }
        out.push(v);
    }
    out
}

pub fn mass_alpha(tree: &CantorTree) -> Vec<LogValue> {
    let s = &tree.schedule;
    mass_alpha_of(s.q, s.digits_per_level() as i64, &tree.b_sequence())
}

/// Least-squares fit of `log_q(count)` against the scale exponent `m`.
#[derive(Clone, Debug, PartialEq)]
pub struct BoxEstimate {
    pub scales: (i64, i64),
    /// `(m, log_q count)`.
    pub counts: Vec<(i64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square deviation from the fitted line.
    pub residual: f64,
}

fn fit(scales: (i64, i64), counts: Vec<(i64, f64)>) -> Result<BoxEstimate> {
    if counts.len() < 2 {
        return Err(Error::Precondition("need at least two scales".into()));
    }
    let k = counts.len() as f64;
    let mx = counts.iter().map(|c| c.0 as f64).sum::<f64>() / k;
    let my = counts.iter().map(|c| c.1).sum::<f64>() / k;
    let sxx: f64 = counts.iter().map(|c| (c.0 as f64 - mx).powi(2)).sum();
    let sxy: f64 = counts.iter().map(|c| (c.0 as f64 - mx) * (c.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = (counts
        .iter()
        .map(|c| (c.1 - intercept - slope * c.0 as f64).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();
    Ok(BoxEstimate {
        scales,
        counts,
        slope,
        intercept,
        residual,
    })
}

/// Counts of occupied balls of radius `q^{-m}` among `points`.
pub fn box_dimension(
    q: u32,
    points: &[LaurentVector],
    scales: RangeInclusive<i64>,
) -> Result<BoxEstimate> {
    if points.len() < (q * q) as usize {
        return Err(Error::Precondition(format!(
            "{} points, need at least q^2 = {}",
            points.len(),
            q * q
        )));
    }
    let (lo, hi) = (*scales.start(), *scales.end());
    if lo < 1 {
        return Err(Error::Precondition("scales start at m = 1".into()));
    }
    let digits = points
        .iter()
        .map(|x| {
            x.coords()
                .iter()
                .map(|c| (0..hi).map(|j| c.coeff(-j)).collect::<Result<Vec<Elem>>>())
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let lq = (q as f64).ln();
    let counts = (lo..=hi)
        .map(|m| {
            let set: HashSet<Vec<&[Elem]>> = digits
                .iter()
                .map(|d| d.iter().map(|c| &c[..m as usize]).collect())
                .collect();
            (m, (set.len() as f64).ln() / lq)
        })
        .collect();
    fit((lo, hi), counts)
}

/// Box counts of the regularized tree at the level scales `m = (n+1) M l`,
/// where `F_l` has `b_1 ... b_l` cubes of side `q^{-m}`; the two coarsest
/// and two finest levels are left out.
pub fn tree_box_dimension(tree: &CantorTree) -> Result<BoxEstimate> {
    let s = &tree.schedule;
    let p = s.digits_per_level() as i64;
    let b = tree.b_sequence();
    let lq = (s.q as f64).ln();
    let mut acc = 0.0;
    let mut counts = Vec::new();
    for (i, &bl) in b.iter().enumerate() {
        acc += (bl as f64).ln() / lq;
        let l = i as i64 + 1;
        if l > 2 && l + 2 <= tree.depth {
            counts.push((p * l, acc));
        }
    }
    fit((3 * p, (tree.depth - 2) * p), counts)
}

#[derive(Clone, Debug)]
pub struct DimensionReport {
    pub q: u32,
    pub n: usize,
    pub b: Vec<u128>,
    pub alpha: Vec<LogValue>,
    /// `alpha` at the levels `l_k^-` and `l_k^+` reached by the tree.
    pub checkpoints: Vec<(String, i64, LogValue)>,
    pub bound: LogValue,
    pub box_count: BoxEstimate,
    /// `(n+1) / lambda_psi`.
    pub target: Rational,
}

impl DimensionReport {
    pub fn from_tree(tree: &CantorTree) -> Result<Self> {
        let s = &tree.schedule;
        let (lambda, _) = s.psi.lambda_gamma();
        let alpha = mass_alpha(tree);
        let mut checkpoints = Vec::new();
        for e in &s.epochs {
            for (name, l) in [
                (format!("l_{}^-", e.k), e.l_minus),
                (format!("l_{}^+", e.k), e.l_plus),
            ] {
                if l >= 1 && l <= tree.depth {
                    checkpoints.push((name, l, alpha[l as usize - 1].clone()));
                }
            }
        }
        Ok(DimensionReport {
            q: s.q,
            n: s.n(),
            b: tree.b_sequence(),
            checkpoints,
            bound: theoretical_lower_bound(s.q, s.constants.m, s.constants.r3, s.n(), lambda)?,
            box_count: tree_box_dimension(tree)?,
            target: Rational::from_integer(s.n() as i64 + 1) / lambda,
            alpha,
        })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "levels {}", self.b.len());
        if let Some(a) = self.alpha.last() {
            let _ = writeln!(out, "alpha_L {a}");
        }
        for (name, l, a) in &self.checkpoints {
            let _ = writeln!(out, "alpha at {name} = {l}: {a}");
        }
        let _ = writeln!(out, "theoretical bound {}", self.bound);
        let bc = &self.box_count;
        let _ = writeln!(
            out,
            "box count slope {:.6} on m in [{}, {}], residual {:.6}",
            bc.slope, bc.scales.0, bc.scales.1, bc.residual
        );
        let _ = writeln!(out, "target {}", format_rational(self.target));
        out
    }

    /// Columns `l,b_l,alpha_l`.
    pub fn alpha_csv(&self) -> String {
        let mut out = String::from("l,b_l,alpha_l\n");
        for (i, (b, a)) in self.b.iter().zip(&self.alpha).enumerate() {
            let _ = writeln!(out, "{},{b},{:.9}", i + 1, a.to_f64());
        }
        out
    }

    /// Columns `m,log_q_count`.
    pub fn counts_csv(&self) -> String {
        let mut out = String::from("m,log_q_count\n");
        for (m, c) in &self.box_count.counts {
            let _ = writeln!(out, "{m},{c:.9}");
        }
        out
    }
}

/// `alpha_l <= n` at every level.
pub fn alpha_within_bounds(alpha: &[LogValue], n: usize) -> bool {
    alpha.iter().all(|a| a.to_f64() <= n as f64 + 1e-12)
}

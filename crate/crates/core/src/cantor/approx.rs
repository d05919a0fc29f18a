//! Best approximations by denominator degree, and the two clauses of
//! exact approximation order.

use std::fmt::Write as _;

use crate::algebra::text::format_poly;
use crate::algebra::{floor, Deg, FieldSpec, LaurentVector, Poly, Rational, Top};
use crate::dynamics::embedding_rows;
use crate::error::{Error, Result};
use crate::lattice::{cmp_vectors, normalize_vector, ShiftedLattice};
use crate::template::PsiFunction;

/// `min` over monic `g` of degree `d` and all `f` of `log_q d(x, f/g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ApproxEntry {
    pub d: i64,
    pub log_dist: Deg,
    pub g: Poly,
    pub f: Vec<Poly>,
}

/// Default cap on the shift sweep of [`best_approx_table`].
pub const SWEEP_BUDGET: i64 = 1 << 22;

fn raise(field: &FieldSpec, v: &[Poly], d: i64) -> (Poly, Vec<Poly>) {
    let v = normalize_vector(field, v);
    let k = d as usize - v[0].degree().expect("g is nonzero");
    (v[0].shl(k), v[1..].iter().map(|p| p.shl(k)).collect())
}

/// Exact table for `d = 0..=d_max`. With shifts `(-delta, 0, ..., 0)` let
/// `B(delta)` be the least `deg g` over reduced rows whose first entry
/// attains the shifted norm; `B` is non-decreasing and the entry at `d` is
/// `-max { delta : B(delta) <= d }`.
pub fn best_approx_table(
    field: &FieldSpec,
    x: &LaurentVector,
    d_max: i64,
) -> Result<Vec<ApproxEntry>> {
    if !x.in_unit_ball() {
        return Err(Error::Precondition("x must lie in the unit ball".into()));
    }
    let n = x.dim();
    let mut lat = ShiftedLattice::new(field, embedding_rows(field, x), vec![0; n + 1])?;
    let mut out = Vec::new();
    let mut prev: Option<(i64, Vec<Poly>)> = None;
    let mut last_b = 0;
    for delta in 0.. {
        if delta > SWEEP_BUDGET {
            return Err(Error::BudgetExceeded {
                needed: delta as u128,
                budget: SWEEP_BUDGET as u128,
            });
        }
        let mut shifts = vec![0; n + 1];
        shifts[0] = -delta;
        lat.set_shifts(shifts);
        lat.reduce_in_place()?;
        let leads = lat.leads()?;
        let mut best: Option<(i64, Vec<Poly>, bool)> = None;
        for (row, lead) in lat.rows().iter().zip(&leads) {
            let Some(dg) = row.coeffs[0].degree() else {
                continue;
            };
            let dg = dg as i64;
            if dg - delta != lead.deg {
                continue;
            }
            let exact = row.entries[1..]
                .iter()
                .all(|e| e.top_info() == Top::Known(Deg::NegInf));
            let w = normalize_vector(field, &row.coeffs);
            let better = match &best {
                None => true,
                Some((bd, bw, _)) => dg < *bd || (dg == *bd && cmp_vectors(&w, bw).is_lt()),
            };
            if better {
                best = Some((dg, w, exact));
            }
        }
        let b = best.as_ref().map_or(i64::MAX, |b| b.0);
        if b < last_b {
            return Err(Error::Precondition(format!(
                "B decreased at delta = {delta}"
            )));
        }
        last_b = b;
        if let Some((pd, pw)) = &prev {
            let next = out.len() as i64;
            for d in next..b.min(d_max + 1) {
                let (g, f) = raise(field, pw, d);
                out.push(ApproxEntry {
                    d,
                    log_dist: Deg::Fin(-pd),
                    g,
                    f,
                });
            }
        }
        if out.len() as i64 > d_max {
            break;
        }
        match best {
            Some((_, w, true)) => {
                for d in out.len() as i64..=d_max {
                    let (g, f) = raise(field, &w, d);
                    out.push(ApproxEntry {
                        d,
                        log_dist: Deg::NegInf,
                        g,
                        f,
                    });
                }
                break;
            }
            Some((_, w, false)) => prev = Some((delta, w)),
            None => {}
        }
    }
    Ok(out)
}

/// The same table by enumerating every monic `g` of degree `d`; `f` is the
/// polynomial part of `g x`.
pub fn best_approx_bruteforce(
    field: &FieldSpec,
    x: &LaurentVector,
    d_max: i64,
    budget: u128,
) -> Result<Vec<ApproxEntry>> {
    let q = field.q() as u128;
    let needed: u128 = (0..=d_max).map(|d| q.pow(d as u32)).sum();
    if needed > budget {
        return Err(Error::BudgetExceeded { needed, budget });
    }
    let mut out = Vec::new();
    for d in 0..=d_max {
        let mut best: Option<ApproxEntry> = None;
        for code in 0..q.pow(d as u32) {
            let mut coeffs = Vec::with_capacity(d as usize + 1);
            let mut c = code;
            for _ in 0..d {
                coeffs.push((c % q) as u8);
                c /= q;
            }
            coeffs.push(1);
            let g = Poly::from_coeffs(field, &coeffs);
            let mut err = Deg::NegInf;
            let mut fs = Vec::new();
            for xi in x.coords() {
                let (p, frac) = xi.mul_poly(field, &g).split(field)?;
                err = err.max(frac.top()?);
                fs.push(p);
            }
            let ld = err - d;
            if best.as_ref().is_none_or(|b| ld < b.log_dist) {
                best = Some(ApproxEntry {
                    d,
                    log_dist: ld,
                    g,
                    f: fs,
                });
            }
        }
        out.push(best.expect("at least one monic polynomial"));
    }
    Ok(out)
}

/// CSV with columns `d,min_dist_exponent,g,f`; `f` joined by `;`.
pub fn approx_table_csv(table: &[ApproxEntry]) -> String {
    let mut out = String::from("d,min_dist_exponent,g,f\n");
    for e in table {
        let ld = match e.log_dist {
            Deg::Fin(v) => v.to_string(),
            Deg::NegInf => "-inf".into(),
        };
        let f: Vec<String> = e.f.iter().map(format_poly).collect();
        let _ = writeln!(out, "{},{},{},{}", e.d, ld, format_poly(&e.g), f.join(";"));
    }
    out
}

/// As [`approx_table_csv`], keeping only rows where the distance drops.
pub fn approx_table_csv_primitive(table: &[ApproxEntry]) -> String {
    let keep: Vec<ApproxEntry> = table
        .iter()
        .enumerate()
        .filter(|(i, e)| *i == 0 || e.log_dist < table[i - 1].log_dist)
        .map(|(_, e)| e.clone())
        .collect();
    approx_table_csv(&keep)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Membership {
    pub ok: bool,
    /// Heights `d >= h0` with `table(d) = floor(log psi(q^d))`.
    pub equality_heights: Vec<i64>,
    /// Entries with `d >= h0` falling below the snapped `psi`.
    pub violations: Vec<(i64, Deg)>,
    /// The smallest slacks `table(d) - floor(log psi(q^d))`, as `(d, slack)`.
    pub min_slack: Vec<(i64, i64)>,
}

/// Clause 1: equality with the snapped `psi` at `>= min_equalities`
/// heights. Clause 2: no entry with `d >= h0` below it.
pub fn verify_exact_membership(
    field: &FieldSpec,
    x: &LaurentVector,
    psi: &PsiFunction,
    d_max: i64,
    h0: i64,
    min_equalities: usize,
) -> Result<Membership> {
    let table = best_approx_table(field, x, d_max)?;
    Ok(membership_from_table(&table, psi, h0, min_equalities))
}

/// The two clauses evaluated on a computed table.
pub fn membership_from_table(
    table: &[ApproxEntry],
    psi: &PsiFunction,
    h0: i64,
    min_equalities: usize,
) -> Membership {
    let mut eq = Vec::new();
    let mut bad = Vec::new();
    let mut slack = Vec::new();
    for e in table.iter().filter(|e| e.d >= h0) {
        let target = floor(psi.log_psi(Rational::from_integer(e.d)));
        match e.log_dist {
            Deg::NegInf => bad.push((e.d, e.log_dist)),
            Deg::Fin(v) if v < target => bad.push((e.d, e.log_dist)),
            Deg::Fin(v) => {
                if v == target {
                    eq.push(e.d);
                }
                slack.push((e.d, v - target));
            }
        }
    }
    slack.sort_by_key(|&(d, s)| (s, d));
    slack.truncate(8);
    Membership {
        ok: bad.is_empty() && eq.len() >= min_equalities,
        equality_heights: eq,
        violations: bad,
        min_slack: slack,
    }
}

//! Reduction-free oracles for lattice minima.
//!
//! Vectors `sum_i a_i b_i` with `deg a_i <= D` and shifted norm `<= B` form an
//! F_q-subspace cut out by linear conditions on the coefficients of the `a_i`
//! (every coefficient above the bound must vanish). The exact minima restricted
//! to that coefficient box are the smallest `B` at which the F_q(X)-rank of the
//! subspace reaches `1, 2, ..., m`. [`enumerate_shortest`] is the literal
//! exhaustive search, usable for tiny boxes.

use super::{
    cmp_vectors, least_normalized_in_span, normalize_vector, shifted_norm, MinimaProfile,
    ShiftedLattice,
};
use crate::algebra::{Deg, Elem, FieldSpec, Poly, Top};
use crate::error::{Error, Result};

/// Largest number of free coefficients the linear-algebra oracle accepts.
pub const ORACLE_UNKNOWN_BUDGET: usize = 512;

/// Kernel basis of a matrix over F_q given by rows.
fn kernel(f: &FieldSpec, mut rows: Vec<Vec<Elem>>, ncols: usize) -> Vec<Vec<Elem>> {
    let mut pivots: Vec<usize> = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else {
            continue;
        };
        rows.swap(r, p);
        let inv = f.inv(rows[r][c]).expect("nonzero pivot");
        for v in rows[r].iter_mut() {
            *v = f.mul(*v, inv);
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] != 0 {
                let factor = row[c];
                for (x, &p) in row.iter_mut().zip(&pivot).take(ncols) {
                    *x = f.sub(*x, f.mul(factor, p));
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![0 as Elem; ncols];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(rows[i][fc]);
            }
            v
        })
        .collect()
}

/// Rank over F_q(X) of a family of polynomial vectors (fraction-free elimination).
pub fn function_field_rank(f: &FieldSpec, vectors: &[Vec<Poly>]) -> usize {
    let mut basis: Vec<(usize, Vec<Poly>)> = Vec::new();
    for v in vectors {
        let mut v = v.clone();
        for (p, b) in &basis {
            if v[*p].is_zero() {
                continue;
            }
            let (bp, vp) = (b[*p].clone(), v[*p].clone());
            v = v
                .iter()
                .zip(b)
                .map(|(x, y)| x.mul(f, &bp).sub(f, &y.mul(f, &vp)))
                .collect();
            let g = v.iter().fold(Poly::zero(f), |g, x| g.gcd(f, x));
            if !g.is_zero() && g.degree() != Some(0) {
                v = v
                    .iter()
                    .map(|x| x.divmod(f, &g).expect("nonzero gcd").0)
                    .collect();
            }
        }
        if let Some(p) = v.iter().position(|x| !x.is_zero()) {
            basis.push((p, v));
        }
    }
    basis.len()
}

fn check_budget(l: &ShiftedLattice, deg_bound: usize) -> Result<usize> {
    let unknowns = l.dim() * (deg_bound + 1);
    if unknowns > ORACLE_UNKNOWN_BUDGET {
        let q = l.field().q() as u128;
        return Err(Error::BudgetExceeded {
            needed: q.saturating_pow(unknowns as u32),
            budget: q.saturating_pow(ORACLE_UNKNOWN_BUDGET as u32),
        });
    }
    Ok(unknowns)
}

/// Coefficients `(a_0, ..., a_{m-1})` from a flat vector indexed by `i * (D+1) + k`.
fn unflatten(f: &FieldSpec, v: &[Elem], m: usize, d: usize) -> Vec<Poly> {
    (0..m)
        .map(|i| Poly::from_coeffs(f, &v[i * (d + 1)..(i + 1) * (d + 1)]))
        .collect()
}

/// Rewrites coefficients over the current rows as coefficients over the input basis.
fn compose(l: &ShiftedLattice, a: &[Poly]) -> Vec<Poly> {
    let f = l.field();
    let mut out: Vec<Poly> = (0..l.dim()).map(|_| Poly::zero(f)).collect();
    for (ai, row) in a.iter().zip(l.rows()) {
        for (o, c) in out.iter_mut().zip(&row.coeffs) {
            *o = o.add(f, &ai.mul(f, c));
        }
    }
    out
}

/// F_q-basis of `{a : deg a_i <= D, ||sum a_i b_i|| <= B}` (coefficients over
/// the lattice's current rows).
pub fn norm_bounded_space(
    l: &ShiftedLattice,
    bound: i64,
    deg_bound: usize,
) -> Result<Vec<Vec<Poly>>> {
    let f = l.field();
    let m = l.dim();
    let unknowns = check_budget(l, deg_bound)?;
    let d = deg_bound as i64;
    let mut rows = Vec::new();
    for j in 0..m {
        let s = l.shifts()[j];
        let lowest = bound - s + 1;
        let mut highest = i64::MIN;
        for r in l.rows() {
            let e = &r.entries[j];
            if let Some(fl) = e.floor() {
                if lowest - d <= fl {
                    return Err(Error::PrecisionExhausted {
                        needed: lowest - d,
                        floor: fl,
                    });
                }
            }
            match e.top_info() {
                Top::Known(Deg::Fin(t)) => highest = highest.max(t + d),
                Top::Known(Deg::NegInf) => {}
                Top::AtMost(fl) => {
                    return Err(Error::PrecisionExhausted {
                        needed: fl,
                        floor: fl,
                    })
                }
            }
        }
        for e in lowest..=highest {
            let mut row = vec![0 as Elem; unknowns];
            for (i, r) in l.rows().iter().enumerate() {
                for k in 0..=d {
                    row[i * (deg_bound + 1) + k as usize] = r.entries[j].coeff(e - k)?;
                }
            }
            if row.iter().any(|&c| c != 0) {
                rows.push(row);
            }
        }
    }
    Ok(kernel(f, rows, unknowns)
        .into_iter()
        .map(|v| unflatten(f, &v, m, deg_bound))
        .collect())
}

/// Exact minima over coefficient vectors of degree `<= deg_bound`, without
/// lattice reduction. Witnesses are over the input basis; the first one is the
/// canonical (least normalized) vector of norm `d_1`.
pub fn brute_force_minima(l: &ShiftedLattice, deg_bound: usize) -> Result<MinimaProfile> {
    let f = l.field();
    let m = l.dim();
    check_budget(l, deg_bound)?;
    let mut hi = i64::MIN;
    for r in l.rows() {
        hi = hi.max(
            shifted_norm(&r.entries, l.shifts())?
                .fin()
                .ok_or(Error::SingularBasis)?,
        );
    }
    let mut lo = i64::MAX;
    let mut precision_limited = false;
    for (j, &s) in l.shifts().iter().enumerate() {
        for r in l.rows() {
            let e = &r.entries[j];
            let cand = match e.floor() {
                Some(fl) => {
                    precision_limited = true;
                    fl + s + deg_bound as i64
                }
                None => match e.terms().last() {
                    Some(&(low, _)) => low + s - 1,
                    None => continue,
                },
            };
            lo = lo.min(cand);
        }
    }
    if precision_limited {
        // every column must be decidable at the starting bound
        for (j, &s) in l.shifts().iter().enumerate() {
            for r in l.rows() {
                if let Some(fl) = r.entries[j].floor() {
                    lo = lo.max(fl + s + deg_bound as i64);
                }
            }
        }
    }
    let lo = lo.min(hi);
    let mut d = Vec::with_capacity(m);
    let mut witnesses: Vec<Vec<Poly>> = Vec::with_capacity(m);
    let mut bound = lo;
    while d.len() < m {
        if bound > hi {
            return Err(Error::SingularBasis);
        }
        let space = norm_bounded_space(l, bound, deg_bound)?;
        let rank = function_field_rank(f, &space);
        if rank > d.len() && bound == lo && precision_limited {
            return Err(Error::PrecisionExhausted {
                needed: bound - 1,
                floor: bound,
            });
        }
        if d.is_empty() && rank > 0 {
            let w = if space.len() == 1 {
                normalize_vector(f, &space[0])
            } else {
                least_normalized_in_span(f, &space)
            };
            witnesses.push(compose(l, &w));
            d.push(bound);
        }
        for v in &space {
            if d.len() >= rank {
                break;
            }
            let mut trial = witnesses.clone();
            let cv = compose(l, v);
            trial.push(cv.clone());
            if function_field_rank(f, &trial) > witnesses.len() {
                witnesses.push(cv);
                d.push(bound);
            }
        }
        bound += 1;
    }
    Ok(MinimaProfile { d, witnesses })
}

/// Exhaustive search over all `q^{m(D+1)}` coefficient vectors for the norm
/// `d_1` and its least normalized witness.
pub fn enumerate_shortest(
    l: &ShiftedLattice,
    deg_bound: usize,
    budget: u128,
) -> Result<(i64, Vec<Poly>)> {
    let f = l.field();
    let m = l.dim();
    let q = f.q() as u128;
    let unknowns = (m * (deg_bound + 1)) as u32;
    let total = q.checked_pow(unknowns).unwrap_or(u128::MAX);
    if total > budget {
        return Err(Error::BudgetExceeded {
            needed: total,
            budget,
        });
    }
    let mut best: Option<(i64, Vec<Poly>)> = None;
    let mut digits = vec![0 as Elem; unknowns as usize];
    for code in 1..total {
        let mut c = code;
        for dgt in digits.iter_mut() {
            *dgt = (c % q) as Elem;
            c /= q;
        }
        let a = unflatten(f, &digits, m, deg_bound);
        let mut entries = Vec::with_capacity(m);
        for j in 0..m {
            let mut e = crate::algebra::Laurent::zero(f);
            for (ai, r) in a.iter().zip(l.rows()) {
                e = e.add(f, &r.entries[j].mul_poly(f, ai));
            }
            entries.push(e);
        }
        let Deg::Fin(norm) = shifted_norm(&entries, l.shifts())? else {
            continue;
        };
        let w = normalize_vector(f, &compose(l, &a));
        let better = match &best {
            None => true,
            Some((bn, bw)) => norm < *bn || (norm == *bn && cmp_vectors(&w, bw).is_lt()),
        };
        if better {
            best = Some((norm, w));
        }
    }
    best.ok_or(Error::SingularBasis)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::text::parse_series;
    use crate::algebra::Laurent;

    fn flow(f: &FieldSpec, xs: &[&str], t: i64) -> ShiftedLattice {
        let n = xs.len();
        let mut rows = Vec::new();
        let mut first = vec![Laurent::from_poly(Poly::one(f))];
        first.extend(xs.iter().map(|s| parse_series(f, s).unwrap().neg(f)));
        rows.push(first);
        for i in 0..n {
            let mut r = vec![Laurent::zero(f); n + 1];
            r[i + 1] = Laurent::from_poly(Poly::one(f));
            rows.push(r);
        }
        let mut shifts = vec![t; n + 1];
        shifts[0] = -(n as i64) * t;
        ShiftedLattice::new(f, rows, shifts).unwrap()
    }

    #[test]
    fn exhaustive_search_on_inverse_x() {
        let f = FieldSpec::prime(2).unwrap();
        let l = flow(&f, &["X^-1"], 2);
        let (d1, w) = enumerate_shortest(&l, 3, 1 << 20).unwrap();
        assert_eq!(d1, -1);
        assert_eq!(w, vec![Poly::monomial(&f, 1, 1), Poly::one(&f)]);
    }

    #[test]
    fn oracle_minima_examples() {
        let f = FieldSpec::prime(2).unwrap();
        let m = brute_force_minima(&flow(&f, &["X^-1"], 2), 6).unwrap();
        assert_eq!(m.d, vec![-1, 1]);
        assert_eq!(
            m.witnesses[0],
            vec![Poly::monomial(&f, 1, 1), Poly::one(&f)]
        );
        assert_eq!(
            brute_force_minima(&flow(&f, &["X^-1"], 5), 6).unwrap().d[0],
            -4
        );
        assert_eq!(
            brute_force_minima(&flow(&f, &["0", "0"], 2), 6).unwrap().d,
            vec![-4, 2, 2]
        );
    }

    #[test]
    fn oracle_matches_reduction() {
        let f = FieldSpec::prime(3).unwrap();
        let l = flow(
            &f,
            &["X^-1+2*X^-2+X^-5 (prec -40)", "2*X^-2+X^-3 (prec -40)"],
            3,
        );
        let a = brute_force_minima(&l, 6).unwrap();
        let b = l.successive_minima().unwrap();
        assert_eq!(a.d, b.d);
        assert_eq!(a.witnesses[0], l.shortest_vector().unwrap());
    }

    #[test]
    fn function_field_rank_detects_dependence() {
        let f = FieldSpec::prime(2).unwrap();
        let x = Poly::monomial(&f, 1, 1);
        let one = Poly::one(&f);
        let v1 = vec![one.clone(), x.clone()];
        let v2 = vec![x.clone(), x.mul(&f, &x)];
        assert_eq!(function_field_rank(&f, &[v1.clone(), v2]), 1);
        assert_eq!(function_field_rank(&f, &[v1, vec![one, Poly::zero(&f)]]), 2);
    }

    #[test]
    fn budget_is_enforced() {
        let f = FieldSpec::prime(2).unwrap();
        let l = flow(&f, &["X^-1"], 2);
        assert!(matches!(
            enumerate_shortest(&l, 30, 1 << 20),
            Err(Error::BudgetExceeded { .. })
        ));
    }
}

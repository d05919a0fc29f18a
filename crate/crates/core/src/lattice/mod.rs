//! F_q[X]-lattices in F_q((X^{-1}))^{m} with integer column shifts.
//!
//! A lattice is given by `m` basis rows whose entries are Laurent series; the
//! norm of a row is `max_j (log_q |entry_j| + shift_j)`. Rows also carry their
//! coefficient vector with respect to the input basis, so after reduction each
//! row names the polynomial combination that produced it.
//!
//! Reduction is shifted weak Popov form: rows are combined until the pivot
//! columns (rightmost column attaining the row norm) are pairwise distinct.
//! A weak Popov basis is row reduced, hence its sorted row norms are exactly the
//! successive minima exponents.

mod oracle;

pub use oracle::{brute_force_minima, enumerate_shortest, function_field_rank, norm_bounded_space};

use std::cmp::Ordering;

use crate::algebra::{Deg, Elem, FieldSpec, Laurent, Poly, Top};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct LatticeRow {
    /// Combination of the input basis rows producing this row.
    pub coeffs: Vec<Poly>,
    /// Unshifted entries.
    pub entries: Vec<Laurent>,
}

/// Row-norm data: shifted degree, pivot column and the coefficient there.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Lead {
    pub deg: i64,
    pub col: usize,
    pub coeff: Elem,
}

#[derive(Clone, Debug)]
pub struct ShiftedLattice {
    field: FieldSpec,
    rows: Vec<LatticeRow>,
    shifts: Vec<i64>,
}

/// Exact successive minima `d_1 <= ... <= d_m` (exponents of lambda_i) with
/// independent witnesses, given as coefficient vectors over the input basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinimaProfile {
    pub d: Vec<i64>,
    pub witnesses: Vec<Vec<Poly>>,
}

/// Shifted norm exponent of one row of entries.
pub fn shifted_norm(entries: &[Laurent], shifts: &[i64]) -> Result<Deg> {
    lead_of(entries, shifts).map(|l| l.map_or(Deg::NegInf, |l| Deg::Fin(l.deg)))
}

fn lead_of(entries: &[Laurent], shifts: &[i64]) -> Result<Option<Lead>> {
    let mut best: Option<(i64, usize)> = None;
    let mut unknown: Option<(i64, i64)> = None; // (shifted floor, floor)
    for (j, (e, &s)) in entries.iter().zip(shifts).enumerate() {
        match e.top_info() {
            Top::Known(Deg::Fin(d)) => {
                let sd = d + s;
                if best.is_none_or(|(b, _)| sd >= b) {
                    best = Some((sd, j));
                }
            }
            Top::Known(Deg::NegInf) => {}
            Top::AtMost(fl) => {
                if unknown.is_none_or(|(u, _)| fl + s > u) {
                    unknown = Some((fl + s, fl));
                }
            }
        }
    }
    if let Some((u, fl)) = unknown {
        if best.is_none_or(|(b, _)| u >= b) {
            return Err(Error::PrecisionExhausted {
                needed: fl,
                floor: fl,
            });
        }
    }
    Ok(best.map(|(deg, col)| Lead {
        deg,
        col,
        coeff: entries[col]
            .coeff(deg - shifts[col])
            .expect("pivot coefficient lies above the floor"),
    }))
}

/// Orders coefficient vectors lexicographically by entry (degree, then
/// coefficients from the top).
pub fn cmp_vectors(a: &[Poly], b: &[Poly]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.cmp_canonical(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    Ordering::Equal
}

/// Scales a vector so the leading coefficient of its first nonzero entry is 1.
pub fn normalize_vector(f: &FieldSpec, v: &[Poly]) -> Vec<Poly> {
    match v.iter().find(|p| !p.is_zero()) {
        None => v.to_vec(),
        Some(first) => {
            let c = f.inv(first.leading_coeff()).expect("nonzero");
            v.iter().map(|p| p.scale(f, c)).collect()
        }
    }
}

/// Lexicographically least normalized nonzero element of the F_q-span of
/// `gens`; the span is enumerated exhaustively.
pub fn least_normalized_in_span(f: &FieldSpec, gens: &[Vec<Poly>]) -> Vec<Poly> {
    let q = f.q() as u64;
    let total = q.pow(gens.len() as u32);
    let width = gens[0].len();
    let mut best: Option<Vec<Poly>> = None;
    for code in 1..total {
        let mut c = code;
        let mut v: Vec<Poly> = (0..width).map(|_| Poly::zero(f)).collect();
        for g in gens {
            let a = (c % q) as Elem;
            c /= q;
            for (vi, gi) in v.iter_mut().zip(g) {
                vi.add_scaled_shifted(f, gi, a, 0);
            }
        }
        if v.iter().all(Poly::is_zero) {
            continue;
        }
        let v = normalize_vector(f, &v);
        if best
            .as_ref()
            .is_none_or(|b| cmp_vectors(&v, b) == Ordering::Less)
        {
            best = Some(v);
        }
    }
    best.expect("nonzero span")
}

impl ShiftedLattice {
    /// Lattice spanned by `rows` (each of length `shifts.len()`).
    pub fn new(field: &FieldSpec, rows: Vec<Vec<Laurent>>, shifts: Vec<i64>) -> Result<Self> {
        let m = shifts.len();
        if rows.len() != m || rows.iter().any(|r| r.len() != m) {
            return Err(Error::Precondition(
                "basis must be square and match the shifts".into(),
            ));
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, entries)| LatticeRow {
                coeffs: (0..m)
                    .map(|j| {
                        if i == j {
                            Poly::one(field)
                        } else {
                            Poly::zero(field)
                        }
                    })
                    .collect(),
                entries,
            })
            .collect();
        Ok(ShiftedLattice {
            field: field.clone(),
            rows,
            shifts,
        })
    }

    pub fn from_polys(field: &FieldSpec, rows: Vec<Vec<Poly>>, shifts: Vec<i64>) -> Result<Self> {
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(Laurent::from_poly).collect())
            .collect();
        Self::new(field, rows, shifts)
    }

    /// Lattice from rows carrying their own coefficient vectors.
    pub fn with_rows(field: &FieldSpec, rows: Vec<LatticeRow>, shifts: Vec<i64>) -> Result<Self> {
        let m = shifts.len();
        if rows.len() != m
            || rows
                .iter()
                .any(|r| r.entries.len() != m || r.coeffs.len() != m)
        {
            return Err(Error::Precondition(
                "basis must be square and match the shifts".into(),
            ));
        }
        Ok(ShiftedLattice {
            field: field.clone(),
            rows,
            shifts,
        })
    }

    pub fn field(&self) -> &FieldSpec {
        &self.field
    }
    pub fn dim(&self) -> usize {
        self.shifts.len()
    }
    pub fn rows(&self) -> &[LatticeRow] {
        &self.rows
    }
    /// Direct row access; the caller keeps entries consistent with coefficients.
    pub fn rows_mut(&mut self) -> &mut [LatticeRow] {
        &mut self.rows
    }
    pub fn shifts(&self) -> &[i64] {
        &self.shifts
    }

    /// Replaces the column shifts (the basis stays; it may no longer be reduced).
    pub fn set_shifts(&mut self, shifts: Vec<i64>) {
        assert_eq!(shifts.len(), self.dim());
        self.shifts = shifts;
    }

    pub fn leads(&self) -> Result<Vec<Lead>> {
        self.rows
            .iter()
            .map(|r| lead_of(&r.entries, &self.shifts)?.ok_or(Error::SingularBasis))
            .collect()
    }

    /// Shifted row degrees in row order.
    pub fn row_degrees(&self) -> Result<Vec<i64>> {
        Ok(self.leads()?.into_iter().map(|l| l.deg).collect())
    }

    /// `row[target] += c * X^k * row[src]`.
    fn row_op(&mut self, target: usize, src: usize, c: Elem, k: i64) {
        let f = self.field.clone();
        let (t, s) = if target < src {
            let (a, b) = self.rows.split_at_mut(src);
            (&mut a[target], &b[0])
        } else {
            let (a, b) = self.rows.split_at_mut(target);
            (&mut b[0], &a[src])
        };
        for (e, o) in t.entries.iter_mut().zip(&s.entries) {
            e.add_scaled_shifted(&f, o, c, k);
        }
        for (p, o) in t.coeffs.iter_mut().zip(&s.coeffs) {
            p.add_scaled_shifted(&f, o, c, k as usize);
        }
    }

    /// Brings the basis to shifted weak Popov form in place.
    pub fn reduce_in_place(&mut self) -> Result<()> {
        let m = self.dim();
        loop {
            let leads = self.leads()?;
            let mut step = None;
            'cols: for col in 0..m {
                let mut reducer: Option<usize> = None;
                for (i, l) in leads.iter().enumerate() {
                    if l.col != col {
                        continue;
                    }
                    match reducer {
                        None => reducer = Some(i),
                        Some(p) => {
                            let (a, b) = if l.deg < leads[p].deg { (p, i) } else { (i, p) };
                            step = Some((a, b));
                            break 'cols;
                        }
                    }
                }
            }
            let Some((target, src)) = step else { break };
            let (lt, ls) = (leads[target], leads[src]);
            let c = self
                .field
                .neg(self.field.mul(lt.coeff, self.field.inv(ls.coeff)?));
            self.row_op(target, src, c, lt.deg - ls.deg);
        }
        Ok(())
    }

    /// A reduced basis spanning the same module.
    pub fn shifted_reduce(&self) -> Result<ShiftedLattice> {
        let mut l = self.clone();
        l.reduce_in_place()?;
        Ok(l)
    }

    /// True when pivot columns are pairwise distinct.
    pub fn is_weak_popov(&self) -> Result<bool> {
        let leads = self.leads()?;
        let mut cols: Vec<usize> = leads.iter().map(|l| l.col).collect();
        cols.sort_unstable();
        cols.dedup();
        Ok(cols.len() == leads.len())
    }

    /// Row indices sorted by (shifted degree, pivot column).
    fn order(&self) -> Result<Vec<usize>> {
        let leads = self.leads()?;
        let mut idx: Vec<usize> = (0..self.dim()).collect();
        idx.sort_by_key(|&i| (leads[i].deg, leads[i].col));
        Ok(idx)
    }

    /// Minima of an already reduced basis.
    pub fn minima_of_reduced(&self) -> Result<MinimaProfile> {
        let leads = self.leads()?;
        let order = self.order()?;
        Ok(MinimaProfile {
            d: order.iter().map(|&i| leads[i].deg).collect(),
            witnesses: order.iter().map(|&i| self.rows[i].coeffs.clone()).collect(),
        })
    }

    pub fn successive_minima(&self) -> Result<MinimaProfile> {
        self.shifted_reduce()?.minima_of_reduced()
    }

    /// Canonical witness of `d_1` for an already reduced basis: the
    /// lexicographically least normalized vector of norm `d_1`.
    pub fn shortest_of_reduced(&self) -> Result<Vec<Poly>> {
        let leads = self.leads()?;
        let d1 = leads
            .iter()
            .map(|l| l.deg)
            .min()
            .ok_or(Error::SingularBasis)?;
        let gens: Vec<Vec<Poly>> = self
            .rows
            .iter()
            .zip(&leads)
            .filter(|(_, l)| l.deg == d1)
            .map(|(r, _)| r.coeffs.clone())
            .collect();
        Ok(if gens.len() == 1 {
            normalize_vector(&self.field, &gens[0])
        } else {
            least_normalized_in_span(&self.field, &gens)
        })
    }

    pub fn shortest_vector(&self) -> Result<Vec<Poly>> {
        self.shifted_reduce()?.shortest_of_reduced()
    }

    /// Exponent of the determinant of the row matrix plus the sum of shifts,
    /// computed by cofactor expansion (intended for small dimension).
    pub fn covolume_exponent(&self) -> Result<Deg> {
        let m = self.dim();
        let f = &self.field;
        let mut total = Laurent::zero(f);
        let mut perm: Vec<usize> = (0..m).collect();
        let mut sign_even = true;
        // Heap's algorithm over permutations
        let mut c = vec![0usize; m];
        let visit = |perm: &[usize], even: bool, total: &mut Laurent| {
            let mut term = Laurent::from_poly(Poly::one(f));
            for (i, &j) in perm.iter().enumerate() {
                term = term.mul(f, &self.rows[i].entries[j]);
            }
            let c = if even { 1 } else { f.neg(1) };
            total.add_scaled_shifted(f, &term, c, 0);
        };
        visit(&perm, sign_even, &mut total);
        let mut i = 0;
        while i < m {
            if c[i] < i {
                if i % 2 == 0 {
                    perm.swap(0, i);
                } else {
                    perm.swap(c[i], i);
                }
                sign_even = !sign_even;
                visit(&perm, sign_even, &mut total);
                c[i] += 1;
                i = 0;
            } else {
                c[i] = 0;
                i += 1;
            }
        }
        let s: i64 = self.shifts.iter().sum();
        Ok(total.top()? + s)
    }
}

/// Caller-owned state for computing minima along a family of shifts while
/// reusing the previous reduced basis.
#[derive(Clone, Debug)]
pub struct ReductionSession {
    lattice: ShiftedLattice,
}

impl ReductionSession {
    pub fn new(lattice: ShiftedLattice) -> Result<Self> {
        let mut lattice = lattice;
        lattice.reduce_in_place()?;
        Ok(ReductionSession { lattice })
    }

    /// Re-reduces for new shifts; returns the minima.
    pub fn advance(&mut self, shifts: Vec<i64>) -> Result<MinimaProfile> {
        self.lattice.set_shifts(shifts);
        self.lattice.reduce_in_place()?;
        self.lattice.minima_of_reduced()
    }

    pub fn lattice(&self) -> &ShiftedLattice {
        &self.lattice
    }

    pub fn lattice_mut(&mut self) -> &mut ShiftedLattice {
        &mut self.lattice
    }
}

/// `d_2 >= -d_1 - (n-1) d_{n+1}` for a covolume-0 lattice in dimension n+1.
pub fn second_minimum_bound_holds(d: &[i64]) -> bool {
    let n = d.len() as i64 - 1;
    if d.len() < 2 {
        return true;
    }
    d[1] >= -d[0] - (n - 1) * d[d.len() - 1]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::text::parse_series;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    #[test]
    fn identity_is_already_reduced() {
        let f = f2();
        let one = Poly::one(&f);
        let z = Poly::zero(&f);
        let l = ShiftedLattice::from_polys(
            &f,
            vec![vec![one.clone(), z.clone()], vec![z, one]],
            vec![-2, 2],
        )
        .unwrap();
        let r = l.shifted_reduce().unwrap();
        assert_eq!(r.row_degrees().unwrap(), vec![-2, 2]);
        assert_eq!(r.successive_minima().unwrap().d, vec![-2, 2]);
        assert_eq!(
            l.shortest_vector().unwrap(),
            vec![Poly::one(&f), Poly::zero(&f)]
        );
    }

    #[test]
    fn flow_lattice_of_inverse_x_at_time_two() {
        // rows (1, -x) and (0, 1) for x = X^-1, shifts (-2, 2)
        let f = f2();
        let x = parse_series(&f, "X^-1").unwrap();
        let rows = vec![
            vec![Laurent::from_poly(Poly::one(&f)), x.neg(&f)],
            vec![Laurent::zero(&f), Laurent::from_poly(Poly::one(&f))],
        ];
        let l = ShiftedLattice::new(&f, rows, vec![-2, 2]).unwrap();
        let m = l.successive_minima().unwrap();
        assert_eq!(m.d, vec![-1, 1]);
        assert_eq!(
            l.shortest_vector().unwrap(),
            vec![Poly::monomial(&f, 1, 1), Poly::one(&f)]
        );
    }

    #[test]
    fn unimodular_row_degrees_sum_to_zero() {
        let f = FieldSpec::prime(3).unwrap();
        let b = Poly::from_coeffs(&f, &[2, 1, 1]);
        let c = Poly::from_coeffs(&f, &[1, 0, 2, 1]);
        let d = c.mul(&f, &b).add(&f, &Poly::one(&f));
        let l =
            ShiftedLattice::from_polys(&f, vec![vec![Poly::one(&f), b], vec![c, d]], vec![3, -3])
                .unwrap();
        assert_eq!(l.covolume_exponent().unwrap(), Deg::Fin(0));
        let minima = l.successive_minima().unwrap();
        assert_eq!(minima.d.iter().sum::<i64>(), 0);
        assert!(l.shifted_reduce().unwrap().is_weak_popov().unwrap());
    }

    #[test]
    fn scaling_shifts_moves_all_minima() {
        let f = f2();
        let x = parse_series(&f, "X^-1+X^-3+X^-4 (prec -40)").unwrap();
        let rows = vec![
            vec![Laurent::from_poly(Poly::one(&f)), x.neg(&f)],
            vec![Laurent::zero(&f), Laurent::from_poly(Poly::one(&f))],
        ];
        let l = ShiftedLattice::new(&f, rows.clone(), vec![-5, 5]).unwrap();
        let l1 = ShiftedLattice::new(&f, rows, vec![-4, 6]).unwrap();
        let (a, b) = (
            l.successive_minima().unwrap(),
            l1.successive_minima().unwrap(),
        );
        assert_eq!(a.d.iter().map(|d| d + 1).collect::<Vec<_>>(), b.d);
        assert_eq!(l.shortest_vector().unwrap(), l1.shortest_vector().unwrap());
    }

    #[test]
    fn singular_basis_is_rejected() {
        let f = f2();
        let z = Poly::zero(&f);
        let l = ShiftedLattice::from_polys(
            &f,
            vec![vec![Poly::one(&f), z.clone()], vec![z.clone(), z]],
            vec![0, 0],
        )
        .unwrap();
        assert_eq!(l.shifted_reduce().err(), Some(Error::SingularBasis));
    }
}

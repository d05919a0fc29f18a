//! Exact arithmetic over F_q, F_q[X] and F_q((X^{-1})).
//!
//! Absolute values never leave exponent form: `|a| = q^d` is stored as the
//! integer (or rational) `d`, with [`Deg::NegInf`] standing for `|0| = 0`.

pub mod deg;
pub mod field;
pub mod laurent;
pub mod poly;
pub mod text;

pub use deg::{ceil, floor, format_rational, parse_rational, rat, vec_norm, Deg, DegQ, Rational};
pub use field::{Elem, FieldSpec};
pub use laurent::{Laurent, Top};
pub use poly::Poly;

use crate::error::{Error, Result};

/// `log_q |num/den| = deg num - deg den`.
pub fn abs_deg_rational(num: &Poly, den: &Poly) -> Result<Deg> {
    if den.is_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(match num.deg() {
        Deg::NegInf => Deg::NegInf,
        d => d + -(den.degree().unwrap() as i64),
    })
}

/// `log_q |x|` for a series: its top exponent.
pub fn abs_deg(x: &Laurent) -> Result<Deg> {
    x.top()
}

/// A point of F_q((X^{-1}))^n given coordinate-wise to finite precision.
#[derive(Clone, Debug)]
pub struct LaurentVector {
    coords: Vec<Laurent>,
}

impl LaurentVector {
    pub fn new(coords: Vec<Laurent>) -> Self {
        LaurentVector { coords }
    }

    pub fn zero(f: &FieldSpec, n: usize) -> Self {
        LaurentVector {
            coords: vec![Laurent::zero(f); n],
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Laurent] {
        &self.coords
    }

    pub fn coord(&self, i: usize) -> &Laurent {
        &self.coords[i]
    }

    /// Membership in Z_O^n: every coordinate has `|x_i| <= 1`.
    pub fn in_unit_ball(&self) -> bool {
        self.coords.iter().all(Laurent::is_integral)
    }

    /// The coarsest coordinate floor (`None` when all coordinates are exact).
    pub fn floor(&self) -> Option<i64> {
        self.coords.iter().filter_map(Laurent::floor).max()
    }

    pub fn with_floor(&self, floor: i64) -> Self {
        LaurentVector {
            coords: self
                .coords
                .iter()
                .map(|c| c.clone().with_floor(floor))
                .collect(),
        }
    }

    /// `log_q ||x||`.
    pub fn norm(&self) -> Result<Deg> {
        let mut best = Deg::NegInf;
        for c in &self.coords {
            best = best.max(c.top()?);
        }
        Ok(best)
    }

    pub fn same_as(&self, other: &LaurentVector) -> bool {
        self.dim() == other.dim()
            && self
                .coords
                .iter()
                .zip(&other.coords)
                .all(|(a, b)| a.same_as(b))
    }
}

/// Distance to the nearest polynomial vector: the exponent of the largest
/// fractional part among the coordinates (always `<= -1`).
pub fn frac_dist(f: &FieldSpec, x: &LaurentVector) -> Result<Deg> {
    let mut best = Deg::NegInf;
    for c in x.coords() {
        let (_, frac) = c.split(f)?;
        best = best.max(frac.top()?);
    }
    Ok(best)
}

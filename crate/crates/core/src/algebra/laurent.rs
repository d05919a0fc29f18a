//! Truncated Laurent series in X^{-1} with an explicit precision floor.
//!
//! A series stores `X^low * poly` and a floor `F`: the value is known exactly
//! for every exponent `> F` and unknown at or below it. A series without a floor
//! is exact (all further coefficients are zero).

use super::deg::Deg;
use super::field::{Elem, FieldSpec};
use super::poly::Poly;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Laurent {
    low: i64,
    poly: Poly,
    floor: Option<i64>,
}

/// What is known about the top exponent of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Top {
    /// The exact top exponent (`NegInf` only for an exact zero).
    Known(Deg),
    /// Zero at every known exponent; the true value has exponent `<= floor`.
    AtMost(i64),
}

fn max_floor(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

impl Laurent {
    pub fn zero(f: &FieldSpec) -> Self {
        Laurent {
            low: 0,
            poly: Poly::zero(f),
            floor: None,
        }
    }

    /// `X^low * poly`, exact.
    pub fn exact(poly: Poly, low: i64) -> Self {
        Laurent {
            low,
            poly,
            floor: None,
        }
    }

    pub fn from_poly(poly: Poly) -> Self {
        Self::exact(poly, 0)
    }

    /// Series from `(exponent, coefficient)` terms with an optional floor;
    /// terms at or below the floor are discarded.
    pub fn from_terms(f: &FieldSpec, terms: &[(i64, Elem)], floor: Option<i64>) -> Self {
        let lo = terms
            .iter()
            .filter(|(e, c)| *c != 0 && floor.is_none_or(|fl| *e > fl))
            .map(|t| t.0)
            .min()
            .unwrap_or(0);
        let mut poly = Poly::zero(f);
        for &(e, c) in terms {
            if c != 0 && floor.is_none_or(|fl| e > fl) {
                poly.set_coeff((e - lo) as usize, c);
            }
        }
        let mut s = Laurent {
            low: lo,
            poly,
            floor,
        };
        s.enforce_floor();
        s
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn is_exact(&self) -> bool {
        self.floor.is_none()
    }

    /// Drop stored coefficients at or below the floor.
    fn enforce_floor(&mut self) {
        if let Some(fl) = self.floor {
            if self.low <= fl {
                let k = (fl - self.low + 1) as usize;
                self.poly = self.poly.shr(k);
                self.low = fl + 1;
            }
        }
    }

    /// Raise the floor (forget precision). Lowering is impossible.
    pub fn with_floor(mut self, floor: i64) -> Self {
        self.floor = max_floor(self.floor, Some(floor));
        self.enforce_floor();
        self
    }

    pub fn top_info(&self) -> Top {
        match self.poly.degree() {
            Some(d) => Top::Known(Deg::Fin(self.low + d as i64)),
            None => match self.floor {
                None => Top::Known(Deg::NegInf),
                Some(fl) => Top::AtMost(fl),
            },
        }
    }

    /// The exponent of the absolute value, or `PrecisionExhausted` when the
    /// series is zero down to its floor without being provably zero.
    pub fn top(&self) -> Result<Deg> {
        match self.top_info() {
            Top::Known(d) => Ok(d),
            Top::AtMost(fl) => Err(Error::PrecisionExhausted {
                needed: fl,
                floor: fl,
            }),
        }
    }

    pub fn coeff(&self, e: i64) -> Result<Elem> {
        if let Some(fl) = self.floor {
            if e <= fl {
                return Err(Error::PrecisionExhausted {
                    needed: e,
                    floor: fl,
                });
            }
        }
        if e < self.low {
            Ok(0)
        } else {
            Ok(self.poly.coeff((e - self.low) as usize))
        }
    }

    /// Known nonzero terms `(exponent, coefficient)`, descending.
    pub fn terms(&self) -> Vec<(i64, Elem)> {
        let mut t: Vec<(i64, Elem)> = self
            .poly
            .support()
            .into_iter()
            .map(|i| (self.low + i as i64, self.poly.coeff(i)))
            .collect();
        t.reverse();
        t
    }

    /// `self += c * X^k * other`.
    pub fn add_scaled_shifted(&mut self, f: &FieldSpec, other: &Laurent, c: Elem, k: i64) {
        if c == 0 {
            return;
        }
        self.floor = max_floor(self.floor, other.floor.map(|fl| fl + k));
        if !other.poly.is_zero() {
            let olow = other.low + k;
            if olow < self.low {
                if self.poly.is_zero() {
                    self.low = olow;
                } else {
                    self.poly = self.poly.shl((self.low - olow) as usize);
                    self.low = olow;
                }
            }
            let off = (olow - self.low) as usize;
            self.poly.add_scaled_shifted(f, &other.poly, c, off);
        }
        self.enforce_floor();
    }

    pub fn add(&self, f: &FieldSpec, other: &Laurent) -> Laurent {
        let mut r = self.clone();
        r.add_scaled_shifted(f, other, 1, 0);
        r
    }

    pub fn sub(&self, f: &FieldSpec, other: &Laurent) -> Laurent {
        let mut r = self.clone();
        r.add_scaled_shifted(f, other, f.neg(1), 0);
        r
    }

    pub fn neg(&self, f: &FieldSpec) -> Laurent {
        Laurent {
            low: self.low,
            poly: self.poly.neg(f),
            floor: self.floor,
        }
    }

    /// Multiplication by X^k.
    pub fn shift(&self, k: i64) -> Laurent {
        Laurent {
            low: self.low + k,
            poly: self.poly.clone(),
            floor: self.floor.map(|fl| fl + k),
        }
    }

    pub fn scale(&self, f: &FieldSpec, c: Elem) -> Laurent {
        Laurent {
            low: self.low,
            poly: self.poly.scale(f, c),
            floor: self.floor,
        }
    }

    /// Product; the floor of the result is the tightest sound one.
    pub fn mul(&self, f: &FieldSpec, other: &Laurent) -> Laurent {
        let top_or = |s: &Laurent| s.poly.degree().map(|d| s.low + d as i64);
        let fa = match (self.floor, top_or(other)) {
            (Some(fl), Some(t)) => Some(fl + t),
            (Some(fl), None) => other.floor.map(|g| fl + g),
            (None, _) => None,
        };
        let fb = match (other.floor, top_or(self)) {
            (Some(fl), Some(t)) => Some(fl + t),
            (Some(fl), None) => self.floor.map(|g| fl + g),
            (None, _) => None,
        };
        // zero times an uncertain zero: both factors bounded by their floors
        let floor = max_floor(fa, fb);
        let mut r = Laurent {
            low: self.low + other.low,
            poly: self.poly.mul(f, &other.poly),
            floor,
        };
        if self.poly.is_zero() && self.floor.is_none()
            || other.poly.is_zero() && other.floor.is_none()
        {
            r = Laurent::zero(f);
        }
        r.enforce_floor();
        r
    }

    pub fn mul_poly(&self, f: &FieldSpec, p: &Poly) -> Laurent {
        self.mul(f, &Laurent::from_poly(p.clone()))
    }

    /// Splits into the polynomial part (exponents >= 0) and the strictly
    /// fractional part (exponents < 0). Needs the floor below -1.
    pub fn split(&self, f: &FieldSpec) -> Result<(Poly, Laurent)> {
        if let Some(fl) = self.floor {
            if fl >= 0 {
                return Err(Error::PrecisionExhausted {
                    needed: 0,
                    floor: fl,
                });
            }
        }
        if self.poly.is_zero() {
            return Ok((
                Poly::zero(f),
                Laurent {
                    low: 0,
                    poly: Poly::zero(f),
                    floor: self.floor,
                },
            ));
        }
        let (int_part, frac) = if self.low >= 0 {
            (self.poly.shl(self.low as usize), Poly::zero(f))
        } else {
            let k = (-self.low) as usize;
            (self.poly.shr(k), self.poly.truncate(k))
        };
        let frac = Laurent {
            low: self.low.min(0),
            poly: frac,
            floor: self.floor,
        };
        Ok((int_part, frac))
    }

    /// Expansion of `num / den` known for exponents `> floor`; exact when the
    /// division leaves no remainder.
    pub fn quotient(f: &FieldSpec, num: &Poly, den: &Poly, floor: i64) -> Result<Laurent> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let k = (-floor - 1).max(0) as usize;
        let (q, r) = num.shl(k).divmod(f, den)?;
        let out = Laurent::exact(q, -(k as i64));
        Ok(if r.is_zero() {
            out
        } else {
            out.with_floor(-(k as i64) - 1)
        })
    }

    /// Semantic equality: same floor and same known coefficients.
    pub fn same_as(&self, other: &Laurent) -> bool {
        self.floor == other.floor && self.terms() == other.terms()
    }

    /// True when every known coefficient lies at an exponent <= 0.
    pub fn is_integral(&self) -> bool {
        match self.top_info() {
            Top::Known(d) => d <= Deg::Fin(0),
            Top::AtMost(fl) => fl <= 0,
        }
    }
}

//! Absolute values stored as exponents: `|a| = q^d`, with `NegInf` for zero.

use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::rational::Ratio;
use num::{Integer, Zero};
use serde::{Deserialize, Serialize};

pub type Rational = Ratio<i64>;

/// An integer exponent or minus infinity (the exponent of zero).
///
/// `NegInf` is declared first so the derived order puts it below every integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Deg {
    NegInf,
    Fin(i64),
}

impl Deg {
    pub fn fin(self) -> Option<i64> {
        match self {
            Deg::Fin(d) => Some(d),
            Deg::NegInf => None,
        }
    }

    pub fn is_neg_inf(self) -> bool {
        self == Deg::NegInf
    }

    pub fn to_q(self) -> DegQ {
        match self {
            Deg::Fin(d) => DegQ::Fin(Rational::from_integer(d)),
            Deg::NegInf => DegQ::NegInf,
        }
    }
}

impl Add for Deg {
    type Output = Deg;
    fn add(self, rhs: Deg) -> Deg {
        match (self, rhs) {
            (Deg::Fin(a), Deg::Fin(b)) => Deg::Fin(a + b),
            _ => Deg::NegInf,
        }
    }
}

impl Add<i64> for Deg {
    type Output = Deg;
    fn add(self, rhs: i64) -> Deg {
        self + Deg::Fin(rhs)
    }
}

impl Sub<i64> for Deg {
    type Output = Deg;
    fn sub(self, rhs: i64) -> Deg {
        self + Deg::Fin(-rhs)
    }
}

impl fmt::Display for Deg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Deg::Fin(d) => write!(f, "{d}"),
            Deg::NegInf => write!(f, "-inf"),
        }
    }
}

/// Rational exponent or minus infinity, for quantities such as `r_psi(t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DegQ {
    NegInf,
    Fin(Rational),
}

impl DegQ {
    pub fn from_int(d: i64) -> Self {
        DegQ::Fin(Rational::from_integer(d))
    }

    pub fn fin(self) -> Option<Rational> {
        match self {
            DegQ::Fin(r) => Some(r),
            DegQ::NegInf => None,
        }
    }

    pub fn floor(self) -> Deg {
        match self {
            DegQ::Fin(r) => Deg::Fin(floor(r)),
            DegQ::NegInf => Deg::NegInf,
        }
    }

    pub fn ceil(self) -> Deg {
        match self {
            DegQ::Fin(r) => Deg::Fin(ceil(r)),
            DegQ::NegInf => Deg::NegInf,
        }
    }
}

impl From<Deg> for DegQ {
    fn from(d: Deg) -> Self {
        d.to_q()
    }
}

impl fmt::Display for DegQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DegQ::Fin(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            DegQ::NegInf => write!(f, "-inf"),
        }
    }
}

pub fn floor(r: Rational) -> i64 {
    Integer::div_floor(r.numer(), r.denom())
}

pub fn ceil(r: Rational) -> i64 {
    -Integer::div_floor(&-*r.numer(), r.denom())
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

/// `log_q ||v||` for a vector of exponents: the maximum entry.
pub fn vec_norm(entries: &[Deg]) -> Deg {
    entries.iter().copied().max().unwrap_or(Deg::NegInf)
}

impl Neg for DegQ {
    type Output = Option<DegQ>;
    fn neg(self) -> Option<DegQ> {
        self.fin().map(|r| DegQ::Fin(-r))
    }
}

/// Parses `"n/d"` or `"n"`.
pub fn parse_rational(s: &str) -> Result<Rational, String> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: i64 = n.parse().map_err(|_| format!("bad rational {s:?}"))?;
    let d: i64 = d.parse().map_err(|_| format!("bad rational {s:?}"))?;
    if d == 0 {
        return Err(format!("zero denominator in {s:?}"));
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(r: Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Serde adapter storing a [`Rational`] as the string `"n/d"`.
pub mod ratio_text {
    use super::{format_rational, parse_rational, Rational};
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(*r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

pub fn is_integer(r: Rational) -> bool {
    (r - Rational::from_integer(floor(r))).is_zero()
}

use std::collections::BTreeMap;
use std::fmt;

use num::bigint::BigUint;
use num::{One, ToPrimitive, Zero};

use crate::algebra::{format_rational, Rational};

/// `rational + sum coeff * log_q(arg)`, every `arg > 1` and not a power of `q`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogValue {
    pub q: u32,
    pub rational: Rational,
    pub logs: BTreeMap<BigUint, Rational>,
}

impl LogValue {
    pub fn rational(q: u32, r: Rational) -> Self {
        LogValue {
            q,
            rational: r,
            logs: BTreeMap::new(),
        }
    }

    /// `log_q(arg)`, folding powers of `q` into the rational part.
    pub fn log(q: u32, arg: BigUint) -> Self {
        assert!(!arg.is_zero(), "log of zero");
        let base = BigUint::from(q);
        let mut k = 0i64;
        let mut p = BigUint::one();
        while p < arg {
            p *= &base;
            k += 1;
        }
        let mut v = Self::rational(q, Rational::from_integer(0));
        if p == arg {
            v.rational = Rational::from_integer(k);
        } else {
            v.logs.insert(arg, Rational::from_integer(1));
        }
        v
    }

    pub fn scale(&self, c: Rational) -> Self {
        let zero = Rational::from_integer(0);
        LogValue {
            q: self.q,
            rational: self.rational * c,
            logs: self
                .logs
                .iter()
                .map(|(a, k)| (a.clone(), *k * c))
                .filter(|(_, k)| *k != zero)
                .collect(),
        }
    }

    pub fn add(&self, other: &LogValue) -> Self {
        let mut out = self.clone();
        out.rational += other.rational;
        for (a, k) in &other.logs {
            *out.logs
                .entry(a.clone())
                .or_insert(Rational::from_integer(0)) += *k;
        }
        out.logs.retain(|_, k| *k != Rational::from_integer(0));
        out
    }

    pub fn as_rational(&self) -> Option<Rational> {
        self.logs.is_empty().then_some(self.rational)
    }

    pub fn to_f64(&self) -> f64 {
        let lq = (self.q as f64).ln();
        let r = self.rational.to_f64().unwrap_or(f64::NAN);
        r + self
            .logs
            .iter()
            .map(|(a, k)| k.to_f64().unwrap_or(f64::NAN) * ln_big(a) / lq)
            .sum::<f64>()
    }
}

fn ln_big(a: &BigUint) -> f64 {
    let bits = a.bits();
    if bits < 1000 {
        return a.to_f64().expect("finite").ln();
    }
    let shift = bits - 64;
    (a >> shift).to_f64().expect("finite").ln() + shift as f64 * std::f64::consts::LN_2
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(self.rational))?;
        for (a, k) in &self.logs {
            write!(f, " + {}*log_{}({a})", format_rational(*k), self.q)?;
        }
        write!(f, " (~{:.6})", self.to_f64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn powers_fold() {
        assert_eq!(
            LogValue::log(2, BigUint::from(16u32)).as_rational(),
            Some(rat(4, 1))
        );
        assert_eq!(
            LogValue::log(3, BigUint::from(1u32)).as_rational(),
            Some(rat(0, 1))
        );
        let v = LogValue::log(2, BigUint::from(12u32));
        assert!(v.as_rational().is_none());
        assert!((v.to_f64() - 12f64.log2()).abs() < 1e-12);
        let w = v.scale(rat(1, 2)).add(&v.scale(rat(-1, 2)));
        assert_eq!(w.as_rational(), Some(rat(0, 1)));
        assert_eq!(
            format!("{}", v.scale(rat(1, 6))),
            "0/1 + 1/6*log_2(12) (~0.597494)"
        );
    }

    #[test]
    fn huge_arguments() {
        let a = BigUint::from(3u32).pow(5000);
        let v = LogValue::log(2, a);
        assert!((v.to_f64() - 5000.0 * 3f64.log2()).abs() < 1e-6);
    }
}

//! Approximation functions in exponent form.
//!
//! A power law `psi(H) = q^{-c} H^{-s}` becomes the affine map
//! `h -> -s h - c` on exponents `h = log_q H`.

use serde::{Deserialize, Serialize};

use crate::algebra::deg::ratio_text;
use crate::algebra::{ceil, floor, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiFunction {
    pub n: usize,
    /// Decay exponent `s`.
    #[serde(with = "ratio_text")]
    pub s: Rational,
    /// Exponent offset `c` (zero for a pure power law).
    #[serde(with = "ratio_text", default = "zero")]
    pub offset: Rational,
}

fn zero() -> Rational {
    Rational::from_integer(0)
}

impl PsiFunction {
    /// `psi(H) = H^{-s}`; requires `s n > n + 1`.
    pub fn power_law(n: usize, s: Rational) -> Result<Self> {
        Self::with_offset(n, s, zero())
    }

    pub fn with_offset(n: usize, s: Rational, offset: Rational) -> Result<Self> {
        if n == 0 {
            return Err(Error::Precondition("dimension n must be positive".into()));
        }
        let nn = Rational::from_integer(n as i64);
        if s * nn <= nn + 1 {
            return Err(Error::UnsupportedFamily(format!(
                "power law needs s*n > n+1, got s = {s} with n = {n}"
            )));
        }
        Ok(PsiFunction { n, s, offset })
    }

    fn nq(&self) -> Rational {
        Rational::from_integer(self.n as i64)
    }

    /// `log_q psi(q^h)`.
    pub fn log_psi(&self, h: Rational) -> Rational {
        -self.s * h - self.offset
    }

    /// `log_q psi(q^h)` when it is an integer.
    pub fn log_psi_int(&self, h: i64) -> Option<i64> {
        let v = self.log_psi(Rational::from_integer(h));
        v.is_integer().then(|| v.to_integer())
    }

    /// `log_q Psi(q^h)` for `Psi = psi^{-n/(n+1)}`.
    pub fn log_big_psi(&self, h: Rational) -> Rational {
        -self.log_psi(h) * self.nq() / (self.nq() + 1)
    }

    /// Inverse of [`Self::log_big_psi`].
    pub fn log_big_psi_inv(&self, y: Rational) -> Rational {
        (y * (self.nq() + 1) / self.nq() - self.offset) / self.s
    }

    /// `r_psi(t) = -n t + log_q Psi^{-1}(q^{n t})`.
    pub fn r_psi(&self, t: Rational) -> Rational {
        -self.nq() * t + self.log_big_psi_inv(self.nq() * t)
    }

    pub fn r_psi_int(&self, t: i64) -> Rational {
        self.r_psi(Rational::from_integer(t))
    }

    /// Slope of `r_psi` (constant for this family).
    pub fn r_slope(&self) -> Rational {
        (self.nq() + 1) / self.s - self.nq()
    }

    /// `(lambda, gamma)` with `lambda = s` and `gamma = (n s - n - 1) / (n s)`.
    pub fn lambda_gamma(&self) -> (Rational, Rational) {
        let nq = self.nq();
        (self.s, (nq * self.s - nq - 1) / (nq * self.s))
    }

    /// `log_q (H psi(H))` is non-increasing in `H`.
    pub fn alpha_non_increasing(&self) -> bool {
        self.s >= Rational::from_integer(1)
    }

    /// `sup_{t >= from} r_psi(t)`; the family is decreasing so this is `r_psi(from)`.
    pub fn sup_r_from(&self, from: Rational) -> Rational {
        self.r_psi(from)
    }

    pub fn r_floor(&self, t: i64) -> i64 {
        floor(self.r_psi_int(t))
    }

    pub fn r_ceil(&self, t: i64) -> i64 {
        ceil(self.r_psi_int(t))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;

    #[test]
    fn r_psi_closed_form() {
        let p = PsiFunction::power_law(1, rat(3, 1)).unwrap();
        assert_eq!(p.r_psi_int(30), rat(-10, 1));
        assert_eq!(p.r_psi_int(0), rat(0, 1));
        let p = PsiFunction::power_law(2, rat(2, 1)).unwrap();
        assert_eq!(p.r_psi_int(10), rat(-5, 1));
    }

    #[test]
    fn lambda_gamma_values() {
        let (l, g) = PsiFunction::power_law(1, rat(3, 1)).unwrap().lambda_gamma();
        assert_eq!((l, g), (rat(3, 1), rat(1, 3)));
        let (l, g) = PsiFunction::power_law(2, rat(2, 1)).unwrap().lambda_gamma();
        assert_eq!((l, g), (rat(2, 1), rat(1, 4)));
        let (_, g) = PsiFunction::power_law(1, rat(2001, 1000))
            .unwrap()
            .lambda_gamma();
        assert!(g < rat(1, 1000));
    }

    #[test]
    fn rejects_slow_decay() {
        assert!(PsiFunction::power_law(1, rat(2, 1)).is_err());
        assert!(PsiFunction::power_law(2, rat(3, 2)).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let p = PsiFunction::with_offset(2, rat(5, 2), rat(1, 3)).unwrap();
        for h in -5..20 {
            let h = rat(h, 1);
            assert_eq!(p.log_big_psi_inv(p.log_big_psi(h)), h);
        }
    }
}

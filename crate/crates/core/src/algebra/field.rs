//! Finite fields F_q with q = p^b, q <= 256, backed by full operation tables.
//!
//! Elements are encoded as integers `0..q`: the base-p digits of the encoding
//! are the coefficients of the residue polynomial modulo the defining modulus
//! (lowest digit first). For b = 1 the encoding is just the residue mod p.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// A field element, encoded as described in the module docs.
pub type Elem = u8;

#[derive(Clone, PartialEq, Eq)]
struct Tables {
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
}

/// Description of F_q together with its arithmetic tables.
#[derive(Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u32,
    b: u32,
    q: u32,
    /// Monic irreducible modulus over F_p, coefficients lowest first (b > 1 only).
    modulus: Option<Vec<u32>>,
    tables: Arc<Tables>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldSpec(q={}", self.q)?;
        if let Some(m) = &self.modulus {
            write!(f, ", modulus={m:?}")?;
        }
        write!(f, ")")
    }
}

fn is_prime(p: u32) -> bool {
    p >= 2
        && (2..)
            .take_while(|d| d * d <= p)
            .all(|d| !p.is_multiple_of(d))
}

/// Polynomials over F_p as coefficient vectors (lowest first), used only to
/// build extension tables.
fn fp_trim(mut a: Vec<u32>) -> Vec<u32> {
    while a.last() == Some(&0) {
        a.pop();
    }
    a
}

fn fp_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut prod = vec![0u32; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    fp_rem(prod, m, p)
}

fn fp_rem(a: Vec<u32>, m: &[u32], p: u32) -> Vec<u32> {
    let mut a = fp_trim(a);
    let dm = m.len() - 1;
    // m is monic
    while a.len() > dm {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - dm;
        for (j, &mj) in m.iter().enumerate() {
            a[shift + j] = (a[shift + j] + p * p - (lead * mj) % p) % p;
        }
        a = fp_trim(a);
    }
    a
}

fn encode(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn decode(mut e: u32, p: u32, b: u32) -> Vec<u32> {
    (0..b)
        .map(|_| {
            let d = e % p;
            e /= p;
            d
        })
        .collect()
}

/// True when the monic polynomial `m` of degree b has no monic factor of degree <= b/2.
fn fp_irreducible(m: &[u32], p: u32) -> bool {
    let b = m.len() - 1;
    for d in 1..=b / 2 {
        // enumerate monic polynomials of degree d
        for e in 0..p.pow(d as u32) {
            let mut cand = decode(e, p, d as u32);
            cand.push(1);
            if fp_rem(m.to_vec(), &cand, p).is_empty() {
                return false;
            }
        }
    }
    true
}

impl FieldSpec {
    /// The prime field F_p.
    pub fn prime(p: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        if p > 256 {
            return Err(Error::InvalidField(format!("q = {p} exceeds 256")));
        }
        Ok(Self::build(p, 1, None))
    }

    /// F_{p^b} defined by a monic irreducible modulus of degree b over F_p
    /// (coefficients lowest first, leading 1 included).
    pub fn extension(p: u32, modulus: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidField(format!("{p} is not prime")));
        }
        let modulus = fp_trim(modulus.into_iter().map(|c| c % p).collect());
        if modulus.len() < 2 {
            return Err(Error::InvalidField("modulus must have degree >= 1".into()));
        }
        if *modulus.last().unwrap() != 1 {
            return Err(Error::InvalidField("modulus must be monic".into()));
        }
        let b = (modulus.len() - 1) as u32;
        if b == 1 {
            return Self::prime(p);
        }
        let q = p
            .checked_pow(b)
            .filter(|&q| q <= 256)
            .ok_or_else(|| Error::InvalidField("q exceeds 256".into()))?;
        let _ = q;
        if !fp_irreducible(&modulus, p) {
            return Err(Error::InvalidField(format!(
                "modulus {modulus:?} is reducible over F_{p}"
            )));
        }
        Ok(Self::build(p, b, Some(modulus)))
    }

    /// F_q for a prime power q; extension fields need an explicit modulus.
    pub fn from_q(q: u32, modulus: Option<Vec<u32>>) -> Result<Self> {
        if is_prime(q) {
            return Self::prime(q);
        }
        let p = (2..=q)
            .find(|d| q.is_multiple_of(*d))
            .ok_or_else(|| Error::InvalidField(format!("bad q = {q}")))?;
        let mut r = q;
        while r.is_multiple_of(p) {
            r /= p;
        }
        if r != 1 {
            return Err(Error::InvalidField(format!("{q} is not a prime power")));
        }
        let m = modulus
            .ok_or_else(|| Error::InvalidField(format!("q = {q} needs an irreducible modulus")))?;
        let f = Self::extension(p, m)?;
        if f.q != q {
            return Err(Error::InvalidField(format!(
                "modulus degree gives q = {}, expected {q}",
                f.q
            )));
        }
        Ok(f)
    }

    fn build(p: u32, b: u32, modulus: Option<Vec<u32>>) -> Self {
        let q = p.pow(b);
        let qs = q as usize;
        let mut add = vec![0; qs * qs];
        let mut mul = vec![0; qs * qs];
        for x in 0..q {
            let dx = decode(x, p, b);
            for y in 0..q {
                let dy = decode(y, p, b);
                let s: Vec<u32> = dx.iter().zip(&dy).map(|(a, c)| (a + c) % p).collect();
                add[(x * q + y) as usize] = encode(&s, p) as Elem;
                let prod = match &modulus {
                    None => vec![(x * y) % p],
                    Some(m) => fp_mulmod(&dx, &dy, m, p),
                };
                let mut prod = prod;
                prod.resize(b as usize, 0);
                mul[(x * q + y) as usize] = encode(&prod, p) as Elem;
            }
        }
        let mut neg = vec![0; qs];
        let mut inv = vec![0; qs];
        for x in 0..qs {
            for y in 0..qs {
                if add[x * qs + y] == 0 {
                    neg[x] = y as Elem;
                }
                if mul[x * qs + y] == 1 {
                    inv[x] = y as Elem;
                }
            }
        }
        FieldSpec {
            p,
            b,
            q,
            modulus,
            tables: Arc::new(Tables { add, mul, neg, inv }),
        }
    }

    pub fn p(&self) -> u32 {
        self.p
    }
    pub fn b(&self) -> u32 {
        self.b
    }
    pub fn q(&self) -> u32 {
        self.q
    }
    pub fn modulus(&self) -> Option<&[u32]> {
        self.modulus.as_deref()
    }
    /// Polynomials over this field use the bit-packed representation.
    pub fn is_binary(&self) -> bool {
        self.q == 2
    }

    #[inline]
    pub fn add(&self, x: Elem, y: Elem) -> Elem {
        self.tables.add[x as usize * self.q as usize + y as usize]
    }
    #[inline]
    pub fn sub(&self, x: Elem, y: Elem) -> Elem {
        self.add(x, self.neg(y))
    }
    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        self.tables.mul[x as usize * self.q as usize + y as usize]
    }
    #[inline]
    pub fn neg(&self, x: Elem) -> Elem {
        self.tables.neg[x as usize]
    }
    /// Multiplicative inverse; `inv(0)` is an error.
    pub fn inv(&self, x: Elem) -> Result<Elem> {
        if x == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.tables.inv[x as usize])
        }
    }
    /// The "successor" of an element in the encoding order, cycling through 0..q.
    pub fn successor(&self, x: Elem) -> Elem {
        ((x as u32 + 1) % self.q) as Elem
    }
    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(|e| e as Elem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn axioms(f: &FieldSpec) {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let q = f.q();
        for _ in 0..2000 {
            let (a, b, c) = (
                rng.gen_range(0..q) as Elem,
                rng.gen_range(0..q) as Elem,
                rng.gen_range(0..q) as Elem,
            );
            assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
            assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
            assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
            assert_eq!(f.add(a, f.neg(a)), 0);
            if a != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn prime_fields_satisfy_axioms() {
        for p in [2, 3, 5, 7] {
            axioms(&FieldSpec::prime(p).unwrap());
        }
    }

    #[test]
    fn f4_from_modulus() {
        let f = FieldSpec::from_q(4, Some(vec![1, 1, 1])).unwrap();
        assert_eq!(f.q(), 4);
        axioms(&f);
        // X * X = X + 1 with X encoded as 2
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn rejects_bad_specs() {
        assert!(FieldSpec::prime(4).is_err());
        assert!(FieldSpec::from_q(4, Some(vec![1, 0, 1])).is_err());
        assert!(FieldSpec::from_q(6, None).is_err());
        assert!(FieldSpec::from_q(9, None).is_err());
        assert!(FieldSpec::from_q(9, Some(vec![1, 0, 1])).is_ok());
    }
}

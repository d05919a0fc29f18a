//! Univariate polynomials over F_q.
//!
//! Over F_2 coefficients are bit-packed into `u64` words; every other field
//! uses one byte per coefficient. Both representations are kept trimmed (no
//! trailing zero words or coefficients) so derived equality is semantic.

use std::cmp::Ordering;

use super::deg::Deg;
use super::field::{Elem, FieldSpec};
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Poly {
    /// Bit i of word i/64 is the coefficient of X^i (F_2 only).
    Bits(Vec<u64>),
    /// Coefficient of X^i at index i.
    Dense(Vec<Elem>),
}

fn trim_bits(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

fn trim_dense(v: &mut Vec<Elem>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// `dst ^= src << shift` on bit vectors; `dst` grows as needed.
pub(crate) fn xor_shifted(dst: &mut Vec<u64>, src: &[u64], shift: usize) {
    if src.is_empty() {
        return;
    }
    let ws = shift / 64;
    let bs = (shift % 64) as u32;
    let need = ws + src.len() + usize::from(bs != 0);
    if dst.len() < need {
        dst.resize(need, 0);
    }
    if bs == 0 {
        for (d, &s) in dst[ws..].iter_mut().zip(src) {
            *d ^= s;
        }
    } else {
        let mut carry = 0u64;
        for (i, &s) in src.iter().enumerate() {
            dst[ws + i] ^= (s << bs) | carry;
            carry = s >> (64 - bs);
        }
        dst[ws + src.len()] ^= carry;
    }
}

/// `src >> shift` on bit vectors (drops the low `shift` bits).
pub(crate) fn shr_bits(src: &[u64], shift: usize) -> Vec<u64> {
    let ws = shift / 64;
    if ws >= src.len() {
        return Vec::new();
    }
    let bs = (shift % 64) as u32;
    let mut out: Vec<u64> = if bs == 0 {
        src[ws..].to_vec()
    } else {
        let tail = &src[ws..];
        (0..tail.len())
            .map(|i| {
                let hi = tail.get(i + 1).map_or(0, |&w| w << (64 - bs));
                (tail[i] >> bs) | hi
            })
            .collect()
    };
    trim_bits(&mut out);
    out
}

impl Poly {
    pub fn zero(f: &FieldSpec) -> Self {
        if f.is_binary() {
            Poly::Bits(Vec::new())
        } else {
            Poly::Dense(Vec::new())
        }
    }

    pub fn one(f: &FieldSpec) -> Self {
        Self::monomial(f, 1, 0)
    }

    /// `c X^k`.
    pub fn monomial(f: &FieldSpec, c: Elem, k: usize) -> Self {
        let mut p = Self::zero(f);
        if c != 0 {
            p.set_coeff(k, c);
        }
        p
    }

    /// Builds a polynomial from coefficients, lowest degree first.
    pub fn from_coeffs(f: &FieldSpec, coeffs: &[Elem]) -> Self {
        let mut p = Self::zero(f);
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0 {
                p.set_coeff(i, c % f.q() as Elem);
            }
        }
        p
    }

    /// The same polynomial in the byte-per-coefficient representation.
    pub fn to_dense(&self) -> Self {
        Poly::Dense(self.coeffs())
    }

    /// The zero polynomial in the same representation as `self`.
    pub fn empty_like(&self) -> Poly {
        match self {
            Poly::Bits(_) => Poly::Bits(Vec::new()),
            Poly::Dense(_) => Poly::Dense(Vec::new()),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Poly::Bits(v) => v.is_empty(),
            Poly::Dense(v) => v.is_empty(),
        }
    }

    pub fn degree(&self) -> Option<usize> {
        match self {
            Poly::Bits(v) => v
                .last()
                .map(|w| (v.len() - 1) * 64 + 63 - w.leading_zeros() as usize),
            Poly::Dense(v) => v.len().checked_sub(1),
        }
    }

    pub fn deg(&self) -> Deg {
        match self.degree() {
            Some(d) => Deg::Fin(d as i64),
            None => Deg::NegInf,
        }
    }

    #[inline]
    pub fn coeff(&self, i: usize) -> Elem {
        match self {
            Poly::Bits(v) => v.get(i / 64).map_or(0, |w| ((w >> (i % 64)) & 1) as Elem),
            Poly::Dense(v) => v.get(i).copied().unwrap_or(0),
        }
    }

    pub fn leading_coeff(&self) -> Elem {
        self.degree().map_or(0, |d| self.coeff(d))
    }

    pub fn set_coeff(&mut self, i: usize, c: Elem) {
        match self {
            Poly::Bits(v) => {
                if v.len() <= i / 64 {
                    if c & 1 == 0 {
                        return;
                    }
                    v.resize(i / 64 + 1, 0);
                }
                let bit = 1u64 << (i % 64);
                if c & 1 == 1 {
                    v[i / 64] |= bit;
                } else {
                    v[i / 64] &= !bit;
                }
                trim_bits(v);
            }
            Poly::Dense(v) => {
                if v.len() <= i {
                    if c == 0 {
                        return;
                    }
                    v.resize(i + 1, 0);
                }
                v[i] = c;
                trim_dense(v);
            }
        }
    }

    /// Coefficients lowest first, `degree + 1` entries.
    pub fn coeffs(&self) -> Vec<Elem> {
        match self {
            Poly::Dense(v) => v.clone(),
            Poly::Bits(_) => (0..self.degree().map_or(0, |d| d + 1))
                .map(|i| self.coeff(i))
                .collect(),
        }
    }

    /// Indices of nonzero coefficients, ascending.
    pub fn support(&self) -> Vec<usize> {
        match self {
            Poly::Bits(v) => {
                let mut out = Vec::new();
                for (wi, &w) in v.iter().enumerate() {
                    let mut w = w;
                    while w != 0 {
                        let b = w.trailing_zeros() as usize;
                        out.push(wi * 64 + b);
                        w &= w - 1;
                    }
                }
                out
            }
            Poly::Dense(v) => (0..v.len()).filter(|&i| v[i] != 0).collect(),
        }
    }

    /// `self += c * X^k * other`.
    pub fn add_scaled_shifted(&mut self, f: &FieldSpec, other: &Poly, c: Elem, k: usize) {
        if c == 0 || other.is_zero() {
            return;
        }
        match (self, other) {
            (Poly::Bits(a), Poly::Bits(b)) => {
                xor_shifted(a, b, k);
                trim_bits(a);
            }
            (Poly::Dense(a), Poly::Dense(b)) => {
                if a.len() < b.len() + k {
                    a.resize(b.len() + k, 0);
                }
                if c == 1 {
                    for (x, &y) in a[k..].iter_mut().zip(b) {
                        *x = f.add(*x, y);
                    }
                } else {
                    for (x, &y) in a[k..].iter_mut().zip(b) {
                        *x = f.add(*x, f.mul(c, y));
                    }
                }
                trim_dense(a);
            }
            _ => panic!("mixed polynomial representations"),
        }
    }

    pub fn add(&self, f: &FieldSpec, other: &Poly) -> Poly {
        let mut r = self.clone();
        r.add_scaled_shifted(f, other, 1, 0);
        r
    }

    pub fn sub(&self, f: &FieldSpec, other: &Poly) -> Poly {
        let mut r = self.clone();
        r.add_scaled_shifted(f, other, f.neg(1), 0);
        r
    }

    pub fn neg(&self, f: &FieldSpec) -> Poly {
        self.scale(f, f.neg(1))
    }

    pub fn scale(&self, f: &FieldSpec, c: Elem) -> Poly {
        if c == 0 {
            return self.empty_like();
        }
        match self {
            Poly::Bits(_) => self.clone(),
            Poly::Dense(v) => Poly::Dense(v.iter().map(|&x| f.mul(c, x)).collect()),
        }
    }

    /// Multiplication by X^k.
    pub fn shl(&self, k: usize) -> Poly {
        match self {
            Poly::Bits(v) => {
                let mut out = Vec::new();
                xor_shifted(&mut out, v, k);
                trim_bits(&mut out);
                Poly::Bits(out)
            }
            Poly::Dense(v) => {
                if v.is_empty() {
                    return self.clone();
                }
                let mut out = vec![0; k];
                out.extend_from_slice(v);
                Poly::Dense(out)
            }
        }
    }

    /// `floor(self / X^k)`: drops the `k` lowest coefficients.
    pub fn shr(&self, k: usize) -> Poly {
        match self {
            Poly::Bits(v) => Poly::Bits(shr_bits(v, k)),
            Poly::Dense(v) => Poly::Dense(v.get(k..).map(|s| s.to_vec()).unwrap_or_default()),
        }
    }

    /// `self mod X^k`.
    pub fn truncate(&self, k: usize) -> Poly {
        match self {
            Poly::Bits(v) => {
                let mut out: Vec<u64> = v.iter().take(k.div_ceil(64)).copied().collect();
                if !k.is_multiple_of(64) {
                    if let Some(last) = out.get_mut(k / 64) {
                        *last &= (1u64 << (k % 64)) - 1;
                    }
                }
                trim_bits(&mut out);
                Poly::Bits(out)
            }
            Poly::Dense(v) => {
                let mut out: Vec<Elem> = v.iter().take(k).copied().collect();
                trim_dense(&mut out);
                Poly::Dense(out)
            }
        }
    }

    pub fn mul(&self, f: &FieldSpec, other: &Poly) -> Poly {
        let (small, large) = if self.support_len() <= other.support_len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut acc = large.empty_like();
        for i in small.support() {
            acc.add_scaled_shifted(f, large, small.coeff(i), i);
        }
        acc
    }

    fn support_len(&self) -> usize {
        match self {
            Poly::Bits(v) => v.iter().map(|w| w.count_ones() as usize).sum(),
            Poly::Dense(v) => v.iter().filter(|&&c| c != 0).count(),
        }
    }

    /// Euclidean division: `(quotient, remainder)` with `deg r < deg b`.
    pub fn divmod(&self, f: &FieldSpec, b: &Poly) -> Result<(Poly, Poly)> {
        let db = b.degree().ok_or(Error::DivisionByZero)?;
        let inv = f.inv(b.leading_coeff())?;
        let mut r = self.clone();
        let mut q = self.empty_like();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let c = f.mul(r.leading_coeff(), inv);
            q.set_coeff(dr - db, c);
            r.add_scaled_shifted(f, b, f.neg(c), dr - db);
        }
        Ok((q, r))
    }

    /// The monic associate (zero stays zero).
    pub fn monic(&self, f: &FieldSpec) -> Poly {
        match self.leading_coeff() {
            0 | 1 => self.clone(),
            lc => self.scale(f, f.inv(lc).expect("nonzero")),
        }
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, f: &FieldSpec, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.divmod(f, &b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic(f)
    }

    /// Degree-then-coefficient order used for deterministic tie-breaks.
    pub fn cmp_canonical(&self, other: &Poly) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let d = self.degree().unwrap_or(0);
            for i in (0..=d).rev() {
                match self.coeff(i).cmp(&other.coeff(i)) {
                    Ordering::Equal => continue,
                    o => return o,
                }
            }
            Ordering::Equal
        })
    }
}

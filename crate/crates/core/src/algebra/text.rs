//! Text encodings shared by every CLI input and output.
//!
//! ```text
//! field   := "q=" INT [ ";" "modulus=" poly ]       e.g. "q=4; modulus=X^2+X+1"
//! poly    := "0" | term ( "+" term )*               e.g. "X^3+2*X+1"
//! term    := [ COEF "*" ] "X" [ "^" INT ] | COEF
//! series  := poly-with-integer-exponents [ "(prec" INT ")" ]
//!                                                    e.g. "X^-1+X^-3 (prec -64)"
//! ```
//!
//! Coefficients are element encodings `0..q` (see [`FieldSpec`]). Terms are
//! printed in descending exponent order; `(prec F)` means the series is known
//! for exponents `> F`; a series without it is exact.

use super::field::{Elem, FieldSpec};
use super::laurent::Laurent;
use super::poly::Poly;
use crate::error::{Error, Result};

fn parse_terms(s: &str) -> Result<Vec<(i64, u32)>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() || s == "0" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for term in s.split('+') {
        if term.is_empty() {
            return Err(Error::Parse(format!("empty term in {s:?}")));
        }
        let (coef, rest) = match term.find('X') {
            None => {
                let c = term
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad term {term:?}")))?;
                out.push((0, c));
                continue;
            }
            Some(0) => (1u32, &term[1..]),
            Some(i) => {
                let c = term[..i]
                    .strip_suffix('*')
                    .ok_or_else(|| Error::Parse(format!("expected '*' in {term:?}")))?;
                let c = c
                    .parse::<u32>()
                    .map_err(|_| Error::Parse(format!("bad coefficient in {term:?}")))?;
                (c, &term[i + 1..])
            }
        };
        let exp = if rest.is_empty() {
            1
        } else {
            rest.strip_prefix('^')
                .and_then(|e| e.parse::<i64>().ok())
                .ok_or_else(|| Error::Parse(format!("bad exponent in {term:?}")))?
        };
        out.push((exp, coef));
    }
    Ok(out)
}

fn accumulate(f: &FieldSpec, terms: &[(i64, u32)]) -> Result<Vec<(i64, Elem)>> {
    let mut acc: std::collections::BTreeMap<i64, Elem> = Default::default();
    for &(e, c) in terms {
        if c >= f.q() {
            return Err(Error::Parse(format!(
                "coefficient {c} is not below q = {}",
                f.q()
            )));
        }
        let slot = acc.entry(e).or_insert(0);
        *slot = f.add(*slot, c as Elem);
    }
    Ok(acc.into_iter().collect())
}

pub fn parse_poly(f: &FieldSpec, s: &str) -> Result<Poly> {
    let terms = accumulate(f, &parse_terms(s)?)?;
    let mut p = Poly::zero(f);
    for (e, c) in terms {
        if e < 0 {
            return Err(Error::Parse(format!(
                "negative exponent in polynomial {s:?}"
            )));
        }
        p.set_coeff(e as usize, c);
    }
    Ok(p)
}

fn fmt_term(c: Elem, e: i64) -> String {
    let x = match e {
        0 => return c.to_string(),
        1 => "X".to_string(),
        _ => format!("X^{e}"),
    };
    if c == 1 {
        x
    } else {
        format!("{c}*{x}")
    }
}

fn fmt_terms(terms: &[(i64, Elem)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|&(e, c)| fmt_term(c, e))
        .collect::<Vec<_>>()
        .join("+")
}

pub fn format_poly(p: &Poly) -> String {
    let mut t: Vec<(i64, Elem)> = p
        .support()
        .into_iter()
        .map(|i| (i as i64, p.coeff(i)))
        .collect();
    t.reverse();
    fmt_terms(&t)
}

pub fn parse_series(f: &FieldSpec, s: &str) -> Result<Laurent> {
    let (body, floor) = match s.find("(prec") {
        Some(i) => {
            let rest = s[i + 5..].trim();
            let num = rest
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unterminated precision in {s:?}")))?;
            let fl = num
                .trim()
                .parse::<i64>()
                .map_err(|_| Error::Parse(format!("bad precision in {s:?}")))?;
            (&s[..i], Some(fl))
        }
        None => (s, None),
    };
    let terms = accumulate(f, &parse_terms(body)?)?;
    if let Some(fl) = floor {
        if let Some(&(e, _)) = terms.iter().find(|(e, _)| *e <= fl) {
            return Err(Error::Parse(format!(
                "term X^{e} lies at or below the precision floor {fl}"
            )));
        }
    }
    Ok(Laurent::from_terms(f, &terms, floor))
}

pub fn format_series(s: &Laurent) -> String {
    let body = fmt_terms(&s.terms());
    match s.floor() {
        Some(fl) => format!("{body} (prec {fl})"),
        None => body,
    }
}

pub fn parse_field(s: &str) -> Result<FieldSpec> {
    let mut q = None;
    let mut modulus = None;
    for part in s.split(';') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
        match k.trim() {
            "q" => {
                q = Some(
                    v.trim()
                        .parse::<u32>()
                        .map_err(|_| Error::Parse(format!("bad q {v:?}")))?,
                )
            }
            "modulus" => modulus = Some(v.trim().to_string()),
            other => return Err(Error::Parse(format!("unknown field key {other:?}"))),
        }
    }
    let q = q.ok_or_else(|| Error::Parse("field spec needs q".into()))?;
    let modulus = match modulus {
        None => None,
        Some(m) => {
            let p = (2..=q).find(|d| q % d == 0).unwrap_or(q);
            let terms = parse_terms(&m)?;
            let deg = terms.iter().map(|t| t.0).max().unwrap_or(0).max(0) as usize;
            let mut coeffs = vec![0u32; deg + 1];
            for (e, c) in terms {
                if e < 0 {
                    return Err(Error::Parse("negative exponent in modulus".into()));
                }
                coeffs[e as usize] = (coeffs[e as usize] + c) % p;
            }
            Some(coeffs)
        }
    };
    FieldSpec::from_q(q, modulus)
}

pub fn format_field(f: &FieldSpec) -> String {
    match f.modulus() {
        None => format!("q={}", f.q()),
        Some(m) => {
            let t: Vec<(i64, Elem)> = m
                .iter()
                .enumerate()
                .rev()
                .filter(|(_, &c)| c != 0)
                .map(|(i, &c)| (i as i64, c as Elem))
                .collect();
            format!("q={}; modulus={}", f.q(), fmt_terms(&t))
        }
    }
}

/// Hex encoding of a coefficient block (one nibble per coefficient for q <= 16,
/// two hex digits otherwise), most significant exponent first.
pub fn hex_digits(q: u32, digits: &[Elem]) -> String {
    let width = if q <= 16 { 1 } else { 2 };
    digits
        .iter()
        .map(|d| format!("{:0width$x}", d, width = width))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poly_round_trip() {
        let f = FieldSpec::prime(3).unwrap();
        let p = parse_poly(&f, "2*X^3 + X + 1").unwrap();
        assert_eq!(p.coeffs(), vec![1, 1, 0, 2]);
        assert_eq!(format_poly(&p), "2*X^3+X+1");
        assert_eq!(format_poly(&Poly::zero(&f)), "0");
    }

    #[test]
    fn series_with_precision() {
        let f = FieldSpec::prime(2).unwrap();
        let s = parse_series(&f, "X^-1+X^-3 (prec -64)").unwrap();
        assert_eq!(s.floor(), Some(-64));
        assert_eq!(format_series(&s), "X^-1+X^-3 (prec -64)");
        assert!(parse_series(&f, "X^-70 (prec -64)").is_err());
    }

    #[test]
    fn field_specs() {
        let f = parse_field("q=4; modulus=X^2+X+1").unwrap();
        assert_eq!(f.q(), 4);
        assert_eq!(format_field(&f), "q=4; modulus=X^2+X+1");
        assert_eq!(parse_field("q=5").unwrap().q(), 5);
        assert!(parse_field("q=4").is_err());
    }

    #[test]
    fn rejects_out_of_range_coefficients() {
        let f = FieldSpec::prime(2).unwrap();
        assert!(parse_poly(&f, "2*X").is_err());
        assert!(parse_poly(&f, "X^").is_err());
    }
}

//! The diagonal flow `g_t = diag(X^{-nt}, X^t, ..., X^t)` acting on
//! `u_x F_q[X]^{n+1}`, the trajectory `c_x(t) = log_q lambda_1`, and the two
//! directions of the Dani correspondence.
//!
//! The vector `v = (g, f_1, ..., f_n)` maps to
//! `(X^{-nt} g, X^t (f_1 - x_1 g), ..., X^t (f_n - x_n g))`. Only the column
//! shifts depend on `t`, so a trajectory re-reduces one basis as `t` moves.

mod trajectory;

pub(crate) use trajectory::certificate_equality;
pub use trajectory::{trajectory, FlowSession, Trajectory, TrajectoryPoint, Verdict};

use crate::algebra::{ceil, floor, Deg, FieldSpec, Laurent, LaurentVector, Poly, Rational};
use crate::error::{Error, Result};
use crate::lattice::ShiftedLattice;
use crate::template::PsiFunction;

/// Floor the coordinates of `x` must reach for the flow at time `t`.
pub fn required_floor(n: usize, t: i64) -> i64 {
    let n = n as i64;
    -((n + 1) * t + n * t + 8)
}

pub fn flow_shifts(n: usize, t: i64) -> Vec<i64> {
    let mut s = vec![t; n + 1];
    s[0] = -(n as i64) * t;
    s
}

/// Rows `(1, -x_1, ..., -x_n)` and `e_2, ..., e_{n+1}` of `u_x`.
pub fn embedding_rows(f: &FieldSpec, x: &LaurentVector) -> Vec<Vec<Laurent>> {
    let n = x.dim();
    let mut first = vec![Laurent::from_poly(Poly::one(f))];
    first.extend(x.coords().iter().map(|c| c.neg(f)));
    let mut rows = vec![first];
    for i in 0..n {
        let mut r = vec![Laurent::zero(f); n + 1];
        r[i + 1] = Laurent::from_poly(Poly::one(f));
        rows.push(r);
    }
    rows
}

pub(crate) fn check_precision(x: &LaurentVector, t: i64) -> Result<()> {
    if let Some(fl) = x.floor() {
        let need = required_floor(x.dim(), t);
        if fl > need {
            return Err(Error::PrecisionExhausted {
                needed: need,
                floor: fl,
            });
        }
    }
    Ok(())
}

/// The lattice `g_t u_x F_q[X]^{n+1}`.
pub fn apply_flow(f: &FieldSpec, x: &LaurentVector, t: i64) -> Result<ShiftedLattice> {
    check_precision(x, t)?;
    ShiftedLattice::new(f, embedding_rows(f, x), flow_shifts(x.dim(), t))
}

/// `c_x(t) = log_q lambda_1(g_t u_x F_q[X]^{n+1})`.
pub fn c_value(f: &FieldSpec, x: &LaurentVector, t: i64) -> Result<i64> {
    Ok(apply_flow(f, x, t)?.successive_minima()?.d[0])
}

/// A rational point `f / g` with `g` monic.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPoint {
    g: Poly,
    f: Vec<Poly>,
}

impl RationalPoint {
    pub fn new(field: &FieldSpec, g: Poly, f: Vec<Poly>) -> Result<Self> {
        if g.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let c = field.inv(g.leading_coeff())?;
        Ok(RationalPoint {
            g: g.scale(field, c),
            f: f.iter().map(|p| p.scale(field, c)).collect(),
        })
    }

    /// From `(g, f_1, ..., f_n)`; `None` when `g = 0`.
    pub fn from_vector(field: &FieldSpec, v: &[Poly]) -> Option<Self> {
        Self::new(field, v[0].clone(), v[1..].to_vec()).ok()
    }

    pub fn g(&self) -> &Poly {
        &self.g
    }
    pub fn f(&self) -> &[Poly] {
        &self.f
    }
    pub fn n(&self) -> usize {
        self.f.len()
    }

    pub fn vector(&self) -> Vec<Poly> {
        let mut v = vec![self.g.clone()];
        v.extend(self.f.iter().cloned());
        v
    }

    /// `log_q H(v) = max(deg g, deg f_i)`.
    pub fn height(&self) -> i64 {
        self.vector()
            .iter()
            .filter_map(Poly::degree)
            .max()
            .expect("g is nonzero") as i64
    }

    /// Coordinates `f_i / g` expanded above `floor`.
    pub fn as_series(&self, field: &FieldSpec, floor: i64) -> Result<LaurentVector> {
        let coords = self
            .f
            .iter()
            .map(|fi| Laurent::quotient(field, fi, &self.g, floor))
            .collect::<Result<Vec<_>>>()?;
        Ok(LaurentVector::new(coords))
    }
}

/// `log_q d(x, v) = max_i log_q |x_i - f_i / g|`.
pub fn dist(field: &FieldSpec, x: &LaurentVector, v: &RationalPoint) -> Result<Deg> {
    let dg = v.g.degree().expect("nonzero") as i64;
    let mut best = Deg::NegInf;
    for (xi, fi) in x.coords().iter().zip(v.f()) {
        let e = xi
            .mul_poly(field, &v.g)
            .sub(field, &Laurent::from_poly(fi.clone()));
        best = best.max(e.top()? - dg);
    }
    Ok(best)
}

/// Exponents of `|<e_1, g_t u_x v>|` and `||g_t u_x v||`.
pub fn flow_norm(field: &FieldSpec, x: &LaurentVector, v: &[Poly], t: i64) -> Result<(Deg, Deg)> {
    let n = x.dim() as i64;
    let first = v[0].deg() + (-n * t);
    let mut norm = first;
    for (xi, fi) in x.coords().iter().zip(&v[1..]) {
        let e = Laurent::from_poly(fi.clone()).sub(field, &xi.mul_poly(field, &v[0]));
        norm = norm.max(e.top()? + t);
    }
    Ok((first, norm))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DaniForward {
    pub t: i64,
    /// `true` when `log Psi(H) / n` was not an integer and `t` is its ceiling.
    pub adjusted: bool,
    pub norm_bound_holds: bool,
    pub e1_attains: bool,
}

/// From a good approximation to a short vector: at `n t = log Psi(H(v))`,
/// `||g_t u_x v|| <= r_psi(t)` and the first coordinate attains the norm.
pub fn dani_forward(
    field: &FieldSpec,
    x: &LaurentVector,
    v: &RationalPoint,
    psi: &PsiFunction,
) -> Result<DaniForward> {
    let n = x.dim() as i64;
    let h = Rational::from_integer(v.height());
    let d = dist(field, x, v)?;
    let within = match d {
        Deg::NegInf => true,
        Deg::Fin(d) => Rational::from_integer(d) <= psi.log_psi(h),
    };
    if !within {
        return Err(Error::Precondition("d(x, v) exceeds psi(H(v))".into()));
    }
    let tau = psi.log_big_psi(h) / n;
    let t = ceil(tau);
    let adjusted = !tau.is_integer();
    if t < 0 {
        return Err(Error::GridMisalignment(format!(
            "flow time {tau} is negative"
        )));
    }
    // slopes of the norm are at most 1, so the bound grows by t - tau
    let bound = psi.r_psi(tau) + (Rational::from_integer(t) - tau);
    let (e1, norm) = flow_norm(field, x, &v.vector(), t)?;
    let holds = match norm {
        Deg::NegInf => true,
        Deg::Fin(k) => k <= floor(bound),
    };
    Ok(DaniForward {
        t,
        adjusted,
        norm_bound_holds: holds,
        e1_attains: e1 == norm,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DaniMode {
    /// The witness' first coordinate must attain its norm.
    E1,
    /// `H psi(H)` non-increasing replaces the first-coordinate condition.
    Monotone,
}

/// From a short vector at time `t` to a rational point with
/// `H(v) <= Psi^{-1}(q^{nt})` and `d(x, v) <= psi(H(v))`, both verified
/// directly. `None` when no canonical witness qualifies.
pub fn dani_backward(
    field: &FieldSpec,
    x: &LaurentVector,
    t: i64,
    psi: &PsiFunction,
    mode: DaniMode,
) -> Result<Option<RationalPoint>> {
    let n = x.dim() as i64;
    let lattice = apply_flow(field, x, t)?;
    let w = lattice.shortest_vector()?;
    let (e1, norm) = flow_norm(field, x, &w, t)?;
    let Deg::Fin(norm) = norm else {
        return Ok(None);
    };
    if norm > floor(psi.r_psi_int(t)) {
        return Ok(None);
    }
    match mode {
        DaniMode::E1 if e1 != Deg::Fin(norm) => return Ok(None),
        DaniMode::Monotone if !psi.alpha_non_increasing() => {
            return Err(Error::Precondition("H psi(H) is not non-increasing".into()))
        }
        _ => {}
    }
    let Some(v) = RationalPoint::from_vector(field, &w) else {
        return Ok(None);
    };
    let h = Rational::from_integer(v.height());
    let height_ok = h <= psi.log_big_psi_inv(Rational::from_integer(n * t));
    let dist_ok = match dist(field, x, &v)? {
        Deg::NegInf => true,
        Deg::Fin(d) => Rational::from_integer(d) <= psi.log_psi(h),
    };
    Ok((height_ok && dist_ok).then_some(v))
}

/// The quadratic irrational root of `x^2 + X x + 1` in `X^{-1} F_q[[X^{-1}]]`,
/// known above `floor`.
pub fn quadratic_irrational(field: &FieldSpec, floor: i64) -> Result<Laurent> {
    // convergents of x = -1 / (X + x)
    let x = Poly::monomial(field, 1, 1);
    let (mut p, mut q) = (Poly::zero(field), Poly::one(field));
    let steps = (-floor).max(0) / 2 + 2;
    for _ in 0..steps {
        let np = q.neg(field);
        let nq = x.mul(field, &q).add(field, &p);
        p = np;
        q = nq;
    }
    Ok(Laurent::quotient(field, &p, &q, floor)?.with_floor(floor))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::algebra::text::parse_series;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    fn point(f: &FieldSpec, s: &[&str]) -> LaurentVector {
        LaurentVector::new(s.iter().map(|c| parse_series(f, c).unwrap()).collect())
    }

    #[test]
    fn zero_point_has_diagonal_minima() {
        let f = f2();
        let x = point(&f, &["0"]);
        let l = apply_flow(&f, &x, 3).unwrap();
        assert_eq!(l.shifts(), &[-3, 3]);
        assert_eq!(c_value(&f, &x, 3), Ok(-3));
        let l0 = apply_flow(&f, &point(&f, &["X^-1+X^-2", "X^-3"]), 0).unwrap();
        assert_eq!(l0.successive_minima().unwrap().d, vec![0, 0, 0]);
    }

    #[test]
    fn inverse_x_examples() {
        let f = f2();
        let x = point(&f, &["X^-1"]);
        assert_eq!(
            apply_flow(&f, &x, 2)
                .unwrap()
                .successive_minima()
                .unwrap()
                .d,
            vec![-1, 1]
        );
        assert_eq!(c_value(&f, &x, 5), Ok(-4));
    }

    #[test]
    fn precision_is_checked() {
        let f = f2();
        let x = point(&f, &["X^-1 (prec -10)"]);
        assert!(matches!(
            apply_flow(&f, &x, 5),
            Err(Error::PrecisionExhausted { needed: -23, .. })
        ));
    }

    #[test]
    fn distance_examples() {
        let f = f2();
        let x = point(&f, &["X^-2+X^-6"]);
        let v = RationalPoint::new(&f, Poly::monomial(&f, 1, 2), vec![Poly::one(&f)]).unwrap();
        assert_eq!(v.height(), 2);
        assert_eq!(dist(&f, &x, &v), Ok(Deg::Fin(-6)));
        let exact = v.as_series(&f, -40).unwrap();
        assert_eq!(dist(&f, &exact, &v), Ok(Deg::NegInf));
        let truncated = exact.with_floor(-40);
        assert!(dist(&f, &truncated, &v).is_err());
    }

    #[test]
    fn dani_round_trip() {
        let f = f2();
        let psi = PsiFunction::power_law(1, rat(3, 1)).unwrap();
        let x = point(&f, &["X^-2+X^-6"]);
        let v = RationalPoint::new(&f, Poly::monomial(&f, 1, 2), vec![Poly::one(&f)]).unwrap();
        let fw = dani_forward(&f, &x, &v, &psi).unwrap();
        assert_eq!(
            fw,
            DaniForward {
                t: 3,
                adjusted: false,
                norm_bound_holds: true,
                e1_attains: true
            }
        );
        let back = dani_backward(&f, &x, 3, &psi, DaniMode::E1).unwrap();
        assert_eq!(back, Some(v));
    }

    #[test]
    fn dani_backward_on_zero() {
        let f = f2();
        let psi = PsiFunction::power_law(1, rat(3, 1)).unwrap();
        let v = dani_backward(&f, &point(&f, &["0"]), 6, &psi, DaniMode::E1)
            .unwrap()
            .unwrap();
        assert_eq!(v.height(), 0);
        assert_eq!(dist(&f, &point(&f, &["0"]), &v), Ok(Deg::NegInf));
    }

    #[test]
    fn badly_approximable_has_no_dani_witness() {
        let f = f2();
        let psi = PsiFunction::power_law(1, rat(3, 1)).unwrap();
        let x = LaurentVector::new(vec![quadratic_irrational(&f, -200).unwrap()]);
        for t in [9, 15, 24] {
            assert_eq!(dani_backward(&f, &x, t, &psi, DaniMode::E1).unwrap(), None);
            assert_eq!(
                dani_backward(&f, &x, t, &psi, DaniMode::Monotone).unwrap(),
                None
            );
        }
    }

    #[test]
    fn quadratic_irrational_solves_its_equation() {
        for q in [2, 3, 5] {
            let f = FieldSpec::prime(q).unwrap();
            let x = quadratic_irrational(&f, -60).unwrap();
            let xx = Laurent::from_poly(Poly::monomial(&f, 1, 1));
            let val = x
                .mul(&f, &x)
                .add(&f, &xx.mul(&f, &x))
                .add(&f, &Laurent::from_poly(Poly::one(&f)));
            // the residual is zero down to the known precision
            assert!(val.top().is_err() || val.top().unwrap() <= Deg::Fin(-58));
        }
        let f = f2();
        let x = quadratic_irrational(&f, -12).unwrap();
        assert_eq!(x.terms(), vec![(-1, 1), (-3, 1), (-7, 1)]);
    }

    #[test]
    fn flow_norm_matches_closed_form() {
        let f = FieldSpec::prime(3).unwrap();
        let x = point(&f, &["X^-1+2*X^-4+X^-7", "2*X^-2+X^-5"]);
        let v = RationalPoint::new(
            &f,
            Poly::from_coeffs(&f, &[1, 0, 1]),
            vec![Poly::from_coeffs(&f, &[0, 1]), Poly::one(&f)],
        )
        .unwrap();
        let h = v.height();
        let d = dist(&f, &x, &v).unwrap().fin().unwrap();
        for t in 0..8 {
            let (_, norm) = flow_norm(&f, &x, &v.vector(), t).unwrap();
            assert_eq!(norm, Deg::Fin((-2 * t + h).max(t + h + d)));
        }
    }
}

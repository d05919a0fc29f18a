use std::fmt::Write as _;

use super::{check_precision, dist, embedding_rows, flow_norm, flow_shifts, RationalPoint};
use crate::algebra::text::format_poly;
use crate::algebra::{ceil, Deg, FieldSpec, LaurentVector, Poly, Rational};
use crate::error::{Error, Result};
use crate::lattice::{ReductionSession, ShiftedLattice};
use crate::template::PsiFunction;

/// Incremental computation of `c_x(t)` for a fixed `x`.
#[derive(Clone, Debug)]
pub struct FlowSession {
    x: LaurentVector,
    t: i64,
    session: ReductionSession,
}

impl FlowSession {
    pub fn new(f: &FieldSpec, x: LaurentVector, t: i64) -> Result<Self> {
        check_precision(&x, t)?;
        let lattice = ShiftedLattice::new(f, embedding_rows(f, &x), flow_shifts(x.dim(), t))?;
        Ok(FlowSession {
            session: ReductionSession::new(lattice)?,
            x,
            t,
        })
    }

    pub fn x(&self) -> &LaurentVector {
        &self.x
    }
    pub fn t(&self) -> i64 {
        self.t
    }
    pub fn lattice(&self) -> &ShiftedLattice {
        self.session.lattice()
    }

    /// Moves to time `t`, reusing the current reduced basis.
    pub fn seek(&mut self, t: i64) -> Result<()> {
        check_precision(&self.x, t)?;
        self.session.advance(flow_shifts(self.x.dim(), t))?;
        self.t = t;
        Ok(())
    }

    /// Successive minima exponents at the current time.
    pub fn minima(&self) -> Result<Vec<i64>> {
        Ok(self.session.lattice().minima_of_reduced()?.d)
    }

    pub fn c(&self) -> Result<i64> {
        Ok(self.minima()?[0])
    }

    /// Canonical shortest vector at the current time.
    pub fn witness(&self) -> Result<Vec<Poly>> {
        self.session.lattice().shortest_of_reduced()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectoryPoint {
    pub t: i64,
    pub c: i64,
    pub witness: Vec<Poly>,
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub x: LaurentVector,
    pub points: Vec<TrajectoryPoint>,
}

/// `c_x(t)` with its canonical witness for every integer `t` in `[lo, hi]`.
pub fn trajectory(f: &FieldSpec, x: &LaurentVector, lo: i64, hi: i64) -> Result<Trajectory> {
    if lo > hi {
        return Err(Error::Precondition(format!(
            "empty time range [{lo}, {hi}]"
        )));
    }
    check_precision(x, hi)?;
    let mut s = FlowSession::new(f, x.clone(), lo)?;
    let mut points = Vec::with_capacity((hi - lo + 1) as usize);
    for t in lo..=hi {
        s.seek(t)?;
        points.push(TrajectoryPoint {
            t,
            c: s.c()?,
            witness: s.witness()?,
        });
    }
    Ok(Trajectory {
        x: x.clone(),
        points,
    })
}

/// Result of a pure check; `violation` names the first failure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub ok: bool,
    pub violation: Option<String>,
}

impl Verdict {
    pub fn pass() -> Self {
        Verdict {
            ok: true,
            violation: None,
        }
    }
    pub fn fail(reason: impl Into<String>) -> Self {
        Verdict {
            ok: false,
            violation: Some(reason.into()),
        }
    }
}

impl Trajectory {
    pub fn n(&self) -> usize {
        self.x.dim()
    }

    pub fn get(&self, t: i64) -> Option<&TrajectoryPoint> {
        let lo = self.points.first()?.t;
        if t < lo {
            return None;
        }
        self.points.get((t - lo) as usize)
    }

    pub fn range(&self) -> (i64, i64) {
        (self.points[0].t, self.points[self.points.len() - 1].t)
    }

    /// First time at which the one-step change of `c_x` leaves `[-n, 1]`.
    pub fn slope_violation(&self) -> Option<i64> {
        let n = self.n() as i64;
        self.points
            .windows(2)
            .find(|w| {
                let d = w[1].c - w[0].c;
                d < -n || d > 1
            })
            .map(|w| w[1].t)
    }

    /// CSV with columns `t,c_x,r_psi_num,r_psi_den,witness`.
    pub fn to_csv(&self, psi: Option<&PsiFunction>) -> String {
        let mut out = String::from("t,c_x,r_psi_num,r_psi_den,witness\n");
        for p in &self.points {
            let (num, den) = match psi {
                Some(psi) => {
                    let r = psi.r_psi_int(p.t);
                    (r.numer().to_string(), r.denom().to_string())
                }
                None => (String::new(), String::new()),
            };
            let w: Vec<String> = p.witness.iter().map(format_poly).collect();
            let _ = writeln!(out, "{},{},{},{},{}", p.t, p.c, num, den, w.join(";"));
        }
        out
    }

    /// Both conditions for exactness on the computed window: `c_x(t) >=
    /// ceil(r_psi(t))` for every `t >= t0`, and at every listed time the
    /// canonical witness `v` attains the norm in its first coordinate with
    /// `d(x, v) = psi(H(v))` and `t <= -log d(x, v) / (n+1) < t + 1`, i.e.
    /// `c_x = r_psi` at the real time `-log d / (n+1)`.
    pub fn check_exactness_certificate(
        &self,
        f: &FieldSpec,
        psi: &PsiFunction,
        t0: i64,
        equality_times: &[i64],
    ) -> Verdict {
        for p in self.points.iter().filter(|p| p.t >= t0) {
            if p.c < ceil(psi.r_psi_int(p.t)) {
                return Verdict::fail(format!(
                    "c_x({}) = {} below r_psi = {}",
                    p.t,
                    p.c,
                    psi.r_psi_int(p.t)
                ));
            }
        }
        if equality_times.is_empty() {
            return Verdict::fail("no equality times");
        }
        for &t in equality_times {
            if let Err(reason) = self.equality_at(f, psi, t) {
                return Verdict::fail(format!("equality at t = {t}: {reason}"));
            }
        }
        Verdict::pass()
    }

    fn equality_at(
        &self,
        f: &FieldSpec,
        psi: &PsiFunction,
        t: i64,
    ) -> std::result::Result<(), String> {
        let p = self.get(t).ok_or("outside the trajectory")?;
        certificate_equality(f, psi, &self.x, t, p.c, &p.witness)
    }
}

/// The equality clause of the certificate at one time, for a witness of
/// `c_x(t) = c`.
pub(crate) fn certificate_equality(
    f: &FieldSpec,
    psi: &PsiFunction,
    x: &LaurentVector,
    t: i64,
    c: i64,
    witness: &[Poly],
) -> std::result::Result<(), String> {
    let (e1, norm) = flow_norm(f, x, witness, t).map_err(|e| e.to_string())?;
    if e1 != norm || norm != Deg::Fin(c) {
        return Err("first coordinate does not attain the minimum".into());
    }
    let v = RationalPoint::from_vector(f, witness).ok_or("witness has g = 0")?;
    let h = v.height();
    let d = dist(f, x, &v).map_err(|e| e.to_string())?;
    let Deg::Fin(d) = d else {
        return Err("x is the rational point itself".into());
    };
    if Rational::from_integer(d) != psi.log_psi(Rational::from_integer(h)) {
        return Err(format!(
            "d(x, v) = q^{d} differs from psi(H) with log H = {h}"
        ));
    }
    let n1 = x.dim() as i64 + 1;
    if !(n1 * t <= -d && -d < n1 * (t + 1)) {
        return Err(format!("exact time {}/{} not in [t, t+1)", -d, n1));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::algebra::text::parse_series;
    use crate::dynamics::{c_value, quadratic_irrational};

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    #[test]
    fn zero_point_decays_at_slope_minus_n() {
        let f = f2();
        for n in 1..=2 {
            let x = LaurentVector::zero(&f, n);
            let tr = trajectory(&f, &x, 0, 10).unwrap();
            for p in &tr.points {
                assert_eq!(p.c, -(n as i64) * p.t);
            }
        }
    }

    #[test]
    fn inverse_x_pattern() {
        let f = f2();
        let x = LaurentVector::new(vec![parse_series(&f, "X^-1").unwrap()]);
        let tr = trajectory(&f, &x, 0, 12).unwrap();
        assert_eq!(tr.points[0].c, 0);
        for p in &tr.points[1..] {
            assert_eq!(p.c, 1 - p.t);
        }
    }

    #[test]
    fn incremental_matches_pointwise() {
        let f = FieldSpec::prime(3).unwrap();
        let x = LaurentVector::new(vec![
            parse_series(&f, "X^-1+2*X^-3+X^-4+X^-9+2*X^-11 (prec -80)").unwrap(),
            parse_series(&f, "2*X^-1+X^-2+X^-6+X^-7 (prec -80)").unwrap(),
        ]);
        let tr = trajectory(&f, &x, 0, 14).unwrap();
        for p in &tr.points {
            assert_eq!(Ok(p.c), c_value(&f, &x, p.t));
            let l = crate::dynamics::apply_flow(&f, &x, p.t).unwrap();
            assert_eq!(p.witness, l.shortest_vector().unwrap());
        }
        assert_eq!(tr.slope_violation(), None);
    }

    #[test]
    fn quadratic_irrational_is_badly_approximable() {
        let f = f2();
        let x = LaurentVector::new(vec![quadratic_irrational(&f, -80).unwrap()]);
        let tr = trajectory(&f, &x, 0, 20).unwrap();
        assert!(tr.points.iter().all(|p| p.c >= -1));
        let psi = PsiFunction::power_law(1, rat(3, 1)).unwrap();
        let v = tr.check_exactness_certificate(&f, &psi, 4, &[]);
        assert_eq!(v, Verdict::fail("no equality times"));
    }

    #[test]
    fn rational_point_fails_the_lower_bound() {
        let f = f2();
        let psi = PsiFunction::power_law(1, rat(3, 1)).unwrap();
        let tr = trajectory(&f, &LaurentVector::zero(&f, 1), 0, 10).unwrap();
        let v = tr.check_exactness_certificate(&f, &psi, 1, &[3]);
        assert!(!v.ok);
        assert!(v.violation.unwrap().contains("below r_psi"));
    }

    #[test]
    fn csv_has_header_and_rows() {
        let f = f2();
        let psi = PsiFunction::power_law(1, rat(3, 1)).unwrap();
        let tr = trajectory(&f, &LaurentVector::zero(&f, 1), 0, 3).unwrap();
        let csv = tr.to_csv(Some(&psi));
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "t,c_x,r_psi_num,r_psi_den,witness");
        assert_eq!(lines[4], "3,-3,-1,1,1;0");
    }
}

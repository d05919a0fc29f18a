//! The piecewise-linear template and the slope conditions on `r_psi`.

use std::fmt::Write as _;

use super::{PsiFunction, Schedule};
use crate::algebra::{format_rational, Rational};
use crate::dynamics::Verdict;

/// Continuous piecewise-linear function given by its breakpoints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Template {
    pub n: usize,
    /// `(t, T(t))`, strictly increasing in `t`, starting at `(0, 0)`.
    pub breakpoints: Vec<(Rational, Rational)>,
}

/// Flat until `t_k^-`, slope `-n` down to `r_psi(t_k)` at `t_k`, slope `1`
/// back to zero at `t_k - r_psi(t_k)`.
pub fn build_template(schedule: &Schedule, horizon: Rational) -> Template {
    let zero = Rational::from_integer(0);
    let mut pts = vec![(zero, zero)];
    for e in &schedule.epochs {
        let t = Rational::from_integer(e.t);
        for p in [
            (e.t_minus, zero),
            (t, schedule.psi.r_psi(t)),
            (e.t_plus_template, zero),
        ] {
            if p.0 > pts[pts.len() - 1].0 {
                pts.push(p);
            }
        }
    }
    let last = pts[pts.len() - 1].0;
    if horizon > last {
        pts.push((horizon, zero));
    }
    Template {
        n: schedule.n(),
        breakpoints: pts,
    }
}

impl Template {
    pub fn eval(&self, t: Rational) -> Rational {
        let b = &self.breakpoints;
        match b.iter().position(|p| p.0 >= t) {
            Some(0) => b[0].1,
            Some(i) => {
                let (t0, v0) = b[i - 1];
                let (t1, v1) = b[i];
                v0 + (v1 - v0) * (t - t0) / (t1 - t0)
            }
            None => b[b.len() - 1].1,
        }
    }

    pub fn slopes(&self) -> Vec<Rational> {
        self.breakpoints
            .windows(2)
            .map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
            .collect()
    }

    /// Every slope lies in `{-n, 0, 1}`.
    pub fn slopes_admissible(&self) -> bool {
        let n = Rational::from_integer(self.n as i64);
        self.slopes()
            .iter()
            .all(|s| *s == -n || *s == Rational::from_integer(0) || *s == Rational::from_integer(1))
    }

    /// CSV with columns `t,T` as `num/den`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,T\n");
        for (t, v) in &self.breakpoints {
            let _ = writeln!(out, "{},{}", format_rational(*t), format_rational(*v));
        }
        out
    }
}

/// The three conditions on `r` sampled at `t = 0..=horizon`:
/// `r(t) - t` decreasing, `r(t) + n t` increasing, and `r` eventually below
/// `-floor`.
pub fn slope_conditions_sampled(
    r: impl Fn(i64) -> Rational,
    n: usize,
    horizon: i64,
    floor: Rational,
) -> Verdict {
    let nq = Rational::from_integer(n as i64);
    for t in 0..horizon {
        let (a, b) = (r(t), r(t + 1));
        if b - Rational::from_integer(t + 1) >= a - Rational::from_integer(t) {
            return Verdict::fail(format!("r(t) - t not decreasing at t = {t}"));
        }
        if b + nq * (t + 1) <= a + nq * t {
            return Verdict::fail(format!("r(t) + n t not increasing at t = {t}"));
        }
    }
    if r(horizon) > -floor {
        return Verdict::fail(format!(
            "r({horizon}) = {} has not dropped below {}",
            r(horizon),
            -floor
        ));
    }
    Verdict::pass()
}

/// Closed-form check for power laws, backed by a sampled scan.
pub fn slope_conditions(psi: &PsiFunction) -> Verdict {
    let a = psi.r_slope();
    let n = Rational::from_integer(psi.n as i64);
    if a >= Rational::from_integer(0) || a + n <= Rational::from_integer(0) {
        return Verdict::fail(format!("slope {a} of r_psi outside (-n, 0)"));
    }
    slope_conditions_sampled(|t| psi.r_psi_int(t), psi.n, 256, Rational::from_integer(8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::rat;
    use crate::template::{Constants, Growth};

    #[test]
    fn power_law_slopes_hold() {
        let psi = PsiFunction::power_law(1, rat(3, 1)).unwrap();
        assert_eq!(psi.r_slope() - 1, rat(-4, 3));
        assert_eq!(psi.r_slope() + 1, rat(2, 3));
        assert!(slope_conditions(&psi).ok);
    }

    #[test]
    fn growing_r_fails_first_condition() {
        let v = slope_conditions_sampled(|t| Rational::from_integer(2 * t), 1, 10, rat(1, 1));
        assert!(v.violation.unwrap().starts_with("r(t) - t not decreasing"));
        let v = slope_conditions_sampled(|_| rat(0, 1), 1, 10, rat(1, 1));
        assert!(v.violation.unwrap().contains("has not dropped"));
    }

    fn schedule(times: Vec<i64>) -> Schedule {
        let psi = PsiFunction::power_law(1, rat(3, 1)).unwrap();
        let k = times.len();
        Schedule::choose(
            psi,
            2,
            Constants::desk(1),
            9,
            &Growth::Times(times),
            k,
            rat(1, 10),
        )
        .unwrap()
    }

    #[test]
    fn one_epoch_template() {
        let s = schedule(vec![540]);
        let t = build_template(&s, rat(1000, 1));
        assert_eq!(t.eval(rat(360, 1)), rat(0, 1));
        assert_eq!(t.eval(rat(450, 1)), rat(-90, 1));
        assert_eq!(t.eval(rat(540, 1)), s.psi.r_psi_int(540));
        assert_eq!(t.eval(rat(720, 1)), rat(0, 1));
        assert_eq!(
            t.slopes(),
            vec![rat(0, 1), rat(-1, 1), rat(1, 1), rat(0, 1)]
        );
        assert!(t.slopes_admissible());
        assert!(t.to_csv().starts_with("t,T\n0/1,0/1\n360/1,0/1\n"));
    }

    #[test]
    fn empty_schedule_is_flat() {
        let mut s = schedule(vec![540]);
        s.epochs.clear();
        let t = build_template(&s, rat(50, 1));
        assert_eq!(
            t.breakpoints,
            vec![(rat(0, 1), rat(0, 1)), (rat(50, 1), rat(0, 1))]
        );
    }

    #[test]
    fn template_dominates_r_psi() {
        let s = schedule(vec![540, 43200]);
        let t = build_template(&s, rat(60000, 1));
        assert!(t.slopes_admissible());
        for x in (0..60000).step_by(7) {
            assert!(t.eval(Rational::from_integer(x)) >= s.psi.r_psi_int(x));
        }
    }
}

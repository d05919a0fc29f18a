//! Epoch schedules `(t_k)` and the constants of the Cantor construction.

use serde::{Deserialize, Serialize};

use super::PsiFunction;
use crate::algebra::deg::ratio_text;
use num::Signed;

use crate::algebra::{ceil, floor, rat, Rational};
use crate::error::{Error, Result};

/// Numerical constants of the construction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constants {
    #[serde(with = "ratio_text")]
    pub r0: Rational,
    #[serde(with = "ratio_text")]
    pub r1: Rational,
    #[serde(with = "ratio_text")]
    pub r2: Rational,
    #[serde(with = "ratio_text")]
    pub r3: Rational,
    #[serde(with = "ratio_text")]
    pub c1: Rational,
    /// Level spacing `M`: level `l` is checked at time `l M`.
    pub m: i64,
}

impl Constants {
    /// `R0 = 4 n^2`, `R1 = 10 R0 / (1 - gamma)`, `R2 = R1 + 6 R0 + C1 + 1`.
    pub fn paper(psi: &PsiFunction, m: i64) -> Self {
        let n = psi.n as i64;
        let (_, gamma) = psi.lambda_gamma();
        let r0 = Rational::from_integer(4 * n * n);
        let r1 = r0 * 10 / (Rational::from_integer(1) - gamma);
        let c1 = Rational::from_integer(4);
        Constants {
            r0,
            r1,
            r2: r1 + r0 * 6 + c1 + 1,
            r3: Rational::from_integer(1),
            c1,
            m,
        }
    }

    /// Small constants that keep every epoch within reach of a laptop.
    pub fn desk(n: usize) -> Self {
        if n == 1 {
            Constants {
                r0: rat(5, 1),
                r1: rat(34, 1),
                r2: rat(4, 1),
                r3: rat(1, 1),
                c1: rat(0, 1),
                m: 2,
            }
        } else {
            Constants {
                r0: rat(4, 1),
                r1: rat(24, 1),
                r2: rat(4, 1),
                r3: rat(1, 4),
                c1: rat(0, 1),
                m: 1,
            }
        }
    }
}

/// How successive times are generated.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Growth {
    /// `t_k` is the least admissible integer `>= factor * t_{k-1}`.
    Factor(#[serde(with = "ratio_text")] Rational),
    /// Prescribed times, checked but never adjusted.
    Times(Vec<i64>),
}

/// Derived quantities of epoch `k`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Epoch {
    pub k: usize,
    pub t: i64,
    /// `M_k = -sup_{t >= t_{k-1}} r_psi(t)`.
    #[serde(with = "ratio_text")]
    pub m_k: Rational,
    /// `t_k^- = t_k + r_psi(t_k) / n`.
    #[serde(with = "ratio_text")]
    pub t_minus: Rational,
    /// `t_k^+ = t_k + R2 M_k`, the end of the shadowing window.
    #[serde(with = "ratio_text")]
    pub t_plus: Rational,
    /// `t_k - r_psi(t_k)`, where the template rises back to zero.
    #[serde(with = "ratio_text")]
    pub t_plus_template: Rational,
    pub l_minus: i64,
    pub l_plus: i64,
}

impl Epoch {
    /// Integer lower bound for `c_x(l M)` on case 1 levels.
    pub fn threshold(&self, m: i64) -> i64 {
        ceil(Rational::from_integer(m) - self.m_k)
    }
}

/// Which rule selects the children at a level.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LevelCase {
    /// Keep children with `c_x(l M) >= threshold`.
    Free { k: usize, threshold: i64 },
    /// Follow the target point of epoch `k`.
    Shadow { k: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Schedule {
    pub psi: PsiFunction,
    pub q: u32,
    pub t0: i64,
    pub constants: Constants,
    pub epochs: Vec<Epoch>,
    /// Allowed ratio `l_{k-1}^+ / l_k^-`.
    #[serde(with = "ratio_text")]
    pub ratio_eps: Rational,
}

fn epoch(psi: &PsiFunction, c: &Constants, k: usize, t: i64, prev: i64) -> Epoch {
    let n = Rational::from_integer(psi.n as i64);
    let tq = Rational::from_integer(t);
    let m_k = -psi.sup_r_from(Rational::from_integer(prev));
    let r = psi.r_psi(tq);
    let t_minus = tq + r / n;
    let t_plus = tq + c.r2 * m_k;
    let lo = floor(t_minus - c.r0 * m_k * 4);
    Epoch {
        k,
        t,
        m_k,
        t_minus,
        t_plus,
        t_plus_template: tq - r,
        l_minus: ceil(Rational::new(lo, c.m)),
        l_plus: floor(t_plus / c.m),
    }
}

fn unsat(predicate: &str, detail: String) -> Error {
    Error::UnsatisfiablePredicate {
        predicate: predicate.to_string(),
        detail,
    }
}

/// Every predicate an epoch must satisfy, in the order they are checked.
pub const PREDICATES: [&str; 9] = [
    "r(floor(t - R)) <= r(t) + (1+gamma)R/2",
    "|r(t)/(n t) + gamma| <= 1/k",
    "r(t - R) <= r(t) + (1+gamma)R/2",
    "sup r on [t, oo) <= r(t) + R",
    "interleaving",
    "M_k > (2n-1)M",
    "sup r past t^- - 4 R0 M_k < -5 R0 M_k",
    "Case 2 resolution",
    "sparse epochs",
];

fn check_epoch(s: &Schedule, e: &Epoch, prev: Option<&Epoch>) -> Result<()> {
    let psi = &s.psi;
    let c = &s.constants;
    let n = psi.n as i64;
    let nq = Rational::from_integer(n);
    let (_, gamma) = psi.lambda_gamma();
    let half = (gamma + 1) / 2;
    let tq = Rational::from_integer(e.t);
    let r_t = psi.r_psi(tq);
    let big_r = c.r1 * e.m_k;
    let back = floor(tq - big_r);
    if psi.r_psi_int(back) > r_t + half * big_r {
        return Err(unsat(
            "r(floor(t - R)) <= r(t) + (1+gamma)R/2",
            format!(
                "r({back}) = {} exceeds {}",
                psi.r_psi_int(back),
                r_t + half * big_r
            ),
        ));
    }
    let dev = (r_t / (nq * tq) + gamma).abs();
    if dev > rat(1, e.k as i64) {
        return Err(unsat(
            "|r(t)/(n t) + gamma| <= 1/k",
            format!("|r(t)/(n t) + gamma| = {dev} at t = {}", e.t),
        ));
    }
    if psi.r_psi(tq - big_r) > r_t + half * big_r {
        return Err(unsat(
            "r(t - R) <= r(t) + (1+gamma)R/2",
            format!("fails with R = {big_r}"),
        ));
    }
    if psi.sup_r_from(tq) > r_t + big_r {
        return Err(unsat(
            "sup r on [t, oo) <= r(t) + R",
            format!("fails with R = {big_r}"),
        ));
    }
    let after_prev = match prev {
        Some(p) => ceil(p.t_plus_template) < floor(e.t_minus) && p.l_plus < e.l_minus,
        None => 0 < floor(e.t_minus) && e.l_minus >= 1,
    };
    if !after_prev || !(Rational::from_integer(floor(e.t_minus)) < tq && tq < e.t_plus) {
        return Err(unsat(
            "interleaving",
            format!("epoch {} overlaps its neighbours", e.k),
        ));
    }
    if e.m_k <= Rational::from_integer((2 * n - 1) * c.m) {
        return Err(unsat("M_k > (2n-1)M", format!("M_{} = {}", e.k, e.m_k)));
    }
    let from = ceil(e.t_minus - c.r0 * e.m_k * 4);
    let sup = psi.sup_r_from(Rational::from_integer(from));
    if sup >= -c.r0 * e.m_k * 5 {
        return Err(unsat(
            "sup r past t^- - 4 R0 M_k < -5 R0 M_k",
            format!("sup r from {from} is {sup}"),
        ));
    }
    // Case 2 digit depth m = s h must lie strictly between the two cube sides.
    let t2 = e.l_minus * c.m;
    let h_lo = n * t2 - ceil(e.m_k * 2);
    let h_hi = n * (t2 + 4 * n * ceil(e.m_k));
    let (m_lo, m_hi) = (psi.s * h_lo, psi.s * h_hi);
    let side_lo = Rational::from_integer((n + 1) * t2);
    let side_hi = Rational::from_integer((n + 1) * c.m * e.l_plus);
    if !(m_lo > side_lo && m_hi < side_hi) {
        return Err(unsat(
            "Case 2 resolution",
            format!("digit depth in [{m_lo}, {m_hi}] not inside ({side_lo}, {side_hi})"),
        ));
    }
    if let Some(p) = prev {
        let ratio = rat(p.l_plus, e.l_minus);
        if ratio > s.ratio_eps {
            return Err(unsat(
                "sparse epochs",
                format!("l_(k-1)^+ / l_k^- = {ratio}"),
            ));
        }
    }
    Ok(())
}

/// Greedy search limit: candidates tried per epoch.
const SEARCH_LIMIT: i64 = 1 << 16;

impl Schedule {
    /// Builds a schedule with `k` epochs; every epoch is validated.
    pub fn choose(
        psi: PsiFunction,
        q: u32,
        constants: Constants,
        t0: i64,
        growth: &Growth,
        k: usize,
        ratio_eps: Rational,
    ) -> Result<Schedule> {
        if t0 <= 0 || constants.m <= 0 || k == 0 {
            return Err(Error::Precondition("t0, M and K must be positive".into()));
        }
        let mut s = Schedule {
            psi,
            q,
            t0,
            constants,
            epochs: Vec::new(),
            ratio_eps,
        };
        for i in 1..=k {
            let prev_t = s.epochs.last().map_or(t0, |e| e.t);
            let e = match growth {
                Growth::Times(ts) => {
                    let t = *ts.get(i - 1).ok_or_else(|| {
                        Error::Precondition(format!("only {} times given for {k} epochs", ts.len()))
                    })?;
                    let e = epoch(&s.psi, &s.constants, i, t, prev_t);
                    check_epoch(&s, &e, s.epochs.last())?;
                    e
                }
                Growth::Factor(g) => s.search(i, ceil(*g * prev_t), prev_t)?,
            };
            s.epochs.push(e);
        }
        Ok(s)
    }

    fn search(&self, k: usize, start: i64, prev_t: i64) -> Result<Epoch> {
        let mut last = None;
        for t in start.max(prev_t + 1)..start.max(prev_t + 1) + SEARCH_LIMIT {
            let e = epoch(&self.psi, &self.constants, k, t, prev_t);
            match check_epoch(self, &e, self.epochs.last()) {
                Ok(()) => return Ok(e),
                Err(err) => last = Some(err),
            }
        }
        Err(last.expect("search range is not empty"))
    }

    /// Re-checks every epoch, e.g. after deserialization.
    pub fn validate(&self) -> Result<()> {
        let mut prev_t = self.t0;
        for (i, e) in self.epochs.iter().enumerate() {
            if *e != epoch(&self.psi, &self.constants, i + 1, e.t, prev_t) {
                return Err(unsat(
                    "consistency",
                    format!("epoch {} fields do not match t_k", i + 1),
                ));
            }
            check_epoch(self, e, i.checked_sub(1).map(|j| &self.epochs[j]))?;
            prev_t = e.t;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.psi.n
    }

    /// Digits per coordinate added at each level: `(n+1) M`.
    pub fn digits_per_level(&self) -> usize {
        (self.n() + 1) * self.constants.m as usize
    }

    /// `N = q^{(n+1) M}`.
    pub fn big_n(&self) -> u128 {
        (self.q as u128).pow(self.digits_per_level() as u32)
    }

    /// Last level of the construction, `l_K^+`.
    pub fn depth(&self) -> i64 {
        self.epochs.last().map_or(0, |e| e.l_plus)
    }

    pub fn level_case(&self, l: i64) -> Option<LevelCase> {
        let mut prev_plus = 0;
        for e in &self.epochs {
            if prev_plus < l && l <= e.l_minus {
                return Some(LevelCase::Free {
                    k: e.k,
                    threshold: e.threshold(self.constants.m),
                });
            }
            if e.l_minus < l && l <= e.l_plus {
                return Some(LevelCase::Shadow { k: e.k });
            }
            prev_plus = e.l_plus;
        }
        None
    }

    /// Guaranteed children per cube, `floor(N^n - R3 N^{n - 1/(n+1)})` on
    /// case 1 levels and 1 on case 2 levels.
    pub fn branching(&self, l: i64) -> u128 {
        match self.level_case(l) {
            Some(LevelCase::Free { .. }) => self.free_branching(),
            _ => 1,
        }
    }

    pub fn free_branching(&self) -> u128 {
        let n = self.n() as u32;
        let m = self.constants.m as u32;
        let q = self.q as u128;
        let full = q.pow((n + 1) * m * n);
        // N^{n - 1/(n+1)} = q^{M (n^2 + n - 1)}
        let lower = Rational::from_integer(q.pow(m * (n * n + n - 1)) as i64);
        let b = Rational::from_integer(full as i64) - self.constants.r3 * lower;
        floor(b).max(0) as u128
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn psi(n: usize, s: i64) -> PsiFunction {
        PsiFunction::power_law(n, rat(s, 1)).unwrap()
    }

    fn desk_one() -> Schedule {
        let p = psi(1, 3);
        Schedule::choose(
            p,
            2,
            Constants::desk(1),
            9,
            &Growth::Times(vec![540, 43200]),
            2,
            rat(1, 10),
        )
        .unwrap()
    }

    #[test]
    fn desk_epochs() {
        let s = desk_one();
        let e = &s.epochs[0];
        assert_eq!(
            (e.m_k, e.t_minus, e.t_plus),
            (rat(3, 1), rat(360, 1), rat(552, 1))
        );
        assert_eq!((e.l_minus, e.l_plus), (150, 276));
        assert_eq!(e.threshold(2), -1);
        assert_eq!(s.epochs[1].m_k, rat(180, 1));
        assert_eq!((s.epochs[1].l_minus, s.epochs[1].l_plus), (12600, 21960));
        assert_eq!(s.depth(), 21960);
        assert_eq!(
            s.level_case(150),
            Some(LevelCase::Free {
                k: 1,
                threshold: -1
            })
        );
        assert_eq!(s.level_case(151), Some(LevelCase::Shadow { k: 1 }));
        assert_eq!(
            s.level_case(277),
            Some(LevelCase::Free {
                k: 2,
                threshold: -178
            })
        );
        assert_eq!(s.level_case(21961), None);
        assert_eq!(s.big_n(), 16);
        assert_eq!(s.free_branching(), 12);
        assert_eq!(s.branching(200), 1);
        s.validate().unwrap();
    }

    #[test]
    fn paper_constants_with_growth() {
        let p = psi(1, 3);
        let c = Constants::paper(&p, 1);
        assert_eq!((c.r0, c.r1, c.r2), (rat(4, 1), rat(60, 1), rat(89, 1)));
        let s = Schedule::choose(p, 2, c, 15, &Growth::Factor(rat(100, 1)), 3, rat(1, 10)).unwrap();
        assert_eq!(s.epochs[0].t, 1500);
        assert!(s.epochs.windows(2).all(|w| w[1].t >= 100 * w[0].t));
        let fixed = Schedule::choose(
            p,
            2,
            Constants::paper(&p, 1),
            15,
            &Growth::Times(vec![600]),
            1,
            rat(1, 10),
        );
        assert_eq!(fixed.unwrap().epochs[0].l_minus, 320);
        let short = Schedule::choose(
            p,
            2,
            Constants::paper(&p, 1),
            15,
            &Growth::Times(vec![30]),
            1,
            rat(1, 10),
        );
        assert!(
            matches!(short, Err(Error::UnsatisfiablePredicate { predicate, .. }) if predicate == "interleaving")
        );
    }

    #[test]
    fn steep_family_violates_eq4() {
        let p = psi(2, 3);
        let err = Schedule::choose(
            p,
            2,
            Constants::desk(2),
            8,
            &Growth::Factor(rat(50, 1)),
            1,
            rat(1, 10),
        )
        .unwrap_err();
        match err {
            Error::UnsatisfiablePredicate { predicate, .. } => {
                assert_eq!(predicate, "r(floor(t - R)) <= r(t) + (1+gamma)R/2")
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn second_family_desk() {
        let p = psi(2, 2);
        let s = Schedule::choose(
            p,
            2,
            Constants::desk(2),
            8,
            &Growth::Times(vec![400]),
            1,
            rat(1, 10),
        )
        .unwrap();
        let e = &s.epochs[0];
        assert_eq!((e.m_k, e.l_minus, e.l_plus), (rat(4, 1), 236, 416));
        assert_eq!(s.big_n(), 8);
        assert_eq!(s.free_branching(), 56);
    }

    #[test]
    fn short_first_epoch_is_rejected() {
        let p = psi(1, 3);
        let err = Schedule::choose(
            p,
            2,
            Constants::desk(1),
            9,
            &Growth::Times(vec![120]),
            1,
            rat(1, 10),
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnsatisfiablePredicate { .. }));
    }

    #[test]
    fn loose_small_constants_miss_the_window_bound() {
        let p = psi(1, 3);
        let c = Constants {
            r0: rat(2, 1),
            r1: rat(8, 1),
            r2: rat(16, 1),
            r3: rat(1, 1),
            c1: rat(4, 1),
            m: 2,
        };
        let err =
            Schedule::choose(p, 2, c, 9, &Growth::Times(vec![60]), 1, rat(1, 10)).unwrap_err();
        assert!(
            matches!(err, Error::UnsatisfiablePredicate { predicate, .. } if predicate == "sup r past t^- - 4 R0 M_k < -5 R0 M_k")
        );
    }

    #[test]
    fn tampered_schedule_fails_validation() {
        let mut s = desk_one();
        s.epochs[1].l_plus += 1;
        assert!(s.validate().is_err());
    }
}

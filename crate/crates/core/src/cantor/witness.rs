use super::cube::Cube;
use super::good::{good_rational_from, pick_target_point};
use crate::algebra::{ceil, floor, Deg, FieldSpec, LaurentVector, Rational};
use crate::dynamics::{dist, RationalPoint};
use crate::error::{Error, Result};
use crate::lattice::ShiftedLattice;
use crate::template::{Epoch, Schedule};

/// The rational point `v_k` shadowed in epoch `k` and the target `y_k`.
#[derive(Clone, Debug)]
pub struct EpochWitness {
    pub k: usize,
    /// The cube level `l_k^-` at which `v_k` was found.
    pub level: i64,
    pub v: RationalPoint,
    pub y: LaurentVector,
    /// `log_q H(v_k)`.
    pub height: i64,
    /// `d(v_k, y_k) = q^{-m}`.
    pub m: i64,
    /// `t_k^x = m / (n+1)`.
    pub t_x: Rational,
    pub margins: Margins,
}

/// Slack in the height window and in the window for `t_k^x`; all must be
/// non-negative, the time margins strictly positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Margins {
    pub height_low: Rational,
    pub height_high: Rational,
    pub time_low: Rational,
    pub time_high: Rational,
}

pub(crate) fn at(e: Error, k: usize, level: i64) -> Error {
    match e {
        Error::Verification {
            inequality, detail, ..
        } => Error::Verification {
            epoch: k,
            level: level as u64,
            inequality,
            detail,
        },
        Error::Precondition(detail) => Error::Verification {
            epoch: k,
            level: level as u64,
            inequality: "good rational precondition".into(),
            detail,
        },
        other => other,
    }
}

fn fail(k: usize, level: i64, inequality: &str, detail: String) -> Error {
    Error::Verification {
        epoch: k,
        level: level as u64,
        inequality: inequality.into(),
        detail,
    }
}

impl EpochWitness {
    /// Finds `v_k` at `t = l_k^- M` with `R = ceil(2 M_k)` and places `y_k`
    /// in the level-`l_k^-` cube; `lattice` is a basis for the cube centre
    /// at that time.
    pub(crate) fn place(
        f: &FieldSpec,
        schedule: &Schedule,
        epoch: &Epoch,
        cube: &Cube,
        lattice: ShiftedLattice,
    ) -> Result<Self> {
        let (k, level) = (epoch.k, epoch.l_minus);
        let n = schedule.n() as i64;
        let m_big = schedule.constants.m;
        let x = cube.center(f);
        let r = ceil(epoch.m_k * 2);
        let good =
            good_rational_from(f, &x, lattice, level * m_big, r).map_err(|e| at(e, k, level))?;
        let m = -floor(schedule.psi.log_psi(Rational::from_integer(good.height)));
        let y = pick_target_point(f, &good.v, m, cube).map_err(|e| at(e, k, level))?;
        let w = EpochWitness {
            k,
            level,
            height: good.height,
            m,
            t_x: Rational::new(m, n + 1),
            margins: margins(schedule, epoch, good.height, Rational::new(m, n + 1)),
            v: good.v,
            y,
        };
        w.check(f, schedule)?;
        Ok(w)
    }

    /// Re-verifies (i)-(iii) and the resolution of the target distance.
    pub fn check(&self, f: &FieldSpec, schedule: &Schedule) -> Result<()> {
        let epoch = &schedule.epochs[self.k - 1];
        let (k, l) = (self.k, self.level);
        let mg = margins(schedule, epoch, self.height, self.t_x);
        if mg != self.margins {
            return Err(fail(
                k,
                l,
                "witness margins",
                "recorded margins disagree".into(),
            ));
        }
        let zero = Rational::from_integer(0);
        if mg.height_low < zero || mg.height_high < zero {
            return Err(fail(
                k,
                l,
                "(B)(i)",
                format!("log H = {} outside the window ({mg:?})", self.height),
            ));
        }
        if dist(f, &self.y, &self.v)? != Deg::Fin(-self.m) {
            return Err(fail(
                k,
                l,
                "(B)(ii)",
                format!("d(v, y) is not q^-{}", self.m),
            ));
        }
        if mg.time_low <= zero || mg.time_high <= zero {
            return Err(fail(
                k,
                l,
                "(B)(iii)",
                format!("t_x = {} outside the window ({mg:?})", self.t_x),
            ));
        }
        let per = schedule.digits_per_level() as i64;
        if per * epoch.l_plus <= self.m {
            return Err(fail(
                k,
                l,
                "Case 2 resolution",
                format!(
                    "(n+1) M l_k^+ = {} does not exceed m = {}",
                    per * epoch.l_plus,
                    self.m
                ),
            ));
        }
        Ok(())
    }
}

fn margins(schedule: &Schedule, epoch: &Epoch, height: i64, t_x: Rational) -> Margins {
    let n = Rational::from_integer(schedule.n() as i64);
    let c = &schedule.constants;
    let h = Rational::from_integer(height);
    let nt = n * epoch.t_minus;
    let lo = Rational::from_integer(floor(nt)) - c.r0 * epoch.m_k * 5;
    let hi = Rational::from_integer(ceil(nt)) - c.r0 * epoch.m_k * 3;
    let tk = Rational::from_integer(epoch.t);
    Margins {
        height_low: h - lo,
        height_high: hi - h,
        time_low: t_x - Rational::from_integer(floor(tk - c.r1 * epoch.m_k)),
        time_high: Rational::from_integer(ceil(tk + 1)) - t_x,
    }
}

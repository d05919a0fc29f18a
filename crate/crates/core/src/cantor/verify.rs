//! Re-verification of a built tree along full trajectories of its leaves.

use rayon::prelude::*;

use super::build::CantorTree;
use super::cube::Cube;
use crate::algebra::{ceil, floor, Deg, FieldSpec, Laurent, LaurentVector, Rational};
use crate::dynamics::{certificate_equality, FlowSession};
use crate::error::{Error, Result};
use crate::template::LevelCase;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LeafReport {
    pub leaf: usize,
    /// Integer times visited, `0..=L M`.
    pub times: i64,
    pub checkpoints: usize,
    /// Times checked against the `(A)` floor `ceil(-M_k) + 1`.
    pub a_times: usize,
    pub claim_times: usize,
    /// Least `c - floor` over the `(A)` windows.
    pub min_a_slack: Option<i64>,
    pub equality_times: Vec<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeReport {
    pub witnesses: usize,
    pub leaves: Vec<LeafReport>,
}

struct Claim {
    k: usize,
    lo: i64,
    hi: i64,
    deg_g: i64,
    err: Deg,
}

fn fail(k: usize, t: i64, m: i64, inequality: &str, detail: String) -> Error {
    Error::Verification {
        epoch: k,
        level: (t / m) as u64,
        inequality: inequality.into(),
        detail,
    }
}

/// Walks `c_x(t)` for the centre of leaf `leaf` over `[0, L M]` and checks
/// the Case-1 checkpoints, the `(A)` windows, the Claim on every shadowing
/// window and the exactness certificate.
pub fn verify_leaf(f: &FieldSpec, tree: &CantorTree, leaf: usize) -> Result<LeafReport> {
    let s = &tree.schedule;
    let (n, m) = (s.n() as i64, s.constants.m);
    let per = s.digits_per_level();
    let horizon = tree.depth * m;
    let lf = tree
        .leaves
        .get(leaf)
        .ok_or_else(|| Error::Precondition(format!("no leaf {leaf}")))?;
    let cube = lf.cube();
    let x = cube.center(f);

    let mut claims = Vec::new();
    let mut eq_times = Vec::new();
    for w in &lf.witnesses {
        let e = &s.epochs[w.k - 1];
        let upto = e.l_plus.min(tree.depth);
        let prefix = Cube {
            level: upto,
            digits: cube
                .digits
                .iter()
                .map(|d| d[..per * upto as usize].to_vec())
                .collect(),
        };
        if !prefix.contains(&w.y) {
            return Err(fail(
                w.k,
                upto * m,
                m,
                "Case 2 prefix",
                "leaf leaves the target cube".into(),
            ));
        }
        let g = w.v.g();
        let mut err = Deg::NegInf;
        for (xi, fi) in x.coords().iter().zip(w.v.f()) {
            err = err.max(
                Laurent::from_poly(fi.clone())
                    .sub(f, &xi.mul_poly(f, g))
                    .top()?,
            );
        }
        claims.push(Claim {
            k: w.k,
            lo: ceil(e.t_minus),
            hi: floor(e.t_plus).min(horizon),
            deg_g: g.degree().expect("monic denominator") as i64,
            err,
        });
        if e.l_plus <= tree.depth {
            eq_times.push(floor(w.t_x));
        }
    }
    let mut windows = Vec::new();
    let mut prev_plus = Rational::from_integer(0);
    for e in &s.epochs {
        let hi = floor(e.t_minus - s.constants.r0 * e.m_k * 4).min(horizon);
        windows.push((e.k, ceil(prev_plus), hi, ceil(-e.m_k) + 1));
        prev_plus = e.t_plus;
    }

    let mut rep = LeafReport {
        leaf,
        ..Default::default()
    };
    let mut session = FlowSession::new(f, x.clone(), 0)?;
    for t in 0..=horizon {
        session.seek(t)?;
        let c = session.c()?;
        rep.times += 1;
        if t > 0 && t % m == 0 {
            if let Some(LevelCase::Free { k, threshold }) = s.level_case(t / m) {
                if c < threshold {
                    return Err(fail(
                        k,
                        t,
                        m,
                        "Case 1 checkpoint",
                        format!("c({t}) = {c} < {threshold}"),
                    ));
                }
                rep.checkpoints += 1;
            }
        }
        for &(k, lo, hi, bound) in &windows {
            if lo <= t && t <= hi {
                if c < bound {
                    return Err(fail(k, t, m, "(A)", format!("c({t}) = {c} < {bound}")));
                }
                rep.a_times += 1;
                rep.min_a_slack =
                    Some(rep.min_a_slack.map_or(c - bound, |v: i64| v.min(c - bound)));
            }
        }
        for cl in claims.iter().filter(|cl| cl.lo <= t && t <= cl.hi) {
            let norm = Deg::Fin(cl.deg_g - n * t).max(cl.err + t);
            if norm != Deg::Fin(c) {
                return Err(fail(
                    cl.k,
                    t,
                    m,
                    "Claim",
                    format!("|g_t u_x v_k| = {norm:?} but c({t}) = {c}"),
                ));
            }
            rep.claim_times += 1;
        }
        if t >= s.t0 {
            let r = ceil(s.psi.r_psi_int(t));
            if c < r {
                return Err(fail(
                    0,
                    t,
                    m,
                    "certificate",
                    format!("c({t}) = {c} below r_psi = {r}"),
                ));
            }
        }
        if eq_times.contains(&t) {
            certificate_equality(f, &s.psi, &x, t, c, &session.witness()?)
                .map_err(|d| fail(0, t, m, "certificate equality", d))?;
            rep.equality_times.push(t);
        }
    }
    Ok(rep)
}

/// Re-checks every witness and walks up to `max_leaves` leaves (all by
/// default) in parallel.
pub fn verify_tree(
    f: &FieldSpec,
    tree: &CantorTree,
    max_leaves: Option<usize>,
) -> Result<TreeReport> {
    for w in &tree.witnesses {
        w.check(f, &tree.schedule)?;
    }
    let count = max_leaves.unwrap_or(usize::MAX).min(tree.leaves.len());
    let leaves = (0..count)
        .into_par_iter()
        .map(|i| verify_leaf(f, tree, i))
        .collect::<Result<Vec<_>>>()?;
    Ok(TreeReport {
        witnesses: tree.witnesses.len(),
        leaves,
    })
}

/// The leaf centre as an exact point (valid for the flow up to `L M`).
pub fn leaf_center(f: &FieldSpec, tree: &CantorTree, leaf: usize) -> Result<LaurentVector> {
    tree.leaves
        .get(leaf)
        .map(|l| l.cube().center(f))
        .ok_or_else(|| Error::Precondition(format!("no leaf {leaf}")))
}

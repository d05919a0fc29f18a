use super::cube::Cube;
use crate::algebra::{Deg, FieldSpec, Laurent, LaurentVector};
use crate::dynamics::{apply_flow, dist, flow_shifts, RationalPoint};
use crate::error::{Error, Result};
use crate::lattice::ShiftedLattice;

/// A rational point close to `x` with the verified bounds
/// `n t - R <= log H <= n (t + 2 n R)`, `log d <= -(n+1) t - 1` and
/// `log d <= -t - 2 n R - log H`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GoodRational {
    pub v: RationalPoint,
    pub height: i64,
    pub log_dist: Deg,
    pub t: i64,
    pub r: i64,
}

fn bound_failure(inequality: &str, detail: String) -> Error {
    Error::Verification {
        epoch: 0,
        level: 0,
        inequality: inequality.into(),
        detail,
    }
}

/// The canonical shortest vector at time `t + 2 n R`, provided `c_x(t) >= -R`.
pub fn find_good_rational(
    f: &FieldSpec,
    x: &LaurentVector,
    t: i64,
    r: i64,
) -> Result<GoodRational> {
    good_rational_from(f, x, apply_flow(f, x, t)?, t, r)
}

/// As [`find_good_rational`], starting from any basis of the lattice of `x`
/// carrying the shifts of time `t`.
pub(crate) fn good_rational_from(
    f: &FieldSpec,
    x: &LaurentVector,
    mut lat: ShiftedLattice,
    t: i64,
    r: i64,
) -> Result<GoodRational> {
    let n = x.dim() as i64;
    lat.reduce_in_place()?;
    let c = lat.minima_of_reduced()?.d[0];
    if c < -r {
        return Err(Error::Precondition(format!(
            "c_x({t}) = {c} is below -R = {}",
            -r
        )));
    }
    let later = t + 2 * n * r;
    lat.set_shifts(flow_shifts(x.dim(), later));
    lat.reduce_in_place()?;
    let w = lat.shortest_of_reduced()?;
    let v = RationalPoint::from_vector(f, &w)
        .ok_or_else(|| bound_failure("good rational", "shortest vector has g = 0".into()))?;
    let h = v.height();
    let d = dist(f, x, &v)?;
    if h < n * t - r || h > n * later {
        return Err(bound_failure(
            "good rational height",
            format!("log H = {h} outside [{}, {}]", n * t - r, n * later),
        ));
    }
    let cap = (-(n + 1) * t - 1).min(-t - 2 * n * r - h);
    if d > Deg::Fin(cap) {
        return Err(bound_failure(
            "good rational distance",
            format!("log d = {d:?} above {cap}"),
        ));
    }
    Ok(GoodRational {
        v,
        height: h,
        log_dist: d,
        t,
        r,
    })
}

/// The expansion of `v` kept down to `X^{-m}`, with the coefficient of
/// `X^{-m}` in the first coordinate replaced by its successor, so that
/// `d(v, y) = q^{-m}` exactly.
pub fn pick_target_point(
    f: &FieldSpec,
    v: &RationalPoint,
    m: i64,
    c: &Cube,
) -> Result<LaurentVector> {
    if m < -c.side_exponent() {
        return Err(Error::Precondition(format!(
            "target exponent -{m} is not below the cube side {}",
            c.side_exponent()
        )));
    }
    let series = v.as_series(f, -m - 1)?;
    let coords = series
        .coords()
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let mut terms = s.terms();
            if i == 0 {
                let old = s.coeff(-m)?;
                terms.retain(|t| t.0 != -m);
                terms.push((-m, f.successor(old)));
            }
            Ok(Laurent::from_terms(f, &terms, None))
        })
        .collect::<Result<Vec<_>>>()?;
    let y = LaurentVector::new(coords);
    if !c.contains(&y) {
        return Err(Error::Precondition(
            "the rational point is not in the cube".into(),
        ));
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::text::parse_series;
    use crate::algebra::Poly;
    use crate::dynamics::quadratic_irrational;

    fn f2() -> FieldSpec {
        FieldSpec::prime(2).unwrap()
    }

    #[test]
    fn convergent_of_quadratic_irrational() {
        let f = f2();
        let x = LaurentVector::new(vec![quadratic_irrational(&f, -200).unwrap()]);
        let g = find_good_rational(&f, &x, 6, 2).unwrap();
        assert!((4..=10).contains(&g.height));
        assert!(g.log_dist <= Deg::Fin(-13));
        assert!(g.log_dist <= Deg::Fin(-6 - 4 - g.height));
    }

    #[test]
    fn rational_center_fails_precondition() {
        let f = f2();
        let err = find_good_rational(&f, &LaurentVector::zero(&f, 1), 6, 2).unwrap_err();
        assert!(matches!(err, Error::Precondition(_)));
    }

    #[test]
    fn single_coefficient_edit() {
        let f = f2();
        let v = RationalPoint::new(&f, Poly::monomial(&f, 1, 2), vec![Poly::one(&f)]).unwrap();
        let y = pick_target_point(&f, &v, 6, &Cube::root(1)).unwrap();
        assert!(y.coord(0).same_as(&parse_series(&f, "X^-2+X^-6").unwrap()));
        assert_eq!(dist(&f, &y, &v).unwrap(), Deg::Fin(-6));
        // edits below X^-6 leave the distance unchanged
        let z = LaurentVector::new(vec![parse_series(&f, "X^-2+X^-6+X^-9").unwrap()]);
        assert_eq!(dist(&f, &z, &v).unwrap(), Deg::Fin(-6));
    }

    #[test]
    fn target_stays_in_cube() {
        let f = f2();
        let v = RationalPoint::new(&f, Poly::monomial(&f, 1, 2), vec![Poly::one(&f)]).unwrap();
        let c = Cube {
            level: 1,
            digits: vec![vec![0, 0, 1, 0]],
        };
        assert!(c.contains(&pick_target_point(&f, &v, 6, &c).unwrap()));
        let other = Cube {
            level: 1,
            digits: vec![vec![0, 1, 0, 0]],
        };
        assert!(pick_target_point(&f, &v, 6, &other).is_err());
        assert!(pick_target_point(&f, &v, 3, &c).is_err());
    }
}

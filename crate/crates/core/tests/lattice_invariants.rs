use exact_approx::algebra::{FieldSpec, Laurent, Poly};
use exact_approx::lattice::{brute_force_minima, ShiftedLattice};
use proptest::prelude::*;

fn flow(f: &FieldSpec, xs: &[Vec<u8>], t: i64) -> ShiftedLattice {
    let n = xs.len();
    let mut first = vec![Laurent::from_poly(Poly::one(f))];
    for digits in xs {
        let terms: Vec<(i64, u8)> = digits
            .iter()
            .enumerate()
            .map(|(i, &c)| (-(i as i64) - 1, c))
            .collect();
        first.push(Laurent::from_terms(f, &terms, None).neg(f));
    }
    let mut rows = vec![first];
    for i in 0..n {
        let mut r = vec![Laurent::zero(f); n + 1];
        r[i + 1] = Laurent::from_poly(Poly::one(f));
        rows.push(r);
    }
    let mut shifts = vec![t; n + 1];
    shifts[0] = -(n as i64) * t;
    ShiftedLattice::new(f, rows, shifts).unwrap()
}

fn instance() -> impl Strategy<Value = (u32, Vec<Vec<u8>>, i64)> {
    (prop_oneof![Just(2u32), Just(3u32)], 1usize..=2, 0i64..=6).prop_flat_map(|(q, n, t)| {
        (
            Just(q),
            prop::collection::vec(prop::collection::vec(0..q as u8, 12), n),
            Just(t),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn reduction_agrees_with_oracle((q, xs, t) in instance()) {
        let f = FieldSpec::prime(q).unwrap();
        let l = flow(&f, &xs, t);
        let fast = l.successive_minima().unwrap();
        let wdeg = fast.witnesses.iter().flatten().filter_map(Poly::degree).max().unwrap_or(0);
        prop_assume!(wdeg <= 6);
        let slow = brute_force_minima(&l, 6).unwrap();
        prop_assert_eq!(&fast.d, &slow.d);
        prop_assert_eq!(l.shortest_vector().unwrap(), slow.witnesses[0].clone());
    }

    #[test]
    fn minima_respect_covolume_and_minkowski((q, xs, t) in instance()) {
        let f = FieldSpec::prime(q).unwrap();
        let d = flow(&f, &xs, t).successive_minima().unwrap().d;
        prop_assert_eq!(d.iter().sum::<i64>(), 0);
        prop_assert!(d[0] <= 0);
        prop_assert!(d.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn one_step_changes_first_minimum_by_at_most_n((q, xs, t) in instance()) {
        let f = FieldSpec::prime(q).unwrap();
        let n = xs.len() as i64;
        let a = flow(&f, &xs, t).successive_minima().unwrap().d[0];
        let b = flow(&f, &xs, t + 1).successive_minima().unwrap().d[0];
        prop_assert!(b - a <= 1 && a - b <= n);
    }
}

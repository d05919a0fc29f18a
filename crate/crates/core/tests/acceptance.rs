use std::sync::OnceLock;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exact_approx::algebra::{rat, Deg, Elem, FieldSpec, Laurent, LaurentVector, Poly, Rational};
use exact_approx::cantor::{
    build_cantor, verify_exact_membership, verify_tree, BuildOptions, CantorTree, TreeReport,
};
use exact_approx::dimension::{theoretical_lower_bound, DimensionReport};
use exact_approx::dynamics::{
    apply_flow, c_value, dani_backward, dani_forward, dist, required_floor, trajectory, DaniMode,
    RationalPoint,
};
use exact_approx::lattice::brute_force_minima;
use exact_approx::template::{Constants, Growth, LevelCase, PsiFunction, Schedule};
use exact_approx::Error;

fn report(n: usize, name: &str, start: Instant, ok: bool) -> bool {
    let verdict = if ok { "PASS" } else { "FAIL" };
    println!(
        "criterion {n}: {verdict} {name} ({:.1} s)",
        start.elapsed().as_secs_f64()
    );
    ok
}

fn random_series(f: &FieldSpec, rng: &mut ChaCha8Rng, floor: i64) -> Laurent {
    let terms: Vec<(i64, Elem)> = (1..-floor)
        .map(|j| (-j, rng.gen_range(0..f.q()) as Elem))
        .filter(|t| t.1 != 0)
        .collect();
    Laurent::from_terms(f, &terms, Some(floor))
}

fn random_point(f: &FieldSpec, rng: &mut ChaCha8Rng, n: usize, floor: i64) -> LaurentVector {
    LaurentVector::new((0..n).map(|_| random_series(f, rng, floor)).collect())
}

fn random_poly(f: &FieldSpec, rng: &mut ChaCha8Rng, deg: usize) -> Poly {
    let mut c: Vec<Elem> = (0..=deg).map(|_| rng.gen_range(0..f.q()) as Elem).collect();
    c[deg] = rng.gen_range(1..f.q()) as Elem;
    Poly::from_coeffs(f, &c)
}

fn criterion_1_minkowski_identity() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut ok = true;
    for _ in 0..1000 {
        let q = [2, 3, 5][rng.gen_range(0..3)];
        let n = rng.gen_range(1..=3);
        let t = rng.gen_range(0..=50);
        let f = FieldSpec::prime(q).unwrap();
        let x = random_point(&f, &mut rng, n, required_floor(n, t) - 4);
        let d = apply_flow(&f, &x, t)
            .unwrap()
            .successive_minima()
            .unwrap()
            .d;
        ok &= d.iter().sum::<i64>() == 0;
    }
    report(1, "sum of minima is zero", start, ok)
}

fn criterion_2_oracle_equivalence() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let (mut compared, mut ok) = (0, true);
    while compared < 500 {
        let q = [2, 3][rng.gen_range(0..2)];
        let n = rng.gen_range(1..=2);
        let t = rng.gen_range(0..=6);
        let f = FieldSpec::prime(q).unwrap();
        let x = random_point(&f, &mut rng, n, required_floor(n, t) - 4);
        let l = apply_flow(&f, &x, t).unwrap();
        let fast = l.successive_minima().unwrap();
        let wdeg = fast
            .witnesses
            .iter()
            .flatten()
            .filter_map(Poly::degree)
            .max()
            .unwrap_or(0);
        if wdeg > 6 {
            continue;
        }
        let slow = brute_force_minima(&l, 6).unwrap();
        ok &= fast.d == slow.d && l.shortest_vector().unwrap() == slow.witnesses[0];
        compared += 1;
    }
    report(2, "reduction agrees with enumeration", start, ok)
}

fn conforming_triple(
    rng: &mut ChaCha8Rng,
) -> (FieldSpec, LaurentVector, RationalPoint, PsiFunction) {
    loop {
        let q = [2, 3][rng.gen_range(0..2)];
        let f = FieldSpec::prime(q).unwrap();
        let n = rng.gen_range(1..=2);
        let psi = PsiFunction::power_law(n, if n == 1 { rat(3, 1) } else { rat(2, 1) }).unwrap();
        let h = rng.gen_range(1..=8usize);
        let g = random_poly(&f, rng, h);
        let fs: Vec<Poly> = (0..n)
            .map(|_| {
                let d = rng.gen_range(0..h);
                random_poly(&f, rng, d)
            })
            .collect();
        let common = fs.iter().fold(g.clone(), |acc, p| acc.gcd(&f, p));
        if common.degree() != Some(0) {
            continue;
        }
        let v = RationalPoint::new(&f, g, fs).unwrap();
        if !(psi.log_big_psi(Rational::from_integer(v.height())) / n as i64).is_integer() {
            continue;
        }
        let top = psi
            .log_psi(Rational::from_integer(v.height()))
            .floor()
            .to_integer()
            - rng.gen_range(0..3);
        let floor = top - 80;
        let base = v.as_series(&f, floor).unwrap();
        let x = LaurentVector::new(
            base.coords()
                .iter()
                .map(|c| {
                    let mut terms = vec![(top, rng.gen_range(1..q) as Elem)];
                    terms.extend((1..20).map(|j| (top - j, rng.gen_range(0..q) as Elem)));
                    c.add(&f, &Laurent::from_terms(&f, &terms, Some(floor)))
                })
                .collect(),
        );
        let t = (psi.log_big_psi(Rational::from_integer(v.height())) / n as i64).to_integer();
        let d = apply_flow(&f, &x, t)
            .unwrap()
            .successive_minima()
            .unwrap()
            .d;
        if d[0] == d[1] {
            continue;
        }
        return (f, x, v, psi);
    }
}

fn criterion_3_dani_round_trip() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut ok = true;
    for _ in 0..200 {
        let (f, x, v, psi) = conforming_triple(&mut rng);
        let fw = dani_forward(&f, &x, &v, &psi).unwrap();
        let back = dani_backward(&f, &x, fw.t, &psi, DaniMode::E1).unwrap();
        let good = fw.norm_bound_holds && fw.e1_attains && back.as_ref() == Some(&v);
        ok &= good;
    }
    report(3, "Dani correspondence round trip", start, ok)
}

fn criterion_4_ultrametric() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let f = FieldSpec::prime(3).unwrap();
    let mut ok = true;
    for _ in 0..10_000 {
        let mut series = || {
            let terms: Vec<(i64, Elem)> = (0..rng.gen_range(0..12))
                .map(|_| (rng.gen_range(-30..6), rng.gen_range(0..3) as Elem))
                .collect();
            Laurent::from_terms(&f, &terms, None)
        };
        let (a, b) = (series(), series());
        let (da, db, ds) = (
            a.top().unwrap(),
            b.top().unwrap(),
            a.add(&f, &b).top().unwrap(),
        );
        ok &= ds <= da.max(db) && (da == db || ds == da.max(db));
    }
    report(4, "ultrametric inequality", start, ok)
}

fn criterion_9_precision_soundness() -> bool {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let f = FieldSpec::prime(2).unwrap();
    let (mut ok, mut exhausted) = (true, 0);
    for _ in 0..400 {
        let n = rng.gen_range(1..=2);
        let t = rng.gen_range(1..=40);
        let full = random_point(&f, &mut rng, n, -300);
        let cut = full.with_floor(rng.gen_range(required_floor(n, t) - 10..0));
        let exact = c_value(&f, &full, t).unwrap();
        match c_value(&f, &cut, t) {
            Ok(c) => ok &= c == exact,
            Err(Error::PrecisionExhausted { .. }) => exhausted += 1,
            Err(_) => ok = false,
        }
        let h = rng.gen_range(1..=10);
        let g = random_poly(&f, &mut rng, h);
        let fs = (0..n).map(|_| random_poly(&f, &mut rng, h - 1)).collect();
        let v = RationalPoint::new(&f, g, fs).unwrap();
        let e = rng.gen_range(5..120);
        let near = v.as_series(&f, -300).unwrap();
        let near = LaurentVector::new(
            near.coords()
                .iter()
                .map(|c| c.add(&f, &Laurent::from_terms(&f, &[(-e, 1)], Some(-300))))
                .collect(),
        );
        let exact = dist(&f, &near, &v).unwrap();
        ok &= exact == Deg::Fin(-e);
        match dist(&f, &near.with_floor(rng.gen_range(-150..0)), &v) {
            Ok(d) => ok &= d == exact,
            Err(Error::PrecisionExhausted { .. }) => exhausted += 1,
            Err(_) => ok = false,
        }
    }
    ok &= exhausted > 0;
    report(9, "under-provisioned precision is detected", start, ok)
}

struct Run {
    f: FieldSpec,
    schedule: Schedule,
    tree: CantorTree,
}

fn run(n: usize, s: Rational, t0: i64, times: Vec<i64>) -> Run {
    let f = FieldSpec::prime(2).unwrap();
    let psi = PsiFunction::power_law(n, s).unwrap();
    let k = times.len();
    let schedule = Schedule::choose(
        psi,
        2,
        Constants::desk(n),
        t0,
        &Growth::Times(times),
        k,
        rat(1, 10),
    )
    .unwrap();
    let opts = BuildOptions {
        frontier_cap: 32,
        seed: 1,
    };
    let tree = build_cantor(&f, &schedule, None, opts).unwrap();
    Run { f, schedule, tree }
}

fn desk() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| run(1, rat(3, 1), 9, vec![540, 43200]))
}

fn plane() -> &'static Run {
    static RUN: OnceLock<Run> = OnceLock::new();
    RUN.get_or_init(|| run(2, rat(2, 1), 8, vec![400]))
}

/// The certificate along `x` on `[0, hi]`, streamed in windows.
fn certificate(r: &Run, x: &LaurentVector, equalities: &[i64]) -> bool {
    let (psi, t0, hi) = (
        &r.schedule.psi,
        r.schedule.t0,
        r.tree.depth * r.schedule.constants.m,
    );
    let mut lo = 0;
    while lo <= hi {
        let top = (lo + 2047).min(hi);
        let eq: Vec<i64> = equalities
            .iter()
            .copied()
            .filter(|t| (lo..=top).contains(t))
            .collect();
        let v = trajectory(&r.f, x, lo, top)
            .unwrap()
            .check_exactness_certificate(&r.f, psi, t0, &eq);
        if !v.ok && !(eq.is_empty() && v.violation.as_deref() == Some("no equality times")) {
            println!("certificate: {:?}", v.violation);
            return false;
        }
        lo = top + 1;
    }
    !equalities.is_empty()
}

/// Tree walk, witnesses, certificate and membership for leaf 0.
fn end_to_end(r: &Run) -> bool {
    let rep: TreeReport = verify_tree(&r.f, &r.tree, None).unwrap();
    let walked = rep.leaves.len() == r.tree.leaves.len() && !rep.leaves.is_empty();
    let witnesses = r
        .tree
        .witnesses
        .iter()
        .all(|w| w.check(&r.f, &r.schedule).is_ok());
    let leaf = &rep.leaves[0];
    let center = exact_approx::cantor::leaf_center(&r.f, &r.tree, 0).unwrap();
    let cert = certificate(r, &center, &leaf.equality_times);
    let x = r.tree.extract_point(&r.f, 0).unwrap();
    let own = &r.tree.leaves[0].witnesses;
    let top = own.iter().map(|w| w.height).max().unwrap();
    let n = r.schedule.n() as i64;
    let m = verify_exact_membership(
        &r.f,
        &x,
        &r.schedule.psi,
        top + 1,
        n * r.schedule.t0,
        r.schedule.epochs.len(),
    )
    .unwrap();
    let heights = own.iter().all(|w| m.equality_heights.contains(&w.height));
    println!(
        "  leaves {} witnesses {} equalities {:?} membership {} heights {:?}",
        rep.leaves.len(),
        rep.witnesses,
        leaf.equality_times,
        m.ok,
        m.equality_heights
    );
    walked && witnesses && cert && m.ok && heights
}

fn branching(r: &Run) -> bool {
    r.tree
        .levels
        .iter()
        .filter(|l| matches!(l.case, LevelCase::Free { .. }))
        .all(|l| l.min_included as u128 >= l.b)
}

fn criterion_5_construction_end_to_end() -> bool {
    let start = Instant::now();
    let r = desk();
    assert_eq!(r.tree.depth, r.schedule.depth());
    report(5, "desk construction verifies", start, end_to_end(r))
}

fn criterion_6_branching() -> bool {
    let start = Instant::now();
    report(6, "certified branching meets b_l", start, branching(desk()))
}

fn criterion_7_dimension() -> bool {
    let start = Instant::now();
    let r = desk();
    let (lambda, _) = r.schedule.psi.lambda_gamma();
    let bound = theoretical_lower_bound(
        2,
        r.schedule.constants.m,
        Rational::from_integer(0),
        1,
        lambda,
    )
    .unwrap();
    let exact = bound.as_rational() == Some(Rational::from_integer(2) / lambda);
    let d = DimensionReport::from_tree(&r.tree).unwrap();
    let slope = d.box_count.slope;
    println!("  bound {bound} box slope {slope:.4} target {}", d.target);
    report(
        7,
        "dimension bound and box count",
        start,
        exact && (0.5..=0.85).contains(&slope),
    )
}

fn criterion_8_second_configuration() -> bool {
    let start = Instant::now();
    let r = plane();
    let d = DimensionReport::from_tree(&r.tree).unwrap();
    let slope = d.box_count.slope;
    println!("  box slope {slope:.4} target {}", d.target);
    let ok = end_to_end(r) && branching(r) && d.target == rat(3, 2) && (1.1..=1.8).contains(&slope);
    report(8, "n = 2, s = 2", start, ok)
}

fn criterion_10_determinism() -> bool {
    let start = Instant::now();
    let again = run(1, rat(3, 1), 9, vec![540, 43200]);
    report(
        10,
        "identical manifests",
        start,
        again.tree.manifest(&again.f) == desk().tree.manifest(&desk().f),
    )
}

fn main() {
    let criteria: [fn() -> bool; 10] = [
        criterion_1_minkowski_identity,
        criterion_2_oracle_equivalence,
        criterion_3_dani_round_trip,
        criterion_4_ultrametric,
        criterion_5_construction_end_to_end,
        criterion_6_branching,
        criterion_7_dimension,
        criterion_8_second_configuration,
        criterion_9_precision_soundness,
        criterion_10_determinism,
    ];
    let mut failed = 0;
    for (i, c) in criteria.iter().enumerate() {
        match std::panic::catch_unwind(c) {
            Ok(true) => {}
            Ok(false) => failed += 1,
            Err(_) => {
                println!("criterion {}: FAIL (panicked)", i + 1);
                failed += 1;
            }
        }
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use exact_approx::algebra::text::{format_series, parse_series};
use exact_approx::algebra::{
    format_rational, Deg, Elem, FieldSpec, Laurent, LaurentVector, Rational,
};
use exact_approx::cantor::{
    approx_table_csv, best_approx_table, build_cantor, membership_from_table,
    verify_exact_membership, verify_tree, ApproxEntry, CantorTree, Membership,
};
use exact_approx::dimension::DimensionReport;
use exact_approx::dynamics::{quadratic_irrational, required_floor, trajectory};
use exact_approx::template::{build_template, slope_conditions, Schedule};

use crate::config::ExperimentConfig;

/// Writes files under the output directory, each headed by the version and
/// the config hash.
pub struct Out {
    dir: PathBuf,
    header: String,
}

impl Out {
    pub fn new(dir: &Path, cfg: &ExperimentConfig) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        let out = Out {
            dir: dir.to_path_buf(),
            header: format!(
                "# exact-approx {} config-sha256 {}\n",
                env!("CARGO_PKG_VERSION"),
                cfg.hash()
            ),
        };
        fs::write(out.dir.join("config.toml"), cfg.to_toml())?;
        Ok(out)
    }

    pub fn write(&self, name: &str, body: &str) -> Result<PathBuf> {
        let path = self.dir.join(name);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent)?;
        }
        fs::write(&path, format!("{}{body}", self.header))
            .with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

/// Outcome of a command: whether every verification passed, plus a summary.
pub struct Report {
    pub ok: bool,
    pub summary: String,
}

fn random_point(f: &FieldSpec, n: usize, floor: i64, seed: u64) -> LaurentVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    LaurentVector::new(
        (0..n)
            .map(|_| {
                let terms: Vec<(i64, Elem)> = (1..-floor)
                    .map(|j| (-j, rng.gen_range(0..f.q()) as Elem))
                    .filter(|t| t.1 != 0)
                    .collect();
                Laurent::from_terms(f, &terms, Some(floor))
            })
            .collect(),
    )
}

/// `zero`, `xstar`, `random`, `@file` (one coordinate per line) or
/// coordinates separated by `;`.
pub fn point_source(
    f: &FieldSpec,
    n: usize,
    spec: &str,
    floor: i64,
    seed: u64,
) -> Result<LaurentVector> {
    let x = match spec {
        "zero" => LaurentVector::zero(f, n),
        "xstar" => {
            if n != 1 {
                bail!("xstar is a point of the line (n = 1)");
            }
            LaurentVector::new(vec![quadratic_irrational(f, floor)?])
        }
        "random" => random_point(f, n, floor, seed),
        _ => {
            let text = match spec.strip_prefix('@') {
                Some(path) => {
                    fs::read_to_string(path).with_context(|| format!("reading {path}"))?
                }
                None => spec.replace(';', "\n"),
            };
            let coords = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| parse_series(f, l))
                .collect::<exact_approx::Result<Vec<_>>>()?;
            if coords.len() != n {
                bail!("point has {} coordinates, expected n = {n}", coords.len());
            }
            LaurentVector::new(coords)
        }
    };
    if !x.in_unit_ball() {
        bail!("point must lie in the unit ball");
    }
    Ok(x)
}

fn point_text(x: &LaurentVector) -> String {
    x.coords().iter().map(|c| format_series(c) + "\n").collect()
}

pub fn cmd_trajectory(
    cfg: &ExperimentConfig,
    out: &Out,
    x_spec: &str,
    horizon: i64,
) -> Result<Report> {
    let f = cfg.field_spec()?;
    let schedule = cfg.schedule()?;
    let psi = schedule.psi;
    let x = point_source(
        &f,
        cfg.n,
        x_spec,
        required_floor(cfg.n, horizon),
        cfg.run.seed,
    )?;
    let tr = trajectory(&f, &x, 0, horizon)?;
    let tpl = build_template(&schedule, Rational::from_integer(horizon));
    let mut csv = String::from("t,c_x,r_psi,T\n");
    let mut min: Option<(Rational, i64)> = None;
    let mut first_negative = None;
    for t in 0..=horizon {
        let c = tr.get(t).expect("point on the trajectory").c;
        let r = psi.r_psi_int(t);
        let _ = writeln!(
            csv,
            "{t},{c},{},{}",
            format_rational(r),
            format_rational(tpl.eval(Rational::from_integer(t)))
        );
        let slack = Rational::from_integer(c) - r;
        if min.is_none_or(|m| slack < m.0) {
            min = Some((slack, t));
        }
        if first_negative.is_none() && slack < Rational::from_integer(0) {
            first_negative = Some(t);
        }
    }
    out.write("trajectory.csv", &csv)?;
    let (slack, at) = min.expect("nonempty range");
    let mut summary = format!(
        "min slack c_x - r_psi = {} at t = {at}\n",
        format_rational(slack)
    );
    match first_negative {
        Some(t) => summary += &format!("slack first negative at t = {t}\n"),
        None => summary += "slack non-negative on the whole range\n",
    }
    out.write("trajectory.txt", &summary)?;
    Ok(Report { ok: true, summary })
}

pub fn cmd_template(cfg: &ExperimentConfig, out: &Out, horizon: Option<i64>) -> Result<Report> {
    let schedule = cfg.schedule()?;
    let horizon = horizon.unwrap_or_else(|| schedule.depth() * schedule.constants.m);
    let tpl = build_template(&schedule, Rational::from_integer(horizon));
    out.write("template.csv", &tpl.to_csv())?;
    let slopes = slope_conditions(&schedule.psi);
    let ok = tpl.slopes_admissible() && slopes.ok;
    let summary = format!(
        "breakpoints {}\nslopes admissible {}\nslope conditions {}\n",
        tpl.breakpoints.len(),
        tpl.slopes_admissible(),
        slopes.violation.as_deref().unwrap_or("hold")
    );
    out.write("template.txt", &summary)?;
    Ok(Report { ok, summary })
}

pub fn schedule_text(s: &Schedule) -> String {
    let c = &s.constants;
    let mut out = format!(
        "q {} n {} s {} t0 {}\nconstants R0 {} R1 {} R2 {} R3 {} C1 {} M {}\n",
        s.q,
        s.n(),
        format_rational(s.psi.s),
        s.t0,
        format_rational(c.r0),
        format_rational(c.r1),
        format_rational(c.r2),
        format_rational(c.r3),
        format_rational(c.c1),
        c.m
    );
    let _ = writeln!(
        out,
        "N {} free branching {} depth {}",
        s.big_n(),
        s.free_branching(),
        s.depth()
    );
    out += "k,t_k,M_k,t_k^-,t_k^+,l_k^-,l_k^+\n";
    for e in &s.epochs {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{}",
            e.k,
            e.t,
            format_rational(e.m_k),
            format_rational(e.t_minus),
            format_rational(e.t_plus),
            e.l_minus,
            e.l_plus
        );
    }
    out
}

pub fn cmd_schedule(cfg: &ExperimentConfig, out: &Out) -> Result<Report> {
    let s = cfg.schedule()?;
    s.validate()?;
    let summary = schedule_text(&s) + "all predicates hold\n";
    out.write("schedule.txt", &summary)?;
    Ok(Report { ok: true, summary })
}

fn membership_text(m: &Membership) -> String {
    let mut s = format!(
        "verdict {}\nequality heights {:?}\nviolations {}\n",
        if m.ok { "pass" } else { "fail" },
        m.equality_heights,
        m.violations.len()
    );
    for (d, v) in m.violations.iter().take(8) {
        let _ = writeln!(s, "  below psi at d = {d}: {v:?}");
    }
    s += "least slack (d, slack)\n";
    for (d, k) in &m.min_slack {
        let _ = writeln!(s, "  {d},{k}");
    }
    s
}

fn build(cfg: &ExperimentConfig, depth: Option<i64>) -> Result<(FieldSpec, Schedule, CantorTree)> {
    let f = cfg.field_spec()?;
    let s = cfg.schedule()?;
    let tree = build_cantor(&f, &s, depth.or(cfg.run.depth), cfg.build_options())?;
    Ok((f, s, tree))
}

fn write_dimension(out: &Out, tree: &CantorTree) -> Result<DimensionReport> {
    let d = DimensionReport::from_tree(tree)?;
    out.write(
        "dimension.txt",
        &(d.to_text() + "box count slope is approximate (floating point fit)\n"),
    )?;
    out.write("alpha.csv", &d.alpha_csv())?;
    out.write("counts.csv", &d.counts_csv())?;
    Ok(d)
}

pub fn cmd_construct(cfg: &ExperimentConfig, out: &Out, depth: Option<i64>) -> Result<Report> {
    let (f, s, tree) = build(cfg, depth)?;
    out.write("manifest.txt", &tree.manifest(&f))?;
    let rep = verify_tree(&f, &tree, cfg.run.verify_leaves)?;
    let mut text = format!(
        "witnesses {} leaves walked {}\n",
        rep.witnesses,
        rep.leaves.len()
    );
    for l in &rep.leaves {
        let _ = writeln!(
            text,
            "leaf {} times {} checkpoints {} (A) {} claim {} min (A) slack {:?} equalities {:?}",
            l.leaf,
            l.times,
            l.checkpoints,
            l.a_times,
            l.claim_times,
            l.min_a_slack,
            l.equality_times
        );
    }
    for i in 0..cfg.run.points.min(tree.leaves.len()) {
        out.write(
            &format!("points/leaf-{i}.txt"),
            &point_text(&tree.extract_point(&f, i)?),
        )?;
    }
    let mut ok = true;
    if tree.depth == s.depth() && !tree.leaves.is_empty() {
        let top = tree.witnesses.iter().map(|w| w.height).max().unwrap_or(0);
        let d_max = cfg.run.d_max.unwrap_or(top + 1);
        let x = tree.extract_point(&f, 0)?;
        let m =
            verify_exact_membership(&f, &x, &s.psi, d_max, s.n() as i64 * s.t0, s.epochs.len())?;
        text += "membership of leaf 0\n";
        text += &membership_text(&m);
        ok = m.ok;
    }
    out.write("verify.txt", &text)?;
    let d = write_dimension(out, &tree)?;
    let summary = format!("{text}{}", d.to_text());
    Ok(Report { ok, summary })
}

/// Long tables record the denominator degree in place of the witness.
fn table_csv(table: &[ApproxEntry]) -> String {
    if table.len() <= 512 {
        return approx_table_csv(table);
    }
    let mut out = String::from("d,min_dist_exponent,deg_g\n");
    for e in table {
        let _ = writeln!(out, "{},{},{}", e.d, e.log_dist, e.g.deg());
    }
    out
}

/// Default table depth for a point known down to `F`: nine tenths of
/// `-F n / (n+1)`.
pub fn default_d_max(x: &LaurentVector) -> i64 {
    let n = x.dim() as i64;
    match x.floor() {
        Some(fl) => (-fl * 9 * n / (10 * (n + 1))).max(1),
        None => 64,
    }
}

fn load_point(
    cfg: &ExperimentConfig,
    f: &FieldSpec,
    point: Option<&Path>,
    x: Option<&str>,
) -> Result<LaurentVector> {
    let spec = match (point, x) {
        (Some(p), None) => format!("@{}", p.display()),
        (None, Some(x)) => x.to_string(),
        _ => bail!("give exactly one of --point and --x"),
    };
    point_source(f, cfg.n, &spec, -400, cfg.run.seed)
}

pub fn cmd_verify(
    cfg: &ExperimentConfig,
    out: &Out,
    point: Option<&Path>,
    x: Option<&str>,
    d_max: Option<i64>,
) -> Result<Report> {
    let f = cfg.field_spec()?;
    let psi = cfg.psi()?;
    let x = load_point(cfg, &f, point, x)?;
    let d_max = d_max.or(cfg.run.d_max).unwrap_or_else(|| default_d_max(&x));
    let h0 = cfg.n as i64 * cfg.schedule.t0;
    let table = best_approx_table(&f, &x, d_max)?;
    let m = membership_from_table(&table, &psi, h0, cfg.schedule.epochs);
    let summary = format!("d_max {d_max} h0 {h0}\n{}", membership_text(&m));
    out.write("verdict.txt", &summary)?;
    out.write("bestapprox.csv", &table_csv(&table))?;
    Ok(Report { ok: m.ok, summary })
}

pub fn cmd_bestapprox(
    cfg: &ExperimentConfig,
    out: &Out,
    point: Option<&Path>,
    x: Option<&str>,
    d_max: Option<i64>,
) -> Result<Report> {
    let f = cfg.field_spec()?;
    let x = load_point(cfg, &f, point, x)?;
    let d_max = d_max.or(cfg.run.d_max).unwrap_or_else(|| default_d_max(&x));
    let table = best_approx_table(&f, &x, d_max)?;
    out.write("bestapprox.csv", &table_csv(&table))?;
    let exact = table.iter().filter(|e| e.log_dist == Deg::NegInf).count();
    let summary = format!("rows {} exact hits {exact}\n", table.len());
    Ok(Report { ok: true, summary })
}

pub fn cmd_dimension(cfg: &ExperimentConfig, out: &Out, depth: Option<i64>) -> Result<Report> {
    let (_, _, tree) = build(cfg, depth)?;
    let d = write_dimension(out, &tree)?;
    Ok(Report {
        ok: true,
        summary: d.to_text(),
    })
}

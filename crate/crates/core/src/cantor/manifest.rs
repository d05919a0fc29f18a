use std::fmt::Write as _;

use super::build::CantorTree;
use crate::algebra::text::hex_digits;
use crate::algebra::{format_rational, FieldSpec};
use crate::template::LevelCase;

impl CantorTree {
    /// Structured text: one line per level, per witness and per leaf.
    pub fn manifest(&self, f: &FieldSpec) -> String {
        let s = &self.schedule;
        let mut out = String::new();
        let _ = writeln!(
            out,
            "tree q={} n={} s={} M={} t0={} depth={} seed={} cap={}",
            s.q,
            s.n(),
            format_rational(s.psi.s),
            s.constants.m,
            s.t0,
            self.depth,
            self.options.seed,
            self.options.frontier_cap
        );
        for r in &self.levels {
            let case = match r.case {
                LevelCase::Free { k, threshold } => format!("free k={k} threshold={threshold}"),
                LevelCase::Shadow { k } => format!("shadow k={k}"),
            };
            let _ = writeln!(
                out,
                "level {} {case} b={} parents={} slope={} exact={} excluded={} min_included={} kept={} digest={:016x}",
                r.level, r.b, r.parents, r.included_slope, r.included_exact, r.excluded, r.min_included, r.kept, r.digest
            );
        }
        for w in &self.witnesses {
            let mg = &w.margins;
            let _ = writeln!(
                out,
                "witness k={} level={} logH={} m={} t_x={} margins=({},{},{},{})",
                w.k,
                w.level,
                w.height,
                w.m,
                format_rational(w.t_x),
                format_rational(mg.height_low),
                format_rational(mg.height_high),
                format_rational(mg.time_low),
                format_rational(mg.time_high)
            );
        }
        for (i, leaf) in self.leaves.iter().enumerate() {
            let cube = leaf.cube();
            let coords: Vec<String> = cube.digits.iter().map(|d| hex_digits(f.q(), d)).collect();
            let _ = writeln!(out, "leaf {i} {}", coords.join(":"));
        }
        out
    }
}

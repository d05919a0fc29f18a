//! Level-by-level construction with a bounded, seeded frontier.

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use rand::seq::{index::sample, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::cube::{block_of, Cube, Node};
use super::witness::EpochWitness;
use crate::algebra::{Elem, FieldSpec, Laurent, LaurentVector};
use crate::dynamics::{embedding_rows, flow_shifts};
use crate::error::{Error, Result};
use crate::lattice::ShiftedLattice;
use crate::template::{LevelCase, Schedule};

const UNKNOWN: i64 = i64::MIN / 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Cubes kept per level; the rest of the included children are counted
    /// but not expanded.
    pub frontier_cap: usize,
    pub seed: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            frontier_cap: 64,
            seed: 0,
        }
    }
}

/// Counts for one level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LevelRecord {
    pub level: i64,
    pub case: LevelCase,
    /// Regularized branching `b_l`.
    pub b: u128,
    pub parents: usize,
    /// Children certified by `c(parent) - n M`.
    pub included_slope: usize,
    /// Children certified by an exact evaluation.
    pub included_exact: usize,
    /// Children with `c` certified below the threshold.
    pub excluded: usize,
    /// Fewest included children over the parents.
    pub min_included: usize,
    pub kept: usize,
    pub digest: u64,
}

/// A cube of the final level with the witnesses of its ancestry.
#[derive(Clone, Debug)]
pub struct Leaf {
    pub(crate) node: Arc<Node>,
    /// Certified lower bound for `c` at `level * M` over the whole cube.
    pub certified: Option<i64>,
    pub witnesses: Vec<Arc<EpochWitness>>,
}

impl Leaf {
    pub fn cube(&self) -> Cube {
        self.node.to_cube()
    }
}

#[derive(Clone, Debug)]
pub struct CantorTree {
    pub schedule: Schedule,
    pub depth: i64,
    pub options: BuildOptions,
    pub levels: Vec<LevelRecord>,
    pub witnesses: Vec<Arc<EpochWitness>>,
    pub leaves: Vec<Leaf>,
}

/// Reduced basis at time `level * M` for the centre of the level cube.
#[derive(Debug)]
struct Anchor {
    level: i64,
    lattice: ShiftedLattice,
}

#[derive(Clone, Debug)]
struct Live {
    node: Arc<Node>,
    anchor: Arc<Anchor>,
    /// Lower bound for `c` at `node.level * M`, exact when the anchor is at
    /// the node's level.
    lb: i64,
    target: Option<Arc<LaurentVector>>,
    witnesses: Vec<Arc<EpochWitness>>,
}

struct Ctx<'a> {
    f: &'a FieldSpec,
    n: usize,
    m: i64,
    per: usize,
    children: u128,
}

struct Outcome {
    anchor: Arc<Anchor>,
    /// `(block index, lower bound, own anchor)`.
    included: Vec<(u128, i64, Option<Arc<Anchor>>)>,
    slope: usize,
    exact: usize,
    excluded: usize,
}

fn apply_blocks(ctx: &Ctx, lat: &mut ShiftedLattice, blocks: &[(i64, Vec<Vec<Elem>>)]) {
    let f = ctx.f;
    for row in lat.rows_mut() {
        if row.coeffs[0].is_zero() {
            continue;
        }
        let g = Laurent::from_poly(row.coeffs[0].clone());
        for (level, block) in blocks {
            let base = (level - 1) * ctx.per as i64;
            for (i, digits) in block.iter().enumerate() {
                for (j, &c) in digits.iter().enumerate() {
                    if c != 0 {
                        row.entries[i + 1].add_scaled_shifted(f, &g, f.neg(c), -(base + j as i64));
                    }
                }
            }
        }
    }
}

fn reduce_at(ctx: &Ctx, lat: &mut ShiftedLattice, level: i64) -> Result<i64> {
    lat.set_shifts(flow_shifts(ctx.n, level * ctx.m));
    lat.reduce_in_place()?;
    Ok(lat
        .row_degrees()?
        .into_iter()
        .min()
        .expect("nonempty basis"))
}

fn expand_free(ctx: &Ctx, p: &Live, threshold: i64) -> Result<Outcome> {
    let l = p.node.level + 1;
    let drop = ctx.n as i64 * ctx.m;
    let mut lb = p.lb;
    let mut anchor = p.anchor.clone();
    if lb - drop < threshold && anchor.level < l - 1 {
        let mut lat = anchor.lattice.clone();
        apply_blocks(ctx, &mut lat, &p.node.blocks_since(anchor.level));
        lb = reduce_at(ctx, &mut lat, l - 1)?;
        anchor = Arc::new(Anchor {
            level: l - 1,
            lattice: lat,
        });
    }
    let mut out = Outcome {
        anchor: anchor.clone(),
        included: Vec::new(),
        slope: 0,
        exact: 0,
        excluded: 0,
    };
    if lb - drop >= threshold {
        out.included = (0..ctx.children).map(|i| (i, lb - drop, None)).collect();
        out.slope = out.included.len();
        return Ok(out);
    }
    for idx in 0..ctx.children {
        let mut lat = anchor.lattice.clone();
        apply_blocks(
            ctx,
            &mut lat,
            &[(l, block_of(ctx.f.q(), ctx.n, ctx.per, idx))],
        );
        let c = reduce_at(ctx, &mut lat, l)?;
        if c >= threshold {
            out.included.push((
                idx,
                c,
                Some(Arc::new(Anchor {
                    level: l,
                    lattice: lat,
                })),
            ));
            out.exact += 1;
        } else {
            out.excluded += 1;
        }
    }
    Ok(out)
}

/// Per-parent quotas summing to `min(cap, total)`, then a uniform subset of
/// each parent's children.
fn select(counts: &[usize], cap: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let total: usize = counts.iter().sum();
    if total <= cap {
        return counts.iter().map(|&c| (0..c).collect()).collect();
    }
    let base = cap / counts.len().max(1);
    let mut quota: Vec<usize> = counts.iter().map(|&c| c.min(base)).collect();
    let mut left = cap - quota.iter().sum::<usize>();
    let mut order: Vec<usize> = (0..counts.len()).collect();
    order.shuffle(rng);
    while left > 0 {
        for &i in &order {
            if left > 0 && quota[i] < counts[i] {
                quota[i] += 1;
                left -= 1;
            }
        }
    }
    counts
        .iter()
        .zip(quota)
        .map(|(&c, k)| {
            let mut v = sample(rng, c, k).into_vec();
            v.sort_unstable();
            v
        })
        .collect()
}

fn digest(level: i64, frontier: &[Live]) -> u64 {
    let mut h = DefaultHasher::new();
    level.hash(&mut h);
    for p in frontier {
        p.node.block.hash(&mut h);
        p.lb.hash(&mut h);
    }
    h.finish()
}

fn target_block(ctx: &Ctx, y: &LaurentVector, level: i64) -> Result<Vec<Vec<Elem>>> {
    let base = (level - 1) * ctx.per as i64;
    y.coords()
        .iter()
        .map(|c| (0..ctx.per as i64).map(|j| c.coeff(-(base + j))).collect())
        .collect()
}

/// Builds levels `1..=depth` (default: the schedule's full depth).
pub fn build_cantor(
    f: &FieldSpec,
    schedule: &Schedule,
    depth: Option<i64>,
    opts: BuildOptions,
) -> Result<CantorTree> {
    schedule.validate()?;
    let full = schedule.depth();
    let depth = depth.unwrap_or(full);
    if depth < 0 || depth > full {
        return Err(Error::Precondition(format!(
            "depth {depth} outside 0..={full}"
        )));
    }
    if opts.frontier_cap == 0 {
        return Err(Error::Precondition("frontier cap must be positive".into()));
    }
    let n = schedule.n();
    let per = schedule.digits_per_level();
    let ctx = Ctx {
        f,
        n,
        m: schedule.constants.m,
        per,
        children: (f.q() as u128).pow((n * per) as u32),
    };
    let root = LaurentVector::zero(f, n);
    let lattice = ShiftedLattice::new(f, embedding_rows(f, &root), flow_shifts(n, 0))?;
    let mut frontier = vec![Live {
        node: Node::root(n),
        anchor: Arc::new(Anchor { level: 0, lattice }),
        lb: 0,
        target: None,
        witnesses: Vec::new(),
    }];
    let mut levels = Vec::new();
    let mut witnesses = Vec::new();
    for l in 1..=depth {
        let case = schedule
            .level_case(l)
            .ok_or_else(|| Error::Precondition(format!("level {l} is outside the schedule")))?;
        let parents = frontier.len();
        let mut rec = LevelRecord {
            level: l,
            case,
            b: schedule.branching(l),
            parents,
            included_slope: 0,
            included_exact: 0,
            excluded: 0,
            min_included: 1,
            kept: 0,
            digest: 0,
        };
        frontier = match case {
            LevelCase::Free { k, threshold } => {
                let outcomes = frontier
                    .par_iter()
                    .map(|p| expand_free(&ctx, p, threshold))
                    .collect::<Result<Vec<_>>>()?;
                let counts: Vec<usize> = outcomes.iter().map(|o| o.included.len()).collect();
                rec.included_slope = outcomes.iter().map(|o| o.slope).sum();
                rec.included_exact = outcomes.iter().map(|o| o.exact).sum();
                rec.excluded = outcomes.iter().map(|o| o.excluded).sum();
                rec.min_included = counts.iter().copied().min().unwrap_or(0);
                if (rec.min_included as u128) < rec.b {
                    return Err(Error::Verification {
                        epoch: k,
                        level: l as u64,
                        inequality: "included children >= b_l".into(),
                        detail: format!(
                            "a parent keeps {} children, fewer than b_l = {}",
                            rec.min_included, rec.b
                        ),
                    });
                }
                let mut rng = ChaCha8Rng::seed_from_u64(
                    opts.seed ^ (l as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15),
                );
                let chosen = select(&counts, opts.frontier_cap, &mut rng);
                let mut next = Vec::new();
                for ((p, o), picks) in frontier.iter().zip(outcomes).zip(chosen) {
                    for i in picks {
                        let (idx, lb, own) = &o.included[i];
                        next.push(Live {
                            node: Node::child(&p.node, block_of(f.q(), n, per, *idx)),
                            anchor: own.clone().unwrap_or_else(|| o.anchor.clone()),
                            lb: *lb,
                            target: None,
                            witnesses: p.witnesses.clone(),
                        });
                    }
                }
                next
            }
            LevelCase::Shadow { k } => {
                let epoch = &schedule.epochs[k - 1];
                if l == epoch.l_minus + 1 {
                    let placed = frontier
                        .par_iter()
                        .map(|p| {
                            let mut lat = p.anchor.lattice.clone();
                            apply_blocks(&ctx, &mut lat, &p.node.blocks_since(p.anchor.level));
                            lat.set_shifts(flow_shifts(n, epoch.l_minus * ctx.m));
                            EpochWitness::place(f, schedule, epoch, &p.node.to_cube(), lat)
                                .map(Arc::new)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    for (p, w) in frontier.iter_mut().zip(placed) {
                        p.target = Some(Arc::new(w.y.clone()));
                        p.witnesses.push(w.clone());
                        witnesses.push(w);
                    }
                }
                let mut next = Vec::with_capacity(frontier.len());
                for p in &frontier {
                    let y = p
                        .target
                        .as_ref()
                        .expect("target placed at the first shadow level");
                    next.push(Live {
                        node: Node::child(&p.node, target_block(&ctx, y, l)?),
                        anchor: p.anchor.clone(),
                        lb: UNKNOWN,
                        target: if l < epoch.l_plus {
                            p.target.clone()
                        } else {
                            None
                        },
                        witnesses: p.witnesses.clone(),
                    });
                }
                next
            }
        };
        rec.kept = frontier.len();
        rec.digest = digest(l, &frontier);
        levels.push(rec);
    }
    Ok(CantorTree {
        schedule: schedule.clone(),
        depth,
        options: opts,
        levels,
        witnesses,
        leaves: frontier
            .into_iter()
            .map(|p| Leaf {
                certified: (p.lb != UNKNOWN).then_some(p.lb),
                node: p.node,
                witnesses: p.witnesses,
            })
            .collect(),
    })
}

impl CantorTree {
    pub fn b_sequence(&self) -> Vec<u128> {
        self.levels.iter().map(|r| r.b).collect()
    }

    /// The leaf's fixed coefficients, known down to its side exponent.
    pub fn extract_point(&self, f: &FieldSpec, leaf: usize) -> Result<LaurentVector> {
        let l = self
            .leaves
            .get(leaf)
            .ok_or_else(|| Error::Precondition(format!("no leaf {leaf}")))?;
        Ok(l.cube().as_point(f))
    }
}

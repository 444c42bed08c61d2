use rand::Rng;

use super::kernel::{FreeEdge, Kernel};
use super::{GaConfig, Phase, PhaseCounts};
use crate::error::Result;
use crate::model::{Arrangement, CompatibilityTensor, Edge, PuzzleType, Rotation};

/// A complete arrangement with what crossover needs to know about it.
#[derive(Clone, Debug)]
pub struct Chromosome {
    pub arrangement: Arrangement,
    pub fitness: f64,
    /// `[piece * 4 + original edge]` -> neighbor piece and its touching edge.
    neighbors: Vec<Option<(u32, Edge)>>,
    /// `[piece * 4 + original edge]` -> score of that boundary.
    boundary: Vec<f32>,
    /// Mean boundary score of each piece over its neighbors here.
    piece_scores: Vec<f64>,
    /// Mean score over all boundaries.
    mean_score: f64,
}

impl Chromosome {
    pub fn new(arrangement: Arrangement, t: &CompatibilityTensor) -> Result<Self> {
        let n = arrangement.len();
        let pairs = arrangement.adjacent_pairs()?;
        let mut neighbors = vec![None; n * 4];
        let mut boundary = vec![0.0f32; n * 4];
        let mut sums = vec![0.0f64; n];
        let mut counts = vec![0u32; n];
        let mut fitness = 0.0;
        for adj in &pairs {
            let s32 = t.adjacency_score(adj)?;
            let s = s32 as f64;
            fitness += s;
            boundary[adj.a * 4 + adj.a_edge.index()] = s32;
            boundary[adj.b * 4 + adj.b_edge.index()] = s32;
            neighbors[adj.a * 4 + adj.a_edge.index()] = Some((adj.b as u32, adj.b_edge));
            neighbors[adj.b * 4 + adj.b_edge.index()] = Some((adj.a as u32, adj.a_edge));
            sums[adj.a] += s;
            sums[adj.b] += s;
            counts[adj.a] += 1;
            counts[adj.b] += 1;
        }
        let piece_scores = sums
            .iter()
            .zip(&counts)
            .map(|(s, &c)| if c == 0 { 0.0 } else { s / c as f64 })
            .collect();
        let mean_score = if pairs.is_empty() {
            0.0
        } else {
            fitness / pairs.len() as f64
        };
        Ok(Chromosome {
            arrangement,
            fitness,
            neighbors,
            boundary,
            piece_scores,
            mean_score,
        })
    }

    #[inline]
    pub fn neighbor(&self, piece: usize, edge: Edge) -> Option<(usize, Edge)> {
        self.neighbors[piece * 4 + edge.index()].map(|(p, e)| (p as usize, e))
    }

    pub fn boundary_score(&self, piece: usize, edge: Edge) -> f32 {
        self.boundary[piece * 4 + edge.index()]
    }

    pub fn piece_score(&self, piece: usize) -> f64 {
        self.piece_scores[piece]
    }

    pub fn mean_score(&self) -> f64 {
        self.mean_score
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct Ranked {
    piece: u32,
    edge: Edge,
    score: f32,
}

/// Strict best and second-best candidate of every (piece, edge).
///
/// A rank only exists when it is strictly better than the next one; ties at
/// the top mean "no most compatible piece".
#[derive(Clone, Debug)]
pub struct Ranking {
    puzzle_type: PuzzleType,
    first: Vec<Option<Ranked>>,
    second: Vec<Option<Ranked>>,
}

impl Ranking {
    pub fn new(t: &CompatibilityTensor) -> Self {
        let n = t.n();
        let mut first = vec![None; n * 4];
        let mut second = vec![None; n * 4];
        for a in 0..n {
            for e in Edge::ALL {
                // Top three by (score desc, piece asc, edge asc).
                let mut top: [Option<Ranked>; 3] = [None; 3];
                for (b, be, s) in t.candidates(a, e) {
                    let cand = Ranked {
                        piece: b as u32,
                        edge: be,
                        score: s,
                    };
                    let better = |x: &Ranked, y: &Option<Ranked>| match y {
                        None => true,
                        Some(y) => x.score > y.score,
                    };
                    if better(&cand, &top[0]) {
                        top = [Some(cand), top[0], top[1]];
                    } else if better(&cand, &top[1]) {
                        top = [top[0], Some(cand), top[1]];
                    } else if better(&cand, &top[2]) {
                        top[2] = Some(cand);
                    }
                }
                let strictly = |x: Option<Ranked>, y: Option<Ranked>| match (x, y) {
                    (Some(x), Some(y)) => x.score > y.score,
                    (Some(_), None) => true,
                    _ => false,
                };
                let i = a * 4 + e.index();
                if strictly(top[0], top[1]) {
                    first[i] = top[0];
                    if strictly(top[1], top[2]) {
                        second[i] = top[1];
                    }
                }
            }
        }
        Ranking {
            puzzle_type: t.puzzle_type(),
            first,
            second,
        }
    }

    pub fn puzzle_type(&self) -> PuzzleType {
        self.puzzle_type
    }

    pub fn first(&self, piece: usize, edge: Edge) -> Option<(usize, Edge, f32)> {
        self.first[piece * 4 + edge.index()].map(|r| (r.piece as usize, r.edge, r.score))
    }

    pub fn second(&self, piece: usize, edge: Edge) -> Option<(usize, Edge, f32)> {
        self.second[piece * 4 + edge.index()].map(|r| (r.piece as usize, r.edge, r.score))
    }

    /// Mutually most compatible edges.
    pub fn best_buddies(&self, a: usize, ae: Edge, b: usize, be: Edge) -> bool {
        matches!(self.first(a, ae), Some((p, e, _)) if p == b && e == be)
            && matches!(self.first(b, be), Some((p, e, _)) if p == a && e == ae)
    }
}

/// One placement decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Move {
    pub piece: usize,
    pub cell: (i32, i32),
    pub rot: Rotation,
}

/// Mutation draws for one placement attempt.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Skips {
    pub phase1: bool,
    pub phase23: bool,
}

impl Skips {
    pub fn draw<R: Rng + ?Sized>(cfg: &GaConfig, rng: &mut R) -> Self {
        // Always draw both so ablations do not shift the random stream.
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        Skips {
            phase1: u1 < cfg.skip_phase1_prob,
            phase23: u2 < cfg.skip_phase23_prob,
        }
    }

    fn skips(&self, p: Phase) -> bool {
        match p {
            Phase::P1_1 | Phase::P1_2 => self.phase1,
            Phase::P2 | Phase::P3 => self.phase23,
            _ => false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepRecord {
    pub phase: Phase,
    pub mv: Move,
    pub skips: Skips,
    /// Phases evaluated before `phase` that found nothing.
    pub tried: Vec<Phase>,
}

pub struct CrossoverContext<'a> {
    pub better: &'a Chromosome,
    pub worse: &'a Chromosome,
    pub ranking: &'a Ranking,
    pub cfg: &'a GaConfig,
}

impl<'a> CrossoverContext<'a> {
    pub fn new(
        a: &'a Chromosome,
        b: &'a Chromosome,
        ranking: &'a Ranking,
        cfg: &'a GaConfig,
    ) -> Self {
        let (better, worse) = if a.fitness >= b.fitness {
            (a, b)
        } else {
            (b, a)
        };
        CrossoverContext {
            better,
            worse,
            ranking,
            cfg,
        }
    }
}

/// Rotation that puts `edge` of a new piece against a free edge's anchor.
#[inline]
fn fitting(f: &FreeEdge, edge: Edge) -> Rotation {
    Rotation::bringing(edge, f.side.opposite())
}

/// Phases 1.1 and 1.2. Among free edges whose parent neighbor qualifies (both
/// pieces at or above the threshold there), the strongest boundary wins;
/// equal scores keep scan order. Taking the first qualifier instead lets
/// whatever the scan meets first lock in, which costs accuracy.
fn parent_threshold(
    kernel: &Kernel,
    free: &[FreeEdge],
    parent: &Chromosome,
    alpha0: f64,
) -> Option<Move> {
    let alpha = alpha0.max(parent.mean_score());
    let mut best: Option<(f32, Move)> = None;
    for f in free {
        let Some((b, be)) = parent.neighbor(f.anchor, f.anchor_edge) else {
            continue;
        };
        if kernel.is_placed(b)
            || parent.piece_score(f.anchor) < alpha
            || parent.piece_score(b) < alpha
        {
            continue;
        }
        let s = parent.boundary_score(f.anchor, f.anchor_edge);
        if best.as_ref().map_or(true, |&(bs, _)| s > bs) {
            let mv = Move {
                piece: b,
                cell: f.cell,
                rot: fitting(f, be),
            };
            best = Some((s, mv));
        }
    }
    best.map(|(_, mv)| mv)
}

fn consensus(kernel: &Kernel, free: &[FreeEdge], ctx: &CrossoverContext) -> Option<Move> {
    free.iter().find_map(|f| {
        let x = ctx.better.neighbor(f.anchor, f.anchor_edge)?;
        let y = ctx.worse.neighbor(f.anchor, f.anchor_edge)?;
        (x == y && !kernel.is_placed(x.0)).then(|| Move {
            piece: x.0,
            cell: f.cell,
            rot: fitting(f, x.1),
        })
    })
}

fn buddies(kernel: &Kernel, free: &[FreeEdge], ctx: &CrossoverContext) -> Option<Move> {
    free.iter().find_map(|f| {
        [ctx.better, ctx.worse].into_iter().find_map(|parent| {
            let (b, be) = parent.neighbor(f.anchor, f.anchor_edge)?;
            (!kernel.is_placed(b) && ctx.ranking.best_buddies(f.anchor, f.anchor_edge, b, be)).then(
                || Move {
                    piece: b,
                    cell: f.cell,
                    rot: fitting(f, be),
                },
            )
        })
    })
}

/// Highest-scoring available ranked candidate over all free edges; ties go to
/// the lowest (piece, edge), then to the first free edge in scan order.
fn ranked(
    kernel: &Kernel,
    free: &[FreeEdge],
    pick: impl Fn(usize, Edge) -> Option<(usize, Edge, f32)>,
) -> Option<Move> {
    let mut best: Option<(f32, usize, Edge, &FreeEdge)> = None;
    for f in free {
        let Some((b, be, s)) = pick(f.anchor, f.anchor_edge) else {
            continue;
        };
        if kernel.is_placed(b) {
            continue;
        }
        let wins = match best {
            None => true,
            Some((bs, bp, bpe, _)) => s > bs || (s == bs && (b, be) < (bp, bpe)),
        };
        if wins {
            best = Some((s, b, be, f));
        }
    }
    best.map(|(_, b, be, f)| Move {
        piece: b,
        cell: f.cell,
        rot: fitting(f, be),
    })
}

fn random_move<R: Rng + ?Sized>(
    kernel: &Kernel,
    free: &[FreeEdge],
    remaining: &[usize],
    puzzle_type: PuzzleType,
    rng: &mut R,
) -> Move {
    let piece = remaining[rng.random_range(0..remaining.len())];
    // distinct free cells, in scan order
    let mut cells: Vec<(i32, i32)> = free.iter().map(|f| f.cell).collect();
    cells.dedup();
    let cell = cells[rng.random_range(0..cells.len())];
    let rot = match puzzle_type {
        PuzzleType::Type1 => Rotation::R0,
        PuzzleType::Type2 => Rotation::from_quarters(rng.random_range(0..4)),
    };
    debug_assert!(kernel.is_legal(cell));
    Move { piece, cell, rot }
}

/// Runs the phase scan once against the current kernel.
///
/// `free` must be the kernel's current free edges and `remaining` its
/// unplaced pieces. Returns the winning phase, its move, and the phases that
/// were evaluated without result.
pub fn select_placement<R: Rng + ?Sized>(
    kernel: &Kernel,
    free: &[FreeEdge],
    remaining: &[usize],
    ctx: &CrossoverContext,
    skips: Skips,
    rng: &mut R,
) -> (Phase, Move, Vec<Phase>) {
    let mut tried = Vec::new();
    for phase in Phase::ORDER {
        if !ctx.cfg.enabled(phase) || skips.skips(phase) {
            continue;
        }
        let mv = match phase {
            Phase::P1_1 => parent_threshold(kernel, free, ctx.better, ctx.cfg.alpha0),
            Phase::P1_2 => parent_threshold(kernel, free, ctx.worse, ctx.cfg.alpha0),
            Phase::P2 => consensus(kernel, free, ctx),
            Phase::P3 => buddies(kernel, free, ctx),
            Phase::P4_1 => ranked(kernel, free, |p, e| ctx.ranking.first(p, e)),
            Phase::P4_2 => ranked(kernel, free, |p, e| ctx.ranking.second(p, e)),
            Phase::P5 => Some(random_move(
                kernel,
                free,
                remaining,
                ctx.ranking.puzzle_type(),
                rng,
            )),
        };
        match mv {
            Some(mv) => return (phase, mv, tried),
            None => tried.push(phase),
        }
    }
    unreachable!("phase 5 always places a piece")
}

/// Grows one offspring from two parents.
///
/// `kernel` is scratch space; it is reset first. When `trace` is given, every
/// placement after the seed is recorded.
pub fn crossover<R: Rng + ?Sized>(
    ctx: &CrossoverContext,
    kernel: &mut Kernel,
    rng: &mut R,
    mut trace: Option<&mut Vec<StepRecord>>,
) -> (Arrangement, PhaseCounts) {
    let n = kernel.piece_count();
    kernel.reset();
    let mut counts = PhaseCounts::default();

    let mut remaining: Vec<usize> = (0..n).collect();
    let mut slot: Vec<usize> = (0..n).collect();
    let take = |remaining: &mut Vec<usize>, slot: &mut Vec<usize>, piece: usize| {
        let i = slot[piece];
        let last = *remaining.last().expect("non-empty");
        remaining.swap_remove(i);
        if last != piece {
            slot[last] = i;
        }
    };

    let seed = rng.random_range(0..n);
    let seed_rot = match ctx.ranking.puzzle_type() {
        PuzzleType::Type1 => Rotation::R0,
        PuzzleType::Type2 => Rotation::from_quarters(rng.random_range(0..4)),
    };
    kernel.place(seed, kernel.center(), seed_rot);
    take(&mut remaining, &mut slot, seed);

    let mut free = Vec::new();
    while !kernel.is_complete() {
        let skips = Skips::draw(ctx.cfg, rng);
        kernel.free_edges(&mut free);
        let (phase, mv, tried) = select_placement(kernel, &free, &remaining, ctx, skips, rng);
        kernel.place(mv.piece, mv.cell, mv.rot);
        take(&mut remaining, &mut slot, mv.piece);
        counts.bump(phase);
        if let Some(t) = trace.as_deref_mut() {
            t.push(StepRecord {
                phase,
                mv,
                skips,
                tried,
            });
        }
    }
    let child = kernel
        .to_arrangement()
        .expect("frame rule keeps the completed kernel rectangular");
    (child, counts)
}

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::crossover::{crossover, Chromosome, CrossoverContext, Ranking};
use super::kernel::{most_square, FrameRule, Kernel};
use super::{DimsMode, GaConfig, PhaseCounts};
use crate::error::{Error, Result};
use crate::model::{Arrangement, CompatibilityTensor, PuzzleBundle, PuzzleType, Rotation};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverReport {
    pub arrangement: Arrangement,
    pub fitness: f64,
    /// Generations run by the restart that produced `arrangement`.
    pub generations: usize,
    /// Best fitness after each generation of that restart.
    pub trace: Vec<f64>,
    /// Final best fitness of every restart.
    pub restart_fitness: Vec<f64>,
    pub best_restart: usize,
    /// Placements per phase, summed over every crossover of that restart.
    pub phase_counts: PhaseCounts,
    pub config: GaConfig,
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent stream for one (seed, restart, generation, index) tuple.
fn stream(seed: u64, restart: usize, generation: usize, index: usize) -> ChaCha8Rng {
    let mut h = splitmix(seed);
    for part in [restart as u64, generation as u64, index as u64] {
        h = splitmix(h ^ part);
    }
    ChaCha8Rng::seed_from_u64(h)
}

fn frame_rule(bundle: &PuzzleBundle, cfg: &GaConfig) -> Result<(FrameRule, (usize, usize))> {
    let n = bundle.len();
    match cfg.dims_mode {
        DimsMode::Known => {
            let dims = bundle
                .known_dims
                .or_else(|| bundle.ground_truth.as_ref().map(|g| (g.rows, g.cols)))
                .ok_or_else(|| {
                    Error::InvalidConfig("known dims requested but the bundle has none".into())
                })?;
            Ok((FrameRule::known(dims.0, dims.1), dims))
        }
        DimsMode::Unknown => Ok((FrameRule::unknown(n), most_square(n))),
    }
}

fn random_arrangement<R: Rng + ?Sized>(
    n: usize,
    dims: (usize, usize),
    pt: PuzzleType,
    rng: &mut R,
) -> Result<Arrangement> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let rots: Vec<Rotation> = match pt {
        PuzzleType::Type1 => Vec::new(),
        PuzzleType::Type2 => (0..n)
            .map(|_| Rotation::from_quarters(rng.random_range(0..4)))
            .collect(),
    };
    Arrangement::from_order(dims.0, dims.1, &order, &rots)
}

/// Cumulative roulette weights, shifted so every weight is positive.
fn roulette(pop: &[Chromosome]) -> Vec<f64> {
    let min = pop.iter().map(|c| c.fitness).fold(f64::INFINITY, f64::min);
    let mut acc = 0.0;
    pop.iter()
        .map(|c| {
            acc += c.fitness - min + 1e-9;
            acc
        })
        .collect()
}

fn spin<R: Rng + ?Sized>(cum: &[f64], rng: &mut R) -> usize {
    let total = *cum.last().expect("non-empty population");
    let x = rng.random::<f64>() * total;
    cum.partition_point(|&c| c <= x).min(cum.len() - 1)
}

struct Shared<'a> {
    pop: &'a [Chromosome],
    cum: &'a [f64],
    ranking: &'a Ranking,
    tensor: &'a CompatibilityTensor,
    cfg: &'a GaConfig,
    restart: usize,
    generation: usize,
}

fn offspring(s: &Shared, kernel: &mut Kernel, index: usize) -> (Chromosome, PhaseCounts) {
    let mut rng = stream(s.cfg.seed, s.restart, s.generation, index);
    let a = spin(s.cum, &mut rng);
    let b = spin(s.cum, &mut rng);
    let ctx = CrossoverContext::new(&s.pop[a], &s.pop[b], s.ranking, s.cfg);
    let (child, counts) = crossover(&ctx, kernel, &mut rng, None);
    let chromosome =
        Chromosome::new(child, s.tensor).expect("crossover yields complete arrangements");
    (chromosome, counts)
}

#[cfg(feature = "parallel")]
fn breed(s: &Shared, rule: &FrameRule, count: usize) -> Vec<(Chromosome, PhaseCounts)> {
    use rayon::prelude::*;
    let n = s.tensor.n();
    (0..count)
        .into_par_iter()
        .map_init(|| Kernel::new(n, rule.clone()), |k, i| offspring(s, k, i))
        .collect()
}

#[cfg(not(feature = "parallel"))]
fn breed(s: &Shared, rule: &FrameRule, count: usize) -> Vec<(Chromosome, PhaseCounts)> {
    let mut k = Kernel::new(s.tensor.n(), rule.clone());
    (0..count).map(|i| offspring(s, &mut k, i)).collect()
}

fn sort_population(pop: &mut [Chromosome]) {
    // stable, so equal fitness keeps the earlier index
    pop.sort_by(|x, y| y.fitness.total_cmp(&x.fitness));
}

struct RunResult {
    best: Chromosome,
    trace: Vec<f64>,
    counts: PhaseCounts,
}

fn run(
    bundle: &PuzzleBundle,
    t: &CompatibilityTensor,
    ranking: &Ranking,
    rule: &FrameRule,
    dims: (usize, usize),
    cfg: &GaConfig,
    restart: usize,
) -> Result<RunResult> {
    let n = bundle.len();
    let mut pop = (0..cfg.population)
        .map(|i| {
            let mut rng = stream(cfg.seed, restart, 0, i);
            Chromosome::new(random_arrangement(n, dims, t.puzzle_type(), &mut rng)?, t)
        })
        .collect::<Result<Vec<_>>>()?;
    sort_population(&mut pop);

    let mut trace = Vec::new();
    let mut counts = PhaseCounts::default();
    let mut best = pop[0].fitness;
    let mut stall = 0;
    for generation in 1..=cfg.max_generations {
        let cum = roulette(&pop);
        let shared = Shared {
            pop: &pop,
            cum: &cum,
            ranking,
            tensor: t,
            cfg,
            restart,
            generation,
        };
        let children = breed(&shared, rule, cfg.population - cfg.elitism);
        let mut next: Vec<Chromosome> = pop[..cfg.elitism].to_vec();
        for (c, k) in children {
            counts.add(&k);
            next.push(c);
        }
        sort_population(&mut next);
        pop = next;
        trace.push(pop[0].fitness);
        if pop[0].fitness > best {
            best = pop[0].fitness;
            stall = 0;
        } else {
            stall += 1;
            if stall >= cfg.stall_generations {
                break;
            }
        }
    }
    Ok(RunResult {
        best: pop.swap_remove(0),
        trace,
        counts,
    })
}

/// Runs the genetic solver `cfg.restarts` times and keeps the best run.
pub fn evolve(
    bundle: &PuzzleBundle,
    t: &CompatibilityTensor,
    cfg: &GaConfig,
) -> Result<SolverReport> {
    cfg.validate()?;
    if t.n() != bundle.len() {
        return Err(Error::ShapeMismatch(format!(
            "tensor covers {} pieces, bundle has {}",
            t.n(),
            bundle.len()
        )));
    }
    if t.puzzle_type() != bundle.puzzle_type {
        return Err(Error::ShapeMismatch(format!(
            "tensor is type {}, bundle is type {}",
            t.puzzle_type().code(),
            bundle.puzzle_type.code()
        )));
    }
    let (rule, dims) = frame_rule(bundle, cfg)?;
    let ranking = Ranking::new(t);

    let mut restart_fitness = Vec::with_capacity(cfg.restarts);
    let mut winner: Option<(usize, RunResult)> = None;
    for r in 0..cfg.restarts {
        let res = run(bundle, t, &ranking, &rule, dims, cfg, r)?;
        log::debug!(
            "restart {r}: fitness {} after {} generations",
            res.best.fitness,
            res.trace.len()
        );
        restart_fitness.push(res.best.fitness);
        if winner
            .as_ref()
            .map_or(true, |(_, w)| res.best.fitness > w.best.fitness)
        {
            winner = Some((r, res));
        }
    }
    let (best_restart, res) = winner.expect("at least one restart");
    Ok(SolverReport {
        generations: res.trace.len(),
        fitness: res.best.fitness,
        arrangement: res.best.arrangement,
        trace: res.trace,
        restart_fitness,
        best_restart,
        phase_counts: res.counts,
        config: cfg.clone(),
    })
}

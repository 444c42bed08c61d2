use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pf_core::compat::{full_tensor, oracle_tensor};
use pf_core::dataset::{
    self, cut_and_scramble, erode, load_bundle, load_image, save_bundle, shred,
};
use pf_core::ga::{DimsMode, Phase};
use pf_core::metrics::{
    self, local_fitness_grid, local_fitness_image, save_gray, score_map, EvalReport,
};
use pf_core::postprocess::postprocess;
use pf_core::{cmx, Arrangement, Edge, Error, GaConfig, MeasureKind, PuzzleType, Relation};

#[derive(Parser)]
#[command(
    name = "pf",
    version,
    about = "Scramble, score, solve and grade square-piece jigsaw puzzles"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut an image into square pieces and shuffle them into a bundle.
    Scramble(ScrambleArgs),
    /// Cut pages into vertical strips and shuffle them into one bundle.
    Shred(ShredArgs),
    /// Score every edge pair of a bundle and write a CMX file.
    Compat(CompatArgs),
    /// Reassemble a bundle with the genetic solver.
    Solve(SolveArgs),
    /// Grade a solved arrangement against the bundle's ground truth.
    Eval(EvalArgs),
    /// Write the Top-i curve of a score tensor as CSV.
    Topk(TopkArgs),
    /// Render a score matrix or a local-fitness grid as a grayscale image.
    Heatmap(HeatmapArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum TypeArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
}

impl From<TypeArg> for PuzzleType {
    fn from(t: TypeArg) -> Self {
        match t {
            TypeArg::One => PuzzleType::Type1,
            TypeArg::Two => PuzzleType::Type2,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DimsArg {
    Known,
    Unknown,
}

#[derive(Args)]
struct ScrambleArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    piece_size: usize,
    #[arg(long = "type", value_enum, default_value = "1")]
    puzzle_type: TypeArg,
    /// Zero this many boundary pixel layers on every piece.
    #[arg(long, default_value_t = 0)]
    erode: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ShredArgs {
    #[arg(long, num_args = 1.., required = true)]
    input: Vec<PathBuf>,
    #[arg(long)]
    strip_width: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct Workers {
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "PF_WORKERS")]
    workers: Option<usize>,
}

#[derive(Args)]
struct CompatArgs {
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long, value_parser = parse_measure)]
    measure: MeasureKind,
    /// Compare pixels this far in from the cut; defaults to the bundle's erosion width.
    #[arg(long)]
    skip_eroded: Option<usize>,
    /// Keep raw negated dissimilarities (no normalization or symmetrization).
    #[arg(long)]
    raw: bool,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    workers: Workers,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long)]
    scores: PathBuf,
    #[arg(long, value_enum, default_value = "known")]
    dims: DimsArg,
    #[arg(long, default_value_t = 100)]
    pop: usize,
    #[arg(long, default_value_t = 1)]
    elitism: usize,
    #[arg(long, default_value_t = 50)]
    stall: usize,
    #[arg(long, default_value_t = 1)]
    restarts: usize,
    #[arg(long, default_value_t = 0.8)]
    alpha0: f64,
    #[arg(long, default_value_t = 0.1)]
    skip_p1: f64,
    #[arg(long, default_value_t = 0.2)]
    skip_p23: f64,
    /// Comma-separated phases to switch off, e.g. `1.1,1.2`.
    #[arg(long, value_delimiter = ',', value_parser = parse_phase)]
    disable_phases: Vec<Phase>,
    #[arg(long, default_value_t = 10_000)]
    max_generations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Also write the solved image here.
    #[arg(long)]
    render: Option<PathBuf>,
    #[command(flatten)]
    workers: Workers,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    bundle: PathBuf,
    /// A solve report, or a bare arrangement JSON.
    #[arg(long)]
    arrangement: PathBuf,
    #[arg(long)]
    scores: Option<PathBuf>,
    #[arg(long, default_value_t = 32)]
    imax: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TopkArgs {
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    bundle: PathBuf,
    #[arg(long, default_value_t = 32)]
    imax: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct HeatmapArgs {
    #[arg(long)]
    scores: PathBuf,
    #[arg(long)]
    bundle: PathBuf,
    /// `right`, or `anchor:candidate` such as `top:left`.
    #[arg(long, default_value = "right", value_parser = parse_relation)]
    relation: Relation,
    /// Draw the per-cell fitness of a solved arrangement instead.
    #[arg(long, requires = "arrangement")]
    local_fitness: bool,
    #[arg(long)]
    arrangement: Option<PathBuf>,
    /// Pixels per grid cell for `--local-fitness`.
    #[arg(long, default_value_t = 16)]
    cell: usize,
    /// `.pgm` writes binary PGM, anything else PNG.
    #[arg(long)]
    out: PathBuf,
}

fn parse_measure(s: &str) -> Result<MeasureKind, String> {
    s.parse()
}

fn parse_phase(s: &str) -> Result<Phase, String> {
    s.parse()
}

fn parse_relation(s: &str) -> Result<Relation, String> {
    let edge = |x: &str| Edge::parse(x).ok_or_else(|| format!("unknown edge '{x}'"));
    match s.split_once(':') {
        Some((a, c)) => Ok(Relation::new(edge(a)?, edge(c)?)),
        None => {
            let a = edge(s)?;
            Ok(Relation::new(a, a.opposite()))
        }
    }
}

fn init_workers(w: &Workers) {
    if let Some(k) = w.workers.filter(|&k| k > 0) {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
        {
            log::warn!("could not size the worker pool: {e}");
        }
    }
}

fn write_text(path: &Path, text: &str) -> Result<(), Error> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn read_json(path: &Path) -> Result<serde_json::Value, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

/// Accepts a full solve report or just its arrangement.
fn load_arrangement(path: &Path) -> Result<Arrangement, Error> {
    let mut v = read_json(path)?;
    if let Some(a) = v.get_mut("arrangement") {
        v = a.take();
    }
    serde_json::from_value(v).map_err(|source| Error::Json {
        path: path.to_path_buf(),
        source,
    })
}

fn scramble(a: ScrambleArgs) -> Result<(), Error> {
    let img = load_image(&a.input)?;
    let s = cut_and_scramble(&img, a.piece_size, a.puzzle_type.into(), a.seed)?;
    let bundle = if a.erode > 0 {
        erode(&s.bundle, a.erode)?
    } else {
        s.bundle
    };
    let m = save_bundle(&bundle, a.seed, &s.crops, &a.out)?;
    println!(
        "{} pieces ({}x{}) -> {}",
        m.pieces.len(),
        m.rows,
        m.cols,
        a.out.display()
    );
    Ok(())
}

fn shred_cmd(a: ShredArgs) -> Result<(), Error> {
    let pages = a
        .input
        .iter()
        .map(load_image)
        .collect::<Result<Vec<_>, _>>()?;
    let s = shred(&pages, a.strip_width, a.seed)?;
    let m = save_bundle(&s.bundle, a.seed, &s.crops, &a.out)?;
    println!("{} strips -> {}", m.pieces.len(), a.out.display());
    Ok(())
}

fn compat(a: CompatArgs) -> Result<(), Error> {
    init_workers(&a.workers);
    let (bundle, _) = load_bundle(&a.bundle)?;
    let t = match a.measure {
        MeasureKind::Oracle => oracle_tensor(&bundle)?,
        kind => {
            let skip = a.skip_eroded.unwrap_or(bundle.erosion_width);
            let raw = full_tensor(kind, &bundle, skip)?;
            if a.raw {
                raw
            } else {
                postprocess(&raw)?
            }
        }
    };
    let bytes = cmx::save(&t, &a.out)?;
    println!("{} bytes -> {}", bytes, a.out.display());
    Ok(())
}

fn solve(a: SolveArgs) -> Result<(), Error> {
    init_workers(&a.workers);
    let (bundle, _) = load_bundle(&a.bundle)?;
    let t = cmx::load(&a.scores)?;
    if !(t.normalized && t.symmetric) {
        log::warn!("scores are not normalized and symmetric; fitness thresholds assume they are");
    }
    let cfg = GaConfig {
        population: a.pop,
        elitism: a.elitism,
        stall_generations: a.stall,
        alpha0: a.alpha0,
        skip_phase1_prob: a.skip_p1,
        skip_phase23_prob: a.skip_p23,
        restarts: a.restarts,
        seed: a.seed,
        dims_mode: match a.dims {
            DimsArg::Known => DimsMode::Known,
            DimsArg::Unknown => DimsMode::Unknown,
        },
        disabled_phases: a.disable_phases.into_iter().collect::<BTreeSet<_>>(),
        max_generations: a.max_generations,
    };
    let report = pf_core::evolve(&bundle, &t, &cfg)?;
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    write_text(&a.out, &(json + "\n"))?;
    if let Some(path) = &a.render {
        dataset::save_png(&dataset::render(&bundle, &report.arrangement)?, path)?;
    }
    println!(
        "fitness {} after {} generations ({}x{}) -> {}",
        report.fitness,
        report.generations,
        report.arrangement.rows(),
        report.arrangement.cols(),
        a.out.display()
    );
    Ok(())
}

fn eval(a: EvalArgs) -> Result<(), Error> {
    let (bundle, _) = load_bundle(&a.bundle)?;
    let arrangement = load_arrangement(&a.arrangement)?;
    let t = a.scores.as_deref().map(cmx::load).transpose()?;
    let report = EvalReport::evaluate(
        &arrangement,
        bundle.ground_truth()?,
        bundle.puzzle_type,
        t.as_ref(),
        a.imax,
    )?;
    write_text(&a.out, &(report.to_json() + "\n"))?;
    print!("{}", report.to_text());
    Ok(())
}

fn topk(a: TopkArgs) -> Result<(), Error> {
    let (bundle, _) = load_bundle(&a.bundle)?;
    let t = cmx::load(&a.scores)?;
    let top = metrics::top_i(&t, bundle.ground_truth()?, a.imax)?;
    let mut csv = String::from("i,top_i\n");
    for (i, v) in top.iter().enumerate() {
        csv += &format!("{},{}\n", i + 1, v);
    }
    write_text(&a.out, &csv)?;
    println!("Top-1 {}", top.first().copied().unwrap_or(0.0));
    Ok(())
}

fn heatmap(a: HeatmapArgs) -> Result<(), Error> {
    let (bundle, _) = load_bundle(&a.bundle)?;
    let t = cmx::load(&a.scores)?;
    let img = match (&a.arrangement, a.local_fitness) {
        (Some(path), true) => {
            let arrangement = load_arrangement(path)?;
            local_fitness_image(&local_fitness_grid(&arrangement, &t)?, a.cell.max(1))
        }
        _ => score_map(&t, bundle.ground_truth()?, a.relation)?,
    };
    save_gray(&img, &a.out)?;
    println!("{}x{} -> {}", img.width, img.height, a.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Scramble(a) => scramble(a),
        Command::Shred(a) => shred_cmd(a),
        Command::Compat(a) => compat(a),
        Command::Solve(a) => solve(a),
        Command::Eval(a) => eval(a),
        Command::Topk(a) => topk(a),
        Command::Heatmap(a) => heatmap(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("pf: {e}");
            ExitCode::from(if e.is_io() { 4 } else { 3 })
        }
    }
}

//! Command-line front end: instance files, generation, decisions,
//! cross-verification against the brute-force oracle, shattering searches
//! and CSV benchmarks.
//!
//! Every subcommand is reachable through [`run_command`], which returns the
//! exit status together with the captured output so it can be tested
//! without spawning processes.

pub mod instance;

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use geodiam_core::generators::{
    gen_fat_triangles, gen_h6_triangles, gen_k4_segments, gen_ov_strings, gen_three_slope_segments, ChainCoords,
    Expected, FourPartiteGraph, GeneratedInstance, OvInstance, Question, SixPartiteHypergraph,
};
use geodiam_core::oracle::{build_graph_all_pairs, diameter_at_most};
use geodiam_core::segments::{segment_diam_at_most_with, ColorSequence};
use geodiam_core::shatter::{neighborhood_system, rainbow_system, search_shattered_seeded};
use geodiam_core::unit_disk::{decide_diam2_with, UnitDiskConfig, UnitDiskStats};
use geodiam_core::unit_square::{unit_square_diam_at_most_with, UnitSquareConfig, UnitSquareStats};
use geodiam_core::{build_graph, exact_diameter, random, DiameterValue, GeoError, Point, PredicateConfig, Shape, SlopeTable};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub use instance::{parse_instance, serialize_instance, InstanceFile, Kind};

/// Exit status for a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status for runtime failures and verification disagreements.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for usage errors.
pub const EXIT_USAGE: i32 = 2;

/// Fixed CSV header of `bench`.
pub const CSV_HEADER: &str = "algorithm,n,delta,seed,answer,nanos";

/// Result of one invocation.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Outcome {
    /// Process exit status.
    pub code: i32,
    /// Text for standard output.
    pub stdout: String,
    /// Text for standard error.
    pub stderr: String,
}

/// Decision algorithms addressable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Algorithm {
    /// Explicit graph plus BFS from every vertex (any kind).
    Oracle,
    /// Diameter-2 decision for unit disks.
    Unitdisk2,
    /// Diameter-Δ decision for unit squares.
    Unitsquare,
    /// Diameter-Δ decision for segments with few slopes.
    Segments,
}

impl Algorithm {
    fn id(self) -> &'static str {
        match self {
            Algorithm::Oracle => "oracle",
            Algorithm::Unitdisk2 => "unitdisk2",
            Algorithm::Unitsquare => "unitsquare",
            Algorithm::Segments => "segments",
        }
    }

    /// Instance kind used for random instances.
    fn default_kind(self) -> Kind {
        match self {
            Algorithm::Oracle | Algorithm::Unitdisk2 => Kind::UnitDisks,
            Algorithm::Unitsquare => Kind::UnitSquares,
            Algorithm::Segments => Kind::Segments,
        }
    }

    /// Checks that the algorithm accepts `kind` and `delta`.
    fn check(self, kind: Kind, delta: u32) -> Result<(), CliError> {
        let ok = match self {
            Algorithm::Oracle => true,
            Algorithm::Unitdisk2 => kind == Kind::UnitDisks,
            Algorithm::Unitsquare => kind == Kind::UnitSquares,
            Algorithm::Segments => kind == Kind::Segments,
        };
        if !ok {
            return Err(CliError::Usage(format!(
                "algorithm `{}` does not accept kind `{}`",
                self.id(),
                kind.name()
            )));
        }
        if self == Algorithm::Unitdisk2 && delta != 2 {
            return Err(CliError::Usage(format!("algorithm `unitdisk2` only decides delta = 2, got {delta}")));
        }
        Ok(())
    }
}

/// Instance families `gen` can produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum GenKind {
    /// Random unit disks in a square box.
    UnitDisks,
    /// Random unit squares in a square box.
    UnitSquares,
    /// Random half-grid segments with the first `h` default slopes.
    Segments,
    /// Random horizontal and vertical segments in general position.
    BipartiteSegments,
    /// Chains from a random orthogonal-vectors instance (clique question).
    OvStrings,
    /// Segments from a random 4-partite graph (diameter-2 question).
    K4Segments,
    /// Triangles from a random 6-partite 3-uniform hypergraph.
    H6Triangles,
    /// Fat-triangle variant (not generated).
    FatTriangles,
    /// Three-slope segment variant (not generated).
    ThreeSlopeSegments,
}

/// Set systems `shatter` can search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SystemKind {
    /// Closed balls of every radius.
    Neighborhood,
    /// Rainbow balls for a color sequence.
    Rainbow,
}

#[derive(Parser, Debug)]
#[command(name = "geodiam", version, about = "Diameter decisions for geometric intersection graphs")]
struct Cli {
    /// Predicate tolerance (overrides the default 1e-9).
    #[arg(long, global = true, env = "GEODIAM_EPS")]
    eps: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a generated instance file.
    Gen {
        /// Instance family.
        #[arg(long, value_enum)]
        kind: GenKind,
        /// Number of shapes (random families) or vectors per side (ov_strings).
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Random seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Side of the sampling box (random families).
        #[arg(long)]
        side: Option<f64>,
        /// Number of slopes for `segments`.
        #[arg(long, default_value_t = 2)]
        h: usize,
        /// Part size of the combinatorial input (k4_segments, h6_triangles).
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Vector dimension (ov_strings).
        #[arg(long, default_value_t = 3)]
        d: usize,
        /// Edge probability of the combinatorial input.
        #[arg(long)]
        p: Option<f64>,
        /// Spacing parameter of k4_segments.
        #[arg(long, default_value_t = 2.0)]
        tau: f64,
        /// Output file (standard output when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether the diameter is at most `--delta`.
    Diam {
        /// Algorithm.
        #[arg(long, value_enum, default_value = "oracle")]
        alg: Algorithm,
        /// Diameter bound.
        #[arg(long, default_value_t = 2)]
        delta: u32,
        /// Instance file.
        file: PathBuf,
    },
    /// Compare an algorithm with the oracle on a file or on random seeds.
    Verify {
        /// Algorithm.
        #[arg(long, value_enum)]
        alg: Algorithm,
        /// Diameter bound.
        #[arg(long, default_value_t = 2)]
        delta: u32,
        /// Kind of random instances (defaults to the algorithm's kind).
        #[arg(long, value_enum)]
        kind: Option<GenKind>,
        /// First seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of consecutive seeds.
        #[arg(long, default_value_t = 50)]
        runs: u64,
        /// Largest instance size; each run draws n from [1, n].
        #[arg(long, default_value_t = 80)]
        n: usize,
        /// Side of the sampling box.
        #[arg(long)]
        side: Option<f64>,
        /// Directory for replay bundles.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Instance file to verify instead of random seeds.
        file: Option<PathBuf>,
    },
    /// Search for a large shattered set in a ball system of an instance.
    Shatter {
        /// Set system.
        #[arg(long, value_enum, default_value = "neighborhood")]
        system: SystemKind,
        /// Color sequence for rainbow balls, e.g. `1,2,1`.
        #[arg(long, value_delimiter = ',')]
        seq: Vec<u32>,
        /// Largest witness size searched for.
        #[arg(long, default_value_t = 5)]
        k: usize,
        /// Extension-check budget.
        #[arg(long, default_value_t = 1_000_000)]
        budget: u64,
        /// Seed of the randomized phase.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Instance file.
        file: PathBuf,
    },
    /// Time an algorithm on random instances and write CSV rows.
    Bench {
        /// Algorithm.
        #[arg(long, value_enum)]
        alg: Algorithm,
        /// Instance sizes.
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        /// Diameter bound.
        #[arg(long, default_value_t = 2)]
        delta: u32,
        /// Kind of random instances (defaults to the algorithm's kind).
        #[arg(long, value_enum)]
        kind: Option<GenKind>,
        /// Seed; size i uses seed + i.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Side of the sampling box.
        #[arg(long)]
        side: Option<f64>,
        /// CSV file to append to (standard output when absent).
        #[arg(long)]
        csv: Option<PathBuf>,
    },
}

/// Internal error: usage errors exit with 2, everything else with 1.
#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(anyhow::Error),
}

impl From<GeoError> for CliError {
    fn from(e: GeoError) -> Self {
        match e {
            GeoError::UnsupportedConstruction(_) => CliError::Usage(e.to_string()),
            e => CliError::Failure(e.into()),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failure(e.into())
    }
}

struct Ctx {
    cfg: PredicateConfig,
    out: String,
    code: i32,
}

/// Runs one command line (`argv[0]` is the program name).
pub fn run_command<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            let code = e.exit_code();
            return if code == 0 {
                Outcome { code, stdout: text, stderr: String::new() }
            } else {
                Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: text }
            };
        }
    };
    let cfg = match cli.eps {
        None => Ok(PredicateConfig::default()),
        Some(eps) => PredicateConfig::new(eps, PredicateConfig::default().perturbation_seed),
    };
    let cfg = match cfg {
        Ok(c) => c,
        Err(e) => {
            return Outcome { code: EXIT_USAGE, stdout: String::new(), stderr: format!("error: invalid epsilon: {e}\n") };
        }
    };
    let mut ctx = Ctx { cfg, out: String::new(), code: EXIT_OK };
    let result = match cli.command {
        Command::Gen { kind, n, seed, side, h, k, d, p, tau, out } => {
            cmd_gen(&mut ctx, kind, n, seed, side, h, k, d, p, tau, out.as_deref())
        }
        Command::Diam { alg, delta, file } => cmd_diam(&mut ctx, alg, delta, &file),
        Command::Verify { alg, delta, kind, seed, runs, n, side, out_dir, file } => {
            cmd_verify(&mut ctx, alg, delta, kind, seed, runs, n, side, &out_dir, file.as_deref())
        }
        Command::Shatter { system, seq, k, budget, seed, file } => cmd_shatter(&mut ctx, system, &seq, k, budget, seed, &file),
        Command::Bench { alg, sizes, delta, kind, seed, side, csv } => {
            cmd_bench(&mut ctx, alg, &sizes, delta, kind, seed, side, csv.as_deref())
        }
    };
    match result {
        Ok(()) => Outcome { code: ctx.code, stdout: ctx.out, stderr: String::new() },
        Err(CliError::Usage(m)) => Outcome { code: EXIT_USAGE, stdout: ctx.out, stderr: format!("usage error: {m}\n") },
        Err(CliError::Failure(e)) => Outcome { code: EXIT_FAILURE, stdout: ctx.out, stderr: format!("error: {e:#}\n") },
    }
}

fn read_instance(path: &Path) -> Result<InstanceFile, CliError> {
    let bytes = std::fs::read(path).map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    parse_instance(&bytes).map_err(|e| CliError::Failure(anyhow::anyhow!("{}: {e}", path.display())))
}

fn centers(shapes: &[Shape]) -> Vec<Point> {
    shapes.iter().map(|s| s.points()[0]).collect()
}

/// Runs `alg` on an instance whose kind was already checked.
fn decide(alg: Algorithm, inst: &InstanceFile, delta: u32, cfg: &PredicateConfig) -> Result<bool, GeoError> {
    match alg {
        Algorithm::Oracle => Ok(diameter_at_most(&build_graph(&inst.shapes, cfg)?, delta)),
        Algorithm::Unitdisk2 => {
            let dcfg = UnitDiskConfig { predicate: *cfg, ..UnitDiskConfig::default() };
            decide_diam2_with(&centers(&inst.shapes), &dcfg, &mut UnitDiskStats::default())
        }
        Algorithm::Unitsquare => unit_square_diam_at_most_with(
            &centers(&inst.shapes),
            delta as usize,
            &UnitSquareConfig::default(),
            &mut UnitSquareStats::default(),
        ),
        Algorithm::Segments => Ok(segment_diam_at_most_with(&inst.shapes, delta, &inst.table(), cfg)?.answer),
    }
}

/// The reference answer: all-pairs graph plus BFS.
fn oracle_answer(inst: &InstanceFile, delta: u32, cfg: &PredicateConfig) -> Result<bool, GeoError> {
    Ok(diameter_at_most(&build_graph_all_pairs(&inst.shapes, cfg)?, delta))
}

fn default_side(kind: GenKind) -> f64 {
    match kind {
        GenKind::UnitDisks | GenKind::UnitSquares => 3.0,
        GenKind::Segments => 4.0,
        _ => 10.0,
    }
}

fn from_generated(g: GeneratedInstance, generator: String) -> Result<InstanceFile, CliError> {
    let kind = g.shapes.first().map(Kind::of).ok_or_else(|| anyhow::anyhow!("generator produced no shapes"))?;
    Ok(InstanceFile {
        kind,
        shapes: g.shapes,
        slope_table: g.slope_table,
        expected: Some(g.expected),
        seed: None,
        generator: Some(generator),
    })
}

/// Builds the instance of family `kind` for `seed`.
#[allow(clippy::too_many_arguments)]
fn generate(kind: GenKind, n: usize, seed: u64, side: Option<f64>, h: usize, k: usize, d: usize, p: Option<f64>, tau: f64) -> Result<InstanceFile, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let side = side.unwrap_or_else(|| default_side(kind));
    if !(side.is_finite() && side > 0.0) {
        return Err(CliError::Usage(format!("--side must be positive, got {side}")));
    }
    let needs_shapes = matches!(kind, GenKind::UnitDisks | GenKind::UnitSquares | GenKind::Segments | GenKind::BipartiteSegments);
    if needs_shapes && n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let mut inst = match kind {
        GenKind::UnitDisks => InstanceFile {
            generator: Some(format!("unit_disks n={n} side={side}")),
            ..InstanceFile::new(Kind::UnitDisks, random::unit_disks(n, side, &mut rng))
        },
        GenKind::UnitSquares => InstanceFile {
            generator: Some(format!("unit_squares n={n} side={side}")),
            ..InstanceFile::new(Kind::UnitSquares, random::unit_squares(n, side, &mut rng))
        },
        GenKind::Segments => {
            if !(1..=3).contains(&h) {
                return Err(CliError::Usage(format!("--h must be in 1..=3, got {h}")));
            }
            InstanceFile {
                slope_table: Some(SlopeTable::first(h)?),
                generator: Some(format!("segments n={n} h={h} side={side}")),
                ..InstanceFile::new(Kind::Segments, random::grid_segments(n, h, side, &mut rng))
            }
        }
        GenKind::BipartiteSegments => InstanceFile {
            slope_table: Some(SlopeTable::first(2)?),
            generator: Some(format!("bipartite_segments n={n} side={side}")),
            ..InstanceFile::new(Kind::Segments, random::bipartite_segments(n, side, 0.5, side / 2.0, &mut rng))
        },
        GenKind::OvStrings => {
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            let ov = OvInstance::random(d, n, n, &mut rng);
            from_generated(gen_ov_strings(&ov)?, format!("ov_strings d={d} n={n}"))?
        }
        GenKind::K4Segments => {
            let p = p.unwrap_or(0.75);
            let g = FourPartiteGraph::random(k, p, &mut rng)?;
            from_generated(gen_k4_segments(&g, tau)?, format!("k4_segments k={k} p={p} tau={tau}"))?
        }
        GenKind::H6Triangles => {
            let p = p.unwrap_or(0.9);
            let g = SixPartiteHypergraph::random(k, p, &mut rng)?;
            from_generated(gen_h6_triangles(&g, &ChainCoords::default())?, format!("h6_triangles k={k} p={p}"))?
        }
        GenKind::FatTriangles => {
            let g = SixPartiteHypergraph::random(k, p.unwrap_or(0.9), &mut rng)?;
            from_generated(gen_fat_triangles(&g)?, String::new())?
        }
        GenKind::ThreeSlopeSegments => from_generated(gen_three_slope_segments()?, String::new())?,
    };
    inst.seed = Some(seed);
    Ok(inst)
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(
    ctx: &mut Ctx,
    kind: GenKind,
    n: usize,
    seed: u64,
    side: Option<f64>,
    h: usize,
    k: usize,
    d: usize,
    p: Option<f64>,
    tau: f64,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let inst = generate(kind, n, seed, side, h, k, d, p, tau)?;
    let bytes = serialize_instance(&inst)?;
    match out {
        Some(path) => {
            std::fs::write(path, &bytes).map_err(|e| anyhow::anyhow!("cannot write {}: {e}", path.display()))?;
            let _ = writeln!(ctx.out, "wrote {} {} to {}", inst.shapes.len(), inst.kind.name(), path.display());
        }
        None => ctx.out.push_str(std::str::from_utf8(&bytes).expect("serializer emits UTF-8")),
    }
    Ok(())
}

fn cmd_diam(ctx: &mut Ctx, alg: Algorithm, delta: u32, file: &Path) -> Result<(), CliError> {
    let inst = read_instance(file)?;
    alg.check(inst.kind, delta)?;
    let answer = decide(alg, &inst, delta, &ctx.cfg)?;
    let _ = writeln!(ctx.out, "{answer}");
    let _ = writeln!(ctx.out, "algorithm={} n={} delta={delta}", alg.id(), inst.shapes.len());
    if alg == Algorithm::Oracle {
        let value = match exact_diameter(&build_graph(&inst.shapes, &ctx.cfg)?).value {
            DiameterValue::Finite(d) => d.to_string(),
            DiameterValue::Infinite => "infinite".into(),
        };
        let _ = writeln!(ctx.out, "diameter={value}");
    }
    if let Some(e) = inst.expected {
        if e.question.delta() == delta {
            let _ = writeln!(ctx.out, "expected={}", e.answer);
        }
    }
    Ok(())
}

/// Writes a replay bundle and returns its path.
fn write_bundle(dir: &Path, alg: Algorithm, delta: u32, inst: &InstanceFile, tag: &str) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)?;
    let path = dir.join(format!("verify-{}-delta{delta}-{tag}.jsonl", alg.id()));
    std::fs::write(&path, serialize_instance(inst)?)?;
    Ok(path)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    ctx: &mut Ctx,
    alg: Algorithm,
    delta: u32,
    kind: Option<GenKind>,
    seed: u64,
    runs: u64,
    n: usize,
    side: Option<f64>,
    out_dir: &Path,
    file: Option<&Path>,
) -> Result<(), CliError> {
    let mut cases = Vec::new();
    match file {
        Some(path) => {
            let inst = read_instance(path)?;
            alg.check(inst.kind, delta)?;
            let tag = inst.seed.map_or_else(|| "file".to_string(), |s| format!("seed{s}"));
            cases.push((tag, inst));
        }
        None => {
            let gk = kind.unwrap_or(match alg.default_kind() {
                Kind::UnitSquares => GenKind::UnitSquares,
                Kind::Segments => GenKind::Segments,
                _ => GenKind::UnitDisks,
            });
            if n == 0 {
                return Err(CliError::Usage("--n must be at least 1".into()));
            }
            for s in seed..seed.saturating_add(runs) {
                let size = ChaCha8Rng::seed_from_u64(s ^ 0x5eed).gen_range(1..=n);
                let inst = generate(gk, size, s, side, 3, 1, 3, None, 2.0)?;
                alg.check(inst.kind, delta)?;
                cases.push((format!("seed{s}"), inst));
            }
        }
    }
    let (mut agree, mut bad) = (0usize, 0usize);
    for (tag, inst) in &cases {
        let got = decide(alg, inst, delta, &ctx.cfg);
        let want = oracle_answer(inst, delta, &ctx.cfg)?;
        let expected_ok = inst
            .expected
            .filter(|e| e.question.delta() == delta)
            .is_none_or(|e| e.answer == want);
        match got {
            Ok(got) if got == want && expected_ok => agree += 1,
            other => {
                bad += 1;
                let mut replay = inst.clone();
                replay.expected = Some(Expected { question: Question::DiameterAtMost(delta), answer: want });
                let path = write_bundle(out_dir, alg, delta, &replay, tag)?;
                let got = match other {
                    Ok(b) => b.to_string(),
                    Err(e) => format!("error ({e})"),
                };
                let _ = writeln!(
                    ctx.out,
                    "disagreement {tag}: {} answered {got}, oracle {want}; replay bundle {}",
                    alg.id(),
                    path.display()
                );
            }
        }
    }
    let _ = writeln!(ctx.out, "{} algorithm={} delta={delta} runs={} agree={agree} disagree={bad}", if bad == 0 { "ok" } else { "FAILED" }, alg.id(), cases.len());
    if bad > 0 {
        ctx.code = EXIT_FAILURE;
    }
    Ok(())
}

fn cmd_shatter(ctx: &mut Ctx, system: SystemKind, seq: &[u32], k: usize, budget: u64, seed: u64, file: &Path) -> Result<(), CliError> {
    let inst = read_instance(file)?;
    let g = build_graph(&inst.shapes, &ctx.cfg)?;
    let sys = match system {
        SystemKind::Neighborhood => neighborhood_system(&g)?,
        SystemKind::Rainbow => {
            if inst.kind != Kind::Segments {
                return Err(CliError::Usage("rainbow systems need a segments instance".into()));
            }
            if seq.is_empty() {
                return Err(CliError::Usage("rainbow systems need --seq".into()));
            }
            let s = ColorSequence::new(seq.to_vec(), inst.table().len()).map_err(|e| CliError::Usage(e.to_string()))?;
            rainbow_system(&g, &s)?
        }
    };
    let r = search_shattered_seeded(&sys, k, budget, seed)?;
    let witness: Vec<String> = r.max_witness.iter().map(usize::to_string).collect();
    let _ = writeln!(ctx.out, "{}", r.size);
    let _ = writeln!(ctx.out, "witness={}", witness.join(","));
    let _ = writeln!(ctx.out, "exhaustive={}", r.exhaustive);
    let _ = writeln!(ctx.out, "checks={}", r.checks);
    let _ = writeln!(ctx.out, "seed={}", r.seed);
    let _ = writeln!(ctx.out, "members={} ground={}", sys.len(), sys.ground_size());
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_bench(
    ctx: &mut Ctx,
    alg: Algorithm,
    sizes: &[usize],
    delta: u32,
    kind: Option<GenKind>,
    seed: u64,
    side: Option<f64>,
    csv: Option<&Path>,
) -> Result<(), CliError> {
    let gk = kind.unwrap_or(match alg {
        Algorithm::Unitsquare => GenKind::UnitSquares,
        Algorithm::Segments => GenKind::Segments,
        _ => GenKind::UnitDisks,
    });
    let mut rows = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let s = seed.wrapping_add(i as u64);
        let inst = generate(gk, n, s, side, 3, 1, 3, None, 2.0)?;
        alg.check(inst.kind, delta)?;
        let start = Instant::now();
        let answer = decide(alg, &inst, delta, &ctx.cfg)?;
        let nanos = start.elapsed().as_nanos();
        rows.push(format!("{},{n},{delta},{s},{answer},{nanos}", alg.id()));
    }
    match csv {
        Some(path) => {
            let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
            let mut f = std::fs::OpenOptions::new().create(true).append(true).open(path)?;
            let mut text = String::new();
            if fresh {
                text.push_str(CSV_HEADER);
                text.push('\n');
            }
            for r in &rows {
                text.push_str(r);
                text.push('\n');
            }
            f.write_all(text.as_bytes())?;
            let _ = writeln!(ctx.out, "appended {} rows to {}", rows.len(), path.display());
        }
        None => {
            let _ = writeln!(ctx.out, "{CSV_HEADER}");
            for r in &rows {
                let _ = writeln!(ctx.out, "{r}");
            }
        }
    }
    Ok(())
}

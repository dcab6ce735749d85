//! Command-line front end: mine patterns, mine rules, generate datasets,
//! spot-check against the brute-force oracle, and benchmark.
//!
//! Exit codes: 0 on success, 2 on usage errors (flag parsing/validation),
//! 1 on data errors. Progress and counts go to stderr, results to the
//! requested output file or stdout.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use rankmine::datagen::{extend_rankings, gen_basic, gen_increasing_frequent, inflate, GenSpec};
use rankmine::gpminer::{mine_closed_parallel, post_tesma_parallel};
use rankmine::io::{
    parse_order_list, parse_rank_matrix, write_patterns, write_rank_matrix,
};
use rankmine::oracle::{brute_closed, brute_frequent, count_all_rankings, OracleLimits};
use rankmine::rules::{mine_rules, write_rules, RuleConfig};
use rankmine::tesma::{extract_maximal, mine_frequent_parallel};
use rankmine::{MiningConfig, PatternStore, RankDatabase, Threshold};

#[derive(Parser)]
#[command(name = "rankmine", version, about = "Mine frequent and closed subranking patterns and preference rules from rank data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Mine frequent, closed, or maximal subranking patterns.
    Mine(MineArgs),
    /// Mine preference association rules from the frequent patterns.
    Rules(RulesArgs),
    /// Generate synthetic and semi-synthetic datasets.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Brute-force reference computations for spot checks (small inputs).
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Repeated timing runs of a mining configuration.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// Sniff the format: lines with `>` are order lists, otherwise matrix.
    Auto,
    Matrix,
    Orders,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Frequent,
    Closed,
    /// Closed patterns via frequent mining plus a bottom-up sweep.
    ClosedPost,
    Maximal,
}

/// `0.05` is a relative threshold, `abs:3` an absolute count.
fn parse_threshold(s: &str) -> Result<Threshold, String> {
    if let Some(raw) = s.strip_prefix("abs:") {
        let c: usize = raw.parse().map_err(|_| format!("invalid count `{raw}`"))?;
        if c < 1 {
            return Err("absolute threshold must be at least 1".into());
        }
        Ok(Threshold::Absolute(c))
    } else {
        let f: f64 = s.parse().map_err(|_| format!("invalid fraction `{s}`"))?;
        if !(f > 0.0 && f <= 1.0) {
            return Err(format!("relative threshold must be in (0, 1], got {f}"));
        }
        Ok(Threshold::Relative(f))
    }
}

fn parse_probability(s: &str) -> Result<f64, String> {
    let p: f64 = s.parse().map_err(|_| format!("invalid probability `{s}`"))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(format!("probability must be in [0, 1], got {p}"));
    }
    Ok(p)
}

#[derive(Args)]
struct InputArgs {
    /// Input database file.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Auto)]
    format: Format,
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Support threshold: a fraction like 0.05, or abs:N for a count.
    #[arg(long, value_parser = parse_threshold)]
    min_support: Threshold,
    #[arg(long, value_enum, default_value_t = Mode::Frequent)]
    mode: Mode,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker count for root-pair parallelism (default 1, or RANKMINE_THREADS).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct RulesArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Support threshold for both rule sides.
    #[arg(long, value_parser = parse_threshold)]
    min_support: Threshold,
    #[arg(long, default_value_t = 0.5)]
    min_conf: f64,
    #[arg(long, default_value_t = -1.0, allow_negative_numbers = true)]
    min_interest: f64,
    /// Skip candidate pairs with more combined items than this.
    #[arg(long, default_value_t = 8)]
    max_items: usize,
    /// Optional floor on the combined absolute support of a rule.
    #[arg(long)]
    min_rule_support: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Worker count for the frequent-mining phase.
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Replicated noisy core rankings.
    Basic(GenBasicArgs),
    /// Series of datasets with 1, 2, ... frequent patterns each.
    Increasing(GenIncreasingArgs),
    /// Copy a dataset several times with swap noise.
    Inflate(InflateArgs),
    /// Grow every ranking by one fresh item anchored on a 2-pattern.
    Extend(ExtendArgs),
}

#[derive(Args)]
struct GenBasicArgs {
    /// Dataset size N.
    #[arg(long)]
    size: usize,
    /// Ranking length K.
    #[arg(long)]
    k: usize,
    /// Number of random core rankings.
    #[arg(long, default_value_t = 4)]
    cores: usize,
    /// Adjacent-pair swap probability.
    #[arg(long, value_parser = parse_probability, default_value_t = 0.1)]
    swap_prob: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GenIncreasingArgs {
    #[arg(long)]
    size: usize,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value_t = 4)]
    cores: usize,
    #[arg(long, value_parser = parse_probability, default_value_t = 0.1)]
    swap_prob: f64,
    /// Threshold for mining the basic dataset's patterns.
    #[arg(long, value_parser = parse_threshold)]
    min_support: Threshold,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Directory for the generated D_0001.tsv, D_0002.tsv, ...
    #[arg(long)]
    out_dir: PathBuf,
    /// Stop after this many datasets.
    #[arg(long)]
    max_datasets: Option<usize>,
}

#[derive(Args)]
struct InflateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    factor: usize,
    #[arg(long, value_parser = parse_probability, default_value_t = 0.01)]
    swap_prob: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExtendArgs {
    #[command(flatten)]
    input: InputArgs,
    /// First item of the anchor pair, by name.
    #[arg(long)]
    first: String,
    /// Second item of the anchor pair, by name.
    #[arg(long)]
    second: String,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Brute-force frequent patterns.
    Frequent(OracleMineArgs),
    /// Brute-force closed patterns.
    Closed(OracleMineArgs),
    /// Number of complete and incomplete rankings of K items.
    Count {
        #[arg(long)]
        k: usize,
    },
}

#[derive(Args)]
struct OracleMineArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_parser = parse_threshold)]
    min_support: Threshold,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, value_parser = parse_threshold)]
    min_support: Threshold,
    #[arg(long, value_enum, default_value_t = Mode::Frequent)]
    mode: Mode,
    /// Total repetitions; the first three are discarded as warm-up when
    /// more than three runs are requested.
    #[arg(long, default_value_t = 11)]
    reps: usize,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Mine(args) => cmd_mine(args),
        Command::Rules(args) => cmd_rules(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Oracle(args) => cmd_oracle(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn load_db(args: &InputArgs) -> Result<RankDatabase> {
    let text = std::fs::read_to_string(&args.input)
        .with_context(|| format!("cannot read {}", args.input.display()))?;
    let format = match args.format {
        Format::Auto => {
            let orders = text
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty() && !l.starts_with('#'))
                .is_some_and(|l| l.contains('>'));
            if orders {
                Format::Orders
            } else {
                Format::Matrix
            }
        }
        f => f,
    };
    let db = match format {
        Format::Matrix => parse_rank_matrix(&text, None)?,
        Format::Orders => parse_order_list(&text, None)?,
        Format::Auto => unreachable!(),
    };
    Ok(db)
}

fn write_output(path: &Option<PathBuf>, content: &str) -> Result<()> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            std::fs::write(p, content).with_context(|| format!("cannot write {}", p.display()))?;
        }
        None => print!("{content}"),
    }
    Ok(())
}

fn resolve_threads(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var("RANKMINE_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(1)
    .max(1)
}

fn mine_with_mode(db: &RankDatabase, cfg: &MiningConfig, mode: Mode, threads: usize) -> PatternStore {
    match mode {
        Mode::Frequent => mine_frequent_parallel(db, cfg, threads),
        Mode::Closed => mine_closed_parallel(db, cfg, threads),
        Mode::ClosedPost => post_tesma_parallel(db, cfg, threads),
        Mode::Maximal => extract_maximal(&mine_frequent_parallel(db, cfg, threads)),
    }
}

fn cmd_mine(args: MineArgs) -> Result<()> {
    let db = load_db(&args.input)?;
    let cfg = MiningConfig {
        threshold: args.min_support,
    };
    let threads = resolve_threads(args.threads);
    eprintln!(
        "mining: N={} K={} delta={} threads={threads}",
        db.n(),
        db.k(),
        cfg.delta_for(db.n())
    );
    let started = Instant::now();
    let store = mine_with_mode(&db, &cfg, args.mode, threads);
    let elapsed = started.elapsed();
    eprintln!("patterns: {} in {:.3}s", store.total(), elapsed.as_secs_f64());
    write_output(&args.output, &write_patterns(db.universe(), &store, db.n()))
}

fn cmd_rules(args: RulesArgs) -> Result<()> {
    let db = load_db(&args.input)?;
    let cfg = MiningConfig {
        threshold: args.min_support,
    };
    let started = Instant::now();
    let store = mine_frequent_parallel(&db, &cfg, resolve_threads(args.threads));
    let rule_cfg = RuleConfig {
        min_confidence: args.min_conf,
        min_interest: args.min_interest,
        max_combined_items: args.max_items,
        min_combo_support: args.min_rule_support,
    };
    let rules = mine_rules(&db, &store, &rule_cfg);
    let elapsed = started.elapsed();
    eprintln!(
        "patterns: {}, rules: {} in {:.3}s",
        store.total(),
        rules.len(),
        elapsed.as_secs_f64()
    );
    write_output(&args.output, &write_rules(db.universe(), &rules))
}

fn cmd_gen(command: GenCommand) -> Result<()> {
    match command {
        GenCommand::Basic(args) => {
            let spec = GenSpec {
                n_rows: args.size,
                k: args.k,
                cores: args.cores,
                swap_prob: args.swap_prob,
                threshold: Threshold::Relative(0.01),
                seed: args.seed,
            };
            let db = gen_basic(&spec)?;
            eprintln!("generated: N={} K={}", db.n(), db.k());
            write_output(&args.output, &write_rank_matrix(&db))
        }
        GenCommand::Increasing(args) => {
            let spec = GenSpec {
                n_rows: args.size,
                k: args.k,
                cores: args.cores,
                swap_prob: args.swap_prob,
                threshold: args.min_support,
                seed: args.seed,
            };
            let series = gen_increasing_frequent(&spec, args.max_datasets)?;
            std::fs::create_dir_all(&args.out_dir)?;
            for (i, db) in series.iter().enumerate() {
                let path = args.out_dir.join(format!("D_{:04}.tsv", i + 1));
                std::fs::write(&path, write_rank_matrix(db))
                    .with_context(|| format!("cannot write {}", path.display()))?;
            }
            eprintln!("generated {} datasets in {}", series.len(), args.out_dir.display());
            Ok(())
        }
        GenCommand::Inflate(args) => {
            let db = load_db(&args.input)?;
            let out = inflate(&db, args.factor, args.swap_prob, args.seed)?;
            eprintln!("inflated: N={} -> N={}", db.n(), out.n());
            write_output(&args.output, &write_rank_matrix(&out))
        }
        GenCommand::Extend(args) => {
            let db = load_db(&args.input)?;
            let first = db
                .universe()
                .index_of(&args.first)
                .with_context(|| format!("unknown item `{}`", args.first))?;
            let second = db
                .universe()
                .index_of(&args.second)
                .with_context(|| format!("unknown item `{}`", args.second))?;
            let out = extend_rankings(&db, (first, second), args.seed)?;
            eprintln!("extended: K={} -> K={}", db.k(), out.k());
            write_output(&args.output, &write_rank_matrix(&out))
        }
    }
}

fn cmd_oracle(command: OracleCommand) -> Result<()> {
    let limits = OracleLimits::default();
    match command {
        OracleCommand::Frequent(args) => oracle_mine(args, true, &limits),
        OracleCommand::Closed(args) => oracle_mine(args, false, &limits),
        OracleCommand::Count { k } => {
            println!("{}", count_all_rankings(k)?);
            Ok(())
        }
    }
}

fn oracle_mine(args: OracleMineArgs, frequent: bool, limits: &OracleLimits) -> Result<()> {
    let db = load_db(&args.input)?;
    let cfg = MiningConfig {
        threshold: args.min_support,
    };
    let delta = cfg.delta_for(db.n());
    let result = if frequent {
        brute_frequent(&db, delta, limits)?
    } else {
        brute_closed(&db, delta, limits)?
    };
    let mut store = PatternStore::new();
    for (r, s) in result {
        store.push(r, s);
    }
    eprintln!("patterns: {}", store.total());
    write_output(&args.output, &write_patterns(db.universe(), &store, db.n()))
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    if args.reps < 1 {
        bail!("need at least one repetition");
    }
    let db = load_db(&args.input)?;
    let cfg = MiningConfig {
        threshold: args.min_support,
    };
    let threads = resolve_threads(args.threads);
    let warmups = if args.reps > 3 { 3 } else { 0 };
    if warmups == 0 {
        eprintln!("warning: {} repetition(s) leave no warm-up runs to discard", args.reps);
    }
    let mut times = Vec::with_capacity(args.reps);
    let mut patterns = 0;
    for _ in 0..args.reps {
        let started = Instant::now();
        let store = mine_with_mode(&db, &cfg, args.mode, threads);
        times.push(started.elapsed().as_secs_f64());
        patterns = store.total();
    }
    let measured = &times[warmups..];
    let mean = measured.iter().sum::<f64>() / measured.len() as f64;
    let mut out = String::new();
    for (i, t) in times.iter().enumerate() {
        let tag = if i < warmups { "warmup" } else { "run" };
        writeln!(out, "{tag}\t{}\t{t:.6}", i + 1).unwrap();
    }
    writeln!(out, "mean\t\t{mean:.6}").unwrap();
    eprintln!("patterns: {patterns}, mean over {} run(s): {mean:.6}s", measured.len());
    write_output(&args.output, &out)
}

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ecstream::dispatch::{run_online, OnlineConfig};
use ecstream::ec::{Background, Interpretation, Target};
use ecstream::eval::{cross_validate, evaluate, Metrics};
use ecstream::io::{generate_synthetic, parse_theory, read_stream, write_frames, write_theory, NoiseSpec, SynthConfig};
use ecstream::learner::LearnerConfig;
use ecstream::log::{audit, read_decisions, write_decision, Decision};
use ecstream::logic::{parse_mode_bias, HeadKind, ModeBias};
use ecstream::{Error, Result};

#[derive(Parser)]
#[command(name = "ecstream", version, about = "Online learning of Event Calculus event definitions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Learn a theory in one pass over a training stream.
    Learn(LearnArgs),
    /// Evaluate a theory on a test stream.
    Eval(EvalArgs),
    /// k-fold cross-validation over whole episodes of one stream.
    Cv(CvArgs),
    /// Generate a synthetic stream labelled by a ground-truth theory.
    Gen(GenArgs),
    /// Replay a decision log and check every logged decision.
    Audit(AuditArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Mode declarations (and threshold constants).
    #[arg(long)]
    bias: PathBuf,
    /// Target fluent name, e.g. `moving`.
    #[arg(long)]
    target: String,
}

#[derive(Args)]
struct LearnParams {
    #[arg(long, default_value_t = 1e-5)]
    delta: f64,
    /// Specialization depth.
    #[arg(long, default_value_t = 1)]
    depth: usize,
    /// Prune clauses whose score stays below this.
    #[arg(long, default_value_t = 0.5)]
    prune: f64,
    /// Observations a clause needs before it may be pruned or output.
    #[arg(long, default_value_t = 1000)]
    warmup: u64,
    /// Cap on bottom clause body size.
    #[arg(long, default_value_t = 25)]
    max_bottom: usize,
}

impl LearnParams {
    fn online(&self) -> OnlineConfig {
        let cfg = |kind| LearnerConfig {
            delta: self.delta,
            depth: self.depth,
            s_min: self.prune,
            n_min: self.warmup,
            max_bottom: self.max_bottom,
            ..LearnerConfig::new(kind)
        };
        OnlineConfig::new(cfg(HeadKind::Initiated), cfg(HeadKind::Terminated))
    }
}

#[derive(Args)]
struct LearnArgs {
    /// Training facts; `-` reads standard input.
    #[arg(long)]
    train: String,
    /// Optional test facts, evaluated after learning.
    #[arg(long)]
    test: Option<String>,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    params: LearnParams,
    /// Theory output; standard output if absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Decision log (JSON lines).
    #[arg(long)]
    log: Option<PathBuf>,
    /// Metrics output (JSON lines); needs --test.
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    theory: PathBuf,
    #[arg(long)]
    test: String,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct CvArgs {
    #[arg(long)]
    train: String,
    #[arg(long, default_value_t = 10)]
    folds: usize,
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    params: LearnParams,
    #[arg(long)]
    metrics: Option<PathBuf>,
}

#[derive(Args)]
struct GenArgs {
    /// Ground-truth theory used to label the stream.
    #[arg(long)]
    gt: PathBuf,
    #[arg(long, default_value_t = 4)]
    entities: usize,
    #[arg(long, default_value_t = 10_000)]
    length: usize,
    /// Probability of flipping each target fluent instance per time point.
    #[arg(long, default_value_t = 0.0)]
    noise_flip: f64,
    /// Probability of dropping each narrative atom.
    #[arg(long, default_value_t = 0.0)]
    noise_drop: f64,
    #[arg(long, default_value_t = 0)]
    gen_seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    log: PathBuf,
}

#[derive(Serialize)]
struct MetricsRecord<'a> {
    record: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    fold: Option<usize>,
    #[serde(flatten)]
    metrics: &'a Metrics,
}

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

fn open_input(name: &str) -> Result<Box<dyn BufRead + Send>> {
    if name == "-" {
        return Ok(Box::new(BufReader::new(io::stdin())));
    }
    let f = File::open(name).map_err(|e| Error::Config(format!("{name}: {e}")))?;
    Ok(Box::new(BufReader::new(f)))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(f))
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(create(p)?),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

struct Setup {
    bias: Arc<ModeBias>,
    target: Arc<Target>,
    bg: Background,
}

fn setup(data: &DataArgs) -> Result<Setup> {
    let bias = parse_mode_bias(&read_text(&data.bias)?)?;
    let target = Target::from_bias(&bias, &data.target)?;
    let bg = Background::from_bias(&bias, &data.target);
    Ok(Setup { bias: Arc::new(bias), target: Arc::new(target), bg })
}

fn load_stream(name: &str, bg: &Background) -> Result<Vec<Interpretation>> {
    read_stream(name, open_input(name)?, bg.clone()).collect()
}

fn write_metrics(path: Option<&PathBuf>, folds: &[Metrics], summary: &Metrics) -> Result<()> {
    let mut w = output(path)?;
    for (i, m) in folds.iter().enumerate() {
        serde_json::to_writer(&mut w, &MetricsRecord { record: "fold", fold: Some(i), metrics: m })?;
        w.write_all(b"\n")?;
    }
    serde_json::to_writer(&mut w, &MetricsRecord { record: "summary", fold: None, metrics: summary })?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn learn(args: LearnArgs) -> Result<()> {
    let s = setup(&args.data)?;
    let cfg = args.params.online();
    let mut log = args.log.as_deref().map(create).transpose()?;
    let mut log_err = None;
    let sink = |d: Decision| {
        if let Some(w) = log.as_mut() {
            if let Err(e) = write_decision(w, &d) {
                log_err.get_or_insert(e);
            }
        }
    };
    let stream = read_stream(&args.train, open_input(&args.train)?, s.bg.clone());
    let res = run_online(stream, Arc::clone(&s.bias), Arc::clone(&s.target), &cfg, sink)?;
    if let Some(e) = log_err {
        return Err(e);
    }
    if let Some(mut w) = log {
        w.flush()?;
    }
    let theory = res.theory();
    let mut out = output(args.out.as_ref())?;
    write_theory(&mut out, &theory)?;
    out.flush()?;
    drop(out);
    log::info!(
        "{} interpretations, {} clauses, {:.2}s",
        res.interpretations,
        theory.clauses.len(),
        res.train_time().as_secs_f64()
    );
    if let Some(test) = &args.test {
        let mut m = evaluate(&theory, &load_stream(test, &s.bg)?, &s.target);
        m.train_time = res.train_time().as_secs_f64();
        write_metrics(args.metrics.as_ref(), &[], &m)?;
    } else if args.metrics.is_some() {
        return Err(Error::Config("--metrics needs --test".into()));
    }
    Ok(())
}

fn eval(args: EvalArgs) -> Result<()> {
    let s = setup(&args.data)?;
    let theory = parse_theory(&read_text(&args.theory)?)?;
    let m = evaluate(&theory, &load_stream(&args.test, &s.bg)?, &s.target);
    write_metrics(args.metrics.as_ref(), &[], &m)
}

fn cv(args: CvArgs) -> Result<()> {
    let s = setup(&args.data)?;
    let mut cfg = args.params.online();
    cfg.progress_every = 0;
    let stream = load_stream(&args.train, &s.bg)?;
    let folds = cross_validate(&stream, args.folds, s.bias, s.target, &cfg)?;
    write_metrics(args.metrics.as_ref(), &folds, &Metrics::pooled(&folds))
}

fn gen(args: GenArgs) -> Result<()> {
    let gt = parse_theory(&read_text(&args.gt)?)?;
    let cfg = SynthConfig {
        noise: NoiseSpec { flip: args.noise_flip, drop: args.noise_drop, seed: args.gen_seed },
        ..SynthConfig::new(args.entities, args.length, args.gen_seed)
    };
    let mut out = output(args.out.as_ref())?;
    for frame in generate_synthetic(&gt, &cfg)? {
        write_frames(&mut out, [&frame])?;
    }
    out.flush()?;
    Ok(())
}

fn run_audit(args: AuditArgs) -> Result<bool> {
    let f = File::open(&args.log).map_err(|e| Error::Config(format!("{}: {e}", args.log.display())))?;
    let report = audit(&read_decisions(BufReader::new(f))?);
    for v in &report.violations {
        println!("violation: {v}");
    }
    println!(
        "{} starts, {} expansions, {} prunes, {} violations",
        report.starts,
        report.expansions,
        report.prunes,
        report.violations.len()
    );
    Ok(report.ok())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Learn(a) => learn(a).map(|_| true),
        Command::Eval(a) => eval(a).map(|_| true),
        Command::Cv(a) => cv(a).map(|_| true),
        Command::Gen(a) => gen(a).map(|_| true),
        Command::Audit(a) => run_audit(a),
    };
    match res {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

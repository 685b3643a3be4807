//! `arsp`: generate inputs, run rskyline-probability algorithms, verify them
//! against each other and benchmark them.
//!
//! Exit codes: 0 success, 1 verification deviation, 2 input or parameter
//! error, 3 too many possible worlds for enumeration.

mod bench;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use arsp::baselines::{self, world_count, DEFAULT_WORLD_CAP};
use arsp::datagen::{self, ConstraintKind, Dist, IngestMapping};
use arsp::eclipse::{eclipse_naive, eclipse_pruned};
use arsp::io::{self as aio, format_sig, RESULT_DIGITS};
use arsp::{Algorithm, ArspError, ArspResult, PreferenceSpec, RatioBox, UncertainDataset};
use clap::{Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "arsp", version, about = "Restricted-skyline probabilities on uncertain data")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic uncertain dataset.
    Gen {
        #[arg(long, default_value = "ind")]
        dist: Dist,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        cnt: usize,
        #[arg(long)]
        d: usize,
        #[arg(long, default_value_t = 0.2)]
        l: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Generate a constraint file.
    Constraints {
        #[arg(long)]
        kind: SpecKind,
        #[arg(long)]
        d: usize,
        /// Number of constraints for `wr` and `im`.
        #[arg(long, default_value_t = 0)]
        c: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Ratio bounds `l,h` applied to every ratio for `ratio`.
        #[arg(long, value_parser = parse_pair)]
        ratio: Option<(f64, f64)>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Build a dataset from a real-data CSV and a key=value mapping file.
    Ingest {
        #[arg(long)]
        csv: PathBuf,
        #[arg(long)]
        mapping: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Compute rskyline probabilities of every instance.
    Arsp {
        #[arg(long)]
        algo: Algorithm,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Report the `K` objects with the highest probability instead.
        #[arg(long)]
        top: Option<usize>,
        /// Stats line destination; defaults to `<out>.stats`, or stderr.
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Run several algorithms and report their largest per-instance deviation.
    Verify {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        constraints: PathBuf,
        /// Comma-separated algorithms; defaults to all applicable ones.
        #[arg(long, value_delimiter = ',')]
        algos: Vec<Algorithm>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Compare exact rational enumeration against the exact product form.
        #[arg(long)]
        rational: bool,
        /// Also check a previously written result file.
        #[arg(long)]
        result: Option<PathBuf>,
    },
    /// Eclipse query on a dataset of certain points.
    Eclipse {
        #[arg(long)]
        data: PathBuf,
        /// Ratio-box constraint file.
        #[arg(long, conflicts_with = "ratio")]
        constraints: Option<PathBuf>,
        /// Bounds `l,h` applied to every ratio.
        #[arg(long, value_parser = parse_pair)]
        ratio: Option<(f64, f64)>,
        #[arg(long, default_value = "pruned")]
        algo: EclipseAlgo,
        #[arg(long, short)]
        out: Option<PathBuf>,
        #[arg(long)]
        stats: Option<PathBuf>,
    },
    /// Sweep a parameter grid, one subprocess per run.
    Bench {
        /// key=value grid file.
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Per-run wall-clock cap in seconds; overrides the grid file.
        #[arg(long)]
        cap: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SpecKind {
    Wr,
    Im,
    Ratio,
}

#[derive(Clone, Copy, ValueEnum)]
pub(crate) enum EclipseAlgo {
    Naive,
    Pruned,
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(',').ok_or("expected `l,h`")?;
    let num = |x: &str| x.trim().parse::<f64>().map_err(|_| format!("bad number {x:?}"));
    Ok((num(a)?, num(b)?))
}

/// Carries the exit code alongside the message.
#[derive(Debug)]
pub(crate) struct Failure {
    code: u8,
    msg: String,
}

impl Failure {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Failure { code: 2, msg: msg.into() }
    }
}

impl From<ArspError> for Failure {
    fn from(e: ArspError) -> Self {
        let code = if matches!(e, ArspError::TooManyWorlds { .. }) { 3 } else { 2 };
        Failure { code, msg: e.to_string() }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::input(e.to_string())
    }
}

type CmdResult = Result<ExitCode, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.cmd {
        Command::Gen {
            dist,
            m,
            cnt,
            d,
            l,
            phi,
            seed,
            out,
        } => cmd_gen(dist, m, cnt, d, l, phi, seed, out.as_deref()),
        Command::Constraints {
            kind,
            d,
            c,
            seed,
            ratio,
            out,
        } => cmd_constraints(kind, d, c, seed, ratio, out.as_deref()),
        Command::Ingest { csv, mapping, out } => cmd_ingest(&csv, &mapping, out.as_deref()),
        Command::Arsp {
            algo,
            data,
            constraints,
            out,
            top,
            stats,
        } => cmd_arsp(algo, &data, &constraints, out.as_deref(), top, stats.as_deref()),
        Command::Verify {
            data,
            constraints,
            algos,
            tol,
            rational,
            result,
        } => cmd_verify(&data, &constraints, &algos, tol, rational, result.as_deref()),
        Command::Eclipse {
            data,
            constraints,
            ratio,
            algo,
            out,
            stats,
        } => cmd_eclipse(&data, constraints.as_deref(), ratio, algo, out.as_deref(), stats.as_deref()),
        Command::Bench { spec, out, cap } => bench::cmd_bench(&spec, out.as_deref(), cap),
    };
    match res {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn sink(out: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// `<out>.stats` next to the output, or stderr when writing to stdout.
fn write_stats(line: &str, stats: Option<&Path>, out: Option<&Path>) -> io::Result<()> {
    let path = stats.map(Path::to_path_buf).or_else(|| {
        out.map(|o| {
            let mut s = o.as_os_str().to_owned();
            s.push(".stats");
            PathBuf::from(s)
        })
    });
    match path {
        Some(p) => std::fs::write(p, format!("{line}\n")),
        None => writeln!(io::stderr(), "{line}"),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_gen(dist: Dist, m: usize, cnt: usize, d: usize, l: f64, phi: f64, seed: u64, out: Option<&Path>) -> CmdResult {
    let (ds, report) = datagen::gen_dataset(dist, m, cnt, d, l, phi, seed)?;
    aio::write_dataset(&ds, sink(out)?)?;
    if report.exempt > 0 {
        eprintln!("{} single-instance objects kept their only instance", report.exempt);
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_constraints(kind: SpecKind, d: usize, c: usize, seed: u64, ratio: Option<(f64, f64)>, out: Option<&Path>) -> CmdResult {
    let spec = match kind {
        SpecKind::Wr => PreferenceSpec::Constraints(datagen::gen_constraints(ConstraintKind::Wr, d, c, seed)?),
        SpecKind::Im => PreferenceSpec::Constraints(datagen::gen_constraints(ConstraintKind::Im, d, c, seed)?),
        SpecKind::Ratio => {
            let (l, h) = ratio.ok_or_else(|| Failure::input("--kind ratio needs --ratio l,h"))?;
            PreferenceSpec::Ratio(RatioBox::uniform(d, l, h)?)
        }
    };
    let mut w = sink(out)?;
    w.write_all(aio::format_constraints(&spec).as_bytes())?;
    w.flush()?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_ingest(csv: &Path, mapping: &Path, out: Option<&Path>) -> CmdResult {
    let mapping = IngestMapping::from_file(mapping)?;
    let ds = datagen::ingest_csv(csv, &mapping)?;
    aio::write_dataset(&ds, sink(out)?)?;
    Ok(ExitCode::SUCCESS)
}

fn load_inputs(data: &Path, constraints: &Path) -> Result<(UncertainDataset, PreferenceSpec), Failure> {
    let ds = aio::load_dataset(data)?;
    let spec = aio::load_constraints(constraints)?;
    if spec.d() != ds.d {
        return Err(Failure::input(format!("constraints have d = {}, dataset has d = {}", spec.d(), ds.d)));
    }
    if let Some(v) = ds.validate().first() {
        return Err(Failure::input(format!("invalid dataset: {v}")));
    }
    Ok((ds, spec))
}

fn cmd_arsp(algo: Algorithm, data: &Path, constraints: &Path, out: Option<&Path>, top: Option<usize>, stats: Option<&Path>) -> CmdResult {
    let (ds, spec) = load_inputs(data, constraints)?;
    let d_prime = spec.score_weights()?.len();
    let start = Instant::now();
    let res = algo.run(&ds, &spec)?;
    let seconds = start.elapsed().as_secs_f64();
    let mut w = sink(out)?;
    match top {
        Some(k) => {
            writeln!(w, "object_id,prob_rsky")?;
            for (id, p) in res.top_objects(k) {
                writeln!(w, "{id},{}", format_sig(p, RESULT_DIGITS))?;
            }
            w.flush()?;
        }
        None => aio::write_result(&res, w)?,
    }
    let line = format!("algo={algo} seconds={seconds:.6} arsp_size={} d_prime={d_prime} n={} m={}", res.arsp_size(), ds.n(), ds.m());
    write_stats(&line, stats, out)?;
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(data: &Path, constraints: &Path, algos: &[Algorithm], tol: f64, rational: bool, result: Option<&Path>) -> CmdResult {
    let (ds, spec) = load_inputs(data, constraints)?;
    let worlds = world_count(&ds);
    let enum_ok = worlds <= DEFAULT_WORLD_CAP;
    let mut worst = 0.0f64;
    let mut report = |name: &str, diff: Option<f64>| {
        let diff = diff.unwrap_or(f64::INFINITY);
        println!("{name}: max deviation {diff:e}");
        worst = worst.max(diff);
    };
    let baseline: ArspResult = if rational {
        if !enum_ok {
            return Err(ArspError::TooManyWorlds {
                worlds,
                cap: DEFAULT_WORLD_CAP,
            }
            .into());
        }
        let e = baselines::enum_arsp_exact(&ds, &spec)?;
        let l = baselines::loop_arsp_exact(&ds, &spec)?;
        let exact_dev = e
            .instances
            .iter()
            .map(|(k, v)| l.instances.get(k).map(|w| arsp::exact::rational_to_f64(&if v >= w { v - w } else { w - v })))
            .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(d)));
        report("loop (exact) vs enum (exact)", exact_dev);
        e.to_float()
    } else if enum_ok {
        baselines::enum_arsp(&ds, &spec)?
    } else {
        let why = ArspError::TooManyWorlds {
            worlds,
            cap: DEFAULT_WORLD_CAP,
        };
        println!("enum skipped: {why}; baseline is loop");
        baselines::loop_arsp(&ds, &spec)?
    };
    let listed: Vec<Algorithm> = if algos.is_empty() && !rational {
        Algorithm::ALL.into_iter().filter(|&a| a != Algorithm::Enum && a.supports(&ds, &spec)).collect()
    } else {
        algos.to_vec()
    };
    for algo in listed {
        if !algo.supports(&ds, &spec) {
            println!("{algo}: skipped, not applicable to this input");
            continue;
        }
        let res = algo.run(&ds, &spec)?;
        report(algo.name(), res.max_abs_diff(&baseline));
    }
    if let Some(path) = result {
        let file = aio::load_result(path)?;
        report(&path.display().to_string(), file.max_abs_diff(&baseline));
    }
    if worst <= tol {
        println!("ok: max deviation {worst:e} <= {tol:e}");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("FAILED: max deviation {worst:e} > {tol:e}");
        Ok(ExitCode::from(1))
    }
}

fn cmd_eclipse(data: &Path, constraints: Option<&Path>, ratio: Option<(f64, f64)>, algo: EclipseAlgo, out: Option<&Path>, stats: Option<&Path>) -> CmdResult {
    let ds = aio::load_dataset(data)?;
    if !ds.is_singleton_profile() {
        return Err(Failure::input("eclipse needs certain data: one instance per object"));
    }
    let rb = match (constraints, ratio) {
        (Some(p), _) => match aio::load_constraints(p)? {
            PreferenceSpec::Ratio(rb) => rb,
            PreferenceSpec::Constraints(_) => return Err(Failure::input("eclipse needs a ratio-box constraint file")),
        },
        (None, Some((l, h))) => RatioBox::uniform(ds.d, l, h)?,
        (None, None) => return Err(Failure::input("give --constraints or --ratio")),
    };
    if rb.d != ds.d {
        return Err(Failure::input(format!("ratio box has d = {}, dataset has d = {}", rb.d, ds.d)));
    }
    let points: Vec<Vec<f64>> = ds.instances().map(|t| t.coords.clone()).collect();
    let start = Instant::now();
    let ids = match algo {
        EclipseAlgo::Naive => eclipse_naive(&points, &rb),
        EclipseAlgo::Pruned => eclipse_pruned(&points, &rb),
    };
    let seconds = start.elapsed().as_secs_f64();
    let mut w = sink(out)?;
    writeln!(w, "object_id")?;
    for i in &ids {
        writeln!(w, "{}", ds.objects[*i].object_id)?;
    }
    w.flush()?;
    let name = match algo {
        EclipseAlgo::Naive => "eclipse-naive",
        EclipseAlgo::Pruned => "eclipse-pruned",
    };
    write_stats(&format!("algo={name} seconds={seconds:.6} arsp_size={} n={}", ids.len(), points.len()), stats, out)?;
    Ok(ExitCode::SUCCESS)
}

//! Parameter sweeps. Each grid point runs in a fresh `arsp` subprocess with
//! a wall-clock cap; runs that exceed it are killed and recorded as `INF`.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;
use std::process::{Command, ExitCode, Stdio};
use std::time::{Duration, Instant};

use arsp::datagen::{self, ConstraintKind, Dist};
use arsp::io as aio;
use arsp::{Algorithm, PreferenceSpec, RatioBox};

use crate::{sink, CmdResult, Failure};

const DEFAULT_CAP_SECS: f64 = 3600.0;
const POLL: Duration = Duration::from_millis(5);

/// Keys that may hold comma-separated lists; the grid is their product.
const GRID_KEYS: [&str; 11] = ["dist", "m", "cnt", "d", "l", "phi", "kind", "c", "low", "high", "seed"];

const DEFAULTS: [(&str, &str); 11] = [
    ("dist", "ind"),
    ("m", "16000"),
    ("cnt", "400"),
    ("d", "4"),
    ("l", "0.2"),
    ("phi", "0"),
    ("kind", "wr"),
    ("c", "3"),
    ("low", "0.36"),
    ("high", "2.75"),
    ("seed", "0"),
];

#[derive(Debug, Clone, Copy, PartialEq)]
enum Task {
    Arsp(Algorithm),
    Eclipse(&'static str),
}

impl Task {
    fn parse(s: &str) -> Result<Task, Failure> {
        match s {
            "eclipse-naive" => Ok(Task::Eclipse("naive")),
            "eclipse-pruned" => Ok(Task::Eclipse("pruned")),
            _ => Algorithm::parse(s).map(Task::Arsp).map_err(Failure::from),
        }
    }

    fn name(self) -> String {
        match self {
            Task::Arsp(a) => a.to_string(),
            Task::Eclipse(v) => format!("eclipse-{v}"),
        }
    }
}

#[derive(Debug)]
struct Grid {
    axes: Vec<(&'static str, Vec<String>)>,
    tasks: Vec<Task>,
    cap: Duration,
}

#[derive(Debug, Clone, Copy)]
struct Point {
    dist: Dist,
    m: usize,
    cnt: usize,
    d: usize,
    l: f64,
    phi: f64,
    kind: &'static str,
    c: usize,
    low: f64,
    high: f64,
    seed: u64,
}

fn parse_grid(text: &str, cap_override: Option<f64>) -> Result<Grid, Failure> {
    let mut values: BTreeMap<&'static str, Vec<String>> = BTreeMap::new();
    let mut tasks = Vec::new();
    let mut cap = DEFAULT_CAP_SECS;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| Failure::input(format!("bench spec line {}: {msg}", i + 1));
        let (key, value) = line.split_once('=').ok_or_else(|| bad("expected key=value".into()))?;
        let (key, value) = (key.trim(), value.trim());
        let list: Vec<String> = value.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
        if list.is_empty() {
            return Err(bad(format!("{key} has no values")));
        }
        match key {
            "algos" => {
                for a in &list {
                    tasks.push(Task::parse(a).map_err(|f| bad(f.msg))?);
                }
            }
            "cap" => cap = value.parse().map_err(|_| bad(format!("bad cap {value:?}")))?,
            _ => {
                let k = GRID_KEYS.iter().find(|&&k| k == key).ok_or_else(|| bad(format!("unknown key {key:?}")))?;
                values.insert(k, list);
            }
        }
    }
    if tasks.is_empty() {
        return Err(Failure::input("bench spec lists no algos"));
    }
    let cap = cap_override.unwrap_or(cap);
    if !(cap.is_finite() && cap > 0.0) {
        return Err(Failure::input(format!("cap must be a positive number of seconds, got {cap}")));
    }
    let axes = DEFAULTS
        .iter()
        .map(|&(k, default)| (k, values.remove(k).unwrap_or_else(|| vec![default.to_string()])))
        .collect();
    let grid = Grid {
        axes,
        tasks,
        cap: Duration::from_secs_f64(cap),
    };
    for combo in grid.combos() {
        grid.point(&combo)?;
    }
    Ok(grid)
}

impl Grid {
    /// Every combination of axis values, the first axis varying slowest.
    fn combos(&self) -> Vec<Vec<usize>> {
        let mut out = vec![vec![]];
        for (_, vals) in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..vals.len()).map(move |j| {
                        let mut p = prefix.clone();
                        p.push(j);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn value(&self, combo: &[usize], key: &str) -> &str {
        let idx = self.axes.iter().position(|(k, _)| *k == key).expect("known key");
        &self.axes[idx].1[combo[idx]]
    }

    fn point(&self, combo: &[usize]) -> Result<Point, Failure> {
        fn num<T: std::str::FromStr>(g: &Grid, combo: &[usize], key: &str) -> Result<T, Failure> {
            let v = g.value(combo, key);
            v.parse().map_err(|_| Failure::input(format!("bench spec: bad {key} {v:?}")))
        }
        let kind = match self.value(combo, "kind") {
            "wr" => "wr",
            "im" => "im",
            "ratio" => "ratio",
            other => return Err(Failure::input(format!("bench spec: unknown kind {other:?}"))),
        };
        Ok(Point {
            dist: self.value(combo, "dist").parse().map_err(Failure::from)?,
            m: num(self, combo, "m")?,
            cnt: num(self, combo, "cnt")?,
            d: num(self, combo, "d")?,
            l: num(self, combo, "l")?,
            phi: num(self, combo, "phi")?,
            kind,
            c: num(self, combo, "c")?,
            low: num(self, combo, "low")?,
            high: num(self, combo, "high")?,
            seed: num(self, combo, "seed")?,
        })
    }

    /// `key=value` for every axis with more than one value, `;`-joined.
    fn label(&self, combo: &[usize]) -> String {
        let varied: Vec<String> = self
            .axes
            .iter()
            .zip(combo)
            .filter(|((_, vals), _)| vals.len() > 1)
            .map(|((k, vals), &j)| format!("{k}={}", vals[j]))
            .collect();
        if varied.is_empty() {
            format!("m={}", self.value(combo, "m"))
        } else {
            varied.join(";")
        }
    }
}

fn spec_for(p: &Point) -> arsp::Result<PreferenceSpec> {
    Ok(match p.kind {
        "wr" => PreferenceSpec::Constraints(datagen::gen_constraints(ConstraintKind::Wr, p.d, p.c, p.seed)?),
        "im" => PreferenceSpec::Constraints(datagen::gen_constraints(ConstraintKind::Im, p.d, p.c, p.seed)?),
        _ => PreferenceSpec::Ratio(RatioBox::uniform(p.d, p.low, p.high)?),
    })
}

enum Outcome {
    Done { seconds: f64, size: usize },
    TimedOut,
    Failed(String),
}

fn run_capped(args: &[&std::ffi::OsStr], stats: &Path, cap: Duration) -> std::io::Result<Outcome> {
    let exe = std::env::current_exe()?;
    let mut child = Command::new(exe).args(args).stdout(Stdio::null()).stderr(Stdio::piped()).spawn()?;
    let start = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break status;
        }
        if start.elapsed() >= cap {
            child.kill()?;
            child.wait()?;
            return Ok(Outcome::TimedOut);
        }
        std::thread::sleep(POLL);
    };
    if !status.success() {
        let mut err = String::new();
        if let Some(mut e) = child.stderr.take() {
            use std::io::Read;
            e.read_to_string(&mut err)?;
        }
        return Ok(Outcome::Failed(err.trim().to_string()));
    }
    let line = std::fs::read_to_string(stats)?;
    let field = |key: &str| {
        line.split_whitespace()
            .find_map(|kv| kv.strip_prefix(key).and_then(|v| v.strip_prefix('=')))
            .map(str::to_string)
    };
    match (field("seconds").and_then(|s| s.parse().ok()), field("arsp_size").and_then(|s| s.parse().ok())) {
        (Some(seconds), Some(size)) => Ok(Outcome::Done { seconds, size }),
        _ => Ok(Outcome::Failed(format!("unreadable stats line {line:?}"))),
    }
}

pub(crate) fn cmd_bench(spec: &Path, out: Option<&Path>, cap: Option<f64>) -> CmdResult {
    let grid = parse_grid(&std::fs::read_to_string(spec)?, cap)?;
    let dir = tempfile::tempdir()?;
    let data = dir.path().join("data.csv");
    let certain = dir.path().join("certain.csv");
    let cons = dir.path().join("constraints.txt");
    let result = dir.path().join("result.csv");
    let stats = dir.path().join("result.stats");
    let mut w = sink(out)?;
    writeln!(w, "param,algo,seconds,arsp_size")?;
    w.flush()?;
    for combo in grid.combos() {
        let p = grid.point(&combo)?;
        let label = grid.label(&combo);
        let needs_uncertain = grid.tasks.iter().any(|t| matches!(t, Task::Arsp(_)));
        let needs_certain = grid.tasks.iter().any(|t| matches!(t, Task::Eclipse(_)));
        if needs_uncertain {
            let (ds, _) = datagen::gen_dataset(p.dist, p.m, p.cnt, p.d, p.l, p.phi, p.seed)?;
            aio::save_dataset(&ds, &data)?;
            std::fs::write(&cons, aio::format_constraints(&spec_for(&p)?))?;
        }
        if needs_certain {
            let (ds, _) = datagen::gen_dataset(p.dist, p.m, 1, p.d, 0.0, 0.0, p.seed)?;
            aio::save_dataset(&ds, &certain)?;
        }
        for &task in &grid.tasks {
            let _ = std::fs::remove_file(&stats);
            let args: Vec<std::ffi::OsString> = match task {
                Task::Arsp(a) => vec![
                    "arsp".into(),
                    "--algo".into(),
                    a.name().into(),
                    "--data".into(),
                    data.clone().into(),
                    "--constraints".into(),
                    cons.clone().into(),
                    "--out".into(),
                    result.clone().into(),
                    "--stats".into(),
                    stats.clone().into(),
                ],
                Task::Eclipse(v) => vec![
                    "eclipse".into(),
                    "--algo".into(),
                    v.into(),
                    "--data".into(),
                    certain.clone().into(),
                    "--ratio".into(),
                    format!("{},{}", p.low, p.high).into(),
                    "--out".into(),
                    result.clone().into(),
                    "--stats".into(),
                    stats.clone().into(),
                ],
            };
            let argv: Vec<&std::ffi::OsStr> = args.iter().map(|a| a.as_os_str()).collect();
            let row = match run_capped(&argv, &stats, grid.cap)? {
                Outcome::Done { seconds, size } => format!("{label},{},{seconds},{size}", task.name()),
                Outcome::TimedOut => format!("{label},{},INF,", task.name()),
                Outcome::Failed(msg) => {
                    eprintln!("{label} {}: run failed: {msg}", task.name());
                    format!("{label},{},NA,", task.name())
                }
            };
            writeln!(w, "{row}")?;
            w.flush()?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

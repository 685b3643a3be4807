//! Synthetic uncertain datasets, constraint generators, the orthogonal
//! vectors reduction, and CSV ingestion of real data.
//!
//! Centers follow the usual skyline benchmark shapes:
//! * `Ind`: uniform in `[0,1]^d`.
//! * `Anti`: a plane value `v ~ N(0.5, 0.05)`, coordinates `v + U(-w, w)`
//!   with `w = min(v, 1 - v)`, shifted so their mean is `v`; points outside
//!   the cube are redrawn. The centers hug the anti-diagonal plane.
//! * `Corr`: `v` is the mean of `d` uniforms, coordinates `v + N(0, 0.05)`,
//!   redrawn until inside the cube. The centers hug the diagonal.
//!
//! Each object gets one edge length `e ~ N(l/2, l/8)` truncated to `[0, l]`
//! by rejection, a box `[c - e/2, c + e/2]` clipped to the cube, and
//! `n_i ~ U{1..cnt}` uniform instances of probability `1/n_i`.

use std::collections::HashMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Normal};

use crate::error::{ArspError, Result};
use crate::model::{Instance, UncertainDataset, UncertainObject};
use crate::polytope::LinearConstraintSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dist {
    Ind,
    Anti,
    Corr,
}

impl std::str::FromStr for Dist {
    type Err = ArspError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ind" => Ok(Dist::Ind),
            "anti" => Ok(Dist::Anti),
            "corr" => Ok(Dist::Corr),
            other => Err(ArspError::BadParam(format!("unknown distribution {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GenReport {
    pub n: usize,
    /// Instances removed to make object totals fall below 1.
    pub removed: usize,
    /// Objects selected for removal that had a single instance and kept it.
    pub exempt: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub dist: Dist,
    pub m: usize,
    pub cnt: usize,
    pub d: usize,
    pub l: f64,
    pub phi: f64,
    pub seed: u64,
}

impl GenParams {
    fn check(&self) -> Result<()> {
        let bad = |msg: &str| Err(ArspError::BadParam(msg.into()));
        if self.m == 0 {
            return bad("m must be at least 1");
        }
        if self.cnt == 0 {
            return bad("cnt must be at least 1");
        }
        if self.d < 2 {
            return bad("d must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.l) {
            return bad("l must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.phi) {
            return bad("phi must lie in [0, 1]");
        }
        Ok(())
    }
}

pub fn gen_dataset(dist: Dist, m: usize, cnt: usize, d: usize, l: f64, phi: f64, seed: u64) -> Result<(UncertainDataset, GenReport)> {
    generate(&GenParams { dist, m, cnt, d, l, phi, seed })
}

pub fn generate(params: &GenParams) -> Result<(UncertainDataset, GenReport)> {
    params.check()?;
    let GenParams { dist, m, cnt, d, l, phi, seed } = *params;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let edge = (l > 0.0).then(|| Normal::new(l / 2.0, l / 8.0).expect("positive deviation"));
    let affected = (phi * m as f64).floor() as usize;
    let mut report = GenReport::default();
    let mut objects = Vec::with_capacity(m);
    for o in 0..m {
        let center = gen_center(dist, d, &mut rng);
        let e = match &edge {
            Some(nd) => loop {
                let x: f64 = nd.sample(&mut rng);
                if (0.0..=l).contains(&x) {
                    break x;
                }
            },
            None => 0.0,
        };
        let ni = rng.random_range(1..=cnt);
        let prob = 1.0 / ni as f64;
        let mut pts: Vec<Vec<f64>> = (0..ni)
            .map(|_| {
                center
                    .iter()
                    .map(|&c| {
                        let lo = (c - e / 2.0).max(0.0);
                        let hi = (c + e / 2.0).min(1.0);
                        if hi > lo {
                            rng.random_range(lo..=hi)
                        } else {
                            lo
                        }
                    })
                    .collect()
            })
            .collect();
        if o < affected {
            if ni == 1 {
                report.exempt += 1;
            } else {
                let last = (0..pts.len())
                    .max_by(|&a, &b| pts[a].partial_cmp(&pts[b]).expect("finite").then(a.cmp(&b)))
                    .expect("non-empty");
                pts.remove(last);
                report.removed += 1;
            }
        }
        let id = o as u32 + 1;
        let instances = pts
            .into_iter()
            .enumerate()
            .map(|(j, c)| Instance::new(id, j as u32 + 1, c, prob))
            .collect();
        objects.push(UncertainObject::new(id, instances));
    }
    let ds = UncertainDataset::new(d, objects);
    report.n = ds.n();
    Ok((ds, report))
}

fn gen_center(dist: Dist, d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let inside = |x: &[f64]| x.iter().all(|v| (0.0..=1.0).contains(v));
    match dist {
        Dist::Ind => (0..d).map(|_| rng.random::<f64>()).collect(),
        Dist::Anti => {
            let plane = Normal::new(0.5, 0.05).expect("valid");
            loop {
                let v: f64 = plane.sample(rng);
                if !(0.0..=1.0).contains(&v) {
                    continue;
                }
                let w = v.min(1.0 - v);
                let mut x: Vec<f64> = (0..d).map(|_| v + rng.random_range(-w..=w)).collect();
                let shift = v - x.iter().sum::<f64>() / d as f64;
                x.iter_mut().for_each(|c| *c += shift);
                if inside(&x) {
                    return x;
                }
            }
        }
        Dist::Corr => {
            let jitter = Normal::new(0.0, 0.05).expect("valid");
            loop {
                let v = (0..d).map(|_| rng.random::<f64>()).sum::<f64>() / d as f64;
                let x: Vec<f64> = (0..d).map(|_| v + jitter.sample(rng)).collect();
                if inside(&x) {
                    return x;
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Weak rankings `w[i] >= w[i+1]` for the first `c` attributes.
    Wr,
    /// Halfspaces from random point pairs oriented toward a hidden weight.
    Im,
}

impl std::str::FromStr for ConstraintKind {
    type Err = ArspError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "wr" => Ok(ConstraintKind::Wr),
            "im" => Ok(ConstraintKind::Im),
            other => Err(ArspError::BadParam(format!("unknown constraint kind {other:?}"))),
        }
    }
}

pub fn gen_constraints(kind: ConstraintKind, d: usize, c: usize, seed: u64) -> Result<LinearConstraintSystem> {
    gen_constraints_with_target(kind, d, c, seed).map(|(cs, _)| cs)
}

/// Also returns the hidden weight for `Im` (`None` for `Wr`).
pub fn gen_constraints_with_target(kind: ConstraintKind, d: usize, c: usize, seed: u64) -> Result<(LinearConstraintSystem, Option<Vec<f64>>)> {
    if d < 2 {
        return Err(ArspError::BadParam("d must be at least 2".into()));
    }
    let mut cs = LinearConstraintSystem::simplex(d);
    match kind {
        ConstraintKind::Wr => {
            if c > d - 1 {
                return Err(ArspError::BadParam(format!("weak rankings allow at most {} constraints for d = {d}", d - 1)));
            }
            for i in 0..c {
                let mut row = vec![0.0; d];
                row[i + 1] = 1.0;
                row[i] = -1.0;
                cs.push(row, 0.0)?;
            }
            Ok((cs, None))
        }
        ConstraintKind::Im => {
            if c == 0 {
                return Err(ArspError::BadParam("interactive constraints need c >= 1".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let raw: Vec<f64> = (0..d).map(|_| Exp1.sample(&mut rng)).collect();
            let total: f64 = raw.iter().sum();
            let target: Vec<f64> = raw.iter().map(|x| x / total).collect();
            for _ in 0..c {
                let t: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
                let s: Vec<f64> = (0..d).map(|_| rng.random::<f64>()).collect();
                let mut row: Vec<f64> = t.iter().zip(&s).map(|(a, b)| a - b).collect();
                let at: f64 = row.iter().zip(&target).map(|(a, w)| a * w).sum();
                if at > 0.0 {
                    row.iter_mut().for_each(|x| *x = -*x);
                }
                cs.push(row, 0.0)?;
            }
            Ok((cs, Some(target)))
        }
    }
}

/// Hardness construction from orthogonal vectors: one object holding
/// `xi(a)` (3/2 where `a` is 0, 1/2 where it is 1) for every `a`, with
/// probability `1/|A|`, plus a certain singleton per `b`. Some `xi(a)` has
/// probability zero under the full simplex iff some `a . b = 0`.
pub fn gen_ov_instance(a: &[Vec<u8>], b: &[Vec<u8>]) -> Result<(UncertainDataset, LinearConstraintSystem)> {
    let d = a.first().or(b.first()).map(Vec::len).unwrap_or(0);
    if a.is_empty() || b.is_empty() || d == 0 {
        return Err(ArspError::BadParam("both vector sets must be non-empty".into()));
    }
    if a.iter().chain(b).any(|v| v.len() != d || v.iter().any(|&x| x > 1)) {
        return Err(ArspError::BadParam("vectors must share one dimension and hold 0/1 values".into()));
    }
    let pa = 1.0 / a.len() as f64;
    let xi = a
        .iter()
        .map(|v| (v.iter().map(|&x| if x == 0 { 1.5 } else { 0.5 }).collect(), pa))
        .collect();
    let mut objects = vec![UncertainObject::from_points(1, xi)];
    for (j, v) in b.iter().enumerate() {
        objects.push(UncertainObject::from_points(j as u32 + 2, vec![(v.iter().map(|&x| x as f64).collect(), 1.0)]));
    }
    Ok((UncertainDataset::new(d, objects), LinearConstraintSystem::simplex(d)))
}

/// How to read a real-data CSV with a header row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestMapping {
    /// Rows sharing this column's value form one object; without it every
    /// row is its own object.
    pub group: Option<String>,
    pub attributes: Vec<String>,
    /// Attributes where larger is better; they are negated.
    pub maximize: Vec<String>,
    /// Column holding a label mapped to a probability through `labels`.
    pub confidence: Option<String>,
    pub labels: HashMap<String, f64>,
}

impl IngestMapping {
    /// Parses `key=value` lines: `group`, `attributes`, `maximize` (comma
    /// lists), `confidence`, and `confidence.LABEL=p`. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut m = IngestMapping::default();
        let list = |v: &str| v.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect::<Vec<_>>();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ArspError::BadMapping(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "group" => m.group = Some(value.to_string()),
                "attributes" => m.attributes = list(value),
                "maximize" => m.maximize = list(value),
                "confidence" => m.confidence = Some(value.to_string()),
                _ => match key.strip_prefix("confidence.") {
                    Some(label) => {
                        let p: f64 = value
                            .parse()
                            .map_err(|_| ArspError::BadMapping(format!("line {}: bad probability {value:?}", lineno + 1)))?;
                        if !(p > 0.0 && p <= 1.0) {
                            return Err(ArspError::BadMapping(format!("line {}: probability {p} outside (0, 1]", lineno + 1)));
                        }
                        m.labels.insert(label.to_string(), p);
                    }
                    None => return Err(ArspError::BadMapping(format!("line {}: unknown key {key:?}", lineno + 1))),
                },
            }
        }
        if m.attributes.is_empty() {
            return Err(ArspError::BadMapping("no attributes listed".into()));
        }
        if let Some(bad) = m.maximize.iter().find(|c| !m.attributes.contains(c)) {
            return Err(ArspError::BadMapping(format!("maximize column {bad:?} is not an attribute")));
        }
        if m.confidence.is_some() && m.labels.is_empty() {
            return Err(ArspError::BadMapping("confidence column given without label probabilities".into()));
        }
        Ok(m)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }
}

pub fn ingest_csv(path: impl AsRef<Path>, mapping: &IngestMapping) -> Result<UncertainDataset> {
    ingest_reader(std::fs::File::open(path)?, mapping)
}

pub fn ingest_reader(reader: impl std::io::Read, mapping: &IngestMapping) -> Result<UncertainDataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers().map_err(|e| ArspError::parse(1, e.to_string()))?.clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ArspError::BadMapping(format!("column {name:?} not in header")))
    };
    let attr_cols: Vec<usize> = mapping.attributes.iter().map(|a| col(a)).collect::<Result<_>>()?;
    let negate: Vec<bool> = mapping.attributes.iter().map(|a| mapping.maximize.contains(a)).collect();
    let group_col = mapping.group.as_deref().map(col).transpose()?;
    let conf_col = mapping.confidence.as_deref().map(col).transpose()?;

    let mut keys: HashMap<String, usize> = HashMap::new();
    let mut rows: Vec<Vec<(Vec<f64>, Option<f64>)>> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| ArspError::parse(line, e.to_string()))?;
        let field = |c: usize| rec.get(c).ok_or_else(|| ArspError::parse(line, format!("missing column {}", c + 1)));
        let mut coords = Vec::with_capacity(attr_cols.len());
        for (&c, &neg) in attr_cols.iter().zip(&negate) {
            let raw = field(c)?;
            let v: f64 = raw
                .parse()
                .map_err(|_| ArspError::parse(line, format!("attribute {:?} is not a number: {raw:?}", &headers[c])))?;
            if !v.is_finite() {
                return Err(ArspError::parse(line, format!("attribute {:?} is not finite", &headers[c])));
            }
            coords.push(if neg { -v } else { v });
        }
        let prob = match conf_col {
            Some(c) => {
                let label = field(c)?;
                Some(
                    *mapping
                        .labels
                        .get(label)
                        .ok_or_else(|| ArspError::parse(line, format!("no probability for confidence label {label:?}")))?,
                )
            }
            None => None,
        };
        let slot = match group_col {
            Some(c) => {
                let key = field(c)?.to_string();
                let next = rows.len();
                *keys.entry(key).or_insert(next)
            }
            None => rows.len(),
        };
        if slot == rows.len() {
            rows.push(Vec::new());
        }
        rows[slot].push((coords, prob));
    }
    let objects = rows
        .into_iter()
        .enumerate()
        .map(|(o, members)| {
            let share = 1.0 / members.len() as f64;
            let pts = members.into_iter().map(|(c, p)| (c, p.unwrap_or(share))).collect();
            UncertainObject::from_points(o as u32 + 1, pts)
        })
        .collect();
    Ok(UncertainDataset::new(mapping.attributes.len(), objects))
}

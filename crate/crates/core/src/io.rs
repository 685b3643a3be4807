//! Text formats: dataset CSV, constraint files, and result CSV.
//!
//! Dataset CSV has the header `object_id,instance_id,prob,a1,..,ad`; floats
//! are written in shortest round-trip form. Constraint files start with
//! `d <int>` followed by either `ratio l1 h1 .. l(d-1) h(d-1)` or one row per
//! line, `c1 .. cd <= rhs`. Lines may carry `#` comments. Result CSV is
//! `object_id,instance_id,prob_rsky` with 12 significant digits.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{ArspError, Result};
use crate::model::{Instance, InstanceKey, ArspResult, UncertainDataset, UncertainObject};
use crate::polytope::{ConstraintRow, LinearConstraintSystem, PreferenceSpec, RatioBox};

pub const RESULT_DIGITS: usize = 12;

pub fn write_dataset(ds: &UncertainDataset, out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["object_id".to_string(), "instance_id".into(), "prob".into()];
    header.extend((1..=ds.d).map(|i| format!("a{i}")));
    w.write_record(&header).map_err(csv_io)?;
    for t in ds.instances() {
        let mut row = vec![t.object_id.to_string(), t.instance_id.to_string(), t.prob.to_string()];
        row.extend(t.coords.iter().map(|c| c.to_string()));
        w.write_record(&row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_dataset(ds: &UncertainDataset, path: impl AsRef<Path>) -> Result<()> {
    write_dataset(ds, std::io::BufWriter::new(std::fs::File::create(path)?))
}

/// Rows are grouped by `object_id` in order of first appearance; instances
/// keep file order.
pub fn read_dataset(input: impl Read) -> Result<UncertainDataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(|e| ArspError::parse(1, e.to_string()))?.clone();
    let expect = ["object_id", "instance_id", "prob"];
    if headers.len() < 4 || headers.iter().take(3).ne(expect) {
        return Err(ArspError::parse(1, "header must be object_id,instance_id,prob,a1,..,ad"));
    }
    let d = headers.len() - 3;
    let mut slots: BTreeMap<u32, usize> = BTreeMap::new();
    let mut objects: Vec<UncertainObject> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| ArspError::parse(line, e.to_string()))?;
        if rec.len() != d + 3 {
            return Err(ArspError::parse(line, format!("expected {} fields, found {}", d + 3, rec.len())));
        }
        let int = |k: usize| rec[k].parse::<u32>().map_err(|_| ArspError::parse(line, format!("bad {} {:?}", &headers[k], &rec[k])));
        let float = |k: usize| rec[k].parse::<f64>().map_err(|_| ArspError::parse(line, format!("bad {} {:?}", &headers[k], &rec[k])));
        let (oid, iid, prob) = (int(0)?, int(1)?, float(2)?);
        let coords = (3..d + 3).map(float).collect::<Result<Vec<_>>>()?;
        let slot = *slots.entry(oid).or_insert_with(|| {
            objects.push(UncertainObject::new(oid, Vec::new()));
            objects.len() - 1
        });
        objects[slot].instances.push(Instance::new(oid, iid, coords, prob));
    }
    Ok(UncertainDataset::new(d, objects))
}

pub fn load_dataset(path: impl AsRef<Path>) -> Result<UncertainDataset> {
    read_dataset(std::fs::File::open(path)?)
}

pub fn format_constraints(spec: &PreferenceSpec) -> String {
    let mut s = format!("d {}\n", spec.d());
    match spec {
        PreferenceSpec::Ratio(rb) => {
            s.push_str("ratio");
            for (l, h) in &rb.ranges {
                let _ = write!(s, " {l} {h}");
            }
            s.push('\n');
        }
        PreferenceSpec::Constraints(cs) => {
            for row in &cs.rows {
                let coeffs: Vec<String> = row.coeffs.iter().map(|c| c.to_string()).collect();
                let _ = writeln!(s, "{} <= {}", coeffs.join(" "), row.rhs);
            }
        }
    }
    s
}

pub fn parse_constraints(text: &str) -> Result<PreferenceSpec> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let (first, head) = lines.next().ok_or_else(|| ArspError::parse(1, "empty constraint file"))?;
    let d: usize = head
        .strip_prefix('d')
        .map(str::trim)
        .and_then(|v| v.parse().ok())
        .filter(|&d| d >= 1)
        .ok_or_else(|| ArspError::parse(first, "first line must be `d <int>`"))?;
    let nums = |line: usize, s: &str| -> Result<Vec<f64>> {
        s.split_whitespace()
            .map(|x| x.parse::<f64>().map_err(|_| ArspError::parse(line, format!("bad number {x:?}"))))
            .collect()
    };
    let rest: Vec<(usize, &str)> = lines.collect();
    if let Some(&(line, l)) = rest.first() {
        if let Some(vals) = l.strip_prefix("ratio") {
            if rest.len() > 1 {
                return Err(ArspError::parse(rest[1].0, "nothing may follow a ratio line"));
            }
            let v = nums(line, vals)?;
            if v.len() != 2 * (d.saturating_sub(1)) || d < 2 {
                return Err(ArspError::parse(line, format!("ratio needs {} bounds for d = {d}", 2 * d.saturating_sub(1))));
            }
            let ranges = v.chunks_exact(2).map(|p| (p[0], p[1])).collect();
            return RatioBox::new(ranges)
                .map(PreferenceSpec::Ratio)
                .map_err(|e| ArspError::parse(line, e.to_string()));
        }
    }
    let mut rows = Vec::with_capacity(rest.len());
    for (line, l) in rest {
        let (lhs, rhs) = l.split_once("<=").ok_or_else(|| ArspError::parse(line, "expected `c1 .. cd <= rhs`"))?;
        let coeffs = nums(line, lhs)?;
        if coeffs.len() != d {
            return Err(ArspError::parse(line, format!("expected {d} coefficients, found {}", coeffs.len())));
        }
        let rhs = nums(line, rhs)?;
        if rhs.len() != 1 {
            return Err(ArspError::parse(line, "expected one right-hand side"));
        }
        rows.push(ConstraintRow { coeffs, rhs: rhs[0] });
    }
    Ok(PreferenceSpec::Constraints(LinearConstraintSystem::new(d, rows)?))
}

pub fn load_constraints(path: impl AsRef<Path>) -> Result<PreferenceSpec> {
    parse_constraints(&std::fs::read_to_string(path)?)
}

/// `%g`-style formatting with `digits` significant digits and trailing
/// zeros removed.
pub fn format_sig(x: f64, digits: usize) -> String {
    assert!(digits >= 1);
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mant, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        format!("{}e{}{:02}", trim_zeros(mant), if exp < 0 { '-' } else { '+' }, exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_result(res: &ArspResult, out: impl Write) -> Result<()> {
    let mut w = std::io::BufWriter::new(out);
    writeln!(w, "object_id,instance_id,prob_rsky")?;
    for (k, v) in &res.instances {
        writeln!(w, "{},{},{}", k.object_id, k.instance_id, format_sig(*v, RESULT_DIGITS))?;
    }
    w.flush()?;
    Ok(())
}

pub fn save_result(res: &ArspResult, path: impl AsRef<Path>) -> Result<()> {
    write_result(res, std::fs::File::create(path)?)
}

pub fn read_result(input: impl Read) -> Result<ArspResult> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(|e| ArspError::parse(1, e.to_string()))?.clone();
    if headers.iter().ne(["object_id", "instance_id", "prob_rsky"]) {
        return Err(ArspError::parse(1, "header must be object_id,instance_id,prob_rsky"));
    }
    let mut res = ArspResult::default();
    for (i, rec) in rdr.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| ArspError::parse(line, e.to_string()))?;
        if rec.len() != 3 {
            return Err(ArspError::parse(line, "expected 3 fields"));
        }
        let bad = |what: &str| ArspError::parse(line, format!("bad {what}"));
        let oid: u32 = rec[0].parse().map_err(|_| bad("object_id"))?;
        let iid: u32 = rec[1].parse().map_err(|_| bad("instance_id"))?;
        let v: f64 = rec[2].parse().map_err(|_| bad("prob_rsky"))?;
        if res.instances.insert(InstanceKey::new(oid, iid), v).is_some() {
            return Err(ArspError::parse(line, "duplicate instance"));
        }
        *res.objects.entry(oid).or_insert(0.0) += v;
    }
    Ok(res)
}

pub fn load_result(path: impl AsRef<Path>) -> Result<ArspResult> {
    read_result(std::fs::File::open(path)?)
}

fn csv_io(e: csv::Error) -> ArspError {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => ArspError::Io(io),
        other => ArspError::Io(std::io::Error::other(format!("{other:?}"))),
    }
}

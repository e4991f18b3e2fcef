//! CSV inputs: `year,count`, `index,severity`, `expert_id,opinion` and
//! `value` for industry samples. A header row is required.

use std::fs::File;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};

/// Rows of a two-column file, as `(line, key, value)` strings.
fn read_rows(path: &Path, header: &[&str]) -> Result<Vec<(u64, String)>> {
    let file = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let found: Vec<String> = reader
        .headers()
        .with_context(|| format!("{}: cannot read header", path.display()))?
        .iter()
        .map(str::to_string)
        .collect();
    if found != header {
        bail!(
            "{}: line 1: expected header `{}`, got `{}`",
            path.display(),
            header.join(","),
            found.join(",")
        );
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            anyhow!("{}: line {line}: {e}", path.display())
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let value = record.get(header.len() - 1).unwrap_or("").to_string();
        rows.push((line, value));
    }
    Ok(rows)
}

fn parse_each<T>(
    path: &Path,
    header: &[&str],
    parse: impl Fn(&str) -> Result<T, String>,
) -> Result<Vec<T>> {
    read_rows(path, header)?
        .into_iter()
        .map(|(line, v)| parse(&v).map_err(|msg| anyhow!("{}: line {line}: {msg}", path.display())))
        .collect()
}

pub fn read_counts(path: &Path) -> Result<Vec<u64>> {
    parse_each(path, &["year", "count"], |v| {
        v.parse::<u64>()
            .map_err(|_| format!("count must be a non-negative integer, got `{v}`"))
    })
}

/// Severities, each checked to be positive and at least `threshold`.
pub fn read_severities(path: &Path, threshold: Option<f64>) -> Result<Vec<f64>> {
    parse_each(path, &["index", "severity"], |v| {
        let x: f64 = v
            .parse()
            .map_err(|_| format!("severity must be a number, got `{v}`"))?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(format!("severity must be positive, got {x}"));
        }
        match threshold {
            Some(l) if x < l => Err(format!("severity {x} is below the threshold {l}")),
            _ => Ok(x),
        }
    })
}

pub fn read_opinions(path: &Path) -> Result<Vec<f64>> {
    parse_each(path, &["expert_id", "opinion"], |v| {
        v.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .ok_or_else(|| format!("opinion must be a finite number, got `{v}`"))
    })
}

pub fn read_samples(path: &Path) -> Result<Vec<f64>> {
    parse_each(path, &["value"], |v| {
        v.parse::<f64>()
            .map_err(|_| format!("sample must be a number, got `{v}`"))
    })
}

/// A decimal or a fraction such as `2/3`.
pub fn parse_fraction(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let value = match s.split_once('/') {
        Some((n, d)) => {
            let n: f64 = n
                .trim()
                .parse()
                .map_err(|_| format!("bad numerator in `{s}`"))?;
            let d: f64 = d
                .trim()
                .parse()
                .map_err(|_| format!("bad denominator in `{s}`"))?;
            n / d
        }
        None => s.parse().map_err(|_| format!("`{s}` is not a number"))?,
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{s}` is not a finite number"))
    }
}

//! Pairwise distance matrices over a directory of field files.

use std::fmt::Write as _;
use std::path::Path;

use mtstab_core::distances::distance;
use mtstab_core::{AbstractMergeTree, Guards, MetricId};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{load_field, CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairStatus {
    Ok,
    GuardSkipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixResult {
    pub metric: MetricId,
    pub members: Vec<String>,
    /// Row-major, `None` where the pair was skipped.
    pub values: Vec<Vec<Option<f64>>>,
    pub status: Vec<Vec<PairStatus>>,
}

/// Marker written to the CSV for skipped pairs.
pub const SKIPPED: &str = "skipped";

impl MatrixResult {
    pub fn from_trees(metric: MetricId, members: Vec<String>, trees: &[AbstractMergeTree], guards: &Guards) -> CliResult<Self> {
        let n = trees.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let results: Vec<_> = pairs
            .par_iter()
            .map(|&(i, j)| distance(metric, &trees[i], &trees[j], guards))
            .collect();
        let mut values = vec![vec![Some(0.0); n]; n];
        let mut status = vec![vec![PairStatus::Ok; n]; n];
        for (&(i, j), r) in pairs.iter().zip(results) {
            let v = match r {
                Ok(d) => Some(d),
                Err(e) if e.is_guard() => None,
                Err(e) => return Err(CliError::Validation(format!("{} vs {}: {e}", members[i], members[j]))),
            };
            values[i][j] = v;
            values[j][i] = v;
            if v.is_none() {
                status[i][j] = PairStatus::GuardSkipped;
                status[j][i] = PairStatus::GuardSkipped;
            }
        }
        Ok(Self { metric, members, values, status })
    }

    pub fn skipped(&self) -> usize {
        self.status.iter().flatten().filter(|s| **s == PairStatus::GuardSkipped).count() / 2
    }

    /// Header row of member names, then one row of values per member.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.members).expect("in-memory write");
        for row in &self.values {
            w.write_record(row.iter().map(|v| v.map_or_else(|| SKIPPED.to_string(), sig9)))
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }

    /// Reads a matrix written by [`MatrixResult::to_csv`].
    pub fn from_csv(metric: MetricId, text: &str) -> CliResult<Self> {
        let bad = |m: String| CliError::Validation(format!("matrix csv: {m}"));
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let members: Vec<String> = r.headers().map_err(|e| bad(e.to_string()))?.iter().map(String::from).collect();
        let mut values = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(|e| bad(e.to_string()))?;
            let row = rec
                .iter()
                .map(|s| match s {
                    SKIPPED => Ok(None),
                    s => s.parse::<f64>().map(Some).map_err(|e| bad(format!("'{s}': {e}"))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            values.push(row);
        }
        if values.len() != members.len() || values.iter().any(|r| r.len() != members.len()) {
            return Err(bad("matrix is not square".into()));
        }
        let status = values
            .iter()
            .map(|r| r.iter().map(|v| if v.is_some() { PairStatus::Ok } else { PairStatus::GuardSkipped }).collect())
            .collect();
        Ok(Self { metric, members, values, status })
    }
}

/// Decimal with 9 significant digits.
pub fn sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (8 - mag).max(0) as usize;
    let mut s = String::new();
    let _ = write!(s, "{x:.decimals$}");
    s
}

/// Loads every `*.json` file of `dir`, sorted by name. Parse failures are
/// collected and reported together.
pub fn load_members(dir: &Path) -> CliResult<(Vec<String>, Vec<AbstractMergeTree>)> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut paths = Vec::new();
    for e in entries {
        let p = e.map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?.path();
        if p.extension().is_some_and(|x| x == "json") {
            paths.push(p);
        }
    }
    paths.sort();
    if paths.len() < 2 {
        return Err(CliError::Validation(format!(
            "{}: need at least 2 field files, found {}",
            dir.display(),
            paths.len()
        )));
    }
    let mut names = Vec::new();
    let mut trees = Vec::new();
    let mut errors = Vec::new();
    for p in &paths {
        let tree = load_field(p).and_then(|f| {
            AbstractMergeTree::from_field(&f).map_err(|e| CliError::Validation(format!("{}: {e}", p.display())))
        });
        match tree {
            Ok(t) => {
                names.push(p.file_stem().unwrap_or_default().to_string_lossy().into_owned());
                trees.push(t);
            }
            Err(CliError::Io(m)) => return Err(CliError::Io(m)),
            Err(e) => errors.push(e.to_string()),
        }
    }
    if !errors.is_empty() {
        return Err(CliError::Validation(errors.join("\n")));
    }
    Ok((names, trees))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nine_significant_digits() {
        assert_eq!(sig9(0.0), "0");
        assert_eq!(sig9(1.0), "1.00000000");
        assert_eq!(sig9(0.0707106781186), "0.0707106781");
        assert_eq!(sig9(14.3364), "14.3364000");
        assert_eq!(sig9(123456789012.0), "123456789012");
    }
}

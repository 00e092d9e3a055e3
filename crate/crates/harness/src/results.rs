//! Result rows, CSV persistence and per-step summaries.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rsm_core::{AttackerKind, SelectorKind};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::HarnessError;

pub const CSV_HEADER: &str = "trial,selector,attacker,step,error,f_value,bound_apriori,bound_aposteriori,bound_prefailure,oracle_calls";

fn to_name<S: Serializer, T: fmt::Display>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(value)
}

fn from_name<'de, D, T>(d: D) -> Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    String::deserialize(d)?
        .parse()
        .map_err(serde::de::Error::custom)
}

/// One step of one episode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub trial: u64,
    #[serde(serialize_with = "to_name", deserialize_with = "from_name")]
    pub selector: SelectorKind,
    #[serde(serialize_with = "to_name", deserialize_with = "from_name")]
    pub attacker: AttackerKind,
    pub step: usize,
    /// `c(A_{1:t} \ B_{1:t}) = c(empty) - f`.
    pub error: f64,
    /// `f(A_{1:t} \ B_{1:t})`.
    pub f_value: f64,
    pub bound_apriori: Option<f64>,
    pub bound_aposteriori: Option<f64>,
    pub bound_prefailure: Option<f64>,
    /// Oracle calls spent by the selector at this step.
    pub oracle_calls: u64,
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<ResultRow>, HarnessError> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(HarnessError::Config(format!(
            "unexpected csv header '{}'",
            header.join(",")
        )));
    }
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn emit_results(rows: &[ResultRow], path: &Path) -> Result<(), HarnessError> {
    let file = std::fs::File::create(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_csv(rows, std::io::BufWriter::new(file))
}

pub fn load_results(path: &Path) -> Result<Vec<ResultRow>, HarnessError> {
    let file = std::fs::File::open(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    read_csv(file)
}

/// Mean and standard error of a sample.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Moments {
    pub count: usize,
    pub mean: f64,
    /// `s / sqrt(n)`, zero for a single sample.
    pub std_error: f64,
}

impl Moments {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len();
        let mean = values.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            (var / n as f64).sqrt()
        } else {
            0.0
        };
        Self {
            count: n,
            mean,
            std_error,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct SummaryKey {
    pub selector: SelectorKind,
    pub attacker: AttackerKind,
    pub step: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SummaryRow {
    pub error: Moments,
    pub f_value: Moments,
}

/// Per `(selector, attacker, step)` statistics across trials.
pub fn summarize(rows: &[ResultRow]) -> BTreeMap<SummaryKey, SummaryRow> {
    let mut groups: BTreeMap<SummaryKey, (Vec<f64>, Vec<f64>)> = BTreeMap::new();
    for row in rows {
        let key = SummaryKey {
            selector: row.selector,
            attacker: row.attacker,
            step: row.step,
        };
        let entry = groups.entry(key).or_default();
        entry.0.push(row.error);
        entry.1.push(row.f_value);
    }
    groups
        .into_iter()
        .map(|(k, (e, f))| {
            (
                k,
                SummaryRow {
                    error: Moments::of(&e),
                    f_value: Moments::of(&f),
                },
            )
        })
        .collect()
}

/// Writes one `<selector>_<attacker>.dat` file per pair with columns `step mean_error std_error`.
pub fn emit_plot_data(rows: &[ResultRow], dir: &Path) -> Result<(), HarnessError> {
    let io = |source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    };
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut files: BTreeMap<(SelectorKind, AttackerKind), String> = BTreeMap::new();
    for (key, row) in summarize(rows) {
        let text = files
            .entry((key.selector, key.attacker))
            .or_insert_with(|| "# step mean_error std_error\n".to_owned());
        text.push_str(&format!(
            "{} {} {}\n",
            key.step, row.error.mean, row.error.std_error
        ));
    }
    for ((s, a), text) in files {
        let path = dir.join(format!("{s}_{a}.dat"));
        std::fs::write(&path, text).map_err(|source| HarnessError::Io { path, source })?;
    }
    Ok(())
}

use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::DatasetId;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Psnr,
    Brisque,
}

impl Metric {
    pub const ALL: [Metric; 2] = [Metric::Psnr, Metric::Brisque];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Psnr => "psnr",
            Metric::Brisque => "brisque",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            Metric::Psnr => "PSNR",
            Metric::Brisque => "BRISQUE",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            Metric::Psnr => "dB",
            Metric::Brisque => "score",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psnr" => Ok(Metric::Psnr),
            "brisque" => Ok(Metric::Brisque),
            _ => Err(Error::Argument(format!(
                "unknown metric `{s}` (expected psnr or brisque)"
            ))),
        }
    }
}

/// One quality score of one image under one condition. `score` is `None`
/// for an undefined PSNR (identical images).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreRecord {
    pub dataset: DatasetId,
    pub image_id: u64,
    pub condition: String,
    pub metric: Metric,
    pub score: Option<f64>,
}

pub const SCORES_HEADER: [&str; 5] = ["dataset", "image_id", "condition", "metric", "score"];

/// PSNR is written with four decimals; BRISQUE with the shortest text that
/// parses back to the same value.
pub fn format_score(metric: Metric, score: Option<f64>) -> String {
    match (metric, score) {
        (_, None) => "NA".to_string(),
        (Metric::Psnr, Some(v)) => format!("{v:.4}"),
        (Metric::Brisque, Some(v)) => format!("{v}"),
    }
}

pub fn write_scores<W: io::Write>(out: W, records: &[ScoreRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SCORES_HEADER)?;
    for r in records {
        w.write_record([
            r.dataset.name(),
            &r.image_id.to_string(),
            &r.condition,
            r.metric.name(),
            &format_score(r.metric, r.score),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<scores>", e))?;
    Ok(())
}

pub fn write_scores_file(path: &Path, records: &[ScoreRecord]) -> Result<()> {
    let mut buf = Vec::new();
    write_scores(&mut buf, records)?;
    std::fs::write(path, buf).map_err(|e| Error::io(path, e))
}

pub fn read_scores<R: io::Read>(input: R) -> Result<Vec<ScoreRecord>> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    if header.iter().ne(SCORES_HEADER) {
        return Err(Error::Format(format!("unexpected scores header: {header:?}")));
    }
    let mut out = Vec::new();
    for (i, row) in rdr.records().enumerate() {
        let row = row?;
        let line = i + 2;
        let bad = |what: &str| Error::Format(format!("scores line {line}: bad {what}"));
        let dataset: DatasetId = row[0].parse().map_err(|_| bad("dataset"))?;
        let image_id: u64 = row[1].parse().map_err(|_| bad("image_id"))?;
        let metric: Metric = row[3].parse().map_err(|_| bad("metric"))?;
        let score = match &row[4] {
            "NA" => None,
            s => Some(
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| bad("score"))?,
            ),
        };
        out.push(ScoreRecord {
            dataset,
            image_id,
            condition: row[2].to_string(),
            metric,
            score,
        });
    }
    Ok(out)
}

pub fn read_scores_file(path: &Path) -> Result<Vec<ScoreRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_scores(io::BufReader::new(f))
}

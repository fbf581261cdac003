//! CSV and JSON records. CSV comment lines start with `#`; everything else
//! is the body, which is a pure function of the configuration.

use serde::{Deserialize, Serialize};

use qacd_core::montecarlo::{AvgTvdEstimate, HISTOGRAM_BINS};

pub const CSV_COLUMNS: &str = "N,d,kind,acd,wc,wc_is_lb,mc_mean,mc_se,samples";
pub const HISTOGRAM_COLUMNS: &str = "kind,bin,lo,hi,count,acd,wc";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    /// Ensemble label.
    pub kind: String,
    pub acd: f64,
    pub wc: f64,
    pub wc_is_lb: bool,
    pub mc_mean: f64,
    pub mc_se: f64,
    pub samples: usize,
    /// Excluded from the CSV so that bodies are reproducible.
    pub wall_time_s: f64,
}

impl ExperimentRecord {
    /// Floats use Rust's shortest round-trip formatting.
    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n, self.d, self.kind, self.acd, self.wc, self.wc_is_lb, self.mc_mean, self.mc_se, self.samples
        )
    }
}

/// `# `-prefixed header lines followed by the column row and `rows`.
pub fn csv_document(header: &[String], columns: &str, rows: &[String]) -> String {
    let mut s = String::new();
    for h in header {
        s.push_str("# ");
        s.push_str(h);
        s.push('\n');
    }
    s.push_str(columns);
    s.push('\n');
    for r in rows {
        s.push_str(r);
        s.push('\n');
    }
    s
}

/// Non-comment lines of a CSV document.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

pub fn parse_csv_row(line: &str) -> Option<ExperimentRecord> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != 9 {
        return None;
    }
    Some(ExperimentRecord {
        n: f[0].parse().ok()?,
        d: f[1].parse().ok()?,
        kind: f[2].to_string(),
        acd: f[3].parse().ok()?,
        wc: f[4].parse().ok()?,
        wc_is_lb: f[5].parse().ok()?,
        mc_mean: f[6].parse().ok()?,
        mc_se: f[7].parse().ok()?,
        samples: f[8].parse().ok()?,
        wall_time_s: 0.0,
    })
}

/// One row per bin of `est`, tagged with the ensemble and the reference
/// distances drawn as dashed lines.
pub fn histogram_rows(kind: &str, est: &AvgTvdEstimate, acd: f64, wc: f64) -> Vec<String> {
    let bins = HISTOGRAM_BINS as f64;
    est.histogram
        .iter()
        .enumerate()
        .map(|(b, c)| format!("{kind},{b},{},{},{c},{acd},{wc}", b as f64 / bins, (b + 1) as f64 / bins))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record() -> ExperimentRecord {
        ExperimentRecord {
            n: 3,
            d: 8,
            kind: "vqe".into(),
            acd: 0.1 + 0.2,
            wc: 1.0 / 3.0,
            wc_is_lb: true,
            mc_mean: 2.5e-7,
            mc_se: 0.0,
            samples: 1000,
            wall_time_s: 0.25,
        }
    }

    #[test]
    fn csv_and_json_round_trip_losslessly() {
        let r = record();
        let back = parse_csv_row(&r.csv_row()).unwrap();
        assert_eq!(ExperimentRecord { wall_time_s: 0.25, ..back }, r);
        let j = serde_json::to_string(&r).unwrap();
        assert!(j.contains("\"N\":3"));
        assert_eq!(serde_json::from_str::<ExperimentRecord>(&j).unwrap(), r);
    }

    #[test]
    fn body_strips_comments() {
        let doc = csv_document(&["t=1".into()], CSV_COLUMNS, &[record().csv_row()]);
        assert!(doc.starts_with("# t=1\nN,d,kind"));
        let body = csv_body(&doc);
        assert_eq!(body.lines().count(), 2);
        assert_eq!(body, csv_body(&csv_document(&["t=2".into()], CSV_COLUMNS, &[record().csv_row()])));
    }

    #[test]
    fn histogram_has_every_bin() {
        let est = AvgTvdEstimate::from_samples(&[0.0, 0.3, 0.3, 1.0], 0).unwrap();
        let rows = histogram_rows("haar", &est, 0.4, 0.9);
        assert_eq!(rows.len(), HISTOGRAM_BINS);
        assert_eq!(rows[15], "haar,15,0.3,0.32,2,0.4,0.9");
        assert!(rows[49].starts_with("haar,49,0.98,1,1,"));
    }
}

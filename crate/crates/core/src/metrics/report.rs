//! Evaluation reports and their CSV forms.
//!
//! Report CSV: `metric,target,model,value`, one row per metric.
//! Grouped CSV: `bin_lo,bin_hi,n,q1,median,q3,whisker_lo,whisker_hi`, empty
//! cells for empty bins.

use std::fmt::Write as _;

use super::{grouped_boxplot_stats, mae, mape, p_l, ErrorMode, GroupStats, MetricsError};

pub const REPORT_HEADER: &str = "metric,target,model,value";
pub const GROUPED_HEADER: &str = "bin_lo,bin_hi,n,q1,median,q3,whisker_lo,whisker_hi";

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub mae: f64,
    pub p_half: f64,
    pub p_one: f64,
    pub mape: f64,
    pub n: usize,
    /// Absolute-error boxplots by actual value, bin width 2.
    pub per_group: Vec<GroupStats>,
}

impl EvalReport {
    pub fn compute(actual: &[f64], predicted: &[f64]) -> Result<Self, MetricsError> {
        Ok(EvalReport {
            mae: mae(actual, predicted)?,
            p_half: p_l(actual, predicted, 0.5)?,
            p_one: p_l(actual, predicted, 1.0)?,
            mape: mape(actual, predicted)?,
            n: actual.len(),
            per_group: grouped_boxplot_stats(actual, predicted, ErrorMode::Ae, 2)?,
        })
    }

    pub fn rows(&self, target: &str, model: &str) -> Vec<ReportRow> {
        [
            ("mae", self.mae),
            ("p_0.5", self.p_half),
            ("p_1", self.p_one),
            ("mape", self.mape),
            ("n", self.n as f64),
        ]
        .into_iter()
        .map(|(metric, value)| ReportRow {
            metric: metric.to_string(),
            target: target.to_string(),
            model: model.to_string(),
            value,
        })
        .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub metric: String,
    pub target: String,
    pub model: String,
    pub value: f64,
}

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        // `{}` on f64 prints the shortest string that parses back exactly.
        let _ = writeln!(out, "{},{},{},{}", r.metric, r.target, r.model, r.value);
    }
    out
}

pub fn parse_report_csv(text: &str) -> Result<Vec<ReportRow>, MetricsError> {
    let mut lines = text.lines();
    if lines.next().map(str::trim) != Some(REPORT_HEADER) {
        return Err(MetricsError::Parse(format!("expected header '{REPORT_HEADER}'")));
    }
    lines
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(MetricsError::Parse(format!("expected 4 columns in '{line}'")));
            }
            let value = cols[3]
                .parse()
                .map_err(|_| MetricsError::Parse(format!("bad value '{}'", cols[3])))?;
            Ok(ReportRow {
                metric: cols[0].to_string(),
                target: cols[1].to_string(),
                model: cols[2].to_string(),
                value,
            })
        })
        .collect()
}

pub fn grouped_csv(groups: &[GroupStats]) -> String {
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    let mut out = String::from(GROUPED_HEADER);
    out.push('\n');
    for g in groups {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            g.bin_lo,
            g.bin_hi,
            g.n,
            cell(g.q1),
            cell(g.median),
            cell(g.q3),
            cell(g.whisker_lo),
            cell(g.whisker_hi)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_predictions() {
        let y = [1.0, 3.0, 7.0];
        let r = EvalReport::compute(&y, &y).unwrap();
        assert_eq!((r.mae, r.p_half, r.p_one, r.mape, r.n), (0.0, 1.0, 1.0, 0.0, 3));
    }

    #[test]
    fn report_csv_round_trips() {
        let y = [2.0, 3.0, 5.0, 11.0];
        let p = [2.3, 2.1, 5.9, 10.2];
        let report = EvalReport::compute(&y, &p).unwrap();
        let rows = report.rows("chi", "wide_cnn");
        let text = report_csv(&rows);
        assert!(text.starts_with("metric,target,model,value\n"));
        assert_eq!(parse_report_csv(&text).unwrap(), rows);
        assert!(parse_report_csv("nope\n").is_err());
    }

    #[test]
    fn grouped_csv_layout() {
        let y = [1.0, 5.0];
        let text = grouped_csv(&grouped_boxplot_stats(&y, &[2.0, 5.0], ErrorMode::Ae, 2).unwrap());
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], GROUPED_HEADER);
        assert_eq!(lines[1], "0,2,1,1,1,1,1,1");
        assert_eq!(lines[2], "2,4,0,,,,,");
        assert_eq!(lines[3], "4,6,1,0,0,0,0,0");
    }
}

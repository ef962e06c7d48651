use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::{Dataset, DatasetError, Target};
use crate::metrics::quantile_sorted;

/// Histogram of one label over a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct DistributionStats {
    pub target: Target,
    pub histogram: BTreeMap<usize, u64>,
    pub min: usize,
    pub median: f64,
    pub max: usize,
    pub total: u64,
}

impl DistributionStats {
    /// Fraction of records whose label is strictly below `bound`.
    pub fn fraction_below(&self, bound: usize) -> f64 {
        let below: u64 = self.histogram.range(..bound).map(|(_, c)| c).sum();
        below as f64 / self.total as f64
    }

    pub fn bins(&self) -> Vec<(usize, u64)> {
        self.histogram.iter().map(|(&v, &c)| (v, c)).collect()
    }

    /// `value,count` rows.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("value,count\n");
        for (v, c) in &self.histogram {
            let _ = writeln!(out, "{v},{c}");
        }
        out
    }
}

pub fn compute_stats(ds: &Dataset, target: Target) -> Result<DistributionStats, DatasetError> {
    if ds.is_empty() {
        return Err(DatasetError::Empty);
    }
    let mut histogram = BTreeMap::new();
    let mut values: Vec<f64> = Vec::with_capacity(ds.len());
    for r in &ds.records {
        let v = target.of(r);
        *histogram.entry(v).or_insert(0u64) += 1;
        values.push(v as f64);
    }
    values.sort_by(f64::total_cmp);
    Ok(DistributionStats {
        target,
        min: *histogram.keys().next().expect("non-empty"),
        max: *histogram.keys().next_back().expect("non-empty"),
        median: quantile_sorted(&values, 0.5),
        total: ds.len() as u64,
        histogram,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{LabeledGraph, Split};
    use crate::graph::Graph;
    use crate::oracles::Labels;

    fn record(order: usize, chromatic: usize, clique: usize) -> LabeledGraph {
        LabeledGraph::new(Graph::complete(clique).unwrap().pad_to_order(order).unwrap(), Labels { chromatic, clique }, order)
    }

    #[test]
    fn histogram_examples() {
        let ds = Dataset::new(Split::Train, 6, 0, vec![record(6, 2, 2), record(6, 2, 2), record(6, 5, 5)]).unwrap();
        let s = compute_stats(&ds, Target::Chromatic).unwrap();
        assert_eq!(s.histogram, BTreeMap::from([(2, 2), (5, 1)]));
        assert_eq!((s.min, s.median, s.max), (2, 2.0, 5));
        assert_eq!(s.histogram.values().sum::<u64>(), 3);
        assert!((s.fraction_below(5) - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(s.to_csv(), "value,count\n2,2\n5,1\n");

        let k50 = Dataset::new(Split::Test, 50, 0, vec![record(50, 50, 50); 4]).unwrap();
        assert_eq!(compute_stats(&k50, Target::Clique).unwrap().histogram, BTreeMap::from([(50, 4)]));

        let empty = Dataset::new(Split::Test, 50, 0, vec![]).unwrap();
        assert!(matches!(compute_stats(&empty, Target::Clique), Err(DatasetError::Empty)));
    }
}

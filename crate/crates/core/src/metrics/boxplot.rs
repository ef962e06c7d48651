use super::{absolute_errors, percentage_errors, MetricsError};

/// Which per-record error a boxplot summarizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMode {
    /// Absolute error.
    Ae,
    /// Absolute percentage error.
    Ape,
}

/// Boxplot summary of the errors of records whose actual value lies in
/// `(bin_lo, bin_hi]`. Quartiles and whiskers are `None` for empty bins.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupStats {
    pub bin_lo: u32,
    pub bin_hi: u32,
    pub n: usize,
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub q3: Option<f64>,
    pub whisker_lo: Option<f64>,
    pub whisker_hi: Option<f64>,
}

/// Quantile of sorted data by linear interpolation between order statistics
/// (`h = (n − 1)p`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    assert!(!sorted.is_empty(), "quantile of empty data");
    let h = (sorted.len() - 1) as f64 * p.clamp(0.0, 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Groups records by actual value into bins `(0, w], (w, 2w], …` up to the
/// bin holding the largest actual value, and summarizes each bin's errors.
/// Whiskers sit on the most extreme data within 1.5 IQR of the box.
pub fn grouped_boxplot_stats(
    actual: &[f64],
    predicted: &[f64],
    mode: ErrorMode,
    bin_width: u32,
) -> Result<Vec<GroupStats>, MetricsError> {
    if bin_width == 0 {
        return Err(MetricsError::ZeroBinWidth);
    }
    let errors = match mode {
        ErrorMode::Ae => absolute_errors(actual, predicted)?,
        ErrorMode::Ape => percentage_errors(actual, predicted)?,
    };
    let w = bin_width as f64;
    let bin_of = |y: f64| ((y / w).ceil().max(1.0) as usize) - 1;
    let max_bin = actual.iter().map(|&y| bin_of(y)).max().unwrap_or(0);
    let mut bins: Vec<Vec<f64>> = vec![Vec::new(); max_bin + 1];
    for (&y, &e) in actual.iter().zip(&errors) {
        bins[bin_of(y)].push(e);
    }
    Ok(bins
        .into_iter()
        .enumerate()
        .map(|(b, mut values)| {
            let bin_lo = b as u32 * bin_width;
            let bin_hi = bin_lo + bin_width;
            if values.is_empty() {
                return GroupStats {
                    bin_lo,
                    bin_hi,
                    n: 0,
                    q1: None,
                    median: None,
                    q3: None,
                    whisker_lo: None,
                    whisker_hi: None,
                };
            }
            values.sort_by(f64::total_cmp);
            let q1 = quantile_sorted(&values, 0.25);
            let median = quantile_sorted(&values, 0.5);
            let q3 = quantile_sorted(&values, 0.75);
            let iqr = q3 - q1;
            let lo_fence = q1 - 1.5 * iqr;
            let hi_fence = q3 + 1.5 * iqr;
            let whisker_lo = values.iter().copied().find(|&v| v >= lo_fence).unwrap_or(values[0]);
            let whisker_hi = values
                .iter()
                .rev()
                .copied()
                .find(|&v| v <= hi_fence)
                .unwrap_or(values[values.len() - 1]);
            GroupStats {
                bin_lo,
                bin_hi,
                n: values.len(),
                q1: Some(q1),
                median: Some(median),
                q3: Some(q3),
                whisker_lo: Some(whisker_lo),
                whisker_hi: Some(whisker_hi),
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles_interpolate() {
        assert_eq!(quantile_sorted(&[1.0, 2.0, 3.0, 4.0], 0.5), 2.5);
        assert_eq!(quantile_sorted(&[1.0, 2.0, 3.0, 4.0], 0.25), 1.75);
        assert_eq!(quantile_sorted(&[5.0], 0.75), 5.0);
    }

    #[test]
    fn equal_errors_collapse_the_box() {
        let actual = [1.0, 2.0, 3.0, 4.0, 4.0];
        let predicted = [1.5, 2.5, 3.5, 4.5, 3.5];
        let groups = grouped_boxplot_stats(&actual, &predicted, ErrorMode::Ae, 2).unwrap();
        assert_eq!(groups.len(), 2);
        for g in &groups {
            assert_eq!((g.q1, g.median, g.q3), (Some(0.5), Some(0.5), Some(0.5)));
        }
    }

    #[test]
    fn single_bin_median_and_partition() {
        let actual = [2.0, 2.0, 1.0, 2.0];
        let predicted = [3.0, 4.0, 4.0, 6.0];
        let groups = grouped_boxplot_stats(&actual, &predicted, ErrorMode::Ae, 2).unwrap();
        assert_eq!(groups.len(), 1);
        assert_eq!((groups[0].bin_lo, groups[0].bin_hi), (0, 2));
        assert_eq!(groups[0].median, Some(2.5));

        let actual = [1.0, 5.0, 9.0, 2.0, 3.0];
        let groups = grouped_boxplot_stats(&actual, &actual, ErrorMode::Ape, 2).unwrap();
        assert_eq!(groups.iter().map(|g| g.n).sum::<usize>(), 5);
        assert_eq!(groups.len(), 5);
        // (6, 8] holds nothing
        assert_eq!(groups[3].n, 0);
        assert_eq!(groups[3].median, None);
        // right-closed: 2 belongs to (0, 2], 3 to (2, 4]
        assert_eq!(groups[0].n, 2);
        assert_eq!(groups[1].n, 1);
    }

    #[test]
    fn whiskers_skip_outliers() {
        let actual = vec![3.0; 9];
        let predicted = [3.0, 4.0, 4.0, 4.0, 4.0, 5.0, 5.0, 5.0, 23.0];
        let g = &grouped_boxplot_stats(&actual, &predicted, ErrorMode::Ae, 2).unwrap()[1];
        assert_eq!(g.whisker_hi, Some(2.0));
        assert_eq!(g.whisker_lo, Some(0.0));
        assert!(grouped_boxplot_stats(&actual, &predicted, ErrorMode::Ae, 0).is_err());
    }
}

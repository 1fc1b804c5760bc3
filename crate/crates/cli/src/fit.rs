//! Power-law fit of median coupling times.
//!
//! Model: `ln(median τ / ln n) = b ln n + a`, fitted by ordinary least squares
//! over the sizes whose median is not censored by a timeout.

use ergm_core::CouplingResult;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingRow {
    pub n: usize,
    pub seeds: usize,
    /// `None` when the median falls on a timeout.
    pub median_steps: Option<f64>,
    pub censored_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingScalingFit {
    pub rows: Vec<ScalingRow>,
    pub exponent: f64,
    pub exponent_se: f64,
    /// `a` in the fitted line.
    pub intercept: f64,
    /// `e^a`.
    pub prefactor: f64,
    /// Residuals of the uncensored rows, in row order.
    pub residuals: Vec<f64>,
    /// Rows excluded for a censored median.
    pub censored_rows: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("need at least 3 sizes with uncensored medians, got {0}")]
pub struct TooFewPoints(pub usize);

/// Median of coupling times with timeouts ordered above every finished run.
pub fn censored_median(times: &[Option<u64>]) -> Option<f64> {
    if times.is_empty() {
        return None;
    }
    let mut v: Vec<Option<u64>> = times.to_vec();
    v.sort_by(|a, b| match (a, b) {
        (Some(x), Some(y)) => x.cmp(y),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => std::cmp::Ordering::Equal,
    });
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2].map(|x| x as f64)
    } else {
        match (v[k / 2 - 1], v[k / 2]) {
            (Some(a), Some(b)) => Some(0.5 * (a as f64 + b as f64)),
            _ => None,
        }
    }
}

/// Groups results by `n` (in first-seen order) into scaling rows.
pub fn scaling_rows(results: &[CouplingResult]) -> Vec<ScalingRow> {
    let mut ns: Vec<usize> = Vec::new();
    for r in results {
        if !ns.contains(&r.n) {
            ns.push(r.n);
        }
    }
    ns.into_iter()
        .map(|n| {
            let times: Vec<Option<u64>> = results.iter().filter(|r| r.n == n).map(|r| r.coalescence_step).collect();
            ScalingRow {
                n,
                seeds: times.len(),
                median_steps: censored_median(&times),
                censored_count: times.iter().filter(|t| t.is_none()).count(),
            }
        })
        .collect()
}

pub fn fit_mixing_scaling(rows: &[ScalingRow]) -> Result<MixingScalingFit, TooFewPoints> {
    let usable: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| {
            let m = r.median_steps?;
            let ln_n = (r.n as f64).ln();
            (r.n >= 2 && m > 0.0).then(|| (ln_n, (m / ln_n).ln()))
        })
        .collect();
    let k = usable.len();
    if k < 3 {
        return Err(TooFewPoints(k));
    }
    let kf = k as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / kf;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / kf;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let b = sxy / sxx;
    let a = my - b * mx;
    let residuals: Vec<f64> = usable.iter().map(|p| p.1 - (a + b * p.0)).collect();
    let ssr: f64 = residuals.iter().map(|r| r * r).sum();
    let exponent_se = (ssr / (kf - 2.0) / sxx).sqrt();
    Ok(MixingScalingFit {
        rows: rows.to_vec(),
        exponent: b,
        exponent_se,
        intercept: a,
        prefactor: a.exp(),
        residuals,
        censored_rows: rows.iter().filter(|r| r.median_steps.is_none()).map(|r| r.n).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(f: impl Fn(f64) -> f64) -> Vec<ScalingRow> {
        [8usize, 16, 32, 64]
            .iter()
            .map(|&n| ScalingRow {
                n,
                seeds: 1,
                median_steps: Some(f(n as f64)),
                censored_count: 0,
            })
            .collect()
    }

    #[test]
    fn recovers_n_squared_log_n() {
        let fit = fit_mixing_scaling(&rows(|n| 7.0 * n * n * n.ln())).unwrap();
        assert!((fit.exponent - 2.0).abs() < 1e-12);
        assert!((fit.prefactor - 7.0).abs() < 1e-9);
        assert!(fit.exponent_se < 1e-9);
    }

    #[test]
    fn cubic_power_law() {
        // The ln n divisor bends a pure n³ law: the fitted slope drops by the
        // log-log slope of ln n, about 0.33 over these sizes.
        let fit = fit_mixing_scaling(&rows(|n| n.powi(3) * n.ln())).unwrap();
        assert!((fit.exponent - 3.0).abs() < 1e-12);
        let raw = fit_mixing_scaling(&rows(|n| n.powi(3))).unwrap();
        assert!((raw.exponent - 2.67).abs() < 0.02, "{}", raw.exponent);
    }

    #[test]
    fn censoring() {
        assert_eq!(censored_median(&[Some(3), None, Some(1)]), Some(3.0));
        assert_eq!(censored_median(&[Some(3), None, None]), None);
        assert_eq!(censored_median(&[Some(3), Some(5), None, Some(1)]), Some(4.0));
        let mut r = rows(|n| n * n);
        r[1].median_steps = None;
        r[1].censored_count = 1;
        let fit = fit_mixing_scaling(&r).unwrap();
        assert_eq!(fit.censored_rows, vec![16]);
        assert_eq!(fit.residuals.len(), 3);
        r[2].median_steps = None;
        assert_eq!(fit_mixing_scaling(&r), Err(TooFewPoints(2)));
    }
}

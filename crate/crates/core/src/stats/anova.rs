use serde::{Deserialize, Serialize};

use super::descriptive::mean;
use super::dist::f_sf;
use super::{check_finite, StatsError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FTestResult {
    pub f: f64,
    pub df1: usize,
    pub df2: usize,
    pub p: f64,
    pub ms_between: f64,
    pub ms_within: f64,
}

/// Classical one-way ANOVA across `groups`.
pub fn oneway_anova(groups: &[Vec<f64>]) -> Result<FTestResult, StatsError> {
    if groups.len() < 2 {
        return Err(StatsError::TooFewGroups { needed: 2, got: groups.len() });
    }
    for g in groups {
        if g.len() < 2 {
            return Err(StatsError::TooFew { needed: 2, got: g.len() });
        }
        check_finite(g)?;
    }
    let k = groups.len();
    let n: usize = groups.iter().map(Vec::len).sum();
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let grand = mean(&all);
    let mut ssb = 0.0;
    let mut ssw = 0.0;
    for g in groups {
        let m = mean(g);
        ssb += g.len() as f64 * (m - grand).powi(2);
        ssw += g.iter().map(|x| (x - m).powi(2)).sum::<f64>();
    }
    let (df1, df2) = (k - 1, n - k);
    if is_flat(ssb + ssw, &all) {
        return Ok(f_result(0.0, 0.0, df1, df2));
    }
    Ok(f_result(ssb, ssw, df1, df2))
}

/// True when a total sum of squares is indistinguishable from rounding noise
/// at the data's magnitude, i.e. every value is effectively identical.
pub(crate) fn is_flat(tss: f64, values: &[f64]) -> bool {
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    tss <= values.len() as f64 * (8.0 * f64::EPSILON * scale).powi(2)
}

pub(crate) fn f_result(ss_model: f64, ss_resid: f64, df1: usize, df2: usize) -> FTestResult {
    let ms_between = ss_model / df1 as f64;
    let ms_within = ss_resid / df2 as f64;
    let (f, p) = if ss_resid == 0.0 {
        if ss_model == 0.0 {
            (0.0, 1.0)
        } else {
            (f64::INFINITY, 0.0)
        }
    } else {
        let f = ms_between / ms_within;
        (f, f_sf(f, df1 as f64, df2 as f64))
    };
    FTestResult { f, df1, df2, p, ms_between, ms_within }
}

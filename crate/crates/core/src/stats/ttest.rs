use serde::{Deserialize, Serialize};

use super::descriptive::mean;
use super::dist::t_two_sided_p;
use super::{check_finite, StatsError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TTestResult {
    pub t: f64,
    pub p: f64,
    pub df: f64,
    pub pooled: bool,
    /// Both groups have zero variance; `t` is 0 or infinite.
    pub degenerate: bool,
}

/// Two-sample t-test, pooled Student or Welch, two-sided.
pub fn two_sample_t(a: &[f64], b: &[f64], pooled: bool) -> Result<TTestResult, StatsError> {
    let got = a.len().min(b.len());
    if got < 2 {
        return Err(StatsError::TooFew { needed: 2, got });
    }
    check_finite(a)?;
    check_finite(b)?;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, mb) = (mean(a), mean(b));
    let ssa: f64 = a.iter().map(|x| (x - ma).powi(2)).sum();
    let ssb: f64 = b.iter().map(|x| (x - mb).powi(2)).sum();
    let (va, vb) = (ssa / (na - 1.0), ssb / (nb - 1.0));
    let diff = ma - mb;

    let (se, df) = if pooled {
        let sp2 = (ssa + ssb) / (na + nb - 2.0);
        ((sp2 * (1.0 / na + 1.0 / nb)).sqrt(), na + nb - 2.0)
    } else {
        let (qa, qb) = (va / na, vb / nb);
        let se2 = qa + qb;
        let df = if se2 == 0.0 {
            na + nb - 2.0
        } else {
            se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0))
        };
        (se2.sqrt(), df)
    };

    if se == 0.0 {
        let t = if diff == 0.0 { 0.0 } else { f64::INFINITY.copysign(diff) };
        return Ok(TTestResult {
            t,
            p: if diff == 0.0 { 1.0 } else { 0.0 },
            df,
            pooled,
            degenerate: true,
        });
    }
    let t = diff / se;
    Ok(TTestResult {
        t,
        p: t_two_sided_p(t, df),
        df,
        pooled,
        degenerate: false,
    })
}

use indexmap::IndexMap;
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::anova::{f_result, is_flat};
use super::dist::t_two_sided_p;
use super::report::stars;
use super::{check_finite, StatsError};

/// Name of the intercept term in result maps.
pub const CONSTANT: &str = "Constant";

/// Raw least-squares fit of `y` on the columns of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta: Vec<f64>,
    pub std_errors: Vec<f64>,
    pub rss: f64,
    pub df_resid: usize,
}

/// Ordinary least squares with classical standard errors, solved through QR.
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<OlsFit, StatsError> {
    let (n, k) = x.shape();
    if n <= k {
        return Err(StatsError::TooFew { needed: k + 1, got: n });
    }
    let qr = x.clone().qr();
    let r = qr.r();
    let max_diag = r.diagonal().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if let Some(col) = r.diagonal().iter().position(|v| v.abs() <= 1e-10 * max_diag.max(1.0)) {
        return Err(StatsError::SingularDesign(format!("column {col} is collinear")));
    }
    let qty = qr.q().transpose() * y;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| StatsError::SingularDesign("triangular solve failed".into()))?;
    let resid = y - x * &beta;
    let rss = resid.norm_squared();
    let df_resid = n - k;
    let sigma2 = rss / df_resid as f64;
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(k, k))
        .ok_or_else(|| StatsError::SingularDesign("R is not invertible".into()))?;
    // (X'X)^-1 = R^-1 R^-T, whose diagonal is the squared row norms of R^-1
    let std_errors = (0..k)
        .map(|i| (sigma2 * r_inv.row(i).norm_squared()).sqrt())
        .collect();
    Ok(OlsFit {
        beta: beta.iter().copied().collect(),
        std_errors,
        rss,
        df_resid,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub reference: String,
    pub intercept: f64,
    /// Dummy coefficient per non-reference label.
    pub coefficients: IndexMap<String, f64>,
    /// Keyed by term: `Constant` then each label.
    pub std_errors: IndexMap<String, f64>,
    pub t_values: IndexMap<String, f64>,
    pub p_values: IndexMap<String, f64>,
    pub stars: IndexMap<String, String>,
    pub f_stat: f64,
    pub f_p: f64,
    pub df_model: usize,
    pub df_resid: usize,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub n: usize,
}

/// Regresses values on dummies for every label except `reference`. Labels
/// are ordered by first appearance.
pub fn ols_dummy(scores: &[(f64, String)], reference: &str) -> Result<RegressionResult, StatsError> {
    let mut levels: Vec<&str> = Vec::new();
    for (_, label) in scores {
        if !levels.contains(&label.as_str()) {
            levels.push(label);
        }
    }
    ols_dummy_with_levels(scores, &levels, reference)
}

/// Like [`ols_dummy`] with an explicit level list; a declared level with no
/// observations makes the design singular.
pub fn ols_dummy_with_levels(
    scores: &[(f64, String)],
    levels: &[&str],
    reference: &str,
) -> Result<RegressionResult, StatsError> {
    if scores.len() < 3 {
        return Err(StatsError::TooFew { needed: 3, got: scores.len() });
    }
    if levels.len() < 2 {
        return Err(StatsError::TooFewGroups { needed: 2, got: levels.len() });
    }
    if !levels.contains(&reference) {
        return Err(StatsError::MissingReference(reference.to_string()));
    }
    let values: Vec<f64> = scores.iter().map(|(v, _)| *v).collect();
    check_finite(&values)?;
    for (_, label) in scores {
        if !levels.contains(&label.as_str()) {
            return Err(StatsError::UnknownLabel(label.clone()));
        }
    }
    let dummies: Vec<&str> = levels.iter().copied().filter(|l| *l != reference).collect();
    for level in levels {
        if !scores.iter().any(|(_, l)| l == level) {
            return Err(StatsError::SingularDesign(format!("level {level:?} has no observations")));
        }
    }

    let n = scores.len();
    let k = dummies.len() + 1;
    let x = DMatrix::from_fn(n, k, |i, j| match j {
        0 => 1.0,
        _ => f64::from(scores[i].1 == dummies[j - 1]),
    });
    let y = DVector::from_vec(values.clone());
    let fit = ols(&x, &y)?;

    let grand = values.iter().sum::<f64>() / n as f64;
    let tss: f64 = values.iter().map(|v| (v - grand).powi(2)).sum();
    let df_model = k - 1;
    let flat = is_flat(tss, &values);
    let (ftest, r_squared, adj_r_squared) = if flat {
        (f_result(0.0, 0.0, df_model, fit.df_resid), 0.0, 0.0)
    } else {
        let r2 = 1.0 - fit.rss / tss;
        let adj = 1.0 - (1.0 - r2) * (n - 1) as f64 / fit.df_resid as f64;
        (f_result((tss - fit.rss).max(0.0), fit.rss, df_model, fit.df_resid), r2, adj)
    };

    let terms: Vec<String> = std::iter::once(CONSTANT.to_string())
        .chain(dummies.iter().map(|d| d.to_string()))
        .collect();
    let mut std_errors = IndexMap::new();
    let mut t_values = IndexMap::new();
    let mut p_values = IndexMap::new();
    let mut star_map = IndexMap::new();
    // Flat data: dummies are exactly zero rather than rounding noise.
    let beta: Vec<f64> = (0..k).map(|i| if flat && i > 0 { 0.0 } else { fit.beta[i] }).collect();
    let se_of = |i: usize| if flat { 0.0 } else { fit.std_errors[i] };
    for (i, term) in terms.iter().enumerate() {
        let (b, se) = (beta[i], se_of(i));
        let t = if se == 0.0 {
            if b == 0.0 { 0.0 } else { f64::INFINITY.copysign(b) }
        } else {
            b / se
        };
        let p = t_two_sided_p(t, fit.df_resid as f64);
        std_errors.insert(term.clone(), se);
        t_values.insert(term.clone(), t);
        p_values.insert(term.clone(), p);
        star_map.insert(term.clone(), stars(p).to_string());
    }

    Ok(RegressionResult {
        reference: reference.to_string(),
        intercept: beta[0],
        coefficients: dummies
            .iter()
            .enumerate()
            .map(|(j, d)| (d.to_string(), beta[j + 1]))
            .collect(),
        std_errors,
        t_values,
        p_values,
        stars: star_map,
        f_stat: ftest.f,
        f_p: ftest.p,
        df_model,
        df_resid: fit.df_resid,
        r_squared,
        adj_r_squared,
        n,
    })
}

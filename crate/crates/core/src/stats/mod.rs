//! Regression, ANOVA and t-tests with the distribution functions they need.

mod anova;
mod descriptive;
pub mod dist;
mod ols;
mod report;
mod ttest;

pub use anova::{oneway_anova, FTestResult};
pub use descriptive::{mean, quantile, sample_std, summarize, SummaryStats};
pub use ols::{ols, ols_dummy, ols_dummy_with_levels, OlsFit, RegressionResult};
pub use report::{comparison_table, regression_table, stars, STARS_NOTE};
pub use ttest::{two_sample_t, TTestResult};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("empty input")]
    Empty,
    #[error("need at least {needed} observations, got {got}")]
    TooFew { needed: usize, got: usize },
    #[error("need at least {needed} groups, got {got}")]
    TooFewGroups { needed: usize, got: usize },
    #[error("reference label {0:?} not present")]
    MissingReference(String),
    #[error("observation label {0:?} is not a declared level")]
    UnknownLabel(String),
    #[error("design matrix is singular: {0}")]
    SingularDesign(String),
    #[error("non-finite value in input")]
    NonFinite,
}

pub(crate) fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

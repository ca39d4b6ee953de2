use std::fmt::Write;

use super::ols::{RegressionResult, CONSTANT};
use crate::text::GroupComparisonRow;

/// Footnote printed under regression tables.
pub const STARS_NOTE: &str = "* p < 0.05, ** p < 0.01, *** p < 0.001";

/// Fixed-point with `decimals` places; never prints a negative zero.
fn fixed(x: f64, decimals: usize) -> String {
    let s = format!("{x:.decimals$}");
    match s.strip_prefix('-') {
        Some(rest) if rest.chars().all(|c| c == '0' || c == '.') => rest.to_string(),
        _ => s,
    }
}

pub fn stars(p: f64) -> &'static str {
    if p < 0.001 {
        "***"
    } else if p < 0.01 {
        "**"
    } else if p < 0.05 {
        "*"
    } else {
        ""
    }
}

/// Fixed-width regression table: coefficient with stars, standard error in
/// parentheses beneath, then fit statistics and the significance note.
pub fn regression_table(result: &RegressionResult, dependent: &str) -> String {
    const W: usize = 24;
    let rule = "-".repeat(W + 20);
    let mut out = String::new();
    let _ = writeln!(out, "{:W$}Dependent variable:", "");
    let _ = writeln!(out, "{:W$}{}", "", dependent);
    let _ = writeln!(out, "{rule}");
    let mut row = |term: &str, coef: f64| {
        let _ = writeln!(out, "{term:W$}{}{}", fixed(coef, 3), result.stars[term]);
        let _ = writeln!(out, "{:W$}({})", "", fixed(result.std_errors[term], 3));
    };
    row(CONSTANT, result.intercept);
    for (label, coef) in &result.coefficients {
        row(label, *coef);
    }
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "{:W$}{}", "Observations", result.n);
    let _ = writeln!(out, "{:W$}{:.3}", "R2", result.r_squared);
    let _ = writeln!(out, "{:W$}{:.3}", "Adjusted R2", result.adj_r_squared);
    let _ = writeln!(
        out,
        "{:W$}{:.3} (df = {}; {}), p = {:.3}",
        "F Statistic", result.f_stat, result.df_model, result.df_resid, result.f_p
    );
    let _ = writeln!(out, "{rule}");
    let _ = writeln!(out, "Note: {STARS_NOTE}");
    out
}

/// Fixed-width per-attribute comparison of two groups: means, standard
/// deviations, t and p with stars, then the significance note.
pub fn comparison_table(rows: &[GroupComparisonRow], label_a: &str, label_b: &str) -> String {
    const W: usize = 24;
    const C: usize = 14;
    let mut out = String::new();
    let headers = [
        format!("{label_a} Mean"),
        format!("{label_b} Mean"),
        format!("{label_a} Std"),
        format!("{label_b} Std"),
        "t-statistic".to_string(),
        "p-value".to_string(),
    ];
    let width = headers.iter().map(|h| h.len() + 2).max().unwrap_or(C).max(C);
    let _ = write!(out, "{:W$}", "Attribute");
    for h in &headers {
        let _ = write!(out, "{h:>width$}");
    }
    out.push('\n');
    let _ = writeln!(out, "{}", "-".repeat(W + width * headers.len()));
    for r in rows {
        let _ = write!(out, "{:W$}", r.attribute.label());
        for x in [r.mean_a, r.mean_b, r.std_a, r.std_b, r.t] {
            let _ = write!(out, "{:>width$}", fixed(x, 3));
        }
        let p = format!("{:.3}{}", r.p, stars(r.p));
        let _ = writeln!(out, "{p:>width$}");
    }
    let _ = writeln!(out, "{}", "-".repeat(W + width * headers.len()));
    let _ = writeln!(out, "Note: {STARS_NOTE}");
    out
}

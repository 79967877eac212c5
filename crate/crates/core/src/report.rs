//! Plain-text tables with significance stars.

use crate::econometrics::{stars, Correlation, CrossCorrelation, GrangerTable, LaggedRegression};
use crate::forecast::ModelComparison;

pub const STAR_LEGEND: &str = "(p < 0.01: ***, p < 0.05: **, p < 0.1: *)";

/// p-value with its stars, scientific notation below 0.001.
pub fn format_p(p: f64) -> String {
    let num = if p != 0.0 && p < 1e-3 {
        format!("{p:.2e}")
    } else {
        format!("{p:.4}")
    };
    format!("{num}{}", stars(p))
}

/// Left-aligned first column, right-aligned others, two-space gutters.
pub fn render_grid(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for (i, row) in rows.iter().enumerate() {
        let mut line = String::new();
        for (c, cell) in row.iter().enumerate() {
            let pad = widths[c] - cell.chars().count();
            if c == 0 {
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            } else {
                line.push_str("  ");
                line.push_str(&" ".repeat(pad));
                line.push_str(cell);
            }
        }
        out.push_str(line.trim_end());
        out.push('\n');
        if i == 0 {
            let total: usize = widths.iter().sum::<usize>() + 2 * cols.saturating_sub(1);
            out.push_str(&"-".repeat(total));
            out.push('\n');
        }
    }
    out
}

pub fn correlation_table(rows: &[(String, String, Correlation)]) -> String {
    let mut grid = vec![vec!["pair".into(), "r".into(), "p-value".into(), "n".into()]];
    for (a, b, c) in rows {
        grid.push(vec![
            format!("{a} ~ {b}"),
            format!("{:.3}", c.coefficient),
            format_p(c.p_value),
            c.n.to_string(),
        ]);
    }
    let mut out = render_grid(&grid);
    out.push_str(STAR_LEGEND);
    out.push('\n');
    out
}

pub fn ccf_table(x_name: &str, y_name: &str, ccf: &CrossCorrelation) -> String {
    let mut grid = vec![vec!["lag".into(), "gamma".into()]];
    for (lag, g) in ccf.lags.iter().zip(&ccf.coefficients) {
        grid.push(vec![lag.to_string(), format!("{g:.4}")]);
    }
    let mut out = format!("cross-correlation of {x_name}[t+k] with {y_name}[t] (k > 0: {y_name} leads)\n");
    out.push_str(&render_grid(&grid));
    out
}

/// One row per direction, one column per lag.
pub fn granger_grid(tables: &[GrangerTable]) -> String {
    let lags: Vec<usize> = tables.first().map(|t| t.lags.clone()).unwrap_or_default();
    let mut grid = vec![std::iter::once(String::new())
        .chain(lags.iter().map(|l| l.to_string()))
        .collect::<Vec<_>>()];
    for t in tables {
        for dir in [t.forward().collect::<Vec<_>>(), t.backward().collect::<Vec<_>>()] {
            let mut row = vec![dir.first().map(|r| r.direction()).unwrap_or_default()];
            row.extend(dir.iter().map(|r| format_p(r.p_value)));
            grid.push(row);
        }
    }
    let mut out = render_grid(&grid);
    out.push_str(STAR_LEGEND);
    out.push('\n');
    out
}

/// Coefficient / p-value grid by lag and variable, plus fit summary.
pub fn regression_table(reg: &LaggedRegression) -> String {
    let mut header = vec!["lag".to_string()];
    for v in &reg.variables {
        header.push(format!("{v} coeff."));
        header.push(format!("{v} p"));
    }
    let mut grid = vec![header];
    for lag in 1..=reg.n_lags {
        let mut row = vec![lag.to_string()];
        for v in 0..reg.variables.len() {
            let term = reg.term(v, lag);
            row.push(format!("{:.4}", term.coefficient));
            row.push(format_p(term.p_value));
        }
        grid.push(row);
    }
    let fit = &reg.fit;
    let mut out = render_grid(&grid);
    out.push_str(STAR_LEGEND);
    out.push('\n');
    let icpt = reg.intercept();
    out.push_str(&format!(
        "Intercept: {:.4} (p = {})\n",
        icpt.coefficient,
        format_p(icpt.p_value)
    ));
    out.push_str(&format!(
        "Residual standard error: {:.3} on {} degrees of freedom.\n",
        fit.sigma(),
        fit.df_residual()
    ));
    out.push_str(&format!(
        "Multiple R-squared: {:.4}, Adjusted R-squared: {:.3} (baseline adjusted R-squared: {:.3}).\n",
        fit.r_squared, fit.adj_r_squared, reg.baseline.adj_r_squared
    ));
    if let Some((f, d1, d2, p)) = fit.overall_f() {
        out.push_str(&format!("F-statistic: {f:.3} on {d1} and {d2} DF, p-value: {p:.4e}\n"));
    }
    out
}

/// Two rows, Model 0 and Model 1, with MAPE and direction accuracy.
pub fn forecast_table(target: &str, cmp: &ModelComparison) -> String {
    let grid = vec![
        vec!["".into(), "model".into(), "MAPE".into(), "direction".into()],
        vec![
            target.to_string(),
            "Model 0".into(),
            format!("{:.3}", cmp.model0.mape),
            format!("{:.2}", cmp.model0.direction_accuracy),
        ],
        vec![
            String::new(),
            "Model 1".into(),
            format!("{:.3}", cmp.model1.mape),
            format!("{:.2}", cmp.model1.direction_accuracy),
        ],
    ];
    render_grid(&grid)
}

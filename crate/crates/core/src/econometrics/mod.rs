//! Correlation, cross-correlation, least squares with inference, Granger
//! causality and lagged multiple regression.

pub mod correlation;
pub mod distributions;
pub mod granger;
pub mod linalg;
pub mod ols;
pub mod regression;

pub use correlation::{cross_correlation, pearson, CcfMode, Correlation, CrossCorrelation};
pub use distributions::{f_cdf, f_sf, inc_beta, ln_gamma, t_cdf, t_two_sided_p};
pub use granger::{granger, granger_named, granger_table, GrangerResult, GrangerTable};
pub use linalg::Matrix;
pub use ols::{ols, RegressionFit};
pub use regression::{lagged_design, multiple_lagged_regression, LagTerm, LaggedDesign, LaggedRegression};

/// Significance marker: `***` below 0.01, `**` below 0.05, `*` below 0.1.
pub fn stars(p: f64) -> &'static str {
    if p < 0.01 {
        "***"
    } else if p < 0.05 {
        "**"
    } else if p < 0.1 {
        "*"
    } else {
        ""
    }
}

use serde::{Deserialize, Serialize};

use super::distributions::{f_sf, t_two_sided_p};
use super::linalg::{least_squares, Matrix};
use crate::error::{Error, Result};

/// One ordinary-least-squares fit. The first design column is the intercept.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub coefficients: Vec<f64>,
    pub stderr: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub rss: f64,
    pub tss: f64,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub n_obs: usize,
    pub n_params: usize,
    pub residuals: Vec<f64>,
}

impl RegressionFit {
    pub fn df_residual(&self) -> usize {
        self.n_obs - self.n_params
    }

    /// Residual standard error `sqrt(rss / (n - p))`.
    pub fn sigma(&self) -> f64 {
        (self.rss / self.df_residual() as f64).sqrt()
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        self.coefficients.iter().zip(row).map(|(b, x)| b * x).sum()
    }

    /// Overall F test of every slope against the intercept-only model:
    /// `(F, df_num, df_den, p)`. `None` for an intercept-only fit.
    pub fn overall_f(&self) -> Option<(f64, usize, usize, f64)> {
        let df_num = self.n_params.checked_sub(1).filter(|d| *d > 0)?;
        let df_den = self.df_residual();
        let f = if self.rss == 0.0 {
            f64::INFINITY
        } else {
            ((self.tss - self.rss).max(0.0) / df_num as f64) / (self.rss / df_den as f64)
        };
        let p = f_sf(f, df_num as f64, df_den as f64).ok()?;
        Some((f, df_num, df_den, p))
    }
}

/// Fits `y = Xb + e` by Householder QR with classical inference.
pub fn ols(design: &Matrix, y: &[f64]) -> Result<RegressionFit> {
    if let Some(v) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidInput(format!("non-finite response value {v}")));
    }
    let ls = least_squares(design, y)?;
    let (n, p) = (design.rows(), design.cols());
    let fitted = design.mul_vec(&ls.coefficients);
    let residuals: Vec<f64> = y.iter().zip(&fitted).map(|(a, f)| a - f).collect();
    let rss: f64 = residuals.iter().map(|e| e * e).sum();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let df = (n - p) as f64;
    let sigma2 = rss / df;

    let mut stderr = Vec::with_capacity(p);
    let mut t_stats = Vec::with_capacity(p);
    let mut p_values = Vec::with_capacity(p);
    for (b, g) in ls.coefficients.iter().zip(&ls.inverse_gram_diag) {
        let se = (sigma2 * g).sqrt();
        let t = if se > 0.0 {
            b / se
        } else if *b == 0.0 {
            0.0
        } else {
            b.signum() * f64::INFINITY
        };
        stderr.push(se);
        t_stats.push(t);
        p_values.push(t_two_sided_p(t, df)?);
    }

    let r_squared = if tss > 0.0 {
        (1.0 - rss / tss).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / df;

    Ok(RegressionFit {
        coefficients: ls.coefficients,
        stderr,
        t_stats,
        p_values,
        rss,
        tss,
        r_squared,
        adj_r_squared,
        n_obs: n,
        n_params: p,
        residuals,
    })
}

//! Dense row-major matrices and a Householder QR least-squares solver.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold below which a pivot marks a column as dependent.
const RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::InvalidInput("matrix rows differ in length".into()));
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data: rows.concat(),
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, v: f64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    /// Keeps the leading `n` columns.
    pub fn leading_columns(&self, n: usize) -> Self {
        let n = n.min(self.cols);
        let mut out = Matrix::zeros(self.rows, n);
        for r in 0..self.rows {
            out.data[r * n..(r + 1) * n].copy_from_slice(&self.row(r)[..n]);
        }
        out
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &r in rows {
            data.extend_from_slice(self.row(r));
        }
        Self {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `Xᵀv`.
    pub fn tr_mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for r in 0..self.rows {
            for (o, x) in out.iter_mut().zip(self.row(r)) {
                *o += x * v[r];
            }
        }
        out
    }
}

/// Least-squares solution together with the pieces needed for inference.
#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub coefficients: Vec<f64>,
    /// Diagonal of `(XᵀX)⁻¹`.
    pub inverse_gram_diag: Vec<f64>,
}

/// Solves `min ||Xb - y||` by Householder QR. Fails with the index of the
/// first column that is (numerically) a combination of earlier ones.
pub fn least_squares(x: &Matrix, y: &[f64]) -> Result<LeastSquares> {
    let (n, p) = (x.rows, x.cols);
    if y.len() != n {
        return Err(Error::InvalidInput(format!(
            "design has {n} rows but response has {} values",
            y.len()
        )));
    }
    if n <= p {
        return Err(Error::InsufficientLength {
            needed: p + 1,
            got: n,
        });
    }
    // Column-major working copy.
    let mut a: Vec<Vec<f64>> = (0..p).map(|c| x.column(c)).collect();
    let norms: Vec<f64> = a.iter().map(|c| norm(c)).collect();
    let mut qty = y.to_vec();

    for j in 0..p {
        let alpha = norm(&a[j][j..]);
        if norms[j] == 0.0 || alpha <= RANK_TOL * norms[j] {
            return Err(Error::RankDeficient { column: j });
        }
        let sign = if a[j][j] >= 0.0 { 1.0 } else { -1.0 };
        let mut v: Vec<f64> = a[j][j..].to_vec();
        v[0] += sign * alpha;
        let vnorm2: f64 = v.iter().map(|e| e * e).sum();
        let reflect = |col: &mut [f64]| {
            let dot: f64 = v.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            let f = 2.0 * dot / vnorm2;
            for (c, vi) in col.iter_mut().zip(&v) {
                *c -= f * vi;
            }
        };
        for col in a.iter_mut().skip(j) {
            reflect(&mut col[j..]);
        }
        reflect(&mut qty[j..]);
    }

    // R is stored in a[c][r] for r <= c.
    let r = |row: usize, col: usize| a[col][row];
    let mut coef = vec![0.0; p];
    for i in (0..p).rev() {
        let mut s = qty[i];
        for k in i + 1..p {
            s -= r(i, k) * coef[k];
        }
        coef[i] = s / r(i, i);
    }

    // R⁻¹ (upper triangular), then diag(R⁻¹R⁻ᵀ) as squared row norms.
    let mut rinv = vec![vec![0.0; p]; p];
    for c in 0..p {
        rinv[c][c] = 1.0 / r(c, c);
        for i in (0..c).rev() {
            let mut s = 0.0;
            for k in i + 1..=c {
                s += r(i, k) * rinv[k][c];
            }
            rinv[i][c] = -s / r(i, i);
        }
    }
    let inverse_gram_diag = rinv
        .iter()
        .map(|row| row.iter().map(|v| v * v).sum())
        .collect();

    Ok(LeastSquares {
        coefficients: coef,
        inverse_gram_diag,
    })
}

fn norm(v: &[f64]) -> f64 {
    // Scaled to avoid overflow on large regressors.
    let scale = v.iter().fold(0.0f64, |m, e| m.max(e.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    scale * v.iter().map(|e| (e / scale) * (e / scale)).sum::<f64>().sqrt()
}

//! Independent reference implementations shared by the test targets.
//! Nothing here calls into the numerical code under test.
#![allow(dead_code)]

use std::collections::BTreeMap;

use chrono::NaiveDate;
use sha2::{Digest, Sha256};

/// SHA-256 over `name \0 len bytes` for every file, in name order.
pub fn tree_hash<'a>(files: impl IntoIterator<Item = (&'a str, &'a [u8])>) -> String {
    let mut h = Sha256::new();
    for (name, bytes) in files {
        h.update(name.as_bytes());
        h.update([0]);
        h.update((bytes.len() as u64).to_le_bytes());
        h.update(bytes);
    }
    h.finalize().iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash of the report bundle produced from `tests/fixtures/report`, recorded
/// from the first audited run.
pub const REPORT_HASH: &str = "2bc4aded664b2315d02ab0f414204464c02abefd261728d50ae8f6f366bc31d9";

pub fn fixture(name: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

// ---------------------------------------------------------------------------
// Special functions by quadrature

/// Stirling series after shifting the argument above 15.
pub fn lgamma(mut x: f64) -> f64 {
    assert!(x > 0.0);
    let mut shift = 0.0;
    while x < 15.0 {
        shift += x.ln();
        x += 1.0;
    }
    let x2 = x * x;
    let series = 1.0 / (12.0 * x) - 1.0 / (360.0 * x * x2) + 1.0 / (1260.0 * x * x2 * x2)
        - 1.0 / (1680.0 * x * x2 * x2 * x2);
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + series - shift
}

fn simpson_rec(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson over 64 equal panels, with the tolerance taken relative
/// to a coarse first estimate of the integral (never below 1e-30 absolute).
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, rel_tol: f64) -> f64 {
    const PANELS: usize = 64;
    let h = (b - a) / PANELS as f64;
    let coarse: f64 = (0..=2 * PANELS)
        .map(|i| {
            let w = if i == 0 || i == 2 * PANELS { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            w * f(a + i as f64 * h / 2.0)
        })
        .sum::<f64>()
        * h
        / 6.0;
    let tol = (rel_tol * coarse.abs()).max(1e-30) / PANELS as f64;
    (0..PANELS)
        .map(|k| {
            let (lo, hi) = (a + k as f64 * h, if k + 1 == PANELS { b } else { a + (k + 1) as f64 * h });
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
            simpson_rec(f, lo, hi, fa, fm, fb, whole, tol, 40)
        })
        .sum()
}

/// `P(T > x)` for `x >= 0`, integrating the density after `u = x + s/(1-s)`.
pub fn t_upper_tail(x: f64, df: f64) -> f64 {
    assert!(x >= 0.0);
    let log_c = lgamma((df + 1.0) / 2.0) - lgamma(df / 2.0) - 0.5 * (df * std::f64::consts::PI).ln();
    let integrand = move |s: f64| {
        let one_minus = 1.0 - s;
        let u = x + s / one_minus;
        (log_c - (df + 1.0) / 2.0 * (u * u / df).ln_1p()).exp() / (one_minus * one_minus)
    };
    integrate(&integrand, 0.0, 1.0 - 1e-15, 1e-12)
}

pub fn t_cdf(x: f64, df: f64) -> f64 {
    if x < 0.0 {
        t_upper_tail(-x, df)
    } else {
        1.0 - t_upper_tail(x, df)
    }
}

pub fn t_two_sided(t: f64, df: f64) -> f64 {
    2.0 * t_upper_tail(t.abs(), df)
}

/// F distribution CDF, integrating over `s` with `u = s^2` so the density's
/// singularity at zero (one numerator degree of freedom) disappears.
pub fn f_cdf(x: f64, d1: f64, d2: f64) -> f64 {
    let log_c = 0.5 * d1 * d1.ln() + 0.5 * d2 * d2.ln() - (lgamma(d1 / 2.0) + lgamma(d2 / 2.0) - lgamma((d1 + d2) / 2.0));
    let integrand = move |s: f64| {
        if s == 0.0 {
            return if d1 == 1.0 { 2.0 * (log_c - 0.5 * (d1 + d2) * d2.ln()).exp() } else { 0.0 };
        }
        let u = s * s;
        let log = 2f64.ln() + (d1 - 1.0) * s.ln() + log_c - 0.5 * (d1 + d2) * (d1 * u + d2).ln();
        log.exp()
    };
    integrate(&integrand, 0.0, x.sqrt(), 1e-12)
}

// ---------------------------------------------------------------------------
// Least squares by the normal equations

pub struct OlsOracle {
    pub coefficients: Vec<f64>,
    pub stderr: Vec<f64>,
    pub t_stats: Vec<f64>,
    pub p_values: Vec<f64>,
    pub rss: f64,
    pub r_squared: f64,
    pub adj_r_squared: f64,
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn invert(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs())).unwrap();
        m.swap(col, pivot);
        let p = m[col][col];
        assert!(p.abs() > 1e-12, "singular matrix");
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col {
                let factor = m[r][col];
                if factor != 0.0 {
                    for c in 0..2 * n {
                        m[r][c] -= factor * m[col][c];
                    }
                }
            }
        }
    }
    m.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// `rows` must include the intercept column.
pub fn ols(rows: &[Vec<f64>], y: &[f64]) -> OlsOracle {
    let (n, p) = (rows.len(), rows[0].len());
    let mut xtx = vec![vec![0.0; p]; p];
    let mut xty = vec![0.0; p];
    for (row, yi) in rows.iter().zip(y) {
        for i in 0..p {
            xty[i] += row[i] * yi;
            for j in 0..p {
                xtx[i][j] += row[i] * row[j];
            }
        }
    }
    let inv = invert(&xtx);
    let beta: Vec<f64> = (0..p).map(|i| (0..p).map(|j| inv[i][j] * xty[j]).sum()).collect();
    let rss: f64 = rows
        .iter()
        .zip(y)
        .map(|(row, yi)| {
            let fit: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            (yi - fit).powi(2)
        })
        .sum();
    let mean = y.iter().sum::<f64>() / n as f64;
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let df = (n - p) as f64;
    let sigma2 = rss / df;
    let stderr: Vec<f64> = (0..p).map(|i| (sigma2 * inv[i][i]).sqrt()).collect();
    let t_stats: Vec<f64> = beta.iter().zip(&stderr).map(|(b, s)| b / s).collect();
    let p_values = t_stats.iter().map(|t| t_two_sided(*t, df)).collect();
    let r_squared = 1.0 - rss / tss;
    OlsOracle {
        coefficients: beta,
        stderr,
        t_stats,
        p_values,
        rss,
        r_squared,
        adj_r_squared: 1.0 - (1.0 - r_squared) * (n as f64 - 1.0) / df,
    }
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

// ---------------------------------------------------------------------------
// Document-by-document indicator recounts

pub fn words(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        if c.is_alphanumeric() {
            cur.extend(c.to_lowercase());
        } else if !cur.is_empty() {
            out.push(std::mem::take(&mut cur));
        }
    }
    if !cur.is_empty() {
        out.push(cur);
    }
    out
}

pub fn mentions(text: &str, phrase: &str) -> bool {
    let hay = words(text);
    let needle = words(phrase);
    !needle.is_empty() && (0..hay.len()).any(|i| hay[i..].starts_with(&needle))
}

/// `docs` in input order; returns day → mean negative-token share.
pub fn recount_nns(docs: &[(NaiveDate, String)], negative: &[&str]) -> BTreeMap<NaiveDate, f64> {
    let mut sums: BTreeMap<NaiveDate, (f64, usize)> = BTreeMap::new();
    for (d, text) in docs {
        let w = words(text);
        let share = if w.is_empty() {
            0.0
        } else {
            w.iter().filter(|t| negative.contains(&t.as_str())).count() as f64 / w.len() as f64
        };
        let e = sums.entry(*d).or_insert((0.0, 0));
        e.0 += share;
        e.1 += 1;
    }
    sums.into_iter().map(|(d, (s, n))| (d, s / n as f64)).collect()
}

pub fn recount_tis(docs: &[(NaiveDate, String)]) -> BTreeMap<NaiveDate, f64> {
    let mut counts: BTreeMap<NaiveDate, (usize, usize)> = BTreeMap::new();
    for (d, text) in docs {
        let e = counts.entry(*d).or_insert((0, 0));
        e.0 += usize::from(mentions(text, "bullish"));
        e.1 += usize::from(mentions(text, "bearish"));
    }
    counts
        .into_iter()
        .filter(|(_, (b, r))| b + r > 0)
        .map(|(d, (b, r))| (d, b as f64 / (b + r) as f64))
        .collect()
}

pub fn recount_volume(docs: &[(NaiveDate, String)], term: &str) -> BTreeMap<NaiveDate, f64> {
    let mut counts: BTreeMap<NaiveDate, f64> = BTreeMap::new();
    for (d, text) in docs {
        *counts.entry(*d).or_insert(0.0) += if mentions(text, term) { 1.0 } else { 0.0 };
    }
    counts
}

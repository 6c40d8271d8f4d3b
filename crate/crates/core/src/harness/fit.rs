//! Least-squares rate fits and oracle-complexity curves.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    /// Log-log slope for power fits, per-step ratio for geometric fits.
    pub rate: f64,
    pub r_squared: f64,
}

fn window_points(t: &[f64], means: &[f64], window: (f64, f64)) -> Result<Vec<(f64, f64)>> {
    if t.len() != means.len() {
        return Err(Error::DimensionMismatch { expected: t.len(), got: means.len() });
    }
    let pts: Vec<(f64, f64)> = t
        .iter()
        .zip(means)
        .filter(|(ti, _)| **ti >= window.0 && **ti <= window.1)
        .map(|(a, b)| (*a, *b))
        .collect();
    if pts.len() < 5 {
        return Err(Error::param("window", format!("needs at least 5 points, has {}", pts.len())));
    }
    if let Some((ti, m)) = pts.iter().find(|(_, m)| !(*m > 0.0)) {
        return Err(Error::param("means", format!("nonpositive mean {m} at t = {ti}")));
    }
    Ok(pts)
}

fn least_squares(pts: &[(f64, f64)]) -> (f64, f64) {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    let syy: f64 = pts.iter().map(|(_, y)| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = pts.iter().map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let r2 = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    (slope, r2)
}

/// Slope of `log(mean)` against `log(t)` over `window`.
pub fn fit_power_rate(t: &[f64], means: &[f64], window: (f64, f64)) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = window_points(t, means, window)?.into_iter().map(|(x, y)| (x.ln(), y.ln())).collect();
    let (rate, r_squared) = least_squares(&pts);
    Ok(RateFit { rate, r_squared })
}

/// `exp` of the slope of `log(mean)` against `t` over `window`.
pub fn fit_geometric_rate(t: &[f64], means: &[f64], window: (f64, f64)) -> Result<RateFit> {
    let pts: Vec<(f64, f64)> = window_points(t, means, window)?.into_iter().map(|(x, y)| (x, y.ln())).collect();
    let (slope, r_squared) = least_squares(&pts);
    Ok(RateFit { rate: slope.exp(), r_squared })
}

/// Default fit window: drops the first 10% of iterations.
pub fn default_window(horizon: u64) -> (f64, f64) {
    (((horizon as f64) * 0.1).ceil().max(1.0), horizon as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexityRow {
    pub eps: f64,
    /// `None` when the tolerance is never reached.
    pub t_hit: Option<u64>,
    pub cum_calls: Option<u64>,
}

/// First iteration whose mean gap is at most each tolerance.
pub fn complexity_points(t: &[u64], gap_means: &[f64], cum_calls: &[u64], eps_grid: &[f64]) -> Vec<ComplexityRow> {
    eps_grid
        .iter()
        .map(|&eps| {
            let hit = gap_means.iter().position(|g| *g <= eps);
            ComplexityRow { eps, t_hit: hit.map(|i| t[i]), cum_calls: hit.map(|i| cum_calls[i]) }
        })
        .collect()
}

/// Log-log slope of oracle calls against `1 / eps` over the reached rows.
pub fn complexity_slope(rows: &[ComplexityRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.cum_calls.map(|c| ((1.0 / r.eps).ln(), (c as f64).ln())))
        .collect();
    (pts.len() >= 2).then(|| least_squares(&pts).0)
}

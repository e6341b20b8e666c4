//! Discrete power-law fitting and the densification exponent.

use serde::{Deserialize, Serialize};

use crate::error::{insufficient, Error, Result};

pub const MIN_TAIL_VALUES: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    /// Maximum-likelihood exponent of `P(x) ∝ x^-α`, `x ≥ x_min`.
    pub exponent: f64,
    /// Closed-form approximation `1 + n / Σ ln(x / (x_min − ½))`.
    pub approx_exponent: f64,
    /// Negated slope of a least-squares line through the log-binned density.
    pub binned_exponent: Option<f64>,
    pub x_min: u64,
    pub tail_count: usize,
}

/// Hurwitz zeta `ζ(s, q) = Σ_{k≥0} (k + q)^-s` for `s > 1`, `q > 0`,
/// by Euler–Maclaurin summation.
pub fn hurwitz_zeta(s: f64, q: f64) -> f64 {
    // B_2j / (2j)!
    const COEFFS: [f64; 7] = [
        1.0 / 12.0,
        -1.0 / 720.0,
        1.0 / 30_240.0,
        -1.0 / 1_209_600.0,
        1.0 / 47_900_160.0,
        -691.0 / 1_307_674_368_000.0,
        1.0 / 74_724_249_600.0,
    ];
    const HEAD: usize = 16;
    let mut sum = 0.0;
    for k in 0..HEAD {
        sum += (q + k as f64).powf(-s);
    }
    let a = q + HEAD as f64;
    sum += a.powf(1.0 - s) / (s - 1.0) + 0.5 * a.powf(-s);
    // Rising factorial s(s+1)...(s+2j-2) times a^(-s-2j+1).
    let mut rising = s;
    let mut power = a.powf(-s - 1.0);
    for (j, c) in COEFFS.iter().enumerate() {
        sum += c * rising * power;
        let m = 2.0 * j as f64;
        rising *= (s + m + 1.0) * (s + m + 2.0);
        power /= a * a;
    }
    sum
}

/// Fits a discrete power law to the values at or above `x_min` (default: the
/// smallest value). The primary estimate maximizes the exact discrete
/// likelihood `−n ln ζ(α, x_min) − α Σ ln x`.
pub fn fit_power_law(values: &[u64], x_min: Option<u64>) -> Result<PowerLawFit> {
    let x_min = match x_min {
        Some(x) if x >= 1 => x,
        Some(_) => return Err(Error::InvalidArgument("x_min must be positive".into())),
        None => values
            .iter()
            .copied()
            .filter(|&v| v >= 1)
            .min()
            .ok_or_else(|| insufficient("no positive values"))?,
    };
    let tail: Vec<u64> = values.iter().copied().filter(|&v| v >= x_min).collect();
    if tail.len() < MIN_TAIL_VALUES {
        return Err(insufficient(format!(
            "{} values at or above x_min = {x_min}, need {MIN_TAIL_VALUES}",
            tail.len()
        )));
    }
    if tail.iter().all(|&v| v == tail[0]) {
        return Err(insufficient("all tail values are equal"));
    }
    let n = tail.len() as f64;
    let sum_ln: f64 = tail.iter().map(|&v| (v as f64).ln()).sum();
    let shifted: f64 = tail
        .iter()
        .map(|&v| (v as f64 / (x_min as f64 - 0.5)).ln())
        .sum();
    let approx_exponent = 1.0 + n / shifted;

    let q = x_min as f64;
    let neg_ll = |alpha: f64| n * hurwitz_zeta(alpha, q).ln() + alpha * sum_ln;
    let exponent = golden_section_min(neg_ll, 1.0 + 1e-6, 30.0, 1e-10);

    Ok(PowerLawFit {
        exponent,
        approx_exponent,
        binned_exponent: log_binned_exponent(&tail, x_min),
        x_min,
        tail_count: tail.len(),
    })
}

fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

/// Bins `[x_min·2^k, x_min·2^(k+1))`, density per unit width, regressed in log-log.
fn log_binned_exponent(tail: &[u64], x_min: u64) -> Option<f64> {
    let max = *tail.iter().max()?;
    let mut edges = vec![x_min];
    while *edges.last()? <= max {
        let last = *edges.last()?;
        edges.push(last * 2);
    }
    let mut counts = vec![0usize; edges.len() - 1];
    for &v in tail {
        let bin = edges.partition_point(|&e| e <= v) - 1;
        counts[bin] += 1;
    }
    let points: Vec<(f64, f64)> = counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(i, &c)| {
            let (lo, hi) = (edges[i] as f64, edges[i + 1] as f64);
            let centre = (lo * (hi - 1.0)).sqrt();
            (centre.ln(), (c as f64 / (hi - lo)).ln())
        })
        .collect();
    if points.len() < 2 {
        return None;
    }
    least_squares_slope(&points).map(|s| -s)
}

pub(crate) fn least_squares_slope(points: &[(f64, f64)]) -> Option<f64> {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Exponent `γ` of `e ∝ n^γ`: least-squares slope of `ln e` on `ln n`.
pub fn densification_fit(series: &[(u64, u64)]) -> Result<f64> {
    if series.len() < 3 {
        return Err(insufficient(format!(
            "densification fit needs 3 points, got {}",
            series.len()
        )));
    }
    if let Some(&(n, e)) = series.iter().find(|&&(n, e)| n < 2 || e < 1) {
        return Err(Error::InvalidArgument(format!(
            "point ({n}, {e}) needs n ≥ 2 and e ≥ 1"
        )));
    }
    let points: Vec<(f64, f64)> = series
        .iter()
        .map(|&(n, e)| ((n as f64).ln(), (e as f64).ln()))
        .collect();
    least_squares_slope(&points)
        .ok_or_else(|| Error::Undefined("all snapshots have the same node count".into()))
}

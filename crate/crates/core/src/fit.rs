//! Power-law fits on log–log data.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 4;

/// `ln y ≈ intercept − beta·ln x`; `beta > 0` means decay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub beta: f64,
    pub intercept: f64,
    /// `None` when the data have no variance (r² undefined).
    pub r_squared: Option<f64>,
    /// Indices of input points dropped because `y <= 0`.
    pub excluded: Vec<usize>,
}

pub fn fit_exponent(xs: &[f64], ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != ys.len() {
        return Err(Error::config("abs_overlaps", "length differs from N_values"));
    }
    let logs: Vec<f64> = ys
        .iter()
        .map(|&y| if y > 0.0 { y.ln() } else { f64::NEG_INFINITY })
        .collect();
    fit_log_exponent(xs, &logs)
}

/// Same fit, taking `ln y` directly so that values below the smallest
/// double still count. Non-finite logs are excluded and flagged.
pub fn fit_log_exponent(xs: &[f64], log_ys: &[f64]) -> Result<PowerLawFit> {
    if xs.len() != log_ys.len() {
        return Err(Error::config("abs_overlaps", "length differs from N_values"));
    }
    let mut excluded = Vec::new();
    let mut lx = Vec::with_capacity(xs.len());
    let mut ly = Vec::with_capacity(xs.len());
    for (i, (&x, &y)) in xs.iter().zip(log_ys).enumerate() {
        if !(x > 0.0) {
            return Err(Error::config("N_values", format!("non-positive abscissa {x}")));
        }
        if y.is_finite() {
            lx.push(x.ln());
            ly.push(y);
        } else {
            excluded.push(i);
        }
    }
    if lx.len() < MIN_FIT_POINTS {
        return Err(Error::config(
            "N_values",
            format!(
                "power-law fit needs at least {MIN_FIT_POINTS} usable points, got {}",
                lx.len()
            ),
        ));
    }
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::config("N_values", "all abscissae coincide"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    // treat round-off-level scatter as no variance at all
    let r_squared = if syy <= 1e-28 * n * my.abs().max(1.0).powi(2) {
        None
    } else {
        let ss_res: f64 = lx
            .iter()
            .zip(&ly)
            .map(|(x, y)| (y - intercept - slope * x).powi(2))
            .sum();
        Some(1.0 - ss_res / syy)
    };
    Ok(PowerLawFit {
        beta: -slope,
        intercept,
        r_squared,
        excluded,
    })
}

//! Browser bindings for three small interactive studies. Every function
//! returns a flat `Float64Array`; the layout is given in each doc comment.

use catastrophe_core::avalanche::{simulate_avalanche, AvalancheParams};
use catastrophe_core::grid::Shape;
use catastrophe_core::kinetics::{contact_angle_factor, seeded_rate_ratio, NucleationParams};
use catastrophe_core::overlap::{overlap_scan, ScanConfig};
use wasm_bindgen::prelude::*;

fn js_err(e: catastrophe_core::Error) -> JsError {
    JsError::new(&e.to_string())
}

/// Overlap ladder at unit density for N = 8, 16, ... up to `n_max`.
///
/// Returns `[beta, N_0, |S_0|, N_1, |S_1|, ...]`.
#[wasm_bindgen]
pub fn overlap_decay(gaussian: bool, strength: f64, range: f64, n_max: usize) -> Result<Vec<f64>, JsError> {
    let mut ns = vec![8usize];
    while ns.last().unwrap() * 2 <= n_max {
        ns.push(ns.last().unwrap() * 2);
    }
    let shape = if gaussian { Shape::Gaussian } else { Shape::SquareWell };
    let scan = overlap_scan(&ScanConfig::new(shape, strength, range, 1.0, ns)).map_err(js_err)?;
    let mut out = vec![scan.fit.beta];
    for p in &scan.points {
        out.push(p.n as f64);
        out.push(p.overlap.abs);
    }
    Ok(out)
}

/// Single-seed avalanche histogram.
///
/// Returns `[mean, analytic_mean, start_0, freq_0, start_1, freq_1, ...]`.
#[wasm_bindgen]
pub fn avalanche_histogram(alpha_gap: f64, trials: u32, bin_width: u32, seed: u32) -> Result<Vec<f64>, JsError> {
    let mut p = AvalancheParams::new(alpha_gap, 1.0, 1, trials as u64, seed as u64);
    p.bin_width = bin_width.max(1) as u64;
    let stats = simulate_avalanche(&p).map_err(js_err)?;
    let mut out = vec![stats.mean_gain, p.analytic_mean()];
    for bin in &stats.histogram {
        out.push(bin.start as f64);
        out.push(bin.frequency as f64);
    }
    Ok(out)
}

/// Contact-angle sweep over `[0, π]` in `samples` steps.
///
/// Returns `[theta_0, f_0, log10_ratio_0, theta_1, ...]`.
#[wasm_bindgen]
pub fn seeded_curve(surface_tension: f64, bulk_drive: f64, thermal_energy: f64, samples: u32) -> Result<Vec<f64>, JsError> {
    let samples = samples.max(2);
    let mut out = Vec::with_capacity(3 * samples as usize);
    for i in 0..samples {
        let theta = std::f64::consts::PI * i as f64 / (samples - 1) as f64;
        let ratio = seeded_rate_ratio(&NucleationParams {
            surface_tension,
            bulk_drive,
            contact_angle: theta,
            temperature: thermal_energy,
        })
        .map_err(js_err)?;
        out.extend([theta, contact_angle_factor(theta).map_err(js_err)?, ratio.log10()]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlap_layout() {
        let out = overlap_decay(false, -5.0, 1.0, 64).unwrap();
        assert_eq!(out.len(), 1 + 2 * 4);
        assert_eq!(out[1], 8.0);
        assert!(out[0] > 0.0);
        assert!(out[2] > out[8]);
    }

    #[test]
    fn avalanche_layout() {
        let out = avalanche_histogram(2.0, 500, 5, 1).unwrap();
        assert!((out[1] - 2f64.exp()).abs() < 1e-12);
        let total: f64 = out[2..].chunks(2).map(|c| c[1]).sum();
        assert_eq!(total, 500.0);
    }

    #[test]
    fn curve_endpoints() {
        let out = seeded_curve(0.072, 2.5e5, 4.14e-21, 5).unwrap();
        assert_eq!(out.len(), 15);
        assert_eq!(out[1], 0.0);
        assert_eq!(out[13], 1.0);
        assert_eq!(out[14], 0.0);
    }
}

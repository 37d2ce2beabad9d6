//! Runs one validated study and lays its results out as tables.

use catastrophe_core::avalanche::{simulate_avalanche, AvalancheParams};
use catastrophe_core::grid::{Geometry, Grid, PotentialSpec};
use catastrophe_core::kinetics::{
    contact_angle_factor, critical_radius_and_min_deposit, homogeneous_barrier, lifetime_ratio,
    seeded_rate_ratio, wkb_rate, MIN_DEPOSIT_MODEL,
};
use catastrophe_core::overlap::{coefficient_scan_at_density, overlap_scan, site_overlap_ladder, ScanConfig, SiteLadderConfig};
use catastrophe_core::spectral::{extract_phase_shifts, grid_adequacy, solve_spectrum, AdequacyReport};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{CoefficientConfig, KineticsConfig, SpectrumConfig, Study};
use crate::error::CliError;
use crate::output::Table;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdequacyEntry {
    pub n: usize,
    pub report: AdequacyReport,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub tables: Vec<Table>,
    pub adequacy: Vec<AdequacyEntry>,
    pub summary: Value,
}

pub fn execute(study: &Study) -> Result<Outcome, CliError> {
    match study {
        Study::Spectrum(c) => spectrum(c),
        Study::OverlapScan(c) => overlap(c),
        Study::CoefficientScan(c) => coefficients(c),
        Study::SiteOverlap(c) => sites(c),
        Study::Kinetics(c) => kinetics(c),
        Study::Avalanche(p) => avalanche(p),
    }
}

fn spectrum(c: &SpectrumConfig) -> Result<Outcome, CliError> {
    let grid = Grid::new(c.length, c.n_points, c.geometry)?;
    let pot = PotentialSpec::new(c.shape, c.strength, c.range, c.center);
    let spec = solve_spectrum(&grid, &pot, c.n_eigenpairs)?;

    let mut levels = Table::new("spectrum.csv", &[("level", "1"), ("energy", "hbar^2/(2m length^2)")]);
    for (i, &e) in spec.energies().iter().enumerate() {
        levels.push(vec![(i + 1).into(), e.into()]);
    }
    let mut tables = vec![levels];
    let mut summary = json!({
        "ground_energy": spec.energies()[0],
        "fermi_sea_energy": spec.fermi_sea_energy(c.n_particles.min(spec.len())),
        "orthonormality_error": spec.orthonormality_error(),
    });

    let has_scattering = spec.energies().last().is_some_and(|&e| e > 0.0);
    if c.geometry == Geometry::RadialSwave && c.center == 0.0 && has_scattering {
        let free = solve_spectrum(&grid, &PotentialSpec::free(), c.n_eigenpairs)?;
        let table = extract_phase_shifts(&free, &spec, c.n_eigenpairs)?;
        let mut shifts = Table::new(
            "phase_shifts.csv",
            &[("level", "1"), ("momentum", "1/length"), ("delta", "rad")],
        );
        for ((&n, &k), &d) in table.levels.iter().zip(&table.momenta).zip(&table.deltas) {
            shifts.push(vec![n.into(), k.into(), d.into()]);
        }
        tables.push(shifts);
        summary["bound_states"] = json!(table.bound_states);
        summary["branch_offset"] = json!(table.branch_offset);
    }
    Ok(Outcome {
        tables,
        adequacy: vec![AdequacyEntry {
            n: c.n_particles,
            report: grid_adequacy(&grid, &pot, c.n_particles),
        }],
        summary,
    })
}

fn overlap(c: &ScanConfig) -> Result<Outcome, CliError> {
    let scan = overlap_scan(c)?;
    let mut t = Table::new(
        "overlap_scan.csv",
        &[
            ("N", "particles"),
            ("length", "length"),
            ("n_points", "1"),
            ("abs_overlap", "1"),
            ("log_abs_overlap", "1"),
            ("sign", "1"),
            ("delta_F", "rad"),
        ],
    );
    for p in &scan.points {
        t.push(vec![
            p.n.into(),
            p.length.into(),
            p.n_points.into(),
            p.overlap.abs.into(),
            p.overlap.log_abs.into(),
            (p.overlap.sign as i64).into(),
            // the free system has no shift
            p.delta_f.unwrap_or(0.0).into(),
        ]);
    }
    Ok(Outcome {
        tables: vec![t],
        adequacy: scan
            .points
            .iter()
            .map(|p| AdequacyEntry {
                n: p.n,
                report: p.adequacy.clone(),
            })
            .collect(),
        summary: json!({ "fit": scan.fit }),
    })
}

fn coefficients(c: &CoefficientConfig) -> Result<Outcome, CliError> {
    let mut t = Table::new(
        "coefficients.csv",
        &[
            ("N", "particles"),
            ("excitation_order", "1"),
            ("window", "levels"),
            ("configurations", "1"),
            ("ground_coefficient", "1"),
            ("max_coefficient", "1"),
            ("captured_weight", "1"),
            ("argmax_hole_1", "level"),
            ("argmax_hole_2", "level"),
            ("argmax_particle_1", "level"),
            ("argmax_particle_2", "level"),
        ],
    );
    for point in c.points() {
        let r = coefficient_scan_at_density(&point)?;
        let slot = |v: &[usize], i: usize| v.get(i).copied().unwrap_or(0);
        t.push(vec![
            r.n.into(),
            r.excitation_order.into(),
            r.window.into(),
            r.configurations.into(),
            r.ground_coefficient.into(),
            r.max_coefficient.into(),
            r.captured_weight.into(),
            slot(&r.argmax.holes, 0).into(),
            slot(&r.argmax.holes, 1).into(),
            slot(&r.argmax.particles, 0).into(),
            slot(&r.argmax.particles, 1).into(),
        ]);
    }
    Ok(Outcome {
        tables: vec![t],
        adequacy: Vec::new(),
        summary: json!({ "level_columns": "1-based; 0 marks an unused slot" }),
    })
}

fn sites(c: &SiteLadderConfig) -> Result<Outcome, CliError> {
    let ladder = site_overlap_ladder(c)?;
    let mut t = Table::new(
        "site_overlap.csv",
        &[
            ("N", "particles"),
            ("length", "length"),
            ("site_a", "length"),
            ("site_b", "length"),
            ("cross_abs", "1"),
            ("a_vs_free_abs", "1"),
            ("b_vs_free_abs", "1"),
            ("log_cross_abs", "1"),
        ],
    );
    for s in &ladder {
        t.push(vec![
            s.n.into(),
            (s.n as f64 / c.density).into(),
            s.site_a.into(),
            s.site_b.into(),
            s.cross.abs.into(),
            s.a_vs_free.abs.into(),
            s.b_vs_free.abs.into(),
            s.cross.log_abs.into(),
        ]);
    }
    Ok(Outcome {
        tables: vec![t],
        adequacy: Vec::new(),
        summary: json!({}),
    })
}

fn kinetics(c: &KineticsConfig) -> Result<Outcome, CliError> {
    let mut tables = Vec::new();
    let mut summary = json!({});
    if let Some(n) = &c.nucleation {
        let mut sweep = Table::new(
            "nucleation.csv",
            &[
                ("contact_angle", "rad"),
                ("factor", "1"),
                ("seeded_barrier", "J"),
                ("ln_rate_ratio", "1"),
                ("log10_rate_ratio", "1"),
            ],
        );
        for &theta in &n.contact_angles {
            let p = n.params(theta);
            let f = contact_angle_factor(theta)?;
            let ratio = seeded_rate_ratio(&p)?;
            sweep.push(vec![
                theta.into(),
                f.into(),
                (f * homogeneous_barrier(&p)?).into(),
                ratio.ln.into(),
                ratio.log10().into(),
            ]);
        }
        let p = n.params(n.contact_angles[0]);
        let nucleus = critical_radius_and_min_deposit(&p)?;
        let mut critical = Table::new(
            "critical_nucleus.csv",
            &[
                ("homogeneous_barrier", "J"),
                ("critical_radius", "m"),
                ("min_deposit", "J"),
            ],
        );
        critical.push(vec![
            homogeneous_barrier(&p)?.into(),
            nucleus.radius.into(),
            nucleus.min_deposit.into(),
        ]);
        tables.push(sweep);
        tables.push(critical);
        summary["min_deposit_model"] = json!(MIN_DEPOSIT_MODEL);
    }
    if let Some(b) = &c.barrier {
        let mut wkb = Table::new(
            "wkb.csv",
            &[
                ("profile", "name"),
                ("turning_point_a", "length"),
                ("turning_point_b", "length"),
                ("exponent", "1"),
                ("rate", "1/time"),
                ("lifetime", "time"),
            ],
        );
        let mut profiles = vec![("unperturbed", &b.unperturbed)];
        if let Some(p) = &b.perturbed {
            profiles.push(("perturbed", p));
        }
        for (name, profile) in profiles {
            let r = wkb_rate(profile)?;
            wkb.push(vec![
                name.into(),
                r.turning_points.0.into(),
                r.turning_points.1.into(),
                r.exponent.into(),
                r.rate.into(),
                r.lifetime().into(),
            ]);
        }
        tables.push(wkb);
        if let Some(p) = &b.perturbed {
            let ratio = lifetime_ratio(&b.unperturbed, p)?;
            let mut t = Table::new(
                "lifetime_ratio.csv",
                &[("ln_rate_ratio", "1"), ("log10_rate_ratio", "1")],
            );
            t.push(vec![ratio.ln.into(), ratio.log10().into()]);
            tables.push(t);
        }
    }
    Ok(Outcome {
        tables,
        adequacy: Vec::new(),
        summary,
    })
}

fn avalanche(p: &AvalancheParams) -> Result<Outcome, CliError> {
    let stats = simulate_avalanche(p)?;
    let mut hist = Table::new(
        "avalanche_histogram.csv",
        &[("count", "electrons"), ("frequency", "trials")],
    );
    for bin in &stats.histogram {
        hist.push(vec![bin.start.into(), bin.frequency.into()]);
    }
    let mut summary = Table::new(
        "avalanche_summary.csv",
        &[
            ("trials", "1"),
            ("mean_gain", "electrons"),
            ("variance_gain", "electrons^2"),
            ("analytic_mean", "electrons"),
            ("threshold", "electrons"),
            ("trigger_fraction", "1"),
            ("bin_width", "electrons"),
        ],
    );
    summary.push(vec![
        stats.trials.into(),
        stats.mean_gain.into(),
        stats.variance_gain.into(),
        p.analytic_mean().into(),
        p.threshold.into(),
        stats.trigger_fraction.unwrap_or(0.0).into(),
        stats.bin_width.into(),
    ]);
    Ok(Outcome {
        tables: vec![hist, summary],
        adequacy: Vec::new(),
        summary: json!({ "histogram_rows": "count is the lower edge of each non-empty bin" }),
    })
}

//! Many-body overlaps between Slater determinants built from two spectra.
//!
//! For determinants of occupied orbitals `{φ_i}` and `{ψ_j}` the overlap is
//! `det M` with `M_ij = ⟨φ_i, ψ_j⟩_h`. Everything here is evaluated in the
//! log domain because `|S_N|` underflows long before `N` gets interesting.

use nalgebra::DMatrix;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fit::{fit_log_exponent, PowerLawFit};
use crate::grid::{Geometry, Grid, PotentialSpec, Shape};
use crate::linalg::{log_det, LogDet};
use crate::spectral::{
    extract_phase_shifts, max_adequate_spacing, require_adequate, solve_spectrum, AdequacyReport,
    Spectrum, ADEQUACY_DIVISOR,
};
use crate::tridiag::dot;

/// Gram matrix `M_ij = ⟨a_i, b_j⟩_h` of the first `n` orbitals of each spectrum.
pub fn orbital_overlap_matrix(a: &Spectrum, b: &Spectrum, n: usize) -> Result<DMatrix<f64>> {
    gram(a, n, b, n)
}

fn gram(a: &Spectrum, rows: usize, b: &Spectrum, cols: usize) -> Result<DMatrix<f64>> {
    if !a.grid().same_as(b.grid()) {
        return Err(Error::config("grid", "spectra live on different grids"));
    }
    if rows > a.len() || cols > b.len() {
        return Err(Error::config(
            "n",
            format!(
                "need {rows} and {cols} orbitals, spectra hold {} and {}",
                a.len(),
                b.len()
            ),
        ));
    }
    let h = a.grid().spacing();
    let column = |j: usize| -> Vec<f64> {
        let psi = b.orbital(j);
        (0..rows).map(|i| h * dot(a.orbital(i), psi)).collect()
    };
    #[cfg(feature = "parallel")]
    let columns: Vec<Vec<f64>> = (0..cols).into_par_iter().map(column).collect();
    #[cfg(not(feature = "parallel"))]
    let columns: Vec<Vec<f64>> = (0..cols).map(column).collect();
    Ok(DMatrix::from_fn(rows, cols, |i, j| columns[j][i]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlaterOverlap {
    pub abs: f64,
    pub log_abs: f64,
    pub sign: f64,
    pub singular: bool,
}

impl From<LogDet> for SlaterOverlap {
    fn from(d: LogDet) -> Self {
        SlaterOverlap {
            abs: d.abs(),
            log_abs: d.log_abs,
            sign: d.sign,
            singular: d.singular,
        }
    }
}

/// Overlap of the `n`-fermion ground states of two spectra on the same grid.
pub fn slater_overlap(a: &Spectrum, b: &Spectrum, n: usize) -> Result<SlaterOverlap> {
    let m = orbital_overlap_matrix(a, b, n)?;
    Ok(log_det(&m).into())
}

/// Resolution of a fixed-density study: `h ≤ min(r0, λ_F) / resolution`.
fn study_grid(
    potential: &PotentialSpec,
    n: usize,
    density: f64,
    resolution: f64,
    geometry: Geometry,
) -> Result<(Grid, AdequacyReport)> {
    if !(density.is_finite() && density > 0.0) {
        return Err(Error::config("density", format!("must be positive, got {density}")));
    }
    if !(resolution >= ADEQUACY_DIVISOR) {
        return Err(Error::config(
            "resolution",
            format!("must be at least {ADEQUACY_DIVISOR}, got {resolution}"),
        ));
    }
    let length = n as f64 / density;
    let spacing = max_adequate_spacing(potential, n, length) * ADEQUACY_DIVISOR / resolution;
    let grid = Grid::with_max_spacing(length, spacing, geometry)?;
    let report = require_adequate(&grid, potential, n)?;
    Ok((grid, report))
}

/// Parameters of a fixed-density overlap ladder in the radial channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub shape: Shape,
    pub strength: f64,
    pub range: f64,
    /// Particles per unit length; `L = N / density` for every ladder point.
    pub density: f64,
    pub n_values: Vec<usize>,
    /// Grid points per `min(r0, λ_F)`; at least 20.
    pub resolution: f64,
}

impl ScanConfig {
    pub fn new(shape: Shape, strength: f64, range: f64, density: f64, n_values: Vec<usize>) -> Self {
        ScanConfig {
            shape,
            strength,
            range,
            density,
            n_values,
            resolution: ADEQUACY_DIVISOR,
        }
    }

    pub fn potential(&self) -> PotentialSpec {
        PotentialSpec::new(self.shape, self.strength, self.range, 0.0)
    }

    /// Checks parameters and every ladder grid without solving anything.
    pub fn validate(&self) -> Result<()> {
        if self.n_values.len() < crate::fit::MIN_FIT_POINTS {
            return Err(Error::config(
                "n_values",
                format!(
                    "an exponent fit needs at least {} ladder points",
                    crate::fit::MIN_FIT_POINTS
                ),
            ));
        }
        if self.n_values.windows(2).any(|w| w[1] <= w[0]) || self.n_values[0] == 0 {
            return Err(Error::config("n_values", "must be positive and strictly ascending"));
        }
        if !(self.strength.is_finite()) {
            return Err(Error::config("strength", "must be finite"));
        }
        if !(self.range > 0.0) {
            return Err(Error::config("range", "must be positive"));
        }
        for &n in &self.n_values {
            study_grid(&self.potential(), n, self.density, self.resolution, Geometry::RadialSwave)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapPoint {
    pub n: usize,
    pub length: f64,
    pub n_points: usize,
    pub overlap: SlaterOverlap,
    /// Fermi-level phase shift; `None` for the free system.
    pub delta_f: Option<f64>,
    pub adequacy: AdequacyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverlapScan {
    pub points: Vec<OverlapPoint>,
    pub fit: PowerLawFit,
}

impl OverlapScan {
    pub fn n_values(&self) -> Vec<usize> {
        self.points.iter().map(|p| p.n).collect()
    }

    pub fn abs_overlaps(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.overlap.abs).collect()
    }

    pub fn log_overlaps(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.overlap.log_abs).collect()
    }
}

fn scan_point(cfg: &ScanConfig, n: usize) -> Result<OverlapPoint> {
    let potential = cfg.potential();
    let (grid, adequacy) = study_grid(&potential, n, cfg.density, cfg.resolution, Geometry::RadialSwave)?;
    let free = solve_spectrum(&grid, &PotentialSpec::free(), n)?;
    let interacting = solve_spectrum(&grid, &potential, n)?;
    let overlap = slater_overlap(&free, &interacting, n)?;
    let delta_f = if potential.is_free() {
        None
    } else {
        Some(extract_phase_shifts(&free, &interacting, n)?.delta_f)
    };
    Ok(OverlapPoint {
        n,
        length: grid.length(),
        n_points: grid.n_points(),
        overlap,
        delta_f,
        adequacy,
    })
}

/// Ground-state overlap ladder at fixed density plus its power-law fit.
pub fn overlap_scan(cfg: &ScanConfig) -> Result<OverlapScan> {
    cfg.validate()?;
    let points = cfg
        .n_values
        .iter()
        .map(|&n| scan_point(cfg, n))
        .collect::<Result<Vec<_>>>()?;
    let xs: Vec<f64> = points.iter().map(|p| p.n as f64).collect();
    let logs: Vec<f64> = points.iter().map(|p| p.overlap.log_abs).collect();
    let fit = fit_log_exponent(&xs, &logs)?;
    Ok(OverlapScan { points, fit })
}

/// Overlaps between ground states with the impurity at two different sites
/// of a linear box, and of each against the free ground state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SiteOverlap {
    pub n: usize,
    pub site_a: f64,
    pub site_b: f64,
    /// `|⟨Υ(R_a), Υ(R_b)⟩|`
    pub cross: SlaterOverlap,
    /// `|⟨Υ(R_a), free⟩|`
    pub a_vs_free: SlaterOverlap,
    /// `|⟨Υ(R_b), free⟩|`
    pub b_vs_free: SlaterOverlap,
}

pub fn impurity_site_overlap(
    grid: &Grid,
    template: &PotentialSpec,
    site_a: f64,
    site_b: f64,
    n: usize,
) -> Result<SiteOverlap> {
    if grid.geometry() != Geometry::LinearBox {
        return Err(Error::UnsupportedGeometry(
            "impurity sites are placed in the linear box".into(),
        ));
    }
    let separation = (site_a - site_b).abs();
    if separation != 0.0 && separation < 4.0 * template.range {
        return Err(Error::config(
            "site_b",
            format!(
                "sites {site_a} and {site_b} are closer than 4·r0 = {}",
                4.0 * template.range
            ),
        ));
    }
    let pa = template.at(site_a);
    let pb = template.at(site_b);
    pa.validate(grid)?;
    pb.validate(grid)?;
    let free = solve_spectrum(grid, &PotentialSpec::free(), n)?;
    let sa = solve_spectrum(grid, &pa, n)?;
    let sb = if separation == 0.0 {
        sa.clone()
    } else {
        solve_spectrum(grid, &pb, n)?
    };
    Ok(SiteOverlap {
        n,
        site_a,
        site_b,
        cross: slater_overlap(&sa, &sb, n)?,
        a_vs_free: slater_overlap(&sa, &free, n)?,
        b_vs_free: slater_overlap(&sb, &free, n)?,
    })
}

/// Fixed-density ladder for two impurity sites given as fractions of `L`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SiteLadderConfig {
    pub shape: Shape,
    pub strength: f64,
    pub range: f64,
    pub density: f64,
    pub site_a_fraction: f64,
    pub site_b_fraction: f64,
    pub n_values: Vec<usize>,
    pub resolution: f64,
}

impl SiteLadderConfig {
    /// Grids and site placements for every ladder point, checked up front.
    fn jobs(&self) -> Result<Vec<(Grid, f64, f64, usize)>> {
        for (name, f) in [
            ("site_a_fraction", self.site_a_fraction),
            ("site_b_fraction", self.site_b_fraction),
        ] {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::config(name, format!("must lie in (0, 1), got {f}")));
            }
        }
        if self.n_values.is_empty() || self.n_values.contains(&0) {
            return Err(Error::config("n_values", "need at least one positive N"));
        }
        let template = self.template();
        let mut jobs = Vec::new();
        for &n in &self.n_values {
            let (grid, _) = study_grid(&template, n, self.density, self.resolution, Geometry::LinearBox)?;
            let l = grid.length();
            let (ra, rb) = (self.site_a_fraction * l, self.site_b_fraction * l);
            if ra != rb && (ra - rb).abs() < 4.0 * self.range {
                return Err(Error::config(
                    "site_b_fraction",
                    format!("sites closer than 4·r0 at N = {n}"),
                ));
            }
            template.at(ra).validate(&grid)?;
            template.at(rb).validate(&grid)?;
            jobs.push((grid, ra, rb, n));
        }
        Ok(jobs)
    }

    fn template(&self) -> PotentialSpec {
        PotentialSpec::new(self.shape, self.strength, self.range, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        self.jobs().map(|_| ())
    }
}

pub fn site_overlap_ladder(cfg: &SiteLadderConfig) -> Result<Vec<SiteOverlap>> {
    let template = cfg.template();
    let jobs = cfg.jobs()?;
    jobs.iter()
        .map(|(grid, ra, rb, n)| impurity_site_overlap(grid, &template, *ra, *rb, *n))
        .collect()
}

/// Which free determinant attains the largest coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Excitation {
    /// 1-based occupied levels that were emptied.
    pub holes: Vec<usize>,
    /// 1-based unoccupied levels that were filled.
    pub particles: Vec<usize>,
}

/// Expansion of the interacting ground state over free determinants with at
/// most `excitation_order` particle–hole pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub n: usize,
    pub excitation_order: usize,
    pub window: usize,
    pub configurations: u64,
    pub ground_coefficient: f64,
    pub max_coefficient: f64,
    pub argmax: Excitation,
    pub captured_weight: f64,
}

pub const MAX_EXCITATION_ORDER: usize = 2;

/// Enumerates free determinants that replace up to `excitation_order`
/// occupied levels (`1..=n`) by levels in `(n, n + window]`.
///
/// Each coefficient is a ratio against the ground-configuration determinant:
/// with `B = G_virt · M0⁻¹`, replacing hole `i` by particle `a` multiplies
/// `det M0` by `B[a, i]`, and a double replacement by the corresponding 2×2
/// minor of `B`.
pub fn coefficient_scan(
    free: &Spectrum,
    interacting: &Spectrum,
    n: usize,
    excitation_order: usize,
    window: Option<usize>,
) -> Result<DecompositionReport> {
    if excitation_order > MAX_EXCITATION_ORDER {
        return Err(Error::Unsupported(format!(
            "excitation order {excitation_order} > {MAX_EXCITATION_ORDER}"
        )));
    }
    if n == 0 {
        return Err(Error::config("n", "must be positive"));
    }
    let window = window.unwrap_or(2 * n);
    let needed = if excitation_order == 0 { n } else { n + window };
    if free.len() < needed {
        return Err(Error::config(
            "window",
            format!("free spectrum has {} orbitals, need {needed}", free.len()),
        ));
    }
    let g = gram(free, needed, interacting, n)?;
    let m0 = g.rows(0, n).into_owned();
    let ground = log_det(&m0);
    let s = ground.abs();

    let mut report = DecompositionReport {
        n,
        excitation_order,
        window,
        configurations: 1,
        ground_coefficient: s,
        max_coefficient: s,
        argmax: Excitation {
            holes: vec![],
            particles: vec![],
        },
        captured_weight: s * s,
    };
    if excitation_order == 0 || window == 0 {
        return Ok(report);
    }
    if ground.singular {
        return Err(Error::Numerical(
            "ground-configuration overlap vanishes; coefficient ratios are undefined".into(),
        ));
    }

    // Solve B·M0 = G_virt, i.e. M0ᵀ·Bᵀ = G_virtᵀ.
    let virt = g.rows(n, window).into_owned();
    let bt = m0
        .transpose()
        .lu()
        .solve(&virt.transpose())
        .ok_or_else(|| Error::Numerical("ground-configuration Gram matrix is singular".into()))?;
    // bt is n×window: bt[(i, a)] = B[a, i]; store B column-major as w×n
    let b = bt.transpose();

    let mut best = 1.0f64;
    let mut best_exc = (vec![], vec![]);
    let mut weight = 1.0f64;
    let mut configurations = 1u64;

    for i in 0..n {
        for a in 0..window {
            let v = b[(a, i)];
            weight += v * v;
            if v.abs() > best {
                best = v.abs();
                best_exc = (vec![i + 1], vec![n + a + 1]);
            }
        }
    }
    configurations += (n * window) as u64;

    if excitation_order == 2 && n >= 2 && window >= 2 {
        let cols: Vec<&[f64]> = (0..n).map(|i| &b.as_slice()[i * window..(i + 1) * window]).collect();
        let pair = |i: usize| -> (f64, f64, (usize, usize, usize, usize)) {
            let mut w = 0.0;
            let mut top = 0.0f64;
            let mut arg = (0, 0, 0, 0);
            let ci = cols[i];
            for j in i + 1..n {
                let cj = cols[j];
                for a in 0..window {
                    let (xa, ya) = (ci[a], cj[a]);
                    let mut local_top = 0.0f64;
                    let mut local_b = 0;
                    for bb in a + 1..window {
                        let minor = xa * cj[bb] - ya * ci[bb];
                        w += minor * minor;
                        if minor.abs() > local_top {
                            local_top = minor.abs();
                            local_b = bb;
                        }
                    }
                    if local_top > top {
                        top = local_top;
                        arg = (i, j, a, local_b);
                    }
                }
            }
            (w, top, arg)
        };
        #[cfg(feature = "parallel")]
        let partial: Vec<_> = (0..n).into_par_iter().map(pair).collect();
        #[cfg(not(feature = "parallel"))]
        let partial: Vec<_> = (0..n).map(pair).collect();
        for (w, top, (i, j, a, bb)) in partial {
            weight += w;
            if top > best {
                best = top;
                best_exc = (vec![i + 1, j + 1], vec![n + a + 1, n + bb + 1]);
            }
        }
        configurations += (n * (n - 1) / 2) as u64 * (window * (window - 1) / 2) as u64;
    }

    report.configurations = configurations;
    report.max_coefficient = s * best;
    report.argmax = Excitation {
        holes: best_exc.0,
        particles: best_exc.1,
    };
    report.captured_weight = s * s * weight;
    Ok(report)
}

/// Parameters for a coefficient scan at one particle number and fixed density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoefficientScanConfig {
    pub shape: Shape,
    pub strength: f64,
    pub range: f64,
    pub density: f64,
    pub n: usize,
    pub excitation_order: usize,
    pub window: Option<usize>,
    pub resolution: f64,
}

impl CoefficientScanConfig {
    fn prepare(&self) -> Result<(Grid, PotentialSpec, usize)> {
        if self.excitation_order > MAX_EXCITATION_ORDER {
            return Err(Error::Unsupported(format!(
                "excitation order {} > {MAX_EXCITATION_ORDER}",
                self.excitation_order
            )));
        }
        if self.n == 0 {
            return Err(Error::config("n", "must be positive"));
        }
        let potential = PotentialSpec::new(self.shape, self.strength, self.range, 0.0);
        let (grid, _) = study_grid(&potential, self.n, self.density, self.resolution, Geometry::RadialSwave)?;
        let window = self.window.unwrap_or(2 * self.n);
        if self.n + window > grid.n_points() {
            return Err(Error::config(
                "window",
                format!("{} levels requested on a {}-point grid", self.n + window, grid.n_points()),
            ));
        }
        Ok((grid, potential, window))
    }

    pub fn validate(&self) -> Result<()> {
        self.prepare().map(|_| ())
    }
}

pub fn coefficient_scan_at_density(cfg: &CoefficientScanConfig) -> Result<DecompositionReport> {
    let (grid, potential, window) = cfg.prepare()?;
    let free = solve_spectrum(&grid, &PotentialSpec::free(), cfg.n + window)?;
    let interacting = solve_spectrum(&grid, &potential, cfg.n)?;
    coefficient_scan(&free, &interacting, cfg.n, cfg.excitation_order, Some(window))
}

//! Single-particle spectra on a hard-wall grid, box-quantization phase
//! shifts, and the Born–Oppenheimer energy surface.
//!
//! The Hamiltonian is the three-point finite-difference operator
//! `-u'' + U(x)·u` with `u(0) = u(L) = 0`. Orbitals are normalized with the
//! quadrature weight `h`, i.e. `h·Σ φ_i(x_k)·φ_j(x_k) = δ_ij`.

use std::f64::consts::PI;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{cell_potential, Geometry, Grid, PotentialSpec};
use crate::tridiag::SymTridiagonal;

/// Resolution rule: `h ≤ min(r0, λ_F) / ADEQUACY_DIVISOR`.
pub const ADEQUACY_DIVISOR: f64 = 20.0;

#[derive(Debug, Clone)]
pub struct Spectrum {
    energies: Vec<f64>,
    orbitals: Vec<Vec<f64>>,
    grid: Grid,
    potential: PotentialSpec,
}

impl Spectrum {
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Orbital `i` sampled on the interior nodes.
    pub fn orbital(&self, i: usize) -> &[f64] {
        &self.orbitals[i]
    }

    pub fn orbitals(&self) -> &[Vec<f64>] {
        &self.orbitals
    }

    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn potential(&self) -> &PotentialSpec {
        &self.potential
    }

    /// h-weighted inner product of two orbitals (possibly from different spectra).
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        self.grid.spacing() * crate::tridiag::dot(a, b)
    }

    /// Largest deviation of the orbital Gram matrix from the identity.
    pub fn orthonormality_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.len() {
            for j in 0..=i {
                let d = self.inner(&self.orbitals[i], &self.orbitals[j]);
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((d - expect).abs());
            }
        }
        worst
    }

    /// Sum of the `n` lowest energies (ground-state energy of `n` spinless fermions).
    pub fn fermi_sea_energy(&self, n: usize) -> f64 {
        self.energies[..n].iter().sum()
    }

    /// Reorders/negates orbitals. Used by tests of basis-phase invariance.
    pub fn with_orbitals(mut self, orbitals: Vec<Vec<f64>>) -> Self {
        assert_eq!(orbitals.len(), self.orbitals.len());
        self.orbitals = orbitals;
        self
    }
}

/// Exact eigenvalues of the free discrete Laplacian on `grid`, 1-based level `n`.
pub fn free_level(grid: &Grid, n: usize) -> f64 {
    let h = grid.spacing();
    let s = (n as f64 * PI / (2.0 * (grid.n_points() + 1) as f64)).sin();
    4.0 * s * s / (h * h)
}

/// Momentum whose lattice dispersion `(4/h²)·sin²(k·h/2)` equals `energy`.
///
/// This inverts the discrete free dispersion exactly, so free levels map to
/// `nπ/L` to rounding. Negative energies (bound states) have no real momentum.
pub fn lattice_momentum(energy: f64, spacing: f64) -> Option<f64> {
    if energy <= 0.0 {
        return None;
    }
    let arg = 0.5 * spacing * energy.sqrt();
    if arg > 1.0 {
        return None;
    }
    Some(2.0 * arg.asin() / spacing)
}

fn free_spectrum(grid: &Grid, potential: PotentialSpec, count: usize) -> Spectrum {
    let np = grid.n_points();
    let norm = (2.0 / grid.length()).sqrt();
    let step = PI / (np + 1) as f64;
    let energies = (1..=count).map(|n| free_level(grid, n)).collect();
    let orbitals = (1..=count)
        .map(|n| {
            (1..=np)
                .map(|k| {
                    // reduce n·k mod 2(np+1) so the sine argument stays small
                    let m = (n * k) % (2 * (np + 1));
                    norm * (m as f64 * step).sin()
                })
                .collect()
        })
        .collect();
    Spectrum {
        energies,
        orbitals,
        grid: grid.clone(),
        potential,
    }
}

/// Lowest `n_eigenpairs` eigenpairs of `-u'' + U u` on `grid`.
///
/// The zero potential uses the closed-form discrete sine basis; everything
/// else goes through the tridiagonal eigensolver.
pub fn solve_spectrum(grid: &Grid, potential: &PotentialSpec, n_eigenpairs: usize) -> Result<Spectrum> {
    if n_eigenpairs == 0 {
        return Err(Error::config("n_eigenpairs", "must be at least 1"));
    }
    if n_eigenpairs > grid.n_points() {
        return Err(Error::config(
            "n_eigenpairs",
            format!(
                "{} exceeds the {} grid points",
                n_eigenpairs,
                grid.n_points()
            ),
        ));
    }
    let u = cell_potential(potential, grid)?;
    if potential.is_free() {
        return Ok(free_spectrum(grid, *potential, n_eigenpairs));
    }
    solve_general(grid, *potential, &u, n_eigenpairs)
}

/// Tridiagonal solve without the closed-form shortcut for free systems.
pub fn solve_spectrum_numerically(
    grid: &Grid,
    potential: &PotentialSpec,
    n_eigenpairs: usize,
) -> Result<Spectrum> {
    if n_eigenpairs == 0 || n_eigenpairs > grid.n_points() {
        return Err(Error::config("n_eigenpairs", "must be in 1..=n_points"));
    }
    let u = cell_potential(potential, grid)?;
    solve_general(grid, *potential, &u, n_eigenpairs)
}

fn solve_general(grid: &Grid, potential: PotentialSpec, u: &[f64], count: usize) -> Result<Spectrum> {
    // Work with h²·H, whose off-diagonal is exactly -1.
    let h = grid.spacing();
    let h2 = h * h;
    let n = grid.n_points();
    let diag = u.iter().map(|&v| 2.0 + h2 * v).collect();
    let t = SymTridiagonal::new(diag, vec![-1.0; n - 1]);
    let (scaled, vectors) = t.lowest_eigenpairs(count)?;
    let energies: Vec<f64> = scaled.iter().map(|e| e / h2).collect();
    if energies.iter().any(|e| !e.is_finite()) {
        return Err(Error::Numerical("non-finite eigenvalue".into()));
    }
    let inv_sqrt_h = 1.0 / h.sqrt();
    let orbitals = vectors
        .into_iter()
        .map(|v| v.into_iter().map(|x| x * inv_sqrt_h).collect())
        .collect();
    Ok(Spectrum {
        energies,
        orbitals,
        grid: grid.clone(),
        potential,
    })
}

/// Outcome of the runtime resolution check `h ≤ min(r0/20, λ_F/20)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdequacyReport {
    pub spacing: f64,
    pub range_limit: Option<f64>,
    pub fermi_wavelength_limit: f64,
    pub fermi_momentum: f64,
    pub adequate: bool,
}

impl AdequacyReport {
    pub fn max_spacing(&self) -> f64 {
        self.range_limit
            .map_or(self.fermi_wavelength_limit, |r| r.min(self.fermi_wavelength_limit))
    }
}

/// Fermi momentum of `n` spinless fermions in a hard-wall box of length `length`.
pub fn fermi_momentum(n: usize, length: f64) -> f64 {
    n as f64 * PI / length
}

/// Largest spacing allowed for `n` fermions at density `n/length` with this potential.
pub fn max_adequate_spacing(potential: &PotentialSpec, n: usize, length: f64) -> f64 {
    let lambda_f = 2.0 * PI / fermi_momentum(n, length);
    let mut limit = lambda_f / ADEQUACY_DIVISOR;
    if !potential.is_free() {
        limit = limit.min(potential.range / ADEQUACY_DIVISOR);
    }
    limit
}

pub fn grid_adequacy(grid: &Grid, potential: &PotentialSpec, n_particles: usize) -> AdequacyReport {
    let k_f = fermi_momentum(n_particles, grid.length());
    let fermi_wavelength_limit = 2.0 * PI / k_f / ADEQUACY_DIVISOR;
    let range_limit = (!potential.is_free()).then(|| potential.range / ADEQUACY_DIVISOR);
    let mut report = AdequacyReport {
        spacing: grid.spacing(),
        range_limit,
        fermi_wavelength_limit,
        fermi_momentum: k_f,
        adequate: false,
    };
    // relative slack for spacings produced by `Grid::with_max_spacing`
    report.adequate = report.spacing <= report.max_spacing() * (1.0 + 1e-12);
    report
}

/// Hard error unless `grid` resolves both the potential and the Fermi wavelength.
pub fn require_adequate(grid: &Grid, potential: &PotentialSpec, n_particles: usize) -> Result<AdequacyReport> {
    let report = grid_adequacy(grid, potential, n_particles);
    if !report.adequate {
        return Err(Error::config(
            "n_points",
            format!(
                "grid spacing {} exceeds the resolution limit {} (min(r0, lambda_F)/{})",
                report.spacing,
                report.max_spacing(),
                ADEQUACY_DIVISOR
            ),
        ));
    }
    Ok(report)
}

/// Phase shifts read off box quantization, `k'_n·L + δ_n = nπ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseShiftTable {
    /// 1-based level index `n` of each scattering state.
    pub levels: Vec<usize>,
    /// Momenta of the positive-energy interacting levels.
    pub momenta: Vec<f64>,
    /// Unwrapped phase shifts, one per entry of `momenta`.
    pub deltas: Vec<f64>,
    pub fermi_index: usize,
    pub delta_f: f64,
    /// Number of negative-energy (bound) interacting levels.
    pub bound_states: usize,
    /// Multiple of π removed from the raw lowest-momentum shift to bring it
    /// into (-π/2, π/2]. Equals `bound_states` when Levinson's theorem holds
    /// for the raw level counting.
    pub branch_offset: i64,
}

impl PhaseShiftTable {
    /// Phase shift at `k`, linearly interpolated between tabulated momenta.
    pub fn delta_at(&self, k: f64) -> Option<f64> {
        let m = &self.momenta;
        if m.is_empty() || k < m[0] || k > *m.last()? {
            return None;
        }
        let i = m.partition_point(|&x| x < k);
        if i == 0 {
            return Some(self.deltas[0]);
        }
        let t = (k - m[i - 1]) / (m[i] - m[i - 1]);
        Some(self.deltas[i - 1] + t * (self.deltas[i] - self.deltas[i - 1]))
    }
}

fn wrap_half_pi(x: f64) -> (f64, i64) {
    // bring x into (-π/2, π/2] by subtracting m·π
    let m = (x / PI).round();
    let mut r = x - m * PI;
    let mut m = m as i64;
    if r <= -PI / 2.0 {
        r += PI;
        m -= 1;
    }
    (r, m)
}

pub fn extract_phase_shifts(free: &Spectrum, interacting: &Spectrum, fermi_index: usize) -> Result<PhaseShiftTable> {
    if !free.grid().same_as(interacting.grid()) {
        return Err(Error::config("grid", "free and interacting spectra use different grids"));
    }
    if free.grid().geometry() != Geometry::RadialSwave {
        return Err(Error::UnsupportedGeometry(
            "phase shifts need the radial s-wave geometry".into(),
        ));
    }
    if interacting.potential().center != 0.0 {
        return Err(Error::config("center", "phase-shift extraction needs the potential at the origin"));
    }
    let count = free.len().min(interacting.len());
    if fermi_index == 0 || fermi_index > count {
        return Err(Error::config(
            "fermi_index",
            format!("{fermi_index} is outside 1..={count}"),
        ));
    }
    let h = free.grid().spacing();
    let length = free.grid().length();

    let bound_states = interacting.energies().iter().take_while(|&&e| e <= 0.0).count();
    let mut levels = Vec::new();
    let mut momenta = Vec::new();
    let mut raw = Vec::new();
    for n in 1..=count {
        let Some(k_int) = lattice_momentum(interacting.energies()[n - 1], h) else {
            continue;
        };
        let k_free = lattice_momentum(free.energies()[n - 1], h)
            .ok_or_else(|| Error::Numerical(format!("free level {n} has no lattice momentum")))?;
        levels.push(n);
        momenta.push(k_int);
        raw.push((k_free - k_int) * length);
    }
    if raw.is_empty() {
        return Err(Error::Numerical("no positive-energy levels to extract phase shifts from".into()));
    }

    let (first, branch_offset) = wrap_half_pi(raw[0]);
    let mut deltas = Vec::with_capacity(raw.len());
    deltas.push(first);
    for i in 1..raw.len() {
        let prev = deltas[i - 1];
        let r = raw[i];
        let m = ((prev - r) / PI).round();
        deltas.push(r + m * PI);
    }

    let pos = levels
        .iter()
        .position(|&n| n == fermi_index)
        .ok_or_else(|| Error::config("fermi_index", format!("level {fermi_index} is a bound state")))?;
    Ok(PhaseShiftTable {
        delta_f: deltas[pos],
        levels,
        momenta,
        deltas,
        fermi_index,
        bound_states,
        branch_offset,
    })
}

/// Fermi-level phase shift for `n` fermions at `density` in the radial channel.
pub fn fermi_phase_shift(potential: &PotentialSpec, n: usize, density: f64) -> Result<f64> {
    let length = n as f64 / density;
    let grid = Grid::with_max_spacing(
        length,
        max_adequate_spacing(potential, n, length),
        Geometry::RadialSwave,
    )?;
    let free = solve_spectrum(&grid, &PotentialSpec::free(), n)?;
    let interacting = solve_spectrum(&grid, potential, n)?;
    Ok(extract_phase_shifts(&free, &interacting, n)?.delta_f)
}

/// Strength of a radial-channel potential of the given shape whose Fermi
/// phase shift at (`n`, `density`) equals `target`.
///
/// Only the weak branch is searched: no bound state forms, so the shift is
/// monotone in the strength and `|target| < π/2`. Attractive strengths give
/// positive shifts.
pub fn strength_for_phase_shift(
    shape: crate::grid::Shape,
    range: f64,
    n: usize,
    density: f64,
    target: f64,
) -> Result<f64> {
    if !(target.abs() < PI / 2.0) || target == 0.0 {
        return Err(Error::config("target_delta_f", "must be nonzero and inside (-π/2, π/2)"));
    }
    let sign = -target.signum();
    let shift = |s: f64| fermi_phase_shift(&PotentialSpec::new(shape, sign * s, range, 0.0), n, density);
    let (mut lo, mut f_lo) = (0.0, -target.abs());
    let mut hi = 0.1;
    let mut f_hi = shift(hi)?.abs() - target.abs();
    let mut guard = 0;
    while f_hi < 0.0 {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = shift(hi)?.abs() - target.abs();
        guard += 1;
        if guard > 40 {
            return Err(Error::Numerical("could not bracket the requested phase shift".into()));
        }
    }
    // Illinois variant of regula falsi
    let mut side = 0i8;
    for _ in 0..100 {
        let mid = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
        let f_mid = shift(mid)?.abs() - target.abs();
        if f_mid.abs() < 1e-12 * target.abs() || (hi - lo) < 1e-13 * hi {
            return Ok(sign * mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
            if side == -1 {
                f_hi *= 0.5;
            }
            side = -1;
        } else {
            hi = mid;
            f_hi = f_mid;
            if side == 1 {
                f_lo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(sign * 0.5 * (lo + hi))
}

/// Born–Oppenheimer surface: ground-state energy of `n` fermions with the
/// impurity at each of `centers`.
pub fn bo_energy(grid: &Grid, template: &PotentialSpec, centers: &[f64], n: usize) -> Result<Vec<f64>> {
    if grid.geometry() != Geometry::LinearBox {
        return Err(Error::UnsupportedGeometry(
            "the energy surface is defined on the linear box".into(),
        ));
    }
    for &c in centers {
        template.at(c).validate(grid)?;
        if !template.is_free() && !(c > 0.0 && c < grid.length()) {
            return Err(Error::config("center", format!("{c} is outside the box")));
        }
    }
    let one = |&c: &f64| -> Result<f64> {
        let s = solve_spectrum(grid, &template.at(c), n)?;
        Ok(s.fermi_sea_energy(n))
    };
    #[cfg(feature = "parallel")]
    let out = centers.par_iter().map(one).collect();
    #[cfg(not(feature = "parallel"))]
    let out = centers.iter().map(one).collect();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Shape;
    use nalgebra::DMatrix;

    fn dense_eigenvalues(grid: &Grid, spec: &PotentialSpec) -> Vec<f64> {
        let u = cell_potential(spec, grid).unwrap();
        let n = grid.n_points();
        let h2 = grid.spacing().powi(2);
        let m = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                2.0 / h2 + u[i]
            } else if i.abs_diff(j) == 1 {
                -1.0 / h2
            } else {
                0.0
            }
        });
        let mut e: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    #[test]
    fn free_box_levels_converge_to_n_squared() {
        let grid = Grid::new(PI, 4000, Geometry::LinearBox).unwrap();
        let s = solve_spectrum(&grid, &PotentialSpec::free(), 10).unwrap();
        for (i, e) in s.energies().iter().enumerate() {
            let exact = ((i + 1) * (i + 1)) as f64;
            assert!(((e - exact) / exact).abs() < 1e-3);
        }
    }

    #[test]
    fn free_orbitals_match_sines() {
        let grid = Grid::new(7.0, 999, Geometry::LinearBox).unwrap();
        let s = solve_spectrum_numerically(&grid, &PotentialSpec::free(), 8).unwrap();
        let l = grid.length();
        for n in 0..8 {
            for k in 0..grid.n_points() {
                let x = grid.x(k);
                let exact = (2.0 / l).sqrt() * (((n + 1) as f64) * PI * x / l).sin();
                assert!((s.orbital(n)[k] - exact).abs() < 1e-3);
            }
        }
    }

    #[test]
    fn closed_form_agrees_with_solver() {
        let grid = Grid::new(25.0, 600, Geometry::RadialSwave).unwrap();
        let a = solve_spectrum(&grid, &PotentialSpec::free(), 40).unwrap();
        let b = solve_spectrum_numerically(&grid, &PotentialSpec::free(), 40).unwrap();
        for i in 0..40 {
            assert!((a.energies()[i] - b.energies()[i]).abs() < 1e-10);
            let ov = a.inner(a.orbital(i), b.orbital(i));
            assert!((ov - 1.0).abs() < 1e-9, "level {i}: {ov}");
        }
    }

    #[test]
    fn spectrum_invariants_hold() {
        let grid = Grid::new(40.0, 799, Geometry::RadialSwave).unwrap();
        let spec = PotentialSpec::square_well(-5.0, 1.0, 0.0);
        let s = solve_spectrum(&grid, &spec, 60).unwrap();
        assert!(s.energies().windows(2).all(|w| w[1] > w[0]));
        assert!(s.orthonormality_error() < 1e-10);
        assert!(s.len() >= 60);
    }

    #[test]
    fn square_well_lowers_ground_state() {
        let grid = Grid::new(40.0, 799, Geometry::RadialSwave).unwrap();
        let spec = PotentialSpec::square_well(-5.0, 1.0, 0.0);
        let s = solve_spectrum(&grid, &spec, 5).unwrap();
        let dense = dense_eigenvalues(&grid, &spec);
        for i in 0..5 {
            assert!((s.energies()[i] - dense[i]).abs() < 1e-8 * dense[i].abs().max(1.0));
        }
        assert!(s.energies()[0] < free_level(&grid, 1));
        assert!(s.energies()[0] < 0.0);
    }

    #[test]
    fn too_many_eigenpairs() {
        let grid = Grid::new(1.0, 5, Geometry::LinearBox).unwrap();
        assert!(matches!(
            solve_spectrum(&grid, &PotentialSpec::free(), 6),
            Err(Error::Config { .. })
        ));
    }

    #[test]
    fn second_order_convergence() {
        let spec = PotentialSpec::gaussian(-3.0, 1.0, 0.0);
        let levels = 8;
        let mut prev: Option<Vec<f64>> = None;
        let mut diffs = Vec::new();
        for cells in [200usize, 400, 800] {
            let grid = Grid::new(20.0, cells - 1, Geometry::RadialSwave).unwrap();
            let e = solve_spectrum(&grid, &spec, levels).unwrap().energies().to_vec();
            if let Some(p) = prev {
                diffs.push(p.iter().zip(&e).map(|(a, b)| (a - b).abs()).collect::<Vec<_>>());
            }
            prev = Some(e);
        }
        for n in 0..levels / 4 {
            assert!(diffs[0][n] / diffs[1][n] >= 3.5, "level {n}: {}", diffs[0][n] / diffs[1][n]);
        }
    }

    #[test]
    fn lattice_momentum_inverts_free_levels() {
        let grid = Grid::new(300.0, 5999, Geometry::RadialSwave).unwrap();
        for n in [1usize, 10, 100, 1000] {
            let k = lattice_momentum(free_level(&grid, n), grid.spacing()).unwrap();
            assert!((k * grid.length() - n as f64 * PI).abs() < 1e-9);
        }
        assert_eq!(lattice_momentum(-1.0, 0.1), None);
    }

    #[test]
    fn free_phase_shifts_vanish() {
        let grid = Grid::new(50.0, 999, Geometry::RadialSwave).unwrap();
        let free = solve_spectrum(&grid, &PotentialSpec::free(), 100).unwrap();
        let t = extract_phase_shifts(&free, &free, 100).unwrap();
        assert!(t.deltas.iter().all(|d| d.abs() < 1e-8));
        assert_eq!(t.bound_states, 0);
        assert_eq!(t.branch_offset, 0);
    }

    #[test]
    fn phase_shift_errors() {
        let radial = Grid::new(50.0, 999, Geometry::RadialSwave).unwrap();
        let other = Grid::new(50.0, 899, Geometry::RadialSwave).unwrap();
        let boxed = Grid::new(50.0, 999, Geometry::LinearBox).unwrap();
        let a = solve_spectrum(&radial, &PotentialSpec::free(), 10).unwrap();
        let b = solve_spectrum(&other, &PotentialSpec::free(), 10).unwrap();
        assert!(matches!(extract_phase_shifts(&a, &b, 5), Err(Error::Config { .. })));
        let c = solve_spectrum(&boxed, &PotentialSpec::free(), 10).unwrap();
        assert!(matches!(
            extract_phase_shifts(&c, &c, 5),
            Err(Error::UnsupportedGeometry(_))
        ));
    }

    #[test]
    fn levinson_branch_is_reported() {
        // k_in·r0 = √5 > π/2: exactly one bound state
        let grid = Grid::new(60.0, 2999, Geometry::RadialSwave).unwrap();
        let spec = PotentialSpec::square_well(-5.0, 1.0, 0.0);
        let free = solve_spectrum(&grid, &PotentialSpec::free(), 80).unwrap();
        let int = solve_spectrum(&grid, &spec, 80).unwrap();
        let t = extract_phase_shifts(&free, &int, 80).unwrap();
        assert_eq!(t.bound_states, 1);
        assert_eq!(t.branch_offset, 1);
        assert_eq!(t.levels[0], 2);
        for w in t.deltas.windows(2) {
            assert!((w[1] - w[0]).abs() < PI / 2.0);
        }
    }

    #[test]
    fn bo_energy_free_and_symmetric() {
        let grid = Grid::new(30.0, 599, Geometry::LinearBox).unwrap();
        let n = 12;
        let free = bo_energy(&grid, &PotentialSpec::free(), &[5.0, 10.0, 15.0], n).unwrap();
        let exact: f64 = (1..=n).map(|k| free_level(&grid, k)).sum();
        for e in &free {
            assert!((e - exact).abs() < 1e-12);
        }
        let continuum: f64 = (1..=n).map(|k| (k as f64 * PI / 30.0).powi(2)).sum();
        assert!((exact - continuum).abs() / continuum < 1e-3);

        let well = PotentialSpec::new(Shape::SquareWell, -2.0, 1.0, 0.0);
        let e = bo_energy(&grid, &well, &[7.3, 30.0 - 7.3], n).unwrap();
        assert!((e[0] - e[1]).abs() <= 1e-9);
        assert!(e[0] < exact);
    }

    #[test]
    fn bo_energy_rejects_bad_input() {
        let grid = Grid::new(30.0, 599, Geometry::LinearBox).unwrap();
        let well = PotentialSpec::square_well(-2.0, 1.0, 0.0);
        assert!(bo_energy(&grid, &well, &[0.5], 4).is_err());
        let radial = Grid::new(30.0, 599, Geometry::RadialSwave).unwrap();
        assert!(matches!(
            bo_energy(&radial, &well, &[10.0], 4),
            Err(Error::UnsupportedGeometry(_))
        ));
    }

    #[test]
    fn adequacy_rule() {
        let spec = PotentialSpec::square_well(-5.0, 1.0, 0.0);
        let fine = Grid::new(100.0, 1999, Geometry::RadialSwave).unwrap();
        assert!(require_adequate(&fine, &spec, 100).is_ok());
        let coarse = Grid::new(100.0, 999, Geometry::RadialSwave).unwrap();
        assert!(require_adequate(&coarse, &spec, 100).is_err());
        // Fermi wavelength limit: density 4 gives λ_F = 0.5, limit 0.025
        assert!(require_adequate(&fine, &PotentialSpec::free(), 400).is_err());
    }
}

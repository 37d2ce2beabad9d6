//! Discretized hard-wall domains and finite-range potentials.
//!
//! Units throughout the crate: ħ = 1 and 2m = 1, so a free particle has
//! E = k². A domain `[0, L]` carries `n` interior nodes `x_k = k·h` with
//! `h = L/(n+1)`; the wavefunction vanishes at both walls.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gaussian potentials are cut to zero beyond this many ranges from the center.
pub const GAUSSIAN_CUTOFF: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Geometry {
    /// s-wave radial channel, `u(r) = r·ψ(r)`; the potential must sit at the origin.
    RadialSwave,
    /// Particle in a linear box with the impurity anywhere inside.
    LinearBox,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    length: f64,
    n_points: usize,
    spacing: f64,
    geometry: Geometry,
}

impl Grid {
    pub fn new(length: f64, n_points: usize, geometry: Geometry) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::config("length", format!("must be positive, got {length}")));
        }
        if n_points < 3 {
            return Err(Error::config(
                "n_points",
                format!("need at least 3 interior points, got {n_points}"),
            ));
        }
        Ok(Grid {
            length,
            n_points,
            spacing: length / (n_points + 1) as f64,
            geometry,
        })
    }

    /// Grid for a domain of length `length` whose spacing does not exceed `max_spacing`.
    pub fn with_max_spacing(length: f64, max_spacing: f64, geometry: Geometry) -> Result<Self> {
        if !(max_spacing.is_finite() && max_spacing > 0.0) {
            return Err(Error::config("max_spacing", "must be positive"));
        }
        let cells = (length / max_spacing * (1.0 - 1e-12)).ceil().max(4.0) as usize;
        Grid::new(length, cells - 1, geometry)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn geometry(&self) -> Geometry {
        self.geometry
    }

    /// Position of interior node `k` (0-based index, so `x = (k+1)·h`).
    #[inline]
    pub fn x(&self, k: usize) -> f64 {
        (k + 1) as f64 * self.spacing
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.x(k)).collect()
    }

    /// Structural equality used to decide whether two spectra can be compared.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.n_points == other.n_points
            && self.geometry == other.geometry
            && self.length.to_bits() == other.length.to_bits()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Shape {
    SquareWell,
    Gaussian,
}

/// A finite-range impurity potential. Negative strength is attractive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub shape: Shape,
    pub strength: f64,
    pub range: f64,
    pub center: f64,
}

impl PotentialSpec {
    pub fn new(shape: Shape, strength: f64, range: f64, center: f64) -> Self {
        PotentialSpec {
            shape,
            strength,
            range,
            center,
        }
    }

    pub fn square_well(strength: f64, range: f64, center: f64) -> Self {
        Self::new(Shape::SquareWell, strength, range, center)
    }

    pub fn gaussian(strength: f64, range: f64, center: f64) -> Self {
        Self::new(Shape::Gaussian, strength, range, center)
    }

    /// The zero potential (free fermions).
    pub fn free() -> Self {
        Self::new(Shape::SquareWell, 0.0, 1.0, 0.0)
    }

    pub fn is_free(&self) -> bool {
        self.strength == 0.0
    }

    pub fn at(self, center: f64) -> Self {
        PotentialSpec { center, ..self }
    }

    pub fn with_strength(self, strength: f64) -> Self {
        PotentialSpec { strength, ..self }
    }

    /// Distance from the center beyond which the potential is exactly zero.
    pub fn support_radius(&self) -> f64 {
        match self.shape {
            Shape::SquareWell => self.range,
            Shape::Gaussian => GAUSSIAN_CUTOFF * self.range,
        }
    }

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let d = x - self.center;
        match self.shape {
            Shape::SquareWell => {
                if d.abs() <= self.range {
                    self.strength
                } else {
                    0.0
                }
            }
            Shape::Gaussian => {
                if d.abs() > GAUSSIAN_CUTOFF * self.range {
                    0.0
                } else {
                    self.strength * (-(d * d) / (2.0 * self.range * self.range)).exp()
                }
            }
        }
    }

    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !self.strength.is_finite() {
            return Err(Error::config("strength", "must be finite"));
        }
        if self.is_free() {
            return Ok(());
        }
        let length = grid.length();
        if !(self.range.is_finite() && self.range > 0.0) {
            return Err(Error::config("range", format!("must be positive, got {}", self.range)));
        }
        if self.range >= length / 4.0 {
            return Err(Error::config(
                "range",
                format!("{} is not below L/4 = {}", self.range, length / 4.0),
            ));
        }
        match grid.geometry() {
            Geometry::RadialSwave => {
                if self.center != 0.0 {
                    return Err(Error::config(
                        "center",
                        "radial s-wave geometry needs the potential at the origin",
                    ));
                }
            }
            Geometry::LinearBox => {
                if !(self.center - self.range >= 0.0 && self.center + self.range <= length) {
                    return Err(Error::config(
                        "center",
                        format!(
                            "well [{}, {}] leaves the domain [0, {length}]",
                            self.center - self.range,
                            self.center + self.range
                        ),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Pointwise potential at the interior grid nodes.
pub fn eval_potential(spec: &PotentialSpec, grid: &Grid) -> Result<Vec<f64>> {
    spec.validate(grid)?;
    Ok((0..grid.n_points()).map(|k| spec.value(grid.x(k))).collect())
}

/// Potential averaged over each node's cell `[x - h/2, x + h/2]`.
///
/// This is what enters the finite-difference Hamiltonian. For a square well
/// the average is exact, so a wall that falls on a node counts with half
/// weight and the effective well width stays `2·r0` to O(h²). Smooth shapes
/// use the midpoint value, which already agrees with the cell average to O(h²).
pub fn cell_potential(spec: &PotentialSpec, grid: &Grid) -> Result<Vec<f64>> {
    spec.validate(grid)?;
    if spec.is_free() {
        return Ok(vec![0.0; grid.n_points()]);
    }
    let h = grid.spacing();
    let values = (0..grid.n_points())
        .map(|k| {
            let x = grid.x(k);
            match spec.shape {
                Shape::SquareWell => {
                    let lo = (x - 0.5 * h).max(spec.center - spec.range);
                    let hi = (x + 0.5 * h).min(spec.center + spec.range);
                    if hi <= lo {
                        0.0
                    } else {
                        spec.strength * ((hi - lo) / h).min(1.0)
                    }
                }
                Shape::Gaussian => spec.value(x),
            }
        })
        .collect();
    Ok(values)
}

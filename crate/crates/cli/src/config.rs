//! Run configuration: `[section]` headers with `key = value` lines.
//!
//! The text is parsed as TOML, so strings are quoted and lists use
//! brackets. A run has one `[run]` section and exactly one study section.

use std::cell::RefCell;
use std::collections::BTreeSet;
use std::path::PathBuf;

use catastrophe_core::avalanche::AvalancheParams;
use catastrophe_core::grid::{Geometry, Shape};
use catastrophe_core::kinetics::{BarrierProfile, NucleationParams};
use catastrophe_core::overlap::{ScanConfig, SiteLadderConfig};
use serde::Serialize;
use toml::{Table, Value};

use crate::error::CliError;

pub const FORMAT_VERSION: i64 = 1;

pub const STUDIES: [&str; 6] = [
    "avalanche",
    "coefficient-scan",
    "kinetics",
    "overlap-scan",
    "site-overlap",
    "spectrum",
];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub output_dir: Option<PathBuf>,
    pub rng_seed: u64,
    pub format_version: i64,
    pub study: Study,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Study {
    Spectrum(SpectrumConfig),
    OverlapScan(ScanConfig),
    CoefficientScan(CoefficientConfig),
    SiteOverlap(SiteLadderConfig),
    Kinetics(KineticsConfig),
    Avalanche(AvalancheParams),
}

impl Study {
    pub fn name(&self) -> &'static str {
        match self {
            Study::Spectrum(_) => "spectrum",
            Study::OverlapScan(_) => "overlap-scan",
            Study::CoefficientScan(_) => "coefficient-scan",
            Study::SiteOverlap(_) => "site-overlap",
            Study::Kinetics(_) => "kinetics",
            Study::Avalanche(_) => "avalanche",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumConfig {
    pub length: f64,
    pub n_points: usize,
    pub geometry: Geometry,
    pub shape: Shape,
    pub strength: f64,
    pub range: f64,
    pub center: f64,
    pub n_eigenpairs: usize,
    /// Particle number used for the adequacy check.
    pub n_particles: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoefficientConfig {
    pub shape: Shape,
    pub strength: f64,
    pub range: f64,
    pub density: f64,
    pub n_values: Vec<usize>,
    pub excitation_order: usize,
    pub window: Option<usize>,
    pub resolution: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KineticsConfig {
    pub nucleation: Option<NucleationSweep>,
    pub barrier: Option<BarrierPair>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NucleationSweep {
    pub surface_tension: f64,
    pub bulk_drive: f64,
    /// `k_B·T` in the same energy unit as the barrier.
    pub thermal_energy: f64,
    pub contact_angles: Vec<f64>,
}

impl NucleationSweep {
    pub fn params(&self, contact_angle: f64) -> NucleationParams {
        NucleationParams {
            surface_tension: self.surface_tension,
            bulk_drive: self.bulk_drive,
            contact_angle,
            temperature: self.thermal_energy,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BarrierPair {
    pub unperturbed: BarrierProfile,
    pub perturbed: Option<BarrierProfile>,
}

/// Typed access to one section that remembers which keys were read.
struct Section<'a> {
    name: &'a str,
    table: &'a Table,
    seen: RefCell<BTreeSet<String>>,
}

impl<'a> Section<'a> {
    fn new(name: &'a str, table: &'a Table) -> Self {
        Section {
            name,
            table,
            seen: RefCell::new(BTreeSet::new()),
        }
    }

    fn field(&self, key: &str) -> String {
        format!("{}.{key}", self.name)
    }

    fn bad(&self, key: &str, reason: impl Into<String>) -> CliError {
        CliError::Validation {
            field: self.field(key),
            reason: reason.into(),
        }
    }

    fn get(&self, key: &str) -> Option<&'a Value> {
        self.seen.borrow_mut().insert(key.to_string());
        self.table.get(key)
    }

    fn require(&self, key: &str) -> Result<&'a Value, CliError> {
        self.get(key).ok_or_else(|| self.bad(key, "missing"))
    }

    fn as_f64(&self, key: &str, v: &Value) -> Result<f64, CliError> {
        match v {
            Value::Float(x) => Ok(*x),
            Value::Integer(i) => Ok(*i as f64),
            other => Err(self.bad(key, format!("expected a number, got {}", other.type_str()))),
        }
    }

    fn as_count(&self, key: &str, v: &Value) -> Result<u64, CliError> {
        match v {
            Value::Integer(i) if *i >= 0 => Ok(*i as u64),
            Value::Integer(i) => Err(self.bad(key, format!("must be non-negative, got {i}"))),
            other => Err(self.bad(key, format!("expected an integer, got {}", other.type_str()))),
        }
    }

    fn f64(&self, key: &str) -> Result<f64, CliError> {
        self.as_f64(key, self.require(key)?)
    }

    fn f64_or(&self, key: &str, default: f64) -> Result<f64, CliError> {
        self.get(key).map_or(Ok(default), |v| self.as_f64(key, v))
    }

    fn u64(&self, key: &str) -> Result<u64, CliError> {
        self.as_count(key, self.require(key)?)
    }

    fn u64_or(&self, key: &str, default: u64) -> Result<u64, CliError> {
        self.get(key).map_or(Ok(default), |v| self.as_count(key, v))
    }

    fn usize(&self, key: &str) -> Result<usize, CliError> {
        Ok(self.u64(key)? as usize)
    }

    fn opt_usize(&self, key: &str) -> Result<Option<usize>, CliError> {
        self.get(key)
            .map(|v| self.as_count(key, v).map(|x| x as usize))
            .transpose()
    }

    fn str(&self, key: &str) -> Result<Option<&'a str>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(other) => Err(self.bad(key, format!("expected a string, got {}", other.type_str()))),
        }
    }

    fn list<T>(&self, key: &str, each: impl Fn(&Value) -> Result<T, CliError>) -> Result<Option<Vec<T>>, CliError> {
        match self.get(key) {
            None => Ok(None),
            Some(Value::Array(items)) => items.iter().map(each).collect::<Result<_, _>>().map(Some),
            Some(other) => Err(self.bad(key, format!("expected a list, got {}", other.type_str()))),
        }
    }

    fn f64_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        self.list(key, |v| self.as_f64(key, v))
    }

    fn usize_list(&self, key: &str) -> Result<Vec<usize>, CliError> {
        self.list(key, |v| self.as_count(key, v).map(|x| x as usize))?
            .ok_or_else(|| self.bad(key, "missing"))
    }

    fn shape(&self) -> Result<Shape, CliError> {
        match self.str("shape")? {
            Some("square_well") => Ok(Shape::SquareWell),
            Some("gaussian") => Ok(Shape::Gaussian),
            Some(other) => Err(self.bad("shape", format!("unknown shape {other:?}; use square_well or gaussian"))),
            None => Err(self.bad("shape", "missing")),
        }
    }

    fn geometry(&self) -> Result<Geometry, CliError> {
        match self.str("geometry")? {
            None | Some("radial_swave") => Ok(Geometry::RadialSwave),
            Some("linear_box") => Ok(Geometry::LinearBox),
            Some(other) => Err(self.bad(
                "geometry",
                format!("unknown geometry {other:?}; use radial_swave or linear_box"),
            )),
        }
    }

    /// Rejects keys that no reader asked for.
    fn finish(self) -> Result<(), CliError> {
        let seen = self.seen.borrow();
        match self.table.keys().find(|k| !seen.contains(k.as_str())) {
            Some(k) => Err(self.bad(k, "unknown key")),
            None => Ok(()),
        }
    }
}

fn core_err(section: &str, e: catastrophe_core::Error) -> CliError {
    match e {
        catastrophe_core::Error::Config { field, reason } => CliError::Validation {
            field: format!("{section}.{field}"),
            reason,
        },
        other if other.is_config() => CliError::Validation {
            field: section.to_string(),
            reason: other.to_string(),
        },
        other => CliError::Numerical(other.to_string()),
    }
}

pub fn parse(text: &str) -> Result<RunConfig, CliError> {
    let root: Table = text.parse().map_err(|e: toml::de::Error| CliError::Validation {
        field: "config".into(),
        reason: e.message().to_string(),
    })?;
    for (key, value) in &root {
        if !value.is_table() {
            return Err(CliError::Validation {
                field: key.clone(),
                reason: "keys must live inside a [section]".into(),
            });
        }
        if key != "run" && !STUDIES.contains(&key.as_str()) {
            return Err(CliError::Validation {
                field: key.clone(),
                reason: format!("unknown section; studies are {}", STUDIES.join(", ")),
            });
        }
    }
    let empty = Table::new();
    let run_table = root.get("run").and_then(Value::as_table).unwrap_or(&empty);
    let run = Section::new("run", run_table);
    let format_version = match run.get("format_version") {
        None => FORMAT_VERSION,
        Some(Value::Integer(v)) => *v,
        Some(_) => return Err(run.bad("format_version", "expected an integer")),
    };
    if format_version != FORMAT_VERSION {
        return Err(run.bad(
            "format_version",
            format!("this build reads version {FORMAT_VERSION}, got {format_version}"),
        ));
    }
    let rng_seed = run.u64_or("rng_seed", 0)?;
    let output_dir = run.str("output_dir")?.map(PathBuf::from);
    let declared = run.str("subcommand")?;

    let present: Vec<&str> = STUDIES.iter().copied().filter(|s| root.contains_key(*s)).collect();
    let name = match (present.as_slice(), declared) {
        ([one], None) => *one,
        ([one], Some(d)) if d == *one => *one,
        ([one], Some(d)) => {
            return Err(run.bad("subcommand", format!("names {d:?} but the study section is [{one}]")))
        }
        ([], _) => {
            return Err(CliError::Validation {
                field: "config".into(),
                reason: format!("no study section; add one of {}", STUDIES.join(", ")),
            })
        }
        (many, _) => {
            return Err(CliError::Validation {
                field: "config".into(),
                reason: format!("exactly one study section allowed, found {}", many.join(", ")),
            })
        }
    };
    run.finish()?;

    let sec = Section::new(name, root[name].as_table().expect("checked above"));
    let study = match name {
        "spectrum" => Study::Spectrum(spectrum(&sec)?),
        "overlap-scan" => Study::OverlapScan(overlap_scan(&sec)?),
        "coefficient-scan" => Study::CoefficientScan(coefficient_scan(&sec)?),
        "site-overlap" => Study::SiteOverlap(site_overlap(&sec)?),
        "kinetics" => Study::Kinetics(kinetics(&sec)?),
        "avalanche" => Study::Avalanche(avalanche(&sec, rng_seed)?),
        _ => unreachable!("section names are checked against STUDIES"),
    };
    sec.finish()?;

    let cfg = RunConfig {
        output_dir,
        rng_seed,
        format_version,
        study,
    };
    validate(&cfg)?;
    Ok(cfg)
}

fn spectrum(s: &Section) -> Result<SpectrumConfig, CliError> {
    let n_eigenpairs = s.usize("n_eigenpairs")?;
    Ok(SpectrumConfig {
        length: s.f64("length")?,
        n_points: s.usize("n_points")?,
        geometry: s.geometry()?,
        shape: s.shape()?,
        strength: s.f64("strength")?,
        range: s.f64("range")?,
        center: s.f64_or("center", 0.0)?,
        n_eigenpairs,
        n_particles: s.opt_usize("n_particles")?.unwrap_or(n_eigenpairs),
    })
}

fn overlap_scan(s: &Section) -> Result<ScanConfig, CliError> {
    let mut cfg = ScanConfig::new(
        s.shape()?,
        s.f64("strength")?,
        s.f64("range")?,
        s.f64("density")?,
        s.usize_list("n_values")?,
    );
    cfg.resolution = s.f64_or("resolution", cfg.resolution)?;
    Ok(cfg)
}

fn coefficient_scan(s: &Section) -> Result<CoefficientConfig, CliError> {
    Ok(CoefficientConfig {
        shape: s.shape()?,
        strength: s.f64("strength")?,
        range: s.f64("range")?,
        density: s.f64("density")?,
        n_values: s.usize_list("n_values")?,
        excitation_order: s.usize("excitation_order")?,
        window: s.opt_usize("window")?,
        resolution: s.f64_or("resolution", 20.0)?,
    })
}

fn site_overlap(s: &Section) -> Result<SiteLadderConfig, CliError> {
    Ok(SiteLadderConfig {
        shape: s.shape()?,
        strength: s.f64("strength")?,
        range: s.f64("range")?,
        density: s.f64("density")?,
        site_a_fraction: s.f64("site_a_fraction")?,
        site_b_fraction: s.f64("site_b_fraction")?,
        n_values: s.usize_list("n_values")?,
        resolution: s.f64_or("resolution", 20.0)?,
    })
}

fn kinetics(s: &Section) -> Result<KineticsConfig, CliError> {
    let nucleation = match s.get("surface_tension") {
        None => None,
        Some(_) => Some(NucleationSweep {
            surface_tension: s.f64("surface_tension")?,
            bulk_drive: s.f64("bulk_drive")?,
            thermal_energy: s.f64("thermal_energy")?,
            contact_angles: s
                .f64_list("contact_angles")?
                .ok_or_else(|| s.bad("contact_angles", "missing"))?,
        }),
    };
    let barrier = match s.f64_list("breakpoints")? {
        None => None,
        Some(xs) => {
            let energy = s.f64("energy")?;
            let nu = s.f64("attempt_frequency")?;
            let vs = s.f64_list("values")?.ok_or_else(|| s.bad("values", "missing"))?;
            let unperturbed = BarrierProfile::new(xs, vs, energy, nu).map_err(|e| core_err(s.name, e))?;
            let perturbed = match s.f64_list("perturbed_breakpoints")? {
                None => None,
                Some(px) => {
                    let pv = s
                        .f64_list("perturbed_values")?
                        .ok_or_else(|| s.bad("perturbed_values", "missing"))?;
                    Some(BarrierProfile::new(px, pv, energy, nu).map_err(|e| core_err(s.name, e))?)
                }
            };
            Some(BarrierPair { unperturbed, perturbed })
        }
    };
    if nucleation.is_none() && barrier.is_none() {
        return Err(s.bad(
            "surface_tension",
            "kinetics needs a nucleation sweep (surface_tension, ...) or a barrier (breakpoints, ...)",
        ));
    }
    Ok(KineticsConfig { nucleation, barrier })
}

fn avalanche(s: &Section, rng_seed: u64) -> Result<AvalancheParams, CliError> {
    let mut p = AvalancheParams::new(
        s.f64("townsend_alpha")?,
        s.f64("gap")?,
        s.u64("n_initial")?,
        s.u64("trials")?,
        rng_seed,
    );
    p.threshold = s.u64_or("threshold", p.threshold)?;
    p.bin_width = s.u64_or("bin_width", p.bin_width)?;
    Ok(p)
}

/// Checks everything a study will touch, without solving anything.
pub fn validate(cfg: &RunConfig) -> Result<(), CliError> {
    let name = cfg.study.name();
    let wrap = |e| core_err(name, e);
    match &cfg.study {
        Study::Spectrum(c) => {
            let grid = catastrophe_core::grid::Grid::new(c.length, c.n_points, c.geometry).map_err(wrap)?;
            let pot = catastrophe_core::grid::PotentialSpec::new(c.shape, c.strength, c.range, c.center);
            pot.validate(&grid).map_err(wrap)?;
            if c.n_eigenpairs == 0 || c.n_eigenpairs > c.n_points {
                return Err(CliError::Validation {
                    field: "spectrum.n_eigenpairs".into(),
                    reason: format!("must lie in 1..={}", c.n_points),
                });
            }
            if c.n_particles == 0 {
                return Err(CliError::Validation {
                    field: "spectrum.n_particles".into(),
                    reason: "must be positive".into(),
                });
            }
            catastrophe_core::spectral::require_adequate(&grid, &pot, c.n_particles).map_err(wrap)?;
        }
        Study::OverlapScan(c) => c.validate().map_err(wrap)?,
        Study::CoefficientScan(c) => {
            if c.n_values.is_empty() {
                return Err(CliError::Validation {
                    field: "coefficient-scan.n_values".into(),
                    reason: "need at least one N".into(),
                });
            }
            for point in c.points() {
                point.validate().map_err(wrap)?;
            }
        }
        Study::SiteOverlap(c) => c.validate().map_err(wrap)?,
        Study::Kinetics(c) => {
            if let Some(n) = &c.nucleation {
                if n.contact_angles.is_empty() {
                    return Err(CliError::Validation {
                        field: "kinetics.contact_angles".into(),
                        reason: "need at least one angle".into(),
                    });
                }
                for &theta in &n.contact_angles {
                    n.params(theta).validate().map_err(wrap)?;
                }
            }
            if let Some(b) = &c.barrier {
                b.unperturbed.barrier_interval().map_err(wrap)?;
                if let Some(p) = &b.perturbed {
                    p.barrier_interval().map_err(wrap)?;
                }
            }
        }
        Study::Avalanche(p) => p.validate().map_err(wrap)?,
    }
    Ok(())
}

impl CoefficientConfig {
    pub fn points(&self) -> impl Iterator<Item = catastrophe_core::overlap::CoefficientScanConfig> + '_ {
        self.n_values
            .iter()
            .map(|&n| catastrophe_core::overlap::CoefficientScanConfig {
                shape: self.shape,
                strength: self.strength,
                range: self.range,
                density: self.density,
                n,
                excitation_order: self.excitation_order,
                window: self.window,
                resolution: self.resolution,
            })
    }
}

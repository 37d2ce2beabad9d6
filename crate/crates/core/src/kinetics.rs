//! Lifetimes of metastable states and particle-seeded nucleation.
//!
//! Two pictures of a detector's 'ready' state: a barrier that the system
//! tunnels through (WKB, ħ = 2m = 1) and a superheated phase that decays by
//! nucleating critical bubbles (classical nucleation theory, with a seed that
//! lowers the barrier through its contact angle).

use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance of the bisection that locates turning points inside a segment.
pub const TURNING_POINT_TOL: f64 = 1e-10;

/// Simpson panels per half-piece of the barrier integral.
const SIMPSON_PANELS: usize = 256;

/// Piecewise-linear potential on `[x_0, x_max]`. Repeated abscissae encode
/// jumps, so a rectangular barrier is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierProfile {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub energy: f64,
    pub attempt_frequency: f64,
}

impl BarrierProfile {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>, energy: f64, attempt_frequency: f64) -> Result<Self> {
        let p = BarrierProfile {
            breakpoints,
            values,
            energy,
            attempt_frequency,
        };
        p.validate()?;
        Ok(p)
    }

    /// Flat well at `energy` with a rectangular barrier of `height` on `[start, start + width]`.
    pub fn rectangular(height: f64, width: f64, energy: f64, attempt_frequency: f64) -> Result<Self> {
        let start = 1.0;
        let end = start + width;
        BarrierProfile::new(
            vec![0.0, start, start, end, end, end + 1.0],
            vec![energy, energy, height, height, energy, energy],
            energy,
            attempt_frequency,
        )
    }

    /// Inverted parabola of `height` and base `width`, sampled on `samples` segments.
    pub fn parabolic(height: f64, width: f64, energy: f64, attempt_frequency: f64, samples: usize) -> Result<Self> {
        let start = 1.0;
        let samples = samples.max(2);
        let mut xs = vec![0.0];
        let mut vs = vec![energy];
        for i in 0..=samples {
            let t = i as f64 / samples as f64;
            let x = start + t * width;
            let u = 2.0 * t - 1.0;
            xs.push(x);
            vs.push(energy + (height - energy) * (1.0 - u * u));
        }
        xs.push(start + width + 1.0);
        vs.push(energy);
        BarrierProfile::new(xs, vs, energy, attempt_frequency)
    }

    pub fn domain(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    fn validate(&self) -> Result<()> {
        let xs = &self.breakpoints;
        if xs.len() < 2 || xs.len() != self.values.len() {
            return Err(Error::config(
                "breakpoints",
                "need at least two breakpoints, one value per breakpoint",
            ));
        }
        if xs.iter().chain(&self.values).any(|v| !v.is_finite()) {
            return Err(Error::config("values", "breakpoints and values must be finite"));
        }
        if xs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::config("breakpoints", "must be non-decreasing"));
        }
        if xs.windows(3).any(|w| w[0] == w[2]) {
            return Err(Error::config("breakpoints", "at most two values per abscissa"));
        }
        if xs[0] < 0.0 || xs[0] == *xs.last().unwrap() {
            return Err(Error::config("breakpoints", "domain must be [0, x_max] with x_max > 0"));
        }
        if !self.energy.is_finite() {
            return Err(Error::config("energy", "must be finite"));
        }
        if !(self.attempt_frequency.is_finite() && self.attempt_frequency > 0.0) {
            return Err(Error::config("attempt_frequency", "must be positive"));
        }
        Ok(())
    }

    /// Classically forbidden interval `[a, b]` where `V > E`.
    pub fn barrier_interval(&self) -> Result<(f64, f64)> {
        self.validate()?;
        let e = self.energy;
        let mut intervals: Vec<(f64, f64)> = Vec::new();
        let mut push = |lo: f64, hi: f64| {
            if let Some(last) = intervals.last_mut() {
                if last.1 == lo {
                    last.1 = hi;
                    return;
                }
            }
            intervals.push((lo, hi));
        };
        for (x, v) in self.segments() {
            let (d0, d1) = (v.0 - e, v.1 - e);
            match (d0 > 0.0, d1 > 0.0) {
                (true, true) => push(x.0, x.1),
                (false, false) => {}
                (false, true) => push(crossing(x, v, e), x.1),
                (true, false) => push(x.0, crossing(x, v, e)),
            }
        }
        match intervals.len() {
            0 => Err(Error::config(
                "values",
                "no part of the profile rises above the energy; the state is not metastable",
            )),
            1 => {
                let (a, b) = intervals[0];
                let (lo, hi) = self.domain();
                if a <= lo || b >= hi || a >= b {
                    return Err(Error::config(
                        "breakpoints",
                        "the barrier must lie strictly inside the domain",
                    ));
                }
                Ok((a, b))
            }
            k => Err(Error::Unsupported(format!(
                "profile has {k} disjoint barrier intervals; only single barriers are modelled"
            ))),
        }
    }

    /// Non-degenerate segments as ((x0, x1), (v0, v1)).
    fn segments(&self) -> impl Iterator<Item = ((f64, f64), (f64, f64))> + '_ {
        self.breakpoints
            .windows(2)
            .zip(self.values.windows(2))
            .filter(|(x, _)| x[1] > x[0])
            .map(|(x, v)| ((x[0], x[1]), (v[0], v[1])))
    }
}

// Bisection for V(x) = e on a linear segment that changes sign.
fn crossing(x: (f64, f64), v: (f64, f64), e: f64) -> f64 {
    let f = |t: f64| v.0 + (v.1 - v.0) * (t - x.0) / (x.1 - x.0) - e;
    let (mut lo, mut hi) = x;
    let rising = f(lo) <= 0.0;
    while hi - lo > TURNING_POINT_TOL {
        let mid = 0.5 * (lo + hi);
        if (f(mid) <= 0.0) == rising {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    let n = panels + panels % 2;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + i as f64 * h);
    }
    sum * h / 3.0
}

/// `∫ sqrt(g)` over `[p, q]` for `g` linear and non-negative on the piece.
///
/// Each half is mapped by `x = end ± t²`, which turns a square-root
/// turning point into a polynomial integrand.
fn sqrt_linear_integral(p: f64, q: f64, gp: f64, gq: f64) -> f64 {
    let g = |x: f64| (gp + (gq - gp) * (x - p) / (q - p)).max(0.0).sqrt();
    let m = 0.5 * (p + q);
    let half = (m - p).sqrt();
    let left = simpson(|t| 2.0 * t * g(p + t * t), 0.0, half, SIMPSON_PANELS);
    let half = (q - m).sqrt();
    let right = simpson(|t| 2.0 * t * g(q - t * t), 0.0, half, SIMPSON_PANELS);
    left + right
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WkbRate {
    /// `2·∫_a^b sqrt(V − E) dx`
    pub exponent: f64,
    pub rate: f64,
    pub turning_points: (f64, f64),
}

impl WkbRate {
    pub fn lifetime(&self) -> f64 {
        1.0 / self.rate
    }
}

/// Escape rate `ν·exp(−2∫ sqrt(V − E))` through the single barrier of `profile`.
pub fn wkb_rate(profile: &BarrierProfile) -> Result<WkbRate> {
    let (a, b) = profile.barrier_interval()?;
    let e = profile.energy;
    let mut integral = 0.0;
    for (x, v) in profile.segments() {
        let lo = x.0.max(a);
        let hi = x.1.min(b);
        if hi <= lo {
            continue;
        }
        let at = |t: f64| v.0 + (v.1 - v.0) * (t - x.0) / (x.1 - x.0) - e;
        integral += sqrt_linear_integral(lo, hi, at(lo).max(0.0), at(hi).max(0.0));
    }
    let exponent = 2.0 * integral;
    let rate = profile.attempt_frequency * (-exponent).exp();
    if !(rate > 0.0) {
        return Err(Error::Numerical(format!(
            "escape rate underflows (WKB exponent {exponent})"
        )));
    }
    Ok(WkbRate {
        exponent,
        rate,
        turning_points: (a, b),
    })
}

/// A ratio of rates stored by its natural logarithm, since these routinely
/// overflow a double.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateRatio {
    pub ln: f64,
}

impl RateRatio {
    pub fn ratio(&self) -> f64 {
        self.ln.exp()
    }

    pub fn log10(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }
}

/// `rate(perturbed) / rate(unperturbed)`: how much faster the state decays
/// once the measured particle has deformed the barrier.
pub fn lifetime_ratio(unperturbed: &BarrierProfile, perturbed: &BarrierProfile) -> Result<RateRatio> {
    let r0 = wkb_rate(unperturbed)?;
    let r1 = wkb_rate(perturbed)?;
    let ln = (perturbed.attempt_frequency.ln() - r1.exponent)
        - (unperturbed.attempt_frequency.ln() - r0.exponent);
    Ok(RateRatio { ln })
}

/// Describes the minimum-deposit formula in emitted metadata.
pub const MIN_DEPOSIT_MODEL: &str =
    "E_min = 4*pi*r^2*sigma + (4*pi/3)*r^3*dg at r = 2*sigma/dg (surface plus bulk work of the critical bubble; simplified thermal-spike criterion)";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NucleationParams {
    pub surface_tension: f64,
    /// Free-energy gain per unit volume of the stable phase.
    pub bulk_drive: f64,
    /// Radians in `[0, π]`; `π` means the seed does not wet at all.
    pub contact_angle: f64,
    pub temperature: f64,
}

impl NucleationParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.surface_tension.is_finite() && self.surface_tension > 0.0) {
            return Err(Error::config("surface_tension", "must be positive"));
        }
        if self.bulk_drive == 0.0 {
            return Err(Error::config("bulk_drive", "zero drive: the stable phase gains nothing"));
        }
        if !(self.bulk_drive.is_finite() && self.bulk_drive > 0.0) {
            return Err(Error::config("bulk_drive", "must be positive"));
        }
        if !(self.temperature.is_finite() && self.temperature > 0.0) {
            return Err(Error::config("temperature", "must be positive"));
        }
        check_angle(self.contact_angle)
    }
}

fn check_angle(theta: f64) -> Result<()> {
    if !(0.0..=PI).contains(&theta) {
        return Err(Error::config(
            "contact_angle",
            format!("{theta} is outside [0, π]"),
        ));
    }
    Ok(())
}

/// Homogeneous barrier `16π σ³ / (3 Δg²)`.
pub fn homogeneous_barrier(params: &NucleationParams) -> Result<f64> {
    params.validate()?;
    let s = params.surface_tension;
    let g = params.bulk_drive;
    Ok(16.0 * PI * s * s * s / (3.0 * g * g))
}

/// Barrier reduction on a seed, `(2 + cos θ)(1 − cos θ)² / 4`.
pub fn contact_angle_factor(theta: f64) -> Result<f64> {
    check_angle(theta)?;
    // sin(π/2 − θ) rather than cos θ: exact at 0, π/2 and π
    let c = (FRAC_PI_2 - theta).sin();
    let one_minus = 1.0 - c;
    Ok((2.0 + c) * one_minus * one_minus / 4.0)
}

/// Acceleration of seeded over unseeded nucleation, `exp[(1 − f(θ))·ΔG*/kT]`.
pub fn seeded_rate_ratio(params: &NucleationParams) -> Result<RateRatio> {
    let barrier = homogeneous_barrier(params)?;
    let f = contact_angle_factor(params.contact_angle)?;
    Ok(RateRatio {
        ln: (1.0 - f) * barrier / params.temperature,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalNucleus {
    pub radius: f64,
    pub min_deposit: f64,
}

/// Critical radius `2σ/Δg` and the minimum localized energy deposit, see
/// [`MIN_DEPOSIT_MODEL`].
pub fn critical_radius_and_min_deposit(params: &NucleationParams) -> Result<CriticalNucleus> {
    params.validate()?;
    let s = params.surface_tension;
    let g = params.bulk_drive;
    let r = 2.0 * s / g;
    Ok(CriticalNucleus {
        radius: r,
        min_deposit: 4.0 * PI * r * r * s + 4.0 * PI / 3.0 * r * r * r * g,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(s: f64, g: f64, theta: f64, kt: f64) -> NucleationParams {
        NucleationParams {
            surface_tension: s,
            bulk_drive: g,
            contact_angle: theta,
            temperature: kt,
        }
    }

    #[test]
    fn rectangular_exponent_is_exact() {
        for (v0, w) in [(100.0, 5.0), (3.7, 0.3), (0.01, 12.0)] {
            let p = BarrierProfile::rectangular(v0, w, 0.0, 1.0).unwrap();
            let r = wkb_rate(&p).unwrap();
            let exact = 2.0 * w * f64::sqrt(v0);
            assert!((r.exponent - exact).abs() <= 1e-12 * exact, "{} vs {exact}", r.exponent);
            assert_eq!(r.turning_points, (1.0, 1.0 + w));
        }
    }

    #[test]
    fn vanishing_barrier_rate_tends_to_attempt_frequency() {
        let nu = 3.0;
        let mut prev = 0.0;
        for v0 in [1e-2, 1e-4, 1e-6, 1e-8] {
            let r = wkb_rate(&BarrierProfile::rectangular(v0, 1.0, 0.0, nu).unwrap()).unwrap();
            assert!(r.rate > prev && r.rate < nu);
            prev = r.rate;
        }
        assert!((nu - prev) / nu < 1e-3);
    }

    #[test]
    fn parabola_matches_continuum_area() {
        let p = BarrierProfile::parabolic(4.0, 3.0, 0.0, 1.0, 4000).unwrap();
        let r = wkb_rate(&p).unwrap();
        // 2·∫ sqrt(V0(1 − u²)) dx = 2·(w/2)·sqrt(V0)·π/2
        let exact = 3.0 * 2.0 * PI / 2.0;
        assert!((r.exponent - exact).abs() / exact < 1e-5);
    }

    #[test]
    fn monotone_in_height_and_width() {
        let mut prev = f64::INFINITY;
        for v0 in [1.0, 2.0, 4.0, 8.0] {
            let r = wkb_rate(&BarrierProfile::rectangular(v0, 2.0, 0.0, 1.0).unwrap()).unwrap();
            assert!(r.rate < prev);
            prev = r.rate;
        }
        prev = f64::INFINITY;
        for w in [0.5, 1.0, 2.0, 4.0] {
            let r = wkb_rate(&BarrierProfile::rectangular(2.0, w, 0.0, 1.0).unwrap()).unwrap();
            assert!(r.rate < prev);
            prev = r.rate;
        }
    }

    #[test]
    fn profile_errors() {
        let flat = BarrierProfile::new(vec![0.0, 1.0, 2.0], vec![0.0, -1.0, 0.0], 0.0, 1.0).unwrap();
        assert!(matches!(wkb_rate(&flat), Err(Error::Config { .. })));

        let double = BarrierProfile::new(
            vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0],
            vec![0.0, 2.0, 0.0, 2.0, 0.0, 0.0],
            0.5,
            1.0,
        )
        .unwrap();
        assert!(matches!(wkb_rate(&double), Err(Error::Unsupported(_))));

        // barrier touching the domain edge is not metastable
        let edge = BarrierProfile::new(vec![0.0, 1.0], vec![2.0, 0.0], 0.0, 1.0).unwrap();
        assert!(wkb_rate(&edge).is_err());

        assert!(BarrierProfile::new(vec![0.0, 1.0], vec![0.0], 0.0, 1.0).is_err());
        assert!(BarrierProfile::new(vec![0.0, 2.0, 1.0], vec![0.0; 3], 0.0, 1.0).is_err());
        assert!(BarrierProfile::rectangular(1.0, 1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn turning_points_inside_segments() {
        // triangle peaking at 2 over base [1, 3], E = 1: turning points 1.5 and 2.5
        let p = BarrierProfile::new(vec![0.0, 1.0, 2.0, 3.0, 4.0], vec![0.0, 0.0, 2.0, 0.0, 0.0], 1.0, 1.0)
            .unwrap();
        let (a, b) = p.barrier_interval().unwrap();
        assert!((a - 1.5).abs() < 1e-10 && (b - 2.5).abs() < 1e-10);
        // ∫ sqrt(2(x − 1.5)) over [1.5, 2] twice = 2·(2/3)·√2·0.5^{3/2}
        let exact = 2.0 * 2.0 * (2.0 / 3.0) * 2f64.sqrt() * 0.5f64.powf(1.5);
        assert!((wkb_rate(&p).unwrap().exponent - exact).abs() < 1e-9);
    }

    #[test]
    fn lifetime_ratios() {
        let p = BarrierProfile::parabolic(5.0, 2.0, 0.0, 1.0, 100).unwrap();
        assert_eq!(lifetime_ratio(&p, &p).unwrap().ratio(), 1.0);

        let a = BarrierProfile::rectangular(100.0, 5.0, 0.0, 1.0).unwrap();
        let b = BarrierProfile::rectangular(64.0, 5.0, 0.0, 1.0).unwrap();
        let r = lifetime_ratio(&a, &b).unwrap();
        assert!((r.ln - 20.0).abs() < 1e-11);
        assert!((r.log10() - 20.0 / std::f64::consts::LN_10).abs() < 1e-11);

        let lower = BarrierProfile::parabolic(4.5, 2.0, 0.0, 1.0, 100).unwrap();
        assert!(lifetime_ratio(&p, &lower).unwrap().ratio() > 1.0);
    }

    #[test]
    fn homogeneous_barrier_values() {
        let b = homogeneous_barrier(&params(1.0, 1.0, PI, 1.0)).unwrap();
        assert!((b - 16.0 * PI / 3.0).abs() < 1e-14);
        let b2 = homogeneous_barrier(&params(1.0, 2.0, PI, 1.0)).unwrap();
        assert!((b / b2 - 4.0).abs() < 1e-14);
        assert!(matches!(
            homogeneous_barrier(&params(1.0, 0.0, PI, 1.0)),
            Err(Error::Config { ref field, .. }) if field == "bulk_drive"
        ));
    }

    #[test]
    fn contact_angle_factor_values() {
        assert_eq!(contact_angle_factor(0.0).unwrap(), 0.0);
        assert_eq!(contact_angle_factor(PI).unwrap(), 1.0);
        assert_eq!(contact_angle_factor(FRAC_PI_2).unwrap(), 0.5);
        assert!(contact_angle_factor(-0.1).is_err());
        assert!(contact_angle_factor(PI + 1e-9).is_err());
        assert!(contact_angle_factor(f64::NAN).is_err());
    }

    #[test]
    fn contact_angle_factor_is_monotone() {
        let n = 1000;
        let mut prev = -1.0;
        for i in 0..=n {
            let f = contact_angle_factor(PI * i as f64 / n as f64).unwrap();
            assert!((0.0..=1.0).contains(&f));
            assert!(f >= prev);
            if i > 0 {
                // continuity: f' ≤ 3/4·sin θ·... bounded by 1 on [0, π]
                assert!(f - prev <= PI / n as f64);
            }
            prev = f;
        }
    }

    #[test]
    fn seeded_ratios() {
        let base = params(1.0, 1.0, PI, 1.0);
        assert_eq!(seeded_rate_ratio(&base).unwrap().ratio(), 1.0);

        let g = homogeneous_barrier(&base).unwrap();
        let half = params(1.0, 1.0, FRAC_PI_2, g / 50.0);
        let r = seeded_rate_ratio(&half).unwrap();
        assert!((r.ln - 25.0).abs() < 1e-12);

        let mut prev = f64::INFINITY;
        for i in 0..=100 {
            let theta = PI * i as f64 / 100.0;
            let r = seeded_rate_ratio(&params(0.7, 1.3, theta, 0.2)).unwrap();
            assert!(r.ratio() >= 1.0);
            assert!(r.ln < prev);
            if i < 100 {
                assert!(r.ratio() > 1.0);
            }
            prev = r.ln;
        }
    }

    #[test]
    fn critical_nucleus() {
        let c = critical_radius_and_min_deposit(&params(1.0, 2.0, PI, 1.0)).unwrap();
        assert_eq!(c.radius, 1.0);
        assert!((c.min_deposit - (4.0 * PI + 8.0 * PI / 3.0)).abs() < 1e-13);
    }
}

use catastrophe_core::fit::fit_exponent;
use catastrophe_core::kinetics::*;
use catastrophe_core::Error;
use proptest::prelude::*;
use std::f64::consts::PI;

fn nucleation(sigma: f64, dg: f64, theta: f64) -> NucleationParams {
    NucleationParams {
        surface_tension: sigma,
        bulk_drive: dg,
        contact_angle: theta,
        temperature: 1e-20,
    }
}

// Closed form of 2∫sqrt(g) for g linear on each segment.
fn piecewise_exponent(p: &BarrierProfile) -> f64 {
    let mut total = 0.0;
    for (x, v) in p.breakpoints.windows(2).zip(p.values.windows(2)) {
        let dx = x[1] - x[0];
        if dx == 0.0 {
            continue;
        }
        let (g0, g1) = ((v[0] - p.energy).max(0.0), (v[1] - p.energy).max(0.0));
        total += if (g1 - g0).abs() < 1e-300 {
            dx * g0.sqrt()
        } else {
            let s = (g1 - g0) / dx;
            2.0 / (3.0 * s) * (g1.powf(1.5) - g0.powf(1.5))
        };
    }
    2.0 * total
}

#[test]
fn sampled_parabola_matches_segment_oracle() {
    for samples in [4, 16, 64, 256] {
        let p = BarrierProfile::parabolic(3.0, 2.0, 0.5, 1.0, samples).unwrap();
        let oracle = piecewise_exponent(&p);
        let got = wkb_rate(&p).unwrap().exponent;
        assert!((got - oracle).abs() < 1e-6, "samples={samples} {got} vs {oracle}");
    }
}

#[test]
fn asymmetric_profile_matches_segment_oracle() {
    let p = BarrierProfile::new(
        vec![0.0, 1.0, 1.5, 1.5, 2.5, 3.0, 4.0],
        vec![0.0, 0.0, 2.0, 4.0, 1.0, 0.0, 0.0],
        0.25,
        1e12,
    )
    .unwrap();
    let (a, b) = p.barrier_interval().unwrap();
    assert!((a - 1.0625).abs() < 1e-9 && (b - 2.875).abs() < 1e-9);
    // the oracle clips at zero, which is exact only at the breakpoints, so
    // rebuild the profile with the turning points as explicit breakpoints
    let clipped = BarrierProfile::new(
        vec![0.0, 1.0625, 1.5, 1.5, 2.5, 2.875, 4.0],
        vec![0.25, 0.25, 2.0, 4.0, 1.0, 0.25, 0.25],
        0.25,
        1e12,
    )
    .unwrap();
    let got = wkb_rate(&p).unwrap().exponent;
    assert!((got - piecewise_exponent(&clipped)).abs() < 1e-6);
}

#[test]
fn rectangular_barriers() {
    for (v0, w) in [(1.0, 1.0), (4.0, 0.5), (100.0, 3.0)] {
        let p = BarrierProfile::rectangular(v0, w, 0.0, 1.0).unwrap();
        let r = wkb_rate(&p).unwrap();
        assert!((r.exponent - 2.0 * w * v0.sqrt()).abs() < 1e-12);
        assert!((r.lifetime() * r.rate - 1.0).abs() < 1e-15);
    }
    let p = BarrierProfile::rectangular(2.0, 1.0, 0.0, 1.0).unwrap();
    assert_eq!(lifetime_ratio(&p, &p).unwrap().ratio(), 1.0);
}

#[test]
fn thinner_barrier_decays_faster() {
    let before = BarrierProfile::rectangular(4.0, 2.0, 0.0, 1e13).unwrap();
    let after = BarrierProfile::rectangular(4.0, 1.0, 0.0, 1e13).unwrap();
    let r = lifetime_ratio(&before, &after).unwrap();
    assert!((r.ln - 4.0).abs() < 1e-12);
}

// reference values from a 40-digit evaluation, rounded to the nearest double
#[test]
fn water_like_values() {
    let p = nucleation(0.072, 2.5e5, PI / 3.0);
    let barrier = homogeneous_barrier(&p).unwrap();
    assert!(((barrier - 1.000612842467911e-13) / barrier).abs() < 1e-14);
    let c = critical_radius_and_min_deposit(&p).unwrap();
    assert!((c.radius - 5.76e-7).abs() < 1e-21);
    assert!(((c.min_deposit - 5.003064212339555e-13) / c.min_deposit).abs() < 1e-14);
    assert!((c.min_deposit / barrier - 5.0).abs() < 1e-12);
}

#[test]
fn min_deposit_scales_as_sigma_cubed_over_drive_squared() {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, sigma) in [0.02, 0.05, 0.072, 0.1, 0.3].iter().enumerate() {
        let dg = 1e4 * 3f64.powi(i as i32);
        let c = critical_radius_and_min_deposit(&nucleation(*sigma, dg, 0.0)).unwrap();
        xs.push(sigma.powi(3) / (dg * dg));
        ys.push(c.min_deposit);
    }
    let ns: Vec<f64> = xs.iter().map(|x| 1.0 / x).collect();
    // fit_exponent reports β for y ∝ x^-β
    let fit = fit_exponent(&ns, &ys).unwrap();
    assert!((fit.beta - 1.0).abs() < 1e-10);
    assert!((fit.intercept.exp() - 80.0 * PI / 3.0).abs() < 1e-8);
}

#[test]
fn nucleation_errors() {
    assert!(matches!(
        homogeneous_barrier(&nucleation(0.07, 0.0, 1.0)),
        Err(Error::Config { ref field, .. }) if field == "bulk_drive"
    ));
    assert!(contact_angle_factor(-0.1).is_err());
    assert!(contact_angle_factor(PI + 1e-9).is_err());
    assert!(seeded_rate_ratio(&nucleation(-1.0, 1.0, 1.0)).is_err());
}

#[test]
fn contact_angle_identities() {
    assert_eq!(contact_angle_factor(0.0).unwrap(), 0.0);
    assert_eq!(contact_angle_factor(PI / 2.0).unwrap(), 0.5);
    assert_eq!(contact_angle_factor(PI).unwrap(), 1.0);
    assert_eq!(seeded_rate_ratio(&nucleation(0.07, 1e5, PI)).unwrap().ratio(), 1.0);
}

proptest! {
    #[test]
    fn factor_is_bounded_and_monotone(a in 0.0f64..PI, b in 0.0f64..PI) {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        let fl = contact_angle_factor(lo).unwrap();
        let fh = contact_angle_factor(hi).unwrap();
        prop_assert!((0.0..=1.0).contains(&fl) && (0.0..=1.0).contains(&fh));
        prop_assert!(fl <= fh);
    }

    #[test]
    fn seeding_never_slows_nucleation(theta in 0.0f64..PI, sigma in 0.01f64..1.0, dg in 1e3f64..1e7) {
        let r = seeded_rate_ratio(&nucleation(sigma, dg, theta)).unwrap();
        prop_assert!(r.ln > 0.0);
    }

    #[test]
    fn wkb_exponent_grows_with_height(h in 0.5f64..50.0, extra in 0.01f64..10.0, w in 0.1f64..5.0) {
        let lower = wkb_rate(&BarrierProfile::parabolic(h, w, 0.0, 1.0, 32).unwrap()).unwrap();
        let higher = wkb_rate(&BarrierProfile::parabolic(h + extra, w, 0.0, 1.0, 32).unwrap()).unwrap();
        prop_assert!(higher.exponent > lower.exponent);
        prop_assert!(higher.rate < lower.rate);
    }
}

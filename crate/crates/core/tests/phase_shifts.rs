use catastrophe_core::grid::{Geometry, Grid, PotentialSpec, Shape};
use catastrophe_core::spectral::*;
use std::f64::consts::PI;

const RANGE: f64 = 1.0;

// Phase-shift studies resolve the well with 50 nodes per range.
fn table(strength: f64, length: f64, count: usize) -> PhaseShiftTable {
    let grid = Grid::with_max_spacing(length, RANGE / 50.0, Geometry::RadialSwave).unwrap();
    let free = solve_spectrum(&grid, &PotentialSpec::free(), count).unwrap();
    let int = solve_spectrum(&grid, &PotentialSpec::square_well(strength, RANGE, 0.0), count).unwrap();
    extract_phase_shifts(&free, &int, count).unwrap()
}

fn square_well_delta(k: f64, u0: f64) -> f64 {
    let e = k * k - u0;
    let ratio = if e > 0.0 {
        let q = e.sqrt();
        (k / q) * (q * RANGE).tan()
    } else {
        // below a repulsive step the interior solution is a sinh
        let q = (-e).sqrt();
        (k / q) * (q * RANGE).tanh()
    };
    ratio.atan() - k * RANGE
}

fn mod_pi(x: f64) -> f64 {
    x - PI * (x / PI).round()
}

#[test]
fn square_well_matches_analytic_shift() {
    for u0 in [-5.0, -2.0, 3.0] {
        let t = table(u0, 60.0, 70);
        let mut checked = 0;
        for (&k, &d) in t.momenta.iter().zip(&t.deltas) {
            if !(0.5..=3.0).contains(&k) {
                continue;
            }
            let err = mod_pi(d - square_well_delta(k, u0)).abs();
            assert!(err < 1e-3, "U0={u0} k={k} err={err}");
            checked += 1;
        }
        assert!(checked > 40);
    }
}

#[test]
fn weak_coupling_matches_born() {
    let u0 = -0.02;
    let t = table(u0, 60.0, 70);
    for (&k, &d) in t.momenta.iter().zip(&t.deltas) {
        if !(0.5..=3.0).contains(&k) {
            continue;
        }
        let born = -(u0 / k) * (RANGE / 2.0 - (2.0 * k * RANGE).sin() / (4.0 * k));
        assert!(((d - born) / born).abs() < 0.1, "k={k} d={d} born={born}");
    }
}

#[test]
fn shifts_are_continuous_in_k() {
    let t = table(-5.0, 60.0, 70);
    assert_eq!(t.bound_states, 1);
    assert_eq!(t.branch_offset, 1);
    for w in t.deltas.windows(2) {
        assert!((w[1] - w[0]).abs() < 0.5);
    }
    assert!(t.delta_at(1.0).is_some());
    assert!(t.delta_at(100.0).is_none());
}

#[test]
fn sign_follows_potential() {
    let attract = table(-0.5, 40.0, 30);
    let repel = table(0.5, 40.0, 30);
    assert!(attract.deltas.iter().all(|&d| d > 0.0));
    assert!(repel.deltas.iter().all(|&d| d < 0.0));
}

#[test]
fn fermi_shift_matching_hits_target() {
    for shape in [Shape::SquareWell, Shape::Gaussian] {
        let target = 0.12;
        let s = strength_for_phase_shift(shape, RANGE, 60, 1.0, target).unwrap();
        assert!(s < 0.0);
        let got = fermi_phase_shift(&PotentialSpec::new(shape, s, RANGE, 0.0), 60, 1.0).unwrap();
        assert!((got - target).abs() < 1e-9 * target.max(1.0) + 1e-10, "{shape:?} {got}");
    }
    let s = strength_for_phase_shift(Shape::SquareWell, RANGE, 60, 1.0, -0.1).unwrap();
    assert!(s > 0.0);
    assert!(strength_for_phase_shift(Shape::SquareWell, RANGE, 60, 1.0, 2.0).is_err());
}

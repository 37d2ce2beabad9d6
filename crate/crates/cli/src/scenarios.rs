//! Canned configurations, kept in lexicographic order.

pub struct Scenario {
    pub name: &'static str,
    pub description: &'static str,
    pub config: &'static str,
}

pub const SCENARIOS: [Scenario; 5] = [
    Scenario {
        name: "anderson-default",
        description: "overlap decay for an attractive square well, N = 50..800 at unit density",
        config: r#"[run]
rng_seed = 0

[overlap-scan]
shape = "square_well"
strength = -5.0
range = 1.0
density = 1.0
n_values = [50, 100, 200, 400, 800]
resolution = 20.0
"#,
    },
    Scenario {
        name: "bubble-seed",
        description: "seeded bubble nucleation versus contact angle with water-like numbers",
        config: r#"[run]
rng_seed = 0

[kinetics]
surface_tension = 0.072
bulk_drive = 2.5e5
thermal_energy = 4.14e-21
contact_angles = [0.0, 0.39269908169872414, 0.7853981633974483, 1.1780972450961724, 1.5707963267948966, 1.9634954084936207, 2.356194490192345, 2.748893571891069, 3.141592653589793]
"#,
    },
    Scenario {
        name: "geiger-gain",
        description: "single-electron Townsend avalanche with alpha*d = 8",
        config: r#"[run]
rng_seed = 20240601

[avalanche]
townsend_alpha = 8.0
gap = 1.0
n_initial = 1
trials = 20000
threshold = 1000
bin_width = 100
"#,
    },
    Scenario {
        name: "lifetime-demo",
        description: "WKB lifetime of a metastable well before and after the barrier is thinned",
        config: r#"[run]
rng_seed = 0

[kinetics]
breakpoints = [0.0, 1.0, 1.0, 3.0, 3.0, 4.0]
values = [0.0, 0.0, 4.0, 4.0, 0.0, 0.0]
perturbed_breakpoints = [0.0, 1.0, 1.0, 2.0, 2.0, 3.0]
perturbed_values = [0.0, 0.0, 4.0, 4.0, 0.0, 0.0]
energy = 0.0
attempt_frequency = 1.0e13
"#,
    },
    Scenario {
        name: "silicon-site",
        description: "ground-state overlaps for an impurity at two lattice sites of a box",
        config: r#"[run]
rng_seed = 0

[site-overlap]
shape = "square_well"
strength = -5.0
range = 1.0
density = 1.0
site_a_fraction = 0.3
site_b_fraction = 0.6
n_values = [25, 50, 100, 200, 400]
resolution = 20.0
"#,
    },
];

pub fn find(name: &str) -> Option<&'static Scenario> {
    SCENARIOS.iter().find(|s| s.name == name)
}

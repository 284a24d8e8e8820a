//! Quick end-to-end checks of the engine and the simulator.

use lagflux_core::dynamics::{find_chords, integrate, ChordConfig};
use lagflux_core::io::{self, parse_problem, Command};
use lagflux_core::models::{Chart, HamiltonianModel};
use lagflux_core::quadruple::shear_box_quadruple;

/// Problem file, and the expected `lower`/`upper` renderings.
const BOUNDS: [(&str, &str, &str, &str); 9] = [
    ("split plane, disk-count region", "family = \"split\"\n[split]\nx = [1, 3]\nclass = [1, 2]\n", "1", "1"),
    ("split plane, axis class", "family = \"split\"\n[split]\nx = [1, 3]\nclass = [0, 1]\n", "inf", "inf"),
    ("split plane, monotone", "family = \"split\"\n[split]\nx = [2, 2]\nclass = [3, 3]\n", "2/3", "2/3"),
    ("split space, diagonal", "family = \"split\"\n[split]\nx = [1, 1, 1]\nclass = [2, 2, 2]\n", "1/2", "1/2"),
    (
        "surface, negative side",
        "family = \"surface\"\n[surface]\na_plus = 2\na_minus = 5\nseparating = true\nk = -2\n",
        "5/2",
        "5/2",
    ),
    ("rotating torus, m > 0", "family = \"chekanov\"\n[chekanov]\na = 1\nm = 2\nn = 5\n", "1/2", "unknown"),
    ("projective plane fiber", "family = \"cpn\"\n[cpn]\nx = [\"1/3\", \"1/3\"]\nclass = [1, 1]\n", "1/3", "1/3"),
    ("quadric fiber, vertex exit", "family = \"s2s2\"\n[s2s2]\nx = [\"3/4\", \"1/4\"]\nclass = [1, -1]\n", "3/4", "3/4"),
    (
        "quadrant, interior ambient",
        "family = \"toric\"\n[toric]\npolytope = \"orthant\"\nx = [1, 3]\nclass = [1, 2]\nmode = \"interior_only\"\n",
        "1",
        "1",
    ),
];

fn report(name: &str, pass: bool, detail: String) -> bool {
    println!("{} {name}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}

fn run_bounds() -> Vec<bool> {
    BOUNDS
        .iter()
        .map(|(name, text, lower, upper)| match parse_problem(text).and_then(|p| io::run(Command::Bound, &p)) {
            Ok(r) => {
                let b = r.bound.expect("bound reports carry a bound");
                report(
                    name,
                    b.lower.value == *lower && b.upper.value == *upper,
                    format!("lower {}, upper {}", b.lower, b.upper),
                )
            }
            Err(e) => report(name, false, e.to_string()),
        })
        .collect()
}

fn run_dynamics() -> Vec<bool> {
    let mut out = Vec::new();
    let harmonic = HamiltonianModel::harmonic();
    let end = integrate(&harmonic, &[1.0, 0.0], 1.0, 1e-3).map(|t| t.end().map(<[f64]>::to_vec));
    out.push(match end {
        Ok(Some(z)) => {
            let err = (z[0] - 1.0).hypot(z[1]);
            report("harmonic flow has period 1", err < 1e-4, format!("return error {err:.2e}"))
        }
        other => report("harmonic flow has period 1", false, format!("{other:?}")),
    });
    let shear = HamiltonianModel::from_fn("shear", Chart::standard(1), |z| z[0]);
    let search = find_chords(
        &shear,
        &shear_box_quadruple(),
        ChordConfig {
            samples: 64,
            horizon: 2.0,
            dt: 1e-3,
        },
    );
    let (lo, hi) = search
        .reports
        .iter()
        .filter_map(|r| r.hit)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), t| (lo.min(t), hi.max(t)));
    out.push(report(
        "unit shear chords take unit time",
        search.chords() == 64 && (lo - 1.0).abs() < 1e-4 && (hi - 1.0).abs() < 1e-4,
        format!("{} chords in [{lo:.6}, {hi:.6}]", search.chords()),
    ));
    out
}

/// Prints one line per check and returns whether all passed.
pub fn run() -> bool {
    let results: Vec<bool> = run_bounds().into_iter().chain(run_dynamics()).collect();
    let passed = results.iter().filter(|&&p| p).count();
    println!("{passed} of {} checks passed", results.len());
    passed == results.len()
}

//! Regenerates the stored oracle values for the commuting triangle scenarios.
//!
//! Every value here comes from the numeric oracle alone: connection
//! coefficients are sampled as floats, curvature is assembled from finite
//! differences, and the integral over cycle × simplex × interval is done by
//! tensor-grid or Monte-Carlo quadrature.
//!
//!     cargo run --release --example generate_goldens [-- --quick]
//!
//! `--quick` lowers the Monte-Carlo sample count; the shipped file uses the
//! full count and takes about twenty minutes on one core.

use std::path::Path;
use std::time::Instant;

use flatpsi::oracle::{method_name, psi_form_oracle, psi_pairing_oracle, save_goldens, GoldenRecord, QuadMethod, QuadratureSpec};
use flatpsi::runner::pairing_quantity;
use flatpsi::scenario::{direction_name, Scenario};

const SEED: u64 = 42;
const POINT: [f64; 5] = [0.1, 0.37, 0.52, 0.81, 0.23];

fn main() -> flatpsi::Result<()> {
    let quick = std::env::args().any(|a| a == "--quick");
    let mc_samples = if quick { 100_000 } else { 1_000_000 };
    let root = Path::new(env!("CARGO_MANIFEST_DIR"));
    let grid = QuadratureSpec {
        method: QuadMethod::TensorGrid { points: 6 },
        tolerance: 1e-6,
    };
    let mc = QuadratureSpec {
        method: QuadMethod::MonteCarlo {
            samples: mc_samples,
            seed: SEED,
        },
        tolerance: 3.0,
    };
    let mut records = Vec::new();

    // (scenario file, cycles that also get a Monte-Carlo record)
    for (file, mc_cycles) in [
        ("commuting_triangle_p2.json", &["T13"][..]),
        ("commuting_triangle.json", &["T1234"][..]),
    ] {
        let s = Scenario::load(root.join("scenarios").join(file))?;
        let chain = s.chain("triangle")?;
        let d0 = s.reference_connection();
        let p = &s.polynomial;
        let k = 2 * p.degree() - chain.dim() - 1;

        for (name, cycle) in s.cycles.iter().filter(|(_, c)| c.dim() == k) {
            let started = Instant::now();
            let res = psi_pairing_oracle(chain, d0, p, &s.connections, cycle, &grid)?;
            println!("{} {name}: {:.12e} ± {:.1e} ({:.1?})", s.id, res.value, res.error, started.elapsed());
            records.push(GoldenRecord {
                scenario: s.id.clone(),
                quantity: pairing_quantity("triangle", d0.id(), name),
                method: method_name(&grid),
                seed: None,
                value: res.value,
                error: res.error,
                tolerance: grid.tolerance,
            });
            if mc_cycles.contains(&name.as_str()) {
                let started = Instant::now();
                let res = psi_pairing_oracle(chain, d0, p, &s.connections, cycle, &mc)?;
                println!("{} {name} mc: {:.12e} ± {:.1e} ({:.1?})", s.id, res.value, res.error, started.elapsed());
                records.push(GoldenRecord {
                    scenario: s.id.clone(),
                    quantity: pairing_quantity("triangle", d0.id(), name),
                    method: method_name(&mc),
                    seed: Some(SEED),
                    value: res.value,
                    error: res.error,
                    tolerance: mc.tolerance,
                });
            }
        }

        // Pointwise coefficients of the form itself.
        let point = POINT.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",");
        for cycle in flatpsi::BaseCycle::all_of_dim(s.base_dim, k) {
            let dirs = cycle.directions();
            let res = psi_form_oracle(chain, d0, p, &s.connections, dirs, &POINT, &grid)?;
            let label = dirs.iter().map(|&a| direction_name(a)).collect::<Vec<_>>().join(",");
            records.push(GoldenRecord {
                scenario: s.id.clone(),
                quantity: format!("form|triangle|{}|{label}|{point}", d0.id()),
                method: method_name(&grid),
                seed: None,
                value: res.value,
                error: res.error,
                tolerance: grid.tolerance,
            });
        }
    }

    let out = root.join("goldens").join("commuting_triangle.json");
    save_goldens(&out, &records)?;
    println!("wrote {} records to {}", records.len(), out.display());
    Ok(())
}

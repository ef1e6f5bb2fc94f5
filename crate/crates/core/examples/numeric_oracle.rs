//! Independent floating-point evaluation of a pairing: sampled coefficients,
//! finite-difference curvature and quadrature over z × Δ × I.
//!
//!     cargo run --release --example numeric_oracle

use std::path::Path;

use flatpsi::oracle::{psi_pairing_oracle, QuadMethod, QuadratureSpec};
use flatpsi::scenario::Scenario;
use flatpsi::{pair, psi};

fn main() -> flatpsi::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join("commuting_triangle_p2.json");
    let s = Scenario::load(path)?;
    let (chain, d0, p) = (s.chain("triangle")?, s.reference_connection(), &s.polynomial);
    let exact = psi(chain, d0, p, &s.connections)?;

    let specs = [
        QuadratureSpec { method: QuadMethod::TensorGrid { points: 4 }, tolerance: 1e-6 },
        QuadratureSpec { method: QuadMethod::MonteCarlo { samples: 20_000, seed: 42 }, tolerance: 3.0 },
    ];
    for name in ["T13", "T14", "T35"] {
        let z = s.cycle(name)?;
        println!("{name}: exact {}", pair(&exact.form, z)?.exact);
        for spec in &specs {
            let r = psi_pairing_oracle(chain, d0, p, &s.connections, z, spec)?;
            println!("  {:?}: {:.10} ± {:.1e}", spec.method, r.value, r.error);
        }
    }
    Ok(())
}

//! Pairing the invariant with coordinate subtori, exactly and in ℝ/ℤ.
//!
//!     cargo run --example pairing

use std::path::Path;

use flatpsi::scenario::Scenario;
use flatpsi::{pair, pair_total, psi, BaseCycle};

fn main() -> flatpsi::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join("commuting_triangle_p2.json");
    let s = Scenario::load(path)?;
    let (chain, d0, p) = (s.chain("triangle")?, s.reference_connection(), &s.polynomial);
    let v = psi(chain, d0, p, &s.connections)?;

    for z in BaseCycle::all_of_dim(s.base_dim, v.degree) {
        let val = pair(&v.form, &z)?;
        if !val.exact.is_zero() {
            println!("{z}: {val}");
        }
    }

    // Integrating over z × Δ × I directly gives the same numbers.
    let z = s.cycle("T13_q")?;
    let direct = pair_total(chain, d0, p, &s.connections, z)?;
    println!("T13_q: {} == {}", pair(&v.form, z)?, direct);
    Ok(())
}

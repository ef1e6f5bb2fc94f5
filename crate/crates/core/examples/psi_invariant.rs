//! The secondary invariant of a cycle of relatively flat connections, computed
//! on the shipped scenarios.
//!
//!     cargo run --example psi_invariant

use std::path::Path;

use flatpsi::scenario::Scenario;
use flatpsi::{closedness_check, psi};

fn main() -> flatpsi::Result<()> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios");
    for (file, chain) in [
        ("commuting_triangle.json", "triangle"),
        ("commuting_triangle_p2.json", "triangle"),
        ("abelian_p_lt_r.json", "sphere"),
    ] {
        let s = Scenario::load(dir.join(file))?;
        let v = psi(s.chain(chain)?, s.reference_connection(), &s.polynomial, &s.connections)?;
        println!("{} / {chain}: p = {}, r = {}, degree {}", s.id, v.p, v.r, v.degree);
        println!("  ψ = {}", v.form);
        println!("  closed: {}", closedness_check(&v.form));
    }
    Ok(())
}

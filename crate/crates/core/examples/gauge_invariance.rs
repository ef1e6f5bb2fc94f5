//! Gauge transformations act on every connection at once and leave the
//! invariant unchanged.
//!
//!     cargo run --example gauge_invariance

use std::path::Path;

use flatpsi::random::random_constant_gauge;
use flatpsi::scenario::Scenario;
use flatpsi::{gauge_apply, is_flat, psi};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> flatpsi::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios").join("commuting_triangle_p2.json");
    let s = Scenario::load(path)?;
    let chain = s.chain("triangle")?;
    let before = psi(chain, s.reference_connection(), &s.polynomial, &s.connections)?;

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let constant = random_constant_gauge(&mut rng, s.rank, s.base_dim);
    let mut gauges = vec![("random constant", constant)];
    if let Some(g) = &s.gauge {
        gauges.push(("scenario rotation", g.clone()));
    }
    for (label, g) in gauges {
        let set = s.connections.try_map(|d| gauge_apply(d, &g))?;
        let d0 = gauge_apply(s.reference_connection(), &g)?;
        let after = psi(chain, &d0, &s.polynomial, &set)?;
        println!("{label}: flatness kept {}, ψ unchanged {}", set.iter().all(is_flat), after.form == before.form);
    }
    Ok(())
}

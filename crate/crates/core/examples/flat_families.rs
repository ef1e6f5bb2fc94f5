//! Simplicial families of flat connections: boundaries, relative flatness
//! and the bidegree split of the family curvature.
//!
//!     cargo run --example flat_families

use flatpsi::complex::{affine_family, validate_chain};
use flatpsi::random::{commuting_family, flat_reference};
use flatpsi::{boundary, curvature, is_cycle, relative_flatness_check, Bidegree, Chain, ConnectionSet, Simplex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> flatpsi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let fam = commuting_family(&mut rng, 2, 3, 3, true);
    let mut set: ConnectionSet = fam.vertices.iter().cloned().collect();
    let other = flat_reference(&mut rng, "N", 2, 3, true);
    set.insert(other)?;

    let k = Chain::simplex(Simplex::new(["D0", "D1", "D2"])?);
    let dk = boundary(&k)?;
    println!("∂K = {dk}, cycle: {}", is_cycle(&dk));
    println!("∂∂K = 0: {}", boundary(&dk)?.is_zero());

    let tri = set.vertices(&Simplex::new(["D0", "D1", "D2"])?)?;
    println!("(D0,D1,D2) relatively flat: {}", relative_flatness_check(&tri)?);
    let mixed = set.vertices(&Simplex::new(["D0", "N"])?)?;
    println!("(D0,N) relatively flat: {}", relative_flatness_check(&mixed)?);

    let omega = curvature(&affine_family(&tri)?)?;
    for bd in [Bidegree::new(2, 0), Bidegree::new(1, 1), Bidegree::new(0, 2)] {
        println!("curvature component {bd:?} zero: {}", omega.bidegree_component(bd).is_zero());
    }

    let report = validate_chain(&Chain::simplex(Simplex::new(["D0", "N"])?), &set);
    println!("chain with (D0,N) all relatively flat: {}", report.all_relatively_flat());
    Ok(())
}

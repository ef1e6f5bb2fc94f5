//! Curvature, the Bianchi identity and closed Chern–Weil forms of a
//! non-flat connection on T³.
//!
//!     cargo run --example chern_weil

use flatpsi::random::random_connection;
use flatpsi::{chern_weil, curvature, is_flat, InvariantPolynomial};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> flatpsi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let a = random_connection(&mut rng, "A", 2, 4);
    let omega = curvature(a.one_form())?;
    println!("flat: {}", is_flat(&a));

    let bianchi = omega.wedge(a.one_form())?.try_sub(&a.one_form().wedge(&omega)?)?;
    println!("dΩ = Ω∧A − A∧Ω: {}", omega.d() == bianchi);

    for poly in [
        InvariantPolynomial::trace_power(1),
        InvariantPolynomial::trace_power(2),
        InvariantPolynomial::new(vec![1, 1])?,
    ] {
        let cw = chern_weil(&poly, &omega)?;
        println!("{poly} = {cw}");
        println!("  closed: {}", cw.d().is_zero());
    }
    Ok(())
}

//! Transgression between two connections on T⁴: `d Tp(D0, D1) = P(Ω1) − P(Ω0)`.
//!
//!     cargo run --example transgression

use flatpsi::random::{random_connection, random_flat};
use flatpsi::{chern_weil, curvature, transgression, InvariantPolynomial};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> flatpsi::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let p = InvariantPolynomial::trace_power(2);
    let d0 = random_connection(&mut rng, "D0", 2, 4);
    let d1 = random_connection(&mut rng, "D1", 2, 4);

    let t = transgression(&p, &d0, &d1)?;
    let rhs = chern_weil(&p, &curvature(d1.one_form())?)?.try_sub(&chern_weil(&p, &curvature(d0.one_form())?)?)?;
    println!("T(D0, D1) has {} terms", t.num_terms());
    println!("homotopy formula: {}", t.d() == rhs);

    // Between two flat connections the transgression is closed.
    let f0 = random_flat(&mut rng, "F0", 2, 3, true);
    let f1 = random_flat(&mut rng, "F1", 2, 3, false);
    let tf = transgression(&p, &f0, &f1)?;
    println!("flat endpoints, T = {tf}");
    println!("closed: {}", tf.d().is_zero());
    Ok(())
}

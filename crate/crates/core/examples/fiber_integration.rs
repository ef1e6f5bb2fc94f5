//! Integration along simplex and simplex × interval fibers, with the Stokes
//! residual `d∫ω − ∫dω ± ∫_∂ ω` computed exactly.
//!
//!     cargo run --example fiber_integration

use flatpsi::random::{random_form, random_mixed_form, ScalarBounds};
use flatpsi::{integrate_fiber, simplex_moment, stokes_check, Dims, FiberSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> flatpsi::Result<()> {
    println!("∫_Δ² t1² t2 = {}", simplex_moment(&[2, 1]));

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for fiber in [FiberSpec::Interval, FiberSpec::Simplex(2), FiberSpec::SimplexInterval(1), FiberSpec::SimplexInterval(2)] {
        let dims = Dims::new(2, fiber.dim());
        let top = random_form(&mut rng, dims, fiber.dim() + 1, 4, ScalarBounds::default());
        let pushed = integrate_fiber(&top, &fiber)?;
        println!("{fiber:?}: ∫ of a {}-form = {pushed}", fiber.dim() + 1);
        let mixed = random_mixed_form(&mut rng, dims, 3, ScalarBounds::default());
        println!("  Stokes residual on a mixed form is zero: {}", stokes_check(&mixed, &fiber)?.is_zero());
    }
    Ok(())
}

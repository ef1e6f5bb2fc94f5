//! Exact forms on the torus: wedge products, the exterior derivative and the
//! graded Leibniz rule, all with coefficients in ℚ[2π] and Fourier modes.
//!
//!     cargo run --example exterior_calculus

use flatpsi::scalar::{int, rat};
use flatpsi::{Dims, Direction, Form, Phase, Scalar};

fn main() -> flatpsi::Result<()> {
    let dims = Dims::new(3, 0);
    let (x1, x2, x3) = (Direction::Base(0), Direction::Base(1), Direction::Base(2));

    // α = sin(2π x2) dx1,  β = cos(2π(x1 + x3)) dx2 + ½ dx3
    let alpha = Form::monomial(Scalar::trig(dims, vec![0, 1, 0], Phase::Sin, int(1), 0)?, &[x1])?;
    let beta = Form::monomial(Scalar::trig(dims, vec![1, 0, 1], Phase::Cos, int(1), 0)?, &[x2])?
        + Form::monomial(Scalar::constant(dims, rat(1, 2)), &[x3])?;

    println!("α      = {alpha}");
    println!("β      = {beta}");
    println!("dα     = {}", alpha.d());
    println!("α∧β    = {}", alpha.wedge(&beta));
    println!("d(α∧β) = {}", alpha.wedge(&beta).d());

    let leibniz = alpha.d().wedge(&beta) - alpha.wedge(&beta.d());
    println!("Leibniz holds: {}", leibniz == alpha.wedge(&beta).d());
    println!("β∧β = 0: {}", beta.wedge(&beta).is_zero());
    println!("d² = 0: {}", beta.d().d().is_zero());

    // Torus averages drop every nonconstant mode.
    let s = Scalar::trig(dims, vec![1, 0, 0], Phase::Cos, int(3), 1)?.try_add(&Scalar::constant(dims, rat(2, 3)))?;
    println!("∫ {s} dx1 = {}", s.integrate_torus(&[0])?);
    Ok(())
}

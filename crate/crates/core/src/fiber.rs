//! Exact fiber integration over simplices, the interval and chains, the
//! boundary-corrected Stokes identity, and the secondary invariant
//! `ψ(Σ) = (−1)^{r+1} ∮_{Σ×I} P(Ω^{D̃})`.
//!
//! Orientation: a form on `B × F` is integrated by writing it as
//! `β ∧ vol_F` with the fiber block rightmost, so the fiber coordinates are
//! always the trailing parameters. `Δ^r` is oriented by `dt_1∧…∧dt_r`, and
//! `Δ^r × I` puts the simplex block before the interval. With these choices
//! `∮_F dω = d∮_F ω + (−1)^{deg ω + dim F} ∮_{∂F} ω` holds when the boundary
//! of the fiber carries the face signs of [`boundary_faces`].

use num_bigint::BigInt;
use num_traits::One;
use rayon::prelude::*;
use serde::Serialize;

use crate::chernweil::{chern_weil, curvature, is_flat, Connection, InvariantPolynomial};
use crate::complex::{family_connection, is_cycle, relative_flatness_check, Chain, ConnectionSet, Simplex};
use crate::error::{Error, Result};
use crate::forms::{bit, Form, Mask};
use crate::pairing::{pair, BaseCycle, RZValue};
use crate::scalar::{int, Dims, Rational, Scalar, ScalarKey};

/// What the trailing parameters of a form are integrated over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FiberSpec {
    Simplex(usize),
    Interval,
    /// `Δ^r × I`, simplex block first.
    SimplexInterval(usize),
    /// A chain of `r`-simplices; the same form is used on every simplex.
    Chain(Chain),
    /// `Σ × I` for a chain `Σ`.
    ChainInterval(Chain),
}

impl FiberSpec {
    pub fn dim(&self) -> usize {
        match self {
            FiberSpec::Simplex(r) => *r,
            FiberSpec::Interval => 1,
            FiberSpec::SimplexInterval(r) => r + 1,
            FiberSpec::Chain(c) => c.dim(),
            FiberSpec::ChainInterval(c) => c.dim() + 1,
        }
    }

    fn local(&self) -> FiberSpec {
        match self {
            FiberSpec::Chain(c) => FiberSpec::Simplex(c.dim()),
            FiberSpec::ChainInterval(c) => FiberSpec::SimplexInterval(c.dim()),
            other => other.clone(),
        }
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

/// `∫_{Δ^r} t_0^{a_0} ⋯ t_r^{a_r} dt_1⋯dt_r = Π a_i! / (r + Σ a_i)!`.
pub fn simplex_moment(alpha: &[u32]) -> Rational {
    assert!(!alpha.is_empty(), "exponent vector needs r+1 entries");
    let r = (alpha.len() - 1) as u32;
    let num = alpha.iter().fold(BigInt::one(), |acc, &a| acc * factorial(a));
    let den = factorial(r + alpha.iter().sum::<u32>());
    Rational::new(num, den)
}

/// Integral of the trailing parameter powers of one coefficient term.
fn trailing_moment(kind: &FiberSpec, powers: &[u32]) -> Rational {
    match kind {
        FiberSpec::Simplex(r) => {
            let mut alpha = vec![0];
            alpha.extend_from_slice(&powers[powers.len() - r..]);
            simplex_moment(&alpha)
        }
        FiberSpec::Interval => Rational::new(BigInt::one(), BigInt::from(powers[powers.len() - 1] + 1)),
        FiberSpec::SimplexInterval(r) => {
            let s = powers[powers.len() - 1];
            let mut alpha = vec![0];
            alpha.extend_from_slice(&powers[powers.len() - 1 - r..powers.len() - 1]);
            simplex_moment(&alpha) * Rational::new(BigInt::one(), BigInt::from(s + 1))
        }
        FiberSpec::Chain(_) | FiberSpec::ChainInterval(_) => unreachable!("chains are reduced to local fibers"),
    }
}

fn integrate_local(omega: &Form, kind: &FiberSpec) -> Result<Form> {
    let f = kind.dim();
    if !omega.is_zero() && omega.max_degree() < f {
        return Err(Error::Degree(format!(
            "form of degree {} integrated over a {f}-dimensional fiber",
            omega.max_degree()
        )));
    }
    integrate_volume_part(omega, kind)
}

/// Picks out the `β ∧ vol_F` part and integrates its coefficients; forms
/// without a full fiber volume integrate to zero.
fn integrate_volume_part(omega: &Form, kind: &FiberSpec) -> Result<Form> {
    let dims = omega.dims();
    let f = kind.dim();
    if f > dims.params {
        return Err(Error::dims(format!(
            "fiber of dimension {f} but only {} parameters",
            dims.params
        )));
    }
    let kept = dims.params - f;
    let target = dims.with_params(kept);
    let fiber_mask: Mask = (dims.base + kept..dims.total()).fold(0, |m, s| m | bit(s));
    let mut out = Form::zero(target);
    for (mask, coeff) in omega.terms() {
        if mask & fiber_mask != fiber_mask {
            continue;
        }
        let terms: Vec<(ScalarKey, Rational)> = coeff
            .terms()
            .map(|(key, c)| {
                let moment = trailing_moment(kind, &key.powers);
                let mut k = key.clone();
                k.powers.truncate(kept);
                (k, c * moment)
            })
            .collect();
        out.add_term(mask & !fiber_mask, Scalar::from_terms(target, terms)?);
    }
    Ok(out)
}

/// `∮_F ω`. For chain fibers the same form is integrated over every simplex
/// and weighted by the chain coefficients.
pub fn integrate_fiber(omega: &Form, fiber: &FiberSpec) -> Result<Form> {
    match fiber {
        FiberSpec::Chain(c) | FiberSpec::ChainInterval(c) => {
            let local = integrate_local(omega, &fiber.local())?;
            let total: i64 = c.terms().map(|(_, k)| k).sum();
            Ok(local.scale(&int(total)))
        }
        kind => integrate_local(omega, kind),
    }
}

/// Like [`integrate_fiber`] but insists that no parameter survives.
pub fn integrate_fiber_to_base(omega: &Form, fiber: &FiberSpec) -> Result<Form> {
    if omega.dims().params != fiber.dim() {
        return Err(Error::dims(format!(
            "{} parameters remain uncovered by a {}-dimensional fiber",
            omega.dims().params - fiber.dim().min(omega.dims().params),
            fiber.dim()
        )));
    }
    integrate_fiber(omega, fiber)
}

/// `Σ_σ c_σ ∮ integrand(σ)` over a chain, one local fiber per simplex.
pub fn integrate_over_chain<F>(chain: &Chain, with_interval: bool, integrand: F) -> Result<Form>
where
    F: Fn(&Simplex) -> Result<Form> + Sync,
{
    let kind = if with_interval {
        FiberSpec::SimplexInterval(chain.dim())
    } else {
        FiberSpec::Simplex(chain.dim())
    };
    let terms: Vec<(&Simplex, i64)> = chain.terms().collect();
    let pieces = terms
        .par_iter()
        .map(|(s, c)| Ok(integrate_volume_part(&integrand(s)?, &kind)?.scale(&int(*c))))
        .collect::<Result<Vec<Form>>>()?;
    let mut iter = pieces.into_iter();
    let first = iter.next().ok_or_else(|| Error::dims("empty chain"))?;
    Ok(iter.fold(first, |acc, f| &acc + &f))
}

/// One boundary piece of a local fiber: a parametrization by a lower fiber
/// together with its orientation sign.
#[derive(Clone, Debug)]
pub struct BoundaryFace {
    pub sign: i64,
    pub domain: FiberSpec,
    /// Image of each fiber coordinate as an affine function of the face coordinates.
    pub images: Vec<FaceImage>,
}

/// Affine image `constant + Σ coeff_k u_k` of one fiber coordinate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FaceImage {
    pub constant: i64,
    pub linear: Vec<(usize, i64)>,
}

/// Sign of the `i`-th simplex face `(v_0, …, v̂_i, …, v_r)` in `∂Δ^r` for the
/// Stokes identity above: the opposite of the alternating simplicial sign.
pub fn simplex_face_sign(i: usize) -> i64 {
    if i % 2 == 0 {
        -1
    } else {
        1
    }
}

/// Images of `t_1..t_r` for the face omitting vertex `i`, in coordinates
/// `u_1..u_{r-1}` of `Δ^{r-1}` (with `u_0 = 1 − Σ u`).
fn simplex_face_images(r: usize, i: usize) -> Vec<FaceImage> {
    let w: Vec<usize> = (0..=r).filter(|&v| v != i).collect();
    (1..=r)
        .map(|j| match w.iter().position(|&v| v == j) {
            None => FaceImage {
                constant: 0,
                linear: vec![],
            },
            Some(0) => FaceImage {
                constant: 1,
                linear: (0..r - 1).map(|k| (k, -1)).collect(),
            },
            Some(k) => FaceImage {
                constant: 0,
                linear: vec![(k - 1, 1)],
            },
        })
        .collect()
}

/// Boundary pieces of `Δ^r` or `Δ^r × I`.
pub fn boundary_faces(fiber: &FiberSpec) -> Result<Vec<BoundaryFace>> {
    match *fiber {
        FiberSpec::Simplex(0) => Ok(vec![]),
        FiberSpec::Simplex(r) => Ok((0..=r)
            .map(|i| BoundaryFace {
                sign: simplex_face_sign(i),
                domain: FiberSpec::Simplex(r - 1),
                images: simplex_face_images(r, i),
            })
            .collect()),
        FiberSpec::Interval => boundary_faces(&FiberSpec::SimplexInterval(0)),
        FiberSpec::SimplexInterval(r) => {
            let mut faces = Vec::new();
            if r > 0 {
                for i in 0..=r {
                    let mut images = simplex_face_images(r, i);
                    images.push(FaceImage {
                        constant: 0,
                        linear: vec![(r - 1, 1)],
                    });
                    let domain = if r == 1 {
                        FiberSpec::Interval
                    } else {
                        FiberSpec::SimplexInterval(r - 1)
                    };
                    faces.push(BoundaryFace {
                        sign: simplex_face_sign(i),
                        domain,
                        images,
                    });
                }
            }
            let parity = if r % 2 == 0 { 1 } else { -1 };
            for (end, sign) in [(1, -parity), (0, parity)] {
                let mut images: Vec<FaceImage> = (0..r)
                    .map(|k| FaceImage {
                        constant: 0,
                        linear: vec![(k, 1)],
                    })
                    .collect();
                images.push(FaceImage {
                    constant: end,
                    linear: vec![],
                });
                faces.push(BoundaryFace {
                    sign,
                    domain: FiberSpec::Simplex(r),
                    images,
                });
            }
            Ok(faces)
        }
        _ => Err(Error::UnsupportedFiber(format!("{fiber:?} has no boundary parametrization"))),
    }
}

fn pull_back_to_face(omega: &Form, face: &BoundaryFace) -> Result<Form> {
    let dims = omega.dims();
    let f_dim = face.images.len();
    let lead = dims.params - f_dim;
    let target = dims.with_params(lead + face.domain.dim());
    let mut images: Vec<Scalar> = (0..lead).map(|k| Scalar::param(target, k)).collect();
    for img in &face.images {
        let mut s = Scalar::from_int(target, img.constant);
        for &(k, c) in &img.linear {
            s = &s + &Scalar::param(target, lead + k).scale(&int(c));
        }
        images.push(s);
    }
    omega.pullback_params(&images, target)
}

/// `∮_{∂F} ω` with the face signs of [`boundary_faces`].
pub fn integrate_boundary(omega: &Form, fiber: &FiberSpec) -> Result<Form> {
    let dims = omega.dims();
    let f = fiber.dim();
    if f > dims.params {
        return Err(Error::dims("fiber larger than the parameter block"));
    }
    let mut acc = Form::zero(dims.with_params(dims.params - f));
    for face in boundary_faces(fiber)? {
        let pulled = pull_back_to_face(omega, &face)?;
        if pulled.is_zero() || pulled.max_degree() < face.domain.dim() {
            continue;
        }
        acc = &acc + &integrate_local(&pulled, &face.domain)?.scale(&int(face.sign));
    }
    Ok(acc)
}

/// Residual `∮_F dω − d∮_F ω − (−1)^{deg ω + dim F} ∮_{∂F} ω`, computed per
/// homogeneous component; zero for every input.
pub fn stokes_check(omega: &Form, fiber: &FiberSpec) -> Result<Form> {
    if !matches!(fiber, FiberSpec::Simplex(_) | FiberSpec::SimplexInterval(_) | FiberSpec::Interval) {
        return Err(Error::UnsupportedFiber(format!("{fiber:?}")));
    }
    let dims = omega.dims();
    let f = fiber.dim();
    if f > dims.params {
        return Err(Error::dims("fiber larger than the parameter block"));
    }
    let mut residual = Form::zero(dims.with_params(dims.params - f));
    for k in 0..=omega.max_degree() {
        let part = omega.degree_component(k);
        if part.is_zero() {
            continue;
        }
        let lhs = if k + 1 >= f {
            integrate_local(&part.d(), fiber)?
        } else {
            Form::zero(residual.dims())
        };
        let inner = if k >= f {
            integrate_local(&part, fiber)?.d()
        } else {
            Form::zero(residual.dims())
        };
        let mut bterm = integrate_boundary(&part, fiber)?;
        if (k + f) % 2 == 1 {
            bterm = -&bterm;
        }
        residual = &residual + &(&(&lhs - &inner) - &bterm);
    }
    Ok(residual)
}

/// `P(Ω^{D̃})` on `B × Δ^r × I` for `D̃ = (1−s)·D_0 + s·D_σ(t)`; parameters are
/// `t_1..t_r` followed by `s`.
pub fn homotopy_integrand(
    sigma: &Simplex,
    d0: &Connection,
    p: &InvariantPolynomial,
    set: &ConnectionSet,
) -> Result<Form> {
    let family = family_connection(sigma, set, false)?;
    let r = sigma.dim();
    let dims = Dims::new(family.dims().base, r + 1);
    let family = family.embed_params(r + 1)?;
    let reference = d0.one_form().embed_params(r + 1)?;
    let s = Form::scalar(Scalar::param(dims, r));
    let path = reference.try_add(&family.try_sub(&reference)?.left_wedge_form(&s))?;
    chern_weil(p, &curvature(&path)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PsiResult {
    #[serde(skip)]
    pub form: Form,
    pub p: usize,
    pub r: usize,
    pub degree: usize,
    pub sign_applied: i64,
    pub reference_id: String,
    /// `p ∉ {r, r+1}`: the result descends to an ℝ/ℤ class on homology.
    pub invariant: bool,
    pub warnings: Vec<String>,
}

/// Checks the standing hypotheses: a cycle of relatively flat simplices and a
/// flat reference compatible with them.
pub fn check_psi_inputs(sigma: &Chain, d0: &Connection, set: &ConnectionSet) -> Result<()> {
    if !is_cycle(sigma) {
        return Err(Error::NotACycle);
    }
    if !is_flat(d0) {
        return Err(Error::NotFlat(d0.id().to_string()));
    }
    for (s, _) in sigma.terms() {
        let vertices = set.vertices(s)?;
        for v in &vertices {
            d0.check_compatible(v)?;
        }
        if !relative_flatness_check(&vertices)? {
            return Err(Error::NotRelativelyFlat(s.to_string()));
        }
    }
    Ok(())
}

/// `(−1)^{r+1} Σ_σ c_σ ∮_{Δ^r×I} P(Ω^{D̃_σ})` without hypothesis checks.
pub fn psi_form(sigma: &Chain, d0: &Connection, p: &InvariantPolynomial, set: &ConnectionSet) -> Result<Form> {
    let r = sigma.dim();
    let base = d0.base_dim();
    if sigma.is_zero() {
        return Ok(Form::zero(Dims::new(base, 0)));
    }
    let raw = integrate_over_chain(sigma, true, |s| homotopy_integrand(s, d0, p, set))?;
    let form = match (2 * p.degree()).checked_sub(r + 1) {
        Some(k) => raw.degree_component(k),
        None => {
            debug_assert!(raw.is_zero());
            raw
        }
    };
    Ok(if r % 2 == 0 { -&form } else { form })
}

pub fn psi(sigma: &Chain, d0: &Connection, p: &InvariantPolynomial, set: &ConnectionSet) -> Result<PsiResult> {
    check_psi_inputs(sigma, d0, set)?;
    let r = sigma.dim();
    let deg = p.degree();
    let form = psi_form(sigma, d0, p, set)?;
    let invariant = deg != r && deg != r + 1;
    let mut warnings = Vec::new();
    if deg == r {
        warnings.push("p = r: the result is a differential character, not an R/Z class".to_string());
    }
    if deg == r + 1 {
        warnings.push("p = r+1: the result need not descend to homology".to_string());
    }
    if 2 * deg < r + 1 {
        warnings.push("degree 2p is below the fiber dimension; the form vanishes identically".to_string());
    }
    Ok(PsiResult {
        form,
        p: deg,
        r,
        degree: (2 * deg).saturating_sub(r + 1),
        sign_applied: if r % 2 == 0 { -1 } else { 1 },
        reference_id: d0.id().to_string(),
        invariant,
        warnings,
    })
}

/// `∮_Σ P(Ω_f)`: the curvature of the invariant, a `(2p−r)`-form on the base.
pub fn psi_curvature(sigma: &Chain, p: &InvariantPolynomial, set: &ConnectionSet) -> Result<Form> {
    integrate_over_chain(sigma, false, |s| {
        let family = family_connection(s, set, false)?;
        chern_weil(p, &curvature(&family)?)
    })
}

/// Pairing differences `ψ_{D0}(Σ)(z) − ψ_{D0'}(Σ)(z)` for each cycle `z`;
/// each is an integer when both references are flat.
pub fn psi_compare_reference(
    sigma: &Chain,
    d0: &Connection,
    d0_alt: &Connection,
    p: &InvariantPolynomial,
    set: &ConnectionSet,
    cycles: &[BaseCycle],
) -> Result<Vec<RZValue>> {
    let a = psi(sigma, d0, p, set)?;
    let b = psi(sigma, d0_alt, p, set)?;
    cycles
        .iter()
        .map(|z| {
            let va = pair(&a.form, z)?;
            let vb = pair(&b.form, z)?;
            Ok(RZValue::from_exact(va.exact.minus(&vb.exact)))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::MatrixForm;
    use crate::scalar::{rat, Direction, Phase};

    fn dt(dims: Dims, i: usize) -> Form {
        Form::d_coord(dims, Direction::Param(i)).unwrap()
    }

    fn dx(dims: Dims, i: usize) -> Form {
        Form::d_coord(dims, Direction::Base(i)).unwrap()
    }

    /// Iterated midpoint rule over the standard simplex.
    fn iterated_quadrature(alpha: &[u32]) -> f64 {
        let r = alpha.len() - 1;
        let n = 400;
        fn rec(depth: usize, r: usize, remaining: f64, pts: &mut Vec<f64>, alpha: &[u32], n: usize) -> f64 {
            if depth == r {
                let t0 = 1.0 - pts.iter().sum::<f64>();
                let mut v = t0.powi(alpha[0] as i32);
                for (k, &t) in pts.iter().enumerate() {
                    v *= t.powi(alpha[k + 1] as i32);
                }
                return v;
            }
            let h = remaining / n as f64;
            let mut acc = 0.0;
            for i in 0..n {
                pts.push((i as f64 + 0.5) * h);
                acc += rec(depth + 1, r, remaining - (i as f64 + 0.5) * h, pts, alpha, n) * h;
                pts.pop();
            }
            acc
        }
        rec(0, r, 1.0, &mut Vec::new(), alpha, if r > 2 { 60 } else { n })
    }

    #[test]
    fn moments_match_quadrature() {
        assert_eq!(simplex_moment(&[0, 0, 0]), rat(1, 2));
        assert_eq!(simplex_moment(&[1, 1, 0]), rat(1, 24));
        assert_eq!(simplex_moment(&[2, 0]), rat(1, 3));
        for alpha in [vec![0u32, 0, 0], vec![1, 1, 0], vec![2, 0]] {
            let q = iterated_quadrature(&alpha);
            let exact = crate::scalar::rational_to_f64(&simplex_moment(&alpha));
            assert!((q - exact).abs() < 1e-5, "{alpha:?}: {q} vs {exact}");
        }
    }

    #[test]
    fn interval_volume() {
        let dims = Dims::new(1, 1);
        let v = integrate_fiber(&dt(dims, 0), &FiberSpec::Simplex(1)).unwrap();
        assert_eq!(v, Form::constant(Dims::new(1, 0), int(1)));
    }

    #[test]
    fn fiber_integral_of_mixed_term() {
        // t1 dx1∧dt1 over Δ¹ in base-then-fiber order gives (1/2) dx1
        let dims = Dims::new(1, 1);
        let w = dx(dims, 0).wedge(&dt(dims, 0)).mul_scalar(&Scalar::param(dims, 0));
        let v = integrate_fiber(&w, &FiberSpec::Simplex(1)).unwrap();
        assert_eq!(v, dx(Dims::new(1, 0), 0).scale(&rat(1, 2)));
        // written with dt1 first the sign flips
        let w2 = dt(dims, 0).wedge(&dx(dims, 0)).mul_scalar(&Scalar::param(dims, 0));
        assert_eq!(integrate_fiber(&w2, &FiberSpec::Simplex(1)).unwrap(), -&v);
    }

    #[test]
    fn pulled_back_form_over_cycle_vanishes() {
        let tri = Chain::from_terms(
            1,
            [
                (1, Simplex::new(["A", "B"]).unwrap()),
                (1, Simplex::new(["B", "C"]).unwrap()),
                (1, Simplex::new(["C", "A"]).unwrap()),
            ],
        )
        .unwrap();
        let dims = Dims::new(2, 1);
        let w = dx(dims, 0).wedge(&dx(dims, 1));
        assert!(integrate_fiber(&w, &FiberSpec::Chain(tri)).unwrap().is_zero());
    }

    #[test]
    fn low_degree_is_an_error() {
        let dims = Dims::new(1, 2);
        assert!(integrate_fiber(&dt(dims, 0), &FiberSpec::Simplex(2)).is_err());
        assert!(integrate_fiber_to_base(&dt(Dims::new(1, 2), 1), &FiberSpec::Interval).is_err());
    }

    #[test]
    fn frozen_face_signs() {
        let signs: Vec<i64> = boundary_faces(&FiberSpec::Simplex(2)).unwrap().iter().map(|f| f.sign).collect();
        assert_eq!(signs, vec![-1, 1, -1]);
        let prod: Vec<i64> = boundary_faces(&FiberSpec::SimplexInterval(1))
            .unwrap()
            .iter()
            .map(|f| f.sign)
            .collect();
        assert_eq!(prod, vec![-1, 1, 1, -1]);
        let interval: Vec<i64> = boundary_faces(&FiberSpec::Interval).unwrap().iter().map(|f| f.sign).collect();
        assert_eq!(interval, vec![-1, 1]);
    }

    #[test]
    fn stokes_for_base_pullback() {
        let dims = Dims::new(2, 1);
        let c = Scalar::trig(dims, vec![1, 0], Phase::Cos, int(1), 0).unwrap();
        let w = dx(dims, 1).mul_scalar(&c);
        assert!(stokes_check(&w, &FiberSpec::Simplex(1)).unwrap().is_zero());
    }

    #[test]
    fn stokes_for_linear_one_form() {
        let dims = Dims::new(1, 1);
        let w = dx(dims, 0).mul_scalar(&Scalar::param(dims, 0));
        assert!(stokes_check(&w, &FiberSpec::Simplex(1)).unwrap().is_zero());
        // hand evaluation: ∮ dt1∧dx1 = -dx1, boundary faces give dx1|_{t=1} - dx1|_{t=0} = dx1 with the frozen signs
        let lhs = integrate_fiber(&w.d(), &FiberSpec::Simplex(1)).unwrap();
        assert_eq!(lhs, -&dx(Dims::new(1, 0), 0));
        let b = integrate_boundary(&w, &FiberSpec::Simplex(1)).unwrap();
        assert_eq!(b, -&dx(Dims::new(1, 0), 0));
    }

    #[test]
    fn stokes_on_product_fiber() {
        let dims = Dims::new(2, 2);
        let t = Scalar::param(dims, 0);
        let s = Scalar::param(dims, 1);
        let c = Scalar::trig(dims, vec![0, 1], Phase::Sin, rat(3, 2), 0).unwrap();
        let w = &dx(dims, 0).mul_scalar(&(&t * &s)) + &dt(dims, 0).wedge(&dx(dims, 1)).mul_scalar(&(&c * &s));
        assert!(stokes_check(&w, &FiberSpec::SimplexInterval(1)).unwrap().is_zero());
        assert!(stokes_check(&w, &FiberSpec::Interval).unwrap().is_zero());
    }

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    #[test]
    fn psi_rejects_non_cycles() {
        let a = Connection::constant("A", 2, &[(0, mat(&[&[1]]))]).unwrap();
        let b = Connection::constant("B", 2, &[(1, mat(&[&[2]]))]).unwrap();
        let set: ConnectionSet = [a.clone(), b].into_iter().collect();
        let edge = Chain::simplex(Simplex::new(["A", "B"]).unwrap());
        let p = InvariantPolynomial::trace_power(1);
        assert!(matches!(psi(&edge, &a, &p, &set), Err(Error::NotACycle)));
    }

    #[test]
    fn psi_rejects_non_flat_reference() {
        let a = Connection::constant("A", 2, &[(0, mat(&[&[0, 1], &[0, 0]])), (1, mat(&[&[0, 0], &[1, 0]]))]).unwrap();
        let set: ConnectionSet = [a.clone()].into_iter().collect();
        let c = Chain::simplex(Simplex::new(["A"]).unwrap());
        let p = InvariantPolynomial::trace_power(2);
        assert!(matches!(psi(&c, &a, &p, &set), Err(Error::NotFlat(_))));
    }

    #[test]
    fn abelian_holonomy_for_p_equals_one() {
        // p = 1, r = 0: ψ(D) = -∮_I ds∧(a − a0) = (a − a0) as a 1-form
        let a0 = Connection::constant("Z", 2, &[(0, mat(&[&[0]]))]).unwrap();
        let a = Connection::constant("A", 2, &[(0, mat(&[&[3]])), (1, vec![vec![rat(1, 2)]])]).unwrap();
        let set: ConnectionSet = [a0.clone(), a.clone()].into_iter().collect();
        let c = Chain::simplex(Simplex::new(["A"]).unwrap());
        let res = psi(&c, &a0, &InvariantPolynomial::trace_power(1), &set).unwrap();
        let base = Dims::new(2, 0);
        let expected = &dx(base, 0).scale(&int(3)) + &dx(base, 1).scale(&rat(1, 2));
        assert_eq!(res.form, expected);
        assert!(!res.invariant);
        let _ = MatrixForm::zero(1, base);
    }
}

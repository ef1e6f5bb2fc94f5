//! Connections on the trivial rank-`n` bundle over the torus, their curvature,
//! invariant polynomials and Chern–Weil forms, transgression along straight
//! lines, and gauge transformations.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiber::{integrate_fiber, FiberSpec};
use crate::forms::{Bidegree, Form, MatrixForm};
use crate::scalar::{int, Dims, Direction, Phase, Rational, Scalar};

/// A connection 1-form `D = Σ_α M_α(x) dx_α` on the base torus.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Connection {
    id: String,
    one_form: MatrixForm,
}

impl Connection {
    pub fn new(id: impl Into<String>, one_form: MatrixForm) -> Result<Self> {
        let id = id.into();
        if one_form.dims().params != 0 {
            return Err(Error::Degree(format!("connection `{id}` depends on parameters")));
        }
        for entry in one_form.entries() {
            if entry.bidegrees().iter().any(|bd| *bd != Bidegree::new(1, 0)) {
                return Err(Error::Degree(format!("connection `{id}` is not a pure base 1-form")));
            }
        }
        Ok(Self { id, one_form })
    }

    pub fn zero(id: impl Into<String>, rank: usize, base: usize) -> Self {
        Self {
            id: id.into(),
            one_form: MatrixForm::zero(rank, Dims::new(base, 0)),
        }
    }

    /// `Σ matrix_α dx_α` with constant rational matrices; directions are zero-based.
    pub fn constant(id: impl Into<String>, base: usize, components: &[(usize, Vec<Vec<Rational>>)]) -> Result<Self> {
        let dims = Dims::new(base, 0);
        let rank = components.first().map(|(_, m)| m.len()).unwrap_or(1);
        let mut acc = MatrixForm::zero(rank, dims);
        for (dir, matrix) in components {
            let dx = Form::d_coord(dims, Direction::Base(*dir))?;
            acc = acc.try_add(&MatrixForm::from_matrix(matrix, &dx)?)?;
        }
        Self::new(id, acc)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    pub fn one_form(&self) -> &MatrixForm {
        &self.one_form
    }

    pub fn rank(&self) -> usize {
        self.one_form.rank()
    }

    pub fn base_dim(&self) -> usize {
        self.one_form.dims().base
    }

    pub(crate) fn check_compatible(&self, other: &Connection) -> Result<()> {
        if self.rank() != other.rank() {
            return Err(Error::RankMismatch {
                left: self.rank(),
                right: other.rank(),
            });
        }
        if self.base_dim() != other.base_dim() {
            return Err(Error::dims(format!(
                "connections `{}` and `{}` live over tori of dimension {} and {}",
                self.id,
                other.id,
                self.base_dim(),
                other.base_dim()
            )));
        }
        Ok(())
    }
}

/// `Ω = dA + A∧A` for a matrix-valued 1-form `A` on `B × P`.
pub fn curvature(a: &MatrixForm) -> Result<MatrixForm> {
    match a.degree() {
        None | Some(1) => {}
        Some(k) => return Err(Error::Degree(format!("curvature of a {k}-form"))),
    }
    if a.entries().iter().any(|e| !e.is_zero() && e.degree() != Some(1)) {
        return Err(Error::Degree("curvature of a form of mixed degree".into()));
    }
    a.d().try_add(&a.wedge(a)?)
}

pub fn is_flat(d: &Connection) -> bool {
    curvature(d.one_form()).map(|c| c.is_zero()).unwrap_or(false)
}

/// `P(X) = Π_i tr(X^{p_i})`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct InvariantPolynomial {
    factors: Vec<usize>,
}

/// Polarization is an explicit sum over `S_p`; degrees above this are refused.
pub const MAX_POLARIZATION_DEGREE: usize = 5;

impl InvariantPolynomial {
    pub fn new(factors: Vec<usize>) -> Result<Self> {
        if factors.is_empty() || factors.contains(&0) {
            return Err(Error::Polynomial(format!(
                "factor list must be nonempty and positive, got {factors:?}"
            )));
        }
        Ok(Self { factors })
    }

    /// `tr(X^p)`.
    pub fn trace_power(p: usize) -> Self {
        Self::new(vec![p]).expect("positive power")
    }

    pub fn factors(&self) -> &[usize] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().sum()
    }
}

impl TryFrom<Vec<usize>> for InvariantPolynomial {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<InvariantPolynomial> for Vec<usize> {
    fn from(p: InvariantPolynomial) -> Self {
        p.factors
    }
}

impl fmt::Display for InvariantPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.factors.iter().map(|p| format!("tr(X^{p})")).collect();
        write!(f, "{}", parts.join("*"))
    }
}

fn check_two_form(omega: &MatrixForm) -> Result<()> {
    if omega.entries().iter().any(|e| !e.is_zero() && e.degree() != Some(2)) {
        return Err(Error::Degree("expected a matrix-valued 2-form".into()));
    }
    Ok(())
}

/// `P(Ω)` as a `2p`-form.
pub fn chern_weil(p: &InvariantPolynomial, omega: &MatrixForm) -> Result<Form> {
    check_two_form(omega)?;
    let dims = omega.dims();
    let top = *p.factors().iter().max().expect("nonempty");
    let mut powers = vec![omega.clone()];
    while powers.len() < top {
        let next = powers.last().unwrap().wedge(omega)?;
        powers.push(next);
    }
    let mut acc = Form::scalar(Scalar::one(dims));
    for &k in p.factors() {
        acc = acc.wedge(&powers[k - 1].trace());
        if acc.is_zero() {
            break;
        }
    }
    Ok(acc)
}

/// Heap's algorithm over `0..n`.
fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn heap(k: usize, a: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(a.clone());
            return;
        }
        heap(k - 1, a, out);
        for i in 0..k - 1 {
            if k % 2 == 0 {
                a.swap(i, k - 1);
            } else {
                a.swap(0, k - 1);
            }
            heap(k - 1, a, out);
        }
    }
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    heap(n, &mut a, &mut out);
    out
}

fn factorial(n: usize) -> i64 {
    (1..=n as i64).product()
}

/// Full symmetrization `(1/p!) Σ_σ Π_i tr(X_{σ(·)} ∧ …)` with the arguments
/// filled into the trace factors in the order given by `σ`.
pub fn polarization(p: &InvariantPolynomial, args: &[MatrixForm]) -> Result<Form> {
    let deg = p.degree();
    if args.len() != deg {
        return Err(Error::ArgumentCount {
            expected: deg,
            got: args.len(),
        });
    }
    if deg > MAX_POLARIZATION_DEGREE {
        return Err(Error::Polynomial(format!(
            "polarization limited to degree {MAX_POLARIZATION_DEGREE}, got {deg}"
        )));
    }
    for a in &args[1..] {
        if a.rank() != args[0].rank() {
            return Err(Error::RankMismatch {
                left: args[0].rank(),
                right: a.rank(),
            });
        }
        args[0].dims().check(&a.dims())?;
    }
    let dims = args[0].dims();
    if args.iter().any(MatrixForm::is_zero) {
        return Ok(Form::zero(dims));
    }

    // identical arguments give identical placements; count each pattern once
    let mut class = vec![0usize; deg];
    let mut reps: Vec<usize> = Vec::new();
    for (i, a) in args.iter().enumerate() {
        match reps.iter().position(|&r| &args[r] == a) {
            Some(c) => class[i] = c,
            None => {
                class[i] = reps.len();
                reps.push(i);
            }
        }
    }
    let mut patterns: BTreeMap<Vec<usize>, i64> = BTreeMap::new();
    for sigma in permutations(deg) {
        let pattern: Vec<usize> = sigma.iter().map(|&i| class[i]).collect();
        *patterns.entry(pattern).or_insert(0) += 1;
    }

    let mut total = Form::zero(dims);
    for (pattern, count) in patterns {
        let mut product = Form::scalar(Scalar::one(dims));
        let mut cursor = 0;
        for &len in p.factors() {
            let mut block = args[reps[pattern[cursor]]].clone();
            for &c in &pattern[cursor + 1..cursor + len] {
                block = block.wedge(&args[reps[c]])?;
            }
            cursor += len;
            product = product.wedge(&block.trace());
            if product.is_zero() {
                break;
            }
        }
        total = &total + &product.scale(&Rational::new(count.into(), factorial(deg).into()));
    }
    Ok(total)
}

/// `p ∮_I P(D1 − D0, Ω_s, …, Ω_s) ds` along `∇_s = (1−s)D0 + sD1`; its
/// exterior derivative is `P(Ω_1) − P(Ω_0)`.
pub fn transgression(p: &InvariantPolynomial, d0: &Connection, d1: &Connection) -> Result<Form> {
    d0.check_compatible(d1)?;
    let base = d0.base_dim();
    let dims = Dims::new(base, 1);
    let a0 = d0.one_form().embed_params(1)?;
    let a1 = d1.one_form().embed_params(1)?;
    let velocity = a1.try_sub(&a0)?;
    if velocity.is_zero() {
        return Ok(Form::zero(Dims::new(base, 0)));
    }
    let s = Form::scalar(Scalar::param(dims, 0));
    let path = a0.try_add(&velocity.left_wedge_form(&s))?;
    let slice_curvature = curvature(&path)?.bidegree_component(Bidegree::new(2, 0));
    let mut args = vec![velocity];
    args.extend(std::iter::repeat(slice_curvature).take(p.degree() - 1));
    let ds = Form::d_coord(dims, Direction::Param(0))?;
    let integrand = polarization(p, &args)?.scale(&int(p.degree() as i64)).wedge(&ds);
    integrate_fiber(&integrand, &FiberSpec::Interval)
}

/// A parameter-free change of frame `g` together with its exact inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeTransform {
    g: MatrixForm,
    g_inv: MatrixForm,
}

impl GaugeTransform {
    pub fn new(g: MatrixForm, g_inv: MatrixForm) -> Result<Self> {
        if g.rank() != g_inv.rank() {
            return Err(Error::RankMismatch {
                left: g.rank(),
                right: g_inv.rank(),
            });
        }
        g.dims().check(&g_inv.dims())?;
        if g.dims().params != 0 {
            return Err(Error::NonInvertible("gauge transformation depends on parameters".into()));
        }
        for e in g.entries().iter().chain(g_inv.entries()) {
            if !e.is_zero() && e.degree() != Some(0) {
                return Err(Error::NonInvertible("gauge entries must be functions".into()));
            }
        }
        let id = MatrixForm::identity(g.rank(), g.dims());
        if g.wedge(&g_inv)? != id || g_inv.wedge(&g)? != id {
            return Err(Error::NonInvertible("g · g_inv is not the identity".into()));
        }
        Ok(Self { g, g_inv })
    }

    /// A constant rational matrix; the inverse is computed exactly.
    pub fn constant(base: usize, matrix: &[Vec<Rational>]) -> Result<Self> {
        let inv = invert(matrix).ok_or_else(|| Error::NonInvertible("singular matrix".into()))?;
        let one = Form::scalar(Scalar::one(Dims::new(base, 0)));
        Self::new(MatrixForm::from_matrix(matrix, &one)?, MatrixForm::from_matrix(&inv, &one)?)
    }

    /// Rotation by the angle `2π k·x` in the coordinate plane `(i, j)` of the fiber.
    pub fn rotation(base: usize, rank: usize, plane: (usize, usize), freq: Vec<i64>) -> Result<Self> {
        let dims = Dims::new(base, 0);
        let (i, j) = plane;
        if i == j || i >= rank || j >= rank {
            return Err(Error::dims(format!("rotation plane {plane:?} in rank {rank}")));
        }
        let cos = Form::scalar(Scalar::trig(dims, freq.clone(), Phase::Cos, int(1), 0)?);
        let sin = Form::scalar(Scalar::trig(dims, freq, Phase::Sin, int(1), 0)?);
        let mut g = MatrixForm::identity(rank, dims);
        g.set(i, i, cos.clone())?;
        g.set(j, j, cos.clone())?;
        g.set(i, j, -&sin)?;
        g.set(j, i, sin.clone())?;
        let mut g_inv = MatrixForm::identity(rank, dims);
        g_inv.set(i, i, cos.clone())?;
        g_inv.set(j, j, cos)?;
        g_inv.set(i, j, sin.clone())?;
        g_inv.set(j, i, -&sin)?;
        Self::new(g, g_inv)
    }

    pub fn matrix(&self) -> &MatrixForm {
        &self.g
    }

    pub fn inverse(&self) -> &MatrixForm {
        &self.g_inv
    }

    pub fn rank(&self) -> usize {
        self.g.rank()
    }

    pub fn is_constant(&self) -> bool {
        self.g.d().is_zero()
    }

    fn lifted(&self, params: usize) -> Result<(MatrixForm, MatrixForm)> {
        Ok((self.g.embed_params(params)?, self.g_inv.embed_params(params)?))
    }

    /// `A ↦ g⁻¹dg + g⁻¹Ag` for a matrix 1-form on `B × P`.
    pub fn apply_form(&self, a: &MatrixForm) -> Result<MatrixForm> {
        let (g, g_inv) = self.lifted(a.dims().params)?;
        g_inv.wedge(&g.d())?.try_add(&g_inv.wedge(a)?.wedge(&g)?)
    }

    /// `Ω ↦ g⁻¹Ωg`.
    pub fn apply_curvature(&self, omega: &MatrixForm) -> Result<MatrixForm> {
        let (g, g_inv) = self.lifted(omega.dims().params)?;
        g_inv.wedge(omega)?.wedge(&g)
    }
}

pub fn gauge_apply(d: &Connection, g: &GaugeTransform) -> Result<Connection> {
    if d.rank() != g.rank() {
        return Err(Error::RankMismatch {
            left: d.rank(),
            right: g.rank(),
        });
    }
    Connection::new(d.id(), g.apply_form(d.one_form())?)
}

pub fn gauge_apply_curvature(omega: &MatrixForm, g: &GaugeTransform) -> Result<MatrixForm> {
    g.apply_curvature(omega)
}

/// Gauss–Jordan inverse over ℚ.
pub(crate) fn invert(matrix: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    let n = matrix.len();
    if matrix.iter().any(|r| r.len() != n) {
        return None;
    }
    let mut a: Vec<Vec<Rational>> = matrix.to_vec();
    let mut inv: Vec<Vec<Rational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let scale = a[col][col].clone();
        for j in 0..n {
            a[col][j] = &a[col][j] / &scale;
            inv[col][j] = &inv[col][j] / &scale;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for j in 0..n {
                let da = &factor * &a[col][j];
                let di = &factor * &inv[col][j];
                a[r][j] -= da;
                inv[r][j] -= di;
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect()
    }

    fn off_diagonal_pair() -> Connection {
        Connection::constant("A", 2, &[(0, mat(&[&[0, 1], &[0, 0]])), (1, mat(&[&[0, 0], &[1, 0]]))]).unwrap()
    }

    fn vol12(dims: Dims) -> Form {
        Form::monomial(Scalar::one(dims), &[Direction::Base(0), Direction::Base(1)]).unwrap()
    }

    #[test]
    fn abelian_constant_is_flat() {
        let d = Connection::constant("D", 2, &[(0, mat(&[&[2, 0], &[0, 3]])), (1, mat(&[&[1, 0], &[0, -1]]))]).unwrap();
        assert!(curvature(d.one_form()).unwrap().is_zero());
        assert!(is_flat(&d));
        assert!(is_flat(&Connection::zero("0", 2, 3)));
    }

    #[test]
    fn off_diagonal_curvature() {
        let a = off_diagonal_pair();
        let omega = curvature(a.one_form()).unwrap();
        let dims = Dims::new(2, 0);
        let expected = MatrixForm::from_matrix(&mat(&[&[1, 0], &[0, -1]]), &vol12(dims)).unwrap();
        assert_eq!(omega, expected);
        assert!(!is_flat(&a));
    }

    #[test]
    fn linear_family_curvature() {
        // d((1+t1) M dx1) = dt1 ∧ M dx1 = -M dx1∧dt1
        let dims = Dims::new(1, 1);
        let m = mat(&[&[0, 1], &[1, 0]]);
        let coeff = &Scalar::one(dims) + &Scalar::param(dims, 0);
        let dx = Form::d_coord(dims, Direction::Base(0)).unwrap().mul_scalar(&coeff);
        let a = MatrixForm::from_matrix(&m, &dx).unwrap();
        let omega = curvature(&a).unwrap();
        let vol = Form::monomial(Scalar::from_int(dims, -1), &[Direction::Base(0), Direction::Param(0)]).unwrap();
        assert_eq!(omega, MatrixForm::from_matrix(&m, &vol).unwrap());
    }

    #[test]
    fn curvature_rejects_two_forms() {
        let dims = Dims::new(2, 0);
        let a = MatrixForm::from_matrix(&mat(&[&[1]]), &vol12(dims)).unwrap();
        assert!(curvature(&a).is_err());
    }

    #[test]
    fn traceless_and_repeated_chern_weil() {
        let omega = curvature(off_diagonal_pair().one_form()).unwrap();
        assert!(chern_weil(&InvariantPolynomial::trace_power(1), &omega).unwrap().is_zero());
        assert!(chern_weil(&InvariantPolynomial::trace_power(2), &omega).unwrap().is_zero());
    }

    #[test]
    fn polarization_diagonal_and_symmetric() {
        let dims = Dims::new(4, 0);
        let x = MatrixForm::from_matrix(&mat(&[&[1, 2], &[0, 1]]), &vol12(dims)).unwrap();
        let v34 = Form::monomial(Scalar::one(dims), &[Direction::Base(2), Direction::Base(3)]).unwrap();
        let y = MatrixForm::from_matrix(&mat(&[&[0, 1], &[3, 0]]), &v34).unwrap();
        let p2 = InvariantPolynomial::trace_power(2);
        assert_eq!(polarization(&p2, &[x.clone(), x.clone()]).unwrap(), chern_weil(&p2, &x).unwrap());
        let xy = polarization(&p2, &[x.clone(), y.clone()]).unwrap();
        assert_eq!(xy, x.wedge(&y).unwrap().trace());
        let zero = MatrixForm::zero(2, dims);
        assert!(polarization(&p2, &[x.clone(), zero]).unwrap().is_zero());
        assert!(matches!(polarization(&p2, &[x]), Err(Error::ArgumentCount { .. })));
    }

    #[test]
    fn transgression_of_equal_connections_vanishes() {
        let a = off_diagonal_pair();
        let t = transgression(&InvariantPolynomial::trace_power(2), &a, &a).unwrap();
        assert!(t.is_zero());
    }

    #[test]
    fn abelian_constant_transgression_vanishes() {
        let d0 = Connection::zero("0", 1, 2);
        let d1 = Connection::constant("L", 2, &[(0, mat(&[&[5]]))]).unwrap();
        let t = transgression(&InvariantPolynomial::trace_power(2), &d0, &d1).unwrap();
        assert!(t.is_zero());
    }

    #[test]
    fn constant_gauge_preserves_chern_weil() {
        let a = off_diagonal_pair();
        let omega = curvature(a.one_form()).unwrap();
        let g = GaugeTransform::constant(2, &mat(&[&[1, 1], &[0, 2]])).unwrap();
        let rotated = gauge_apply_curvature(&omega, &g).unwrap();
        let dims = Dims::new(2, 0);
        let x = MatrixForm::from_matrix(&mat(&[&[1, 0], &[2, 1]]), &vol12(dims)).unwrap();
        for p in [1, 2] {
            let poly = InvariantPolynomial::trace_power(p);
            assert_eq!(chern_weil(&poly, &rotated).unwrap(), chern_weil(&poly, &omega).unwrap());
            let xg = gauge_apply_curvature(&x, &g).unwrap();
            assert_eq!(chern_weil(&poly, &xg).unwrap(), chern_weil(&poly, &x).unwrap());
        }
        let moved = gauge_apply(&a, &g).unwrap();
        assert_eq!(curvature(moved.one_form()).unwrap(), rotated);
    }

    #[test]
    fn identity_gauge_is_trivial() {
        let a = off_diagonal_pair();
        let g = GaugeTransform::constant(2, &mat(&[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(gauge_apply(&a, &g).unwrap(), a);
    }

    #[test]
    fn trig_rotation_preserves_flatness() {
        let d = Connection::constant("D", 3, &[(0, mat(&[&[2, 0], &[0, 3]])), (2, mat(&[&[1, 0], &[0, 1]]))]).unwrap();
        let g = GaugeTransform::rotation(3, 2, (0, 1), vec![1, 0, 0]).unwrap();
        let moved = gauge_apply(&d, &g).unwrap();
        assert_ne!(moved, d);
        assert!(is_flat(&moved));
    }

    #[test]
    fn singular_gauge_is_rejected() {
        assert!(matches!(
            GaugeTransform::constant(1, &mat(&[&[1, 2], &[2, 4]])),
            Err(Error::NonInvertible(_))
        ));
        let dims = Dims::new(1, 0);
        let one = Form::scalar(Scalar::one(dims));
        let g = MatrixForm::from_matrix(&mat(&[&[2]]), &one).unwrap();
        assert!(GaugeTransform::new(g.clone(), g).is_err());
    }

    #[test]
    fn polynomial_validation() {
        assert!(InvariantPolynomial::new(vec![]).is_err());
        assert!(InvariantPolynomial::new(vec![2, 0]).is_err());
        assert_eq!(InvariantPolynomial::new(vec![2, 1]).unwrap().degree(), 3);
    }
}

//! Floating-point cross-checks that share no algebra with the exact kernel:
//! pointwise evaluation of forms as alternating tensors, finite-difference
//! exterior derivatives and curvatures, a small numeric exterior algebra for
//! matrix-valued forms, and tensor-grid / Monte-Carlo quadrature over tori,
//! simplices and the interval.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chernweil::{Connection, InvariantPolynomial};
use crate::complex::{Chain, ConnectionSet};
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::pairing::BaseCycle;
use crate::scalar::{rational_to_f64, Dims};

/// A point of `B × Δ^r × I`: `t` holds `t_1..t_r`, `s` the interval coordinate.
#[derive(Clone, Debug, PartialEq)]
pub struct EvalPoint {
    pub x: Vec<f64>,
    pub t: Vec<f64>,
    pub s: Option<f64>,
}

impl EvalPoint {
    pub fn new(x: Vec<f64>, t: Vec<f64>, s: Option<f64>) -> Result<Self> {
        if t.iter().any(|&v| v < 0.0) || t.iter().sum::<f64>() > 1.0 {
            return Err(Error::dims("simplex coordinates must be nonnegative with sum at most 1"));
        }
        if let Some(s) = s {
            if !(0.0..=1.0).contains(&s) {
                return Err(Error::dims("interval coordinate outside [0, 1]"));
            }
        }
        Ok(EvalPoint { x, t, s })
    }

    pub fn base(x: Vec<f64>) -> Self {
        EvalPoint { x, t: vec![], s: None }
    }

    fn params(&self) -> Vec<f64> {
        let mut p = self.t.clone();
        p.extend(self.s);
        p
    }

    fn coords(&self) -> Vec<f64> {
        let mut c = self.x.clone();
        c.extend(self.params());
        c
    }
}

fn determinant(mut a: Vec<Vec<f64>>) -> f64 {
    let k = a.len();
    let mut det = 1.0;
    for col in 0..k {
        let pivot = (col..k)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            for c in col..k {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    det
}

fn eval_at_coords(omega: &Form, coords: &[f64], vectors: &[Vec<f64>]) -> f64 {
    let dims = omega.dims();
    let (x, params) = coords.split_at(dims.base);
    omega
        .terms()
        .map(|(mask, coeff)| {
            let slots: Vec<usize> = (0..dims.total()).filter(|&s| mask >> s & 1 == 1).collect();
            let minor: Vec<Vec<f64>> = slots.iter().map(|&s| vectors.iter().map(|v| v[s]).collect()).collect();
            coeff.eval(x, params) * determinant(minor)
        })
        .sum()
}

fn check_vectors(dims: Dims, vectors: &[Vec<f64>]) -> Result<()> {
    if vectors.iter().any(|v| v.len() != dims.total()) {
        return Err(Error::dims(format!("tangent vectors must have {} components", dims.total())));
    }
    Ok(())
}

/// `ω_pt(v_1, …, v_k)` as an alternating multilinear form.
pub fn eval_form(omega: &Form, pt: &EvalPoint, vectors: &[Vec<f64>]) -> Result<f64> {
    let dims = omega.dims();
    check_vectors(dims, vectors)?;
    if pt.x.len() != dims.base || pt.params().len() != dims.params {
        return Err(Error::dims("evaluation point does not match the form"));
    }
    if omega.is_zero() {
        return Ok(0.0);
    }
    match omega.degree() {
        Some(k) if k == vectors.len() => Ok(eval_at_coords(omega, &pt.coords(), vectors)),
        Some(k) => Err(Error::ArgumentCount {
            expected: k,
            got: vectors.len(),
        }),
        None => Err(Error::Degree("evaluation needs a homogeneous form".into())),
    }
}

/// `dω(v_0, …, v_k) ≈ Σ_i (−1)^i ∂_{v_i} ω(v_0, …, v̂_i, …, v_k)` by central differences.
pub fn fd_exterior_d(omega: &Form, pt: &EvalPoint, vectors: &[Vec<f64>], h: f64) -> Result<f64> {
    let dims = omega.dims();
    check_vectors(dims, vectors)?;
    if h <= 0.0 {
        return Err(Error::dims("finite-difference step must be positive"));
    }
    if omega.is_zero() {
        return Ok(0.0);
    }
    let k = omega
        .degree()
        .ok_or_else(|| Error::Degree("evaluation needs a homogeneous form".into()))?;
    if vectors.len() != k + 1 {
        return Err(Error::ArgumentCount {
            expected: k + 1,
            got: vectors.len(),
        });
    }
    let base = pt.coords();
    let mut acc = 0.0;
    for (i, v) in vectors.iter().enumerate() {
        let rest: Vec<Vec<f64>> = vectors.iter().enumerate().filter(|&(j, _)| j != i).map(|(_, w)| w.clone()).collect();
        let shifted = |sgn: f64| -> Vec<f64> { base.iter().zip(v).map(|(c, d)| c + sgn * h * d).collect() };
        let diff = (eval_at_coords(omega, &shifted(1.0), &rest) - eval_at_coords(omega, &shifted(-1.0), &rest)) / (2.0 * h);
        acc += if i % 2 == 0 { diff } else { -diff };
    }
    Ok(acc)
}

/// Integration domain: a torus block in the listed base directions (other base
/// coordinates frozen at `base_point`), then `Δ^simplex`, then optionally `I`.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    pub base_point: Vec<f64>,
    pub torus: Vec<usize>,
    pub simplex: usize,
    pub interval: bool,
    pub weight: f64,
}

impl Domain {
    pub fn fiber(base_point: Vec<f64>, simplex: usize, interval: bool) -> Self {
        Domain {
            base_point,
            torus: vec![],
            simplex,
            interval,
            weight: 1.0,
        }
    }

    /// `z × Δ^r (× I)` for a coordinate subtorus `z`.
    pub fn over_cycle(cycle: &BaseCycle, simplex: usize, interval: bool) -> Self {
        let mut base_point = vec![0.0; cycle.base_dim()];
        for (&j, o) in cycle.offsets() {
            base_point[j] = rational_to_f64(o);
        }
        Domain {
            base_point,
            torus: cycle.directions().to_vec(),
            simplex,
            interval,
            weight: cycle.multiplicity() as f64,
        }
    }

    pub fn dim(&self) -> usize {
        self.torus.len() + self.simplex + usize::from(self.interval)
    }

    fn param_count(&self) -> usize {
        self.simplex + usize::from(self.interval)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum QuadMethod {
    /// Periodic trapezoid on torus axes, Gauss–Legendre elsewhere (collapsed
    /// coordinates on the simplex); the error is `|I(N) − I(2N)|`.
    TensorGrid { points: usize },
    /// Uniform sampling with the standard error of the mean.
    MonteCarlo { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadMethod,
    pub tolerance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: u64,
}

/// Gauss–Legendre nodes and weights on `[0, 1]` by Newton iteration.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pn1 = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (z * pn - pn1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out.push(((1.0 - z) / 2.0, w / 2.0));
    }
    out
}

/// One tensor-grid pass: torus nodes form the outer loop so that base-point
/// work is shared by all parameter nodes.
fn tensor_pass<P, G>(domain: &Domain, n: usize, prepare: &P) -> (f64, u64)
where
    P: Fn(&[f64]) -> G + Sync,
    G: Fn(&[f64]) -> f64,
{
    let gl = gauss_legendre(n);
    // collapsed coordinates t_k = u_k Π_{l<k} (1 − u_l) on the simplex
    let mut cube: Vec<(Vec<f64>, f64)> = vec![(vec![], 1.0)];
    for _ in 0..domain.simplex {
        cube = cube
            .iter()
            .flat_map(|(u, w)| {
                gl.iter().map(move |&(v, wv)| {
                    let mut u = u.clone();
                    u.push(v);
                    (u, w * wv)
                })
            })
            .collect();
    }
    let mut param_nodes: Vec<(Vec<f64>, f64)> = cube
        .into_iter()
        .map(|(u, w)| {
            let mut t = Vec::with_capacity(u.len());
            let mut rest = 1.0;
            for &ui in &u {
                t.push(rest * ui);
                rest *= 1.0 - ui;
            }
            (t, w * duffy_jacobian(&u))
        })
        .collect();
    if domain.interval {
        param_nodes = param_nodes
            .iter()
            .flat_map(|(t, w)| {
                gl.iter().map(move |&(s, ws)| {
                    let mut p = t.clone();
                    p.push(s);
                    (p, w * ws)
                })
            })
            .collect();
    }
    let torus_count = n.pow(domain.torus.len() as u32);
    let partials: Vec<f64> = (0..torus_count)
        .into_par_iter()
        .map(|idx| {
            let mut x = domain.base_point.clone();
            let mut rem = idx;
            for &d in &domain.torus {
                x[d] = (rem % n) as f64 / n as f64;
                rem /= n;
            }
            let g = prepare(&x);
            param_nodes.iter().map(|(p, w)| w * g(p)).sum::<f64>()
        })
        .collect();
    let total: f64 = partials.iter().sum::<f64>() / torus_count as f64;
    (total * domain.weight, (torus_count * param_nodes.len()) as u64)
}

fn duffy_jacobian(u: &[f64]) -> f64 {
    let r = u.len();
    (0..r).map(|i| (1.0 - u[i]).powi((r - 1 - i) as i32)).product()
}

fn monte_carlo<P, G>(domain: &Domain, samples: u64, seed: u64, prepare: &P) -> QuadResult
where
    P: Fn(&[f64]) -> G + Sync,
    G: Fn(&[f64]) -> f64,
{
    const CHUNK: u64 = 4096;
    let chunks = samples.div_ceil(CHUNK);
    let r = domain.simplex;
    let volume = 1.0 / (1..=r).map(|k| k as f64).product::<f64>();
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c);
            let count = CHUNK.min(samples - c * CHUNK);
            let (mut s1, mut s2) = (0.0, 0.0);
            let mut x = domain.base_point.clone();
            for _ in 0..count {
                for &d in &domain.torus {
                    x[d] = rng.gen::<f64>();
                }
                let mut p = Vec::with_capacity(domain.param_count());
                if r > 0 {
                    let e: Vec<f64> = (0..=r).map(|_| rng.sample::<f64, _>(Exp1)).collect();
                    let total: f64 = e.iter().sum();
                    p.extend(e[1..].iter().map(|v| v / total));
                }
                if domain.interval {
                    p.push(rng.gen::<f64>());
                }
                let v = prepare(&x)(&p) * volume;
                s1 += v;
                s2 += v * v;
            }
            (s1, s2)
        })
        .collect();
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |(a, b), (c, d)| (a + c, b + d));
    let nf = samples as f64;
    let mean = s1 / nf;
    let var = (s2 / nf - mean * mean).max(0.0) * nf / (nf - 1.0).max(1.0);
    QuadResult {
        value: mean * domain.weight,
        error: (var / nf).sqrt() * domain.weight.abs(),
        evaluations: samples,
    }
}

/// Quadrature of a staged integrand: `prepare(x)` does the base-point work
/// once and returns the function of the parameters `t_1..t_r (, s)`.
pub fn quad_staged<P, G>(domain: &Domain, spec: &QuadratureSpec, prepare: P) -> Result<QuadResult>
where
    P: Fn(&[f64]) -> G + Sync,
    G: Fn(&[f64]) -> f64,
{
    if domain.torus.iter().any(|&d| d >= domain.base_point.len()) {
        return Err(Error::dims("torus direction outside the base"));
    }
    Ok(match spec.method {
        QuadMethod::TensorGrid { points } => {
            if points == 0 {
                return Err(Error::dims("tensor grid needs at least one point"));
            }
            let (coarse, _) = tensor_pass(domain, points, &prepare);
            let (fine, evals) = tensor_pass(domain, 2 * points, &prepare);
            QuadResult {
                value: fine,
                error: (fine - coarse).abs(),
                evaluations: evals,
            }
        }
        QuadMethod::MonteCarlo { samples, seed } => {
            if samples < 2 {
                return Err(Error::dims("Monte-Carlo needs at least two samples"));
            }
            monte_carlo(domain, samples, seed, &prepare)
        }
    })
}

/// Quadrature of a plain function of `(x, params)`.
pub fn quad_integral<F>(domain: &Domain, spec: &QuadratureSpec, f: F) -> Result<QuadResult>
where
    F: Fn(&[f64], &[f64]) -> f64 + Sync,
{
    let f = &f;
    quad_staged(domain, spec, |x: &[f64]| {
        let x = x.to_vec();
        move |p: &[f64]| f(&x, p)
    })
}

/// `∫` of a form over the domain: the integrand is the form evaluated on the
/// coordinate vectors of the domain, torus block first.
pub fn quad_form(omega: &Form, domain: &Domain, spec: &QuadratureSpec) -> Result<QuadResult> {
    let dims = omega.dims();
    if dims.base != domain.base_point.len() || dims.params != domain.param_count() {
        return Err(Error::dims("form and integration domain disagree"));
    }
    if !omega.is_zero() && omega.degree() != Some(domain.dim()) {
        return Err(Error::Degree(format!(
            "form degree {:?} against a {}-dimensional domain",
            omega.degree(),
            domain.dim()
        )));
    }
    let total = dims.total();
    let mut slots: Vec<usize> = domain.torus.clone();
    slots.extend(dims.base..total);
    let vectors: Vec<Vec<f64>> = slots
        .iter()
        .map(|&s| {
            let mut v = vec![0.0; total];
            v[s] = 1.0;
            v
        })
        .collect();
    quad_integral(domain, spec, |x, p| {
        let mut c = x.to_vec();
        c.extend_from_slice(p);
        eval_at_coords(omega, &c, &vectors)
    })
}

// ---------------------------------------------------------------------------
// numeric matrix-valued forms

type Mat = Vec<f64>;

fn mat_mul(n: usize, a: &Mat, b: &Mat) -> Mat {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

/// Parity of the shuffle putting the slots of `a` before those of `b` into
/// increasing order, counted pair by pair.
fn shuffle_sign(a: u32, b: u32) -> f64 {
    let mut inversions = 0;
    for i in 0..32 {
        if a >> i & 1 == 1 {
            for j in 0..i {
                if b >> j & 1 == 1 {
                    inversions += 1;
                }
            }
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// A matrix-valued form with float entries, keyed by slot bitmask.
#[derive(Clone, Debug, PartialEq)]
pub struct NumMatForm {
    pub rank: usize,
    pub comps: BTreeMap<u32, Mat>,
}

impl NumMatForm {
    fn wedge(&self, other: &NumMatForm) -> NumMatForm {
        let n = self.rank;
        let mut comps: BTreeMap<u32, Mat> = BTreeMap::new();
        for (&ma, a) in &self.comps {
            for (&mb, b) in &other.comps {
                if ma & mb != 0 {
                    continue;
                }
                let sign = shuffle_sign(ma, mb);
                let prod = mat_mul(n, a, b);
                let e = comps.entry(ma | mb).or_insert_with(|| vec![0.0; n * n]);
                for (x, y) in e.iter_mut().zip(prod) {
                    *x += sign * y;
                }
            }
        }
        NumMatForm { rank: n, comps }
    }

    fn trace(&self) -> BTreeMap<u32, f64> {
        let n = self.rank;
        self.comps
            .iter()
            .map(|(&m, a)| (m, (0..n).map(|i| a[i * n + i]).sum()))
            .collect()
    }
}

fn scalar_wedge(a: &BTreeMap<u32, f64>, b: &BTreeMap<u32, f64>) -> BTreeMap<u32, f64> {
    let mut out = BTreeMap::new();
    for (&ma, &x) in a {
        for (&mb, &y) in b {
            if ma & mb == 0 {
                *out.entry(ma | mb).or_insert(0.0) += shuffle_sign(ma, mb) * x * y;
            }
        }
    }
    out
}

/// `P(Ω)` for a numeric matrix 2-form, as a map from slot mask to value.
pub fn numeric_chern_weil(p: &InvariantPolynomial, omega: &NumMatForm) -> BTreeMap<u32, f64> {
    let mut acc: BTreeMap<u32, f64> = [(0u32, 1.0)].into_iter().collect();
    for &k in p.factors() {
        let mut power = omega.clone();
        for _ in 1..k {
            power = power.wedge(omega);
        }
        acc = scalar_wedge(&acc, &power.trace());
    }
    acc
}

/// Curvature `Ω_ab = ∂_a A_b − ∂_b A_a + [A_a, A_b]` from connection
/// components `a[slot]` and their derivatives `da[a][b] = ∂_a A_b`.
fn numeric_curvature(n: usize, a: &[Mat], da: &[Vec<Mat>]) -> NumMatForm {
    let k = a.len();
    let mut comps = BTreeMap::new();
    for i in 0..k {
        for j in i + 1..k {
            let ab = mat_mul(n, &a[i], &a[j]);
            let ba = mat_mul(n, &a[j], &a[i]);
            let m: Mat = (0..n * n).map(|e| da[i][j][e] - da[j][i][e] + ab[e] - ba[e]).collect();
            if m.iter().any(|&v| v != 0.0) {
                comps.insert((1 << i) | (1 << j), m);
            }
        }
    }
    NumMatForm { rank: n, comps }
}

/// Fourth-order central difference step used by the oracle.
pub const FD_STEP: f64 = 1e-3;

fn fd4<F: Fn(f64) -> Mat>(f: F, h: f64) -> Mat {
    let (a, b, c, d) = (f(2.0 * h), f(h), f(-h), f(-2.0 * h));
    (0..a.len()).map(|e| (-a[e] + 8.0 * b[e] - 8.0 * c[e] + d[e]) / (12.0 * h)).collect()
}

/// A trigonometric coefficient function in float form: `Σ c · trig(2π k·x)`.
#[derive(Clone, Debug)]
struct FloatScalar {
    terms: Vec<(f64, Vec<f64>, bool)>,
}

impl FloatScalar {
    fn new(s: &crate::scalar::Scalar) -> Self {
        let terms = s
            .terms()
            .map(|(key, c)| {
                let coeff = rational_to_f64(c) * std::f64::consts::TAU.powi(key.tau as i32);
                let freq = key.trig.frequency().iter().map(|&k| k as f64).collect();
                (coeff, freq, key.trig.phase() == crate::scalar::Phase::Sin)
            })
            .collect();
        FloatScalar { terms }
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(c, k, sin)| {
                let angle = std::f64::consts::TAU * k.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
                c * if *sin { angle.sin() } else { angle.cos() }
            })
            .sum()
    }
}

/// Coefficient functions of a connection along chosen base directions:
/// `table[b][e]` is entry `e` of the `dx_b` component.
struct CoefficientTable {
    table: Vec<Vec<FloatScalar>>,
}

impl CoefficientTable {
    fn new(d: &Connection, dirs: &[usize]) -> Self {
        let n = d.rank();
        let table = dirs
            .iter()
            .map(|&dir| {
                (0..n * n)
                    .map(|e| FloatScalar::new(&d.one_form().entries()[e].coefficient(1 << dir)))
                    .collect()
            })
            .collect();
        CoefficientTable { table }
    }

    fn component(&self, b: usize, x: &[f64]) -> Mat {
        self.table[b].iter().map(|s| s.eval(x)).collect()
    }

    /// Values and fourth-order finite-difference derivatives at `x`;
    /// `deriv[a][b] = ∂_a A_b` with `a` running over the same directions.
    fn jet(&self, dirs: &[usize], x: &[f64]) -> Jet {
        let k = dirs.len();
        let value = (0..k).map(|b| self.component(b, x)).collect();
        let deriv = dirs
            .iter()
            .map(|&a| {
                (0..k)
                    .map(|b| {
                        fd4(
                            |h| {
                                let mut y = x.to_vec();
                                y[a] += h;
                                self.component(b, &y)
                            },
                            FD_STEP,
                        )
                    })
                    .collect()
            })
            .collect();
        Jet { value, deriv }
    }
}

struct Jet {
    value: Vec<Mat>,
    deriv: Vec<Vec<Mat>>,
}

/// Ordered sequences of disjoint slot pairs covering `0..2p`, each with the
/// sign of the permutation that sorts their concatenation.
fn pair_sequences(p: usize) -> Vec<(f64, Vec<(usize, usize)>)> {
    fn rec(free: u32, acc: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if free == 0 {
            out.push(acc.clone());
            return;
        }
        for a in 0..32 {
            if free >> a & 1 == 0 {
                continue;
            }
            for b in a + 1..32 {
                if free >> b & 1 == 0 {
                    continue;
                }
                acc.push((a, b));
                rec(free & !(1 << a) & !(1 << b), acc, out);
                acc.pop();
            }
        }
    }
    let mut seqs = Vec::new();
    rec((1u32 << (2 * p)) - 1, &mut Vec::new(), &mut seqs);
    seqs.into_iter()
        .map(|seq| {
            let flat: Vec<usize> = seq.iter().flat_map(|&(a, b)| [a, b]).collect();
            let mut inversions = 0;
            for i in 0..flat.len() {
                for j in i + 1..flat.len() {
                    if flat[i] > flat[j] {
                        inversions += 1;
                    }
                }
            }
            (if inversions % 2 == 0 { 1.0 } else { -1.0 }, seq)
        })
        .collect()
}

/// Flat storage of `Ω_ab` (`a < b`) for `slots` slots of rank-`n` matrices.
struct FlatCurvature {
    n: usize,
    slots: usize,
    data: Vec<f64>,
}

impl FlatCurvature {
    fn zeros(n: usize, slots: usize) -> Self {
        FlatCurvature {
            n,
            slots,
            data: vec![0.0; slots * slots * n * n],
        }
    }

    fn at(&self, a: usize, b: usize) -> &[f64] {
        let nn = self.n * self.n;
        let off = (a * self.slots + b) * nn;
        &self.data[off..off + nn]
    }

    fn at_mut(&mut self, a: usize, b: usize) -> &mut [f64] {
        let nn = self.n * self.n;
        let off = (a * self.slots + b) * nn;
        &mut self.data[off..off + nn]
    }
}

fn mat_mul_into(n: usize, a: &[f64], b: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|v| *v = 0.0);
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
}

/// Coefficient of the top slot monomial in `P(Ω)` when the number of slots is
/// exactly `2p`.
fn top_chern_weil(p: &InvariantPolynomial, omega: &FlatCurvature, seqs: &[(f64, Vec<(usize, usize)>)]) -> f64 {
    let n = omega.n;
    let mut acc = vec![0.0; n * n];
    let mut tmp = vec![0.0; n * n];
    let mut total = 0.0;
    for (sign, seq) in seqs {
        let mut value = *sign;
        let mut pos = 0;
        for &k in p.factors() {
            acc.copy_from_slice(omega.at(seq[pos].0, seq[pos].1));
            for &(a, b) in &seq[pos + 1..pos + k] {
                mat_mul_into(n, &acc, omega.at(a, b), &mut tmp);
                std::mem::swap(&mut acc, &mut tmp);
            }
            pos += k;
            value *= (0..n).map(|i| acc[i * n + i]).sum::<f64>();
            if value == 0.0 {
                break;
            }
        }
        total += value;
    }
    total
}

/// Top coefficient of `P(Ω^{D̃})` on `z × Δ^r × I` at one base point, as a
/// function of `(t_1..t_r, s)`. Base derivatives come from the finite
/// differences stored in the jets; derivatives along the affine path in
/// `(t, s)` are read off from the vertex values.
fn homotopy_top_coefficient<'a>(
    jets: &'a [Jet],
    reference: &'a Jet,
    n: usize,
    k: usize,
    p: &'a InvariantPolynomial,
    seqs: &'a [(f64, Vec<(usize, usize)>)],
) -> impl Fn(&[f64]) -> f64 + 'a {
    let r = jets.len() - 1;
    let slots = k + r + 1;
    let nn = n * n;
    move |params: &[f64]| {
        let (t, s) = (&params[..r], params[r]);
        let t0 = 1.0 - t.iter().sum::<f64>();
        let bary = |j: usize| if j == 0 { t0 } else { t[j - 1] };
        let mut omega = FlatCurvature::zeros(n, slots);
        // A_b, the vertex combination V_b(t) = Σ t_j V_j, and base derivatives
        let mut a = vec![0.0; k * nn];
        let mut v = vec![0.0; k * nn];
        let mut da = vec![0.0; k * k * nn];
        for (j, jet) in jets.iter().enumerate() {
            let w = bary(j);
            for b in 0..k {
                for e in 0..nn {
                    v[b * nn + e] += w * jet.value[b][e];
                }
                for i in 0..k {
                    for e in 0..nn {
                        da[(i * k + b) * nn + e] += s * w * jet.deriv[i][b][e];
                    }
                }
            }
        }
        for b in 0..k {
            for e in 0..nn {
                a[b * nn + e] = (1.0 - s) * reference.value[b][e] + s * v[b * nn + e];
            }
            for i in 0..k {
                for e in 0..nn {
                    da[(i * k + b) * nn + e] += (1.0 - s) * reference.deriv[i][b][e];
                }
            }
        }
        let mut ab = vec![0.0; nn];
        let mut ba = vec![0.0; nn];
        for i in 0..k {
            for b in i + 1..k {
                mat_mul_into(n, &a[i * nn..(i + 1) * nn], &a[b * nn..(b + 1) * nn], &mut ab);
                mat_mul_into(n, &a[b * nn..(b + 1) * nn], &a[i * nn..(i + 1) * nn], &mut ba);
                let out = omega.at_mut(i, b);
                for e in 0..nn {
                    out[e] = da[(i * k + b) * nn + e] - da[(b * k + i) * nn + e] + ab[e] - ba[e];
                }
            }
        }
        // Ω between base slot b and a parameter slot is minus the parameter
        // derivative of A_b
        for b in 0..k {
            for j in 1..=r {
                let out = omega.at_mut(b, k + j - 1);
                for e in 0..nn {
                    out[e] = -s * (jets[j].value[b][e] - jets[0].value[b][e]);
                }
            }
            let out = omega.at_mut(b, k + r);
            for e in 0..nn {
                out[e] = -(v[b * nn + e] - reference.value[b][e]);
            }
        }
        top_chern_weil(p, &omega, seqs)
    }
}

fn simplex_tables(sigma: &crate::complex::Simplex, set: &ConnectionSet, dirs: &[usize]) -> Result<Vec<CoefficientTable>> {
    Ok(set.vertices(sigma)?.iter().map(|v| CoefficientTable::new(v, dirs)).collect())
}

/// Numeric `ψ(Σ)(z) = (−1)^{r+1} Σ_σ c_σ ∫_{z×Δ^r×I} P(Ω^{D̃_σ})`, built from the
/// coefficient functions of the input connections only.
pub fn psi_pairing_oracle(
    sigma: &Chain,
    d0: &Connection,
    p: &InvariantPolynomial,
    set: &ConnectionSet,
    cycle: &BaseCycle,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    let r = sigma.dim();
    if 2 * p.degree() != cycle.dim() + r + 1 {
        return Err(Error::Degree("cycle dimension must be 2p − r − 1".into()));
    }
    let dirs = cycle.directions().to_vec();
    let n = d0.rank();
    let k = dirs.len();
    let seqs = pair_sequences(p.degree());
    let seqs = &seqs;
    let reference = CoefficientTable::new(d0, &dirs);
    let sign = if r % 2 == 0 { -1.0 } else { 1.0 };
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for (s, c) in sigma.terms() {
        let tables = simplex_tables(s, set, &dirs)?;
        let domain = Domain::over_cycle(cycle, r, true);
        let res = quad_staged(&domain, spec, |x: &[f64]| {
            let jets: Vec<Jet> = tables.iter().map(|tb| tb.jet(&dirs, x)).collect();
            let rj = reference.jet(&dirs, x);
            move |params: &[f64]| homotopy_top_coefficient(&jets, &rj, n, k, p, seqs)(params)
        })?;
        value += sign * c as f64 * res.value;
        error += (c as f64).abs() * res.error;
        evaluations += res.evaluations;
    }
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

/// Numeric coefficient of `dx_{dirs}` in the ψ form at the base point `x`.
pub fn psi_form_oracle(
    sigma: &Chain,
    d0: &Connection,
    p: &InvariantPolynomial,
    set: &ConnectionSet,
    dirs: &[usize],
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    let r = sigma.dim();
    if 2 * p.degree() != dirs.len() + r + 1 {
        return Err(Error::Degree("basis degree must be 2p − r − 1".into()));
    }
    if dirs.windows(2).any(|w| w[0] >= w[1]) || dirs.iter().any(|&d| d >= x.len()) {
        return Err(Error::dims("basis directions must be increasing base directions"));
    }
    let n = d0.rank();
    let k = dirs.len();
    let seqs = pair_sequences(p.degree());
    let rj = CoefficientTable::new(d0, dirs).jet(dirs, x);
    let sign = if r % 2 == 0 { -1.0 } else { 1.0 };
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for (s, c) in sigma.terms() {
        let jets: Vec<Jet> = simplex_tables(s, set, dirs)?.iter().map(|tb| tb.jet(dirs, x)).collect();
        let f = homotopy_top_coefficient(&jets, &rj, n, k, p, &seqs);
        let domain = Domain::fiber(x.to_vec(), r, true);
        let res = quad_integral(&domain, spec, |_, params| f(params))?;
        value += sign * c as f64 * res.value;
        error += (c as f64).abs() * res.error;
        evaluations += res.evaluations;
    }
    Ok(QuadResult {
        value,
        error,
        evaluations,
    })
}

/// Numeric `P(Ω)` at a point for a parameter-dependent connection 1-form
/// (entries may involve `t`), computed from coefficient values only.
pub fn chern_weil_oracle(
    p: &InvariantPolynomial,
    a: &crate::forms::MatrixForm,
    pt: &EvalPoint,
) -> Result<BTreeMap<u32, f64>> {
    let dims = a.dims();
    let n = a.rank();
    let coords = pt.coords();
    if coords.len() != dims.total() {
        return Err(Error::dims("evaluation point does not match the connection"));
    }
    let total = dims.total();
    let comps = |c: &[f64]| -> Vec<Mat> {
        let (x, params) = c.split_at(dims.base);
        (0..total)
            .map(|slot| (0..n * n).map(|e| a.entries()[e].coefficient(1 << slot).eval(x, params)).collect())
            .collect()
    };
    let value = comps(&coords);
    let da: Vec<Vec<Mat>> = (0..total)
        .map(|i| {
            (0..total)
                .map(|b| {
                    fd4(
                        |h| {
                            let mut c = coords.clone();
                            c[i] += h;
                            comps(&c).swap_remove(b)
                        },
                        FD_STEP,
                    )
                })
                .collect()
        })
        .collect();
    Ok(numeric_chern_weil(p, &numeric_curvature(n, &value, &da)))
}

/// One stored oracle value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenRecord {
    pub scenario: String,
    pub quantity: String,
    pub method: String,
    pub seed: Option<u64>,
    pub value: f64,
    pub error: f64,
    pub tolerance: f64,
}

impl GoldenRecord {
    /// Whether an exact value agrees with this record: within `tolerance` for
    /// grids, within `tolerance` standard errors for Monte-Carlo.
    pub fn accepts(&self, exact: f64) -> bool {
        let bound = if self.method.starts_with("monte_carlo") {
            self.tolerance * self.error
        } else {
            self.tolerance
        };
        (exact - self.value).abs() <= bound
    }
}

pub fn load_goldens(path: impl AsRef<Path>) -> Result<Vec<GoldenRecord>> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn save_goldens(path: impl AsRef<Path>, records: &[GoldenRecord]) -> Result<()> {
    let text = serde_json::to_string_pretty(records).map_err(|e| Error::Parse(e.to_string()))?;
    fs::write(path, text + "\n")?;
    Ok(())
}

pub fn method_name(spec: &QuadratureSpec) -> String {
    match spec.method {
        QuadMethod::TensorGrid { points } => format!("tensor_grid({points})"),
        QuadMethod::MonteCarlo { samples, .. } => format!("monte_carlo({samples})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, Direction, Phase, Scalar};

    fn e(total: usize, i: usize) -> Vec<f64> {
        let mut v = vec![0.0; total];
        v[i] = 1.0;
        v
    }

    fn grid(points: usize) -> QuadratureSpec {
        QuadratureSpec {
            method: QuadMethod::TensorGrid { points },
            tolerance: 1e-9,
        }
    }

    #[test]
    fn coordinate_evaluations() {
        let dims = Dims::new(2, 0);
        let dx1 = Form::d_coord(dims, Direction::Base(0)).unwrap();
        let dx2 = Form::d_coord(dims, Direction::Base(1)).unwrap();
        let pt = EvalPoint::base(vec![0.1, 0.2]);
        assert_eq!(eval_form(&dx1, &pt, &[e(2, 0)]).unwrap(), 1.0);
        assert_eq!(eval_form(&dx1.wedge(&dx2), &pt, &[e(2, 1), e(2, 0)]).unwrap(), -1.0);
        assert!(eval_form(&dx1, &pt, &[]).is_err());
    }

    #[test]
    fn fd_of_parameter_and_cosine() {
        let dims = Dims::new(1, 1);
        let t = Form::scalar(Scalar::param(dims, 0));
        let pt = EvalPoint::new(vec![0.3], vec![0.4], None).unwrap();
        assert!((fd_exterior_d(&t, &pt, &[e(2, 1)], 1e-5).unwrap() - 1.0).abs() < 1e-8);
        let c = Form::scalar(Scalar::trig(dims, vec![1], Phase::Cos, int(1), 0).unwrap());
        let fd = fd_exterior_d(&c, &pt, &[e(2, 0)], 1e-5).unwrap();
        let exact = -std::f64::consts::TAU * (std::f64::consts::TAU * 0.3).sin();
        assert!((fd - exact).abs() < 1e-7);
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        for n in 1..12 {
            let nodes = gauss_legendre(n);
            for deg in 0..2 * n {
                let q: f64 = nodes.iter().map(|(x, w)| w * x.powi(deg as i32)).sum();
                assert!((q - 1.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n} deg={deg}");
            }
        }
    }

    #[test]
    fn simplex_product_moment() {
        let d = Domain::fiber(vec![], 2, false);
        let res = quad_integral(&d, &grid(20), |_, t| (1.0 - t[0] - t[1]) * t[0]).unwrap();
        assert!((res.value - 1.0 / 24.0).abs() < 1e-12);
        assert!(res.error < 1e-12);
    }

    #[test]
    fn torus_orthogonality() {
        let cycle = BaseCycle::subtorus(2, &[0, 1]).unwrap();
        let d = Domain::over_cycle(&cycle, 0, false);
        let res = quad_integral(&d, &grid(8), |x, _| (std::f64::consts::TAU * (x[0] - x[1])).cos()).unwrap();
        assert!(res.value.abs() < 1e-10);
    }

    #[test]
    fn monte_carlo_is_reproducible() {
        let d = Domain::fiber(vec![], 2, true);
        let spec = QuadratureSpec {
            method: QuadMethod::MonteCarlo { samples: 20_000, seed: 42 },
            tolerance: 3.0,
        };
        let a = quad_integral(&d, &spec, |_, p| p[0] * p[2]).unwrap();
        let b = quad_integral(&d, &spec, |_, p| p[0] * p[2]).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        // ∫_{Δ²} t_1 · ∫_I s = 1/6 · 1/2
        assert!((a.value - 1.0 / 12.0).abs() < 4.0 * a.error);
    }

    #[test]
    fn numeric_curvature_of_off_diagonal_pair() {
        // A = E12 dx1 + E21 dx2 has curvature diag(1,−1) dx1∧dx2
        let a = crate::chernweil::Connection::constant(
            "A",
            2,
            &[(0, vec![vec![int(0), int(1)], vec![int(0), int(0)]]), (1, vec![vec![int(0), int(0)], vec![int(1), int(0)]])],
        )
        .unwrap();
        let pt = EvalPoint::base(vec![0.2, 0.7]);
        let cw = chern_weil_oracle(&InvariantPolynomial::trace_power(1), a.one_form(), &pt).unwrap();
        assert!(cw.values().all(|v| v.abs() < 1e-12));
        let omega = {
            let dirs = [0, 1];
            let j = CoefficientTable::new(&a, &dirs).jet(&dirs, &pt.x);
            numeric_curvature(2, &j.value, &j.deriv)
        };
        assert_eq!(omega.comps.get(&0b11), Some(&vec![1.0, 0.0, 0.0, -1.0]));
    }

    #[test]
    fn pair_sequences_count_and_top_coefficient() {
        assert_eq!(pair_sequences(2).len(), 6);
        assert_eq!(pair_sequences(3).len(), 90);
        // Ω = dx1∧dx2 + dx3∧dx4 (rank 1): tr(Ω²) top = 2
        let one = vec![1.0];
        let zero = vec![0.0];
        let mut omega = FlatCurvature::zeros(1, 4);
        omega.at_mut(0, 1).copy_from_slice(&one);
        omega.at_mut(2, 3).copy_from_slice(&one);
        let _ = zero;
        let v = top_chern_weil(&InvariantPolynomial::trace_power(2), &omega, &pair_sequences(2));
        assert_eq!(v, 2.0);
        let w = top_chern_weil(&InvariantPolynomial::new(vec![1, 1]).unwrap(), &omega, &pair_sequences(2));
        assert_eq!(w, 2.0);
    }
}

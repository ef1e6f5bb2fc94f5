//! Exact coefficient ring.
//!
//! A [`Scalar`] is a finite sum of terms
//! `c · τ^j · trig(2π k·x) · t^a`, where `c` is rational, `τ = 2π` is kept
//! symbolic, `trig` is `cos` or `sin` of an integer frequency vector on the
//! unit-period torus, and `t^a` is a monomial in the parameter coordinates.
//! Keeping `τ` formal makes differentiation of Fourier modes exact.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

/// `τ = 2π`, used whenever an exact value is rendered to a float.
pub const TAU: f64 = std::f64::consts::TAU;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rational_to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        // numerator/denominator too large for a direct conversion
        let n = q.numer().to_f64().unwrap_or(f64::NAN);
        let d = q.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

/// Parses `"p/q"`, `"p"` or `"-p/q"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational numerator in `{s}`")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| Error::Parse(format!("bad rational denominator in `{s}`")))?;
    if d.is_zero() {
        return Err(Error::Parse(format!("zero denominator in `{s}`")));
    }
    Ok(Rational::new(n, d))
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Number of base coordinates `m` and parameter coordinates `q`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Dims {
    pub base: usize,
    pub params: usize,
}

impl Dims {
    pub const fn new(base: usize, params: usize) -> Self {
        Self { base, params }
    }

    pub const fn total(&self) -> usize {
        self.base + self.params
    }

    pub const fn with_params(self, params: usize) -> Self {
        Self {
            base: self.base,
            params,
        }
    }

    pub(crate) fn check(&self, other: &Dims) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::dims(format!(
                "(m={}, q={}) vs (m={}, q={})",
                self.base, self.params, other.base, other.params
            )))
        }
    }
}

/// A coordinate direction, zero-based within its block.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Base(usize),
    Param(usize),
}

impl Direction {
    /// Position in the combined ordering (base block first).
    pub fn slot(self, dims: Dims) -> Result<usize> {
        match self {
            Direction::Base(i) if i < dims.base => Ok(i),
            Direction::Param(i) if i < dims.params => Ok(dims.base + i),
            _ => Err(Error::UnknownDirection(format!(
                "{self} with m={}, q={}",
                dims.base, dims.params
            ))),
        }
    }

    pub fn from_slot(slot: usize, dims: Dims) -> Direction {
        if slot < dims.base {
            Direction::Base(slot)
        } else {
            Direction::Param(slot - dims.base)
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Direction::Base(i) => write!(f, "x{}", i + 1),
            Direction::Param(i) => write!(f, "t{}", i + 1),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Phase {
    Cos,
    Sin,
}

/// `cos(2π k·x)` or `sin(2π k·x)` in canonical form: the zero frequency only
/// pairs with `cos`, and a `sin` frequency has a positive first nonzero entry.
/// `cos` frequencies are normalized the same way since `cos` is even.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TrigMonomial {
    freq: Vec<i64>,
    phase: Phase,
}

impl TrigMonomial {
    pub fn one(base: usize) -> Self {
        Self {
            freq: vec![0; base],
            phase: Phase::Cos,
        }
    }

    /// Canonicalizes `(freq, phase)`, returning the sign picked up on the way,
    /// or `None` for `sin(0) = 0`.
    pub fn new(mut freq: Vec<i64>, phase: Phase) -> Option<(i64, TrigMonomial)> {
        let lead = freq.iter().copied().find(|&k| k != 0);
        match (lead, phase) {
            (None, Phase::Sin) => None,
            (None, Phase::Cos) => Some((1, TrigMonomial { freq, phase })),
            (Some(k), _) if k > 0 => Some((1, TrigMonomial { freq, phase })),
            (Some(_), _) => {
                freq.iter_mut().for_each(|k| *k = -*k);
                let sign = if phase == Phase::Sin { -1 } else { 1 };
                Some((sign, TrigMonomial { freq, phase }))
            }
        }
    }

    pub fn frequency(&self) -> &[i64] {
        &self.freq
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    pub fn is_constant(&self) -> bool {
        self.freq.iter().all(|&k| k == 0)
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let arg: f64 = self
            .freq
            .iter()
            .zip(x)
            .map(|(&k, &xi)| k as f64 * xi)
            .sum::<f64>()
            * TAU;
        match self.phase {
            Phase::Cos => arg.cos(),
            Phase::Sin => arg.sin(),
        }
    }

    /// Product-to-sum: returns terms `(numerator over 2, monomial)`.
    fn product(&self, other: &TrigMonomial) -> Vec<(i64, TrigMonomial)> {
        let sum: Vec<i64> = self.freq.iter().zip(&other.freq).map(|(a, b)| a + b).collect();
        let diff: Vec<i64> = self.freq.iter().zip(&other.freq).map(|(a, b)| a - b).collect();
        let raw = match (self.phase, other.phase) {
            (Phase::Cos, Phase::Cos) => [(1, sum, Phase::Cos), (1, diff, Phase::Cos)],
            (Phase::Sin, Phase::Sin) => [(1, diff, Phase::Cos), (-1, sum, Phase::Cos)],
            (Phase::Sin, Phase::Cos) => [(1, sum, Phase::Sin), (1, diff, Phase::Sin)],
            (Phase::Cos, Phase::Sin) => [(1, sum, Phase::Sin), (-1, diff, Phase::Sin)],
        };
        raw.into_iter()
            .filter_map(|(c, f, ph)| TrigMonomial::new(f, ph).map(|(s, m)| (c * s, m)))
            .collect()
    }

    fn write_argument(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, &k) in self.freq.iter().enumerate() {
            if k == 0 {
                continue;
            }
            let sign = if k < 0 { "-" } else if first { "" } else { "+" };
            let mag = k.abs();
            if mag == 1 {
                write!(f, "{sign}x{}", i + 1)?;
            } else {
                write!(f, "{sign}{mag}*x{}", i + 1)?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Display for TrigMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_constant() {
            return write!(f, "1");
        }
        let name = match self.phase {
            Phase::Cos => "cos",
            Phase::Sin => "sin",
        };
        write!(f, "{name}(2pi*(")?;
        self.write_argument(f)?;
        write!(f, "))")
    }
}

/// Basis element of the coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScalarKey {
    pub trig: TrigMonomial,
    pub powers: Vec<u32>,
    pub tau: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scalar {
    dims: Dims,
    terms: BTreeMap<ScalarKey, Rational>,
}

impl Scalar {
    pub fn zero(dims: Dims) -> Self {
        Self {
            dims,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dims: Dims, c: Rational) -> Self {
        let mut s = Self::zero(dims);
        s.add_term(
            ScalarKey {
                trig: TrigMonomial::one(dims.base),
                powers: vec![0; dims.params],
                tau: 0,
            },
            c,
        );
        s
    }

    pub fn from_int(dims: Dims, n: i64) -> Self {
        Self::constant(dims, int(n))
    }

    pub fn one(dims: Dims) -> Self {
        Self::from_int(dims, 1)
    }

    /// The parameter coordinate `t_{k+1}` (zero-based `k`).
    pub fn param(dims: Dims, k: usize) -> Self {
        assert!(k < dims.params, "parameter index {k} out of range");
        let mut powers = vec![0; dims.params];
        powers[k] = 1;
        let mut s = Self::zero(dims);
        s.add_term(
            ScalarKey {
                trig: TrigMonomial::one(dims.base),
                powers,
                tau: 0,
            },
            Rational::one(),
        );
        s
    }

    /// `coeff · τ^tau · trig(2π freq·x)`.
    pub fn trig(dims: Dims, freq: Vec<i64>, phase: Phase, coeff: Rational, tau: u32) -> Result<Self> {
        if freq.len() != dims.base {
            return Err(Error::dims(format!(
                "frequency vector of length {} for base dimension {}",
                freq.len(),
                dims.base
            )));
        }
        let mut s = Self::zero(dims);
        if let Some((sign, trig)) = TrigMonomial::new(freq, phase) {
            s.add_term(
                ScalarKey {
                    trig,
                    powers: vec![0; dims.params],
                    tau,
                },
                coeff * int(sign),
            );
        }
        Ok(s)
    }

    /// Builds a scalar from raw terms, canonicalizing trig keys.
    pub fn from_terms(dims: Dims, terms: impl IntoIterator<Item = (ScalarKey, Rational)>) -> Result<Self> {
        let mut s = Self::zero(dims);
        for (key, c) in terms {
            if key.trig.freq.len() != dims.base || key.powers.len() != dims.params {
                return Err(Error::dims("scalar term shape does not match dims"));
            }
            if let Some((sign, trig)) = TrigMonomial::new(key.trig.freq, key.trig.phase) {
                s.add_term(
                    ScalarKey {
                        trig,
                        powers: key.powers,
                        tau: key.tau,
                    },
                    c * int(sign),
                );
            }
        }
        Ok(s)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ScalarKey, &Rational)> {
        self.terms.iter()
    }

    pub(crate) fn add_term(&mut self, key: ScalarKey, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(key) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn try_add(&self, other: &Scalar) -> Result<Scalar> {
        self.dims.check(&other.dims)?;
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Scalar) -> Result<Scalar> {
        self.try_add(&-other)
    }

    pub fn try_mul(&self, other: &Scalar) -> Result<Scalar> {
        self.dims.check(&other.dims)?;
        let mut out = Scalar::zero(self.dims);
        let half = rat(1, 2);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                let c = ca * cb;
                let powers: Vec<u32> = ka.powers.iter().zip(&kb.powers).map(|(a, b)| a + b).collect();
                let tau = ka.tau + kb.tau;
                if ka.trig.is_constant() || kb.trig.is_constant() {
                    let trig = if ka.trig.is_constant() { kb.trig.clone() } else { ka.trig.clone() };
                    out.add_term(ScalarKey { trig, powers, tau }, c);
                    continue;
                }
                for (sign, trig) in ka.trig.product(&kb.trig) {
                    out.add_term(
                        ScalarKey {
                            trig,
                            powers: powers.clone(),
                            tau,
                        },
                        &c * &half * int(sign),
                    );
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Rational) -> Scalar {
        if c.is_zero() {
            return Scalar::zero(self.dims);
        }
        Scalar {
            dims: self.dims,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = Scalar::one(self.dims);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Exact partial derivative along `dir`.
    pub fn partial(&self, dir: Direction) -> Result<Scalar> {
        dir.slot(self.dims)?;
        let mut out = Scalar::zero(self.dims);
        match dir {
            Direction::Base(a) => {
                for (key, c) in &self.terms {
                    let k = key.trig.freq[a];
                    if k == 0 {
                        continue;
                    }
                    // d/dx cos(2πk·x) = -τ k_a sin, d/dx sin = τ k_a cos
                    let (phase, sign) = match key.trig.phase {
                        Phase::Cos => (Phase::Sin, -1),
                        Phase::Sin => (Phase::Cos, 1),
                    };
                    let trig = TrigMonomial {
                        freq: key.trig.freq.clone(),
                        phase,
                    };
                    out.add_term(
                        ScalarKey {
                            trig,
                            powers: key.powers.clone(),
                            tau: key.tau + 1,
                        },
                        c * int(sign * k),
                    );
                }
            }
            Direction::Param(j) => {
                for (key, c) in &self.terms {
                    let e = key.powers[j];
                    if e == 0 {
                        continue;
                    }
                    let mut powers = key.powers.clone();
                    powers[j] -= 1;
                    out.add_term(
                        ScalarKey {
                            trig: key.trig.clone(),
                            powers,
                            tau: key.tau,
                        },
                        c * int(e as i64),
                    );
                }
            }
        }
        Ok(out)
    }

    /// Integral over the unit-period circle in each listed base direction.
    pub fn integrate_torus(&self, dirs: &[usize]) -> Result<Scalar> {
        if let Some(&bad) = dirs.iter().find(|&&d| d >= self.dims.base) {
            return Err(Error::UnknownDirection(format!("x{}", bad + 1)));
        }
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| dirs.iter().all(|&d| k.trig.freq[d] == 0))
            .map(|(k, c)| (k.clone(), c.clone()))
            .collect();
        Ok(Scalar {
            dims: self.dims,
            terms,
        })
    }

    /// Value at `(x, params)`, with `τ` rendered as `2π`.
    pub fn eval(&self, x: &[f64], params: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(k, c)| {
                let mono: f64 = k
                    .powers
                    .iter()
                    .zip(params)
                    .map(|(&e, &t)| t.powi(e as i32))
                    .product();
                rational_to_f64(c) * TAU.powi(k.tau as i32) * k.trig.eval(x) * mono
            })
            .sum()
    }

    /// Substitutes `x_{index+1} = offset` exactly; offsets must be multiples of 1/4
    /// so that every `cos`/`sin` value stays in `{0, ±1}`.
    pub fn substitute_base(&self, index: usize, offset: &Rational) -> Result<Scalar> {
        if index >= self.dims.base {
            return Err(Error::UnknownDirection(format!("x{}", index + 1)));
        }
        let quarters = offset * int(4);
        if !quarters.is_integer() {
            return Err(Error::InvalidOffset(format_rational(offset)));
        }
        let quarters = quarters.to_integer();
        let mut out = Scalar::zero(self.dims);
        for (key, c) in &self.terms {
            let k = key.trig.freq[index];
            // angle 2π k c = (π/2)·(k·4c)
            let turn = (BigInt::from(k) * &quarters).mod_floor(&BigInt::from(4));
            let (cos_v, sin_v) = match turn.to_i64().unwrap_or(0) {
                0 => (1, 0),
                1 => (0, 1),
                2 => (-1, 0),
                _ => (0, -1),
            };
            let mut freq = key.trig.freq.clone();
            freq[index] = 0;
            // cos(A+θ) = cosA cosθ - sinA sinθ ; sin(A+θ) = sinA cosθ + cosA sinθ
            let parts = match key.trig.phase {
                Phase::Cos => [(cos_v, Phase::Cos), (-sin_v, Phase::Sin)],
                Phase::Sin => [(cos_v, Phase::Sin), (sin_v, Phase::Cos)],
            };
            for (w, phase) in parts {
                if w == 0 {
                    continue;
                }
                if let Some((sign, trig)) = TrigMonomial::new(freq.clone(), phase) {
                    out.add_term(
                        ScalarKey {
                            trig,
                            powers: key.powers.clone(),
                            tau: key.tau,
                        },
                        c * int(w * sign),
                    );
                }
            }
        }
        Ok(out)
    }

    /// Replaces each parameter `t_i` by `images[i]` (scalars over `target` dims).
    pub fn compose_params(&self, images: &[Scalar], target: Dims) -> Result<Scalar> {
        if images.len() != self.dims.params {
            return Err(Error::dims(format!(
                "{} parameter images for {} parameters",
                images.len(),
                self.dims.params
            )));
        }
        if target.base != self.dims.base {
            return Err(Error::dims("parameter substitution cannot change the base"));
        }
        for img in images {
            target.check(&img.dims)?;
        }
        let mut cache: Vec<Vec<Scalar>> = images.iter().map(|img| vec![Scalar::one(target), img.clone()]).collect();
        let mut out = Scalar::zero(target);
        for (key, c) in &self.terms {
            let mut term = Scalar::zero(target);
            term.add_term(
                ScalarKey {
                    trig: key.trig.clone(),
                    powers: vec![0; target.params],
                    tau: key.tau,
                },
                c.clone(),
            );
            for (i, &e) in key.powers.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                while cache[i].len() <= e as usize {
                    let next = cache[i].last().unwrap() * &images[i];
                    cache[i].push(next);
                }
                term = &term * &cache[i][e as usize];
            }
            out = &out + &term;
        }
        Ok(out)
    }

    /// Appends parameters so that the scalar lives over `params` parameters.
    pub fn embed_params(&self, params: usize) -> Result<Scalar> {
        if params < self.dims.params {
            return Err(Error::dims("cannot drop parameters by embedding"));
        }
        let terms = self
            .terms
            .iter()
            .map(|(k, c)| {
                let mut powers = k.powers.clone();
                powers.resize(params, 0);
                (
                    ScalarKey {
                        trig: k.trig.clone(),
                        powers,
                        tau: k.tau,
                    },
                    c.clone(),
                )
            })
            .collect();
        Ok(Scalar {
            dims: self.dims.with_params(params),
            terms,
        })
    }

    pub fn is_param_free(&self) -> bool {
        self.terms.keys().all(|k| k.powers.iter().all(|&e| e == 0))
    }

    /// `Some` if the scalar is constant in `x` and in the parameters.
    pub fn as_tau_poly(&self) -> Option<TauPoly> {
        let mut out = TauPoly::zero();
        for (k, c) in &self.terms {
            if !k.trig.is_constant() || k.powers.iter().any(|&e| e != 0) {
                return None;
            }
            out.add_term(k.tau, c.clone());
        }
        Some(out)
    }

    pub fn max_param_degree(&self) -> u32 {
        self.terms.keys().map(|k| k.powers.iter().sum::<u32>()).max().unwrap_or(0)
    }
}

impl Add for &Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        self.try_add(rhs).expect("scalar addition")
    }
}

impl Sub for &Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self.try_sub(rhs).expect("scalar subtraction")
    }
}

impl Mul for &Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        self.try_mul(rhs).expect("scalar multiplication")
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar {
            dims: self.dims,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        (&self).add(&rhs)
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        (&self).sub(&rhs)
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        (&self).mul(&rhs)
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (key, c)) in self.terms.iter().enumerate() {
            let neg = c.is_negative();
            if i > 0 {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            } else if neg {
                write!(f, "-")?;
            }
            let mut factors = Vec::new();
            let mag = c.abs();
            if !mag.is_one() {
                factors.push(format_rational(&mag));
            }
            match key.tau {
                0 => {}
                1 => factors.push("tau".to_string()),
                j => factors.push(format!("tau^{j}")),
            }
            for (j, &e) in key.powers.iter().enumerate() {
                match e {
                    0 => {}
                    1 => factors.push(format!("t{}", j + 1)),
                    e => factors.push(format!("t{}^{e}", j + 1)),
                }
            }
            if !key.trig.is_constant() {
                factors.push(key.trig.to_string());
            }
            if factors.is_empty() {
                write!(f, "1")?;
            } else {
                write!(f, "{}", factors.join("*"))?;
            }
        }
        Ok(())
    }
}

/// Element of `ℚ[τ]`, `τ = 2π`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct TauPoly {
    coeffs: BTreeMap<u32, Rational>,
}

impl TauPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn rational(q: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(0, q);
        p
    }

    pub fn add_term(&mut self, power: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(power).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&power);
        }
    }

    pub fn coeffs(&self) -> impl Iterator<Item = (u32, &Rational)> {
        self.coeffs.iter().map(|(&j, c)| (j, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// The value as a rational when no power of `τ` survives.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.coeffs.len() {
            0 => Some(Rational::zero()),
            1 => self.coeffs.get(&0).cloned(),
            _ => None,
        }
    }

    pub fn is_integer(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_integer())
    }

    pub fn to_f64(&self) -> f64 {
        self.coeffs
            .iter()
            .map(|(&j, c)| rational_to_f64(c) * TAU.powi(j as i32))
            .sum()
    }

    pub fn scale(&self, c: &Rational) -> TauPoly {
        let mut out = TauPoly::zero();
        for (&j, v) in &self.coeffs {
            out.add_term(j, v * c);
        }
        out
    }

    pub fn plus(&self, other: &TauPoly) -> TauPoly {
        let mut out = self.clone();
        for (&j, c) in &other.coeffs {
            out.add_term(j, c.clone());
        }
        out
    }

    pub fn minus(&self, other: &TauPoly) -> TauPoly {
        self.plus(&other.scale(&int(-1)))
    }
}

impl fmt::Display for TauPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .map(|(&j, c)| match j {
                0 => format_rational(c),
                1 => format!("{}*tau", format_rational(c)),
                j => format!("{}*tau^{j}", format_rational(c)),
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

//! Graded exterior algebra over `B × P` with [`Scalar`] coefficients.
//!
//! A basis element is stored as a bitmask over the combined coordinate slots
//! (base directions `x_1..x_m` first, then parameters), read in increasing
//! slot order. Base directions therefore always precede parameter directions,
//! and parameters that are integrated out sit at the right end.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalar::{Dims, Direction, Rational, Scalar};

pub type Mask = u32;

pub(crate) fn bit(slot: usize) -> Mask {
    1 << slot
}

/// Sign of `e_a ∧ e_b` relative to the sorted basis element `e_{a|b}`,
/// or `None` when the masks overlap.
pub(crate) fn wedge_sign(a: Mask, b: Mask) -> Option<i64> {
    if a & b != 0 {
        return None;
    }
    let mut inversions = 0;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

pub(crate) fn slots(mask: Mask) -> impl Iterator<Item = usize> {
    (0..32usize).filter(move |&i| mask & (1 << i) != 0)
}

/// Base and parameter degree of a term.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub base: usize,
    pub param: usize,
}

impl Bidegree {
    pub const fn new(base: usize, param: usize) -> Self {
        Self { base, param }
    }

    pub fn of_mask(mask: Mask, dims: Dims) -> Self {
        let base_mask = mask & ((1 << dims.base) - 1);
        Self {
            base: base_mask.count_ones() as usize,
            param: (mask & !base_mask).count_ones() as usize,
        }
    }

    pub fn total(&self) -> usize {
        self.base + self.param
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Form {
    dims: Dims,
    terms: BTreeMap<Mask, Scalar>,
}

impl Form {
    pub fn zero(dims: Dims) -> Self {
        assert!(dims.total() <= 24, "too many coordinates for a form");
        Self {
            dims,
            terms: BTreeMap::new(),
        }
    }

    /// A 0-form.
    pub fn scalar(s: Scalar) -> Self {
        let mut f = Self::zero(s.dims());
        f.add_term(0, s);
        f
    }

    pub fn constant(dims: Dims, c: Rational) -> Self {
        Self::scalar(Scalar::constant(dims, c))
    }

    /// `coeff · d(dir_1) ∧ … ∧ d(dir_k)` in the given order.
    pub fn monomial(coeff: Scalar, dirs: &[Direction]) -> Result<Self> {
        let dims = coeff.dims();
        let mut mask: Mask = 0;
        let mut sign = 1;
        for dir in dirs {
            let b = bit(dir.slot(dims)?);
            match wedge_sign(mask, b) {
                Some(s) => {
                    sign *= s;
                    mask |= b;
                }
                None => return Ok(Self::zero(dims)),
            }
        }
        let mut f = Self::zero(dims);
        f.add_term(mask, if sign < 0 { -&coeff } else { coeff });
        Ok(f)
    }

    /// The basis 1-form `d(dir)`.
    pub fn d_coord(dims: Dims, dir: Direction) -> Result<Self> {
        Self::monomial(Scalar::one(dims), &[dir])
    }

    pub fn from_terms(dims: Dims, terms: impl IntoIterator<Item = (Mask, Scalar)>) -> Result<Self> {
        let mut f = Self::zero(dims);
        for (mask, s) in terms {
            dims.check(&s.dims())?;
            if mask >> dims.total() != 0 {
                return Err(Error::dims(format!("basis mask {mask:#b} outside {} slots", dims.total())));
            }
            f.add_term(mask, s);
        }
        Ok(f)
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (Mask, &Scalar)> {
        self.terms.iter().map(|(&m, s)| (m, s))
    }

    pub fn coefficient(&self, mask: Mask) -> Scalar {
        self.terms.get(&mask).cloned().unwrap_or_else(|| Scalar::zero(self.dims))
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub(crate) fn add_term(&mut self, mask: Mask, s: Scalar) {
        if s.is_zero() {
            return;
        }
        match self.terms.get_mut(&mask) {
            Some(existing) => {
                let sum = &*existing + &s;
                if sum.is_zero() {
                    self.terms.remove(&mask);
                } else {
                    *existing = sum;
                }
            }
            None => {
                self.terms.insert(mask, s);
            }
        }
    }

    /// Degree if the form is homogeneous (the zero form reports `None`).
    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.terms.keys().map(|m| m.count_ones() as usize);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    pub fn max_degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    pub fn bidegrees(&self) -> Vec<Bidegree> {
        let mut v: Vec<Bidegree> = self.terms.keys().map(|&m| Bidegree::of_mask(m, self.dims)).collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn try_add(&self, other: &Form) -> Result<Form> {
        self.dims.check(&other.dims)?;
        let mut out = self.clone();
        for (&m, s) in &other.terms {
            out.add_term(m, s.clone());
        }
        Ok(out)
    }

    pub fn try_sub(&self, other: &Form) -> Result<Form> {
        self.try_add(&-other)
    }

    pub fn try_wedge(&self, other: &Form) -> Result<Form> {
        self.dims.check(&other.dims)?;
        let mut out = Form::zero(self.dims);
        for (&ma, sa) in &self.terms {
            for (&mb, sb) in &other.terms {
                if let Some(sign) = wedge_sign(ma, mb) {
                    let prod = sa * sb;
                    out.add_term(ma | mb, if sign < 0 { -&prod } else { prod });
                }
            }
        }
        Ok(out)
    }

    pub fn wedge(&self, other: &Form) -> Form {
        self.try_wedge(other).expect("wedge of forms with different dims")
    }

    pub fn scale(&self, c: &Rational) -> Form {
        let mut out = Form::zero(self.dims);
        for (&m, s) in &self.terms {
            out.add_term(m, s.scale(c));
        }
        out
    }

    pub fn mul_scalar(&self, c: &Scalar) -> Form {
        let mut out = Form::zero(self.dims);
        for (&m, s) in &self.terms {
            out.add_term(m, s * c);
        }
        out
    }

    /// Exact exterior derivative.
    pub fn d(&self) -> Form {
        let mut out = Form::zero(self.dims);
        for (&mask, coeff) in &self.terms {
            for slot in 0..self.dims.total() {
                let b = bit(slot);
                if mask & b != 0 {
                    continue;
                }
                let partial = coeff
                    .partial(Direction::from_slot(slot, self.dims))
                    .expect("slot inside dims");
                if partial.is_zero() {
                    continue;
                }
                let below = (mask & (b - 1)).count_ones();
                out.add_term(mask | b, if below % 2 == 0 { partial } else { -&partial });
            }
        }
        out
    }

    pub fn bidegree_component(&self, bd: Bidegree) -> Form {
        let terms = self
            .terms
            .iter()
            .filter(|(&m, _)| Bidegree::of_mask(m, self.dims) == bd)
            .map(|(&m, s)| (m, s.clone()))
            .collect();
        Form { dims: self.dims, terms }
    }

    pub fn degree_component(&self, k: usize) -> Form {
        let terms = self
            .terms
            .iter()
            .filter(|(&m, _)| m.count_ones() as usize == k)
            .map(|(&m, s)| (m, s.clone()))
            .collect();
        Form { dims: self.dims, terms }
    }

    /// True when no term involves a parameter (neither `dt` nor `t`).
    pub fn is_pure_base(&self) -> bool {
        let base_mask: Mask = (1 << self.dims.base) - 1;
        self.terms.iter().all(|(&m, s)| m & !base_mask == 0 && s.is_param_free())
    }

    /// Regards the form as living over more parameters (appended at the end).
    pub fn embed_params(&self, params: usize) -> Result<Form> {
        let target = self.dims.with_params(params);
        let mut out = Form::zero(target);
        for (&m, s) in &self.terms {
            out.add_term(m, s.embed_params(params)?);
        }
        Ok(out)
    }

    /// Forgets trailing parameters; fails if any of them actually occurs.
    pub fn restrict_params(&self, params: usize) -> Result<Form> {
        let target = self.dims.with_params(params);
        let mut out = Form::zero(target);
        for (&m, s) in &self.terms {
            if m >> target.total() != 0 {
                return Err(Error::dims("form involves parameters that would be dropped"));
            }
            let terms = s
                .terms()
                .map(|(k, c)| {
                    if k.powers[params..].iter().any(|&e| e != 0) {
                        return Err(Error::dims("coefficient depends on a parameter that would be dropped"));
                    }
                    let mut key = k.clone();
                    key.powers.truncate(params);
                    Ok((key, c.clone()))
                })
                .collect::<Result<Vec<_>>>()?;
            out.add_term(m, Scalar::from_terms(target, terms)?);
        }
        Ok(out)
    }

    /// Pullback along a map that fixes the base and sends the parameters
    /// `t_i ↦ images[i]`, where the images are scalars over `target`.
    pub fn pullback_params(&self, images: &[Scalar], target: Dims) -> Result<Form> {
        if target.base != self.dims.base {
            return Err(Error::dims("parameter pullback must keep the base"));
        }
        let differentials: Vec<Form> = images.iter().map(|img| Form::scalar(img.clone()).d()).collect();
        let base_mask: Mask = (1 << self.dims.base) - 1;
        let mut out = Form::zero(target);
        for (&mask, coeff) in &self.terms {
            let mut piece = Form::zero(target);
            piece.add_term(mask & base_mask, coeff.compose_params(images, target)?);
            for slot in slots(mask & !base_mask) {
                piece = piece.wedge(&differentials[slot - self.dims.base]);
                if piece.is_zero() {
                    break;
                }
            }
            out = &out + &piece;
        }
        Ok(out)
    }

    /// Pullback to the slice `x_{index+1} = offset`: terms with `dx_{index+1}`
    /// vanish and coefficients are evaluated exactly at the offset.
    pub fn restrict_base(&self, index: usize, offset: &Rational) -> Result<Form> {
        let b = bit(index);
        let mut out = Form::zero(self.dims);
        for (&m, s) in &self.terms {
            if m & b != 0 {
                continue;
            }
            out.add_term(m, s.substitute_base(index, offset)?);
        }
        Ok(out)
    }

    pub fn map_coefficients(&self, f: impl Fn(&Scalar) -> Result<Scalar>) -> Result<Form> {
        let mut out = Form::zero(self.dims);
        for (&m, s) in &self.terms {
            out.add_term(m, f(s)?);
        }
        Ok(out)
    }

    pub fn basis_name(mask: Mask, dims: Dims) -> String {
        if mask == 0 {
            return "1".to_string();
        }
        slots(mask)
            .map(|s| format!("d{}", Direction::from_slot(s, dims)))
            .collect::<Vec<_>>()
            .join("^")
    }
}

impl Add for &Form {
    type Output = Form;
    fn add(self, rhs: &Form) -> Form {
        self.try_add(rhs).expect("form addition")
    }
}

impl Sub for &Form {
    type Output = Form;
    fn sub(self, rhs: &Form) -> Form {
        self.try_sub(rhs).expect("form subtraction")
    }
}

impl Neg for &Form {
    type Output = Form;
    fn neg(self) -> Form {
        Form {
            dims: self.dims,
            terms: self.terms.iter().map(|(&m, s)| (m, -s)).collect(),
        }
    }
}

impl Add for Form {
    type Output = Form;
    fn add(self, rhs: Form) -> Form {
        (&self).add(&rhs)
    }
}

impl Sub for Form {
    type Output = Form;
    fn sub(self, rhs: Form) -> Form {
        (&self).sub(&rhs)
    }
}

impl Neg for Form {
    type Output = Form;
    fn neg(self) -> Form {
        -&self
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&m, s)| format!("({s}) {}", Form::basis_name(m, self.dims)))
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// Dense `n × n` matrix of forms (row-major).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MatrixForm {
    rank: usize,
    dims: Dims,
    entries: Vec<Form>,
}

impl MatrixForm {
    pub fn zero(rank: usize, dims: Dims) -> Self {
        assert!(rank > 0, "rank must be positive");
        Self {
            rank,
            dims,
            entries: vec![Form::zero(dims); rank * rank],
        }
    }

    pub fn identity(rank: usize, dims: Dims) -> Self {
        let mut m = Self::zero(rank, dims);
        for i in 0..rank {
            m.entries[i * rank + i] = Form::scalar(Scalar::one(dims));
        }
        m
    }

    pub fn from_entries(rank: usize, entries: Vec<Form>) -> Result<Self> {
        if rank == 0 || entries.len() != rank * rank {
            return Err(Error::dims(format!("{} entries for rank {rank}", entries.len())));
        }
        let dims = entries[0].dims();
        for e in &entries {
            dims.check(&e.dims())?;
        }
        Ok(Self { rank, dims, entries })
    }

    /// Constant rational matrix times the form `f`.
    pub fn from_matrix(matrix: &[Vec<Rational>], f: &Form) -> Result<Self> {
        let rank = matrix.len();
        if matrix.iter().any(|row| row.len() != rank) {
            return Err(Error::dims("matrix is not square"));
        }
        let entries = matrix.iter().flat_map(|row| row.iter().map(|c| f.scale(c))).collect();
        Self::from_entries(rank, entries)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn get(&self, i: usize, j: usize) -> &Form {
        &self.entries[i * self.rank + j]
    }

    pub fn set(&mut self, i: usize, j: usize, f: Form) -> Result<()> {
        self.dims.check(&f.dims())?;
        self.entries[i * self.rank + j] = f;
        Ok(())
    }

    pub fn entries(&self) -> &[Form] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Form::is_zero)
    }

    pub fn degree(&self) -> Option<usize> {
        let mut degs = self.entries.iter().filter(|e| !e.is_zero()).map(Form::degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first).flatten()
    }

    fn check(&self, other: &MatrixForm) -> Result<()> {
        if self.rank != other.rank {
            return Err(Error::RankMismatch {
                left: self.rank,
                right: other.rank,
            });
        }
        self.dims.check(&other.dims)
    }

    fn zip_with(&self, other: &MatrixForm, f: impl Fn(&Form, &Form) -> Form) -> Result<MatrixForm> {
        self.check(other)?;
        Ok(MatrixForm {
            rank: self.rank,
            dims: self.dims,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| f(a, b)).collect(),
        })
    }

    pub fn try_add(&self, other: &MatrixForm) -> Result<MatrixForm> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn try_sub(&self, other: &MatrixForm) -> Result<MatrixForm> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn neg(&self) -> MatrixForm {
        self.map(|e| -e)
    }

    pub fn scale(&self, c: &Rational) -> MatrixForm {
        self.map(|e| e.scale(c))
    }

    /// `f ∧ A`, entrywise.
    pub fn left_wedge_form(&self, f: &Form) -> MatrixForm {
        self.map(|e| f.wedge(e))
    }

    pub fn map(&self, f: impl Fn(&Form) -> Form) -> MatrixForm {
        MatrixForm {
            rank: self.rank,
            dims: self.dims,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map(&self, f: impl Fn(&Form) -> Result<Form>) -> Result<MatrixForm> {
        let entries = self.entries.iter().map(f).collect::<Result<Vec<_>>>()?;
        MatrixForm::from_entries(self.rank, entries)
    }

    /// `(A∧B)_{μν} = Σ_λ A_{μλ} ∧ B_{λν}`.
    pub fn wedge(&self, other: &MatrixForm) -> Result<MatrixForm> {
        self.check(other)?;
        let n = self.rank;
        let entries: Vec<Form> = (0..n * n)
            .into_par_iter()
            .map(|idx| {
                let (mu, nu) = (idx / n, idx % n);
                let mut acc = Form::zero(self.dims);
                for lambda in 0..n {
                    let a = self.get(mu, lambda);
                    let b = other.get(lambda, nu);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    acc = &acc + &a.wedge(b);
                }
                acc
            })
            .collect();
        Ok(MatrixForm {
            rank: n,
            dims: self.dims,
            entries,
        })
    }

    pub fn d(&self) -> MatrixForm {
        self.map(Form::d)
    }

    pub fn trace(&self) -> Form {
        (0..self.rank).fold(Form::zero(self.dims), |acc, i| &acc + self.get(i, i))
    }

    pub fn bidegree_component(&self, bd: Bidegree) -> MatrixForm {
        self.map(|e| e.bidegree_component(bd))
    }

    pub fn embed_params(&self, params: usize) -> Result<MatrixForm> {
        self.try_map(|e| e.embed_params(params))
    }

    pub fn pullback_params(&self, images: &[Scalar], target: Dims) -> Result<MatrixForm> {
        self.try_map(|e| e.pullback_params(images, target))
    }
}

impl fmt::Display for MatrixForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rank {
            let row: Vec<String> = (0..self.rank).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

//! The simplicial abelian group of relatively flat connection tuples.
//!
//! An `r`-simplex is an ordered tuple `(D⁰, …, D^r)` of connection ids; its
//! geometric family over `Δ^r` is `D⁰ + Σ_{j≥1} t_j (D^j − D⁰)` in the
//! coordinates `t_1..t_r` (with `t_0 = 1 − Σ t_j` eliminated).

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::chernweil::{curvature, Connection};
use crate::error::{Error, Result};
use crate::forms::{Bidegree, Form, MatrixForm};
use crate::scalar::{Dims, Scalar};

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Simplex {
    vertices: Vec<String>,
}

impl Simplex {
    pub fn new<S: Into<String>>(vertices: impl IntoIterator<Item = S>) -> Result<Self> {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        if vertices.is_empty() {
            return Err(Error::dims("a simplex needs at least one vertex"));
        }
        Ok(Self { vertices })
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    /// The `i`-th face `(D⁰, …, D̂^i, …, D^r)`.
    pub fn face(&self, i: usize) -> Simplex {
        let mut vertices = self.vertices.clone();
        vertices.remove(i);
        Simplex { vertices }
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", self.vertices.join(","))
    }
}

/// `φ*(D⁰, …, D^s) = (D^{φ(0)}, …, D^{φ(r)})` for strictly increasing `φ`.
pub fn face_map(phi: &[usize], sigma: &Simplex) -> Result<Simplex> {
    let target = sigma.dim();
    let increasing = phi.windows(2).all(|w| w[0] < w[1]);
    if phi.is_empty() || !increasing || phi.iter().any(|&i| i > target) {
        return Err(Error::InvalidFaceMap {
            map: phi.to_vec(),
            target,
        });
    }
    Simplex::new(phi.iter().map(|&i| sigma.vertices[i].clone()))
}

/// A ℤ-linear combination of `r`-simplices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Chain {
    dim: usize,
    terms: BTreeMap<Simplex, i64>,
}

impl Chain {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn from_terms(dim: usize, terms: impl IntoIterator<Item = (i64, Simplex)>) -> Result<Self> {
        let mut c = Self::zero(dim);
        for (coeff, s) in terms {
            c.add_simplex(coeff, s)?;
        }
        Ok(c)
    }

    pub fn simplex(s: Simplex) -> Self {
        let mut c = Self::zero(s.dim());
        c.terms.insert(s, 1);
        c
    }

    pub fn add_simplex(&mut self, coeff: i64, s: Simplex) -> Result<()> {
        if s.dim() != self.dim {
            return Err(Error::dims(format!(
                "{}-simplex {s} in a {}-chain",
                s.dim(),
                self.dim
            )));
        }
        if coeff == 0 {
            return Ok(());
        }
        let entry = self.terms.entry(s).or_insert(0);
        *entry += coeff;
        if *entry == 0 {
            self.terms.retain(|_, c| *c != 0);
        }
        Ok(())
    }

    pub fn plus(&self, other: &Chain) -> Result<Chain> {
        let mut out = self.clone();
        for (s, &c) in &other.terms {
            out.add_simplex(c, s.clone())?;
        }
        Ok(out)
    }

    pub fn scale(&self, k: i64) -> Chain {
        if k == 0 {
            return Chain::zero(self.dim);
        }
        Chain {
            dim: self.dim,
            terms: self.terms.iter().map(|(s, c)| (s.clone(), c * k)).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Simplex, i64)> {
        self.terms.iter().map(|(s, &c)| (s, c))
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = &String> {
        self.terms.keys().flat_map(|s| s.vertices.iter())
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.terms.iter().map(|(s, c)| format!("{c}{s}")).collect();
        write!(f, "{}", parts.join(" + "))
    }
}

/// `∂(D⁰, …, D^r) = Σ_i (−1)^i (D⁰, …, D̂^i, …, D^r)`.
pub fn boundary(c: &Chain) -> Result<Chain> {
    if c.dim == 0 {
        return Err(Error::ZeroDimensionalBoundary);
    }
    let mut out = Chain::zero(c.dim - 1);
    for (s, coeff) in c.terms() {
        for i in 0..=s.dim() {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            out.add_simplex(sign * coeff, s.face(i))?;
        }
    }
    Ok(out)
}

/// 0-chains count as cycles; otherwise `∂c = 0`.
pub fn is_cycle(c: &Chain) -> bool {
    c.dim == 0 || boundary(c).map(|b| b.is_zero()).unwrap_or(false)
}

/// Named connections over one torus, all of the same rank.
#[derive(Clone, Debug, Default)]
pub struct ConnectionSet {
    connections: BTreeMap<String, Connection>,
}

impl ConnectionSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, d: Connection) -> Result<()> {
        if let Some(first) = self.connections.values().next() {
            first.check_compatible(&d)?;
        }
        self.connections.insert(d.id().to_string(), d);
        Ok(())
    }

    pub fn get(&self, id: &str) -> Result<&Connection> {
        self.connections
            .get(id)
            .ok_or_else(|| Error::UnknownConnection(id.to_string()))
    }

    pub fn iter(&self) -> impl Iterator<Item = &Connection> {
        self.connections.values()
    }

    pub fn ids(&self) -> impl Iterator<Item = &String> {
        self.connections.keys()
    }

    pub fn vertices(&self, sigma: &Simplex) -> Result<Vec<&Connection>> {
        sigma.vertices.iter().map(|id| self.get(id)).collect()
    }

    /// Applies `f` to every connection, keeping ids.
    pub fn try_map(&self, f: impl Fn(&Connection) -> Result<Connection>) -> Result<ConnectionSet> {
        let mut out = ConnectionSet::new();
        for d in self.iter() {
            out.insert(f(d)?)?;
        }
        Ok(out)
    }
}

impl FromIterator<Connection> for ConnectionSet {
    fn from_iter<I: IntoIterator<Item = Connection>>(iter: I) -> Self {
        let mut set = ConnectionSet::new();
        for d in iter {
            set.insert(d).expect("compatible connections");
        }
        set
    }
}

/// The affine family `D⁰ + Σ_{j≥1} t_j (D^j − D⁰)` over `B × Δ^r`.
pub fn affine_family(vertices: &[&Connection]) -> Result<MatrixForm> {
    let first = vertices
        .first()
        .ok_or_else(|| Error::dims("a family needs at least one vertex"))?;
    for d in &vertices[1..] {
        first.check_compatible(d)?;
    }
    let r = vertices.len() - 1;
    let dims = Dims::new(first.base_dim(), r);
    let d0 = first.one_form().embed_params(r)?;
    let mut family = d0.clone();
    for (j, d) in vertices[1..].iter().enumerate() {
        let diff = d.one_form().embed_params(r)?.try_sub(&d0)?;
        let tj = Form::scalar(Scalar::param(dims, j));
        family = family.try_add(&diff.left_wedge_form(&tj))?;
    }
    Ok(family)
}

/// True iff every affine combination of the vertices is flat, decided on the
/// exact polynomial dependence of the slice curvature on `t`.
pub fn relative_flatness_check(vertices: &[&Connection]) -> Result<bool> {
    let family = affine_family(vertices)?;
    let omega = curvature(&family)?;
    Ok(omega.bidegree_component(Bidegree::new(2, 0)).is_zero())
}

pub fn family_connection(sigma: &Simplex, set: &ConnectionSet, strict: bool) -> Result<MatrixForm> {
    let vertices = set.vertices(sigma)?;
    if strict && !relative_flatness_check(&vertices)? {
        return Err(Error::NotRelativelyFlat(sigma.to_string()));
    }
    affine_family(&vertices)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SimplexReport {
    pub simplex: Simplex,
    pub coefficient: i64,
    pub relatively_flat: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainReport {
    pub dim: usize,
    pub is_cycle: bool,
    pub simplices: Vec<SimplexReport>,
}

impl ChainReport {
    pub fn all_relatively_flat(&self) -> bool {
        self.simplices.iter().all(|s| s.relatively_flat)
    }
}

pub fn validate_chain(c: &Chain, set: &ConnectionSet) -> ChainReport {
    let simplices = c
        .terms()
        .map(|(s, coeff)| {
            let outcome = set.vertices(s).and_then(|v| relative_flatness_check(&v));
            let (relatively_flat, error) = match outcome {
                Ok(ok) => (ok, None),
                Err(e) => (false, Some(e.to_string())),
            };
            SimplexReport {
                simplex: s.clone(),
                coefficient: coeff,
                relatively_flat,
                error,
            }
        })
        .collect();
    ChainReport {
        dim: c.dim,
        is_cycle: is_cycle(c),
        simplices,
    }
}

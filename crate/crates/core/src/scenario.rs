//! Scenario files: the JSON description of a bundle over `T^m`, its flat
//! connections, chains, reference connections and base cycles.
//!
//! Exact values are strings (`"3"`, `"-1/2"`). A matrix entry is either such a
//! string or a list of trigonometric terms
//! `{"freq": [k1, .., km], "phase": "cos" | "sin", "coeff": "p/q", "tau_pow": j}`
//! standing for `coeff · τ^j · trig(2π k·x)` with `τ = 2π`.
//!
//! ```json
//! {
//!   "id": "example",
//!   "base_dim": 2,
//!   "rank": 1,
//!   "connections": { "A": { "x1": [["1"]] }, "O": {} },
//!   "polynomial": [1],
//!   "chains": { "pt": { "dim": 0, "terms": [{ "coeff": 1, "vertices": ["A"] }] } },
//!   "reference": "O",
//!   "cycles": { "c1": { "directions": ["x1"], "offsets": { "x2": "1/4" }, "multiplicity": 1 } }
//! }
//! ```
//!
//! Malformed JSON or a wrong shape is a parse error; dangling names, bad
//! directions and inconsistent sizes are validation errors carrying the JSON
//! path of the offending field.

use std::collections::BTreeMap;
use std::path::Path;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::chernweil::{Connection, GaugeTransform, InvariantPolynomial};
use crate::complex::{Chain, ConnectionSet, Simplex};
use crate::error::{Error, Result};
use crate::forms::{Form, MatrixForm};
use crate::pairing::BaseCycle;
use crate::scalar::{format_rational, parse_rational, Dims, Direction, Phase, Rational, Scalar, ScalarKey};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    pub base_dim: usize,
    pub rank: usize,
    pub connections: BTreeMap<String, BTreeMap<String, Vec<Vec<RawEntry>>>>,
    pub polynomial: Vec<usize>,
    pub chains: BTreeMap<String, RawChain>,
    pub reference: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alt_references: Vec<String>,
    #[serde(default)]
    pub cycles: BTreeMap<String, RawCycle>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge: Option<RawGauge>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawEntry {
    Exact(String),
    Terms(Vec<RawTerm>),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTerm {
    pub freq: Vec<i64>,
    pub phase: RawPhase,
    pub coeff: String,
    #[serde(default)]
    pub tau_pow: u32,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RawPhase {
    Cos,
    Sin,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChain {
    pub dim: usize,
    pub terms: Vec<RawChainTerm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawChainTerm {
    pub coeff: i64,
    pub vertices: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCycle {
    pub directions: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub offsets: BTreeMap<String, String>,
    #[serde(default = "one_i64")]
    pub multiplicity: i64,
}

fn one_i64() -> i64 {
    1
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawGauge {
    pub g: Vec<Vec<RawEntry>>,
    pub g_inv: Vec<Vec<RawEntry>>,
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    pub description: Option<String>,
    pub base_dim: usize,
    pub rank: usize,
    pub connections: ConnectionSet,
    pub polynomial: InvariantPolynomial,
    pub chains: BTreeMap<String, Chain>,
    pub reference: String,
    pub alt_references: Vec<String>,
    pub cycles: BTreeMap<String, BaseCycle>,
    pub gauge: Option<GaugeTransform>,
}

fn invalid(path: impl Into<String>, message: impl Into<String>) -> Error {
    Error::validation(path, message)
}

/// `"x3"` to the zero-based index 2.
pub fn parse_direction(name: &str, base: usize) -> Option<usize> {
    let k: usize = name.strip_prefix('x')?.parse().ok()?;
    (1..=base).contains(&k).then(|| k - 1)
}

pub fn direction_name(index: usize) -> String {
    format!("x{}", index + 1)
}

fn rational_at(path: &str, s: &str) -> Result<Rational> {
    parse_rational(s).map_err(|e| Error::Parse(format!("{path}: {e}")))
}

fn entry_scalar(path: &str, entry: &RawEntry, dims: Dims) -> Result<Scalar> {
    match entry {
        RawEntry::Exact(s) => Ok(Scalar::constant(dims, rational_at(path, s)?)),
        RawEntry::Terms(terms) => {
            let mut acc = Scalar::zero(dims);
            for (i, t) in terms.iter().enumerate() {
                let tp = format!("{path}[{i}]");
                if t.freq.len() != dims.base {
                    return Err(invalid(
                        format!("{tp}.freq"),
                        format!("expected {} frequencies, got {}", dims.base, t.freq.len()),
                    ));
                }
                let phase = match t.phase {
                    RawPhase::Cos => Phase::Cos,
                    RawPhase::Sin => Phase::Sin,
                };
                let c = rational_at(&format!("{tp}.coeff"), &t.coeff)?;
                acc = acc.try_add(&Scalar::trig(dims, t.freq.clone(), phase, c, t.tau_pow)?)?;
            }
            Ok(acc)
        }
    }
}

fn scalar_entry(s: &Scalar) -> RawEntry {
    let constant_only = s
        .terms()
        .all(|(k, _)| k.trig.is_constant() && k.tau == 0 && k.powers.iter().all(|&p| p == 0));
    if constant_only {
        let c = s.terms().next().map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero);
        return RawEntry::Exact(format_rational(&c));
    }
    RawEntry::Terms(
        s.terms()
            .map(|(k, c): (&ScalarKey, &Rational)| RawTerm {
                freq: k.trig.frequency().to_vec(),
                phase: match k.trig.phase() {
                    Phase::Cos => RawPhase::Cos,
                    Phase::Sin => RawPhase::Sin,
                },
                coeff: format_rational(c),
                tau_pow: k.tau,
            })
            .collect(),
    )
}

fn matrix_at(path: &str, rows: &[Vec<RawEntry>], n: usize, dims: Dims) -> Result<Vec<Scalar>> {
    if rows.len() != n {
        return Err(invalid(path, format!("expected {n} rows, got {}", rows.len())));
    }
    let mut out = Vec::with_capacity(n * n);
    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(invalid(format!("{path}[{i}]"), format!("expected {n} entries, got {}", row.len())));
        }
        for (j, e) in row.iter().enumerate() {
            out.push(entry_scalar(&format!("{path}[{i}][{j}]"), e, dims)?);
        }
    }
    Ok(out)
}

impl RawScenario {
    pub fn validate(&self) -> Result<Scenario> {
        let m = self.base_dim;
        let n = self.rank;
        if m == 0 || m > 8 {
            return Err(invalid("base_dim", format!("base dimension {m} outside 1..=8")));
        }
        if n == 0 {
            return Err(invalid("rank", "rank must be positive"));
        }
        let dims = Dims::new(m, 0);

        let mut connections = ConnectionSet::new();
        for (id, comps) in &self.connections {
            let mut entries = vec![Form::zero(dims); n * n];
            for (dir, rows) in comps {
                let path = format!("connections.{id}.{dir}");
                let a = parse_direction(dir, m)
                    .ok_or_else(|| invalid(&path, format!("unknown direction `{dir}` for base dimension {m}")))?;
                let dx = Form::d_coord(dims, Direction::Base(a))?;
                for (e, s) in matrix_at(&path, rows, n, dims)?.into_iter().enumerate() {
                    entries[e] = entries[e].try_add(&Form::scalar(s).wedge(&dx))?;
                }
            }
            let one_form = MatrixForm::from_entries(n, entries)?;
            connections.insert(Connection::new(id.clone(), one_form)?)?;
        }

        let polynomial =
            InvariantPolynomial::new(self.polynomial.clone()).map_err(|e| invalid("polynomial", e.to_string()))?;

        let mut chains = BTreeMap::new();
        for (name, raw) in &self.chains {
            let path = format!("chains.{name}");
            let mut chain = Chain::zero(raw.dim);
            for (i, term) in raw.terms.iter().enumerate() {
                let tp = format!("{path}.terms[{i}]");
                if term.vertices.len() != raw.dim + 1 {
                    return Err(invalid(
                        format!("{tp}.vertices"),
                        format!("a {}-simplex needs {} vertices, got {}", raw.dim, raw.dim + 1, term.vertices.len()),
                    ));
                }
                for (j, v) in term.vertices.iter().enumerate() {
                    if connections.get(v).is_err() {
                        return Err(invalid(format!("{tp}.vertices[{j}]"), format!("unknown connection id `{v}`")));
                    }
                }
                let simplex = Simplex::new(term.vertices.iter().cloned()).map_err(|e| invalid(&tp, e.to_string()))?;
                chain.add_simplex(term.coeff, simplex).map_err(|e| invalid(&tp, e.to_string()))?;
            }
            chains.insert(name.clone(), chain);
        }

        if connections.get(&self.reference).is_err() {
            return Err(invalid("reference", format!("unknown connection id `{}`", self.reference)));
        }
        for (i, r) in self.alt_references.iter().enumerate() {
            if connections.get(r).is_err() {
                return Err(invalid(format!("alt_references[{i}]"), format!("unknown connection id `{r}`")));
            }
        }

        let mut cycles = BTreeMap::new();
        for (name, raw) in &self.cycles {
            let path = format!("cycles.{name}");
            let mut dirs = Vec::new();
            for (i, d) in raw.directions.iter().enumerate() {
                dirs.push(
                    parse_direction(d, m)
                        .ok_or_else(|| invalid(format!("{path}.directions[{i}]"), format!("unknown direction `{d}`")))?,
                );
            }
            let mut offsets = BTreeMap::new();
            for (d, v) in &raw.offsets {
                let op = format!("{path}.offsets.{d}");
                let a = parse_direction(d, m).ok_or_else(|| invalid(&op, format!("unknown direction `{d}`")))?;
                offsets.insert(a, rational_at(&op, v)?);
            }
            let cycle = BaseCycle::new(m, dirs, offsets, raw.multiplicity).map_err(|e| invalid(&path, e.to_string()))?;
            cycles.insert(name.clone(), cycle);
        }

        let gauge = match &self.gauge {
            None => None,
            Some(raw) => {
                let to_matrix = |path: &str, rows: &[Vec<RawEntry>]| -> Result<MatrixForm> {
                    let entries = matrix_at(path, rows, n, dims)?.into_iter().map(Form::scalar).collect();
                    MatrixForm::from_entries(n, entries)
                };
                let g = to_matrix("gauge.g", &raw.g)?;
                let g_inv = to_matrix("gauge.g_inv", &raw.g_inv)?;
                Some(GaugeTransform::new(g, g_inv).map_err(|e| invalid("gauge", e.to_string()))?)
            }
        };

        Ok(Scenario {
            id: self.id.clone(),
            description: self.description.clone(),
            base_dim: m,
            rank: n,
            connections,
            polynomial,
            chains,
            reference: self.reference.clone(),
            alt_references: self.alt_references.clone(),
            cycles,
            gauge,
        })
    }
}

fn matrix_rows(entries: &[Scalar], n: usize) -> Vec<Vec<RawEntry>> {
    entries.chunks(n).map(|row| row.iter().map(scalar_entry).collect()).collect()
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario> {
        let raw: RawScenario = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        raw.validate()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Scenario> {
        Scenario::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_raw(&self) -> RawScenario {
        let n = self.rank;
        let connections = self
            .connections
            .iter()
            .map(|c| {
                let mut comps = BTreeMap::new();
                for a in 0..self.base_dim {
                    let entries: Vec<Scalar> = c.one_form().entries().iter().map(|e| e.coefficient(1 << a)).collect();
                    if entries.iter().any(|s| !s.is_zero()) {
                        comps.insert(direction_name(a), matrix_rows(&entries, n));
                    }
                }
                (c.id().to_string(), comps)
            })
            .collect();
        let chains = self
            .chains
            .iter()
            .map(|(name, chain)| {
                let terms = chain
                    .terms()
                    .map(|(s, k)| RawChainTerm {
                        coeff: k,
                        vertices: s.vertices().to_vec(),
                    })
                    .collect();
                (name.clone(), RawChain { dim: chain.dim(), terms })
            })
            .collect();
        let cycles = self
            .cycles
            .iter()
            .map(|(name, c)| {
                let offsets = c
                    .offsets()
                    .iter()
                    .filter(|(_, o)| !o.is_zero())
                    .map(|(&a, o)| (direction_name(a), format_rational(o)))
                    .collect();
                let raw = RawCycle {
                    directions: c.directions().iter().map(|&a| direction_name(a)).collect(),
                    offsets,
                    multiplicity: c.multiplicity(),
                };
                (name.clone(), raw)
            })
            .collect();
        let gauge = self.gauge.as_ref().map(|g| {
            let scalars = |m: &MatrixForm| -> Vec<Scalar> { m.entries().iter().map(|e| e.coefficient(0)).collect() };
            RawGauge {
                g: matrix_rows(&scalars(g.matrix()), n),
                g_inv: matrix_rows(&scalars(g.inverse()), n),
            }
        });
        RawScenario {
            id: self.id.clone(),
            description: self.description.clone(),
            base_dim: self.base_dim,
            rank: self.rank,
            connections,
            polynomial: self.polynomial.factors().to_vec(),
            chains,
            reference: self.reference.clone(),
            alt_references: self.alt_references.clone(),
            cycles,
            gauge,
        }
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_raw()).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_canonical_json())?;
        Ok(())
    }

    pub fn chain(&self, name: &str) -> Result<&Chain> {
        self.chains
            .get(name)
            .ok_or_else(|| invalid(format!("chains.{name}"), "no such chain"))
    }

    pub fn cycle(&self, name: &str) -> Result<&BaseCycle> {
        self.cycles
            .get(name)
            .ok_or_else(|| invalid(format!("cycles.{name}"), "no such cycle"))
    }

    pub fn connection(&self, id: &str) -> Result<&Connection> {
        self.connections.get(id)
    }

    pub fn reference_connection(&self) -> &Connection {
        self.connections.get(&self.reference).expect("validated reference")
    }

    /// The polynomial degree `p`.
    pub fn p(&self) -> usize {
        self.polynomial.degree()
    }

    /// Every connection conjugated by `g`, keeping ids.
    pub fn gauge_transformed(&self, g: &GaugeTransform) -> Result<Scenario> {
        let mut out = self.clone();
        out.connections = self.connections.try_map(|c| crate::chernweil::gauge_apply(c, g))?;
        Ok(out)
    }
}

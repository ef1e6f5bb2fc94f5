//! Commands over a loaded scenario and the JSON reports they produce.
//!
//! Every command returns a [`Report`]: a list of named checks, each `pass`,
//! `fail` or `info`, with exact values as strings and floats rendered with
//! twelve significant digits. Reports depend only on the inputs, so two runs
//! with the same scenario, options and seed are byte-identical.

use std::collections::BTreeMap;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::chernweil::{chern_weil, curvature, gauge_apply, is_flat, transgression, Connection, GaugeTransform};
use crate::complex::{affine_family, boundary, is_cycle, validate_chain, Chain, ConnectionSet};
use crate::error::{Error, Result};
use crate::fiber::{psi, psi_compare_reference, psi_curvature, stokes_check, FiberSpec};
use crate::forms::{Bidegree, Form, MatrixForm};
use crate::oracle::{
    load_goldens, psi_form_oracle, psi_pairing_oracle, GoldenRecord, QuadMethod, QuadratureSpec,
};
use crate::pairing::{closedness_check, pair, pair_total, BaseCycle, RZValue};
use crate::random::{random_constant_gauge, random_mixed_form, ScalarBounds};
use crate::scalar::{Dims, Direction};
use crate::scenario::{direction_name, Scenario};

/// Short identifiers of the statements a check exercises.
pub mod anchors {
    pub const STOKES: &str = "stokes-fiber-integration";
    pub const BIDEGREE: &str = "bidegree-vanishing";
    pub const P_GREATER_THAN_R: &str = "p-greater-than-r-vanishing";
    pub const CURVATURE: &str = "curvature-vanishing";
    pub const CLOSEDNESS: &str = "psi-closedness";
    pub const BOUNDARY: &str = "boundary-vanishing";
    pub const P_LESS_THAN_R: &str = "p-less-than-r-triviality";
    pub const REFERENCE: &str = "reference-independence";
    pub const GAUGE: &str = "gauge-invariance";
    pub const FUBINI: &str = "fubini-pairing";
    pub const HOMOTOPY: &str = "homotopy-formula";
    pub const RELATIVE_FLATNESS: &str = "relative-flatness";
    pub const CYCLE: &str = "cycle-condition";
    pub const FLATNESS: &str = "flatness";
    pub const ORACLE: &str = "numeric-oracle";
    pub const VALUE: &str = "value";
}

/// Absolute slack added to Monte-Carlo acceptance bounds; guards values that
/// vanish identically, whose standard error is pure rounding noise.
pub const MC_ABSOLUTE_FLOOR: f64 = 1e-12;

/// Pointwise oracle tolerance for ψ form coefficients.
pub const POINTWISE_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub float_value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<String>,
    pub anchor: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

pub fn fmt_float(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.11e}")
}

impl Check {
    pub fn new(name: impl Into<String>, pass: bool, anchor: &str) -> Self {
        Check {
            name: name.into(),
            status: if pass { Status::Pass } else { Status::Fail },
            exact_value: None,
            float_value: None,
            tolerance: None,
            anchor: anchor.to_string(),
            detail: None,
        }
    }

    pub fn info(name: impl Into<String>, anchor: &str) -> Self {
        Check {
            status: Status::Info,
            ..Check::new(name, true, anchor)
        }
    }

    pub fn exact(mut self, v: impl ToString) -> Self {
        self.exact_value = Some(v.to_string());
        self
    }

    pub fn float(mut self, v: f64) -> Self {
        self.float_value = Some(fmt_float(v));
        self
    }

    pub fn tolerance(mut self, v: f64) -> Self {
        self.tolerance = Some(fmt_float(v));
        self
    }

    pub fn detail(mut self, d: impl Into<String>) -> Self {
        self.detail = Some(d.into());
        self
    }

    pub fn passed(&self) -> bool {
        self.status != Status::Fail
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub command: String,
    pub scenario: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chain: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub checks: Vec<Check>,
    pub all_passed: bool,
}

impl Report {
    fn new(command: &str, scenario: &Scenario) -> Self {
        Report {
            command: command.to_string(),
            scenario: scenario.id.clone(),
            chain: None,
            reference: None,
            warnings: Vec::new(),
            checks: Vec::new(),
            all_passed: true,
        }
    }

    fn push(&mut self, c: Check) {
        self.all_passed &= c.passed();
        self.checks.push(c);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn exit_code(&self) -> i32 {
        if self.all_passed {
            0
        } else {
            1
        }
    }
}

/// Options shared by all commands.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    pub chain: Option<String>,
    pub cycle: Option<String>,
    pub reference: Option<String>,
    pub allow_noninvariant: bool,
    pub oracle: bool,
    pub seed: u64,
    pub samples: Option<u64>,
    pub golden: Option<PathBuf>,
    pub to: Option<String>,
    pub random_instances: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Psi,
    Pair,
    Properties,
    Transgression,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Psi => "psi",
            Command::Pair => "pair",
            Command::Properties => "properties",
            Command::Transgression => "transgression",
        }
    }
}

pub fn run(command: Command, scenario: &Scenario, opts: &RunOptions) -> Result<Report> {
    match command {
        Command::Validate => cmd_validate(scenario, opts),
        Command::Psi => cmd_psi(scenario, opts),
        Command::Pair => cmd_pair(scenario, opts),
        Command::Properties => cmd_properties(scenario, opts),
        Command::Transgression => cmd_transgression(scenario, opts),
    }
}

fn reference<'a>(scenario: &'a Scenario, opts: &RunOptions) -> Result<&'a Connection> {
    match &opts.reference {
        Some(id) => scenario
            .connection(id)
            .map_err(|_| Error::validation("--reference", format!("unknown connection id `{id}`"))),
        None => Ok(scenario.reference_connection()),
    }
}

/// The requested chain, or the first cycle among the scenario's chains.
fn select_chain<'a>(scenario: &'a Scenario, opts: &RunOptions) -> Result<(&'a str, &'a Chain)> {
    if let Some(name) = &opts.chain {
        let (k, c) = scenario
            .chains
            .get_key_value(name)
            .ok_or_else(|| Error::validation("--chain", format!("no chain named `{name}`")))?;
        return Ok((k.as_str(), c));
    }
    scenario
        .chains
        .iter()
        .find(|(_, c)| is_cycle(c))
        .map(|(k, c)| (k.as_str(), c))
        .ok_or_else(|| Error::validation("chains", "no cycle among the chains; pass --chain"))
}

fn invariance_gate(p: usize, r: usize, opts: &RunOptions) -> Result<()> {
    if (p == r || p == r + 1) && !opts.allow_noninvariant {
        return Err(Error::NonInvariant { p, r });
    }
    Ok(())
}

/// Named cycles whose dimension is `k`: the requested one, the scenario's, or
/// every coordinate subtorus when the scenario lists none of that dimension.
fn cycles_of_dim(scenario: &Scenario, opts: &RunOptions, k: usize) -> Result<Vec<(String, BaseCycle)>> {
    if let Some(name) = &opts.cycle {
        let c = scenario
            .cycles
            .get(name)
            .ok_or_else(|| Error::validation("--cycle", format!("no cycle named `{name}`")))?;
        if c.dim() != k {
            return Err(Error::validation(
                format!("cycles.{name}"),
                format!("cycle has dimension {} but the pairing needs {k}", c.dim()),
            ));
        }
        return Ok(vec![(name.clone(), c.clone())]);
    }
    let listed: Vec<_> = scenario
        .cycles
        .iter()
        .filter(|(_, c)| c.dim() == k)
        .map(|(n, c)| (n.clone(), c.clone()))
        .collect();
    if !listed.is_empty() || k > scenario.base_dim {
        return Ok(listed);
    }
    Ok(all_subtori(scenario.base_dim, k))
}

fn all_subtori(base: usize, k: usize) -> Vec<(String, BaseCycle)> {
    BaseCycle::all_of_dim(base, k)
        .into_iter()
        .map(|c| {
            let name = c.directions().iter().map(|&a| direction_name(a)).collect::<Vec<_>>().join(",");
            (format!("T[{name}]"), c)
        })
        .collect()
}

fn rz_check(name: String, v: &RZValue, anchor: &str) -> Check {
    Check::info(name, anchor).exact(&v.exact).float(v.float)
}

pub fn cmd_validate(scenario: &Scenario, opts: &RunOptions) -> Result<Report> {
    let mut report = Report::new("validate", scenario);
    let mut used: Vec<&str> = vec![scenario.reference.as_str()];
    used.extend(scenario.alt_references.iter().map(String::as_str));
    for chain in scenario.chains.values() {
        used.extend(chain.vertex_ids().map(String::as_str));
    }
    used.sort_unstable();
    used.dedup();
    for id in used {
        let d = scenario.connection(id)?;
        report.push(Check::new(format!("flat:{id}"), is_flat(d), anchors::FLATNESS));
    }
    for (name, chain) in &scenario.chains {
        let cr = validate_chain(chain, &scenario.connections);
        let cyc = Check::new(format!("cycle:{name}"), true, anchors::CYCLE);
        report.push(if cr.is_cycle {
            cyc
        } else {
            Check {
                status: Status::Info,
                ..cyc.detail("not a cycle; its boundary is")
            }
            .exact(boundary_string(chain))
        });
        for s in &cr.simplices {
            let mut c = Check::new(
                format!("relatively_flat:{name}:{}", s.simplex),
                s.relatively_flat,
                anchors::RELATIVE_FLATNESS,
            );
            if let Some(e) = &s.error {
                c = c.detail(e.clone());
            }
            report.push(c);
        }
    }
    let d0 = reference(scenario, opts)?;
    for (name, chain) in &scenario.chains {
        let r = chain.dim();
        let p = scenario.p();
        let k = (2 * p).checked_sub(r + 1);
        let detail = match k {
            Some(k) if k <= scenario.base_dim => format!("psi has degree {k}"),
            Some(k) => format!("psi has degree {k} > base dimension"),
            None => "psi vanishes for degree reasons".to_string(),
        };
        report.push(Check::info(format!("degree:{name}"), anchors::VALUE).exact(format!("p={p}, r={r}")).detail(detail));
    }
    if let Some(g) = &scenario.gauge {
        let ok = scenario
            .connections
            .iter()
            .filter(|d| is_flat(d))
            .all(|d| gauge_apply(d, g).map(|e| is_flat(&e)).unwrap_or(false));
        report.push(Check::new("gauge_preserves_flatness", ok, anchors::GAUGE));
    }
    report.reference = Some(d0.id().to_string());
    Ok(report)
}

fn boundary_string(chain: &Chain) -> String {
    match boundary(chain) {
        Ok(b) => b
            .terms()
            .map(|(s, k)| format!("{k:+}{s}"))
            .collect::<Vec<_>>()
            .join(" "),
        Err(e) => e.to_string(),
    }
}

fn uniform_point(seed: u64, m: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| rng.gen::<f64>()).collect()
}

fn increasing_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    BaseCycle::all_of_dim(m, k).into_iter().map(|c| c.directions().to_vec()).collect()
}

pub fn cmd_psi(scenario: &Scenario, opts: &RunOptions) -> Result<Report> {
    let mut report = Report::new("psi", scenario);
    let (name, chain) = select_chain(scenario, opts)?;
    let d0 = reference(scenario, opts)?;
    let p = &scenario.polynomial;
    let r = chain.dim();
    invariance_gate(p.degree(), r, opts)?;
    let res = psi(chain, d0, p, &scenario.connections)?;
    report.chain = Some(name.to_string());
    report.reference = Some(d0.id().to_string());
    report.warnings = res.warnings.clone();
    report.push(
        Check::info("psi_form", anchors::VALUE)
            .exact(&res.form)
            .detail(format!("degree {}, sign {}", res.degree, res.sign_applied)),
    );
    if p.degree() != r {
        report.push(Check::new("closedness", closedness_check(&res.form), anchors::CLOSEDNESS));
    }
    if p.degree() < r {
        report.push(Check::new("p_less_than_r_zero", res.form.is_zero(), anchors::P_LESS_THAN_R).exact(&res.form));
    }
    if opts.oracle && 2 * p.degree() > r {
        let k = 2 * p.degree() - r - 1;
        let x = uniform_point(opts.seed, scenario.base_dim);
        let spec = QuadratureSpec {
            method: QuadMethod::TensorGrid { points: 10 },
            tolerance: POINTWISE_TOLERANCE,
        };
        let pt = x.iter().map(|v| fmt_float(*v)).collect::<Vec<_>>().join(",");
        for dirs in increasing_tuples(scenario.base_dim, k) {
            let mask = dirs.iter().fold(0u32, |m, &a| m | 1 << a);
            let exact = res.form.coefficient(mask).eval(&x, &[]);
            let num = psi_form_oracle(chain, d0, p, &scenario.connections, &dirs, &x, &spec)?;
            let label = dirs.iter().map(|&a| direction_name(a)).collect::<Vec<_>>().join(",");
            let diff = (exact - num.value).abs();
            report.push(
                Check::new(format!("oracle:coefficient[{label}]"), diff <= POINTWISE_TOLERANCE, anchors::ORACLE)
                    .float(num.value)
                    .exact(fmt_float(exact))
                    .tolerance(POINTWISE_TOLERANCE)
                    .detail(format!("at x=({pt}), quadrature error {}", fmt_float(num.error))),
            );
        }
    }
    Ok(report)
}

/// Golden quantity id for a pairing.
pub fn pairing_quantity(chain: &str, reference: &str, cycle: &str) -> String {
    format!("pair|{chain}|{reference}|{cycle}")
}

pub fn cmd_pair(scenario: &Scenario, opts: &RunOptions) -> Result<Report> {
    let mut report = Report::new("pair", scenario);
    let (name, chain) = select_chain(scenario, opts)?;
    let d0 = reference(scenario, opts)?;
    let p = &scenario.polynomial;
    let r = chain.dim();
    invariance_gate(p.degree(), r, opts)?;
    let k = (2 * p.degree())
        .checked_sub(r + 1)
        .ok_or_else(|| Error::Degree(format!("2p − r − 1 < 0 for p = {}, r = {r}", p.degree())))?;
    let res = psi(chain, d0, p, &scenario.connections)?;
    report.chain = Some(name.to_string());
    report.reference = Some(d0.id().to_string());
    report.warnings = res.warnings.clone();
    let mut goldens: BTreeMap<String, Vec<GoldenRecord>> = BTreeMap::new();
    if let Some(path) = &opts.golden {
        for g in load_goldens(path)?.into_iter().filter(|g| g.scenario == scenario.id) {
            goldens.entry(g.quantity.clone()).or_default().push(g);
        }
    }
    for (cname, cycle) in cycles_of_dim(scenario, opts, k)? {
        let v = pair(&res.form, &cycle)?;
        report.push(rz_check(format!("pair:{cname}"), &v, anchors::VALUE).detail(cycle.to_string()));
        let total = pair_total(chain, d0, p, &scenario.connections, &cycle)?;
        report.push(Check::new(format!("fubini:{cname}"), total.exact == v.exact, anchors::FUBINI).exact(&total.exact));
        let quantity = pairing_quantity(name, d0.id(), &cname);
        if let Some(records) = goldens.get(&quantity) {
            for g in records {
                report.push(golden_check(format!("golden:{cname}:{}", g.method), g, v.float));
            }
        } else if opts.golden.is_some() {
            report.push(Check::info(format!("golden:{cname}"), anchors::ORACLE).detail("no stored record"));
        }
        if opts.oracle {
            let spec = QuadratureSpec {
                method: QuadMethod::MonteCarlo {
                    samples: opts.samples.unwrap_or(20_000),
                    seed: opts.seed,
                },
                tolerance: 3.0,
            };
            let num = psi_pairing_oracle(chain, d0, p, &scenario.connections, &cycle, &spec)?;
            let bound = 3.0 * num.error + MC_ABSOLUTE_FLOOR;
            report.push(
                Check::new(format!("oracle:{cname}"), (num.value - v.float).abs() <= bound, anchors::ORACLE)
                    .float(num.value)
                    .tolerance(bound)
                    .detail(format!("monte carlo, standard error {}", fmt_float(num.error))),
            );
        }
    }
    Ok(report)
}

pub fn golden_check(name: String, g: &GoldenRecord, exact: f64) -> Check {
    let bound = if g.method.starts_with("monte_carlo") {
        g.tolerance * g.error + MC_ABSOLUTE_FLOOR
    } else {
        g.tolerance
    };
    Check::new(name, (exact - g.value).abs() <= bound, anchors::ORACLE)
        .float(g.value)
        .exact(fmt_float(exact))
        .tolerance(bound)
        .detail(g.method.clone())
}

fn expected_family_curvature(vertices: &[&Connection]) -> Result<MatrixForm> {
    let r = vertices.len() - 1;
    let dims = Dims::new(vertices[0].base_dim(), r);
    let d0 = vertices[0].one_form().embed_params(r)?;
    let mut acc = MatrixForm::zero(vertices[0].rank(), dims);
    for (j, d) in vertices[1..].iter().enumerate() {
        let diff = d.one_form().embed_params(r)?.try_sub(&d0)?;
        let dt = Form::d_coord(dims, Direction::Param(j))?;
        acc = acc.try_add(&diff.left_wedge_form(&dt))?;
    }
    Ok(acc)
}

pub fn cmd_properties(scenario: &Scenario, opts: &RunOptions) -> Result<Report> {
    let mut report = Report::new("properties", scenario);
    let d0 = reference(scenario, opts)?;
    report.reference = Some(d0.id().to_string());
    let p = &scenario.polynomial;
    let set = &scenario.connections;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let instances = opts.random_instances.unwrap_or(20);

    // Stokes on random forms over each fiber kind.
    for (label, fiber) in [
        ("simplex1", FiberSpec::Simplex(1)),
        ("simplex2", FiberSpec::Simplex(2)),
        ("simplex1_interval", FiberSpec::SimplexInterval(1)),
    ] {
        let dims = Dims::new(scenario.base_dim.min(3), fiber.dim());
        let mut ok = true;
        for _ in 0..instances {
            let omega = random_mixed_form(&mut rng, dims, 3, ScalarBounds::default());
            ok &= stokes_check(&omega, &fiber)?.is_zero();
        }
        report.push(Check::new(format!("stokes:{label}"), ok, anchors::STOKES).detail(format!("{instances} random forms")));
    }

    // Family curvature on every simplex of every chain.
    for (name, chain) in &scenario.chains {
        for (s, _) in chain.terms() {
            let vertices = set.vertices(s)?;
            let r = s.dim();
            let family = affine_family(&vertices)?;
            let omega = curvature(&family)?;
            let pure = omega.bidegree_component(Bidegree::new(2, 0)).is_zero()
                && omega.bidegree_component(Bidegree::new(0, 2)).is_zero();
            let formula = omega == expected_family_curvature(&vertices)?;
            report.push(Check::new(format!("bidegree:{name}:{s}"), pure && formula, anchors::BIDEGREE));
            if p.degree() > r {
                let cw = chern_weil(p, &omega)?;
                report.push(Check::new(format!("integrand_vanishes:{name}:{s}"), cw.is_zero(), anchors::P_GREATER_THAN_R));
            }
        }
    }

    for (name, chain) in &scenario.chains {
        let r = chain.dim();
        let deg = p.degree();
        if !is_cycle(chain) {
            if deg != r {
                let bd = boundary(chain)?;
                let v = psi(&bd, d0, p, set)?;
                report.push(Check::new(format!("boundary_vanishing:{name}"), v.form.is_zero(), anchors::BOUNDARY).exact(&v.form));
            }
            continue;
        }
        if deg == r || deg == r + 1 {
            if !opts.allow_noninvariant {
                report.push(
                    Check::info(format!("skipped:{name}"), anchors::VALUE)
                        .detail(format!("p = {deg}, r = {r} gives no invariant; pass --allow-noninvariant")),
                );
                continue;
            }
        }
        if deg != r {
            let curv = psi_curvature(chain, p, set)?;
            report.push(Check::new(format!("curvature_vanishes:{name}"), curv.is_zero(), anchors::CURVATURE));
        }
        let base = psi(chain, d0, p, set)?;
        if deg != r {
            report.push(Check::new(format!("closedness:{name}"), closedness_check(&base.form), anchors::CLOSEDNESS));
        }
        if deg < r {
            report.push(Check::new(format!("p_less_than_r_zero:{name}"), base.form.is_zero(), anchors::P_LESS_THAN_R));
        }

        let g = random_constant_gauge(&mut rng, scenario.rank, scenario.base_dim);
        report.push(gauge_check(format!("gauge_invariance:{name}:random_constant"), chain, d0, p, set, &g, &base.form)?);
        if let Some(sg) = &scenario.gauge {
            report.push(gauge_check(format!("gauge_invariance:{name}:scenario"), chain, d0, p, set, sg, &base.form)?);
        }

        let Some(k) = (2 * deg).checked_sub(r + 1) else { continue };
        if k > scenario.base_dim {
            continue;
        }
        let mut cycles = all_subtori(scenario.base_dim, k);
        cycles.extend(scenario.cycles.iter().filter(|(_, c)| c.dim() == k).map(|(n, c)| (n.clone(), c.clone())));
        let zs: Vec<BaseCycle> = cycles.iter().map(|(_, c)| c.clone()).collect();
        for alt in &scenario.alt_references {
            if alt == d0.id() {
                continue;
            }
            let d1 = scenario.connection(alt)?;
            let diffs = psi_compare_reference(chain, d0, d1, p, set, &zs)?;
            let bad: Vec<String> = cycles
                .iter()
                .zip(&diffs)
                .filter(|(_, v)| !v.is_integer())
                .map(|((n, _), v)| format!("{n}: {}", v.exact))
                .collect();
            let mut c = Check::new(format!("reference_independence:{name}:{}:{alt}", d0.id()), bad.is_empty(), anchors::REFERENCE)
                .detail(format!("{} cycles", zs.len()));
            if !bad.is_empty() {
                c = c.exact(bad.join("; "));
            }
            report.push(c);
        }
        let mut fubini = true;
        for z in &zs {
            fubini &= pair_total(chain, d0, p, set, z)?.exact == pair(&base.form, z)?.exact;
        }
        report.push(Check::new(format!("fubini:{name}"), fubini, anchors::FUBINI).detail(format!("{} cycles", zs.len())));
    }
    Ok(report)
}

fn gauge_check(
    name: String,
    chain: &Chain,
    d0: &Connection,
    p: &crate::chernweil::InvariantPolynomial,
    set: &ConnectionSet,
    g: &GaugeTransform,
    expected: &Form,
) -> Result<Check> {
    let moved = set.try_map(|d| gauge_apply(d, g))?;
    let d0g = gauge_apply(d0, g)?;
    let flat_kept = set.iter().filter(|d| is_flat(d)).all(|d| moved.get(d.id()).map(is_flat).unwrap_or(false));
    let v = psi(chain, &d0g, p, &moved)?;
    let same = &v.form == expected;
    Ok(Check::new(name, same && flat_kept, anchors::GAUGE).detail(if g.is_constant() {
        "constant gauge"
    } else {
        "non-constant gauge"
    }))
}

pub fn cmd_transgression(scenario: &Scenario, opts: &RunOptions) -> Result<Report> {
    let mut report = Report::new("transgression", scenario);
    let d0 = reference(scenario, opts)?;
    let d1 = match &opts.to {
        Some(id) => scenario
            .connection(id)
            .map_err(|_| Error::validation("--to", format!("unknown connection id `{id}`")))?,
        None => {
            let (_, chain) = select_chain(scenario, opts)?;
            let first = chain.vertex_ids().next().ok_or_else(|| Error::validation("chains", "empty chain"))?;
            scenario.connection(first)?
        }
    };
    report.reference = Some(d0.id().to_string());
    let p = &scenario.polynomial;
    let t = transgression(p, d0, d1)?;
    report.push(Check::info(format!("transgression:{}:{}", d0.id(), d1.id()), anchors::VALUE).exact(&t));
    let lhs = t.d();
    let rhs = chern_weil(p, &curvature(d1.one_form())?)?.try_sub(&chern_weil(p, &curvature(d0.one_form())?)?)?;
    report.push(Check::new("homotopy_formula", lhs == rhs, anchors::HOMOTOPY));
    Ok(report)
}

/// Maps a command outcome to the process exit status.
pub fn exit_status(outcome: &Result<Report>) -> i32 {
    match outcome {
        Ok(r) => r.exit_code(),
        Err(e) => e.exit_code(),
    }
}

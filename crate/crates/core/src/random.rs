//! Random scalars, forms, connections and flat families for property tests
//! and the `properties` command. Everything is driven by a caller-supplied
//! RNG so a seed reproduces the same instances.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chernweil::{Connection, GaugeTransform};
use crate::complex::{Chain, ConnectionSet, Simplex};
use crate::error::Result;
use crate::forms::{Form, Mask, MatrixForm};
use crate::scalar::{int, rat, Dims, Direction, Phase, Rational, Scalar, ScalarKey, TrigMonomial};

/// Bounds for random scalars.
#[derive(Clone, Copy, Debug)]
pub struct ScalarBounds {
    pub max_freq: i64,
    pub max_param_degree: u32,
    pub max_terms: usize,
}

impl Default for ScalarBounds {
    fn default() -> Self {
        ScalarBounds {
            max_freq: 2,
            max_param_degree: 3,
            max_terms: 3,
        }
    }
}

pub fn random_rational<R: Rng>(rng: &mut R) -> Rational {
    let den = *[1, 1, 2, 3, 4].choose(rng).unwrap();
    let mut num = rng.gen_range(-4..=4);
    if num == 0 {
        num = 1;
    }
    rat(num, den)
}

fn random_powers<R: Rng>(rng: &mut R, params: usize, max_degree: u32) -> Vec<u32> {
    let mut powers = vec![0; params];
    if params == 0 {
        return powers;
    }
    let total = rng.gen_range(0..=max_degree);
    for _ in 0..total {
        powers[rng.gen_range(0..params)] += 1;
    }
    powers
}

fn random_freq<R: Rng>(rng: &mut R, base: usize, max_freq: i64) -> Vec<i64> {
    let mut freq = vec![0; base];
    if base == 0 || max_freq == 0 || rng.gen_bool(0.4) {
        return freq;
    }
    for _ in 0..rng.gen_range(1..=2) {
        freq[rng.gen_range(0..base)] = rng.gen_range(-max_freq..=max_freq);
    }
    freq
}

pub fn random_scalar<R: Rng>(rng: &mut R, dims: Dims, bounds: ScalarBounds) -> Scalar {
    let n = rng.gen_range(1..=bounds.max_terms.max(1));
    let terms: Vec<(ScalarKey, Rational)> = (0..n)
        .filter_map(|_| {
            let phase = if rng.gen_bool(0.5) { Phase::Cos } else { Phase::Sin };
            let (sign, trig) = TrigMonomial::new(random_freq(rng, dims.base, bounds.max_freq), phase)?;
            let key = ScalarKey {
                trig,
                powers: random_powers(rng, dims.params, bounds.max_param_degree),
                tau: u32::from(rng.gen_bool(0.15)),
            };
            Some((key, random_rational(rng) * int(sign)))
        })
        .collect();
    Scalar::from_terms(dims, terms).expect("consistent dimensions")
}

fn random_mask<R: Rng>(rng: &mut R, slots: usize, degree: usize) -> Mask {
    let mut all: Vec<usize> = (0..slots).collect();
    all.shuffle(rng);
    all[..degree].iter().fold(0, |m, &s| m | 1 << s)
}

/// A form of the given degree with up to `terms` monomials.
pub fn random_form<R: Rng>(rng: &mut R, dims: Dims, degree: usize, terms: usize, bounds: ScalarBounds) -> Form {
    let slots = dims.base + dims.params;
    if degree > slots {
        return Form::zero(dims);
    }
    let n = rng.gen_range(1..=terms.max(1));
    let pieces = (0..n).map(|_| (random_mask(rng, slots, degree), random_scalar(rng, dims, bounds)));
    Form::from_terms(dims, pieces).expect("consistent dimensions")
}

/// A form mixing degrees `0..=max_degree`.
pub fn random_mixed_form<R: Rng>(rng: &mut R, dims: Dims, max_degree: usize, bounds: ScalarBounds) -> Form {
    let slots = dims.base + dims.params;
    let mut acc = Form::zero(dims);
    for k in 0..=max_degree.min(slots) {
        if rng.gen_bool(0.6) {
            acc = acc + random_form(rng, dims, k, 2, bounds);
        }
    }
    acc
}

/// A matrix of base 1-forms with trigonometric coefficients.
pub fn random_connection<R: Rng>(rng: &mut R, id: &str, rank: usize, base: usize) -> Connection {
    let dims = Dims::new(base, 0);
    let bounds = ScalarBounds {
        max_freq: 2,
        max_param_degree: 0,
        max_terms: 2,
    };
    let entries = (0..rank * rank)
        .map(|_| {
            if rng.gen_bool(0.3) {
                Form::zero(dims)
            } else {
                random_form(rng, dims, 1, 2, bounds)
            }
        })
        .collect();
    Connection::new(id, MatrixForm::from_entries(rank, entries).expect("square")).expect("base 1-form")
}

/// `Σ c_a dx_a + Σ f_a(x_a) dx_a`, closed since each `f_a` depends on `x_a` only.
/// With `trig == false` only the constant part is drawn.
pub fn closed_one_form<R: Rng>(rng: &mut R, base: usize, trig: bool) -> Form {
    let dims = Dims::new(base, 0);
    let mut acc = Form::zero(dims);
    for a in 0..base {
        let dx = Form::d_coord(dims, Direction::Base(a)).expect("in range");
        if rng.gen_bool(0.7) {
            acc = acc + dx.scale(&random_rational(rng));
        }
        if trig && rng.gen_bool(0.4) {
            let mut freq = vec![0; base];
            freq[a] = rng.gen_range(1..=2);
            let phase = if rng.gen_bool(0.5) { Phase::Cos } else { Phase::Sin };
            let f = Scalar::trig(dims, freq, phase, random_rational(rng), 0).expect("in range");
            acc = acc + Form::scalar(f).wedge(&dx);
        }
    }
    acc
}

/// A unimodular rational matrix, a product of elementary shears.
pub fn random_unimodular<R: Rng>(rng: &mut R, rank: usize) -> Vec<Vec<Rational>> {
    let mut m: Vec<Vec<Rational>> = (0..rank)
        .map(|i| (0..rank).map(|j| int(i64::from(i == j))).collect())
        .collect();
    if rank < 2 {
        return m;
    }
    for _ in 0..rank + 1 {
        let i = rng.gen_range(0..rank);
        let mut j = rng.gen_range(0..rank);
        while j == i {
            j = rng.gen_range(0..rank);
        }
        let c = random_rational(rng);
        for k in 0..rank {
            let add = &m[j][k] * &c;
            m[i][k] += add;
        }
    }
    m
}

pub fn random_constant_gauge<R: Rng>(rng: &mut R, rank: usize, base: usize) -> GaugeTransform {
    GaugeTransform::constant(base, &random_unimodular(rng, rank)).expect("unimodular")
}

/// `P · diag(ω_1, .., ω_n) · P⁻¹` with closed `ω_i`. Connections sharing the
/// same `P` span a relatively flat family.
pub fn conjugated_diagonal(id: &str, diag: &[Form], p: &GaugeTransform) -> Result<Connection> {
    let n = diag.len();
    let dims = diag[0].dims();
    let mut m = MatrixForm::zero(n, dims);
    for (i, w) in diag.iter().enumerate() {
        m.set(i, i, w.clone())?;
    }
    let d = Connection::new(id, m)?;
    crate::chernweil::gauge_apply(&d, p)
}

/// Vertex connections `D^0..D^count-1` commuting through a shared random
/// conjugation, so every simplex on them is relatively flat.
pub struct CommutingFamily {
    pub conjugation: GaugeTransform,
    pub vertices: Vec<Connection>,
}

pub fn commuting_family<R: Rng>(rng: &mut R, rank: usize, base: usize, count: usize, trig: bool) -> CommutingFamily {
    let conjugation = random_constant_gauge(rng, rank, base);
    let vertices = (0..count)
        .map(|i| {
            let diag: Vec<Form> = (0..rank).map(|_| closed_one_form(rng, base, trig)).collect();
            conjugated_diagonal(&format!("D{i}"), &diag, &conjugation).expect("flat by construction")
        })
        .collect();
    CommutingFamily { conjugation, vertices }
}

/// A flat connection that generally does not commute with a given family:
/// a nilpotent `E_{ij} ω` conjugated by a fresh unimodular matrix.
pub fn flat_reference<R: Rng>(rng: &mut R, id: &str, rank: usize, base: usize, trig: bool) -> Connection {
    let dims = Dims::new(base, 0);
    let mut m = MatrixForm::zero(rank, dims);
    let w = closed_one_form(rng, base, trig);
    if rank >= 2 {
        m.set(0, 1, w).expect("in range");
    } else {
        m.set(0, 0, w).expect("in range");
    }
    let g = random_constant_gauge(rng, rank, base);
    crate::chernweil::gauge_apply(&Connection::new(id, m).expect("base 1-form"), &g).expect("same rank")
}

/// A relatively flat cycle with the connections it uses and a flat reference.
pub struct RandomCycle {
    pub set: ConnectionSet,
    pub chain: Chain,
    pub reference: Connection,
}

/// The boundary of the `(r+1)`-simplex on `D0..D(r+1)`.
pub fn boundary_cycle<R: Rng>(rng: &mut R, rank: usize, base: usize, r: usize, trig: bool) -> RandomCycle {
    let fam = commuting_family(rng, rank, base, r + 2, trig);
    let mut set = ConnectionSet::new();
    for v in &fam.vertices {
        set.insert(v.clone()).expect("fresh ids");
    }
    let ids: Vec<String> = fam.vertices.iter().map(|v| v.id().to_string()).collect();
    let k = Chain::simplex(Simplex::new(ids).expect("non-empty"));
    let chain = crate::complex::boundary(&k).expect("positive dimension");
    let reference = flat_reference(rng, "R", rank, base, trig);
    set.insert(reference.clone()).expect("fresh id");
    RandomCycle { set, chain, reference }
}

/// The boundary of the `(r+1)`-simplex, returned together with that simplex.
pub fn bounding_pair<R: Rng>(rng: &mut R, rank: usize, base: usize, r: usize, trig: bool) -> (RandomCycle, Chain) {
    let cyc = boundary_cycle(rng, rank, base, r, trig);
    let mut ids: Vec<String> = cyc.set.ids().filter(|id| id.as_str() != "R").cloned().collect();
    ids.sort();
    let k = Chain::simplex(Simplex::new(ids).expect("non-empty"));
    (cyc, k)
}

/// A random `r`-cycle with a flat reference, twisted when `r = 0` and `trig`.
/// For `r = 0` it is `[A] − [B]`; for `r = 1` a square `A → B → C → D → A`
/// where `B`, `D` are scalar and `A`, `C` are diagonal in two unrelated
/// frames. The square bounds `[A,B,D] + [B,C,D]`. Other `r` give the
/// boundary of a simplex.
pub fn random_cycle<R: Rng>(rng: &mut R, rank: usize, base: usize, r: usize, trig: bool) -> RandomCycle {
    let mut set = ConnectionSet::new();
    let reference = if trig && r == 0 {
        twisted_flat(rng, "R", rank, base)
    } else {
        flat_reference(rng, "R", rank, base, false)
    };
    set.insert(reference.clone()).expect("fresh id");
    let chain = match r {
        0 => {
            for id in ["A", "B"] {
                let d = random_flat(rng, id, rank, base, trig);
                set.insert(d).expect("fresh ids");
            }
            Chain::from_terms(
                0,
                [(1, Simplex::new(["A"]).unwrap()), (-1, Simplex::new(["B"]).unwrap())],
            )
            .expect("0-chain")
        }
        1 => {
            let p = random_constant_gauge(rng, rank, base);
            let q = random_constant_gauge(rng, rank, base);
            for (id, g) in [("A", &p), ("C", &q)] {
                let diag: Vec<Form> = (0..rank).map(|_| closed_one_form(rng, base, trig)).collect();
                set.insert(conjugated_diagonal(id, &diag, g).expect("flat")).expect("fresh ids");
            }
            for id in ["B", "D"] {
                let w = closed_one_form(rng, base, trig);
                let diag = vec![w; rank];
                set.insert(conjugated_diagonal(id, &diag, &p).expect("flat")).expect("fresh ids");
            }
            let edge = |a: &str, b: &str| (1, Simplex::new([a, b]).unwrap());
            Chain::from_terms(1, [edge("A", "B"), edge("B", "C"), edge("C", "D"), edge("D", "A")]).expect("1-chain")
        }
        _ => return boundary_cycle(rng, rank, base, r, trig),
    };
    RandomCycle { set, chain, reference }
}

/// A flat connection whose components do not lie in one abelian subalgebra:
/// diagonal closed forms moved by a rotation `g(x)` in the first two fiber
/// directions, `g⁻¹dg + g⁻¹ A g`.
pub fn twisted_flat<R: Rng>(rng: &mut R, id: &str, rank: usize, base: usize) -> Connection {
    let diag: Vec<Form> = (0..rank).map(|_| closed_one_form(rng, base, true)).collect();
    let d = conjugated_diagonal(id, &diag, &random_constant_gauge(rng, rank, base)).expect("flat");
    if rank < 2 {
        return d;
    }
    let mut freq = vec![0; base];
    freq[rng.gen_range(0..base)] = 1;
    let g = GaugeTransform::rotation(base, rank, (0, 1), freq).expect("valid plane");
    crate::chernweil::gauge_apply(&d, &g).expect("same rank")
}

/// A single flat connection: diagonal closed forms in a random frame.
pub fn random_flat<R: Rng>(rng: &mut R, id: &str, rank: usize, base: usize, trig: bool) -> Connection {
    let g = random_constant_gauge(rng, rank, base);
    let diag: Vec<Form> = (0..rank).map(|_| closed_one_form(rng, base, trig)).collect();
    conjugated_diagonal(id, &diag, &g).expect("flat by construction")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{is_cycle, validate_chain};
    use crate::chernweil::is_flat;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_forms_are_closed() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert!(closed_one_form(&mut rng, 4, true).d().is_zero());
        }
    }

    #[test]
    fn commuting_families_are_relatively_flat() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let cyc = boundary_cycle(&mut rng, 2, 3, 1, true);
            assert!(is_cycle(&cyc.chain));
            assert!(validate_chain(&cyc.chain, &cyc.set).all_relatively_flat());
            assert!(is_flat(&cyc.reference));
        }
    }

    #[test]
    fn random_cycles_are_cycles() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for r in 0..3 {
            let cyc = random_cycle(&mut rng, 2, 3, r, true);
            assert!(is_cycle(&cyc.chain));
            assert!(validate_chain(&cyc.chain, &cyc.set).all_relatively_flat());
        }
    }

    #[test]
    fn unimodular_inverts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            random_constant_gauge(&mut rng, 3, 2);
        }
    }

    #[test]
    fn forms_have_requested_degree() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let dims = Dims::new(3, 2);
        for k in 0..=3 {
            let f = random_form(&mut rng, dims, k, 3, ScalarBounds::default());
            assert!(f.is_zero() || f.degree() == Some(k));
        }
    }
}

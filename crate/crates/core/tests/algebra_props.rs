//! Randomized algebraic laws: coefficient ring, exterior calculus, curvature,
//! Chern–Weil forms and the simplicial complex of connections.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flatpsi::chernweil::{chern_weil, curvature, is_flat, transgression, Connection, InvariantPolynomial};
use flatpsi::complex::{affine_family, boundary, relative_flatness_check, Chain, Simplex};
use flatpsi::forms::{Form, MatrixForm};
use flatpsi::random::{
    commuting_family, random_connection, random_flat, random_form, random_scalar, ScalarBounds,
};
use flatpsi::scalar::{int, Dims, Direction};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn dims(r: &mut ChaCha8Rng) -> Dims {
    Dims::new(r.gen_range(1..=4), r.gen_range(0..=2))
}

fn directions(d: Dims) -> Vec<Direction> {
    (0..d.base)
        .map(Direction::Base)
        .chain((0..d.params).map(Direction::Param))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scalar_ring_axioms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = dims(&mut r);
        let b = ScalarBounds::default();
        let (x, y, z) = (random_scalar(&mut r, d, b), random_scalar(&mut r, d, b), random_scalar(&mut r, d, b));
        let xy_z = x.try_mul(&y).unwrap().try_mul(&z).unwrap();
        let x_yz = x.try_mul(&y.try_mul(&z).unwrap()).unwrap();
        prop_assert_eq!(xy_z, x_yz);
        let lhs = x.try_mul(&y.try_add(&z).unwrap()).unwrap();
        let rhs = x.try_mul(&y).unwrap().try_add(&x.try_mul(&z).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(x.try_mul(&y).unwrap(), y.try_mul(&x).unwrap());
    }

    #[test]
    fn partials_commute(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = dims(&mut r);
        let s = random_scalar(&mut r, d, ScalarBounds::default());
        let dirs = directions(d);
        for &u in &dirs {
            for &v in &dirs {
                let uv = s.partial(u).unwrap().partial(v).unwrap();
                let vu = s.partial(v).unwrap().partial(u).unwrap();
                prop_assert_eq!(uv, vu);
            }
        }
    }

    #[test]
    fn evaluation_is_multiplicative(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = dims(&mut r);
        let b = ScalarBounds::default();
        let (x, y) = (random_scalar(&mut r, d, b), random_scalar(&mut r, d, b));
        let xy = x.try_mul(&y).unwrap();
        for _ in 0..100 {
            let pt: Vec<f64> = (0..d.base).map(|_| r.gen()).collect();
            let params: Vec<f64> = (0..d.params).map(|_| r.gen::<f64>() / d.params as f64).collect();
            let (a, c) = (x.eval(&pt, &params), y.eval(&pt, &params));
            let scale = 1.0 + (a * c).abs();
            prop_assert!((xy.eval(&pt, &params) - a * c).abs() <= 1e-10 * scale);
        }
    }

    #[test]
    fn exterior_laws(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = dims(&mut r);
        let b = ScalarBounds::default();
        let ka = r.gen_range(0..=3usize.min(d.total()));
        let kb = r.gen_range(0..=3usize.min(d.total()));
        let x = random_form(&mut r, d, ka, 3, b);
        let y = random_form(&mut r, d, kb, 3, b);
        prop_assert!(x.d().d().is_zero());
        let sign = int(if ka % 2 == 0 { 1 } else { -1 });
        prop_assert_eq!(x.wedge(&y).d(), x.d().wedge(&y) + x.wedge(&y.d()).scale(&sign));
        let swap = int(if ka * kb % 2 == 0 { 1 } else { -1 });
        prop_assert_eq!(x.wedge(&y), y.wedge(&x).scale(&swap));
    }

    #[test]
    fn trace_is_cyclic_on_even_forms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let d = Dims::new(r.gen_range(2..=4), r.gen_range(0..=1));
        let n = r.gen_range(1..=3);
        let b = ScalarBounds { max_terms: 2, ..ScalarBounds::default() };
        let even = |r: &mut ChaCha8Rng| {
            let k = if r.gen_bool(0.5) { 0 } else { 2 };
            let entries = (0..n * n).map(|_| random_form(r, d, k, 2, b)).collect();
            MatrixForm::from_entries(n, entries).unwrap()
        };
        let (a, c) = (even(&mut r), even(&mut r));
        prop_assert_eq!(a.wedge(&c).unwrap().trace(), c.wedge(&a).unwrap().trace());
    }

    #[test]
    fn bianchi_identity(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let a = random_connection(&mut r, "A", n, 3);
        let omega = curvature(a.one_form()).unwrap();
        let rhs = omega.wedge(a.one_form()).unwrap().try_sub(&a.one_form().wedge(&omega).unwrap()).unwrap();
        prop_assert_eq!(omega.d(), rhs);
    }

    #[test]
    fn chern_weil_forms_are_closed(seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = r.gen_range(1..=3);
        let n = if p == 3 { r.gen_range(1..=2) } else { r.gen_range(1..=3) };
        let m = if p == 3 { 6 } else { 4 };
        let a = random_connection(&mut r, "A", n, m);
        let cw = chern_weil(&InvariantPolynomial::trace_power(p), &curvature(a.one_form()).unwrap()).unwrap();
        prop_assert!(cw.d().is_zero());
    }

    #[test]
    fn transgression_homotopy_formula(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let poly = if r.gen_bool(0.5) {
            InvariantPolynomial::trace_power(2)
        } else {
            InvariantPolynomial::new(vec![1, 1]).unwrap()
        };
        let a = random_connection(&mut r, "A", n, 4);
        let b = random_connection(&mut r, "B", n, 4);
        let t = transgression(&poly, &a, &b).unwrap();
        let rhs = chern_weil(&poly, &curvature(b.one_form()).unwrap()).unwrap()
            .try_sub(&chern_weil(&poly, &curvature(a.one_form()).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(t.d(), rhs);
    }

    #[test]
    fn boundary_squared_vanishes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let dim = r.gen_range(1..=4);
        let pool = ["A", "B", "C", "D", "E", "F"];
        let mut chain = Chain::zero(dim);
        for _ in 0..r.gen_range(1..=5) {
            let vs: Vec<&str> = (0..=dim).map(|_| pool[r.gen_range(0..pool.len())]).collect();
            chain.add_simplex(r.gen_range(-3..=3), Simplex::new(vs).unwrap()).unwrap();
        }
        let bd = boundary(&chain).unwrap();
        if dim >= 2 {
            prop_assert!(boundary(&bd).unwrap().is_zero());
        }
    }

    #[test]
    fn family_curvature_formula(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=3);
        let k = r.gen_range(1..=2);
        let fam = commuting_family(&mut r, n, 3, k + 1, true).vertices;
        let v: Vec<&Connection> = fam.iter().collect();
        let omega = curvature(&affine_family(&v).unwrap()).unwrap();
        let d = Dims::new(3, k);
        let d0 = v[0].one_form().embed_params(k).unwrap();
        let mut expected = MatrixForm::zero(n, d);
        for (j, dj) in v[1..].iter().enumerate() {
            let diff = dj.one_form().embed_params(k).unwrap().try_sub(&d0).unwrap();
            expected = expected.try_add(&diff.left_wedge_form(&Form::d_coord(d, Direction::Param(j)).unwrap())).unwrap();
        }
        prop_assert_eq!(omega, expected);
    }

    /// For flat vertices, the family curvature is
    /// `−Σ_{i<j} t_i t_j (D^i − D^j)∧(D^i − D^j)`, so relative flatness is
    /// pairwise.
    #[test]
    fn relative_flatness_is_pairwise(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.gen_range(1..=2);
        let count = r.gen_range(2..=3);
        let vertices: Vec<Connection> = if r.gen_bool(0.5) {
            commuting_family(&mut r, n, 3, count, true).vertices
        } else {
            (0..count)
                .map(|i| {
                    let trig = r.gen_bool(0.5);
                    random_flat(&mut r, &format!("V{i}"), n, 3, trig)
                })
                .collect()
        };
        let v: Vec<&Connection> = vertices.iter().collect();
        let mut pairwise = v.iter().all(|d| is_flat(d));
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                let diff = v[i].one_form().try_sub(v[j].one_form()).unwrap();
                pairwise &= diff.wedge(&diff).unwrap().is_zero();
            }
        }
        prop_assert_eq!(relative_flatness_check(&v).unwrap(), pairwise);
    }
}

//! Randomized properties of fiber integration, ψ and the pairing.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use flatpsi::chernweil::{gauge_apply, InvariantPolynomial};
use flatpsi::complex::{boundary, Chain, ConnectionSet, Simplex};
use flatpsi::fiber::{integrate_fiber, psi, psi_curvature, psi_form, stokes_check, FiberSpec};
use flatpsi::forms::Form;
use flatpsi::pairing::{pair, pair_total, BaseCycle};
use flatpsi::random::{
    commuting_family, flat_reference, random_constant_gauge, random_cycle, random_form, random_mixed_form,
    random_rational, ScalarBounds,
};
use flatpsi::scalar::{int, rat, Dims};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_offsets(r: &mut ChaCha8Rng, base: usize, dirs: &[usize]) -> std::collections::BTreeMap<usize, flatpsi::Rational> {
    (0..base)
        .filter(|j| !dirs.contains(j))
        .map(|j| (j, rat(r.gen_range(0..4), 4)))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn stokes_residual_vanishes(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fiber = match r.gen_range(0..4) {
            0 => FiberSpec::Interval,
            1 => FiberSpec::Simplex(1),
            2 => FiberSpec::Simplex(2),
            _ => FiberSpec::SimplexInterval(1),
        };
        let d = Dims::new(r.gen_range(1..=3), fiber.dim());
        let omega = random_mixed_form(&mut r, d, 3, ScalarBounds::default());
        prop_assert!(stokes_check(&omega, &fiber).unwrap().is_zero());
    }

    #[test]
    fn fubini_interval_then_simplex(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(1..=2);
        let d = Dims::new(r.gen_range(1..=3), k + 1);
        let degree = k + 1 + r.gen_range(0..=d.base);
        let omega = random_form(&mut r, d, degree, 4, ScalarBounds::default());
        let whole = integrate_fiber(&omega, &FiberSpec::SimplexInterval(k)).unwrap();
        let inner = integrate_fiber(&omega, &FiberSpec::Interval).unwrap();
        let outer = integrate_fiber(&inner, &FiberSpec::Simplex(k)).unwrap();
        prop_assert_eq!(whole, outer);
    }

    #[test]
    fn pairing_is_linear(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.gen_range(2..=4);
        let k = r.gen_range(1..=m);
        let d = Dims::new(m, 0);
        let b = ScalarBounds { max_param_degree: 0, ..ScalarBounds::default() };
        let (f, g) = (random_form(&mut r, d, k, 3, b), random_form(&mut r, d, k, 3, b));
        let dirs: Vec<usize> = BaseCycle::all_of_dim(m, k)[r.gen_range(0..BaseCycle::all_of_dim(m, k).len())].directions().to_vec();
        let z = BaseCycle::new(m, dirs.clone(), random_offsets(&mut r, m, &dirs), 1).unwrap();
        let (a, c) = (random_rational(&mut r), random_rational(&mut r));
        let combo = f.scale(&a) + g.scale(&c);
        let lhs = pair(&combo, &z).unwrap().exact;
        let rhs = pair(&f, &z).unwrap().exact.scale(&a).plus(&pair(&g, &z).unwrap().exact.scale(&c));
        prop_assert_eq!(lhs, rhs);
        let mult = r.gen_range(-3..=3i64);
        let scaled = pair(&f, &z.clone().with_multiplicity(mult)).unwrap().exact;
        prop_assert_eq!(scaled, pair(&f, &z).unwrap().exact.scale(&int(mult)));
    }

    #[test]
    fn exact_forms_pair_to_zero(seed in any::<u64>()) {
        let mut r = rng(seed);
        let m = r.gen_range(1..=4);
        let k = r.gen_range(1..=m);
        let b = ScalarBounds { max_param_degree: 0, ..ScalarBounds::default() };
        let eta = random_form(&mut r, Dims::new(m, 0), k - 1, 3, b);
        for z in BaseCycle::all_of_dim(m, k) {
            let dirs = z.directions().to_vec();
            let z = BaseCycle::new(m, dirs.clone(), random_offsets(&mut r, m, &dirs), 1).unwrap();
            prop_assert!(pair(&eta.d(), &z).unwrap().exact.is_zero());
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn psi_is_additive(seed in any::<u64>()) {
        let mut r = rng(seed);
        let fam = commuting_family(&mut r, 2, 3, 4, true);
        let mut set: ConnectionSet = fam.vertices.iter().cloned().collect();
        let d0 = flat_reference(&mut r, "R", 2, 3, true);
        set.insert(d0.clone()).unwrap();
        let tri = |a: &str, b: &str, c: &str| boundary(&Chain::simplex(Simplex::new([a, b, c]).unwrap())).unwrap();
        let s1 = tri("D0", "D1", "D2");
        let s2 = tri("D0", "D2", "D3");
        let p = InvariantPolynomial::trace_power(2);
        let sum = psi_form(&s1.plus(&s2).unwrap(), &d0, &p, &set).unwrap();
        let parts = psi_form(&s1, &d0, &p, &set).unwrap() + psi_form(&s2, &d0, &p, &set).unwrap();
        prop_assert_eq!(sum, parts);
    }

    #[test]
    fn psi_curvature_vanishes_off_p_equals_r(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(0..=1);
        let cyc = random_cycle(&mut r, 2, 3, k, true);
        for p in 1..=3 {
            if p == k {
                continue;
            }
            let curv = psi_curvature(&cyc.chain, &InvariantPolynomial::trace_power(p), &cyc.set).unwrap();
            prop_assert!(curv.is_zero());
        }
    }

    #[test]
    fn psi_is_gauge_invariant(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(0..=1);
        let cyc = random_cycle(&mut r, 2, 3, k, true);
        let p = InvariantPolynomial::trace_power(2);
        let before = psi(&cyc.chain, &cyc.reference, &p, &cyc.set).unwrap();
        let g = random_constant_gauge(&mut r, 2, 3);
        let set = cyc.set.try_map(|d| gauge_apply(d, &g)).unwrap();
        let after = psi(&cyc.chain, &gauge_apply(&cyc.reference, &g).unwrap(), &p, &set).unwrap();
        prop_assert_eq!(before.form, after.form);
    }

    #[test]
    fn pair_total_matches_pair_of_psi(seed in any::<u64>()) {
        let mut r = rng(seed);
        let k = r.gen_range(0..=1);
        let cyc = random_cycle(&mut r, 2, 3, k, true);
        let p = InvariantPolynomial::trace_power(2);
        let v = psi(&cyc.chain, &cyc.reference, &p, &cyc.set).unwrap();
        for z in BaseCycle::all_of_dim(3, 3 - k) {
            let a = pair(&v.form, &z).unwrap();
            let b = pair_total(&cyc.chain, &cyc.reference, &p, &cyc.set, &z).unwrap();
            prop_assert_eq!(a.exact, b.exact);
        }
    }
}

#[test]
fn psi_of_zero_chain_is_zero() {
    let mut r = rng(9);
    let fam = commuting_family(&mut r, 2, 3, 2, false);
    let set: ConnectionSet = fam.vertices.iter().cloned().collect();
    let v = psi_form(&Chain::zero(1), &fam.vertices[0], &InvariantPolynomial::trace_power(2), &set).unwrap();
    assert_eq!(v, Form::zero(Dims::new(3, 0)));
}

//! Coordinate subtori of the base torus, exact integration over them and
//! ℝ/ℤ reduction of the resulting values.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::chernweil::{Connection, InvariantPolynomial};
use crate::complex::{Chain, ConnectionSet};
use crate::error::{Error, Result};
use crate::fiber::{check_psi_inputs, homotopy_integrand, simplex_moment};
use crate::forms::{bit, Form, Mask};
use crate::scalar::{format_rational, int, Rational, Scalar, TauPoly};

/// Float tolerance for ℝ/ℤ comparisons of values that involve `τ`.
pub const MOD_Z_TOLERANCE: f64 = 1e-8;

/// The subtorus `{x_j = offset_j, j ∉ directions}` counted `multiplicity` times.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseCycle {
    base: usize,
    directions: Vec<usize>,
    offsets: BTreeMap<usize, Rational>,
    multiplicity: i64,
}

impl BaseCycle {
    /// Directions are zero-based. Unlisted complementary offsets default to 0.
    pub fn new(base: usize, directions: Vec<usize>, offsets: BTreeMap<usize, Rational>, multiplicity: i64) -> Result<Self> {
        if directions.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::dims("cycle directions must be strictly increasing"));
        }
        if let Some(&d) = directions.iter().find(|&&d| d >= base) {
            return Err(Error::UnknownDirection(format!("x{}", d + 1)));
        }
        let mut full = BTreeMap::new();
        for j in (0..base).filter(|j| !directions.contains(j)) {
            let o = offsets.get(&j).cloned().unwrap_or_else(Rational::zero);
            if o < Rational::zero() || o >= int(1) {
                return Err(Error::InvalidOffset(format!("x{} = {}", j + 1, format_rational(&o))));
            }
            if !(&o * int(4)).is_integer() {
                return Err(Error::InvalidOffset(format!("x{} = {}", j + 1, format_rational(&o))));
            }
            full.insert(j, o);
        }
        if let Some(&j) = offsets.keys().find(|j| directions.contains(j) || **j >= base) {
            return Err(Error::InvalidOffset(format!("x{} is not a complementary direction", j + 1)));
        }
        Ok(BaseCycle {
            base,
            directions,
            offsets: full,
            multiplicity,
        })
    }

    /// The subtorus spanned by `directions` through the origin.
    pub fn subtorus(base: usize, directions: &[usize]) -> Result<Self> {
        BaseCycle::new(base, directions.to_vec(), BTreeMap::new(), 1)
    }

    /// Every coordinate subtorus of dimension `k` in `T^m`.
    pub fn all_of_dim(base: usize, k: usize) -> Vec<BaseCycle> {
        fn rec(start: usize, base: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
            if cur.len() == k {
                out.push(cur.clone());
                return;
            }
            for j in start..base {
                cur.push(j);
                rec(j + 1, base, k, cur, out);
                cur.pop();
            }
        }
        let mut dirs = Vec::new();
        rec(0, base, k, &mut Vec::new(), &mut dirs);
        dirs.into_iter()
            .map(|d| BaseCycle::subtorus(base, &d).expect("valid subtorus"))
            .collect()
    }

    pub fn base_dim(&self) -> usize {
        self.base
    }

    pub fn dim(&self) -> usize {
        self.directions.len()
    }

    pub fn directions(&self) -> &[usize] {
        &self.directions
    }

    pub fn offsets(&self) -> &BTreeMap<usize, Rational> {
        &self.offsets
    }

    pub fn multiplicity(&self) -> i64 {
        self.multiplicity
    }

    pub fn with_multiplicity(mut self, k: i64) -> Self {
        self.multiplicity = k;
        self
    }

    fn mask(&self) -> Mask {
        self.directions.iter().fold(0, |m, &d| m | bit(d))
    }

    /// Pullback of a form to the slice through the offsets (dims unchanged).
    fn slice(&self, form: &Form) -> Result<Form> {
        let mut f = form.clone();
        for (&j, o) in &self.offsets {
            f = f.restrict_base(j, o)?;
        }
        Ok(f)
    }
}

impl fmt::Display for BaseCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let dirs: Vec<String> = self.directions.iter().map(|d| format!("x{}", d + 1)).collect();
        write!(f, "{}·T[{}]", self.multiplicity, dirs.join(","))?;
        for (j, o) in &self.offsets {
            if !o.is_zero() {
                write!(f, " x{}={}", j + 1, format_rational(o))?;
            }
        }
        Ok(())
    }
}

/// A pairing value: exact representative in ℚ[τ] plus its float rendering.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RZValue {
    #[serde(serialize_with = "serialize_tau")]
    pub exact: TauPoly,
    pub float: f64,
    pub mod_one: f64,
}

fn serialize_tau<S: serde::Serializer>(v: &TauPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl RZValue {
    pub fn from_exact(exact: TauPoly) -> Self {
        let float = exact.to_f64();
        RZValue {
            exact,
            float,
            mod_one: float - float.floor(),
        }
    }

    pub fn zero() -> Self {
        RZValue::from_exact(TauPoly::zero())
    }

    pub fn is_tau_free(&self) -> bool {
        self.exact.as_rational().is_some()
    }

    /// Exact integrality of the representative.
    pub fn is_integer(&self) -> bool {
        self.exact.is_integer()
    }

    /// Equality in ℝ/ℤ: exact when both sides are rational, otherwise by floats
    /// within [`MOD_Z_TOLERANCE`].
    pub fn eq_mod_z(&self, other: &RZValue) -> bool {
        let diff = self.exact.minus(&other.exact);
        if let Some(q) = diff.as_rational() {
            return q.is_integer();
        }
        let x = diff.to_f64();
        (x - x.round()).abs() <= MOD_Z_TOLERANCE
    }
}

impl fmt::Display for RZValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ≈ {:.11e} (mod 1: {:.11e})", self.exact, self.float, self.mod_one)
    }
}

fn constant_value(s: &Scalar) -> Result<TauPoly> {
    s.as_tau_poly()
        .ok_or_else(|| Error::dims("integrand still depends on a coordinate after integration"))
}

/// `∫_z form` for a base form whose degree equals the cycle dimension.
pub fn pair(form: &Form, cycle: &BaseCycle) -> Result<RZValue> {
    let dims = form.dims();
    if dims.params != 0 {
        return Err(Error::dims("pairing needs a form on the base alone"));
    }
    if dims.base != cycle.base {
        return Err(Error::dims(format!(
            "form on T^{} paired with a cycle in T^{}",
            dims.base, cycle.base
        )));
    }
    if let Some(deg) = form.degree() {
        if deg != cycle.dim() {
            return Err(Error::Degree(format!(
                "{deg}-form paired with a {}-cycle",
                cycle.dim()
            )));
        }
    } else if !form.is_zero() {
        return Err(Error::Degree("pairing needs a homogeneous form".into()));
    }
    let sliced = cycle.slice(form)?;
    let coeff = sliced.coefficient(cycle.mask());
    let value = constant_value(&coeff.integrate_torus(cycle.directions())?)?;
    Ok(RZValue::from_exact(value.scale(&int(cycle.multiplicity))))
}

/// `(−1)^{r+1} ∫_{z×Σ×I} P(Ω^{D̃})` as one integral: the torus directions of
/// `z` are integrated before the simplex and interval moments.
pub fn pair_total(
    sigma: &Chain,
    d0: &Connection,
    p: &InvariantPolynomial,
    set: &ConnectionSet,
    cycle: &BaseCycle,
) -> Result<RZValue> {
    check_psi_inputs(sigma, d0, set)?;
    let r = sigma.dim();
    if 2 * p.degree() != cycle.dim() + r + 1 {
        return Err(Error::Degree(format!(
            "ψ has degree 2p−r−1 = {} but the cycle has dimension {}",
            (2 * p.degree()) as i64 - r as i64 - 1,
            cycle.dim()
        )));
    }
    if d0.base_dim() != cycle.base {
        return Err(Error::dims("cycle and connections live on different tori"));
    }
    let terms: Vec<_> = sigma.terms().collect();
    let pieces = terms
        .par_iter()
        .map(|(s, c)| {
            let omega = cycle.slice(&homotopy_integrand(s, d0, p, set)?)?;
            let dims = omega.dims();
            let fiber_mask: Mask = (dims.base..dims.total()).fold(0, |m, k| m | bit(k));
            let coeff = omega
                .coefficient(cycle.mask() | fiber_mask)
                .integrate_torus(cycle.directions())?;
            let mut value = TauPoly::zero();
            for (key, q) in coeff.terms() {
                if !key.trig.is_constant() {
                    return Err(Error::dims("integrand still depends on a coordinate after integration"));
                }
                let mut alpha = vec![0];
                alpha.extend_from_slice(&key.powers[..r]);
                let moment = simplex_moment(&alpha) * Rational::new(1.into(), (key.powers[r] + 1).into());
                value.add_term(key.tau, q * moment * int(*c));
            }
            Ok(value)
        })
        .collect::<Result<Vec<TauPoly>>>()?;
    let mut total = pieces.into_iter().fold(TauPoly::zero(), |acc, v| acc.plus(&v));
    if r % 2 == 0 {
        total = total.scale(&int(-1));
    }
    Ok(RZValue::from_exact(total.scale(&int(cycle.multiplicity))))
}

/// `dω = 0` exactly.
pub fn closedness_check(form: &Form) -> bool {
    form.d().is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Dims, Direction, Phase};

    fn dx(dims: Dims, i: usize) -> Form {
        Form::d_coord(dims, Direction::Base(i)).unwrap()
    }

    #[test]
    fn unit_volume() {
        let dims = Dims::new(2, 0);
        let v = pair(&dx(dims, 0).wedge(&dx(dims, 1)), &BaseCycle::subtorus(2, &[0, 1]).unwrap()).unwrap();
        assert_eq!(v.exact, TauPoly::rational(int(1)));
        assert_eq!(v.mod_one, 0.0);
    }

    #[test]
    fn quarter_offset_kills_cosine() {
        let dims = Dims::new(3, 0);
        let c = Scalar::trig(dims, vec![0, 0, 1], Phase::Cos, int(1), 0).unwrap();
        let w = dx(dims, 0).wedge(&dx(dims, 1)).mul_scalar(&c);
        let z = BaseCycle::new(3, vec![0, 1], [(2, rat(1, 4))].into_iter().collect(), 1).unwrap();
        assert!(pair(&w, &z).unwrap().exact.is_zero());
        let z0 = BaseCycle::subtorus(3, &[0, 1]).unwrap();
        assert_eq!(pair(&w, &z0).unwrap().exact, TauPoly::rational(int(1)));
    }

    #[test]
    fn bad_offsets_rejected() {
        assert!(BaseCycle::new(2, vec![0], [(1, rat(1, 3))].into_iter().collect(), 1).is_err());
        assert!(BaseCycle::new(2, vec![0], [(1, int(1))].into_iter().collect(), 1).is_err());
        assert!(BaseCycle::new(2, vec![0], [(0, int(0))].into_iter().collect(), 1).is_err());
        assert!(BaseCycle::new(2, vec![1, 0], BTreeMap::new(), 1).is_err());
    }

    #[test]
    fn degree_mismatch() {
        let dims = Dims::new(2, 0);
        assert!(pair(&dx(dims, 0), &BaseCycle::subtorus(2, &[0, 1]).unwrap()).is_err());
    }

    #[test]
    fn multiplicity_is_linear() {
        let dims = Dims::new(2, 0);
        let w = dx(dims, 1).scale(&rat(2, 3));
        let z = BaseCycle::subtorus(2, &[1]).unwrap();
        let one = pair(&w, &z).unwrap();
        let three = pair(&w, &z.clone().with_multiplicity(3)).unwrap();
        assert_eq!(three.exact, one.exact.scale(&int(3)));
        assert!(three.is_integer());
        assert!(one.eq_mod_z(&RZValue::from_exact(TauPoly::rational(rat(-1, 3)))));
    }

    #[test]
    fn closedness() {
        let dims = Dims::new(2, 0);
        assert!(closedness_check(&dx(dims, 0).wedge(&dx(dims, 1))));
        let c = Scalar::trig(dims, vec![1, 0], Phase::Cos, int(1), 0).unwrap();
        assert!(!closedness_check(&dx(dims, 1).mul_scalar(&c)));
    }

    #[test]
    fn all_subtori() {
        assert_eq!(BaseCycle::all_of_dim(5, 4).len(), 5);
        assert_eq!(BaseCycle::all_of_dim(4, 2).len(), 6);
    }
}

//! Exact exterior calculus on flat tori, Chern–Weil forms of simplicial
//! families of relatively flat connections, and the ℝ/ℤ-valued secondary
//! invariant obtained by integrating them over `Σ × I`.

pub mod chernweil;
pub mod complex;
pub mod error;
pub mod fiber;
pub mod forms;
pub mod oracle;
pub mod pairing;
pub mod random;
pub mod runner;
pub mod scalar;
pub mod scenario;

pub use chernweil::{
    chern_weil, curvature, gauge_apply, gauge_apply_curvature, is_flat, polarization, transgression, Connection,
    GaugeTransform, InvariantPolynomial,
};
pub use complex::{boundary, face_map, family_connection, is_cycle, relative_flatness_check, validate_chain, Chain, ConnectionSet, Simplex};
pub use error::{Error, Result};
pub use fiber::{integrate_fiber, psi, psi_compare_reference, simplex_moment, stokes_check, FiberSpec, PsiResult};
pub use forms::{Bidegree, Form, MatrixForm};
pub use pairing::{closedness_check, pair, pair_total, BaseCycle, RZValue};
pub use scalar::{Dims, Direction, Phase, Rational, Scalar, TauPoly, TrigMonomial};

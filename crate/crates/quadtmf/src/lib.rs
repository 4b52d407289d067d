//! Exact-arithmetic computations around integral symmetric bilinear forms:
//! normal forms and discriminant data, framed-link surgery presentations and
//! Kirby moves, symbolic TMF-module expressions, lattice theta series and
//! Jacobi theta transformation checks.
//!
//! All algebraic kernels work over arbitrary-precision integers and
//! rationals; floating point appears only in [`jacobi`], which verifies
//! analytic identities within a tolerance.

pub mod bilform;
pub mod discform;
pub mod error;
pub mod invariants;
pub mod jacobi;
pub mod kirby;
pub mod lattices;
pub mod matrix;
pub mod qtheta;
pub mod tmf;

pub use bilform::{BilinearForm, Decision, QuadraticForm, SignatureRecord};
pub use discform::{DiscriminantData, TorsionLinkingForm};
pub use error::Error;
pub use invariants::{
    CobordismData, FourManifoldClass, Orientation, ThreeManifoldPresentation, Z3Invariant,
    Z4Invariant,
};
pub use jacobi::{GroupElement, JacobiEvaluator, TransformationReport};
pub use kirby::{FramedLink, InvarianceReport, KirbyMove};
pub use matrix::{IntMatrix, RatMatrix};
pub use qtheta::{EdgeImage, QSeries, ThetaSeries};
pub use tmf::coeff::{TmfCoeffTable, TmfElement, TmfValue};
pub use tmf::map::{Sign, TmfMap};
pub use tmf::module::{NormalForm, TmfModuleExpr};

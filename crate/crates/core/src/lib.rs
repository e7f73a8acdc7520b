//! Geometric analysis of analog (continuous-time) quantum search.
//!
//! The crate covers the two-level dynamics of the original and modified
//! Farhi–Gutmann Hamiltonians, Fubini–Study geometry on the Bloch sphere,
//! Anandan–Aharonov efficiency and time-energy uncertainty, a numerical
//! geodesicity test, and the mixed-state (fidelity / quantum Fisher
//! information) generalization. A fixed-step integrator and a golden-section
//! minimizer in [`oracle`] provide independent numerics for every closed form.

// `!(a > b)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod geometry;
pub mod hilbert;
pub mod mixedgeo;

pub mod oracle;
pub mod quadrature;
pub mod search;

pub use error::{Error, Result};
pub use geometry::{GeodesicArc, Trajectory};
pub use hilbert::{HermitianOperator, Ket, PureState, Spectrum2};
pub use search::{SchemeKind, SearchConfig};

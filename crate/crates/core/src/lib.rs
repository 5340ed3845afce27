//! Barotropic SHTC two-fluid model.
//!
//! The crate is layered bottom-up:
//!
//! * [`eos`]: phase laws and the mixture generalized energy with its first and second derivatives,
//! * [`state`]: primitive/conserved coordinates and equilibrium constructors,
//! * [`dynamics`]: conservative flux, relaxation sources and a 1D finite-volume solver,
//! * [`structure`]: equilibrium eigenstructure, energy convexity, dissipativity and the
//!   Shizuta-Kawashima products, each paired with a finite-difference oracle.
//!
//! All numerics are generic over [`Real`]; the `*64` aliases below fix the scalar to `f64`.

// `!(x > 0)` is deliberate throughout: it rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod eos;
pub mod error;
pub mod fd;
pub mod scalar;
pub mod state;
pub mod structure;

pub use eos::{EosFamily, MixDerivs1, MixDerivs2, MixtureEos, PhaseEosSpec};
pub use error::{Error, Result};
pub use scalar::Real;
pub use state::{ConservedState, PhaseFields, PrimitiveState, RelaxationParams};

pub type PhaseEos64 = PhaseEosSpec<f64>;
pub type Mixture64 = MixtureEos<f64>;
pub type Primitive64 = PrimitiveState<f64>;
pub type Conserved64 = ConservedState<f64>;
pub type Relaxation64 = RelaxationParams<f64>;
pub type SimConfig64 = dynamics::SimConfig<f64>;
pub type Snapshot64 = dynamics::FieldSnapshot<f64>;
pub type StructureReport64 = structure::StructureReport;

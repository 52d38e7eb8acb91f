//! Numerical laboratory for symmetric function spaces on `[0, 1]`.
//!
//! Functions are step functions on a uniform grid ([`GridFunction`]); every
//! norm is a functional of the non-increasing rearrangement and is evaluated
//! exactly. On top of that sit the growth characteristic `η(B, ε)` of finite
//! dimensional subspaces of `L₁`, generators for the function systems of
//! interest, and experiment drivers that emit [`lab::ExperimentReport`]s.

pub mod envelopes;
pub mod error;
pub mod generators;
pub mod grid;
pub mod lab;
pub mod rng;
pub mod spaces;
pub mod subspaces;

pub use envelopes::{MFunction, MonotoneFn};
pub use error::{Error, Result};
pub use grid::{CellSet, GridFunction};
pub use spaces::{Profile, SpaceSpec};
pub use subspaces::SubspaceSample;

//! Invariants of finite metric measure spaces.
//!
//! Partial and observable diameters (single and multivariable), Prokhorov,
//! Ky Fan and box distances, the Lipschitz order, and the checks that tie
//! vanishing diameters to heavy atoms. Exact solvers carry explicit size
//! caps; heuristic routines say so in their return types.
//!
//! The crate is `no_std` with `alloc` unless the `std` feature is enabled.
#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod clique;
pub mod atoms;
pub mod diameters;
pub mod error;
pub mod limits;
pub mod mass;
pub mod metrics;
pub mod obsdiam;
pub mod order;
pub mod solvers;
pub mod space;
pub mod spaces;

pub use diameters::ExtendedReal;
pub use error::{Error, Result, Violation};
pub use limits::Limits;
pub use space::{
    atoms, mcshane_extension, pushforward, pushforward_values, validate_space, AlphaVector, FiniteMMSpace,
    LipschitzField, Measure1D, RawSpace, SubProbDecomposition,
};

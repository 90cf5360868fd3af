//! Exact-arithmetic toolkit for torsion in homology.
//!
//! The crate covers integer simplicial homology with full torsion, the
//! Gabber–Soulé and (D,V)-complex torsion bounds, nerves of ball covers in
//! Euclidean and hyperbolic space, displacement functions of hyperbolic
//! isometries, the thick–thin and volume-comparison constants, and first
//! homology of Dehn fillings.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod constants;
pub mod dehn;
pub mod error;
pub mod fixtures;
pub mod homology;
pub mod hyperbolic;
pub mod io;
pub mod matrix;
pub mod nerve;
pub mod simplicial;
pub mod snf;
pub mod torsion;

pub use error::{Error, Result};
pub use homology::{cokernel, homology, relative_homology, AbelianGroupStructure, HomologyRecord};
pub use matrix::IntegerMatrix;
pub use simplicial::{complexity_profile, ComplexityProfile, Simplex, SimplicialComplex, SimplicialPair};
pub use snf::{smith_normal_form, SnfResult};
pub use constants::{EpsilonAssignment, ThickThinParams};
pub use dehn::{FillingResult, FillingSlope, PeripheralData};
pub use hyperbolic::{HyperbolicPoint, LorentzIsometry, SublevelSet};
pub use nerve::{Ball, BallCover, NervePair, Space};

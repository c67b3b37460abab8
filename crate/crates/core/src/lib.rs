//! Multi-tiling, admissibility and structured exponential Riesz bases for
//! finite-measure sets relative to a full lattice `Λ = Mℤ^d`.
//!
//! A set `Ω` is described by pieces `region + z` with `region ⊆ [0,1)^d` in
//! `M`-coordinates and `z ∈ ℤ^d`. From that description the crate computes
//! the fiber partition of the fundamental domain, decides the tiling level,
//! finds `(n, v)` admissibility certificates, builds the exponential system
//! `E(H; a₁,…,a_k)` with `a_j = ((j-1)/n)v`, and reports its exact Riesz or
//! frame constants from the per-class fiber matrices. The [`oracle`] module
//! re-derives those constants by quadrature.

pub mod admissibility;
pub mod basis;
pub mod cli;
pub mod completion;
pub mod eigen;
pub mod error;
pub mod gallery;
pub mod io;
pub mod lattice;
pub mod multitile;
pub mod oracle;
pub mod rational;
pub mod region;

pub use admissibility::{
    certify_family, check_certificate, search_certificate, AdmissibilityCertificate, CheckOutcome,
    FamilyOutcome, Violation,
};
pub use basis::{
    build_offsets, build_offsets_indexed, fiber_matrix, riesz_bounds, BoundsKind, BoundsReport,
    ExponentialSystem, Offset,
};
pub use completion::complete_to_tile;
pub use eigen::hermitian_eigen_range;
pub use error::{Error, Result};
pub use lattice::{dual_pairing, DualVector, Lattice, LatticePoint};
pub use multitile::{fiber_partition, FiberClass, FiberPartition, MultiTileSet, Piece, TilingLevel};
pub use region::{UnitBox, UnitRegion};

//! Finite-dimensional and discretized machinery for linear Dirac structures.
//!
//! The crate is organised bottom-up:
//!
//! * [`linear_core`]: tolerance-aware subspaces, pairings and linear relations.
//! * [`dirac_calculus`]: Dirac structures on `V ⊕ V*`, morphisms `(Θ, ω)`, forward
//!   images, strongness, parity and the standard path families.
//! * [`orthogonal_bridge`]: the dictionary `A ↦ E_A` between `O(V)` and Lagrangian
//!   subspaces, the multiplicative morphism, Cayley and exponential lifts, gauge
//!   transforms and the symplectic path.
//! * [`spectral_boundary`]: the operators `d/dt` with `f(1) = −A f(0)`, their
//!   spectra, discretizations and Hilbert-Schmidt / resolvent diagnostics.
//! * [`fock_clifford`]: spinor modules, Shale-Stinespring parity and the
//!   truncated semi-infinite wedge.
//! * [`group_moment`]: pointwise quasi-Hamiltonian verification, fusion,
//!   exponentials and the reduction normal form.
//!
//! Two-forms are stored as Gram matrices: `ω(x, y) = xᵀ W y`, so the contraction
//! `ι_v ω = ω(v, ·)` has coefficient vector `Wᵀ v`.

pub mod dirac_calculus;
pub mod error;
pub mod fock_clifford;
pub mod group_moment;
pub mod json;
pub mod linear_core;
pub mod matfun;
pub mod orthogonal_bridge;
pub mod random;
pub mod spectral_boundary;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = nalgebra::Complex<f64>;
pub type RMat = nalgebra::DMatrix<f64>;
pub type CMat = nalgebra::DMatrix<C64>;
pub type RVec = nalgebra::DVector<f64>;
pub type CVec = nalgebra::DVector<C64>;

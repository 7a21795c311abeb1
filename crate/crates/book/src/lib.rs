//! The guide's chapters, mounted as doc comments so `cargo test` compiles and
//! runs every Rust snippet in them. One module per chapter keeps failures
//! traceable to their page.

#[doc = include_str!("../../../book/src/introduction.md")]
pub mod introduction {}

#[doc = include_str!("../../../book/src/subspaces.md")]
pub mod subspaces {}

#[doc = include_str!("../../../book/src/dirac-structures.md")]
pub mod dirac_structures {}

#[doc = include_str!("../../../book/src/orthogonal-dictionary.md")]
pub mod orthogonal_dictionary {}

#[doc = include_str!("../../../book/src/boundary-spectra.md")]
pub mod boundary_spectra {}

#[doc = include_str!("../../../book/src/fock.md")]
pub mod fock {}

#[doc = include_str!("../../../book/src/qham.md")]
pub mod qham {}

#[doc = include_str!("../../../book/src/cli.md")]
pub mod cli {}

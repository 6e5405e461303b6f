//! Exact and numerical tools for length-`(n+2)` Waring decompositions of
//! concise cubic forms.
//!
//! The crate is organized bottom-up:
//!
//! - [`exact`]: rationals and dense exact matrices.
//! - [`forms`]: homogeneous forms, powers of linear forms, catalecticants.
//! - [`points`]: projective point sets, Kruskal rank, Hilbert functions,
//!   Cayley-Bacharach checks, orbit normalization.
//! - [`decomp`]: certified decompositions and structural pair reports.
//! - [`terracini`]: tangent spaces to Veronese varieties and Terracini defects.
//! - [`families`]: seeded generators of certified multi-decomposition witnesses.
//! - [`numsearch`]: floating-point decomposition search over the complex numbers.
//! - [`suite`] and [`cli`]: randomized verification suites and the command line.

pub mod cli;
pub mod decomp;
pub mod error;
pub mod exact;
pub mod families;
pub mod forms;
pub mod numsearch;
pub mod points;
pub mod seed;
pub mod suite;
pub mod terracini;

pub use error::{Error, Result};
pub use exact::{Mat, Rat};
pub use forms::{Form, LinVec};
pub use points::{HVector, PointSet, ProjPoint};

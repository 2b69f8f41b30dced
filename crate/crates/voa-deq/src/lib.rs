//! Symbolic derivation of differential equations satisfied by matrix elements
//! of products of intertwining operators between modules of a vertex operator
//! algebra, together with a Frobenius-method solver and fusion-rule bounds.
//!
//! The pipeline: exact arithmetic in the localized Laurent ring
//! `Q[z1^±, z2^±, (z1-z2)^{-1}]` (`ring`), truncated graded modules with exact
//! mode actions (`module`, `models`), a rewriting system on the coefficient
//! tensor space that pushes every element into a finite free submodule
//! (`tensor`), dependence extraction producing ODE systems with prescribed
//! regular singular points (`deq`), series solutions (`frobenius`), and
//! fusion-rule upper bounds by evaluation (`fusion`).

pub mod error;
pub mod q;
pub mod par;
pub mod laurent;
pub mod ring;
pub mod series;
pub mod uni;
pub mod modp;
pub mod ratfunc;
pub mod linalg;
pub mod multi;
pub mod module;
pub mod models;
pub mod tensor;
pub mod deq;
pub mod frobenius;
pub mod fusion;
pub mod schema;
pub mod cli;

pub use error::Error;
pub type Result<T> = std::result::Result<T, Error>;

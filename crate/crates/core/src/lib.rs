//! Exact-arithmetic workbench for computational homological algebra:
//! oriented graph complexes, the properads of (involutive) Lie bialgebras,
//! quadratic Koszul complexes and homotopy Batalin-Vilkovisky towers.
//!
//! Everything is computed over the rationals with no floating point anywhere;
//! all structural identities (differentials squaring to zero, Maurer-Cartan
//! equations, homotopy identities) are checked as exact matrix or symbolic
//! identities.

// pub mod bv;
pub mod digraph;
pub mod gc;
pub mod gra;
// pub mod koszul;
pub mod linalg;
pub mod poly;
// pub mod prop;
pub mod rational;
pub mod rep;
// pub mod sampling;

pub use linalg::{SparseMatrixQ, SparseVectorQ};
pub use rational::Rat;

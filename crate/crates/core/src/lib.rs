//! Phylogenetic invariants of the CFN model under a molecular clock: top
//! vectors, the polytope R_T, Ehrhart data and a quadratic Gröbner basis of
//! the toric ideal I_T.

pub mod ehrhart;
pub mod error;
pub mod ideal;
mod linalg;
pub mod model;
pub mod paths;
pub mod polytope;
pub mod tree;

pub use error::{Error, Result};
pub use paths::TopVector;
pub use tree::{parse_newick, RootedBinaryTree};

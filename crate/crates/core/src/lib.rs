//! Numerical toolkit for a braided quantum-group construction built on the
//! quantum exponential function: scalar special functions, a discretized
//! Weyl-pair model, the block-operator domains, the braided group operations,
//! their representations, and kernel identities, together with a check
//! harness exposing everything as named, tolerance-tagged checks.

extern crate blas_src;

pub mod braidops;
pub mod domains;
pub mod error;
pub mod harness;
pub mod hilbert;
pub mod kernels;
pub mod quad;
pub mod reps;
pub mod specfun;

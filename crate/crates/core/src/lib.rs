pub mod cli;
pub mod ergodic;
pub mod exel_laca;
pub mod expr;
pub mod fock;
pub mod linalg;
pub mod report;
pub mod rewrite;
pub mod scalar;
pub mod sparse;
pub mod spectral;
pub mod suites;

pub use expr::{parse, Case, Element, ExprError, Gen, Word};
pub use fock::{evaluate, FockError, TruncSpace};
pub use scalar::{Coeff, GaussRat, Laurent, Rational, Scalar};
pub use sparse::SparseMat;

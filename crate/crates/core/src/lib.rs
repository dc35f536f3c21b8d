//! Exact decision procedures for disjointness-type properties of operators
//! on finite atomic Banach lattices and on a piecewise-polynomial function
//! lattice over `[0, 1]`.

pub mod campaign;
pub mod cli;
pub mod error;
pub mod generate;
pub mod interval;
pub mod io;
pub mod lattice;
pub mod linalg;
pub mod norm;
pub mod operator;
pub mod opnorm;
pub mod oracle;
pub mod predicates;
pub mod probe;
pub mod rational;
pub mod report;
pub mod sigma;
pub mod wce;
pub mod witness;

pub use error::{Error, Result};
pub use lattice::{AtomicSpace, Exponent, NormSpec, SupportSet, Vector};
pub use norm::{ExactOrBounded, Side};
pub use operator::Operator;
pub use rational::Rational;

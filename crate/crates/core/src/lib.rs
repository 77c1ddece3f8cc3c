//! Exact symbolic engine for simplicial Chern-Weil characteristic cocycles on
//! the frame bundle of R^n, their transfer to the Chevalley-Eilenberg model of
//! the diffeomorphism Hopf algebra, and exhaustive identity verification by
//! exact rational evaluation.

pub mod ring;
pub mod rng;
pub mod scalar;
pub mod sym;
pub mod poly;
pub mod matrix;
pub mod jet;
pub mod form;
pub mod simplicial;
pub mod bott;
pub mod ce;
pub mod vey;
mod transfer_check;
pub mod hopf;
pub mod io;
pub mod latex;
pub mod selftest;

pub use ring::Ring;
pub use scalar::{Dual, DualScalar, Scalar};
pub use sym::{AlphaIdx, JetIdx, Sym};
pub use poly::{Mono, Poly, RationalFn};
pub use matrix::Mat;

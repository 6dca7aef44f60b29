//! Exact symbolic computation for a class of modules over the centrally
//! extended Witt algebra: polynomial-twist factors Ω(λ,α,h) and Ω(μ,β),
//! highest-weight factors, their tensor products, and the coefficient
//! extraction, rank, and irreducibility machinery built on top.

pub mod analysis;
pub mod certify;
pub mod element;
pub mod enveloping;
pub mod error;
pub mod linalg;
pub mod nmbeta;
pub mod omega;
pub mod poly;
pub mod rational;
pub mod report;
pub mod specfile;
pub mod suites;
pub mod sweep;
pub mod tensor;
pub mod vandermonde;

pub use error::{Error, Result};
pub use rational::Rational;

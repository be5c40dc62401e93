pub mod classify;
pub mod commutant;
pub mod error;
pub mod exactmat;
pub mod invariants;
pub mod layered;
pub mod rational;
pub mod sampler;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use exactmat::{Polynomial, RatMatrix};
pub use rational::Rational;

pub mod certificates;
pub mod error;
pub mod factor_lp;
pub mod instance;
pub mod lp;
pub mod oblivious;
pub mod rational;
pub mod streaming;

pub use error::{Error, Result};
pub use rational::Rational;

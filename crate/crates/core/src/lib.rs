pub mod dcflow;
pub mod error;
pub mod expand;
pub mod format;
pub mod gadgets;
pub mod intsolve;
pub mod lp;
pub mod minmax;
pub mod model;
pub mod oracle;
pub mod rational;
pub mod registry;
pub mod verify;

pub use error::{Error, Result};
pub use rational::Rational;

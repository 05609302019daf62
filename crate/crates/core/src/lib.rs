//! Exact laboratory for arbitrage of the first kind on finite event trees.
//!
//! The tree side ([`filtered_space`], [`arbitrage`], [`deflator`],
//! [`kunita_yoeurp`], [`enlargement`]) works in exact rational arithmetic and
//! returns certificates rather than tolerances. The [`montecarlo`] module
//! covers the continuous-time examples with seeded, thread-count-independent
//! path simulation.

pub mod arbitrage;
pub mod cli;
pub mod deflator;
pub mod enlargement;
pub mod error;
pub mod filtered_space;
pub mod io;
pub mod kunita_yoeurp;
pub mod lp;
pub mod montecarlo;
pub mod random;
pub mod rational;
pub mod scenarios;
pub mod utility;

pub use error::{Error, Result};
pub use rational::Rational;

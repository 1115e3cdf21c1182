//! Periodic demand estimation for tactical service network design.
//!
//! Given per-period demand forecasts, find the periodic demand to plan a
//! repeating service network with, such that the cost of operating that
//! network over the whole horizon is minimal. The periodic demand is
//! parameterized by deviation coefficients `alpha` against the mean forecast,
//! optionally tied together within commodity clusters, and searched with
//! local-search metaheuristics or a pattern search on top of an exact
//! sequential evaluation of the design and operating problems.

pub mod cluster;
pub mod error;
pub mod generate;
pub mod lowersolve;
pub mod metrics;
pub mod model;
pub mod num;
pub mod periodic;
pub mod search;

pub use error::{Error, Result};
pub use model::{Commodity, DemandMatrix, Instance, Path};
pub use num::Rational;

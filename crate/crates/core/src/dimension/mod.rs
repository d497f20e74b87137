//! Gauges, density ratios, dimension estimates and run-length statistics.

mod checks;
mod gauge;
mod profile;
mod runs;

pub use checks::*;
pub use gauge::{gauge_integrability, Convergence, Gauge, Integrability};
pub use profile::*;
pub use runs::*;

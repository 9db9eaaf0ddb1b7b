//! Agents, match play, rating statistics, fixtures and the GTP front end.

mod agents;
mod descriptor;
mod fixtures;
mod gtp;
mod matches;
mod stats;

pub use agents::*;
pub use descriptor::*;
pub use fixtures::*;
pub use gtp::*;
pub use matches::*;
pub use stats::*;

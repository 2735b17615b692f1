//! Explicit constructions: `(v,2,1)` base-block families, the edge-colouring
//! strongification, cyclic Steiner triple systems, and the worked examples.

pub mod colouring;
pub mod fixtures;
pub mod pairs;
pub mod sts;

pub use fixtures::{fixture, fixture_info, FixtureInfo, CATALOG};
pub use pairs::{strong_nest_pairs_1mod4, weak_nest_pairs, weak_pairs_system};
pub use sts::{cyclic_sts, cyclic_sts_variants, nest_cyclic_orbits};

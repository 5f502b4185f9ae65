//! Shannon entropic cones for measurement scenarios.
//!
//! The crate models measurement scenarios (compatibility graph + contexts),
//! builds exact-arithmetic halfspace representations of Shannon entropic
//! cones, projects them onto observed coordinates by Fourier-Motzkin
//! elimination to derive entropic test inequalities, decides entropic
//! (non)contextuality of observed data by exact linear programming,
//! constructs joint-entropy extensions along junction trees of chordal
//! compatibility graphs, certifies monogamy of entropic tests via chordal
//! decompositions and party-graph edge packing, and searches small quantum
//! models for violations numerically.

pub mod chordal;
pub mod dist;
pub mod inequalities;
pub mod polyhedra;
pub mod quantum;
pub mod rational;
pub mod scenario;
pub mod subsets;

pub use rational::Rat;
pub use scenario::{EntropyVector, Scenario, ScenarioError};
pub use subsets::{Subset, SubsetIndex};

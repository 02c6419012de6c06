//! Secondary user versus jammer interaction in a cognitive radio network.
//!
//! The crate models each information regime of the network (categories A and B)
//! as a 2x2 bimatrix game, solves it for mixed and pure Nash equilibria, learns the
//! same equilibria with fictitious play, and simulates the slotted band-hopping
//! network in which the games are played.
//!
//! * [`game`]: occupancy probabilities and payoff-table construction.
//! * [`nash`]: indifference solver and best-response verification.
//! * [`fp`]: fictitious play with per-player history counters.
//! * [`sim`]: discrete-time network simulator.
//! * [`exec`]: sequential / rayon execution of independent runs.
//! * [`cli`]: the `crn-jamgame` command-line front end.

pub mod cli;
pub mod error;
pub mod exec;
pub mod fp;
pub mod game;
pub mod nash;
pub mod sim;

pub use error::{Error, Result};
pub use exec::Execution;
pub use fp::{EmpiricalFrequencies, FpTrace, HistoryCounters};
pub use game::{BimatrixGame, Category, DerivedProbabilities, NetworkConfig, Strategy};
pub use nash::{EquilibriumReport, MixedProfile, StrategyUtilities};
pub use sim::{Move, NetworkState, Policy, PolicySpec, SlotRecord};

/// Deterministic random source used by every seeded routine in the crate.
pub type SimRng = rand_chacha::ChaCha8Rng;

/// Builds the crate's random source from a 64-bit seed.
pub fn rng_from_seed(seed: u64) -> SimRng {
    use rand::SeedableRng;
    SimRng::seed_from_u64(seed)
}

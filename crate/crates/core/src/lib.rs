//! Sorting dynamics of discrete-time TASEP with parallel update on finite
//! strings, with and without a single second class particle.
//!
//! Strings live over the alphabet `{0, 1, 2}`: `2` is a hole, `0` a particle
//! and `1` the second class particle. One evolution step swaps every
//! admissible increasing neighbour pair simultaneously; the stabilization
//! time is the number of steps until the string is sorted non-increasing.
//!
//! The crate is organized as
//!
//! * [`dynamics`]: the exact step maps, stabilization and excess, plus the
//!   worklist stepper and the linear-time shortcuts used by the Monte Carlo
//!   harness.
//! * [`structure`]: height profile, landmarks `L`, `R`, `M_k`, `K`, the
//!   zero-excess predicate and the phase tracker.
//! * [`walk`]: first-passage laws of the biased simple random walk and the
//!   excursion chain bounding `M - K`.
//! * [`sampling`]: Bernoulli backbones and the second class particle in
//!   uniform position.
//! * [`experiments`]: exact enumeration, reference limit laws, KS statistics
//!   and the Monte Carlo runners.
//! * [`rng`]: the counter-based stream generator every randomized routine
//!   draws from.
//! * [`report`]: number formatting for artifacts.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod report;
pub mod rng;
pub mod sampling;
pub mod structure;
pub mod walk;

pub use dynamics::{
    excess, excess_fast, is_sorted_nonincreasing, project, stabilization_time_two, stabilize_three,
    stabilize_two, step_three, step_two, BiString, FastTimes, Projection, StabilizationOutcome,
    Stepper, TriString,
};
pub use error::{Error, Result};
pub use rng::{stream_rng, StreamSeed, StreamTag};

pub use sampling::{
    critical_density, sample_three_with_scp, sample_two, Convention, InitialCondition, Scaling,
};
pub use structure::{
    check_excess_gt_one_implies_tail, height_profile, landmarks, landmarks_of_backbone,
    predict_zero_excess, track_phases, u_position_cdf, HeightProfile, LandmarkSet, Phase,
    PhaseTrace,
};
pub use walk::{ExcursionRecord, ExcursionSampler, HittingTables, WalkParams};

/// Version tag written into every serialized artifact.
pub const SCHEMA_VERSION: u32 = 1;

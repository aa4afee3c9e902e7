//! Query-complexity lab for the problem of telling a uniform random function
//! on `{0, …, n-1}` apart from a uniform random permutation.

pub mod collision_profiles;
pub mod distinguishers;
pub mod error;
pub mod function_model;
pub mod harness;
pub mod hybrids;
pub mod quantum;
pub mod scalar;
pub mod stats;

pub use collision_profiles::{
    canonical_function, collision_equivalent, multiplicity, profile_of, sample_from_profile,
    CollisionProfile,
};
pub use distinguishers::{
    amplify, bht_distinguisher, build_marked_oracle, classical_birthday, conjugated_distinguisher,
    default_grover_budget, estimate_bias, Amplified, BhtDistinguisher, BiasEstimate,
    BirthdayDistinguisher, Conjugated, Distinguisher, DistinguisherReport,
};
pub use error::{Error, Result};
pub use function_model::{
    conjugate, sample_uniform_function, sample_uniform_permutation, ConjugatedOracle,
    CountingOracle, FunctionTable, Oracle,
};
pub use harness::{
    find_threshold_budget, fit_exponent, run_sweep, verify_claims, ClaimsReport,
    DistinguisherKind, ExperimentConfig, SweepRow,
};
pub use hybrids::{
    build_hybrids, build_related_pair, check_relation_witness, embed_collision_instance,
    embed_collision_point, partition_indices, small_mass, HybridSequence, IndexPartition,
    MultiplicityClass, RelationWitness,
};
pub use quantum::{
    bbht_search, bbht_search_with, grover_search, grover_success_probability, BbhtConfig,
    BooleanOracle, StateVector,
};
pub use scalar::Scalar;

/// Search-register state in double precision, the default for experiments.
pub type StateVector64 = StateVector<f64>;
/// Search-register state in single precision.
pub type StateVector32 = StateVector<f32>;

use rand::SeedableRng;
pub use rand_chacha::ChaCha8Rng;

/// Deterministic generator for a master seed.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for one trial of an experiment: same master seed,
/// stream selected by trial index. Streams never overlap, so trials can run
/// in any order or in parallel and still reproduce exactly.
pub fn trial_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

//! Search engine for Hamiltonian paths in `K_p` with prescribed cyclic
//! edge lengths, plus enumeration of the multisets to test and inductive
//! growth of solved instances from `p` to `p + 1`.

pub mod error;
pub mod inductive;
pub mod instance;
pub mod multiset;
pub mod partitions;
pub mod path;
pub mod solver;

pub use error::{Error, Result};
pub use instance::ProblemInstance;
pub use multiset::{divisor_condition, fp_of_multiset, FrequencyPartition, HopMultiset};
pub use partitions::{
    enumerate_coprime_multisets, enumerate_multisets, generate_fps, representative_multiset,
    FpStream, MultisetFilter, MultisetStream,
};
pub use path::{path_hop_lengths, validate_realization, HamiltonianPath};
pub use solver::{
    find_path, find_path_with, oracle_find_path, Hint, SearchLimits, SearchOptions, SearchResult,
    Termination,
};

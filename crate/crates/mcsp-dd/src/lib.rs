//! Minimum common string partition solver built on layered decision
//! diagrams.
//!
//! Given two related strings (every symbol occurs equally often in both),
//! the task is to cut both into the same multiset of substrings using as
//! few pieces as possible. The solver enumerates all common blocks of
//! length at least two, orders them by length, and sweeps a layer of
//! coverage states per block: choosing a block covers its positions and
//! saves pieces, skipping it costs nothing, and whatever remains at the
//! end is priced as singletons. Keeping every state yields the exact
//! optimum; capping each layer at the `W` lightest states yields a fast
//! upper-bound heuristic that scales to long strings.
//!
//! The crate also ships an independent exhaustive solver for small
//! instances ([`oracle`]), a seeded instance generator ([`instance`]),
//! a partition validator, and a benchmark harness ([`bench`](mod@bench)).
//!
//! ```
//! use mcsp_dd::{build_dd, enumerate_blocks, parse_instance, SolveConfig};
//!
//! let inst = parse_instance("GAGACTA\nAACTGAG\n").unwrap();
//! let blocks = enumerate_blocks(&inst);
//! let result = build_dd(&inst, &blocks, &SolveConfig::exact()).unwrap();
//! assert_eq!(result.value, 3);
//! let mut pieces = result.partition.piece_strings(&inst);
//! pieces.sort();
//! assert_eq!(pieces, ["A", "ACT", "GAG"]);
//! ```

pub mod bench;
pub mod blocks;
pub mod instance;
pub mod oracle;
pub mod solver;

pub use blocks::{enumerate_blocks, overlaps, sort_blocks, Block, BlockSet};
pub use instance::{
    generate_instance, is_related, parse_instance, Distribution, GeneratorConfig, Instance,
    InstanceError, GENERATOR_RNG_NAME, MAX_ALPHABET_SIZE,
};
pub use oracle::{brute_force, OracleError, OracleResult};
pub use solver::{
    build_dd, complete_with_singletons, transition_one, transition_zero, validate_partition,
    NodeState, Partition, PartitionViolation, SolveConfig, SolveError, SolveResult, SolveStats,
};

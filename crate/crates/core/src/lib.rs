//! Permutation-group computations around maximal overgroups, base sizes,
//! fixed point ratios and total domination of the generating graph by
//! conjugate elements.

pub mod action;
pub mod alt_theory;
pub mod atlas;
pub mod base;
pub mod chain;
pub mod classes;
pub mod domination;
pub mod error;
pub mod field;
pub mod group;
pub mod overgroups;
pub mod perm;
pub mod prob;
pub mod rng;
pub mod subgroup;

pub use action::{CosetAction, SubsetAction};
pub use atlas::GroupSpec;
pub use base::{base_size, BaseCertificate, PermGroup, Strategy};
pub use chain::{ChainOptions, StabilizerChain};
pub use classes::ConjugacyTable;
pub use domination::{gamma_u_bracket, BoundReport, BracketConfig, TdsCertificate, Verification};
pub use error::{Error, Result};
pub use group::{Group, Limits};
pub use overgroups::{maximal_overgroups, mu, ClimbOptions, Mode, MuResult, OvergroupSet};
pub use perm::{parse_cycles, Permutation};
pub use prob::{BoundMethod, MinC, ProbProfile};
pub use subgroup::Subgroup;

/// Crate version, embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

//! Deterministic blockchain simulator and the EventWarden event-driven
//! proxy protocol.

pub mod agents;
pub mod chain;
pub mod contracts;
pub mod fuzzing;
pub mod primitives;
pub mod report;
pub mod rlp;
pub mod scenario;
pub mod trie;
pub mod vm;
pub mod warden;

pub use primitives::{keccak256, Address, BlockNumber, Digest, Gas, Wei};

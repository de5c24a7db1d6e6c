//! Approval-based multiwinner committee selection under justified
//! representation (JR) and extended justified representation (EJR):
//! axiom checkers, greedy selection rules with provable guarantees, exact
//! brute-force oracles, a polynomial exact algorithm for one-dimensional
//! voter/candidate-range elections, instance generators with closed-form
//! ground truth, and a small experiment harness for welfare/coverage
//! trade-off curves.

pub mod axioms;
pub mod bitset;
pub mod election;
pub mod error;
pub mod experiment;
pub mod forge;
pub mod greedy;
pub mod greedy_ejr;
pub mod oracle;
pub mod vcr;

pub use bitset::BitSet;
pub use election::{
    approval_score, coverage, read_election, social_welfare, write_election, AgentPoint,
    Committee, Election, ElectionDoc, Threshold, VcrBlock,
};
pub use error::{Error, Result};

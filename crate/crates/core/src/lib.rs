//! Exact simulation and verification of single-copy reductions between
//! oblivious transfer (OT), oblivious keys (OK) and the PR box.

pub mod bit;
pub mod dist;
pub mod error;
pub mod model;
pub mod nonlocality;
pub mod optimality;
mod pool;
pub mod primitives;
pub mod protocols;
pub mod verifier;
pub mod prob;

pub use bit::{Bit, Symbol};
pub use dist::{dist_equal, dist_from_worlds, marginal, FiniteDist, Record};
pub use error::{Error, Result};
pub use model::{Direction, Observation, Party, Transcript, View, World};
pub use primitives::{is_non_signaling, Kind, Primitive};
pub use prob::Prob;

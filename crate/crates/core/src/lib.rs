//! Contextuality and counterfactual definiteness for systems of random variables.
//!
//! A system records, for every context, the joint distribution of the
//! contents measured in it. This crate decides, in exact rational arithmetic:
//!
//! * strong consistent connectedness ([`consistency::check_scc`]),
//! * noncontextuality through reduced couplings or multimaximally connected
//!   couplings ([`lp::decide_noncontextual`]),
//! * counterfactual definiteness and its generalization
//!   ([`counterfactual::check_cfd`], [`counterfactual::check_gcfd`]),
//! * the closed-form criterion for cyclic systems of rank 3 ([`cyclic`]).

pub mod consistency;
pub mod corpus;
pub mod counterfactual;
pub mod cyclic;
pub mod document;
pub mod lp;
pub mod model;
pub mod rational;
pub mod report;
pub mod cli;

pub use model::{ContextBlock, Coupling, Marginal, Support, System, Variable};
pub use rational::Rational;

//! Deception games between a defender and a population of users with
//! private types: best responses, credible signal generators, the optimal
//! generator as a linear program, belief-space geometry, modulator design
//! and the honeypot/insider case study.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod design;
pub mod error;
pub mod geometry;
pub mod insider;
pub mod lp;
pub mod model;
pub mod policies;

pub use error::{Error, Invariant, Result};
pub use model::{
    bayes_update, best_response, evaluate_generator, expected_posterior_belief,
    expected_posterior_utility, modulated_utilities, prior_utility, BasicGame, BeliefProfile,
    Generator, Modulator, Outcome, TypeBelief, UtilityTable, DROP_OUT,
};
pub use policies::{check_ic, enumerate_policies, PolicySpace, SecurityPolicy};

//! The security-policy signal space and incentive-compatibility checks.
//!
//! A policy assigns one action to every type. Policies are numbered by their
//! mixed-radix encoding with the first type as the most significant digit, so
//! for two types and actions `{DO, AC}` the order is
//! `(DO,DO), (DO,AC), (AC,DO), (AC,AC)`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::model::{
    best_response, hat_u, BasicGame, BeliefProfile, Generator, Modulator, PROB_TOL, UTIL_TOL,
};

/// Largest policy space that will be enumerated.
pub const MAX_POLICIES: usize = 1_000_000;

/// The `K^M` policies of a game with `M` types and `K` actions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PolicySpace {
    types: usize,
    actions: usize,
    len: usize,
}

impl PolicySpace {
    pub fn new(types: usize, actions: usize) -> Result<Self> {
        let too_large = Error::SpaceTooLarge { types, actions };
        let mut len: usize = 1;
        for _ in 0..types {
            len = len.checked_mul(actions).ok_or_else(|| too_large.clone())?;
            if len > MAX_POLICIES {
                return Err(too_large);
            }
        }
        Ok(PolicySpace {
            types,
            actions,
            len,
        })
    }

    pub fn len(&self) -> usize {
        self.len
    }
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }
    pub fn num_types(&self) -> usize {
        self.types
    }
    pub fn num_actions(&self) -> usize {
        self.actions
    }

    /// Action policy `s` prescribes to type `ty`.
    #[inline]
    pub fn action_of(&self, s: usize, ty: usize) -> usize {
        let mut rest = s;
        for _ in ty + 1..self.types {
            rest /= self.actions;
        }
        rest % self.actions
    }

    /// Index of the policy with the given assignment.
    pub fn index_of(&self, assignment: &[usize]) -> usize {
        assert_eq!(assignment.len(), self.types, "assignment length");
        assignment.iter().fold(0, |acc, &a| {
            assert!(a < self.actions, "action index out of range");
            acc * self.actions + a
        })
    }

    pub fn policy(&self, s: usize) -> SecurityPolicy {
        SecurityPolicy {
            assignment: (0..self.types).map(|t| self.action_of(s, t)).collect(),
        }
    }
}

/// Action prescribed to each type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SecurityPolicy {
    pub assignment: Vec<usize>,
}

pub fn enumerate_policies(types: usize, actions: usize) -> Result<Vec<SecurityPolicy>> {
    let space = PolicySpace::new(types, actions)?;
    Ok((0..space.len()).map(|s| space.policy(s)).collect())
}

/// An (IC) constraint that fails by more than the tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct IcViolation {
    pub policy: usize,
    pub user_type: usize,
    pub deviation: usize,
    pub slack: f64,
}

/// All `(policy, type, deviation)` triples whose (IC) sum is below `-1e-9`.
pub fn check_ic(
    generator: &Generator,
    game: &BasicGame,
    beliefs: &BeliefProfile,
    modulator: &Modulator,
) -> Vec<IcViolation> {
    let space = generator.space();
    let (n, m, k) = (game.num_states(), game.num_types(), game.num_actions());
    let mut out = Vec::new();
    for s in 0..space.len() {
        for l in 0..m {
            let a = space.action_of(s, l);
            let prior = beliefs.b_u(l);
            for h in (0..k).filter(|&h| h != a) {
                let slack: f64 = (0..n)
                    .map(|x| {
                        (hat_u(game, modulator, x, l, a) - hat_u(game, modulator, x, l, h))
                            * generator.prob(s, x)
                            * prior[x]
                    })
                    .sum();
                if slack < -UTIL_TOL {
                    out.push(IcViolation {
                        policy: s,
                        user_type: l,
                        deviation: h,
                        slack,
                    });
                }
            }
        }
    }
    out
}

/// Policies sent with probability above `tol` in some state.
pub fn enforceable_policies(generator: &Generator, tol: f64) -> Vec<usize> {
    (0..generator.num_signals())
        .filter(|&s| (0..generator.num_states()).any(|x| generator.prob(s, x) > tol))
        .collect()
}

/// [`enforceable_policies`] at the default tolerance.
pub fn enforceable(generator: &Generator) -> Vec<usize> {
    enforceable_policies(generator, PROB_TOL)
}

/// Zero-information generator on the policy giving each type its best
/// response to his own prior. Always credible.
pub fn prior_response_generator(
    game: &BasicGame,
    beliefs: &BeliefProfile,
    modulator: &Modulator,
) -> Result<Generator> {
    let space = game.policy_space()?;
    let n = game.num_states();
    let assignment: Vec<usize> = (0..game.num_types())
        .map(|t| {
            let w: Vec<f64> = (0..n)
                .map(|x| beliefs.b()[x] * beliefs.b_d().get(x, t))
                .collect();
            best_response(game, modulator, t, beliefs.b_u(t), Some(&w))
        })
        .collect();
    Ok(Generator::zero_information(
        space,
        n,
        space.index_of(&assignment),
    ))
}

/// Reveals the state: in state `x` it sends the policy of best responses to
/// certainty about `x`.
pub fn full_information_generator(
    game: &BasicGame,
    beliefs: &BeliefProfile,
    modulator: &Modulator,
) -> Result<Generator> {
    let space = game.policy_space()?;
    let n = game.num_states();
    let mut rows = Vec::with_capacity(n);
    for x in 0..n {
        let mut vertex = vec![0.0; n];
        vertex[x] = 1.0;
        let assignment: Vec<usize> = (0..game.num_types())
            .map(|t| {
                let mut w = vec![0.0; n];
                w[x] = beliefs.b_d().get(x, t);
                best_response(game, modulator, t, &vertex, Some(&w))
            })
            .collect();
        let mut row = vec![0.0; space.len()];
        row[space.index_of(&assignment)] = 1.0;
        rows.push(row);
    }
    Generator::new(space, rows)
}

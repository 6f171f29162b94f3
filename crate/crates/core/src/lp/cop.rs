use alloc::vec;
use alloc::vec::Vec;

use super::simplex::{solve_lp, LinearProgram, LpStatus, Relation};
use crate::error::{Error, Invariant, Result};
use crate::model::{
    check_instance, hat_d, hat_u, BasicGame, BeliefProfile, Generator, Modulator, TypeBelief,
    DROP_OUT, PROB_TOL, UTIL_TOL,
};
use crate::policies::PolicySpace;

/// Below this a belief entry counts as zero support.
const SUPPORT_TOL: f64 = 1e-12;

/// Capacity bounds on the optimal design value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub lower: f64,
    pub upper: f64,
}

impl Bounds {
    pub fn contains(&self, r: f64, tol: f64) -> bool {
        self.lower - tol <= r && r <= self.upper + tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub status: LpStatus,
    pub objective_value: f64,
    pub generator: Option<Generator>,
    /// Beliefs implied by the joint-belief relaxation.
    pub recovered_beliefs: Option<BeliefProfile>,
    /// How far the relaxation's defender- and user-side generators disagree.
    pub consistency_gap: Option<f64>,
    pub bounds: Bounds,
    /// `η(s,x)` as `[x][s]`.
    pub eta: Option<Vec<Vec<f64>>>,
    /// `η_U(θ,s,x)` as `[θ][x][s]`.
    pub eta_u: Option<Vec<Vec<Vec<f64>>>>,
}

/// Lower and upper bounds on the design value for any beliefs.
pub fn design_capacity_bounds(game: &BasicGame, b_d: &TypeBelief, modulator: &Modulator) -> Bounds {
    let (n, m, k) = (game.num_states(), game.num_types(), game.num_actions());
    assert_eq!(b_d.num_states(), n, "b_D/game state mismatch");
    let per_state = |f: &dyn Fn(usize, usize) -> f64| -> Vec<f64> {
        (0..n)
            .map(|x| (0..m).map(|t| b_d.get(x, t) * f(x, t)).sum())
            .collect()
    };
    let best = per_state(&|x, t| (0..k).map(|a| game.v_d(x, t, a)).fold(f64::MIN, f64::max));
    let worst = per_state(&|x, t| (0..k).map(|a| game.v_d(x, t, a)).fold(f64::MAX, f64::min));
    let drop_out = per_state(&|x, t| game.v_d(x, t, DROP_OUT));
    let r_bar = best.iter().copied().fold(f64::MIN, f64::max);
    let r_low = worst.iter().copied().fold(f64::MAX, f64::min);
    let max_drop_out = drop_out.iter().copied().fold(f64::MIN, f64::max);
    let mut c_low = f64::MIN;
    for t in 0..m {
        for a in 0..k {
            let c = (0..n)
                .map(|x| game.v_u(x, t, a) - game.v_u(x, t, DROP_OUT))
                .fold(f64::MIN, f64::max);
            c_low = c_low.max(c);
        }
    }
    Bounds {
        lower: r_low,
        upper: max_drop_out.max(r_bar + modulator.gamma() * c_low),
    }
}

/// Actions within tolerance of the best response to `belief`.
fn tied_best(game: &BasicGame, modulator: &Modulator, t: usize, belief: &[f64]) -> Vec<bool> {
    let n = game.num_states();
    let values: Vec<f64> = (0..game.num_actions())
        .map(|a| (0..n).map(|x| belief[x] * hat_u(game, modulator, x, t, a)).sum())
        .collect();
    let best = values.iter().copied().fold(f64::MIN, f64::max);
    values.iter().map(|&v| v >= best - UTIL_TOL).collect()
}

/// Adds one (IC) row per `(policy, type, deviation)` over the columns chosen
/// by `col(t, x, s)`, weighting state `x` by `weight(t, x)`.
fn add_ic_rows(
    lp: &mut LinearProgram,
    game: &BasicGame,
    modulator: &Modulator,
    space: PolicySpace,
    col: impl Fn(usize, usize, usize) -> usize,
    weight: impl Fn(usize, usize) -> f64,
) {
    let (n, m, k) = (game.num_states(), game.num_types(), game.num_actions());
    let width = lp.num_vars();
    for s in 0..space.len() {
        for l in 0..m {
            let a = space.action_of(s, l);
            for h in (0..k).filter(|&h| h != a) {
                let mut row = vec![0.0; width];
                let mut binding = false;
                for x in 0..n {
                    let w = weight(l, x);
                    if w == 0.0 {
                        continue;
                    }
                    let coef = (hat_u(game, modulator, x, l, a) - hat_u(game, modulator, x, l, h)) * w;
                    row[col(l, x, s)] = coef;
                    binding |= coef < 0.0;
                }
                if binding {
                    lp.add_constraint(row, Relation::Ge, 0.0);
                }
            }
        }
    }
}

fn objective_coeff(
    game: &BasicGame,
    modulator: &Modulator,
    b_d: &TypeBelief,
    space: PolicySpace,
    x: usize,
    s: usize,
) -> f64 {
    (0..game.num_types())
        .map(|t| b_d.get(x, t) * hat_d(game, modulator, x, t, space.action_of(s, t)))
        .sum()
}

/// Clears round-off below `SUPPORT_TOL` and renormalizes.
fn clean_row(row: &mut [f64]) {
    for v in row.iter_mut() {
        if *v < SUPPORT_TOL {
            *v = 0.0;
        }
    }
    let sum: f64 = row.iter().sum();
    if sum > 0.0 {
        row.iter_mut().for_each(|v| *v /= sum);
    }
}

/// The credible generator maximizing the defender's expected posterior
/// utility for fixed beliefs and modulator.
///
/// When a type rules out a state the defender thinks possible, signals that
/// reach that state may only prescribe to that type an action that is a best
/// response to his prior, since a signal seen only there leaves him on it.
pub fn optimal_generator(
    game: &BasicGame,
    beliefs: &BeliefProfile,
    modulator: &Modulator,
) -> Result<SolveReport> {
    check_instance(game, beliefs, modulator)?;
    let space = game.policy_space()?;
    let (n, m) = (game.num_states(), game.num_types());
    let ns = space.len();
    let b = beliefs.b();
    let b_d = beliefs.b_d();

    let objective: Vec<f64> = (0..n)
        .flat_map(|x| (0..ns).map(move |s| (x, s)))
        .map(|(x, s)| b[x] * objective_coeff(game, modulator, b_d, space, x, s))
        .collect();
    let mut lp = LinearProgram::maximize(objective);
    add_ic_rows(
        &mut lp,
        game,
        modulator,
        space,
        |_, x, s| x * ns + s,
        |t, x| beliefs.b_u(t)[x],
    );
    for x in 0..n {
        let mut row = vec![0.0; n * ns];
        row[x * ns..(x + 1) * ns].iter_mut().for_each(|v| *v = 1.0);
        lp.add_constraint(row, Relation::Eq, 1.0);
    }
    for t in 0..m {
        let prior = beliefs.b_u(t);
        if prior.iter().zip(b).all(|(&u, &bx)| u > SUPPORT_TOL || bx <= SUPPORT_TOL) {
            continue;
        }
        let allowed = tied_best(game, modulator, t, prior);
        for x in (0..n).filter(|&x| prior[x] <= SUPPORT_TOL && b[x] > SUPPORT_TOL) {
            for s in (0..ns).filter(|&s| !allowed[space.action_of(s, t)]) {
                lp.set_bounds(x * ns + s, 0.0, 0.0);
            }
        }
    }

    let bounds = design_capacity_bounds(game, b_d, modulator);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(SolveReport {
            status: sol.status,
            objective_value: sol.objective,
            generator: None,
            recovered_beliefs: None,
            consistency_gap: None,
            bounds,
            eta: None,
            eta_u: None,
        });
    }
    let rows: Vec<Vec<f64>> = sol
        .values
        .chunks(ns)
        .map(|r| {
            let mut r = r.to_vec();
            clean_row(&mut r);
            r
        })
        .collect();
    Ok(SolveReport {
        status: LpStatus::Optimal,
        objective_value: sol.objective,
        generator: Some(Generator::new(space, rows)?),
        recovered_beliefs: None,
        consistency_gap: None,
        bounds,
        eta: None,
        eta_u: None,
    })
}

/// Joint design of beliefs and generator through the substitution
/// `η(s,x) = b(x)π(s|x)`, `η_U(θ,s,x) = b_U(x|θ)π(s|x)`.
///
/// The program treats `η` and every `η_U(θ,·,·)` as independent
/// distributions, so it is a relaxation: nothing forces them to come from one
/// generator. `consistency_gap` measures the disagreement.
pub fn joint_belief_lp(
    game: &BasicGame,
    b_d: &TypeBelief,
    modulator: &Modulator,
) -> Result<SolveReport> {
    if !modulator.is_zero_transfer() {
        return Err(Error::PreconditionViolated(
            "the joint-belief program needs a zero transfer",
        ));
    }
    let space = game.policy_space()?;
    let (n, m) = (game.num_states(), game.num_types());
    if b_d.num_states() != n || b_d.num_types() != m {
        return Err(Invariant::Dimensions("b_D does not match the game".into()).into());
    }
    let ns = space.len();
    let block = n * ns;
    let width = block * (1 + m);

    let mut objective = vec![0.0; width];
    for x in 0..n {
        for s in 0..ns {
            objective[x * ns + s] = objective_coeff(game, modulator, b_d, space, x, s);
        }
    }
    let mut lp = LinearProgram::maximize(objective);
    let mut row = vec![0.0; width];
    row[..block].iter_mut().for_each(|v| *v = 1.0);
    lp.add_constraint(row, Relation::Eq, 1.0);
    for t in 0..m {
        let mut row = vec![0.0; width];
        let start = block * (1 + t);
        row[start..start + block].iter_mut().for_each(|v| *v = 1.0);
        lp.add_constraint(row, Relation::Eq, 1.0);
    }
    add_ic_rows(
        &mut lp,
        game,
        modulator,
        space,
        |t, x, s| block * (1 + t) + x * ns + s,
        |_, _| 1.0,
    );

    let bounds = design_capacity_bounds(game, b_d, modulator);
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Ok(SolveReport {
            status: sol.status,
            objective_value: sol.objective,
            generator: None,
            recovered_beliefs: None,
            consistency_gap: None,
            bounds,
            eta: None,
            eta_u: None,
        });
    }
    let table = |offset: usize| -> Vec<Vec<f64>> {
        (0..n)
            .map(|x| {
                (0..ns)
                    .map(|s| sol.values[offset + x * ns + s].max(0.0))
                    .collect()
            })
            .collect()
    };
    let eta = table(0);
    let eta_u: Vec<Vec<Vec<f64>>> = (0..m).map(|t| table(block * (1 + t))).collect();
    let marginal = |tab: &[Vec<f64>]| -> Vec<f64> {
        let raw: Vec<f64> = tab.iter().map(|r| r.iter().sum()).collect();
        let total: f64 = raw.iter().sum();
        raw.into_iter().map(|v| v / total).collect()
    };
    let b = marginal(&eta);
    let b_u: Vec<Vec<f64>> = eta_u.iter().map(|tab| marginal(tab)).collect();

    let mut gap: f64 = 0.0;
    for t in 0..m {
        for x in 0..n {
            if b[x] <= PROB_TOL || b_u[t][x] <= PROB_TOL {
                continue;
            }
            for s in 0..ns {
                gap = gap.max((eta[x][s] / b[x] - eta_u[t][x][s] / b_u[t][x]).abs());
            }
        }
    }

    let rows: Vec<Vec<f64>> = (0..n)
        .map(|x| {
            if b[x] > PROB_TOL {
                let mut r: Vec<f64> = eta[x].iter().map(|v| v / b[x]).collect();
                clean_row(&mut r);
                r
            } else {
                let mut r = vec![0.0; ns];
                r[0] = 1.0;
                r
            }
        })
        .collect();

    Ok(SolveReport {
        status: LpStatus::Optimal,
        objective_value: sol.objective,
        generator: Some(Generator::new(space, rows)?),
        recovered_beliefs: Some(BeliefProfile::new(b, b_u, b_d.clone())?),
        consistency_gap: Some(gap),
        bounds,
        eta: Some(eta),
        eta_u: Some(eta_u),
    })
}

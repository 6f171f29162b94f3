//! Mechanism design on top of the generator program: choosing the incentive
//! modulator, the overt belief manipulation and covert reported beliefs.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::{concavify, manipulation_of, prior_utility_pwl, Manipulation};
use crate::lp::{optimal_generator, LpStatus, SolveReport};
use crate::model::{BasicGame, BeliefProfile, Generator, Modulator, TypeBelief};
use crate::policies::prior_response_generator;

/// `v` rounded to the nearest integer, without `std`.
fn round_i64(v: f64) -> i64 {
    if v >= 0.0 {
        (v + 0.5) as i64
    } else {
        -((-v + 0.5) as i64)
    }
}

/// `lo, lo + step, ..., hi` (inclusive up to round-off). When `1/step` is an
/// integer the points are computed as `k / (1/step)` so that e.g. a step of
/// 0.01 yields exactly the decimals `k/100`.
pub fn grid_range(lo: f64, step: f64, hi: f64) -> Result<Vec<f64>> {
    if !(lo.is_finite() && step.is_finite() && hi.is_finite()) || step <= 0.0 || hi < lo {
        return Err(Error::EmptyGrid);
    }
    let count = ((hi - lo) / step + 1e-9) as usize + 1;
    if count > 10_000_000 {
        return Err(Error::EmptyGrid);
    }
    let inv = 1.0 / step;
    let inv_r = round_i64(inv) as f64;
    let exact = inv_r >= 1.0 && (inv - inv_r).abs() <= 1e-9 * inv_r;
    let start = round_i64(lo * inv_r);
    let exact = exact && (lo * inv_r - start as f64).abs() <= 1e-9;
    Ok((0..count)
        .map(|i| {
            if exact {
                (start + i as i64) as f64 / inv_r
            } else {
                lo + i as f64 * step
            }
        })
        .collect())
}

/// Default transfer grid: step 0.01 over `±(max v_U - min v_U)` for every
/// substantive action.
pub fn default_c_grid(game: &BasicGame) -> Vec<Vec<f64>> {
    let u = game.utility_u().as_slice();
    let hi = u.iter().copied().fold(f64::MIN, f64::max);
    let lo = u.iter().copied().fold(f64::MAX, f64::min);
    let k = round_i64(((hi - lo) * 100.0).max(0.0)) + 1;
    let values: Vec<f64> = (-k..=k).map(|i| i as f64 / 100.0).collect();
    vec![values; game.num_actions() - 1]
}

fn lexicographic_less(a: &[f64], b: &[f64]) -> bool {
    for (x, y) in a.iter().zip(b) {
        if x != y {
            return x < y;
        }
    }
    false
}

/// Best modulator found on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulatorChoice {
    pub modulator: Modulator,
    /// `max_p ṽ_D(p)` under the chosen modulator.
    pub value: f64,
    pub candidates_evaluated: usize,
}

/// Exhaustive search over `c_grid`, one value list per substantive action
/// (the drop-out transfer is always zero). Each candidate is scored by the
/// best prior utility an overt manipulation can reach; ties keep the
/// lexicographically smallest transfer vector.
pub fn design_modulator(
    game: &BasicGame,
    b_d: &TypeBelief,
    gamma: f64,
    c_grid: &[Vec<f64>],
) -> Result<ModulatorChoice> {
    let k = game.num_actions();
    if c_grid.len() != k - 1 || c_grid.iter().any(Vec::is_empty) {
        return Err(Error::EmptyGrid);
    }
    let total: usize = c_grid.iter().map(Vec::len).product();
    let mut best: Option<(Vec<f64>, f64)> = None;
    let mut c = vec![0.0; k];
    for mut idx in 0..total {
        for a in (1..k).rev() {
            let list = &c_grid[a - 1];
            c[a] = list[idx % list.len()];
            idx /= list.len();
        }
        let modulator = Modulator::new(c.clone(), gamma)?;
        let value = manipulation_of(&prior_utility_pwl(game, b_d, &modulator)?).value;
        let better = match &best {
            None => true,
            Some((bc, bv)) => {
                value > bv + 1e-12 || ((value - bv).abs() <= 1e-12 && lexicographic_less(&c, bc))
            }
        };
        if better {
            best = Some((c.clone(), value));
        }
    }
    let (c, value) = best.expect("grid is nonempty");
    Ok(ModulatorChoice {
        modulator: Modulator::new(c, gamma)?,
        value,
        candidates_evaluated: total,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StageLog {
    pub candidates_evaluated: usize,
    /// Stage-one score of the chosen modulator.
    pub modulator_value: f64,
    /// Manipulation chosen in stage two.
    pub manipulation: Manipulation,
}

/// Modulator, overt prior and generator chosen together.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmDesign {
    pub modulator: Modulator,
    pub manipulated_beliefs: BeliefProfile,
    pub generator: Generator,
    pub value: f64,
    pub stage_log: StageLog,
}

/// Two-stage design for two-state games: pick the modulator, then move the
/// common prior to the maximizer of the prior utility. No signal can improve
/// on that prior, so the generator carries no information.
pub fn design_gmm(
    game: &BasicGame,
    b_d: &TypeBelief,
    gamma: f64,
    c_grid: &[Vec<f64>],
) -> Result<GmmDesign> {
    let choice = design_modulator(game, b_d, gamma, c_grid)?;
    let manipulation = manipulation_of(&prior_utility_pwl(game, b_d, &choice.modulator)?);
    let beliefs = BeliefProfile::overt(manipulation.belief(), b_d.clone())?;
    let generator = prior_response_generator(game, &beliefs, &choice.modulator)?;
    Ok(GmmDesign {
        value: manipulation.value,
        manipulated_beliefs: beliefs,
        generator,
        stage_log: StageLog {
            candidates_evaluated: choice.candidates_evaluated,
            modulator_value: choice.value,
            manipulation,
        },
        modulator: choice.modulator,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceReport {
    /// `max_p V_D(p)`: generator and manipulation designed jointly.
    pub max_joint: f64,
    /// `max_p ṽ_D(p)`: manipulation alone.
    pub max_manipulator_only: f64,
    pub gap: f64,
}

pub fn verify_equivalence(
    game: &BasicGame,
    b_d: &TypeBelief,
    modulator: &Modulator,
) -> Result<EquivalenceReport> {
    let f = prior_utility_pwl(game, b_d, modulator)?;
    let closure = concavify(&f);
    let max_joint = closure
        .values()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let max_manipulator_only = f.argmax().1;
    Ok(EquivalenceReport {
        max_joint,
        max_manipulator_only,
        gap: max_joint - max_manipulator_only,
    })
}

/// Optimal generator when users hold reported beliefs `b_U` that may differ
/// from the true distribution `b`.
pub fn covert_design(
    game: &BasicGame,
    beliefs: &BeliefProfile,
    modulator: &Modulator,
) -> Result<SolveReport> {
    optimal_generator(game, beliefs, modulator)
}

/// Best reported belief on a grid, for a two-state game.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportedBelief {
    /// Reported `b_U(x_1)`, shared by every type.
    pub p_u: f64,
    pub report: SolveReport,
}

/// Searches `p_U = i/(points - 1)` and keeps the best covert design value;
/// ties keep the smallest `p_U`.
pub fn best_reported_belief(
    game: &BasicGame,
    b: &[f64],
    b_d: &TypeBelief,
    modulator: &Modulator,
    points: usize,
) -> Result<ReportedBelief> {
    if game.num_states() != 2 {
        return Err(Error::UnsupportedDimension {
            states: game.num_states(),
        });
    }
    if points < 2 {
        return Err(Error::EmptyGrid);
    }
    let mut best: Option<ReportedBelief> = None;
    for i in 0..points {
        let p_u = i as f64 / (points - 1) as f64;
        let beliefs = BeliefProfile::new(
            b.to_vec(),
            vec![vec![p_u, 1.0 - p_u]; game.num_types()],
            b_d.clone(),
        )?;
        let report = covert_design(game, &beliefs, modulator)?;
        if report.status != LpStatus::Optimal {
            continue;
        }
        if best
            .as_ref()
            .is_none_or(|b| report.objective_value > b.report.objective_value + 1e-12)
        {
            best = Some(ReportedBelief { p_u, report });
        }
    }
    best.ok_or(Error::NumericalFailure {
        residual: f64::INFINITY,
    })
}

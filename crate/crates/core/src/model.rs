//! Game primitives: the basic game, belief statistics, the incentive
//! modulator and signal generators, plus the user's Bayesian update and best
//! response and the defender's prior / expected posterior utilities.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Invariant, Result};
use crate::policies::PolicySpace;

/// Index of the drop-out action in every game.
pub const DROP_OUT: usize = 0;
/// Absolute tolerance for probability comparisons.
pub const PROB_TOL: f64 = 1e-9;
/// Absolute tolerance for utility comparisons (best-response ties, IC slack).
pub const UTIL_TOL: f64 = 1e-9;
/// Tolerance on the sum of a belief vector.
pub const NORM_TOL: f64 = 1e-12;

/// Dense `(state, type, action)` table of payoffs.
#[derive(Debug, Clone, PartialEq)]
pub struct UtilityTable {
    states: usize,
    types: usize,
    actions: usize,
    data: Vec<f64>,
}

impl UtilityTable {
    pub fn new(states: usize, types: usize, actions: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != states * types * actions {
            return Err(Invariant::Dimensions(format!(
                "utility table has {} entries, expected {states}x{types}x{actions}",
                data.len()
            ))
            .into());
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Invariant::NonFinite("utility table".into()).into());
        }
        Ok(UtilityTable {
            states,
            types,
            actions,
            data,
        })
    }

    /// Builds a table from `[state][type][action]` nesting.
    pub fn from_nested(nested: &[Vec<Vec<f64>>]) -> Result<Self> {
        let states = nested.len();
        let types = nested.first().map_or(0, Vec::len);
        let actions = nested
            .first()
            .and_then(|t| t.first())
            .map_or(0, Vec::len);
        let mut data = Vec::with_capacity(states * types * actions);
        for (x, per_state) in nested.iter().enumerate() {
            if per_state.len() != types {
                return Err(Invariant::Dimensions(format!(
                    "state {x} has {} type rows, expected {types}",
                    per_state.len()
                ))
                .into());
            }
            for (t, row) in per_state.iter().enumerate() {
                if row.len() != actions {
                    return Err(Invariant::Dimensions(format!(
                        "state {x}, type {t} has {} actions, expected {actions}",
                        row.len()
                    ))
                    .into());
                }
                data.extend_from_slice(row);
            }
        }
        Self::new(states, types, actions, data)
    }

    #[inline]
    pub fn get(&self, x: usize, t: usize, a: usize) -> f64 {
        self.data[(x * self.types + t) * self.actions + a]
    }

    pub fn to_nested(&self) -> Vec<Vec<Vec<f64>>> {
        (0..self.states)
            .map(|x| {
                (0..self.types)
                    .map(|t| (0..self.actions).map(|a| self.get(x, t, a)).collect())
                    .collect()
            })
            .collect()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Finite states, types and actions with both players' utilities.
///
/// Action 0 is the drop-out action `a_DO`.
#[derive(Debug, Clone, PartialEq)]
pub struct BasicGame {
    states: Vec<String>,
    types: Vec<String>,
    actions: Vec<String>,
    utility_d: UtilityTable,
    utility_u: UtilityTable,
}

impl BasicGame {
    pub fn new(
        states: Vec<String>,
        types: Vec<String>,
        actions: Vec<String>,
        utility_d: UtilityTable,
        utility_u: UtilityTable,
    ) -> Result<Self> {
        let (n, m, k) = (states.len(), types.len(), actions.len());
        if n == 0 || m == 0 {
            return Err(
                Invariant::Dimensions("need at least one state and one type".into()).into(),
            );
        }
        if k < 2 {
            return Err(Invariant::Dimensions(
                "need the drop-out action plus at least one other action".into(),
            )
            .into());
        }
        for (name, table) in [("utility_D", &utility_d), ("utility_U", &utility_u)] {
            if (table.states, table.types, table.actions) != (n, m, k) {
                return Err(Invariant::Dimensions(format!(
                    "{name} is {}x{}x{}, expected {n}x{m}x{k}",
                    table.states, table.types, table.actions
                ))
                .into());
            }
        }
        Ok(BasicGame {
            states,
            types,
            actions,
            utility_d,
            utility_u,
        })
    }

    /// Game with generated labels `x1.., t1.., DO, a1..`.
    pub fn unlabeled(utility_d: UtilityTable, utility_u: UtilityTable) -> Result<Self> {
        let labels = |prefix: &str, n: usize| -> Vec<String> {
            (1..=n).map(|i| format!("{prefix}{i}")).collect()
        };
        let actions = core::iter::once(String::from("DO"))
            .chain((1..utility_d.actions).map(|i| format!("a{i}")))
            .collect();
        Self::new(
            labels("x", utility_d.states),
            labels("t", utility_d.types),
            actions,
            utility_d,
            utility_u,
        )
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }
    pub fn num_types(&self) -> usize {
        self.types.len()
    }
    pub fn num_actions(&self) -> usize {
        self.actions.len()
    }
    pub fn states(&self) -> &[String] {
        &self.states
    }
    pub fn types(&self) -> &[String] {
        &self.types
    }
    pub fn actions(&self) -> &[String] {
        &self.actions
    }
    pub fn utility_d(&self) -> &UtilityTable {
        &self.utility_d
    }
    pub fn utility_u(&self) -> &UtilityTable {
        &self.utility_u
    }

    #[inline]
    pub fn v_d(&self, x: usize, t: usize, a: usize) -> f64 {
        self.utility_d.get(x, t, a)
    }
    #[inline]
    pub fn v_u(&self, x: usize, t: usize, a: usize) -> f64 {
        self.utility_u.get(x, t, a)
    }

    pub fn policy_space(&self) -> Result<PolicySpace> {
        PolicySpace::new(self.num_types(), self.num_actions())
    }
}

pub(crate) fn check_distribution(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Invariant::NonFinite(String::from(what)).into());
    }
    let sum: f64 = p.iter().sum();
    if p.iter().any(|&v| v < 0.0) || (sum - 1.0).abs() > NORM_TOL {
        return Err(Invariant::Normalization(String::from(what)).into());
    }
    Ok(())
}

/// The defender's belief over user types, one distribution per state.
#[derive(Debug, Clone, PartialEq)]
pub struct TypeBelief {
    rows: Vec<Vec<f64>>,
}

impl TypeBelief {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Invariant::Dimensions(format!(
                    "b_D row for state {x} has {} entries, expected {m}",
                    row.len()
                ))
                .into());
            }
            check_distribution(row, &format!("b_D(.|x{})", x + 1))?;
        }
        Ok(TypeBelief { rows })
    }

    /// The same type distribution at every state.
    pub fn state_independent(q: &[f64], states: usize) -> Result<Self> {
        Self::new(vec![q.to_vec(); states])
    }

    #[inline]
    pub fn get(&self, x: usize, t: usize) -> f64 {
        self.rows[x][t]
    }
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }
    pub fn num_states(&self) -> usize {
        self.rows.len()
    }
    pub fn num_types(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }
}

/// True state distribution `b`, the users' initial beliefs `b_U(.|θ)` and the
/// defender's type belief `b_D(.|x)`.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefProfile {
    b: Vec<f64>,
    b_u: Vec<Vec<f64>>,
    b_d: TypeBelief,
}

impl BeliefProfile {
    pub fn new(b: Vec<f64>, b_u: Vec<Vec<f64>>, b_d: TypeBelief) -> Result<Self> {
        check_distribution(&b, "b")?;
        let n = b.len();
        if b_d.num_states() != n {
            return Err(Invariant::Dimensions(format!(
                "b_D has {} state rows, expected {n}",
                b_d.num_states()
            ))
            .into());
        }
        if b_u.len() != b_d.num_types() {
            return Err(Invariant::Dimensions(format!(
                "b_U has {} type rows, b_D has {} types",
                b_u.len(),
                b_d.num_types()
            ))
            .into());
        }
        for (t, row) in b_u.iter().enumerate() {
            if row.len() != n {
                return Err(Invariant::Dimensions(format!(
                    "b_U(.|t{}) has {} entries, expected {n}",
                    t + 1,
                    row.len()
                ))
                .into());
            }
            check_distribution(row, &format!("b_U(.|t{})", t + 1))?;
        }
        Ok(BeliefProfile { b, b_u, b_d })
    }

    /// Every type shares the defender's state distribution.
    pub fn overt(b: Vec<f64>, b_d: TypeBelief) -> Result<Self> {
        let b_u = vec![b.clone(); b_d.num_types()];
        Self::new(b, b_u, b_d)
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }
    pub fn b_u(&self, t: usize) -> &[f64] {
        &self.b_u[t]
    }
    pub fn b_u_rows(&self) -> &[Vec<f64>] {
        &self.b_u
    }
    pub fn b_d(&self) -> &TypeBelief {
        &self.b_d
    }

    pub fn is_overt(&self) -> bool {
        self.b_u
            .iter()
            .all(|row| row.iter().zip(&self.b).all(|(u, b)| (u - b).abs() <= PROB_TOL))
    }

    pub fn num_states(&self) -> usize {
        self.b.len()
    }
    pub fn num_types(&self) -> usize {
        self.b_u.len()
    }
}

/// Utility transfer `c` (one entry per action) with scaling factor `γ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Modulator {
    c: Vec<f64>,
    gamma: f64,
}

impl Modulator {
    pub fn new(c: Vec<f64>, gamma: f64) -> Result<Self> {
        if c.iter().any(|v| !v.is_finite()) || !gamma.is_finite() {
            return Err(Invariant::NonFinite("modulator".into()).into());
        }
        if c.len() < 2 {
            return Err(Invariant::Dimensions("modulator needs one entry per action".into()).into());
        }
        if c[DROP_OUT] != 0.0 {
            return Err(Invariant::ModulationFeasibility.into());
        }
        if gamma < 0.0 {
            return Err(Invariant::NegativeGamma.into());
        }
        Ok(Modulator { c, gamma })
    }

    /// No transfer on any action.
    pub fn zero(actions: usize) -> Self {
        Modulator {
            c: vec![0.0; actions.max(2)],
            gamma: 0.0,
        }
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn is_zero_transfer(&self) -> bool {
        self.c.iter().all(|&v| v == 0.0)
    }
}

/// `π(s|x)`: one distribution over the policy space per state.
#[derive(Debug, Clone, PartialEq)]
pub struct Generator {
    space: PolicySpace,
    pi: Vec<Vec<f64>>,
}

impl Generator {
    pub fn new(space: PolicySpace, pi: Vec<Vec<f64>>) -> Result<Self> {
        for (x, row) in pi.iter().enumerate() {
            if row.len() != space.len() {
                return Err(Invariant::Dimensions(format!(
                    "generator row for state {x} has {} entries, expected {}",
                    row.len(),
                    space.len()
                ))
                .into());
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Invariant::NonFinite("generator".into()).into());
            }
            let sum: f64 = row.iter().sum();
            if row.iter().any(|&v| v < 0.0) || (sum - 1.0).abs() > PROB_TOL {
                return Err(Invariant::Normalization(format!("pi(.|x{})", x + 1)).into());
            }
        }
        if pi.is_empty() {
            return Err(Invariant::Dimensions("generator has no states".into()).into());
        }
        Ok(Generator { space, pi })
    }

    /// Sends `policy` with probability one in every state.
    pub fn zero_information(space: PolicySpace, states: usize, policy: usize) -> Self {
        let mut row = vec![0.0; space.len()];
        row[policy] = 1.0;
        Generator {
            space,
            pi: vec![row; states],
        }
    }

    pub fn space(&self) -> PolicySpace {
        self.space
    }
    #[inline]
    pub fn prob(&self, signal: usize, x: usize) -> f64 {
        self.pi[x][signal]
    }
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.pi
    }
    pub fn num_states(&self) -> usize {
        self.pi.len()
    }
    pub fn num_signals(&self) -> usize {
        self.space.len()
    }

    /// True when every state uses the same signal distribution.
    pub fn is_zero_information(&self) -> bool {
        let first = &self.pi[0];
        self.pi
            .iter()
            .all(|row| row.iter().zip(first).all(|(a, b)| (a - b).abs() <= PROB_TOL))
    }
}

#[inline]
pub(crate) fn hat_u(game: &BasicGame, m: &Modulator, x: usize, t: usize, a: usize) -> f64 {
    game.v_u(x, t, a) - m.c[a]
}

#[inline]
pub(crate) fn hat_d(game: &BasicGame, m: &Modulator, x: usize, t: usize, a: usize) -> f64 {
    game.v_d(x, t, a) + m.gamma * m.c[a]
}

/// `v̂_D = v_D + γc(a)` and `v̂_U = v_U − c(a)`.
pub fn modulated_utilities(game: &BasicGame, modulator: &Modulator) -> (UtilityTable, UtilityTable) {
    let (n, m, k) = (game.num_states(), game.num_types(), game.num_actions());
    assert_eq!(modulator.c.len(), k, "modulator/action count mismatch");
    let mut d = Vec::with_capacity(n * m * k);
    let mut u = Vec::with_capacity(n * m * k);
    for x in 0..n {
        for t in 0..m {
            for a in 0..k {
                d.push(hat_d(game, modulator, x, t, a));
                u.push(hat_u(game, modulator, x, t, a));
            }
        }
    }
    (
        UtilityTable {
            states: n,
            types: m,
            actions: k,
            data: d,
        },
        UtilityTable {
            states: n,
            types: m,
            actions: k,
            data: u,
        },
    )
}

/// Posterior over states after observing `signal`.
pub fn bayes_update(prior: &[f64], generator: &Generator, signal: usize) -> Result<Vec<f64>> {
    assert_eq!(prior.len(), generator.num_states(), "prior/generator state mismatch");
    let joint: Vec<f64> = prior
        .iter()
        .enumerate()
        .map(|(x, p)| p * generator.prob(signal, x))
        .collect();
    let total: f64 = joint.iter().sum();
    if total <= 0.0 {
        return Err(Error::ZeroProbabilitySignal { signal });
    }
    Ok(joint.into_iter().map(|j| j / total).collect())
}

/// The type-`ty` user's best action at `posterior`.
///
/// Actions within [`UTIL_TOL`] of the maximum are tied. Ties go to the
/// action the defender prefers under `tie_weights` (her weight on each state
/// for this type; the posterior itself when `None`), then to the lowest index.
pub fn best_response(
    game: &BasicGame,
    modulator: &Modulator,
    ty: usize,
    posterior: &[f64],
    tie_weights: Option<&[f64]>,
) -> usize {
    let k = game.num_actions();
    let n = game.num_states();
    debug_assert_eq!(posterior.len(), n);
    let user_value = |a: usize| -> f64 {
        (0..n)
            .map(|x| posterior[x] * hat_u(game, modulator, x, ty, a))
            .sum()
    };
    let values: Vec<f64> = (0..k).map(user_value).collect();
    let best = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let weights = tie_weights.unwrap_or(posterior);
    let mut choice = usize::MAX;
    let mut choice_value = f64::NEG_INFINITY;
    for (a, &v) in values.iter().enumerate() {
        if v < best - UTIL_TOL {
            continue;
        }
        let dv: f64 = (0..n)
            .map(|x| weights[x] * hat_d(game, modulator, x, ty, a))
            .sum();
        if choice == usize::MAX || dv > choice_value + 1e-12 {
            choice = a;
            choice_value = dv;
        }
    }
    choice
}

/// Defender's utility when every type acts on his initial belief alone.
pub fn prior_utility(game: &BasicGame, beliefs: &BeliefProfile, modulator: &Modulator) -> f64 {
    let n = game.num_states();
    let b = beliefs.b();
    let mut total = 0.0;
    for t in 0..game.num_types() {
        let weights: Vec<f64> = (0..n).map(|x| b[x] * beliefs.b_d().get(x, t)).collect();
        let a = best_response(game, modulator, t, beliefs.b_u(t), Some(&weights));
        total += (0..n)
            .map(|x| weights[x] * hat_d(game, modulator, x, t, a))
            .sum::<f64>();
    }
    total
}

/// Everything a generator induces: the defender's payoff plus each type's
/// expected payoff, net of the transfer and gross of it.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub defender: f64,
    pub users: Vec<f64>,
    pub users_gross: Vec<f64>,
    /// `(signal, type)` pairs the defender can send but the user thinks
    /// impossible; those users fall back to acting on their prior.
    pub off_support: usize,
}

pub fn evaluate_generator(
    game: &BasicGame,
    beliefs: &BeliefProfile,
    modulator: &Modulator,
    generator: &Generator,
) -> Result<Outcome> {
    let (n, m) = (game.num_states(), game.num_types());
    assert_eq!(generator.num_states(), n, "generator/game state mismatch");
    assert_eq!(
        generator.space(),
        game.policy_space().expect("generator exists so the space is valid"),
        "generator/game policy space mismatch"
    );
    let b = beliefs.b();
    let mut out = Outcome {
        defender: 0.0,
        users: vec![0.0; m],
        users_gross: vec![0.0; m],
        off_support: 0,
    };
    let mut weights = vec![0.0; n];
    let mut posterior = vec![0.0; n];
    for s in 0..generator.num_signals() {
        let joint: Vec<f64> = (0..n).map(|x| b[x] * generator.prob(s, x)).collect();
        if joint.iter().all(|&j| j <= 0.0) {
            continue;
        }
        let visible = (0..m).any(|t| {
            let prior = beliefs.b_u(t);
            (0..n).any(|x| prior[x] * generator.prob(s, x) > 0.0)
        });
        if !visible {
            return Err(Error::InconsistentSupport {
                signal: s,
                user_type: 0,
            });
        }
        for t in 0..m {
            let prior = beliefs.b_u(t);
            let denom: f64 = (0..n).map(|x| prior[x] * generator.prob(s, x)).sum();
            if denom > 0.0 {
                for x in 0..n {
                    posterior[x] = prior[x] * generator.prob(s, x) / denom;
                }
            } else {
                out.off_support += 1;
                posterior.copy_from_slice(prior);
            }
            for x in 0..n {
                weights[x] = joint[x] * beliefs.b_d().get(x, t);
            }
            let a = best_response(game, modulator, t, &posterior, Some(&weights));
            for x in 0..n {
                out.defender += weights[x] * hat_d(game, modulator, x, t, a);
                out.users[t] += joint[x] * hat_u(game, modulator, x, t, a);
                out.users_gross[t] += joint[x] * game.v_u(x, t, a);
            }
        }
    }
    Ok(out)
}

/// `v̄_D(π, b, b_U, c)`.
///
/// Fails with [`Error::InconsistentSupport`] only when a signal the defender
/// can send is impossible for every type.
pub fn expected_posterior_utility(
    game: &BasicGame,
    beliefs: &BeliefProfile,
    modulator: &Modulator,
    generator: &Generator,
) -> Result<f64> {
    evaluate_generator(game, beliefs, modulator, generator).map(|o| o.defender)
}

/// The type's expected posterior belief and whether it equals his initial
/// belief (Bayesian plausibility).
#[derive(Debug, Clone, PartialEq)]
pub struct ExpectedPosterior {
    pub belief: Vec<f64>,
    pub plausible: bool,
}

pub fn expected_posterior_belief(
    beliefs: &BeliefProfile,
    generator: &Generator,
    ty: usize,
) -> Result<ExpectedPosterior> {
    let n = beliefs.num_states();
    assert_eq!(generator.num_states(), n, "generator/belief state mismatch");
    let b = beliefs.b();
    let prior = beliefs.b_u(ty);
    let mut belief = vec![0.0; n];
    for s in 0..generator.num_signals() {
        let p_signal: f64 = (0..n).map(|x| b[x] * generator.prob(s, x)).sum();
        if p_signal <= 0.0 {
            continue;
        }
        let denom: f64 = (0..n).map(|x| prior[x] * generator.prob(s, x)).sum();
        if denom <= 0.0 {
            return Err(Error::InconsistentSupport {
                signal: s,
                user_type: ty,
            });
        }
        for x in 0..n {
            belief[x] += p_signal * prior[x] * generator.prob(s, x) / denom;
        }
    }
    let plausible = belief
        .iter()
        .zip(prior)
        .all(|(e, u)| (e - u).abs() <= PROB_TOL);
    Ok(ExpectedPosterior { belief, plausible })
}

/// Checks that game, beliefs and modulator agree on dimensions.
pub fn check_instance(
    game: &BasicGame,
    beliefs: &BeliefProfile,
    modulator: &Modulator,
) -> Result<()> {
    if beliefs.num_states() != game.num_states() {
        return Err(Invariant::Dimensions(format!(
            "beliefs cover {} states, game has {}",
            beliefs.num_states(),
            game.num_states()
        ))
        .into());
    }
    if beliefs.num_types() != game.num_types() {
        return Err(Invariant::Dimensions(format!(
            "beliefs cover {} types, game has {}",
            beliefs.num_types(),
            game.num_types()
        ))
        .into());
    }
    if modulator.c().len() != game.num_actions() {
        return Err(Invariant::Dimensions(format!(
            "modulator has {} entries, game has {} actions",
            modulator.c().len(),
            game.num_actions()
        ))
        .into());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::insider::{insider_game, InsiderParams};

    fn benchmark(p: f64, q: f64) -> (BasicGame, BeliefProfile, Modulator) {
        let params = InsiderParams {
            p_d0h: p,
            p_u0h: p,
            q_g: q,
            q_b: 1.0 - q,
            ..InsiderParams::benchmark()
        };
        insider_game(&params).unwrap()
    }

    fn two_state_generator(rows: [[f64; 4]; 2]) -> Generator {
        Generator::new(
            PolicySpace::new(2, 2).unwrap(),
            rows.iter().map(|r| r.to_vec()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn zero_transfer_leaves_utilities_alone() {
        let (game, _, _) = benchmark(0.3, 0.32);
        let (d, u) = modulated_utilities(&game, &Modulator::zero(2));
        assert_eq!(&d, game.utility_d());
        assert_eq!(&u, game.utility_u());
    }

    #[test]
    fn access_cost_only_hits_the_user_when_gamma_is_zero() {
        let (game, _, _) = benchmark(0.3, 0.32);
        let m = Modulator::new(vec![0.0, 0.5], 0.0).unwrap();
        let (d, u) = modulated_utilities(&game, &m);
        assert_eq!(&d, game.utility_d());
        // normal server, selfish, access
        assert_eq!(u.get(1, 0, 1), 0.5);
    }

    #[test]
    fn transfer_is_scaled_for_the_defender() {
        let d = UtilityTable::new(1, 1, 2, vec![0.0, 0.0]).unwrap();
        let u = UtilityTable::new(1, 1, 2, vec![0.0, 0.0]).unwrap();
        let game = BasicGame::unlabeled(d, u).unwrap();
        let m = Modulator::new(vec![0.0, 2.0], 1.0).unwrap();
        let (d, u) = modulated_utilities(&game, &m);
        assert_eq!(d.get(0, 0, 1), 2.0);
        assert_eq!(u.get(0, 0, 1), -2.0);
    }

    #[test]
    fn modulator_rejects_dropout_transfer() {
        assert_eq!(
            Modulator::new(vec![0.1, 0.0], 0.0),
            Err(Error::Invalid(Invariant::ModulationFeasibility))
        );
        assert_eq!(
            Modulator::new(vec![0.0, 0.0], -1.0),
            Err(Error::Invalid(Invariant::NegativeGamma))
        );
    }

    #[test]
    fn bayes_update_hand_example() {
        let g = two_state_generator([[0.8, 0.2, 0.0, 0.0], [0.4, 0.6, 0.0, 0.0]]);
        let post = bayes_update(&[0.5, 0.5], &g, 0).unwrap();
        assert!((post[0] - 2.0 / 3.0).abs() < 1e-15);
        assert!((post[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn bayes_update_zero_information_and_full_information() {
        let zero = two_state_generator([[0.25, 0.25, 0.5, 0.0], [0.25, 0.25, 0.5, 0.0]]);
        for s in 0..3 {
            assert_eq!(bayes_update(&[0.3, 0.7], &zero, s).unwrap(), vec![0.3, 0.7]);
        }
        let full = two_state_generator([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]]);
        assert_eq!(bayes_update(&[0.3, 0.7], &full, 0).unwrap(), vec![1.0, 0.0]);
        assert_eq!(bayes_update(&[0.3, 0.7], &full, 3).unwrap(), vec![0.0, 1.0]);
        assert_eq!(
            bayes_update(&[0.3, 0.7], &full, 1),
            Err(Error::ZeroProbabilitySignal { signal: 1 })
        );
    }

    #[test]
    fn best_response_matches_thresholds() {
        let (game, _, m) = benchmark(0.5, 0.32);
        assert_eq!(best_response(&game, &m, 0, &[0.5, 0.5], None), 1);
        assert_eq!(best_response(&game, &m, 1, &[0.5, 0.5], None), DROP_OUT);
    }

    #[test]
    fn dominant_action_wins_everywhere() {
        let d = UtilityTable::new(2, 1, 3, vec![0.0; 6]).unwrap();
        let u = UtilityTable::new(2, 1, 3, vec![0.0, 1.0, 2.0, 0.0, -1.0, 0.5]).unwrap();
        let game = BasicGame::unlabeled(d, u).unwrap();
        let m = Modulator::zero(3);
        for i in 0..=10 {
            let p = i as f64 / 10.0;
            assert_eq!(best_response(&game, &m, 0, &[p, 1.0 - p], None), 2);
        }
    }

    #[test]
    fn ties_go_to_the_defender_then_lowest_index() {
        let u = UtilityTable::new(2, 1, 2, vec![1.0, 1.0, 2.0, 2.0]).unwrap();
        let d = UtilityTable::new(2, 1, 2, vec![0.0, 1.0, 0.0, 1.0]).unwrap();
        let game = BasicGame::unlabeled(d.clone(), u.clone()).unwrap();
        assert_eq!(best_response(&game, &Modulator::zero(2), 0, &[0.4, 0.6], None), 1);
        let flat = UtilityTable::new(2, 1, 2, vec![0.0; 4]).unwrap();
        let game = BasicGame::unlabeled(flat, u).unwrap();
        assert_eq!(best_response(&game, &Modulator::zero(2), 0, &[0.4, 0.6], None), 0);
    }

    #[test]
    fn prior_utility_benchmark_values() {
        let (g, b, m) = benchmark(0.3, 0.32);
        assert!((prior_utility(&g, &b, &m) - (-0.0292)).abs() < 1e-12);
        let (g, b, m) = benchmark(0.6, 0.32);
        assert!((prior_utility(&g, &b, &m) - 0.0704).abs() < 1e-12);
    }

    #[test]
    fn prior_utility_vanishes_when_insiders_expect_many_honeypots() {
        for p_d in [0.0, 0.2, 0.5, 0.9, 1.0] {
            for p_u in [0.77, 0.8, 1.0] {
                let params = InsiderParams {
                    p_d0h: p_d,
                    p_u0h: p_u,
                    ..InsiderParams::benchmark()
                };
                let (g, b, m) = insider_game(&params).unwrap();
                assert_eq!(prior_utility(&g, &b, &m), 0.0);
            }
        }
    }

    #[test]
    fn expected_posterior_utility_examples() {
        let (g, b, m) = benchmark(0.9, 1.0);
        let full = two_state_generator([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]]);
        assert!((expected_posterior_utility(&g, &b, &m, &full).unwrap() - 0.1).abs() < 1e-12);

        let (g, b, m) = benchmark(0.3, 0.32);
        let zero = two_state_generator([[0.1, 0.2, 0.3, 0.4], [0.1, 0.2, 0.3, 0.4]]);
        let epu = expected_posterior_utility(&g, &b, &m, &zero).unwrap();
        assert!((epu - prior_utility(&g, &b, &m)).abs() < 1e-12);
        let one = Generator::zero_information(PolicySpace::new(2, 2).unwrap(), 2, 2);
        let epu = expected_posterior_utility(&g, &b, &m, &one).unwrap();
        assert!((epu - prior_utility(&g, &b, &m)).abs() < 1e-12);
    }

    #[test]
    fn off_support_users_fall_back_to_their_prior() {
        let (g, _, m) = benchmark(0.5, 0.32);
        let b_d = TypeBelief::state_independent(&[0.32, 0.68], 2).unwrap();
        let b = BeliefProfile::new(vec![0.5, 0.5], vec![vec![1.0, 0.0], vec![0.5, 0.5]], b_d)
            .unwrap();
        let full = two_state_generator([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]]);
        let out = evaluate_generator(&g, &b, &m, &full).unwrap();
        assert_eq!(out.off_support, 1);
        // the selfish type is sure every node is a honeypot and stays out;
        // the adversarial type learns the normal server and attacks it
        assert!((out.defender - (-0.5 * 0.68 * 0.9)).abs() < 1e-15);
    }

    #[test]
    fn signal_invisible_to_every_type_is_an_error() {
        let params = InsiderParams {
            p_d0h: 0.5,
            p_u0h: 1.0,
            ..InsiderParams::benchmark()
        };
        let (g, b, m) = insider_game(&params).unwrap();
        let full = two_state_generator([[1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 1.0]]);
        assert_eq!(
            expected_posterior_utility(&g, &b, &m, &full),
            Err(Error::InconsistentSupport {
                signal: 3,
                user_type: 0
            })
        );
    }

    #[test]
    fn expected_posterior_belief_examples() {
        let q = TypeBelief::state_independent(&[1.0], 2).unwrap();
        let full = Generator::new(
            PolicySpace::new(1, 2).unwrap(),
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        )
        .unwrap();
        let covert =
            BeliefProfile::new(vec![1.0, 0.0], vec![vec![0.5, 0.5]], q.clone()).unwrap();
        let e = expected_posterior_belief(&covert, &full, 0).unwrap();
        assert_eq!(e.belief, vec![1.0, 0.0]);
        assert!(!e.plausible);

        let zero = Generator::new(
            PolicySpace::new(1, 2).unwrap(),
            vec![vec![0.3, 0.7], vec![0.3, 0.7]],
        )
        .unwrap();
        let e = expected_posterior_belief(&covert, &zero, 0).unwrap();
        assert!(e.plausible);

        let overt = BeliefProfile::overt(vec![0.2, 0.8], q.clone()).unwrap();
        let mixed = Generator::new(
            PolicySpace::new(1, 2).unwrap(),
            vec![vec![0.9, 0.1], vec![0.35, 0.65]],
        )
        .unwrap();
        assert!(expected_posterior_belief(&overt, &mixed, 0).unwrap().plausible);

        let blind = BeliefProfile::new(vec![0.5, 0.5], vec![vec![1.0, 0.0]], q).unwrap();
        assert_eq!(
            expected_posterior_belief(&blind, &full, 0),
            Err(Error::InconsistentSupport {
                signal: 1,
                user_type: 0
            })
        );
    }

    #[test]
    fn belief_profile_rejects_bad_normalization() {
        let q = TypeBelief::state_independent(&[1.0], 2).unwrap();
        assert!(matches!(
            BeliefProfile::overt(vec![0.5, 0.49], q),
            Err(Error::Invalid(Invariant::Normalization(_)))
        ));
        assert!(TypeBelief::new(vec![vec![0.5, 0.6]]).is_err());
    }

    #[test]
    fn game_requires_a_substantive_action() {
        let t = UtilityTable::new(1, 1, 1, vec![0.0]).unwrap();
        assert!(BasicGame::unlabeled(t.clone(), t).is_err());
        assert!(UtilityTable::new(1, 1, 2, vec![0.0, f64::NAN]).is_err());
    }
}

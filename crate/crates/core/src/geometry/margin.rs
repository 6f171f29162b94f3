use crate::error::{Error, Result};
use crate::lp::{optimal_generator, LpStatus};
use crate::model::{expected_posterior_utility, prior_utility, BasicGame, BeliefProfile, Generator, Modulator};
use crate::policies::check_ic;

/// Threshold above which a trust margin counts as positive.
pub const MARGIN_TOL: f64 = 1e-9;

/// Gain of a credible generator over the no-signal baseline.
pub fn trust_margin(
    game: &BasicGame,
    beliefs: &BeliefProfile,
    modulator: &Modulator,
    generator: &Generator,
) -> Result<f64> {
    let violations = check_ic(generator, game, beliefs, modulator).len();
    if violations > 0 {
        return Err(Error::NotCredible { violations });
    }
    let epu = expected_posterior_utility(game, beliefs, modulator, generator)?;
    Ok(epu - prior_utility(game, beliefs, modulator))
}

/// Gain of the optimal generator over the no-signal baseline.
pub fn max_trust_margin(game: &BasicGame, beliefs: &BeliefProfile, modulator: &Modulator) -> Result<f64> {
    let report = optimal_generator(game, beliefs, modulator)?;
    if report.status != LpStatus::Optimal {
        return Err(Error::NumericalFailure {
            residual: f64::INFINITY,
        });
    }
    Ok(report.objective_value - prior_utility(game, beliefs, modulator))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Manageability {
    Manageable,
    Unmanageable,
}

pub fn manageability(
    game: &BasicGame,
    beliefs: &BeliefProfile,
    modulator: &Modulator,
) -> Result<Manageability> {
    Ok(if max_trust_margin(game, beliefs, modulator)? > MARGIN_TOL {
        Manageability::Manageable
    } else {
        Manageability::Unmanageable
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::insider::{insider_game, InsiderParams};
    use crate::lp::optimal_generator;
    use crate::policies::prior_response_generator;

    fn insider(p: f64, q: f64) -> (BasicGame, BeliefProfile, Modulator) {
        insider_game(&InsiderParams {
            p_d0h: p,
            p_u0h: p,
            q_g: q,
            q_b: 1.0 - q,
            ..InsiderParams::benchmark()
        })
        .unwrap()
    }

    #[test]
    fn zero_information_has_no_margin() {
        let (g, b, m) = insider(0.6, 0.32);
        let gen = prior_response_generator(&g, &b, &m).unwrap();
        assert!(trust_margin(&g, &b, &m, &gen).unwrap().abs() < 1e-15);
    }

    #[test]
    fn benchmark_margin() {
        let (g, b, m) = insider(0.6, 0.32);
        let gen = optimal_generator(&g, &b, &m).unwrap().generator.unwrap();
        assert!((trust_margin(&g, &b, &m, &gen).unwrap() - 0.02304).abs() < 1e-9);
        assert!((max_trust_margin(&g, &b, &m).unwrap() - 0.02304).abs() < 1e-9);
    }

    #[test]
    fn flat_region_is_unmanageable() {
        for q in [0.0, 0.2, 0.5, 0.59] {
            for p in [0.0, 0.2, 0.4, 0.47] {
                let (g, b, m) = insider(p, q);
                assert!(max_trust_margin(&g, &b, &m).unwrap() <= 1e-9, "q={q} p={p}");
                assert_eq!(manageability(&g, &b, &m).unwrap(), Manageability::Unmanageable);
            }
        }
    }

    #[test]
    fn aligned_population_is_manageable() {
        let (g, b, m) = insider(0.5, 1.0);
        assert_eq!(manageability(&g, &b, &m).unwrap(), Manageability::Manageable);
        let (g, b, m) = insider(1.0, 1.0);
        assert_eq!(manageability(&g, &b, &m).unwrap(), Manageability::Unmanageable);
    }

    #[test]
    fn incredible_generator_is_rejected() {
        let (g, b, m) = insider(0.6, 0.32);
        let space = g.policy_space().unwrap();
        let gen = Generator::zero_information(space, 2, 3);
        assert!(matches!(
            trust_margin(&g, &b, &m, &gen),
            Err(Error::NotCredible { .. })
        ));
    }
}

//! The honeypot/insider case study: a two-state (honeypot, normal server),
//! two-type (selfish, adversarial), two-action (drop out, access) game, its
//! closed-form thresholds and the tables behind the case-study figures.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{concavify, prior_utility_pwl, PwlFunction};
use crate::lp::{optimal_generator, LpStatus};
use crate::model::{
    evaluate_generator, BasicGame, BeliefProfile, Modulator, TypeBelief, UtilityTable,
};
use crate::policies::prior_response_generator;

/// Index of the honeypot state.
pub const HONEYPOT: usize = 0;
/// Index of the normal-server state.
pub const NORMAL: usize = 1;
pub const SELFISH: usize = 0;
pub const ADVERSARIAL: usize = 1;
pub const ACCESS: usize = 1;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InsiderParams {
    pub r_u: f64,
    pub r_d: f64,
    /// Selfish access to a honeypot, user side (< 0).
    pub phi_g_u: f64,
    /// Selfish access to a honeypot, defender side (< 0).
    pub phi_g_d: f64,
    /// Adversarial access to a honeypot, user side (< 0).
    pub phi_h_u: f64,
    /// Adversarial access to a honeypot, defender side (> 0).
    pub phi_h_d: f64,
    /// Adversarial access to a normal server, user side (> 0).
    pub phi_n_u: f64,
    /// Adversarial access to a normal server, defender side (< 0).
    pub phi_n_d: f64,
    /// Authentication cost ratio; the access transfer is `r_u * phi0`.
    pub phi0: f64,
    pub q_g: f64,
    pub q_b: f64,
    /// True honeypot fraction.
    pub p_d0h: f64,
    /// Honeypot fraction the insiders believe.
    pub p_u0h: f64,
}

impl InsiderParams {
    pub fn benchmark() -> Self {
        InsiderParams {
            r_u: 1.0,
            r_d: 1.0,
            phi_g_u: -0.3,
            phi_g_d: -0.3,
            phi_h_u: -1.0,
            phi_h_d: 1.0,
            phi_n_u: 0.9,
            phi_n_d: -0.9,
            phi0: 0.0,
            q_g: 0.32,
            q_b: 0.68,
            p_d0h: 0.3,
            p_u0h: 0.3,
        }
    }

    /// The same parameters with an overt honeypot fraction `p`.
    pub fn overt_at(&self, p: f64) -> Self {
        InsiderParams {
            p_d0h: p,
            p_u0h: p,
            ..*self
        }
    }

    /// The same parameters with selfish fraction `q`.
    pub fn with_selfish_fraction(&self, q: f64) -> Self {
        InsiderParams {
            q_g: q,
            q_b: 1.0 - q,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.r_u, self.r_d, self.phi_g_u, self.phi_g_d, self.phi_h_u, self.phi_h_d,
            self.phi_n_u, self.phi_n_d, self.phi0, self.q_g, self.q_b, self.p_d0h, self.p_u0h,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite"));
        }
        let checks: [(bool, &'static str); 12] = [
            (self.r_u > 0.0, "r_U > 0"),
            (self.r_d > 0.0, "r_D > 0"),
            (self.phi_g_u < 0.0, "phi_g_U < 0"),
            (self.phi_g_d < 0.0, "phi_g_D < 0"),
            (self.phi_h_u < 0.0, "phi_H_U < 0"),
            (self.phi_h_d > 0.0, "phi_H_D > 0"),
            (self.phi_n_u > 0.0, "phi_N_U > 0"),
            (self.phi_n_d < 0.0, "phi_N_D < 0"),
            ((0.0..=1.0).contains(&self.q_g) && (0.0..=1.0).contains(&self.q_b), "q_g, q_b in [0, 1]"),
            ((self.q_g + self.q_b - 1.0).abs() <= 1e-12, "q_g + q_b = 1"),
            ((0.0..=1.0).contains(&self.p_d0h), "p_D0H in [0, 1]"),
            ((0.0..=1.0).contains(&self.p_u0h), "p_U0H in [0, 1]"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some((_, what)) => Err(Error::InvalidParams(what)),
            None => Ok(()),
        }
    }
}

/// Game, beliefs and modulator of the case study.
pub fn insider_game(params: &InsiderParams) -> Result<(BasicGame, BeliefProfile, Modulator)> {
    params.validate()?;
    let p = params;
    // [state][type][action]
    let side = |r: f64, g: f64, h: f64, n: f64| -> Vec<Vec<Vec<f64>>> {
        vec![
            vec![vec![0.0, r * g], vec![0.0, r * h]],
            vec![vec![0.0, r], vec![0.0, r * n]],
        ]
    };
    let d = UtilityTable::from_nested(&side(p.r_d, p.phi_g_d, p.phi_h_d, p.phi_n_d))?;
    let u = UtilityTable::from_nested(&side(p.r_u, p.phi_g_u, p.phi_h_u, p.phi_n_u))?;
    let labels = |xs: &[&str]| xs.iter().map(|s| s.to_string()).collect::<Vec<String>>();
    let game = BasicGame::new(
        labels(&["H", "N"]),
        labels(&["g", "b"]),
        labels(&["DO", "AC"]),
        d,
        u,
    )?;
    let q = vec![p.q_g, p.q_b];
    let b_d = TypeBelief::state_independent(&q, 2)?;
    let beliefs = BeliefProfile::new(
        vec![p.p_d0h, 1.0 - p.p_d0h],
        vec![vec![p.p_u0h, 1.0 - p.p_u0h]; 2],
        b_d,
    )?;
    let modulator = Modulator::new(vec![0.0, p.r_u * p.phi0], 0.0)?;
    Ok((game, beliefs, modulator))
}

fn clamp_unit(v: f64) -> f64 {
    v.clamp(0.0, 1.0)
}

/// Honeypot beliefs below which each type accesses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    pub selfish: f64,
    pub adversarial: f64,
}

/// Thresholds at the authentication cost `params.phi0`.
pub fn decision_thresholds(params: &InsiderParams) -> Thresholds {
    let p = params;
    Thresholds {
        selfish: clamp_unit((1.0 - p.phi0) / (1.0 - p.phi_g_u)),
        adversarial: clamp_unit((p.phi_n_u - p.phi0) / (p.phi_n_u - p.phi_h_u)),
    }
}

/// Selfish fraction below which the population is harmful on average.
pub fn motive_threshold(params: &InsiderParams) -> Result<f64> {
    let p = params;
    let den = p.phi_g_d - 1.0 + p.phi_n_d - p.phi_h_d;
    if den == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    Ok((p.phi_n_d - p.phi_h_d) / den)
}

/// Smaller of the two thresholds without any authentication cost.
pub fn deterrence_threshold(params: &InsiderParams) -> f64 {
    let t = decision_thresholds(&InsiderParams { phi0: 0.0, ..*params });
    t.selfish.min(t.adversarial)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    Fig5a,
    Fig5b,
    Fig6,
    Fig7a,
    Fig7b,
    Fig8a,
    Fig8b,
}

impl Figure {
    pub const ALL: [Figure; 7] = [
        Figure::Fig5a,
        Figure::Fig5b,
        Figure::Fig6,
        Figure::Fig7a,
        Figure::Fig7b,
        Figure::Fig8a,
        Figure::Fig8b,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::Fig5a => "fig5a",
            Figure::Fig5b => "fig5b",
            Figure::Fig6 => "fig6",
            Figure::Fig7a => "fig7a",
            Figure::Fig7b => "fig7b",
            Figure::Fig8a => "fig8a",
            Figure::Fig8b => "fig8b",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Figure {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == s)
            .ok_or_else(|| Error::UnknownFigure(s.into()))
    }
}

/// Grid resolutions and settings for the figure tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FigureConfig {
    /// Points per axis on surfaces.
    pub surface_points: usize,
    /// Points on curves.
    pub curve_points: usize,
    pub phi_min: f64,
    pub phi_max: f64,
    /// True (and believed) honeypot fraction for the utility-vs-cost curves.
    pub fig7_honeypot: f64,
}

impl Default for FigureConfig {
    fn default() -> Self {
        FigureConfig {
            surface_points: 101,
            curve_points: 201,
            phi_min: -1.0,
            phi_max: 1.0,
            fig7_honeypot: 0.2,
        }
    }
}

/// Column-named numeric table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }
}

/// `i/(n-1)` for `i = 0..n`.
fn unit_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|i| i as f64 / (n - 1) as f64).collect(),
    }
}

fn span_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    unit_grid(n)
        .into_iter()
        .map(|t| if t == 1.0 { hi } else { lo + t * (hi - lo) })
        .collect()
}

/// Prior utility and its concave closure in the overt honeypot fraction.
fn overt_curves(params: &InsiderParams) -> Result<(PwlFunction, PwlFunction)> {
    let (game, beliefs, modulator) = insider_game(params)?;
    let f = prior_utility_pwl(&game, beliefs.b_d(), &modulator)?;
    let v = concavify(&f);
    Ok((f, v))
}

fn solve_value(game: &BasicGame, beliefs: &BeliefProfile, modulator: &Modulator) -> Result<f64> {
    let report = optimal_generator(game, beliefs, modulator)?;
    if report.status != LpStatus::Optimal {
        return Err(Error::NumericalFailure {
            residual: f64::INFINITY,
        });
    }
    Ok(report.objective_value)
}

/// Data behind one case-study figure.
///
/// Surfaces list the first axis in the outer loop. Columns:
/// `fig5a`/`fig5b`: `p_d,q_g,value` (prior utility / maximum trust margin);
/// `fig6`: `phi0,t_g,t_b,diff`;
/// `fig7a`/`fig7b`: `phi0,soc,selfish,adversarial,selfish_gross,adversarial_gross`
/// without / with the optimal generator, where the `_gross` columns leave out
/// the authentication cost;
/// `fig8a`/`fig8b`: `p_d,p_u,value` (prior utility / optimal covert value).
pub fn figure_data(figure: Figure, params: &InsiderParams, config: &FigureConfig) -> Result<Table> {
    params.validate()?;
    match figure {
        Figure::Fig5a | Figure::Fig5b => {
            let mut t = Table::new(&["p_d", "q_g", "value"]);
            let grid = unit_grid(config.surface_points);
            let curves = grid
                .iter()
                .map(|&q| overt_curves(&params.with_selfish_fraction(q)))
                .collect::<Result<Vec<_>>>()?;
            for &p in &grid {
                for (&q, (f, v)) in grid.iter().zip(&curves) {
                    let value = match figure {
                        Figure::Fig5a => f.eval(p),
                        _ => v.eval(p) - f.eval(p),
                    };
                    t.rows.push(vec![p, q, value]);
                }
            }
            Ok(t)
        }
        Figure::Fig6 => {
            let mut t = Table::new(&["phi0", "t_g", "t_b", "diff"]);
            for phi in span_grid(config.phi_min, config.phi_max, config.curve_points) {
                let th = decision_thresholds(&InsiderParams { phi0: phi, ..*params });
                t.rows
                    .push(vec![phi, th.selfish, th.adversarial, th.selfish - th.adversarial]);
            }
            Ok(t)
        }
        Figure::Fig7a | Figure::Fig7b => {
            let mut t = Table::new(&[
                "phi0",
                "soc",
                "selfish",
                "adversarial",
                "selfish_gross",
                "adversarial_gross",
            ]);
            for phi in span_grid(config.phi_min, config.phi_max, config.curve_points) {
                let at = InsiderParams {
                    phi0: phi,
                    ..params.overt_at(config.fig7_honeypot)
                };
                let (game, beliefs, modulator) = insider_game(&at)?;
                let generator = match figure {
                    Figure::Fig7a => prior_response_generator(&game, &beliefs, &modulator)?,
                    _ => optimal_generator(&game, &beliefs, &modulator)?
                        .generator
                        .ok_or(Error::NumericalFailure {
                            residual: f64::INFINITY,
                        })?,
                };
                let out = evaluate_generator(&game, &beliefs, &modulator, &generator)?;
                t.rows.push(vec![
                    phi,
                    out.defender,
                    out.users[SELFISH],
                    out.users[ADVERSARIAL],
                    out.users_gross[SELFISH],
                    out.users_gross[ADVERSARIAL],
                ]);
            }
            Ok(t)
        }
        Figure::Fig8a | Figure::Fig8b => {
            let mut t = Table::new(&["p_d", "p_u", "value"]);
            let grid = unit_grid(config.surface_points);
            for &p_d in &grid {
                for &p_u in &grid {
                    let (game, beliefs, modulator) = insider_game(&InsiderParams {
                        p_d0h: p_d,
                        p_u0h: p_u,
                        ..*params
                    })?;
                    let value = match figure {
                        Figure::Fig8a => crate::model::prior_utility(&game, &beliefs, &modulator),
                        _ => solve_value(&game, &beliefs, &modulator)?,
                    };
                    t.rows.push(vec![p_d, p_u, value]);
                }
            }
            Ok(t)
        }
    }
}

/// Relative gain of the optimal value over the prior utility on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GainStats {
    /// `mean(V_D) / mean(ṽ_D) - 1`.
    pub ratio_of_means: f64,
    /// Mean of `V_D/ṽ_D - 1` over points with `ṽ_D > 0`.
    pub mean_of_ratios: f64,
    pub included: usize,
    /// Points with `ṽ_D ≤ 0`, left out of `mean_of_ratios`.
    pub excluded: usize,
}

impl GainStats {
    fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        let n = pairs.len() as f64;
        let mean_prior = pairs.iter().map(|p| p.0).sum::<f64>() / n;
        let mean_opt = pairs.iter().map(|p| p.1).sum::<f64>() / n;
        let positive: Vec<f64> = pairs
            .iter()
            .filter(|p| p.0 > 0.0)
            .map(|p| p.1 / p.0 - 1.0)
            .collect();
        GainStats {
            ratio_of_means: mean_opt / mean_prior - 1.0,
            mean_of_ratios: if positive.is_empty() {
                f64::NAN
            } else {
                positive.iter().sum::<f64>() / positive.len() as f64
            },
            included: positive.len(),
            excluded: pairs.len() - positive.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatsConfig {
    pub surface_points: usize,
    /// Prior grid `i / near_threshold_divisions` for the all-selfish ratio.
    pub near_threshold_divisions: usize,
    /// Only priors within this distance below the selfish threshold count.
    pub near_threshold_window: f64,
}

impl Default for StatsConfig {
    fn default() -> Self {
        StatsConfig {
            surface_points: 101,
            near_threshold_divisions: 1000,
            near_threshold_window: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HeadlineStats {
    /// Largest `V_D/ṽ_D` just below the selfish threshold with only selfish
    /// insiders.
    pub near_threshold_ratio: f64,
    pub near_threshold_prior: f64,
    /// Overt surface over `(p_D, q_g)`.
    pub avg_gain_fig5: GainStats,
    /// Covert surface over `(p_D, p_U)`.
    pub avg_gain_fig8: GainStats,
}

pub fn headline_stats(params: &InsiderParams, config: &StatsConfig) -> Result<HeadlineStats> {
    params.validate()?;
    let selfish_only = params.with_selfish_fraction(1.0);
    let (f, v) = overt_curves(&selfish_only)?;
    let t_g = decision_thresholds(&selfish_only).selfish;
    let div = config.near_threshold_divisions.max(1);
    let (mut ratio, mut at) = (f64::NAN, f64::NAN);
    for i in 0..=div {
        let p = i as f64 / div as f64;
        if p >= t_g || p < t_g - config.near_threshold_window {
            continue;
        }
        let prior = f.eval(p);
        if prior <= 0.0 {
            continue;
        }
        let r = v.eval(p) / prior;
        if ratio.is_nan() || r > ratio {
            ratio = r;
            at = p;
        }
    }

    let grid = unit_grid(config.surface_points);
    let mut fig5 = Vec::with_capacity(grid.len() * grid.len());
    let curves = grid
        .iter()
        .map(|&q| overt_curves(&params.with_selfish_fraction(q)))
        .collect::<Result<Vec<_>>>()?;
    for &p in &grid {
        for (f, v) in &curves {
            fig5.push((f.eval(p), v.eval(p)));
        }
    }
    let mut fig8 = Vec::with_capacity(grid.len() * grid.len());
    for &p_d in &grid {
        for &p_u in &grid {
            let (game, beliefs, modulator) = insider_game(&InsiderParams {
                p_d0h: p_d,
                p_u0h: p_u,
                ..*params
            })?;
            let prior = crate::model::prior_utility(&game, &beliefs, &modulator);
            fig8.push((prior, solve_value(&game, &beliefs, &modulator)?));
        }
    }
    Ok(HeadlineStats {
        near_threshold_ratio: ratio,
        near_threshold_prior: at,
        avg_gain_fig5: GainStats::from_pairs(&fig5),
        avg_gain_fig8: GainStats::from_pairs(&fig8),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::best_response;

    #[test]
    fn benchmark_table_entries() {
        let (g, _, m) = insider_game(&InsiderParams::benchmark()).unwrap();
        assert_eq!(g.v_u(NORMAL, ADVERSARIAL, ACCESS), 0.9);
        assert_eq!(g.v_d(HONEYPOT, ADVERSARIAL, ACCESS), 1.0);
        assert!(m.is_zero_transfer());
    }

    #[test]
    fn reward_scale_does_not_change_behavior() {
        let scaled = InsiderParams {
            r_u: 2.0,
            ..InsiderParams::benchmark()
        };
        let (g1, _, m1) = insider_game(&InsiderParams::benchmark()).unwrap();
        let (g2, _, m2) = insider_game(&scaled).unwrap();
        assert_eq!(g2.v_u(NORMAL, SELFISH, ACCESS), 2.0);
        for i in 0..=100 {
            let p = [i as f64 / 100.0, 1.0 - i as f64 / 100.0];
            for t in 0..2 {
                assert_eq!(
                    best_response(&g1, &m1, t, &p, None),
                    best_response(&g2, &m2, t, &p, None)
                );
            }
        }
    }

    #[test]
    fn sign_constraints() {
        let bad = InsiderParams {
            phi_h_d: -1.0,
            ..InsiderParams::benchmark()
        };
        assert_eq!(insider_game(&bad).unwrap_err(), Error::InvalidParams("phi_H_D > 0"));
        let bad = InsiderParams {
            q_b: 0.5,
            ..InsiderParams::benchmark()
        };
        assert_eq!(bad.validate(), Err(Error::InvalidParams("q_g + q_b = 1")));
    }

    #[test]
    fn threshold_values() {
        let t = decision_thresholds(&InsiderParams::benchmark());
        assert!((t.selfish - 10.0 / 13.0).abs() < 1e-15);
        assert!((t.adversarial - 9.0 / 19.0).abs() < 1e-15);
        let t = decision_thresholds(&InsiderParams {
            phi0: 1.0,
            ..InsiderParams::benchmark()
        });
        assert_eq!(t.selfish, 0.0);
        let t = decision_thresholds(&InsiderParams {
            phi0: -1.0,
            ..InsiderParams::benchmark()
        });
        assert_eq!(t.adversarial, 1.0);
    }

    #[test]
    fn motive_and_deterrence() {
        let b = InsiderParams::benchmark();
        assert!((motive_threshold(&b).unwrap() - 0.59375).abs() < 1e-15);
        assert!((deterrence_threshold(&b) - 9.0 / 19.0).abs() < 1e-15);
        let symmetric = InsiderParams {
            phi_h_d: 0.5,
            phi_n_d: 0.5,
            ..b
        };
        assert_eq!(motive_threshold(&symmetric).unwrap(), 0.0);
    }

    #[test]
    fn figure_ids() {
        for f in Figure::ALL {
            assert_eq!(f.id().parse::<Figure>().unwrap(), f);
        }
        assert_eq!(
            "fig9".parse::<Figure>(),
            Err(Error::UnknownFigure("fig9".into()))
        );
    }

    #[test]
    fn threshold_gap_closed_form() {
        let cfg = FigureConfig {
            curve_points: 21,
            phi_min: -0.2,
            phi_max: 0.8,
            ..FigureConfig::default()
        };
        let t = figure_data(Figure::Fig6, &InsiderParams::benchmark(), &cfg).unwrap();
        assert_eq!(t.columns, vec!["phi0", "t_g", "t_b", "diff"]);
        for r in &t.rows {
            assert!((r[3] - (0.73 - 0.6 * r[0]) / 2.47).abs() < 1e-12);
            assert!(r[3] > 0.0);
        }
    }

    #[test]
    fn small_surfaces() {
        let cfg = FigureConfig {
            surface_points: 11,
            ..FigureConfig::default()
        };
        let b = InsiderParams::benchmark();
        let margin = figure_data(Figure::Fig5b, &b, &cfg).unwrap();
        let at = |t: &Table, a: f64, c: f64| {
            t.rows
                .iter()
                .find(|r| (r[0] - a).abs() < 1e-12 && (r[1] - c).abs() < 1e-12)
                .unwrap()[2]
        };
        assert!(at(&margin, 0.3, 0.2).abs() < 1e-12);
        let prior = figure_data(Figure::Fig8a, &b, &cfg).unwrap();
        for r in prior.rows.iter().filter(|r| r[1] >= 10.0 / 13.0) {
            assert_eq!(r[2], 0.0);
        }
        let covert = figure_data(Figure::Fig8b, &b, &cfg).unwrap();
        assert!((at(&covert, 0.0, 0.6) - 0.32).abs() < 1e-9);
    }
}

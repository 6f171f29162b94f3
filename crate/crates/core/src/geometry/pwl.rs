use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Invariant, Result};
use crate::model::{hat_d, hat_u, prior_utility, BasicGame, BeliefProfile, Modulator, TypeBelief};

const BREAK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub slope: f64,
    pub intercept: f64,
}

impl Segment {
    #[inline]
    pub fn at(&self, p: f64) -> f64 {
        self.intercept + self.slope * p
    }
}

/// Piecewise-affine function of `p ∈ [0, 1]`, possibly discontinuous.
///
/// `segments[i]` is the affine piece on the open interval between
/// `breakpoints[i]` and `breakpoints[i + 1]`; `values[i]` is the value taken
/// at `breakpoints[i]` itself, which may differ from both one-sided limits.
#[derive(Debug, Clone, PartialEq)]
pub struct PwlFunction {
    breakpoints: Vec<f64>,
    segments: Vec<Segment>,
    values: Vec<f64>,
}

impl PwlFunction {
    pub fn new(breakpoints: Vec<f64>, segments: Vec<Segment>, values: Vec<f64>) -> Result<Self> {
        let ok = breakpoints.len() >= 2
            && breakpoints[0] == 0.0
            && breakpoints[breakpoints.len() - 1] == 1.0
            && breakpoints.windows(2).all(|w| w[0] < w[1])
            && segments.len() + 1 == breakpoints.len()
            && values.len() == breakpoints.len();
        if !ok {
            return Err(Invariant::Other(
                "breakpoints must increase strictly from 0 to 1 with one segment per gap".into(),
            )
            .into());
        }
        let finite = segments
            .iter()
            .flat_map(|s| [s.slope, s.intercept])
            .chain(values.iter().copied())
            .all(f64::is_finite);
        if !finite {
            return Err(Invariant::NonFinite("piecewise-linear function".into()).into());
        }
        Ok(PwlFunction {
            breakpoints,
            segments,
            values,
        })
    }

    /// Continuous function through the given nodes.
    pub fn interpolate(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let segments = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| {
                let slope = (y[1] - y[0]) / (x[1] - x[0]);
                Segment {
                    slope,
                    intercept: y[0] - slope * x[0],
                }
            })
            .collect();
        Self::new(xs, segments, ys)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }
    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn eval(&self, p: f64) -> f64 {
        let bp = &self.breakpoints;
        let i = bp.partition_point(|&b| b < p);
        if i < bp.len() && (bp[i] - p).abs() <= BREAK_TOL {
            return self.values[i];
        }
        if i > 0 && (p - bp[i - 1]).abs() <= BREAK_TOL {
            return self.values[i - 1];
        }
        let seg = i.clamp(1, self.segments.len()) - 1;
        self.segments[seg].at(p)
    }

    /// Limit from the left at breakpoint `i` (`i ≥ 1`).
    pub fn left_limit(&self, i: usize) -> f64 {
        self.segments[i - 1].at(self.breakpoints[i])
    }

    /// Limit from the right at breakpoint `i` (`i < last`).
    pub fn right_limit(&self, i: usize) -> f64 {
        self.segments[i].at(self.breakpoints[i])
    }

    /// Every value the closure of the graph takes at a breakpoint.
    fn candidate_points(&self) -> Vec<(f64, f64)> {
        let last = self.breakpoints.len() - 1;
        let mut pts = Vec::with_capacity(3 * self.breakpoints.len());
        for (i, (&x, &v)) in self.breakpoints.iter().zip(&self.values).enumerate() {
            pts.push((x, v));
            if i > 0 {
                pts.push((x, self.left_limit(i)));
            }
            if i < last {
                pts.push((x, self.right_limit(i)));
            }
        }
        pts
    }

    /// Largest attained value, at the smallest breakpoint reaching it.
    pub fn argmax(&self) -> (f64, f64) {
        let mut best = (self.breakpoints[0], self.values[0]);
        for (&x, &v) in self.breakpoints.iter().zip(&self.values).skip(1) {
            if v > best.1 + BREAK_TOL {
                best = (x, v);
            }
        }
        best
    }

    /// Supremum, counting one-sided limits.
    pub fn supremum(&self) -> f64 {
        self.candidate_points()
            .into_iter()
            .map(|(_, v)| v)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn is_concave(&self, tol: f64) -> bool {
        let pts = self.candidate_points();
        let hull = concavify(self);
        pts.iter().all(|&(x, y)| hull.eval(x) <= y + tol)
            && self.segments.windows(2).all(|w| w[1].slope <= w[0].slope + tol)
    }
}

/// Least concave majorant, built as the upper hull of every breakpoint value
/// and both one-sided limits.
pub fn concavify(f: &PwlFunction) -> PwlFunction {
    let mut pts = f.candidate_points();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    pts.dedup_by(|next, kept| next.0 == kept.0);
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let (xs, ys) = hull.into_iter().unzip();
    PwlFunction::interpolate(xs, ys).expect("hull nodes inherit a valid domain")
}

fn overt(p: f64, b_d: &TypeBelief) -> BeliefProfile {
    BeliefProfile::overt(vec![p, 1.0 - p], b_d.clone()).expect("p lies in [0, 1]")
}

/// Crossing of `alpha + beta p` with zero inside `(0, 1)`.
fn root_in_unit(alpha: f64, beta: f64) -> Option<f64> {
    if beta.abs() <= 1e-14 {
        return None;
    }
    let r = -alpha / beta;
    (r > 0.0 && r < 1.0).then_some(r)
}

/// The defender's prior utility as a function of the common prior
/// `p = b(x_1)` in a two-state game.
pub fn prior_utility_pwl(
    game: &BasicGame,
    b_d: &TypeBelief,
    modulator: &Modulator,
) -> Result<PwlFunction> {
    if game.num_states() != 2 {
        return Err(Error::UnsupportedDimension {
            states: game.num_states(),
        });
    }
    let (m, k) = (game.num_types(), game.num_actions());
    let mut cuts = vec![0.0, 1.0];
    for t in 0..m {
        for a in 0..k {
            for o in a + 1..k {
                let du = |x| hat_u(game, modulator, x, t, a) - hat_u(game, modulator, x, t, o);
                let dd = |x| {
                    b_d.get(x, t) * (hat_d(game, modulator, x, t, a) - hat_d(game, modulator, x, t, o))
                };
                cuts.extend(root_in_unit(du(1), du(0) - du(1)));
                cuts.extend(root_in_unit(dd(1), dd(0) - dd(1)));
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|next, kept| *next - *kept <= BREAK_TOL);
    if *cuts.last().expect("nonempty") != 1.0 {
        cuts.pop();
        cuts.push(1.0);
    }

    let value_at = |p: f64| prior_utility(game, &overt(p, b_d), modulator);
    let mut segments = Vec::with_capacity(cuts.len() - 1);
    for w in cuts.windows(2) {
        // The response profile is fixed inside the gap; read it off the
        // midpoint and extend it affinely.
        let mid = 0.5 * (w[0] + w[1]);
        let beliefs = overt(mid, b_d);
        let profile: Vec<usize> = (0..m)
            .map(|t| {
                let weights: Vec<f64> = (0..2).map(|x| beliefs.b()[x] * b_d.get(x, t)).collect();
                crate::model::best_response(game, modulator, t, beliefs.b(), Some(&weights))
            })
            .collect();
        let at_vertex = |x: usize| -> f64 {
            profile
                .iter()
                .enumerate()
                .map(|(t, &a)| b_d.get(x, t) * hat_d(game, modulator, x, t, a))
                .sum()
        };
        let (v1, v2) = (at_vertex(0), at_vertex(1));
        segments.push(Segment {
            slope: v1 - v2,
            intercept: v2,
        });
    }
    let values = cuts.iter().map(|&p| value_at(p)).collect();
    PwlFunction::new(cuts, segments, values)
}

/// Best overt prior for the defender to instill.
#[derive(Debug, Clone, PartialEq)]
pub struct Manipulation {
    /// `b(x_1)` of the chosen prior.
    pub p: f64,
    pub value: f64,
    /// Supremum of the prior utility including one-sided limits.
    pub supremum: f64,
    /// `supremum - value`; positive when the supremum is not attained.
    pub sup_gap: f64,
}

impl Manipulation {
    pub fn belief(&self) -> Vec<f64> {
        vec![self.p, 1.0 - self.p]
    }
}

pub fn optimal_manipulation(
    game: &BasicGame,
    b_d: &TypeBelief,
    modulator: &Modulator,
) -> Result<Manipulation> {
    let f = prior_utility_pwl(game, b_d, modulator)?;
    Ok(manipulation_of(&f))
}

pub(crate) fn manipulation_of(f: &PwlFunction) -> Manipulation {
    let (p, value) = f.argmax();
    let supremum = f.supremum().max(value);
    Manipulation {
        p,
        value,
        supremum,
        sup_gap: supremum - value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::insider::{insider_game, InsiderParams};
    use crate::model::UtilityTable;

    fn benchmark(q: f64) -> (BasicGame, TypeBelief, Modulator) {
        let (g, b, m) = insider_game(&InsiderParams {
            q_g: q,
            q_b: 1.0 - q,
            ..InsiderParams::benchmark()
        })
        .unwrap();
        (g, b.b_d().clone(), m)
    }

    #[test]
    fn benchmark_pieces() {
        let (g, q, m) = benchmark(0.32);
        let f = prior_utility_pwl(&g, &q, &m).unwrap();
        let t_b = 9.0 / 19.0;
        let t_g = 10.0 / 13.0;
        assert!((f.eval(0.0) + 0.292).abs() < 1e-12);
        assert!((f.eval(t_b) - 0.122_947_368_421_052_6).abs() < 1e-12);
        assert!(f.eval(t_g).abs() < 1e-12);
        assert!(f.eval(1.0).abs() < 1e-12);
        assert!((f.eval(0.3) + 0.0292).abs() < 1e-12);
        assert!((f.eval(0.6) - 0.0704).abs() < 1e-12);
        let slopes: Vec<f64> = f.segments().iter().map(|s| s.slope).collect();
        assert_eq!(slopes.len(), 3);
        assert!((slopes[0] - 0.876).abs() < 1e-12);
        assert!((slopes[1] + 0.416).abs() < 1e-12);
        assert!(slopes[2].abs() < 1e-12);
    }

    #[test]
    fn benchmark_envelope() {
        let (g, q, m) = benchmark(0.32);
        let v = concavify(&prior_utility_pwl(&g, &q, &m).unwrap());
        assert!((v.eval(0.6) - 0.09344).abs() < 1e-12);
        assert_eq!(v.breakpoints().len(), 3);
        assert!((v.breakpoints()[1] - 9.0 / 19.0).abs() < 1e-15);
    }

    #[test]
    fn convex_input_gives_chord() {
        let (g, q, m) = benchmark(1.0);
        let f = prior_utility_pwl(&g, &q, &m).unwrap();
        for p in [0.0, 0.2, 0.5, 0.9] {
            assert!((f.eval(p) - (1.0 - 1.3 * p).max(0.0)).abs() < 1e-12);
        }
        let v = concavify(&f);
        for p in [0.0, 0.2, 0.5, 0.9, 1.0] {
            assert!((v.eval(p) - (1.0 - p)).abs() < 1e-12);
        }
    }

    #[test]
    fn concave_input_is_unchanged() {
        let f = PwlFunction::interpolate(vec![0.0, 0.3, 0.8, 1.0], vec![0.0, 0.6, 0.7, 0.1]).unwrap();
        let v = concavify(&f);
        for i in 0..=100 {
            let p = i as f64 / 100.0;
            assert!((v.eval(p) - f.eval(p)).abs() < 1e-12);
        }
        assert!(f.is_concave(1e-12));
    }

    #[test]
    fn jumps_use_both_limits() {
        let f = PwlFunction::new(
            vec![0.0, 0.5, 1.0],
            vec![
                Segment { slope: 0.0, intercept: 0.0 },
                Segment { slope: 0.0, intercept: 1.0 },
            ],
            vec![0.0, 0.0, 1.0],
        )
        .unwrap();
        let v = concavify(&f);
        assert!((v.eval(0.25) - 0.5).abs() < 1e-12);
        assert!((v.eval(0.75) - 1.0).abs() < 1e-12);
        let man = manipulation_of(&f);
        assert_eq!(man.p, 1.0);
        assert_eq!(man.sup_gap, 0.0);
    }

    #[test]
    fn unattained_supremum_is_flagged() {
        let f = PwlFunction::new(
            vec![0.0, 0.5, 1.0],
            vec![
                Segment { slope: 2.0, intercept: 0.0 },
                Segment { slope: 0.0, intercept: 0.0 },
            ],
            vec![0.0, 0.5, 0.0],
        )
        .unwrap();
        let man = manipulation_of(&f);
        assert_eq!(man.p, 0.5);
        assert!((man.sup_gap - 0.5).abs() < 1e-15);
    }

    #[test]
    fn benchmark_manipulation() {
        let (g, q, m) = benchmark(0.32);
        let man = optimal_manipulation(&g, &q, &m).unwrap();
        assert!((man.p - 9.0 / 19.0).abs() < 1e-15);
        assert!((man.value - 0.122_947_368_421_052_6).abs() < 1e-12);
        assert!(man.sup_gap.abs() < 1e-12);
    }

    #[test]
    fn constant_defender_payoff() {
        let d = UtilityTable::new(2, 1, 2, vec![0.4; 4]).unwrap();
        let u = UtilityTable::new(2, 1, 2, vec![0.0, 1.0, 0.0, -1.0]).unwrap();
        let g = BasicGame::unlabeled(d, u).unwrap();
        let q = TypeBelief::state_independent(&[1.0], 2).unwrap();
        let f = prior_utility_pwl(&g, &q, &Modulator::zero(2)).unwrap();
        for p in [0.0, 0.3, 0.5, 1.0] {
            assert!((f.eval(p) - 0.4).abs() < 1e-15);
        }
        let man = manipulation_of(&f);
        assert_eq!((man.p, man.value), (0.0, 0.4));
    }

    #[test]
    fn rejects_three_states() {
        let d = UtilityTable::new(3, 1, 2, vec![0.0; 6]).unwrap();
        let g = BasicGame::unlabeled(d.clone(), d).unwrap();
        let q = TypeBelief::state_independent(&[1.0], 3).unwrap();
        assert!(prior_utility_pwl(&g, &q, &Modulator::zero(2)).is_err());
    }
}

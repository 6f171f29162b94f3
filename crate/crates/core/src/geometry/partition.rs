use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{best_response, hat_u, BasicGame, Modulator};
use crate::policies::PolicySpace;

/// Geometric tolerance for cell membership and measure.
pub const GEOM_TOL: f64 = 1e-12;

/// A convex region of the belief simplex.
///
/// With two states a belief is the scalar `p = b(x_1)`; with three it is a
/// point `(p_1, p_2, p_3)` and cells are polygons listed counter-clockwise in
/// the `(p_1, p_2)` projection.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Empty,
    Interval { lo: f64, hi: f64 },
    Polygon(Vec<[f64; 3]>),
}

impl Cell {
    pub fn is_empty(&self) -> bool {
        match self {
            Cell::Empty => true,
            Cell::Interval { .. } => false,
            Cell::Polygon(v) => v.is_empty(),
        }
    }

    /// Length or area (area of the whole simplex is 1/2).
    pub fn measure(&self) -> f64 {
        match self {
            Cell::Empty => 0.0,
            Cell::Interval { lo, hi } => hi - lo,
            Cell::Polygon(v) => polygon_area(v),
        }
    }

    pub fn is_full_dimensional(&self) -> bool {
        self.measure() > GEOM_TOL
    }

    /// Membership with tolerance [`GEOM_TOL`]; `p` lists every coordinate.
    pub fn contains(&self, p: &[f64]) -> bool {
        match self {
            Cell::Empty => false,
            Cell::Interval { lo, hi } => p[0] >= lo - GEOM_TOL && p[0] <= hi + GEOM_TOL,
            Cell::Polygon(v) => {
                if v.len() < 3 {
                    return v
                        .iter()
                        .any(|q| q.iter().zip(p).all(|(a, b)| (a - b).abs() <= GEOM_TOL));
                }
                (0..v.len()).all(|i| {
                    let (a, b) = (v[i], v[(i + 1) % v.len()]);
                    let cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]);
                    cross >= -GEOM_TOL
                })
            }
        }
    }
}

fn polygon_area(v: &[[f64; 3]]) -> f64 {
    if v.len() < 3 {
        return 0.0;
    }
    let twice: f64 = (0..v.len())
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % v.len()]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum();
    (twice / 2.0).abs()
}

/// A half-space `Σ_x p_x w_x ≥ 0` of the simplex.
type HalfSpace = Vec<f64>;

/// Half-spaces on which `a` is a best response for type `t`.
fn action_halfspaces(game: &BasicGame, m: &Modulator, t: usize, a: usize) -> Vec<HalfSpace> {
    let n = game.num_states();
    (0..game.num_actions())
        .filter(|&o| o != a)
        .map(|o| {
            (0..n)
                .map(|x| hat_u(game, m, x, t, a) - hat_u(game, m, x, t, o))
                .collect()
        })
        .collect()
}

fn interval_cell(constraints: &[HalfSpace]) -> Cell {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for w in constraints {
        // p w_1 + (1 - p) w_2 = alpha + beta p
        let (alpha, beta) = (w[1], w[0] - w[1]);
        if beta.abs() <= 1e-14 {
            if alpha < -GEOM_TOL {
                return Cell::Empty;
            }
            continue;
        }
        let root = -alpha / beta;
        if beta > 0.0 {
            lo = lo.max(root);
        } else {
            hi = hi.min(root);
        }
    }
    if lo > hi + GEOM_TOL {
        Cell::Empty
    } else {
        let lo = lo.min(hi);
        Cell::Interval { lo, hi }
    }
}

fn polygon_cell(constraints: &[HalfSpace]) -> Cell {
    let mut poly: Vec<[f64; 3]> = vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for w in constraints {
        let f = |p: &[f64; 3]| p[0] * w[0] + p[1] * w[1] + p[2] * w[2];
        let mut next = Vec::with_capacity(poly.len() + 1);
        for i in 0..poly.len() {
            let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
            let (fp, fq) = (f(&p), f(&q));
            let (ip, iq) = (fp >= -GEOM_TOL, fq >= -GEOM_TOL);
            if ip {
                next.push(p);
            }
            if ip != iq && (fp - fq).abs() > 0.0 {
                let s = fp / (fp - fq);
                if s > 0.0 && s < 1.0 {
                    next.push([
                        p[0] + s * (q[0] - p[0]),
                        p[1] + s * (q[1] - p[1]),
                        p[2] + s * (q[2] - p[2]),
                    ]);
                }
            }
        }
        next.dedup_by(|a, b| a.iter().zip(b.iter()).all(|(x, y)| (x - y).abs() <= GEOM_TOL));
        while next.len() > 1
            && next[0]
                .iter()
                .zip(&next[next.len() - 1])
                .all(|(x, y)| (x - y).abs() <= GEOM_TOL)
        {
            next.pop();
        }
        poly = next;
        if poly.is_empty() {
            return Cell::Empty;
        }
    }
    Cell::Polygon(poly)
}

fn cell_for(n: usize, constraints: &[HalfSpace]) -> Result<Cell> {
    match n {
        2 => Ok(interval_cell(constraints)),
        3 => Ok(polygon_cell(constraints)),
        _ => Err(Error::UnsupportedDimension { states: n }),
    }
}

/// Best-response regions of every type and their intersections.
#[derive(Debug, Clone, PartialEq)]
pub struct BeliefPartition {
    pub states: usize,
    /// `per_type[θ][a]`: beliefs where `a` is a best response of `θ`.
    pub per_type: Vec<Vec<Cell>>,
    /// One cell per policy, in policy-index order.
    pub joint: Vec<Cell>,
    pub space: PolicySpace,
}

impl BeliefPartition {
    /// Policies whose joint cell has positive measure.
    pub fn full_dimensional_policies(&self) -> Vec<usize> {
        (0..self.joint.len())
            .filter(|&s| self.joint[s].is_full_dimensional())
            .collect()
    }
}

pub fn belief_partition(game: &BasicGame, modulator: &Modulator) -> Result<BeliefPartition> {
    let n = game.num_states();
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedDimension { states: n });
    }
    let space = game.policy_space()?;
    let (m, k) = (game.num_types(), game.num_actions());
    let halfspaces: Vec<Vec<Vec<HalfSpace>>> = (0..m)
        .map(|t| (0..k).map(|a| action_halfspaces(game, modulator, t, a)).collect())
        .collect();
    let mut per_type = Vec::with_capacity(m);
    for hs in &halfspaces {
        let cells = hs.iter().map(|h| cell_for(n, h)).collect::<Result<Vec<_>>>()?;
        per_type.push(cells);
    }
    let mut joint = Vec::with_capacity(space.len());
    for s in 0..space.len() {
        if (0..m).any(|t| per_type[t][space.action_of(s, t)].is_empty()) {
            joint.push(Cell::Empty);
            continue;
        }
        let all: Vec<HalfSpace> = (0..m)
            .flat_map(|t| halfspaces[t][space.action_of(s, t)].iter().cloned())
            .collect();
        joint.push(cell_for(n, &all)?);
    }
    Ok(BeliefPartition {
        states: n,
        per_type,
        joint,
        space,
    })
}

/// Beliefs where types `l` and `h` have different best responses, as a list
/// of full-dimensional pieces. Adjacent intervals are merged.
pub fn identifiable_region(
    game: &BasicGame,
    modulator: &Modulator,
    l: usize,
    h: usize,
) -> Result<Vec<Cell>> {
    if l == h {
        return Err(Error::PreconditionViolated("identifiability needs two distinct types"));
    }
    let n = game.num_states();
    if n != 2 && n != 3 {
        return Err(Error::UnsupportedDimension { states: n });
    }
    let k = game.num_actions();
    let mut pieces = Vec::new();
    for i in 0..k {
        for j in (0..k).filter(|&j| j != i) {
            let mut hs = action_halfspaces(game, modulator, l, i);
            hs.extend(action_halfspaces(game, modulator, h, j));
            let cell = cell_for(n, &hs)?;
            if cell.is_full_dimensional() {
                pieces.push(cell);
            }
        }
    }
    if n == 2 {
        let mut spans: Vec<(f64, f64)> = pieces
            .iter()
            .filter_map(|c| match c {
                Cell::Interval { lo, hi } => Some((*lo, *hi)),
                _ => None,
            })
            .collect();
        spans.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::new();
        for (lo, hi) in spans {
            match merged.last_mut() {
                Some(last) if lo <= last.1 + GEOM_TOL => last.1 = last.1.max(hi),
                _ => merged.push((lo, hi)),
            }
        }
        pieces = merged
            .into_iter()
            .map(|(lo, hi)| Cell::Interval { lo, hi })
            .collect();
    }
    Ok(pieces)
}

/// The bound on enforceable policies: `L + 1` for two states and
/// `L(L + 1)/2` for three, with `L = MK(K-1)/2`.
pub fn chi_bound(actions: usize, types: usize, states: usize) -> Result<usize> {
    let l = types * actions * actions.saturating_sub(1) / 2;
    match states {
        2 => Ok(l + 1),
        3 => Ok(l * (l + 1) / 2),
        _ => Err(Error::UnsupportedDimension { states }),
    }
}

/// Distinct best-response profiles seen on a random sample of the simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct SamplePartition {
    /// Sorted distinct profiles, one action per type.
    pub labels: Vec<Vec<usize>>,
    /// Number of samples with each label.
    pub counts: Vec<usize>,
}

impl SamplePartition {
    pub fn count(&self) -> usize {
        self.labels.len()
    }
}

fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform point on the simplex with `n` vertices.
pub(crate) fn sample_simplex(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let mut cuts: Vec<f64> = (0..n.saturating_sub(1)).map(|_| unit_f64(rng)).collect();
    cuts.sort_by(f64::total_cmp);
    let mut prev = 0.0;
    let mut out = Vec::with_capacity(n);
    for c in cuts {
        out.push(c - prev);
        prev = c;
    }
    out.push(1.0 - prev);
    out
}

pub fn sample_partition(
    game: &BasicGame,
    modulator: &Modulator,
    samples: usize,
    seed: u64,
) -> SamplePartition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (n, m) = (game.num_states(), game.num_types());
    let mut seen: Vec<(Vec<usize>, usize)> = Vec::new();
    for _ in 0..samples {
        let p = sample_simplex(&mut rng, n);
        let label: Vec<usize> = (0..m)
            .map(|t| best_response(game, modulator, t, &p, None))
            .collect();
        match seen.binary_search_by(|(l, _)| l.cmp(&label)) {
            Ok(i) => seen[i].1 += 1,
            Err(i) => seen.insert(i, (label, 1)),
        }
    }
    let (labels, counts) = seen.into_iter().unzip();
    SamplePartition { labels, counts }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::insider::{insider_game, InsiderParams};
    use crate::model::UtilityTable;

    fn interval(c: &Cell) -> (f64, f64) {
        match c {
            Cell::Interval { lo, hi } => (*lo, *hi),
            other => panic!("expected interval, got {other:?}"),
        }
    }

    #[test]
    fn benchmark_cells() {
        let (g, _, m) = insider_game(&InsiderParams::benchmark()).unwrap();
        let part = belief_partition(&g, &m).unwrap();
        let (lo, hi) = interval(&part.per_type[0][1]);
        assert!(lo.abs() < 1e-15 && (hi - 10.0 / 13.0).abs() < 1e-15);
        let (lo, hi) = interval(&part.per_type[0][0]);
        assert!((lo - 10.0 / 13.0).abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
        let (lo, hi) = interval(&part.per_type[1][1]);
        assert!(lo.abs() < 1e-15 && (hi - 9.0 / 19.0).abs() < 1e-15);
        assert_eq!(part.full_dimensional_policies(), vec![0, 2, 3]);
        assert!(part.joint[1].is_empty());
    }

    #[test]
    fn dominant_action_covers_everything() {
        let d = UtilityTable::new(3, 1, 2, vec![0.0; 6]).unwrap();
        let u = UtilityTable::new(3, 1, 2, vec![0.0, 1.0, 0.0, 2.0, 0.0, 0.5]).unwrap();
        let g = BasicGame::unlabeled(d, u).unwrap();
        let part = belief_partition(&g, &Modulator::zero(2)).unwrap();
        assert!((part.per_type[0][1].measure() - 0.5).abs() < 1e-15);
        assert!(part.per_type[0][0].is_empty());
    }

    #[test]
    fn four_states_are_rejected() {
        let d = UtilityTable::new(4, 1, 2, vec![0.0; 8]).unwrap();
        let g = BasicGame::unlabeled(d.clone(), d).unwrap();
        assert_eq!(
            belief_partition(&g, &Modulator::zero(2)),
            Err(Error::UnsupportedDimension { states: 4 })
        );
    }

    #[test]
    fn benchmark_identifiable_interval() {
        let (g, _, m) = insider_game(&InsiderParams::benchmark()).unwrap();
        let region = identifiable_region(&g, &m, 0, 1).unwrap();
        assert_eq!(region.len(), 1);
        let (lo, hi) = interval(&region[0]);
        assert!((lo - 9.0 / 19.0).abs() < 1e-15 && (hi - 10.0 / 13.0).abs() < 1e-15);
    }

    #[test]
    fn chi_values() {
        assert_eq!(chi_bound(2, 2, 2).unwrap(), 3);
        assert_eq!(chi_bound(2, 1, 2).unwrap(), 2);
        assert_eq!(chi_bound(2, 2, 3).unwrap(), 3);
        assert!(chi_bound(2, 2, 4).is_err());
    }

    #[test]
    fn sampled_benchmark_labels() {
        let (g, _, m) = insider_game(&InsiderParams::benchmark()).unwrap();
        let s = sample_partition(&g, &m, 2000, 7);
        assert_eq!(s.labels, vec![vec![0, 0], vec![1, 0], vec![1, 1]]);
        assert_eq!(s.counts.iter().sum::<usize>(), 2000);
        assert_eq!(s, sample_partition(&g, &m, 2000, 7));
    }

    #[test]
    fn three_state_crossing_lines_make_four_cells() {
        // type 1 accesses when p_1 < 0.5, type 2 when p_2 < 0.4
        let d = UtilityTable::new(3, 2, 2, vec![0.0; 12]).unwrap();
        let u = UtilityTable::new(
            3,
            2,
            2,
            vec![
                0.0, -1.0, 0.0, 1.0, // x1
                0.0, 1.0, 0.0, -1.5, // x2
                0.0, 1.0, 0.0, 1.0, // x3
            ],
        )
        .unwrap();
        let g = BasicGame::unlabeled(d, u).unwrap();
        let m = Modulator::zero(2);
        let part = belief_partition(&g, &m).unwrap();
        assert_eq!(part.full_dimensional_policies().len(), 4);
        let total: f64 = part.joint.iter().map(Cell::measure).sum();
        assert!((total - 0.5).abs() < 1e-12);
        assert_eq!(sample_partition(&g, &m, 5000, 1).count(), 4);
        assert_eq!(chi_bound(2, 2, 3).unwrap(), 3);
    }

    #[test]
    fn polygon_membership() {
        let c = polygon_cell(&[vec![-1.0, 1.0, 1.0]]);
        assert!(c.contains(&[0.2, 0.3, 0.5]));
        assert!(!c.contains(&[0.8, 0.1, 0.1]));
        assert!((c.measure() - 0.375).abs() < 1e-15);
    }
}

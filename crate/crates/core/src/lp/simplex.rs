//! Dense two-phase tableau simplex: Bland entering rule, two-pass ratio test.
//!
//! Variables with general bounds are shifted, flipped or split so the
//! tableau only sees nonnegative columns. After the last pivot the basic
//! solution is recomputed from the untouched constraint matrix, which removes
//! most of the drift accumulated by repeated row operations.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Invariant, Result};

const PIVOT_TOL: f64 = 1e-10;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
const MAX_RESIDUAL: f64 = 1e-6;
/// Entries below this after elimination are treated as cancellation noise.
const DROP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<f64>,
    pub relation: Relation,
    pub rhs: f64,
}

/// `maximize c·x` subject to linear rows and per-variable bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    bounds: Vec<(f64, f64)>,
}

impl LinearProgram {
    /// All variables start with bounds `[0, +inf)`.
    pub fn maximize(objective: Vec<f64>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            bounds: vec![(0.0, f64::INFINITY); n],
        }
    }

    pub fn add_constraint(&mut self, coeffs: Vec<f64>, relation: Relation, rhs: f64) {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
    }

    pub fn set_bounds(&mut self, var: usize, lower: f64, upper: f64) {
        self.bounds[var] = (lower, upper);
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }
    pub fn objective(&self) -> &[f64] {
        &self.objective
    }
    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }
    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.objective.iter().any(|v| !v.is_finite()) {
            return Err(Invariant::NonFinite("LP objective".into()).into());
        }
        for c in &self.constraints {
            if c.coeffs.len() != n {
                return Err(Invariant::Dimensions("LP row width".into()).into());
            }
            if !c.rhs.is_finite() || c.coeffs.iter().any(|v| !v.is_finite()) {
                return Err(Invariant::NonFinite("LP constraint".into()).into());
            }
        }
        for &(lo, hi) in &self.bounds {
            if lo.is_nan() || hi.is_nan() || lo == f64::INFINITY || hi == f64::NEG_INFINITY {
                return Err(Invariant::Other("invalid LP variable bound".into()).into());
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Empty unless optimal.
    pub values: Vec<f64>,
    pub objective: f64,
}

impl LpSolution {
    fn without_point(status: LpStatus) -> Self {
        LpSolution {
            status,
            values: Vec::new(),
            objective: match status {
                LpStatus::Unbounded => f64::INFINITY,
                _ => f64::NEG_INFINITY,
            },
        }
    }
}

/// How an original variable is expressed through nonnegative columns.
#[derive(Debug, Clone, Copy)]
enum VarMap {
    /// `x = lo + y`
    Shift { col: usize, lo: f64 },
    /// `x = hi - y`
    Flip { col: usize, hi: f64 },
    /// `x = y+ - y-`
    Split { pos: usize, neg: usize },
}

struct Standard {
    /// Rows over structural columns, rhs made nonnegative.
    rows: Vec<(Vec<f64>, Relation, f64)>,
    cost: Vec<f64>,
    maps: Vec<VarMap>,
}

fn standardize(lp: &LinearProgram) -> Standard {
    let mut maps = Vec::with_capacity(lp.num_vars());
    let mut ncols = 0;
    for &(lo, hi) in &lp.bounds {
        let map = if lo.is_finite() {
            VarMap::Shift { col: ncols, lo }
        } else if hi.is_finite() {
            VarMap::Flip { col: ncols, hi }
        } else {
            ncols += 1;
            VarMap::Split {
                pos: ncols - 1,
                neg: ncols,
            }
        };
        ncols += 1;
        maps.push(map);
    }

    let transform = |coeffs: &[f64]| -> (Vec<f64>, f64) {
        let mut row = vec![0.0; ncols];
        let mut constant = 0.0;
        for (j, &a) in coeffs.iter().enumerate() {
            if a == 0.0 {
                continue;
            }
            match maps[j] {
                VarMap::Shift { col, lo } => {
                    row[col] += a;
                    constant += a * lo;
                }
                VarMap::Flip { col, hi } => {
                    row[col] -= a;
                    constant += a * hi;
                }
                VarMap::Split { pos, neg } => {
                    row[pos] += a;
                    row[neg] -= a;
                }
            }
        }
        (row, constant)
    };

    let mut rows = Vec::with_capacity(lp.constraints.len() + lp.num_vars());
    for c in &lp.constraints {
        let (row, constant) = transform(&c.coeffs);
        rows.push((row, c.relation, c.rhs - constant));
    }
    for (j, &(lo, hi)) in lp.bounds.iter().enumerate() {
        if let VarMap::Shift { col, .. } = maps[j] {
            if hi.is_finite() {
                let mut row = vec![0.0; ncols];
                row[col] = 1.0;
                rows.push((row, Relation::Le, hi - lo));
            }
        }
    }
    for (row, rel, rhs) in rows.iter_mut() {
        if *rhs < 0.0 {
            row.iter_mut().for_each(|v| *v = -*v);
            *rhs = -*rhs;
            *rel = match *rel {
                Relation::Le => Relation::Ge,
                Relation::Ge => Relation::Le,
                Relation::Eq => Relation::Eq,
            };
        }
    }
    let (cost, _) = transform(&lp.objective);
    Standard { rows, cost, maps }
}

struct Tableau {
    /// `m` rows of `width + 1` entries, the last being the rhs.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
    /// Reduced costs; entry `width` holds minus the objective value.
    obj: Vec<f64>,
    /// Columns that may enter the basis.
    allowed: Vec<bool>,
    iterations: usize,
}

enum Pivoting {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn set_costs(&mut self, cost: &[f64]) {
        self.obj = cost.to_vec();
        self.obj.push(0.0);
        for (i, &bv) in self.basis.iter().enumerate() {
            let cb = cost[bv];
            if cb != 0.0 {
                for (o, v) in self.obj.iter_mut().zip(&self.t[i]) {
                    *o -= cb * v;
                }
            }
        }
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        self.t[row].iter_mut().for_each(|v| *v /= p);
        self.t[row][col] = 1.0;
        let pivot_row = core::mem::take(&mut self.t[row]);
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                    if v.abs() < DROP_TOL {
                        *v = 0.0;
                    }
                }
                r[col] = 0.0;
            }
        }
        let f = self.obj[col];
        if f != 0.0 {
            for (v, pv) in self.obj.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            self.obj[col] = 0.0;
        }
        self.t[row] = pivot_row;
        self.basis[row] = col;
        self.iterations += 1;
    }

    fn run(&mut self, max_iterations: usize) -> Result<Pivoting> {
        loop {
            if self.iterations > max_iterations {
                return Err(Error::NumericalFailure {
                    residual: f64::INFINITY,
                });
            }
            // Bland: lowest-index improving column.
            let Some(col) = (0..self.width).find(|&j| self.allowed[j] && self.obj[j] > COST_TOL)
            else {
                return Ok(Pivoting::Optimal);
            };
            // Two-pass ratio test: bound the step with slightly relaxed
            // ratios, then take the largest pivot among rows within it.
            let mut bound = f64::INFINITY;
            for r in &self.t {
                let a = r[col];
                if a > PIVOT_TOL {
                    bound = bound.min((r[self.width].max(0.0) + FEAS_TOL) / a);
                }
            }
            let mut leave: Option<(usize, f64)> = None;
            for (i, r) in self.t.iter().enumerate() {
                let a = r[col];
                if a <= PIVOT_TOL || r[self.width].max(0.0) / a > bound {
                    continue;
                }
                leave = match leave {
                    Some((bi, ba))
                        if ba > a * (1.0 + 1e-9)
                            || (a <= ba * (1.0 + 1e-9) && self.basis[bi] < self.basis[i]) =>
                    {
                        Some((bi, ba))
                    }
                    _ => Some((i, a)),
                };
            }
            match leave {
                None => return Ok(Pivoting::Unbounded),
                Some((row, _)) => self.pivot(row, col),
            }
        }
    }
}

/// Solves `a x = b` for square `a` by Gaussian elimination with partial
/// pivoting. `None` when `a` is numerically singular.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| a[i][k].abs().total_cmp(&a[j][k].abs()))?;
        if a[p][k].abs() < 1e-13 {
            return None;
        }
        a.swap(k, p);
        b.swap(k, p);
        for i in k + 1..n {
            let f = a[i][k] / a[k][k];
            if f != 0.0 {
                for j in k..n {
                    a[i][j] -= f * a[k][j];
                }
                b[i] -= f * b[k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let s: f64 = (k + 1..n).map(|j| a[k][j] * x[j]).sum();
        x[k] = (b[k] - s) / a[k][k];
    }
    Some(x)
}

/// Largest violation of any constraint or bound at `x`.
pub fn max_residual(lp: &LinearProgram, x: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for c in &lp.constraints {
        let lhs: f64 = c.coeffs.iter().zip(x).map(|(a, v)| a * v).sum();
        let r = match c.relation {
            Relation::Le => lhs - c.rhs,
            Relation::Ge => c.rhs - lhs,
            Relation::Eq => (lhs - c.rhs).abs(),
        };
        worst = worst.max(r);
    }
    for (&v, &(lo, hi)) in x.iter().zip(&lp.bounds) {
        worst = worst.max(lo - v).max(v - hi);
    }
    worst
}

/// Maximizes `lp`. Deterministic for identical input.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    lp.validate()?;
    if lp.bounds.iter().any(|&(lo, hi)| lo > hi) {
        return Ok(LpSolution::without_point(LpStatus::Infeasible));
    }
    let std = standardize(lp);
    let n_struct = std.cost.len();
    let m = std.rows.len();

    // Column layout: structural | slack/surplus | artificial.
    let n_slack = std
        .rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Eq)
        .count();
    let n_art = std
        .rows
        .iter()
        .filter(|(_, rel, _)| *rel != Relation::Le)
        .count();
    let art_start = n_struct + n_slack;
    let width = art_start + n_art;

    let mut t = Vec::with_capacity(m);
    let mut basis = Vec::with_capacity(m);
    let (mut next_slack, mut next_art) = (n_struct, art_start);
    for (coeffs, rel, rhs) in &std.rows {
        let mut row = vec![0.0; width + 1];
        row[..n_struct].copy_from_slice(coeffs);
        row[width] = *rhs;
        match rel {
            Relation::Le => {
                row[next_slack] = 1.0;
                basis.push(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = -1.0;
                next_slack += 1;
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
            Relation::Eq => {
                row[next_art] = 1.0;
                basis.push(next_art);
                next_art += 1;
            }
        }
        t.push(row);
    }
    let original: Vec<Vec<f64>> = t.clone();

    let mut tab = Tableau {
        t,
        basis,
        width,
        obj: Vec::new(),
        allowed: vec![true; width],
        iterations: 0,
    };
    let max_iterations = 50 * (width + m) + 10_000;

    if n_art > 0 {
        let mut phase1 = vec![0.0; width];
        phase1[art_start..].iter_mut().for_each(|v| *v = -1.0);
        tab.set_costs(&phase1);
        tab.run(max_iterations)?;
        let infeasibility = tab.obj[width];
        let scale = 1.0 + std.rows.iter().map(|r| r.2).fold(0.0, f64::max);
        if infeasibility > FEAS_TOL * scale {
            return Ok(LpSolution::without_point(LpStatus::Infeasible));
        }
        // Drive zero-level artificials out; drop rows that are redundant.
        let mut keep = vec![true; m];
        for i in 0..m {
            if tab.basis[i] < art_start {
                continue;
            }
            let best = (0..art_start)
                .filter(|&j| tab.t[i][j].abs() > PIVOT_TOL)
                .max_by(|&a, &b| tab.t[i][a].abs().total_cmp(&tab.t[i][b].abs()).then(b.cmp(&a)));
            match best {
                Some(j) => tab.pivot(i, j),
                None => keep[i] = false,
            }
        }
        let mut idx = 0;
        tab.t.retain(|_| {
            idx += 1;
            keep[idx - 1]
        });
        let mut idx = 0;
        tab.basis.retain(|_| {
            idx += 1;
            keep[idx - 1]
        });
        for a in tab.allowed[art_start..].iter_mut() {
            *a = false;
        }
        let mut original_kept = Vec::new();
        for (row, k) in original.into_iter().zip(&keep) {
            if *k {
                original_kept.push(row);
            }
        }
        return finish(lp, &std, tab, original_kept, max_iterations);
    }
    finish(lp, &std, tab, original, max_iterations)
}

fn finish(
    lp: &LinearProgram,
    std: &Standard,
    mut tab: Tableau,
    original: Vec<Vec<f64>>,
    max_iterations: usize,
) -> Result<LpSolution> {
    let width = tab.width;
    let mut cost = vec![0.0; width];
    cost[..std.cost.len()].copy_from_slice(&std.cost);
    tab.set_costs(&cost);
    if let Pivoting::Unbounded = tab.run(max_iterations)? {
        return Ok(LpSolution::without_point(LpStatus::Unbounded));
    }

    let mut y = vec![0.0; width];
    for (i, &bv) in tab.basis.iter().enumerate() {
        y[bv] = tab.t[i][width];
    }
    // Recompute the basic values from the original rows.
    let mrows = original.len();
    let basis_matrix: Vec<Vec<f64>> = original
        .iter()
        .map(|row| tab.basis.iter().map(|&bv| row[bv]).collect())
        .collect();
    let rhs: Vec<f64> = original.iter().map(|row| row[width]).collect();
    let first = extract(lp, std, &y);
    let mut best = (max_residual(lp, &first), first);
    if mrows > 0 {
        if let Some(sol) = solve_dense(basis_matrix, rhs) {
            let mut y2 = vec![0.0; width];
            for (&bv, v) in tab.basis.iter().zip(sol) {
                y2[bv] = v;
            }
            let candidate = extract(lp, std, &y2);
            let r = max_residual(lp, &candidate);
            if r <= best.0 {
                best = (r, candidate);
            }
        }
    }
    let (residual, mut values) = best;
    if residual > MAX_RESIDUAL {
        return Err(Error::NumericalFailure { residual });
    }
    // Snap tiny bound violations left by round-off.
    for (v, &(lo, hi)) in values.iter_mut().zip(&lp.bounds) {
        *v = v.clamp(lo, hi);
    }
    let objective = lp.objective.iter().zip(&values).map(|(c, v)| c * v).sum();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        values,
        objective,
    })
}

fn extract(lp: &LinearProgram, std: &Standard, y: &[f64]) -> Vec<f64> {
    (0..lp.num_vars())
        .map(|j| match std.maps[j] {
            VarMap::Shift { col, lo } => lo + y[col],
            VarMap::Flip { col, hi } => hi - y[col],
            VarMap::Split { pos, neg } => y[pos] - y[neg],
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-9
    }

    #[test]
    fn single_variable() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add_constraint(vec![1.0], Relation::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert_eq!(s.status, LpStatus::Optimal);
        assert!(close(s.values[0], 1.0) && close(s.objective, 1.0));
    }

    #[test]
    fn degenerate_tie_is_deterministic() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0, 1.0], Relation::Le, 1.0);
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.objective, 1.0));
        assert_eq!(s.values, vec![1.0, 0.0]);
        assert_eq!(solve_lp(&lp).unwrap(), s);
    }

    #[test]
    fn infeasible() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.add_constraint(vec![1.0], Relation::Le, -1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded() {
        let mut lp = LinearProgram::maximize(vec![1.0, 0.0]);
        lp.add_constraint(vec![1.0, -1.0], Relation::Le, 1.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn equality_and_ge_rows() {
        // max 3x + 2y, x + y = 4, x - y >= 1, x <= 3
        let mut lp = LinearProgram::maximize(vec![3.0, 2.0]);
        lp.add_constraint(vec![1.0, 1.0], Relation::Eq, 4.0);
        lp.add_constraint(vec![1.0, -1.0], Relation::Ge, 1.0);
        lp.set_bounds(0, 0.0, 3.0);
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.values[0], 3.0) && close(s.values[1], 1.0));
        assert!(close(s.objective, 11.0));
    }

    #[test]
    fn free_and_negative_bounds() {
        // max -|x - 2| style: max t s.t. t <= x - 2, t <= 2 - x, x free, t free
        let mut lp = LinearProgram::maximize(vec![0.0, 1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, f64::INFINITY);
        lp.set_bounds(1, f64::NEG_INFINITY, f64::INFINITY);
        lp.add_constraint(vec![-1.0, 1.0], Relation::Le, -2.0);
        lp.add_constraint(vec![1.0, 1.0], Relation::Le, 2.0);
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.values[0], 2.0) && close(s.values[1], 0.0));

        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, -3.0);
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.values[0], -3.0));

        let mut lp = LinearProgram::maximize(vec![-1.0]);
        lp.set_bounds(0, f64::NEG_INFINITY, -3.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Unbounded);
    }

    #[test]
    fn redundant_equalities() {
        let mut lp = LinearProgram::maximize(vec![1.0, 2.0]);
        lp.add_constraint(vec![1.0, 1.0], Relation::Eq, 1.0);
        lp.add_constraint(vec![2.0, 2.0], Relation::Eq, 2.0);
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.objective, 2.0));
    }

    #[test]
    fn fixed_variable() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.set_bounds(0, 0.5, 0.5);
        lp.add_constraint(vec![1.0, 1.0], Relation::Le, 2.0);
        let s = solve_lp(&lp).unwrap();
        assert!(close(s.values[0], 0.5) && close(s.objective, 2.0));
    }

    #[test]
    fn crossed_bounds_are_infeasible() {
        let mut lp = LinearProgram::maximize(vec![1.0]);
        lp.set_bounds(0, 1.0, 0.0);
        assert_eq!(solve_lp(&lp).unwrap().status, LpStatus::Infeasible);
    }

    #[test]
    fn rejects_ragged_rows() {
        let mut lp = LinearProgram::maximize(vec![1.0, 1.0]);
        lp.add_constraint(vec![1.0], Relation::Le, 1.0);
        assert!(solve_lp(&lp).is_err());
    }
}

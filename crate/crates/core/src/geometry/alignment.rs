use alloc::vec;
use alloc::vec::Vec;

use super::partition::identifiable_region;
use crate::model::{hat_d, hat_u, BasicGame, Modulator};

/// Fit tolerance for declaring two utilities affinely related.
const FIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Alignment {
    CompletelyAligned,
    CompletelyMisaligned,
    Neither,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentReport {
    pub rho_s: f64,
    /// One translation per group: per state for user pairs, per
    /// `(state, type)` (row-major) for the defender.
    pub rho_t: Vec<f64>,
    pub classification: Alignment,
    pub residual: f64,
    /// The source utility is constant within every group, so the scale is
    /// not identified; the classification then comes from another test.
    pub degenerate_fit: bool,
}

struct Fit {
    rho_s: f64,
    rho_t: Vec<f64>,
    residual: f64,
    degenerate: bool,
}

/// Least squares `y ≈ ρ z + t_g` with a free translation per group.
fn fit(groups: &[Vec<(f64, f64)>]) -> Fit {
    let means: Vec<(f64, f64)> = groups
        .iter()
        .map(|g| {
            let n = g.len() as f64;
            (
                g.iter().map(|p| p.0).sum::<f64>() / n,
                g.iter().map(|p| p.1).sum::<f64>() / n,
            )
        })
        .collect();
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (g, &(zm, ym)) in groups.iter().zip(&means) {
        for &(z, y) in g {
            sxy += (z - zm) * (y - ym);
            sxx += (z - zm) * (z - zm);
        }
    }
    let degenerate = sxx <= 1e-18;
    let rho_s = if degenerate { 0.0 } else { sxy / sxx };
    let rho_t: Vec<f64> = means.iter().map(|&(zm, ym)| ym - rho_s * zm).collect();
    let residual = groups
        .iter()
        .zip(&rho_t)
        .flat_map(|(g, &t)| g.iter().map(move |&(z, y)| (y - rho_s * z - t).abs()))
        .fold(0.0, f64::max);
    Fit {
        rho_s,
        rho_t,
        residual,
        degenerate,
    }
}

fn classify_fit(f: &Fit) -> Alignment {
    if f.residual > FIT_TOL {
        Alignment::Neither
    } else if f.rho_s >= 0.0 {
        Alignment::CompletelyAligned
    } else {
        Alignment::CompletelyMisaligned
    }
}

/// Is type `l`'s modulated utility an affine image of type `h`'s, state by
/// state?
pub fn classify_alignment(
    game: &BasicGame,
    modulator: &Modulator,
    l: usize,
    h: usize,
) -> AlignmentReport {
    let (n, k) = (game.num_states(), game.num_actions());
    let groups: Vec<Vec<(f64, f64)>> = (0..n)
        .map(|x| {
            (0..k)
                .map(|a| (hat_u(game, modulator, x, h, a), hat_u(game, modulator, x, l, a)))
                .collect()
        })
        .collect();
    let f = fit(&groups);
    let classification = if f.degenerate {
        // Type h is indifferent everywhere; fall back on whether the two
        // types can ever be told apart.
        match identifiable_region(game, modulator, l, h) {
            Ok(region) if region.is_empty() && l != h => Alignment::CompletelyAligned,
            _ => Alignment::Neither,
        }
    } else {
        classify_fit(&f)
    };
    AlignmentReport {
        rho_s: f.rho_s,
        rho_t: f.rho_t,
        classification,
        residual: f.residual,
        degenerate_fit: f.degenerate,
    }
}

/// Is the defender's modulated utility `ρ v̂_U + ρ_t(x, θ)` with one shared
/// scale? Restricted to type `ty` when given, otherwise over all types.
pub fn classify_defender_alignment(
    game: &BasicGame,
    modulator: &Modulator,
    ty: Option<usize>,
) -> AlignmentReport {
    let (n, k) = (game.num_states(), game.num_actions());
    let types: Vec<usize> = match ty {
        Some(t) => vec![t],
        None => (0..game.num_types()).collect(),
    };
    let mut groups = Vec::with_capacity(n * types.len());
    for x in 0..n {
        for &t in &types {
            groups.push(
                (0..k)
                    .map(|a| (hat_u(game, modulator, x, t, a), hat_d(game, modulator, x, t, a)))
                    .collect(),
            );
        }
    }
    let f = fit(&groups);
    let classification = if f.degenerate {
        Alignment::Neither
    } else {
        classify_fit(&f)
    };
    AlignmentReport {
        rho_s: f.rho_s,
        rho_t: f.rho_t,
        classification,
        residual: f.residual,
        degenerate_fit: f.degenerate,
    }
}

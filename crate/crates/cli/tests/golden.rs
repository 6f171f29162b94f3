//! Case-study tables against committed references on coarse grids.
//! Set `UPDATE_GOLDEN=1` to rewrite the references.

use std::path::PathBuf;

use deception::write_csv;
use deception_core::insider::{
    decision_thresholds, figure_data, Figure, FigureConfig, InsiderParams, Table,
};

const TOL: f64 = 1e-6;

fn config() -> FigureConfig {
    FigureConfig {
        surface_points: 11,
        curve_points: 21,
        ..FigureConfig::default()
    }
}

fn reference_path(figure: Figure) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{figure}.csv"))
}

fn parse(text: &str) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn table(figure: Figure) -> Table {
    figure_data(figure, &InsiderParams::benchmark(), &config()).unwrap()
}

#[test]
fn figures_match_references() {
    let update = std::env::var_os("UPDATE_GOLDEN").is_some();
    for figure in Figure::ALL {
        let mut out = Vec::new();
        write_csv(&table(figure), &mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let path = reference_path(figure);
        if update {
            std::fs::write(&path, &text).unwrap();
            continue;
        }
        let reference = std::fs::read_to_string(&path).unwrap();
        let (h1, r1) = parse(&text);
        let (h2, r2) = parse(&reference);
        assert_eq!(h1, h2, "{figure} header");
        assert_eq!(r1.len(), r2.len(), "{figure} row count");
        for (i, (a, b)) in r1.iter().zip(&r2).enumerate() {
            assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() <= TOL, "{figure} row {i}: {x} vs {y}");
            }
        }
    }
}

#[test]
fn prior_utility_vanishes_beyond_the_selfish_threshold() {
    let t_g = decision_thresholds(&InsiderParams::benchmark()).selfish;
    for r in &table(Figure::Fig5a).rows {
        if r[0] >= t_g {
            assert_eq!(r[2], 0.0, "p={} q={}", r[0], r[1]);
        }
    }
    for r in &table(Figure::Fig8a).rows {
        if r[1] >= t_g {
            assert_eq!(r[2], 0.0, "p_d={} p_u={}", r[0], r[1]);
        }
    }
}

#[test]
fn win_win_interval_without_signals() {
    // Selfish insiders and the defender both gain exactly on [0.52, 0.74).
    let t = figure_data(
        Figure::Fig7a,
        &InsiderParams::benchmark(),
        &FigureConfig {
            curve_points: 201,
            ..FigureConfig::default()
        },
    )
    .unwrap();
    for r in &t.rows {
        let win_win = r[1] > 1e-9 && r[2] > 1e-9;
        let inside = r[0] >= 0.52 - 1e-12 && r[0] < 0.74 - 1e-12;
        assert_eq!(win_win, inside, "phi0={}", r[0]);
    }
}

#[test]
fn access_utilities_fall_linearly_in_the_honeypot_fraction() {
    // Below both thresholds everyone accesses: slopes phi_g_U - 1 and
    // phi_H_U - phi_N_U.
    let b = InsiderParams::benchmark();
    let cfg = FigureConfig {
        curve_points: 3,
        phi_min: 0.0,
        phi_max: 0.0,
        ..FigureConfig::default()
    };
    let at = |p: f64| {
        let t = figure_data(Figure::Fig7a, &b, &FigureConfig { fig7_honeypot: p, ..cfg }).unwrap();
        (t.rows[0][2], t.rows[0][3])
    };
    let (s0, a0) = at(0.1);
    let (s1, a1) = at(0.3);
    assert!(((s1 - s0) / 0.2 - (b.phi_g_u - 1.0)).abs() < 1e-12);
    assert!(((a1 - a0) / 0.2 - (b.phi_h_u - b.phi_n_u)).abs() < 1e-12);
}

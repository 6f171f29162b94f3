use std::fs;
use std::path::Path;

use deception_core::insider::{insider_game, InsiderParams};
use deception_core::{
    BasicGame, BeliefProfile, Error as CoreError, Invariant, Modulator, TypeBelief, UtilityTable,
};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Agreement tolerance between an insider block and the explicit tables.
const INSIDER_TOL: f64 = 1e-12;

/// On-disk game description. See `data/schema.md`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GameSpec {
    pub states: Vec<String>,
    pub types: Vec<String>,
    /// The first action is the drop-out action and must be named `DO`.
    pub actions: Vec<String>,
    /// `[state][type][action]`
    #[serde(rename = "utility_D")]
    pub utility_d: Vec<Vec<Vec<f64>>>,
    #[serde(rename = "utility_U")]
    pub utility_u: Vec<Vec<Vec<f64>>>,
    pub beliefs: BeliefsSpec,
    pub modulator: ModulatorSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub insider: Option<InsiderSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeliefsSpec {
    pub b: Vec<f64>,
    /// One row per type.
    #[serde(rename = "b_U")]
    pub b_u: Vec<Vec<f64>>,
    /// One row per state.
    #[serde(rename = "b_D")]
    pub b_d: Vec<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModulatorSpec {
    pub gamma: f64,
    pub c: Vec<f64>,
}

/// Case-study parameters; missing fields take the benchmark values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InsiderSpec {
    pub r_u: f64,
    pub r_d: f64,
    pub phi_g_u: f64,
    pub phi_g_d: f64,
    pub phi_h_u: f64,
    pub phi_h_d: f64,
    pub phi_n_u: f64,
    pub phi_n_d: f64,
    pub phi0: f64,
    pub q_g: f64,
    pub q_b: f64,
    pub p_d0h: f64,
    pub p_u0h: f64,
}

impl Default for InsiderSpec {
    fn default() -> Self {
        InsiderParams::benchmark().into()
    }
}

impl From<InsiderParams> for InsiderSpec {
    fn from(p: InsiderParams) -> Self {
        InsiderSpec {
            r_u: p.r_u,
            r_d: p.r_d,
            phi_g_u: p.phi_g_u,
            phi_g_d: p.phi_g_d,
            phi_h_u: p.phi_h_u,
            phi_h_d: p.phi_h_d,
            phi_n_u: p.phi_n_u,
            phi_n_d: p.phi_n_d,
            phi0: p.phi0,
            q_g: p.q_g,
            q_b: p.q_b,
            p_d0h: p.p_d0h,
            p_u0h: p.p_u0h,
        }
    }
}

impl From<InsiderSpec> for InsiderParams {
    fn from(p: InsiderSpec) -> Self {
        InsiderParams {
            r_u: p.r_u,
            r_d: p.r_d,
            phi_g_u: p.phi_g_u,
            phi_g_d: p.phi_g_d,
            phi_h_u: p.phi_h_u,
            phi_h_d: p.phi_h_d,
            phi_n_u: p.phi_n_u,
            phi_n_d: p.phi_n_d,
            phi0: p.phi0,
            q_g: p.q_g,
            q_b: p.q_b,
            p_d0h: p.p_d0h,
            p_u0h: p.p_u0h,
        }
    }
}

/// Validated model objects read from a spec.
#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub game: BasicGame,
    pub beliefs: BeliefProfile,
    pub modulator: Modulator,
    pub insider: Option<InsiderParams>,
}

impl GameSpec {
    pub fn from_model(game: &BasicGame, beliefs: &BeliefProfile, modulator: &Modulator) -> Self {
        GameSpec {
            states: game.states().to_vec(),
            types: game.types().to_vec(),
            actions: game.actions().to_vec(),
            utility_d: game.utility_d().to_nested(),
            utility_u: game.utility_u().to_nested(),
            beliefs: BeliefsSpec {
                b: beliefs.b().to_vec(),
                b_u: beliefs.b_u_rows().to_vec(),
                b_d: beliefs.b_d().rows().to_vec(),
            },
            modulator: ModulatorSpec {
                gamma: modulator.gamma(),
                c: modulator.c().to_vec(),
            },
            insider: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("spec serializes");
        s.push('\n');
        s
    }

    /// Builds the model, locating failures in `source` when given.
    fn build(&self, source: Option<&str>) -> Result<Model> {
        let fail = |path: &[&str], message: String| Error::Validation {
            line: source.map_or(0, |s| locate(s, path)),
            field: path.join("."),
            message,
        };
        if self.actions.first().map(String::as_str) != Some("DO") {
            return Err(fail(&["actions"], "the first action must be named \"DO\"".into()));
        }
        let d = UtilityTable::from_nested(&self.utility_d)
            .map_err(|e| fail(&["utility_D"], e.to_string()))?;
        let u = UtilityTable::from_nested(&self.utility_u)
            .map_err(|e| fail(&["utility_U"], e.to_string()))?;
        let game = BasicGame::new(
            self.states.clone(),
            self.types.clone(),
            self.actions.clone(),
            d,
            u,
        )
        .map_err(|e| fail(&["states"], e.to_string()))?;
        let b_d = TypeBelief::new(self.beliefs.b_d.clone())
            .map_err(|e| fail(&["beliefs", "b_D"], e.to_string()))?;
        if b_d.num_states() != game.num_states() || b_d.num_types() != game.num_types() {
            return Err(fail(
                &["beliefs", "b_D"],
                format!(
                    "dimension mismatch: expected {} rows of {} entries",
                    game.num_states(),
                    game.num_types()
                ),
            ));
        }
        if self.beliefs.b.len() != game.num_states() {
            return Err(fail(&["beliefs", "b"], "one entry per state required".into()));
        }
        if self.beliefs.b_u.len() != game.num_types()
            || self.beliefs.b_u.iter().any(|r| r.len() != game.num_states())
        {
            return Err(fail(
                &["beliefs", "b_U"],
                "one row per type with one entry per state required".into(),
            ));
        }
        let beliefs = BeliefProfile::new(self.beliefs.b.clone(), self.beliefs.b_u.clone(), b_d)
            .map_err(|e| {
                let key = match &e {
                    CoreError::Invalid(Invariant::Normalization(what)) if what == "b" => "b",
                    _ => "b_U",
                };
                fail(&["beliefs", key], e.to_string())
            })?;
        if self.modulator.c.len() != game.num_actions() {
            return Err(fail(&["modulator", "c"], "one entry per action required".into()));
        }
        let modulator = Modulator::new(self.modulator.c.clone(), self.modulator.gamma)
            .map_err(|e| {
                let key = match &e {
                    CoreError::Invalid(Invariant::NegativeGamma) => "gamma",
                    _ => "c",
                };
                fail(&["modulator", key], e.to_string())
            })?;

        let insider = match &self.insider {
            None => None,
            Some(spec) => {
                let params = InsiderParams::from(*spec);
                let (g, b, m) =
                    insider_game(&params).map_err(|e| fail(&["insider"], e.to_string()))?;
                let checks = [
                    ("utility_D", close(g.utility_d().as_slice(), game.utility_d().as_slice())),
                    ("utility_U", close(g.utility_u().as_slice(), game.utility_u().as_slice())),
                    ("beliefs.b", close(b.b(), beliefs.b())),
                    ("beliefs.b_U", close_rows(b.b_u_rows(), beliefs.b_u_rows())),
                    ("beliefs.b_D", close_rows(b.b_d().rows(), beliefs.b_d().rows())),
                    ("modulator.c", close(m.c(), modulator.c())),
                    ("modulator.gamma", close(&[m.gamma()], &[modulator.gamma()])),
                ];
                if let Some((what, _)) = checks.iter().find(|(_, ok)| !ok) {
                    return Err(fail(
                        &["insider"],
                        format!("insider parameters disagree with {what}"),
                    ));
                }
                Some(params)
            }
        };
        Ok(Model {
            game,
            beliefs,
            modulator,
            insider,
        })
    }

    pub fn to_model(&self) -> Result<Model> {
        self.build(None)
    }
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= INSIDER_TOL)
}

fn close_rows(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| close(x, y))
}

/// 1-based line of the last key of `path`, searching for each key after the
/// previous one. 0 when a key is missing.
fn locate(source: &str, path: &[&str]) -> usize {
    let mut from = 0;
    for key in path {
        let needle = format!("\"{key}\"");
        let mut found = None;
        let mut start = from;
        while let Some(i) = source[start..].find(&needle) {
            let at = start + i;
            let rest = source[at + needle.len()..].trim_start();
            if rest.starts_with(':') {
                found = Some(at);
                break;
            }
            start = at + needle.len();
        }
        match found {
            Some(at) => from = at,
            None => return 0,
        }
    }
    source[..from].matches('\n').count() + 1
}

pub fn parse_game_spec_str(text: &str) -> Result<Model> {
    let spec: GameSpec = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    spec.build(Some(text))
}

pub fn parse_game_spec(path: &Path) -> Result<Model> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_game_spec_str(&text)
}

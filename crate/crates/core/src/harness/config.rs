use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Mode;
use crate::dynamics::{CMState, Flow};
use crate::elliptic::{Lattice, LatticeSpec};
use crate::lax::spectral::default_ladder;
use crate::pair_manifold::study::{ConvergenceOptions, StickinessOptions};
use crate::pair_manifold::{embed, ReducedState};

/// Initial data of the full system: explicit, or a pair-manifold embedding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FullInit {
    Explicit { x: Vec<Complex64>, p: Vec<Complex64> },
    Embedded { x: Vec<Complex64>, alpha: Vec<Complex64>, epsilon: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedInit {
    pub x: Vec<Complex64>,
    pub alpha: Vec<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

fn default_lattice() -> LatticeSpec {
    LatticeSpec {
        omega1: Complex64::new(1.0, 0.0),
        omega2: Complex64::new(0.0, 1.0),
    }
}

fn default_flow() -> u8 {
    3
}

fn default_t_end() -> f64 {
    1.0
}

fn default_tol() -> f64 {
    1e-10
}

fn default_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

fn default_conservation_tol() -> f64 {
    1e-8
}

fn default_residual_tol() -> f64 {
    1e-8
}

fn default_spectral_points() -> usize {
    5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_lattice")]
    pub lattice: LatticeSpec,
    /// Optional; must agree with the mode given on the command line.
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub full: Option<FullInit>,
    #[serde(default)]
    pub reduced: Option<ReducedInit>,
    #[serde(default = "default_flow")]
    pub flow: u8,
    #[serde(default = "default_t_end")]
    pub t_end: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Number of equally spaced output samples; every accepted step when
    /// absent.
    #[serde(default)]
    pub samples: Option<usize>,
    #[serde(default = "default_ladder")]
    pub eps_ladder: Vec<f64>,
    #[serde(default)]
    pub z_grid: Vec<Complex64>,
    #[serde(default)]
    pub lambda_grid: Vec<Complex64>,
    /// Random `(z, λ)` points for the determinant conservation check.
    #[serde(default = "default_spectral_points")]
    pub spectral_points: usize,
    #[serde(default)]
    pub stickiness: StickinessOptions,
    #[serde(default)]
    pub convergence: ConvergenceOptions,
    #[serde(default = "default_conservation_tol")]
    pub conservation_tol: f64,
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    #[serde(default = "default_formats")]
    pub formats: Vec<Format>,
    #[serde(default)]
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, String> {
        serde_json::from_str(text).map_err(|e| e.to_string())
    }

    pub fn lattice(&self) -> Result<Lattice, String> {
        Lattice::new(self.lattice.omega1, self.lattice.omega2).map_err(|e| e.to_string())
    }

    pub fn flow(&self) -> Result<Flow, String> {
        Flow::try_from(self.flow).map_err(|e| e.to_string())
    }

    pub fn full_state(&self, lat: &Lattice) -> Result<CMState, String> {
        match &self.full {
            None => Err("mode requires a `full` initial state".into()),
            Some(FullInit::Explicit { x, p }) => CMState::new(x.clone(), p.clone()).map_err(|e| e.to_string()),
            Some(FullInit::Embedded { x, alpha, epsilon }) => {
                let r = ReducedState::new(x.clone(), alpha.clone()).map_err(|e| e.to_string())?;
                embed(lat, &r, *epsilon).map_err(|e| e.to_string())
            }
        }
    }

    pub fn embedding_epsilon(&self) -> Option<f64> {
        match &self.full {
            Some(FullInit::Embedded { epsilon, .. }) => Some(*epsilon),
            _ => None,
        }
    }

    pub fn reduced_state(&self) -> Result<ReducedState, String> {
        let r = self.reduced.as_ref().ok_or("mode requires a `reduced` initial state")?;
        ReducedState::new(r.x.clone(), r.alpha.clone()).map_err(|e| e.to_string())
    }

    /// Mode-specific validation, run before any computation.
    pub fn validate(&self, mode: Mode) -> Result<(), String> {
        if let Some(m) = self.mode {
            if m != mode {
                return Err(format!("config mode {m:?} does not match command-line mode {mode:?}"));
            }
        }
        let lat = self.lattice()?;
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(format!("t_end must be positive, got {}", self.t_end));
        }
        if !(1e-14..=1e-3).contains(&self.tol) {
            return Err(format!("tol must lie in [1e-14, 1e-3], got {}", self.tol));
        }
        if self.samples == Some(0) {
            return Err("samples must be positive".into());
        }
        match mode {
            Mode::Full => {
                self.flow()?;
                self.full_state(&lat)?.check_collisions(&lat).map_err(|e| e.to_string())?;
            }
            Mode::Reduced => {
                self.reduced_state()?.check_collisions(&lat).map_err(|e| e.to_string())?;
            }
            Mode::Compare => {
                self.reduced_state()?.check_collisions(&lat).map_err(|e| e.to_string())?;
                if self.stickiness.eps_list.len() < 2 || self.convergence.eps_list.len() < 2 {
                    return Err("compare mode needs at least two epsilon values per study".into());
                }
            }
            Mode::Spectral => {
                self.reduced_state()?.check_collisions(&lat).map_err(|e| e.to_string())?;
                if self.z_grid.is_empty() || self.lambda_grid.is_empty() {
                    return Err("spectral mode needs non-empty z_grid and lambda_grid".into());
                }
                if self.eps_ladder.len() < 4 {
                    return Err("eps_ladder needs at least 4 entries".into());
                }
            }
            Mode::Selftest | Mode::SelftestElliptic => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse() {
        let c = ScenarioConfig::default();
        assert_eq!(c.flow, 3);
        assert_eq!(c.eps_ladder.len(), 6);
        assert!(c.validate(Mode::Selftest).is_ok());
        assert!(c.validate(Mode::Full).is_err());
    }

    #[test]
    fn complex_numbers_are_pairs() {
        let c = ScenarioConfig::from_json(
            r#"{"lattice": {"omega1": [1, 0], "omega2": [0.2, 1.1]},
                "full": {"x": [[0.1, 0], [0.6, 0.4]], "p": [[0, 0], [0.5, -0.5]]}, "flow": 2}"#,
        )
        .unwrap();
        assert!(c.validate(Mode::Full).is_ok());
        let lat = c.lattice().unwrap();
        assert_eq!(c.full_state(&lat).unwrap().p[1], Complex64::new(0.5, -0.5));
    }

    #[test]
    fn embedded_full_state() {
        let c = ScenarioConfig::from_json(
            r#"{"full": {"x": [[0.1, 0]], "alpha": [[0.2, 0]], "epsilon": 0.001}}"#,
        )
        .unwrap();
        let s = c.full_state(&c.lattice().unwrap()).unwrap();
        assert_eq!(s.n_particles(), 2);
        assert_eq!(c.embedding_epsilon(), Some(1e-3));
    }

    #[test]
    fn rejects_bad_lattice_and_unknown_fields() {
        let c = ScenarioConfig::from_json(r#"{"lattice": {"omega1": [1, 0], "omega2": [0, -1]}}"#).unwrap();
        assert!(c.validate(Mode::Selftest).is_err());
        assert!(ScenarioConfig::from_json(r#"{"tyop": 1}"#).is_err());
    }
}

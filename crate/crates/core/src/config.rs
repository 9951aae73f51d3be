//! JSON problem configuration.
//!
//! ```json
//! {
//!   "points": [{ "x": 0.0, "u": { "triangular": [2.0, 2.0, 2.0] } },
//!              { "x": 0.5, "u": { "breakpoints": [[0.0, 1.0, 4.0], [1.0, 2.0, 3.0]] } }, ...],
//!   "address": [[0, 2], ...],
//!   "alphas": [0.3, ...],
//!   "lambda_grid_size": 64, "grid_density": 64, "tol": 1e-8, "max_iter": 10000, "seed": 1,
//!   "output": { "lambdas": [0.5, 0.75, 1.0], "plot_width": 800, "plot_height": 500 }
//! }
//! ```
//!
//! Triangular ordinates are `[center, left_spread, right_spread]`; breakpoint
//! ordinates are `[λ, lo, hi]` rows starting at λ = 0 and ending at λ = 1.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuzzy::{uniform_levels, union_levels, FuzzyNumber, DEFAULT_LAMBDA_GRID};
use crate::rifs::{AddressMap, FuzzyDataSet, RifsSpec};
use crate::solver::SolveOptions;

pub const EXAMPLE2_CONFIG: &str = include_str!("../data/example2.json");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Ordinate {
    Triangular([f64; 3]),
    Breakpoints(Vec<[f64; 3]>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataPoint {
    pub x: f64,
    pub u: Ordinate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputOptions {
    #[serde(default = "default_lambdas")]
    pub lambdas: Vec<f64>,
    #[serde(default = "default_width")]
    pub plot_width: u32,
    #[serde(default = "default_height")]
    pub plot_height: u32,
}

impl Default for OutputOptions {
    fn default() -> Self {
        OutputOptions {
            lambdas: default_lambdas(),
            plot_width: default_width(),
            plot_height: default_height(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub points: Vec<DataPoint>,
    pub address: Vec<(usize, usize)>,
    pub alphas: Vec<f64>,
    #[serde(default = "default_lambda_grid")]
    pub lambda_grid_size: usize,
    #[serde(default = "default_density")]
    pub grid_density: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputOptions,
}

fn default_lambdas() -> Vec<f64> {
    vec![0.5, 0.75, 1.0]
}
fn default_width() -> u32 {
    800
}
fn default_height() -> u32 {
    500
}
fn default_lambda_grid() -> usize {
    DEFAULT_LAMBDA_GRID
}
fn default_density() -> usize {
    64
}
fn default_tol() -> f64 {
    1e-8
}
fn default_max_iter() -> usize {
    10_000
}

impl ProblemConfig {
    /// Parses JSON; syntax and type errors carry line and column.
    pub fn from_json(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn example2() -> Self {
        Self::from_json(EXAMPLE2_CONFIG).expect("bundled config parses")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            grid_density: self.grid_density,
            tol: self.tol,
            max_iter: self.max_iter,
        }
    }

    /// Builds the ordinates; breakpoint ordinates are resampled onto the union
    /// of their breakpoints and the uniform λ-grid.
    pub fn ordinates(&self) -> Result<Vec<FuzzyNumber>> {
        if self.lambda_grid_size == 0 {
            return Err(Error::Config("lambda_grid_size: must be at least 1".into()));
        }
        let uniform = uniform_levels(self.lambda_grid_size);
        self.points
            .iter()
            .enumerate()
            .map(|(k, p)| {
                let u = match &p.u {
                    Ordinate::Triangular([c, l, r]) => {
                        FuzzyNumber::triangular(*c, *l, *r, self.lambda_grid_size)
                    }
                    Ordinate::Breakpoints(rows) => {
                        let pts: Vec<(f64, f64, f64)> =
                            rows.iter().map(|r| (r[0], r[1], r[2])).collect();
                        FuzzyNumber::from_breakpoints(&pts).map(|u| {
                            let grid = union_levels([u.levels(), &uniform[..]]);
                            u.resample(grid)
                        })
                    }
                };
                u.map_err(|e| Error::Config(format!("points[{k}].u: {e}")))
            })
            .collect()
    }

    pub fn build_spec(&self) -> Result<RifsSpec> {
        let us = self.ordinates()?;
        let points = self.points.iter().map(|p| p.x).zip(us).collect();
        let data = FuzzyDataSet::new(points).map_err(|e| match e {
            Error::NotIncreasing { index, value } => Error::Config(format!(
                "points[{index}].x: abscissae must be strictly increasing (got {value})"
            )),
            Error::TooFewPoints(n) => {
                Error::Config(format!("points: need at least 3 data points, got {n}"))
            }
            other => Error::Config(format!("points: {other}")),
        })?;
        RifsSpec::new(
            data,
            AddressMap::new(self.address.clone()),
            self.alphas.clone(),
        )
        .map_err(|e| match e {
            Error::InvalidAddress { interval, reason } => {
                Error::Config(format!("address[{}]: {reason}", interval.saturating_sub(1)))
            }
            Error::AlphaOutOfRange { interval, value } => Error::Config(format!(
                "alphas[{}]: {value} is outside [0, 1)",
                interval - 1
            )),
            Error::AlphaCount { expected, got } => {
                Error::Config(format!("alphas: expected {expected} values, got {got}"))
            }
            other => other,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_config_builds() {
        let cfg = ProblemConfig::example2();
        let spec = cfg.build_spec().unwrap();
        assert_eq!(spec.intervals(), 4);
        assert_eq!(spec.data().levels().len(), 65);
        assert_eq!(cfg.output.lambdas, vec![0.5, 0.75, 1.0]);
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = ProblemConfig::from_json("{\n  \"points\": 3\n}").unwrap_err();
        assert_eq!(err.line(), 2);
        let err = ProblemConfig::from_json(
            "{\"points\": [], \"address\": [], \"alphas\": [], \"bogus\": 1}",
        )
        .unwrap_err();
        assert!(err.to_string().contains("bogus"));
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let mut cfg = ProblemConfig::example2();
        cfg.address[0] = (0, 1);
        let msg = cfg.build_spec().unwrap_err().to_string();
        assert!(
            msg.contains("address[0]") && msg.contains("e_i - s_i >= 2"),
            "{msg}"
        );

        let mut cfg = ProblemConfig::example2();
        cfg.points[2].x = 0.1;
        let msg = cfg.build_spec().unwrap_err().to_string();
        assert!(msg.contains("points[2].x"), "{msg}");

        let mut cfg = ProblemConfig::example2();
        cfg.points[1].u = Ordinate::Triangular([3.0, -1.0, 1.0]);
        let msg = cfg.build_spec().unwrap_err().to_string();
        assert!(msg.contains("points[1].u"), "{msg}");
    }

    #[test]
    fn breakpoint_ordinates() {
        let mut cfg = ProblemConfig::example2();
        cfg.points[1].u = Ordinate::Breakpoints(vec![[0.0, 2.0, 4.0], [1.0, 3.0, 3.0]]);
        let spec = cfg.build_spec().unwrap();
        let reference = ProblemConfig::example2().build_spec().unwrap();
        assert!(spec.data().u(1).d_inf(reference.data().u(1)) < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let cfg = ProblemConfig::example2();
        assert_eq!(ProblemConfig::from_json(&cfg.to_json()).unwrap(), cfg);
    }
}

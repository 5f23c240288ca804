//! Run configuration embedded in every output file for provenance and
//! reproducibility: identical configs must reproduce byte-identical outputs.

use serde::{Deserialize, Serialize};

pub const CONFIG_SCHEMA: &str = "run-config/1";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunConfig {
    pub schema: String,
    pub command: String,
    pub symmetry: Option<String>,
    pub truncation: Option<usize>,
    pub route: Option<String>,
    /// FD step for chart-calculus residuals.
    pub fd_step: f64,
    /// Integrator tolerance.
    pub tol: f64,
    pub grid: Option<usize>,
    pub eps_grad_scale: f64,
    pub delta_level_scale: f64,
    pub delta_cluster_scale: f64,
    pub seed: u64,
    pub threads: usize,
    pub deterministic: bool,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        RunConfig {
            schema: CONFIG_SCHEMA.to_string(),
            command: command.to_string(),
            symmetry: None,
            truncation: None,
            route: None,
            fd_step: 1e-3,
            tol: 1e-10,
            grid: None,
            eps_grad_scale: 1e-3,
            delta_level_scale: 1e-3,
            delta_cluster_scale: 1e-2,
            seed: 0,
            threads: 0,
            deterministic: false,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.fd_step > 0.0) {
            return Err("fd step must be positive".into());
        }
        if !(self.tol > 0.0) {
            return Err("tolerance must be positive".into());
        }
        if self.grid == Some(0) {
            return Err("grid size must be positive".into());
        }
        if !(self.eps_grad_scale > 0.0 && self.delta_level_scale > 0.0 && self.delta_cluster_scale > 0.0) {
            return Err("threshold scales must be positive".into());
        }
        Ok(())
    }
}

//! Run-wide numerical settings.

use crate::error::{HbError, Result};
use serde::{Deserialize, Serialize};

/// Truncation degree, grid size and tolerances shared by every pipeline.
///
/// Tolerances are stored in double precision and converted to the working
/// scalar at the point of use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Config {
    /// Truncation degree `N` of every computed series.
    pub degree: usize,
    /// Boundary grid size `M`; a power of two with `M ≥ 2N + 2`.
    pub grid: usize,
    /// Smallest admissible `|d(0)|` when inverting a series.
    pub eps_floor: f64,
    /// Grid points with `1 − BB* < eps_deg` are trimmed from log quadratures.
    pub eps_deg: f64,
    /// Largest admissible trimmed fraction of the grid.
    pub trim_cap: f64,
    /// Target boundary residual of the matrix iteration.
    pub iteration_tol: f64,
    pub max_iterations: usize,
    /// Abort after this many steps without a new best residual.
    pub stall_window: usize,
    /// Residual above which a factorization is reported as failed.
    pub factor_tol: f64,
    /// Tolerance for norm identities and tail budgets.
    pub norm_tol: f64,
    /// Relative agreement demanded by the doubling oracle.
    pub oracle_tol: f64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            degree: 256,
            grid: 1024,
            eps_floor: 1e-12,
            eps_deg: 1e-9,
            trim_cap: 0.01,
            iteration_tol: 1e-10,
            max_iterations: 200,
            stall_window: 10,
            factor_tol: 1e-8,
            norm_tol: 1e-10,
            oracle_tol: 5e-3,
        }
    }
}

impl Config {
    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = degree;
        self
    }

    pub fn with_grid(mut self, grid: usize) -> Self {
        self.grid = grid;
        self
    }

    /// Checks the invariants `M ≥ 2N + 2`, `M` a power of two and positive tolerances.
    pub fn validate(&self) -> Result<()> {
        let required = 2 * self.degree + 2;
        if self.grid < required || !self.grid.is_power_of_two() {
            return Err(HbError::GridTooSmall {
                grid: self.grid,
                degree: self.degree,
                required,
            });
        }
        let tols = [
            ("eps_floor", self.eps_floor),
            ("eps_deg", self.eps_deg),
            ("trim_cap", self.trim_cap),
            ("iteration_tol", self.iteration_tol),
            ("factor_tol", self.factor_tol),
            ("norm_tol", self.norm_tol),
            ("oracle_tol", self.oracle_tol),
        ];
        if let Some((name, v)) = tols.iter().find(|(_, v)| !(*v > 0.0)) {
            return Err(HbError::Invalid(format!(
                "{name} must be positive, got {v}"
            )));
        }
        if self.max_iterations == 0 || self.stall_window == 0 {
            return Err(HbError::Invalid("iteration limits must be positive".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let c = Config::default();
        assert_eq!((c.degree, c.grid), (256, 1024));
        c.validate().unwrap();
        assert!(Config::default().with_grid(500).validate().is_err());
        assert!(Config::default().with_degree(600).validate().is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::element::Slack;
use crate::error::{Error, Result};

/// Tolerances shared by the deciders.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CheckConfig {
    /// Strictly descending, positive.
    pub eps_grid: Vec<f64>,
    /// Largest coordinate index examined for condition (1).
    pub k_max: usize,
    /// Smallest coordinate gap reported as a certified failure.
    pub delta: f64,
    pub slack: Slack,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig {
            eps_grid: vec![1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6],
            k_max: 64,
            delta: 1e-9,
            slack: Slack::DEFAULT,
        }
    }
}

impl CheckConfig {
    pub fn validate(&self) -> Result<()> {
        if self.eps_grid.is_empty() {
            return Err(Error::invalid("eps_grid", "must not be empty"));
        }
        if let Some(e) = self.eps_grid.iter().find(|e| !(e.is_finite() && **e > 0.0)) {
            return Err(Error::invalid("eps_grid", format!("entry {e} is not positive")));
        }
        if self.eps_grid.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::invalid("eps_grid", "must be strictly descending"));
        }
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::invalid("delta", format!("must be positive, got {}", self.delta)));
        }
        Slack::new(self.slack.value())?;
        Ok(())
    }
}

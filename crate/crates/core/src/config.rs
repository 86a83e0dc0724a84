//! Every threshold and constant the analysis uses, with defaults.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::patterns::PatternConfig;
use crate::resilience::DEFAULT_EPSILON;
use crate::taxonomy::TaxonomyThresholds;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SigmaMaxPolicy {
    /// Severity of the empty actual ontology against the ideal.
    #[default]
    Computed,
    Override(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisConfig {
    pub taxonomy: TaxonomyThresholds,
    pub patterns: PatternConfig,
    /// Balance smoothing term of the resilience score.
    pub epsilon: f64,
    pub sigma_max: SigmaMaxPolicy,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            taxonomy: TaxonomyThresholds::default(),
            patterns: PatternConfig::default(),
            epsilon: DEFAULT_EPSILON,
            sigma_max: SigmaMaxPolicy::Computed,
        }
    }
}

impl AnalysisConfig {
    pub fn check(&self) -> Result<()> {
        self.taxonomy.check()?;
        self.patterns.check()?;
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        if let SigmaMaxPolicy::Override(v) = self.sigma_max {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config("sigma_max override must be positive".into()));
            }
        }
        Ok(())
    }
}

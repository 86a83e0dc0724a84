//! Ontological resilience: completeness × dimensional balance × mobility.

use alloc::format;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ontology::{dimension_means, Ontology};

pub const DEFAULT_EPSILON: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResilienceInputs {
    pub sigma: f64,
    pub sigma_max: f64,
    pub max_mean_weight: f64,
    pub dimension_count: usize,
    pub switch_cost: f64,
    pub omega_budget: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResilienceReport {
    pub res: f64,
    pub completeness: f64,
    /// Balance normalized to 1 at perfectly uniform dimension means.
    pub balance: f64,
    /// `1 − max_d w + ε` before normalization.
    pub raw_balance: f64,
    pub mobility: f64,
    pub inputs: ResilienceInputs,
}

/// Resilience of `actual` given its severity and switch cost. The balance
/// count `|D|` is the number of dimensions present in `actual`.
pub fn resilience(
    sigma: f64,
    sigma_max: f64,
    actual: &Ontology,
    switch_cost: f64,
    omega_budget: f64,
    epsilon: f64,
) -> Result<ResilienceReport> {
    let means = dimension_means(actual)?;
    let max_mean_weight = means
        .values()
        .copied()
        .reduce(f64::max)
        .ok_or_else(|| Error::Domain("actual ontology has no dimensions".into()))?;
    resilience_from_parts(ResilienceInputs {
        sigma,
        sigma_max,
        max_mean_weight,
        dimension_count: means.len(),
        switch_cost,
        omega_budget,
        epsilon,
    })
}

pub fn resilience_from_parts(inputs: ResilienceInputs) -> Result<ResilienceReport> {
    let ResilienceInputs {
        sigma,
        sigma_max,
        max_mean_weight,
        dimension_count,
        switch_cost,
        omega_budget,
        epsilon,
    } = inputs;
    let bound = |ok: bool, msg: &str| {
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("{msg} (inputs: {inputs:?})")))
        }
    };
    bound(
        sigma_max > 0.0 && sigma_max.is_finite(),
        "sigma_max must be positive",
    )?;
    bound(
        sigma >= 0.0 && sigma <= sigma_max,
        "sigma must lie in [0, sigma_max]",
    )?;
    bound(
        omega_budget > 0.0 && omega_budget.is_finite(),
        "omega_budget must be positive",
    )?;
    bound(
        epsilon > 0.0 && epsilon.is_finite(),
        "epsilon must be positive",
    )?;
    bound(dimension_count >= 1, "at least one dimension is required")?;
    bound(
        (0.0..=1.0).contains(&max_mean_weight),
        "max mean weight must lie in [0, 1]",
    )?;
    bound(switch_cost.is_finite(), "switch cost must be finite")?;

    let completeness = 1.0 - sigma / sigma_max;
    let raw_balance = 1.0 - max_mean_weight + epsilon;
    let balanced = 1.0 - 1.0 / dimension_count as f64 + epsilon;
    let balance = libm::fmin(raw_balance / balanced, 1.0);
    let mobility = 1.0 / (1.0 + libm::fmax(0.0, switch_cost) / omega_budget);
    Ok(ResilienceReport {
        res: completeness * balance * mobility,
        completeness,
        balance,
        raw_balance,
        mobility,
        inputs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parts(sigma: f64, max_w: f64, switch_cost: f64) -> ResilienceInputs {
        ResilienceInputs {
            sigma,
            sigma_max: 1.9,
            max_mean_weight: max_w,
            dimension_count: 4,
            switch_cost,
            omega_budget: 10.0,
            epsilon: 0.01,
        }
    }

    #[test]
    fn perfect_conditions_give_one() {
        let r = resilience_from_parts(parts(0.0, 0.25, 0.0)).unwrap();
        assert_eq!(
            (r.completeness, r.balance, r.mobility, r.res),
            (1.0, 1.0, 1.0, 1.0)
        );
    }

    #[test]
    fn full_severity_gives_zero() {
        let r = resilience_from_parts(parts(1.9, 0.25, 0.0)).unwrap();
        assert_eq!(r.completeness, 0.0);
        assert_eq!(r.res, 0.0);
    }

    #[test]
    fn hand_evaluated_point() {
        let r = resilience_from_parts(parts(0.95, 0.9, 10.0)).unwrap();
        assert_eq!(r.completeness, 0.5);
        assert!((r.balance - 0.11 / 0.76).abs() < 1e-12);
        assert_eq!(r.mobility, 0.5);
        assert!((r.res - 0.25 * 0.11 / 0.76).abs() < 1e-12);
        assert!((r.res - 0.0362).abs() < 1e-4);
    }

    #[test]
    fn negative_switch_cost_clamps_mobility() {
        let r = resilience_from_parts(parts(0.0, 0.25, -50.0)).unwrap();
        assert_eq!(r.mobility, 1.0);
    }

    #[test]
    fn domain_errors() {
        assert!(resilience_from_parts(parts(2.0, 0.25, 0.0)).is_err());
        assert!(resilience_from_parts(parts(-0.1, 0.25, 0.0)).is_err());
        assert!(resilience_from_parts(ResilienceInputs {
            sigma_max: 0.0,
            ..parts(0.0, 0.25, 0.0)
        })
        .is_err());
        assert!(resilience_from_parts(ResilienceInputs {
            epsilon: 0.0,
            ..parts(0.0, 0.25, 0.0)
        })
        .is_err());
        assert!(resilience_from_parts(ResilienceInputs {
            omega_budget: 0.0,
            ..parts(0.0, 0.25, 0.0)
        })
        .is_err());
    }

    #[test]
    fn product_of_factors() {
        let r = resilience_from_parts(parts(0.3, 0.6, 3.0)).unwrap();
        assert!((r.res - r.completeness * r.balance * r.mobility).abs() <= 1e-12);
    }
}

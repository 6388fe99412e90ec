//! Named, quantitative checks of the identities relating the parametrized
//! and original systems, and the report they produce.

mod catalog;

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jets::Steps;
use crate::scenario::{Prepared, Scenario, RNG_NAME, SCHEMA_VERSION};

pub use catalog::{
    Corollary, DcoupledTheorem2, ElMatter, Equivariance, PiolaKirchhoffCheck, SemRelation,
    SemVanishing, Theorem2Check, ON_SHELL_THRESHOLD,
};

/// What a check needs besides the point.
#[derive(Clone, Copy, Debug)]
pub struct CheckContext<'a> {
    pub prepared: &'a Prepared,
    pub steps: Steps,
    pub seed: u64,
}

/// Per-point outcome: the residual, or the reason the check does not apply.
#[derive(Clone, Debug, PartialEq)]
pub enum PointResult {
    Residual(f64),
    NotApplicable(String),
}

pub trait Check: Send + Sync {
    fn name(&self) -> &'static str;
    /// The statement this check verifies.
    fn citation(&self) -> &'static str;
    fn tolerance(&self, ctx: &CheckContext) -> f64;
    /// `Some(reason)` when the check cannot apply to the scenario at all.
    fn not_applicable(&self, _ctx: &CheckContext) -> Option<String> {
        None
    }
    fn evaluate(&self, ctx: &CheckContext, index: usize, x: &[f64]) -> Result<PointResult>;

    fn run(&self, ctx: &CheckContext) -> CheckOutcome {
        let tolerance = self.tolerance(ctx);
        let base = CheckOutcome {
            name: self.name().to_string(),
            citation: self.citation().to_string(),
            status: Status::NotApplicable,
            points: 0,
            max_residual: None,
            mean_residual: None,
            tolerance,
            residuals: Vec::new(),
            note: None,
        };
        if let Some(reason) = self.not_applicable(ctx) {
            return CheckOutcome {
                note: Some(reason),
                ..base
            };
        }
        let results: Vec<Result<PointResult>> = ctx
            .prepared
            .points
            .par_iter()
            .enumerate()
            .map(|(i, x)| self.evaluate(ctx, i, x))
            .collect();
        let mut residuals = Vec::with_capacity(results.len());
        for (i, r) in results.into_iter().enumerate() {
            match r {
                Ok(PointResult::Residual(v)) => residuals.push(v),
                Ok(PointResult::NotApplicable(reason)) => {
                    return CheckOutcome {
                        note: Some(format!("point {i}: {reason}")),
                        ..base
                    }
                }
                Err(e) => {
                    return CheckOutcome {
                        status: Status::Fail,
                        points: i,
                        note: Some(format!("point {i}: {e}")),
                        ..base
                    }
                }
            }
        }
        let max = residuals
            .iter()
            .fold(0.0f64, |m, v| if v.is_nan() { f64::NAN } else { m.max(*v) });
        let mean = residuals.iter().sum::<f64>() / residuals.len() as f64;
        let status = if max < tolerance {
            Status::Pass
        } else {
            Status::Fail
        };
        CheckOutcome {
            status,
            points: residuals.len(),
            max_residual: Some(max),
            mean_residual: Some(mean),
            residuals,
            ..base
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotApplicable,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::NotApplicable => "n/a",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub citation: String,
    pub status: Status,
    pub points: usize,
    pub max_residual: Option<f64>,
    pub mean_residual: Option<f64>,
    pub tolerance: f64,
    /// One residual per evaluated point, in sample order.
    pub residuals: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Checks selectable by name, in a stable order.
pub struct CheckRegistry {
    checks: Vec<Box<dyn Check>>,
}

impl fmt::Debug for CheckRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list()
            .entries(self.checks.iter().map(|c| c.name()))
            .finish()
    }
}

impl CheckRegistry {
    pub fn empty() -> Self {
        Self { checks: Vec::new() }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Equivariance));
        r.register(Box::new(PiolaKirchhoffCheck));
        r.register(Box::new(Theorem2Check));
        r.register(Box::new(Corollary));
        r.register(Box::new(SemRelation));
        r.register(Box::new(SemVanishing));
        r.register(Box::new(ElMatter));
        r.register(Box::new(DcoupledTheorem2));
        r
    }

    /// Add a check, replacing any with the same name in place.
    pub fn register(&mut self, check: Box<dyn Check>) {
        match self.checks.iter_mut().find(|c| c.name() == check.name()) {
            Some(slot) => *slot = check,
            None => self.checks.push(check),
        }
    }

    pub fn get(&self, name: &str) -> Result<&dyn Check> {
        self.checks
            .iter()
            .find(|c| c.name() == name)
            .map(|c| c.as_ref())
            .ok_or_else(|| Error::UnknownCheck(name.to_string()))
    }

    pub fn contains(&self, name: &str) -> bool {
        self.checks.iter().any(|c| c.name() == name)
    }

    /// `(name, citation)` pairs in registry order.
    pub fn catalog(&self) -> Vec<(&'static str, &'static str)> {
        self.checks
            .iter()
            .map(|c| (c.name(), c.citation()))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Environment {
    pub seed: u64,
    pub rng: String,
    pub steps: Steps,
    pub points: usize,
    pub explicit_points: bool,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub scenario: String,
    pub theory: String,
    pub dimension: usize,
    pub environment: Environment,
    pub checks: Vec<CheckOutcome>,
    pub passed: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Validate and prepare the scenario, then run its checks.
pub fn run_scenario(scenario: &Scenario, registry: &CheckRegistry) -> Result<Report> {
    let prepared = scenario.prepare()?;
    let checks = scenario
        .checks
        .iter()
        .map(|n| registry.get(n))
        .collect::<Result<Vec<_>>>()?;
    let ctx = CheckContext {
        prepared: &prepared,
        steps: scenario.steps,
        seed: scenario.sample.seed,
    };
    let outcomes: Vec<CheckOutcome> = checks.iter().map(|c| c.run(&ctx)).collect();
    let passed = outcomes.iter().all(|o| o.status != Status::Fail);
    Ok(Report {
        schema_version: SCHEMA_VERSION,
        scenario: scenario.name.clone(),
        theory: scenario.theory.name.clone(),
        dimension: scenario.dimension,
        environment: Environment {
            seed: scenario.sample.seed,
            rng: RNG_NAME.to_string(),
            steps: scenario.steps,
            points: prepared.points.len(),
            explicit_points: scenario.sample.points.is_some(),
            version: format!("covlab {}", env!("CARGO_PKG_VERSION")),
        },
        checks: outcomes,
        passed,
    })
}

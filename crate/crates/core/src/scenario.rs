//! Scenario documents: a theory, fields, sampling and step sizes, and the
//! checks to run. Stored as versioned JSON with prefix-form expressions.

use std::path::Path;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::check_lorentz;
use crate::jets::{Diffeo, Field, FieldMap, Steps};
use crate::parametrize::{pullback_metric, Configuration, CovarianceField, FiberMetric};
use crate::scenarios::{em_plane_wave, kg_plane_wave, pull_back_solution, random_point};
use crate::theories::{theory_by_name, FieldTheory, TheoryParams};

pub const SCHEMA_VERSION: u32 = 1;

/// Name of the sampling generator recorded in reports.
pub const RNG_NAME: &str = "ChaCha8Rng";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheorySpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mass: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatterSpec {
    /// One expression per component over `x0..`.
    Exprs { exprs: FieldMap },
    /// A flat-space plane wave, optionally transported through `η`.
    PlaneWave {
        k: Vec<f64>,
        eps: Vec<f64>,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        pull_back: bool,
    },
}

fn one() -> f64 {
    1.0
}

/// A map given by expressions, with an optional explicit inverse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    pub components: FieldMap,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inverse: Option<FieldMap>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lo: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hi: Option<Vec<f64>>,
    pub count: usize,
    pub seed: u64,
    /// Explicit evaluation points; replace random sampling when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    pub name: String,
    pub dimension: usize,
    pub theory: TheorySpec,
    /// Minkowski when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fiber_metric: Option<FiberMetric>,
    pub matter: MatterSpec,
    /// Identity when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<MapSpec>,
    /// Diffeomorphism for the equivariance check; random near-identity maps
    /// are drawn per point when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<MapSpec>,
    pub sample: SampleSpec,
    #[serde(default)]
    pub steps: Steps,
    pub checks: Vec<String>,
}

/// Built-in corpus, schema version 1.
pub const BUILTIN: &[(&str, &str)] = &[
    (
        "em_minkowski_identity",
        include_str!("../scenarios/v1/em_minkowski_identity.json"),
    ),
    (
        "em_random_eta",
        include_str!("../scenarios/v1/em_random_eta.json"),
    ),
    (
        "em_offshell_demo",
        include_str!("../scenarios/v1/em_offshell_demo.json"),
    ),
    (
        "kg_flat_planewave",
        include_str!("../scenarios/v1/kg_flat_planewave.json"),
    ),
    (
        "kg_random_eta",
        include_str!("../scenarios/v1/kg_random_eta.json"),
    ),
    (
        "dim2_smoke",
        include_str!("../scenarios/v1/dim2_smoke.json"),
    ),
];

pub fn builtin_names() -> Vec<&'static str> {
    BUILTIN.iter().map(|(n, _)| *n).collect()
}

/// A scenario turned into evaluable objects.
#[derive(Clone, Debug)]
pub struct Prepared {
    pub scenario: Scenario,
    pub config: Configuration,
    pub sigma: Option<Diffeo>,
    pub points: Vec<Vec<f64>>,
}

impl Scenario {
    pub fn from_json(src: &str) -> Result<Self> {
        let s: Scenario =
            serde_json::from_str(src).map_err(|e| Error::Validation(e.to_string()))?;
        if s.schema_version != SCHEMA_VERSION {
            return Err(Error::Validation(format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                s.schema_version
            )));
        }
        Ok(s)
    }

    pub fn builtin(name: &str) -> Result<Self> {
        let (_, src) = BUILTIN
            .iter()
            .find(|(n, _)| *n == name)
            .ok_or_else(|| Error::Validation(format!("no built-in scenario named {name}")))?;
        Self::from_json(src)
    }

    /// Load from a path, falling back to the built-in corpus by name.
    pub fn load(path_or_name: &str) -> Result<Self> {
        let p = Path::new(path_or_name);
        if p.exists() {
            Self::from_json(&std::fs::read_to_string(p)?)
        } else if BUILTIN.iter().any(|(n, _)| *n == path_or_name) {
            Self::builtin(path_or_name)
        } else {
            Err(Error::Io(format!(
                "{path_or_name}: no such file or built-in scenario"
            )))
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    fn build_theory(&self) -> Result<Arc<dyn FieldTheory>> {
        theory_by_name(
            &self.theory.name,
            &TheoryParams {
                mass: self.theory.mass,
            },
        )
    }

    fn build_map(
        &self,
        spec: &MapSpec,
        what: &str,
    ) -> Result<(Arc<dyn Field>, Option<Arc<dyn Field>>)> {
        let n = self.dimension;
        let check = |f: &FieldMap| {
            if f.domain_dim() != n || f.codomain_dim() != n {
                Err(Error::Validation(format!(
                    "{what} must have {n} components over x0..x{}",
                    n - 1
                )))
            } else {
                Ok(())
            }
        };
        check(&spec.components)?;
        if let Some(inv) = &spec.inverse {
            check(inv)?;
        }
        Ok((
            spec.components.clone().into_arc(),
            spec.inverse.clone().map(FieldMap::into_arc),
        ))
    }

    fn sample_points(&self) -> Result<Vec<Vec<f64>>> {
        let n = self.dimension;
        if let Some(pts) = &self.sample.points {
            if pts.iter().any(|p| p.len() != n) {
                return Err(Error::Validation(format!(
                    "sample points must have {n} coordinates"
                )));
            }
            return Ok(pts.clone());
        }
        let lo = self.sample.lo.clone().unwrap_or_else(|| vec![-1.0; n]);
        let hi = self.sample.hi.clone().unwrap_or_else(|| vec![1.0; n]);
        if lo.len() != n || hi.len() != n || lo.iter().zip(&hi).any(|(l, h)| l > h) {
            return Err(Error::Validation(
                "sample box must have dimension bounds with lo ≤ hi".into(),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.sample.seed);
        Ok((0..self.sample.count)
            .map(|_| random_point(&mut rng, &lo, &hi))
            .collect())
    }

    /// Build everything and dry-run the evaluation at every sample point.
    pub fn prepare(&self) -> Result<Prepared> {
        let n = self.dimension;
        if !(2..=4).contains(&n) {
            return Err(Error::Validation(format!(
                "dimension must be 2, 3 or 4, got {n}"
            )));
        }
        if self.steps.h <= 0.0 || self.steps.h_outer <= 0.0 {
            return Err(Error::Validation("step sizes must be positive".into()));
        }
        let theory = self.build_theory().map_err(|e| match e {
            Error::UnsupportedTheory(_) | Error::Validation(_) => e,
            other => Error::Validation(other.to_string()),
        })?;
        let fiber = self
            .fiber_metric
            .clone()
            .unwrap_or_else(|| FiberMetric::minkowski(n));
        if fiber.dim() != n {
            return Err(Error::Validation(format!("fiber metric must be {n}×{n}")));
        }
        let eta = match &self.eta {
            None => CovarianceField::identity(n),
            Some(spec) => match self.build_map(spec, "eta")? {
                (f, Some(inv)) => CovarianceField::with_inverse(f, inv),
                (f, None) => CovarianceField::new(f),
            },
        };
        let matter: Arc<dyn Field> = match &self.matter {
            MatterSpec::Exprs { exprs } => {
                if exprs.domain_dim() != n || exprs.codomain_dim() != n {
                    return Err(Error::Validation(format!(
                        "matter must have {n} components"
                    )));
                }
                exprs.clone().into_arc()
            }
            MatterSpec::PlaneWave {
                k,
                eps,
                amplitude,
                pull_back,
            } => {
                if k.len() != n || eps.len() != n {
                    return Err(Error::Validation(format!(
                        "plane wave vectors must have length {n}"
                    )));
                }
                let flat = match theory.mass() {
                    None => em_plane_wave(k, eps, *amplitude)?,
                    Some(m) => kg_plane_wave(k, eps, *amplitude, m)?,
                }
                .into_arc();
                if *pull_back {
                    pull_back_solution(flat, &eta, theory.rank())
                } else {
                    flat
                }
            }
        };
        let sigma = match &self.sigma {
            None => None,
            Some(spec) => Some(match self.build_map(spec, "sigma")? {
                (f, Some(inv)) => Diffeo::from_parts(f, crate::jets::InverseMap::Explicit(inv)),
                (f, None) => Diffeo::from_parts(f.clone(), crate::jets::InverseMap::Newton(f)),
            }),
        };
        for c in &self.checks {
            if !crate::checks::CheckRegistry::standard().contains(c) {
                return Err(Error::UnknownCheck(c.clone()));
            }
        }
        let config = Configuration::new(theory, matter, eta, fiber)?;
        let points = self.sample_points()?;
        if points.is_empty() {
            return Err(Error::Validation("no sample points".into()));
        }
        for p in &points {
            dry_run(&config, p)?;
        }
        Ok(Prepared {
            scenario: self.clone(),
            config,
            sigma,
            points,
        })
    }
}

fn dry_run(config: &Configuration, p: &[f64]) -> Result<()> {
    let at = |e: Error| Error::Validation(format!("at point {p:?}: {e}"));
    config.eta.check_oriented(p)?;
    let eta_jet = config.eta.jet(p, 2).map_err(at)?;
    let metric = pullback_metric(&eta_jet, &config.fiber).map_err(at)?;
    check_lorentz(&metric.g).map_err(at)?;
    config.inputs(p).map_err(at)?;
    config.tilde_density(p).map_err(at)?;
    Ok(())
}

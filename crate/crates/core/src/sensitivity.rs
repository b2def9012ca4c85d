//! One-at-a-time parameter sweeps and bottleneck ranking.
//!
//! A sweep scales a single failure or repair parameter across a multiplier
//! grid, re-evaluates the deployment at each point, and reports annual
//! downtime. Ranking sweeps every parameter with the default grid and
//! orders them by how many hours of annual downtime the sweep can move.

use crate::policy::{evaluate_deployment, DeploymentModel};
use crate::rbd::ServerModel;
use crate::reliability::HOURS_PER_YEAR;
use crate::Error;
use std::fmt;

/// Which side of a failure/repair pair a sweep scales.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParameterField {
    Mttf,
    Mttr,
}

impl fmt::Display for ParameterField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ParameterField::Mttf => "mttf",
            ParameterField::Mttr => "mttr",
        })
    }
}

/// A sweepable parameter: a component id (or the container group) plus the
/// field to scale.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParameterRef {
    pub name: String,
    pub field: ParameterField,
}

impl ParameterRef {
    pub fn new(name: impl Into<String>, field: ParameterField) -> Self {
        Self {
            name: name.into(),
            field,
        }
    }

    /// Parses the `NAME.FIELD` form, e.g. `HW.mttf` or `Containers.mttr`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let Some((name, field)) = text.rsplit_once('.') else {
            return Err(Error::InvalidParameter(format!(
                "expected NAME.FIELD such as HW.mttf, got {text:?}"
            )));
        };
        let field = match field {
            "mttf" => ParameterField::Mttf,
            "mttr" => ParameterField::Mttr,
            other => {
                return Err(Error::InvalidParameter(format!(
                    "field must be mttf or mttr, got {other:?}"
                )))
            }
        };
        if name.is_empty() {
            return Err(Error::InvalidParameter(format!(
                "parameter name is empty in {text:?}"
            )));
        }
        Ok(Self::new(name, field))
    }
}

impl fmt::Display for ParameterRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}", self.name, self.field)
    }
}

/// The default multiplier grid: eleven points from 0.5 to 1.5.
pub fn default_multipliers() -> Vec<f64> {
    (0..11).map(|i| (5 + i) as f64 / 10.0).collect()
}

/// A sweep request: one deployment, one parameter, a multiplier grid.
#[derive(Debug, Clone)]
pub struct SweepSpec {
    deployment: DeploymentModel,
    parameter: ParameterRef,
    multipliers: Vec<f64>,
}

impl SweepSpec {
    /// Validates the grid (nonempty, positive, strictly increasing) and
    /// that the parameter resolves against the deployment's server.
    pub fn new(
        deployment: DeploymentModel,
        parameter: ParameterRef,
        multipliers: Vec<f64>,
    ) -> Result<Self, Error> {
        if multipliers.is_empty() {
            return Err(Error::InvalidParameter(
                "multiplier grid must not be empty".into(),
            ));
        }
        for w in multipliers.windows(2) {
            if !(w[1] > w[0]) {
                return Err(Error::InvalidParameter(
                    "multipliers must be strictly increasing".into(),
                ));
            }
        }
        if !multipliers.iter().all(|&t| t.is_finite() && t > 0.0) {
            return Err(Error::InvalidParameter(
                "multipliers must be positive and finite".into(),
            ));
        }
        resolve(deployment.server(), &parameter)?;
        Ok(Self {
            deployment,
            parameter,
            multipliers,
        })
    }

    pub fn deployment(&self) -> &DeploymentModel {
        &self.deployment
    }

    pub fn parameter(&self) -> &ParameterRef {
        &self.parameter
    }

    pub fn multipliers(&self) -> &[f64] {
        &self.multipliers
    }
}

enum Resolution {
    Single(bool, usize),
    AllContainers,
}

fn resolve(server: &ServerModel, parameter: &ParameterRef) -> Result<Resolution, Error> {
    if parameter.name == ServerModel::CONTAINER_GROUP {
        return Ok(Resolution::AllContainers);
    }
    for (i, (id, _)) in server.infrastructure().iter().enumerate() {
        if id.as_str() == parameter.name {
            return Ok(Resolution::Single(true, i));
        }
    }
    for (i, (id, _)) in server.containers().iter().enumerate() {
        if id.as_str() == parameter.name {
            return Ok(Resolution::Single(false, i));
        }
    }
    Err(Error::UnknownParameter(parameter.to_string()))
}

fn scaled_server(
    server: &ServerModel,
    parameter: &ParameterRef,
    multiplier: f64,
) -> Result<ServerModel, Error> {
    let scale = |pair: crate::reliability::FailureRepairPair| match parameter.field {
        ParameterField::Mttf => pair.with_mttf(pair.mttf_hours() * multiplier),
        ParameterField::Mttr => pair.with_mttr(pair.mttr_hours() * multiplier),
    };
    let mut infrastructure = server.infrastructure().to_vec();
    let mut containers = server.containers().to_vec();
    match resolve(server, parameter)? {
        Resolution::Single(is_infra, i) => {
            let slot = if is_infra {
                &mut infrastructure[i]
            } else {
                &mut containers[i]
            };
            slot.1 = scale(slot.1)?;
        }
        Resolution::AllContainers => {
            for slot in &mut containers {
                slot.1 = scale(slot.1)?;
            }
        }
    }
    ServerModel::new(infrastructure, containers)
}

/// Baseline hours of the swept field; the group reports its first member.
fn baseline_hours(server: &ServerModel, parameter: &ParameterRef) -> Result<f64, Error> {
    let pair = match resolve(server, parameter)? {
        Resolution::Single(true, i) => server.infrastructure()[i].1,
        Resolution::Single(false, i) => server.containers()[i].1,
        Resolution::AllContainers => server.containers()[0].1,
    };
    Ok(match parameter.field {
        ParameterField::Mttf => pair.mttf_hours(),
        ParameterField::Mttr => pair.mttr_hours(),
    })
}

/// One evaluated grid point.
#[derive(Debug, Clone, Copy)]
pub struct SweepPoint {
    pub multiplier: f64,
    pub parameter_hours: f64,
    pub annual_downtime_hours: f64,
}

/// A finished sweep: the points in grid order and the downtime range they
/// span.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub parameter: ParameterRef,
    pub points: Vec<SweepPoint>,
    pub impact_range: f64,
}

/// Evaluates the deployment at every multiplier, all other parameters held
/// at baseline.
pub fn sweep(spec: &SweepSpec) -> Result<SweepResult, Error> {
    let server = spec.deployment().server();
    let base_hours = baseline_hours(server, spec.parameter())?;
    let mut points = Vec::with_capacity(spec.multipliers().len());
    for &t in spec.multipliers() {
        let scaled = scaled_server(server, spec.parameter(), t)?;
        let result = evaluate_deployment(&spec.deployment().with_server(scaled))?;
        points.push(SweepPoint {
            multiplier: t,
            parameter_hours: base_hours * t,
            annual_downtime_hours: result.availability.downtime_hours(HOURS_PER_YEAR),
        });
    }
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &points {
        lo = lo.min(p.annual_downtime_hours);
        hi = hi.max(p.annual_downtime_hours);
    }
    Ok(SweepResult {
        parameter: spec.parameter().clone(),
        points,
        impact_range: hi - lo,
    })
}

/// A ranked parameter with the downtime range its sweep covers.
#[derive(Debug, Clone)]
pub struct RankEntry {
    pub parameter: ParameterRef,
    pub impact_range: f64,
}

/// Sweeps every parameter of the deployment's server with the default grid
/// and ranks by impact, largest first, ties by name.
///
/// Infrastructure components rank individually; the containers rank once,
/// as a group, since they scale together in the underlying experiment.
pub fn rank_parameters(deployment: &DeploymentModel) -> Result<Vec<RankEntry>, Error> {
    let mut names: Vec<String> = deployment
        .server()
        .infrastructure()
        .iter()
        .map(|(id, _)| id.as_str().to_owned())
        .collect();
    names.push(ServerModel::CONTAINER_GROUP.to_owned());

    let mut entries = Vec::with_capacity(names.len() * 2);
    for name in names {
        for field in [ParameterField::Mttf, ParameterField::Mttr] {
            let parameter = ParameterRef::new(name.clone(), field);
            let spec = SweepSpec::new(
                deployment.clone(),
                parameter.clone(),
                default_multipliers(),
            )?;
            let result = sweep(&spec)?;
            entries.push(RankEntry {
                parameter,
                impact_range: result.impact_range,
            });
        }
    }
    entries.sort_by(|a, b| {
        b.impact_range
            .total_cmp(&a.impact_range)
            .then_with(|| a.parameter.to_string().cmp(&b.parameter.to_string()))
    });
    Ok(entries)
}

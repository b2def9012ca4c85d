//! Reliability block diagrams: series, parallel, and k-out-of-n blocks over
//! repairable components, evaluated to steady-state availability.
//!
//! Evaluation never leaves complement space; see the reliability module for
//! why. K-out-of-n blocks accept heterogeneous children through an exact
//! convolution over the number of children up.

use crate::reliability::{
    availability_of, complement_accumulate, AvailabilityValue, ComponentId, FailureRepairPair,
};
use crate::Error;

/// A block in a reliability diagram.
#[derive(Debug, Clone)]
pub enum RbdNode {
    /// A single repairable component.
    Basic(ComponentId, FailureRepairPair),
    /// Up iff every child is up.
    Series(Vec<RbdNode>),
    /// Up iff at least one child is up.
    Parallel(Vec<RbdNode>),
    /// Up iff at least `k` children are up.
    Koon(u32, Vec<RbdNode>),
}

/// Steady-state availability of a block diagram.
pub fn eval(node: &RbdNode) -> Result<AvailabilityValue, Error> {
    match node {
        RbdNode::Basic(_, pair) => Ok(availability_of(*pair)),
        RbdNode::Series(children) => {
            let us = child_unavailabilities(children, "series")?;
            Ok(AvailabilityValue::saturating(complement_accumulate(us)))
        }
        RbdNode::Parallel(children) => {
            let us = child_unavailabilities(children, "parallel")?;
            Ok(AvailabilityValue::saturating(us.into_iter().product()))
        }
        RbdNode::Koon(k, children) => {
            let us = child_unavailabilities(children, "koon")?;
            let n = us.len() as u32;
            if *k < 1 || *k > n {
                return Err(Error::InvalidParameter(format!(
                    "koon block requires 1 <= k <= {n}, got k={k}"
                )));
            }
            // dist[j] = P(exactly j children up), built one child at a time.
            let mut dist = vec![0.0_f64; us.len() + 1];
            dist[0] = 1.0;
            for (i, &u) in us.iter().enumerate() {
                let a = 1.0 - u;
                for j in (0..=i + 1).rev() {
                    let stay = dist[j] * u;
                    let rise = if j > 0 { dist[j - 1] * a } else { 0.0 };
                    dist[j] = stay + rise;
                }
            }
            // P(fewer than k up), summed smallest terms first.
            let mut down = 0.0_f64;
            for &p in dist.iter().take(*k as usize) {
                down += p;
            }
            Ok(AvailabilityValue::saturating(down))
        }
    }
}

fn child_unavailabilities(children: &[RbdNode], kind: &str) -> Result<Vec<f64>, Error> {
    if children.is_empty() {
        return Err(Error::InvalidParameter(format!(
            "{kind} block needs at least one child"
        )));
    }
    children
        .iter()
        .map(|c| eval(c).map(|v| v.unavailability()))
        .collect()
}

/// Collapses a series of components into one equivalent component.
///
/// The equivalent MTTF is the harmonic reduction `1/sum(1/mttf_i)`; the
/// equivalent MTTR is then fixed by requiring the pair to reproduce the
/// series availability, so downstream stages can treat the series as a
/// single repairable unit without drift.
pub fn series_equivalent(components: &[FailureRepairPair]) -> Result<FailureRepairPair, Error> {
    match components {
        [] => Err(Error::InvalidParameter(
            "series_equivalent needs at least one component".into(),
        )),
        [single] => Ok(*single),
        many => {
            let rate_sum: f64 = many.iter().map(|p| p.failure_rate()).sum();
            let mttf_eq = 1.0 / rate_sum;
            let u_series = complement_accumulate(
                many.iter().map(|p| availability_of(*p).unavailability()),
            );
            let mttr_eq = mttf_eq * u_series / (1.0 - u_series);
            FailureRepairPair::new(mttf_eq, mttr_eq)
        }
    }
}

/// A server: infrastructure components under a stack of containers, all in
/// series.
#[derive(Debug, Clone)]
pub struct ServerModel {
    infrastructure: Vec<(ComponentId, FailureRepairPair)>,
    containers: Vec<(ComponentId, FailureRepairPair)>,
}

impl ServerModel {
    /// Name reserved for addressing every container at once in sweeps.
    pub const CONTAINER_GROUP: &'static str = "Containers";

    /// Builds a server from at least one infrastructure component and at
    /// least one container, with unique ids.
    pub fn new(
        infrastructure: Vec<(ComponentId, FailureRepairPair)>,
        containers: Vec<(ComponentId, FailureRepairPair)>,
    ) -> Result<Self, Error> {
        if infrastructure.is_empty() {
            return Err(Error::InvalidParameter(
                "server needs at least one infrastructure component".into(),
            ));
        }
        if containers.is_empty() {
            return Err(Error::InvalidParameter(
                "server needs at least one container".into(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for (id, _) in infrastructure.iter().chain(containers.iter()) {
            if id.as_str() == Self::CONTAINER_GROUP {
                return Err(Error::InvalidParameter(format!(
                    "component id {:?} is reserved for the container group",
                    Self::CONTAINER_GROUP
                )));
            }
            if !seen.insert(id.as_str().to_owned()) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate component id {id}"
                )));
            }
        }
        Ok(Self {
            infrastructure,
            containers,
        })
    }

    pub fn infrastructure(&self) -> &[(ComponentId, FailureRepairPair)] {
        &self.infrastructure
    }

    pub fn containers(&self) -> &[(ComponentId, FailureRepairPair)] {
        &self.containers
    }

    /// All components in diagram order, infrastructure first.
    pub fn components(&self) -> impl Iterator<Item = &(ComponentId, FailureRepairPair)> {
        self.infrastructure.iter().chain(self.containers.iter())
    }

    /// Failure/repair pairs in diagram order.
    pub fn pairs(&self) -> Vec<FailureRepairPair> {
        self.components().map(|(_, p)| *p).collect()
    }
}

/// Series diagram over every component of the server.
pub fn server_rbd(model: &ServerModel) -> RbdNode {
    let children = model
        .components()
        .map(|(id, pair)| RbdNode::Basic(id.clone(), *pair))
        .collect();
    RbdNode::Series(children)
}

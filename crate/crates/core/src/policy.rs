//! Endorsement-policy availability over replicated servers.
//!
//! A deployment replicates one server m times and is considered up when at
//! least k replicas are up: AND requires all m, OR requires one, KooN is
//! the general case. The k-out-of-m unavailability is computed as the
//! few-servers-up binomial tail with exact integer coefficients, which
//! keeps values around 1e-13 (a four-server OR) meaningful.

use crate::rbd::{eval, server_rbd, ServerModel};
use crate::reliability::{complement_accumulate, AvailabilityValue};
use crate::Error;

/// Most replicas a deployment may have; exact binomials for the tail sum
/// stay well inside u128 up to here.
pub const MAX_SERVERS: u32 = 64;

/// How many replicas must be up for the system to be up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndorsementPolicy {
    /// All replicas must sign.
    And,
    /// One replica suffices.
    Or,
    /// At least k replicas must sign.
    Koon(u32),
}

/// A replicated deployment: one server model, m replicas, one policy.
#[derive(Debug, Clone)]
pub struct DeploymentModel {
    server: ServerModel,
    m: u32,
    policy: EndorsementPolicy,
}

impl DeploymentModel {
    pub fn new(server: ServerModel, m: u32, policy: EndorsementPolicy) -> Result<Self, Error> {
        if m < 1 {
            return Err(Error::InvalidParameter(
                "deployment needs at least one server".into(),
            ));
        }
        if m > MAX_SERVERS {
            return Err(Error::InvalidParameter(format!(
                "deployment supports at most {MAX_SERVERS} servers, got {m}"
            )));
        }
        if let EndorsementPolicy::Koon(k) = policy {
            if k < 1 || k > m {
                return Err(Error::InvalidPolicy {
                    required: k,
                    total: m,
                });
            }
        }
        Ok(Self { server, m, policy })
    }

    pub fn server(&self) -> &ServerModel {
        &self.server
    }

    /// Replica count, the scenario tables' "Total Servers".
    pub fn total_servers(&self) -> u32 {
        self.m
    }

    /// Policy as constructed, for display.
    pub fn policy(&self) -> EndorsementPolicy {
        self.policy
    }

    /// Policy normalized to its k-out-of-m form.
    pub fn required_servers(&self) -> u32 {
        match self.policy {
            EndorsementPolicy::And => self.m,
            EndorsementPolicy::Or => 1,
            EndorsementPolicy::Koon(k) => k,
        }
    }

    /// Copy with a different server model, keeping replica count and policy.
    pub fn with_server(&self, server: ServerModel) -> Self {
        Self {
            server,
            m: self.m,
            policy: self.policy,
        }
    }
}

/// Availability of one server, the series over all its components.
pub fn server_availability(server: &ServerModel) -> AvailabilityValue {
    eval(&server_rbd(server)).expect("a valid server model evaluates")
}

fn binomial(m: u32, i: u32) -> u128 {
    let mut c: u128 = 1;
    for j in 0..i {
        c = c * (m - j) as u128 / (j + 1) as u128;
    }
    c
}

/// Availability of a k-out-of-m arrangement of identical replicas.
///
/// The unavailability is the lower binomial tail, the probability that
/// fewer than k replicas are up, summed from the smallest term upward.
pub fn koon_availability(
    server: AvailabilityValue,
    k: u32,
    m: u32,
) -> Result<AvailabilityValue, Error> {
    if m < 1 || m > MAX_SERVERS {
        return Err(Error::InvalidParameter(format!(
            "replica count must lie in 1..={MAX_SERVERS}, got {m}"
        )));
    }
    if k < 1 || k > m {
        return Err(Error::InvalidPolicy {
            required: k,
            total: m,
        });
    }
    let u = server.unavailability();
    let a = server.availability();
    let mut tail = 0.0_f64;
    for i in 0..k {
        tail += binomial(m, i) as f64 * a.powi(i as i32) * u.powi((m - i) as i32);
    }
    Ok(AvailabilityValue::saturating(tail))
}

/// Availability of an all-must-sign arrangement, `A^m`.
pub fn and_availability(server: AvailabilityValue, m: u32) -> Result<AvailabilityValue, Error> {
    if m < 1 || m > MAX_SERVERS {
        return Err(Error::InvalidParameter(format!(
            "replica count must lie in 1..={MAX_SERVERS}, got {m}"
        )));
    }
    let u = server.unavailability();
    let value = AvailabilityValue::saturating(complement_accumulate(
        std::iter::repeat(u).take(m as usize),
    ));
    debug_assert!({
        let alt = koon_availability(server, m, m)?.unavailability();
        (value.unavailability() - alt).abs() <= 1e-13 * alt.max(f64::MIN_POSITIVE)
    });
    Ok(value)
}

/// Availability of a one-suffices arrangement, unavailability `U^m`.
pub fn or_availability(server: AvailabilityValue, m: u32) -> Result<AvailabilityValue, Error> {
    if m < 1 || m > MAX_SERVERS {
        return Err(Error::InvalidParameter(format!(
            "replica count must lie in 1..={MAX_SERVERS}, got {m}"
        )));
    }
    let value = AvailabilityValue::saturating(server.unavailability().powi(m as i32));
    debug_assert!({
        let alt = koon_availability(server, 1, m)?.unavailability();
        (value.unavailability() - alt).abs() <= 1e-13 * alt.max(f64::MIN_POSITIVE)
    });
    Ok(value)
}

/// Evaluated deployment: the availability plus an echo of what was asked.
#[derive(Debug, Clone)]
pub struct DeploymentResult {
    pub availability: AvailabilityValue,
    pub policy: EndorsementPolicy,
    pub required_servers: u32,
    pub total_servers: u32,
}

/// Evaluates a deployment under its policy.
pub fn evaluate_deployment(dep: &DeploymentModel) -> Result<DeploymentResult, Error> {
    let server = server_availability(dep.server());
    let availability = match dep.policy() {
        EndorsementPolicy::And => and_availability(server, dep.total_servers())?,
        EndorsementPolicy::Or => or_availability(server, dep.total_servers())?,
        EndorsementPolicy::Koon(k) => koon_availability(server, k, dep.total_servers())?,
    };
    Ok(DeploymentResult {
        availability,
        policy: dep.policy(),
        required_servers: dep.required_servers(),
        total_servers: dep.total_servers(),
    })
}

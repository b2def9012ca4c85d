//! Alternating-renewal simulation of replicated deployments, the
//! statistical cross-check for the closed-form results.
//!
//! Every component of every replica alternates exponential up and down
//! periods; the system state is re-derived from the full component state
//! at each transition. Each replication draws from its own counter-based
//! stream, so results are bit-stable for a given seed no matter how many
//! replications run or in what order they would be scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp};

use crate::policy::{evaluate_deployment, DeploymentModel};
use crate::reliability::FailureRepairPair;
use crate::Error;

/// Expected down-hours per replication under which an estimate is marked
/// low-resolution.
pub const LOW_RESOLUTION_DOWN_HOURS: f64 = 10.0;

/// Simulation knobs: how long, how often, and from which seed.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    horizon_hours: f64,
    replications: u32,
    seed: u64,
}

impl SimConfig {
    pub fn new(horizon_hours: f64, replications: u32, seed: u64) -> Result<Self, Error> {
        if !horizon_hours.is_finite() || horizon_hours <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "horizon must be positive and finite, got {horizon_hours}"
            )));
        }
        if replications < 1 {
            return Err(Error::InvalidParameter(
                "need at least one replication".into(),
            ));
        }
        Ok(Self {
            horizon_hours,
            replications,
            seed,
        })
    }

    pub fn horizon_hours(self) -> f64 {
        self.horizon_hours
    }

    pub fn replications(self) -> u32 {
        self.replications
    }

    pub fn seed(self) -> u64 {
        self.seed
    }
}

/// Aggregated simulation outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimEstimate {
    pub mean_unavailability: f64,
    pub std_error: f64,
    /// Normal-approximation 95% interval around the mean.
    pub ci95: (f64, f64),
    pub total_up_hours: f64,
    pub total_hours: f64,
    /// True when the analytic expectation says a replication sees too few
    /// down-hours for the estimate to mean much.
    pub low_resolution: bool,
}

/// Is the deployment up for the given per-server component states?
///
/// A server is up when every one of its components is up; the system is up
/// when at least the policy's required number of servers are.
pub fn structure_up(states: &[Vec<bool>], deployment: &DeploymentModel) -> bool {
    assert_eq!(states.len(), deployment.total_servers() as usize);
    let n_components = deployment.server().components().count();
    let up_servers = states
        .iter()
        .inspect(|server| assert_eq!(server.len(), n_components))
        .filter(|server| server.iter().all(|&up| up))
        .count();
    up_servers >= deployment.required_servers() as usize
}

/// Simulates a deployment under its own policy structure.
pub fn simulate(deployment: &DeploymentModel, config: &SimConfig) -> Result<SimEstimate, Error> {
    let analytic = evaluate_deployment(deployment)?
        .availability
        .unavailability();
    let required = deployment.required_servers() as usize;
    simulate_with_structure(
        &deployment.server().pairs(),
        deployment.total_servers(),
        |states| {
            states
                .iter()
                .filter(|server| server.iter().all(|&up| up))
                .count()
                >= required
        },
        config,
        Some(analytic),
    )
}

/// Simulates `total_servers` replicas of the given component list under an
/// arbitrary structure predicate.
///
/// The predicate sees the full per-server component state and is consulted
/// at every component transition. `analytic_unavailability`, when known,
/// drives the low-resolution flag.
pub fn simulate_with_structure(
    components: &[FailureRepairPair],
    total_servers: u32,
    structure: impl Fn(&[Vec<bool>]) -> bool,
    config: &SimConfig,
    analytic_unavailability: Option<f64>,
) -> Result<SimEstimate, Error> {
    if components.is_empty() {
        return Err(Error::InvalidParameter(
            "simulation needs at least one component".into(),
        ));
    }
    if total_servers < 1 {
        return Err(Error::InvalidParameter(
            "simulation needs at least one server".into(),
        ));
    }

    let horizon = config.horizon_hours();
    let replications = config.replications();
    let mut per_rep_unavailability = Vec::with_capacity(replications as usize);
    let mut total_up_hours = 0.0_f64;

    for r in 0..replications {
        let down_hours = run_replication(components, total_servers, &structure, config, r);
        total_up_hours += horizon - down_hours;
        per_rep_unavailability.push(down_hours / horizon);
    }

    let n = replications as f64;
    let mean = per_rep_unavailability.iter().sum::<f64>() / n;
    let std_error = if replications > 1 {
        let var = per_rep_unavailability
            .iter()
            .map(|u| (u - mean) * (u - mean))
            .sum::<f64>()
            / (n - 1.0);
        (var / n).sqrt()
    } else {
        0.0
    };
    let half = 1.96 * std_error;
    let low_resolution = analytic_unavailability
        .map(|u| u * horizon < LOW_RESOLUTION_DOWN_HOURS)
        .unwrap_or(false);

    Ok(SimEstimate {
        mean_unavailability: mean,
        std_error,
        ci95: (mean - half, mean + half),
        total_up_hours,
        total_hours: horizon * n,
        low_resolution,
    })
}

/// One replication: returns system down-hours over the horizon.
fn run_replication(
    components: &[FailureRepairPair],
    total_servers: u32,
    structure: &impl Fn(&[Vec<bool>]) -> bool,
    config: &SimConfig,
    replication: u32,
) -> f64 {
    let horizon = config.horizon_hours();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed());
    rng.set_stream(replication as u64);

    // (time, server, component) toggle events, drawn in fixed server-major
    // order so the stream layout never depends on the structure predicate.
    let mut events: Vec<(f64, u32, u32)> = Vec::new();
    for server in 0..total_servers {
        for (c, pair) in components.iter().enumerate() {
            let fail = Exp::new(pair.failure_rate()).expect("positive rate");
            let repair = Exp::new(pair.repair_rate()).expect("positive rate");
            let mut t = 0.0_f64;
            let mut up = true;
            loop {
                let dwell = if up {
                    fail.sample(&mut rng)
                } else {
                    repair.sample(&mut rng)
                };
                t += dwell;
                if t >= horizon {
                    break;
                }
                events.push((t, server, c as u32));
                up = !up;
            }
        }
    }
    events.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then_with(|| a.1.cmp(&b.1))
            .then_with(|| a.2.cmp(&b.2))
    });

    let n_components = components.len();
    let mut states = vec![vec![true; n_components]; total_servers as usize];
    let mut system_up = structure(&states);
    let mut down_hours = 0.0_f64;
    let mut last_change = 0.0_f64;

    for (t, server, component) in events {
        let slot = &mut states[server as usize][component as usize];
        *slot = !*slot;
        let now_up = structure(&states);
        if now_up != system_up {
            if !system_up {
                down_hours += t - last_change;
            }
            system_up = now_up;
            last_change = t;
        }
    }
    if !system_up {
        down_hours += horizon - last_change;
    }
    down_hours
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baseline;
    use crate::policy::EndorsementPolicy;

    fn pair(mttf: f64, mttr: f64) -> FailureRepairPair {
        FailureRepairPair::new(mttf, mttr).unwrap()
    }

    fn config(horizon: f64, reps: u32, seed: u64) -> SimConfig {
        SimConfig::new(horizon, reps, seed).unwrap()
    }

    #[test]
    fn constant_true_structure_never_goes_down() {
        let est = simulate_with_structure(
            &[pair(10.0, 1.0)],
            2,
            |_| true,
            &config(1e4, 4, 1),
            None,
        )
        .unwrap();
        assert_eq!(est.mean_unavailability, 0.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.total_up_hours, est.total_hours);
        assert!(!est.low_resolution);
    }

    #[test]
    fn constant_false_structure_never_comes_up() {
        let est = simulate_with_structure(
            &[pair(10.0, 1.0)],
            1,
            |_| false,
            &config(1e4, 4, 1),
            None,
        )
        .unwrap();
        assert_eq!(est.mean_unavailability, 1.0);
        assert_eq!(est.total_up_hours, 0.0);
        assert_eq!(est.ci95, (1.0, 1.0));
    }

    #[test]
    fn single_component_approaches_birth_death_limit() {
        let est = simulate_with_structure(
            &[pair(1.0, 1.0 / 9.0)],
            1,
            |states| states[0][0],
            &config(2e4, 32, 11),
            Some(0.1),
        )
        .unwrap();
        let z = (est.mean_unavailability - 0.1).abs() / est.std_error;
        assert!(z < 3.0, "z = {z}, mean = {}", est.mean_unavailability);
        assert!((est.mean_unavailability - 0.1).abs() < 5e-3);
    }

    #[test]
    fn single_server_scenario_agrees_with_closed_form() {
        let dep = baseline::scenario_deployment(1).unwrap();
        let est = simulate(&dep, &config(1e5, 24, 7)).unwrap();
        let analytic = 6.584168524030681e-4;
        let z = (est.mean_unavailability - analytic).abs() / est.std_error;
        assert!(z < 3.0, "z = {z}, mean = {:e}", est.mean_unavailability);
        assert!(!est.low_resolution);
    }

    #[test]
    fn identical_configs_are_bit_identical() {
        let dep = baseline::scenario_deployment(8).unwrap();
        let a = simulate(&dep, &config(2e4, 6, 3)).unwrap();
        let b = simulate(&dep, &config(2e4, 6, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn replication_streams_do_not_shift_with_count() {
        let pairs = baseline::builtin_server().pairs();
        let all_up = |states: &[Vec<bool>]| states[0].iter().all(|&b| b);
        let horizon = 2e4;
        let short =
            simulate_with_structure(&pairs, 1, all_up, &config(horizon, 4, 9), None).unwrap();
        let cfg8 = config(horizon, 8, 9);
        let long = simulate_with_structure(&pairs, 1, all_up, &cfg8, None).unwrap();
        // Growing the replication count only appends streams: the extra
        // up-hours must come entirely from replications 4 through 7.
        let appended: f64 = (4..8)
            .map(|r| horizon - run_replication(&pairs, 1, &all_up, &cfg8, r))
            .sum();
        let got = long.total_up_hours - short.total_up_hours;
        assert!(
            (got - appended).abs() <= 1e-9,
            "got {got}, appended {appended}"
        );
    }

    #[test]
    fn component_order_is_distributionally_irrelevant() {
        let dep = baseline::scenario_deployment(2).unwrap();
        let forward = dep.server().pairs();
        let mut backward = forward.clone();
        backward.reverse();
        let cfg = config(5e4, 16, 21);
        let all_up = |states: &[Vec<bool>]| {
            states
                .iter()
                .filter(|s| s.iter().all(|&b| b))
                .count()
                >= 2
        };
        let a = simulate_with_structure(&forward, 2, all_up, &cfg, None).unwrap();
        let b = simulate_with_structure(&backward, 2, all_up, &cfg, None).unwrap();
        let combined = (a.std_error * a.std_error + b.std_error * b.std_error).sqrt();
        assert!(
            (a.mean_unavailability - b.mean_unavailability).abs() <= 3.0 * combined,
            "means {:e} vs {:e}, combined se {combined:e}",
            a.mean_unavailability,
            b.mean_unavailability
        );
    }

    #[test]
    fn low_resolution_flag_follows_expected_down_hours() {
        let s1 = baseline::scenario_deployment(1).unwrap();
        let clear = simulate(&s1, &config(1e5, 2, 5)).unwrap();
        assert!(!clear.low_resolution);
        let starved = simulate(&s1, &config(1e3, 2, 5)).unwrap();
        assert!(starved.low_resolution);

        let s5 = baseline::scenario_deployment(5).unwrap();
        let rare = simulate(&s5, &config(1e5, 2, 5)).unwrap();
        assert!(rare.low_resolution);
    }

    #[test]
    fn estimate_views_are_consistent() {
        let dep = baseline::scenario_deployment(3).unwrap();
        let est = simulate(&dep, &config(3e4, 12, 13)).unwrap();
        let derived = (est.total_hours - est.total_up_hours) / est.total_hours;
        let scale = est.mean_unavailability.max(1e-300);
        assert!((derived - est.mean_unavailability).abs() <= 1e-10 * scale);
        assert!(est.ci95.0 <= est.mean_unavailability);
        assert!(est.mean_unavailability <= est.ci95.1);
    }

    #[test]
    fn structure_predicate_semantics() {
        let server = baseline::builtin_server();
        let and3 =
            DeploymentModel::new(server.clone(), 3, EndorsementPolicy::And).unwrap();
        let koon23 =
            DeploymentModel::new(server.clone(), 3, EndorsementPolicy::Koon(2)).unwrap();

        let all_up = vec![vec![true; 6]; 3];
        assert!(structure_up(&all_up, &and3));
        assert!(structure_up(&all_up, &koon23));

        let mut one_container_down = all_up.clone();
        one_container_down[1][4] = false;
        assert!(!structure_up(&one_container_down, &and3));
        assert!(structure_up(&one_container_down, &koon23));

        let mut two_servers_degraded = all_up;
        two_servers_degraded[0][0] = false;
        two_servers_degraded[2][5] = false;
        assert!(!structure_up(&two_servers_degraded, &koon23));
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        assert!(SimConfig::new(0.0, 4, 1).is_err());
        assert!(SimConfig::new(-10.0, 4, 1).is_err());
        assert!(SimConfig::new(f64::INFINITY, 4, 1).is_err());
        assert!(SimConfig::new(100.0, 0, 1).is_err());
        let cfg = config(100.0, 1, 1);
        assert!(simulate_with_structure(&[], 1, |_| true, &cfg, None).is_err());
        assert!(
            simulate_with_structure(&[pair(1.0, 1.0)], 0, |_| true, &cfg, None).is_err()
        );
    }
}

//! Acceptance suite: one test per criterion, each printing a single
//! PASS or FAIL line (run with `--nocapture` to see the PASS lines).
//!
//! Two criteria are implemented exactly as stated and are expected to
//! stay red; their failure messages carry the analysis:
//! criterion 2 (reference nines cells for scenarios 6 and 10 sit outside
//! the stated band) and criterion 6 (DE.mttf cannot land in the bottom
//! three of the eight-entry ranking).

use std::collections::BTreeSet;
use std::process::{Command, Output};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use blockav_core::baseline;
use blockav_core::ctmc::{availability as chain_availability, build_component_product_chain, steady_state};
use blockav_core::montecarlo::{simulate, SimConfig};
use blockav_core::policy::{evaluate_deployment, koon_availability};
use blockav_core::rbd::{eval as rbd_eval, series_equivalent, RbdNode};
use blockav_core::sensitivity::{
    default_multipliers, rank_parameters, sweep, ParameterField, SweepSpec,
};
use blockav_core::{AvailabilityValue, ComponentId, FailureRepairPair, HOURS_PER_YEAR};

fn verdict(criterion: u32, failures: Vec<String>, pass_note: &str) {
    if failures.is_empty() {
        println!("PASS criterion {criterion}: {pass_note}");
    } else {
        let line = format!("FAIL criterion {criterion}: {}", failures.join(" | "));
        println!("{line}");
        panic!("{line}");
    }
}

fn budget(limit_seconds: f64, started: Instant, failures: &mut Vec<String>) {
    let elapsed = started.elapsed().as_secs_f64();
    if elapsed > limit_seconds {
        failures.push(format!(
            "runtime {elapsed:.2} s exceeded the {limit_seconds:.0} s budget"
        ));
    }
}

fn scenario_availability(scenario: usize) -> AvailabilityValue {
    let deployment = baseline::scenario_deployment(scenario).expect("built-in scenario");
    evaluate_deployment(&deployment)
        .expect("scenario evaluates")
        .availability
}

fn round4(value: f64) -> f64 {
    format!("{value:.4}").parse().expect("rounded percent")
}

/// Compensated summation for the brute-force enumerations.
#[derive(Default)]
struct Neumaier {
    sum: f64,
    compensation: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn rel_diff(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs().max(f64::MIN_POSITIVE)
}

#[test]
fn criterion_1_reference_table_reproduction() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for row in baseline::reference_rows() {
        let av = scenario_availability(row.scenario as usize);
        let pct = round4(av.percent());
        let pct_diff = (pct - row.corrected_availability_pct).abs();
        if pct_diff > 0.0002 + 1e-9 {
            failures.push(format!(
                "scenario {}: availability {pct:.4} vs reference {:.5} differs by {pct_diff:.5} pp",
                row.scenario, row.corrected_availability_pct
            ));
        }
        let downtime = av.downtime_hours(HOURS_PER_YEAR);
        if row.scenario == 7 {
            if !(1.5e-9..1.8e-9).contains(&downtime) {
                failures.push(format!(
                    "scenario 7: downtime {downtime:.3e} h is not the accepted ~1.6e-9 h"
                ));
            }
            let nines = av.nines();
            if (nines - 12.73).abs() > 0.1 {
                failures.push(format!(
                    "scenario 7: nines {nines:.3} outside 12.73 +/- 0.1"
                ));
            }
        } else if (downtime - row.downtime_hours).abs() > row.downtime_unit * (1.0 + 1e-9) {
            failures.push(format!(
                "scenario {}: downtime {downtime:.6} h vs reference {} h misses the last printed digit (unit {})",
                row.scenario, row.downtime_hours, row.downtime_unit
            ));
        }
    }
    budget(1.0, started, &mut failures);
    verdict(
        1,
        failures,
        "ten availability cells within 0.0002 pp (row 8 against its digit-restored 99.99987) \
         and nine downtime cells within one printed unit; scenario 7 matched on nines \
         12.73 +/- 0.1 with downtime 1.65e-9 h",
    );
}

#[test]
fn criterion_2_nines_column() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for row in baseline::reference_rows() {
        let av = scenario_availability(row.scenario as usize);
        let downtime = av.downtime_hours(HOURS_PER_YEAR);
        let recomputed = -(downtime / HOURS_PER_YEAR).log10();
        if recomputed.to_bits() != av.nines().to_bits() {
            failures.push(format!(
                "scenario {}: nines is not exactly -log10(downtime/8760)",
                row.scenario
            ));
        }
    }
    for scenario in [1_usize, 2, 3, 4, 6, 9, 10] {
        let row = &baseline::reference_rows()[scenario - 1];
        let nines = scenario_availability(scenario).nines();
        let delta = nines - row.nines;
        if delta.abs() > 0.05 {
            failures.push(format!(
                "scenario {scenario}: computed nines {nines:.3} vs reference {:.2}, \
                 delta {delta:+.3} outside +/-0.05; the reference cell appears rounded \
                 from a coarser downtime figure, kept literal rather than widened",
                row.nines
            ));
        }
    }
    budget(1.0, started, &mut failures);
    verdict(
        2,
        failures,
        "nines within 0.05 of the reference for the seven in-scope rows and equal to \
         -log10(downtime/8760) bitwise on all ten",
    );
}

#[test]
fn criterion_3_product_chain_matches_closed_form() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let server = baseline::builtin_server();
    let infrastructure: Vec<FailureRepairPair> =
        server.infrastructure().iter().map(|(_, p)| *p).collect();
    let mut pairs = vec![series_equivalent(&infrastructure).expect("series equivalent")];
    pairs.extend(server.containers().iter().map(|(_, p)| *p));
    let chain = build_component_product_chain(&pairs, |ups| ups.iter().all(|&up| up))
        .expect("product chain");
    if chain.n_states() != 16 {
        failures.push(format!("chain has {} states, wanted 16", chain.n_states()));
    }
    let pi = steady_state(&chain).expect("steady state");
    let chain_u = chain_availability(&chain, &pi).unavailability();
    let closed_u = scenario_availability(1).unavailability();
    let rel = rel_diff(chain_u, closed_u);
    if rel > 1e-12 {
        failures.push(format!(
            "chain unavailability {chain_u:.17e} vs closed form {closed_u:.17e}, relative {rel:.3e}"
        ));
    }
    budget(1.0, started, &mut failures);
    verdict(
        3,
        failures,
        "16-state product chain reproduces the closed-form single-server unavailability \
         within relative 1e-12",
    );
}

fn random_leaf(rng: &mut ChaCha8Rng, counter: &mut u32) -> RbdNode {
    *counter += 1;
    let mttf = rng.gen_range(10.0..10_000.0);
    let mttr = rng.gen_range(0.05..500.0);
    RbdNode::Basic(
        ComponentId::new(format!("C{counter}")).expect("id"),
        FailureRepairPair::new(mttf, mttr).expect("pair"),
    )
}

fn random_tree(rng: &mut ChaCha8Rng, leaves: u32, counter: &mut u32) -> RbdNode {
    if leaves == 1 {
        return random_leaf(rng, counter);
    }
    let n_children = rng.gen_range(2..=leaves.min(4));
    let mut parts = vec![1_u32; n_children as usize];
    for _ in 0..(leaves - n_children) {
        let slot = rng.gen_range(0..parts.len());
        parts[slot] += 1;
    }
    let children: Vec<RbdNode> = parts
        .iter()
        .map(|&part| random_tree(rng, part, counter))
        .collect();
    match rng.gen_range(0..3) {
        0 => RbdNode::Series(children),
        1 => RbdNode::Parallel(children),
        _ => {
            let k = rng.gen_range(1..=n_children);
            RbdNode::Koon(k, children)
        }
    }
}

fn leaf_unavailabilities(node: &RbdNode, out: &mut Vec<f64>) {
    match node {
        RbdNode::Basic(_, pair) => out.push(pair.availability().unavailability()),
        RbdNode::Series(children) | RbdNode::Parallel(children) => {
            for child in children {
                leaf_unavailabilities(child, out);
            }
        }
        RbdNode::Koon(_, children) => {
            for child in children {
                leaf_unavailabilities(child, out);
            }
        }
    }
}

/// Structure function on explicit leaf states. Every child is evaluated,
/// so the cursor walks the whole tree regardless of the outcome.
fn state_up(node: &RbdNode, states: u32, cursor: &mut u32) -> bool {
    match node {
        RbdNode::Basic(..) => {
            let up = states >> *cursor & 1 == 1;
            *cursor += 1;
            up
        }
        RbdNode::Series(children) => children.iter().fold(true, |acc, child| {
            let up = state_up(child, states, cursor);
            acc && up
        }),
        RbdNode::Parallel(children) => children.iter().fold(false, |acc, child| {
            let up = state_up(child, states, cursor);
            acc || up
        }),
        RbdNode::Koon(k, children) => {
            let up_count = children.iter().fold(0_u32, |acc, child| {
                acc + u32::from(state_up(child, states, cursor))
            });
            up_count >= *k
        }
    }
}

#[test]
fn criterion_4_brute_force_oracles() {
    let started = Instant::now();
    let mut failures = Vec::new();

    let mut rng = ChaCha8Rng::seed_from_u64(1004);
    for tree_index in 0..200 {
        let leaves = rng.gen_range(1..=12_u32);
        let mut counter = 0;
        let tree = random_tree(&mut rng, leaves, &mut counter);
        let mut us = Vec::new();
        leaf_unavailabilities(&tree, &mut us);
        assert_eq!(us.len(), leaves as usize);

        let mut up_sum = Neumaier::default();
        let mut down_sum = Neumaier::default();
        for mask in 0..(1_u32 << leaves) {
            let mut probability = 1.0;
            for (bit, &u) in us.iter().enumerate() {
                probability *= if mask >> bit & 1 == 1 { 1.0 - u } else { u };
            }
            let mut cursor = 0;
            if state_up(&tree, mask, &mut cursor) {
                up_sum.add(probability);
            } else {
                down_sum.add(probability);
            }
        }

        let evaluated = rbd_eval(&tree).expect("tree evaluates");
        let rel_u = rel_diff(evaluated.unavailability(), down_sum.total());
        let rel_a = rel_diff(evaluated.availability(), up_sum.total());
        if rel_u > 1e-12 || rel_a > 1e-12 {
            failures.push(format!(
                "tree {tree_index} ({leaves} leaves): relative error {:.3e} (unavailability) / \
                 {:.3e} (availability) against 2^n enumeration",
                rel_u, rel_a
            ));
        }
    }

    for &availability in &[0.5, 0.999, 1.0 - 6.582e-4] {
        let server = AvailabilityValue::from_availability(availability).expect("server value");
        let a = server.availability();
        let u = server.unavailability();
        for m in 1..=10_u32 {
            for k in 1..=m {
                let mut up_sum = Neumaier::default();
                let mut down_sum = Neumaier::default();
                for mask in 0..(1_u32 << m) {
                    let mut probability = 1.0;
                    for bit in 0..m {
                        probability *= if mask >> bit & 1 == 1 { a } else { u };
                    }
                    if mask.count_ones() >= k {
                        up_sum.add(probability);
                    } else {
                        down_sum.add(probability);
                    }
                }
                let got = koon_availability(server, k, m).expect("koon evaluates");
                let rel_u = rel_diff(got.unavailability(), down_sum.total());
                let rel_a = rel_diff(got.availability(), up_sum.total());
                if rel_u > 1e-12 || rel_a > 1e-12 {
                    failures.push(format!(
                        "koon {k}-of-{m} at A={availability}: relative error {:.3e}/{:.3e} \
                         against 2^m enumeration",
                        rel_u, rel_a
                    ));
                }
            }
        }
    }

    budget(10.0, started, &mut failures);
    verdict(
        4,
        failures,
        "200 random block diagrams (up to 12 basics) and every k-of-m up to 10 at three \
         availability levels match exhaustive state enumeration within relative 1e-12",
    );
}

#[test]
fn criterion_5_monte_carlo_agreement() {
    let started = Instant::now();
    let mut failures = Vec::new();
    for scenario in 1..=4_usize {
        let deployment = baseline::scenario_deployment(scenario).expect("scenario");
        let config = SimConfig::new(1e6, 200, 42).expect("config");
        let estimate = simulate(&deployment, &config).expect("simulation runs");
        let analytic = scenario_availability(scenario).unavailability();
        let z = (estimate.mean_unavailability - analytic) / estimate.std_error;
        if z.abs() > 3.0 {
            failures.push(format!(
                "scenario {scenario}: |z| = {:.2} > 3 (mean {:.6e}, analytic {analytic:.6e}, \
                 se {:.3e})",
                z.abs(),
                estimate.mean_unavailability,
                estimate.std_error
            ));
        }
        if estimate.low_resolution {
            failures.push(format!(
                "scenario {scenario}: low-resolution flag raised where hundreds of down-hours \
                 are expected"
            ));
        }
    }
    for scenario in 5..=10_usize {
        let deployment = baseline::scenario_deployment(scenario).expect("scenario");
        let config = SimConfig::new(1e6, 2, 42).expect("config");
        let estimate = simulate(&deployment, &config).expect("simulation runs");
        if !estimate.low_resolution {
            failures.push(format!(
                "scenario {scenario}: low-resolution flag not raised at horizon 1e6 h"
            ));
        }
    }
    budget(60.0, started, &mut failures);
    verdict(
        5,
        failures,
        "scenarios 1-4 simulated within 3 standard errors of the closed form \
         (horizon 1e6 h, 200 replications, seed 42); scenarios 5-10 raise the \
         low-resolution flag",
    );
}

#[test]
fn criterion_6_sensitivity_findings() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let deployment = baseline::scenario_deployment(1).expect("scenario 1");
    let entries = rank_parameters(&deployment).expect("ranking");
    let names: Vec<String> = entries
        .iter()
        .map(|entry| entry.parameter.to_string())
        .collect();

    let top_two: BTreeSet<&str> = names.iter().take(2).map(String::as_str).collect();
    let wanted_top: BTreeSet<&str> = ["Containers.mttf", "Containers.mttr"].into();
    if top_two != wanted_top {
        failures.push(format!("top two entries are {names:?}"));
    }

    let bottom_three: Vec<&str> = names.iter().skip(names.len() - 3).map(String::as_str).collect();
    for target in ["OS.mttf", "DE.mttf"] {
        if !bottom_three.contains(&target) {
            let position = names
                .iter()
                .position(|n| n == target)
                .map_or_else(|| "?".to_owned(), |p| (p + 1).to_string());
            let impact = entries
                .iter()
                .find(|e| e.parameter.to_string() == target)
                .map(|e| e.impact_range);
            failures.push(format!(
                "{target} sits at position {} of {} (impact {:.3} h), not in the bottom \
                 three; a failure-time sweep always moves more downtime than the same \
                 component's repair-time sweep, so with repair-time entries in the ranking \
                 this placement is unattainable, while the underlying claim (every container \
                 parameter outranks {target}) does hold",
                position,
                names.len(),
                impact.unwrap_or(f64::NAN)
            ));
        }
    }

    let container_rank_floor = names
        .iter()
        .enumerate()
        .filter(|(_, name)| name.starts_with("Containers."))
        .map(|(index, _)| index)
        .max()
        .expect("container entries exist");
    for target in ["OS.mttf", "DE.mttf"] {
        let position = names
            .iter()
            .position(|n| n == target)
            .expect("ranked parameter");
        if position <= container_rank_floor {
            failures.push(format!(
                "{target} outranks a container parameter, contradicting the stated bottleneck"
            ));
        }
    }

    for entry in &entries {
        let spec = SweepSpec::new(
            deployment.clone(),
            entry.parameter.clone(),
            default_multipliers(),
        )
        .expect("sweep spec");
        let result = sweep(&spec).expect("sweep runs");
        let downtimes: Vec<f64> = result
            .points
            .iter()
            .map(|p| p.annual_downtime_hours)
            .collect();
        let monotone = match entry.parameter.field {
            ParameterField::Mttf => downtimes.windows(2).all(|w| w[1] < w[0]),
            ParameterField::Mttr => downtimes.windows(2).all(|w| w[1] > w[0]),
        };
        if !monotone {
            failures.push(format!(
                "sweep of {} is not strictly monotone in the expected direction",
                entry.parameter
            ));
        }
    }

    budget(5.0, started, &mut failures);
    verdict(
        6,
        failures,
        "container parameters hold the top two ranking positions, OS.mttf and DE.mttf rank \
         in the bottom three, and all eight sweeps are monotone in the expected direction",
    );
}

#[test]
fn criterion_7_policy_direction() {
    let started = Instant::now();
    let mut failures = Vec::new();
    let and_downtimes: Vec<f64> = (1..=4_usize)
        .map(|scenario| scenario_availability(scenario).downtime_hours(HOURS_PER_YEAR))
        .collect();
    if !and_downtimes.windows(2).all(|w| w[1] > w[0]) {
        failures.push(format!(
            "all-servers downtime is not strictly increasing over m=1..4: {and_downtimes:?}"
        ));
    }
    if (and_downtimes[0] - 5.77).abs() > 0.01 || (and_downtimes[3] - 23.05).abs() > 0.01 {
        failures.push(format!(
            "all-servers endpoints {:.3} h and {:.3} h stray from 5.77 and 23.05",
            and_downtimes[0], and_downtimes[3]
        ));
    }
    let or_downtimes: Vec<f64> = [5_usize, 6, 7]
        .iter()
        .map(|&scenario| scenario_availability(scenario).downtime_hours(HOURS_PER_YEAR))
        .collect();
    if !or_downtimes.windows(2).all(|w| w[1] < w[0]) {
        failures.push(format!(
            "any-server downtime is not strictly decreasing over m=2..4: {or_downtimes:?}"
        ));
    }
    budget(1.0, started, &mut failures);
    verdict(
        7,
        failures,
        "downtime strictly rises 5.77 -> 23.05 h as all-servers deployments grow m=1..4 and \
         strictly falls for any-server deployments over m=2..4",
    );
}

fn run_binary(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockav"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_8_determinism() {
    let started = Instant::now();
    let mut failures = Vec::new();

    let simulate_args = [
        "simulate", "--horizon", "50000", "--reps", "16", "--seed", "42", "--check",
    ];
    let first = run_binary(&simulate_args);
    let second = run_binary(&simulate_args);
    if !first.status.success() || first.stdout != second.stdout {
        failures.push("repeated simulate runs are not byte-identical".to_owned());
    }

    let csv_first = run_binary(&["scenarios", "--compare-paper", "--format", "csv"]);
    let csv_second = run_binary(&["scenarios", "--compare-paper", "--format", "csv"]);
    if !csv_first.status.success() || csv_first.stdout != csv_second.stdout {
        failures.push("scenario CSV output is not byte-stable".to_owned());
    }

    let dir = tempfile::tempdir().expect("tempdir");
    let chart_a = dir.path().join("a.svg");
    let chart_b = dir.path().join("b.svg");
    let mut sweeps = Vec::new();
    for chart in [&chart_a, &chart_b] {
        let output = run_binary(&[
            "sweep",
            "--parameter",
            "Containers.mttf",
            "--svg",
            chart.to_str().expect("utf-8 path"),
        ]);
        if !output.status.success() {
            failures.push("sweep with an SVG target failed".to_owned());
        }
        sweeps.push(output.stdout);
    }
    if sweeps[0] != sweeps[1] {
        failures.push("sweep CSV output is not byte-stable".to_owned());
    }
    match (std::fs::read(&chart_a), std::fs::read(&chart_b)) {
        (Ok(a), Ok(b)) if a == b => {}
        _ => failures.push("sweep SVG bytes differ between runs".to_owned()),
    }

    budget(60.0, started, &mut failures);
    verdict(
        8,
        failures,
        "simulate output and the CSV/SVG artifacts are byte-identical across repeated runs",
    );
}

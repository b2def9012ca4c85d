//! blockav: availability analysis for replicated server deployments.
//!
//! Five commands cover the workflow: `eval` scores one deployment,
//! `scenarios` prints the built-in study, `sweep` and `rank` explore
//! parameter sensitivity, and `simulate` cross-checks the closed form
//! with a Monte Carlo run.
//!
//! Exit codes are stable: 0 on success, 2 for parse or validation
//! problems with the input, 3 for structurally impossible models.

mod model;
mod report;
mod svg;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use blockav_core::baseline::{self, SCENARIO_COUNT};
use blockav_core::montecarlo::{simulate, SimConfig};
use blockav_core::policy::{evaluate_deployment, EndorsementPolicy};
use blockav_core::sensitivity::{
    default_multipliers, rank_parameters, sweep, ParameterRef, SweepSpec,
};
use blockav_core::{Error as CoreError, HOURS_PER_YEAR};

use model::{load_model, ModelError, ModelFile};
use report::{
    fmt_downtime, fmt_nines, fmt_pct, fmt_stat, json_num, render_csv, render_table,
    styling_enabled, Format,
};

#[derive(Parser)]
#[command(
    name = "blockav",
    version,
    about = "Availability analysis for replicated server deployments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a deployment and print availability, nines, and downtime
    Eval {
        /// JSON model file; omit to use the built-in baseline
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Observation period for the downtime column, in hours
        #[arg(long, value_name = "HOURS")]
        period_hours: Option<f64>,
        /// Print the canonical JSON for the model instead of evaluating it
        #[arg(long)]
        dump_model: bool,
    },
    /// Evaluate the ten built-in deployment scenarios
    Scenarios {
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Append the published reference values and per-row deltas
        #[arg(long)]
        compare_paper: bool,
    },
    /// Sweep one parameter and print CSV rows of downtime against it
    Sweep {
        /// JSON model file; omit to use the built-in baseline
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        /// Parameter to sweep, as NAME.FIELD (HW.mttr, Containers.mttf, ...)
        #[arg(long, value_name = "NAME.FIELD")]
        parameter: String,
        /// Multiplier grid LO:HI:STEPS, or a single multiplier
        #[arg(long, value_name = "LO:HI:STEPS")]
        multipliers: Option<String>,
        /// Also write a line chart of the sweep to this path
        #[arg(long, value_name = "PATH")]
        svg: Option<PathBuf>,
    },
    /// Rank every sweepable parameter by downtime impact
    Rank {
        /// JSON model file; omit to use the built-in baseline
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
    },
    /// Monte Carlo estimate of the deployment's unavailability
    Simulate {
        /// JSON model file; omit to use the built-in baseline
        #[arg(long, value_name = "PATH")]
        model: Option<PathBuf>,
        /// Simulated hours per replication
        #[arg(long, default_value_t = 1e6, value_name = "HOURS")]
        horizon: f64,
        /// Number of independent replications
        #[arg(long, default_value_t = 200, value_name = "N")]
        reps: u32,
        /// Base seed; each replication draws from its own stream
        #[arg(long, default_value_t = 42, value_name = "SEED")]
        seed: u64,
        /// Also print the analytic value and the z-score against it
        #[arg(long)]
        check: bool,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

#[derive(Debug)]
enum CliError {
    Model(ModelError),
    Core(CoreError),
    Io { path: String, source: std::io::Error },
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Model(err) => write!(f, "{err}"),
            CliError::Core(err) => write!(f, "{err}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
            CliError::Usage(msg) => write!(f, "{msg}"),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(err: ModelError) -> Self {
        CliError::Model(err)
    }
}

impl From<CoreError> for CliError {
    fn from(err: CoreError) -> Self {
        CliError::Core(err)
    }
}

fn core_exit(err: &CoreError) -> u8 {
    match err {
        CoreError::InvalidParameter(_) | CoreError::UnknownParameter(_) => 2,
        CoreError::InvalidPolicy { .. }
        | CoreError::ReducibleChain(_)
        | CoreError::DimensionLimit { .. } => 3,
    }
}

fn exit_code(err: &CliError) -> u8 {
    match err {
        CliError::Usage(_) | CliError::Io { .. } => 2,
        CliError::Model(ModelError::Io { .. }) | CliError::Model(ModelError::Parse { .. }) => 2,
        CliError::Model(ModelError::Invalid(core)) | CliError::Core(core) => core_exit(core),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Eval {
            model,
            format,
            period_hours,
            dump_model,
        } => cmd_eval(model.as_deref(), format, period_hours, dump_model),
        Command::Scenarios {
            format,
            compare_paper,
        } => cmd_scenarios(format, compare_paper),
        Command::Sweep {
            model,
            parameter,
            multipliers,
            svg,
        } => cmd_sweep(model.as_deref(), &parameter, multipliers.as_deref(), svg.as_deref()),
        Command::Rank { model } => cmd_rank(model.as_deref()),
        Command::Simulate {
            model,
            horizon,
            reps,
            seed,
            check,
            format,
        } => cmd_simulate(model.as_deref(), horizon, reps, seed, check, format),
    }
}

fn load_or_builtin(path: Option<&Path>) -> Result<ModelFile, CliError> {
    match path {
        Some(p) => Ok(load_model(p)?),
        None => Ok(ModelFile::builtin()),
    }
}

fn cmd_eval(
    path: Option<&Path>,
    format: Format,
    period_flag: Option<f64>,
    dump_model: bool,
) -> Result<(), CliError> {
    let file = load_or_builtin(path)?;
    if dump_model {
        print!("{}", file.dump());
        return Ok(());
    }
    let deployment = file.to_deployment()?;
    let period = match period_flag {
        Some(p) if p.is_finite() && p > 0.0 => p,
        Some(p) => {
            return Err(CoreError::InvalidParameter(format!(
                "--period-hours must be positive and finite, got {p}"
            ))
            .into())
        }
        None => file.period()?.unwrap_or(HOURS_PER_YEAR),
    };
    let result = evaluate_deployment(&deployment)?;
    let av = result.availability;
    let pct = fmt_pct(av.percent());
    let nines = fmt_nines(av.nines());
    let downtime = fmt_downtime(av.downtime_hours(period));
    match format {
        Format::Table => println!("{pct} | {nines} | {downtime}"),
        Format::Csv => {
            let rows = vec![
                vec![
                    "availability_pct".to_owned(),
                    "nines".to_owned(),
                    "downtime_h".to_owned(),
                ],
                vec![pct, nines, downtime],
            ];
            print!("{}", render_csv(&rows));
        }
        Format::Json => {
            let value = serde_json::json!({
                "availability_pct": json_num(&pct),
                "nines": json_num(&nines),
                "downtime_h": json_num(&downtime),
                "period_hours": period,
            });
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        }
    }
    Ok(())
}

fn policy_label(policy: EndorsementPolicy) -> &'static str {
    match policy {
        EndorsementPolicy::And => "AND",
        EndorsementPolicy::Or => "OR",
        EndorsementPolicy::Koon(_) => "KooN",
    }
}

fn fmt_delta(value: f64) -> String {
    if value.abs() >= 0.01 {
        format!("{value:+.2}")
    } else {
        format!("{value:+.2e}")
    }
}

fn round4(value: f64) -> f64 {
    format!("{value:.4}").parse().expect("rounded percent")
}

fn cmd_scenarios(format: Format, compare: bool) -> Result<(), CliError> {
    let mut header = vec![
        "scenario".to_owned(),
        "policy".to_owned(),
        "k".to_owned(),
        "m".to_owned(),
        "availability_pct".to_owned(),
        "nines".to_owned(),
        "downtime_h".to_owned(),
    ];
    if compare {
        for extra in [
            "ref_pct",
            "ref_nines",
            "ref_downtime_h",
            "delta_pct",
            "delta_nines",
            "delta_downtime_h",
            "notes",
        ] {
            header.push(extra.to_owned());
        }
    }
    let mut rows = vec![header];
    let mut json_rows = Vec::new();
    for scenario in 1..=SCENARIO_COUNT {
        let deployment = baseline::scenario_deployment(scenario).expect("built-in scenario");
        let result = evaluate_deployment(&deployment)?;
        let av = result.availability;
        let downtime = av.downtime_hours(HOURS_PER_YEAR);
        let mut row = vec![
            scenario.to_string(),
            policy_label(result.policy).to_owned(),
            result.required_servers.to_string(),
            result.total_servers.to_string(),
            fmt_pct(av.percent()),
            fmt_nines(av.nines()),
            fmt_downtime(downtime),
        ];
        let mut json_row = serde_json::json!({
            "scenario": scenario,
            "policy": policy_label(result.policy),
            "k": result.required_servers,
            "m": result.total_servers,
            "availability_pct": json_num(&fmt_pct(av.percent())),
            "nines": json_num(&fmt_nines(av.nines())),
            "downtime_h": json_num(&fmt_downtime(downtime)),
        });
        if compare {
            let reference = &baseline::reference_rows()[scenario - 1];
            let delta_pct = round4(av.percent()) - reference.corrected_availability_pct;
            let delta_nines = av.nines() - reference.nines;
            let delta_downtime = downtime - reference.downtime_hours;
            let mut notes = Vec::new();
            if !reference.nines_consistent {
                notes.push("nines-mismatch");
            }
            if reference.availability_pct != reference.corrected_availability_pct {
                notes.push("pct-digit-drop");
            }
            row.push(fmt_pct(reference.corrected_availability_pct));
            row.push(fmt_nines(reference.nines));
            row.push(fmt_downtime(reference.downtime_hours));
            row.push(fmt_delta(delta_pct));
            row.push(fmt_delta(delta_nines));
            row.push(fmt_delta(delta_downtime));
            row.push(notes.join(" "));
            let object = json_row.as_object_mut().expect("scenario object");
            object.insert(
                "reference".to_owned(),
                serde_json::json!({
                    "availability_pct": json_num(&fmt_pct(reference.corrected_availability_pct)),
                    "nines": json_num(&fmt_nines(reference.nines)),
                    "downtime_h": json_num(&fmt_downtime(reference.downtime_hours)),
                }),
            );
            object.insert(
                "delta".to_owned(),
                serde_json::json!({
                    "availability_pct": json_num(&fmt_delta(delta_pct)),
                    "nines": json_num(&fmt_delta(delta_nines)),
                    "downtime_h": json_num(&fmt_delta(delta_downtime)),
                }),
            );
            object.insert(
                "notes".to_owned(),
                serde_json::Value::Array(
                    notes
                        .iter()
                        .map(|n| serde_json::Value::String((*n).to_owned()))
                        .collect(),
                ),
            );
        }
        rows.push(row);
        json_rows.push(json_row);
    }
    match format {
        Format::Table => {
            print!("{}", render_table(&rows, styling_enabled()));
            if compare {
                println!();
                println!(
                    "nines-mismatch: the reference nines column disagrees with the reference \
                     downtime column in rows 5, 7, and 8."
                );
                println!(
                    "pct-digit-drop: row 8's reference availability reads 99.9987 where its \
                     downtime implies 99.99987; deltas use the restored digit."
                );
            }
        }
        Format::Csv => print!("{}", render_csv(&rows)),
        Format::Json => println!(
            "{}",
            serde_json::to_string_pretty(&serde_json::Value::Array(json_rows)).expect("json")
        ),
    }
    Ok(())
}

fn parse_multipliers(text: &str) -> Result<Vec<f64>, CliError> {
    let usage = || {
        CliError::Usage(format!(
            "--multipliers expects LO:HI:STEPS or a single multiplier, got {text}"
        ))
    };
    let parts: Vec<&str> = text.split(':').collect();
    match parts.as_slice() {
        [single] => {
            let value: f64 = single.trim().parse().map_err(|_| usage())?;
            Ok(vec![value])
        }
        [lo, hi, steps] => {
            let lo: f64 = lo.trim().parse().map_err(|_| usage())?;
            let hi: f64 = hi.trim().parse().map_err(|_| usage())?;
            let steps: usize = steps.trim().parse().map_err(|_| usage())?;
            if steps == 0 {
                return Err(CliError::Usage(
                    "--multipliers needs at least one step".to_owned(),
                ));
            }
            if steps == 1 {
                if lo == hi {
                    return Ok(vec![lo]);
                }
                return Err(CliError::Usage(
                    "--multipliers with one step needs LO equal to HI".to_owned(),
                ));
            }
            let width = (hi - lo) / (steps - 1) as f64;
            let grid = (0..steps)
                .map(|i| {
                    if i + 1 == steps {
                        hi
                    } else {
                        lo + i as f64 * width
                    }
                })
                .collect();
            Ok(grid)
        }
        _ => Err(usage()),
    }
}

fn cmd_sweep(
    path: Option<&Path>,
    parameter: &str,
    multipliers: Option<&str>,
    svg_path: Option<&Path>,
) -> Result<(), CliError> {
    let file = load_or_builtin(path)?;
    let deployment = file.to_deployment()?;
    let parameter = ParameterRef::parse(parameter)?;
    let grid = match multipliers {
        Some(text) => parse_multipliers(text)?,
        None => default_multipliers(),
    };
    let spec = SweepSpec::new(deployment, parameter, grid)?;
    let result = sweep(&spec)?;
    let mut rows = vec![vec![
        "multiplier".to_owned(),
        "param_hours".to_owned(),
        "annual_downtime_h".to_owned(),
    ]];
    for point in &result.points {
        rows.push(vec![
            format!("{:.2}", point.multiplier),
            format!("{:.4}", point.parameter_hours),
            fmt_downtime(point.annual_downtime_hours),
        ]);
    }
    print!("{}", render_csv(&rows));
    if let Some(target) = svg_path {
        let chart = svg::sweep_chart(&result.parameter.to_string(), &result.points);
        std::fs::write(target, chart).map_err(|source| CliError::Io {
            path: target.display().to_string(),
            source,
        })?;
    }
    Ok(())
}

fn cmd_rank(path: Option<&Path>) -> Result<(), CliError> {
    let file = load_or_builtin(path)?;
    let deployment = file.to_deployment()?;
    let entries = rank_parameters(&deployment)?;
    let mut rows = vec![vec!["parameter".to_owned(), "impact_range_h".to_owned()]];
    for entry in &entries {
        rows.push(vec![
            entry.parameter.to_string(),
            fmt_downtime(entry.impact_range),
        ]);
    }
    print!("{}", render_csv(&rows));
    Ok(())
}

fn cmd_simulate(
    path: Option<&Path>,
    horizon: f64,
    reps: u32,
    seed: u64,
    check: bool,
    format: Format,
) -> Result<(), CliError> {
    let file = load_or_builtin(path)?;
    let deployment = file.to_deployment()?;
    let config = SimConfig::new(horizon, reps, seed)?;
    let estimate = simulate(&deployment, &config)?;
    let analytic = evaluate_deployment(&deployment)?
        .availability
        .unavailability();
    let z = (estimate.mean_unavailability - analytic) / estimate.std_error;
    let z_text = if z.is_finite() {
        format!("{z:+.2}")
    } else {
        "n/a".to_owned()
    };
    let flag = if estimate.low_resolution { "yes" } else { "no" };
    match format {
        Format::Table => {
            println!("mean unavailability  {}", fmt_stat(estimate.mean_unavailability));
            println!("std error            {}", fmt_stat(estimate.std_error));
            println!(
                "ci95                 [{}, {}]",
                fmt_stat(estimate.ci95.0),
                fmt_stat(estimate.ci95.1)
            );
            println!("low resolution       {flag}");
            if check {
                println!("analytic             {}", fmt_stat(analytic));
                println!("z score              {z_text}");
            }
        }
        Format::Csv => {
            let mut header = vec![
                "mean_unavailability".to_owned(),
                "std_error".to_owned(),
                "ci95_low".to_owned(),
                "ci95_high".to_owned(),
                "low_resolution".to_owned(),
            ];
            let mut row = vec![
                fmt_stat(estimate.mean_unavailability),
                fmt_stat(estimate.std_error),
                fmt_stat(estimate.ci95.0),
                fmt_stat(estimate.ci95.1),
                estimate.low_resolution.to_string(),
            ];
            if check {
                header.push("analytic".to_owned());
                header.push("z_score".to_owned());
                row.push(fmt_stat(analytic));
                row.push(z_text.clone());
            }
            print!("{}", render_csv(&[header, row]));
        }
        Format::Json => {
            let mut value = serde_json::json!({
                "mean_unavailability": json_num(&fmt_stat(estimate.mean_unavailability)),
                "std_error": json_num(&fmt_stat(estimate.std_error)),
                "ci95_low": json_num(&fmt_stat(estimate.ci95.0)),
                "ci95_high": json_num(&fmt_stat(estimate.ci95.1)),
                "low_resolution": estimate.low_resolution,
            });
            if check {
                let object = value.as_object_mut().expect("simulate object");
                object.insert("analytic".to_owned(), json_num(&fmt_stat(analytic)));
                object.insert("z_score".to_owned(), json_num(&z_text));
            }
            println!("{}", serde_json::to_string_pretty(&value).expect("json"));
        }
    }
    Ok(())
}

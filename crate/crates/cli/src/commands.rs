//! The three commands: generate instances, run experiment sweeps, and
//! evaluate or maximize the competitive-ratio bound.

use std::path::Path;

use rao_core::bound::{evaluate_bound, grid_points, maximize_bound, BoundEvaluation, BoundParams, MaximizeConfig};
use rao_core::harness::{estimate_metric, estimate_ratio, Metric};
use rao_core::model::{accuracy, validate_instance};
use rao_core::rat::{rat_display, rat_to_f64};
use rao_core::rng::derive_seed;
use rao_core::Instance;

use crate::config::{ExperimentConfig, GeneratorSpec};
use crate::error::CliError;

/// Environment fallback for the worker count.
pub const WORKERS_ENV: &str = "RAO_LAB_WORKERS";

/// Worker count precedence: CLI flag, then config, then `RAO_LAB_WORKERS`.
/// `None` leaves the parallel runtime at its default.
pub fn resolve_workers(
    flag: Option<usize>,
    config: Option<usize>,
) -> Result<Option<usize>, CliError> {
    if flag == Some(0) {
        return Err(CliError::Validation(
            "--workers: must be at least 1".to_string(),
        ));
    }
    if let Some(w) = flag.or(config) {
        return Ok(Some(w));
    }
    match std::env::var(WORKERS_ENV) {
        Ok(text) => {
            let w: usize = text.trim().parse().map_err(|_| {
                CliError::Validation(format!("{WORKERS_ENV}: expected a positive integer, got {text:?}"))
            })?;
            if w == 0 {
                return Err(CliError::Validation(format!(
                    "{WORKERS_ENV}: must be at least 1"
                )));
            }
            Ok(Some(w))
        }
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(e) => Err(CliError::Validation(format!("{WORKERS_ENV}: {e}"))),
    }
}

/// Generates an instance, writes it as JSON, and returns the report text
/// (accuracy and validation findings).
pub fn cmd_generate(spec: &GeneratorSpec, out: &Path) -> Result<String, CliError> {
    let inst = spec.build()?;
    let json = serde_json::to_string_pretty(&inst)?;
    std::fs::write(out, format!("{json}\n"))
        .map_err(|e| CliError::Validation(format!("{}: {e}", out.display())))?;
    Ok(instance_report(&inst))
}

/// Human-readable summary: size, accuracy, validation findings.
pub fn instance_report(inst: &Instance) -> String {
    let mut report = format!(
        "instance {}: n={}, budget={}, adversarial={}\n",
        inst.id(),
        inst.len(),
        inst.budget(),
        inst.adversarial(),
    );
    match accuracy(inst) {
        Ok(acc) => {
            let c = &acc.c_value;
            if c.is_integer() {
                report.push_str(&format!("accuracy C = {}\n", rat_display(c)));
            } else {
                report.push_str(&format!(
                    "accuracy C = {} ({:.6})\n",
                    rat_display(c),
                    rat_to_f64(c)
                ));
            }
        }
        Err(e) => report.push_str(&format!("accuracy C: {e}\n")),
    }
    let validation = validate_instance(inst, true);
    if validation.is_valid() {
        report.push_str("validation: ok\n");
    } else if inst.adversarial() {
        report.push_str(
            "validation: adversarial instance, the harness skips these checks:\n",
        );
        for line in validation.to_string().lines() {
            report.push_str(&format!("  {line}\n"));
        }
    } else {
        report.push_str("validation: FAILED\n");
        for line in validation.to_string().lines() {
            report.push_str(&format!("  {line}\n"));
        }
    }
    report
}

/// Runs the full sweep and returns the results CSV. Deterministic given the
/// config: per-combination seeds come from the master seed and the position
/// in the sweep, never from worker scheduling.
pub fn cmd_run(config: &ExperimentConfig, workers: Option<usize>) -> Result<Vec<u8>, CliError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Validation(e.to_string()))?;
    pool.install(|| run_sweep(config))
}

fn run_sweep(config: &ExperimentConfig) -> Result<Vec<u8>, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record([
        "instance_id",
        "reader",
        "params",
        "trials",
        "mean",
        "ci95",
        "opt",
        "opt_source",
        "ratio",
    ])?;

    let mut combo = 0u64;
    for experiment in &config.experiments {
        let inst = experiment.instance.load()?;
        let trials = experiment.trials.unwrap_or(config.trials);
        let metric = experiment.metric.unwrap_or(config.metric);
        let opt_source = experiment.opt_source.unwrap_or(config.opt_source);
        for reader in &experiment.readers {
            let factory = reader.to_factory()?;
            let seed = derive_seed(config.seed, combo);
            combo += 1;
            match metric {
                Metric::Value => {
                    let est = estimate_ratio(&inst, factory.as_ref(), trials, seed, opt_source)?;
                    writer.write_record([
                        inst.id(),
                        &factory.id(),
                        &factory.params(),
                        &trials.to_string(),
                        &fmt_f64(est.mean),
                        &fmt_f64(est.ci95),
                        &rat_display(&est.opt),
                        est.opt_source.label(),
                        &fmt_f64(est.ratio),
                    ])?;
                }
                Metric::SelectMax => {
                    let est =
                        estimate_metric(&inst, factory.as_ref(), trials, seed, Metric::SelectMax)?;
                    writer.write_record([
                        inst.id(),
                        &factory.id(),
                        &factory.params(),
                        &trials.to_string(),
                        &fmt_f64(est.mean),
                        &fmt_f64(est.ci95),
                        "",
                        "",
                        "",
                    ])?;
                }
            }
        }
    }
    writer
        .into_inner()
        .map_err(|e| CliError::Validation(e.to_string()))
}

/// Shortest round-trip decimal; non-finite values render as `inf`/`nan`.
fn fmt_f64(x: f64) -> String {
    format!("{x}")
}

/// JSON literal for a float; non-finite values become `null`.
fn json_f64(x: f64) -> String {
    if x.is_finite() {
        format!("{x}")
    } else {
        "null".to_string()
    }
}

/// Seven-key JSON report of a bound evaluation.
pub fn bound_json(eval: &BoundEvaluation) -> String {
    format!(
        "{{\n  \"g\": {},\n  \"beta\": {},\n  \"gamma\": {},\n  \"tail1\": {},\n  \"tail2\": {},\n  \"p_prime\": {},\n  \"ratio\": {}\n}}\n",
        json_f64(eval.params.g),
        json_f64(eval.params.beta),
        json_f64(eval.params.gamma),
        json_f64(eval.tail1),
        json_f64(eval.tail2),
        json_f64(eval.p_prime_lb),
        json_f64(eval.ratio_multiplier),
    )
}

/// Evaluates the bound at one parameter point.
pub fn cmd_bound_eval(g: &str, beta: &str, gamma: &str) -> Result<String, CliError> {
    let params = BoundParams {
        g: crate::config::parse_real(g)?,
        beta: crate::config::parse_real(beta)?,
        gamma: crate::config::parse_real(gamma)?,
    };
    let eval = evaluate_bound(&params)?;
    Ok(bound_json(&eval))
}

/// Maximizes the guaranteed value fraction, optionally along a fixed g.
pub fn cmd_bound_maximize(fixed_g: Option<&str>) -> Result<String, CliError> {
    let fixed_g = match fixed_g {
        Some(s) => Some(crate::config::parse_real(s)?),
        None => None,
    };
    let config = MaximizeConfig {
        fixed_g,
        ..MaximizeConfig::default()
    };
    let (_, eval) = maximize_bound(&config)?;
    Ok(bound_json(&eval))
}

/// Dumps objective samples over the feasible grid as CSV for plotting.
pub fn cmd_bound_grid(g_step: f64, beta_step: f64, gamma_step: f64) -> Result<Vec<u8>, CliError> {
    for (name, step) in [("g-step", g_step), ("beta-step", beta_step), ("gamma-step", gamma_step)] {
        if !(step > 0.0) || !step.is_finite() {
            return Err(CliError::Validation(format!(
                "{name}: must be a positive number, got {step}"
            )));
        }
    }
    let config = MaximizeConfig {
        g_step,
        beta_step,
        gamma_step,
        ..MaximizeConfig::default()
    };
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(["g", "beta", "gamma", "tail1", "tail2", "p_prime", "objective", "ratio"])?;
    for params in grid_points(&config) {
        let Ok(eval) = evaluate_bound(&params) else {
            continue;
        };
        writer.write_record([
            fmt_f64(params.g),
            fmt_f64(params.beta),
            fmt_f64(params.gamma),
            fmt_f64(eval.tail1),
            fmt_f64(eval.tail2),
            fmt_f64(eval.p_prime_lb),
            fmt_f64(eval.objective),
            fmt_f64(eval.ratio_multiplier),
        ])?;
    }
    writer
        .into_inner()
        .map_err(|e| CliError::Validation(e.to_string()))
}

/// Writes bytes to the path, or to stdout when no path is given.
pub fn emit(bytes: &[u8], out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display()))),
        None => {
            use std::io::Write;
            std::io::stdout()
                .write_all(bytes)
                .map_err(CliError::from)
        }
    }
}

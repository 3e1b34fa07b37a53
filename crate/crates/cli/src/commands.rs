use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use serde::Serialize;

use fhmdp::dataset;
use fhmdp::io::{
    emit_report, format_significant, load_expected_results, load_model_with, load_policy,
    load_terminal_values, ReportFormat,
};
use fhmdp::oracle::{
    enumerate_optimal_with_cap, policy_count, random_instance, simulate_policy, RandomModelConfig,
};
use fhmdp::{
    evaluate_policy, solve_backward_induction, FiniteHorizonMdp, Horizon, RowCheck, StateId,
    PROB_TOLERANCE,
};

use crate::{Command, Format, ModelArgs, RowCheckArg, VerifySource};

/// Agreement required between backward induction and enumeration.
const VERIFY_TOLERANCE: f64 = 1e-9;

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::Solve {
            model,
            horizon,
            format,
        } => solve(&model, Horizon(horizon), format),
        Command::Check {
            model,
            expected,
            horizon,
        } => check(&model, &expected, horizon),
        Command::Simulate {
            model,
            horizon,
            policy,
            starts,
            episodes,
            seed,
            format,
        } => simulate(
            &model,
            Horizon(horizon),
            policy.as_deref(),
            &starts,
            episodes,
            seed,
            format,
        ),
        Command::Verify {
            source,
            horizon,
            seed,
            cap,
        } => verify(&source, Horizon(horizon), seed, cap),
    }
}

/// Reads `name` as a file if it exists, else as a bundled resource.
fn resolve(name: &str, builtin: fn(&str) -> Option<&'static str>, what: &str) -> Result<Vec<u8>> {
    let path = Path::new(name);
    if path.exists() {
        return fs::read(path).with_context(|| format!("reading {what} {}", path.display()));
    }
    match builtin(name) {
        Some(text) => Ok(text.as_bytes().to_vec()),
        None => bail!("{what} {name:?} is neither a file nor a bundled name"),
    }
}

fn load(args: &ModelArgs) -> Result<(FiniteHorizonMdp, Option<Vec<f64>>)> {
    let check = match args.row_check {
        RowCheckArg::Tolerance => RowCheck::Tolerance(PROB_TOLERANCE),
        RowCheckArg::Strict => RowCheck::Strict,
        RowCheckArg::Renormalize => RowCheck::Renormalize(PROB_TOLERANCE),
    };
    let bytes = resolve(&args.model, dataset::builtin_model, "model")?;
    let mdp =
        load_model_with(&bytes, check).with_context(|| format!("loading model {}", args.model))?;
    let terminal = match &args.terminal_values {
        Some(path) => {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            Some(
                load_terminal_values(&bytes)
                    .with_context(|| format!("loading {}", path.display()))?,
            )
        }
        None => None,
    };
    Ok((mdp, terminal))
}

fn report_format(format: Format) -> ReportFormat {
    match format {
        Format::Table => ReportFormat::Table,
        Format::Csv => ReportFormat::Csv,
        Format::Json => ReportFormat::Json,
    }
}

fn write_stdout(bytes: &[u8]) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(bytes)?;
    out.flush()?;
    Ok(())
}

fn solve(args: &ModelArgs, horizon: Horizon, format: Format) -> Result<ExitCode> {
    let (mdp, terminal) = load(args)?;
    let result = solve_backward_induction(&mdp, horizon, terminal.as_deref())?;
    write_stdout(&emit_report(&result, report_format(format)))?;
    Ok(ExitCode::SUCCESS)
}

fn check(args: &ModelArgs, expected: &str, horizon: Option<usize>) -> Result<ExitCode> {
    let (mdp, terminal) = load(args)?;
    let bytes = resolve(expected, dataset::builtin_expected, "fixture")?;
    let fixture =
        load_expected_results(&bytes).with_context(|| format!("loading fixture {expected}"))?;
    let horizon = Horizon(horizon.unwrap_or(fixture.horizon()));
    let result = solve_backward_induction(&mdp, horizon, terminal.as_deref())?;
    let mismatches = fixture.compare(&result)?;

    let cells = fixture.value_table.len() * fixture.state_count();
    let decisions = fixture.decision_table.len() * fixture.state_count();
    if mismatches.is_empty() {
        write_stdout(
            format!("ok: {cells} value cells and {decisions} decision cells match\n").as_bytes(),
        )?;
        Ok(ExitCode::SUCCESS)
    } else {
        let mut text = String::new();
        for m in &mismatches {
            let _ = writeln!(text, "mismatch {m}");
        }
        let _ = writeln!(
            text,
            "FAILED: {} of {} cells differ",
            mismatches.len(),
            cells + decisions
        );
        write_stdout(text.as_bytes())?;
        Ok(ExitCode::from(1))
    }
}

#[derive(Serialize)]
struct SimulationRow {
    start_state: usize,
    episodes: u64,
    mean: f64,
    standard_error: f64,
    policy_value: f64,
    seed: u64,
}

fn simulate(
    args: &ModelArgs,
    horizon: Horizon,
    policy_path: Option<&Path>,
    starts: &[usize],
    episodes: u64,
    seed: u64,
    format: Format,
) -> Result<ExitCode> {
    let (mdp, terminal) = load(args)?;
    if terminal.is_some() {
        bail!("simulate does not support terminal values");
    }
    let policy = match policy_path {
        Some(path) => {
            let bytes = fs::read(path).with_context(|| format!("reading {}", path.display()))?;
            load_policy(&bytes).with_context(|| format!("loading policy {}", path.display()))?
        }
        None => solve_backward_induction(&mdp, horizon, None)?.policy,
    };
    let exact = evaluate_policy(&mdp, &policy, horizon, None)?;

    let starts: Vec<StateId> = if starts.is_empty() {
        mdp.state_ids().collect()
    } else {
        starts
            .iter()
            .map(|&s| StateId::from_one_based(s).context("start states are numbered from 1"))
            .collect::<Result<_>>()?
    };

    let mut rows = Vec::with_capacity(starts.len());
    for start in starts {
        let est = simulate_policy(&mdp, &policy, start, episodes, seed)?;
        rows.push(SimulationRow {
            start_state: start.one_based(),
            episodes: est.episode_count,
            mean: est.mean,
            standard_error: est.standard_error,
            policy_value: exact.value(0, start),
            seed: est.seed,
        });
    }

    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&rows)?;
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s =
                String::from("start_state,episodes,mean,standard_error,policy_value,seed\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{},{},{:?},{:?},{:?},{}",
                    r.start_state, r.episodes, r.mean, r.standard_error, r.policy_value, r.seed
                );
            }
            s
        }
        Format::Table => {
            let mut s = format!(
                "{:>5}  {:>9}  {:>12}  {:>10}  {:>12}  {:>6}\n",
                "start", "episodes", "mean", "std_error", "policy_value", "z"
            );
            for r in &rows {
                let z = if r.standard_error > 0.0 {
                    format!("{:.2}", (r.mean - r.policy_value) / r.standard_error)
                } else {
                    "-".to_string()
                };
                let _ = writeln!(
                    s,
                    "{:>5}  {:>9}  {:>12}  {:>10}  {:>12}  {:>6}",
                    r.start_state,
                    r.episodes,
                    format_significant(r.mean, 8),
                    format_significant(r.standard_error, 4),
                    format_significant(r.policy_value, 8),
                    z
                );
            }
            let _ = writeln!(s, "seed {seed}");
            s
        }
    };
    write_stdout(text.as_bytes())?;
    Ok(ExitCode::SUCCESS)
}

fn verify(source: &VerifySource, horizon: Horizon, seed: u64, cap: u64) -> Result<ExitCode> {
    let instances: Vec<(String, FiniteHorizonMdp, Horizon)> = match (&source.model, source.random) {
        (Some(model), _) => {
            let args = ModelArgs {
                model: model.clone(),
                terminal_values: None,
                row_check: RowCheckArg::Tolerance,
            };
            vec![(model.clone(), load(&args)?.0, horizon)]
        }
        (None, Some(count)) => {
            let cfg = RandomModelConfig::default();
            (0..count)
                .map(|k| {
                    let s = seed.wrapping_add(k);
                    let (m, h) = random_instance(s, &cfg);
                    (format!("random seed {s}"), m, h)
                })
                .collect()
        }
        (None, None) => bail!("verify needs --model or --random"),
    };

    let mut out = String::new();
    let mut all_agree = true;
    for (name, mdp, h) in &instances {
        let enumerated = enumerate_optimal_with_cap(mdp, *h, cap)
            .with_context(|| format!("enumerating {name}"))?;
        let solved = solve_backward_induction(mdp, *h, None)?;
        let max_diff = enumerated
            .value_table
            .row(0)
            .iter()
            .zip(solved.value_table.row(0))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        let agree = max_diff <= VERIFY_TOLERANCE;
        all_agree &= agree;
        let values: Vec<String> = solved
            .value_table
            .row(0)
            .iter()
            .map(|v| format!("{v:?}"))
            .collect();
        let _ = writeln!(
            out,
            "{name}: {} states, horizon {h}, {} policies, max |diff| {max_diff:e}, {} (v(0) = [{}])",
            mdp.state_count(),
            policy_count(mdp, *h).map_or_else(|| "?".into(), |c| c.to_string()),
            if agree { "agree" } else { "DISAGREE" },
            values.join(", ")
        );
    }
    write_stdout(out.as_bytes())?;
    Ok(if all_agree {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

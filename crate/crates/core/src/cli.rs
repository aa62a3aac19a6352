//! The `divcut` command line.
//!
//! Exit codes: 0 success, 1 I/O, 2 invalid input (parse or validation),
//! 3 internal error, 4 infeasible plan, 5 oracle limit exceeded.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand};
use num_traits::Zero;

use crate::dp::solve_heuristic;
use crate::io::{gen_instance, parse_instance, parse_plan, write_instance, write_plan, Totals};
use crate::model::{
    check_plan_feasibility, compute_stats, plan_cost, Cost, CuttingPlan, Instance, Params,
    PlanStats,
};
use crate::oracle::{exact_solve_divisible, OracleError, OracleLimits};

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;
pub const EXIT_INFEASIBLE: i32 = 4;
pub const EXIT_LIMIT: i32 = 5;

/// Stock length of generated instances.
pub const GEN_STOCK_LENGTH: u64 = 12000;

pub const REPORT_HEADER: &str =
    "instance\tn\tdemands\tdemand_length\tstocks\ttrim\ttrim_pct\twelds\tleftovers\ttime_s";

#[derive(Debug, Parser)]
#[command(
    name = "divcut",
    version,
    about = "Cutting stock with divisible (weldable) items"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve instances with the DP heuristic and print a report row each.
    Solve {
        /// Instance file; repeat to solve several.
        #[arg(long, required = true)]
        instance: Vec<PathBuf>,
        /// Plan output file, or a directory when several instances are given.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads for several instances.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Solve an instance exactly by exhaustive search (small instances only).
    Oracle {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Check a plan file against an instance.
    Check {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
    /// Generate a random instance with stock length 12000.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        wmin: u64,
        #[arg(long, default_value_t = 6000)]
        wmax: u64,
        #[arg(long, default_value_t = 1)]
        vmin: u32,
        #[arg(long, default_value_t = 20)]
        vmax: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the report row of an existing plan.
    Stats {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[command(flatten)]
        params: ParamArgs,
    },
}

#[derive(Debug, Args, Clone)]
struct ParamArgs {
    /// Leftovers at least this long are banked as usable.
    #[arg(long, default_value_t = 1000)]
    beta: u64,
    /// Minimum length of either piece of a divided item.
    #[arg(long, default_value_t = 1000)]
    theta: u64,
    /// Cost per millimetre of counted trim (integer, decimal or a/b).
    #[arg(long, default_value = "1", value_parser = parse_cost)]
    gamma: Cost,
    /// Cost per weld (integer, decimal or a/b).
    #[arg(long, default_value = "500", value_parser = parse_cost)]
    delta: Cost,
}

impl ParamArgs {
    fn params(&self) -> Result<Params, Failure> {
        Params::new(self.beta, self.theta, self.gamma, self.delta)
            .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))
    }
}

/// Parses `3`, `0.25` or `1/3` into an exact rational.
pub fn parse_cost(text: &str) -> Result<Cost, String> {
    let text = text.trim();
    let bad = || format!("`{text}` is not a number");
    if let Some((num, den)) = text.split_once('/') {
        let num: i128 = num.trim().parse().map_err(|_| bad())?;
        let den: i128 = den.trim().parse().map_err(|_| bad())?;
        if den == 0 {
            return Err("zero denominator".into());
        }
        return Ok(Cost::new(num, den));
    }
    let (int, frac) = text.split_once('.').unwrap_or((text, ""));
    if frac.len() > 18 || !frac.chars().all(|ch| ch.is_ascii_digit()) {
        return Err(bad());
    }
    let scale = 10i128.pow(frac.len() as u32);
    let negative = int.starts_with('-');
    let whole: i128 = match int {
        "" | "-" if !frac.is_empty() => 0,
        _ => int.parse().map_err(|_| bad())?,
    };
    let part: i128 = if frac.is_empty() {
        0
    } else {
        frac.parse().map_err(|_| bad())?
    };
    let magnitude = whole.abs() * scale + part;
    Ok(Cost::new(
        if negative { -magnitude } else { magnitude },
        scale,
    ))
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", path.display())))
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    parse_instance(&read(path)?)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))
}

fn load_plan(
    path: &Path,
    instance: &Instance,
    params: &Params,
) -> Result<(CuttingPlan, Totals), Failure> {
    let file = parse_plan(&read(path)?)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    let plan = file
        .into_plan(instance, params)
        .map_err(|e| Failure::new(EXIT_INVALID, format!("{}: {e}", path.display())))?;
    Ok((plan, file.totals))
}

/// One tab-separated report row.
pub fn report_row(name: &str, plan: &CuttingPlan, stats: &PlanStats) -> String {
    let inst = &plan.instance;
    let leftovers = if stats.usable_leftovers.is_empty() {
        "-".to_string()
    } else {
        stats
            .leftover_groups()
            .iter()
            .map(|(l, n)| format!("{l}*{n}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    format!(
        "{name}\t{}\t{}\t{}\t{}\t{}\t{:.4}\t{}\t{}\t{:.3}",
        inst.items.len(),
        inst.total_units(),
        inst.total_length(),
        stats.stocks_used,
        stats.total_trim_loss,
        stats.trim_percentage,
        stats.weld_count,
        leftovers,
        stats.elapsed.as_secs_f64()
    )
}

/// Runs the CLI with `args` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Solve {
            instance,
            out: dest,
            jobs,
            params,
        } => cmd_solve(&instance, dest.as_deref(), jobs, &params, out, err),
        Command::Oracle {
            instance,
            out: dest,
            params,
        } => cmd_oracle(&instance, dest.as_deref(), &params, out),
        Command::Check {
            instance,
            plan,
            params,
        } => cmd_check(&instance, &plan, &params, out),
        Command::Gen {
            seed,
            n,
            wmin,
            wmax,
            vmin,
            vmax,
            out: dest,
        } => cmd_gen(seed, n, wmin..=wmax, vmin..=vmax, dest.as_deref(), out),
        Command::Stats {
            instance,
            plan,
            params,
        } => cmd_stats(&instance, &plan, &params, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn solve_one(path: &Path, params: &Params) -> Result<(CuttingPlan, PlanStats), Failure> {
    let instance = load_instance(path)?;
    let started = Instant::now();
    let plan = solve_heuristic(&instance, params)
        .map_err(|e| Failure::new(EXIT_INTERNAL, format!("{}: {e}", path.display())))?;
    let elapsed = started.elapsed();
    if let Err(violations) = check_plan_feasibility(&plan) {
        return Err(Failure::new(
            EXIT_INTERNAL,
            format!(
                "{}: solver produced an infeasible plan: {}",
                path.display(),
                violations[0]
            ),
        ));
    }
    let stats = compute_stats(&plan, elapsed);
    Ok((plan, stats))
}

fn instance_name(path: &Path) -> String {
    path.file_stem().map_or_else(
        || path.display().to_string(),
        |s| s.to_string_lossy().into_owned(),
    )
}

fn cmd_solve(
    instances: &[PathBuf],
    dest: Option<&Path>,
    jobs: usize,
    args: &ParamArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    let params = args.params()?;
    if instances.len() == 1 {
        let (plan, stats) = solve_one(&instances[0], &params)?;
        let text = write_plan(&plan, &stats);
        match dest {
            Some(path) => write_file(path, &text)?,
            None => out
                .write_all(text.as_bytes())
                .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?,
        }
        let row = report_row(&instance_name(&instances[0]), &plan, &stats);
        writeln!(out, "{REPORT_HEADER}\n{row}")
            .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
        return Ok(EXIT_OK);
    }

    let dir = dest.ok_or_else(|| {
        Failure::new(
            EXIT_INVALID,
            "--out <directory> is required with several instances",
        )
    })?;
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::new(EXIT_IO, format!("{}: {e}", dir.display())))?;

    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<String, Failure>>>> =
        Mutex::new((0..instances.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..jobs.clamp(1, instances.len()) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= instances.len() {
                    break;
                }
                let path = &instances[i];
                let name = instance_name(path);
                let result = solve_one(path, &params).and_then(|(plan, stats)| {
                    write_file(
                        &dir.join(format!("{name}.plan")),
                        &write_plan(&plan, &stats),
                    )?;
                    Ok(report_row(&name, &plan, &stats))
                });
                results.lock().expect("results lock")[i] = Some(result);
            });
        }
    });

    let mut code = EXIT_OK;
    let mut report = format!("{REPORT_HEADER}\n");
    for result in results
        .into_inner()
        .expect("results lock")
        .into_iter()
        .flatten()
    {
        match result {
            Ok(row) => {
                report.push_str(&row);
                report.push('\n');
            }
            Err(f) => {
                let _ = writeln!(err, "error: {}", f.message);
                code = code.max(f.code);
            }
        }
    }
    out.write_all(report.as_bytes())
        .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    Ok(code)
}

fn cmd_oracle(
    path: &Path,
    dest: Option<&Path>,
    args: &ParamArgs,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let params = args.params()?;
    let instance = load_instance(path)?;
    let started = Instant::now();
    let solution = exact_solve_divisible(&instance, &params, &OracleLimits::default()).map_err(
        |OracleError::LimitExceeded(report)| {
            Failure::new(EXIT_LIMIT, format!("limit exceeded: {report}"))
        },
    )?;
    let stats = compute_stats(&solution.plan, started.elapsed());
    debug_assert_eq!(plan_cost(&solution.plan), solution.cost);
    let mut text = format!(
        "cost={} welds={} trim={} stocks={}\n",
        solution.cost, stats.weld_count, stats.total_trim_loss, stats.stocks_used
    );
    let plan_text = write_plan(&solution.plan, &stats);
    match dest {
        Some(p) => write_file(p, &plan_text)?,
        None => text.push_str(&plan_text),
    }
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    Ok(EXIT_OK)
}

fn cmd_check(
    instance_path: &Path,
    plan_path: &Path,
    args: &ParamArgs,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let params = args.params()?;
    let instance = load_instance(instance_path)?;
    let (plan, stated) = load_plan(plan_path, &instance, &params)?;
    let mut text = String::new();
    if let Err(violations) = check_plan_feasibility(&plan) {
        for v in &violations {
            let _ = writeln!(text, "{v}");
        }
    }
    let stats = compute_stats(&plan, Duration::ZERO);
    let actual = Totals {
        trim: stats.total_trim_loss,
        welds: stats.weld_count,
        leftovers: stats
            .leftover_groups()
            .into_iter()
            .map(|(l, n)| (l, n as u64))
            .collect(),
    };
    if actual != stated {
        let _ = writeln!(
            text,
            "footer: stated trim={} welds={}, plan has trim={} welds={}",
            stated.trim, stated.welds, actual.trim, actual.welds
        );
    }
    let code = if text.is_empty() {
        text.push_str("feasible\n");
        EXIT_OK
    } else {
        EXIT_INFEASIBLE
    };
    out.write_all(text.as_bytes())
        .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    Ok(code)
}

fn cmd_gen(
    seed: u64,
    n: usize,
    lengths: std::ops::RangeInclusive<u64>,
    demands: std::ops::RangeInclusive<u32>,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let instance = gen_instance(seed, n, GEN_STOCK_LENGTH, lengths, demands)
        .map_err(|e| Failure::new(EXIT_INVALID, e.to_string()))?;
    let text = write_instance(&instance);
    match dest {
        Some(p) => write_file(p, &text)?,
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Failure::new(EXIT_IO, e.to_string()))?,
    }
    Ok(EXIT_OK)
}

fn cmd_stats(
    instance_path: &Path,
    plan_path: &Path,
    args: &ParamArgs,
    out: &mut dyn Write,
) -> Result<i32, Failure> {
    let params = args.params()?;
    let instance = load_instance(instance_path)?;
    let (plan, _) = load_plan(plan_path, &instance, &params)?;
    let stats = compute_stats(&plan, Duration::ZERO);
    let row = report_row(&instance_name(instance_path), &plan, &stats);
    writeln!(out, "{REPORT_HEADER}\n{row}").map_err(|e| Failure::new(EXIT_IO, e.to_string()))?;
    debug_assert!(
        !plan_cost(&plan).is_zero() || stats.total_trim_loss == 0 || params.gamma.is_zero()
    );
    Ok(EXIT_OK)
}

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hubflow::bench::{
    compare, exit_code, gantt_csv, gantt_export, run_method, savings_report, sweep_flexibility, Method,
    RunOptions, SavingsReport, DEFAULT_EMPTY_MILE_FACTOR, SWEEP_DELTAS,
};
use hubflow::instance::{generate_instance, load_instance, load_plan, save_instance, save_plan, GeneratorParams};
use hubflow::nf::BoundReport;
use hubflow::{Error, Instance, Minutes};

/// Fleet scheduling for autonomous transfer hub networks.
///
/// HUBFLOW_THREADS caps the worker threads used for ladder rungs.
#[derive(Parser)]
#[command(name = "hubflow", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Preset {
    /// 17 hubs, 437 orders.
    N17,
    /// 30 hubs, 468 orders.
    N30,
    /// The 17-hub network with `--orders` orders and a proportional fleet.
    Scaled,
    /// A few tasks on a small network, for exhaustive solving.
    Tiny,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic instance.
    Gen {
        #[arg(long, value_enum, default_value = "n17")]
        preset: Preset,
        #[arg(long)]
        orders: Option<usize>,
        #[arg(long)]
        fleet_size: Option<usize>,
        /// Flexibility stored in the instance, in minutes.
        #[arg(long)]
        delta: Option<Minutes>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one method and report its bounds.
    Solve {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, default_value = "nf")]
        method: Method,
        /// Flexibility in minutes; defaults to the instance's.
        #[arg(long)]
        delta: Option<Minutes>,
        /// NF ladder rungs, e.g. 0,30,60.
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<Minutes>>,
        #[arg(long, default_value_t = 60.0)]
        time_limit_s: f64,
        /// Where to write the plan.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Where to write the report; standard output if omitted.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Run several methods on one instance and tabulate their bounds.
    Compare {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "nf,cg,greedy")]
        methods: Vec<Method>,
        #[arg(long)]
        delta: Option<Minutes>,
        #[arg(long, value_delimiter = ',')]
        ladder: Option<Vec<Minutes>>,
        #[arg(long, default_value_t = 60.0)]
        time_limit_s: f64,
        /// Machine-readable table; the aligned table goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// NF bounds and the greedy baseline across flexibilities.
    Sweep {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', default_values_t = SWEEP_DELTAS)]
        deltas: Vec<Minutes>,
        /// Plot data; the aligned table goes to standard output.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Export a plan as Gantt segments, one row per truck.
    Gantt {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Estimate savings of a plan over direct trips with empty returns.
    Savings {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value_t = DEFAULT_EMPTY_MILE_FACTOR)]
        empty_mile_factor: f64,
        /// Defaults to the instance's factor.
        #[arg(long)]
        auto_cost_factor: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
}

/// Failure categories mapped to exit codes.
enum Fail {
    Usage(String),
    NoSolution(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match exit_code(&e) {
            2 => Fail::NoSolution(e.to_string()),
            _ => Fail::Usage(e.to_string()),
        }
    }
}

type CmdResult = Result<(), Fail>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match cli.cmd {
        Cmd::Gen { preset, orders, fleet_size, delta, seed, out } => {
            cmd_gen(preset, orders, fleet_size, delta, seed, out.as_deref())
        }
        Cmd::Solve { instance, method, delta, ladder, time_limit_s, out, report, format } => {
            let opts = run_options(delta, ladder, time_limit_s);
            opts.and_then(|o| cmd_solve(&instance, method, o, out.as_deref(), report.as_deref(), format))
        }
        Cmd::Compare { instance, methods, delta, ladder, time_limit_s, out, format } => {
            let opts = run_options(delta, ladder, time_limit_s);
            opts.and_then(|o| cmd_compare(&instance, &methods, o, out.as_deref(), format))
        }
        Cmd::Sweep { instance, deltas, out, format } => cmd_sweep(&instance, &deltas, out.as_deref(), format),
        Cmd::Gantt { instance, plan, out, format } => cmd_gantt(&instance, &plan, out.as_deref(), format),
        Cmd::Savings { instance, plan, empty_mile_factor, auto_cost_factor, out, format } => {
            cmd_savings(&instance, &plan, empty_mile_factor, auto_cost_factor, out.as_deref(), format)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Fail::NoSolution(msg)) => {
            eprintln!("no solution: {msg}");
            ExitCode::from(2)
        }
    }
}

/// Options shared by `solve` and `compare`; `delta` is filled in once the
/// instance is loaded.
struct PartialOptions {
    delta: Option<Minutes>,
    ladder: Option<Vec<Minutes>>,
    time_limit: Duration,
}

impl PartialOptions {
    fn resolve(self, inst: &Instance) -> Result<RunOptions, Fail> {
        let delta = self.delta.unwrap_or(inst.flexibility());
        if delta < 0 {
            return Err(Fail::Usage("--delta must be nonnegative".into()));
        }
        Ok(RunOptions {
            delta,
            ladder: self.ladder,
            time_limit: self.time_limit,
        })
    }
}

fn run_options(delta: Option<Minutes>, ladder: Option<Vec<Minutes>>, time_limit_s: f64) -> Result<PartialOptions, Fail> {
    if !(time_limit_s.is_finite() && time_limit_s > 0.0) {
        return Err(Fail::Usage("--time-limit-s must be a positive number".into()));
    }
    Ok(PartialOptions {
        delta,
        ladder,
        time_limit: Duration::from_secs_f64(time_limit_s),
    })
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Fail::Usage(format!("writing {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn cmd_gen(
    preset: Preset,
    orders: Option<usize>,
    fleet_size: Option<usize>,
    delta: Option<Minutes>,
    seed: u64,
    out: Option<&Path>,
) -> CmdResult {
    let mut params = match preset {
        Preset::N17 => GeneratorParams::n17(),
        Preset::N30 => GeneratorParams::n30(),
        Preset::Scaled => GeneratorParams::scaled(orders.unwrap_or(100)),
        Preset::Tiny => GeneratorParams::tiny(orders.unwrap_or(6)),
    };
    if let Some(n) = orders {
        params.orders = n;
    }
    if let Some(k) = fleet_size {
        params.fleet_size = k;
    }
    if let Some(d) = delta {
        params.flexibility = d;
    }
    let inst = generate_instance(&params, seed)?;
    match out {
        Some(p) => save_instance(&inst, p)?,
        None => print!("{}", to_json(&inst.to_data())),
    }
    Ok(())
}

fn cmd_solve(
    instance: &Path,
    method: Method,
    opts: PartialOptions,
    out: Option<&Path>,
    report_out: Option<&Path>,
    format: Format,
) -> CmdResult {
    let inst = load_instance(instance)?;
    let opts = opts.resolve(&inst)?;
    let run = run_method(&inst, method, &opts)?;
    let text = match format {
        Format::Csv => format!("{}\n{}\n", BoundReport::CSV_HEADER, run.report.csv_row()),
        Format::Json => to_json(&run.report),
    };
    emit(report_out, &text)?;
    if let (Some(plan), Some(p)) = (&run.plan, out) {
        save_plan(plan, p)?;
    }
    match run.failure {
        Some(msg) if run.plan.is_none() => Err(Fail::NoSolution(msg)),
        _ => Ok(()),
    }
}

fn cmd_compare(
    instance: &Path,
    methods: &[Method],
    opts: PartialOptions,
    out: Option<&Path>,
    format: Option<Format>,
) -> CmdResult {
    let inst = load_instance(instance)?;
    let opts = opts.resolve(&inst)?;
    let id = instance
        .file_stem()
        .map_or("instance".to_string(), |s| s.to_string_lossy().into_owned());
    let (table, runs) = compare(&inst, &id, methods, &opts);
    for (m, run) in &runs {
        match run {
            Err(e) => eprintln!("{m}: {e}"),
            Ok(r) => {
                if let Some(msg) = &r.failure {
                    eprintln!("{m}: {msg}");
                }
            }
        }
    }
    let machine = |f: Format| match f {
        Format::Csv => table.to_csv(),
        Format::Json => to_json(&table),
    };
    match (out, format) {
        (Some(p), f) => {
            emit(Some(p), &machine(f.unwrap_or(Format::Csv)))?;
            print!("{}", table.to_pretty());
        }
        (None, Some(f)) => print!("{}", machine(f)),
        (None, None) => print!("{}", table.to_pretty()),
    }
    Ok(())
}

fn cmd_sweep(instance: &Path, deltas: &[Minutes], out: Option<&Path>, format: Option<Format>) -> CmdResult {
    if deltas.iter().any(|&d| d < 0) {
        return Err(Fail::Usage("flexibilities must be nonnegative".into()));
    }
    let inst = load_instance(instance)?;
    let id = instance
        .file_stem()
        .map_or("instance".to_string(), |s| s.to_string_lossy().into_owned());
    let sweep = sweep_flexibility(&inst, deltas)?;
    let machine = |f: Format| match f {
        Format::Csv => sweep.to_csv(),
        Format::Json => to_json(&sweep),
    };
    match (out, format) {
        (Some(p), f) => {
            emit(Some(p), &machine(f.unwrap_or(Format::Csv)))?;
            print!("{}", sweep.table(&id).to_pretty());
        }
        (None, Some(f)) => print!("{}", machine(f)),
        (None, None) => print!("{}", sweep.table(&id).to_pretty()),
    }
    Ok(())
}

fn cmd_gantt(instance: &Path, plan: &Path, out: Option<&Path>, format: Format) -> CmdResult {
    let inst = load_instance(instance)?;
    let plan = load_plan(plan)?;
    let segments = gantt_export(&plan, &inst)?;
    let text = match format {
        Format::Csv => gantt_csv(&segments),
        Format::Json => to_json(&segments),
    };
    emit(out, &text)
}

fn cmd_savings(
    instance: &Path,
    plan: &Path,
    empty_mile_factor: f64,
    auto_cost_factor: Option<f64>,
    out: Option<&Path>,
    format: Format,
) -> CmdResult {
    let inst = load_instance(instance)?;
    let plan = load_plan(plan)?;
    let report = savings_report(&inst, &plan, empty_mile_factor, auto_cost_factor)?;
    let text = match format {
        Format::Csv => format!("{}\n{}\n", SavingsReport::CSV_HEADER, report.csv_row()),
        Format::Json => to_json(&report),
    };
    emit(out, &text)
}

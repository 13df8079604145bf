//! `bkklab`: command-line front end for the numerical pipelines.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bkklab::banach::symmetrize;
use bkklab::crofton::{crofton_density_with, zonoid_check, InversionOptions};
use bkklab::mixedvol::finsler_mixed_volume;
use bkklab::solver::{
    bkk_factor, estimate_average_with, parse_norm, verify_bkk_with, ScenarioConfig, VerificationRecord,
};
use bkklab::sphere::SphereGrid;
use bkklab::{Error, NormSpecF64};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "bkklab", version, about = "Banach convex bodies, Crofton densities and smooth BKK checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Directory for the JSON report and CSV artifacts.
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Format printed on stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Worker threads for the parallel numerical work.
    #[arg(long, global = true, env = "BKKLAB_WORKERS")]
    workers: Option<usize>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Zonoid symmetrization of a norm: h_symm on a report grid.
    Symmetrize(NormArgs),
    /// Crofton density of a norm by cosine-transform inversion.
    CroftonDensity(NormArgs),
    /// Sign test of the Crofton density.
    ZonoidCheck(NormArgs),
    /// Mixed volume of the B-body fields of a scenario.
    MixedVolume(ScenarioArgs),
    /// Monte-Carlo average number of solutions.
    AverageSolutions(ScenarioArgs),
    /// Both sides of the averaging identity with the 3σ test.
    Verify(ScenarioArgs),
    /// Verifies every built-in scenario and prints a pass/fail table.
    Selftest(SelftestArgs),
}

#[derive(Args)]
struct NormArgs {
    /// `euclidean:D`, `lp:P:D`, `linf:D`, `linf-smooth:EPS:D` or `l1:D`.
    #[arg(long)]
    norm: String,
    /// Sphere resolution (circle points in dim 2, icosahedral level in dim 3).
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "scenario")]
    config: Option<PathBuf>,
    /// Built-in scenario name.
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct SelftestArgs {
    /// Overrides every scenario's sample count.
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } | Error::InvalidBody(_) => 3,
            _ => 2,
        };
        Failure { code, message: e.to_string() }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure { code: 2, message: format!("{}: {e}", path.display()) }
}

struct Output {
    dir: Option<PathBuf>,
    format: Format,
}

impl Output {
    /// Writes `<stem>.json` (and `<stem>.csv` when given) to the output
    /// directory and prints the requested format.
    fn emit(&self, stem: &str, report: &Value, csv: Option<String>) -> Result<(), Failure> {
        let text = serde_json::to_string_pretty(report).expect("reports serialize") + "\n";
        if let Some(dir) = &self.dir {
            fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
            let p = dir.join(format!("{stem}.json"));
            fs::write(&p, &text).map_err(|e| io_failure(&p, e))?;
            if let Some(c) = &csv {
                let p = dir.join(format!("{stem}.csv"));
                fs::write(&p, c).map_err(|e| io_failure(&p, e))?;
            }
        }
        let out = match (self.format, csv) {
            (Format::Csv, Some(c)) => c,
            _ => text,
        };
        std::io::stdout().write_all(out.as_bytes()).map_err(|e| Failure { code: 2, message: e.to_string() })
    }
}

fn csv_text(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(&r).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("utf-8 csv")
}

fn num(v: f64) -> String {
    format!("{v:.17e}")
}

fn load_scenario(args: &ScenarioArgs) -> Result<ScenarioConfig, Failure> {
    let mut cfg = match (&args.config, &args.scenario) {
        (Some(path), _) => ScenarioConfig::from_file(path)?,
        (None, Some(name)) => ScenarioConfig::builtin(name)?,
        (None, None) => {
            return Err(Failure {
                code: 2,
                message: format!(
                    "pass --config FILE or --scenario NAME (built-ins: {})",
                    ScenarioConfig::builtin_names().join(", ")
                ),
            })
        }
    };
    if let Some(s) = args.samples {
        cfg.samples = s;
    }
    if let Some(g) = args.grid {
        cfg.grid = g;
    }
    if let Some(s) = args.seed {
        cfg.seed = s;
    }
    Ok(cfg)
}

/// The scenario with every default written out.
fn resolved(cfg: &ScenarioConfig, problem: &bkklab::solver::Problem) -> Value {
    let mut v = serde_json::to_value(cfg).expect("config serializes");
    let res: Vec<usize> = (0..problem.spaces().len()).map(|i| problem.symmetrize_resolution(i)).collect();
    v["symmetrize_resolution"] = json!(res);
    v["region"] = json!(problem.region().intervals());
    v["mode"] = json!(problem.mode());
    v
}

fn report_directions(dim: usize) -> Result<SphereGrid<f64>, Failure> {
    Ok(match dim {
        1 => SphereGrid::points(),
        2 => SphereGrid::circle(64)?,
        3 => SphereGrid::icosahedral(1)?,
        _ => SphereGrid::hyperspherical(6)?,
    })
}

fn run_symmetrize(args: &NormArgs, out: &Output) -> Result<(), Failure> {
    let norm = parse_norm(&args.norm, None)?;
    let d = norm.dim();
    let res = args.resolution.unwrap_or(bkklab::solver::default_symmetrize_resolution(d));
    let s = symmetrize(&norm, res)?;
    let grid = report_directions(d)?;
    let rows: Vec<(Vec<f64>, f64, f64)> =
        (0..grid.len()).map(|i| (grid.point(i).to_vec(), s.h_symm(grid.point(i)), norm.dual(grid.point(i)))).collect();
    let mut e1 = vec![0.0; d];
    e1[0] = 1.0;
    let ones = vec![1.0; d];
    let report = json!({
        "command": "symmetrize",
        "norm": args.norm,
        "resolution": res,
        "generators": s.generator_count(),
        "h_symm_e1": s.h_symm(&e1),
        "h_symm_ones": s.h_symm(&ones),
        "grid": rows.iter().map(|(x, h, n)| json!({"direction": x, "h_symm": h, "dual_norm": n})).collect::<Vec<_>>(),
    });
    let mut header: Vec<String> = (1..=d).map(|i| format!("x{i}")).collect();
    header.extend(["h_symm".into(), "dual_norm".into()]);
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let csv = csv_text(
        &header,
        rows.iter().map(|(x, h, n)| x.iter().map(|&v| num(v)).chain([num(*h), num(*n)]).collect()),
    );
    out.emit("symmetrize", &report, Some(csv))
}

fn run_crofton_density(args: &NormArgs, out: &Output) -> Result<(), Failure> {
    let norm = parse_norm(&args.norm, args.resolution)?;
    let inv = crofton_density_with(&norm, &InversionOptions::mollified(norm.dim()))?;
    let mut buf = Vec::new();
    inv.density.write_csv(&mut buf)?;
    let report = json!({
        "command": "crofton-density",
        "norm": args.norm,
        "degree": inv.degree,
        "residual": inv.residual,
        "min": inv.density.min(),
        "max": inv.density.max(),
        "mean": inv.density.mean(),
        "grid_points": inv.density.values().len(),
    });
    out.emit("crofton-density", &report, Some(String::from_utf8(buf).expect("utf-8 csv")))
}

fn run_zonoid_check(args: &NormArgs, out: &Output) -> Result<(), Failure> {
    let norm: NormSpecF64 = parse_norm(&args.norm, args.resolution)?;
    let z = zonoid_check(&norm)?;
    let mut report = serde_json::to_value(&z).expect("report serializes");
    report["command"] = json!("zonoid-check");
    report["norm"] = json!(args.norm);
    let csv = csv_text(
        &["is_zonoid", "min_density", "mean_density", "tolerance"],
        [vec![z.is_zonoid.to_string(), num(z.min_density), num(z.mean_density), num(z.tolerance)]],
    );
    out.emit("zonoid-check", &report, Some(csv))
}

fn run_mixed_volume(args: &ScenarioArgs, out: &Output) -> Result<(), Failure> {
    let cfg = load_scenario(args)?;
    let problem = cfg.to_problem()?;
    let fv = finsler_mixed_volume(&problem.fields()?, problem.region(), cfg.grid)?;
    let c = bkk_factor(problem.spaces().len());
    let report = json!({
        "command": "mixed-volume",
        "scenario": resolved(&cfg, &problem),
        "value": fv.value,
        "grid": fv.grid,
        "tolerance": fv.tolerance,
        "tolerance_met": fv.converged,
        "bkk_value": c * fv.value,
    });
    let csv = csv_text(
        &["scenario", "value", "grid", "tolerance", "tolerance_met"],
        [vec![cfg.name.clone(), num(fv.value), fv.grid.to_string(), num(fv.tolerance), fv.converged.to_string()]],
    );
    out.emit(&format!("{}-mixed-volume", cfg.name), &report, Some(csv))?;
    if fv.converged {
        Ok(())
    } else {
        Err(Failure { code: 3, message: format!("mixed volume not converged at grid {}", fv.grid) })
    }
}

fn records_csv(records: &[bkklab::solver::SampleRecord]) -> String {
    csv_text(
        &["weight", "count", "uncertain"],
        records.iter().map(|r| vec![num(r.weight), r.count.to_string(), r.uncertain.to_string()]),
    )
}

fn run_average(args: &ScenarioArgs, out: &Output) -> Result<(), Failure> {
    let cfg = load_scenario(args)?;
    let problem = cfg.to_problem()?;
    let keep = out.format == Format::Csv || out.dir.is_some();
    let r = estimate_average_with(&problem, cfg.samples, cfg.seed, keep)?;
    let report = json!({
        "command": "average-solutions",
        "scenario": resolved(&cfg, &problem),
        "estimate": r,
    });
    out.emit(&format!("{}-average", cfg.name), &report, keep.then(|| records_csv(&r.records)))
}

fn verification(cfg: &ScenarioConfig, keep: bool) -> Result<(Value, VerificationRecord), Failure> {
    let problem = cfg.to_problem()?;
    let v = verify_bkk_with(&problem, cfg.samples, cfg.grid, cfg.seed, keep)?;
    let report = json!({
        "command": "verify",
        "scenario": resolved(cfg, &problem),
        "record": v,
    });
    Ok((report, v))
}

fn run_verify(args: &ScenarioArgs, out: &Output) -> Result<(), Failure> {
    let cfg = load_scenario(args)?;
    let keep = out.format == Format::Csv || out.dir.is_some();
    let (report, v) = verification(&cfg, keep)?;
    out.emit(&format!("{}-verify", cfg.name), &report, keep.then(|| records_csv(&v.lhs.records)))?;
    if !v.rhs_converged {
        return Err(Failure { code: 3, message: format!("mixed-volume side not converged at grid {}", v.grid) });
    }
    if v.pass {
        Ok(())
    } else {
        Err(Failure {
            code: 1,
            message: format!("verification failed: LHS {} RHS {} z {:.2}", v.lhs.estimate, v.rhs, v.z_score),
        })
    }
}

#[derive(Serialize)]
struct SelftestRow {
    scenario: String,
    lhs: f64,
    std_error: f64,
    rhs: f64,
    expected: Option<f64>,
    z_score: f64,
    pass: bool,
}

fn run_selftest(args: &SelftestArgs, out: &Output) -> Result<(), Failure> {
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    println!("{:<24} {:>14} {:>10} {:>14} {:>14} {:>8}  result", "scenario", "lhs", "stderr", "rhs", "expected", "z");
    for name in ScenarioConfig::builtin_names() {
        let mut cfg = ScenarioConfig::builtin(name)?;
        if let Some(s) = args.samples {
            cfg.samples = s;
        }
        if let Some(s) = args.seed {
            cfg.seed = s;
        }
        let (report, v) = verification(&cfg, false)?;
        let expected_ok = v.expected.is_none_or(|e| (v.rhs - e).abs() <= 5e-3 * e.abs());
        let pass = v.pass && v.rhs_converged && expected_ok;
        println!(
            "{:<24} {:>14.6} {:>10.2e} {:>14.6} {:>14} {:>8.2}  {}",
            name,
            v.lhs.estimate,
            v.lhs.std_error,
            v.rhs,
            v.expected.map_or("-".to_string(), |e| format!("{e:.6}")),
            v.z_score,
            if pass { "PASS" } else { "FAIL" }
        );
        rows.push(SelftestRow {
            scenario: name.to_string(),
            lhs: v.lhs.estimate,
            std_error: v.lhs.std_error,
            rhs: v.rhs,
            expected: v.expected,
            z_score: v.z_score,
            pass,
        });
        reports.push(report);
    }
    let failed = rows.iter().filter(|r| !r.pass).count();
    if let Some(dir) = &out.dir {
        let summary = json!({ "command": "selftest", "rows": rows, "reports": reports });
        let text = serde_json::to_string_pretty(&summary).expect("reports serialize") + "\n";
        fs::create_dir_all(dir).map_err(|e| io_failure(dir, e))?;
        let p = dir.join("selftest.json");
        fs::write(&p, text).map_err(|e| io_failure(&p, e))?;
    }
    println!("{} of {} scenarios passed", rows.len() - failed, rows.len());
    if failed == 0 {
        Ok(())
    } else {
        Err(Failure { code: 1, message: format!("{failed} scenario(s) failed") })
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure { code: 2, message: e.to_string() })?;
    }
    let out = Output { dir: cli.out_dir.clone(), format: cli.format };
    match &cli.command {
        Command::Symmetrize(a) => run_symmetrize(a, &out),
        Command::CroftonDensity(a) => run_crofton_density(a, &out),
        Command::ZonoidCheck(a) => run_zonoid_check(a, &out),
        Command::MixedVolume(a) => run_mixed_volume(a, &out),
        Command::AverageSolutions(a) => run_average(a, &out),
        Command::Verify(a) => run_verify(a, &out),
        Command::Selftest(a) => run_selftest(a, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("bkklab: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

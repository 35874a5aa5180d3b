//! Command-line front end.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use kkent_core::spectra::dense_memory_estimate;
use kkent_core::{extrapolate, FieldSpec, ModelParams, SweepSpec};
use serde_json::json;

use crate::cache::SpectrumCache;
use crate::config::{parse_config_with_cap, Job, Mode, OutputFormat, RunConfig};
use crate::error::{ConfigError, ExitStatus, KkentError};
use crate::output::{
    append_extrapolation_csv, append_sweep_csv, extrapolation_csv_string, read_sweep_csv, sweep_csv_string, write_json,
    ExtrapolationRow, JsonDocument, Metadata,
};
use crate::runner::{evaluate_unit, run_sweep, SweepRow};

#[derive(Debug, Parser)]
#[command(
    name = "kkent",
    version,
    about = "Spin-pseudospin entanglement of the SU(2)xSU(2) Kugel-Khomskii chain"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Log-negativity of a single point, printed to standard output.
    Point(CommonArgs),
    /// Every point of a cut, temperature list and chain-length list.
    Sweep(CommonArgs),
    /// Fit sweep results against 1/N and report the N → ∞ intercepts.
    Extrapolate(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML run configuration.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Output file (CSV is appended to, JSON is replaced).
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Number of worker threads.
    #[arg(long, value_name = "INT")]
    pub workers: Option<usize>,
    /// Add bond correlators and magnetizations to the output.
    #[arg(long)]
    pub observables: bool,
    /// Directory for cached spectral decompositions.
    #[arg(long, value_name = "DIR")]
    pub cache: Option<PathBuf>,
    /// Raise the chain-length cap (prints a memory estimate first).
    #[arg(long, value_name = "INT")]
    pub max_sites: Option<usize>,
}

impl Command {
    fn parts(&self) -> (Mode, &CommonArgs) {
        match self {
            Command::Point(a) => (Mode::Point, a),
            Command::Sweep(a) => (Mode::Sweep, a),
            Command::Extrapolate(a) => (Mode::Extrapolate, a),
        }
    }
}

/// Outcome of a run: the exit status and whatever goes to standard output.
#[derive(Debug)]
pub struct Outcome {
    pub status: ExitStatus,
    pub stdout: String,
}

/// Loads the configuration named by the command and applies flag overrides.
pub fn load_config(command: &Command) -> Result<RunConfig, KkentError> {
    let (mode, args) = command.parts();
    let text = fs::read_to_string(&args.config).map_err(|e| KkentError::io(&args.config, e))?;
    let mut cfg = parse_config_with_cap(&text, args.max_sites)?;
    if cfg.mode() != mode {
        return Err(ConfigError::Invalid {
            key: "mode".into(),
            expected: format!("\"{}\" to match the subcommand", mode.as_str()),
        }
        .into());
    }
    if let Some(path) = &args.output {
        cfg.output_path = Some(path.clone());
    }
    if let Some(format) = args.format {
        cfg.output_format = match format {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        };
    }
    if let Some(workers) = args.workers {
        if workers == 0 {
            return Err(ConfigError::Invalid {
                key: "--workers".into(),
                expected: "an integer >= 1".into(),
            }
            .into());
        }
        cfg.worker_budget = workers;
    }
    if args.observables {
        cfg.include_observables = true;
        if let Job::Sweep(spec) = &mut cfg.job {
            spec.observables_enabled = true;
        }
    }
    if let Some(dir) = &args.cache {
        cfg.cache_dir = Some(dir.clone());
    }
    Ok(cfg)
}

/// Executes the command. Diagnostics go to `stderr`; the returned outcome
/// carries standard output.
pub fn run(cli: &Cli, stderr: &mut dyn Write) -> Result<Outcome, KkentError> {
    let cfg = load_config(&cli.command)?;
    let (_, args) = cli.command.parts();
    if args.max_sites.is_some() {
        let largest = match &cfg.job {
            Job::Point { params, .. } => params.n_sites,
            Job::Sweep(spec) => spec.n_sites_list.iter().copied().max().unwrap_or(0),
            Job::Extrapolate { .. } => 0,
        };
        let _ = writeln!(
            stderr,
            "max sites {}: dense memory per worker about {:.1} MiB at the cap, {:.1} MiB for the largest requested chain",
            cfg.site_cap.max_sites(),
            dense_memory_estimate(cfg.site_cap.max_sites()) as f64 / (1u64 << 20) as f64,
            dense_memory_estimate(largest) as f64 / (1u64 << 20) as f64,
        );
    }
    let cache = cfg.cache_dir.as_ref().map(SpectrumCache::open).transpose()?;
    let start = Instant::now();
    match &cfg.job {
        Job::Point { params, temperature } => {
            let rows = evaluate_unit(
                params,
                &[*temperature],
                cfg.include_observables,
                cfg.site_cap,
                cache.as_ref(),
            );
            let row = &rows[0];
            let status = if row.is_ok() {
                ExitStatus::Success
            } else {
                let _ = writeln!(stderr, "{}", row.status);
                ExitStatus::ComputeFailure
            };
            if let Some(path) = &cfg.output_path {
                write_sweep_rows(&cfg, path, &rows, start)?;
            }
            let stdout = row.log_negativity.map(|ln| format!("{ln}\n")).unwrap_or_default();
            Ok(Outcome { status, stdout })
        }
        Job::Sweep(spec) => {
            let rows = run_sweep(spec, cfg.worker_budget, cfg.site_cap, cache.as_ref())?;
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            let stdout = match &cfg.output_path {
                Some(path) => {
                    write_sweep_rows(&cfg, path, &rows, start)?;
                    String::new()
                }
                None => render_sweep_rows(&cfg, &rows, start),
            };
            let status = if failed == 0 {
                ExitStatus::Success
            } else {
                let _ = writeln!(stderr, "{failed} of {} rows failed", rows.len());
                ExitStatus::PartialSweep
            };
            Ok(Outcome { status, stdout })
        }
        Job::Extrapolate { input } => {
            let rows = read_sweep_csv(input)?;
            let fits = extrapolate_rows(&rows);
            if fits.is_empty() {
                let _ = writeln!(stderr, "no group of ok rows spans two or more chain lengths");
            }
            let stdout = match (&cfg.output_path, cfg.output_format) {
                (Some(path), OutputFormat::Csv) => {
                    append_extrapolation_csv(path, &fits)?;
                    String::new()
                }
                (Some(path), OutputFormat::Json) => {
                    write_json(
                        path,
                        &JsonDocument {
                            metadata: Metadata::new(spec_echo(&cfg), elapsed_ms(start)),
                            rows: fits,
                        },
                    )?;
                    String::new()
                }
                (None, OutputFormat::Csv) => extrapolation_csv_string(&fits),
                (None, OutputFormat::Json) => json_string(&JsonDocument {
                    metadata: Metadata::new(spec_echo(&cfg), elapsed_ms(start)),
                    rows: fits,
                }),
            };
            Ok(Outcome {
                status: ExitStatus::Success,
                stdout,
            })
        }
    }
}

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn json_string<R: serde::Serialize>(doc: &JsonDocument<R>) -> String {
    let mut text = serde_json::to_string_pretty(doc).expect("rows serialize to JSON");
    text.push('\n');
    text
}

fn write_sweep_rows(cfg: &RunConfig, path: &Path, rows: &[SweepRow], start: Instant) -> Result<(), KkentError> {
    match cfg.output_format {
        OutputFormat::Csv => append_sweep_csv(path, rows, cfg.include_observables),
        OutputFormat::Json => write_json(
            path,
            &JsonDocument {
                metadata: Metadata::new(spec_echo(cfg), elapsed_ms(start)),
                rows: rows.to_vec(),
            },
        ),
    }
}

fn render_sweep_rows(cfg: &RunConfig, rows: &[SweepRow], start: Instant) -> String {
    match cfg.output_format {
        OutputFormat::Csv => sweep_csv_string(rows, cfg.include_observables),
        OutputFormat::Json => json_string(&JsonDocument {
            metadata: Metadata::new(spec_echo(cfg), elapsed_ms(start)),
            rows: rows.to_vec(),
        }),
    }
}

fn field_json(f: &FieldSpec) -> serde_json::Value {
    json!({ "magnitude": if f.is_off() { 0.0 } else { f.magnitude }, "pattern": f.pattern.as_str() })
}

fn params_json(p: &ModelParams) -> serde_json::Value {
    json!({
        "n_sites": p.n_sites,
        "j_spin": p.j_spin,
        "i_pseudo": p.i_pseudo,
        "k_coupling": p.k_coupling,
        "field_spin": field_json(&p.field_spin),
        "field_pseudo": field_json(&p.field_pseudo),
    })
}

fn sweep_json(s: &SweepSpec) -> serde_json::Value {
    let mut v = json!({
        "cut": s.cut.name(),
        "k_coupling": s.k_coupling,
        "temperatures": s.temperatures,
        "n_sites_list": s.n_sites_list,
        "field_spin": field_json(&s.field_spin),
        "field_pseudo": field_json(&s.field_pseudo),
        "observables": s.observables_enabled,
    });
    match &s.cut {
        kkent_core::Cut::ExplicitList(points) => {
            v["explicit_points"] = json!(points.iter().map(|(j, i)| [*j, *i]).collect::<Vec<_>>());
        }
        _ => {
            v["lo"] = json!(s.range.lo);
            v["hi"] = json!(s.range.hi);
            v["points"] = json!(s.range.points);
        }
    }
    v
}

/// The interpreted configuration, echoed into JSON metadata.
pub fn spec_echo(cfg: &RunConfig) -> serde_json::Value {
    let mut v = match &cfg.job {
        Job::Point { params, temperature } => {
            let mut v = params_json(params);
            v["temperature"] = json!(temperature);
            v
        }
        Job::Sweep(spec) => sweep_json(spec),
        Job::Extrapolate { input } => json!({ "input": input.display().to_string() }),
    };
    v["mode"] = json!(cfg.mode().as_str());
    if cfg.mode() != Mode::Extrapolate {
        v["workers"] = json!(cfg.worker_budget);
        v["max_sites"] = json!(cfg.site_cap.max_sites());
    }
    v
}

/// Groups ok rows by everything except the chain length and fits each group
/// with two or more distinct lengths. Groups keep their first-appearance order.
pub fn extrapolate_rows(rows: &[SweepRow]) -> Vec<ExtrapolationRow> {
    type Key = (u64, u64, u64, u64, String, u64, String, u64);
    let key = |r: &SweepRow| -> Key {
        (
            r.j_spin.to_bits(),
            r.i_pseudo.to_bits(),
            r.k_coupling.to_bits(),
            r.field_s_mag.to_bits(),
            r.field_s_pattern.clone(),
            r.field_t_mag.to_bits(),
            r.field_t_pattern.clone(),
            r.temperature.to_bits(),
        )
    };
    struct Group<'a> {
        key: Key,
        first: &'a SweepRow,
        points: Vec<(usize, f64)>,
    }
    let mut groups: Vec<Group> = Vec::new();
    for r in rows.iter().filter(|r| r.is_ok()) {
        let Some(ln) = r.log_negativity else { continue };
        let k = key(r);
        match groups.iter_mut().find(|g| g.key == k) {
            Some(g) => g.points.push((r.n_sites, ln)),
            None => groups.push(Group {
                key: k,
                first: r,
                points: vec![(r.n_sites, ln)],
            }),
        }
    }
    groups
        .into_iter()
        .filter_map(|Group { first, points, .. }| {
            let fit = extrapolate(&points).ok()?;
            let sizes: BTreeSet<usize> = points.iter().map(|p| p.0).collect();
            Some(ExtrapolationRow {
                j_spin: first.j_spin,
                i_pseudo: first.i_pseudo,
                k_coupling: first.k_coupling,
                field_s_mag: first.field_s_mag,
                field_s_pattern: first.field_s_pattern.clone(),
                field_t_mag: first.field_t_mag,
                field_t_pattern: first.field_t_pattern.clone(),
                temperature: first.temperature,
                n_points: fit.n_points,
                n_sites_min: *sizes.first()?,
                n_sites_max: *sizes.last()?,
                intercept: fit.intercept,
                slope: fit.slope,
                residual: fit.residual,
            })
        })
        .collect()
}

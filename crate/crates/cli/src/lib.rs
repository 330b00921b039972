//! Configuration files, run directories and report emission for the
//! `shadowgm` command-line tool.
//!
//! Each run writes into its own directory:
//! `config.toml` (the resolved configuration), `series.csv`, `report.txt`
//! and any requested `snapshot_*.csv`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use shadowgm_core::presets::{preset_with, Overrides, PresetId};
use shadowgm_core::{advance, bernoulli_bound, build_initial, mean, EvolutionLaw, RunConfig, RunOutput, Verdict};
use thiserror::Error;

/// Environment variable naming the output root directory.
pub const OUT_ENV: &str = "SHADOWGM_OUT";
pub const DEFAULT_OUT: &str = "shadowgm-out";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Invalid {
        path: PathBuf,
        #[source]
        source: shadowgm_core::Error,
    },
    #[error(transparent)]
    Core(#[from] shadowgm_core::Error),
    #[error("cannot serialize configuration: {0}")]
    Serialize(#[from] toml::ser::Error),
    #[error("{failed} of {total} runs failed")]
    RunsFailed { failed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Output root from the environment, falling back to `./shadowgm-out`.
pub fn output_root() -> PathBuf {
    std::env::var_os(OUT_ENV).map_or_else(|| PathBuf::from(DEFAULT_OUT), PathBuf::from)
}

/// Parses a configuration; parse errors carry line and column.
pub fn parse_config(text: &str, path: &Path) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        message: describe_toml_error(text, &e),
    })?;
    cfg.validate().map_err(|source| CliError::Invalid {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(cfg)
}

fn describe_toml_error(text: &str, e: &toml::de::Error) -> String {
    let msg = e.message().trim().to_string();
    match e.span() {
        Some(span) => {
            let before = &text[..span.start.min(text.len())];
            let line = before.matches('\n').count() + 1;
            let col = before.len() - before.rfind('\n').map_or(0, |k| k + 1) + 1;
            format!("line {line}, column {col}: {msg}")
        }
        None => msg,
    }
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_config(&text, path)
}

pub fn config_to_toml(cfg: &RunConfig) -> Result<String> {
    Ok(toml::to_string(cfg)?)
}

/// Mean of the initial datum, used for the closed-form bounds.
pub fn initial_mean(cfg: &RunConfig) -> Result<f64> {
    let u0 = build_initial(&cfg.init, cfg.grid, cfg.params.p)?;
    Ok(mean(&u0, 1.0)?)
}

/// The report text: a verdict header line, then `key=value` blocks.
pub fn render_report(cfg: &RunConfig, out: &RunOutput, snapshot_files: &[(String, f64)]) -> Result<String> {
    let mut s = format!("# shadowgm report verdict={}\n", out.report.verdict);
    s.push_str("\n[blowup]\n");
    s.push_str(&out.report.to_kv());
    s.push_str(&format!("steps={}\n", out.steps));
    s.push_str("\n[bounds]\n");
    let idx = cfg.params.indices()?;
    s.push_str(&bernoulli_bound(&cfg.evolution, &idx, initial_mean(cfg)?)?.to_kv());
    if !snapshot_files.is_empty() {
        s.push_str("\n[snapshots]\n");
        for (file, clock) in snapshot_files {
            s.push_str(&format!("{file}={clock}\n"));
        }
    }
    s.push_str("\n[config]\n");
    s.push_str(&config_to_toml(cfg)?);
    Ok(s)
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    let mut f = fs::File::create(path).map_err(io_err(path))?;
    f.write_all(contents).map_err(io_err(path))
}

/// Runs one configuration and writes its artifacts into `dir`.
pub fn run_into(cfg: &RunConfig, dir: &Path) -> Result<RunOutput> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    write_file(&dir.join("config.toml"), config_to_toml(cfg)?.as_bytes())?;
    let out = advance(cfg)?;

    let mut csv = Vec::new();
    out.series.write_csv(&mut csv).map_err(io_err(dir))?;
    write_file(&dir.join("series.csv"), &csv)?;

    let mut files = Vec::new();
    let n_requested = out.snapshots.len() - usize::from(cfg.solver.snapshot_final);
    for (k, (clock, field)) in out.snapshots.iter().enumerate() {
        let name = if k >= n_requested {
            "snapshot_final.csv".to_string()
        } else {
            format!("snapshot_{k:03}.csv")
        };
        let mut buf = Vec::new();
        field.write_csv(&mut buf).map_err(io_err(dir))?;
        write_file(&dir.join(&name), &buf)?;
        files.push((name, *clock));
    }
    write_file(&dir.join("report.txt"), render_report(cfg, &out, &files)?.as_bytes())?;
    Ok(out)
}

/// Outcome of one member run of a batch.
#[derive(Debug)]
pub struct RunRecord {
    pub name: String,
    pub dir: PathBuf,
    pub outcome: std::result::Result<RunOutput, String>,
}

fn summary_line(rec: &RunRecord) -> String {
    match &rec.outcome {
        Ok(out) => {
            let r = &out.report;
            let opt = |v: Option<f64>| v.map_or_else(|| "n/a".into(), |x| format!("{x}"));
            format!(
                "{} verdict={} event_t={} event_sigma={} extrapolated_t={} max_sup={}",
                rec.name,
                r.verdict,
                opt(r.event_t),
                opt(r.event_sigma),
                opt(r.extrapolated_t),
                r.max_sup
            )
        }
        Err(e) => format!("{} error={e}", rec.name),
    }
}

/// Runs configurations one after another, each in `root/<name>`, and writes
/// `root/summary.txt`. Failing runs leave an `error.txt` and are reported in
/// the summary.
pub fn run_batch(configs: &[RunConfig], root: &Path) -> Result<Vec<RunRecord>> {
    fs::create_dir_all(root).map_err(io_err(root))?;
    let mut records = Vec::new();
    for (k, cfg) in configs.iter().enumerate() {
        let name = if cfg.name.is_empty() { format!("run{k}") } else { cfg.name.clone() };
        let dir = root.join(&name);
        let outcome = match run_into(cfg, &dir) {
            Ok(out) => Ok(out),
            Err(CliError::Core(e)) => {
                write_file(&dir.join("error.txt"), format!("{e}\n").as_bytes())?;
                Err(e.to_string())
            }
            Err(e) => return Err(e),
        };
        records.push(RunRecord { name, dir, outcome });
    }
    let mut summary = String::new();
    for rec in &records {
        summary.push_str(&summary_line(rec));
        summary.push('\n');
    }
    write_file(&root.join("summary.txt"), summary.as_bytes())?;
    Ok(records)
}

pub fn run_preset(id: PresetId, overrides: &Overrides, root: &Path) -> Result<Vec<RunRecord>> {
    run_batch(&preset_with(id, overrides), &root.join(id.as_str()))
}

/// Runs a configuration file into `root/<name>` (file stem when unnamed).
pub fn run_config(path: &Path, overrides: &Overrides, root: &Path) -> Result<RunRecord> {
    let mut cfg = load_config(path)?;
    overrides.apply(&mut cfg);
    cfg.validate()?;
    if cfg.name.is_empty() {
        cfg.name = path.file_stem().map_or_else(|| "run".into(), |s| s.to_string_lossy().into_owned());
    }
    let mut records = run_batch(std::slice::from_ref(&cfg), root)?;
    Ok(records.remove(0))
}

/// Fails when any record holds an error.
pub fn check_records(records: &[RunRecord]) -> Result<()> {
    let failed = records.iter().filter(|r| r.outcome.is_err()).count();
    if failed > 0 {
        return Err(CliError::RunsFailed {
            failed,
            total: records.len(),
        });
    }
    Ok(())
}

/// Human-readable bound report for a configuration.
pub fn bounds_report(cfg: &RunConfig) -> Result<String> {
    let idx = cfg.params.indices()?;
    let u0 = initial_mean(cfg)?;
    let rep = bernoulli_bound(&cfg.evolution, &idx, u0)?;
    let mut s = format!(
        "gamma={}\nomega={}\npi={}\n",
        idx.gamma, idx.omega, idx.pi
    );
    if idx.omega <= 1.0 {
        s.push_str("status=not-applicable (omega <= 1)\n");
    } else if !rep.applicable {
        s.push_str("status=not-applicable (initial mean below threshold)\n");
    } else {
        s.push_str("status=applicable\n");
    }
    s.push_str(&rep.to_kv());
    Ok(s)
}

/// Which clock a value given to `convert-time` is in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeInput {
    T(f64),
    Sigma(f64),
}

/// Converts between the physical and rescaled clocks and reports the
/// coefficients at that instant.
pub fn convert_time(law: &EvolutionLaw, input: TimeInput) -> Result<String> {
    law.validate()?;
    let (t, sigma) = match input {
        TimeInput::T(t) => {
            if t.is_nan() || t < 0.0 {
                return Err(shadowgm_core::Error::InvalidParameter(format!("t must be >= 0 (got {t})")).into());
            }
            (t, law.sigma_of_t(t))
        }
        TimeInput::Sigma(s) => (law.t_of_sigma(s)?, s),
    };
    Ok(format!(
        "t={t}\nsigma={sigma}\nrho={}\nL={}\n",
        law.rho(t),
        law.l_of_t(t)
    ))
}

pub fn is_blowup(rec: &RunRecord) -> bool {
    matches!(&rec.outcome, Ok(out) if out.report.verdict == Verdict::BlowUp)
}

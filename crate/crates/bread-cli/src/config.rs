//! Run configuration: flat key=value files, environment, CLI flags.
//!
//! Precedence, highest first:
//!
//! 1. command-line flags,
//! 2. the `BREAD_PRECISION_BITS` environment variable (precision only),
//! 3. the config file named by `--config`,
//! 4. built-in defaults.
//!
//! The file grammar is one `key = value` pair per line; `#` starts a
//! comment, blank lines are ignored, keys are case-sensitive.  Recognized
//! keys: `sequence`, `n_max`, `dimension_cap`, `enum_degree`,
//! `precision_bits`, `output`, `format`.  A `sequence` value is either a
//! bundled preset name or a comma-separated strictly increasing list of
//! positive integers.  Unknown keys and malformed values are usage errors —
//! a config problem must never be silently papered over.

use std::fmt;
use std::path::PathBuf;

use bread_core::presets;
use bread_core::GrowthSequence;
use clap::Args;

/// A configuration problem; always maps to the usage exit code.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Command-line overrides, shared by every subcommand.
#[derive(Debug, Args)]
pub struct Overrides {
    /// Path to a key=value configuration file.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Sequence: a preset name (desk-small, desk-medium, paper-13) or a
    /// comma-separated increasing list of positive integers.
    #[arg(long, global = true, value_name = "SEQ")]
    pub sequence: Option<String>,

    /// Highest stage to attempt.
    #[arg(long, global = true, value_name = "N")]
    pub n_max: Option<u64>,

    /// Refuse stages with windows wider than this.
    #[arg(long, global = true, value_name = "D")]
    pub dimension_cap: Option<u64>,

    /// Total degree used by optional enumeration cross-checks.
    #[arg(long, global = true, value_name = "D")]
    pub enum_degree: Option<u64>,

    /// Target bits of certified precision for norm enclosures.
    #[arg(long, global = true, value_name = "BITS")]
    pub precision_bits: Option<u32>,

    /// Write the command's output here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,

    /// Output format for `report`: json or csv.
    #[arg(long, global = true, value_name = "FMT")]
    pub format: Option<String>,
}

/// Output rendering for the `report` command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// The fully resolved configuration.
#[derive(Debug)]
pub struct RunConfig {
    pub sequence: GrowthSequence,
    pub n_max: u64,
    pub dimension_cap: u64,
    pub enum_degree: u64,
    pub precision_bits: u32,
    pub output: Option<PathBuf>,
    pub format: Format,
}

/// The key=value pairs read from a config file, pre-validation.
#[derive(Debug, Default)]
struct FileConfig {
    sequence: Option<String>,
    n_max: Option<u64>,
    dimension_cap: Option<u64>,
    enum_degree: Option<u64>,
    precision_bits: Option<u32>,
    output: Option<PathBuf>,
    format: Option<String>,
}

fn parse_file(text: &str) -> Result<FileConfig, ConfigError> {
    let mut out = FileConfig::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("config line {}: expected key = value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(err(format!("config line {}: empty value for `{key}`", lineno + 1)));
        }
        let parse_u64 = |what: &str| -> Result<u64, ConfigError> {
            value
                .parse::<u64>()
                .map_err(|_| err(format!("config line {}: `{what}` wants an integer, got `{value}`", lineno + 1)))
        };
        match key {
            "sequence" => out.sequence = Some(value.to_string()),
            "n_max" => out.n_max = Some(parse_u64("n_max")?),
            "dimension_cap" => out.dimension_cap = Some(parse_u64("dimension_cap")?),
            "enum_degree" => out.enum_degree = Some(parse_u64("enum_degree")?),
            "precision_bits" => {
                out.precision_bits = Some(
                    value
                        .parse::<u32>()
                        .map_err(|_| err(format!("config line {}: `precision_bits` wants an integer, got `{value}`", lineno + 1)))?,
                )
            }
            "output" => out.output = Some(PathBuf::from(value)),
            "format" => out.format = Some(value.to_string()),
            other => {
                return Err(err(format!("config line {}: unknown key `{other}`", lineno + 1)))
            }
        }
    }
    Ok(out)
}

/// Resolve a sequence spec: preset name or comma-separated integer list.
pub fn parse_sequence(spec: &str) -> Result<GrowthSequence, ConfigError> {
    if let Some(seq) = presets::by_name(spec) {
        return Ok(seq);
    }
    if spec.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        let values: Result<Vec<u64>, _> =
            spec.split(',').map(|t| t.trim().parse::<u64>()).collect();
        let values =
            values.map_err(|_| err(format!("sequence `{spec}` is neither a preset nor an integer list")))?;
        if values.is_empty() {
            return Err(err("sequence list is empty"));
        }
        return GrowthSequence::from_integers("cli", &values)
            .map_err(|e| err(format!("invalid sequence: {e}")));
    }
    Err(err(format!(
        "unknown sequence `{spec}` (presets: {})",
        presets::PRESET_NAMES.join(", ")
    )))
}

fn parse_format(spec: &str) -> Result<Format, ConfigError> {
    match spec {
        "json" => Ok(Format::Json),
        "csv" => Ok(Format::Csv),
        other => Err(err(format!("unknown format `{other}` (expected json or csv)"))),
    }
}

/// Merge flags, environment, and file into a validated `RunConfig`.
pub fn resolve(cli: &Overrides) -> Result<RunConfig, ConfigError> {
    let file = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| err(format!("cannot read config {}: {e}", path.display())))?;
            parse_file(&text)?
        }
        None => FileConfig::default(),
    };

    let env_precision = match std::env::var("BREAD_PRECISION_BITS") {
        Ok(v) => Some(
            v.parse::<u32>()
                .map_err(|_| err(format!("BREAD_PRECISION_BITS must be an integer, got `{v}`")))?,
        ),
        Err(_) => None,
    };

    let sequence_spec = cli
        .sequence
        .clone()
        .or(file.sequence)
        .unwrap_or_else(|| "desk-small".to_string());
    let sequence = parse_sequence(&sequence_spec)?;

    let n_max = cli.n_max.or(file.n_max).unwrap_or(2);
    let dimension_cap = cli.dimension_cap.or(file.dimension_cap).unwrap_or(512);
    let enum_degree = cli.enum_degree.or(file.enum_degree).unwrap_or(6);
    let precision_bits = cli
        .precision_bits
        .or(env_precision)
        .or(file.precision_bits)
        .unwrap_or(53);
    for (name, v) in [("n_max", n_max), ("dimension_cap", dimension_cap)] {
        if v == 0 {
            return Err(err(format!("`{name}` must be positive")));
        }
    }
    if precision_bits == 0 {
        return Err(err("`precision_bits` must be positive"));
    }

    let format = match cli.format.clone().or(file.format) {
        Some(f) => parse_format(&f)?,
        None => Format::Json,
    };
    let output = cli.output.clone().or(file.output);

    Ok(RunConfig {
        sequence,
        n_max,
        dimension_cap,
        enum_degree,
        precision_bits,
        output,
        format,
    })
}

//! Experiment specifications: flags, config files, presets and validation.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, ValueEnum};
use interdiv_core::{NetworkConfig, NetworkKind, Quantity};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Fig1,
    Fig2,
    TheoremSuite,
    Custom,
}

impl Preset {
    fn default_users(self) -> Option<Vec<usize>> {
        match self {
            Preset::Fig1 => Some((1..=100).collect()),
            Preset::Fig2 => Some(FIG2_USERS.to_vec()),
            Preset::TheoremSuite => Some(vec![1, 2, 4, 8, 16, 32, 64, 100]),
            Preset::Custom => None,
        }
    }

    fn default_samples(self) -> u64 {
        match self {
            Preset::Fig2 => 2_000,
            Preset::Fig1 | Preset::TheoremSuite | Preset::Custom => 100_000,
        }
    }

    fn default_networks(self) -> Vec<NetworkKind> {
        match self {
            Preset::TheoremSuite => vec![NetworkKind::CMac, NetworkKind::CBc, NetworkKind::CPac],
            _ => NetworkKind::ALL.to_vec(),
        }
    }

    fn quantity(self) -> Option<Quantity> {
        match self {
            Preset::Fig1 => Some(Quantity::NormalizedThroughput),
            Preset::Fig2 => Some(Quantity::Throughput),
            Preset::TheoremSuite => Some(Quantity::MdgRatio),
            Preset::Custom => None,
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

pub const FIG2_USERS: [usize; 4] = [1_000, 10_000, 100_000, 1_000_000];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Workers {
    Auto,
    Fixed(usize),
}

impl Workers {
    pub fn resolve(self) -> usize {
        match self {
            Workers::Auto => std::thread::available_parallelism().map_or(1, |n| n.get()),
            Workers::Fixed(n) => n,
        }
    }
}

impl FromStr for Workers {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Workers::Auto);
        }
        match s.parse::<usize>() {
            Ok(0) | Err(_) => Err(format!("workers must be a positive integer or 'auto', got '{s}'")),
            Ok(n) => Ok(Workers::Fixed(n)),
        }
    }
}

/// Powers shared by every network in a run.
#[derive(Debug, Clone, PartialEq)]
pub struct Powers {
    /// `P`, or `P_1..P_n` per user.
    pub per_user: Vec<f64>,
    pub bs: f64,
    pub pr: f64,
    pub interference_limit: f64,
}

impl Default for Powers {
    fn default() -> Self {
        Self {
            per_user: vec![1.0],
            bs: 1.0,
            pr: 1.0,
            interference_limit: 1.0,
        }
    }
}

impl Powers {
    pub fn is_symmetric(&self) -> bool {
        self.per_user.windows(2).all(|w| w[0] == w[1])
    }

    /// Template configuration for networks of up to `max_users` users.
    pub fn template(&self, max_users: usize) -> NetworkConfig {
        let cfg = NetworkConfig::new(NetworkKind::CMac, max_users)
            .with_bs_power(self.bs)
            .with_pr_power(self.pr)
            .with_interference_limit(self.interference_limit);
        match self.per_user.as_slice() {
            [p] => cfg.with_power(*p),
            ps => cfg.with_per_user_power(ps[..max_users].to_vec()),
        }
    }
}

/// A fully resolved experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub preset: Preset,
    pub quantity: Quantity,
    pub networks: Vec<NetworkKind>,
    pub users: Vec<usize>,
    pub n_samples: u64,
    pub seed: u64,
    pub workers: Workers,
    pub powers: Powers,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
}

/// Raw experiment flags, every one optional so that config-file values and
/// preset defaults can fill the gaps.
#[derive(Debug, Clone, Default, Args)]
pub struct RawFlags {
    /// Experiment preset.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,
    /// Network to simulate (repeatable): mac, bc, pac, ref.
    #[arg(long = "network")]
    pub networks: Vec<String>,
    /// Comma-separated ascending user counts K.
    #[arg(long)]
    pub users: Option<String>,
    /// Monte Carlo samples per point.
    #[arg(long)]
    pub samples: Option<u64>,
    /// Master seed (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads, or "auto".
    #[arg(long)]
    pub workers: Option<String>,
    /// CR peak transmit power P, or comma-separated per-user powers.
    #[arg(long)]
    pub power: Option<String>,
    /// CR base-station peak power J.
    #[arg(long = "bs-power")]
    pub bs_power: Option<f64>,
    /// PR transmit power Q.
    #[arg(long = "pr-power")]
    pub pr_power: Option<f64>,
    /// Peak interference power allowed at the PR receiver.
    #[arg(long = "interference-limit")]
    pub interference_limit: Option<f64>,
    /// Quantity to estimate (custom preset only): throughput, normalized-throughput,
    /// mdg-ratio, mdg-kappa, asymptotic-ratio.
    #[arg(long)]
    pub quantity: Option<String>,
    /// Output file (default `<preset>.csv` or `<preset>.json`).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    /// Flat `key = value` file mirroring these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

const CONFIG_KEYS: [&str; 13] = [
    "preset",
    "network",
    "users",
    "samples",
    "seed",
    "workers",
    "power",
    "bs-power",
    "pr-power",
    "interference-limit",
    "quantity",
    "output",
    "format",
];

/// Parses a flat config file: one `key = value` per line, `#` comments.
pub fn parse_config_file(text: &str) -> Result<BTreeMap<String, String>, CliError> {
    let mut map = BTreeMap::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Validation(format!("config line {}: expected 'key = value'", lineno + 1)))?;
        let key = key.trim().trim_start_matches("--").replace('_', "-");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(CliError::Validation(format!(
                "config line {}: unknown key '{key}'",
                lineno + 1
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn read_config(path: &Path) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read config file {}: {e}", path.display())))?;
    parse_config_file(&text)
}

fn parse_list<T: FromStr>(what: &str, s: &str) -> Result<Vec<T>, CliError>
where
    T::Err: fmt::Display,
{
    s.split(',')
        .map(|x| x.trim())
        .filter(|x| !x.is_empty())
        .map(|x| {
            x.parse::<T>()
                .map_err(|e| CliError::Validation(format!("--{what}: cannot parse '{x}': {e}")))
        })
        .collect()
}

fn parse_one<T: FromStr>(what: &str, s: &str) -> Result<T, CliError>
where
    T::Err: fmt::Display,
{
    s.trim()
        .parse::<T>()
        .map_err(|e| CliError::Validation(format!("--{what}: cannot parse '{s}': {e}")))
}

fn positive(what: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(CliError::Validation(format!(
            "--{what} must be positive and finite, got {v}"
        )))
    }
}

/// Merges flags over the config file over preset defaults and checks the result.
pub fn validate_spec(raw: &RawFlags) -> Result<ExperimentSpec, CliError> {
    let file = match &raw.config {
        Some(path) => read_config(path)?,
        None => BTreeMap::new(),
    };
    let from_file = |key: &str| file.get(key).map(String::as_str);

    let preset = match (raw.preset, from_file("preset")) {
        (Some(p), _) => p,
        (None, Some(s)) => {
            Preset::from_str(s, true).map_err(|_| CliError::Validation(format!("config: unknown preset '{s}'")))?
        }
        (None, None) => Preset::Custom,
    };

    let networks = if !raw.networks.is_empty() {
        raw.networks
            .iter()
            .map(|s| parse_one::<NetworkKind>("network", s))
            .collect::<Result<Vec<_>, _>>()?
    } else if let Some(s) = from_file("network") {
        parse_list::<NetworkKind>("network", s)?
    } else {
        preset.default_networks()
    };
    let mut seen = Vec::new();
    for n in &networks {
        if seen.contains(n) {
            return Err(CliError::Validation(format!("--network {n} given twice")));
        }
        seen.push(*n);
    }

    let users_flag = raw.users.as_deref().or(from_file("users"));
    let users = match (users_flag, preset.default_users()) {
        (Some(s), _) => parse_list::<usize>("users", s)?,
        (None, Some(d)) => d,
        (None, None) => return Err(CliError::Validation("--users is required with --preset custom".into())),
    };
    if users.is_empty() {
        return Err(CliError::Validation("--users must list at least one user count".into()));
    }
    if users.contains(&0) {
        return Err(CliError::Validation("--users: every K must be at least 1".into()));
    }
    if users.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Validation("--users must be strictly ascending".into()));
    }
    match preset {
        Preset::Fig1 if users.iter().any(|&k| k > 100) => {
            return Err(CliError::Validation(
                "--preset fig1 conflicts with --users: fig1 covers 1 <= K <= 100".into(),
            ))
        }
        Preset::Fig2 if users.iter().any(|k| !FIG2_USERS.contains(k)) => {
            return Err(CliError::Validation(
                "--preset fig2 conflicts with --users: fig2 takes K from {1000, 10000, 100000, 1000000}".into(),
            ))
        }
        _ => {}
    }

    let quantity_flag = raw.quantity.as_deref().or(from_file("quantity"));
    let quantity = match (preset.quantity(), quantity_flag) {
        (Some(_), Some(_)) => {
            return Err(CliError::Validation(format!(
                "--preset {preset} conflicts with --quantity: the preset fixes its quantity"
            )))
        }
        (Some(q), None) => q,
        (None, Some(s)) => parse_one::<Quantity>("quantity", s)?,
        (None, None) => Quantity::Throughput,
    };
    if quantity == Quantity::AsymptoticRatio && users[0] < 3 {
        return Err(CliError::Validation(
            "--quantity asymptotic-ratio needs every K >= 3".into(),
        ));
    }

    let n_samples = match (raw.samples, from_file("samples")) {
        (Some(n), _) => n,
        (None, Some(s)) => parse_one("samples", s)?,
        (None, None) => preset.default_samples(),
    };
    if n_samples < 2 {
        return Err(CliError::Validation("--samples must be at least 2".into()));
    }
    let seed = match (raw.seed, from_file("seed")) {
        (Some(s), _) => s,
        (None, Some(s)) => parse_one("seed", s)?,
        (None, None) => 0,
    };
    let workers = match raw.workers.as_deref().or(from_file("workers")) {
        Some(s) => s.parse::<Workers>().map_err(CliError::Validation)?,
        None => Workers::Auto,
    };

    let mut powers = Powers::default();
    if let Some(s) = raw.power.as_deref().or(from_file("power")) {
        powers.per_user = parse_list::<f64>("power", s)?;
        if powers.per_user.is_empty() {
            return Err(CliError::Validation("--power is empty".into()));
        }
    }
    for p in &powers.per_user {
        positive("power", *p)?;
    }
    let max_k = *users.last().expect("nonempty");
    if powers.per_user.len() > 1 && powers.per_user.len() < max_k {
        return Err(CliError::Validation(format!(
            "--power lists {} per-user powers but --users reaches K = {max_k}",
            powers.per_user.len()
        )));
    }
    if powers.per_user.len() > 1 {
        powers.per_user.truncate(max_k);
    }
    let mdg = matches!(quantity, Quantity::MdgRatio | Quantity::MdgKappa);
    if mdg && !powers.is_symmetric() {
        return Err(CliError::Validation(format!(
            "--power lists unequal per-user powers, but {quantity} is defined for symmetric networks only"
        )));
    }
    let float = |flag: Option<f64>, key: &str| -> Result<f64, CliError> {
        let v = match (flag, from_file(key)) {
            (Some(v), _) => v,
            (None, Some(s)) => parse_one(key, s)?,
            (None, None) => 1.0,
        };
        positive(key, v)
    };
    powers.bs = float(raw.bs_power, "bs-power")?;
    powers.pr = float(raw.pr_power, "pr-power")?;
    powers.interference_limit = float(raw.interference_limit, "interference-limit")?;

    let output_format = match (raw.format, from_file("format")) {
        (Some(f), _) => f,
        (None, Some(s)) => OutputFormat::from_str(s, true)
            .map_err(|_| CliError::Validation(format!("config: unknown format '{s}'")))?,
        (None, None) => OutputFormat::Csv,
    };
    let output_path = match (&raw.output, from_file("output")) {
        (Some(p), _) => p.clone(),
        (None, Some(s)) => PathBuf::from(s),
        (None, None) => {
            let ext = match output_format {
                OutputFormat::Csv => "csv",
                OutputFormat::Json => "json",
            };
            PathBuf::from(format!("{preset}.{ext}"))
        }
    };

    Ok(ExperimentSpec {
        preset,
        quantity,
        networks,
        users,
        n_samples,
        seed,
        workers,
        powers,
        output_path,
        output_format,
    })
}

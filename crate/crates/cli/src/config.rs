//! Flat `key = value` configuration and its resolution into a run manifest.
//!
//! Keys are the long flag names (`list-length`, `hamming-budget`, ...);
//! underscores are accepted and normalized to dashes. Values given on the
//! command line replace values from the file.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{anyhow, bail, ensure, Context, Result};
use cosra::{Algorithm, ExperimentConfig, FormatSpec};

pub type Settings = BTreeMap<String, String>;

pub const KEYS: [&str; 15] = [
    "data",
    "format",
    "threshold",
    "folds",
    "realizations",
    "list-length",
    "seed",
    "algorithms",
    "eta1",
    "eta2",
    "out",
    "workers",
    "hamming-budget",
    "lengths",
    "fold",
];

fn normalize_key(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('_', "-")
}

/// Parses a config file body. `#` starts a comment line; values may be
/// wrapped in double quotes.
pub fn parse_config(text: &str) -> Result<Settings> {
    let mut settings = Settings::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("config line {}: expected `key = value`", idx + 1))?;
        let key = normalize_key(key);
        ensure!(
            KEYS.contains(&key.as_str()),
            "config line {}: unknown key `{key}`",
            idx + 1
        );
        let mut value = value.trim();
        if value.len() >= 2 && value.starts_with('"') && value.ends_with('"') {
            value = &value[1..value.len() - 1];
        }
        if settings.insert(key.clone(), value.to_string()).is_some() {
            bail!("config line {}: duplicate key `{key}`", idx + 1);
        }
    }
    Ok(settings)
}

/// `a:b:step` (inclusive of both ends) or a single number.
pub fn parse_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let num = |s: &str| -> Result<f64> {
        let v: f64 = s.parse().with_context(|| format!("`{s}` is not a number"))?;
        ensure!(v.is_finite(), "`{s}` is not finite");
        Ok(v)
    };
    match parts.as_slice() {
        [single] => Ok(vec![num(single)?]),
        [start, end, step] => {
            let (start, end, step) = (num(start)?, num(end)?, num(step)?);
            ensure!(step > 0.0, "range step must be positive, got {step}");
            ensure!(end >= start, "range end {end} is below start {start}");
            let steps = ((end - start) / step + 1e-9).floor();
            ensure!(steps < 1e5, "range {spec} has too many points");
            let points: Vec<f64> = (0..=steps as usize).map(|i| start + i as f64 * step).collect();
            ensure!(
                points.windows(2).all(|w| w[0] < w[1]),
                "range {spec} has a step below floating-point resolution"
            );
            Ok(points)
        }
        _ => bail!("expected `start:end:step` or a single value, got `{spec}`"),
    }
}

/// Comma-separated algorithm tags; commas inside `CosRA*(a,b)` are kept.
pub fn parse_algorithms(spec: &str) -> Result<Vec<Algorithm>> {
    let mut items = Vec::new();
    let mut depth = 0usize;
    let mut start = 0;
    for (i, c) in spec.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth = depth.checked_sub(1).ok_or_else(|| anyhow!("unbalanced `)` in `{spec}`"))?,
            ',' if depth == 0 => {
                items.push(&spec[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    ensure!(depth == 0, "unbalanced `(` in `{spec}`");
    items.push(&spec[start..]);
    let algorithms = items
        .into_iter()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Algorithm>().map_err(anyhow::Error::from))
        .collect::<Result<Vec<_>>>()?;
    ensure!(!algorithms.is_empty(), "no algorithms in `{spec}`");
    Ok(algorithms)
}

fn parse_lengths(spec: &str) -> Result<Vec<usize>> {
    let lengths = spec
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<usize>().with_context(|| format!("`{s}` is not a length")))
        .collect::<Result<Vec<_>>>()?;
    ensure!(!lengths.is_empty() && lengths.iter().all(|&l| l >= 1), "lengths must be >= 1");
    Ok(lengths)
}

fn algorithm_list(algorithms: &[Algorithm]) -> String {
    algorithms.iter().map(Algorithm::to_string).collect::<Vec<_>>().join(",")
}

fn grid_string(grid: &[f64]) -> String {
    grid.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

/// Quotes values that [`parse_config`] would otherwise trim or unquote.
fn quote_if_needed(value: &str) -> String {
    let quoted = value.len() >= 2 && value.starts_with('"') && value.ends_with('"');
    if quoted || value.trim() != value {
        format!("\"{value}\"")
    } else {
        value.to_string()
    }
}

/// Everything a command needs, validated before any compute starts.
#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub data: PathBuf,
    pub format: FormatSpec,
    pub threshold: f64,
    pub experiment: ExperimentConfig,
    pub eta1: Vec<f64>,
    pub eta2: Vec<f64>,
    pub lengths: Vec<usize>,
    pub fold: usize,
    pub out: PathBuf,
    pub workers: usize,
}

fn default_workers() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

impl Manifest {
    pub fn from_settings(settings: &Settings) -> Result<Self> {
        let get = |key: &str| settings.get(key).map(String::as_str);
        let parse_num = |key: &str, default: u64| -> Result<u64> {
            get(key).map_or(Ok(default), |v| {
                v.parse::<u64>()
                    .with_context(|| format!("{key}: `{v}` is not a nonnegative integer"))
            })
        };

        let data = PathBuf::from(get("data").ok_or_else(|| anyhow!("missing required setting `data`"))?);
        let format: FormatSpec = get("format").unwrap_or("movielens").parse()?;
        let threshold = match get("threshold") {
            Some(v) => v
                .parse::<f64>()
                .with_context(|| format!("threshold: `{v}` is not a number"))?,
            None => 3.0,
        };
        format.check_threshold(threshold)?;

        let length = parse_num("list-length", 50)? as usize;
        let experiment = ExperimentConfig {
            k_folds: parse_num("folds", 10)? as usize,
            realizations: parse_num("realizations", 10)? as usize,
            length,
            seed: parse_num("seed", 0)?,
            algorithms: match get("algorithms") {
                Some(spec) => parse_algorithms(spec)?,
                None => Algorithm::BENCHMARK.to_vec(),
            },
            hamming_pair_budget: match get("hamming-budget") {
                None | Some("exact") => None,
                Some(v) => Some(v.parse::<usize>().with_context(|| format!("hamming-budget: `{v}`"))?),
            },
        };
        experiment.validate()?;

        let grid = |key: &str| -> Result<Vec<f64>> {
            let spec = get(key).unwrap_or("-2:2:0.25");
            // a comma list concatenates values and ranges
            let mut grid = Vec::new();
            for part in spec.split(',') {
                grid.extend(parse_range(part).with_context(|| key.to_string())?);
            }
            Ok(grid)
        };
        let workers = parse_num("workers", default_workers() as u64)? as usize;
        ensure!(workers >= 1, "workers must be >= 1");
        let fold = parse_num("fold", 0)? as usize;
        ensure!(fold < experiment.k_folds, "fold {fold} out of range for {} folds", experiment.k_folds);

        Ok(Manifest {
            data,
            format,
            threshold,
            eta1: grid("eta1")?,
            eta2: grid("eta2")?,
            lengths: match get("lengths") {
                Some(spec) => parse_lengths(spec)?,
                None => vec![length],
            },
            fold,
            out: PathBuf::from(get("out").unwrap_or(".")),
            workers,
            experiment,
        })
    }

    /// Resolved settings, in a form [`parse_config`] reads back.
    pub fn to_settings(&self) -> Settings {
        let cfg = &self.experiment;
        let mut s = Settings::new();
        let mut put = |k: &str, v: String| {
            s.insert(k.to_string(), v);
        };
        put("data", self.data.display().to_string());
        put("format", self.format.to_string());
        put("threshold", self.threshold.to_string());
        put("folds", cfg.k_folds.to_string());
        put("realizations", cfg.realizations.to_string());
        put("list-length", cfg.length.to_string());
        put("seed", cfg.seed.to_string());
        put("algorithms", algorithm_list(&cfg.algorithms));
        put("eta1", grid_string(&self.eta1));
        put("eta2", grid_string(&self.eta2));
        put("out", self.out.display().to_string());
        put("workers", self.workers.to_string());
        put(
            "hamming-budget",
            cfg.hamming_pair_budget.map_or("exact".to_string(), |b| b.to_string()),
        );
        put(
            "lengths",
            self.lengths.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
        );
        put("fold", self.fold.to_string());
        s
    }

    pub fn echo(&self) -> String {
        let mut text = format!("# cosra {}\n", cosra::xval::CODE_VERSION);
        for (k, v) in self.to_settings() {
            text.push_str(&format!("{k} = {}\n", quote_if_needed(&v)));
        }
        text
    }
}

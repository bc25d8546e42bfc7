use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use clap::Args;

/// Flags shared by every subcommand. Values are kept as text so that they
/// can be merged with a `key=value` config file before parsing.
#[derive(Args, Debug, Clone, Default)]
pub struct Flags {
    /// Anisotropy: a value, a comma list, or lo:hi:step.
    #[arg(long)]
    pub gamma: Option<String>,
    /// Coupling grid lo:hi:step.
    #[arg(long)]
    pub lambda: Option<String>,
    /// Temperature: a value, a comma list, or lo:hi:step.
    #[arg(long = "T", visible_alias = "temperature")]
    pub temperature: Option<String>,
    /// Site separation: a value, a comma list, or lo:hi.
    #[arg(long)]
    pub r: Option<String>,
    /// Ring size for finite-chain commands (at most 12).
    #[arg(long)]
    pub n: Option<String>,
    /// Number of energy levels reported by finite-spectrum.
    #[arg(long)]
    pub levels: Option<String>,
    /// Upper end of the crossing scan.
    #[arg(long = "lambda-max")]
    pub lambda_max: Option<String>,
    /// Figure number for reproduce-figure.
    #[arg(long)]
    pub figure: Option<String>,
    /// Output file, or directory for reproduce-figure. Standard output if absent.
    #[arg(long)]
    pub output: Option<String>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
    /// key=value file; flags given on the command line take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn err<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    Correlators,
    DiscordSweep,
    EofSweep,
    FiniteSpectrum,
    Crossings,
    EtcpFit,
    FidelityCompare,
    ReproduceFigure,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Correlators => "correlators",
            CommandKind::DiscordSweep => "discord-sweep",
            CommandKind::EofSweep => "eof-sweep",
            CommandKind::FiniteSpectrum => "finite-spectrum",
            CommandKind::Crossings => "crossings",
            CommandKind::EtcpFit => "etcp-fit",
            CommandKind::FidelityCompare => "fidelity-compare",
            CommandKind::ReproduceFigure => "reproduce-figure",
        }
    }

    fn needs_ring(&self) -> bool {
        matches!(
            self,
            CommandKind::FiniteSpectrum | CommandKind::Crossings | CommandKind::FidelityCompare
        )
    }
}

/// Fully parsed and validated run parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub gammas: Vec<f64>,
    pub lambdas: Vec<f64>,
    pub temperatures: Vec<f64>,
    pub rs: Vec<usize>,
    pub n: Option<usize>,
    pub levels: usize,
    pub lambda_max: Option<f64>,
    pub figure: Option<u32>,
    pub output: Option<PathBuf>,
    pub format: Format,
}

const KEYS: [&str; 10] = [
    "gamma", "lambda", "T", "r", "n", "levels", "lambda-max", "figure", "output", "format",
];

/// Parses `key=value` lines. Blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (no, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return err(format!("config line {}: expected key=value", no + 1));
        };
        let k = match k.trim() {
            "temperature" => "T",
            "lambda_max" => "lambda-max",
            other => other,
        };
        if !KEYS.contains(&k) {
            return err(format!("config line {}: unknown key `{k}`", no + 1));
        }
        map.insert(k.to_string(), v.trim().to_string());
    }
    Ok(map)
}

fn load_config(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_text(&text)
}

fn parse_f64(key: &str, s: &str) -> Result<f64, ConfigError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => err(format!("--{key}: `{s}` is not a finite number")),
    }
}

fn parse_usize(key: &str, s: &str) -> Result<usize, ConfigError> {
    s.trim()
        .parse::<usize>()
        .map_err(|_| ConfigError(format!("--{key}: `{s}` is not a non-negative integer")))
}

/// `lo:hi:step`, inclusive of `hi` within half a step.
pub fn parse_range(key: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return err(format!("--{key}: expected lo:hi:step, got `{s}`"));
    }
    let (lo, hi, step) = (parse_f64(key, parts[0])?, parse_f64(key, parts[1])?, parse_f64(key, parts[2])?);
    if step <= 0.0 {
        return err(format!("--{key}: step must be positive"));
    }
    if hi < lo {
        return err(format!("--{key}: empty range {lo}..{hi}"));
    }
    Ok(xychain::analysis::lambda_grid(lo, hi, step))
}

/// A single value, a comma list, or `lo:hi:step`.
pub fn parse_real_list(key: &str, s: &str) -> Result<Vec<f64>, ConfigError> {
    let v = if s.contains(':') {
        parse_range(key, s)?
    } else {
        s.split(',').map(|x| parse_f64(key, x)).collect::<Result<Vec<_>, _>>()?
    };
    if v.is_empty() {
        return err(format!("--{key}: empty list"));
    }
    Ok(v)
}

/// A single value, a comma list, or `lo:hi` (inclusive).
pub fn parse_int_list(key: &str, s: &str) -> Result<Vec<usize>, ConfigError> {
    let v: Vec<usize> = if let Some((a, b)) = s.split_once(':') {
        let (a, b) = (parse_usize(key, a)?, parse_usize(key, b)?);
        if b < a {
            return err(format!("--{key}: empty range {a}:{b}"));
        }
        (a..=b).collect()
    } else {
        s.split(',').map(|x| parse_usize(key, x)).collect::<Result<_, _>>()?
    };
    if v.is_empty() {
        return err(format!("--{key}: empty list"));
    }
    Ok(v)
}

impl RunConfig {
    /// Merges the config file (if any) under the flags and validates.
    pub fn from_flags(command: CommandKind, flags: &Flags) -> Result<Self, ConfigError> {
        let mut map = match &flags.config {
            Some(p) => load_config(p)?,
            None => BTreeMap::new(),
        };
        let given = [
            ("gamma", &flags.gamma),
            ("lambda", &flags.lambda),
            ("T", &flags.temperature),
            ("r", &flags.r),
            ("n", &flags.n),
            ("levels", &flags.levels),
            ("lambda-max", &flags.lambda_max),
            ("figure", &flags.figure),
            ("output", &flags.output),
            ("format", &flags.format),
        ];
        for (k, v) in given {
            if let Some(v) = v {
                map.insert(k.to_string(), v.clone());
            }
        }
        Self::from_map(command, &map)
    }

    pub fn from_map(command: CommandKind, map: &BTreeMap<String, String>) -> Result<Self, ConfigError> {
        let get = |k: &str| map.get(k).map(String::as_str);
        let gammas = parse_real_list("gamma", get("gamma").unwrap_or("0.5"))?;
        if let Some(g) = gammas.iter().find(|g| !(0.0..=1.0).contains(*g)) {
            return err(format!("--gamma: {g} is outside [0, 1]"));
        }
        let lambdas = parse_range("lambda", get("lambda").unwrap_or("0:3:0.01"))?;
        if let Some(l) = lambdas.iter().find(|l| **l < 0.0) {
            return err(format!("--lambda: {l} is negative"));
        }
        let default_t = if command == CommandKind::EtcpFit { "0.05:0.5:0.05" } else { "0" };
        let temperatures = parse_real_list("T", get("T").unwrap_or(default_t))?;
        if let Some(t) = temperatures.iter().find(|t| **t < 0.0) {
            return err(format!("--T: {t} is negative"));
        }
        let default_r = if command == CommandKind::EtcpFit { "15" } else { "1" };
        let rs = parse_int_list("r", get("r").unwrap_or(default_r))?;
        if rs.contains(&0) {
            return err("--r: separations start at 1");
        }
        let n = get("n").map(|s| parse_usize("n", s)).transpose()?;
        if let Some(n) = n {
            if !(2..=xychain::finite::MAX_SPINS).contains(&n) {
                return err(format!("--n: {n} is outside 2..={}", xychain::finite::MAX_SPINS));
            }
        } else if command.needs_ring() {
            return err(format!("{} requires --n", command.name()));
        }
        if let Some(n) = n {
            let uses_pairs = matches!(
                command,
                CommandKind::FidelityCompare | CommandKind::DiscordSweep | CommandKind::EofSweep
            );
            if let Some(r) = rs.iter().find(|&&r| uses_pairs && r > n / 2) {
                return err(format!("--r: {r} exceeds n/2 = {}", n / 2));
            }
        }
        let levels = get("levels").map(|s| parse_usize("levels", s)).transpose()?.unwrap_or(4);
        if levels == 0 {
            return err("--levels must be positive");
        }
        let lambda_max = get("lambda-max").map(|s| parse_f64("lambda-max", s)).transpose()?;
        if let Some(m) = lambda_max {
            if m <= 0.0 {
                return err("--lambda-max must be positive");
            }
        }
        let figure = get("figure")
            .map(|s| s.trim().parse::<u32>().map_err(|_| ConfigError(format!("--figure: `{s}` is not a figure number"))))
            .transpose()?;
        if command == CommandKind::ReproduceFigure && figure.is_none() {
            return err("reproduce-figure requires --figure");
        }
        let format = match get("format").unwrap_or("csv") {
            "csv" => Format::Csv,
            "json" => Format::Json,
            other => return err(format!("--format: expected csv or json, got `{other}`")),
        };
        Ok(Self {
            command,
            gammas,
            lambdas,
            temperatures,
            rs,
            n,
            levels,
            lambda_max,
            figure,
            output: get("output").map(PathBuf::from),
            format,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lists_and_ranges() {
        assert_eq!(parse_real_list("T", "0,0.5").unwrap(), vec![0.0, 0.5]);
        assert_eq!(parse_real_list("T", "0:0.2:0.1").unwrap().len(), 3);
        assert_eq!(parse_int_list("r", "2:5").unwrap(), vec![2, 3, 4, 5]);
        assert_eq!(parse_int_list("r", "1,15").unwrap(), vec![1, 15]);
        assert!(parse_range("lambda", "0:3:0").is_err());
        assert!(parse_range("lambda", "3:0:0.1").is_err());
        assert!(parse_range("lambda", "0:3").is_err());
        assert!(parse_real_list("gamma", "x").is_err());
    }

    #[test]
    fn config_text() {
        let m = parse_config_text("# sweep\ngamma = 0.3\n\ntemperature=0.1\n").unwrap();
        assert_eq!(m["gamma"], "0.3");
        assert_eq!(m["T"], "0.1");
        assert!(parse_config_text("nope").is_err());
        assert!(parse_config_text("colour=red").is_err());
    }

    #[test]
    fn flags_override_file() {
        let dir = std::env::temp_dir().join(format!("xychain-cfg-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.cfg");
        std::fs::write(&path, "gamma=0.3\nr=2\n").unwrap();
        let flags = Flags {
            gamma: Some("0.7".into()),
            config: Some(path),
            ..Flags::default()
        };
        let cfg = RunConfig::from_flags(CommandKind::DiscordSweep, &flags).unwrap();
        assert_eq!(cfg.gammas, vec![0.7]);
        assert_eq!(cfg.rs, vec![2]);
        std::fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn validation() {
        let m = |pairs: &[(&str, &str)]| pairs.iter().map(|(k, v)| (k.to_string(), v.to_string())).collect();
        assert!(RunConfig::from_map(CommandKind::Crossings, &m(&[])).is_err());
        assert!(RunConfig::from_map(CommandKind::Crossings, &m(&[("n", "13")])).is_err());
        assert!(RunConfig::from_map(CommandKind::FidelityCompare, &m(&[("n", "6"), ("r", "4")])).is_err());
        assert!(RunConfig::from_map(CommandKind::DiscordSweep, &m(&[("gamma", "1.5")])).is_err());
        assert!(RunConfig::from_map(CommandKind::DiscordSweep, &m(&[("format", "xml")])).is_err());
        assert!(RunConfig::from_map(CommandKind::ReproduceFigure, &m(&[])).is_err());
        let etcp = RunConfig::from_map(CommandKind::EtcpFit, &m(&[])).unwrap();
        assert_eq!(etcp.temperatures.len(), 10);
        assert_eq!(etcp.rs, vec![15]);
    }
}

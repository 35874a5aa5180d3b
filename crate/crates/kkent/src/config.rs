//! Run configuration files (TOML).
//!
//! ```toml
//! mode = "sweep"            # "point" | "sweep" | "extrapolate"
//! cut = "diagonal"          # "diagonal" | "antidiagonal" | "explicit_list"
//! lo = -1.0                 # default -1
//! hi = 1.0                  # default 1
//! points = 41               # default 41
//! k_coupling = -1.0         # required for point and sweep
//! temperatures = [0.001, 0.05, 0.1, 0.15]
//! n_sites_list = [6]        # default [6]
//! field_spin = { magnitude = 1.0, pattern = "staggered" }
//! ```
//!
//! Point runs take `n_sites`, `j_spin`, `i_pseudo` (both default 0),
//! `k_coupling` and a single `temperature`. Explicit-list sweeps replace the
//! range keys by `explicit_points = [[J, I], ...]`. Extrapolation runs only take
//! `input`, the path of an earlier sweep CSV.
//!
//! Shared keys: `output`, `format` (`"csv"` or `"json"`), `workers` (default 1),
//! `observables` (default false), `cache_dir` and `max_sites` (default 7).
//! Unknown keys, and keys that do not belong to the selected mode, are errors.

use std::path::PathBuf;

use kkent_core::model::DEFAULT_MAX_SITES;
use kkent_core::{Cut, FieldPattern, FieldSpec, GridRange, ModelParams, SiteCap, SweepSpec};
use toml::{Table, Value};

use crate::error::ConfigError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Point,
    Sweep,
    Extrapolate,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Point => "point",
            Mode::Sweep => "sweep",
            Mode::Extrapolate => "extrapolate",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "csv" => Some(OutputFormat::Csv),
            "json" => Some(OutputFormat::Json),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Job {
    Point { params: ModelParams, temperature: f64 },
    Sweep(SweepSpec),
    Extrapolate { input: PathBuf },
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub job: Job,
    pub output_path: Option<PathBuf>,
    pub output_format: OutputFormat,
    pub worker_budget: usize,
    pub include_observables: bool,
    pub cache_dir: Option<PathBuf>,
    pub site_cap: SiteCap,
}

impl RunConfig {
    pub fn mode(&self) -> Mode {
        match self.job {
            Job::Point { .. } => Mode::Point,
            Job::Sweep(_) => Mode::Sweep,
            Job::Extrapolate { .. } => Mode::Extrapolate,
        }
    }
}

const COMMON_KEYS: &[&str] = &[
    "mode",
    "output",
    "format",
    "workers",
    "observables",
    "cache_dir",
    "max_sites",
];
const POINT_KEYS: &[&str] = &[
    "n_sites",
    "j_spin",
    "i_pseudo",
    "k_coupling",
    "temperature",
    "field_spin",
    "field_pseudo",
];
const SWEEP_KEYS: &[&str] = &[
    "cut",
    "lo",
    "hi",
    "points",
    "explicit_points",
    "k_coupling",
    "temperatures",
    "n_sites_list",
    "field_spin",
    "field_pseudo",
];
const EXTRAPOLATE_KEYS: &[&str] = &["mode", "output", "format", "input"];

const ALL_KEYS: &[&[&str]] = &[COMMON_KEYS, POINT_KEYS, SWEEP_KEYS, EXTRAPOLATE_KEYS];

struct Doc {
    table: Table,
}

impl Doc {
    fn get(&self, key: &str) -> Option<&Value> {
        self.table.get(key)
    }

    fn f64(&self, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(key).map(|v| as_f64(v, key)).transpose()
    }

    fn required_f64(&self, key: &'static str, expected: &'static str) -> Result<f64, ConfigError> {
        self.f64(key)?.ok_or(ConfigError::Missing { key, expected })
    }

    fn usize(&self, key: &str) -> Result<Option<usize>, ConfigError> {
        self.get(key).map(|v| as_usize(v, key)).transpose()
    }

    fn bool(&self, key: &str) -> Result<Option<bool>, ConfigError> {
        self.get(key)
            .map(|v| v.as_bool().ok_or_else(|| invalid(key, "a boolean")))
            .transpose()
    }

    fn str(&self, key: &str) -> Result<Option<&str>, ConfigError> {
        self.get(key)
            .map(|v| v.as_str().ok_or_else(|| invalid(key, "a string")))
            .transpose()
    }

    fn field(&self, key: &str) -> Result<FieldSpec, ConfigError> {
        let Some(value) = self.get(key) else {
            return Ok(FieldSpec::OFF);
        };
        let expected = "a table { magnitude = <number>, pattern = \"uniform\" | \"staggered\" | \"off\" }";
        let table = value.as_table().ok_or_else(|| invalid(key, expected))?;
        for k in table.keys() {
            if k != "magnitude" && k != "pattern" {
                return Err(ConfigError::UnknownKey {
                    key: format!("{key}.{k}"),
                });
            }
        }
        let pattern_key = format!("{key}.pattern");
        let pattern = table
            .get("pattern")
            .and_then(Value::as_str)
            .and_then(FieldPattern::parse)
            .ok_or_else(|| invalid(&pattern_key, "one of \"uniform\", \"staggered\", \"off\""))?;
        let magnitude_key = format!("{key}.magnitude");
        let magnitude = match table.get("magnitude") {
            Some(v) => as_f64(v, &magnitude_key)?,
            None if pattern == FieldPattern::Off => 0.0,
            None => return Err(invalid(&magnitude_key, "a finite number")),
        };
        Ok(FieldSpec { magnitude, pattern })
    }
}

fn invalid(key: &str, expected: &str) -> ConfigError {
    ConfigError::Invalid {
        key: key.to_string(),
        expected: expected.to_string(),
    }
}

fn as_f64(v: &Value, key: &str) -> Result<f64, ConfigError> {
    let x = match v {
        Value::Float(f) => *f,
        Value::Integer(i) => *i as f64,
        _ => return Err(invalid(key, "a finite number")),
    };
    if x.is_finite() {
        Ok(x)
    } else {
        Err(invalid(key, "a finite number"))
    }
}

fn as_usize(v: &Value, key: &str) -> Result<usize, ConfigError> {
    v.as_integer()
        .and_then(|i| usize::try_from(i).ok())
        .ok_or_else(|| invalid(key, "a non-negative integer"))
}

fn f64_list(v: &Value, key: &str) -> Result<Vec<f64>, ConfigError> {
    v.as_array()
        .ok_or_else(|| invalid(key, "an array of numbers"))?
        .iter()
        .map(|x| as_f64(x, key))
        .collect()
}

/// Parses and validates a configuration document.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    parse_config_with_cap(text, None)
}

/// Like [`parse_config`], with `max_sites_override` taking precedence over the
/// document's `max_sites` key.
pub fn parse_config_with_cap(text: &str, max_sites_override: Option<usize>) -> Result<RunConfig, ConfigError> {
    let table: Table = text
        .parse()
        .map_err(|e: toml::de::Error| ConfigError::Malformed(e.to_string()))?;
    let doc = Doc { table };

    for key in doc.table.keys() {
        if !ALL_KEYS.iter().any(|group| group.contains(&key.as_str())) {
            return Err(ConfigError::UnknownKey { key: key.clone() });
        }
    }

    let mode = match doc.str("mode")? {
        Some("point") => Mode::Point,
        Some("sweep") => Mode::Sweep,
        Some("extrapolate") => Mode::Extrapolate,
        Some(_) => return Err(invalid("mode", "one of \"point\", \"sweep\", \"extrapolate\"")),
        None => {
            return Err(ConfigError::Missing {
                key: "mode",
                expected: "one of \"point\", \"sweep\", \"extrapolate\"",
            })
        }
    };
    let allowed: Vec<&str> = match mode {
        Mode::Point => [COMMON_KEYS, POINT_KEYS].concat(),
        Mode::Sweep => [COMMON_KEYS, SWEEP_KEYS].concat(),
        Mode::Extrapolate => EXTRAPOLATE_KEYS.to_vec(),
    };
    for key in doc.table.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(ConfigError::NotForMode {
                key: key.clone(),
                mode: mode.as_str(),
            });
        }
    }

    let output_path = doc.str("output")?.map(PathBuf::from);
    let output_format = match doc.str("format")? {
        None => OutputFormat::Csv,
        Some(s) => OutputFormat::parse(s).ok_or_else(|| invalid("format", "\"csv\" or \"json\""))?,
    };
    let worker_budget = doc.usize("workers")?.unwrap_or(1);
    if worker_budget == 0 {
        return Err(invalid("workers", "an integer >= 1"));
    }
    let include_observables = doc.bool("observables")?.unwrap_or(false);
    let cache_dir = doc.str("cache_dir")?.map(PathBuf::from);
    let max_sites = match max_sites_override {
        Some(n) => n,
        None => doc.usize("max_sites")?.unwrap_or(DEFAULT_MAX_SITES),
    };
    let site_cap = SiteCap::new(max_sites).map_err(|e| invalid("max_sites", &e.to_string()))?;

    let job = match mode {
        Mode::Point => point_job(&doc, site_cap)?,
        Mode::Sweep => sweep_job(&doc, site_cap, include_observables)?,
        Mode::Extrapolate => Job::Extrapolate {
            input: doc.str("input")?.map(PathBuf::from).ok_or(ConfigError::Missing {
                key: "input",
                expected: "path of a sweep CSV file",
            })?,
        },
    };

    Ok(RunConfig {
        job,
        output_path,
        output_format,
        worker_budget,
        include_observables,
        cache_dir,
        site_cap,
    })
}

fn check_n_sites(key: &str, n: usize, cap: SiteCap) -> Result<(), ConfigError> {
    if n == 0 || n > cap.max_sites() {
        return Err(invalid(key, &format!("an integer in 1..={}", cap.max_sites())));
    }
    Ok(())
}

fn point_job(doc: &Doc, cap: SiteCap) -> Result<Job, ConfigError> {
    let n_sites = doc.usize("n_sites")?.ok_or(ConfigError::Missing {
        key: "n_sites",
        expected: "the chain length",
    })?;
    check_n_sites("n_sites", n_sites, cap)?;
    let params = ModelParams::new(n_sites)
        .with_couplings(
            doc.f64("j_spin")?.unwrap_or(0.0),
            doc.f64("i_pseudo")?.unwrap_or(0.0),
            doc.required_f64("k_coupling", "the biquadratic coupling K")?,
        )
        .with_fields(doc.field("field_spin")?, doc.field("field_pseudo")?);
    let temperature = doc.required_f64("temperature", "a temperature >= 0")?;
    if temperature < 0.0 {
        return Err(invalid("temperature", "a temperature >= 0"));
    }
    Ok(Job::Point { params, temperature })
}

fn sweep_job(doc: &Doc, cap: SiteCap, observables: bool) -> Result<Job, ConfigError> {
    let cut = match doc.str("cut")? {
        Some("diagonal") => Cut::Diagonal,
        Some("antidiagonal") => Cut::Antidiagonal,
        Some("explicit_list") => {
            let expected = "an array of [J, I] pairs";
            let list = doc
                .get("explicit_points")
                .ok_or(ConfigError::Missing {
                    key: "explicit_points",
                    expected,
                })?
                .as_array()
                .ok_or_else(|| invalid("explicit_points", expected))?;
            let pairs = list
                .iter()
                .map(|pair| match f64_list(pair, "explicit_points")?.as_slice() {
                    [j, i] => Ok((*j, *i)),
                    _ => Err(invalid("explicit_points", expected)),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if pairs.is_empty() {
                return Err(invalid("explicit_points", expected));
            }
            Cut::ExplicitList(pairs)
        }
        Some(_) => {
            return Err(invalid(
                "cut",
                "one of \"diagonal\", \"antidiagonal\", \"explicit_list\"",
            ))
        }
        None => {
            return Err(ConfigError::Missing {
                key: "cut",
                expected: "one of \"diagonal\", \"antidiagonal\", \"explicit_list\"",
            })
        }
    };
    let explicit = matches!(cut, Cut::ExplicitList(_));
    for key in ["lo", "hi", "points"] {
        if explicit && doc.get(key).is_some() {
            return Err(ConfigError::NotForMode {
                key: key.into(),
                mode: "sweep with cut = \"explicit_list\"",
            });
        }
    }
    if !explicit && doc.get("explicit_points").is_some() {
        return Err(ConfigError::NotForMode {
            key: "explicit_points".into(),
            mode: "sweep with a diagonal or antidiagonal cut",
        });
    }

    let defaults = GridRange::default();
    let range = GridRange {
        lo: doc.f64("lo")?.unwrap_or(defaults.lo),
        hi: doc.f64("hi")?.unwrap_or(defaults.hi),
        points: doc.usize("points")?.unwrap_or(defaults.points),
    };
    if !explicit {
        range.validate().map_err(|e| invalid("lo/hi/points", &e.to_string()))?;
    }

    let temperatures = match doc.get("temperatures") {
        Some(v) => f64_list(v, "temperatures")?,
        None => {
            return Err(ConfigError::Missing {
                key: "temperatures",
                expected: "a non-empty array of temperatures >= 0",
            })
        }
    };
    if temperatures.is_empty() || temperatures.iter().any(|t| *t < 0.0) {
        return Err(invalid("temperatures", "a non-empty array of temperatures >= 0"));
    }

    let n_sites_list = match doc.get("n_sites_list") {
        None => vec![6],
        Some(v) => v
            .as_array()
            .ok_or_else(|| invalid("n_sites_list", "an array of chain lengths"))?
            .iter()
            .map(|x| as_usize(x, "n_sites_list"))
            .collect::<Result<Vec<_>, _>>()?,
    };
    if n_sites_list.is_empty() {
        return Err(invalid("n_sites_list", "a non-empty array of chain lengths"));
    }
    for &n in &n_sites_list {
        check_n_sites("n_sites_list", n, cap)?;
    }

    let spec = SweepSpec {
        cut,
        range,
        k_coupling: doc.required_f64("k_coupling", "the biquadratic coupling K")?,
        temperatures,
        n_sites_list,
        field_spin: doc.field("field_spin")?,
        field_pseudo: doc.field("field_pseudo")?,
        observables_enabled: observables,
    };
    spec.validate(cap).map_err(|e| ConfigError::Invalid {
        key: "sweep".into(),
        expected: e.to_string(),
    })?;
    Ok(Job::Sweep(spec))
}

#[cfg(test)]
mod tests {
    use super::*;
    use kkent_core::sweep::REFERENCE_TEMPERATURES;

    #[test]
    fn minimal_point_config_uses_documented_defaults() {
        let cfg = parse_config("mode = \"point\"\nn_sites = 2\nk_coupling = -1\ntemperature = 0.1\n").unwrap();
        let Job::Point { params, temperature } = cfg.job else {
            panic!("expected a point job")
        };
        assert_eq!(params, ModelParams::new(2).with_couplings(0.0, 0.0, -1.0));
        assert_eq!(temperature, 0.1);
        assert_eq!(cfg.worker_budget, 1);
        assert_eq!(cfg.output_format, OutputFormat::Csv);
        assert_eq!(cfg.site_cap, SiteCap::default());
        assert!(!cfg.include_observables);
    }

    #[test]
    fn sweep_defaults_follow_the_reference_grid() {
        let cfg = parse_config(
            "mode = \"sweep\"\ncut = \"diagonal\"\nk_coupling = -1.0\ntemperatures = [0.001, 0.05, 0.1, 0.15]\n",
        )
        .unwrap();
        let Job::Sweep(spec) = cfg.job else { panic!() };
        assert_eq!(spec, SweepSpec::new(Cut::Diagonal, -1.0));
        assert_eq!(spec.temperatures, REFERENCE_TEMPERATURES);
    }

    #[test]
    fn unknown_keys_are_named() {
        let err = parse_config("mode = \"point\"\nn_sites = 2\nk_coupling = 1\ntemperature = 0.1\njj_spin = 1\n")
            .unwrap_err();
        assert!(matches!(&err, ConfigError::UnknownKey { key } if key == "jj_spin"));
        assert!(err.to_string().contains("jj_spin"));
        let err = parse_config("mode = \"point\"\nn_sites = 2\nk_coupling = 1\ntemperature = 0.1\nfield_spin = { magnitude = 1, patern = \"off\" }\n").unwrap_err();
        assert!(err.to_string().contains("field_spin.patern"));
    }

    #[test]
    fn keys_of_another_mode_are_rejected() {
        let err =
            parse_config("mode = \"point\"\nn_sites = 2\nk_coupling = 1\ntemperature = 0.1\ntemperatures = [0.1]\n")
                .unwrap_err();
        assert!(matches!(err, ConfigError::NotForMode { ref key, .. } if key == "temperatures"));
        let err = parse_config("mode = \"sweep\"\ncut = \"explicit_list\"\nexplicit_points = [[1, 2]]\nlo = 0\nk_coupling = 1\ntemperatures = [0.1]\n").unwrap_err();
        assert!(matches!(err, ConfigError::NotForMode { ref key, .. } if key == "lo"));
    }

    #[test]
    fn constraint_violations_name_the_key() {
        let cases = [
            ("mode = \"point\"\nn_sites = 9\nk_coupling = 1\ntemperature = 0.1\n", "n_sites"),
            ("mode = \"point\"\nn_sites = 2\nk_coupling = 1\ntemperature = -0.1\n", "temperature"),
            ("mode = \"point\"\nn_sites = 2\ntemperature = 0.1\n", "k_coupling"),
            ("mode = \"point\"\nn_sites = 2\nk_coupling = 1\ntemperature = 0.1\nworkers = 0\n", "workers"),
            ("mode = \"point\"\nn_sites = 2\nk_coupling = \"one\"\ntemperature = 0.1\n", "k_coupling"),
            ("mode = \"sweep\"\ncut = \"diagonal\"\nk_coupling = 1\n", "temperatures"),
            ("mode = \"sweep\"\ncut = \"diagonal\"\nk_coupling = 1\ntemperatures = []\n", "temperatures"),
            ("mode = \"sweep\"\ncut = \"sideways\"\nk_coupling = 1\ntemperatures = [0.1]\n", "cut"),
            ("mode = \"sweep\"\ncut = \"diagonal\"\nlo = 1\nhi = -1\nk_coupling = 1\ntemperatures = [0.1]\n", "lo/hi/points"),
            ("mode = \"extrapolate\"\n", "input"),
            ("n_sites = 2\n", "mode"),
            ("mode = \"point\"\nformat = \"xml\"\nn_sites = 2\nk_coupling = 1\ntemperature = 0.1\n", "format"),
            ("mode = \"point\"\nn_sites = 2\nk_coupling = 1\ntemperature = 0.1\nfield_spin = { pattern = \"uniform\" }\n", "field_spin.magnitude"),
        ];
        for (text, key) in cases {
            let err = parse_config(text).unwrap_err();
            assert!(err.to_string().contains(key), "{text:?} -> {err}");
        }
        assert!(matches!(parse_config("mode = ["), Err(ConfigError::Malformed(_))));
    }

    #[test]
    fn max_sites_override_lifts_the_cap() {
        let text = "mode = \"point\"\nn_sites = 8\nk_coupling = 1\ntemperature = 0.1\n";
        assert!(parse_config(text).is_err());
        let cfg = parse_config_with_cap(text, Some(8)).unwrap();
        assert_eq!(cfg.site_cap.max_sites(), 8);
    }

    #[test]
    fn explicit_list_and_fields() {
        let cfg = parse_config(
            r#"
mode = "sweep"
cut = "explicit_list"
explicit_points = [[-0.4, -0.4], [1, 1]]
k_coupling = -1
temperatures = [0.001, 2]
n_sites_list = [4, 5]
field_spin = { magnitude = 1.0, pattern = "staggered" }
field_pseudo = { pattern = "off" }
observables = true
workers = 4
format = "json"
output = "out.json"
"#,
        )
        .unwrap();
        assert_eq!(cfg.worker_budget, 4);
        assert_eq!(cfg.output_format, OutputFormat::Json);
        assert_eq!(cfg.output_path, Some(PathBuf::from("out.json")));
        let Job::Sweep(spec) = cfg.job else { panic!() };
        assert_eq!(spec.cut, Cut::ExplicitList(vec![(-0.4, -0.4), (1.0, 1.0)]));
        assert_eq!(spec.field_spin, FieldSpec::staggered(1.0));
        assert_eq!(spec.field_pseudo, FieldSpec::OFF);
        assert!(spec.observables_enabled);
        assert_eq!(spec.n_sites_list, vec![4, 5]);
    }
}

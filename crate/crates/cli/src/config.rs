//! Scenario files: `key = value` lines grouped under `[section]` headers.
//!
//! Every key present in the file must be consumed by the scenario kind;
//! leftovers are reported as unknown. All violations are collected before
//! failing.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use mlfrac::fracops::FractionalOrders;
use mlfrac::spectral::{Coefficient, OperatorSpec};

use crate::specs::{
    parse_number, parse_number_list, GridSpec, Regularizer, SpatialSpec, TemporalSpec,
};

/// Every violation found in a configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigErrors(pub Vec<String>);

impl fmt::Display for ConfigErrors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0.join("; "))
    }
}

impl std::error::Error for ConfigErrors {}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    line: usize,
}

/// Raw section → key → value table.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    entries: BTreeMap<(String, String), Entry>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigErrors> {
        let mut entries = BTreeMap::new();
        let mut errors = Vec::new();
        let mut section = String::from("scenario");
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                match rest.strip_suffix(']') {
                    Some(name) if !name.trim().is_empty() => section = name.trim().to_string(),
                    _ => errors.push(format!("line {}: malformed section header `{line}`", i + 1)),
                }
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                errors.push(format!(
                    "line {}: expected `key = value`, got `{line}`",
                    i + 1
                ));
                continue;
            };
            let key = (section.clone(), k.trim().to_string());
            if entries.contains_key(&key) {
                errors.push(format!("line {}: duplicate key {}.{}", i + 1, key.0, key.1));
                continue;
            }
            entries.insert(
                key,
                Entry {
                    value: v.trim().to_string(),
                    line: i + 1,
                },
            );
        }
        if errors.is_empty() {
            Ok(RawConfig { entries })
        } else {
            Err(ConfigErrors(errors))
        }
    }

    /// Applies `section.key=value`; a bare key refers to `[scenario]`.
    pub fn apply_override(&mut self, spec: &str) -> Result<(), String> {
        let (k, v) = spec
            .split_once('=')
            .ok_or_else(|| format!("override `{spec}` is not key=value"))?;
        let (section, key) = match k.trim().split_once('.') {
            Some((s, k)) => (s.trim().to_string(), k.trim().to_string()),
            None => ("scenario".to_string(), k.trim().to_string()),
        };
        if section.is_empty() || key.is_empty() {
            return Err(format!("override `{spec}` has an empty section or key"));
        }
        self.entries.insert(
            (section, key),
            Entry {
                value: v.trim().to_string(),
                line: 0,
            },
        );
        Ok(())
    }
}

/// Typed reads over a [`RawConfig`] that remember what was consumed and what went wrong.
struct Reader<'a> {
    raw: &'a RawConfig,
    base: &'a Path,
    used: BTreeSet<(String, String)>,
    errors: Vec<String>,
}

impl<'a> Reader<'a> {
    fn raw(&mut self, section: &str, key: &str) -> Option<&'a str> {
        let k = (section.to_string(), key.to_string());
        let e = self.raw.entries.get(&k)?;
        self.used.insert(k);
        Some(e.value.as_str())
    }

    fn fail(&mut self, section: &str, key: &str, msg: impl fmt::Display) {
        self.errors.push(format!("{section}.{key}: {msg}"));
    }

    fn missing(&mut self, section: &str, key: &str) {
        self.errors
            .push(format!("missing required key {section}.{key}"));
    }

    fn parsed<T>(
        &mut self,
        section: &str,
        key: &str,
        f: impl FnOnce(&str) -> Result<T, String>,
    ) -> Option<T> {
        let v = self.raw(section, key)?;
        match f(v) {
            Ok(x) => Some(x),
            Err(e) => {
                self.fail(section, key, e);
                None
            }
        }
    }

    fn required<T>(
        &mut self,
        section: &str,
        key: &str,
        f: impl FnOnce(&str) -> Result<T, String>,
    ) -> Option<T> {
        if self
            .raw
            .entries
            .contains_key(&(section.to_string(), key.to_string()))
        {
            self.parsed(section, key, f)
        } else {
            self.missing(section, key);
            None
        }
    }

    fn number(&mut self, key: &str, default: f64) -> f64 {
        self.parsed("scenario", key, parse_number)
            .unwrap_or(default)
    }

    fn req_number(&mut self, key: &str) -> f64 {
        self.required("scenario", key, parse_number)
            .unwrap_or(f64::NAN)
    }

    fn opt_number(&mut self, key: &str) -> Option<f64> {
        self.parsed("scenario", key, parse_number)
    }

    fn count(&mut self, key: &str, default: usize) -> usize {
        self.parsed("scenario", key, parse_count).unwrap_or(default)
    }

    fn req_count(&mut self, key: &str) -> usize {
        self.required("scenario", key, parse_count).unwrap_or(0)
    }

    fn seed(&mut self) -> u64 {
        self.parsed("scenario", "seed", |s| {
            s.parse::<u64>().map_err(|e| format!("`{s}`: {e}"))
        })
        .unwrap_or(0)
    }

    fn spatial(&mut self, key: &str) -> Option<SpatialSpec> {
        let base = self.base;
        self.required("scenario", key, |s| SpatialSpec::parse(s, base))
    }

    fn temporal(&mut self, key: &str) -> Option<TemporalSpec> {
        let base = self.base;
        self.required("scenario", key, |s| TemporalSpec::parse(s, base))
    }

    fn grid(&mut self, key: &str, default: Option<GridSpec>) -> Option<GridSpec> {
        match default {
            Some(d) => Some(self.parsed("scenario", key, GridSpec::parse).unwrap_or(d)),
            None => self.required("scenario", key, GridSpec::parse),
        }
    }

    fn graded(&mut self) -> bool {
        self.parsed("scenario", "grid", |s| match s {
            "graded" => Ok(true),
            "uniform" => Ok(false),
            _ => Err(format!("`{s}` is neither graded nor uniform")),
        })
        .unwrap_or(true)
    }

    fn output(&mut self, key: &str) -> Option<PathBuf> {
        let v = self.raw("output", key)?;
        if v.is_empty() {
            self.fail("output", key, "empty path");
            return None;
        }
        Some(self.base.join(v))
    }
}

fn parse_count(s: &str) -> Result<usize, String> {
    s.parse::<usize>()
        .map_err(|e| format!("`{s}` is not a count: {e}"))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s {
        "true" | "yes" => Ok(true),
        "false" | "no" => Ok(false),
        _ => Err(format!("`{s}` is not a boolean")),
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    match parse_number_list(s)?.as_slice() {
        [lo, hi] if lo <= hi => Ok((*lo, *hi)),
        _ => Err(format!("`{s}` is not a range `lo, hi`")),
    }
}

/// Shared spatial discretization of the homogeneous and source problems.
#[derive(Debug, Clone)]
pub struct Modal {
    pub modes: usize,
    pub trunc_tol: f64,
}

#[derive(Debug, Clone)]
pub enum Kind {
    MlEval {
        beta0: f64,
        beta: Vec<f64>,
        z: Vec<f64>,
        tol: f64,
        expect: Option<(f64, f64)>,
    },
    MlIdentities {
        remainder: bool,
        samples: usize,
        seed: u64,
        tol: f64,
        threshold: f64,
        ell_max: u32,
        m_max: usize,
        beta0_range: (f64, f64),
        beta_range: (f64, f64),
        z_range: (f64, f64),
    },
    SolveHomogeneous {
        initial: SpatialSpec,
        modal: Modal,
        t_min: Option<f64>,
        x: GridSpec,
        times: GridSpec,
    },
    SolveSource {
        rho: TemporalSpec,
        g: SpatialSpec,
        modal: Modal,
        horizon: f64,
        steps: usize,
        graded: bool,
        x: GridSpec,
        times: GridSpec,
    },
    VerifyMaxprin {
        strict: bool,
        initial: SpatialSpec,
        samples: usize,
        seed: u64,
        modal: Modal,
        t_min: Option<f64>,
        x: Option<GridSpec>,
        x0: Option<f64>,
        times: GridSpec,
        tol: f64,
    },
    VerifyAsymptotics {
        initial: SpatialSpec,
        modal: Modal,
        x0: f64,
        window: GridSpec,
        probe_time: Option<f64>,
        tolerance: f64,
    },
    Invert {
        observation: Option<PathBuf>,
        rho: Option<TemporalSpec>,
        g: SpatialSpec,
        g_nonnegative: Option<bool>,
        modal: Modal,
        x0: f64,
        horizon: f64,
        steps: usize,
        graded: bool,
        noise: f64,
        seed: u64,
        samples: usize,
        regularization: Regularizer,
        tolerance: Option<f64>,
        uniqueness_tol: Option<f64>,
    },
    OracleCompare {
        initial: Option<SpatialSpec>,
        source: Option<(TemporalSpec, SpatialSpec)>,
        modal: Modal,
        horizon: f64,
        steps: usize,
        points: usize,
        source_steps: usize,
        t_from: f64,
        stride: usize,
        tolerance: f64,
    },
    Abel {
        rho: TemporalSpec,
        horizon: f64,
        steps: Vec<usize>,
        graded: bool,
        variation_tol: f64,
        residual_tol: f64,
    },
    Monotonicity {
        random: Option<(usize, u64, usize)>,
        lambda: Vec<f64>,
        depth: usize,
        times: GridSpec,
    },
}

impl Kind {
    pub fn name(&self) -> &'static str {
        match self {
            Kind::MlEval { .. } => "ml-eval",
            Kind::MlIdentities { .. } => "ml-identities",
            Kind::SolveHomogeneous { .. } => "solve-homogeneous",
            Kind::SolveSource { .. } => "solve-source",
            Kind::VerifyMaxprin { .. } => "verify-maxprin",
            Kind::VerifyAsymptotics { .. } => "verify-asymptotics",
            Kind::Invert { .. } => "invert",
            Kind::OracleCompare { .. } => "oracle-compare",
            Kind::Abel { .. } => "abel",
            Kind::Monotonicity { .. } => "monotonicity",
        }
    }
}

pub const KINDS: [&str; 10] = [
    "ml-eval",
    "ml-identities",
    "solve-homogeneous",
    "solve-source",
    "verify-maxprin",
    "verify-asymptotics",
    "invert",
    "oracle-compare",
    "abel",
    "monotonicity",
];

#[derive(Debug, Clone, Default)]
pub struct Outputs {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub observation: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct ScenarioConfig {
    pub kind: Kind,
    pub operator: Option<OperatorSpec>,
    /// Interior finite-difference points for variable-coefficient eigensystems.
    pub fd_points: usize,
    pub orders: Option<FractionalOrders>,
    pub output: Outputs,
}

impl ScenarioConfig {
    /// Reads and validates a scenario file, applying overrides first.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, ConfigErrors> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigErrors(vec![format!("cannot read {}: {e}", path.display())]))?;
        let mut raw = RawConfig::parse(&text)?;
        let errs: Vec<String> = overrides
            .iter()
            .filter_map(|o| raw.apply_override(o).err())
            .collect();
        if !errs.is_empty() {
            return Err(ConfigErrors(errs));
        }
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_raw(&raw, base)
    }

    /// Validates a parsed table; relative paths resolve against `base`.
    pub fn from_raw(raw: &RawConfig, base: &Path) -> Result<Self, ConfigErrors> {
        let mut r = Reader {
            raw,
            base,
            used: BTreeSet::new(),
            errors: Vec::new(),
        };
        let kind_name = r.required("scenario", "kind", |s| {
            if KINDS.contains(&s) {
                Ok(s.to_string())
            } else {
                Err(format!(
                    "unknown kind `{s}` (expected one of {})",
                    KINDS.join(", ")
                ))
            }
        });

        let needs_operator = matches!(
            kind_name.as_deref(),
            Some(
                "solve-homogeneous"
                    | "solve-source"
                    | "verify-maxprin"
                    | "verify-asymptotics"
                    | "invert"
                    | "oracle-compare"
            )
        );
        let operator = if needs_operator {
            read_operator(&mut r)
        } else {
            None
        };
        let fd_points = if needs_operator {
            r.parsed("operator", "fd_points", parse_count)
                .unwrap_or(2048)
        } else {
            2048
        };

        let random_orders =
            kind_name.as_deref() == Some("monotonicity") && raw_has(raw, "scenario", "samples");
        let needs_orders = kind_name.is_some()
            && !matches!(kind_name.as_deref(), Some("ml-eval" | "ml-identities"))
            && !random_orders;
        let orders = if needs_orders {
            read_orders(&mut r)
        } else {
            None
        };

        let kind = kind_name.as_deref().and_then(|k| read_kind(&mut r, k));
        let output = Outputs {
            csv: r.output("csv"),
            json: r.output("json"),
            observation: r.output("observation"),
        };

        // without a valid kind the set of admissible keys is unknown
        let entries = if kind_name.is_some() {
            raw.entries.iter().collect()
        } else {
            Vec::new()
        };
        for ((s, k), e) in entries {
            if !r.used.contains(&(s.clone(), k.clone())) {
                let at = if e.line > 0 {
                    format!("line {}", e.line)
                } else {
                    "override".to_string()
                };
                r.errors
                    .push(format!("{at}: unknown key {s}.{k} for this scenario"));
            }
        }
        match kind {
            Some(kind) if r.errors.is_empty() => Ok(ScenarioConfig {
                kind,
                operator,
                fd_points,
                orders,
                output,
            }),
            _ => Err(ConfigErrors(r.errors)),
        }
    }
}

fn raw_has(raw: &RawConfig, section: &str, key: &str) -> bool {
    raw.entries
        .contains_key(&(section.to_string(), key.to_string()))
}

fn read_coefficient(r: &mut Reader, key: &str, default: f64) -> Option<Coefficient> {
    let base = r.base;
    r.parsed("operator", key, |s| {
        if let Ok(v) = parse_number(s) {
            return Ok(Coefficient::Constant(v));
        }
        let (x, v) = crate::specs::read_table(&base.join(s))?;
        Coefficient::tabulated(x, v).map_err(|e| e.to_string())
    })
    .or(Some(Coefficient::Constant(default)))
}

fn read_operator(r: &mut Reader) -> Option<OperatorSpec> {
    let length = r.required("operator", "length", parse_number);
    let a = read_coefficient(r, "a", 1.0);
    let c = read_coefficient(r, "c", 0.0);
    let (length, a, c) = (length?, a?, c?);
    match OperatorSpec::new(length, a, c) {
        Ok(s) => Some(s),
        Err(e) => {
            r.errors.push(format!("operator: {e}"));
            None
        }
    }
}

fn read_orders(r: &mut Reader) -> Option<FractionalOrders> {
    let alpha = r.required("orders", "alpha", parse_number_list);
    let q = r.required("orders", "q", parse_number_list);
    let (alpha, q) = (alpha?, q?);
    match FractionalOrders::new(alpha, q) {
        Ok(o) => Some(o),
        Err(e) => {
            r.errors.push(format!("orders: {e}"));
            None
        }
    }
}

fn read_modal(r: &mut Reader, modes: usize, trunc_tol: f64) -> Modal {
    Modal {
        modes: r.count("modes", modes),
        trunc_tol: r.number("trunc_tol", trunc_tol),
    }
}

fn read_kind(r: &mut Reader, kind: &str) -> Option<Kind> {
    let k = match kind {
        "ml-eval" => {
            let beta0 = r.number("beta0", 1.0);
            let beta = r.required("scenario", "beta", parse_number_list);
            let z = r.required("scenario", "z", parse_number_list);
            let tol = r.number("tol", 1e-12);
            let expect = r.opt_number("expect");
            let expect_tol = r.opt_number("expect_tol");
            let expect = match (expect, expect_tol) {
                (Some(e), Some(t)) => Some((e, t)),
                (Some(e), None) => Some((e, 1e-9)),
                (None, Some(_)) => {
                    r.fail("scenario", "expect_tol", "given without scenario.expect");
                    None
                }
                (None, None) => None,
            };
            Kind::MlEval {
                beta0,
                beta: beta?,
                z: z?,
                tol,
                expect,
            }
        }
        "ml-identities" => {
            let remainder = r.required("scenario", "identity", |s| match s {
                "recurrence" => Ok(false),
                "remainder" => Ok(true),
                _ => Err(format!("`{s}` is neither recurrence nor remainder")),
            });
            Kind::MlIdentities {
                samples: r.req_count("samples"),
                seed: r.seed(),
                tol: r.req_number("tol"),
                threshold: r.req_number("threshold"),
                ell_max: r.count("ell_max", 5) as u32,
                m_max: r.count("m_max", 3),
                beta0_range: r
                    .parsed("scenario", "beta0_range", parse_range)
                    .unwrap_or((0.1, 3.0)),
                beta_range: r
                    .parsed("scenario", "beta_range", parse_range)
                    .unwrap_or((0.8, 1.0)),
                z_range: r
                    .parsed("scenario", "z_range", parse_range)
                    .unwrap_or((-5.0, 0.0)),
                remainder: remainder?,
            }
        }
        "solve-homogeneous" => {
            let initial = r.spatial("initial");
            let modal = read_modal(r, 256, 1e-9);
            let t_min = r.opt_number("t_min");
            let x = r.grid("x", Some(GridSpec::Interior(63)));
            let times = r.grid("times", None);
            Kind::SolveHomogeneous {
                initial: initial?,
                modal,
                t_min,
                x: x?,
                times: times?,
            }
        }
        "solve-source" => {
            let rho = r.temporal("rho");
            let g = r.spatial("g");
            let modal = read_modal(r, 256, 1e-9);
            let horizon = r.req_number("horizon");
            let steps = r.req_count("steps");
            let graded = r.graded();
            let x = r.grid("x", Some(GridSpec::Interior(63)));
            let times = r.grid("times", None);
            Kind::SolveSource {
                rho: rho?,
                g: g?,
                modal,
                horizon,
                steps,
                graded,
                x: x?,
                times: times?,
            }
        }
        "verify-maxprin" => {
            let strict = r.required("scenario", "check", |s| match s {
                "weak" => Ok(false),
                "strict" => Ok(true),
                _ => Err(format!("`{s}` is neither weak nor strict")),
            });
            let initial = r.spatial("initial");
            let samples = r.count("samples", 1);
            let seed = r.seed();
            let modal = read_modal(r, 4096, 1e-9);
            let t_min = r.opt_number("t_min");
            let times = r.grid("times", None);
            let (x, x0) = match strict {
                Some(true) => (None, Some(r.req_number("x0"))),
                Some(false) => (r.grid("x", Some(GridSpec::Interior(64))), None),
                None => (
                    r.grid("x", Some(GridSpec::Interior(64))),
                    r.opt_number("x0"),
                ),
            };
            let strict = strict.unwrap_or(false);
            let tol = r.number("tol", if strict { 0.0 } else { 1e-8 });
            Kind::VerifyMaxprin {
                strict,
                initial: initial?,
                samples,
                seed,
                modal,
                t_min,
                x,
                x0,
                times: times?,
                tol,
            }
        }
        "verify-asymptotics" => {
            let initial = r.spatial("initial");
            let modal = read_modal(r, 16, 1e-10);
            let x0 = r.req_number("x0");
            let window = r.grid("window", None);
            let probe_time = r.opt_number("probe_time");
            let tolerance = r.number("tolerance", 0.02);
            Kind::VerifyAsymptotics {
                initial: initial?,
                modal,
                x0,
                window: window?,
                probe_time,
                tolerance,
            }
        }
        "invert" => {
            let base = r.base;
            let observation = r.parsed("scenario", "observation", |s| {
                let p = base.join(s);
                if p.is_file() {
                    Ok(p)
                } else {
                    Err(format!("{} is not a readable file", p.display()))
                }
            });
            let rho = if raw_has(r.raw, "scenario", "rho") {
                r.temporal("rho")
            } else {
                None
            };
            if observation.is_some() == raw_has(r.raw, "scenario", "rho") {
                r.errors.push(
                    "invert needs exactly one of scenario.observation and scenario.rho".into(),
                );
            }
            let g = r.spatial("g");
            let g_nonnegative = r.parsed("scenario", "g_nonnegative", parse_bool);
            let modal = read_modal(r, 64, 1e-12);
            let x0 = r.req_number("x0");
            let synthesized = observation.is_none();
            let (horizon, steps) = if synthesized {
                (r.req_number("horizon"), r.req_count("steps"))
            } else {
                (f64::NAN, 0)
            };
            let graded = r.graded();
            let noise = r.number("noise", 0.0);
            let seed = r.seed();
            let samples = r.count("samples", 1);
            let regularization = r
                .parsed("scenario", "regularization", Regularizer::parse)
                .unwrap_or(Regularizer::Auto);
            let tolerance = r.opt_number("tolerance");
            let uniqueness_tol = r.opt_number("uniqueness_tol");
            Kind::Invert {
                observation,
                rho,
                g: g?,
                g_nonnegative,
                modal,
                x0,
                horizon,
                steps,
                graded,
                noise,
                seed,
                samples,
                regularization,
                tolerance,
                uniqueness_tol,
            }
        }
        "oracle-compare" => {
            let initial = if raw_has(r.raw, "scenario", "initial") {
                r.spatial("initial")
            } else {
                None
            };
            let has_source = raw_has(r.raw, "scenario", "rho") || raw_has(r.raw, "scenario", "g");
            let source = if has_source {
                let rho = r.temporal("rho");
                let g = r.spatial("g");
                rho.zip(g)
            } else {
                None
            };
            if initial.is_none() && !has_source {
                r.errors.push(
                    "oracle-compare needs scenario.initial, or scenario.rho with scenario.g".into(),
                );
            }
            let modal = read_modal(r, 64, 1e-10);
            Kind::OracleCompare {
                initial,
                source,
                modal,
                horizon: r.req_number("horizon"),
                steps: r.req_count("steps"),
                points: r.req_count("points"),
                source_steps: r.count("source_steps", 512),
                t_from: r.number("t_from", 0.05),
                stride: r.count("stride", 16),
                tolerance: r.number("tolerance", 1e-2),
            }
        }
        "abel" => {
            let rho = r.temporal("rho");
            let steps = r.required("scenario", "steps", |s| {
                s.split(',')
                    .map(|p| parse_count(p.trim()))
                    .collect::<Result<Vec<_>, _>>()
            });
            let horizon = r.number("horizon", 1.0);
            let graded = r.graded();
            let variation_tol = r.number("variation_tol", 0.05);
            let residual_tol = r.number("residual_tol", 1e-3);
            Kind::Abel {
                rho: rho?,
                horizon,
                steps: steps?,
                graded,
                variation_tol,
                residual_tol,
            }
        }
        "monotonicity" => {
            let random = if raw_has(r.raw, "scenario", "samples") {
                Some((r.req_count("samples"), r.seed(), r.count("m_max", 3)))
            } else {
                None
            };
            let lambda = if random.is_none() {
                r.required("scenario", "lambda", parse_number_list)
            } else {
                None
            };
            let depth = r.count("depth", 4);
            let times = r.grid("times", Some(GridSpec::Geometric(1e-2, 10.0, 40)));
            Kind::Monotonicity {
                random,
                lambda: lambda.unwrap_or_default(),
                depth,
                times: times?,
            }
        }
        _ => unreachable!("kind validated above"),
    };
    Some(k)
}

//! Value syntax shared by scenario files: numbers, grids and data functions.

use std::path::{Path, PathBuf};

use mlfrac::inverse::{HermiteSpline, Regularization};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A product/quotient of literals and `pi`, e.g. `7*pi/8`, `-1e-2`, `pi`.
pub fn parse_number(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1.0, rest),
        None => (1.0, s),
    };
    let mut value = sign;
    let mut op = '*';
    let mut rest = body;
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let token = rest[..end].trim();
        let v = match token {
            "pi" => std::f64::consts::PI,
            "" => return Err(format!("`{s}` is not a number")),
            t => t
                .parse::<f64>()
                .map_err(|_| format!("`{s}` is not a number"))?,
        };
        value = if op == '*' { value * v } else { value / v };
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
    if value.is_finite() {
        Ok(value)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

pub fn parse_number_list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Err("empty list".into());
    }
    s.split(',').map(parse_number).collect()
}

/// Splits `name:args` and parses the comma-separated numeric arguments.
fn tagged(s: &str) -> (&str, Option<&str>) {
    match s.split_once(':') {
        Some((n, a)) => (n.trim(), Some(a.trim())),
        None => (s.trim(), None),
    }
}

fn numeric_args(
    name: &str,
    args: Option<&str>,
    min: usize,
    max: usize,
) -> Result<Vec<f64>, String> {
    let v = match args {
        Some(a) => parse_number_list(a)?,
        None => Vec::new(),
    };
    if v.len() < min || v.len() > max {
        return Err(format!(
            "`{name}` takes {min}..={max} arguments, got {}",
            v.len()
        ));
    }
    Ok(v)
}

/// Two-column numeric CSV (header and `#` lines skipped).
pub fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let (mut x, mut v) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split(',').map(str::trim).collect();
        match (
            cols.first().map(|c| c.parse::<f64>()),
            cols.get(1).map(|c| c.parse::<f64>()),
        ) {
            (Some(Ok(a)), Some(Ok(b))) => {
                x.push(a);
                v.push(b);
            }
            _ if i == 0 || x.is_empty() => continue,
            _ => {
                return Err(format!(
                    "{}:{}: expected two numbers",
                    path.display(),
                    i + 1
                ))
            }
        }
    }
    if x.len() < 2 {
        return Err(format!("{}: need at least two rows", path.display()));
    }
    Ok((x, v))
}

fn interpolate(x: &[f64], v: &[f64], t: f64) -> f64 {
    if t <= x[0] {
        return v[0];
    }
    let n = x.len();
    if t >= x[n - 1] {
        return v[n - 1];
    }
    let i = x.partition_point(|&a| a <= t) - 1;
    let s = (t - x[i]) / (x[i + 1] - x[i]);
    v[i] + s * (v[i + 1] - v[i])
}

/// Initial data or spatial source factor on (0, L).
#[derive(Debug, Clone, PartialEq)]
pub enum SpatialSpec {
    Zero,
    /// Normalized k-th eigenfunction of the operator, 1-based.
    Mode(usize),
    /// sin(kπx/L).
    Sine(usize),
    /// amp·exp(−1/(s(1−s))) with s = (x − lo)/(hi − lo), zero outside (lo, hi).
    Bump {
        lo: f64,
        hi: f64,
        amp: f64,
    },
    /// max(0, Σ_{k≤n} c_k sin(kπx/L)), c_k uniform on (−1, 1), redrawn per sample.
    RandomClipped(usize),
    Table {
        path: PathBuf,
        x: Vec<f64>,
        v: Vec<f64>,
    },
}

impl SpatialSpec {
    pub fn parse(s: &str, base: &Path) -> Result<Self, String> {
        let (name, args) = tagged(s);
        let index = |name: &str| -> Result<usize, String> {
            let a = numeric_args(name, args, 1, 1)?[0];
            if a >= 1.0 && a.fract() == 0.0 {
                Ok(a as usize)
            } else {
                Err(format!("`{name}` needs a positive integer, got {a}"))
            }
        };
        match name {
            "zero" => numeric_args(name, args, 0, 0).map(|_| SpatialSpec::Zero),
            "mode" => index(name).map(SpatialSpec::Mode),
            "sin" => index(name).map(SpatialSpec::Sine),
            "random-clipped" => index(name).map(SpatialSpec::RandomClipped),
            "bump" => {
                let v = numeric_args(name, args, 2, 3)?;
                if !(v[0] < v[1]) {
                    return Err(format!("bump support ({}, {}) is empty", v[0], v[1]));
                }
                Ok(SpatialSpec::Bump { lo: v[0], hi: v[1], amp: v.get(2).copied().unwrap_or(1.0) })
            }
            "csv" => {
                let path = base.join(args.ok_or("`csv` needs a path")?);
                let (x, v) = read_table(&path)?;
                Ok(SpatialSpec::Table { path, x, v })
            }
            _ => Err(format!("unknown spatial data `{s}` (zero, mode:k, sin:k, bump:lo,hi[,amp], random-clipped:n, csv:path)")),
        }
    }

    /// Whether the data are nonnegative by construction.
    pub fn nonnegative(&self) -> Option<bool> {
        match self {
            SpatialSpec::Zero | SpatialSpec::RandomClipped(_) => Some(true),
            SpatialSpec::Mode(k) | SpatialSpec::Sine(k) => Some(*k == 1),
            SpatialSpec::Bump { amp, .. } => Some(*amp >= 0.0),
            SpatialSpec::Table { v, .. } => Some(v.iter().all(|y| *y >= 0.0)),
        }
    }

    /// Pointwise realization; `rng` is consulted only by random data.
    pub fn realize(&self, length: f64, rng: &mut ChaCha8Rng) -> Box<dyn Fn(f64) -> f64 + Sync> {
        match self {
            SpatialSpec::Zero | SpatialSpec::Mode(_) => Box::new(|_| 0.0),
            &SpatialSpec::Sine(k) => {
                Box::new(move |x| (k as f64 * std::f64::consts::PI * x / length).sin())
            }
            &SpatialSpec::Bump { lo, hi, amp } => Box::new(move |x| {
                let s = (x - lo) / (hi - lo);
                if s <= 0.0 || s >= 1.0 {
                    0.0
                } else {
                    amp * (-1.0 / (s * (1.0 - s))).exp()
                }
            }),
            &SpatialSpec::RandomClipped(n) => {
                let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                Box::new(move |x| {
                    let w = std::f64::consts::PI * x / length;
                    c.iter()
                        .enumerate()
                        .map(|(k, a)| a * ((k + 1) as f64 * w).sin())
                        .sum::<f64>()
                        .max(0.0)
                })
            }
            SpatialSpec::Table { x, v, .. } => {
                let (x, v) = (x.clone(), v.clone());
                Box::new(move |t| interpolate(&x, &v, t))
            }
        }
    }
}

/// Temporal source factor ρ on [0, T].
#[derive(Debug, Clone, PartialEq)]
pub enum TemporalSpec {
    Zero,
    Constant(f64),
    /// a + b·t.
    Affine(f64, f64),
    /// amp·sin(ω t).
    Sine {
        omega: f64,
        amp: f64,
    },
    /// Random C¹ Hermite spline, redrawn per sample.
    Spline {
        pieces: usize,
        lo: f64,
        hi: f64,
        max_slope: f64,
    },
    Table {
        path: PathBuf,
        x: Vec<f64>,
        v: Vec<f64>,
    },
}

impl TemporalSpec {
    pub fn parse(s: &str, base: &Path) -> Result<Self, String> {
        let (name, args) = tagged(s);
        match name {
            "zero" => numeric_args(name, args, 0, 0).map(|_| TemporalSpec::Zero),
            "const" => numeric_args(name, args, 1, 1).map(|v| TemporalSpec::Constant(v[0])),
            "affine" => numeric_args(name, args, 2, 2).map(|v| TemporalSpec::Affine(v[0], v[1])),
            "sin" => numeric_args(name, args, 1, 2)
                .map(|v| TemporalSpec::Sine { omega: v[0], amp: v.get(1).copied().unwrap_or(1.0) }),
            "spline" => {
                let v = numeric_args(name, args, 4, 4)?;
                if !(v[0] >= 1.0 && v[0].fract() == 0.0 && v[1] <= v[2] && v[3] >= 0.0) {
                    return Err(format!("`spline:pieces,lo,hi,max_slope` got {v:?}"));
                }
                Ok(TemporalSpec::Spline { pieces: v[0] as usize, lo: v[1], hi: v[2], max_slope: v[3] })
            }
            "csv" => {
                let path = base.join(args.ok_or("`csv` needs a path")?);
                let (x, v) = read_table(&path)?;
                Ok(TemporalSpec::Table { path, x, v })
            }
            _ => Err(format!(
                "unknown temporal data `{s}` (zero, const:c, affine:a,b, sin:w[,amp], spline:pieces,lo,hi,max_slope, csv:path)"
            )),
        }
    }

    pub fn realize(&self, horizon: f64, rng: &mut ChaCha8Rng) -> Box<dyn Fn(f64) -> f64 + Sync> {
        match self {
            TemporalSpec::Zero => Box::new(|_| 0.0),
            &TemporalSpec::Constant(c) => Box::new(move |_| c),
            &TemporalSpec::Affine(a, b) => Box::new(move |t| a + b * t),
            &TemporalSpec::Sine { omega, amp } => Box::new(move |t| amp * (omega * t).sin()),
            &TemporalSpec::Spline {
                pieces,
                lo,
                hi,
                max_slope,
            } => {
                let s = HermiteSpline::random(rng, horizon, pieces, (lo, hi), max_slope);
                Box::new(move |t| s.eval(t))
            }
            TemporalSpec::Table { x, v, .. } => {
                let (x, v) = (x.clone(), v.clone());
                Box::new(move |t| interpolate(&x, &v, t))
            }
        }
    }
}

/// Sample locations in x or t.
#[derive(Debug, Clone, PartialEq)]
pub enum GridSpec {
    List(Vec<f64>),
    Linear(f64, f64, usize),
    Geometric(f64, f64, usize),
    /// n points i·L/(n+1), i = 1..n.
    Interior(usize),
}

impl GridSpec {
    pub fn parse(s: &str) -> Result<Self, String> {
        let (name, args) = tagged(s);
        let triple = |name: &str| -> Result<(f64, f64, usize), String> {
            let v = numeric_args(name, args, 3, 3)?;
            if !(v[0] <= v[1] && v[2] >= 1.0 && v[2].fract() == 0.0) {
                return Err(format!("`{name}:lo,hi,n` got {v:?}"));
            }
            Ok((v[0], v[1], v[2] as usize))
        };
        match name {
            "linear" => triple(name).map(|(a, b, n)| GridSpec::Linear(a, b, n)),
            "geometric" => {
                let (a, b, n) = triple(name)?;
                if !(a > 0.0) {
                    return Err("geometric grids need lo > 0".into());
                }
                Ok(GridSpec::Geometric(a, b, n))
            }
            "interior" => {
                let v = numeric_args(name, args, 1, 1)?;
                if !(v[0] >= 1.0 && v[0].fract() == 0.0) {
                    return Err(format!("`interior:n` got {}", v[0]));
                }
                Ok(GridSpec::Interior(v[0] as usize))
            }
            _ if args.is_none() => parse_number_list(s).map(GridSpec::List),
            _ => Err(format!(
                "unknown grid `{s}` (linear:lo,hi,n, geometric:lo,hi,n, interior:n, or a list)"
            )),
        }
    }

    pub fn points(&self, length: f64) -> Vec<f64> {
        match *self {
            GridSpec::List(ref v) => v.clone(),
            GridSpec::Linear(a, _, 1) => vec![a],
            GridSpec::Linear(a, b, n) => (0..n)
                .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
                .collect(),
            GridSpec::Geometric(a, b, n) => mlfrac::properties::geometric_grid(a, b, n),
            GridSpec::Interior(n) => (1..=n)
                .map(|i| i as f64 * length / (n + 1) as f64)
                .collect(),
        }
    }
}

/// Regularization choice for the inverse problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Regularizer {
    /// None for noise-free data, the discrepancy sweep otherwise.
    Auto,
    Fixed(Regularization),
}

impl Regularizer {
    pub fn parse(s: &str) -> Result<Self, String> {
        let (name, args) = tagged(s);
        match name {
            "auto" => Ok(Regularizer::Auto),
            "none" => Ok(Regularizer::Fixed(Regularization::None)),
            "tikhonov" => {
                let v = numeric_args(name, args, 1, 1)?;
                Ok(Regularizer::Fixed(Regularization::Tikhonov(v[0])))
            }
            "discrepancy" => {
                let v = numeric_args(name, args, 1, 1)?;
                Ok(Regularizer::Fixed(Regularization::Discrepancy {
                    noise: v[0],
                }))
            }
            _ => Err(format!(
                "unknown regularization `{s}` (auto, none, tikhonov:w, discrepancy:noise)"
            )),
        }
    }

    pub fn resolve(self, noise: f64) -> Regularization {
        match self {
            Regularizer::Fixed(r) => r,
            Regularizer::Auto if noise > 0.0 => Regularization::Discrepancy { noise },
            Regularizer::Auto => Regularization::None,
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

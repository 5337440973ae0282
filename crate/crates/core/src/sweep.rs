//! Sweep configuration and CSV output.
//!
//! A config file is a list of `key = value` lines; `#` starts a comment.
//! Lists are comma separated and also accept `start:step:stop` ranges.
//!
//! ```text
//! preset = figure1
//! k = 20
//! M = 12
//! beta = 0:0.1:0.9
//! sigma_c = 0.3
//! quantities = pep-anti-matched, pep-anti-euclidean, bound-upper
//! trials_pairwise = 50000
//! trials_ser = 20000
//! quad_order = 64
//! seed = 7
//! workers = 4
//! out = fig1.csv
//! ```

use std::io::Write;
use std::path::PathBuf;

use crate::channel::EuclideanMeans;
use crate::error::{Error, Result};
use crate::montecarlo::{QuantityKind, SweepRow};
use crate::pairwise::{NoiseParams, DEFAULT_QUAD_ORDER};
use crate::quadrature::{MAX_ORDER, MIN_ORDER};

pub const DEFAULT_SEED: u64 = 0x5EED;
pub const DEFAULT_TRIALS_PAIRWISE: u64 = 50_000;
pub const DEFAULT_TRIALS_SER: u64 = 20_000;

pub const CSV_HEADER: &str = "k,M,beta,sigma_c,kind,value,ci_low,ci_high,trials";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub k: usize,
    pub m: usize,
    pub betas: Vec<f64>,
    pub sigmas: Vec<f64>,
    pub kinds: Vec<QuantityKind>,
    pub trials_pairwise: u64,
    pub trials_ser: u64,
    pub quad_order: usize,
    pub seed: u64,
    /// Worker threads; 0 lets the pool pick.
    pub workers: usize,
    pub euclidean_means: EuclideanMeans,
    pub out: Option<PathBuf>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            k: 20,
            m: 12,
            betas: Vec::new(),
            sigmas: vec![0.3],
            kinds: QuantityKind::ALL.to_vec(),
            trials_pairwise: DEFAULT_TRIALS_PAIRWISE,
            trials_ser: DEFAULT_TRIALS_SER,
            quad_order: DEFAULT_QUAD_ORDER,
            seed: DEFAULT_SEED,
            workers: 0,
            euclidean_means: EuclideanMeans::Shrunken,
            out: None,
        }
    }
}

/// Ten-point grid `0, 0.1, ..., 0.9`.
pub fn decile_grid() -> Vec<f64> {
    (0..10).map(|i| i as f64 / 10.0).collect()
}

impl SweepConfig {
    /// Both panels of the validation figure: `(k, M) = (20, 12)`, `σ_c = 0.3`,
    /// ten `β` values, 5×10⁴ pairwise and 2×10⁴ SER trials per point.
    pub fn figure1() -> Self {
        Self {
            betas: decile_grid(),
            ..Self::default()
        }
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name.trim() {
            "figure1" => Ok(Self::figure1()),
            other => Err(Error::Config(format!("unknown preset '{other}'"))),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let cfg = |msg: String| Err(Error::Config(msg));
        if self.k < 1 {
            return cfg(format!("k must be >= 1, got {}", self.k));
        }
        if self.m < 2 {
            return cfg(format!("M must be >= 2, got {}", self.m));
        }
        if !self.m.is_multiple_of(2) && self.kinds.iter().any(|q| q.needs_even_m()) {
            return cfg(format!(
                "M = {} is odd; antipodal and bound quantities need even M",
                self.m
            ));
        }
        if self.sigmas.is_empty() && !self.betas.is_empty() && !self.kinds.is_empty() {
            return cfg("sigma_c grid is empty".into());
        }
        for &beta in &self.betas {
            for &s in &self.sigmas {
                NoiseParams::new(beta, s).map_err(|e| {
                    Error::Config(format!("grid point beta={beta}, sigma_c={s}: {e}"))
                })?;
            }
        }
        if !(MIN_ORDER..=MAX_ORDER).contains(&self.quad_order) {
            return cfg(format!(
                "quad_order must lie in {MIN_ORDER}..={MAX_ORDER}, got {}",
                self.quad_order
            ));
        }
        let mc = |q: QuantityKind| self.kinds.contains(&q);
        if (mc(QuantityKind::PepAntiMatched) || mc(QuantityKind::PepAntiEuclidean))
            && self.trials_pairwise == 0
        {
            return cfg("trials_pairwise must be >= 1".into());
        }
        if (mc(QuantityKind::SerMatched) || mc(QuantityKind::SerEuclidean)) && self.trials_ser == 0
        {
            return cfg("trials_ser must be >= 1".into());
        }
        Ok(())
    }

    /// Applies a config file on top of `self`. A `preset` line resets every
    /// earlier setting to the preset.
    pub fn apply_file_str(&mut self, text: &str) -> Result<()> {
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {lineno}: expected 'key = value', got '{line}'"
                ))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {lineno}: {}", strip_prefix(&e))))?;
        }
        Ok(())
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("invalid {what} '{value}' for key '{key}'"));
        match key {
            "preset" => *self = Self::preset(value)?,
            "k" => self.k = value.parse().map_err(|_| bad("integer"))?,
            "M" | "m" => self.m = value.parse().map_err(|_| bad("integer"))?,
            "beta" | "betas" => self.betas = parse_grid(value).map_err(|_| bad("grid"))?,
            "sigma_c" | "sigma-c" | "sigmas" => {
                self.sigmas = parse_grid(value).map_err(|_| bad("grid"))?
            }
            "quantities" | "kinds" => self.kinds = parse_kinds(value)?,
            "trials_pairwise" | "trials-pairwise" => {
                self.trials_pairwise = parse_count(value).ok_or_else(|| bad("count"))?
            }
            "trials_ser" | "trials-ser" => {
                self.trials_ser = parse_count(value).ok_or_else(|| bad("count"))?
            }
            "quad_order" | "quad-order" => {
                self.quad_order = value.parse().map_err(|_| bad("integer"))?
            }
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "workers" => self.workers = value.parse().map_err(|_| bad("integer"))?,
            "euclidean_means" | "euclidean-means" => {
                self.euclidean_means = value.parse().map_err(|_| bad("mean model"))?
            }
            "out" => self.out = (!value.is_empty()).then(|| PathBuf::from(value)),
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }
}

fn strip_prefix(e: &Error) -> String {
    match e {
        Error::Config(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Parses `a, b, c` or `start:step:stop` (inclusive, tolerant to rounding).
pub fn parse_grid(s: &str) -> std::result::Result<Vec<f64>, String> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    if let Some((start, rest)) = s.split_once(':') {
        let (step, stop) = rest.split_once(':').ok_or("range needs start:step:stop")?;
        let start: f64 = start.trim().parse().map_err(|_| "bad range start")?;
        let step: f64 = step.trim().parse().map_err(|_| "bad range step")?;
        let stop: f64 = stop.trim().parse().map_err(|_| "bad range stop")?;
        if !(step > 0.0) || stop < start {
            return Err("range needs a positive step and stop >= start".into());
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        // round to 12 decimals so 0:0.1:0.9 yields the literal decimals
        return Ok((0..count)
            .map(|i| {
                let v = start + i as f64 * step;
                (v * 1e12).round() / 1e12
            })
            .collect());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| format!("bad number '{}'", t.trim()))
        })
        .collect()
}

fn parse_kinds(s: &str) -> Result<Vec<QuantityKind>> {
    let s = s.trim();
    if s.is_empty() || s == "none" {
        return Ok(Vec::new());
    }
    if s == "all" {
        return Ok(QuantityKind::ALL.to_vec());
    }
    s.split(',')
        .map(|t| {
            t.parse::<QuantityKind>()
                .map_err(|e| Error::Config(strip_prefix(&e)))
        })
        .collect()
}

/// Accepts plain integers and scientific forms like `5e4`.
pub fn parse_count(s: &str) -> Option<u64> {
    let s = s.trim();
    if let Ok(v) = s.parse::<u64>() {
        return Some(v);
    }
    let f: f64 = s.parse().ok()?;
    (f >= 0.0 && f.fract() == 0.0 && f <= u64::MAX as f64).then_some(f as u64)
}

/// Plain decimal with 12 significant digits, trailing zeros removed.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return if x.is_nan() {
            "nan".into()
        } else if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.11e}", x.abs());
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    let digits: String = mantissa.chars().filter(|c| c.is_ascii_digit()).collect();
    let mut out = String::new();
    if x < 0.0 {
        out.push('-');
    }
    if exp >= 0 {
        let int_len = exp as usize + 1;
        if int_len >= digits.len() {
            out.push_str(&digits);
            out.push_str(&"0".repeat(int_len - digits.len()));
        } else {
            out.push_str(&digits[..int_len]);
            let frac = digits[int_len..].trim_end_matches('0');
            if !frac.is_empty() {
                out.push('.');
                out.push_str(frac);
            }
        }
    } else {
        out.push_str("0.");
        out.push_str(&"0".repeat((-exp - 1) as usize));
        out.push_str(digits.trim_end_matches('0'));
    }
    out
}

pub fn format_row(r: &SweepRow) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{}",
        r.k,
        r.m,
        format_sig12(r.beta),
        format_sig12(r.sigma_c),
        r.kind,
        format_sig12(r.value),
        format_sig12(r.ci_low),
        format_sig12(r.ci_high),
        r.trials
    )
}

pub fn write_csv<W: Write>(rows: &[SweepRow], mut w: W) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(w, "{}", format_row(r))?;
    }
    w.flush()
}

pub fn to_csv_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

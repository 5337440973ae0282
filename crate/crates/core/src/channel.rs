//! Tangent-noise channel and the two receivers.
//!
//! With symbol `i` sent the receiver observes
//! `Y = √(1−β) x_i + √β ξ t̂_i + N`, `ξ ~ N(0,1)`, `N ~ N(0, σ_c² I)`.
//! The matched receiver minimizes the quadratic form of `Σ_i = β t̂_i t̂_iᵀ + σ_c² I`
//! written with the Sherman-Morrison inverse; the Euclidean receiver minimizes
//! the distance to the shrunken means.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};
use crate::geometry::{dot, Constellation};
use crate::pairwise::NoiseParams;
use crate::rng::{StreamId, Substream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecoderKind {
    Matched,
    Euclidean,
}

impl DecoderKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DecoderKind::Matched => "matched",
            DecoderKind::Euclidean => "euclidean",
        }
    }
}

impl fmt::Display for DecoderKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DecoderKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "matched" | "ml" => Ok(DecoderKind::Matched),
            "euclidean" | "euc" => Ok(DecoderKind::Euclidean),
            other => Err(invalid(format!("unknown decoder '{other}'"))),
        }
    }
}

/// Which means the Euclidean receiver compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum EuclideanMeans {
    /// `√(1−β) x_i`: knows the mean shrinkage, ignores the covariance.
    #[default]
    Shrunken,
    /// `x_i`: ignores `β` entirely.
    Unshrunken,
}

impl EuclideanMeans {
    pub fn as_str(self) -> &'static str {
        match self {
            EuclideanMeans::Shrunken => "shrunken",
            EuclideanMeans::Unshrunken => "unshrunken",
        }
    }
}

impl FromStr for EuclideanMeans {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "shrunken" => Ok(EuclideanMeans::Shrunken),
            "unshrunken" => Ok(EuclideanMeans::Unshrunken),
            other => Err(invalid(format!("unknown mean model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Observation {
    pub y: Vec<f64>,
    pub true_index: usize,
    pub stream: Option<StreamId>,
}

fn check_symbol(c: &Constellation, i: usize) -> Result<()> {
    if i >= c.len() {
        return Err(invalid(format!(
            "symbol index {i} out of range for M = {}",
            c.len()
        )));
    }
    Ok(())
}

fn check_dim(c: &Constellation, y: &[f64]) -> Result<()> {
    if y.len() != c.dim() {
        return Err(invalid(format!(
            "observation has dimension {}, constellation needs {}",
            y.len(),
            c.dim()
        )));
    }
    Ok(())
}

/// Writes one channel output for symbol `i` into `y`. `y.len()` must equal `c.dim()`.
pub fn sample_into<R: Rng + ?Sized>(
    c: &Constellation,
    i: usize,
    n: NoiseParams,
    rng: &mut R,
    y: &mut [f64],
) {
    let shrink = n.mean_scale();
    let xi: f64 = rng.sample(StandardNormal);
    let an = n.beta().sqrt() * xi;
    let s = n.sigma_c();
    for ((out, &x), &t) in y.iter_mut().zip(c.point(i)).zip(c.tangent(i)) {
        let noise: f64 = rng.sample(StandardNormal);
        *out = shrink * x + an * t + s * noise;
    }
}

pub fn sample_observation(
    c: &Constellation,
    i: usize,
    n: NoiseParams,
    stream: &mut Substream,
) -> Result<Observation> {
    check_symbol(c, i)?;
    let mut y = vec![0.0; c.dim()];
    let id = stream.id();
    sample_into(c, i, n, stream, &mut y);
    Ok(Observation {
        y,
        true_index: i,
        stream: Some(id),
    })
}

/// Precomputed scoring constants for one receiver at one noise setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Receiver {
    kind: DecoderKind,
    mean_scale: f64,
    correction: f64,
    inv_var: f64,
}

impl Receiver {
    pub fn new(kind: DecoderKind, n: NoiseParams) -> Self {
        Self::with_means(kind, n, EuclideanMeans::Shrunken)
    }

    /// `means` only affects the Euclidean receiver.
    pub fn with_means(kind: DecoderKind, n: NoiseParams, means: EuclideanMeans) -> Self {
        let s2 = n.sigma_c() * n.sigma_c();
        let (mean_scale, correction) = match kind {
            DecoderKind::Matched => (n.mean_scale(), n.beta() / (n.beta() + s2)),
            DecoderKind::Euclidean => match means {
                EuclideanMeans::Shrunken => (n.mean_scale(), 0.0),
                EuclideanMeans::Unshrunken => (1.0, 0.0),
            },
        };
        Self {
            kind,
            mean_scale,
            correction,
            inv_var: 1.0 / s2,
        }
    }

    pub fn kind(&self) -> DecoderKind {
        self.kind
    }

    /// Score up to the positive factor `1/σ_c²`; used for decisions.
    #[inline]
    pub(crate) fn raw_score(&self, c: &Constellation, y: &[f64], i: usize) -> f64 {
        let x = c.point(i);
        if self.correction == 0.0 {
            return y
                .iter()
                .zip(x)
                .map(|(&yv, &xv)| {
                    let r = yv - self.mean_scale * xv;
                    r * r
                })
                .sum();
        }
        let t = c.tangent(i);
        let mut d2 = 0.0;
        let mut proj = 0.0;
        for n in 0..y.len() {
            let r = y[n] - self.mean_scale * x[n];
            d2 += r * r;
            proj += r * t[n];
        }
        d2 - self.correction * proj * proj
    }

    /// Decoding metric: matched quadratic form, or squared Euclidean distance.
    pub fn score(&self, c: &Constellation, y: &[f64], i: usize) -> f64 {
        match self.kind {
            DecoderKind::Matched => self.raw_score(c, y, i) * self.inv_var,
            DecoderKind::Euclidean => self.raw_score(c, y, i),
        }
    }

    /// Index of the smallest score, lowest index on ties.
    pub fn decode(&self, c: &Constellation, y: &[f64]) -> usize {
        let mut best = 0;
        let mut best_score = self.raw_score(c, y, 0);
        for i in 1..c.len() {
            let s = self.raw_score(c, y, i);
            if s < best_score {
                best = i;
                best_score = s;
            }
        }
        best
    }

    /// Whether `j` scores no worse than `i`.
    #[inline]
    pub fn prefers_or_ties(&self, c: &Constellation, y: &[f64], i: usize, j: usize) -> bool {
        self.raw_score(c, y, j) <= self.raw_score(c, y, i)
    }
}

/// `‖y−x̄_i‖²/σ_c² − β((y−x̄_i)·t̂_i)² / (σ_c²(β+σ_c²))`.
pub fn matched_score(c: &Constellation, y: &[f64], i: usize, n: NoiseParams) -> Result<f64> {
    check_symbol(c, i)?;
    check_dim(c, y)?;
    Ok(Receiver::new(DecoderKind::Matched, n).score(c, y, i))
}

pub fn matched_decode(c: &Constellation, y: &[f64], n: NoiseParams) -> Result<usize> {
    check_dim(c, y)?;
    Ok(Receiver::new(DecoderKind::Matched, n).decode(c, y))
}

/// Nearest shrunken mean `√(1−β) x_i`.
pub fn euclidean_decode(c: &Constellation, y: &[f64], n: NoiseParams) -> Result<usize> {
    euclidean_decode_with(c, y, n, EuclideanMeans::Shrunken)
}

pub fn euclidean_decode_with(
    c: &Constellation,
    y: &[f64],
    n: NoiseParams,
    means: EuclideanMeans,
) -> Result<usize> {
    check_dim(c, y)?;
    Ok(Receiver::with_means(DecoderKind::Euclidean, n, means).decode(c, y))
}

/// Projection of `v` on the unit tangent at `i`; exposed for diagnostics.
pub fn tangent_projection(c: &Constellation, v: &[f64], i: usize) -> f64 {
    dot(v, c.tangent(i))
}

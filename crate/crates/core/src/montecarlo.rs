//! Seeded Monte Carlo estimation of pairwise errors and symbol-error rates.
//!
//! Trial `t` draws everything it needs from substream `t` of a family keyed by
//! the caller's seed, and results are plain event counts. Estimates therefore
//! do not depend on how trials are spread over worker threads. Matched and
//! Euclidean estimates made with the same seed see the same observations.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rayon::prelude::*;

use crate::bounds::ser_bounds;
use crate::channel::{sample_into, DecoderKind, EuclideanMeans, Receiver};
use crate::error::{invalid, Error, Result};
use crate::geometry::Constellation;
use crate::pairwise::NoiseParams;
use crate::rng::{derive_seed, StreamFamily};
use crate::sweep::SweepConfig;

/// Two-sided 95% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// Trials per scheduling block.
const BLOCK: u64 = 1024;

/// Wilson score interval for `successes` out of `trials` at quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    (
        (center - half).max(0.0).min(p),
        (center + half).min(1.0).max(p),
    )
}

/// A Monte Carlo frequency with its 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PepEstimate {
    pub value: f64,
    pub errors: u64,
    pub trials: u64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub seed: u64,
    pub decoder: DecoderKind,
}

impl PepEstimate {
    pub fn from_counts(errors: u64, trials: u64, seed: u64, decoder: DecoderKind) -> Self {
        let (ci_low, ci_high) = wilson_interval(errors, trials, Z_95);
        Self {
            value: errors as f64 / trials.max(1) as f64,
            errors,
            trials,
            ci_low,
            ci_high,
            seed,
            decoder,
        }
    }

    /// Standard error implied by the Wilson interval, `(high − low) / (2z)`.
    pub fn std_error(&self) -> f64 {
        (self.ci_high - self.ci_low) / (2.0 * Z_95)
    }

    /// Binomial standard error at a reference probability `p`.
    pub fn std_error_at(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.trials as f64).sqrt()
    }
}

/// Counts of (matched, Euclidean) events over `trials` trials.
fn count_events<F>(trials: u64, seed: u64, dim: usize, event: F) -> [u64; 2]
where
    F: Fn(&mut crate::rng::Substream, &mut [f64]) -> [bool; 2] + Sync,
{
    let family = StreamFamily::new(seed);
    let blocks = trials.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut y = vec![0.0; dim];
            let mut counts = [0u64; 2];
            for t in b * BLOCK..((b + 1) * BLOCK).min(trials) {
                let mut stream = family.substream(t);
                let hit = event(&mut stream, &mut y);
                counts[0] += hit[0] as u64;
                counts[1] += hit[1] as u64;
            }
            counts
        })
        .reduce(|| [0, 0], |a, b| [a[0] + b[0], a[1] + b[1]])
}

fn check_trials(trials: u64) -> Result<()> {
    if trials == 0 {
        return Err(invalid("trial count must be >= 1"));
    }
    Ok(())
}

/// Matched and Euclidean estimates of the binary event "`j` scores no worse
/// than `i`" with `i` transmitted, on common random numbers.
pub fn estimate_pairwise_pep_both(
    c: &Constellation,
    i: usize,
    j: usize,
    n: NoiseParams,
    trials: u64,
    seed: u64,
    means: EuclideanMeans,
) -> Result<(PepEstimate, PepEstimate)> {
    check_trials(trials)?;
    if i >= c.len() || j >= c.len() || i == j {
        return Err(Error::InvalidPair {
            i,
            j,
            reason: format!("need distinct indices below M = {}", c.len()),
        });
    }
    let matched = Receiver::new(DecoderKind::Matched, n);
    let euclid = Receiver::with_means(DecoderKind::Euclidean, n, means);
    let counts = count_events(trials, seed, c.dim(), |rng, y| {
        sample_into(c, i, n, rng, y);
        [
            matched.prefers_or_ties(c, y, i, j),
            euclid.prefers_or_ties(c, y, i, j),
        ]
    });
    Ok((
        PepEstimate::from_counts(counts[0], trials, seed, DecoderKind::Matched),
        PepEstimate::from_counts(counts[1], trials, seed, DecoderKind::Euclidean),
    ))
}

pub fn estimate_pairwise_pep(
    c: &Constellation,
    i: usize,
    j: usize,
    decoder: DecoderKind,
    n: NoiseParams,
    trials: u64,
    seed: u64,
) -> Result<PepEstimate> {
    let (m, e) = estimate_pairwise_pep_both(c, i, j, n, trials, seed, EuclideanMeans::Shrunken)?;
    Ok(match decoder {
        DecoderKind::Matched => m,
        DecoderKind::Euclidean => e,
    })
}

/// Matched and Euclidean full-codebook SER with equiprobable symbols on common
/// random numbers.
pub fn estimate_ser_both(
    c: &Constellation,
    n: NoiseParams,
    trials: u64,
    seed: u64,
    means: EuclideanMeans,
) -> Result<(PepEstimate, PepEstimate)> {
    check_trials(trials)?;
    let matched = Receiver::new(DecoderKind::Matched, n);
    let euclid = Receiver::with_means(DecoderKind::Euclidean, n, means);
    let m = c.len();
    let counts = count_events(trials, seed, c.dim(), |rng, y| {
        let sent = rng.gen_range(0..m);
        sample_into(c, sent, n, rng, y);
        [matched.decode(c, y) != sent, euclid.decode(c, y) != sent]
    });
    Ok((
        PepEstimate::from_counts(counts[0], trials, seed, DecoderKind::Matched),
        PepEstimate::from_counts(counts[1], trials, seed, DecoderKind::Euclidean),
    ))
}

pub fn estimate_ser(
    c: &Constellation,
    decoder: DecoderKind,
    n: NoiseParams,
    trials: u64,
    seed: u64,
) -> Result<PepEstimate> {
    let (m, e) = estimate_ser_both(c, n, trials, seed, EuclideanMeans::Shrunken)?;
    Ok(match decoder {
        DecoderKind::Matched => m,
        DecoderKind::Euclidean => e,
    })
}

/// Runs `f` on a dedicated pool of `workers` threads (0 = rayon default).
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

/// Quantities a sweep can report, in canonical emission order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QuantityKind {
    PepAntiMatched,
    PepAntiEuclidean,
    SerMatched,
    SerEuclidean,
    BoundLower,
    BoundUpper,
    BoundMatchedLower,
}

impl QuantityKind {
    pub const ALL: [QuantityKind; 7] = [
        QuantityKind::PepAntiMatched,
        QuantityKind::PepAntiEuclidean,
        QuantityKind::SerMatched,
        QuantityKind::SerEuclidean,
        QuantityKind::BoundLower,
        QuantityKind::BoundUpper,
        QuantityKind::BoundMatchedLower,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            QuantityKind::PepAntiMatched => "pep-anti-matched",
            QuantityKind::PepAntiEuclidean => "pep-anti-euclidean",
            QuantityKind::SerMatched => "ser-matched",
            QuantityKind::SerEuclidean => "ser-euclidean",
            QuantityKind::BoundLower => "bound-lower",
            QuantityKind::BoundUpper => "bound-upper",
            QuantityKind::BoundMatchedLower => "bound-matched-lower",
        }
    }

    pub fn is_monte_carlo(self) -> bool {
        matches!(
            self,
            QuantityKind::PepAntiMatched
                | QuantityKind::PepAntiEuclidean
                | QuantityKind::SerMatched
                | QuantityKind::SerEuclidean
        )
    }

    /// Needs an even codebook (antipodal partner or the bound formulas).
    pub fn needs_even_m(self) -> bool {
        !matches!(self, QuantityKind::SerMatched | QuantityKind::SerEuclidean)
    }
}

impl fmt::Display for QuantityKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QuantityKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        QuantityKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| invalid(format!("unknown quantity kind '{s}'")))
    }
}

/// One output record of a sweep. Analytic rows have `trials = 0` and a
/// degenerate interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub k: usize,
    pub m: usize,
    pub beta: f64,
    pub sigma_c: f64,
    pub kind: QuantityKind,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub trials: u64,
}

const PAIRWISE_TAG: u64 = 1;
const SER_TAG: u64 = 2;

/// Evaluates every requested quantity at every grid point.
///
/// Grid order is `sigma_c` outer, `beta` inner; within a point rows follow
/// [`QuantityKind::ALL`]. Each grid point derives its own seeds from the master
/// seed and its grid position, so output is identical for any worker count.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    config.validate()?;
    with_workers(config.workers, || sweep_rows(config))?
}

fn sweep_rows(config: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut kinds = config.kinds.clone();
    kinds.sort();
    kinds.dedup();
    let mut rows = Vec::new();
    if kinds.is_empty() {
        return Ok(rows);
    }
    let (k, m) = (config.k, config.m);
    let c = Constellation::uniform(k, m)?;
    let wants = |q: QuantityKind| kinds.contains(&q);
    let wants_pep = wants(QuantityKind::PepAntiMatched) || wants(QuantityKind::PepAntiEuclidean);
    let wants_ser = wants(QuantityKind::SerMatched) || wants(QuantityKind::SerEuclidean);
    let wants_bounds = kinds.iter().any(|q| !q.is_monte_carlo());

    let mut point = 0u64;
    for &sigma_c in &config.sigmas {
        for &beta in &config.betas {
            let n = NoiseParams::new(beta, sigma_c)?;
            let pep = if wants_pep {
                Some(estimate_pairwise_pep_both(
                    &c,
                    0,
                    m / 2,
                    n,
                    config.trials_pairwise,
                    derive_seed(config.seed, &[point, PAIRWISE_TAG]),
                    config.euclidean_means,
                )?)
            } else {
                None
            };
            let ser = if wants_ser {
                Some(estimate_ser_both(
                    &c,
                    n,
                    config.trials_ser,
                    derive_seed(config.seed, &[point, SER_TAG]),
                    config.euclidean_means,
                )?)
            } else {
                None
            };
            let bounds = if wants_bounds {
                Some(ser_bounds(k, m, n, config.quad_order)?)
            } else {
                None
            };

            for &kind in &kinds {
                let estimate = match kind {
                    QuantityKind::PepAntiMatched => pep.map(|p| p.0),
                    QuantityKind::PepAntiEuclidean => pep.map(|p| p.1),
                    QuantityKind::SerMatched => ser.map(|p| p.0),
                    QuantityKind::SerEuclidean => ser.map(|p| p.1),
                    _ => None,
                };
                let row = match estimate {
                    Some(e) => SweepRow {
                        k,
                        m,
                        beta,
                        sigma_c,
                        kind,
                        value: e.value,
                        ci_low: e.ci_low,
                        ci_high: e.ci_high,
                        trials: e.trials,
                    },
                    None => {
                        let b = bounds.as_ref().expect("bounds computed for analytic kinds");
                        let value = match kind {
                            QuantityKind::BoundLower => b.lower,
                            QuantityKind::BoundUpper => b.upper_raw,
                            QuantityKind::BoundMatchedLower => {
                                b.matched_lower.expect("matched bound requested")
                            }
                            _ => unreachable!("Monte Carlo kinds handled above"),
                        };
                        SweepRow {
                            k,
                            m,
                            beta,
                            sigma_c,
                            kind,
                            value,
                            ci_low: value,
                            ci_high: value,
                            trials: 0,
                        }
                    }
                };
                rows.push(row);
            }
            point += 1;
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wilson_contains_point_estimate() {
        for (s, n) in [(0u64, 10u64), (10, 10), (3, 100), (5000, 10000), (1, 50000)] {
            let (lo, hi) = wilson_interval(s, n, Z_95);
            let p = s as f64 / n as f64;
            assert!(lo <= p && p <= hi, "{s}/{n}: [{lo}, {hi}]");
            assert!((0.0..=1.0).contains(&lo) && (0.0..=1.0).contains(&hi));
        }
        // textbook value: 81/263 at 95% -> [0.2553, 0.3662]
        let (lo, hi) = wilson_interval(81, 263, Z_95);
        assert!((lo - 0.2553).abs() < 1e-4 && (hi - 0.3662).abs() < 1e-4);
    }

    #[test]
    fn quantity_kind_names_round_trip() {
        for k in QuantityKind::ALL {
            assert_eq!(k.as_str().parse::<QuantityKind>().unwrap(), k);
        }
        assert!("bound-middle".parse::<QuantityKind>().is_err());
    }

    #[test]
    fn estimators_reject_bad_input() {
        let c = Constellation::uniform(3, 6).unwrap();
        let n = NoiseParams::new(0.3, 0.3).unwrap();
        assert!(estimate_pairwise_pep(&c, 1, 1, DecoderKind::Matched, n, 10, 0).is_err());
        assert!(estimate_pairwise_pep(&c, 0, 6, DecoderKind::Matched, n, 10, 0).is_err());
        assert!(estimate_pairwise_pep(&c, 0, 3, DecoderKind::Matched, n, 0, 0).is_err());
        assert!(estimate_ser(&c, DecoderKind::Euclidean, n, 0, 0).is_err());
    }

    #[test]
    fn counts_independent_of_worker_count() {
        let c = Constellation::uniform(5, 8).unwrap();
        let n = NoiseParams::new(0.6, 0.4).unwrap();
        let runs: Vec<_> = [1usize, 3, 8]
            .iter()
            .map(|&w| {
                with_workers(w, || {
                    estimate_ser_both(&c, n, 5000, 77, EuclideanMeans::Shrunken)
                })
                .unwrap()
                .unwrap()
            })
            .collect();
        assert!(runs.windows(2).all(|r| r[0] == r[1]));
    }

    #[test]
    fn beta_zero_decoders_agree_on_shared_streams() {
        let c = Constellation::uniform(20, 12).unwrap();
        let n = NoiseParams::new(0.0, 0.3).unwrap();
        let (m, e) =
            estimate_pairwise_pep_both(&c, 0, 6, n, 20000, 5, EuclideanMeans::Shrunken).unwrap();
        assert_eq!(m.errors, e.errors);
        let (m, e) = estimate_ser_both(&c, n, 20000, 5, EuclideanMeans::Shrunken).unwrap();
        assert_eq!(m.errors, e.errors);
    }
}

//! Exact pairwise error probabilities.
//!
//! `P(i → j)` is the probability that, with `i` transmitted, hypothesis `j`
//! scores no worse than `i`. The Euclidean decoder has a closed form for any
//! pair. The matched decoder has a closed form only on phantom pairs, where it
//! is a two-dimensional Gaussian expectation of `Q(η_e + aU² − bV²)`.

use libm::erfc;

use crate::error::{invalid, Error, Result};
use crate::geometry::{antipodal_geometry, pair_geometry, Constellation, PairGeometry};
use crate::quadrature::{GaussHermite, MIN_ORDER};

/// Default Gauss-Hermite nodes per axis for the matched expectation.
pub const DEFAULT_QUAD_ORDER: usize = 64;

/// Smallest ambient noise level accepted. Below it the matched metric is
/// treated as singular.
pub const MIN_SIGMA_C: f64 = 1e-6;

/// `|γ|` at or above this threshold routes to the degenerate `|γ| = 1` branch.
pub const DEGENERATE_GAMMA: f64 = 1.0 - 1e-12;

/// Artificial-noise fraction and ambient noise level.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    beta: f64,
    sigma_c: f64,
}

impl NoiseParams {
    pub fn new(beta: f64, sigma_c: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&beta) {
            return Err(invalid(format!("beta must lie in [0, 1), got {beta}")));
        }
        if sigma_c.is_nan() || sigma_c < 0.0 || sigma_c.is_infinite() {
            return Err(invalid(format!(
                "sigma_c must be finite and positive, got {sigma_c}"
            )));
        }
        if sigma_c < MIN_SIGMA_C {
            return Err(Error::SingularModel(format!(
                "sigma_c = {sigma_c} is below the minimum {MIN_SIGMA_C}"
            )));
        }
        Ok(Self { beta, sigma_c })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn sigma_c(&self) -> f64 {
        self.sigma_c
    }

    /// Mean shrinkage `√(1−β)`.
    pub fn mean_scale(&self) -> f64 {
        (1.0 - self.beta).sqrt()
    }
}

/// Upper-tail standard normal probability without input validation.
///
/// Uses the complementary error function on both tails, so large negative
/// arguments return values at most one and never NaN.
#[inline]
pub fn upper_tail(x: f64) -> f64 {
    if x == f64::INFINITY {
        0.0
    } else if x == f64::NEG_INFINITY {
        1.0
    } else {
        0.5 * erfc(x / std::f64::consts::SQRT_2)
    }
}

/// Gaussian tail `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(invalid("Q-function argument is NaN"));
    }
    Ok(upper_tail(x))
}

/// Euclidean-decoder pairwise error probability
/// `Q(√(1−β) δ / (2 √(β cos²α + σ_c²)))`.
pub fn euclidean_pep(g: &PairGeometry, n: NoiseParams) -> Result<f64> {
    if !(g.delta > 0.0) {
        return Err(invalid(format!(
            "chord length must be > 0, got {}",
            g.delta
        )));
    }
    let spread = (n.beta.sqrt() * g.cos_alpha).hypot(n.sigma_c);
    Ok(upper_tail(n.mean_scale() * g.delta / (2.0 * spread)))
}

/// Parameters of the matched phantom-pair expectation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedPepParams {
    pub eta_e: f64,
    pub a: f64,
    pub b: f64,
    pub rho_uv: f64,
    pub degenerate: bool,
}

impl MatchedPepParams {
    /// `β²(1−γ²) / (2σ_c(β+σ_c²)δ√(1−β))`, the closed form of `a − b`.
    pub fn gap_closed_form(delta: f64, gamma: f64, n: NoiseParams) -> f64 {
        let (beta, s) = (n.beta, n.sigma_c);
        beta * beta * (1.0 - gamma * gamma) / (2.0 * s * (beta + s * s) * delta * n.mean_scale())
    }

    /// Eigenvalue magnitudes `(μ₊, μ₋)` of the indefinite form `aU² − bV²`
    /// after whitening, so that `aU² − bV² ~ μ₊Y₁² − μ₋Y₂²` with independent
    /// standard normal `Y₁, Y₂`.
    pub fn form_eigenvalues(&self) -> (f64, f64) {
        let (a, b) = (self.a, self.b);
        let s2 = 1.0 - self.rho_uv * self.rho_uv;
        let disc = ((a - b) * (a - b) + 4.0 * a * b * s2).sqrt();
        (0.5 * (disc + (a - b)), 0.5 * (disc - (a - b)))
    }
}

pub fn matched_pep_params(delta: f64, gamma: f64, n: NoiseParams) -> Result<MatchedPepParams> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(invalid(format!("chord length must be > 0, got {delta}")));
    }
    if !(gamma.abs() <= 1.0) {
        return Err(invalid(format!(
            "tangent correlation must lie in [-1, 1], got {gamma}"
        )));
    }
    let (beta, s) = (n.beta, n.sigma_c);
    let shrink = n.mean_scale();
    let one_minus_g2 = 1.0 - gamma * gamma;
    let p_var = one_minus_g2 * beta + s * s;
    let denom = 2.0 * (beta + s * s) * delta * shrink;
    Ok(MatchedPepParams {
        eta_e: shrink * delta / (2.0 * s),
        a: beta * p_var / (s * denom),
        b: beta * s / denom,
        rho_uv: gamma * s / p_var.sqrt(),
        degenerate: gamma.abs() >= DEGENERATE_GAMMA,
    })
}

/// Matched pairwise error probability on a phantom pair with chord `delta` and
/// tangent correlation `gamma`.
///
/// The phantom condition is not checked here; use [`matched_pep_for_pair`]
/// when starting from a constellation.
pub fn matched_phantom_pep(
    delta: f64,
    gamma: f64,
    n: NoiseParams,
    quad_order: usize,
) -> Result<f64> {
    if quad_order < MIN_ORDER {
        return Err(invalid(format!(
            "quadrature order must be >= {MIN_ORDER}, got {quad_order}"
        )));
    }
    let p = matched_pep_params(delta, gamma, n)?;
    if p.degenerate || (p.a == 0.0 && p.b == 0.0) {
        return Ok(upper_tail(p.eta_e));
    }
    let rule = GaussHermite::shared(quad_order)?;
    let w_scale = (1.0 - p.rho_uv * p.rho_uv).max(0.0).sqrt();
    let value = rule.expect2(|u, w| {
        let v = p.rho_uv * u + w_scale * w;
        upper_tail(p.eta_e + p.a * u * u - p.b * v * v)
    });
    if !value.is_finite() {
        return Err(Error::NumericFailure(format!(
            "matched expectation is not finite (delta={delta}, gamma={gamma})"
        )));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Matched phantom-pair error by characteristic-function inversion.
///
/// Independent of the Gauss-Hermite path: the error event is
/// `Z + μ₊Y₁² − μ₋Y₂² ≤ −η_e`, whose distribution function is recovered from
/// its characteristic function by the Gil-Pelaez formula. The integral is
/// evaluated by the trapezoid rule in `log ω`. Accuracy is absolute, about
/// `1e-14`, for any parameter scale.
pub fn matched_phantom_pep_inversion(delta: f64, gamma: f64, n: NoiseParams) -> Result<f64> {
    let p = matched_pep_params(delta, gamma, n)?;
    if p.degenerate || (p.a == 0.0 && p.b == 0.0) {
        return Ok(upper_tail(p.eta_e));
    }
    let (mu_p, mu_m) = p.form_eigenvalues();
    let x = -p.eta_e;
    const T_MIN: f64 = -42.0;
    let t_max = 12f64.ln();
    let h = (0.6 / (1.0 + x.abs())).min(0.1);
    let steps = ((t_max - T_MIN) / h).ceil() as usize;
    if steps > 50_000_000 {
        return Err(Error::NumericFailure(format!(
            "inversion grid too fine for eta_e = {}",
            p.eta_e
        )));
    }
    let mut sum = 0.0;
    for s in 0..=steps {
        let w = (T_MIN + s as f64 * h).exp();
        let phase = 0.5 * (2.0 * mu_p * w).atan() - 0.5 * (2.0 * mu_m * w).atan() - w * x;
        let mag = (-0.5 * w * w).exp()
            * ((1.0 + 4.0 * mu_p * mu_p * w * w) * (1.0 + 4.0 * mu_m * mu_m * w * w)).powf(-0.25);
        sum += mag * phase.sin();
    }
    let value = 0.5 - h / std::f64::consts::PI * sum;
    if !value.is_finite() {
        return Err(Error::NumericFailure(
            "inversion integral is not finite".into(),
        ));
    }
    Ok(value.clamp(0.0, 1.0))
}

/// Matched pairwise error for a constellation pair, refusing non-phantom pairs.
pub fn matched_pep_for_pair(
    c: &Constellation,
    i: usize,
    j: usize,
    n: NoiseParams,
    quad_order: usize,
    tol: f64,
) -> Result<f64> {
    let g = pair_geometry(c, i, j, tol)?;
    if !g.phantom {
        return Err(Error::NotPhantom {
            i,
            j,
            proj_i: g.proj_i.abs(),
            proj_j: g.proj_j.abs(),
        });
    }
    matched_phantom_pep(g.delta, g.gamma, n, quad_order)
}

/// Euclidean antipodal pairwise error, `Q(√(1−β)/σ_c · √(⌈k/2⌉/k))`.
pub fn antipodal_pep_euclidean(k: usize, n: NoiseParams) -> Result<f64> {
    let g = antipodal_geometry(k)?;
    euclidean_pep(&PairGeometry::from_scalars(g.delta, 0.0, g.gamma), n)
}

/// Matched antipodal pairwise error. `k = 1` is the degenerate `γ = −1` case.
pub fn antipodal_pep_matched(k: usize, n: NoiseParams, quad_order: usize) -> Result<f64> {
    let g = antipodal_geometry(k)?;
    matched_phantom_pep(g.delta, g.gamma, n, quad_order)
}

//! Fourier-curve constellations and their deterministic geometry.
//!
//! The curve of harmonic order `k` maps an angle to
//! `(cos θ, sin θ, cos 2θ, sin 2θ, ..., cos kθ, sin kθ) / √k` in `R^{2k}`.
//! It has unit norm and constant speed `v_k = √((k+1)(2k+1)/6)`, and every
//! point is orthogonal to its own tangent.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Absolute tolerance on `|d·t̂|` used to classify a pair as phantom.
pub const DEFAULT_PHANTOM_TOL: f64 = 1e-9;

const TWO_PI: f64 = 2.0 * PI;

fn check_order(k: usize) -> Result<()> {
    if k < 1 {
        return Err(invalid(format!("harmonic order k must be >= 1, got {k}")));
    }
    Ok(())
}

/// Squared speed `(1/k) Σ m² = (k+1)(2k+1)/6` of the curve.
pub fn speed_squared(k: usize) -> f64 {
    let k = k as f64;
    (k + 1.0) * (2.0 * k + 1.0) / 6.0
}

/// Constant speed `v_k` of the curve.
pub fn speed(k: usize) -> f64 {
    speed_squared(k).sqrt()
}

fn write_point(theta: f64, k: usize, out: &mut [f64]) {
    let scale = 1.0 / (k as f64).sqrt();
    for m in 1..=k {
        let (s, c) = (m as f64 * theta).sin_cos();
        out[2 * (m - 1)] = scale * c;
        out[2 * (m - 1) + 1] = scale * s;
    }
}

fn write_tangent(theta: f64, k: usize, out: &mut [f64]) {
    let scale = 1.0 / ((k as f64).sqrt() * speed(k));
    for m in 1..=k {
        let mf = m as f64;
        let (s, c) = (mf * theta).sin_cos();
        out[2 * (m - 1)] = -scale * mf * s;
        out[2 * (m - 1) + 1] = scale * mf * c;
    }
}

/// Point `x(θ)` on the order-`k` Fourier curve.
pub fn curve_point(theta: f64, k: usize) -> Result<Vec<f64>> {
    check_order(k)?;
    let mut out = vec![0.0; 2 * k];
    write_point(theta, k, &mut out);
    Ok(out)
}

/// Unit tangent `x'(θ) / v_k`.
pub fn curve_tangent_unit(theta: f64, k: usize) -> Result<Vec<f64>> {
    check_order(k)?;
    let mut out = vec![0.0; 2 * k];
    write_tangent(theta, k, &mut out);
    Ok(out)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// A finite codebook of curve points with their unit tangents.
///
/// Points and tangents are computed once at construction and stored
/// contiguously; the value is immutable afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct Constellation {
    k: usize,
    phases: Vec<f64>,
    points: Vec<f64>,
    tangents: Vec<f64>,
}

/// Reproducibility record of a constellation: harmonic order, size and phases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConstellationRecord {
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub phases: Vec<f64>,
}

impl Constellation {
    /// Uniform codebook `θ_m = 2πm/M`, `m = 0..M-1`.
    pub fn uniform(k: usize, m: usize) -> Result<Self> {
        check_order(k)?;
        if m < 2 {
            return Err(invalid(format!("codebook size M must be >= 2, got {m}")));
        }
        let phases = (0..m).map(|i| TWO_PI * i as f64 / m as f64).collect();
        Self::build(k, phases)
    }

    /// Codebook over an explicit list of phases.
    ///
    /// Phases must lie in `[0, 2π)` and be strictly increasing.
    pub fn from_phases(k: usize, phases: Vec<f64>) -> Result<Self> {
        check_order(k)?;
        if phases.len() < 2 {
            return Err(invalid(format!(
                "codebook needs at least 2 phases, got {}",
                phases.len()
            )));
        }
        for (idx, &p) in phases.iter().enumerate() {
            if !p.is_finite() || !(0.0..TWO_PI).contains(&p) {
                return Err(invalid(format!("phase {idx} = {p} is outside [0, 2π)")));
            }
        }
        if let Some(w) = phases.windows(2).position(|w| w[1] <= w[0]) {
            return Err(invalid(format!(
                "phases must be strictly increasing (index {} -> {})",
                w,
                w + 1
            )));
        }
        Self::build(k, phases)
    }

    fn build(k: usize, phases: Vec<f64>) -> Result<Self> {
        let dim = 2 * k;
        let mut points = vec![0.0; phases.len() * dim];
        let mut tangents = vec![0.0; phases.len() * dim];
        for (idx, &theta) in phases.iter().enumerate() {
            write_point(theta, k, &mut points[idx * dim..(idx + 1) * dim]);
            write_tangent(theta, k, &mut tangents[idx * dim..(idx + 1) * dim]);
        }
        Ok(Self {
            k,
            phases,
            points,
            tangents,
        })
    }

    pub fn from_record(record: &ConstellationRecord) -> Result<Self> {
        if record.phases.len() != record.m {
            return Err(invalid(format!(
                "record declares M = {} but lists {} phases",
                record.m,
                record.phases.len()
            )));
        }
        Self::from_phases(record.k, record.phases.clone())
    }

    pub fn record(&self) -> ConstellationRecord {
        ConstellationRecord {
            k: self.k,
            m: self.len(),
            phases: self.phases.clone(),
        }
    }

    /// Single-line JSON record `{"k":..,"M":..,"phases":[..]}`.
    pub fn to_record_string(&self) -> String {
        serde_json::to_string(&self.record()).expect("record serialization is infallible")
    }

    pub fn from_record_str(s: &str) -> Result<Self> {
        let record: ConstellationRecord = serde_json::from_str(s)
            .map_err(|e| invalid(format!("bad constellation record: {e}")))?;
        Self::from_record(&record)
    }

    /// Harmonic order.
    pub fn k(&self) -> usize {
        self.k
    }

    /// Ambient dimension `2k`.
    pub fn dim(&self) -> usize {
        2 * self.k
    }

    /// Number of symbols `M`.
    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.points[i * d..(i + 1) * d]
    }

    pub fn tangent(&self, i: usize) -> &[f64] {
        let d = self.dim();
        &self.tangents[i * d..(i + 1) * d]
    }

    /// Whether the phases are the uniform grid `2πm/M`.
    pub fn is_uniform(&self) -> bool {
        let m = self.len() as f64;
        self.phases
            .iter()
            .enumerate()
            .all(|(i, &p)| (p - TWO_PI * i as f64 / m).abs() <= 1e-12)
    }

    fn check_index(&self, i: usize, j: usize) -> Result<()> {
        let m = self.len();
        if i >= m || j >= m {
            return Err(Error::InvalidPair {
                i,
                j,
                reason: format!("index out of range for M = {m}"),
            });
        }
        if i == j {
            return Err(Error::InvalidPair {
                i,
                j,
                reason: "indices must differ".into(),
            });
        }
        Ok(())
    }
}

/// Chord and tangent quantities of an ordered pair `(i, j)` with `i` the
/// transmitted symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairGeometry {
    /// Chord length `‖x_i − x_j‖`.
    pub delta: f64,
    /// `|d·t̂_i| / δ`, measured at the transmit endpoint.
    pub cos_alpha: f64,
    /// Tangent correlation `⟨t̂_i, t̂_j⟩`.
    pub gamma: f64,
    /// Signed projection `d·t̂_i`.
    pub proj_i: f64,
    /// Signed projection `d·t̂_j`.
    pub proj_j: f64,
    /// The chord is orthogonal to both endpoint tangents within tolerance.
    pub phantom: bool,
}

impl PairGeometry {
    /// Geometry of a pair given only its scalar summaries (no projections).
    pub fn from_scalars(delta: f64, cos_alpha: f64, gamma: f64) -> Self {
        Self {
            delta,
            cos_alpha,
            gamma,
            proj_i: cos_alpha * delta,
            proj_j: f64::NAN,
            phantom: false,
        }
    }
}

/// Pair geometry with phantom classification at tolerance `tol`.
pub fn pair_geometry(c: &Constellation, i: usize, j: usize, tol: f64) -> Result<PairGeometry> {
    c.check_index(i, j)?;
    if !(tol > 0.0) {
        return Err(invalid(format!("phantom tolerance must be > 0, got {tol}")));
    }
    let (xi, xj) = (c.point(i), c.point(j));
    let (ti, tj) = (c.tangent(i), c.tangent(j));
    let mut norm2 = 0.0;
    let mut proj_i = 0.0;
    let mut proj_j = 0.0;
    for n in 0..c.dim() {
        let d = xi[n] - xj[n];
        norm2 += d * d;
        proj_i += d * ti[n];
        proj_j += d * tj[n];
    }
    let delta = norm2.sqrt();
    let cos_alpha = (proj_i.abs() / delta).min(1.0);
    let gamma = dot(ti, tj).clamp(-1.0, 1.0);
    Ok(PairGeometry {
        delta,
        cos_alpha,
        gamma,
        proj_i,
        proj_j,
        phantom: proj_i.abs() <= tol && proj_j.abs() <= tol,
    })
}

/// Closed-form geometry of antipodal pairs `θ` and `θ + π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntipodalGeometry {
    pub k: usize,
    /// Chord `2√(⌈k/2⌉/k)`.
    pub delta: f64,
    /// Tangent correlation `3(−1)^k/(2k+1)`.
    pub gamma: f64,
    /// Curve speed `v_k`.
    pub speed: f64,
    /// Arclength-to-chord ratio `π v_k / δ_k`.
    pub rho: f64,
}

pub fn antipodal_geometry(k: usize) -> Result<AntipodalGeometry> {
    check_order(k)?;
    let kf = k as f64;
    let half_up = k.div_ceil(2) as f64;
    let delta = 2.0 * (half_up / kf).sqrt();
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    let gamma = 3.0 * sign / (2.0 * kf + 1.0);
    let v = speed(k);
    Ok(AntipodalGeometry {
        k,
        delta,
        gamma,
        speed: v,
        rho: PI * v / delta,
    })
}

/// Chord length and transmit-side alignment of offset class `q` in a uniform
/// `M`-point codebook.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffsetSpectrum {
    pub q: usize,
    /// Phase offset `Δ_q = 2πq/M`.
    pub angle: f64,
    pub delta: f64,
    pub cos_alpha: f64,
}

fn check_offset(m: usize, q: usize) -> Result<()> {
    if m < 2 {
        return Err(invalid(format!("codebook size M must be >= 2, got {m}")));
    }
    if q < 1 || q >= m {
        return Err(invalid(format!(
            "offset q must lie in 1..={}, got {q}",
            m - 1
        )));
    }
    Ok(())
}

/// Offset spectrum via the finite cosine- and sine-sum identities.
pub fn offset_spectrum(k: usize, m: usize, q: usize) -> Result<OffsetSpectrum> {
    check_order(k)?;
    check_offset(m, q)?;
    let kf = k as f64;
    let angle = TWO_PI * q as f64 / m as f64;
    let half_sin = (angle / 2.0).sin();
    let delta2 =
        2.0 - (2.0 / kf) * (kf * angle / 2.0).sin() * ((kf + 1.0) * angle / 2.0).cos() / half_sin;
    let delta = delta2.max(0.0).sqrt();
    let numer = ((kf + 1.0) * (kf * angle).sin() - kf * ((kf + 1.0) * angle).sin()).abs();
    let cos_alpha = numer / (4.0 * kf * speed(k) * delta * half_sin * half_sin);
    Ok(OffsetSpectrum {
        q,
        angle,
        delta,
        cos_alpha: cos_alpha.min(1.0),
    })
}

/// Third-order small-offset expansion of the offset chord length,
/// `v_k Δ − v_k (3k² + 3k − 1) Δ³ / 120`.
pub fn local_spacing_approx(k: usize, m: usize, q: usize) -> Result<f64> {
    check_order(k)?;
    check_offset(m, q)?;
    let kf = k as f64;
    let angle = TWO_PI * q as f64 / m as f64;
    let v = speed(k);
    Ok(v * angle - v * (3.0 * kf * kf + 3.0 * kf - 1.0) / 120.0 * angle.powi(3))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn norm(v: &[f64]) -> f64 {
        dot(v, v).sqrt()
    }

    #[test]
    fn curve_point_examples() {
        let p = curve_point(0.0, 2).unwrap();
        let s = 1.0 / 2f64.sqrt();
        for (a, b) in p.iter().zip([s, 0.0, s, 0.0]) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = curve_point(PI, 1).unwrap();
        assert!((p[0] + 1.0).abs() < 1e-15);
        assert!(p[1].abs() < 1e-15);
        assert!(curve_point(0.3, 0).is_err());
    }

    #[test]
    fn tangent_examples() {
        let t = curve_tangent_unit(0.0, 1).unwrap();
        assert!(t[0].abs() < 1e-15 && (t[1] - 1.0).abs() < 1e-15);
        assert_eq!(speed_squared(2), 2.5);
        assert_eq!(speed_squared(20), 143.5);
        assert!(curve_tangent_unit(0.0, 0).is_err());
    }

    #[test]
    fn uniform_codebook_invariants() {
        let c = Constellation::uniform(1, 4).unwrap();
        let expect = [0.0, PI / 2.0, PI, 3.0 * PI / 2.0];
        for (a, b) in c.phases().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let c = Constellation::uniform(20, 12).unwrap();
        assert_eq!(c.len(), 12);
        assert_eq!(c.dim(), 40);
        assert!(c.is_uniform());
        for i in 0..c.len() {
            assert!((norm(c.point(i)) - 1.0).abs() < 1e-12);
            assert!((norm(c.tangent(i)) - 1.0).abs() < 1e-12);
            assert!(dot(c.point(i), c.tangent(i)).abs() < 1e-12);
        }
        assert!(Constellation::uniform(3, 1).is_err());
        assert!(Constellation::uniform(0, 4).is_err());
    }

    #[test]
    fn offset_invariance_across_indices() {
        let c = Constellation::uniform(3, 12).unwrap();
        let a = pair_geometry(&c, 0, 3, DEFAULT_PHANTOM_TOL).unwrap();
        let b = pair_geometry(&c, 5, 8, DEFAULT_PHANTOM_TOL).unwrap();
        assert!((a.delta - b.delta).abs() < 1e-12);
        assert!((a.cos_alpha - b.cos_alpha).abs() < 1e-12);
        assert!((a.gamma - b.gamma).abs() < 1e-12);
    }

    #[test]
    fn from_phases_validation() {
        assert!(Constellation::from_phases(2, vec![0.0, 1.0, 3.0]).is_ok());
        assert!(Constellation::from_phases(2, vec![0.0, 1.0, 1.0]).is_err());
        assert!(Constellation::from_phases(2, vec![1.0, 0.5]).is_err());
        assert!(Constellation::from_phases(2, vec![0.0, TWO_PI]).is_err());
        assert!(Constellation::from_phases(2, vec![-0.1, 1.0]).is_err());
        assert!(Constellation::from_phases(2, vec![0.5]).is_err());
        assert!(Constellation::from_phases(2, vec![0.0, f64::NAN]).is_err());
    }

    #[test]
    fn record_round_trip() {
        let c = Constellation::from_phases(3, vec![0.0, 0.7, 2.9, 5.1]).unwrap();
        let s = c.to_record_string();
        assert!(s.contains("\"M\":4"));
        let back = Constellation::from_record_str(&s).unwrap();
        assert_eq!(back, c);
        assert!(Constellation::from_record_str(r#"{"k":2,"M":3,"phases":[0.0,1.0]}"#).is_err());
    }

    #[test]
    fn pair_geometry_antipodal_examples() {
        let c = Constellation::uniform(1, 2).unwrap();
        let g = pair_geometry(&c, 0, 1, DEFAULT_PHANTOM_TOL).unwrap();
        assert!((g.delta - 2.0).abs() < 1e-12);
        assert!((g.gamma + 1.0).abs() < 1e-12);
        assert!(g.phantom);

        let c = Constellation::uniform(2, 4).unwrap();
        let g = pair_geometry(&c, 0, 2, DEFAULT_PHANTOM_TOL).unwrap();
        assert!((g.delta - 2f64.sqrt()).abs() < 1e-12);
        assert!((g.gamma - 0.6).abs() < 1e-12);
        assert!(g.phantom);

        for m in [2usize, 4, 6, 12, 30] {
            let c = Constellation::uniform(7, m).unwrap();
            for i in 0..m {
                let g = pair_geometry(&c, i, (i + m / 2) % m, DEFAULT_PHANTOM_TOL).unwrap();
                assert!(g.cos_alpha < 1e-12);
            }
        }
    }

    #[test]
    fn pair_geometry_errors() {
        let c = Constellation::uniform(2, 4).unwrap();
        assert!(matches!(
            pair_geometry(&c, 1, 1, 1e-9),
            Err(Error::InvalidPair { .. })
        ));
        assert!(pair_geometry(&c, 0, 4, 1e-9).is_err());
        assert!(pair_geometry(&c, 0, 1, 0.0).is_err());
        let g = pair_geometry(&c, 0, 1, 1e-9).unwrap();
        assert!(!g.phantom);
        assert!(g.cos_alpha > 0.0 && g.cos_alpha <= 1.0);
    }

    #[test]
    fn antipodal_closed_forms() {
        let g = antipodal_geometry(1).unwrap();
        assert!((g.delta - 2.0).abs() < 1e-15);
        assert!((g.gamma + 1.0).abs() < 1e-15);
        assert!((g.rho - PI / 2.0).abs() < 1e-15);

        let g = antipodal_geometry(20).unwrap();
        assert!((g.delta - 2f64.sqrt()).abs() < 1e-15);
        assert!((g.gamma - 3.0 / 41.0).abs() < 1e-15);

        let mut prev = f64::INFINITY;
        for k in 1..=200 {
            let g = antipodal_geometry(k).unwrap();
            assert!(g.delta > 2f64.sqrt() - 1e-15 && g.delta <= 2.0);
            assert!(g.gamma.abs() < prev);
            prev = g.gamma.abs();
            let kf = k as f64;
            let alt = PI / 2.0
                * (kf * (kf + 1.0) * (2.0 * kf + 1.0) / (6.0 * k.div_ceil(2) as f64)).sqrt();
            assert!((g.rho - alt).abs() < 1e-12 * alt.max(1.0));
        }
        assert!(antipodal_geometry(0).is_err());
    }

    #[test]
    fn offset_spectrum_antipodal_term() {
        for k in [1usize, 2, 5, 20, 31] {
            for m in [2usize, 4, 12, 64] {
                let s = offset_spectrum(k, m, m / 2).unwrap();
                let a = antipodal_geometry(k).unwrap();
                assert!((s.delta - a.delta).abs() < 1e-12, "k={k} m={m}");
                assert!(s.cos_alpha < 1e-12, "k={k} m={m} cos={}", s.cos_alpha);
            }
        }
    }

    #[test]
    fn offset_spectrum_matches_vectors() {
        let c = Constellation::uniform(3, 6).unwrap();
        let g = pair_geometry(&c, 0, 3, DEFAULT_PHANTOM_TOL).unwrap();
        let s = offset_spectrum(3, 6, 3).unwrap();
        assert!((g.delta - s.delta).abs() < 1e-12);
        assert!((g.cos_alpha - s.cos_alpha).abs() < 1e-12);

        let c = Constellation::uniform(20, 12).unwrap();
        for q in 1..12 {
            let g = pair_geometry(&c, 0, q, DEFAULT_PHANTOM_TOL).unwrap();
            let s = offset_spectrum(20, 12, q).unwrap();
            assert!((g.delta - s.delta).abs() < 1e-12, "q={q}");
            assert!((g.cos_alpha - s.cos_alpha).abs() < 1e-11, "q={q}");
        }
    }

    #[test]
    fn offset_range_errors() {
        assert!(offset_spectrum(3, 6, 0).is_err());
        assert!(offset_spectrum(3, 6, 6).is_err());
        assert!(local_spacing_approx(3, 6, 0).is_err());
        assert!(local_spacing_approx(3, 6, 7).is_err());
    }

    #[test]
    fn local_spacing_examples() {
        let exact = offset_spectrum(5, 512, 1).unwrap().delta;
        let approx = local_spacing_approx(5, 512, 1).unwrap();
        assert!((approx - exact).abs() / exact < 1e-3);

        // leading-order coefficient
        let m = 1 << 20;
        let angle = TWO_PI / m as f64;
        let ratio = local_spacing_approx(7, m, 1).unwrap() / angle;
        assert!((ratio - speed(7)).abs() < 1e-9);

        let (k, m) = (20usize, 240usize);
        let exact = offset_spectrum(k, m, 1).unwrap().delta;
        let heuristic = 2.0 * PI / 3f64.sqrt() * k as f64 / m as f64;
        assert!((exact - heuristic).abs() / exact < 0.05);
    }
}

//! Symbol-error bounds for uniform even Fourier-curve codebooks.

use crate::error::{invalid, Result};
use crate::geometry::{offset_spectrum, PairGeometry};
use crate::pairwise::{antipodal_pep_euclidean, antipodal_pep_matched, euclidean_pep, NoiseParams};

#[derive(Debug, Clone, PartialEq)]
pub struct SerBounds {
    pub k: usize,
    pub m: usize,
    /// Largest single-offset pairwise error; a lower bound on the Euclidean SER.
    pub lower: f64,
    /// Paired union bound; may exceed one.
    pub upper_raw: f64,
    /// `min(upper_raw, 1)`.
    pub upper: f64,
    /// `(q, P^(q))` for `q = 1..=M/2`; the last entry is the antipodal term.
    pub per_offset: Vec<(usize, f64)>,
    /// Matched antipodal pairwise error, when requested.
    pub matched_lower: Option<f64>,
}

fn check_even(k: usize, m: usize) -> Result<()> {
    if k < 1 {
        return Err(invalid(format!("harmonic order k must be >= 1, got {k}")));
    }
    if m < 2 || !m.is_multiple_of(2) {
        return Err(invalid(format!(
            "SER bounds need an even codebook size M >= 2, got {m}"
        )));
    }
    Ok(())
}

/// Euclidean pairwise error between symbols at offset `q` in a uniform codebook.
pub fn euclidean_offset_pep(k: usize, m: usize, q: usize, n: NoiseParams) -> Result<f64> {
    let s = offset_spectrum(k, m, q)?;
    euclidean_pep(
        &PairGeometry::from_scalars(s.delta, s.cos_alpha, f64::NAN),
        n,
    )
}

/// Unpaired union bound `Σ_{q=1}^{M−1} P^(q)`.
pub fn euclidean_union_unpaired(k: usize, m: usize, n: NoiseParams) -> Result<f64> {
    (1..m).map(|q| euclidean_offset_pep(k, m, q, n)).sum()
}

pub fn euclidean_ser_bounds(k: usize, m: usize, n: NoiseParams) -> Result<SerBounds> {
    check_even(k, m)?;
    let half = m / 2;
    let mut per_offset = Vec::with_capacity(half);
    for q in 1..half {
        per_offset.push((q, euclidean_offset_pep(k, m, q, n)?));
    }
    let anti = antipodal_pep_euclidean(k, n)?;
    per_offset.push((half, anti));

    let lower = per_offset.iter().map(|&(_, p)| p).fold(0.0, f64::max);
    let upper_raw = 2.0 * per_offset[..half - 1].iter().map(|&(_, p)| p).sum::<f64>() + anti;
    Ok(SerBounds {
        k,
        m,
        lower,
        upper_raw,
        upper: upper_raw.min(1.0),
        per_offset,
        matched_lower: None,
    })
}

/// Euclidean bounds together with the matched antipodal lower bound.
pub fn ser_bounds(k: usize, m: usize, n: NoiseParams, quad_order: usize) -> Result<SerBounds> {
    let mut b = euclidean_ser_bounds(k, m, n)?;
    b.matched_lower = Some(matched_ser_lower_bound(k, m, n, quad_order)?);
    Ok(b)
}

/// Lower bound on the matched SER from the antipodal offset class alone.
///
/// This covers one of the `M − 1` pairwise comparisons each symbol faces; no
/// analytic matched upper bound is available.
pub fn matched_ser_lower_bound(
    k: usize,
    m: usize,
    n: NoiseParams,
    quad_order: usize,
) -> Result<f64> {
    check_even(k, m)?;
    antipodal_pep_matched(k, n, quad_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pairwise::{upper_tail, DEFAULT_QUAD_ORDER};

    fn noise(beta: f64, sigma_c: f64) -> NoiseParams {
        NoiseParams::new(beta, sigma_c).unwrap()
    }

    #[test]
    fn two_point_codebook_bounds_coincide() {
        for k in [1usize, 2, 7, 20] {
            let n = noise(0.3, 0.4);
            let b = euclidean_ser_bounds(k, 2, n).unwrap();
            let anti = antipodal_pep_euclidean(k, n).unwrap();
            assert_eq!(b.lower, anti);
            assert_eq!(b.upper_raw, anti);
            assert_eq!(b.per_offset, vec![(1, anti)]);
        }
    }

    #[test]
    fn paired_equals_unpaired_union() {
        for (k, m) in [(1usize, 4usize), (3, 8), (20, 12), (9, 30)] {
            for beta in [0.0, 0.45, 0.9] {
                let n = noise(beta, 0.3);
                let b = euclidean_ser_bounds(k, m, n).unwrap();
                let full = euclidean_union_unpaired(k, m, n).unwrap();
                assert!(
                    (b.upper_raw - full).abs() <= 1e-12 * full.max(1e-300),
                    "k={k} m={m}"
                );
                for q in 1..m {
                    let a = euclidean_offset_pep(k, m, q, n).unwrap();
                    let r = euclidean_offset_pep(k, m, m - q, n).unwrap();
                    assert!((a - r).abs() <= 1e-12 * a.max(1e-300));
                }
            }
        }
    }

    #[test]
    fn bound_ordering_and_clamp() {
        let b = euclidean_ser_bounds(20, 12, noise(0.9, 0.3)).unwrap();
        assert!(b.lower <= b.upper);
        assert!(b.upper <= 1.0);
        assert!(b.upper_raw >= b.upper);
        assert_eq!(b.per_offset.len(), 6);
        assert_eq!(
            b.per_offset.last().unwrap().1,
            antipodal_pep_euclidean(20, noise(0.9, 0.3)).unwrap()
        );
    }

    #[test]
    fn beta_zero_reduces_to_awgn_union() {
        let (k, m, s) = (6usize, 10usize, 0.35);
        let b = euclidean_ser_bounds(k, m, noise(0.0, s)).unwrap();
        let classical: Vec<f64> = (1..=m / 2)
            .map(|q| upper_tail(offset_spectrum(k, m, q).unwrap().delta / (2.0 * s)))
            .collect();
        for ((_, p), c) in b.per_offset.iter().zip(&classical) {
            assert!((p - c).abs() <= 1e-14);
        }
    }

    #[test]
    fn odd_codebook_rejected() {
        let n = noise(0.2, 0.3);
        assert!(euclidean_ser_bounds(3, 7, n).is_err());
        assert!(matched_ser_lower_bound(3, 7, n, DEFAULT_QUAD_ORDER).is_err());
        assert!(euclidean_ser_bounds(0, 8, n).is_err());
    }

    #[test]
    fn matched_lower_bound_examples() {
        let n = noise(0.5, 0.3);
        let v = matched_ser_lower_bound(1, 6, n, DEFAULT_QUAD_ORDER).unwrap();
        assert_eq!(v, upper_tail(0.5f64.sqrt() / 0.3));
        let n0 = noise(0.0, 0.3);
        assert_eq!(
            matched_ser_lower_bound(20, 12, n0, DEFAULT_QUAD_ORDER).unwrap(),
            antipodal_pep_euclidean(20, n0).unwrap()
        );
        let b = ser_bounds(20, 12, n, DEFAULT_QUAD_ORDER).unwrap();
        assert!(b.matched_lower.unwrap() > 0.0);
    }
}

//! Gauss-Hermite rules normalized for expectations over a standard normal.
//!
//! A rule of order `n` returns nodes `z_i` and weights `w_i` with
//! `Σ w_i f(z_i) ≈ E[f(Z)]`, `Z ~ N(0, 1)`, exact for polynomials of degree
//! below `2n`. Nodes are the physicists' Hermite roots scaled by `√2`; they are
//! seeded from the Jacobi-matrix eigenvalues and polished by Newton steps.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{invalid, Error, Result};

/// Smallest accepted order.
pub const MIN_ORDER: usize = 8;
/// Largest accepted order.
pub const MAX_ORDER: usize = 512;

#[derive(Debug, Clone, PartialEq)]
pub struct GaussHermite {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussHermite {
    /// Computes a rule of order `n` from scratch. Prefer [`GaussHermite::shared`].
    pub fn new(n: usize) -> Result<Self> {
        if !(MIN_ORDER..=MAX_ORDER).contains(&n) {
            return Err(invalid(format!(
                "quadrature order must lie in {MIN_ORDER}..={MAX_ORDER}, got {n}"
            )));
        }
        let (x, w) = physicists_rule(n)?;
        let norm = 1.0 / PI.sqrt();
        let nodes = x.iter().map(|v| v * std::f64::consts::SQRT_2).collect();
        let weights = w.iter().map(|v| v * norm).collect();
        Ok(Self { nodes, weights })
    }

    /// Process-wide cached rule of order `n`.
    pub fn shared(n: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussHermite>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(Default::default);
        if let Some(rule) = cache.lock().expect("quadrature cache poisoned").get(&n) {
            return Ok(Arc::clone(rule));
        }
        let rule = Arc::new(Self::new(n)?);
        cache
            .lock()
            .expect("quadrature cache poisoned")
            .entry(n)
            .or_insert_with(|| Arc::clone(&rule));
        Ok(rule)
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `E[f(Z)]` for standard normal `Z`.
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&z, &w)| w * f(z))
            .sum()
    }

    /// `E[f(U, W)]` for independent standard normals, tensor-product rule.
    pub fn expect2<F: FnMut(f64, f64) -> f64>(&self, mut f: F) -> f64 {
        let mut total = 0.0;
        for (&u, &wu) in self.nodes.iter().zip(&self.weights) {
            let mut inner = 0.0;
            for (&v, &wv) in self.nodes.iter().zip(&self.weights) {
                inner += wv * f(u, v);
            }
            total += wu * inner;
        }
        total
    }
}

/// Nodes and weights for weight function `exp(-x²)`.
///
/// Starting points are the eigenvalues of the symmetric Jacobi matrix
/// (off-diagonal `√(j/2)`); each is then polished by Newton steps on the
/// orthonormal recurrence, which also yields the weight.
fn physicists_rule(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    const MAX_ITER: usize = 50;
    let mut diag = vec![0.0; n];
    let mut off: Vec<f64> = (1..n).map(|j| (j as f64 / 2.0).sqrt()).collect();
    off.push(0.0);
    tridiagonal_eigenvalues(&mut diag, &mut off)?;
    diag.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));

    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = diag[i];
        let mut dp = 0.0;
        for _ in 0..MAX_ITER {
            let (p, d) = orthonormal_hermite(n, z);
            dp = d;
            let step = p / d;
            z -= step;
            if step.abs() <= 4.0 * f64::EPSILON * z.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = orthonormal_hermite(n, z);
        dp = if d.is_finite() { d } else { dp };
        if !z.is_finite() || !(dp != 0.0) {
            return Err(Error::NumericFailure(format!(
                "Gauss-Hermite root {i} of order {n} did not converge"
            )));
        }
        if n % 2 == 1 && i == n / 2 {
            z = 0.0;
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (dp * dp);
        w[n - 1 - i] = w[i];
    }
    Ok((x, w))
}

/// Orthonormal Hermite value `p_n(z)` and `√(2n) p_{n−1}(z)`.
fn orthonormal_hermite(n: usize, z: f64) -> (f64, f64) {
    let mut p1 = PI.powf(-0.25);
    let mut p2 = 0.0;
    for j in 0..n {
        let jf = j as f64;
        let p3 = p2;
        p2 = p1;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

/// Eigenvalues of a symmetric tridiagonal matrix by implicit QL with Wilkinson
/// shifts. `off[i]` couples rows `i` and `i+1`; `off[n-1]` is ignored.
/// Eigenvalues are left in `diag`.
fn tridiagonal_eigenvalues(diag: &mut [f64], off: &mut [f64]) -> Result<()> {
    let n = diag.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = diag[m].abs() + diag[m + 1].abs();
                if off[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 60 {
                return Err(Error::NumericFailure(
                    "tridiagonal eigenvalue iteration did not converge".into(),
                ));
            }
            let mut g = (diag[l + 1] - diag[l]) / (2.0 * off[l]);
            let mut r = g.hypot(1.0);
            g = diag[m] - diag[l] + off[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * off[i];
                let b = c * off[i];
                r = f.hypot(g);
                off[i + 1] = r;
                if r == 0.0 {
                    diag[i + 1] -= p;
                    off[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = diag[i + 1] - p;
                r = (diag[i] - g) * s + 2.0 * c * b;
                p = s * r;
                diag[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            diag[l] -= p;
            off[l] = g;
            off[m] = 0.0;
        }
    }
    Ok(())
}

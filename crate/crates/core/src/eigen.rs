//! Eigenstructure and `KAK` (singular value) factorization.
//!
//! For `d = 2` everything comes from the characteristic polynomial
//! `t² − tr·t + det`. For `d ≥ 3` eigenvalues come from a real Schur
//! decomposition and eigenvectors from the null direction of `g − λI`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{norm, FloatMatrix};
use crate::projective::ProjectivePoint;

pub const DEFAULT_PROXIMAL_TOL: f64 = 1e-9;
pub const MAX_ITERATIONS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenInfo {
    /// The dominant (real) eigenvalue with its sign.
    pub eigenvalue: f64,
    pub dominant_modulus: f64,
    pub dominant_vector: ProjectivePoint,
    /// Second largest modulus over the largest, in `[0, 1)`.
    pub gap_ratio: f64,
    /// Normal of the invariant complementary hyperplane `V_γ^<`.
    pub hyperplane_normal: ProjectivePoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KakFactorization {
    pub k: FloatMatrix,
    pub singular_values: Vec<f64>,
    pub k_prime: FloatMatrix,
}

impl KakFactorization {
    pub fn reconstruct(&self) -> FloatMatrix {
        let d = self.k.dim();
        let mut scaled = self.k.clone();
        let mut data = scaled.data().to_vec();
        for i in 0..d {
            for j in 0..d {
                data[i * d + j] *= self.singular_values[j];
            }
        }
        scaled = FloatMatrix::new(d, data).expect("square");
        scaled.mul(&self.k_prime)
    }

    pub fn top(&self) -> f64 {
        self.singular_values[0]
    }
}

/// Complex eigenvalues as `(re, im)` pairs.
fn eigenvalues(g: &FloatMatrix) -> Result<Vec<(f64, f64)>> {
    match g.dim() {
        1 => Ok(vec![(g.get(0, 0), 0.0)]),
        2 => {
            let (t, det) = (g.trace(), g.det());
            let disc = t * t - 4.0 * det;
            if disc < 0.0 {
                let im = (-disc).sqrt() / 2.0;
                Ok(vec![(t / 2.0, im), (t / 2.0, -im)])
            } else {
                let s = disc.sqrt();
                // Stable root pair: the larger root without cancellation,
                // the other from the product of roots.
                let big = if t >= 0.0 { (t + s) / 2.0 } else { (t - s) / 2.0 };
                let small = if big != 0.0 { det / big } else { 0.0 };
                Ok(vec![(big, 0.0), (small, 0.0)])
            }
        }
        d => {
            let scale = g.max_abs();
            if scale == 0.0 {
                return Ok(vec![(0.0, 0.0); d]);
            }
            let m = g.scale(1.0 / scale).to_nalgebra();
            let schur = m.try_schur(f64::EPSILON, MAX_ITERATIONS).ok_or_else(|| {
                Error::NumericalFailure(format!("Schur iteration exceeded {MAX_ITERATIONS} steps"))
            })?;
            Ok(schur
                .complex_eigenvalues()
                .iter()
                .map(|c| (c.re * scale, c.im * scale))
                .collect())
        }
    }
}

fn moduli_desc(g: &FloatMatrix) -> Result<(Vec<(f64, f64)>, Vec<f64>)> {
    let mut ev = eigenvalues(g)?;
    ev.sort_by(|a, b| b.0.hypot(b.1).total_cmp(&a.0.hypot(a.1)));
    let moduli = ev.iter().map(|(r, i)| r.hypot(*i)).collect();
    Ok((ev, moduli))
}

pub fn spectral_radius(g: &FloatMatrix) -> f64 {
    match moduli_desc(g) {
        Ok((_, m)) => m[0],
        Err(_) => f64::NAN,
    }
}

pub fn is_expanding(g: &FloatMatrix, tol: f64) -> bool {
    spectral_radius(g) > 1.0 + tol
}

/// Eigenvector of `g` for the real eigenvalue `lambda`.
fn eigenvector(g: &FloatMatrix, lambda: f64) -> Result<Vec<f64>> {
    if g.dim() == 2 {
        let (p, q, r, s) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
        let c1 = [q, lambda - p];
        let c2 = [lambda - s, r];
        let v = if norm(&c1) >= norm(&c2) { c1 } else { c2 };
        if norm(&v) == 0.0 {
            // g = λI on this eigenspace; any vector works.
            return Ok(vec![1.0, 0.0]);
        }
        return Ok(v.to_vec());
    }
    let d = g.dim();
    let scale = g.max_abs().max(lambda.abs());
    let shifted = (g.sub(&FloatMatrix::identity(d).scale(lambda))).scale(1.0 / scale);
    let svd = shifted
        .to_nalgebra()
        .try_svd(false, true, f64::EPSILON, MAX_ITERATIONS)
        .ok_or_else(|| Error::NumericalFailure("SVD did not converge".into()))?;
    let v_t = svd.v_t.expect("requested");
    let (idx, _) = svd
        .singular_values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    Ok(v_t.row(idx).iter().copied().collect())
}

/// Dominant eigen-data when `g` is proximal: a real eigenvalue whose
/// modulus exceeds every other modulus by relative margin `> tol`.
pub fn eigen_dominant(g: &FloatMatrix, tol: f64) -> Result<EigenInfo> {
    let (ev, moduli) = moduli_desc(g)?;
    let top = moduli[0];
    let second = moduli.get(1).copied().unwrap_or(0.0);
    let not_proximal = Error::NotProximal { top, second };
    if !(top > 0.0) || !top.is_finite() {
        return Err(not_proximal);
    }
    // A complex dominant eigenvalue comes with its conjugate of equal modulus.
    if ev[0].1 != 0.0 && ev[0].1.abs() > tol * top {
        return Err(not_proximal);
    }
    if top - second <= tol * top {
        return Err(not_proximal);
    }
    let lambda = ev[0].0;
    let v = eigenvector(g, lambda)?;
    let w = eigenvector(&g.transpose(), lambda)?;
    Ok(EigenInfo {
        eigenvalue: lambda,
        dominant_modulus: top,
        dominant_vector: ProjectivePoint::new(&v)?,
        gap_ratio: second / top,
        hyperplane_normal: ProjectivePoint::new(&w)?,
    })
}

/// `g = k · diag(a¹ ≥ … ≥ a^d) · k′` with `k, k′` orthogonal.
pub fn kak(g: &FloatMatrix) -> Result<KakFactorization> {
    let d = g.dim();
    let scale = g.max_abs();
    if !(scale > 0.0) || !scale.is_finite() {
        return Err(Error::Singular);
    }
    let m: DMatrix<f64> = g.scale(1.0 / scale).to_nalgebra();
    let svd = m
        .try_svd(true, true, f64::EPSILON, MAX_ITERATIONS)
        .ok_or_else(|| Error::NumericalFailure(format!("SVD exceeded {MAX_ITERATIONS} iterations")))?;
    let u = svd.u.expect("requested");
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..d).collect();
    // Stable sort keeps input order among equal singular values.
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let mut k = vec![0.0; d * d];
    let mut kp = vec![0.0; d * d];
    let mut sv = Vec::with_capacity(d);
    for (new, &old) in order.iter().enumerate() {
        sv.push(svd.singular_values[old] * scale);
        for r in 0..d {
            k[r * d + new] = u[(r, old)];
            kp[new * d + r] = v_t[(old, r)];
        }
    }
    Ok(KakFactorization {
        k: FloatMatrix::new(d, k)?,
        singular_values: sv,
        k_prime: FloatMatrix::new(d, kp)?,
    })
}

/// Operator norm (largest singular value).
pub fn operator_norm(g: &FloatMatrix) -> f64 {
    if g.dim() == 2 {
        // Closed form: σ₁² is the top eigenvalue of gᵗg.
        let (p, q, r, s) = (g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1));
        let f = p * p + q * q + r * r + s * s;
        let det = p * s - q * r;
        let disc = (f * f - 4.0 * det * det).max(0.0);
        return ((f + disc.sqrt()) / 2.0).sqrt();
    }
    kak(g).map(|k| k.top()).unwrap_or(0.0)
}

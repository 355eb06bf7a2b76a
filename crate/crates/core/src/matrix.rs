//! Square matrices over exact (integer or rational) and floating domains.
//!
//! Semigroup elements are stored exactly as [`ExactMatrix`]: a matrix of
//! arbitrary-precision integer numerators over one common positive
//! denominator, kept in lowest terms. Word products of length `L` grow like
//! `‖g‖^L`, so fixed-width integers overflow long before the enumeration
//! budgets used here are reached. Analysis (eigenvalues, singular values,
//! projective action) happens on [`FloatMatrix`].

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Entry domain of a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    ExactInteger,
    ExactRational,
    Float64,
}

/// Exact `d×d` matrix: `num / den` with `den > 0` and
/// `gcd(num entries, den) = 1`.
#[derive(Clone)]
pub struct ExactMatrix {
    dim: usize,
    num: Vec<BigInt>,
    den: BigInt,
    det: OnceLock<BigRational>,
}

impl PartialEq for ExactMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim && self.den == other.den && self.num == other.num
    }
}

impl Eq for ExactMatrix {}

impl Hash for ExactMatrix {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.dim.hash(state);
        self.num.hash(state);
        self.den.hash(state);
    }
}

impl fmt::Debug for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ExactMatrix{}", self)
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.dim {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.dim {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.entry(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

fn check_len(dim: usize, len: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidConfig("matrix dimension must be at least 1".into()));
    }
    if len != dim * dim {
        return Err(Error::DimensionMismatch { expected: dim * dim, found: len });
    }
    Ok(())
}

impl ExactMatrix {
    /// Integer matrix from row-major entries.
    pub fn from_integers(dim: usize, entries: &[i64]) -> Result<Self> {
        check_len(dim, entries.len())?;
        Ok(Self::from_parts(dim, entries.iter().map(|&e| BigInt::from(e)).collect(), BigInt::one()))
    }

    pub fn from_bigints(dim: usize, entries: Vec<BigInt>) -> Result<Self> {
        check_len(dim, entries.len())?;
        Ok(Self::from_parts(dim, entries, BigInt::one()))
    }

    /// Rational matrix from row-major entries; brought to a common denominator.
    pub fn from_rationals(dim: usize, entries: &[BigRational]) -> Result<Self> {
        check_len(dim, entries.len())?;
        let den = entries.iter().fold(BigInt::one(), |acc, e| acc.lcm(e.denom()));
        let num = entries.iter().map(|e| e.numer() * (&den / e.denom())).collect();
        Ok(Self::from_parts(dim, num, den))
    }

    fn from_parts(dim: usize, mut num: Vec<BigInt>, mut den: BigInt) -> Self {
        if den.is_negative() {
            den = -den;
            for n in &mut num {
                *n = -&*n;
            }
        }
        if !den.is_one() {
            let g = num.iter().fold(den.clone(), |acc, n| acc.gcd(n));
            if !g.is_one() {
                for n in &mut num {
                    *n /= &g;
                }
                den /= &g;
            }
        }
        ExactMatrix { dim, num, den, det: OnceLock::new() }
    }

    pub fn identity(dim: usize) -> Self {
        let mut num = vec![BigInt::zero(); dim * dim];
        for i in 0..dim {
            num[i * dim + i] = BigInt::one();
        }
        ExactMatrix { dim, num, den: BigInt::one(), det: OnceLock::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn domain(&self) -> Domain {
        if self.den.is_one() {
            Domain::ExactInteger
        } else {
            Domain::ExactRational
        }
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn numerators(&self) -> &[BigInt] {
        &self.num
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn entry(&self, i: usize, j: usize) -> BigRational {
        BigRational::new(self.num[i * self.dim + j].clone(), self.den.clone())
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.dim)
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let d = self.dim;
        let mut num = vec![BigInt::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = &self.num[i * d + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    num[i * d + j] += a * &rhs.num[k * d + j];
                }
            }
        }
        let den = &self.den * &rhs.den;
        let out = Self::from_parts(d, num, den);
        if let (Some(x), Some(y)) = (self.det.get(), rhs.det.get()) {
            let _ = out.det.set(x * y);
        }
        out
    }

    pub fn pow(&self, k: u32) -> ExactMatrix {
        let mut acc = Self::identity(self.dim);
        for _ in 0..k {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn transpose(&self) -> ExactMatrix {
        let d = self.dim;
        let mut num = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                num.push(self.num[j * d + i].clone());
            }
        }
        ExactMatrix { dim: d, num, den: self.den.clone(), det: self.det.clone() }
    }

    /// Exact determinant (fraction-free Bareiss elimination on the
    /// numerators), cached after the first call.
    pub fn det(&self) -> &BigRational {
        self.det.get_or_init(|| {
            let d = self.dim;
            let num_det = bareiss_det(d, self.num.clone());
            let den_pow = num_traits::pow(self.den.clone(), d);
            BigRational::new(num_det, den_pow)
        })
    }

    pub fn is_invertible(&self) -> bool {
        !self.det().is_zero()
    }

    /// `Mᵗ M = I` exactly.
    pub fn is_orthogonal(&self) -> bool {
        self.transpose().mul(self).is_identity()
    }

    /// `M = c·I` for some rational `c` (including zero).
    pub fn is_scalar(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| {
            (0..d).all(|j| {
                if i == j {
                    self.num[i * d + i] == self.num[0]
                } else {
                    self.num[i * d + j].is_zero()
                }
            })
        })
    }

    /// Entries reduced into `[0, m)`; `None` unless the matrix is integral.
    pub fn reduce_mod(&self, m: u64) -> Option<Vec<u64>> {
        if !self.is_integer() {
            return None;
        }
        let mb = BigInt::from(m);
        Some(
            self.num
                .iter()
                .map(|n| n.mod_floor(&mb).to_u64().expect("residue fits in u64"))
                .collect(),
        )
    }

    pub fn to_float(&self) -> FloatMatrix {
        let den = self.den.to_f64().unwrap_or(f64::INFINITY);
        let data = self
            .num
            .iter()
            .map(|n| {
                if self.den.is_one() {
                    n.to_f64().unwrap_or(f64::NAN)
                } else {
                    BigRational::new(n.clone(), self.den.clone())
                        .to_f64()
                        .unwrap_or_else(|| n.to_f64().unwrap_or(f64::NAN) / den)
                }
            })
            .collect();
        FloatMatrix { dim: self.dim, data }
    }
}

fn bareiss_det(d: usize, mut m: Vec<BigInt>) -> BigInt {
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..d {
        if m[k * d + k].is_zero() {
            match (k + 1..d).find(|&r| !m[r * d + k].is_zero()) {
                Some(r) => {
                    for j in 0..d {
                        m.swap(k * d + j, r * d + j);
                    }
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..d {
            for j in k + 1..d {
                let v = &m[i * d + j] * &m[k * d + k] - &m[i * d + k] * &m[k * d + j];
                m[i * d + j] = v / &prev;
            }
        }
        prev = m[k * d + k].clone();
    }
    sign * &m[d * d - 1]
}

/// Dense row-major `d×d` matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct FloatMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl FloatMatrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        check_len(dim, data.len())?;
        Ok(FloatMatrix { dim, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::new(dim, data)
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![0.0; dim * dim];
        for i in 0..dim {
            data[i * dim + i] = 1.0;
        }
        FloatMatrix { dim, data }
    }

    pub fn diag(values: &[f64]) -> Self {
        let dim = values.len();
        let mut m = Self::identity(dim);
        for (i, v) in values.iter().enumerate() {
            m.data[i * dim + i] = *v;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    pub fn mul(&self, rhs: &FloatMatrix) -> FloatMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in product");
        let d = self.dim;
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                for j in 0..d {
                    data[i * d + j] += a * rhs.data[k * d + j];
                }
            }
        }
        FloatMatrix { dim: d, data }
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        debug_assert_eq!(v.len(), d);
        (0..d)
            .map(|i| self.data[i * d..(i + 1) * d].iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn transpose(&self) -> FloatMatrix {
        let d = self.dim;
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                data[j * d + i] = self.data[i * d + j];
            }
        }
        FloatMatrix { dim: d, data }
    }

    pub fn scale(&self, s: f64) -> FloatMatrix {
        FloatMatrix { dim: self.dim, data: self.data.iter().map(|x| x * s).collect() }
    }

    pub fn sub(&self, rhs: &FloatMatrix) -> FloatMatrix {
        FloatMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn det(&self) -> f64 {
        match self.dim {
            1 => self.data[0],
            2 => self.data[0] * self.data[3] - self.data[1] * self.data[2],
            _ => self.to_nalgebra().determinant(),
        }
    }

    /// Action on the second exterior power `Λ²ℝ^d` in the basis
    /// `e_i ∧ e_j`, `i < j` (lexicographic). For `d = 2` this is the
    /// `1×1` matrix `[det]`.
    pub fn exterior_square(&self) -> FloatMatrix {
        let d = self.dim;
        let pairs = wedge_pairs(d);
        let n = pairs.len();
        let mut data = vec![0.0; n * n];
        for (row, &(k, l)) in pairs.iter().enumerate() {
            for (col, &(i, j)) in pairs.iter().enumerate() {
                data[row * n + col] = self.get(k, i) * self.get(l, j) - self.get(l, i) * self.get(k, j);
            }
        }
        FloatMatrix { dim: n, data }
    }

    pub fn to_nalgebra(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn from_nalgebra(m: &nalgebra::DMatrix<f64>) -> FloatMatrix {
        let d = m.nrows();
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(m[(i, j)]);
            }
        }
        FloatMatrix { dim: d, data }
    }
}

pub(crate) fn wedge_pairs(d: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(d * d.saturating_sub(1) / 2);
    for i in 0..d {
        for j in i + 1..d {
            out.push((i, j));
        }
    }
    out
}

/// Components of `u ∧ v` in the basis of [`FloatMatrix::exterior_square`].
pub fn wedge(u: &[f64], v: &[f64]) -> Vec<f64> {
    wedge_pairs(u.len()).into_iter().map(|(i, j)| u[i] * v[j] - u[j] * v[i]).collect()
}

pub fn norm(v: &[f64]) -> f64 {
    // Scaled to avoid overflow for the huge vectors produced by long words.
    let m = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if m == 0.0 || !m.is_finite() {
        return m;
    }
    m * v.iter().map(|x| (x / m) * (x / m)).sum::<f64>().sqrt()
}

pub fn dot(u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> ExactMatrix {
        ExactMatrix::from_integers(2, &[2, 1, 1, 1]).unwrap()
    }

    #[test]
    fn rejects_bad_shapes() {
        assert!(matches!(
            ExactMatrix::from_integers(2, &[1, 2, 3]),
            Err(Error::DimensionMismatch { expected: 4, found: 3 })
        ));
        assert!(ExactMatrix::from_integers(0, &[]).is_err());
    }

    #[test]
    fn exact_product_and_det() {
        let b = ExactMatrix::from_integers(2, &[3, 2, 1, 1]).unwrap();
        let ab = a().mul(&b);
        assert_eq!(ab, ExactMatrix::from_integers(2, &[7, 5, 4, 3]).unwrap());
        assert_eq!(*ab.det(), BigRational::one());
        assert_eq!(ab.domain(), Domain::ExactInteger);
    }

    #[test]
    fn bareiss_matches_cofactor_expansion() {
        let m = ExactMatrix::from_integers(3, &[2, -3, 1, 2, 0, -1, 1, 4, 5]).unwrap();
        // 2(0+4) + 3(10+1) + 1(8-0) = 49
        assert_eq!(*m.det(), BigRational::from_integer(BigInt::from(49)));
        let z = ExactMatrix::from_integers(3, &[0, 1, 2, 0, 3, 4, 0, 5, 6]).unwrap();
        assert!(!z.is_invertible());
    }

    #[test]
    fn rationals_are_reduced() {
        let half = BigRational::new(BigInt::from(1), BigInt::from(2));
        let m = ExactMatrix::from_rationals(
            2,
            &[half.clone(), BigRational::zero(), BigRational::zero(), half.clone()],
        )
        .unwrap();
        assert_eq!(m.domain(), Domain::ExactRational);
        let twice = ExactMatrix::from_integers(2, &[2, 0, 0, 2]).unwrap();
        assert!(m.mul(&twice).is_identity());
        assert_eq!(m.det(), &BigRational::new(BigInt::from(1), BigInt::from(4)));
    }

    #[test]
    fn orthogonality_and_scalars() {
        let rot = ExactMatrix::from_integers(2, &[0, -1, 1, 0]).unwrap();
        assert!(rot.is_orthogonal());
        assert!(!a().is_orthogonal());
        assert!(rot.mul(&rot).is_scalar());
        assert!(!rot.is_scalar());
    }

    #[test]
    fn reduce_mod_is_nonnegative() {
        let m = ExactMatrix::from_integers(2, &[1, -1, -1, 2]).unwrap();
        assert_eq!(m.reduce_mod(5).unwrap(), vec![1, 4, 4, 2]);
    }

    #[test]
    fn exterior_square_in_dim_two_is_det() {
        let f = a().to_float();
        let e = f.exterior_square();
        assert_eq!(e.dim(), 1);
        assert_eq!(e.get(0, 0), 1.0);
    }

    #[test]
    fn exterior_square_acts_on_wedges() {
        let g = FloatMatrix::new(3, vec![1.0, 2.0, 0.0, -1.0, 3.0, 1.0, 2.0, 0.0, 1.0]).unwrap();
        let u = [1.0, -2.0, 0.5];
        let v = [0.0, 1.0, 3.0];
        let lhs = g.exterior_square().mul_vec(&wedge(&u, &v));
        let rhs = wedge(&g.mul_vec(&u), &g.mul_vec(&v));
        for (x, y) in lhs.iter().zip(&rhs) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

//! Points of the projective space `ℙ^{d−1}`, the metric `δ` and the
//! linear action `g.π(x) = π(gx)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{norm, wedge, FloatMatrix};

/// Below this norm a vector is treated as zero.
pub const ZERO_NORM: f64 = 1e-300;

/// A line through the origin, stored as a unit vector whose first
/// coordinate of largest absolute value is positive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectivePoint {
    rep: Vec<f64>,
}

fn is_unit(v: &[f64]) -> bool {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (n - 1.0).abs() <= 8.0 * f64::EPSILON
}

fn pivot(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

impl ProjectivePoint {
    /// `π(v)`. Unit input is only sign-flipped, never rescaled, so
    /// projecting twice is bit-identical to projecting once.
    pub fn new(v: &[f64]) -> Result<Self> {
        if v.is_empty() {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::NumericalFailure("non-finite vector".into()));
        }
        let mut rep: Vec<f64> = if is_unit(v) {
            v.to_vec()
        } else {
            let n = norm(v);
            if !(n > ZERO_NORM) {
                return Err(Error::ZeroVector);
            }
            v.iter().map(|x| x / n).collect()
        };
        if rep[pivot(&rep)] < 0.0 {
            for x in &mut rep {
                *x = -*x;
            }
        }
        Ok(ProjectivePoint { rep })
    }

    /// Point of `ℙ¹` at angle `θ` (taken mod `π`) from the first axis.
    pub fn from_angle(theta: f64) -> Self {
        ProjectivePoint::new(&[theta.cos(), theta.sin()]).expect("unit vector")
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        ProjectivePoint { rep: v }
    }

    pub fn dim(&self) -> usize {
        self.rep.len()
    }

    pub fn rep(&self) -> &[f64] {
        &self.rep
    }

    /// Angle in `[0, π)` of the line, for `d = 2`.
    pub fn angle(&self) -> f64 {
        assert_eq!(self.dim(), 2, "angle parameterization needs d = 2");
        let mut t = self.rep[1].atan2(self.rep[0]);
        if t < 0.0 {
            t += std::f64::consts::PI;
        }
        if t >= std::f64::consts::PI {
            t -= std::f64::consts::PI;
        }
        t
    }

    /// Slope `y/x` of a line in the plane.
    pub fn slope(&self) -> f64 {
        self.rep[1] / self.rep[0]
    }
}

/// `δ(x̄, ȳ) = ‖x ∧ y‖ / (‖x‖‖y‖)`, in `[0, 1]`.
pub fn proj_distance(x: &ProjectivePoint, y: &ProjectivePoint) -> f64 {
    let w = wedge(&x.rep, &y.rep);
    w.iter().map(|c| c * c).sum::<f64>().sqrt().min(1.0)
}

/// `δ` between the lines spanned by arbitrary nonzero vectors.
pub fn vector_distance(u: &[f64], v: &[f64]) -> f64 {
    (norm(&wedge(u, v)) / (norm(u) * norm(v))).min(1.0)
}

pub fn act(g: &FloatMatrix, x: &ProjectivePoint) -> Result<ProjectivePoint> {
    if g.dim() != x.dim() {
        return Err(Error::DimensionMismatch { expected: g.dim(), found: x.dim() });
    }
    ProjectivePoint::new(&g.mul_vec(&x.rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn project_examples() {
        assert_eq!(ProjectivePoint::new(&[2.0, 0.0]).unwrap().rep(), &[1.0, 0.0]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert!(close(ProjectivePoint::new(&[-1.0, -1.0]).unwrap().rep(), &[h, h], 1e-15));
        assert!(close(ProjectivePoint::new(&[3.0, 4.0]).unwrap().rep(), &[0.6, 0.8], 1e-15));
    }

    #[test]
    fn zero_vector_rejected() {
        assert_eq!(ProjectivePoint::new(&[0.0, 0.0]), Err(Error::ZeroVector));
        assert_eq!(ProjectivePoint::new(&[1e-301, 0.0]), Err(Error::ZeroVector));
    }

    #[test]
    fn distance_examples() {
        let e1 = ProjectivePoint::basis(2, 0);
        let e2 = ProjectivePoint::basis(2, 1);
        let diag = ProjectivePoint::new(&[1.0, 1.0]).unwrap();
        assert_eq!(proj_distance(&e1, &e1), 0.0);
        assert_eq!(proj_distance(&e1, &e2), 1.0);
        assert!((proj_distance(&e1, &diag) - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn act_examples() {
        let a = FloatMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 1.0]]).unwrap();
        let e1 = ProjectivePoint::basis(2, 0);
        assert_eq!(act(&a, &e1).unwrap(), ProjectivePoint::new(&[2.0, 1.0]).unwrap());
        assert_eq!(act(&FloatMatrix::identity(2), &e1).unwrap(), e1);
        let d = FloatMatrix::diag(&[4.0, 1.0]);
        let x = ProjectivePoint::new(&[1.0, 1.0]).unwrap();
        let got = act(&d, &x).unwrap();
        assert!(close(got.rep(), ProjectivePoint::new(&[4.0, 1.0]).unwrap().rep(), 1e-15));
    }

    #[test]
    fn angle_round_trip() {
        for k in 0..16 {
            let t = k as f64 * std::f64::consts::PI / 16.0;
            assert!((ProjectivePoint::from_angle(t).angle() - t).abs() < 1e-14);
        }
    }

    fn unit_vec(d: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(-1.0f64..1.0, d).prop_filter("nonzero", |v| norm(v) > 1e-3)
    }

    proptest! {
        #[test]
        fn normalization_idempotent_and_sign_invariant(v in unit_vec(3)) {
            let p = ProjectivePoint::new(&v).unwrap();
            let q = ProjectivePoint::new(p.rep()).unwrap();
            prop_assert_eq!(p.rep(), q.rep());
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            let pn = ProjectivePoint::new(&neg).unwrap();
            prop_assert_eq!(pn.rep(), p.rep());
            prop_assert!((norm(p.rep()) - 1.0).abs() < 1e-12);
        }

        #[test]
        fn delta_is_a_metric(x in unit_vec(3), y in unit_vec(3), z in unit_vec(3)) {
            let (x, y, z) = (
                ProjectivePoint::new(&x).unwrap(),
                ProjectivePoint::new(&y).unwrap(),
                ProjectivePoint::new(&z).unwrap(),
            );
            let dxy = proj_distance(&x, &y);
            prop_assert_eq!(dxy, proj_distance(&y, &x));
            prop_assert!((0.0..=1.0).contains(&dxy));
            prop_assert!(proj_distance(&x, &z) <= dxy + proj_distance(&y, &z) + 1e-12);
        }
    }
}

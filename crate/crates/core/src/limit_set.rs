//! Finite approximations of the limit set `L_Γ` (closure of the dominant
//! directions of proximal elements), the spectrum of log-moduli of those
//! elements, and rescaled "shell" snapshots of orbits at infinity.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::eigen::eigen_dominant;
use crate::error::{Error, Result};
use crate::matrix::{norm, FloatMatrix};
use crate::projective::{act, proj_distance, ProjectivePoint};
use crate::semigroup::{check_budget, enumerate_words, GeneratorSet, Odometer, DEFAULT_WORD_BUDGET};

pub const DEFAULT_DEDUP_EPS: f64 = 1e-6;

/// Upper bound on `pairs · (2B+1)²` evaluations in [`aperiodicity_gap`].
const GAP_EVALUATION_CAP: u128 = 100_000_000;

#[derive(Debug, Clone, Serialize)]
pub struct LimitPoint {
    pub point: ProjectivePoint,
    pub word: Vec<usize>,
    pub label: String,
}

/// Nearest-neighbour index. In the plane, lines are ordered by angle and
/// the nearest line in `δ` is the nearest in circular angle (period `π`).
#[derive(Debug, Clone)]
enum PointIndex {
    Plane(BTreeMap<u64, usize>),
    Linear,
}

#[derive(Debug, Clone)]
pub struct LimitSetApprox {
    points: Vec<LimitPoint>,
    max_len: usize,
    dedup_eps: f64,
    index: PointIndex,
}

impl LimitSetApprox {
    fn empty(dim: usize, max_len: usize, dedup_eps: f64) -> Self {
        let index = if dim == 2 { PointIndex::Plane(BTreeMap::new()) } else { PointIndex::Linear };
        LimitSetApprox { points: Vec::new(), max_len, dedup_eps, index }
    }

    /// Builds an approximation from explicit points (no deduplication).
    pub fn from_points(points: Vec<ProjectivePoint>, dedup_eps: f64) -> Result<Self> {
        let dim = points.first().ok_or(Error::EmptyApprox)?.dim();
        let mut out = Self::empty(dim, 0, dedup_eps);
        for p in points {
            out.insert(LimitPoint { point: p, word: Vec::new(), label: String::new() });
        }
        Ok(out)
    }

    fn insert(&mut self, p: LimitPoint) {
        if let PointIndex::Plane(map) = &mut self.index {
            map.insert(p.point.angle().to_bits(), self.points.len());
        }
        self.points.push(p);
    }

    pub fn points(&self) -> &[LimitPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn dedup_eps(&self) -> f64 {
        self.dedup_eps
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.point.dim())
    }

    /// Angles in `[0, π)` in ascending order (plane only).
    pub fn sorted_angles(&self) -> Vec<f64> {
        match &self.index {
            PointIndex::Plane(map) => map.keys().map(|&k| f64::from_bits(k)).collect(),
            PointIndex::Linear => Vec::new(),
        }
    }

    /// `δ` from `x` to the nearest stored point (`∞` when empty).
    pub fn nearest_distance(&self, x: &ProjectivePoint) -> f64 {
        match &self.index {
            PointIndex::Plane(map) if x.dim() == 2 => {
                let key = x.angle().to_bits();
                let candidates = [
                    map.range(..=key).next_back(),
                    map.range(key..).next(),
                    map.iter().next(),
                    map.iter().next_back(),
                ];
                candidates
                    .into_iter()
                    .flatten()
                    .map(|(_, &i)| proj_distance(x, &self.points[i].point))
                    .fold(f64::INFINITY, f64::min)
            }
            _ => self
                .points
                .iter()
                .map(|p| proj_distance(x, &p.point))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// One-sided Hausdorff distance `max_{x ∈ self} δ(x, other)`.
    pub fn hausdorff_to(&self, other: &LimitSetApprox) -> f64 {
        self.points.iter().map(|p| other.nearest_distance(&p.point)).fold(0.0, f64::max)
    }
}

/// Dominant directions of all proximal words of length `≤ max_len`,
/// deduplicated at `dedup_eps` in breadth-first order (shorter words, then
/// lexicographically smaller words, win).
pub fn limit_set_approx(
    gens: &GeneratorSet,
    max_len: usize,
    tol: f64,
    dedup_eps: f64,
) -> Result<LimitSetApprox> {
    let mut out = LimitSetApprox::empty(gens.dim(), max_len, dedup_eps);
    for w in enumerate_words(gens, max_len)? {
        if w.is_empty() {
            continue;
        }
        let Ok(info) = eigen_dominant(&w.product().to_float(), tol) else { continue };
        if out.nearest_distance(&info.dominant_vector) >= dedup_eps {
            out.insert(LimitPoint {
                point: info.dominant_vector,
                label: gens.word_label(&w),
                word: w.indices().to_vec(),
            });
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyApprox);
    }
    Ok(out)
}

/// `max_{g, x} δ(g.x, target)` over generators `g` and points `x` of
/// `source`: how far `source` is from being carried into `target`.
pub fn forward_invariance_defect(
    gens: &GeneratorSet,
    source: &LimitSetApprox,
    target: &LimitSetApprox,
) -> Result<f64> {
    let mut worst = 0.0_f64;
    for g in gens.generators() {
        let f = g.matrix.to_float();
        for p in source.points() {
            worst = worst.max(target.nearest_distance(&act(&f, &p.point)?));
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Serialize)]
pub struct BoxDimension {
    pub dimension: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    /// `(scale, covering count)` pairs used in the fit.
    pub counts: Vec<(f64, usize)>,
}

/// Box-counting dimension over the angle coordinate (`d = 2`): the least
/// squares slope of `log N(s)` against `log(1/s)`.
pub fn box_dimension(l: &LimitSetApprox, scales: &[f64]) -> Result<BoxDimension> {
    if l.dim() != 2 {
        return Err(Error::Precondition("box dimension needs d = 2".into()));
    }
    if l.len() == 1 {
        return Ok(BoxDimension { dimension: 0.0, residual: 0.0, counts: Vec::new() });
    }
    if l.len() < 10 {
        return Err(Error::Precondition(format!("need at least 10 points, have {}", l.len())));
    }
    if scales.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(Error::Precondition("scales must be strictly descending".into()));
    }
    let usable: Vec<f64> = scales
        .iter()
        .copied()
        .filter(|&s| s.is_finite() && s >= l.dedup_eps() && s < std::f64::consts::PI)
        .collect();
    if usable.len() < 3 {
        return Err(Error::InsufficientScales { usable: usable.len() });
    }
    let angles = l.sorted_angles();
    let counts: Vec<(f64, usize)> = usable
        .iter()
        .map(|&s| {
            let mut n = 0;
            let mut last = None;
            for a in &angles {
                let cell = (a / s).floor() as i64;
                if last != Some(cell) {
                    n += 1;
                    last = Some(cell);
                }
            }
            (s, n)
        })
        .collect();
    let xs: Vec<f64> = counts.iter().map(|(s, _)| (1.0 / s).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|(_, n)| (*n as f64).ln()).collect();
    let (slope, intercept) = least_squares(&xs, &ys);
    let residual = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - slope * x - intercept).powi(2))
        .sum::<f64>()
        / xs.len() as f64)
        .sqrt();
    Ok(BoxDimension { dimension: slope, residual, counts })
}

fn least_squares(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumEntry {
    pub word: Vec<usize>,
    pub label: String,
    pub log_modulus: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    pub fn log_moduli(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.log_modulus).collect()
    }
}

/// `log |λ_w|` for every proximal word `w` of length `≤ max_len`.
pub fn spectrum(gens: &GeneratorSet, max_len: usize, tol: f64) -> Result<Spectrum> {
    let mut entries = Vec::new();
    for w in enumerate_words(gens, max_len)? {
        if w.is_empty() {
            continue;
        }
        if let Ok(info) = eigen_dominant(&w.product().to_float(), tol) {
            entries.push(SpectrumEntry {
                word: w.indices().to_vec(),
                label: gens.word_label(&w),
                log_modulus: info.dominant_modulus.ln(),
            });
        }
    }
    Ok(Spectrum { entries })
}

#[derive(Debug, Clone, Serialize)]
pub struct AperiodicityReport {
    /// Largest gap of the combinations on the circle `ℝ / s₁ℤ`.
    pub gap: f64,
    /// `s₁`, the smallest positive entry.
    pub base: f64,
    pub distinct: usize,
    /// Every ratio `sᵢ / s₁` is within `1e−12` of a rational with
    /// denominator `≤ coeff_bound`: the entries look like a lattice.
    pub degenerate: bool,
}

/// Best rational approximation error of `x` with denominators `≤ qmax`
/// (continued-fraction convergents).
fn rational_defect(x: f64, qmax: u64) -> f64 {
    let (mut p0, mut q0, mut p1, mut q1) = (0.0_f64, 1.0_f64, 1.0_f64, 0.0_f64);
    let mut r = x;
    let mut best = (x - x.round()).abs();
    for _ in 0..64 {
        let a = r.floor();
        let (p2, q2) = (a * p1 + p0, a * q1 + q0);
        if q2 > qmax as f64 {
            break;
        }
        best = best.min((x - p2 / q2).abs());
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let frac = r - a;
        if frac.abs() < 1e-15 {
            break;
        }
        r = 1.0 / frac;
    }
    best
}

/// Density evidence for the subgroup of `ℝ` generated by the entries:
/// the maximum gap of `{mᵢsᵢ + mⱼsⱼ mod s₁ : |mᵢ|, |mⱼ| ≤ B}`.
pub fn aperiodicity_gap(entries: &[f64], coeff_bound: u32) -> Result<AperiodicityReport> {
    let mut distinct: Vec<f64> = Vec::new();
    let mut sorted: Vec<f64> = entries.iter().copied().filter(|x| x.is_finite() && *x != 0.0).collect();
    sorted.sort_by(f64::total_cmp);
    for x in sorted {
        if distinct.last().is_none_or(|&y: &f64| (x - y).abs() > 1e-12 * x.abs().max(y.abs())) {
            distinct.push(x);
        }
    }
    if distinct.len() < 2 {
        return Err(Error::Precondition("need at least two distinct nonzero entries".into()));
    }
    let base = distinct
        .iter()
        .copied()
        .filter(|x| *x > 0.0)
        .fold(f64::INFINITY, f64::min);
    if !base.is_finite() {
        return Err(Error::Precondition("no positive entry".into()));
    }
    let b = coeff_bound as i64;
    let pairs = (distinct.len() * (distinct.len() - 1) / 2) as u128;
    let per_pair = ((2 * b + 1) as u128).pow(2);
    if pairs * per_pair > GAP_EVALUATION_CAP {
        return Err(Error::BudgetExceeded { needed: pairs * per_pair, budget: GAP_EVALUATION_CAP });
    }
    let mut values = Vec::with_capacity((pairs * per_pair) as usize);
    for i in 0..distinct.len() {
        for j in i + 1..distinct.len() {
            for mi in -b..=b {
                for mj in -b..=b {
                    let v = (mi as f64 * distinct[i] + mj as f64 * distinct[j]).rem_euclid(base);
                    values.push(if v >= base { 0.0 } else { v });
                }
            }
        }
    }
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut gap = base - values.last().expect("nonempty") + values[0];
    for w in values.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    let degenerate = distinct
        .iter()
        .all(|&s| rational_defect(s / base, coeff_bound.max(1) as u64) <= 1e-12 * (s / base).abs().max(1.0));
    Ok(AperiodicityReport { gap, base, distinct: distinct.len(), degenerate })
}

/// Orbit vectors `w·v` for all words of length `≤ max_len`, breadth-first.
pub fn orbit_vectors(gens: &GeneratorSet, v: &[f64], max_len: usize) -> Result<Vec<Vec<f64>>> {
    if v.len() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), found: v.len() });
    }
    check_budget(gens.len(), max_len, DEFAULT_WORD_BUDGET)?;
    let floats = gens.floats();
    let mut out = Vec::new();
    let mut odo = Odometer::new(gens.len(), max_len, FloatMatrix::identity(gens.dim()), |p: &FloatMatrix, i| {
        p.mul(&floats[i])
    });
    while let Some((_, p)) = odo.advance() {
        out.push(p.mul_vec(v));
    }
    Ok(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct ShellPoint {
    pub direction: ProjectivePoint,
    /// `‖x‖ c^{−t}`, in `[1, c)`.
    pub radial: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShellSnapshot {
    pub c: f64,
    pub t: i32,
    pub points: Vec<ShellPoint>,
}

/// Points with `‖x‖ ∈ [cᵗ, c^{t+1})`, rescaled by `c^{−t}`.
pub fn shell_snapshot(points: &[Vec<f64>], c: f64, t: i32) -> Result<ShellSnapshot> {
    if !(c > 1.0) || !c.is_finite() {
        return Err(Error::Precondition(format!("shell base c = {c} must exceed 1")));
    }
    let lo = c.powi(t);
    let hi = c.powi(t + 1);
    let mut out = Vec::new();
    for x in points {
        let n = norm(x);
        if n >= lo && n < hi {
            out.push(ShellPoint { direction: ProjectivePoint::new(x)?, radial: (n / lo).clamp(1.0, c) });
        }
    }
    if out.is_empty() {
        return Err(Error::EmptyShell { t });
    }
    Ok(ShellSnapshot { c, t, points: out })
}

/// One-sided Hausdorff distance from the snapshot to `L × [1, c]` in the
/// product metric `δ + |Δr| / c`.
pub fn shell_distance(snapshot: &ShellSnapshot, l: &LimitSetApprox) -> f64 {
    snapshot
        .points
        .iter()
        .map(|p| {
            let r = p.radial;
            l.nearest_distance(&p.direction) + (r - r.clamp(1.0, snapshot.c)).abs() / snapshot.c
        })
        .fold(0.0, f64::max)
}

//! The `μ`-random walk on `ℙ(V)` and on its circle extension `ℙ_c(V)`.
//!
//! Letters are drawn i.i.d. from the weights. `S_n = g_n ⋯ g_1` (letters
//! applied on the left) drives trajectories; `X_n = g_1 ⋯ g_n` is used by
//! [`dirac_concentration`]. Trial `t` uses ChaCha stream `t` of the seed,
//! and trials are aggregated in index order with compensated summation, so
//! the results do not depend on the number of threads.

use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigen::operator_norm;
use crate::error::{Error, Result};
use crate::limit_set::LimitSetApprox;
use crate::matrix::{norm, wedge, FloatMatrix};
use crate::projective::{act, ProjectivePoint};
use crate::random::{categorical, trial_rng, uniform_sphere};
use crate::semigroup::GeneratorSet;
use crate::stats::{circle_w1, lipschitz_discrepancy, mean_and_stderr, MeanEstimate};

pub const DEFAULT_BURN_IN: usize = 1000;
/// Number of random test functions used to compare measures when `d ≥ 3`.
pub const DISCREPANCY_FUNCTIONS: usize = 64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WalkConfig {
    pub weights: Vec<f64>,
    pub seed: u64,
    pub n_steps: usize,
    pub burn_in: usize,
    pub c: f64,
}

impl WalkConfig {
    pub fn new(weights: Vec<f64>, seed: u64, n_steps: usize, c: f64) -> Self {
        WalkConfig { weights, seed, n_steps, burn_in: DEFAULT_BURN_IN, c }
    }

    /// Uniform weights over `n` generators.
    pub fn uniform(n: usize, seed: u64, n_steps: usize, c: f64) -> Self {
        Self::new(vec![1.0 / n as f64; n], seed, n_steps, c)
    }

    /// `α = 2π / log c`.
    pub fn alpha(&self) -> f64 {
        TAU / self.c.ln()
    }

    pub fn validate(&self, gens: &GeneratorSet) -> Result<()> {
        if self.weights.len() != gens.len() {
            return Err(Error::InvalidConfig(format!(
                "{} weights for {} generators",
                self.weights.len(),
                gens.len()
            )));
        }
        if self.weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidConfig("weights must be finite and nonnegative".into()));
        }
        let total: f64 = self.weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("weights sum to {total}, not 1")));
        }
        if !(self.c > 1.0) || !self.c.is_finite() {
            return Err(Error::InvalidConfig(format!("c = {} must exceed 1", self.c)));
        }
        Ok(())
    }

    fn cumulative(&self) -> Vec<f64> {
        let total: f64 = self.weights.iter().sum();
        let mut acc = 0.0;
        self.weights
            .iter()
            .map(|w| {
                acc += w / total;
                acc
            })
            .collect()
    }
}

/// A point `(x̄, z)` of `ℙ_c(V) ≅ ℙ(V) × 𝕋_c`. The circle coordinate is
/// kept in turns, `z = 2π·turns`, `turns ∈ [0, 1)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PcPoint {
    pub base: ProjectivePoint,
    pub turns: f64,
}

impl PcPoint {
    pub fn new(base: ProjectivePoint, z: f64) -> Self {
        PcPoint { base, turns: wrap_turns(z / TAU) }
    }

    /// The class of a nonzero vector `v`: `(v̄, ‖v‖^{iα})`.
    pub fn from_vector(v: &[f64], c: f64) -> Result<Self> {
        Ok(PcPoint { base: ProjectivePoint::new(v)?, turns: wrap_turns(norm(v).ln() / c.ln()) })
    }

    /// `z ∈ [0, 2π)`.
    pub fn z(&self) -> f64 {
        let z = TAU * self.turns;
        if z >= TAU { 0.0 } else { z }
    }
}

fn wrap_turns(t: f64) -> f64 {
    let r = t - t.floor();
    if r >= 1.0 { 0.0 } else { r }
}

fn add_turns(t: f64, shift: f64) -> f64 {
    let frac = shift - shift.floor();
    if frac == 0.0 {
        return t;
    }
    let s = t + frac;
    if s >= 1.0 { s - 1.0 } else { s }
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalMeasure<T> {
    pub samples: Vec<T>,
}

impl<T> EmpiricalMeasure<T> {
    pub fn count(&self) -> usize {
        self.samples.len()
    }
}

impl EmpiricalMeasure<PcPoint> {
    /// Circle coordinates in turns, for comparison against `λ_c`.
    pub fn turns(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.turns).collect()
    }

    /// Base angles in `[0, π)` (`d = 2`).
    pub fn angles(&self) -> Vec<f64> {
        self.samples.iter().map(|p| p.base.angle()).collect()
    }
}

/// `n` letters for trial `trial`.
pub fn sample_letters(cfg: &WalkConfig, n: usize, trial: u64) -> Vec<usize> {
    let cumulative = cfg.cumulative();
    let mut rng = trial_rng(cfg.seed, trial);
    (0..n).map(|_| categorical(&mut rng, &cumulative)).collect()
}

/// `g.(v̄, z) = (g.v̄, z + α log‖g v‖)` with `v` the unit representative.
/// Homotheties move only the circle coordinate, by `log|s| / log c` turns.
pub fn step_pc(g: &FloatMatrix, v: &PcPoint, c: f64) -> Result<PcPoint> {
    let log_c = c.ln();
    if let Some(s) = scalar_value(g) {
        if s == 0.0 {
            return Err(Error::Singular);
        }
        return Ok(PcPoint { base: v.base.clone(), turns: add_turns(v.turns, s.abs().ln() / log_c) });
    }
    let image = g.mul_vec(v.base.rep());
    let n = norm(&image);
    Ok(PcPoint { base: ProjectivePoint::new(&image)?, turns: add_turns(v.turns, n.ln() / log_c) })
}

fn scalar_value(g: &FloatMatrix) -> Option<f64> {
    let d = g.dim();
    let s = g.get(0, 0);
    let scalar = (0..d).all(|i| (0..d).all(|j| g.get(i, j) == if i == j { s } else { 0.0 }));
    scalar.then_some(s)
}

/// Post-burn-in occupation measure of the trajectory `v_n = g_n.v_{n−1}`.
pub fn run_chain(
    gens: &GeneratorSet,
    cfg: &WalkConfig,
    start: &PcPoint,
    trial: u64,
) -> Result<EmpiricalMeasure<PcPoint>> {
    cfg.validate(gens)?;
    if cfg.n_steps <= cfg.burn_in {
        return Err(Error::InvalidConfig(format!(
            "n_steps = {} must exceed burn_in = {}",
            cfg.n_steps, cfg.burn_in
        )));
    }
    if start.base.dim() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), found: start.base.dim() });
    }
    let floats = gens.floats();
    let mut v = start.clone();
    let mut samples = Vec::with_capacity(cfg.n_steps - cfg.burn_in);
    for (k, letter) in sample_letters(cfg, cfg.n_steps, trial).into_iter().enumerate() {
        v = step_pc(&floats[letter], &v, cfg.c)?;
        if k >= cfg.burn_in {
            samples.push(v.clone());
        }
    }
    Ok(EmpiricalMeasure { samples })
}

/// Distance between the base marginals of two occupation measures:
/// circle Wasserstein-1 on the angle for `d = 2`, otherwise the mean
/// discrepancy over seeded Lipschitz test functions.
pub fn occupation_distance(
    a: &EmpiricalMeasure<PcPoint>,
    b: &EmpiricalMeasure<PcPoint>,
    function_seed: u64,
) -> f64 {
    if a.samples.first().is_some_and(|p| p.base.dim() == 2) {
        circle_w1(&a.angles(), &b.angles(), std::f64::consts::PI)
    } else {
        let reps = |m: &EmpiricalMeasure<PcPoint>| -> Vec<Vec<f64>> {
            m.samples.iter().map(|p| p.base.rep().to_vec()).collect()
        };
        lipschitz_discrepancy(&reps(a), &reps(b), function_seed, DISCREPANCY_FUNCTIONS)
    }
}

/// Unit vectors `u ≈ S x`, `w ≈ S y` and `ω = (Sx ∧ Sy) / (‖Sx‖‖Sy‖)`
/// propagated through `Λ²`, so `δ(S.x, S.y) = ‖ω‖` keeps full relative
/// precision far below the rounding floor of `u` and `w`.
struct PairTracker {
    u: Vec<f64>,
    w: Vec<f64>,
    omega: Vec<f64>,
}

impl PairTracker {
    fn new(x: &ProjectivePoint, y: &ProjectivePoint) -> Self {
        PairTracker { u: x.rep().to_vec(), w: y.rep().to_vec(), omega: wedge(x.rep(), y.rep()) }
    }

    fn step(&mut self, g: &FloatMatrix, g2: &FloatMatrix) {
        let u = g.mul_vec(&self.u);
        let w = g.mul_vec(&self.w);
        let (nu, nw) = (norm(&u), norm(&w));
        let scale = nu * nw;
        self.omega = g2.mul_vec(&self.omega).into_iter().map(|c| c / scale).collect();
        self.u = u.into_iter().map(|c| c / nu).collect();
        self.w = w.into_iter().map(|c| c / nw).collect();
    }

    fn delta(&self) -> f64 {
        self.omega.iter().map(|c| c * c).sum::<f64>().sqrt().min(1.0)
    }
}

fn parallel_trials<F>(trials: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(u64) -> Result<f64> + Sync + Send,
{
    (0..trials as u64).into_par_iter().map(&f).collect()
}

/// Monte-Carlo mean of `δ(S_n.x, S_n.y)` over `trials` letter sequences.
pub fn contraction_stat(
    gens: &GeneratorSet,
    cfg: &WalkConfig,
    x: &ProjectivePoint,
    y: &ProjectivePoint,
    n: usize,
    trials: usize,
) -> Result<MeanEstimate> {
    cfg.validate(gens)?;
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be positive".into()));
    }
    let floats = gens.floats();
    let squares: Vec<FloatMatrix> = floats.iter().map(FloatMatrix::exterior_square).collect();
    let values = parallel_trials(trials, |t| {
        let mut pair = PairTracker::new(x, y);
        for letter in sample_letters(cfg, n, t) {
            pair.step(&floats[letter], &squares[letter]);
        }
        Ok(pair.delta())
    })?;
    Ok(mean_and_stderr(&values))
}

/// A matrix kept as `exp(log_scale) · m` with `max |m_ij| = 1`.
#[derive(Clone)]
struct ScaledMatrix {
    m: FloatMatrix,
    log_scale: f64,
}

impl ScaledMatrix {
    fn identity(d: usize) -> Self {
        ScaledMatrix { m: FloatMatrix::identity(d), log_scale: 0.0 }
    }

    fn renormalized(m: FloatMatrix, log_scale: f64) -> Self {
        let s = m.max_abs();
        ScaledMatrix { m: m.scale(1.0 / s), log_scale: log_scale + s.ln() }
    }

    fn then_left(&self, g: &FloatMatrix) -> Self {
        Self::renormalized(g.mul(&self.m), self.log_scale)
    }

    fn then_right(&self, g: &FloatMatrix) -> Self {
        Self::renormalized(self.m.mul(g), self.log_scale)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DiracReport {
    /// Cloud point minimizing the maximal `δ` to the rest of the cloud.
    pub center: ProjectivePoint,
    pub diameter: f64,
}

/// Pushes `probe_count` uniform points through `X_n = g_1 ⋯ g_n` and
/// measures the spread of the image cloud.
pub fn dirac_concentration(
    gens: &GeneratorSet,
    cfg: &WalkConfig,
    n: usize,
    probe_count: usize,
    trial: u64,
) -> Result<DiracReport> {
    cfg.validate(gens)?;
    if probe_count < 2 {
        return Err(Error::InvalidConfig("probe_count must be at least 2".into()));
    }
    let d = gens.dim();
    let floats = gens.floats();
    let mut x = ScaledMatrix::identity(d);
    let mut x2 = ScaledMatrix::identity(d * (d - 1) / 2);
    for letter in sample_letters(cfg, n, trial) {
        x = x.then_right(&floats[letter]);
        x2 = x2.then_right(&floats[letter].exterior_square());
    }
    // Probes come from a stream disjoint from every letter stream.
    let mut rng = trial_rng(cfg.seed ^ 0x9e37_79b9_7f4a_7c15, trial);
    let probes: Vec<Vec<f64>> = (0..probe_count).map(|_| uniform_sphere(&mut rng, d)).collect();
    let images: Vec<Vec<f64>> = probes.iter().map(|p| x.m.mul_vec(p)).collect();
    let log_norms: Vec<f64> = images.iter().map(|v| norm(v).ln()).collect();

    let mut dist = vec![0.0; probe_count * probe_count];
    for i in 0..probe_count {
        for j in i + 1..probe_count {
            let w = x2.m.mul_vec(&wedge(&probes[i], &probes[j]));
            let nw = norm(&w);
            let delta = if nw == 0.0 {
                0.0
            } else {
                (nw.ln() + x2.log_scale - 2.0 * x.log_scale - log_norms[i] - log_norms[j]).exp().min(1.0)
            };
            dist[i * probe_count + j] = delta;
            dist[j * probe_count + i] = delta;
        }
    }
    let row_max = |i: usize| dist[i * probe_count..(i + 1) * probe_count].iter().copied().fold(0.0, f64::max);
    let diameter = (0..probe_count).map(row_max).fold(0.0, f64::max);
    let best = (0..probe_count)
        .min_by(|&i, &j| row_max(i).total_cmp(&row_max(j)))
        .expect("nonempty");
    Ok(DiracReport { center: ProjectivePoint::new(&images[best])?, diameter })
}

#[derive(Debug, Clone, Serialize)]
pub struct NormRatio {
    /// `‖S_n x‖ / ‖S_n‖`.
    pub ratio: f64,
    /// `|⟨z*, x⟩|` with `z*` the direction of `S_nᵀ` applied to a probe.
    pub z_star_value: f64,
    pub z_star: ProjectivePoint,
    pub residual: f64,
}

/// `‖S_n x‖ / ‖S_n‖` along one trajectory, with the transpose-walk estimate
/// of its limit.
pub fn norm_ratio_limit(
    gens: &GeneratorSet,
    cfg: &WalkConfig,
    x: &[f64],
    n: usize,
    trial: u64,
) -> Result<NormRatio> {
    cfg.validate(gens)?;
    if x.len() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), found: x.len() });
    }
    if (norm(x) - 1.0).abs() > 1e-12 {
        return Err(Error::Precondition("x must be a unit vector".into()));
    }
    let d = gens.dim();
    let floats = gens.floats();
    let mut s = ScaledMatrix::identity(d);
    for letter in sample_letters(cfg, n, trial) {
        s = s.then_left(&floats[letter]);
    }
    let ratio = if n == 0 { 1.0 } else { norm(&s.m.mul_vec(x)) / operator_norm(&s.m) };
    let probe = vec![1.0 / (d as f64).sqrt(); d];
    let z_star = ProjectivePoint::new(&s.m.transpose().mul_vec(&probe))?;
    let z_star_value = crate::matrix::dot(z_star.rep(), x).abs();
    Ok(NormRatio { ratio, z_star_value, residual: (ratio - z_star_value).abs(), z_star })
}

/// `|log‖(gh)x‖ − log‖g·(hx/‖hx‖)‖ − log‖hx‖|` for the unit representative `x`.
pub fn cocycle_residual(g: &FloatMatrix, h: &FloatMatrix, x: &ProjectivePoint) -> f64 {
    let xr = x.rep();
    let hx = h.mul_vec(xr);
    let nhx = norm(&hx);
    let hx_unit: Vec<f64> = hx.iter().map(|c| c / nhx).collect();
    let lhs = norm(&g.mul(h).mul_vec(xr)).ln();
    (lhs - norm(&g.mul_vec(&hx_unit)).ln() - nhx.ln()).abs()
}

/// Mean over trials of `(1/n) log‖S_n‖`, with its standard error.
pub fn lyapunov_top(gens: &GeneratorSet, cfg: &WalkConfig, n: usize, trials: usize) -> Result<MeanEstimate> {
    cfg.validate(gens)?;
    if n == 0 || trials == 0 {
        return Err(Error::InvalidConfig("n and trials must be positive".into()));
    }
    let floats = gens.floats();
    let values = parallel_trials(trials, |t| {
        let mut s = ScaledMatrix::identity(gens.dim());
        for letter in sample_letters(cfg, n, t) {
            s = s.then_left(&floats[letter]);
        }
        Ok((operator_norm(&s.m).ln() + s.log_scale) / n as f64)
    })?;
    Ok(mean_and_stderr(&values))
}

/// `δ` from the base of `S_n.start` to the nearest point of `L`. The circle
/// coordinate does not enter, since the limit set in `ℙ_c(V)` is `L × 𝕋_c`.
pub fn walk_limitset_distance(
    gens: &GeneratorSet,
    cfg: &WalkConfig,
    start: &PcPoint,
    l: &LimitSetApprox,
    n: usize,
    trial: u64,
) -> Result<f64> {
    cfg.validate(gens)?;
    if l.is_empty() {
        return Err(Error::EmptyApprox);
    }
    let floats = gens.floats();
    let mut x = start.base.clone();
    for letter in sample_letters(cfg, n, trial) {
        x = act(&floats[letter], &x)?;
    }
    Ok(l.nearest_distance(&x))
}

/// A random point of `ℙ_c(V)` drawn from stream `trial` of `seed`.
pub fn random_pc_point(dim: usize, seed: u64, trial: u64) -> Result<PcPoint> {
    let mut rng = trial_rng(seed, trial);
    let v = uniform_sphere(&mut rng, dim);
    let turns: f64 = rng.random();
    Ok(PcPoint { base: ProjectivePoint::new(&v)?, turns })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{eigen_dominant, DEFAULT_PROXIMAL_TOL};
    use crate::limit_set::{limit_set_approx, DEFAULT_DEDUP_EPS};
    use crate::semigroup::tests::{ab, gens};
    use crate::stats::ks_uniform;
    use proptest::prelude::*;

    const LOG_LA: f64 = 0.962_423_650_119_206_9;
    const LOG_LB: f64 = 1.316_957_896_924_816_6;

    fn la() -> f64 {
        LOG_LA.exp()
    }

    fn only_a() -> GeneratorSet {
        gens("dim 2\ngen a\n2 1\n1 1\n")
    }

    #[test]
    fn config_validation() {
        let g = ab();
        let ok = WalkConfig::uniform(2, 0, 10, 2.0);
        assert!(ok.validate(&g).is_ok());
        assert!((ok.alpha() * 2f64.ln() - TAU).abs() < 1e-12);
        let mut bad = ok.clone();
        bad.weights = vec![0.7, 0.7];
        assert!(matches!(bad.validate(&g), Err(Error::InvalidConfig(_))));
        bad.weights = vec![1.0];
        assert!(matches!(bad.validate(&g), Err(Error::InvalidConfig(_))));
        let mut bad = ok;
        bad.c = 1.0;
        assert!(matches!(bad.validate(&g), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn letters() {
        let degenerate = WalkConfig::new(vec![1.0, 0.0], 5, 0, 2.0);
        assert!(sample_letters(&degenerate, 1000, 0).iter().all(|&l| l == 0));
        let fair = WalkConfig::uniform(2, 11, 0, 2.0);
        let s = sample_letters(&fair, 100_000, 0);
        let freq = s.iter().filter(|&&l| l == 0).count() as f64 / s.len() as f64;
        assert!((0.495..=0.505).contains(&freq), "{freq}");
        assert_eq!(s, sample_letters(&fair, 100_000, 0));
        assert_ne!(s[..64], sample_letters(&fair, 64, 1)[..]);
    }

    #[test]
    fn step_examples() {
        let x = PcPoint::new(ProjectivePoint::from_angle(0.3), 1.0);
        assert_eq!(step_pc(&FloatMatrix::identity(2), &x, 2.0).unwrap(), x);

        let e1 = PcPoint::new(ProjectivePoint::basis(2, 0), 2.5);
        let two = FloatMatrix::diag(&[2.0, 2.0]);
        assert_eq!(step_pc(&two, &e1, 2.0).unwrap(), e1);

        let a = ab().float(0).clone();
        let y = step_pc(&a, &PcPoint::new(ProjectivePoint::basis(2, 0), 0.0), 2.0).unwrap();
        let alpha = TAU / 2f64.ln();
        assert!((y.z() - (alpha * 5f64.sqrt().ln()).rem_euclid(TAU)).abs() < 1e-12);
        assert!((y.base.slope() - 0.5).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn homotheties_act_trivially(theta in 0.0f64..3.0, turns in 0.0f64..1.0, c in 1.01f64..50.0) {
            let x = PcPoint { base: ProjectivePoint::from_angle(theta), turns };
            for k in [-2.0, -1.0, 1.0, 3.0] {
                let g = FloatMatrix::diag(&[c.powf(k), c.powf(k)]);
                let y = step_pc(&g, &x, c).unwrap();
                prop_assert_eq!(&y.base, &x.base);
                prop_assert!((y.turns - x.turns).abs() < 1e-12 || (y.turns - x.turns).abs() > 1.0 - 1e-12);
            }
            let g = FloatMatrix::diag(&[c, c]);
            prop_assert_eq!(step_pc(&g, &x, c).unwrap(), x);
        }

        #[test]
        fn cocycle_identity(
            g in prop::collection::vec(-9i64..=9, 4),
            h in prop::collection::vec(-9i64..=9, 4),
            theta in 0.0f64..3.0,
        ) {
            let f = |m: &[i64]| FloatMatrix::new(2, m.iter().map(|&v| v as f64).collect()).unwrap();
            let (g, h) = (f(&g), f(&h));
            prop_assume!(g.det() != 0.0 && h.det() != 0.0);
            let cond = |m: &FloatMatrix| operator_norm(m).powi(2) / m.det().abs();
            prop_assume!(cond(&g) < 1e6 && cond(&h) < 1e6);
            let x = ProjectivePoint::from_angle(theta);
            prop_assert!(cocycle_residual(&g, &h, &x) <= 1e-10);
        }
    }

    #[test]
    fn cocycle_examples() {
        let id = FloatMatrix::identity(2);
        let x = ProjectivePoint::from_angle(0.7);
        assert_eq!(cocycle_residual(&id, &id, &x), 0.0);
        let g = ab();
        assert!(cocycle_residual(g.float(0), g.float(1), &ProjectivePoint::basis(2, 0)) <= 1e-10);
        let rot = FloatMatrix::from_rows(&[&[0.0, -1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(cocycle_residual(&rot, g.float(1), &x), 0.0);
    }

    #[test]
    fn chain_lengths_and_errors() {
        let g = ab();
        let start = PcPoint::new(ProjectivePoint::basis(2, 0), 0.0);
        let mut cfg = WalkConfig::uniform(2, 1, DEFAULT_BURN_IN + 1, la());
        assert_eq!(run_chain(&g, &cfg, &start, 0).unwrap().count(), 1);
        cfg.n_steps = DEFAULT_BURN_IN;
        assert!(matches!(run_chain(&g, &cfg, &start, 0), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn chain_on_eigendirection() {
        let g = only_a();
        let dir = eigen_dominant(g.float(0), DEFAULT_PROXIMAL_TOL).unwrap().dominant_vector;
        let c = 2.0;
        let mut cfg = WalkConfig::new(vec![1.0], 3, 50, c);
        cfg.burn_in = 0;
        let m = run_chain(&g, &cfg, &PcPoint::new(dir.clone(), 0.0), 0).unwrap();
        let step = LOG_LA / c.ln();
        for (k, p) in m.samples.iter().enumerate() {
            assert!(crate::projective::proj_distance(&p.base, &dir) < 1e-14);
            let expect = ((k + 1) as f64 * step).rem_euclid(1.0);
            let diff = (p.turns - expect).abs();
            assert!(diff.min(1.0 - diff) < 1e-12, "{k}: {} vs {expect}", p.turns);
        }
    }

    #[test]
    fn z_marginal_is_uniform() {
        let g = ab();
        let cfg = WalkConfig::uniform(2, 7, 101_000, la());
        let m = run_chain(&g, &cfg, &PcPoint::new(ProjectivePoint::basis(2, 0), 0.0), 0).unwrap();
        assert_eq!(m.count(), 100_000);
        let ks = ks_uniform(&m.turns());
        assert!(ks < 0.01, "{ks}");
    }

    #[test]
    fn contraction_examples() {
        let g = ab();
        let cfg = WalkConfig::uniform(2, 3, 0, 2.0);
        let x = ProjectivePoint::from_angle(0.2);
        let y = ProjectivePoint::from_angle(2.0);
        assert_eq!(contraction_stat(&g, &cfg, &x, &x, 30, 10).unwrap().mean, 0.0);
        let zero = contraction_stat(&g, &cfg, &x, &y, 0, 4).unwrap();
        assert_eq!(zero.mean, crate::projective::proj_distance(&x, &y));
        let means: Vec<f64> =
            [5, 10, 20, 30].iter().map(|&n| contraction_stat(&g, &cfg, &x, &y, n, 1000).unwrap().mean).collect();
        assert!(means.windows(2).all(|w| w[1] < w[0]), "{means:?}");
        assert!(means[3] < 1e-8, "{means:?}");
    }

    /// Oracle for the Λ² tracking: exact rational products of 2×2 integer
    /// matrices, where `δ = |det S| |x ∧ y| / (‖Sx‖‖Sy‖)`.
    #[test]
    fn contraction_matches_determinant_formula() {
        let g = ab();
        let cfg = WalkConfig::uniform(2, 9, 0, 2.0);
        let x = ProjectivePoint::new(&[0.6, 0.8]).unwrap();
        let y = ProjectivePoint::new(&[1.0, 0.0]).unwrap();
        for n in [1, 3, 8, 15] {
            let letters = sample_letters(&cfg, n, 0);
            let mut s = crate::matrix::ExactMatrix::identity(2);
            for &l in &letters {
                s = g.matrix(l).mul(&s);
            }
            let sf = s.to_float();
            let (sx, sy) = (sf.mul_vec(x.rep()), sf.mul_vec(y.rep()));
            let oracle = 0.8 / (norm(&sx) * norm(&sy)); // |det| = 1
            let est = contraction_stat(&g, &cfg, &x, &y, n, 1).unwrap().mean;
            assert!((est - oracle).abs() <= 1e-12 * oracle, "n={n}: {est} vs {oracle}");
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let g = ab();
        let cfg = WalkConfig::uniform(2, 21, 0, 2.0);
        let x = ProjectivePoint::from_angle(0.2);
        let y = ProjectivePoint::from_angle(1.9);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| {
                (
                    contraction_stat(&g, &cfg, &x, &y, 12, 500).unwrap(),
                    lyapunov_top(&g, &cfg, 50, 300).unwrap(),
                )
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn dirac_examples() {
        let g = ab();
        let cfg = WalkConfig::uniform(2, 4, 0, 2.0);
        let spread = dirac_concentration(&g, &cfg, 0, 200, 0).unwrap();
        assert!(spread.diameter > 0.99, "{spread:?}");
        let tight = dirac_concentration(&g, &cfg, 30, 100, 0).unwrap();
        assert!(tight.diameter < 1e-8, "{tight:?}");

        let a = only_a();
        let one = WalkConfig::new(vec![1.0], 4, 0, 2.0);
        let r = dirac_concentration(&a, &one, 40, 50, 0).unwrap();
        assert!((r.center.slope() - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-10);
        assert!(matches!(dirac_concentration(&g, &cfg, 3, 1, 0), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn norm_ratio_examples() {
        let g = ab();
        let cfg = WalkConfig::uniform(2, 8, 0, 2.0);
        let x = [0.6, 0.8];
        assert_eq!(norm_ratio_limit(&g, &cfg, &x, 0, 0).unwrap().ratio, 1.0);
        let r = norm_ratio_limit(&g, &cfg, &x, 40, 0).unwrap();
        assert!(r.residual < 1e-6, "{r:?}");

        let a = only_a();
        let one = WalkConfig::new(vec![1.0], 0, 0, 2.0);
        let dir = eigen_dominant(a.float(0), DEFAULT_PROXIMAL_TOL).unwrap().dominant_vector;
        let r = norm_ratio_limit(&a, &one, dir.rep(), 30, 0).unwrap();
        assert!((r.ratio - 1.0).abs() < 1e-12, "{r:?}");
        assert!(matches!(norm_ratio_limit(&g, &cfg, &[2.0, 0.0], 3, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn lyapunov_examples() {
        let a = only_a();
        let one = WalkConfig::new(vec![1.0], 0, 0, 2.0);
        let est = lyapunov_top(&a, &one, 2000, 4).unwrap();
        assert!((est.mean - LOG_LA).abs() < 1e-3, "{est:?}");

        let rot = gens("dim 2\ngen r\n0 -1\n1 0\n");
        assert_eq!(lyapunov_top(&rot, &one, 100, 3).unwrap().mean, 0.0);

        let g = ab();
        let fair = WalkConfig::uniform(2, 0, 0, 2.0);
        let est = lyapunov_top(&g, &fair, 500, 200).unwrap();
        assert!(est.mean > LOG_LA && est.mean < LOG_LB, "{est:?}");
    }

    #[test]
    fn walk_distance_examples() {
        let g = ab();
        let l = limit_set_approx(&g, 8, DEFAULT_PROXIMAL_TOL, DEFAULT_DEDUP_EPS).unwrap();
        let cfg = WalkConfig::uniform(2, 2, 0, la());
        let far = PcPoint::new(ProjectivePoint::from_angle(2.5), 0.0);
        let d0 = walk_limitset_distance(&g, &cfg, &far, &l, 0, 0).unwrap();
        assert_eq!(d0, l.nearest_distance(&far.base));
        assert!(d0 > 0.1);
        let d50 = walk_limitset_distance(&g, &cfg, &far, &l, 50, 0).unwrap();
        assert!(d50 < 1e-3, "{d50}");

        let a = only_a();
        let la_set = limit_set_approx(&a, 1, DEFAULT_PROXIMAL_TOL, DEFAULT_DEDUP_EPS).unwrap();
        let on = PcPoint::new(la_set.points()[0].point.clone(), 0.0);
        let one = WalkConfig::new(vec![1.0], 0, 0, 2.0);
        for n in [1, 10, 40] {
            assert!(walk_limitset_distance(&a, &one, &on, &la_set, n, 0).unwrap() < 1e-14);
        }
    }

    #[test]
    fn two_starts_agree() {
        let g = ab();
        let cfg = WalkConfig::uniform(2, 5, 101_000, la());
        let a = run_chain(&g, &cfg, &PcPoint::new(ProjectivePoint::basis(2, 0), 0.0), 0).unwrap();
        let b = run_chain(&g, &cfg, &PcPoint::new(ProjectivePoint::from_angle(2.0), 0.3), 1).unwrap();
        let w = occupation_distance(&a, &b, 0);
        assert!(w < 0.01, "{w}");
    }
}

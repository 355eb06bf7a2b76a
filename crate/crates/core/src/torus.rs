//! Orbits of integer generator sets on the torus `𝕋^d = ℝ^d / ℤ^d`.
//!
//! Rational points are handled exactly in `(ℤ/qℤ)^d`. Other points use
//! 128-bit fixed point: a coordinate `x ∈ [0, 1)` is stored as
//! `⌊x·2¹²⁸⌋`, and integer matrices act by wrapping `u128` arithmetic,
//! which is exact modulo 1. The only error is the truncation of the
//! starting point, amplified by the norm of the applied product.

use std::collections::{HashSet, VecDeque};

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::eigen::{eigen_dominant, is_expanding, DEFAULT_PROXIMAL_TOL};
use crate::error::{Error, Result};
use crate::matrix::{dot, norm, FloatMatrix};
use crate::semigroup::{
    check_budget, escape_from_ball, word_count, GeneratorSet, Odometer, Word, DEFAULT_WORD_BUDGET,
};

/// Largest orbit closed by [`orbit_rational`].
pub const DEFAULT_ORBIT_BUDGET: u64 = 1 << 24;
/// Points kept in the cloud returned by [`orbit_float`].
pub const POINT_CLOUD_CAP: usize = 1 << 20;
/// Bits per axis of the deduplication cells in [`orbit_float`].
pub const FINE_CELL_BITS: u32 = 12;
/// Bits of precision credited to a point given as `f64`.
pub const F64_INPUT_BITS: u32 = 53;
/// Bits of precision credited to a point parsed from an exact expression.
pub const EXACT_INPUT_BITS: u32 = 126;
/// Cells are shifted down by this amount (`2⁻¹⁹`), which exceeds the error
/// allowed by the precision guard, so points computed slightly below a
/// grid line land in the cell of the exact point.
const CELL_NUDGE: u128 = 1 << (128 - 19);
/// Radius of the ball around 0 searched by [`rgs_witness`].
pub const RGS_RADIUS: f64 = 0.01;
pub const DEFAULT_RGS_ORBIT_LEN: usize = 20;

const TWO_64: f64 = 18_446_744_073_709_551_616.0;

fn integer_generators(gens: &GeneratorSet) -> Result<Vec<Vec<i128>>> {
    if !gens.is_integer() {
        return Err(Error::Precondition("torus actions need integer generators".into()));
    }
    gens.generators()
        .iter()
        .map(|g| {
            g.matrix
                .numerators()
                .iter()
                .map(|n| {
                    n.to_i128()
                        .filter(|v| v.unsigned_abs() < 1 << 64)
                        .ok_or_else(|| Error::Precondition(format!("entry {n} of {} too large", g.label)))
                })
                .collect()
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalTorusPoint {
    pub q: u64,
    pub nums: Vec<u64>,
}

impl RationalTorusPoint {
    /// `nums / q`, numerators reduced into `[0, q)`.
    pub fn new(q: u64, nums: &[i64]) -> Result<Self> {
        if q == 0 {
            return Err(Error::Precondition("denominator must be positive".into()));
        }
        Ok(RationalTorusPoint { q, nums: nums.iter().map(|&n| n.rem_euclid(q as i64) as u64).collect() })
    }

    /// Fractions `pᵢ / qᵢ` over their least common denominator.
    pub fn from_fractions(fracs: &[(i64, u64)]) -> Result<Self> {
        if fracs.iter().any(|&(_, q)| q == 0) {
            return Err(Error::Precondition("denominator must be positive".into()));
        }
        let q = fracs.iter().fold(1u64, |acc, &(_, d)| acc.lcm(&d));
        let nums: Vec<i64> = fracs.iter().map(|&(p, d)| p * (q / d) as i64).collect();
        Self::new(q, &nums)
    }

    pub fn dim(&self) -> usize {
        self.nums.len()
    }

    pub fn is_zero(&self) -> bool {
        self.nums.iter().all(|&n| n == 0)
    }

    fn apply(&self, g: &[u64]) -> RationalTorusPoint {
        let d = self.dim();
        let q = self.q as u128;
        let nums = (0..d)
            .map(|i| {
                let s: u128 = (0..d).map(|j| g[i * d + j] as u128 * self.nums[j] as u128 % q).sum();
                (s % q) as u64
            })
            .collect();
        RationalTorusPoint { q: self.q, nums }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.nums.iter().map(|&n| n as f64 / self.q as f64).collect()
    }

    /// `ℓ²` distance to the nearest integer point.
    pub fn torus_norm(&self) -> f64 {
        self.nums
            .iter()
            .map(|&n| {
                let m = n.min(self.q - n) as f64 / self.q as f64;
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Representative in `(−½, ½]^d`.
    pub fn lift(&self) -> Vec<f64> {
        self.nums
            .iter()
            .map(|&n| if 2 * n > self.q { -((self.q - n) as f64) / self.q as f64 } else { n as f64 / self.q as f64 })
            .collect()
    }

    /// Cell `⌊r·x⌋` of the resolution-`r` grid.
    pub fn cell(&self, r: u32) -> Vec<u32> {
        self.nums.iter().map(|&n| (n as u128 * r as u128 / self.q as u128) as u32).collect()
    }

    pub fn to_fixed(&self) -> TorusPoint {
        let coords = self
            .nums
            .iter()
            .map(|&n| {
                let v = (BigUint::from(n) << 128u32) / BigUint::from(self.q);
                v.to_u128().expect("below 2^128")
            })
            .collect();
        TorusPoint { coords, bits: EXACT_INPUT_BITS }
    }
}

/// A point of `𝕋^d` in 128-bit fixed point, with the number of bits of
/// its coordinates known to be correct.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TorusPoint {
    coords: Vec<u128>,
    bits: u32,
}

fn fixed_from_f64(x: f64) -> Result<u128> {
    if !x.is_finite() {
        return Err(Error::NumericalFailure(format!("non-finite coordinate {x}")));
    }
    let a = x.abs();
    let frac = a - a.floor();
    let hi_f = (frac * TWO_64).floor();
    let lo_f = ((frac * TWO_64 - hi_f) * TWO_64).floor();
    let v = ((hi_f as u128) << 64) | lo_f as u128;
    Ok(if x < 0.0 { v.wrapping_neg() } else { v })
}

fn fixed_to_f64(c: u128) -> f64 {
    ((c >> 64) as f64 + (c as u64) as f64 / TWO_64) / TWO_64
}

fn fixed_centered(c: u128) -> f64 {
    if c >> 127 == 1 {
        -fixed_to_f64(c.wrapping_neg())
    } else {
        fixed_to_f64(c)
    }
}

/// `⌊r·c / 2¹²⁸⌋` for `r < 2³²`.
fn scaled_floor(c: u128, r: u32) -> u32 {
    let r = r as u128;
    let hi = (c >> 64) * r;
    let lo = (c as u64 as u128) * r;
    ((hi + (lo >> 64)) >> 64) as u32
}

/// A single coordinate written as a sum of terms: integers, decimals,
/// fractions `p/q` and square roots `sqrt(N)`, e.g. `sqrt(2)-1`.
fn parse_fixed(expr: &str) -> Result<u128> {
    let bad = |why: &str| Error::InvalidConfig(format!("coordinate {expr:?}: {why}"));
    let s: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err(bad("empty"));
    }
    let mut total: u128 = 0;
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let negative = rest.starts_with('-');
        if rest.starts_with('+') || negative {
            rest = &rest[1..];
        }
        let end = rest[1.min(rest.len())..].find(['+', '-']).map_or(rest.len(), |i| i + 1);
        let (term, tail) = rest.split_at(end);
        rest = tail;
        let value = parse_term(term).ok_or_else(|| bad(&format!("cannot read term {term:?}")))?;
        total = if negative { total.wrapping_sub(value) } else { total.wrapping_add(value) };
    }
    Ok(total)
}

fn parse_term(term: &str) -> Option<u128> {
    let low128 = |v: BigUint| -> u128 {
        let digits = v.to_u64_digits();
        digits.first().copied().unwrap_or(0) as u128 | (digits.get(1).copied().unwrap_or(0) as u128) << 64
    };
    if let Some(inner) = term.strip_prefix("sqrt(").and_then(|t| t.strip_suffix(')')) {
        let n: BigUint = inner.parse().ok()?;
        return Some(low128((n << 256u32).sqrt()));
    }
    let (num, den): (BigUint, BigUint) = if let Some((p, q)) = term.split_once('/') {
        (p.parse().ok()?, q.parse().ok()?)
    } else if let Some((i, f)) = term.split_once('.') {
        if !f.chars().all(|c| c.is_ascii_digit()) || !i.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let digits = format!("{i}{f}");
        (digits.parse().ok()?, BigUint::from(10u32).pow(f.len() as u32))
    } else {
        (term.parse().ok()?, BigUint::from(1u32))
    };
    if den.is_zero() {
        return None;
    }
    Some(low128((num << 128u32) / den))
}

impl TorusPoint {
    pub fn from_f64(x: &[f64]) -> Result<Self> {
        Ok(TorusPoint { coords: x.iter().map(|&v| fixed_from_f64(v)).collect::<Result<_>>()?, bits: F64_INPUT_BITS })
    }

    /// Parses coordinates such as `sqrt(2)-1`, `0.25` or `2/7`.
    pub fn parse(coords: &[&str]) -> Result<Self> {
        Ok(TorusPoint { coords: coords.iter().map(|c| parse_fixed(c)).collect::<Result<_>>()?, bits: EXACT_INPUT_BITS })
    }

    pub fn zero(dim: usize) -> Self {
        TorusPoint { coords: vec![0; dim], bits: 128 }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    /// Coordinates in `[0, 1)`.
    pub fn to_f64(&self) -> Vec<f64> {
        self.coords.iter().map(|&c| fixed_to_f64(c)).collect()
    }

    /// Representative in `[−½, ½)^d`.
    pub fn lift(&self) -> Vec<f64> {
        self.coords.iter().map(|&c| fixed_centered(c)).collect()
    }

    pub fn torus_norm(&self) -> f64 {
        norm(&self.lift())
    }

    fn apply(&self, g: &[i128]) -> TorusPoint {
        let d = self.dim();
        let coords = (0..d)
            .map(|i| {
                (0..d).fold(0u128, |acc, j| acc.wrapping_add((g[i * d + j] as u128).wrapping_mul(self.coords[j])))
            })
            .collect();
        TorusPoint { coords, bits: self.bits }
    }

    fn nudged(&self, i: usize) -> u128 {
        self.coords[i].wrapping_add(CELL_NUDGE)
    }
}

/// Which cells of the resolution-`r` grid an orbit has visited.
#[derive(Debug, Clone)]
pub struct CoverageGrid {
    pub resolution: u32,
    dim: usize,
    hit: Vec<u64>,
    hits: u64,
    pub points_seen: u64,
}

impl CoverageGrid {
    pub fn new(resolution: u32, dim: usize) -> Result<Self> {
        let cells = (resolution as u128).checked_pow(dim as u32).filter(|&c| c > 0 && c <= 1 << 32);
        let cells = cells.ok_or_else(|| {
            Error::InvalidConfig(format!("grid {resolution}^{dim} is empty or exceeds 2^32 cells"))
        })?;
        Ok(CoverageGrid { resolution, dim, hit: vec![0; (cells as usize).div_ceil(64)], hits: 0, points_seen: 0 })
    }

    pub fn cells(&self) -> u64 {
        (self.resolution as u64).pow(self.dim as u32)
    }

    fn mark_index(&mut self, idx: u64) {
        self.points_seen += 1;
        let (w, b) = ((idx / 64) as usize, idx % 64);
        if self.hit[w] >> b & 1 == 0 {
            self.hit[w] |= 1 << b;
            self.hits += 1;
        }
    }

    fn mark_cell(&mut self, cell: &[u32]) {
        let idx = cell.iter().fold(0u64, |acc, &c| acc * self.resolution as u64 + c as u64);
        self.mark_index(idx);
    }

    fn mark_fixed(&mut self, x: &TorusPoint) {
        let cell: Vec<u32> = (0..x.dim()).map(|i| scaled_floor(x.nudged(i), self.resolution)).collect();
        self.mark_cell(&cell);
    }

    pub fn covered(&self) -> u64 {
        self.hits
    }

    pub fn fraction(&self) -> f64 {
        self.hits as f64 / self.cells() as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub finite: bool,
    pub orbit_size: Option<u64>,
    pub coverage_fraction: Option<f64>,
    pub word_budget: u64,
    pub resolution: Option<u32>,
}

#[derive(Debug, Clone)]
pub struct RationalOrbit {
    pub report: OrbitReport,
    /// Orbit points in breadth-first discovery order.
    pub points: Vec<RationalTorusPoint>,
}

impl RationalOrbit {
    pub fn coverage(&self, resolution: u32) -> Result<CoverageGrid> {
        let mut grid = CoverageGrid::new(resolution, self.points.first().map_or(0, |p| p.dim()))?;
        for p in &self.points {
            grid.mark_cell(&p.cell(resolution));
        }
        Ok(grid)
    }
}

/// The orbit `Γ x` in `(ℤ/qℤ)^d`, closed breadth-first and then checked to
/// be mapped into itself by every generator.
pub fn orbit_rational(gens: &GeneratorSet, x: &RationalTorusPoint, budget: u64) -> Result<RationalOrbit> {
    integer_generators(gens)?;
    if x.dim() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), found: x.dim() });
    }
    let reduced: Vec<Vec<u64>> =
        (0..gens.len()).map(|i| gens.matrix(i).reduce_mod(x.q).expect("integral")).collect();
    let mut seen: HashSet<RationalTorusPoint> = HashSet::from([x.clone()]);
    let mut points = vec![x.clone()];
    let mut queue = VecDeque::from([x.clone()]);
    while let Some(p) = queue.pop_front() {
        for g in &reduced {
            let y = p.apply(g);
            if seen.insert(y.clone()) {
                if seen.len() as u64 > budget {
                    return Err(Error::BudgetExceeded { needed: seen.len() as u128, budget: budget as u128 });
                }
                points.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    for p in &points {
        for g in &reduced {
            if !seen.contains(&p.apply(g)) {
                return Err(Error::NumericalFailure("orbit is not closed".into()));
            }
        }
    }
    let report = OrbitReport {
        finite: true,
        orbit_size: Some(points.len() as u64),
        coverage_fraction: None,
        word_budget: budget,
        resolution: None,
    };
    Ok(RationalOrbit { report, points })
}

/// Largest word length whose products keep the amplified input error
/// `C^L · 2^{−bits}` below `1e−6`, `C` the largest generator norm.
pub fn precision_cap(gens: &GeneratorSet, bits: u32) -> usize {
    let c = gens.max_operator_norm();
    if c <= 1.0 {
        return usize::MAX;
    }
    let room = bits as f64 * std::f64::consts::LN_2 + 1e-6f64.ln();
    if room <= 0.0 {
        return 0;
    }
    (room / c.ln()).floor() as usize
}

#[derive(Debug, Clone)]
pub struct FloatOrbit {
    pub report: OrbitReport,
    pub grid: CoverageGrid,
    /// The first [`POINT_CLOUD_CAP`] distinct points, breadth-first.
    pub points: Vec<Vec<f64>>,
    /// Deduplication cells visited.
    pub distinct_cells: u64,
    /// The search ran out of new cells before `max_len`.
    pub closed: bool,
    pub truncated: bool,
}

/// Set of visited fine cells: a bitset when small, a hash set otherwise.
enum Visited {
    Bits(Vec<u64>),
    Hash(HashSet<u64>),
}

impl Visited {
    fn insert(&mut self, key: u64) -> bool {
        match self {
            Visited::Bits(b) => {
                let (w, s) = ((key / 64) as usize, key % 64);
                let fresh = b[w] >> s & 1 == 0;
                b[w] |= 1 << s;
                fresh
            }
            Visited::Hash(h) => h.insert(key),
        }
    }
}

/// Breadth-first orbit of `x0`, one point per cell of the `2^f`-per-axis
/// deduplication grid (`f = min(12, 64/d)`), with coverage of the
/// resolution-`resolution` grid.
///
/// At most `budget` points are processed; the result is flagged
/// `truncated` if that stops the search. Float orbits never claim
/// finiteness: `finite` is always false.
pub fn orbit_float(
    gens: &GeneratorSet,
    x0: &TorusPoint,
    max_len: usize,
    budget: u64,
    resolution: u32,
) -> Result<FloatOrbit> {
    let ints = integer_generators(gens)?;
    let d = gens.dim();
    if x0.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x0.dim() });
    }
    let cap = precision_cap(gens, x0.bits());
    if max_len > cap {
        return Err(Error::PrecisionExceeded { requested: max_len, cap });
    }
    let mut grid = CoverageGrid::new(resolution, d)?;
    let f = FINE_CELL_BITS.min(64 / d as u32);
    let fine_key = |x: &TorusPoint| (0..d).fold(0u64, |acc, i| (acc << f) | (x.nudged(i) >> (128 - f)) as u64);
    let mut visited = if f * d as u32 <= 24 {
        Visited::Bits(vec![0; (1usize << (f * d as u32)).div_ceil(64)])
    } else {
        Visited::Hash(HashSet::new())
    };

    let mut points = Vec::new();
    let mut distinct = 0u64;
    let mut processed = 0u64;
    let mut truncated = false;
    let keep = |x: &TorusPoint, grid: &mut CoverageGrid, points: &mut Vec<Vec<f64>>| {
        grid.mark_fixed(x);
        if points.len() < POINT_CLOUD_CAP {
            points.push(x.to_f64());
        }
    };
    visited.insert(fine_key(x0));
    distinct += 1;
    keep(x0, &mut grid, &mut points);
    let mut frontier = vec![x0.clone()];
    let mut depth = 0;
    while depth < max_len && !frontier.is_empty() && !truncated {
        depth += 1;
        let last = depth == max_len;
        let mut next = Vec::new();
        'level: for x in &frontier {
            for g in &ints {
                if processed >= budget {
                    truncated = true;
                    break 'level;
                }
                processed += 1;
                let y = x.apply(g);
                if visited.insert(fine_key(&y)) {
                    distinct += 1;
                    keep(&y, &mut grid, &mut points);
                    if !last {
                        next.push(y);
                    }
                }
            }
        }
        frontier = next;
    }
    let closed = frontier.is_empty() && !truncated;
    let report = OrbitReport {
        finite: false,
        orbit_size: None,
        coverage_fraction: Some(grid.fraction()),
        word_budget: budget,
        resolution: Some(resolution),
    };
    Ok(FloatOrbit { report, grid, points, distinct_cells: distinct, closed, truncated })
}

/// A torus point given exactly (rational) or in fixed point.
#[derive(Debug, Clone, PartialEq)]
pub enum TorusInput {
    Rational(RationalTorusPoint),
    Fixed(TorusPoint),
}

impl TorusInput {
    pub fn dim(&self) -> usize {
        match self {
            TorusInput::Rational(p) => p.dim(),
            TorusInput::Fixed(p) => p.dim(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            TorusInput::Rational(p) => p.is_zero(),
            TorusInput::Fixed(p) => p.is_zero(),
        }
    }

    pub fn lift(&self) -> Vec<f64> {
        match self {
            TorusInput::Rational(p) => p.lift(),
            TorusInput::Fixed(p) => p.lift(),
        }
    }

    pub fn torus_norm(&self) -> f64 {
        match self {
            TorusInput::Rational(p) => p.torus_norm(),
            TorusInput::Fixed(p) => p.torus_norm(),
        }
    }

    /// Image under the product of `indices` (rightmost letter first),
    /// computed exactly modulo 1.
    fn apply_word(&self, gens: &GeneratorSet, ints: &[Vec<i128>], indices: &[usize]) -> TorusInput {
        match self {
            TorusInput::Rational(p) => {
                let reduced: Vec<Vec<u64>> =
                    (0..gens.len()).map(|i| gens.matrix(i).reduce_mod(p.q).expect("integral")).collect();
                TorusInput::Rational(indices.iter().rev().fold(p.clone(), |x, &i| x.apply(&reduced[i])))
            }
            TorusInput::Fixed(p) => {
                TorusInput::Fixed(indices.iter().rev().fold(p.clone(), |x, &i| x.apply(&ints[i])))
            }
        }
    }
}

/// `ε_Γ = 1 / (2C)` with `C` the largest generator norm.
pub fn default_epsilon(gens: &GeneratorSet) -> f64 {
    1.0 / (2.0 * gens.max_operator_norm())
}

#[derive(Debug, Clone, Serialize)]
pub struct EscapeWitness {
    pub indices: Vec<usize>,
    pub label: String,
    /// Torus norm of the image, recomputed from the exact action.
    pub image_norm: f64,
}

/// Words explored by the breadth-first fallback of [`epsilon_escape_check`].
const ESCAPE_FALLBACK_WORDS: u128 = 1 << 16;

/// A word `w` with `‖w·x‖_𝕋 > ε`.
///
/// The lift of `x` near 0 is pushed out of the unit ball by
/// [`escape_from_ball`]; along that word the lifted norm first exceeds
/// `ε ≤ 1/(2C)` at a point of norm at most `1/2`, where lift and torus
/// norms agree. If that fails, words are tried breadth-first.
pub fn epsilon_escape_check(gens: &GeneratorSet, x: &TorusInput, epsilon: f64) -> Result<EscapeWitness> {
    let ints = integer_generators(gens)?;
    if x.dim() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), found: x.dim() });
    }
    if x.is_zero() {
        return Err(Error::Precondition("x must be nonzero".into()));
    }
    if !(epsilon > 0.0 && epsilon < 0.5) {
        return Err(Error::Precondition(format!("epsilon = {epsilon} must lie in (0, 1/2)")));
    }
    let verify = |indices: &[usize]| -> Option<EscapeWitness> {
        let image_norm = x.apply_word(gens, &ints, indices).torus_norm();
        (image_norm > epsilon).then(|| EscapeWitness {
            indices: indices.to_vec(),
            label: gens.indices_label(indices),
            image_norm,
        })
    };
    if let Some(w) = verify(&[]) {
        return Ok(w);
    }
    let lift = x.lift();
    if let Ok(word) = escape_from_ball(gens, &lift) {
        let floats = gens.floats();
        let letters = word.indices();
        let mut v = lift.clone();
        for k in (0..letters.len()).rev() {
            v = floats[letters[k]].mul_vec(&v);
            if norm(&v) > epsilon {
                if let Some(w) = verify(&letters[k..]) {
                    return Ok(w);
                }
                break;
            }
        }
    }
    let mut depth = 0;
    while word_count(gens.len(), depth + 1) <= ESCAPE_FALLBACK_WORDS {
        depth += 1;
    }
    let mut examined = 0u64;
    let mut odo = Odometer::new(gens.len(), depth, (), |_: &(), _| ());
    while let Some((digits, _)) = odo.advance() {
        examined += 1;
        if let Some(w) = verify(digits) {
            return Ok(w);
        }
    }
    Err(Error::SearchFailed { examined })
}

#[derive(Debug, Clone, Serialize)]
pub struct RgsWitness {
    /// Exponents `k ∈ [−K, K]` with an orbit point within `tol` of `γᵏ u₀`.
    pub ks: Vec<i32>,
    pub u0: Vec<f64>,
    /// Orbit points found in the ball of radius [`RGS_RADIUS`] around 0.
    pub near_zero: usize,
}

/// Reconstruction of a `γ`-dominant vector `u₀` whose `γ`-orbit is
/// approached by the orbit of `x0`.
///
/// Orbit points `xᵢ` near 0 (lifted to `ℝ^d`) are split along the
/// dominant line of `γ` and the sum of its other generalized eigenspaces;
/// `pᵢ ≥ 0` is chosen with `1 ≤ |λ|^{pᵢ} |φ(xᵢ)| ≤ |λ|`, and `u₀` is taken
/// from the point closest to 0. The returned `k` are those for which some
/// `γ^{pᵢ+k} xᵢ` lies strictly within `tol` of `γᵏ u₀ = λᵏ u₀`.
pub fn rgs_witness(
    gens: &GeneratorSet,
    gamma: &Word,
    x0: &[f64],
    k_max: u32,
    tol: f64,
) -> Result<RgsWitness> {
    rgs_witness_with(gens, gamma, x0, k_max, tol, DEFAULT_RGS_ORBIT_LEN)
}

pub fn rgs_witness_with(
    gens: &GeneratorSet,
    gamma: &Word,
    x0: &[f64],
    k_max: u32,
    tol: f64,
    orbit_len: usize,
) -> Result<RgsWitness> {
    integer_generators(gens)?;
    let d = gens.dim();
    if x0.len() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x0.len() });
    }
    let g = gamma.product().to_float();
    let info = eigen_dominant(&g, DEFAULT_PROXIMAL_TOL)
        .map_err(|_| Error::Precondition("gamma must be proximal".into()))?;
    if !is_expanding(&g, DEFAULT_PROXIMAL_TOL) {
        return Err(Error::Precondition("gamma must be expanding".into()));
    }
    let lambda = info.eigenvalue;
    let v = info.dominant_vector.rep().to_vec();
    let h = info.hyperplane_normal.rep().to_vec();
    let hv = dot(&h, &v);
    let phi = |x: &[f64]| dot(&h, x) / hv;

    check_budget(gens.len(), orbit_len, DEFAULT_WORD_BUDGET)?;
    let floats = gens.floats();
    let center = |x: Vec<f64>| -> Vec<f64> { x.into_iter().map(|c| c - c.round()).collect() };
    let start = center(x0.to_vec());
    let mut near: Vec<Vec<f64>> = Vec::new();
    let mut odo = Odometer::new(gens.len(), orbit_len, start, |x: &Vec<f64>, i| center(floats[i].mul_vec(x)));
    while let Some((_, x)) = odo.advance() {
        if norm(x) < RGS_RADIUS && phi(x) != 0.0 {
            near.push(x.clone());
        }
    }
    if near.is_empty() {
        return Err(Error::NoApproach { radius: RGS_RADIUS });
    }
    near.sort_by(|a, b| norm(a).total_cmp(&norm(b)));
    near.truncate(64);

    let l = lambda.abs();
    let exponent = |x: &[f64]| -> i32 { (-(phi(x).abs().ln()) / l.ln()).ceil().max(0.0) as i32 };
    let p_star = exponent(&near[0]);
    let u0: Vec<f64> = v.iter().map(|c| c * lambda.powi(p_star) * phi(&near[0])).collect();

    let k_max = k_max as i32;
    let mut ks = Vec::new();
    for k in -k_max..=k_max {
        let target: Vec<f64> = u0.iter().map(|c| c * lambda.powi(k)).collect();
        let hit = near.iter().any(|x| {
            let m = exponent(x) + k;
            if m < 0 {
                return false;
            }
            let y = (0..m).fold(x.clone(), |y, _| g.mul_vec(&y));
            let diff: Vec<f64> = y.iter().zip(&target).map(|(a, b)| a - b).collect();
            norm(&diff) < tol
        });
        if hit {
            ks.push(k);
        }
    }
    Ok(RgsWitness { ks, u0, near_zero: near.len() })
}

/// Every point of `(q⁻¹ℤ/ℤ)^d`, in lexicographic order of numerators.
pub fn all_rational_points(dim: usize, q: u64) -> Vec<RationalTorusPoint> {
    let total = (q as usize).pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            let mut nums = vec![0u64; dim];
            for slot in nums.iter_mut().rev() {
                *slot = (idx % q as usize) as u64;
                idx /= q as usize;
            }
            RationalTorusPoint { q, nums }
        })
        .collect()
}

/// Product of the generators in `indices` as a float matrix, for lifting
/// orbits to `ℝ^d`.
pub fn lifted_product(gens: &GeneratorSet, indices: &[usize]) -> FloatMatrix {
    indices.iter().fold(FloatMatrix::identity(gens.dim()), |acc, &i| acc.mul(gens.float(i)))
}

//! Three-valued checks of the standing hypotheses on a generated semigroup:
//! unbounded orbits (H0), strong irreducibility (H1), and the existence of
//! a proximal element (H2).
//!
//! None of these is decidable from finitely many words in general, so
//! every verdict records its search depth and the number of candidates it
//! examined. The one exception is strong irreducibility in dimension 2,
//! which is decided exactly below.

use std::collections::{HashSet, VecDeque};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::eigen::{eigen_dominant, DEFAULT_PROXIMAL_TOL};
use crate::error::Result;
use crate::matrix::{norm, ExactMatrix, FloatMatrix};
use crate::random::uniform_sphere;
use crate::semigroup::{enumerate_words, word_count, GeneratorSet, Odometer, Word};

/// Default norm an orbit must exceed to count as unbounded.
pub const DEFAULT_GROWTH_THRESHOLD: f64 = 1e6;

/// Finite subgroups of `PGL(2, ℚ)` have order at most 12; anything that
/// grows past this bound is infinite.
const FINITE_IMAGE_BOUND: usize = 128;

const SPAN_ORBIT_CAP: u128 = 4096;
const SPAN_RATIO_MIN: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Satisfied,
    Violated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EscapeTrace {
    pub start: Vec<f64>,
    /// Greedy word in product order (leftmost letter applied last).
    pub word: String,
    pub indices: Vec<usize>,
    pub log_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    Word { word: String, indices: Vec<usize> },
    Escapes { threshold: f64, traces: Vec<EscapeTrace> },
    OrthogonalGenerators,
    /// A finite set of lines permuted by every generator.
    InvariantLines { lines: Vec<Vec<f64>>, exact: Vec<String> },
    /// Every finite invariant set of lines would consist of eigenlines of
    /// the square of `word`; none of those candidate sets is invariant.
    NoInvariantLines { word: String, indices: Vec<usize>, reason: String },
    SpanningOrbits { candidates: usize, orbit_len: usize, min_gram_ratio: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HypothesisVerdict {
    pub status: Status,
    pub witness: Option<Witness>,
    pub search_depth: usize,
    /// Words, steps or group elements examined.
    pub examined: u64,
}

impl HypothesisVerdict {
    fn inconclusive(search_depth: usize, examined: u64) -> Self {
        HypothesisVerdict { status: Status::Inconclusive, witness: None, search_depth, examined }
    }
}

fn word_witness(gens: &GeneratorSet, w: &Word) -> Witness {
    Witness::Word { word: gens.word_label(w), indices: w.indices().to_vec() }
}

/// First proximal word in breadth-first order.
pub fn check_h2(gens: &GeneratorSet, max_len: usize, tol: f64) -> Result<HypothesisVerdict> {
    let mut examined = 0;
    for w in enumerate_words(gens, max_len)? {
        examined += 1;
        if w.is_empty() {
            continue;
        }
        if eigen_dominant(&w.product().to_float(), tol).is_ok() {
            return Ok(HypothesisVerdict {
                status: Status::Satisfied,
                witness: Some(word_witness(gens, &w)),
                search_depth: w.len(),
                examined,
            });
        }
    }
    Ok(HypothesisVerdict::inconclusive(max_len, examined))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct H0Options {
    pub trials: usize,
    pub horizon: usize,
    pub threshold: f64,
    pub seed: u64,
}

impl Default for H0Options {
    fn default() -> Self {
        H0Options { trials: 16, horizon: 200, threshold: DEFAULT_GROWTH_THRESHOLD, seed: 0 }
    }
}

/// Greedy growth from random unit vectors: at each step apply the
/// generator that maximizes the norm.
pub fn check_h0(gens: &GeneratorSet, opts: H0Options) -> HypothesisVerdict {
    if gens.generators().iter().all(|g| g.matrix.is_orthogonal()) {
        return HypothesisVerdict {
            status: Status::Violated,
            witness: Some(Witness::OrthogonalGenerators),
            search_depth: 0,
            examined: 0,
        };
    }
    let floats = gens.floats();
    let target = opts.threshold.ln();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut traces = Vec::with_capacity(opts.trials);
    let mut examined = 0u64;
    for _ in 0..opts.trials.max(1) {
        let start = uniform_sphere(&mut rng, gens.dim());
        let mut u = start.clone();
        let mut log_norm = 0.0;
        let mut applied = Vec::new();
        while log_norm <= target && applied.len() < opts.horizon {
            let (best, image, n) = floats
                .iter()
                .enumerate()
                .map(|(i, g)| {
                    let v = g.mul_vec(&u);
                    let n = norm(&v);
                    (i, v, n)
                })
                .fold(None::<(usize, Vec<f64>, f64)>, |acc, cur| match acc {
                    Some(a) if a.2 >= cur.2 => Some(a),
                    _ => Some(cur),
                })
                .expect("nonempty generator set");
            examined += 1;
            applied.push(best);
            log_norm += n.ln();
            u = image.iter().map(|x| x / n).collect();
        }
        if log_norm <= target {
            return HypothesisVerdict::inconclusive(opts.horizon, examined);
        }
        let indices: Vec<usize> = applied.into_iter().rev().collect();
        traces.push(EscapeTrace { start, word: gens.indices_label(&indices), indices, log_norm });
    }
    HypothesisVerdict {
        status: Status::Satisfied,
        witness: Some(Witness::Escapes { threshold: opts.threshold, traces }),
        search_depth: opts.horizon,
        examined,
    }
}

/// Strong irreducibility. Exact decision for `d = 2` (rational
/// generators); orbit-spanning heuristic for `d ≥ 3`, which never reports
/// `Violated`.
pub fn check_h1(gens: &GeneratorSet, depth: usize) -> Result<HypothesisVerdict> {
    if gens.dim() == 2 {
        plane_irreducibility(gens, depth)
    } else {
        spanning_heuristic(gens, depth)
    }
}

/// Representative of the class of `m` modulo nonzero scalars: the first
/// nonzero entry is scaled to 1.
fn projective_class(m: &ExactMatrix) -> ExactMatrix {
    let lead = m.numerators().iter().find(|n| !n.is_zero()).expect("invertible").clone();
    let entries: Vec<BigRational> =
        m.numerators().iter().map(|n| BigRational::new(n.clone(), lead.clone())).collect();
    ExactMatrix::from_rationals(m.dim(), &entries).expect("square")
}

fn line_class(v: [BigRational; 2]) -> [BigRational; 2] {
    let lead = if v[0].is_zero() { v[1].clone() } else { v[0].clone() };
    [&v[0] / &lead, &v[1] / &lead]
}

fn plane_irreducibility(gens: &GeneratorSet, depth: usize) -> Result<HypothesisVerdict> {
    // Finite projective image: every orbit of lines is finite.
    let id = ExactMatrix::identity(2);
    let mut seen: HashSet<ExactMatrix> = HashSet::from([id.clone()]);
    let mut order = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    let mut examined = 0u64;
    'closure: while let Some(x) = queue.pop_front() {
        for g in gens.generators() {
            examined += 1;
            let y = projective_class(&x.mul(&g.matrix));
            if seen.insert(y.clone()) {
                if seen.len() > FINITE_IMAGE_BOUND {
                    break 'closure;
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    if seen.len() <= FINITE_IMAGE_BOUND {
        let mut lines: Vec<[BigRational; 2]> = Vec::new();
        for h in &order {
            let l = line_class([h.entry(0, 0), h.entry(1, 0)]);
            if !lines.contains(&l) {
                lines.push(l);
            }
        }
        let witness = Witness::InvariantLines {
            lines: lines.iter().map(rational_line_to_float).collect(),
            exact: lines.iter().map(|l| format!("({}, {})", l[0], l[1])).collect(),
        };
        return Ok(HypothesisVerdict {
            status: Status::Violated,
            witness: Some(witness),
            search_depth: 0,
            examined,
        });
    }

    // Infinite image: a finite invariant set has at most two lines, each an
    // eigenline of w² for every word w.
    for w in enumerate_words(gens, depth)? {
        examined += 1;
        if w.is_empty() {
            continue;
        }
        let sq = w.product().mul(w.product());
        if sq.is_scalar() {
            continue;
        }
        let status_for = |status, witness| HypothesisVerdict {
            status,
            witness: Some(witness),
            search_depth: w.len(),
            examined,
        };
        let no_lines = |reason: &str| Witness::NoInvariantLines {
            word: gens.word_label(&w),
            indices: w.indices().to_vec(),
            reason: reason.into(),
        };
        let lines = eigenlines(&sq);
        let Some((field, lines)) = lines else {
            return Ok(status_for(Status::Satisfied, no_lines("square of word has no real eigenline")));
        };
        let mut candidates: Vec<Vec<&QLine>> = Vec::new();
        if lines.len() == 2 {
            candidates.push(vec![&lines[0], &lines[1]]);
        }
        candidates.extend(lines.iter().map(|l| vec![l]));
        for cand in candidates {
            let invariant = gens.generators().iter().all(|g| {
                cand.iter().all(|l| {
                    let img = field.apply(&g.matrix, l);
                    cand.iter().any(|m| field.parallel(&img, m))
                })
            });
            if invariant {
                let witness = Witness::InvariantLines {
                    lines: cand.iter().map(|l| field.to_float(l)).collect(),
                    exact: cand.iter().map(|l| field.describe(l)).collect(),
                };
                return Ok(status_for(Status::Violated, witness));
            }
        }
        return Ok(status_for(
            Status::Satisfied,
            no_lines("eigenlines of the square are not permuted by the generators"),
        ));
    }
    Ok(HypothesisVerdict::inconclusive(depth, examined))
}

fn rational_line_to_float(l: &[BigRational; 2]) -> Vec<f64> {
    let v = [l[0].to_f64().unwrap_or(f64::NAN), l[1].to_f64().unwrap_or(f64::NAN)];
    let n = norm(&v);
    vec![v[0] / n, v[1] / n]
}

/// `a + b√disc`.
#[derive(Debug, Clone, PartialEq)]
struct Quad {
    a: BigRational,
    b: BigRational,
}

type QLine = [Quad; 2];

/// `ℚ(√disc)`; when `disc` is a rational square every element has `b = 0`.
struct QuadField {
    disc: BigRational,
}

impl QuadField {
    fn rational(&self, a: BigRational) -> Quad {
        Quad { a, b: BigRational::zero() }
    }

    fn add(&self, x: &Quad, y: &Quad) -> Quad {
        Quad { a: &x.a + &y.a, b: &x.b + &y.b }
    }

    fn sub(&self, x: &Quad, y: &Quad) -> Quad {
        Quad { a: &x.a - &y.a, b: &x.b - &y.b }
    }

    fn mul(&self, x: &Quad, y: &Quad) -> Quad {
        Quad { a: &x.a * &y.a + &x.b * &y.b * &self.disc, b: &x.a * &y.b + &x.b * &y.a }
    }

    fn scale(&self, r: &BigRational, x: &Quad) -> Quad {
        Quad { a: r * &x.a, b: r * &x.b }
    }

    fn is_zero(&self, x: &Quad) -> bool {
        x.a.is_zero() && x.b.is_zero()
    }

    fn apply(&self, m: &ExactMatrix, l: &QLine) -> QLine {
        let row = |i: usize| {
            self.add(&self.scale(&m.entry(i, 0), &l[0]), &self.scale(&m.entry(i, 1), &l[1]))
        };
        [row(0), row(1)]
    }

    fn parallel(&self, u: &QLine, v: &QLine) -> bool {
        self.is_zero(&self.sub(&self.mul(&u[0], &v[1]), &self.mul(&u[1], &v[0])))
    }

    fn value(&self, x: &Quad) -> f64 {
        let s = self.disc.to_f64().unwrap_or(f64::NAN).max(0.0).sqrt();
        x.a.to_f64().unwrap_or(f64::NAN) + x.b.to_f64().unwrap_or(f64::NAN) * s
    }

    fn to_float(&self, l: &QLine) -> Vec<f64> {
        let v = [self.value(&l[0]), self.value(&l[1])];
        let n = norm(&v);
        vec![v[0] / n, v[1] / n]
    }

    fn describe(&self, l: &QLine) -> String {
        let q = |x: &Quad| {
            if x.b.is_zero() {
                x.a.to_string()
            } else {
                format!("{} + {}*sqrt({})", x.a, x.b, self.disc)
            }
        };
        format!("({}, {})", q(&l[0]), q(&l[1]))
    }
}

fn rational_sqrt(r: &BigRational) -> Option<BigRational> {
    if r.is_negative() {
        return None;
    }
    let root = |n: &BigInt| {
        let s = n.sqrt();
        (&s * &s == *n).then_some(s)
    };
    Some(BigRational::new(root(r.numer())?, root(r.denom())?))
}

/// Real eigenlines of a non-scalar rational 2×2 matrix, exactly.
fn eigenlines(m: &ExactMatrix) -> Option<(QuadField, Vec<QLine>)> {
    let two = BigRational::from_integer(BigInt::from(2));
    let trace = m.entry(0, 0) + m.entry(1, 1);
    let disc = &trace * &trace - BigRational::from_integer(BigInt::from(4)) * m.det();
    if disc.is_negative() {
        return None;
    }
    let half_trace = &trace / &two;
    let (field, lambdas) = match rational_sqrt(&disc) {
        Some(r) => {
            let field = QuadField { disc: BigRational::one() };
            let half = &r / &two;
            let mut ls = vec![field.rational(&half_trace + &half)];
            if !r.is_zero() {
                ls.push(field.rational(&half_trace - &half));
            }
            (field, ls)
        }
        None => {
            let half = BigRational::new(BigInt::one(), BigInt::from(2));
            let ls = vec![
                Quad { a: half_trace.clone(), b: half.clone() },
                Quad { a: half_trace.clone(), b: -half },
            ];
            (QuadField { disc }, ls)
        }
    };
    let lines = lambdas
        .iter()
        .map(|l| {
            let c1 = [field.rational(m.entry(0, 1)), field.sub(l, &field.rational(m.entry(0, 0)))];
            if !field.is_zero(&c1[0]) || !field.is_zero(&c1[1]) {
                c1
            } else {
                [field.sub(l, &field.rational(m.entry(1, 1))), field.rational(m.entry(1, 0))]
            }
        })
        .collect();
    Some((field, lines))
}

fn spanning_heuristic(gens: &GeneratorSet, depth: usize) -> Result<HypothesisVerdict> {
    let d = gens.dim();
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    let mut examined = 0u64;
    for w in enumerate_words(gens, depth)? {
        examined += 1;
        if candidates.len() >= 16 {
            break;
        }
        if let Ok(info) = eigen_dominant(&w.product().to_float(), DEFAULT_PROXIMAL_TOL) {
            if !w.is_empty() {
                candidates.push(info.dominant_vector.rep().to_vec());
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..8 {
        candidates.push(uniform_sphere(&mut rng, d));
    }
    let mut orbit_len = depth;
    while orbit_len > 0 && word_count(gens.len(), orbit_len) > SPAN_ORBIT_CAP {
        orbit_len -= 1;
    }
    let floats = gens.floats();
    let mut products = Vec::new();
    let mut odo = Odometer::new(gens.len(), orbit_len, FloatMatrix::identity(d), |p: &FloatMatrix, i| {
        let q = p.mul(&floats[i]);
        let s = q.max_abs();
        q.scale(1.0 / s)
    });
    while let Some((_, p)) = odo.advance() {
        products.push(p.clone());
    }
    let mut min_ratio = f64::INFINITY;
    for u in &candidates {
        let mut gram = DMatrix::<f64>::zeros(d, d);
        for p in &products {
            let v = p.mul_vec(u);
            let n = norm(&v);
            let v = nalgebra::DVector::from_iterator(d, v.iter().map(|x| x / n));
            gram += &v * v.transpose();
        }
        examined += products.len() as u64;
        let eig = gram.symmetric_eigen().eigenvalues;
        let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0_f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        min_ratio = min_ratio.min(lo / hi);
    }
    if min_ratio > SPAN_RATIO_MIN {
        Ok(HypothesisVerdict {
            status: Status::Satisfied,
            witness: Some(Witness::SpanningOrbits {
                candidates: candidates.len(),
                orbit_len,
                min_gram_ratio: min_ratio,
            }),
            search_depth: depth,
            examined,
        })
    } else {
        Ok(HypothesisVerdict::inconclusive(depth, examined))
    }
}

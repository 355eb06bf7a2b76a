use crate::error::{Error, Result};
use crate::matrix::{norm, FloatMatrix};
use crate::semigroup::{word_count, GeneratorSet, Odometer, Word};

/// Breadth-first phase of [`escape_from_ball`] stops at this word length
/// (capped further so at most 2¹⁶ words are visited).
pub const DEFAULT_ESCAPE_BFS_DEPTH: usize = 12;
/// Steps allowed in the greedy fallback chain.
pub const DEFAULT_ESCAPE_CHAIN: usize = 10_000;

/// Relative slack when re-verifying `‖gx‖ ≤ C` in floating point.
const BOUND_SLACK: f64 = 1e-12;

/// A word `g` with `1 < ‖g x‖ ≤ C`, `C = max ‖s‖`, for `0 < ‖x‖ ≤ 1`.
///
/// Words are tried in breadth-first order and the first one whose image
/// leaves the unit ball is returned; dropping its leftmost letter gives an
/// earlier word, whose image is still in the ball, hence the upper bound.
/// If the breadth-first phase is exhausted, a greedy chain applies the
/// norm-maximizing generator until the image crosses the unit sphere.
pub fn escape_from_ball(gens: &GeneratorSet, x: &[f64]) -> Result<Word> {
    escape_from_ball_with(gens, x, DEFAULT_ESCAPE_BFS_DEPTH, DEFAULT_ESCAPE_CHAIN)
}

pub fn escape_from_ball_with(
    gens: &GeneratorSet,
    x: &[f64],
    bfs_depth: usize,
    chain_budget: usize,
) -> Result<Word> {
    if x.len() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), found: x.len() });
    }
    let nx = norm(x);
    if nx == 0.0 {
        return Err(Error::Precondition("x must be nonzero".into()));
    }
    if nx > 1.0 {
        return Err(Error::Precondition(format!("‖x‖ = {nx} exceeds 1")));
    }
    let c = gens.max_operator_norm();
    let floats = gens.floats();
    let mut depth = bfs_depth;
    while depth > 0 && word_count(gens.len(), depth) > 1 << 16 {
        depth -= 1;
    }

    let mut examined = 0u64;
    let mut found: Option<Vec<usize>> = None;
    let mut odo = Odometer::new(gens.len(), depth, FloatMatrix::identity(gens.dim()), |p: &FloatMatrix, i| {
        p.mul(&floats[i])
    });
    while let Some((digits, p)) = odo.advance() {
        examined += 1;
        if norm(&p.mul_vec(x)) > 1.0 {
            found = Some(digits.to_vec());
            break;
        }
    }

    if found.is_none() {
        let mut y = x.to_vec();
        let mut letters = Vec::new();
        while norm(&y) <= 1.0 && letters.len() < chain_budget {
            examined += 1;
            let (best, image) = floats
                .iter()
                .enumerate()
                .map(|(i, g)| (i, g.mul_vec(&y)))
                .fold(None::<(usize, Vec<f64>)>, |acc, cur| match acc {
                    Some(a) if norm(&a.1) >= norm(&cur.1) => Some(a),
                    _ => Some(cur),
                })
                .expect("nonempty");
            letters.push(best);
            y = image;
        }
        if norm(&y) > 1.0 {
            found = Some(letters.into_iter().rev().collect());
        }
    }

    let indices = found.ok_or(Error::SearchFailed { examined })?;
    let word = Word::from_indices(gens, &indices)?;
    let image = norm(&word.product().to_float().mul_vec(x));
    if !(image > 1.0 && image <= c * (1.0 + BOUND_SLACK)) {
        return Err(Error::NumericalFailure(format!(
            "escape word image norm {image} outside (1, {c}]"
        )));
    }
    Ok(word)
}

/// Greedy growth of `‖γᵗ χ‖` over the transposed generators.
pub fn dual_orbit_unbounded(
    gens: &GeneratorSet,
    chi: &[i64],
    horizon: usize,
    threshold: f64,
) -> Result<bool> {
    if !gens.is_integer() {
        return Err(Error::Precondition("characters need integer generators".into()));
    }
    if chi.len() != gens.dim() {
        return Err(Error::DimensionMismatch { expected: gens.dim(), found: chi.len() });
    }
    if chi.iter().all(|&c| c == 0) {
        return Err(Error::Precondition("character must be nontrivial".into()));
    }
    let transposed: Vec<FloatMatrix> = gens.floats().iter().map(FloatMatrix::transpose).collect();
    let mut u: Vec<f64> = chi.iter().map(|&c| c as f64).collect();
    let mut log_norm = norm(&u).ln();
    let target = threshold.ln();
    let n0 = norm(&u);
    u.iter_mut().for_each(|x| *x /= n0);
    for _ in 0..horizon {
        if log_norm > target {
            return Ok(true);
        }
        let (image, n) = transposed
            .iter()
            .map(|g| {
                let v = g.mul_vec(&u);
                let n = norm(&v);
                (v, n)
            })
            .fold(None::<(Vec<f64>, f64)>, |acc, cur| match acc {
                Some(a) if a.1 >= cur.1 => Some(a),
                _ => Some(cur),
            })
            .expect("nonempty");
        log_norm += n.ln();
        u = image.iter().map(|x| x / n).collect();
    }
    Ok(log_norm > target)
}

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::ExactMatrix;
use crate::semigroup::GeneratorSet;

/// Default cap on `|S|^max_len` for full enumeration.
pub const DEFAULT_WORD_BUDGET: u128 = 1 << 24;

/// A word `g_{i1} g_{i2} … g_{ik}` in the generators with its exact product.
/// The leftmost letter is applied last when the word acts on a vector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    indices: Vec<usize>,
    product: ExactMatrix,
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({:?})", self.indices)
    }
}

impl Word {
    pub fn empty(dim: usize) -> Self {
        Word { indices: Vec::new(), product: ExactMatrix::identity(dim) }
    }

    pub fn from_indices(gens: &GeneratorSet, indices: &[usize]) -> Result<Self> {
        let mut product = ExactMatrix::identity(gens.dim());
        for &i in indices {
            if i >= gens.len() {
                return Err(Error::Precondition(format!("generator index {i} out of range")));
            }
            product = product.mul(gens.matrix(i));
        }
        Ok(Word { indices: indices.to_vec(), product })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn product(&self) -> &ExactMatrix {
        &self.product
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// `self ⧺ other`, whose product is `product(self) · product(other)`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut indices = self.indices.clone();
        indices.extend_from_slice(&other.indices);
        Word { indices, product: self.product.mul(&other.product) }
    }

    /// `w^k`.
    pub fn power(&self, k: usize) -> Word {
        let mut out = Word::empty(self.product.dim());
        for _ in 0..k {
            out = out.concat(self);
        }
        out
    }
}

/// `Σ_{k ≤ max_len} n^k`, saturating.
pub fn word_count(n: usize, max_len: usize) -> u128 {
    let n = n as u128;
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..=max_len {
        total = total.saturating_add(level);
        level = level.saturating_mul(n);
    }
    total
}

pub(crate) fn check_budget(n: usize, max_len: usize, budget: u128) -> Result<()> {
    let top = (n as u128).checked_pow(max_len as u32).unwrap_or(u128::MAX);
    if top > budget {
        return Err(Error::BudgetExceeded { needed: top, budget });
    }
    Ok(())
}

/// Breadth-first, lexicographic-within-level walk over all words of length
/// `≤ max_len`, caching prefix values so that moving to the next word costs
/// on average about one `step`.
pub(crate) struct Odometer<T, F> {
    alphabet: usize,
    max_len: usize,
    digits: Vec<usize>,
    prefix: Vec<T>,
    step: F,
    started: bool,
}

impl<T: Clone, F: Fn(&T, usize) -> T> Odometer<T, F> {
    pub(crate) fn new(alphabet: usize, max_len: usize, init: T, step: F) -> Self {
        Odometer { alphabet, max_len, digits: Vec::new(), prefix: vec![init], step, started: false }
    }

    fn rebuild_from(&mut self, pos: usize) {
        self.prefix.truncate(pos + 1);
        for j in pos..self.digits.len() {
            let next = (self.step)(&self.prefix[j], self.digits[j]);
            self.prefix.push(next);
        }
    }

    /// Advances to the next word; returns its letters and prefix value.
    pub(crate) fn advance(&mut self) -> Option<(&[usize], &T)> {
        if !self.started {
            self.started = true;
            return Some((&self.digits, &self.prefix[0]));
        }
        if self.alphabet == 0 {
            return None;
        }
        match self.digits.iter().rposition(|&d| d + 1 < self.alphabet) {
            Some(p) => {
                self.digits[p] += 1;
                for d in &mut self.digits[p + 1..] {
                    *d = 0;
                }
                self.rebuild_from(p);
            }
            None => {
                if self.digits.len() >= self.max_len {
                    return None;
                }
                let k = self.digits.len() + 1;
                self.digits = vec![0; k];
                self.rebuild_from(0);
            }
        }
        Some((&self.digits, self.prefix.last().expect("nonempty")))
    }
}

type ProductStep<'a> = Box<dyn Fn(&ExactMatrix, usize) -> ExactMatrix + Send + 'a>;

/// Stream of all words up to a given length with exact products.
pub struct WordIter<'a> {
    odometer: Odometer<ExactMatrix, ProductStep<'a>>,
    remaining: u128,
}

impl Iterator for WordIter<'_> {
    type Item = Word;

    fn next(&mut self) -> Option<Word> {
        let (digits, product) = self.odometer.advance()?;
        self.remaining = self.remaining.saturating_sub(1);
        Some(Word { indices: digits.to_vec(), product: product.clone() })
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let r = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (r, Some(r))
    }
}

/// All words of length `≤ max_len`, shortest first and lexicographic
/// within a length.
pub fn enumerate_words(gens: &GeneratorSet, max_len: usize) -> Result<WordIter<'_>> {
    enumerate_words_with_budget(gens, max_len, DEFAULT_WORD_BUDGET)
}

pub fn enumerate_words_with_budget(
    gens: &GeneratorSet,
    max_len: usize,
    budget: u128,
) -> Result<WordIter<'_>> {
    check_budget(gens.len(), max_len, budget)?;
    let step: ProductStep<'_> = Box::new(move |p: &ExactMatrix, i: usize| p.mul(gens.matrix(i)));
    Ok(WordIter {
        odometer: Odometer::new(gens.len(), max_len, ExactMatrix::identity(gens.dim()), step),
        remaining: word_count(gens.len(), max_len),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semigroup::tests::ab;
    use std::collections::HashSet;

    #[test]
    fn counts_and_order() {
        let g = ab();
        let labels: Vec<String> = enumerate_words(&g, 2).unwrap().map(|w| g.word_label(&w)).collect();
        assert_eq!(labels, ["id", "a", "b", "aa", "ab", "ba", "bb"]);
        assert_eq!(enumerate_words(&g, 0).unwrap().count(), 1);
        let single = GeneratorSet::parse("dim 2\ngen a\n2 1\n1 1\n").unwrap();
        let labels: Vec<String> =
            enumerate_words(&single, 3).unwrap().map(|w| single.word_label(&w)).collect();
        assert_eq!(labels, ["id", "a", "aa", "aaa"]);
    }

    #[test]
    fn count_formula_and_uniqueness() {
        let g = ab();
        for l in 0..=6 {
            let words: Vec<Word> = enumerate_words(&g, l).unwrap().collect();
            assert_eq!(words.len() as u128, word_count(2, l));
            let distinct: HashSet<Vec<usize>> = words.iter().map(|w| w.indices().to_vec()).collect();
            assert_eq!(distinct.len(), words.len());
        }
    }

    #[test]
    fn products_match_fold() {
        let g = ab();
        for w in enumerate_words(&g, 5).unwrap() {
            let fresh = Word::from_indices(&g, w.indices()).unwrap();
            assert_eq!(fresh.product(), w.product());
        }
    }

    #[test]
    fn homomorphism_on_short_words() {
        let g = ab();
        let words: Vec<Word> = enumerate_words(&g, 5).unwrap().collect();
        for (i, u) in words.iter().enumerate().step_by(7) {
            for v in words.iter().skip(i % 5).step_by(11) {
                let uv = u.concat(v);
                assert_eq!(*uv.product(), u.product().mul(v.product()));
                assert_eq!(Word::from_indices(&g, uv.indices()).unwrap(), uv);
            }
        }
    }

    #[test]
    fn budget_is_enforced() {
        let g = ab();
        assert!(matches!(
            enumerate_words_with_budget(&g, 25, DEFAULT_WORD_BUDGET),
            Err(Error::BudgetExceeded { .. })
        ));
        assert!(enumerate_words_with_budget(&g, 24, DEFAULT_WORD_BUDGET).is_ok());
    }
}

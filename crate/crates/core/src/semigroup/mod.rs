//! Finite generator sets of matrix semigroups and what can be decided or
//! searched for over the words they generate.

mod congruence;
mod escape;
mod hypotheses;
mod word;

use std::collections::HashSet;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::eigen::operator_norm;
use crate::error::{Error, Result};
use crate::matrix::{ExactMatrix, FloatMatrix};

pub use congruence::{congruence_words, gl_order, CongruenceWords};
pub use escape::{
    dual_orbit_unbounded, escape_from_ball, escape_from_ball_with, DEFAULT_ESCAPE_BFS_DEPTH,
    DEFAULT_ESCAPE_CHAIN,
};
pub use hypotheses::{
    check_h0, check_h1, check_h2, EscapeTrace, H0Options, HypothesisVerdict, Status, Witness,
    DEFAULT_GROWTH_THRESHOLD,
};
pub use word::{
    enumerate_words, enumerate_words_with_budget, word_count, Word, WordIter, DEFAULT_WORD_BUDGET,
};

pub(crate) use word::{check_budget, Odometer};

#[derive(Debug, Clone)]
pub struct Generator {
    pub label: String,
    pub matrix: ExactMatrix,
    float: FloatMatrix,
}

/// Nonempty list of invertible, equal-dimension exact matrices with labels.
#[derive(Debug, Clone)]
pub struct GeneratorSet {
    dim: usize,
    gens: Vec<Generator>,
    integer: bool,
}

impl GeneratorSet {
    pub fn new(gens: Vec<(String, ExactMatrix)>) -> Result<Self> {
        let first = gens
            .first()
            .ok_or_else(|| Error::InvalidConfig("generator set is empty".into()))?;
        let dim = first.1.dim();
        let mut seen = HashSet::new();
        let mut out = Vec::with_capacity(gens.len());
        for (label, m) in gens {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: m.dim() });
            }
            if !m.is_invertible() {
                return Err(Error::InvalidConfig(format!("generator {label} is singular")));
            }
            if label.is_empty() || !seen.insert(label.clone()) {
                return Err(Error::InvalidConfig(format!("bad or duplicate label {label:?}")));
            }
            let float = m.to_float();
            out.push(Generator { label, matrix: m, float });
        }
        let integer = out.iter().all(|g| g.matrix.is_integer());
        Ok(GeneratorSet { dim, gens: out, integer })
    }

    /// Parses the plain-text generator format:
    ///
    /// ```text
    /// dim 2
    /// gen a
    /// 2 1
    /// 1 1
    /// gen b
    /// 3 2
    /// 1 1
    /// ```
    ///
    /// Entries are integers or rationals `p/q`. Blank lines and `#`
    /// comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let err = |line: usize, message: String| Error::Parse { line, message };
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (ln, header) = lines.next().ok_or_else(|| err(1, "empty generator file".into()))?;
        let dim = match header.split_whitespace().collect::<Vec<_>>().as_slice() {
            ["dim", d] => d
                .parse::<usize>()
                .ok()
                .filter(|&d| d >= 1)
                .ok_or_else(|| err(ln, format!("invalid dimension {d:?}")))?,
            _ => return Err(err(ln, "expected header `dim <d>`".into())),
        };

        let mut gens: Vec<(String, ExactMatrix)> = Vec::new();
        let mut seen = HashSet::new();
        while let Some((ln, line)) = lines.next() {
            let label = match line.split_whitespace().collect::<Vec<_>>().as_slice() {
                ["gen", label] => label.to_string(),
                _ => return Err(err(ln, format!("expected `gen <label>`, found {line:?}"))),
            };
            if !seen.insert(label.clone()) {
                return Err(err(ln, format!("duplicate label {label:?}")));
            }
            let mut entries = Vec::with_capacity(dim * dim);
            for row in 0..dim {
                let (rl, text) = lines
                    .next()
                    .ok_or_else(|| err(ln, format!("generator {label}: missing row {}", row + 1)))?;
                let fields: Vec<&str> = text.split_whitespace().collect();
                if fields.len() != dim {
                    return Err(err(rl, format!("expected {dim} entries, found {}", fields.len())));
                }
                for f in fields {
                    entries.push(parse_rational(f).ok_or_else(|| err(rl, format!("bad entry {f:?}")))?);
                }
            }
            let m = ExactMatrix::from_rationals(dim, &entries).map_err(|e| err(ln, e.to_string()))?;
            if !m.is_invertible() {
                return Err(err(ln, format!("generator {label} is singular")));
            }
            gens.push((label, m));
        }
        if gens.is_empty() {
            return Err(err(ln, "no generators".into()));
        }
        Self::new(gens)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Serializes back into the text format accepted by [`GeneratorSet::parse`].
    pub fn to_text(&self) -> String {
        let mut out = format!("dim {}\n", self.dim);
        for g in &self.gens {
            out.push_str(&format!("gen {}\n", g.label));
            for i in 0..self.dim {
                let row: Vec<String> = (0..self.dim).map(|j| g.matrix.entry(i, j).to_string()).collect();
                out.push_str(&row.join(" "));
                out.push('\n');
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn is_integer(&self) -> bool {
        self.integer
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn label(&self, i: usize) -> &str {
        &self.gens[i].label
    }

    pub fn matrix(&self, i: usize) -> &ExactMatrix {
        &self.gens[i].matrix
    }

    pub fn float(&self, i: usize) -> &FloatMatrix {
        &self.gens[i].float
    }

    pub fn floats(&self) -> Vec<FloatMatrix> {
        self.gens.iter().map(|g| g.float.clone()).collect()
    }

    pub fn dets(&self) -> Vec<BigRational> {
        self.gens.iter().map(|g| g.matrix.det().clone()).collect()
    }

    /// `C = max ‖s‖` over generators, operator norm.
    pub fn max_operator_norm(&self) -> f64 {
        self.gens.iter().map(|g| operator_norm(&g.float)).fold(0.0, f64::max)
    }

    /// Same labels, transposed matrices.
    pub fn transposed(&self) -> GeneratorSet {
        let gens = self
            .gens
            .iter()
            .map(|g| {
                let m = g.matrix.transpose();
                let float = m.to_float();
                Generator { label: g.label.clone(), matrix: m, float }
            })
            .collect();
        GeneratorSet { dim: self.dim, gens, integer: self.integer }
    }

    /// Human-readable word: labels concatenated (joined with `*` when some
    /// label is longer than one character); the empty word is `id`.
    pub fn word_label(&self, w: &Word) -> String {
        self.indices_label(w.indices())
    }

    pub fn indices_label(&self, indices: &[usize]) -> String {
        if indices.is_empty() {
            return "id".into();
        }
        let sep = if self.gens.iter().all(|g| g.label.chars().count() == 1) { "" } else { "*" };
        indices.iter().map(|&i| self.gens[i].label.as_str()).collect::<Vec<_>>().join(sep)
    }

    /// Inverse of [`GeneratorSet::word_label`].
    pub fn parse_word(&self, text: &str) -> Result<Word> {
        let text = text.trim();
        if text == "id" || text.is_empty() {
            return Ok(Word::empty(self.dim));
        }
        let lookup = |tok: &str| {
            self.gens
                .iter()
                .position(|g| g.label == tok)
                .ok_or_else(|| Error::InvalidConfig(format!("unknown generator {tok:?}")))
        };
        let indices = if text.contains('*') {
            text.split('*').map(lookup).collect::<Result<Vec<_>>>()?
        } else {
            text.chars().map(|c| lookup(&c.to_string())).collect::<Result<Vec<_>>>()?
        };
        Word::from_indices(self, &indices)
    }
}

fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.parse().ok()?;
            let q: BigInt = q.parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p, q))
        }
        None => Some(BigRational::new(s.parse().ok()?, BigInt::one())),
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) const AB: &str = "dim 2\ngen a\n2 1\n1 1\ngen b\n3 2\n1 1\n";

    pub(crate) fn ab() -> GeneratorSet {
        GeneratorSet::parse(AB).unwrap()
    }

    pub(crate) fn gens(text: &str) -> GeneratorSet {
        GeneratorSet::parse(text).unwrap()
    }

    #[test]
    fn parses_example_file() {
        let g = ab();
        assert_eq!(g.dim(), 2);
        assert_eq!(g.len(), 2);
        assert!(g.is_integer());
        assert_eq!(g.dets(), vec![BigRational::one(), BigRational::one()]);
        assert_eq!(g.label(1), "b");
        assert_eq!(GeneratorSet::parse(&g.to_text()).unwrap().to_text(), g.to_text());
    }

    #[test]
    fn parses_rationals_and_comments() {
        let g = gens("# scaled\ndim 2\n\ngen h\n1/2 0 # half\n0 3/4\n");
        assert!(!g.is_integer());
        assert_eq!(g.matrix(0).entry(1, 1), BigRational::new(3.into(), 4.into()));
    }

    #[test]
    fn parse_errors_cite_lines() {
        let cases: &[(&str, usize)] = &[
            ("", 1),
            ("dim x\n", 1),
            ("dim 2\nmatrix a\n", 2),
            ("dim 2\ngen a\n1 2\n3\n", 4),
            ("dim 2\ngen a\n1 2\n3 z\n", 4),
            ("dim 2\ngen a\n1 2\n", 2),
            ("dim 2\ngen a\n1 2\n2 4\n", 2),
            ("dim 2\ngen a\n1 0\n0 1\ngen a\n1 0\n0 1\n", 5),
            ("dim 2\n", 1),
            ("dim 2\ngen a\n1/0 0\n0 1\n", 3),
        ];
        for (text, line) in cases {
            match GeneratorSet::parse(text) {
                Err(Error::Parse { line: l, .. }) => assert_eq!(l, *line, "{text:?}"),
                other => panic!("{text:?}: {other:?}"),
            }
        }
    }

    #[test]
    fn word_labels_round_trip() {
        let g = ab();
        let w = g.parse_word("abba").unwrap();
        assert_eq!(w.indices(), &[0, 1, 1, 0]);
        assert_eq!(g.word_label(&w), "abba");
        assert_eq!(g.parse_word("id").unwrap().len(), 0);
        let long = gens("dim 2\ngen up\n1 1\n0 1\ngen lo\n1 0\n1 1\n");
        let w = long.parse_word("up*lo").unwrap();
        assert_eq!(long.word_label(&w), "up*lo");
    }
}

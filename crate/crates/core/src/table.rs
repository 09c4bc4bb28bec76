//! Functions depending on finitely many coordinates, stored as 2^m values.

use crate::error::{Error, Result};
use crate::par;
use crate::space::{BoundaryTail, Configuration, Spin, SpinWord};

/// Largest table depth this crate will allocate.
pub const MAX_TABLE_DEPTH: usize = 26;

/// A function of the first `depth` coordinates, indexed by packed word.
///
/// `completion` is the tail used whenever the table is turned back into full
/// configurations (for instance when a transfer step needs the value of a
/// coordinate past `depth`).
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedFunction {
    depth: usize,
    values: Vec<f64>,
    completion: BoundaryTail,
}

#[inline]
pub(crate) fn index_of(config: &[Spin], depth: usize) -> usize {
    let mut idx = 0usize;
    for (j, &s) in config[..depth].iter().enumerate() {
        if s == 1 {
            idx |= 1 << j;
        }
    }
    idx
}

/// Binary-expansion embedding of a word into [-1, 1]:
/// `t = sum_j x_j 2^{-j-1}`.
pub fn embedding(word: &SpinWord) -> f64 {
    word.spins()
        .enumerate()
        .map(|(j, s)| f64::from(s) * 0.5f64.powi(j as i32 + 1))
        .sum()
}

impl TabulatedFunction {
    pub fn new(depth: usize, values: Vec<f64>, completion: BoundaryTail) -> Result<Self> {
        if depth > MAX_TABLE_DEPTH {
            return Err(Error::DepthCapExceeded {
                needed: depth,
                cap: MAX_TABLE_DEPTH,
            });
        }
        if values.len() != 1 << depth {
            return Err(Error::InvalidArgument(format!(
                "table of depth {depth} needs {} values, got {}",
                1usize << depth,
                values.len()
            )));
        }
        Ok(Self {
            depth,
            values,
            completion,
        })
    }

    pub fn constant(c: f64) -> Self {
        Self {
            depth: 0,
            values: vec![c],
            completion: BoundaryTail::AllPlus,
        }
    }

    /// Tabulates `f` over all words of length `depth`.
    pub fn from_fn<F>(depth: usize, completion: BoundaryTail, f: F) -> Self
    where
        F: Fn(&SpinWord) -> f64 + Sync + Send,
    {
        assert!(depth <= MAX_TABLE_DEPTH);
        let values = par::map_indices(1 << depth, |i| f(&SpinWord::from_index(i as u64, depth)));
        Self {
            depth,
            values,
            completion,
        }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn completion(&self) -> &BoundaryTail {
        &self.completion
    }

    pub fn with_completion(mut self, completion: BoundaryTail) -> Self {
        self.completion = completion;
        self
    }

    /// Value at a configuration given by at least `depth` leading spins.
    #[inline]
    pub fn eval(&self, config: &[Spin]) -> f64 {
        self.values[index_of(config, self.depth)]
    }

    pub fn eval_config(&self, config: &Configuration) -> f64 {
        let mut idx = 0usize;
        for j in 0..self.depth {
            if config.spin(j) == 1 {
                idx |= 1 << j;
            }
        }
        self.values[idx]
    }

    /// Value at a word; coordinates past the word come from `completion`.
    pub fn at_word(&self, word: &SpinWord) -> f64 {
        self.eval_config(&Configuration::new(word, self.completion.clone()))
    }

    /// Value at the constant configuration `sign^∞`.
    pub fn at_constant(&self, sign: Spin) -> f64 {
        let idx = if sign > 0 { (1usize << self.depth) - 1 } else { 0 };
        self.values[idx]
    }

    /// Same function tabulated at a larger depth.
    pub fn lift(&self, depth: usize) -> Result<Self> {
        if depth < self.depth {
            return Err(Error::InvalidArgument(format!(
                "cannot lift depth {} to {depth}",
                self.depth
            )));
        }
        if depth > MAX_TABLE_DEPTH {
            return Err(Error::DepthCapExceeded {
                needed: depth,
                cap: MAX_TABLE_DEPTH,
            });
        }
        let mask = (1usize << self.depth) - 1;
        let values = par::map_indices(1 << depth, |i| self.values[i & mask]);
        Ok(Self {
            depth,
            values,
            completion: self.completion.clone(),
        })
    }

    fn zip_with(&self, other: &Self, op: impl Fn(f64, f64) -> f64 + Sync + Send) -> Self {
        let depth = self.depth.max(other.depth);
        let ma = (1usize << self.depth) - 1;
        let mb = (1usize << other.depth) - 1;
        let values = par::map_indices(1 << depth, |i| op(self.values[i & ma], other.values[i & mb]));
        Self {
            depth,
            values,
            completion: self.completion.clone(),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| v * c)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64 + Sync + Send) -> Self {
        let values = par::map_indices(self.values.len(), |i| f(self.values[i]));
        Self {
            depth: self.depth,
            values,
            completion: self.completion.clone(),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `sup |self - other|` over a common depth.
    pub fn sup_distance(&self, other: &Self) -> f64 {
        self.zip_with(other, |a, b| (a - b).abs())
            .values
            .iter()
            .fold(0.0, |m, &v| m.max(v))
    }

    /// `(t, value)` pairs sorted by the binary-expansion embedding.
    pub fn by_embedding(&self) -> Vec<(f64, f64)> {
        let mut rows: Vec<(f64, f64)> = (0..self.values.len())
            .map(|i| (embedding(&SpinWord::from_index(i as u64, self.depth)), self.values[i]))
            .collect();
        rows.sort_by(|a, b| a.0.total_cmp(&b.0));
        rows
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_and_lift() {
        let c = TabulatedFunction::constant(2.5);
        assert_eq!(c.depth(), 0);
        let l = c.lift(3).unwrap();
        assert!(l.values().iter().all(|&v| v == 2.5));
        assert!(l.lift(2).is_err());
    }

    #[test]
    fn eval_reads_leading_coordinates() {
        let f = TabulatedFunction::from_fn(2, BoundaryTail::AllPlus, |w| w.index() as f64);
        assert_eq!(f.eval(&[1, -1, 1, 1]), 1.0);
        assert_eq!(f.eval(&[-1, 1]), 2.0);
        assert_eq!(f.at_word(&SpinWord::parse("-").unwrap()), 2.0);
        assert_eq!(f.at_constant(1), 3.0);
        assert_eq!(f.at_constant(-1), 0.0);
    }

    #[test]
    fn embedding_orders_words() {
        assert_eq!(embedding(&SpinWord::parse("+").unwrap()), 0.5);
        assert_eq!(embedding(&SpinWord::parse("-+").unwrap()), -0.25);
        let f = TabulatedFunction::from_fn(3, BoundaryTail::AllPlus, embedding);
        let rows = f.by_embedding();
        assert!(rows.windows(2).all(|r| r[0].0 < r[1].0));
        assert!(rows.iter().all(|(t, v)| t == v));
        assert!(rows.iter().all(|(t, _)| t.abs() <= 1.0));
    }

    #[test]
    fn pointwise_ops_align_depths() {
        let a = TabulatedFunction::from_fn(1, BoundaryTail::AllPlus, |w| f64::from(w.spin(0)));
        let b = TabulatedFunction::from_fn(2, BoundaryTail::AllPlus, |w| f64::from(w.spin(1)));
        let p = a.mul(&b);
        assert_eq!(p.depth(), 2);
        assert_eq!(p.values(), &[1.0, -1.0, -1.0, 1.0]);
        assert_eq!(a.add(&b).sup_norm(), 2.0);
        assert_eq!(a.sup_distance(&a.scale(3.0)), 2.0);
    }

    #[test]
    fn rejects_bad_lengths() {
        assert!(TabulatedFunction::new(2, vec![0.0; 3], BoundaryTail::AllPlus).is_err());
        assert!(TabulatedFunction::new(MAX_TABLE_DEPTH + 1, vec![], BoundaryTail::AllPlus).is_err());
    }
}

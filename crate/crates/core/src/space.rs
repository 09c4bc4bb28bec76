//! Spin configurations on {-1,+1}^N, boundary tails, the coordinatewise
//! partial order, cylinder indicators and monotone test functions.
//!
//! Coordinates are 0-based throughout. A [`SpinWord`] is bit-packed with
//! bit `j = (x_j + 1) / 2`, so the word index doubles as the table index of
//! a [`TabulatedFunction`].

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::TabulatedFunction;

pub type Spin = i8;

#[inline]
fn check_spin(s: Spin) -> Result<Spin> {
    match s {
        1 | -1 => Ok(s),
        other => Err(Error::InvalidArgument(format!("spin must be -1 or +1, got {other}"))),
    }
}

/// A finite prefix `(x_0, ..., x_{n-1})` of a configuration.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub struct SpinWord {
    bits: u64,
    len: u8,
}

impl SpinWord {
    pub const MAX_LEN: usize = 64;

    pub fn new(spins: &[Spin]) -> Result<Self> {
        if spins.len() > Self::MAX_LEN {
            return Err(Error::InvalidArgument(format!(
                "word length {} exceeds {}",
                spins.len(),
                Self::MAX_LEN
            )));
        }
        let mut bits = 0u64;
        for (j, &s) in spins.iter().enumerate() {
            if check_spin(s)? == 1 {
                bits |= 1 << j;
            }
        }
        Ok(Self {
            bits,
            len: spins.len() as u8,
        })
    }

    /// Word of length `len` whose packed index is `index`.
    pub fn from_index(index: u64, len: usize) -> Self {
        assert!(len <= Self::MAX_LEN, "word length {len} exceeds {}", Self::MAX_LEN);
        let mask = if len == 64 { u64::MAX } else { (1u64 << len) - 1 };
        Self {
            bits: index & mask,
            len: len as u8,
        }
    }

    pub fn all_plus(len: usize) -> Self {
        Self::from_index(u64::MAX, len)
    }

    pub fn all_minus(len: usize) -> Self {
        Self::from_index(0, len)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn spin(&self, j: usize) -> Spin {
        assert!(j < self.len(), "index {j} out of word of length {}", self.len);
        if self.bits >> j & 1 == 1 {
            1
        } else {
            -1
        }
    }

    pub fn with_spin(mut self, j: usize, s: Spin) -> Self {
        assert!(j < self.len());
        if s == 1 {
            self.bits |= 1 << j;
        } else {
            self.bits &= !(1 << j);
        }
        self
    }

    pub fn flipped_at(mut self, j: usize) -> Self {
        assert!(j < self.len());
        self.bits ^= 1 << j;
        self
    }

    pub fn global_flip(&self) -> Self {
        Self::from_index(!self.bits, self.len())
    }

    pub fn spins(&self) -> impl Iterator<Item = Spin> + '_ {
        (0..self.len()).map(move |j| self.spin(j))
    }

    pub fn to_vec(&self) -> Vec<Spin> {
        self.spins().collect()
    }

    /// Parses `"+-+"` or `"+1,-1,+1"` style words.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        let spins: Result<Vec<Spin>> = if s.contains(',') {
            s.split(',')
                .map(|t| match t.trim() {
                    "+1" | "1" | "+" => Ok(1),
                    "-1" | "-" => Ok(-1),
                    other => Err(Error::InvalidArgument(format!("bad spin '{other}'"))),
                })
                .collect()
        } else {
            s.chars()
                .map(|c| match c {
                    '+' => Ok(1),
                    '-' => Ok(-1),
                    other => Err(Error::InvalidArgument(format!("bad spin '{other}'"))),
                })
                .collect()
        };
        Self::new(&spins?)
    }
}

impl fmt::Display for SpinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.spins() {
            f.write_str(if s == 1 { "+" } else { "-" })?;
        }
        Ok(())
    }
}

impl Serialize for SpinWord {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for SpinWord {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        SpinWord::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize)]
pub enum Comparison {
    Geq,
    Leq,
    Equal,
    Incomparable,
}

/// Compares two words under the coordinatewise order.
pub fn compare(a: &SpinWord, b: &SpinWord) -> Result<Comparison> {
    if a.len() != b.len() {
        return Err(Error::IncomparableLengths(a.len(), b.len()));
    }
    let a_geq = b.bits & !a.bits == 0;
    let b_geq = a.bits & !b.bits == 0;
    Ok(match (a_geq, b_geq) {
        (true, true) => Comparison::Equal,
        (true, false) => Comparison::Geq,
        (false, true) => Comparison::Leq,
        (false, false) => Comparison::Incomparable,
    })
}

/// The tail `y` completing `[x|y]_n`. Tails are indexed by absolute
/// coordinate: `at(j)` is `y_j`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryTail {
    AllPlus,
    AllMinus,
    /// `y_j = start * (-1)^j`.
    Alternating {
        start: Spin,
    },
    /// `y_j = word[j mod len]`; the word must be non-empty.
    Periodic(SpinWord),
    /// `y_j = head[j]` for `j < head.len()`, otherwise `rest.at(j)`.
    Spliced {
        head: SpinWord,
        rest: Box<BoundaryTail>,
    },
}

impl BoundaryTail {
    pub fn alternating(start: Spin) -> Result<Self> {
        Ok(Self::Alternating {
            start: check_spin(start)?,
        })
    }

    pub fn periodic(word: SpinWord) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidArgument("periodic tail needs a non-empty word".into()));
        }
        Ok(Self::Periodic(word))
    }

    /// The constant tail `sign^∞`.
    pub fn constant(sign: Spin) -> Self {
        if sign > 0 {
            Self::AllPlus
        } else {
            Self::AllMinus
        }
    }

    #[inline]
    pub fn at(&self, j: usize) -> Spin {
        match self {
            Self::AllPlus => 1,
            Self::AllMinus => -1,
            Self::Alternating { start } => {
                if j.is_multiple_of(2) {
                    *start
                } else {
                    -*start
                }
            }
            Self::Periodic(w) => w.spin(j % w.len()),
            Self::Spliced { head, rest } => {
                if j < head.len() {
                    head.spin(j)
                } else {
                    rest.at(j)
                }
            }
        }
    }

    /// Tail seen after prepending `k` coordinates: `shifted(k).at(j + k) == at(j)`.
    pub fn shifted(&self, k: usize) -> Self {
        match self {
            Self::AllPlus | Self::AllMinus => self.clone(),
            Self::Alternating { start } => Self::Alternating {
                start: if k.is_multiple_of(2) { *start } else { -*start },
            },
            Self::Periodic(w) => {
                let p = w.len();
                let r = k % p;
                let spins: Vec<Spin> = (0..p).map(|j| w.spin((j + p - r) % p)).collect();
                Self::Periodic(SpinWord::new(&spins).expect("rotation of a valid word"))
            }
            Self::Spliced { head, rest } => {
                let mut spins = vec![1; k];
                spins.extend(head.spins());
                match SpinWord::new(&spins) {
                    Ok(h) => Self::Spliced {
                        head: h,
                        rest: Box::new(rest.shifted(k)),
                    },
                    // Head longer than a word: keep only the shifted rest.
                    Err(_) => rest.shifted(k),
                }
            }
        }
    }

    pub fn global_flip(&self) -> Self {
        match self {
            Self::AllPlus => Self::AllMinus,
            Self::AllMinus => Self::AllPlus,
            Self::Alternating { start } => Self::Alternating { start: -*start },
            Self::Periodic(w) => Self::Periodic(w.global_flip()),
            Self::Spliced { head, rest } => Self::Spliced {
                head: head.global_flip(),
                rest: Box::new(rest.global_flip()),
            },
        }
    }

    /// `[y|t|y]_n`: this tail with coordinate `n` replaced by `t`.
    pub fn with_site(&self, n: usize, t: Spin) -> Self {
        let spins: Vec<Spin> = (0..=n).map(|j| if j == n { t } else { self.at(j) }).collect();
        Self::Spliced {
            head: SpinWord::new(&spins).expect("n < 64"),
            rest: Box::new(self.clone()),
        }
    }

    /// Parses the CLI form: `plus`, `minus`, `alt`, `alt-`, `word:<spins>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "plus" | "+" => Ok(Self::AllPlus),
            "minus" | "-" => Ok(Self::AllMinus),
            "alt" | "alt+" => Ok(Self::Alternating { start: 1 }),
            "alt-" => Ok(Self::Alternating { start: -1 }),
            other => match other.strip_prefix("word:") {
                Some(w) => Self::periodic(SpinWord::parse(w)?),
                None => Err(Error::InvalidArgument(format!("unknown boundary '{other}'"))),
            },
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::AllPlus => "plus".into(),
            Self::AllMinus => "minus".into(),
            Self::Alternating { start: 1 } => "alt".into(),
            Self::Alternating { .. } => "alt-".into(),
            Self::Periodic(w) => format!("word:{w}"),
            Self::Spliced { head, rest } => format!("{head}|{}", rest.label()),
        }
    }
}

/// A full configuration: an explicit prefix followed by a tail (tail read at
/// absolute coordinates).
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    prefix: Vec<Spin>,
    tail: BoundaryTail,
}

impl Configuration {
    /// `[x|y]_n` with `n = word.len()`.
    pub fn new(word: &SpinWord, tail: BoundaryTail) -> Self {
        Self {
            prefix: word.to_vec(),
            tail,
        }
    }

    pub fn from_spins(prefix: Vec<Spin>, tail: BoundaryTail) -> Result<Self> {
        for &s in &prefix {
            check_spin(s)?;
        }
        Ok(Self { prefix, tail })
    }

    pub fn constant(sign: Spin) -> Self {
        Self {
            prefix: Vec::new(),
            tail: BoundaryTail::constant(sign),
        }
    }

    pub fn prefix(&self) -> &[Spin] {
        &self.prefix
    }

    pub fn tail(&self) -> &BoundaryTail {
        &self.tail
    }

    #[inline]
    pub fn spin(&self, j: usize) -> Spin {
        if j < self.prefix.len() {
            self.prefix[j]
        } else {
            self.tail.at(j)
        }
    }

    /// First `len` coordinates.
    pub fn materialize(&self, len: usize) -> Vec<Spin> {
        let mut out = vec![0; len];
        self.fill(&mut out);
        out
    }

    pub fn fill(&self, out: &mut [Spin]) {
        for (j, o) in out.iter_mut().enumerate() {
            *o = self.spin(j);
        }
    }

    /// `a x = (a, x_0, x_1, ...)`.
    pub fn prepend(&self, a: Spin) -> Self {
        let mut prefix = Vec::with_capacity(self.prefix.len() + 1);
        prefix.push(a);
        prefix.extend_from_slice(&self.prefix);
        Self {
            prefix,
            tail: self.tail.shifted(1),
        }
    }

    /// `σ^k x`.
    pub fn shift(&self, k: usize) -> Self {
        if k <= self.prefix.len() {
            return Self {
                prefix: self.prefix[k..].to_vec(),
                tail: shift_left(&self.tail, k),
            };
        }
        Self {
            prefix: Vec::new(),
            tail: shift_left(&self.tail, k),
        }
    }

    pub fn global_flip(&self) -> Self {
        Self {
            prefix: self.prefix.iter().map(|s| -s).collect(),
            tail: self.tail.global_flip(),
        }
    }
}

/// Tail with `result.at(j) == tail.at(j + k)`.
fn shift_left(tail: &BoundaryTail, k: usize) -> BoundaryTail {
    match tail {
        BoundaryTail::AllPlus | BoundaryTail::AllMinus => tail.clone(),
        BoundaryTail::Alternating { .. } => tail.shifted(k % 2),
        BoundaryTail::Periodic(w) => {
            let p = w.len();
            tail.shifted(p - k % p)
        }
        BoundaryTail::Spliced { head, rest } => {
            let spins: Vec<Spin> = (k..head.len()).map(|j| head.spin(j)).collect();
            let rest = shift_left(rest, k);
            if spins.is_empty() {
                rest
            } else {
                BoundaryTail::Spliced {
                    head: SpinWord::new(&spins).expect("sub-word"),
                    rest: Box::new(rest),
                }
            }
        }
    }
}

/// A finite support set `B` for the cylinder indicator
/// `phi_B(x) = prod_{i in B} (1 + x_i) / 2`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CylinderSet(BTreeSet<usize>);

impl CylinderSet {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(indices: impl IntoIterator<Item = usize>) -> Self {
        Self(indices.into_iter().collect())
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn union(&self, other: &Self) -> Self {
        Self(self.0.union(&other.0).copied().collect())
    }

    /// Smallest depth containing `B` (0 for the empty set).
    pub fn depth(&self) -> usize {
        self.0.iter().next_back().map_or(0, |m| m + 1)
    }

    #[inline]
    pub fn phi(&self, config: &[Spin]) -> f64 {
        if self.0.iter().all(|&i| config[i] == 1) {
            1.0
        } else {
            0.0
        }
    }

    pub fn phi_at(&self, config: &Configuration) -> f64 {
        if self.0.iter().all(|&i| config.spin(i) == 1) {
            1.0
        } else {
            0.0
        }
    }

    /// `phi_B` tabulated at `depth >= self.depth()`.
    pub fn to_table(&self, depth: usize, completion: BoundaryTail) -> Result<TabulatedFunction> {
        if depth < self.depth() {
            return Err(Error::InvalidArgument(format!(
                "depth {depth} too small for support set ending at {}",
                self.depth()
            )));
        }
        let mask: u64 = self.0.iter().map(|&i| 1u64 << i).sum();
        let values = (0..1u64 << depth)
            .map(|idx| if idx & mask == mask { 1.0 } else { 0.0 })
            .collect();
        TabulatedFunction::new(depth, values, completion)
    }
}

impl fmt::Display for CylinderSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// `phi_B` evaluated at `[x|y]`.
pub fn phi_b(b: &CylinderSet, x: &Configuration) -> f64 {
    b.phi_at(x)
}

/// A covering pair `lower ⋖ upper` (one coordinate raised from -1 to +1)
/// on which a tabulated function decreases.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MonotoneViolation {
    pub lower: SpinWord,
    pub upper: SpinWord,
    pub drop: f64,
}

/// First covering pair where `f(upper) < f(lower) - tol`, scanning words
/// in ascending index order.
pub fn monotone_violation(f: &TabulatedFunction, tol: f64) -> Option<MonotoneViolation> {
    let depth = f.depth();
    let values = f.values();
    for idx in 0..values.len() as u64 {
        for j in 0..depth {
            if idx >> j & 1 == 0 {
                let up = idx | 1 << j;
                let drop = values[idx as usize] - values[up as usize];
                if drop > tol {
                    return Some(MonotoneViolation {
                        lower: SpinWord::from_index(idx, depth),
                        upper: SpinWord::from_index(up, depth),
                        drop,
                    });
                }
            }
        }
    }
    None
}

/// True iff `f(a) >= f(b)` whenever `a ⪰ b`, checked on covering pairs.
pub fn is_increasing(f: &TabulatedFunction) -> bool {
    monotone_violation(f, 0.0).is_none()
}

/// Like [`is_increasing`] but tolerating decreases up to `tol`.
pub fn is_increasing_tol(f: &TabulatedFunction, tol: f64) -> bool {
    monotone_violation(f, tol).is_none()
}

pub const MAX_MONOTONE_DEPTH: usize = 4;

/// All increasing {0,1}-valued functions on {-1,+1}^n, `n <= 4`.
///
/// Built recursively: a monotone function of `n` coordinates is a pair
/// `(g_minus, g_plus)` of monotone functions of the first `n - 1`
/// coordinates (the value of `x_{n-1}` selects one) with `g_minus <= g_plus`.
pub fn enumerate_monotone_indicators(n: usize) -> Result<Vec<TabulatedFunction>> {
    if n > MAX_MONOTONE_DEPTH {
        return Err(Error::EnumerationTooLarge(n));
    }
    // Bit-packed truth tables: bit `idx` is f(word idx).
    let mut level: Vec<u32> = vec![0b0, 0b1];
    for d in 1..=n {
        let half = 1u32 << (d - 1);
        let mut next = Vec::new();
        for &lo in &level {
            for &hi in &level {
                if lo & !hi == 0 {
                    next.push(lo | hi << half);
                }
            }
        }
        level = next;
    }
    level
        .into_iter()
        .map(|bits| {
            let values = (0..1usize << n).map(|i| f64::from((bits >> i) & 1)).collect();
            TabulatedFunction::new(n, values, BoundaryTail::AllPlus)
        })
        .collect()
}

/// If `f` is the indicator of a principal up-set `{x : x_i = +1, i in B}`,
/// returns `B`.
pub fn as_cylinder_indicator(f: &TabulatedFunction) -> Option<CylinderSet> {
    let values = f.values();
    if values.iter().any(|&v| v != 0.0 && v != 1.0) {
        return None;
    }
    let ones: Vec<usize> = (0..values.len()).filter(|&i| values[i] == 1.0).collect();
    let min = *ones.first()?;
    let b = CylinderSet::new((0..f.depth()).filter(|&j| min >> j & 1 == 1));
    let mask = min;
    let expected = values
        .iter()
        .enumerate()
        .all(|(i, &v)| (i & mask == mask) == (v == 1.0));
    expected.then_some(b)
}

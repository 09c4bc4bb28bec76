//! Exact finite-volume Gibbs measures `μ_n^y` on the 2^n words of length `n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::potential::{PotentialEval, PotentialKind};
use crate::space::{is_increasing, BoundaryTail, CylinderSet, Spin, SpinWord};
use crate::table::TabulatedFunction;

pub const MAX_VOLUME: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteVolumeMeasure {
    n: usize,
    boundary: BoundaryTail,
    log_weights: Vec<f64>,
    weights: Vec<f64>,
    log_z: f64,
    potential: PotentialEval,
}

/// One row of a measure export.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureRow {
    pub index: u64,
    pub word: SpinWord,
    pub log_weight: f64,
    pub weight_normalized: f64,
}

impl FiniteVolumeMeasure {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn boundary(&self) -> &BoundaryTail {
        &self.boundary
    }

    pub fn potential(&self) -> &PotentialEval {
        &self.potential
    }

    /// Unnormalized `S_n(A)([x|y]_n)`, indexed by packed word.
    pub fn log_weights(&self) -> &[f64] {
        &self.log_weights
    }

    /// Normalized weights, indexed by packed word.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn log_partition_function(&self) -> f64 {
        self.log_z
    }

    pub fn partition_function(&self) -> f64 {
        self.log_z.exp()
    }

    pub fn weight(&self, x: &SpinWord) -> f64 {
        self.weights[x.index() as usize]
    }

    pub fn rows(&self) -> impl Iterator<Item = MeasureRow> + '_ {
        (0..self.weights.len()).map(move |i| MeasureRow {
            index: i as u64,
            word: SpinWord::from_index(i as u64, self.n),
            log_weight: self.log_weights[i],
            weight_normalized: self.weights[i],
        })
    }

    /// Values of `f` at `[x|y]_n` for every word `x`.
    fn values_of(&self, f: &TabulatedFunction) -> Vec<f64> {
        let d = f.depth();
        if d <= self.n {
            let mask = (1usize << d) - 1;
            return (0..self.weights.len()).map(|i| f.values()[i & mask]).collect();
        }
        let mut tail_bits = 0usize;
        for j in self.n..d {
            if self.boundary.at(j) == 1 {
                tail_bits |= 1 << j;
            }
        }
        (0..self.weights.len()).map(|i| f.values()[i | tail_bits]).collect()
    }

    fn weighted_sum(&self, values: impl Fn(usize) -> f64 + Sync + Send) -> f64 {
        let terms = par::map_indices(self.weights.len(), |i| self.weights[i] * values(i));
        par::pairwise_sum(&terms)
    }
}

/// `μ_n^y` by exact enumeration, weights `exp(S_n(A)([x|y]_n)) / Z`.
pub fn build_measure(p: &PotentialEval, n: usize, y: &BoundaryTail) -> Result<FiniteVolumeMeasure> {
    if n == 0 || n > MAX_VOLUME {
        return Err(Error::VolumeOutOfRange(n));
    }
    let len = n + p.range() - 1;
    let tail: Vec<Spin> = (n..len).map(|j| y.at(j)).collect();
    let log_weights = par::map_indices(1 << n, |idx| {
        let mut z = vec![0 as Spin; len];
        for (j, s) in z[..n].iter_mut().enumerate() {
            *s = if idx >> j & 1 == 1 { 1 } else { -1 };
        }
        z[n..].copy_from_slice(&tail);
        p.birkhoff_slice(&z, n)
    });
    let shift = par::max(&log_weights);
    let unnorm = par::map_indices(log_weights.len(), |i| (log_weights[i] - shift).exp());
    let sum = par::pairwise_sum(&unnorm);
    let weights = par::map_indices(unnorm.len(), |i| unnorm[i] / sum);
    Ok(FiniteVolumeMeasure {
        n,
        boundary: y.clone(),
        log_weights,
        weights,
        log_z: shift + sum.ln(),
        potential: p.clone(),
    })
}

/// `∫ f dμ_n^y`; coordinates of `f` past `n` are read from the boundary.
pub fn expect(m: &FiniteVolumeMeasure, f: &TabulatedFunction) -> f64 {
    let v = m.values_of(f);
    m.weighted_sum(|i| v[i])
}

pub fn fkg_covariance(m: &FiniteVolumeMeasure, f: &TabulatedFunction, g: &TabulatedFunction) -> f64 {
    let fv = m.values_of(f);
    let gv = m.values_of(g);
    let ef = m.weighted_sum(|i| fv[i]);
    let eg = m.weighted_sum(|i| gv[i]);
    m.weighted_sum(|i| fv[i] * gv[i]) - ef * eg
}

/// `∫ x_i dμ_n^y`.
pub fn magnetization(m: &FiniteVolumeMeasure, i: usize) -> f64 {
    assert!(i < m.n, "site {i} outside volume {}", m.n);
    m.weighted_sum(|idx| if idx >> i & 1 == 1 { 1.0 } else { -1.0 })
}

/// The five expectations
/// `∫f dμ_{n-1}^- , ∫f dμ_n^- , ∫f dμ_n^x , ∫f dμ_n^+ , ∫f dμ_{n-1}^+`.
/// `middle` defaults to the alternating tail starting with `+1`.
pub fn domination_chain(
    p: &PotentialEval,
    f: &TabulatedFunction,
    n: usize,
    middle: Option<&BoundaryTail>,
) -> Result<[f64; 5]> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "domination chain needs n >= 2, got {n}"
        )));
    }
    if !is_increasing(f) {
        return Err(Error::NotIncreasing);
    }
    let alt = BoundaryTail::Alternating { start: 1 };
    let x = middle.unwrap_or(&alt);
    let e = |k: usize, y: &BoundaryTail| -> Result<f64> { Ok(expect(&build_measure(p, k, y)?, f)) };
    Ok([
        e(n - 1, &BoundaryTail::AllMinus)?,
        e(n, &BoundaryTail::AllMinus)?,
        e(n, x)?,
        e(n, &BoundaryTail::AllPlus)?,
        e(n - 1, &BoundaryTail::AllPlus)?,
    ])
}

/// `true` when the chain is ordered within `tol`.
pub fn chain_ordered(chain: &[f64; 5], tol: f64) -> bool {
    chain.windows(2).all(|w| w[0] <= w[1] + tol)
}

/// `H_n(x, y) - S_n(A)([x|y]_n)` where `H_n` is the pair Hamiltonian with
/// `J_ij = β a_{|i-j|}` summed directly over bonds inside the volume, bonds
/// crossing into the boundary, and the field.
pub fn hamiltonian_equivalence(p: &PotentialEval, x: &SpinWord, y: &BoundaryTail) -> Result<f64> {
    if p.kind() == PotentialKind::ProductType {
        return Err(Error::NotIsingType);
    }
    let n = x.len();
    if n == 0 {
        return Err(Error::InvalidArgument("Hamiltonian needs n >= 1".into()));
    }
    let k = p.truncation();
    let j = p.coeffs();
    let xs = |i: usize| f64::from(x.spin(i));
    let mut inner = 0.0;
    for a in 0..n {
        for b in a + 1..n.min(a + k + 1) {
            inner += j[b - a - 1] * xs(a) * xs(b);
        }
    }
    let field: f64 = (0..n).map(|i| p.field() * xs(i)).sum();
    let mut boundary = 0.0;
    for a in 0..n {
        for b in n..a + k + 1 {
            boundary += j[b - a - 1] * xs(a) * f64::from(y.at(b));
        }
    }
    Ok(inner + field + boundary - p.birkhoff_sum(x, y))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    /// Mixture weight of `μ_n^{[y|t|y]_n}` for `t = +1, -1`.
    pub weights: [f64; 2],
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// `∫f dμ_{n+1}^y` as a mixture over `t = x_n` of `∫f dμ_n^{[y|t|y]_n}`.
///
/// The weight of `t` is `Z_n^{[y|t|y]_n} e^{A(t, y_{n+1}, …)} / Z_{n+1}^y`,
/// which is the `μ_{n+1}^y`-probability of `x_n = t`.
pub fn decomposition_identity(
    p: &PotentialEval,
    n: usize,
    y: &BoundaryTail,
    f: &TabulatedFunction,
) -> Result<Decomposition> {
    if n == 0 {
        return Err(Error::InvalidArgument("decomposition needs n >= 1".into()));
    }
    let big = build_measure(p, n + 1, y)?;
    let rhs = expect(&big, f);
    let mut weights = [0.0; 2];
    let mut lhs = 0.0;
    for (slot, t) in [(0, 1), (1, -1)] {
        let yt = y.with_site(n, t);
        let m = build_measure(p, n, &yt)?;
        let edge_cfg: Vec<Spin> = (n..n + p.range()).map(|j| yt.at(j)).collect();
        let edge = p.eval(&edge_cfg);
        let w = (m.log_partition_function() + edge - big.log_partition_function()).exp();
        weights[slot] = w;
        lhs += w * expect(&m, f);
    }
    Ok(Decomposition {
        weights,
        lhs,
        rhs,
        residual: lhs - rhs,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    Diagonal,
    DisjointCylinder,
    Other,
}

impl PairClass {
    pub fn of(f: &TabulatedFunction, g: &TabulatedFunction) -> Self {
        if f == g {
            return Self::Diagonal;
        }
        match (
            crate::space::as_cylinder_indicator(f),
            crate::space::as_cylinder_indicator(g),
        ) {
            (Some(a), Some(b)) if a.indices().all(|i| !b.indices().any(|j| j == i)) => Self::DisjointCylinder,
            _ => Self::Other,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Self::Diagonal => "diagonal",
            Self::DisjointCylinder => "disjoint_cylinder",
            Self::Other => "other",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovarianceWitness {
    pub n: usize,
    pub boundary: String,
    pub f: Vec<f64>,
    pub g: Vec<f64>,
    pub f_cylinder: Option<CylinderSet>,
    pub g_cylinder: Option<CylinderSet>,
    pub covariance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FkgCell {
    pub n: usize,
    pub boundary: String,
    pub pair_class: PairClass,
    pub pairs: usize,
    pub min_covariance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FkgScan {
    pub cells: Vec<FkgCell>,
    pub min_covariance: f64,
    /// Pair attaining the overall minimum.
    pub witness: Option<CovarianceWitness>,
}

impl FkgScan {
    pub fn passes(&self, tol: f64) -> bool {
        self.min_covariance >= -tol
    }
}

/// Covariances of all pairs of monotone indicators of depth `n`, for each
/// volume `n` in `volumes` and each boundary.
pub fn fkg_scan(p: &PotentialEval, volumes: &[usize], boundaries: &[BoundaryTail]) -> Result<FkgScan> {
    let mut cells = Vec::new();
    let mut witness: Option<CovarianceWitness> = None;
    for &n in volumes {
        let fam = crate::space::enumerate_monotone_indicators(n)?;
        let cyl: Vec<Option<CylinderSet>> = fam.iter().map(crate::space::as_cylinder_indicator).collect();
        for y in boundaries {
            let m = build_measure(p, n, y)?;
            let means: Vec<f64> = fam.iter().map(|f| expect(&m, f)).collect();
            let mut mins: std::collections::BTreeMap<PairClass, (usize, f64)> = Default::default();
            let mut local: Option<(f64, usize, usize)> = None;
            for a in 0..fam.len() {
                for b in a..fam.len() {
                    let fa = fam[a].values();
                    let fb = fam[b].values();
                    let efg = m.weighted_sum(|i| fa[i] * fb[i]);
                    let cov = efg - means[a] * means[b];
                    let class = if a == b {
                        PairClass::Diagonal
                    } else {
                        match (&cyl[a], &cyl[b]) {
                            (Some(s), Some(t)) if s.indices().all(|i| !t.indices().any(|j| j == i)) => {
                                PairClass::DisjointCylinder
                            }
                            _ => PairClass::Other,
                        }
                    };
                    let e = mins.entry(class).or_insert((0, f64::INFINITY));
                    e.0 += 1;
                    e.1 = e.1.min(cov);
                    if local.is_none_or(|(c, _, _)| cov < c) {
                        local = Some((cov, a, b));
                    }
                }
            }
            for (pair_class, (pairs, min_covariance)) in mins {
                cells.push(FkgCell {
                    n,
                    boundary: y.label(),
                    pair_class,
                    pairs,
                    min_covariance,
                });
            }
            if let Some((cov, a, b)) = local {
                if witness.as_ref().is_none_or(|w| cov < w.covariance) {
                    witness = Some(CovarianceWitness {
                        n,
                        boundary: y.label(),
                        f: fam[a].values().to_vec(),
                        g: fam[b].values().to_vec(),
                        f_cylinder: cyl[a].clone(),
                        g_cylinder: cyl[b].clone(),
                        covariance: cov,
                    });
                }
            }
        }
    }
    let min_covariance = cells.iter().map(|c| c.min_covariance).fold(f64::INFINITY, f64::min);
    Ok(FkgScan {
        cells,
        min_covariance,
        witness,
    })
}

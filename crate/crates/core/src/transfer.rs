//! The Ruelle transfer operator `(L f)(x) = sum_{i=±1} e^{A(ix)} f(ix)` on
//! tabulated functions, power iteration, Cesàro measures and the
//! finite-volume diagnostics built on them.
//!
//! A table of depth `m` is exact for the `K`-truncated potential when
//! `m >= range - 1`, where `range` is the number of coordinates the potential
//! reads. Below that depth the missing coordinates are filled from the
//! table's completion tail. Iterates evaluated at a constant point `±1^∞`
//! with the matching constant completion stay exact for the first `m` steps,
//! because every preimage of `±1^∞` reached in `j <= m` steps agrees with the
//! completion past coordinate `m`.

use serde::Serialize;

pub use crate::table::TabulatedFunction;

use crate::error::{Error, Result};
use crate::gibbs;
use crate::par;
use crate::potential::{class_e_check_ising, is_mirrored, PotentialEval, PotentialKind};
use crate::space::{BoundaryTail, CylinderSet, Spin, SpinWord};

pub const DEFAULT_DEPTH_CAP: usize = 20;

/// Smallest depth at which `L f` is exactly representable.
pub fn exact_depth(p: &PotentialEval, f_depth: usize) -> usize {
    f_depth.max(p.range() - 1)
}

/// `L f`, tabulated exactly. Fails when the exact depth exceeds `cap`.
pub fn transfer_apply(p: &PotentialEval, f: &TabulatedFunction, cap: usize) -> Result<TabulatedFunction> {
    let m = exact_depth(p, f.depth());
    if m > cap {
        return Err(Error::DepthCapExceeded { needed: m, cap });
    }
    transfer_apply_at_depth(p, f, m, f.completion().clone())
}

/// `L f` tabulated at depth `m`; coordinates past `m` come from `completion`.
pub fn transfer_apply_at_depth(
    p: &PotentialEval,
    f: &TabulatedFunction,
    m: usize,
    completion: BoundaryTail,
) -> Result<TabulatedFunction> {
    if m > crate::table::MAX_TABLE_DEPTH {
        return Err(Error::DepthCapExceeded {
            needed: m,
            cap: crate::table::MAX_TABLE_DEPTH,
        });
    }
    // Coordinates of x that A(ix) and f(ix) can read.
    let x_len = m.max(p.range() - 1).max(f.depth().saturating_sub(1));
    let tail: Vec<Spin> = (m..x_len).map(|j| completion.at(j)).collect();
    let values = par::map_indices(1 << m, |idx| {
        let mut buf = vec![0 as Spin; x_len + 1];
        for j in 0..m {
            buf[j + 1] = if idx >> j & 1 == 1 { 1 } else { -1 };
        }
        buf[m + 1..].copy_from_slice(&tail);
        let mut acc = 0.0;
        for i in [1, -1] {
            buf[0] = i;
            acc += p.eval(&buf).exp() * f.eval(&buf);
        }
        acc
    });
    TabulatedFunction::new(m, values, completion)
}

/// `(L f)(x)` at one configuration, for `f` given as a closure reading
/// `f_range` leading coordinates. `x` must hold at least
/// `max(range - 1, f_range - 1)` coordinates.
pub fn transfer_apply_pointwise(p: &PotentialEval, f: impl Fn(&[Spin]) -> f64, f_range: usize, x: &[Spin]) -> f64 {
    let need = (p.range() - 1).max(f_range.saturating_sub(1));
    assert!(x.len() >= need, "configuration too short: {} < {need}", x.len());
    let mut buf = Vec::with_capacity(x.len() + 1);
    buf.push(1);
    buf.extend_from_slice(x);
    let mut acc = 0.0;
    for i in [1, -1] {
        buf[0] = i;
        acc += p.eval(&buf).exp() * f(&buf);
    }
    acc
}

/// `L^n` applied `n` times at exact depth.
pub fn transfer_power(p: &PotentialEval, f: &TabulatedFunction, n: usize, cap: usize) -> Result<TabulatedFunction> {
    let mut g = f.clone();
    for _ in 0..n {
        g = transfer_apply(p, &g, cap)?;
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PowerOptions {
    /// Working depth; `None` means the exact depth for the truncated potential.
    pub depth: Option<usize>,
    pub cap: usize,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            depth: None,
            cap: DEFAULT_DEPTH_CAP,
        }
    }
}

impl PowerOptions {
    fn resolve(&self, p: &PotentialEval, f_depth: usize) -> Result<(usize, bool)> {
        let exact = exact_depth(p, f_depth);
        let m = self.depth.unwrap_or(exact);
        if m > self.cap {
            return Err(Error::DepthCapExceeded {
                needed: m,
                cap: self.cap,
            });
        }
        if m < f_depth {
            return Err(Error::InvalidArgument(format!(
                "working depth {m} below function depth {f_depth}"
            )));
        }
        Ok((m, m >= exact))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralEstimate {
    pub lambda: f64,
    pub pressure: f64,
    pub n_iters: usize,
    pub residual: f64,
    pub ratio_sequence: Vec<f64>,
    pub tail_bound: f64,
    pub depth: usize,
    pub exact: bool,
}

/// Power iteration from `f = 1`, renormalized at `z0^∞` each step.
///
/// Returns the estimate and `z_n = L^n(1) / L^n(1)(z0^∞)`. The eigenvalue is
/// the ratio `L^{n+1}(1)(z0^∞) / L^n(1)(z0^∞)` and the residual is
/// `sup |L z_n - λ z_n| / sup |z_n|` over the table.
pub fn power_iterate(
    p: &PotentialEval,
    n_iters: usize,
    z0: Spin,
    opts: PowerOptions,
) -> Result<(SpectralEstimate, TabulatedFunction)> {
    if n_iters == 0 {
        return Err(Error::InvalidArgument("power iteration needs at least one step".into()));
    }
    let (m, exact) = opts.resolve(p, 0)?;
    let tail = BoundaryTail::constant(z0);
    let mut z = TabulatedFunction::constant(1.0).lift(m)?.with_completion(tail.clone());
    let mut ratios = Vec::with_capacity(n_iters + 1);
    for _ in 0..n_iters {
        let g = transfer_apply_at_depth(p, &z, m, tail.clone())?;
        let r = g.at_constant(z0);
        ratios.push(r);
        z = g.map(|v| v / r);
    }
    let g = transfer_apply_at_depth(p, &z, m, tail)?;
    let lambda = g.at_constant(z0);
    ratios.push(lambda);
    let residual = g.sup_distance(&z.scale(lambda)) / z.sup_norm();
    let est = SpectralEstimate {
        lambda,
        pressure: lambda.ln(),
        n_iters,
        residual,
        ratio_sequence: ratios,
        tail_bound: p.tail_bound(),
        depth: m,
        exact,
    };
    Ok((est, z))
}

/// The explicit eigenpair of a product-type potential `sum_j c_j x_{j-1}`:
/// `phi(x) = exp(sum_{i>=0} alpha_{i+1} x_i)` with `alpha_n = sum_{j>n} c_j`
/// and `λ = 2 cosh(sum_j c_j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductEigenpair {
    /// `alphas[i]` multiplies `x_i`, i.e. it is `alpha_{i+1}`.
    pub alphas: Vec<f64>,
    pub lambda: f64,
}

impl ProductEigenpair {
    pub fn new(p: &PotentialEval) -> Result<Self> {
        if p.kind() != PotentialKind::ProductType {
            return Err(Error::InvalidArgument(
                "explicit eigenpair exists for product type only".into(),
            ));
        }
        let c = p.coeffs();
        let mut alphas = vec![0.0; c.len()];
        for n in (0..c.len().saturating_sub(1)).rev() {
            alphas[n] = alphas[n + 1] + c[n + 1];
        }
        // alpha_K = 0: phi reads K - 1 coordinates.
        alphas.pop();
        let total: f64 = c.iter().sum();
        Ok(Self {
            alphas,
            lambda: 2.0 * total.cosh(),
        })
    }

    /// Number of coordinates `phi` reads.
    pub fn range(&self) -> usize {
        self.alphas.len()
    }

    pub fn eval(&self, x: &[Spin]) -> f64 {
        self.alphas
            .iter()
            .zip(x)
            .map(|(a, &s)| a * f64::from(s))
            .sum::<f64>()
            .exp()
    }

    pub fn table(&self, depth: usize, completion: BoundaryTail) -> TabulatedFunction {
        let len = depth.max(self.range());
        TabulatedFunction::from_fn(depth, completion.clone(), |w| {
            let cfg = crate::space::Configuration::new(w, completion.clone()).materialize(len);
            self.eval(&cfg)
        })
    }
}

/// `Q_n^± = L^n(f)(±1^∞) / L^n(1)(±1^∞)` for `n = 1..=n_max`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuotientSequences {
    pub plus: Vec<f64>,
    pub minus: Vec<f64>,
    pub depth: usize,
    /// Steps computed without completion error.
    pub exact_through: usize,
}

pub fn quotient_sequence(
    p: &PotentialEval,
    f: &TabulatedFunction,
    n_max: usize,
    cap: usize,
) -> Result<QuotientSequences> {
    let m = exact_depth(p, f.depth()).min(cap);
    if f.depth() > m {
        return Err(Error::DepthCapExceeded { needed: f.depth(), cap });
    }
    let exact_through = if m >= exact_depth(p, f.depth()) { usize::MAX } else { m };
    let mut out = [Vec::with_capacity(n_max), Vec::with_capacity(n_max)];
    for (slot, sign) in [(0, 1), (1, -1)] {
        let tail = BoundaryTail::constant(sign);
        let mut gf = f.lift(m)?.with_completion(tail.clone());
        let mut g1 = TabulatedFunction::constant(1.0).lift(m)?.with_completion(tail.clone());
        for _ in 0..n_max {
            gf = transfer_apply_at_depth(p, &gf, m, tail.clone())?;
            g1 = transfer_apply_at_depth(p, &g1, m, tail.clone())?;
            let norm = g1.at_constant(sign);
            gf = gf.scale(1.0 / norm);
            g1 = g1.scale(1.0 / norm);
            out[slot].push(gf.at_constant(sign));
        }
    }
    let [plus, minus] = out;
    Ok(QuotientSequences {
        plus,
        minus,
        depth: m,
        exact_through,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CesaroEntry {
    pub support: CylinderSet,
    /// Final Cesàro average.
    pub value: f64,
    /// Running averages `a_N`, `N = 1..=n_iters`.
    pub running: Vec<f64>,
    /// `(max - min) / |value|` of the running averages over the last quartile.
    pub stability: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CesaroMeasure {
    pub sign: Spin,
    pub depth: usize,
    pub lambda: f64,
    pub n_iters: usize,
    pub entries: Vec<CesaroEntry>,
}

impl CesaroMeasure {
    pub fn value(&self, b: &CylinderSet) -> Option<f64> {
        self.entries.iter().find(|e| &e.support == b).map(|e| e.value)
    }
}

/// Cesàro averages `(1/N) sum_{j<N} λ^{-j} L^j(phi_B)(±1^∞)` with `λ` taken
/// from power iteration at `1^∞`.
pub fn cesaro_measure(
    p: &PotentialEval,
    sign: Spin,
    n_iters: usize,
    family: &[CylinderSet],
    opts: PowerOptions,
) -> Result<CesaroMeasure> {
    let (est, _) = power_iterate(p, n_iters.max(1), 1, opts)?;
    cesaro_measure_with_lambda(p, sign, n_iters, family, est.lambda, opts.cap)
}

pub fn cesaro_measure_with_lambda(
    p: &PotentialEval,
    sign: Spin,
    n_iters: usize,
    family: &[CylinderSet],
    lambda: f64,
    cap: usize,
) -> Result<CesaroMeasure> {
    if n_iters == 0 {
        return Err(Error::InvalidArgument("Cesàro average needs at least one term".into()));
    }
    let tail = BoundaryTail::constant(sign);
    let max_b = family.iter().map(|b| b.depth()).max().unwrap_or(0);
    let m = exact_depth(p, max_b).min(cap);
    if max_b > m {
        return Err(Error::DepthCapExceeded { needed: max_b, cap });
    }
    let mut entries = Vec::with_capacity(family.len());
    for b in family {
        let mut g = b.to_table(m, tail.clone())?;
        let mut sum = 0.0;
        let mut running = Vec::with_capacity(n_iters);
        for j in 0..n_iters {
            if j > 0 {
                g = transfer_apply_at_depth(p, &g, m, tail.clone())?.scale(1.0 / lambda);
            }
            sum += g.at_constant(sign);
            running.push(sum / (j + 1) as f64);
        }
        let value = *running.last().expect("n_iters >= 1");
        let start = n_iters - (n_iters / 4).max(1);
        let window = &running[start..];
        let hi = window.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = window.iter().copied().fold(f64::INFINITY, f64::min);
        let stability = if value != 0.0 { (hi - lo) / value.abs() } else { hi - lo };
        entries.push(CesaroEntry {
            support: b.clone(),
            value,
            running,
            stability,
        });
    }
    Ok(CesaroMeasure {
        sign,
        depth: m,
        lambda,
        n_iters,
        entries,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SiteGap {
    pub site: usize,
    pub plus: f64,
    pub minus: f64,
    pub gap: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UniquenessReport {
    pub n: usize,
    pub gaps: Vec<SiteGap>,
    pub max_gap: f64,
    pub min_gap: f64,
}

/// Magnetization gaps `<x_i>_n^+ - <x_i>_n^-` at the given sites.
pub fn uniqueness_diagnostic(p: &PotentialEval, n: usize, sites: &[usize]) -> Result<UniquenessReport> {
    if !class_e_check_ising(p)? {
        return Err(Error::NotClassE);
    }
    if let Some(&bad) = sites.iter().find(|&&s| s >= n) {
        return Err(Error::InvalidArgument(format!("site {bad} outside volume {n}")));
    }
    let plus = gibbs::build_measure(p, n, &BoundaryTail::AllPlus)?;
    let minus = gibbs::build_measure(p, n, &BoundaryTail::AllMinus)?;
    let gaps: Vec<SiteGap> = sites
        .iter()
        .map(|&site| {
            let mp = gibbs::magnetization(&plus, site);
            let mm = gibbs::magnetization(&minus, site);
            SiteGap {
                site,
                plus: mp,
                minus: mm,
                gap: mp - mm,
            }
        })
        .collect();
    let max_gap = gaps.iter().map(|g| g.gap).fold(f64::NEG_INFINITY, f64::max);
    let min_gap = gaps.iter().map(|g| g.gap).fold(f64::INFINITY, f64::min);
    Ok(UniquenessReport {
        n,
        gaps,
        max_gap,
        min_gap,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryResidual {
    pub residual: f64,
    pub scale: f64,
    pub depth: usize,
}

impl SymmetryResidual {
    pub fn relative(&self) -> f64 {
        self.residual / self.scale
    }
}

/// `sup_x |L^n(1)(x) - L^n(1)(-x)|` for a mirrored potential.
///
/// The iterate under an all-plus completion is compared with the iterate
/// under an all-minus completion at the flipped word, which is the same
/// point of the full space.
pub fn mirrored_symmetry_check(p: &PotentialEval, n: usize, opts: PowerOptions) -> Result<SymmetryResidual> {
    if !is_mirrored(p, p.range().min(12))? {
        return Err(Error::NotMirrored);
    }
    let m = opts.depth.unwrap_or(exact_depth(p, 0)).min(opts.cap);
    let mut plus = TabulatedFunction::constant(1.0)
        .lift(m)?
        .with_completion(BoundaryTail::AllPlus);
    let mut minus = plus.clone().with_completion(BoundaryTail::AllMinus);
    for _ in 0..n {
        plus = transfer_apply_at_depth(p, &plus, m, BoundaryTail::AllPlus)?;
        minus = transfer_apply_at_depth(p, &minus, m, BoundaryTail::AllMinus)?;
        let s = plus.sup_norm();
        plus = plus.scale(1.0 / s);
        minus = minus.scale(1.0 / s);
    }
    let mask = (1u64 << m) - 1;
    let residual = (0..1u64 << m)
        .map(|i| (plus.values()[i as usize] - minus.values()[(!i & mask) as usize]).abs())
        .fold(0.0, f64::max);
    Ok(SymmetryResidual {
        residual,
        scale: plus.sup_norm(),
        depth: m,
    })
}

/// `sup |L phi - λ phi| / sup |phi|` over the given configurations, with
/// `phi` a closure reading `phi_range` coordinates.
pub fn eigen_residual<'a>(
    p: &PotentialEval,
    phi: impl Fn(&[Spin]) -> f64 + Sync,
    phi_range: usize,
    lambda: f64,
    configs: impl IntoIterator<Item = &'a [Spin]>,
) -> f64 {
    let mut num: f64 = 0.0;
    let mut den: f64 = 0.0;
    for x in configs {
        let lf = transfer_apply_pointwise(p, &phi, phi_range, x);
        let v = phi(x);
        num = num.max((lf - lambda * v).abs());
        den = den.max(v.abs());
    }
    num / den
}

/// All words of `depth` as configurations of length `len` completed by `tail`.
pub fn word_configs(depth: usize, len: usize, tail: &BoundaryTail) -> Vec<Vec<Spin>> {
    (0..1u64 << depth)
        .map(|i| crate::space::Configuration::new(&SpinWord::from_index(i, depth), tail.clone()).materialize(len))
        .collect()
}

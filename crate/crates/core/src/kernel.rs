//! Involution kernels `W(y|x)`, the duality identity
//! `A(ay) + W(ay|x) = A(ax) + W(y|ax)`, and eigenfunctions obtained by
//! integrating `e^{W(y|x)}` against an approximation of the dual
//! eigenmeasure.
//!
//! Kernel formulas are written with 1-based coordinates `y_1, y_2, ...`;
//! in slices and configurations `y_1` is index 0.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::gibbs::{self, FiniteVolumeMeasure};
use crate::par;
use crate::potential::{CouplingRule, PotentialEval, PotentialKind};
use crate::space::{BoundaryTail, Configuration, Spin};
use crate::table::TabulatedFunction;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelKind {
    ProductKernel,
    IsingKernel,
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelSpec {
    kind: KernelKind,
    /// Effective couplings, `coeffs[j - 1] = β a_j`.
    coeffs: Vec<f64>,
    /// `alphas[i - 1] = alpha_i = sum_{j > i} coeffs_j` (product kernel).
    alphas: Vec<f64>,
    /// Power-law exponent when the coupling rule has one.
    gamma: Option<f64>,
}

impl KernelSpec {
    pub fn new(p: &PotentialEval) -> Result<Self> {
        if p.spec().spin_scale != 1.0 {
            return Err(Error::InvalidArgument("kernels are defined for unit spin scale".into()));
        }
        let kind = match p.kind() {
            PotentialKind::ProductType => KernelKind::ProductKernel,
            PotentialKind::IsingType => KernelKind::IsingKernel,
            PotentialKind::Binary => {
                return Err(Error::InvalidArgument(
                    "no involution kernel for the binary potential".into(),
                ))
            }
        };
        let coeffs = p.coeffs().to_vec();
        let mut alphas = vec![0.0; coeffs.len()];
        for i in (0..coeffs.len().saturating_sub(1)).rev() {
            alphas[i] = alphas[i + 1] + coeffs[i + 1];
        }
        alphas.pop();
        let gamma = match p.spec().couplings {
            CouplingRule::PowerLaw { gamma } => Some(gamma),
            _ => None,
        };
        Ok(Self {
            kind,
            coeffs,
            alphas,
            gamma,
        })
    }

    pub fn kind(&self) -> KernelKind {
        self.kind
    }

    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Number of leading coordinates of `x` and of `y` the kernel reads.
    pub fn range(&self) -> usize {
        match self.kind {
            KernelKind::ProductKernel => self.alphas.len(),
            KernelKind::IsingKernel => self.coeffs.len(),
        }
    }

    fn needs_alternating_tail(&self) -> bool {
        self.kind == KernelKind::IsingKernel && self.gamma.is_some_and(|g| g <= 2.0)
    }

    fn check_domain(&self, x: &Configuration) -> Result<()> {
        if self.needs_alternating_tail() && !matches!(x.tail(), BoundaryTail::Alternating { .. }) {
            return Err(Error::KernelUndefined);
        }
        Ok(())
    }

    /// `W(y|x) = c(x) + sum_k y_k v_k(x)`: the kernel is affine in `y`.
    pub fn affine_in_y(&self, x: &[Spin]) -> (f64, Vec<f64>) {
        match self.kind {
            KernelKind::ProductKernel => {
                let c = self.alphas.iter().zip(x).map(|(a, &s)| a * f64::from(s)).sum();
                (c, self.alphas.clone())
            }
            KernelKind::IsingKernel => {
                let k = self.coeffs.len();
                let v = (0..k).map(|yk| self.inner_sum(yk, x)).collect();
                (0.0, v)
            }
        }
    }

    /// `sum_j x_j a_{j+k-1}` for storage index `yk = k - 1`, consecutive
    /// terms added in pairs.
    fn inner_sum(&self, yk: usize, x: &[Spin]) -> f64 {
        let terms = self.coeffs.len() - yk;
        let term = |xj: usize| f64::from(x[xj]) * self.coeffs[xj + yk];
        let mut acc = 0.0;
        let mut xj = 0;
        while xj + 1 < terms {
            acc += term(xj) + term(xj + 1);
            xj += 2;
        }
        if xj < terms {
            acc += term(xj);
        }
        acc
    }
}

/// `W(y|x)` for the truncated couplings.
pub fn kernel_eval(w: &KernelSpec, y: &Configuration, x: &Configuration) -> Result<f64> {
    w.check_domain(x)?;
    let r = w.range();
    let ys = y.materialize(r);
    let xs = x.materialize(r);
    Ok(match w.kind {
        KernelKind::ProductKernel => w
            .alphas
            .iter()
            .enumerate()
            .map(|(i, a)| (f64::from(xs[i]) + f64::from(ys[i])) * a)
            .sum(),
        KernelKind::IsingKernel => (0..r).map(|k| f64::from(ys[k]) * w.inner_sum(k, &xs)).sum(),
    })
}

/// `|(A + W)(ay|x) - (A + W)(y|ax)|`, with the dual potential equal to `A`.
pub fn duality_residual(
    p: &PotentialEval,
    w: &KernelSpec,
    a: Spin,
    x: &Configuration,
    y: &Configuration,
) -> Result<f64> {
    let ay = y.prepend(a);
    let ax = x.prepend(a);
    let lhs = p.eval_config(&ay) + kernel_eval(w, &ay, x)?;
    let rhs = p.eval_config(&ax) + kernel_eval(w, y, &ax)?;
    Ok((lhs - rhs).abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CylinderBoundary {
    Plus,
    /// Equal mixture of the all-plus and all-minus measures.
    FlipPaired,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Quadrature {
    ExactCylinder { depth: usize, boundary: CylinderBoundary },
    MonteCarlo { samples: usize, seed: u64 },
}

impl Quadrature {
    pub fn label(&self) -> &'static str {
        match self {
            Self::ExactCylinder { .. } => "exact_cylinder",
            Self::MonteCarlo { .. } => "monte_carlo",
        }
    }

    /// Cylinder depth or sample count.
    pub fn size(&self) -> usize {
        match self {
            Self::ExactCylinder { depth, .. } => *depth,
            Self::MonteCarlo { samples, .. } => *samples,
        }
    }
}

pub const DEFAULT_QUADRATURE_DEPTH: usize = 12;

/// A finite-volume approximation of the dual eigenmeasure: mixture
/// components `(weight, μ_d^y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct CylinderMeasure {
    pub depth: usize,
    pub components: Vec<(f64, FiniteVolumeMeasure)>,
}

impl CylinderMeasure {
    pub fn new(dual: &PotentialEval, depth: usize, boundary: CylinderBoundary) -> Result<Self> {
        let components = match boundary {
            CylinderBoundary::Plus => vec![(1.0, gibbs::build_measure(dual, depth, &BoundaryTail::AllPlus)?)],
            CylinderBoundary::FlipPaired => vec![
                (0.5, gibbs::build_measure(dual, depth, &BoundaryTail::AllPlus)?),
                (0.5, gibbs::build_measure(dual, depth, &BoundaryTail::AllMinus)?),
            ],
        };
        Ok(Self { depth, components })
    }

    /// `∫ e^{c + sum_k y_k v_k} dν(y)`.
    pub fn integrate_exp_affine(&self, c: f64, v: &[f64]) -> f64 {
        let d = self.depth;
        let mut total = 0.0;
        for (mix, m) in &self.components {
            let y = m.boundary();
            let tail: f64 = v
                .iter()
                .enumerate()
                .skip(d)
                .map(|(k, vk)| vk * f64::from(y.at(k)))
                .sum();
            let head = &v[..d.min(v.len())];
            let weights = m.weights();
            let terms = par::map_indices(weights.len(), |idx| {
                let s: f64 = head
                    .iter()
                    .enumerate()
                    .map(|(k, vk)| if idx >> k & 1 == 1 { *vk } else { -*vk })
                    .sum();
                weights[idx] * (c + tail + s).exp()
            });
            total += mix * par::pairwise_sum(&terms);
        }
        total
    }

    /// `∫ y_k dν` for `k < depth`.
    pub fn site_means(&self) -> Vec<f64> {
        (0..self.depth)
            .map(|k| {
                self.components
                    .iter()
                    .map(|(mix, m)| mix * gibbs::magnetization(m, k))
                    .sum()
            })
            .collect()
    }
}

/// Independent single-site law of the dual eigenmeasure of a product-type
/// potential, read off a finite-volume measure.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BernoulliMarginals {
    /// `P(y_k = +1)` for `k < depth`.
    pub p_plus: Vec<f64>,
    /// Volume the marginals were read from.
    pub depth: usize,
    /// `max_k |m_k(μ_depth) - m_k(μ_{depth-1})|` over shared sites.
    pub stability: f64,
    /// `max |P(y_i = y_j = +1) - p_i p_j|` over all site pairs.
    pub independence_defect: f64,
}

pub const MARGINAL_DEPTH_CAP: usize = 16;
const MARGINAL_STABILITY: f64 = 1e-6;
const INDEPENDENCE_TOL: f64 = 1e-9;

impl BernoulliMarginals {
    /// Grows the volume until the marginals of all sites it shares with the
    /// previous volume agree to 1e-6 and every site the kernel reads is
    /// covered, or the depth cap is reached.
    pub fn derive(dual: &PotentialEval, needed: usize) -> Result<Self> {
        if dual.kind() != PotentialKind::ProductType {
            return Err(Error::IndependenceNotEstablished(
                "Monte Carlo needs a product-type potential".into(),
            ));
        }
        let target = needed.clamp(2, MARGINAL_DEPTH_CAP);
        let mut prev = Self::means(dual, 1)?;
        let mut d = 2;
        loop {
            let cur = Self::means(dual, d)?;
            let stability = prev.iter().zip(&cur).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            if (stability < MARGINAL_STABILITY && d >= target) || d == MARGINAL_DEPTH_CAP {
                if stability >= MARGINAL_STABILITY {
                    return Err(Error::IndependenceNotEstablished(format!(
                        "marginals unstable at depth {d}: {stability:e}"
                    )));
                }
                let m = gibbs::build_measure(dual, d, &BoundaryTail::AllPlus)?;
                let p_plus: Vec<f64> = cur.iter().map(|mk| 0.5 * (1.0 + mk)).collect();
                let independence_defect = pair_defect(&m, &p_plus);
                if independence_defect > INDEPENDENCE_TOL {
                    return Err(Error::IndependenceNotEstablished(format!(
                        "pair correlations differ from product of marginals by {independence_defect:e}"
                    )));
                }
                return Ok(Self {
                    p_plus,
                    depth: d,
                    stability,
                    independence_defect,
                });
            }
            prev = cur;
            d += 1;
        }
    }

    fn means(dual: &PotentialEval, d: usize) -> Result<Vec<f64>> {
        let m = gibbs::build_measure(dual, d, &BoundaryTail::AllPlus)?;
        Ok((0..d).map(|k| gibbs::magnetization(&m, k)).collect())
    }

    /// `P(y_k = +1)`; sites past the derived depth reuse the last marginal.
    pub fn p(&self, k: usize) -> f64 {
        self.p_plus[k.min(self.p_plus.len() - 1)]
    }
}

fn pair_defect(m: &FiniteVolumeMeasure, p_plus: &[f64]) -> f64 {
    let d = p_plus.len();
    let w = m.weights();
    let mut worst: f64 = 0.0;
    for i in 0..d {
        for j in i + 1..d {
            let mask = (1usize << i) | (1usize << j);
            let joint = par::pairwise_sum(&par::map_indices(w.len(), |idx| {
                if idx & mask == mask {
                    w[idx]
                } else {
                    0.0
                }
            }));
            worst = worst.max((joint - p_plus[i] * p_plus[j]).abs());
        }
    }
    worst
}

const MC_CHUNK: usize = 4096;

/// `∫ e^{c + sum_k y_k v_k} dν(y)` by sampling independent sites.
///
/// Chunk `i` of the samples uses stream `i` of a generator seeded with
/// `seed`, so the estimate does not depend on the thread count.
pub fn monte_carlo_exp_affine(marg: &BernoulliMarginals, c: f64, v: &[f64], samples: usize, seed: u64) -> (f64, f64) {
    let chunks = samples.div_ceil(MC_CHUNK);
    let parts = par::map_indices(chunks, |ci| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ci as u64);
        let n = MC_CHUNK.min(samples - ci * MC_CHUNK);
        let mut vals = Vec::with_capacity(n);
        for _ in 0..n {
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(k, vk)| if rng.random::<f64>() < marg.p(k) { *vk } else { -*vk })
                .sum();
            vals.push((c + s).exp());
        }
        let sum = par::pairwise_sum(&vals);
        let sq = par::pairwise_sum(&vals.iter().map(|x| x * x).collect::<Vec<_>>());
        (sum, sq)
    });
    let sum = par::pairwise_sum(&parts.iter().map(|p| p.0).collect::<Vec<_>>());
    let sq = par::pairwise_sum(&parts.iter().map(|p| p.1).collect::<Vec<_>>());
    let n = samples as f64;
    let mean = sum / n;
    let var = (sq / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KernelEigen {
    pub value: f64,
    pub quadrature: Quadrature,
    /// Standard error of a Monte Carlo estimate; zero for cylinder quadrature.
    pub std_error: f64,
}

/// Precomputed quadrature for evaluating `φ(x) = ∫ e^{W(y|x)} dν(y)` at many points.
#[derive(Clone, Debug)]
pub enum Integrator {
    Cylinder(CylinderMeasure),
    MonteCarlo {
        marginals: BernoulliMarginals,
        samples: usize,
        seed: u64,
    },
}

impl Integrator {
    pub fn new(dual: &PotentialEval, w: &KernelSpec, quadrature: Quadrature) -> Result<Self> {
        match quadrature {
            Quadrature::ExactCylinder { depth, boundary } => {
                Ok(Self::Cylinder(CylinderMeasure::new(dual, depth, boundary)?))
            }
            Quadrature::MonteCarlo { samples, seed } => {
                if samples == 0 {
                    return Err(Error::InvalidArgument("Monte Carlo needs at least one sample".into()));
                }
                let marginals = BernoulliMarginals::derive(dual, w.range())?;
                Ok(Self::MonteCarlo {
                    marginals,
                    samples,
                    seed,
                })
            }
        }
    }

    pub fn quadrature(&self) -> Quadrature {
        match self {
            Self::Cylinder(m) => Quadrature::ExactCylinder {
                depth: m.depth,
                boundary: if m.components.len() == 2 {
                    CylinderBoundary::FlipPaired
                } else {
                    CylinderBoundary::Plus
                },
            },
            Self::MonteCarlo { samples, seed, .. } => Quadrature::MonteCarlo {
                samples: *samples,
                seed: *seed,
            },
        }
    }

    pub fn eval(&self, w: &KernelSpec, x: &Configuration) -> Result<KernelEigen> {
        w.check_domain(x)?;
        let (c, v) = w.affine_in_y(&x.materialize(w.range()));
        let (value, std_error) = match self {
            Self::Cylinder(m) => (m.integrate_exp_affine(c, &v), 0.0),
            Self::MonteCarlo {
                marginals,
                samples,
                seed,
            } => monte_carlo_exp_affine(marginals, c, &v, *samples, *seed),
        };
        Ok(KernelEigen {
            value,
            quadrature: self.quadrature(),
            std_error,
        })
    }
}

/// `φ(x) = ∫ e^{W(y|x)} dν(y)` with the dual eigenmeasure approximated by
/// `quadrature`.
pub fn kernel_eigenfunction(
    p: &PotentialEval,
    w: &KernelSpec,
    x: &Configuration,
    quadrature: Quadrature,
) -> Result<KernelEigen> {
    Integrator::new(p, w, quadrature)?.eval(w, x)
}

/// `φ` tabulated over words of length `depth` completed by `tail`.
pub fn kernel_eigen_table(
    p: &PotentialEval,
    w: &KernelSpec,
    depth: usize,
    tail: &BoundaryTail,
    quadrature: Quadrature,
) -> Result<TabulatedFunction> {
    let integ = Integrator::new(p, w, quadrature)?;
    let values = (0..1u64 << depth)
        .map(|i| {
            let x = Configuration::new(&crate::space::SpinWord::from_index(i, depth), tail.clone());
            integ.eval(w, &x).map(|e| e.value)
        })
        .collect::<Result<Vec<_>>>()?;
    TabulatedFunction::new(depth, values, tail.clone())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PressureBound {
    pub gamma: f64,
    pub beta: f64,
    #[serde(rename = "K")]
    pub truncation: usize,
    /// `sum_{j <= K} j^{-gamma}`.
    pub partial_zeta: f64,
    /// Bound on `sum_{j > K} j^{-gamma}`.
    pub zeta_tail_bound: f64,
    /// `log(2 cosh(β partial_zeta))`.
    pub upper_bound: f64,
}

pub fn pressure_upper_bound(gamma: f64, beta: f64, truncation: usize) -> Result<PressureBound> {
    if gamma <= 2.0 {
        return Err(Error::BoundRegime(gamma));
    }
    if beta <= 0.0 || truncation == 0 {
        return Err(Error::InvalidArgument(
            "pressure bound needs beta > 0 and K >= 1".into(),
        ));
    }
    let terms: Vec<f64> = (1..=truncation).rev().map(|j| (j as f64).powf(-gamma)).collect();
    let partial_zeta = par::pairwise_sum(&terms);
    Ok(PressureBound {
        gamma,
        beta,
        truncation,
        partial_zeta,
        zeta_tail_bound: (truncation as f64).powf(1.0 - gamma) / (gamma - 1.0),
        upper_bound: (2.0 * (beta * partial_zeta).cosh()).ln(),
    })
}

/// `∫ e^{W(y|x-)} dν / ∫ e^{W(y|1^∞)} dν` with `x-` the all-plus point with
/// its first coordinate flipped.
pub fn fkg_quotient(p: &PotentialEval, w: &KernelSpec, depth: usize) -> Result<f64> {
    let integ = Integrator::new(
        p,
        w,
        Quadrature::ExactCylinder {
            depth,
            boundary: CylinderBoundary::Plus,
        },
    )?;
    let plus = Configuration::constant(1);
    let flipped = plus.shift(1).prepend(-1);
    Ok(integ.eval(w, &flipped)?.value / integ.eval(w, &plus)?.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::CouplingSpec;
    use crate::space::SpinWord;
    use approx::assert_relative_eq;

    fn cfg(s: &str, tail: BoundaryTail) -> Configuration {
        Configuration::new(&SpinWord::parse(s).unwrap(), tail)
    }

    #[test]
    fn zero_couplings_vanish() {
        let p = PotentialEval::new(CouplingSpec::product_explicit(vec![0.0; 4], 1.0)).unwrap();
        let w = KernelSpec::new(&p).unwrap();
        let x = cfg("+-+", BoundaryTail::AllMinus);
        let y = cfg("--+", BoundaryTail::AllPlus);
        assert_eq!(kernel_eval(&w, &y, &x).unwrap(), 0.0);
        assert_eq!(duality_residual(&p, &w, 1, &x, &y).unwrap(), 0.0);
        let e = kernel_eigenfunction(
            &p,
            &w,
            &x,
            Quadrature::ExactCylinder {
                depth: 4,
                boundary: CylinderBoundary::Plus,
            },
        )
        .unwrap();
        assert_relative_eq!(e.value, 1.0, max_relative = 1e-15);
    }

    #[test]
    fn product_kernel_symmetric_and_dual() {
        let p = PotentialEval::new(CouplingSpec::product_explicit(vec![1.0, 0.5, 0.25], 1.0)).unwrap();
        let w = KernelSpec::new(&p).unwrap();
        assert_eq!(w.alphas(), &[0.75, 0.25]);
        let x = cfg("+-", BoundaryTail::AllPlus);
        let y = cfg("-", BoundaryTail::Alternating { start: 1 });
        assert_eq!(kernel_eval(&w, &y, &x).unwrap(), kernel_eval(&w, &x, &y).unwrap());
        for a in [1, -1] {
            assert!(duality_residual(&p, &w, a, &x, &y).unwrap() < 1e-12);
        }
    }

    #[test]
    fn ising_kernel_hand_value() {
        // K = 2: W = y1 (x1 a1 + x2 a2) + y2 x1 a2
        let p = PotentialEval::new(CouplingSpec::ising_explicit(vec![1.0, 0.5], 1.0, 0.7)).unwrap();
        let w = KernelSpec::new(&p).unwrap();
        let x = cfg("+-", BoundaryTail::AllPlus);
        let y = cfg("-+", BoundaryTail::AllPlus);
        assert_relative_eq!(kernel_eval(&w, &y, &x).unwrap(), -(1.0 - 0.5) + 0.5);
        for a in [1, -1] {
            assert!(duality_residual(&p, &w, a, &x, &y).unwrap() < 1e-14);
        }
    }

    #[test]
    fn ising_kernel_domain() {
        let p = PotentialEval::new(CouplingSpec::dyson(1.5, 1.0, 0.0, 16)).unwrap();
        let w = KernelSpec::new(&p).unwrap();
        let y = cfg("+", BoundaryTail::AllPlus);
        let bad = cfg("+", BoundaryTail::AllPlus);
        assert_eq!(kernel_eval(&w, &y, &bad), Err(Error::KernelUndefined));
        let good = cfg("+", BoundaryTail::Alternating { start: -1 });
        assert!(kernel_eval(&w, &y, &good).is_ok());
        let q = Quadrature::ExactCylinder {
            depth: 6,
            boundary: CylinderBoundary::Plus,
        };
        let e = kernel_eigenfunction(&p, &w, &good, q).unwrap();
        assert!(e.value.is_finite() && e.value > 0.0);
    }

    #[test]
    fn affine_form_matches_direct_sum() {
        let p = PotentialEval::new(CouplingSpec::dyson(3.0, 1.0, 0.2, 10)).unwrap();
        let w = KernelSpec::new(&p).unwrap();
        let x = cfg("+--+-++", BoundaryTail::Alternating { start: 1 });
        let y = cfg("-+-++", BoundaryTail::AllMinus);
        let (c, v) = w.affine_in_y(&x.materialize(w.range()));
        let ys = y.materialize(w.range());
        let affine = c + v.iter().zip(&ys).map(|(vk, &s)| vk * f64::from(s)).sum::<f64>();
        assert_relative_eq!(affine, kernel_eval(&w, &y, &x).unwrap(), max_relative = 1e-14);
    }

    #[test]
    fn monte_carlo_refused_off_product() {
        let p = PotentialEval::new(CouplingSpec::dyson(3.0, 1.0, 0.0, 8)).unwrap();
        let w = KernelSpec::new(&p).unwrap();
        let e = kernel_eigenfunction(
            &p,
            &w,
            &Configuration::constant(1),
            Quadrature::MonteCarlo { samples: 10, seed: 1 },
        );
        assert!(matches!(e, Err(Error::IndependenceNotEstablished(_))));
    }

    #[test]
    fn product_marginals_are_bernoulli() {
        let p = PotentialEval::new(CouplingSpec::product_power(3.0, 1.0, 8)).unwrap();
        let m = BernoulliMarginals::derive(&p, 7).unwrap();
        let c = p.coeffs();
        for (k, pk) in m.p_plus.iter().enumerate() {
            let s: f64 = c[..(k + 1).min(c.len())].iter().sum();
            assert_relative_eq!(*pk, s.exp() / (2.0 * s.cosh()), max_relative = 1e-12);
        }
        assert!(m.independence_defect < 1e-12);
    }

    #[test]
    fn monte_carlo_is_seeded() {
        let p = PotentialEval::new(CouplingSpec::product_power(3.0, 1.0, 8)).unwrap();
        let w = KernelSpec::new(&p).unwrap();
        let x = Configuration::constant(-1);
        let q = Quadrature::MonteCarlo {
            samples: 10_000,
            seed: 42,
        };
        let a = kernel_eigenfunction(&p, &w, &x, q).unwrap();
        let b = kernel_eigenfunction(&p, &w, &x, q).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        let exact = kernel_eigenfunction(
            &p,
            &w,
            &x,
            Quadrature::ExactCylinder {
                depth: 10,
                boundary: CylinderBoundary::Plus,
            },
        )
        .unwrap();
        assert!((a.value - exact.value).abs() < 5.0 * a.std_error + 1e-3 * exact.value);
    }

    #[test]
    fn pressure_bound_limits() {
        assert_eq!(pressure_upper_bound(2.0, 1.0, 10), Err(Error::BoundRegime(2.0)));
        let b = pressure_upper_bound(3.0, 1e-9, 64).unwrap();
        assert_relative_eq!(b.upper_bound, 2f64.ln(), max_relative = 1e-12);
        let b = pressure_upper_bound(3.0, 1.0, 1_000_000).unwrap();
        assert_relative_eq!(b.partial_zeta, ZETA3, max_relative = 1e-12);
        assert_relative_eq!(b.upper_bound, (2.0 * ZETA3.cosh()).ln(), max_relative = 1e-12);
    }

    const ZETA3: f64 = 1.202_056_903_159_594_3;

    #[test]
    fn flip_paired_means_vanish() {
        let p = PotentialEval::new(CouplingSpec::dyson(3.0, 1.0, 0.0, 16)).unwrap();
        let m = CylinderMeasure::new(&p, 8, CylinderBoundary::FlipPaired).unwrap();
        assert!(m.site_means().iter().all(|v| v.abs() < 1e-12));
    }
}

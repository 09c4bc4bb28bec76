//! Potentials on {-1,+1}^N: Ising type `h x_0 + x_0 sum_j a_j x_j`, product
//! type `sum_j a_j x_{j-1}` and the binary potential (dyadic couplings on
//! spins of size 1/2).
//!
//! The inverse temperature multiplies the whole potential. Couplings are
//! truncated after `K` terms; [`PotentialEval::tail_bound`] bounds what the
//! truncation drops.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::space::{monotone_violation, BoundaryTail, Configuration, CylinderSet, MonotoneViolation, Spin, SpinWord};
use crate::table::TabulatedFunction;
use crate::transfer;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    IsingType,
    ProductType,
    Binary,
}

/// Rule `j -> a_j` for `j >= 1`.
#[derive(Clone, Debug, PartialEq)]
pub enum CouplingRule {
    /// `a_j = j^{-gamma}`, `gamma > 1`.
    PowerLaw { gamma: f64 },
    /// `a_j = lambda^j`, `0 < lambda < 1`.
    Geometric { lambda: f64 },
    /// `a_1, a_2, ...` listed; zero past the end of the list.
    Explicit(Vec<f64>),
    /// `a_j = 2^{1-j}` (binary potential only).
    Dyadic,
}

impl CouplingRule {
    pub fn coupling(&self, j: usize) -> f64 {
        debug_assert!(j >= 1);
        match self {
            Self::PowerLaw { gamma } => (j as f64).powf(-gamma),
            Self::Geometric { lambda } => lambda.powi(j as i32),
            Self::Explicit(a) => a.get(j - 1).copied().unwrap_or(0.0),
            Self::Dyadic => 0.5f64.powi(j as i32 - 1),
        }
    }

    /// Upper bound on `sum_{j > k} |a_j|`.
    pub fn tail_sum_bound(&self, k: usize) -> f64 {
        match self {
            Self::PowerLaw { gamma } => (k as f64).powf(1.0 - gamma) / (gamma - 1.0),
            Self::Geometric { lambda } => lambda.powi(k as i32 + 1) / (1.0 - lambda),
            Self::Explicit(a) => a.iter().skip(k).map(|v| v.abs()).sum(),
            Self::Dyadic => 0.5f64.powi(k as i32 - 1),
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Self::PowerLaw { .. } => "power_law",
            Self::Geometric { .. } => "geometric",
            Self::Explicit(_) => "explicit",
            Self::Dyadic => "dyadic",
        }
    }

    fn params(&self) -> Vec<f64> {
        match self {
            Self::PowerLaw { gamma } => vec![*gamma],
            Self::Geometric { lambda } => vec![*lambda],
            Self::Explicit(a) => a.clone(),
            Self::Dyadic => Vec::new(),
        }
    }
}

pub const DEFAULT_TRUNCATION: usize = 64;

/// Parameters of a potential. Serialized as
/// `{kind, h, beta, couplings: {rule, params}, truncation_K, spin_scale}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpecRepr", into = "SpecRepr")]
pub struct CouplingSpec {
    pub kind: PotentialKind,
    pub h: f64,
    pub beta: f64,
    pub couplings: CouplingRule,
    pub truncation: usize,
    pub spin_scale: f64,
}

impl CouplingSpec {
    /// Ising type with power-law couplings (Dyson when `1 < gamma < 2`).
    pub fn dyson(gamma: f64, beta: f64, h: f64, truncation: usize) -> Self {
        Self {
            kind: PotentialKind::IsingType,
            h,
            beta,
            couplings: CouplingRule::PowerLaw { gamma },
            truncation,
            spin_scale: 1.0,
        }
    }

    pub fn ising_geometric(lambda: f64, beta: f64, h: f64, truncation: usize) -> Self {
        Self {
            couplings: CouplingRule::Geometric { lambda },
            ..Self::dyson(2.0, beta, h, truncation)
        }
    }

    /// Ising type with listed couplings; `K` is the list length.
    pub fn ising_explicit(a: Vec<f64>, beta: f64, h: f64) -> Self {
        let truncation = a.len().max(1);
        Self {
            couplings: CouplingRule::Explicit(a),
            ..Self::dyson(2.0, beta, h, truncation)
        }
    }

    pub fn product_power(gamma: f64, beta: f64, truncation: usize) -> Self {
        Self {
            kind: PotentialKind::ProductType,
            ..Self::dyson(gamma, beta, 0.0, truncation)
        }
    }

    pub fn product_explicit(a: Vec<f64>, beta: f64) -> Self {
        Self {
            kind: PotentialKind::ProductType,
            ..Self::ising_explicit(a, beta, 0.0)
        }
    }

    pub fn product_geometric(lambda: f64, beta: f64, truncation: usize) -> Self {
        Self {
            kind: PotentialKind::ProductType,
            ..Self::ising_geometric(lambda, beta, 0.0, truncation)
        }
    }

    pub fn binary(beta: f64, truncation: usize) -> Self {
        Self {
            kind: PotentialKind::Binary,
            h: 0.0,
            beta,
            couplings: CouplingRule::Dyadic,
            truncation,
            spin_scale: 0.5,
        }
    }

    /// The identically zero potential (Ising type, one zero coupling).
    pub fn zero() -> Self {
        Self::ising_explicit(vec![0.0], 1.0, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidSpec(m));
        if self.truncation < 1 {
            return bad("truncation K must be at least 1".into());
        }
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return bad(format!("beta must be positive, got {}", self.beta));
        }
        if !self.h.is_finite() {
            return bad("field h must be finite".into());
        }
        match &self.couplings {
            CouplingRule::PowerLaw { gamma } if !(*gamma > 1.0 && gamma.is_finite()) => {
                return bad(format!("power law needs gamma > 1, got {gamma}"))
            }
            CouplingRule::Geometric { lambda } if !(*lambda > 0.0 && *lambda < 1.0) => {
                return bad(format!("geometric rule needs 0 < lambda < 1, got {lambda}"))
            }
            CouplingRule::Explicit(a) if a.iter().any(|v| !v.is_finite()) => {
                return bad("explicit couplings must be finite".into())
            }
            _ => {}
        }
        match self.kind {
            PotentialKind::Binary => {
                if self.couplings != CouplingRule::Dyadic || self.spin_scale != 0.5 {
                    return bad("binary kind forces dyadic couplings and spin scale 1/2".into());
                }
            }
            _ => {
                if self.couplings == CouplingRule::Dyadic {
                    return bad("dyadic couplings are reserved for the binary kind".into());
                }
                if self.spin_scale != 1.0 {
                    return bad("spin scale 1/2 is reserved for the binary kind".into());
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))
    }
}

/// A number given either as JSON number or as a `"p/q"` string.
#[derive(Deserialize)]
#[serde(untagged)]
enum Number {
    Float(f64),
    Text(String),
}

impl Number {
    fn value(&self) -> std::result::Result<f64, String> {
        match self {
            Self::Float(v) => Ok(*v),
            Self::Text(s) => parse_rational(s),
        }
    }
}

fn parse_rational(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: f64 = p.trim().parse().map_err(|_| format!("bad numerator in '{s}'"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("bad denominator in '{s}'"))?;
            if q == 0.0 {
                return Err(format!("zero denominator in '{s}'"));
            }
            Ok(p / q)
        }
        None => s.parse().map_err(|_| format!("bad number '{s}'")),
    }
}

#[derive(Serialize, Deserialize)]
struct CouplingsRepr {
    rule: String,
    #[serde(default, serialize_with = "ser_floats", deserialize_with = "de_numbers")]
    params: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct SpecRepr {
    kind: PotentialKind,
    #[serde(default, deserialize_with = "de_number")]
    h: f64,
    #[serde(default = "one", deserialize_with = "de_number")]
    beta: f64,
    couplings: CouplingsRepr,
    #[serde(rename = "truncation_K", default = "default_k")]
    truncation_k: usize,
    #[serde(default)]
    spin_scale: Option<f64>,
}

fn one() -> f64 {
    1.0
}

fn default_k() -> usize {
    DEFAULT_TRUNCATION
}

fn ser_floats<S: serde::Serializer>(v: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    v.serialize(s)
}

fn de_number<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Number::deserialize(d)?.value().map_err(serde::de::Error::custom)
}

fn de_numbers<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    Vec::<Number>::deserialize(d)?
        .iter()
        .map(|n| n.value().map_err(serde::de::Error::custom))
        .collect()
}

impl From<CouplingSpec> for SpecRepr {
    fn from(s: CouplingSpec) -> Self {
        Self {
            kind: s.kind,
            h: s.h,
            beta: s.beta,
            couplings: CouplingsRepr {
                rule: s.couplings.name().into(),
                params: s.couplings.params(),
            },
            truncation_k: s.truncation,
            spin_scale: Some(s.spin_scale),
        }
    }
}

impl TryFrom<SpecRepr> for CouplingSpec {
    type Error = Error;

    fn try_from(r: SpecRepr) -> Result<Self> {
        let p = &r.couplings.params;
        let single = |name: &str| -> Result<f64> {
            match p.as_slice() {
                [v] => Ok(*v),
                _ => Err(Error::InvalidSpec(format!("rule {name} takes exactly one parameter"))),
            }
        };
        let couplings = match r.couplings.rule.as_str() {
            "power_law" => CouplingRule::PowerLaw {
                gamma: single("power_law")?,
            },
            "geometric" => CouplingRule::Geometric {
                lambda: single("geometric")?,
            },
            "explicit" => CouplingRule::Explicit(p.clone()),
            "dyadic" => CouplingRule::Dyadic,
            other => return Err(Error::InvalidSpec(format!("unknown coupling rule '{other}'"))),
        };
        let default_scale = if r.kind == PotentialKind::Binary { 0.5 } else { 1.0 };
        let spec = Self {
            kind: r.kind,
            h: r.h,
            beta: r.beta,
            couplings,
            truncation: r.truncation_k,
            spin_scale: r.spin_scale.unwrap_or(default_scale),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// A validated potential ready for evaluation.
///
/// Spins passed to [`eval`](Self::eval) are always ±1; the spin scale and
/// `beta` are folded into the stored coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialEval {
    spec: CouplingSpec,
    /// `coeffs[j - 1]` multiplies `x_0 x_j` (Ising/binary) or `x_{j-1}` (product).
    coeffs: Vec<f64>,
    field: f64,
}

impl PotentialEval {
    pub fn new(spec: CouplingSpec) -> Result<Self> {
        spec.validate()?;
        let s = spec.spin_scale;
        let (pair_scale, field) = match spec.kind {
            PotentialKind::ProductType => (s, 0.0),
            _ => (s * s, spec.beta * spec.h * s),
        };
        let coeffs = (1..=spec.truncation)
            .map(|j| spec.beta * pair_scale * spec.couplings.coupling(j))
            .collect();
        Ok(Self { spec, coeffs, field })
    }

    pub fn zero() -> Self {
        Self::new(CouplingSpec::zero()).expect("zero potential is valid")
    }

    pub fn spec(&self) -> &CouplingSpec {
        &self.spec
    }

    pub fn kind(&self) -> PotentialKind {
        self.spec.kind
    }

    pub fn truncation(&self) -> usize {
        self.spec.truncation
    }

    /// Effective coefficients (beta and spin scale included).
    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Effective field `beta * h * scale` (zero for product type).
    pub fn field(&self) -> f64 {
        self.field
    }

    /// Number of leading coordinates the truncated potential reads.
    pub fn range(&self) -> usize {
        match self.spec.kind {
            PotentialKind::ProductType => self.coeffs.len(),
            _ => self.coeffs.len() + 1,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.field == 0.0 && self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// Bound on `sup |A - A_K|` from the discarded couplings.
    pub fn tail_bound(&self) -> f64 {
        let s = self.spec.spin_scale;
        let pair_scale = if self.spec.kind == PotentialKind::ProductType {
            s
        } else {
            s * s
        };
        self.spec.beta * pair_scale * self.spec.couplings.tail_sum_bound(self.spec.truncation)
    }

    /// `A(x)` for a configuration given by at least `range()` leading spins.
    #[inline]
    pub fn eval(&self, x: &[Spin]) -> f64 {
        match self.spec.kind {
            PotentialKind::ProductType => self.coeffs.iter().zip(x).map(|(c, &s)| c * f64::from(s)).sum(),
            _ => {
                let inner: f64 = self.coeffs.iter().zip(&x[1..]).map(|(c, &s)| c * f64::from(s)).sum();
                f64::from(x[0]) * (self.field + inner)
            }
        }
    }

    pub fn eval_config(&self, x: &Configuration) -> f64 {
        self.eval(&x.materialize(self.range()))
    }

    /// `S_n(A)(z) = sum_{k<n} A(σ^k z)` for a slice holding at least
    /// `n + range() - 1` coordinates.
    #[inline]
    pub fn birkhoff_slice(&self, z: &[Spin], n: usize) -> f64 {
        (0..n).map(|k| self.eval(&z[k..])).sum()
    }

    /// `S_n(A)([x|y]_n)` with `n = x.len() >= 1`.
    pub fn birkhoff_sum(&self, x: &SpinWord, y: &BoundaryTail) -> f64 {
        let n = x.len();
        assert!(n >= 1, "Birkhoff sum needs n >= 1");
        let z = Configuration::new(x, y.clone()).materialize(n + self.range());
        self.birkhoff_slice(&z, n)
    }
}

/// `true` iff every retained coupling is nonnegative, the sufficient
/// condition for class 𝓔 membership of Ising-type potentials (the
/// single-site derivative of the Birkhoff sum is linear in `x` with these
/// coefficients).
pub fn class_e_check_ising(p: &PotentialEval) -> Result<bool> {
    match p.kind() {
        PotentialKind::ProductType => Err(Error::NotIsingType),
        _ => Ok(p.coeffs().iter().all(|&c| c >= 0.0)),
    }
}

/// Which of the two class-𝓕 test functions failed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassFTest {
    /// `L_A(1)`
    TransferOfOne,
    /// `L_A(1_[1])`, the indicator of `x_0 = +1`.
    TransferOfCylinder,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ClassFReport {
    pub depth: usize,
    pub member: bool,
    pub witness: Option<(ClassFTest, MonotoneViolation)>,
}

/// Depth-`m` evidence for class 𝓕: tabulates `L_A(1)` and `L_A(1_[1])`
/// with an all-plus completion and checks both are increasing.
pub fn class_f_check(p: &PotentialEval, m: usize) -> Result<ClassFReport> {
    if !(1..=20).contains(&m) {
        return Err(Error::InvalidArgument(format!(
            "class F depth must be in 1..=20, got {m}"
        )));
    }
    let one = TabulatedFunction::constant(1.0);
    let cyl = CylinderSet::new([0]).to_table(1, BoundaryTail::AllPlus)?;
    let tests = [(ClassFTest::TransferOfOne, one), (ClassFTest::TransferOfCylinder, cyl)];
    for (which, f) in tests {
        let g = transfer::transfer_apply_at_depth(p, &f, m, BoundaryTail::AllPlus)?;
        let tol = 1e-13 * g.sup_norm();
        if let Some(v) = monotone_violation(&g, tol) {
            return Ok(ClassFReport {
                depth: m,
                member: false,
                witness: Some((which, v)),
            });
        }
    }
    Ok(ClassFReport {
        depth: m,
        member: true,
        witness: None,
    })
}

/// Checks `A(x) == A(-x)` on all `2^m` words under flip-paired constant tails.
pub fn is_mirrored(p: &PotentialEval, m: usize) -> Result<bool> {
    Ok(mirror_witness(p, m)?.is_none())
}

/// First word breaking the global-flip symmetry, with the tail it was read under.
pub fn mirror_witness(p: &PotentialEval, m: usize) -> Result<Option<(SpinWord, BoundaryTail)>> {
    if m > 20 {
        return Err(Error::InvalidArgument(format!(
            "mirror check depth must be <= 20, got {m}"
        )));
    }
    let len = m.max(p.range());
    let scale = 1.0 + p.field().abs() + p.coeffs().iter().map(|c| c.abs()).sum::<f64>();
    for idx in 0..1u64 << m {
        let w = SpinWord::from_index(idx, m);
        for tail in [BoundaryTail::AllPlus, BoundaryTail::AllMinus] {
            let x = Configuration::new(&w, tail.clone()).materialize(len);
            let fx = Configuration::new(&w.global_flip(), tail.global_flip()).materialize(len);
            if (p.eval(&x) - p.eval(&fx)).abs() > 1e-13 * scale {
                return Ok(Some((w, tail)));
            }
        }
    }
    Ok(None)
}

/// Dual potential of a product-type potential under the kernel
/// `W(y|x) = sum_i (x_i + y_i) alpha_i`; the product class is symmetric.
pub fn dual_product_potential(spec: &CouplingSpec) -> Result<PotentialEval> {
    match spec.kind {
        PotentialKind::ProductType => PotentialEval::new(spec.clone()),
        _ => Err(Error::DualNotImplemented),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn word(s: &str) -> SpinWord {
        SpinWord::parse(s).unwrap()
    }

    #[test]
    fn eval_examples() {
        let p = PotentialEval::new(CouplingSpec::ising_explicit(vec![1.0], 1.0, 0.0)).unwrap();
        assert_eq!(p.eval(&[1, 1]), 1.0);
        assert_eq!(p.eval(&[1, -1]), -1.0);

        let dyson = PotentialEval::new(CouplingSpec::dyson(1.5, 1.0, 0.0, 200)).unwrap();
        let all_plus = vec![1; 201];
        let expect: f64 = (1..=200).map(|j| (j as f64).powf(-1.5)).sum();
        assert_relative_eq!(dyson.eval(&all_plus), expect, max_relative = 1e-14);

        let mut x = vec![-1; 65];
        x[0] = 1;
        let d = PotentialEval::new(CouplingSpec::dyson(2.2, 1.0, 0.0, 64)).unwrap();
        let fx: Vec<Spin> = x.iter().map(|s| -s).collect();
        assert_eq!(d.eval(&x), d.eval(&fx));
    }

    #[test]
    fn field_and_beta_scale() {
        let p = PotentialEval::new(CouplingSpec::ising_explicit(vec![0.5], 2.0, 0.25)).unwrap();
        // beta * (h x0 + a1 x0 x1) = 2 * (0.25 - 0.5)
        assert_relative_eq!(p.eval(&[1, -1]), -0.5);
    }

    #[test]
    fn product_type_indexing() {
        let p = PotentialEval::new(CouplingSpec::product_explicit(vec![1.0, 0.5, 0.25], 1.0)).unwrap();
        assert_eq!(p.range(), 3);
        assert_eq!(p.eval(&[1, -1, 1]), 1.0 - 0.5 + 0.25);
    }

    #[test]
    fn binary_potential_uses_half_spins() {
        let p = PotentialEval::new(CouplingSpec::binary(1.0, 3)).unwrap();
        // (1/2)(1/2) + (1/2)(-1/2)(1/2) + (1/2)(1/2)(1/4)
        assert_relative_eq!(p.eval(&[1, 1, -1, 1]), 0.25 - 0.125 + 0.0625);
        let bad = CouplingSpec {
            spin_scale: 1.0,
            ..CouplingSpec::binary(1.0, 3)
        };
        assert!(PotentialEval::new(bad).is_err());
    }

    #[test]
    fn spec_validation() {
        assert!(CouplingSpec::dyson(1.0, 1.0, 0.0, 8).validate().is_err());
        assert!(CouplingSpec::dyson(1.5, 0.0, 0.0, 8).validate().is_err());
        assert!(CouplingSpec::dyson(1.5, 1.0, 0.0, 0).validate().is_err());
        assert!(CouplingSpec::ising_geometric(1.0, 1.0, 0.0, 8).validate().is_err());
        assert!(CouplingSpec::ising_geometric(0.5, 1.0, 0.0, 8).validate().is_ok());
    }

    #[test]
    fn birkhoff_examples() {
        let p = PotentialEval::new(CouplingSpec::ising_explicit(vec![1.0, 0.5], 1.0, 0.0)).unwrap();
        let x = word("++");
        assert_eq!(p.birkhoff_sum(&x, &BoundaryTail::AllPlus), 3.0);
        let one = word("+");
        let cfg = Configuration::new(&one, BoundaryTail::AllMinus);
        assert_eq!(p.birkhoff_sum(&one, &BoundaryTail::AllMinus), p.eval_config(&cfg));
        let z = PotentialEval::zero();
        assert_eq!(
            z.birkhoff_sum(&word("+-+-"), &BoundaryTail::alternating(1).unwrap()),
            0.0
        );
    }

    #[test]
    fn tail_bounds() {
        let p = PotentialEval::new(CouplingSpec::dyson(3.0, 2.0, 0.0, 10)).unwrap();
        let dropped: f64 = (11..100_000).map(|j| 2.0 * (j as f64).powi(-3)).sum();
        assert!(p.tail_bound() >= dropped);
        assert!(p.tail_bound() < 2.0 * dropped);
        let e = PotentialEval::new(CouplingSpec::ising_explicit(vec![1.0, -2.0], 1.0, 0.0)).unwrap();
        assert_eq!(e.tail_bound(), 0.0);
    }

    #[test]
    fn class_e_examples() {
        let dyson = PotentialEval::new(CouplingSpec::dyson(1.5, 1.0, 0.3, 32)).unwrap();
        assert!(class_e_check_ising(&dyson).unwrap());
        let mixed = PotentialEval::new(CouplingSpec::ising_explicit(vec![1.0, -0.1], 1.0, 0.0)).unwrap();
        assert!(!class_e_check_ising(&mixed).unwrap());
        let zero = PotentialEval::new(CouplingSpec::ising_explicit(vec![0.0, 0.0], 1.0, 0.0)).unwrap();
        assert!(class_e_check_ising(&zero).unwrap());
        let prod = PotentialEval::new(CouplingSpec::product_power(3.0, 1.0, 8)).unwrap();
        let err = class_e_check_ising(&prod).unwrap_err();
        assert_eq!(err, Error::NotIsingType);
        assert!(err.to_string().contains("Ising-type only"));
    }

    #[test]
    fn class_f_examples() {
        let prod = PotentialEval::new(CouplingSpec::product_power(2.5, 1.0, 6)).unwrap();
        assert!(class_f_check(&prod, 6).unwrap().member);
        assert!(class_f_check(&PotentialEval::zero(), 4).unwrap().member);

        let anti = PotentialEval::new(CouplingSpec::ising_explicit(vec![-1.0], 1.0, 0.0)).unwrap();
        let r = class_f_check(&anti, 2).unwrap();
        assert!(!r.member);
        let (which, v) = r.witness.unwrap();
        // L(1) = 2cosh(x0) is constant; L(1_[1]) = e^{-x0} decreases in x0
        assert_eq!(which, ClassFTest::TransferOfCylinder);
        assert_eq!(v.lower, word("--"));
        assert_eq!(v.upper, word("+-"));
        assert!(class_f_check(&anti, 0).is_err());
    }

    #[test]
    fn mirrored_examples() {
        let d = PotentialEval::new(CouplingSpec::dyson(1.5, 1.0, 0.0, 16)).unwrap();
        assert!(is_mirrored(&d, 8).unwrap());
        let hf = PotentialEval::new(CouplingSpec::dyson(1.5, 1.0, 0.5, 16)).unwrap();
        assert!(!is_mirrored(&hf, 1).unwrap());
        let prod = PotentialEval::new(CouplingSpec::product_power(2.0, 1.0, 4)).unwrap();
        assert!(!is_mirrored(&prod, 1).unwrap());
        assert!(is_mirrored(&d, 21).is_err());
    }

    #[test]
    fn dual_of_product_is_itself() {
        let spec = CouplingSpec::product_explicit(vec![1.0, 0.5, 0.25], 1.0);
        let dual = dual_product_potential(&spec).unwrap();
        assert_eq!(dual.spec(), &spec);
        let zero = CouplingSpec::product_explicit(vec![0.0], 1.0);
        assert!(dual_product_potential(&zero).unwrap().is_zero());
        assert_eq!(
            dual_product_potential(&CouplingSpec::dyson(2.0, 1.0, 0.0, 4)),
            Err(Error::DualNotImplemented)
        );
    }

    #[test]
    fn json_schema_and_rationals() {
        let spec = CouplingSpec::dyson(1.88, 0.7, 0.1, 16);
        let json = spec.to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(v["kind"], "ising_type");
        assert_eq!(v["couplings"]["rule"], "power_law");
        assert_eq!(v["truncation_K"], 16);
        assert_eq!(v["spin_scale"], 1.0);
        assert_eq!(CouplingSpec::from_json(&json).unwrap(), spec);

        let txt = r#"{"kind":"product_type","h":0,"beta":"1/3","couplings":{"rule":"explicit","params":["1/2",0.25,"-3/8"]},"truncation_K":3}"#;
        let s = CouplingSpec::from_json(txt).unwrap();
        assert_eq!(s.beta, 1.0 / 3.0);
        assert_eq!(s.couplings, CouplingRule::Explicit(vec![0.5, 0.25, -0.375]));
        assert_eq!(s.spin_scale, 1.0);
        assert!(
            CouplingSpec::from_json(r#"{"kind":"ising_type","couplings":{"rule":"power_law","params":[0.5]}}"#)
                .is_err()
        );
        assert!(CouplingSpec::from_json(r#"{"kind":"ising_type","couplings":{"rule":"nope","params":[]}}"#).is_err());
    }
}

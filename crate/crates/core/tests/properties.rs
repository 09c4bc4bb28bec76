use proptest::prelude::*;

use ruelle_core::gibbs::{self, build_measure, expect, magnetization};
use ruelle_core::potential::{class_e_check_ising, class_f_check};
use ruelle_core::space::{enumerate_monotone_indicators, is_increasing, is_increasing_tol};
use ruelle_core::transfer::{self, transfer_apply, transfer_apply_at_depth, transfer_power};
use ruelle_core::{
    BoundaryTail, Configuration, CouplingSpec, CylinderSet, PotentialEval, Spin, SpinWord, TabulatedFunction,
};

fn spins(len: usize) -> impl Strategy<Value = Vec<Spin>> {
    prop::collection::vec(prop_oneof![Just(1 as Spin), Just(-1 as Spin)], len)
}

fn tail() -> impl Strategy<Value = BoundaryTail> {
    prop_oneof![
        Just(BoundaryTail::AllPlus),
        Just(BoundaryTail::AllMinus),
        Just(BoundaryTail::Alternating { start: 1 }),
        Just(BoundaryTail::Alternating { start: -1 }),
        spins(3).prop_map(|w| BoundaryTail::Periodic(SpinWord::new(&w).unwrap())),
    ]
}

fn ferro_couplings(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.0..1.0f64, 1..=max_len)
}

fn ising(a: Vec<f64>, beta: f64, h: f64) -> PotentialEval {
    PotentialEval::new(CouplingSpec::ising_explicit(a, beta, h)).unwrap()
}

fn product(a: Vec<f64>, beta: f64) -> PotentialEval {
    PotentialEval::new(CouplingSpec::product_explicit(a, beta)).unwrap()
}

/// `L^n f(x)` by direct recursion over preimages.
fn power_pointwise(p: &PotentialEval, f: &dyn Fn(&[Spin]) -> f64, n: usize, x: &[Spin]) -> f64 {
    if n == 0 {
        return f(x);
    }
    [1 as Spin, -1]
        .iter()
        .map(|&i| {
            let mut ix = Vec::with_capacity(x.len() + 1);
            ix.push(i);
            ix.extend_from_slice(x);
            p.eval(&ix).exp() * power_pointwise(p, f, n - 1, &ix)
        })
        .sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn truncation_changes_bounded_by_dropped_couplings(gamma in 1.1..4.0f64, beta in 0.1..2.0f64, k in 1usize..20, extra in 1usize..20, x in spins(48)) {
        let short = PotentialEval::new(CouplingSpec::dyson(gamma, beta, 0.3, k)).unwrap();
        let long = PotentialEval::new(CouplingSpec::dyson(gamma, beta, 0.3, k + extra)).unwrap();
        let dropped: f64 = (k + 1..=k + extra).map(|j| beta * (j as f64).powf(-gamma)).sum();
        prop_assert!((short.eval(&x) - long.eval(&x)).abs() <= dropped * (1.0 + 1e-12) + 1e-15);
    }

    #[test]
    fn zero_field_ising_is_flip_invariant(a in prop::collection::vec(-1.0..1.0f64, 1..10), x in spins(12)) {
        let p = ising(a, 1.0, 0.0);
        let flipped: Vec<Spin> = x.iter().map(|s| -s).collect();
        prop_assert!((p.eval(&x) - p.eval(&flipped)).abs() < 1e-14);
    }

    #[test]
    fn birkhoff_sum_splits(a in prop::collection::vec(-1.0..1.0f64, 1..8), h in -1.0..1.0f64, n in 1usize..8, m in 1usize..8, z in spins(32)) {
        let p = ising(a, 1.0, h);
        prop_assert_eq!(p.birkhoff_slice(&z, 1), p.eval(&z));
        let whole = p.birkhoff_slice(&z, n + m);
        let split = p.birkhoff_slice(&z, n) + p.birkhoff_slice(&z[n..], m);
        prop_assert!((whole - split).abs() < 1e-12);
    }

    #[test]
    fn hamiltonian_matches_birkhoff_sum(a in prop::collection::vec(-1.0..1.0f64, 1..8), h in -1.0..1.0f64, x in spins(6), y in tail()) {
        let p = ising(a, 0.8, h);
        let r = gibbs::hamiltonian_equivalence(&p, &SpinWord::new(&x).unwrap(), &y).unwrap();
        prop_assert!(r.abs() < 1e-12);
    }

    #[test]
    fn transfer_is_linear_and_positive(a in prop::collection::vec(-1.0..1.0f64, 1..4), h in -1.0..1.0f64, c in -3.0..3.0f64, f in prop::collection::vec(0.0..2.0f64, 16), g in prop::collection::vec(-2.0..2.0f64, 16)) {
        let p = ising(a, 1.0, h);
        let f = TabulatedFunction::new(4, f, BoundaryTail::AllPlus).unwrap();
        let g = TabulatedFunction::new(4, g, BoundaryTail::AllPlus).unwrap();
        let lhs = transfer_apply(&p, &f.scale(c).add(&g), 20).unwrap();
        let lf = transfer_apply(&p, &f, 20).unwrap();
        let rhs = lf.scale(c).add(&transfer_apply(&p, &g, 20).unwrap());
        prop_assert!(lhs.sup_distance(&rhs) <= 1e-12 * (1.0 + rhs.sup_norm()));
        prop_assert!(lf.values().iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn gibbs_expectation_is_transfer_quotient(a in prop::collection::vec(-1.0..1.0f64, 1..4), h in -0.5..0.5f64, n in 1usize..6, y in spins(8), f in prop::collection::vec(-1.0..1.0f64, 32)) {
        let p = ising(a, 1.0, h);
        let y = BoundaryTail::Spliced { head: SpinWord::new(&y).unwrap(), rest: Box::new(BoundaryTail::AllMinus) };
        let depth = n.min(5);
        let f = TabulatedFunction::new(depth, f[..1 << depth].to_vec(), BoundaryTail::AllPlus).unwrap();
        let mu = build_measure(&p, n, &y).unwrap();
        // σ^n of any [x|y]_n.
        let point = Configuration::from_spins(Vec::new(), y).unwrap().shift(n).materialize(16);
        let ff = |z: &[Spin]| f.eval(z);
        let one = |_: &[Spin]| 1.0;
        let q = power_pointwise(&p, &ff, n, &point) / power_pointwise(&p, &one, n, &point);
        prop_assert!((expect(&mu, &f) - q).abs() < 1e-10);
    }

    #[test]
    fn table_power_agrees_with_preimage_recursion(a in prop::collection::vec(-1.0..1.0f64, 1..4), n in 1usize..5, x in spins(16)) {
        let p = product(a, 1.0);
        let f = CylinderSet::new([0, 1]).to_table(2, BoundaryTail::AllPlus).unwrap();
        let g = transfer_power(&p, &f, n, 20).unwrap();
        let direct = power_pointwise(&p, &|z: &[Spin]| f.eval(z), n, &x);
        prop_assert!((g.eval(&x) - direct).abs() <= 1e-12 * direct.abs().max(1.0));
    }

    #[test]
    fn class_f_preserves_monotonicity(a in ferro_couplings(3), beta in 0.1..2.0f64, which in 0usize..20) {
        let p = product(a, beta);
        prop_assume!(class_f_check(&p, 6).unwrap().member);
        let fam = enumerate_monotone_indicators(3).unwrap();
        let f = &fam[which % fam.len()];
        let g = transfer_apply_at_depth(&p, f, 6, BoundaryTail::AllPlus).unwrap();
        prop_assert!(is_increasing_tol(&g, 1e-13 * g.sup_norm()));
    }

    #[test]
    fn class_e_implies_fkg(a in ferro_couplings(6), beta in 0.1..2.0f64, h in -0.5..0.5f64, y in tail()) {
        let p = ising(a, beta, h);
        prop_assert!(class_e_check_ising(&p).unwrap());
        let scan = gibbs::fkg_scan(&p, &[1, 2, 3], &[y]).unwrap();
        prop_assert!(scan.passes(1e-12), "min covariance {}", scan.min_covariance);
    }

    #[test]
    fn decomposition_identity_holds(a in prop::collection::vec(-1.0..1.0f64, 1..5), h in -0.5..0.5f64, n in 1usize..6, y in tail()) {
        let p = ising(a, 1.0, h);
        let f = CylinderSet::new([0]).to_table(1, BoundaryTail::AllPlus).unwrap();
        let d = gibbs::decomposition_identity(&p, n, &y, &f).unwrap();
        prop_assert!(d.residual.abs() < 1e-12);
        prop_assert!((d.weights[0] + d.weights[1] - 1.0).abs() < 1e-12);
    }
}

fn increasing_family(n: usize) -> Vec<TabulatedFunction> {
    enumerate_monotone_indicators(n)
        .unwrap()
        .into_iter()
        .filter(|f| f.values().iter().any(|&v| v > 0.0))
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn expectations_ordered_by_boundary(a in ferro_couplings(5), beta in 0.1..2.0f64, w in spins(2)) {
        let p = ising(a, beta, 0.0);
        // w^∞ sits between the constant tails; the periodic tails below are ordered pointwise.
        let mid = BoundaryTail::Periodic(SpinWord::new(&w).unwrap());
        let lo = BoundaryTail::Periodic(SpinWord::new(&[-1, w[1]]).unwrap());
        let tails = [BoundaryTail::AllMinus, lo, mid, BoundaryTail::AllPlus];
        for f in increasing_family(3) {
            let e: Vec<f64> = tails.iter().map(|y| expect(&build_measure(&p, 3, y).unwrap(), &f)).collect();
            for k in 1..e.len() {
                prop_assert!(e[k] >= e[k - 1] - 1e-12);
            }
        }
    }

    #[test]
    fn expectations_monotone_in_volume(a in ferro_couplings(5), beta in 0.1..2.0f64) {
        let p = ising(a, beta, 0.0);
        for f in increasing_family(2) {
            let plus: Vec<f64> = (2..=7).map(|n| expect(&build_measure(&p, n, &BoundaryTail::AllPlus).unwrap(), &f)).collect();
            let minus: Vec<f64> = (2..=7).map(|n| expect(&build_measure(&p, n, &BoundaryTail::AllMinus).unwrap(), &f)).collect();
            prop_assert!(plus.windows(2).all(|w| w[1] <= w[0] + 1e-12));
            prop_assert!(minus.windows(2).all(|w| w[1] >= w[0] - 1e-12));
        }
    }

    #[test]
    fn magnetization_nondecreasing_in_field(a in ferro_couplings(5), beta in 0.1..2.0f64, y in tail(), site in 0usize..5) {
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=20 {
            let h = -1.0 + 0.1 * f64::from(k);
            let m = magnetization(&build_measure(&ising(a.clone(), beta, h), 5, &y).unwrap(), site);
            prop_assert!(m >= prev - 1e-12);
            prev = m;
        }
    }
}

#[test]
fn explicit_product_eigenfunction_exact_at_truncation() {
    for k in [4, 8, 12] {
        let p = PotentialEval::new(CouplingSpec::product_power(3.0, 1.0, k)).unwrap();
        let ep = transfer::ProductEigenpair::new(&p).unwrap();
        let phi = ep.table(k, BoundaryTail::AllPlus);
        let lphi = transfer_apply(&p, &phi, 20).unwrap();
        let residual = lphi.sup_distance(&phi.lift(lphi.depth()).unwrap().scale(ep.lambda)) / phi.sup_norm();
        assert!(residual < 1e-10, "K={k}: {residual}");
    }
}

#[test]
fn pressure_stays_below_bound() {
    for beta in [0.5, 1.0, 2.0] {
        let p = PotentialEval::new(CouplingSpec::dyson(3.0, beta, 0.0, 12)).unwrap();
        let (est, _) = transfer::power_iterate(&p, 25, 1, transfer::PowerOptions::default()).unwrap();
        let bound = ruelle_core::kernel::pressure_upper_bound(3.0, beta, 12).unwrap();
        assert!(est.pressure < bound.upper_bound, "beta={beta}");
    }
}

#[test]
fn cesaro_averages_settle_above_two() {
    let family = [CylinderSet::new([0]), CylinderSet::new([1]), CylinderSet::new([0, 2])];
    for (gamma, beta) in [(3.0, 1.0), (2.2, 0.5)] {
        let p = PotentialEval::new(CouplingSpec::dyson(gamma, beta, 0.0, 12)).unwrap();
        for sign in [1, -1] {
            let c = transfer::cesaro_measure(&p, sign, 1000, &family, transfer::PowerOptions::default()).unwrap();
            for e in &c.entries {
                assert!(
                    e.stability < 0.01,
                    "gamma={gamma} sign={sign} {}: {}",
                    e.support,
                    e.stability
                );
            }
        }
    }
}

#[test]
fn monotone_family_is_increasing() {
    for n in 1..=4 {
        assert!(enumerate_monotone_indicators(n).unwrap().iter().all(is_increasing));
    }
}

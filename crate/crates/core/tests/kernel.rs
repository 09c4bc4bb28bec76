use proptest::prelude::*;

use ruelle_core::kernel::{
    duality_residual, fkg_quotient, kernel_eigenfunction, kernel_eval, CylinderBoundary, CylinderMeasure, KernelSpec,
    Quadrature,
};
use ruelle_core::{BoundaryTail, Configuration, CouplingSpec, PotentialEval, Spin};

fn spins(len: usize) -> impl Strategy<Value = Vec<Spin>> {
    prop::collection::vec(prop_oneof![Just(1 as Spin), Just(-1 as Spin)], len)
}

fn config(len: usize) -> impl Strategy<Value = Configuration> {
    (
        spins(len),
        prop_oneof![
            Just(BoundaryTail::AllPlus),
            Just(BoundaryTail::AllMinus),
            Just(BoundaryTail::Alternating { start: 1 })
        ],
    )
        .prop_map(|(s, t)| Configuration::from_spins(s, t).unwrap())
}

fn cylinder(depth: usize) -> Quadrature {
    Quadrature::ExactCylinder {
        depth,
        boundary: CylinderBoundary::Plus,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_kernel_duality(a in prop::collection::vec(-3.0..3.0f64, 1..16), beta in 0.1..3.0f64, s in prop_oneof![Just(1 as Spin), Just(-1 as Spin)], x in config(20), y in config(20)) {
        let p = PotentialEval::new(CouplingSpec::product_explicit(a, beta)).unwrap();
        let w = KernelSpec::new(&p).unwrap();
        prop_assert!(duality_residual(&p, &w, s, &x, &y).unwrap() < 1e-12);
    }

    #[test]
    fn ising_kernel_duality(a in prop::collection::vec(-1.0..1.0f64, 1..12), h in -1.0..1.0f64, s in prop_oneof![Just(1 as Spin), Just(-1 as Spin)], x in config(20), y in config(20)) {
        let p = PotentialEval::new(CouplingSpec::ising_explicit(a, 1.0, h)).unwrap();
        let w = KernelSpec::new(&p).unwrap();
        prop_assert!(duality_residual(&p, &w, s, &x, &y).unwrap() < 1e-12);
    }

    #[test]
    fn kernel_eigenfunction_positive(gamma in 2.1..4.0f64, x in config(24)) {
        let p = PotentialEval::new(CouplingSpec::product_power(gamma, 1.0, 16)).unwrap();
        let w = KernelSpec::new(&p).unwrap();
        prop_assert!(kernel_eval(&w, &x, &x).unwrap().exp() > 0.0);
        prop_assert!(kernel_eigenfunction(&p, &w, &x, cylinder(8)).unwrap().value > 0.0);
    }
}

#[test]
fn cylinder_quadrature_settles_with_depth() {
    let p = PotentialEval::new(CouplingSpec::product_power(3.0, 1.0, 32)).unwrap();
    let w = KernelSpec::new(&p).unwrap();
    let x = Configuration::from_spins(vec![1, -1, -1, 1, -1], BoundaryTail::Alternating { start: 1 }).unwrap();
    let values: Vec<f64> = (10..=14)
        .map(|d| kernel_eigenfunction(&p, &w, &x, cylinder(d)).unwrap().value)
        .collect();
    for pair in values.windows(2) {
        assert!((pair[1] - pair[0]).abs() / pair[0] < 0.01, "{values:?}");
    }
}

#[test]
fn fkg_quotient_below_one() {
    for beta in [0.5, 1.0, 2.0] {
        let p = PotentialEval::new(CouplingSpec::dyson(3.0, beta, 0.0, 32)).unwrap();
        let w = KernelSpec::new(&p).unwrap();
        let q = fkg_quotient(&p, &w, 12).unwrap();
        assert!(q > 0.0 && q < 1.0, "beta={beta}: {q}");
    }
}

#[test]
fn flip_paired_quadrature_has_centred_sites() {
    let p = PotentialEval::new(CouplingSpec::dyson(3.0, 1.0, 0.0, 32)).unwrap();
    let m = CylinderMeasure::new(&p, 12, CylinderBoundary::FlipPaired).unwrap();
    assert!(m.site_means().iter().all(|v| v.abs() < 1e-3));
}

#[test]
fn monte_carlo_is_reproducible() {
    let p = PotentialEval::new(CouplingSpec::product_power(3.0, 1.0, 16)).unwrap();
    let w = KernelSpec::new(&p).unwrap();
    let x = Configuration::constant(-1);
    let q = Quadrature::MonteCarlo {
        samples: 10_000,
        seed: 42,
    };
    let a = kernel_eigenfunction(&p, &w, &x, q).unwrap();
    let b = kernel_eigenfunction(&p, &w, &x, q).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
    let c = kernel_eigenfunction(&p, &w, &x, cylinder(12)).unwrap();
    assert!((a.value - c.value).abs() < 5.0 * a.std_error + 1e-3 * c.value);
}

use std::path::Path;

use serde_json::json;

use ruelle_core::binary::{self, Grid};
use ruelle_core::gibbs;
use ruelle_core::kernel::{self, CylinderBoundary, Integrator, KernelSpec, Quadrature};
use ruelle_core::potential::{class_e_check_ising, class_f_check, mirror_witness, CouplingRule};
use ruelle_core::table::embedding;
use ruelle_core::transfer::{self, PowerOptions, ProductEigenpair};
use ruelle_core::{
    BoundaryTail, Configuration, CouplingSpec, PotentialEval, PotentialKind, SpinWord, TabulatedFunction,
};

use crate::error::CliError;
use crate::output::{Artifact, Cell, Table};
use crate::{Command, CylinderBoundaryArg, KindArg, PotentialArgs, QuadratureArg, RuleArg};

pub const COVARIANCE_TOL: f64 = 1e-12;

pub fn dispatch(cmd: &Command) -> Result<Artifact, CliError> {
    match cmd {
        Command::FkgVerify {
            potential,
            max_volume,
            boundaries,
        } => fkg_verify(&build_potential(potential)?, *max_volume, boundaries),
        Command::EigenApprox {
            potential,
            iters,
            max_iters,
            depth,
            cap,
            z0,
            prev,
        } => {
            if iters > max_iters {
                return Err(CliError::Config(format!(
                    "--iters {iters} exceeds --max-iters {max_iters}"
                )));
            }
            let opts = PowerOptions {
                depth: *depth,
                cap: *cap,
            };
            eigen_approx(&build_potential(potential)?, *iters, z0.spin(), opts, *prev)
        }
        Command::Pressure {
            potential,
            iters,
            depth,
            cap,
        } => pressure(
            &build_potential(potential)?,
            *iters,
            PowerOptions {
                depth: *depth,
                cap: *cap,
            },
        ),
        Command::Phase {
            potential,
            min_volume,
            max_volume,
            sites,
        } => phase(&build_potential(potential)?, *min_volume, *max_volume, sites),
        Command::KernelEigen {
            potential,
            quadrature,
            depth,
            cylinder_boundary,
            samples,
            seed,
            word_depth,
            boundary,
        } => {
            let q = match quadrature {
                QuadratureArg::Cylinder => Quadrature::ExactCylinder {
                    depth: *depth,
                    boundary: match cylinder_boundary {
                        CylinderBoundaryArg::Plus => CylinderBoundary::Plus,
                        CylinderBoundaryArg::Flip => CylinderBoundary::FlipPaired,
                    },
                },
                QuadratureArg::Mc => Quadrature::MonteCarlo {
                    samples: *samples,
                    seed: *seed,
                },
            };
            kernel_eigen(
                &build_potential(potential)?,
                q,
                *word_depth,
                &BoundaryTail::parse(boundary)?,
            )
        }
        Command::Binary { grid, step } => binary_model(*grid, *step),
        Command::ClassCheck { potential, depth } => class_check(&build_potential(potential)?, *depth),
        Command::PotentialGraph {
            potential,
            depth,
            boundary,
        } => potential_graph(&build_potential(potential)?, *depth, &BoundaryTail::parse(boundary)?),
        Command::Measure {
            potential,
            volume,
            boundary,
        } => measure(&build_potential(potential)?, *volume, &BoundaryTail::parse(boundary)?),
        Command::Figure { id } => crate::figures::build(*id),
    }
}

pub fn build_potential(a: &PotentialArgs) -> Result<PotentialEval, CliError> {
    if let Some(src) = &a.potential {
        let text = if src.trim_start().starts_with('{') {
            src.clone()
        } else {
            std::fs::read_to_string(Path::new(src))
                .map_err(|e| CliError::Config(format!("cannot read potential file {src}: {e}")))?
        };
        return Ok(PotentialEval::new(CouplingSpec::from_json(&text)?)?);
    }
    let k = a.truncation;
    let spec = match (a.kind, a.rule) {
        (KindArg::Binary, _) => CouplingSpec::binary(a.beta, k),
        (KindArg::Ising, RuleArg::Power) => CouplingSpec::dyson(a.gamma, a.beta, a.field, k),
        (KindArg::Ising, RuleArg::Geometric) => CouplingSpec::ising_geometric(a.lambda, a.beta, a.field, k),
        (KindArg::Ising, RuleArg::Explicit) => CouplingSpec::ising_explicit(explicit(a)?, a.beta, a.field),
        (KindArg::Product, RuleArg::Power) => CouplingSpec::product_power(a.gamma, a.beta, k),
        (KindArg::Product, RuleArg::Geometric) => CouplingSpec::product_geometric(a.lambda, a.beta, k),
        (KindArg::Product, RuleArg::Explicit) => CouplingSpec::product_explicit(explicit(a)?, a.beta),
    };
    if a.kind == KindArg::Product && a.field != 0.0 {
        return Err(CliError::Config("product-type potentials take no field".into()));
    }
    Ok(PotentialEval::new(spec)?)
}

fn explicit(a: &PotentialArgs) -> Result<Vec<f64>, CliError> {
    if a.couplings.is_empty() {
        return Err(CliError::Config("--rule explicit needs --couplings".into()));
    }
    Ok(a.couplings.clone())
}

/// `(t, index)` for every word of length `depth`, sorted by `t`.
pub fn sorted_words(depth: usize) -> Vec<(f64, usize)> {
    let mut v: Vec<(f64, usize)> = (0..1usize << depth)
        .map(|i| (embedding(&SpinWord::from_index(i as u64, depth)), i))
        .collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

fn fkg_verify(p: &PotentialEval, max_volume: usize, boundaries: &[String]) -> Result<Artifact, CliError> {
    let tails = boundaries
        .iter()
        .map(|b| BoundaryTail::parse(b))
        .collect::<Result<Vec<_>, _>>()?;
    let volumes: Vec<usize> = (1..=max_volume).collect();
    let scan = gibbs::fkg_scan(p, &volumes, &tails)?;
    let mut table = Table::new(&["n", "boundary", "pair_class", "pairs", "min_covariance"]);
    for c in &scan.cells {
        table.push(vec![
            c.n.into(),
            c.boundary.clone().into(),
            c.pair_class.label().into(),
            c.pairs.into(),
            c.min_covariance.into(),
        ]);
    }
    let certified = match class_e_check_ising(p) {
        Ok(b) => Some(b),
        Err(ruelle_core::Error::NotIsingType) => None,
        Err(e) => return Err(e.into()),
    };
    let passes = scan.passes(COVARIANCE_TOL);
    let status = match (passes, certified) {
        (false, _) => "violated",
        (true, Some(true)) => "class_E_certified",
        (true, _) => "empirical_FKG",
    };
    let violation = (!passes).then(|| serde_json::to_string(&scan.witness).expect("witness serializes"));
    Ok(Artifact {
        table: Some(table),
        report: json!({
            "min_covariance": scan.min_covariance,
            "passes": passes,
            "class_E": certified,
            "status": status,
            "witness": if passes { serde_json::Value::Null } else { json!(scan.witness) },
        }),
        summary: format!("fkg-verify: {status}, min covariance {:e}", scan.min_covariance),
        violation,
    })
}

/// `φ` of a product-type potential tabulated like `z` and normalized at `z0^∞`.
fn explicit_phi_like(p: &PotentialEval, z: &TabulatedFunction, z0: i8) -> Result<TabulatedFunction, CliError> {
    let ep = ProductEigenpair::new(p)?;
    let phi = ep.table(z.depth(), BoundaryTail::constant(z0));
    let at = phi.at_constant(z0);
    Ok(phi.map(|v| v / at))
}

fn eigen_approx(p: &PotentialEval, iters: usize, z0: i8, opts: PowerOptions, prev: bool) -> Result<Artifact, CliError> {
    let (est, z) = transfer::power_iterate(p, iters, z0, opts)?;
    let zp = if !prev {
        None
    } else if iters >= 2 {
        Some(transfer::power_iterate(p, iters - 1, z0, opts)?.1)
    } else {
        Some(TabulatedFunction::constant(1.0).lift(z.depth())?)
    };
    let phi = if p.kind() == PotentialKind::ProductType {
        Some(explicit_phi_like(p, &z, z0)?)
    } else {
        None
    };

    let mut headers = vec!["t", "z_value"];
    if zp.is_some() {
        headers.push("z_prev");
    }
    if phi.is_some() {
        headers.push("phi_explicit");
    }
    let mut table = Table::new(&headers);
    let order = sorted_words(z.depth());
    for &(t, i) in &order {
        let mut row: Vec<Cell> = vec![t.into(), z.values()[i].into()];
        if let Some(zp) = &zp {
            row.push(zp.values()[i].into());
        }
        if let Some(phi) = &phi {
            row.push(phi.values()[i].into());
        }
        table.push(row);
    }
    let sup_diff_prev = zp.as_ref().map(|zp| z.sup_distance(zp));
    let phi_ratio_spread = phi.as_ref().map(|phi| ratio_spread(z.values(), phi.values()));
    let mut report = serde_json::to_value(&est)?;
    report["sup_diff_prev"] = json!(sup_diff_prev);
    report["phi_ratio_spread"] = json!(phi_ratio_spread);
    let (max_jump, variation) = oscillation(z.values(), &order);
    report["max_adjacent_jump"] = json!(max_jump);
    report["total_variation"] = json!(variation);
    Ok(Artifact {
        table: Some(table),
        report,
        summary: format!(
            "eigen-approx: lambda {} pressure {} residual {:e} depth {}{}",
            est.lambda,
            est.pressure,
            est.residual,
            est.depth,
            if est.exact { "" } else { " (tail-completed)" }
        ),
        violation: None,
    })
}

/// Largest jump and total variation of `v` between neighbours in `[-1, 1]`.
fn oscillation(v: &[f64], order: &[(f64, usize)]) -> (f64, f64) {
    order.windows(2).fold((0.0, 0.0), |(jump, total), w| {
        let d = (v[w[1].1] - v[w[0].1]).abs();
        (f64::max(jump, d), total + d)
    })
}

/// `(max - min) / mean` of `a_i / b_i`.
pub fn ratio_spread(a: &[f64], b: &[f64]) -> f64 {
    let r: Vec<f64> = a.iter().zip(b).map(|(x, y)| x / y).collect();
    let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
    (hi - lo) / (r.iter().sum::<f64>() / r.len() as f64)
}

fn pressure(p: &PotentialEval, iters: usize, opts: PowerOptions) -> Result<Artifact, CliError> {
    let spec = p.spec();
    let CouplingRule::PowerLaw { gamma } = spec.couplings else {
        return Err(CliError::Config("pressure bound needs power-law couplings".into()));
    };
    if spec.kind != PotentialKind::IsingType || spec.h != 0.0 {
        return Err(CliError::Config(
            "pressure bound needs an Ising-type potential with zero field".into(),
        ));
    }
    let bound = kernel::pressure_upper_bound(gamma, spec.beta, spec.truncation)?;
    let (est, _) = transfer::power_iterate(p, iters, 1, opts)?;
    let margin = bound.upper_bound - est.pressure;
    let violation = (margin <= 0.0).then(|| format!("pressure {} not below bound {}", est.pressure, bound.upper_bound));
    Ok(Artifact {
        table: None,
        report: json!({
            "pressure_estimate": est.pressure,
            "upper_bound": bound.upper_bound,
            "margin": margin,
            "gamma": gamma,
            "beta": spec.beta,
            "K": spec.truncation,
            "n_iters": est.n_iters,
            "residual": est.residual,
            "tail_bound": est.tail_bound,
            "zeta_tail_bound": bound.zeta_tail_bound,
            "depth": est.depth,
        }),
        summary: format!(
            "pressure: estimate {} bound {} margin {:e}",
            est.pressure, bound.upper_bound, margin
        ),
        violation,
    })
}

pub struct PhaseData {
    pub table: Table,
    pub max_gaps: Vec<f64>,
    pub min_gap: f64,
}

pub fn phase_data(
    p: &PotentialEval,
    min_volume: usize,
    max_volume: usize,
    sites: &[usize],
) -> Result<PhaseData, CliError> {
    if min_volume == 0 || min_volume > max_volume {
        return Err(CliError::Config(format!(
            "bad volume range {min_volume}..={max_volume}"
        )));
    }
    let mut table = Table::new(&["n", "site", "m_plus", "m_minus", "gap"]);
    let mut max_gaps = Vec::new();
    let mut min_gap = f64::INFINITY;
    for n in min_volume..=max_volume {
        let r = transfer::uniqueness_diagnostic(p, n, sites)?;
        for g in &r.gaps {
            table.push(vec![
                n.into(),
                g.site.into(),
                g.plus.into(),
                g.minus.into(),
                g.gap.into(),
            ]);
        }
        max_gaps.push(r.max_gap);
        min_gap = min_gap.min(r.min_gap);
    }
    Ok(PhaseData {
        table,
        max_gaps,
        min_gap,
    })
}

fn phase(p: &PotentialEval, min_volume: usize, max_volume: usize, sites: &[usize]) -> Result<Artifact, CliError> {
    let d = phase_data(p, min_volume, max_volume, sites)?;
    let decreasing = d.max_gaps.windows(2).all(|w| w[1] < w[0]);
    let violation = (d.min_gap < -COVARIANCE_TOL).then(|| format!("negative magnetization gap {:e}", d.min_gap));
    Ok(Artifact {
        table: Some(d.table),
        report: json!({
            "volumes": (min_volume..=max_volume).collect::<Vec<_>>(),
            "max_gap": d.max_gaps,
            "min_gap": d.min_gap,
            "max_gap_decreasing": decreasing,
        }),
        summary: format!(
            "phase: max gap {:e} at n={min_volume}, {:e} at n={max_volume}; decreasing: {decreasing}",
            d.max_gaps[0],
            d.max_gaps[d.max_gaps.len() - 1]
        ),
        violation,
    })
}

/// Kernel eigenfunction values on all words of `word_depth`, indexed by word.
pub fn kernel_values(
    p: &PotentialEval,
    q: Quadrature,
    word_depth: usize,
    tail: &BoundaryTail,
) -> Result<Vec<f64>, CliError> {
    if word_depth > 16 {
        return Err(CliError::Config(format!("--word-depth {word_depth} exceeds 16")));
    }
    let w = KernelSpec::new(p)?;
    let integ = Integrator::new(p, &w, q)?;
    (0..1u64 << word_depth)
        .map(|i| {
            let x = Configuration::new(&SpinWord::from_index(i, word_depth), tail.clone());
            Ok(integ.eval(&w, &x)?.value)
        })
        .collect()
}

/// Explicit product eigenfunction on all words of `word_depth`.
pub fn explicit_values(p: &PotentialEval, word_depth: usize, tail: &BoundaryTail) -> Result<Vec<f64>, CliError> {
    let ep = ProductEigenpair::new(p)?;
    Ok(ep.table(word_depth, tail.clone()).into_values())
}

fn kernel_eigen(
    p: &PotentialEval,
    q: Quadrature,
    word_depth: usize,
    tail: &BoundaryTail,
) -> Result<Artifact, CliError> {
    let values = kernel_values(p, q, word_depth, tail)?;
    let explicit = if p.kind() == PotentialKind::ProductType {
        Some(explicit_values(p, word_depth, tail)?)
    } else {
        None
    };
    let top = values.len() - 1;
    let scaled = explicit.as_ref().map(|e| {
        let c = values[top] / e[top];
        e.iter().map(|v| v * c).collect::<Vec<f64>>()
    });
    let mut headers = vec!["t_embedding", "phi_value", "quadrature_kind", "depth_or_samples"];
    if scaled.is_some() {
        headers.push("phi_explicit_scaled");
    }
    let mut table = Table::new(&headers);
    for (t, i) in sorted_words(word_depth) {
        let mut row: Vec<Cell> = vec![t.into(), values[i].into(), q.label().into(), q.size().into()];
        if let Some(s) = &scaled {
            row.push(s[i].into());
        }
        table.push(row);
    }
    let spread = explicit.as_ref().map(|e| ratio_spread(&values, e));
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Artifact {
        table: Some(table),
        report: json!({
            "quadrature": q,
            "word_depth": word_depth,
            "min_value": min,
            "value_at_plus": values[top],
            "ratio_spread": spread,
        }),
        summary: format!("kernel-eigen: {} points, min value {min}", values.len()),
        violation: None,
    })
}

pub fn binary_grid(points: usize) -> Result<(Grid, Grid), CliError> {
    let g = Grid::uniform(points)?;
    let phi = binary::quadratic_eigen_guess();
    let c = binary::quadratic_eigen_constant();
    Ok((g.sample(|t| c * phi.eval(t)), phi.apply_on(&g)))
}

fn binary_model(points: usize, step: f64) -> Result<Artifact, CliError> {
    if !(step > 0.0 && step < 0.1) {
        return Err(CliError::Config(format!("--step must be in (0, 0.1), got {step}")));
    }
    let (c_phi, l_phi) = binary_grid(points)?;
    let mut table = Table::new(&["t", "c_phi", "l_phi"]);
    for i in 0..c_phi.len() {
        table.push(vec![c_phi.ts[i].into(), c_phi.values[i].into(), l_phi.values[i].into()]);
    }
    let cmp = binary::taylor_comparison(step);
    let ok = cmp.max_abs_diff <= 1e-6 && cmp.order_zero_defect <= 1e-12;
    let mut report = serde_json::to_value(&cmp)?;
    report["sup_diff_on_grid"] = json!(c_phi.sup_distance(&l_phi));
    Ok(Artifact {
        table: Some(table),
        report,
        summary: format!(
            "binary: Taylor max diff {:e}, order-0 defect {:e}",
            cmp.max_abs_diff, cmp.order_zero_defect
        ),
        violation: (!ok).then(|| "Taylor coefficients disagree".to_string()),
    })
}

fn class_check(p: &PotentialEval, depth: usize) -> Result<Artifact, CliError> {
    let class_e = match class_e_check_ising(p) {
        Ok(b) => Some(b),
        Err(ruelle_core::Error::NotIsingType) => None,
        Err(e) => return Err(e.into()),
    };
    let f = class_f_check(p, depth)?;
    let mirror_depth = p.range().min(12);
    let mirror = mirror_witness(p, mirror_depth)?;
    Ok(Artifact {
        table: None,
        report: json!({
            "class_E": class_e,
            "class_F": f.member,
            "class_F_depth": f.depth,
            "class_F_witness": f.witness,
            "mirrored": mirror.is_none(),
            "mirror_depth": mirror_depth,
            "mirror_witness": mirror.as_ref().map(|(w, t)| format!("{w}|{}", t.label())),
        }),
        summary: format!(
            "class-check: class_E {} class_F {} mirrored {}",
            class_e.map_or("n/a".to_string(), |b| b.to_string()),
            f.member,
            mirror.is_none()
        ),
        violation: None,
    })
}

/// `A` on all words of `depth` completed by `tail`, indexed by word.
pub fn potential_values(p: &PotentialEval, depth: usize, tail: &BoundaryTail) -> Result<Vec<f64>, CliError> {
    if depth > 20 {
        return Err(CliError::Config(format!("--depth {depth} exceeds 20")));
    }
    let len = depth.max(p.range());
    Ok((0..1u64 << depth)
        .map(|i| p.eval(&Configuration::new(&SpinWord::from_index(i, depth), tail.clone()).materialize(len)))
        .collect())
}

fn potential_graph(p: &PotentialEval, depth: usize, tail: &BoundaryTail) -> Result<Artifact, CliError> {
    let v = potential_values(p, depth, tail)?;
    let mut table = Table::new(&["t", "value"]);
    for (t, i) in sorted_words(depth) {
        table.push(vec![t.into(), v[i].into()]);
    }
    Ok(Artifact {
        table: Some(table),
        report: json!({ "depth": depth, "boundary": tail.label(), "tail_bound": p.tail_bound() }),
        summary: format!("potential-graph: {} points", v.len()),
        violation: None,
    })
}

fn measure(p: &PotentialEval, n: usize, tail: &BoundaryTail) -> Result<Artifact, CliError> {
    let m = gibbs::build_measure(p, n, tail)?;
    let mut table = Table::new(&["index", "word", "log_weight", "weight_normalized"]);
    for r in m.rows() {
        table.push(vec![
            r.index.into(),
            r.word.to_string().into(),
            r.log_weight.into(),
            r.weight_normalized.into(),
        ]);
    }
    Ok(Artifact {
        table: Some(table),
        report: json!({ "n": n, "boundary": tail.label(), "log_partition_function": m.log_partition_function() }),
        summary: format!("measure: n={n}, log Z = {}", m.log_partition_function()),
        violation: None,
    })
}

//! Fixed parameter sets for the simulation figures. Each figure is one CSV
//! whose columns are its curves over the `[-1, 1]` embedding.

use serde_json::json;

use ruelle_core::kernel::{CylinderBoundary, Quadrature};
use ruelle_core::transfer::{self, PowerOptions};
use ruelle_core::{BoundaryTail, CouplingSpec, PotentialEval, TabulatedFunction};

use crate::commands::{self, explicit_values, kernel_values, potential_values, ratio_spread, sorted_words};
use crate::error::CliError;
use crate::output::{Artifact, Cell, Table};

/// Couplings retained in the transfer-operator figures.
const K: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum FigureId {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

pub fn build(id: FigureId) -> Result<Artifact, CliError> {
    match id {
        FigureId::Fig1 => fig1(),
        FigureId::Fig2 => dyson_graphs("fig2", &[2.2, 2.0]),
        FigureId::Fig3 => dyson_graphs("fig3", &[1.88, 1.3]),
        FigureId::Fig4 => fig4(),
        FigureId::Fig5 => fig5(),
        FigureId::Fig7 => fig7(),
        FigureId::Fig8 => fig8(),
        FigureId::Fig9 => fig9(),
        FigureId::Fig10 => fig10(),
    }
}

fn dyson(gamma: f64) -> Result<PotentialEval, CliError> {
    Ok(PotentialEval::new(CouplingSpec::dyson(gamma, 1.0, 0.0, K))?)
}

fn product(gamma: f64, k: usize) -> Result<PotentialEval, CliError> {
    Ok(PotentialEval::new(CouplingSpec::product_power(gamma, 1.0, k))?)
}

fn columns(name: &str, depth: usize, cols: Vec<(String, Vec<f64>)>, report: serde_json::Value) -> Artifact {
    let mut headers = vec!["t".to_string()];
    headers.extend(cols.iter().map(|c| c.0.clone()));
    let mut table = Table {
        headers,
        rows: Vec::new(),
    };
    for (t, i) in sorted_words(depth) {
        let mut row: Vec<Cell> = vec![t.into()];
        row.extend(cols.iter().map(|c| Cell::F(c.1[i])));
        table.push(row);
    }
    Artifact {
        summary: format!("{name}: {} rows, {} curves", table.rows.len(), cols.len()),
        table: Some(table),
        report,
        violation: None,
    }
}

/// `z_n` at exact depth for each `n` in `ns`, with the spectral estimate of the last.
fn iterates(p: &PotentialEval, ns: &[usize]) -> Result<Vec<(usize, TabulatedFunction, f64)>, CliError> {
    ns.iter()
        .map(|&n| {
            let (est, z) = transfer::power_iterate(p, n, 1, PowerOptions::default())?;
            Ok((n, z, est.lambda))
        })
        .collect()
}

fn fig1() -> Result<Artifact, CliError> {
    let (c_phi, l_phi) = commands::binary_grid(ruelle_core::binary::DEFAULT_GRID_POINTS)?;
    let mut table = Table::new(&["t", "c_phi", "l_phi"]);
    for i in 0..c_phi.len() {
        table.push(vec![c_phi.ts[i].into(), c_phi.values[i].into(), l_phi.values[i].into()]);
    }
    Ok(Artifact {
        summary: format!("fig1: {} rows", table.rows.len()),
        table: Some(table),
        report: json!({ "figure": "fig1", "sup_diff": c_phi.sup_distance(&l_phi) }),
        violation: None,
    })
}

const GRAPH_DEPTH: usize = 12;

fn dyson_graphs(name: &str, gammas: &[f64]) -> Result<Artifact, CliError> {
    let cols = gammas
        .iter()
        .map(|&g| {
            Ok((
                format!("A_gamma_{g}"),
                potential_values(&dyson(g)?, GRAPH_DEPTH, &BoundaryTail::AllPlus)?,
            ))
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    Ok(columns(
        name,
        GRAPH_DEPTH,
        cols,
        json!({ "figure": name, "gammas": gammas, "K": K, "depth": GRAPH_DEPTH }),
    ))
}

fn fig4() -> Result<Artifact, CliError> {
    // a_j = 2^{1-j}
    let p = PotentialEval::new(CouplingSpec::product_geometric(0.5, 2.0, K))?;
    let (est, z) = transfer::power_iterate(&p, 7, 1, PowerOptions::default())?;
    let phi = explicit_values(&p, z.depth(), &BoundaryTail::AllPlus)?;
    let top = phi[phi.len() - 1];
    let phi: Vec<f64> = phi.iter().map(|v| v / top).collect();
    let spread = ratio_spread(z.values(), &phi);
    let depth = z.depth();
    Ok(columns(
        "fig4",
        depth,
        vec![("phi".into(), phi), ("z7".into(), z.into_values())],
        json!({ "figure": "fig4", "K": K, "lambda": est.lambda, "ratio_spread": spread }),
    ))
}

fn fig5() -> Result<Artifact, CliError> {
    let mut cols = Vec::new();
    let mut depth = 0;
    for (gamma, ns) in [(2.2, [3, 4]), (1.88, [5, 6])] {
        for (n, z, _) in iterates(&dyson(gamma)?, &ns)? {
            depth = z.depth();
            cols.push((format!("z{n}_gamma_{gamma}"), z.into_values()));
        }
    }
    Ok(columns("fig5", depth, cols, json!({ "figure": "fig5", "K": K })))
}

fn fig7() -> Result<Artifact, CliError> {
    let k = 37;
    let v = potential_values(&product(1.88, k)?, GRAPH_DEPTH, &BoundaryTail::AllPlus)?;
    Ok(columns(
        "fig7",
        GRAPH_DEPTH,
        vec![("A_gamma_1.88".into(), v)],
        json!({ "figure": "fig7", "K": k, "depth": GRAPH_DEPTH }),
    ))
}

fn fig8() -> Result<Artifact, CliError> {
    let p = product(1.88, K)?;
    let its = iterates(&p, &[3, 4, 5, 6])?;
    let depth = its[0].1.depth();
    let cols = its
        .into_iter()
        .map(|(n, z, _)| (format!("z{n}"), z.into_values()))
        .collect();
    Ok(columns("fig8", depth, cols, json!({ "figure": "fig8", "K": K })))
}

fn fig9() -> Result<Artifact, CliError> {
    let p = product(1.88, K)?;
    let (est, z) = transfer::power_iterate(&p, 6, 1, PowerOptions::default())?;
    let g = explicit_values(&p, z.depth(), &BoundaryTail::AllPlus)?;
    let top = g[g.len() - 1];
    let g: Vec<f64> = g.iter().map(|v| v / top).collect();
    let depth = z.depth();
    Ok(columns(
        "fig9",
        depth,
        vec![("z6".into(), z.into_values()), ("g".into(), g)],
        json!({ "figure": "fig9", "K": K, "lambda": est.lambda }),
    ))
}

const FIG10_WORD_DEPTH: usize = 8;

fn fig10() -> Result<Artifact, CliError> {
    let p = product(3.3, K)?;
    let tail = BoundaryTail::AllPlus;
    let explicit = explicit_values(&p, FIG10_WORD_DEPTH, &tail)?;
    let cyl = Quadrature::ExactCylinder {
        depth: 12,
        boundary: CylinderBoundary::Plus,
    };
    let mc = Quadrature::MonteCarlo {
        samples: 100_000,
        seed: 0,
    };
    let vc = kernel_values(&p, cyl, FIG10_WORD_DEPTH, &tail)?;
    let vm = kernel_values(&p, mc, FIG10_WORD_DEPTH, &tail)?;
    let report = json!({
        "figure": "fig10",
        "K": K,
        "quadratures": [cyl, mc],
        "ratio_spread_cylinder": ratio_spread(&vc, &explicit),
        "ratio_spread_monte_carlo": ratio_spread(&vm, &explicit),
    });
    Ok(columns(
        "fig10",
        FIG10_WORD_DEPTH,
        vec![
            ("phi_explicit".into(), explicit),
            ("kernel_cylinder".into(), vc),
            ("kernel_monte_carlo".into(), vm),
        ],
        report,
    ))
}

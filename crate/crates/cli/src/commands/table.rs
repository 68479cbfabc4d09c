use rayon::prelude::*;

use flowlab::analytic::lambda_of_sigma;
use flowlab::cheb::graph::solve_eigs;
use flowlab::transfer::find_eigenvalues;
use flowlab::FlowProblem;

use super::{check_n, Output};
use crate::args::{Solver, TableArgs};
use crate::error::{CellContext, CliResult};
use crate::format::{csv_line, fmt_g};
use crate::reference;

const SOLVERS: [Solver; 3] = [Solver::Analytic, Solver::Cheb, Solver::Shoot];

fn solver_name(s: Solver) -> &'static str {
    match s {
        Solver::Analytic => "analytic",
        Solver::Cheb => "cheb",
        Solver::Shoot => "shoot",
        Solver::All => "all",
    }
}

/// `lambda_1..lambda_n` of the canonical problem from one solver.
pub fn eigenvalues(solver: Solver, n: usize, sigma: f64, points: usize) -> CliResult<Vec<f64>> {
    let cell = || format!("cell (n={n}, sigma={}, solver={})", fmt_g(sigma), solver_name(solver));
    match solver {
        Solver::Analytic => (1..=n).map(|m| lambda_of_sigma(n, m, sigma).cell(cell)).collect(),
        Solver::Cheb => {
            let p = FlowProblem::canonical(n, sigma).cell(cell)?;
            Ok(solve_eigs(&p, points, n).cell(cell)?.iter().map(|e| e.lambda).collect())
        }
        Solver::Shoot => {
            let p = FlowProblem::canonical(n, sigma).cell(cell)?;
            find_eigenvalues(&p, n).cell(cell)
        }
        Solver::All => unreachable!("expanded by the caller"),
    }
}

fn solvers(s: Solver) -> Vec<Solver> {
    if s == Solver::All {
        SOLVERS.to_vec()
    } else {
        vec![s]
    }
}

/// `values[sigma][solver][m - 1]`, cells evaluated in parallel.
pub fn table_values(n: usize, sigmas: &[f64], solver: Solver, points: usize) -> CliResult<Vec<Vec<Vec<f64>>>> {
    check_n(n)?;
    let list = solvers(solver);
    sigmas
        .par_iter()
        .map(|&s| list.iter().map(|&sv| eigenvalues(sv, n, s, points)).collect())
        .collect()
}

fn max_rel_dev(values: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for (i, a) in values.iter().enumerate() {
        for b in &values[i + 1..] {
            worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE));
        }
    }
    worst
}

pub fn run(args: &TableArgs) -> CliResult<Output> {
    let values = table_values(args.n, &args.sigmas, args.solver, args.points)?;
    if args.check {
        return Ok(check(args, &values));
    }
    let list = solvers(args.solver);
    let mut header = vec!["m".to_string()];
    for s in &args.sigmas {
        if list.len() == 1 {
            header.push(format!("sigma={}", fmt_g(*s)));
        } else {
            for sv in &list {
                header.push(format!("{} sigma={}", solver_name(*sv), fmt_g(*s)));
            }
            header.push(format!("max_rel_dev sigma={}", fmt_g(*s)));
        }
    }
    let mut body = csv_line(&header);
    for m in 1..=args.n {
        let mut row = vec![m.to_string()];
        for col in &values {
            let cell: Vec<f64> = col.iter().map(|v| v[m - 1]).collect();
            row.extend(cell.iter().map(|v| fmt_g(*v)));
            if list.len() > 1 {
                row.push(fmt_g(max_rel_dev(&cell)));
            }
        }
        body.push_str(&csv_line(&row));
    }
    Ok(Output::new(body))
}

/// Comparison against the published tables, one row per available cell.
fn check(args: &TableArgs, values: &[Vec<Vec<f64>>]) -> Output {
    let n = args.n;
    let list = solvers(args.solver);
    let mut out = Output::new(csv_line([
        "m", "sigma", "solver", "computed", "reference", "abs_diff", "tolerance", "status",
    ]));
    let mut failures = 0;
    for (col, &sigma) in values.iter().zip(&args.sigmas) {
        for m in 1..=n {
            let Some(printed) = reference::printed(n, m, sigma) else {
                continue;
            };
            let typo = reference::is_typo_cell(n, m, sigma);
            let formula = lambda_of_sigma(n, m, sigma).unwrap_or(f64::NAN);
            for (sv, v) in list.iter().zip(col) {
                let computed = v[m - 1];
                let (expected, tol, pass_label) = if typo {
                    (formula, 1e-7 * formula, "paper-discrepancy: expected-from-formula")
                } else {
                    (printed, reference::TABLE_TOL, "pass")
                };
                let diff = (computed - expected).abs();
                let status = if diff <= tol {
                    pass_label
                } else {
                    failures += 1;
                    "fail"
                };
                out.body.push_str(&csv_line([
                    m.to_string(),
                    fmt_g(sigma),
                    solver_name(*sv).to_string(),
                    fmt_g(computed),
                    fmt_g(expected),
                    fmt_g(diff),
                    fmt_g(tol),
                    status.to_string(),
                ]));
            }
            if typo {
                out.notes.push(format!(
                    "note: n={n} m={m} sigma={}: the published table prints {printed}, above the ceiling n^2 pi^2 = {}; \
                     the implicit-equation value {} is reported instead",
                    fmt_g(sigma),
                    fmt_g((n * n) as f64 * std::f64::consts::PI.powi(2)),
                    fmt_g(formula)
                ));
            }
        }
    }
    if out.body.lines().count() == 1 {
        out.notes.push(format!("note: no published values for n={n} at the requested sigmas"));
    }
    if failures > 0 {
        out.failure = Some(format!("{failures} table cells outside tolerance"));
    }
    out
}

use flowlab::analytic::{coefficients, eval_u};
use flowlab::cheb::graph::{eval_collocation, solve_eigs};
use flowlab::{ChebGrid, FlowProblem};

use super::{check_n, Output};
use crate::args::{PlotArgs, PlotSolver};
use crate::error::{CellContext, CliError, CliResult};
use crate::format::fmt_g;
use crate::svg::LinePlot;

/// `(lambda, [(x, u(x))])` at uniform points, scaled to unit sup norm.
pub fn samples(args: &PlotArgs) -> CliResult<(f64, Vec<(f64, f64)>)> {
    let (n, m) = (args.n, args.m);
    check_n(n)?;
    if m < 1 || m > n {
        return Err(CliError::Usage(format!("--m {m} must lie in 1..={n}")));
    }
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let cell = || format!("plot (n={n}, m={m}, sigma={})", fmt_g(args.sigma));
    let xs: Vec<f64> = (0..args.points).map(|i| i as f64 / (args.points - 1) as f64).collect();
    let (lambda, us) = match args.solver {
        PlotSolver::Analytic => {
            let pair = coefficients(n, m, args.sigma).cell(cell)?;
            let us = xs.iter().map(|&x| eval_u(&pair, x)).collect::<flowlab::Result<Vec<_>>>().cell(cell)?;
            (pair.lambda(), us)
        }
        PlotSolver::Cheb => {
            let problem = FlowProblem::canonical(n, args.sigma).cell(cell)?;
            let pairs = solve_eigs(&problem, args.cheb_points, m).cell(cell)?;
            let grid = ChebGrid::new(&problem, args.cheb_points).cell(cell)?;
            let pair = &pairs[m - 1];
            let us = xs
                .iter()
                .map(|&x| eval_collocation(pair, &grid, x))
                .collect::<flowlab::Result<Vec<_>>>()
                .cell(cell)?;
            (pair.lambda, us)
        }
    };
    let sup = us.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let scale = if sup > 0.0 { sup } else { 1.0 };
    Ok((lambda, xs.into_iter().zip(us.into_iter().map(|u| u / scale)).collect()))
}

pub fn run(args: &PlotArgs) -> CliResult<Output> {
    let (lambda, points) = samples(args)?;
    let solver = match args.solver {
        PlotSolver::Analytic => "analytic",
        PlotSolver::Cheb => "cheb",
    };
    let title = format!(
        "u_{},{}(x; sigma = {}), lambda = {:.4}",
        args.m,
        args.n,
        fmt_g(args.sigma),
        lambda
    );
    let svg = LinePlot {
        title: &title,
        x_label: "x",
        y_label: "u (unit sup-norm)",
        metadata: vec![
            ("solver", solver.to_string()),
            ("n", args.n.to_string()),
            ("m", args.m.to_string()),
            ("sigma", fmt_g(args.sigma)),
            ("lambda", fmt_g(lambda)),
            ("normalization", "unit sup-norm over the sample points".to_string()),
            ("points", args.points.to_string()),
        ],
        points: &points,
    }
    .render();
    Ok(Output::new(svg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::OutputArgs;

    fn args(n: usize, m: usize, sigma: f64, solver: PlotSolver) -> PlotArgs {
        PlotArgs {
            n,
            m,
            sigma,
            points: 97,
            solver,
            cheb_points: 32,
            output: OutputArgs::default(),
        }
    }

    #[test]
    fn unperturbed_top_mode_is_a_sine() {
        for solver in [PlotSolver::Analytic, PlotSolver::Cheb] {
            let (lambda, pts) = samples(&args(3, 3, 0.0, solver)).unwrap();
            assert!((lambda - 9.0 * std::f64::consts::PI.powi(2)).abs() < 1e-9);
            for (x, u) in pts {
                assert!((u - (3.0 * std::f64::consts::PI * x).sin()).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn svg_carries_metadata() {
        let out = run(&args(2, 1, 1e7, PlotSolver::Analytic)).unwrap();
        assert!(out.body.contains("viewBox"));
        assert!(out.body.contains("solver=analytic"));
        assert!(out.body.contains("normalization=unit sup-norm"));
        assert!(run(&args(2, 3, 1.0, PlotSolver::Analytic)).is_err());
    }
}

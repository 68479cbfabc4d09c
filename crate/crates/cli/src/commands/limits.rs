use flowlab::cheb::graph::diff_metrics;
use flowlab::FlowProblem;

use super::{check_n, Output};
use crate::args::LimitsArgs;
use crate::error::{CellContext, CliResult};
use crate::format::{csv_line, fmt_g};

/// CSV with columns `matrix,m,I_1..I_n`: rows of `M_thm` and the scaled
/// `M_norm` for `m = 1..n-1`, then `diff_val` and `diff_vec` in column 3.
pub fn run(args: &LimitsArgs) -> CliResult<Output> {
    let n = args.n;
    check_n(n)?;
    let cell = || format!("limits (n={n}, sigma={}, N={})", fmt_g(args.sigma), args.points);
    let problem = FlowProblem::canonical(n, args.sigma).cell(cell)?;
    let d = diff_metrics(&problem, args.points).cell(cell)?;

    let width = n + 2;
    let pad = |mut row: Vec<String>| {
        row.resize(width, String::new());
        csv_line(row)
    };
    let mut header = vec!["matrix".to_string(), "m".to_string()];
    header.extend((1..=n).map(|k| format!("I_{k}")));
    let mut body = csv_line(header);
    for (name, matrix) in [("M_thm", &d.theory), ("M_norm", &d.normalized)] {
        for m in 1..n {
            let mut row = vec![name.to_string(), m.to_string()];
            row.extend(matrix.row(m).iter().map(|v| fmt_g(*v)));
            body.push_str(&csv_line(row));
        }
    }
    body.push_str(&pad(vec!["diff_val".into(), String::new(), fmt_g(d.diff_val)]));
    body.push_str(&pad(vec![
        "diff_vec".into(),
        String::new(),
        d.diff_vec.map_or("not-applicable".into(), fmt_g),
    ]));
    Ok(Output::new(body))
}

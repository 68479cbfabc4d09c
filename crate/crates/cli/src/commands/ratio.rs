use flowlab::transfer::ratio_curve;
use flowlab::PiecewisePotential;

use super::Output;
use crate::args::{Potential, RatioArgs};
use crate::error::{CellContext, CliResult};
use crate::format::{csv_line, fmt_g};
use crate::svg::LinePlot;

/// Deviation allowed for the flat-potential ratio.
pub const FLAT_TOL: f64 = 1e-10;

pub fn background(p: Potential) -> PiecewisePotential {
    match p {
        Potential::Flat => PiecewisePotential::zero(),
        Potential::Step => PiecewisePotential::indicator(0.0, 0.5, 20.0).expect("valid indicator"),
    }
}

/// `(max - min) / min |.|` of a list.
pub fn relative_spread(values: &[f64]) -> f64 {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let floor = values.iter().fold(f64::INFINITY, |a, v| a.min(v.abs()));
    (hi - lo) / floor
}

pub fn run(args: &RatioArgs) -> CliResult<Output> {
    let name = match args.potential {
        Potential::Flat => "flat",
        Potential::Step => "step",
    };
    let ratios = ratio_curve(&background(args.potential), args.m, &args.sigmas)
        .cell(|| format!("ratio (potential={name}, m={})", args.m))?;
    let svg = args
        .output
        .out
        .as_ref()
        .is_some_and(|p| p.extension().is_some_and(|e| e.eq_ignore_ascii_case("svg")));
    let body = if svg {
        let points: Vec<(f64, f64)> = args.sigmas.iter().copied().zip(ratios.iter().copied()).collect();
        LinePlot {
            title: &format!("u_{0}(x_1; sigma) / u_{0}(x_2; sigma), {name} potential", args.m),
            x_label: "sigma",
            y_label: "ratio",
            metadata: vec![
                ("potential", name.to_string()),
                ("m", args.m.to_string()),
                ("solver", "shoot".to_string()),
            ],
            points: &points,
        }
        .render()
    } else {
        let mut body = csv_line(["sigma", "ratio"]);
        for (s, r) in args.sigmas.iter().zip(&ratios) {
            body.push_str(&csv_line([fmt_g(*s), fmt_g(*r)]));
        }
        body
    };
    let mut out = Output::new(body);
    match args.potential {
        Potential::Flat => {
            let first = ratios.first().copied().unwrap_or(f64::NAN);
            let dev = ratios.iter().fold(0.0f64, |a, r| a.max((r - first).abs()));
            out.notes.push(format!(
                "flat potential: ratio {} constant to {} (tolerance {})",
                fmt_g(first),
                fmt_g(dev),
                fmt_g(FLAT_TOL)
            ));
            if !(dev <= FLAT_TOL) {
                out.failure = Some(format!("flat-potential ratio varies by {}", fmt_g(dev)));
            }
        }
        Potential::Step => out.notes.push(format!(
            "step potential: relative spread {} over {} sigma values",
            fmt_g(relative_spread(&ratios)),
            ratios.len()
        )),
    }
    Ok(out)
}

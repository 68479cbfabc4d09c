//! Chebyshev collocation on the path quantum graph.
//!
//! This module holds the one-interval building blocks on the reference
//! interval [-1, 1] (second-kind points in ascending order, barycentric
//! weights, differentiation and resampling matrices, Clenshaw-Curtis
//! weights). [`graph`] stitches them into the vertex-coupled eigenproblem.

pub mod graph;

use std::f64::consts::PI;

use nalgebra::DMatrix;

use crate::error::{FlowError, Result};

/// `N` Chebyshev points of the second kind, ascending: `-cos(j pi / (N-1))`.
///
/// Computed through the symmetric sine form so that `-1`, `0`, `1` come out
/// exactly and the set is exactly symmetric about 0.
pub fn chebyshev_points(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(FlowError::domain(format!("need at least 2 Chebyshev points, got {n}")));
    }
    let m = (n - 1) as f64;
    Ok((0..n)
        .map(|j| {
            let k = 2.0 * j as f64 - m;
            if k == 0.0 {
                0.0
            } else {
                (PI * k / (2.0 * m)).sin()
            }
        })
        .collect())
}

/// `N` Chebyshev points of the first kind, ascending: `-cos((2j+1) pi / 2N)`.
/// None of them is an endpoint.
pub fn chebyshev_points_first_kind(n: usize) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(FlowError::domain("need at least 1 first-kind point"));
    }
    let nf = n as f64;
    Ok((0..n)
        .map(|j| {
            let k = (2 * j + 1) as f64 - nf;
            if k == 0.0 {
                0.0
            } else {
                (PI * k / (2.0 * nf)).sin()
            }
        })
        .collect())
}

/// Barycentric weights for the second-kind points (up to a common factor).
pub fn barycentric_weights(n: usize) -> Vec<f64> {
    (0..n)
        .map(|j| {
            let w = if j % 2 == 0 { 1.0 } else { -1.0 };
            if j == 0 || j == n - 1 {
                0.5 * w
            } else {
                w
            }
        })
        .collect()
}

/// First-derivative collocation matrix on [-1, 1], exact for polynomials of
/// degree `<= N-1`. Diagonal entries use the negative-sum form so each row
/// annihilates constants.
pub fn differentiation_matrix(n: usize) -> Result<DMatrix<f64>> {
    let x = chebyshev_points(n)?;
    let w = barycentric_weights(n);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = (w[j] / w[i]) / (x[i] - x[j]);
                d[(i, j)] = v;
                diag -= v;
            }
        }
        d[(i, i)] = diag;
    }
    Ok(d)
}

/// Barycentric interpolation matrix from `nodes` (with `weights`) to `targets`.
pub fn interpolation_matrix(nodes: &[f64], weights: &[f64], targets: &[f64]) -> DMatrix<f64> {
    let mut p = DMatrix::zeros(targets.len(), nodes.len());
    for (i, &t) in targets.iter().enumerate() {
        if let Some(j) = nodes.iter().position(|&x| x == t) {
            p[(i, j)] = 1.0;
            continue;
        }
        let mut total = 0.0;
        for (j, (&x, &w)) in nodes.iter().zip(weights).enumerate() {
            let c = w / (t - x);
            p[(i, j)] = c;
            total += c;
        }
        for j in 0..nodes.len() {
            p[(i, j)] /= total;
        }
    }
    p
}

/// Maps values at `from` Chebyshev points to the values of the same
/// interpolant at `to` Chebyshev points.
pub fn resampling_matrix(from: usize, to: usize) -> Result<DMatrix<f64>> {
    if to < 2 || to > from {
        return Err(FlowError::domain(format!(
            "resampling needs 2 <= N_to <= N_from, got N_from = {from}, N_to = {to}"
        )));
    }
    let src = chebyshev_points(from)?;
    let dst = chebyshev_points(to)?;
    Ok(interpolation_matrix(&src, &barycentric_weights(from), &dst))
}

/// Values at `from` second-kind points to values of the same interpolant at
/// `to` first-kind points. The collocation rows are imposed there, so no row
/// sits on an edge endpoint where the vertex conditions already act.
pub fn downsampling_matrix(from: usize, to: usize) -> Result<DMatrix<f64>> {
    if to < 1 || to > from {
        return Err(FlowError::domain(format!(
            "downsampling needs 1 <= N_to <= N_from, got N_from = {from}, N_to = {to}"
        )));
    }
    let src = chebyshev_points(from)?;
    let dst = chebyshev_points_first_kind(to)?;
    Ok(interpolation_matrix(&src, &barycentric_weights(from), &dst))
}

/// Clenshaw-Curtis weights for the `N` second-kind points on [-1, 1].
pub fn clenshaw_curtis_weights(n: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(FlowError::domain(format!("need at least 2 quadrature points, got {n}")));
    }
    let deg = n - 1;
    let degf = deg as f64;
    let mut w = vec![0.0; n];
    let mut interior = vec![1.0; deg.saturating_sub(1)];
    let theta = |j: usize| PI * j as f64 / degf;
    if deg.is_multiple_of(2) {
        let end = 1.0 / (degf * degf - 1.0);
        w[0] = end;
        w[deg] = end;
        for k in 1..deg / 2 {
            let kf = k as f64;
            for (i, v) in interior.iter_mut().enumerate() {
                *v -= 2.0 * (2.0 * kf * theta(i + 1)).cos() / (4.0 * kf * kf - 1.0);
            }
        }
        for (i, v) in interior.iter_mut().enumerate() {
            *v -= (degf * theta(i + 1)).cos() / (degf * degf - 1.0);
        }
    } else {
        let end = 1.0 / (degf * degf);
        w[0] = end;
        w[deg] = end;
        for k in 1..=(deg - 1) / 2 {
            let kf = k as f64;
            for (i, v) in interior.iter_mut().enumerate() {
                *v -= 2.0 * (2.0 * kf * theta(i + 1)).cos() / (4.0 * kf * kf - 1.0);
            }
        }
    }
    for (i, v) in interior.into_iter().enumerate() {
        w[i + 1] = 2.0 * v / degf;
    }
    Ok(w)
}

/// Barycentric evaluation of the interpolant through `(nodes, values)` at `t`.
pub fn barycentric_eval(nodes: &[f64], weights: &[f64], values: &[f64], t: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for ((&x, &w), &v) in nodes.iter().zip(weights).zip(values) {
        if x == t {
            return v;
        }
        let c = w / (t - x);
        num += c * v;
        den += c;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use nalgebra::DVector;

    #[test]
    fn point_examples() {
        assert_eq!(chebyshev_points(2).unwrap(), vec![-1.0, 1.0]);
        assert_eq!(chebyshev_points(3).unwrap(), vec![-1.0, 0.0, 1.0]);
        let p = chebyshev_points(5).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        for (got, want) in p.iter().zip([-1.0, -s, 0.0, s, 1.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 2e-16);
        }
        assert!(chebyshev_points(1).is_err());
    }

    #[test]
    fn points_are_symmetric_and_ascending() {
        for n in 2..40 {
            let p = chebyshev_points(n).unwrap();
            assert!(p.windows(2).all(|w| w[0] < w[1]));
            for j in 0..n {
                assert_eq!(p[j], -p[n - 1 - j]);
            }
        }
    }

    #[test]
    fn derivative_exact_on_low_degree() {
        for n in [2, 5, 9, 17] {
            let x = DVector::from_vec(chebyshev_points(n).unwrap());
            let d = differentiation_matrix(n).unwrap();
            let ones = &d * &x;
            for v in ones.iter() {
                assert_abs_diff_eq!(*v, 1.0, epsilon = 1e-12);
            }
            for i in 0..n {
                assert_abs_diff_eq!(d.row(i).sum(), 0.0, epsilon = 1e-12);
            }
        }
        let x = DVector::from_vec(chebyshev_points(5).unwrap());
        let d = differentiation_matrix(5).unwrap();
        let sq = x.map(|t| t * t);
        let got = &d * &sq;
        for (g, t) in got.iter().zip(x.iter()) {
            assert_abs_diff_eq!(*g, 2.0 * t, epsilon = 1e-12);
        }
    }

    #[test]
    fn second_derivative_of_sine() {
        let n = 30;
        let x = DVector::from_vec(chebyshev_points(n).unwrap());
        let d = differentiation_matrix(n).unwrap();
        let got = &d * (&d * x.map(f64::sin));
        let err = got
            .iter()
            .zip(x.iter())
            .map(|(g, t)| (g + t.sin()).abs())
            .fold(0.0, f64::max);
        // measured floor ~3e-12 for N = 30
        assert!(err < 1e-10, "err = {err:e}");
    }

    #[test]
    fn resampling_examples() {
        let id = resampling_matrix(7, 7).unwrap();
        assert_eq!(id, DMatrix::identity(7, 7));
        for (from, to) in [(10, 4), (16, 14), (33, 2)] {
            let r = resampling_matrix(from, to).unwrap();
            let out = &r * DVector::from_element(from, 3.5);
            for v in out.iter() {
                assert_abs_diff_eq!(*v, 3.5, epsilon = 1e-13);
            }
        }
        let src = chebyshev_points(8).unwrap();
        let dst = chebyshev_points(6).unwrap();
        let r = resampling_matrix(8, 6).unwrap();
        let out = &r * DVector::from_iterator(8, src.iter().map(|t| t * t * t));
        for (got, t) in out.iter().zip(&dst) {
            assert_abs_diff_eq!(*got, t * t * t, epsilon = 1e-13);
        }
        assert!(resampling_matrix(5, 6).is_err());
        assert!(resampling_matrix(5, 1).is_err());
    }

    #[test]
    fn first_kind_points_and_downsampling() {
        let p = chebyshev_points_first_kind(3).unwrap();
        assert_abs_diff_eq!(p[0], -(3f64).sqrt() / 2.0, epsilon = 2e-16);
        assert_eq!(p[1], 0.0);
        assert_eq!(p[0], -p[2]);
        let src = chebyshev_points(9).unwrap();
        let dst = chebyshev_points_first_kind(7).unwrap();
        let r = downsampling_matrix(9, 7).unwrap();
        let out = &r * DVector::from_iterator(9, src.iter().map(|t| t.powi(8)));
        for (got, t) in out.iter().zip(&dst) {
            assert_abs_diff_eq!(*got, t.powi(8), epsilon = 1e-13);
        }
        assert!(downsampling_matrix(5, 6).is_err());
    }

    #[test]
    fn clenshaw_curtis_integrates_polynomials() {
        for n in [2, 3, 8, 9, 32] {
            let x = chebyshev_points(n).unwrap();
            let w = clenshaw_curtis_weights(n).unwrap();
            assert_abs_diff_eq!(w.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
            if n >= 3 {
                let q: f64 = x.iter().zip(&w).map(|(t, w)| w * t * t).sum();
                assert_abs_diff_eq!(q, 2.0 / 3.0, epsilon = 1e-14);
            }
        }
        let n = 32;
        let x = chebyshev_points(n).unwrap();
        let w = clenshaw_curtis_weights(n).unwrap();
        let q: f64 = x.iter().zip(&w).map(|(t, w)| w * t.exp()).sum();
        assert_abs_diff_eq!(q, 1f64.exp() - (-1f64).exp(), epsilon = 1e-14);
    }

    #[test]
    fn barycentric_reproduces_nodes_and_interpolates() {
        let x = chebyshev_points(24).unwrap();
        let w = barycentric_weights(24);
        let v: Vec<f64> = x.iter().map(|t| (2.0 * t).sin()).collect();
        assert_eq!(barycentric_eval(&x, &w, &v, x[5]), v[5]);
        assert_abs_diff_eq!(barycentric_eval(&x, &w, &v, 0.3), 0.6f64.sin(), epsilon = 1e-14);
    }
}

//! Closed-form spectral flow for V = 0 with delta vertices at `k / n`.
//!
//! For `1 <= m < n` the eigenvalue `lambda_m(sigma) = gamma^2` is the unique
//! `gamma` in `[m pi, n pi)` with
//!
//! ```text
//! sigma = 2 gamma (cos(m pi / n) - cos(gamma / n)) / sin(gamma / n),
//! ```
//!
//! and the eigenfunction is a sum of translated sines with coefficients
//! `A_1 = 2 cos(m pi / n) - 2 cos(gamma / n)`,
//! `A_k = sin(k m pi / n) / sin(m pi / n) * A_1`.
//! The right-hand side above is strictly increasing in `gamma` with a pole at
//! `n pi`, so bisection on `gamma` always brackets the root.
//!
//! Everything near the pole is evaluated through the compensated gap
//! `n pi - gamma`, which keeps full relative precision up to sigma ~ 1e9.

use std::f64::consts::PI;

use crate::error::{FlowError, Result};
use crate::problem::AnalyticEigenpair;
use crate::roots::bisect_increasing;

/// `pi - fl(pi)`.
const PI_LO: f64 = 1.224_646_799_147_353_2e-16;

/// `j pi - x` with `j pi` carried in two doubles.
fn pi_multiple_minus(j: usize, x: f64) -> f64 {
    let j = j as f64;
    let hi = j * PI;
    let lo = j.mul_add(PI, -hi) + j * PI_LO;
    (hi - x) + lo
}

/// `sin(p pi / q)` with exact argument reduction; exact zeros and ones.
pub(crate) fn sin_pi_frac(p: i64, q: i64) -> f64 {
    debug_assert!(q > 0);
    let mut r = p.rem_euclid(2 * q);
    let mut sign = 1.0;
    if r >= q {
        r -= q;
        sign = -1.0;
    }
    if 2 * r > q {
        r = q - r;
    }
    if r == 0 {
        return 0.0;
    }
    if 2 * r == q {
        return sign;
    }
    sign * (PI * r as f64 / q as f64).sin()
}

/// `cos(p pi / q)` as `sin((q + 2p) pi / 2q)`.
pub(crate) fn cos_pi_frac(p: i64, q: i64) -> f64 {
    sin_pi_frac(q + 2 * p, 2 * q)
}

fn check_indices(n: usize, m: usize, allow_top: bool) -> Result<()> {
    if n < 2 {
        return Err(FlowError::domain(format!("n = {n} must be at least 2")));
    }
    let top = if allow_top { n } else { n - 1 };
    if m < 1 || m > top {
        return Err(FlowError::domain(format!("m = {m} must lie in 1..={top} for n = {n}")));
    }
    Ok(())
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma >= 0.0 {
        Ok(())
    } else {
        Err(FlowError::domain(format!("sigma = {sigma} must be finite and nonnegative")))
    }
}

/// `n pi - gamma`, accurate to a few ulps of the result.
pub fn pole_gap(n: usize, gamma: f64) -> f64 {
    pi_multiple_minus(n, gamma)
}

/// `A_1 = 2 cos(m pi/n) - 2 cos(gamma/n)` in product form.
fn leading_coefficient(n: usize, m: usize, gamma: f64) -> f64 {
    let above = -pi_multiple_minus(m, gamma);
    let mean = gamma + m as f64 * PI;
    let two_n = 2.0 * n as f64;
    4.0 * (mean / two_n).sin() * (above / two_n).sin()
}

/// `sin(gamma / n)` via the gap to the pole.
fn sin_gamma_over_n(n: usize, gamma: f64) -> f64 {
    (pole_gap(n, gamma) / n as f64).sin()
}

fn sigma_unchecked(n: usize, m: usize, gamma: f64) -> f64 {
    let s = gamma * leading_coefficient(n, m, gamma) / sin_gamma_over_n(n, gamma);
    s.max(0.0)
}

/// Right-hand side of the implicit eigenvalue equation.
pub fn sigma_of_gamma(n: usize, m: usize, gamma: f64) -> Result<f64> {
    check_indices(n, m, false)?;
    let lo = m as f64 * PI;
    let hi = n as f64 * PI;
    if !(gamma >= lo && gamma < hi) {
        return Err(FlowError::domain(format!(
            "gamma = {gamma} outside [{lo}, {hi}) for (n, m) = ({n}, {m})"
        )));
    }
    Ok(sigma_unchecked(n, m, gamma))
}

/// Inverse of [`sigma_of_gamma`]. `m = n` gives `n pi` for every sigma.
///
/// The bracket is bisected down to adjacent floats; the endpoint whose sigma
/// is closer to the target is returned.
pub fn gamma_of_sigma(n: usize, m: usize, sigma: f64) -> Result<f64> {
    check_indices(n, m, true)?;
    check_sigma(sigma)?;
    if m == n {
        return Ok(n as f64 * PI);
    }
    let lo = m as f64 * PI;
    if sigma == 0.0 {
        return Ok(lo);
    }
    let width = 1e-15 * n as f64 * PI;
    let start = lo + width;
    let end = n as f64 * PI - width;
    let f = |g: f64| sigma_unchecked(n, m, g);
    if f(end) < sigma {
        // beyond what a double can resolve next to the pole
        return Ok(end);
    }
    if f(start) >= sigma {
        return Ok(if sigma - f(lo) <= f(start) - sigma { lo } else { start });
    }
    let (a, b) = bisect_increasing(f, start, end, sigma);
    Ok(if sigma - f(a) <= f(b) - sigma { a } else { b })
}

/// `lambda_m(sigma)`; `m = n` is the constant `n^2 pi^2`.
pub fn lambda_of_sigma(n: usize, m: usize, sigma: f64) -> Result<f64> {
    let g = gamma_of_sigma(n, m, sigma)?;
    Ok(g * g)
}

/// Eigenpair in the `u'(0) = gamma` normalisation.
pub fn coefficients(n: usize, m: usize, sigma: f64) -> Result<AnalyticEigenpair> {
    let gamma = gamma_of_sigma(n, m, sigma)?;
    let coeffs = if m == n {
        vec![0.0; n - 1]
    } else {
        let a1 = leading_coefficient(n, m, gamma);
        let base = sin_pi_frac(m as i64, n as i64);
        (1..n)
            .map(|k| sin_pi_frac((k * m) as i64, n as i64) / base * a1)
            .collect()
    };
    Ok(AnalyticEigenpair {
        n,
        m,
        sigma,
        gamma,
        coeffs,
    })
}

/// `(u, u')` using the formula of edge `edge` (0-based), evaluated at `x`
/// (which may be an endpoint of that edge).
pub fn eval_on_edge(pair: &AnalyticEigenpair, edge: usize, x: f64) -> (f64, f64) {
    let g = pair.gamma;
    let n = pair.n as f64;
    let mut u = (g * x).sin();
    let mut du = g * (g * x).cos();
    for (j, a) in pair.coeffs.iter().take(edge).enumerate() {
        let shift = x - (j + 1) as f64 / n;
        u += a * (g * shift).sin();
        du += a * g * (g * shift).cos();
    }
    (u, du)
}

fn edge_index(n: usize, x: f64) -> usize {
    // left edge wins at shared nodes
    let scaled = x * n as f64;
    let k = scaled.ceil() as usize;
    k.clamp(1, n) - 1
}

pub fn eval_u(pair: &AnalyticEigenpair, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(FlowError::domain(format!("x = {x} outside [0, 1]")));
    }
    Ok(eval_on_edge(pair, edge_index(pair.n, x), x).0)
}

/// `u_m(x_k; sigma)` for `k = 1..n-1` from the node-value formula.
pub fn node_values(n: usize, m: usize, sigma: f64) -> Result<Vec<f64>> {
    check_indices(n, m, true)?;
    if m == n {
        check_sigma(sigma)?;
        return Ok(vec![0.0; n - 1]);
    }
    let gamma = gamma_of_sigma(n, m, sigma)?;
    let scale = sin_gamma_over_n(n, gamma) / sin_pi_frac(m as i64, n as i64);
    Ok((1..n)
        .map(|k| scale * sin_pi_frac((k * m) as i64, n as i64))
        .collect())
}

/// `F_k = int_{I_k} u_m sin(n pi x) dx` for `k = 1..n` from the node values.
pub fn interval_integrals(n: usize, m: usize, sigma: f64) -> Result<Vec<f64>> {
    check_indices(n, m, false)?;
    let gamma = gamma_of_sigma(n, m, sigma)?;
    let gap = pole_gap(n, gamma);
    let denom = gap * (n as f64 * PI + gamma);
    if denom.abs() < 1e-12 {
        return Err(FlowError::numeric(format!(
            "n^2 pi^2 - lambda = {denom:e} too small for (n, m, sigma) = ({n}, {m}, {sigma})"
        )));
    }
    let interior = node_values(n, m, sigma)?;
    let node = |k: usize| if k == 0 || k == n { 0.0 } else { interior[k - 1] };
    let npi = n as f64 * PI;
    Ok((1..=n)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            npi * sign * (node(k) + node(k - 1)) / denom
        })
        .collect())
}

/// `B_{k,m} = (-1)^{k+1} sin((2k-1) m pi / 2n)`, the `sigma -> infinity`
/// amplitudes of `sin(n pi x)` on each subinterval.
pub fn limit_vector(n: usize, m: usize) -> Result<Vec<f64>> {
    check_indices(n, m, true)?;
    Ok((1..=n)
        .map(|k| {
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            sign * sin_pi_frac(((2 * k - 1) * m) as i64, 2 * n as i64)
        })
        .collect())
}

/// Alternating partial sums `1 + sum_{j<k} (-1)^j A_j` of the limiting
/// coefficients; proportional to [`limit_vector`].
pub fn limit_eigenfunction_coeffs(n: usize, m: usize) -> Result<Vec<f64>> {
    check_indices(n, m, true)?;
    if m == n {
        return Ok(vec![1.0; n]);
    }
    let a1 = 2.0 * cos_pi_frac(m as i64, n as i64) + 2.0;
    let base = sin_pi_frac(m as i64, n as i64);
    let mut out = Vec::with_capacity(n);
    let mut acc = 1.0;
    out.push(acc);
    for j in 1..n {
        let a = sin_pi_frac((j * m) as i64, n as i64) / base * a1;
        acc += if j % 2 == 1 { -a } else { a };
        out.push(acc);
    }
    Ok(out)
}

/// Rows `m = 1..n` of `lambda_m(sigma)` over the given sigmas.
pub fn eigenvalue_table(n: usize, sigmas: &[f64]) -> Result<Vec<Vec<f64>>> {
    (1..=n)
        .map(|m| sigmas.iter().map(|&s| lambda_of_sigma(n, m, s)).collect())
        .collect()
}

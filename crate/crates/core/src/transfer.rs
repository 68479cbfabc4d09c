//! Shooting solver for piecewise-constant potentials with delta vertices.
//!
//! `(u, u')` is propagated from `(0, 1)` at `x = 0` with closed-form 2x2
//! transfer matrices on each constant piece and unimodular jump matrices at
//! the vertices. Eigenvalues are the zeros of `u(1; lambda)`. A Prüfer-type
//! zero count (number of interior zeros of `u(.; lambda)` equals the number
//! of eigenvalues below `lambda`) isolates each root before the final
//! sign-change bisection, so clustered eigenvalues are never skipped.

use std::f64::consts::PI;

use nalgebra::Matrix2;

use crate::error::{FlowError, Result};
use crate::problem::{FlowProblem, PiecewisePotential};
use crate::roots::bisect_sign;

/// `(u, u')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingState {
    pub u: f64,
    pub du: f64,
}

impl ShootingState {
    pub fn dirichlet_start() -> Self {
        ShootingState { u: 0.0, du: 1.0 }
    }

    fn apply(self, t: &Matrix2<f64>) -> Self {
        ShootingState {
            u: t[(0, 0)] * self.u + t[(0, 1)] * self.du,
            du: t[(1, 0)] * self.u + t[(1, 1)] * self.du,
        }
    }

    fn rescaled(self) -> Self {
        let s = self.u.abs().max(self.du.abs());
        if s > 0.0 && s.is_finite() {
            ShootingState {
                u: self.u / s,
                du: self.du / s,
            }
        } else {
            self
        }
    }
}

/// `(cos(wL), sin(wL)/w)` for `w^2 = w2`, continued through `w2 <= 0`.
fn cos_sinc(w2: f64, len: f64) -> (f64, f64) {
    let z = w2 * len * len;
    if z.abs() < 1e-8 {
        // |wL| < 1e-4
        let c = 1.0 - z / 2.0 + z * z / 24.0;
        let s = len * (1.0 - z / 6.0 + z * z / 120.0);
        (c, s)
    } else if w2 > 0.0 {
        let w = w2.sqrt();
        ((w * len).cos(), (w * len).sin() / w)
    } else {
        let k = (-w2).sqrt();
        ((k * len).cosh(), (k * len).sinh() / k)
    }
}

/// Propagator of `(u, u')` across a segment of length `len` where
/// `-u'' + v u = lambda u`.
pub fn segment_transfer(lambda: f64, v: f64, len: f64) -> Matrix2<f64> {
    let w2 = lambda - v;
    let (c, s) = cos_sinc(w2, len);
    Matrix2::new(c, s, -w2 * s, c)
}

/// Continuity of `u`, derivative jump `sigma u`.
pub fn vertex_jump(sigma: f64, u: f64, du: f64) -> (f64, f64) {
    (u, du + sigma * u)
}

pub fn jump_matrix(sigma: f64) -> Matrix2<f64> {
    Matrix2::new(1.0, 0.0, sigma, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Step {
    Piece { start: f64, end: f64, v: f64 },
    Vertex,
}

/// Constant pieces and vertices from left to right. Potential breakpoints
/// inside an edge simply split it into more pieces.
fn steps(problem: &FlowProblem) -> Vec<Step> {
    let mut out = Vec::new();
    for k in 0..problem.n() {
        if k > 0 {
            out.push(Step::Vertex);
        }
        let (a, b) = problem.edge(k);
        let pieces = problem.potential().pieces_on(a, b);
        if let [(_, _, v)] = pieces[..] {
            // single piece: use the exact edge length so equal edges stay equal
            out.push(Step::Piece { start: a, end: a + problem.edge_length(k), v });
        } else {
            for (start, end, v) in pieces {
                out.push(Step::Piece { start, end, v });
            }
        }
    }
    out
}

/// Product of every transfer and jump matrix from 0 to 1.
pub fn monodromy(problem: &FlowProblem, lambda: f64) -> Matrix2<f64> {
    let sigma = problem.sigma();
    steps(problem).into_iter().fold(Matrix2::identity(), |acc, step| match step {
        Step::Piece { start, end, v } => segment_transfer(lambda, v, end - start) * acc,
        Step::Vertex => jump_matrix(sigma) * acc,
    })
}

/// `(u(x), u'(x))` of the solution started at `(0, 1)`. At a vertex the
/// state before the jump is returned.
pub fn eval_shooting_state(problem: &FlowProblem, lambda: f64, x: f64) -> Result<ShootingState> {
    if !(0.0..=1.0).contains(&x) {
        return Err(FlowError::domain(format!("x = {x} outside [0, 1]")));
    }
    let sigma = problem.sigma();
    let mut state = ShootingState::dirichlet_start();
    for step in steps(problem) {
        match step {
            Step::Piece { start, end, v } => {
                if x <= end {
                    return Ok(state.apply(&segment_transfer(lambda, v, x - start)));
                }
                state = state.apply(&segment_transfer(lambda, v, end - start));
            }
            Step::Vertex => {
                let (u, du) = vertex_jump(sigma, state.u, state.du);
                state = ShootingState { u, du };
            }
        }
    }
    Ok(state)
}

pub fn eval_shooting_solution(problem: &FlowProblem, lambda: f64, x: f64) -> Result<f64> {
    Ok(eval_shooting_state(problem, lambda, x)?.u)
}

/// `u(1; lambda)`; its zeros are the eigenvalues.
pub fn shoot(problem: &FlowProblem, lambda: f64) -> f64 {
    let m = monodromy(problem, lambda);
    m[(0, 1)]
}

/// Number of zeros of `u(.; lambda)` in the open interval (0, 1).
///
/// Tracks the zero count as a sector index `j` (the Prüfer angle lies in
/// `[j pi, (j+1) pi)`) plus the state itself. Oscillatory pieces advance the
/// scaled angle by exactly `w L`; monotone pieces cross zero at most once.
pub fn zero_count(problem: &FlowProblem, lambda: f64) -> usize {
    let sigma = problem.sigma();
    let mut state = ShootingState::dirichlet_start();
    let mut sector: usize = 0;
    let mut at_zero = true;
    for step in steps(problem) {
        match step {
            Step::Vertex => {
                let (u, du) = vertex_jump(sigma, state.u, state.du);
                state = ShootingState { u, du };
            }
            Step::Piece { start, end, v } => {
                let len = end - start;
                let w2 = lambda - v;
                let parity = if sector.is_multiple_of(2) { 1.0 } else { -1.0 };
                let next = state.apply(&segment_transfer(lambda, v, len)).rescaled();
                if w2 > 0.0 {
                    let w = w2.sqrt();
                    let mut alpha = (parity * state.u).atan2(parity * state.du / w);
                    if at_zero || alpha < 0.0 && alpha > -0.5 * PI {
                        alpha = 0.0;
                    } else if alpha <= -0.5 * PI {
                        alpha = PI;
                    }
                    let phase = alpha + w * len;
                    let turns = (phase / PI).floor();
                    sector += turns as usize;
                    at_zero = phase == turns * PI;
                } else {
                    let expected = if at_zero { parity * state.du } else { parity * state.u };
                    if next.u == 0.0 {
                        sector += 1;
                        at_zero = true;
                    } else {
                        if next.u * expected < 0.0 {
                            sector += 1;
                        }
                        at_zero = false;
                    }
                }
                state = next;
            }
        }
    }
    if at_zero {
        sector.saturating_sub(1)
    } else {
        sector
    }
}

/// The `k` smallest eigenvalues, ascending, each to `1e-10 (1 + lambda)` or
/// better.
pub fn find_eigenvalues(problem: &FlowProblem, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(FlowError::domain("need K >= 1"));
    }
    let ceiling = 1e4 * k as f64;
    let step = PI * PI / 4.0;
    let mut a = problem.potential().min_value() - 1.0;
    let mut count_a = zero_count(problem, a);
    if count_a != 0 {
        return Err(FlowError::numeric(format!(
            "{count_a} eigenvalues reported below the potential minimum"
        )));
    }
    let mut out = Vec::with_capacity(k);
    while out.len() < k {
        if a > ceiling {
            return Err(FlowError::numeric(format!(
                "only {} of {k} eigenvalues below lambda = {ceiling}",
                out.len()
            )));
        }
        let b = a + step;
        let count_b = zero_count(problem, b);
        for index in count_a + 1..=count_b.min(k) {
            out.push(isolate(problem, index, a, b));
        }
        a = b;
        count_a = count_b;
    }
    Ok(out)
}

/// Eigenvalue number `index` (1-based) inside `(a, b]`.
fn isolate(problem: &FlowProblem, index: usize, mut a: f64, mut b: f64) -> f64 {
    // shrink until the bracket holds exactly this eigenvalue
    for _ in 0..crate::roots::MAX_BISECTIONS {
        let ca = zero_count(problem, a);
        let cb = zero_count(problem, b);
        let mid = a + 0.5 * (b - a);
        if (ca + 1 == index && cb == index) || mid <= a || mid >= b {
            break;
        }
        if zero_count(problem, mid) >= index {
            b = mid;
        } else {
            a = mid;
        }
    }
    let (fa, fb) = (shoot(problem, a), shoot(problem, b));
    if fa == 0.0 || fb == 0.0 || fa.signum() != fb.signum() {
        return bisect_sign(|l| shoot(problem, l), a, b, 0.0);
    }
    // no usable sign change at this resolution; finish on the count alone
    let (lo, hi) = crate::roots::bisect_increasing(|l| zero_count(problem, l) as f64, a, b, index as f64);
    lo + 0.5 * (hi - lo)
}

/// Interior zeros of the shooting solution at `lambda`, from a 4096-point
/// sign scan refined by bisection.
pub fn find_zeros(problem: &FlowProblem, lambda: f64) -> Result<Vec<f64>> {
    const GRID: usize = 4096;
    let u = |x: f64| eval_shooting_solution(problem, lambda, x).expect("x stays inside [0, 1]");
    let xs: Vec<f64> = (0..GRID).map(|i| i as f64 / (GRID - 1) as f64).collect();
    let us: Vec<f64> = xs.iter().map(|&x| u(x)).collect();
    let mut zeros = Vec::new();
    // the last cell ends at x = 1, where u vanishes up to the error in lambda
    for i in 0..GRID - 2 {
        if i > 0 && us[i] == 0.0 {
            zeros.push(xs[i]);
        } else if us[i] * us[i + 1] < 0.0 {
            zeros.push(bisect_sign(u, xs[i], xs[i + 1], 0.0));
        }
    }
    Ok(zeros)
}

/// `c_W = int_0^1 W(t) sin(m pi (1 - t)) dt`, exact on each constant piece.
pub fn perturbation_constant(w: &PiecewisePotential, m: usize) -> f64 {
    let freq = m as f64 * PI;
    w.integrate_against(|t| (freq * (1.0 - t)).cos() / freq)
}

/// Spectral flow generated by the `n`-th eigenfunction of `-d^2 + V`:
/// delta vertices at its interior zeros.
#[derive(Debug, Clone)]
pub struct NodalFlow {
    potential: PiecewisePotential,
    n: usize,
    lambda_n: f64,
    nodes: Vec<f64>,
    slopes: Vec<f64>,
}

impl NodalFlow {
    pub fn new(potential: PiecewisePotential, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(FlowError::domain(format!("n = {n} must be at least 2")));
        }
        let base = FlowProblem::with_potential(potential.clone(), vec![0.0, 1.0], 0.0)?;
        let lambda_n = find_eigenvalues(&base, n)?[n - 1];
        let zeros = find_zeros(&base, lambda_n)?;
        if zeros.len() != n - 1 {
            return Err(FlowError::numeric(format!(
                "eigenfunction {n} has {} interior zeros, expected {}",
                zeros.len(),
                n - 1
            )));
        }
        let mut nodes = Vec::with_capacity(n + 1);
        nodes.push(0.0);
        nodes.extend(zeros);
        nodes.push(1.0);
        let slopes = nodes
            .iter()
            .map(|&x| eval_shooting_state(&base, lambda_n, x).map(|s| s.du))
            .collect::<Result<_>>()?;
        Ok(NodalFlow {
            potential,
            n,
            lambda_n,
            nodes,
            slopes,
        })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn lambda_n(&self) -> f64 {
        self.lambda_n
    }

    pub fn problem(&self, sigma: f64) -> Result<FlowProblem> {
        FlowProblem::with_potential(self.potential.clone(), self.nodes.clone(), sigma)
    }

    /// `(lambda_m(sigma), u_m at the interior nodes)` with `u'(0) = 1`.
    pub fn node_values(&self, m: usize, sigma: f64) -> Result<(f64, Vec<f64>)> {
        if m < 1 || m > self.n {
            return Err(FlowError::domain(format!("m = {m} must lie in 1..={}", self.n)));
        }
        let problem = self.problem(sigma)?;
        let lambda = find_eigenvalues(&problem, m)?[m - 1];
        let values = self.nodes[1..self.n]
            .iter()
            .map(|&x| eval_shooting_solution(&problem, lambda, x))
            .collect::<Result<_>>()?;
        Ok((lambda, values))
    }

    /// `int_{I_k} u_m(.; sigma) u_n dx` for `k = 1..n` via the boundary-term
    /// identity, in the `u_m'(0) = 1`, `u_n'(0) = 1` normalisation.
    pub fn weighted_integrals(&self, m: usize, sigma: f64) -> Result<Vec<f64>> {
        let (lambda, interior) = self.node_values(m, sigma)?;
        let denom = self.lambda_n - lambda;
        if denom.abs() < 1e-12 {
            return Err(FlowError::numeric("lambda_m coincides with lambda_n"));
        }
        let u = |k: usize| if k == 0 || k == self.n { 0.0 } else { interior[k - 1] };
        Ok((1..=self.n)
            .map(|k| (-u(k) * self.slopes[k] + u(k - 1) * self.slopes[k - 1]) / denom)
            .collect())
    }
}

/// `u_m(x_1; sigma) / u_m(x_2; sigma)` along the flow generated by the third
/// eigenfunction of `-d^2 + V`.
pub fn ratio_curve(base_potential: &PiecewisePotential, m: usize, sigmas: &[f64]) -> Result<Vec<f64>> {
    if !(1..=2).contains(&m) {
        return Err(FlowError::domain(format!("m = {m} must be 1 or 2")));
    }
    let flow = NodalFlow::new(base_potential.clone(), 3)?;
    sigmas
        .iter()
        .map(|&sigma| {
            let (_, v) = flow.node_values(m, sigma)?;
            if v[1].abs() < 1e-13 {
                return Err(FlowError::numeric(format!(
                    "u_{m}(x_2) = {:e} too small to divide at sigma = {sigma}",
                    v[1]
                )));
            }
            Ok(v[0] / v[1])
        })
        .collect()
}

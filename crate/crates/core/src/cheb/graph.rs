//! Rectangular collocation of `-u'' + V u = lambda u` on the path graph.
//!
//! Each edge carries `N` Chebyshev values. The differential operator is
//! applied edge-wise and resampled down to `N - 2` points, which leaves
//! exactly `2n` rows for the vertex conditions: Dirichlet at both ends, plus
//! continuity and the derivative jump `u'(x+) - u'(x-) = sigma u(x)` at each
//! interior vertex. The constrained pencil is reduced to a standard dense
//! eigenproblem on an orthonormal basis of the constraint null space.

use nalgebra::{DMatrix, DVector};

use super::{
    barycentric_eval, barycentric_weights, chebyshev_points, clenshaw_curtis_weights,
    differentiation_matrix, downsampling_matrix,
};
use crate::analytic::limit_vector;
use crate::error::{FlowError, Result};
use crate::roots::bisect_sign;
use crate::problem::{AmplitudeMatrix, CollocationEigenpair, FlowProblem};

/// Points per edge used when the caller has no preference.
pub const DEFAULT_POINTS: usize = 32;
pub const MIN_POINTS: usize = 8;

const IMAG_TOL: f64 = 1e-8;
const RESIDUAL_TOL: f64 = 1e-8;

/// Per-edge mapped Chebyshev points.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebGrid {
    points_per_edge: usize,
    nodes: Vec<f64>,
    reference: Vec<f64>,
    weights: Vec<f64>,
    edge_points: Vec<Vec<f64>>,
}

impl ChebGrid {
    pub fn new(problem: &FlowProblem, points_per_edge: usize) -> Result<Self> {
        let reference = chebyshev_points(points_per_edge)?;
        let nodes = problem.nodes().to_vec();
        let edge_points = nodes
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let half = 0.5 * (b - a);
                let mut pts: Vec<f64> = reference.iter().map(|t| a + (t + 1.0) * half).collect();
                pts[0] = a;
                *pts.last_mut().unwrap() = b;
                pts
            })
            .collect();
        Ok(ChebGrid {
            points_per_edge,
            nodes,
            weights: barycentric_weights(points_per_edge),
            reference,
            edge_points,
        })
    }

    pub fn points_per_edge(&self) -> usize {
        self.points_per_edge
    }

    pub fn edges(&self) -> usize {
        self.edge_points.len()
    }

    pub fn edge_points(&self, k: usize) -> &[f64] {
        &self.edge_points[k]
    }

    fn edge_of(&self, x: f64) -> usize {
        let idx = self.nodes.partition_point(|node| *node < x);
        idx.saturating_sub(1).min(self.edges() - 1)
    }
}

/// Stacked unknown layout: edge-major, point-minor.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub edges: usize,
    pub points_per_edge: usize,
}

impl Layout {
    pub fn index(&self, edge: usize, point: usize) -> usize {
        edge * self.points_per_edge + point
    }

    pub fn unknowns(&self) -> usize {
        self.edges * self.points_per_edge
    }
}

/// The rectangular pencil `interior_operator u = lambda interior_mass u`
/// subject to `constraint_rows u = 0`.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub interior_operator: DMatrix<f64>,
    pub interior_mass: DMatrix<f64>,
    pub constraint_rows: DMatrix<f64>,
    pub layout: Layout,
    /// Per-edge physical first-derivative matrices.
    derivatives: Vec<DMatrix<f64>>,
}

#[derive(Debug, Clone, Copy)]
pub struct AssemblyOptions {
    /// Divide each jump row by `1 + sigma`.
    pub scale_jump_rows: bool,
}

impl Default for AssemblyOptions {
    fn default() -> Self {
        AssemblyOptions { scale_jump_rows: true }
    }
}

pub fn assemble(problem: &FlowProblem, points_per_edge: usize) -> Result<DiscreteSystem> {
    assemble_with(problem, points_per_edge, AssemblyOptions::default())
}

pub fn assemble_with(problem: &FlowProblem, points_per_edge: usize, opts: AssemblyOptions) -> Result<DiscreteSystem> {
    let np = points_per_edge;
    if np < MIN_POINTS {
        return Err(FlowError::domain(format!(
            "need at least {MIN_POINTS} points per edge, got {np}"
        )));
    }
    let edges = problem.n();
    let potentials = (0..edges)
        .map(|k| problem.edge_potential(k))
        .collect::<Result<Vec<_>>>()?;
    let layout = Layout {
        edges,
        points_per_edge: np,
    };
    let nr = np - 2;
    let d_ref = differentiation_matrix(np)?;
    let resample = downsampling_matrix(np, nr)?;

    let total = layout.unknowns();
    let mut op = DMatrix::zeros(edges * nr, total);
    let mut mass = DMatrix::zeros(edges * nr, total);
    let mut derivatives = Vec::with_capacity(edges);
    for (k, &v) in potentials.iter().enumerate() {
        let dx = &d_ref * (2.0 / problem.edge_length(k));
        let mut local = -(&dx * &dx);
        for i in 0..np {
            local[(i, i)] += v;
        }
        let block = &resample * &local;
        op.view_mut((k * nr, k * np), (nr, np)).copy_from(&block);
        mass.view_mut((k * nr, k * np), (nr, np)).copy_from(&resample);
        derivatives.push(dx);
    }

    let sigma = problem.sigma();
    let jump_scale = if opts.scale_jump_rows { 1.0 / (1.0 + sigma) } else { 1.0 };
    let mut c = DMatrix::zeros(2 * edges, total);
    c[(0, layout.index(0, 0))] = 1.0;
    for v in 1..edges {
        let left = v - 1;
        let row = 2 * v - 1;
        c[(row, layout.index(left, np - 1))] = 1.0;
        c[(row, layout.index(v, 0))] = -1.0;
        let row = 2 * v;
        for j in 0..np {
            c[(row, layout.index(v, j))] += jump_scale * derivatives[v][(0, j)];
            c[(row, layout.index(left, j))] -= jump_scale * derivatives[left][(np - 1, j)];
        }
        c[(row, layout.index(v, 0))] -= jump_scale * sigma;
    }
    c[(2 * edges - 1, layout.index(edges - 1, np - 1))] = 1.0;

    Ok(DiscreteSystem {
        interior_operator: op,
        interior_mass: mass,
        constraint_rows: c,
        layout,
        derivatives,
    })
}

impl DiscreteSystem {
    /// Orthonormal basis of `ker(constraint_rows)`, from a full QR of its transpose.
    pub fn null_space(&self) -> DMatrix<f64> {
        let total = self.layout.unknowns();
        let ncons = self.constraint_rows.nrows();
        let qr = self.constraint_rows.transpose().qr();
        let mut qt = DMatrix::identity(total, total);
        qr.q_tr_mul(&mut qt);
        qt.rows(ncons, total - ncons).transpose()
    }

    /// Derivative of the edge interpolant at its left (`at_end = false`) or
    /// right endpoint.
    fn endpoint_derivative(&self, values: &[f64], edge: usize, at_end: bool) -> f64 {
        let np = self.layout.points_per_edge;
        let row = if at_end { np - 1 } else { 0 };
        let d = &self.derivatives[edge];
        (0..np).map(|j| d[(row, j)] * values[j]).sum()
    }

    /// Largest vertex/boundary defect relative to the sup-norm, with jump
    /// defects divided by `1 + sigma`.
    pub fn condition_residual(&self, edge_values: &[Vec<f64>], sigma: f64) -> f64 {
        let n = self.layout.edges;
        let np = self.layout.points_per_edge;
        let sup = sup_norm(edge_values).max(f64::MIN_POSITIVE);
        let mut worst = edge_values[0][0].abs().max(edge_values[n - 1][np - 1].abs());
        for v in 1..n {
            let left = &edge_values[v - 1];
            let right = &edge_values[v];
            worst = worst.max((left[np - 1] - right[0]).abs());
            let u = 0.5 * (left[np - 1] + right[0]);
            let jump = self.endpoint_derivative(right, v, false) - self.endpoint_derivative(left, v - 1, true);
            worst = worst.max((jump - sigma * u).abs() / (1.0 + sigma));
        }
        worst / sup
    }

    /// One-sided derivatives `(u'(x_k-), u'(x_k+))` at interior vertex `k`.
    pub fn vertex_derivatives(&self, edge_values: &[Vec<f64>], k: usize) -> (f64, f64) {
        (
            self.endpoint_derivative(&edge_values[k - 1], k - 1, true),
            self.endpoint_derivative(&edge_values[k], k, false),
        )
    }
}

/// Sup norm of the piecewise interpolant, with interior extrema located by
/// bisecting the interpolated derivative.
fn interpolant_sup(edge_values: &[Vec<f64>], derivatives: &[DMatrix<f64>]) -> f64 {
    let np = edge_values[0].len();
    let t = chebyshev_points(np).expect("np >= MIN_POINTS");
    let w = barycentric_weights(np);
    let mut best = sup_norm(edge_values);
    for (values, d) in edge_values.iter().zip(derivatives) {
        let du: Vec<f64> = (0..np).map(|i| (0..np).map(|j| d[(i, j)] * values[j]).sum()).collect();
        for i in 0..np - 1 {
            if du[i] * du[i + 1] < 0.0 {
                let s = bisect_sign(|s| barycentric_eval(&t, &w, &du, s), t[i], t[i + 1], 0.0);
                best = best.max(barycentric_eval(&t, &w, values, s).abs());
            }
        }
    }
    best
}

fn sup_norm(edge_values: &[Vec<f64>]) -> f64 {
    edge_values
        .iter()
        .flat_map(|e| e.iter())
        .fold(0.0, |acc, v| acc.max(v.abs()))
}

fn describe(problem: &FlowProblem, np: usize) -> String {
    format!("(n, sigma, N) = ({}, {}, {np})", problem.n(), problem.sigma())
}

/// Compensated sum of products (Ogita-Rump-Oishi `Dot2`).
#[derive(Default)]
struct Acc {
    s: f64,
    c: f64,
}

impl Acc {
    fn add(&mut self, x: f64) {
        let s = self.s + x;
        let z = s - self.s;
        self.c += (self.s - (s - z)) + (x - z);
        self.s = s;
    }

    fn add_prod(&mut self, a: f64, b: f64) {
        let p = a * b;
        self.add(p);
        self.c += a.mul_add(b, -p);
    }

    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// Newton refinement of `(lambda, u)` on the bordered system
/// `[(A - lambda R) u; C u; u_i - u_i0] = 0`, residuals in doubled precision.
/// The vertex values of large-sigma eigenfunctions are `O(1/sigma)`, so the
/// dense solve alone loses their relative accuracy.
fn refine_pair(system: &DiscreteSystem, lambda: f64, u: DVector<f64>) -> (f64, DVector<f64>) {
    let a = &system.interior_operator;
    let r = &system.interior_mass;
    let c = &system.constraint_rows;
    let (rows, total) = (a.nrows(), a.ncols());
    let pin = u.iamax();
    let scale = u[pin];
    let mut u = u / scale;
    let mut lambda = lambda;
    let residual = |u: &DVector<f64>, lambda: f64| {
        let mut out = DVector::zeros(total + 1);
        for i in 0..rows {
            let mut acc = Acc::default();
            for j in 0..total {
                acc.add_prod(a[(i, j)], u[j]);
                let p = r[(i, j)] * u[j];
                acc.add_prod(-lambda, p);
                acc.add_prod(-lambda, r[(i, j)].mul_add(u[j], -p));
            }
            out[i] = acc.value();
        }
        for i in 0..c.nrows() {
            let mut acc = Acc::default();
            for j in 0..total {
                acc.add_prod(c[(i, j)], u[j]);
            }
            out[rows + i] = acc.value();
        }
        out[total] = u[pin] - 1.0;
        out
    };
    let mut best = residual(&u, lambda).amax();
    for _ in 0..4 {
        let ru = r * &u;
        let mut jac = DMatrix::zeros(total + 1, total + 1);
        jac.view_mut((0, 0), (rows, total)).copy_from(&(a - r * lambda));
        jac.view_mut((rows, 0), (c.nrows(), total)).copy_from(c);
        for i in 0..rows {
            jac[(i, total)] = -ru[i];
        }
        jac[(total, pin)] = 1.0;
        let Some(step) = jac.lu().solve(&residual(&u, lambda)) else {
            break;
        };
        let next_u = &u - step.rows(0, total);
        let next_lambda = lambda - step[total];
        let next = residual(&next_u, next_lambda).amax();
        if !(next < best) {
            break;
        }
        best = next;
        u = next_u;
        lambda = next_lambda;
    }
    (lambda, u)
}

/// Inverse iteration for the eigenvector of `m` closest to `lambda`.
fn inverse_iteration(m: &DMatrix<f64>, lambda: f64) -> Option<DVector<f64>> {
    let dim = m.nrows();
    let mut shift = lambda;
    let mut lu = None;
    for attempt in 0..4 {
        let mut shifted = m.clone();
        for i in 0..dim {
            shifted[(i, i)] -= shift;
        }
        let candidate = shifted.lu();
        if candidate.is_invertible() {
            lu = Some(candidate);
            break;
        }
        shift = lambda + (1.0 + lambda.abs()) * 1e-14 * 10f64.powi(attempt);
    }
    let lu = lu?;
    // deterministic, generic start vector
    let mut y = DVector::from_fn(dim, |i, _| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_749_895).fract());
    for _ in 0..3 {
        let next = lu.solve(&y)?;
        let norm = next.amax();
        if !(norm.is_finite() && norm > 0.0) {
            return None;
        }
        y = next / norm;
    }
    Some(y)
}

/// The `k` smallest eigenvalues and unit sup-norm eigenfunctions.
pub fn solve_eigs(problem: &FlowProblem, points_per_edge: usize, k: usize) -> Result<Vec<CollocationEigenpair>> {
    solve_system(problem, &assemble(problem, points_per_edge)?, k)
}

pub fn solve_system(problem: &FlowProblem, system: &DiscreteSystem, k: usize) -> Result<Vec<CollocationEigenpair>> {
    let layout = system.layout;
    let np = layout.points_per_edge;
    let dim = layout.edges * (np - 2);
    if k == 0 || k > dim {
        return Err(FlowError::domain(format!("K = {k} must lie in 1..={dim}")));
    }
    let z = system.null_space();
    let az = &system.interior_operator * &z;
    let rz = &system.interior_mass * &z;
    let reduced = rz
        .lu()
        .solve(&az)
        .ok_or_else(|| FlowError::numeric(format!("singular resampled mass for {}", describe(problem, np))))?;

    let schur = nalgebra::Schur::try_new(reduced.clone(), f64::EPSILON, 100 * dim).ok_or_else(|| {
        FlowError::numeric(format!("QR iteration did not converge for {}", describe(problem, np)))
    })?;
    let eigs = schur.complex_eigenvalues();
    let mut real: Vec<f64> = Vec::new();
    let mut complex_re: Vec<f64> = Vec::new();
    for e in eigs.iter() {
        if e.im.abs() < IMAG_TOL * (1.0 + e.re.abs()) {
            real.push(e.re);
        } else {
            complex_re.push(e.re);
        }
    }
    real.sort_by(f64::total_cmp);
    if real.len() < k {
        return Err(FlowError::numeric(format!(
            "only {} real eigenvalues, {k} requested, for {}",
            real.len(),
            describe(problem, np)
        )));
    }
    let ceiling = real[k - 1];
    if let Some(re) = complex_re.iter().find(|re| **re <= ceiling) {
        return Err(FlowError::numeric(format!(
            "complex eigenvalue with real part {re} among the lowest {k} for {}",
            describe(problem, np)
        )));
    }

    real.into_iter()
        .take(k)
        .map(|lambda| {
            let y = inverse_iteration(&reduced, lambda).ok_or_else(|| {
                FlowError::numeric(format!("eigenvector for lambda = {lambda} failed for {}", describe(problem, np)))
            })?;
            let (lambda, u) = refine_pair(system, lambda, &z * y);
            let mut edge_values: Vec<Vec<f64>> = (0..layout.edges)
                .map(|e| (0..np).map(|j| u[layout.index(e, j)]).collect())
                .collect();
            let slope = system.endpoint_derivative(&edge_values[0], 0, false);
            let scale = interpolant_sup(&edge_values, &system.derivatives) * if slope < 0.0 { -1.0 } else { 1.0 };
            for v in edge_values.iter_mut().flat_map(|e| e.iter_mut()) {
                *v /= scale;
            }
            let residual = system.condition_residual(&edge_values, problem.sigma());
            if !(residual < RESIDUAL_TOL) {
                return Err(FlowError::numeric(format!(
                    "vertex residual {residual:e} for lambda = {lambda} at {}",
                    describe(problem, np)
                )));
            }
            Ok(CollocationEigenpair {
                lambda,
                edge_values,
                residual,
            })
        })
        .collect()
}

/// Barycentric evaluation on the edge containing `x` (left edge at nodes).
pub fn eval_collocation(pair: &CollocationEigenpair, grid: &ChebGrid, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(FlowError::domain(format!("x = {x} outside [0, 1]")));
    }
    let k = grid.edge_of(x);
    Ok(eval_on_edge(pair, grid, k, x))
}

/// Evaluate edge `k`'s interpolant at `x`, which may be either endpoint.
pub fn eval_on_edge(pair: &CollocationEigenpair, grid: &ChebGrid, k: usize, x: f64) -> f64 {
    let (a, b) = (grid.nodes[k], grid.nodes[k + 1]);
    let t = if x == a {
        -1.0
    } else if x == b {
        1.0
    } else {
        2.0 * (x - a) / (b - a) - 1.0
    };
    barycentric_eval(&grid.reference, &grid.weights, &pair.edge_values[k], t)
}

/// `2n * int_{I_k} u_m sin(n pi x) dx` per eigenpair and edge, rows
/// sign-fixed so the first column is nonnegative.
pub fn amplitude_matrix(problem: &FlowProblem, pairs: &[CollocationEigenpair]) -> Result<AmplitudeMatrix> {
    if !problem.is_canonical() {
        return Err(FlowError::domain("amplitude matrix needs the canonical V = 0 problem"));
    }
    let n = problem.n();
    let np = pairs
        .first()
        .map(|p| p.edge_values[0].len())
        .ok_or_else(|| FlowError::domain("no eigenpairs supplied"))?;
    let grid = ChebGrid::new(problem, np)?;
    let cc = clenshaw_curtis_weights(np)?;
    let freq = n as f64 * std::f64::consts::PI;
    let entries = pairs
        .iter()
        .map(|pair| {
            let mut row: Vec<f64> = (0..n)
                .map(|k| {
                    let half = 0.5 * problem.edge_length(k);
                    let integral: f64 = grid
                        .edge_points(k)
                        .iter()
                        .zip(&pair.edge_values[k])
                        .zip(&cc)
                        .map(|((x, u), w)| w * u * (freq * x).sin())
                        .sum();
                    2.0 * n as f64 * half * integral
                })
                .collect();
            if row[0] < 0.0 {
                row.iter_mut().for_each(|v| *v = -*v);
            }
            row
        })
        .collect();
    Ok(AmplitudeMatrix { entries })
}

/// The limit amplitudes `B_{k,m}` as a matrix with rows `m = 1..n`.
pub fn theoretical_amplitudes(n: usize) -> Result<AmplitudeMatrix> {
    Ok(AmplitudeMatrix {
        entries: (1..=n).map(|m| limit_vector(n, m)).collect::<Result<_>>()?,
    })
}

/// `diff_val = lambda_n - lambda_1`; `diff_vec` is the largest entry of
/// `|alpha_m M_norm - M_thm|` after per-row least-squares scaling, absent at
/// sigma = 0 where no limit is being approached.
#[derive(Debug, Clone, PartialEq)]
pub struct DiffMetrics {
    pub diff_val: f64,
    pub diff_vec: Option<f64>,
    pub theory: AmplitudeMatrix,
    pub normalized: AmplitudeMatrix,
    pub eigenvalues: Vec<f64>,
}

pub fn diff_metrics(problem: &FlowProblem, points_per_edge: usize) -> Result<DiffMetrics> {
    let n = problem.n();
    let pairs = solve_eigs(problem, points_per_edge, n)?;
    let raw = amplitude_matrix(problem, &pairs)?;
    let theory = theoretical_amplitudes(n)?;
    let (normalized, _) = raw.fitted_to(&theory);
    let diff_vec = (problem.sigma() > 0.0).then(|| normalized.max_deviation(&theory));
    Ok(DiffMetrics {
        diff_val: pairs[n - 1].lambda - pairs[0].lambda,
        diff_vec,
        theory,
        normalized,
        eigenvalues: pairs.iter().map(|p| p.lambda).collect(),
    })
}

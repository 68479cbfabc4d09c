//! Reference computations that share no code with `flowlab`.
//!
//! * [`FemOracle`]: piecewise-linear finite elements with a lumped mass on a
//!   fine piecewise-uniform mesh, reduced to a symmetric tridiagonal matrix.
//!   Eigenvalues come from Sturm-sequence bisection, eigenvectors from
//!   shifted inverse iteration.
//! * [`gauss_legendre`] and [`integrate`]: composite Gauss-Legendre rules.

use std::f64::consts::PI;

/// `-u'' + V u + sum sigma delta(x - x_k) u = lambda u` on `[0, 1]` with
/// Dirichlet ends, discretised on a mesh that contains every node and
/// potential breakpoint.
pub struct FemOracle {
    x: Vec<f64>,
    mass: Vec<f64>,
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl FemOracle {
    /// `nodes`: delta positions in (0, 1). `pieces`: `(start, end, value)`
    /// covering [0, 1]. About `cells` cells in total.
    pub fn new(nodes: &[f64], sigma: f64, pieces: &[(f64, f64, f64)], cells: usize) -> Self {
        let mut marks: Vec<f64> = vec![0.0, 1.0];
        marks.extend(nodes.iter().copied().filter(|&x| x > 0.0 && x < 1.0));
        for &(a, b, _) in pieces {
            marks.push(a);
            marks.push(b);
        }
        marks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        marks.dedup_by(|a, b| (*a - *b).abs() < 1e-14);

        let mut x = vec![0.0];
        let mut cell_v = Vec::new();
        for w in marks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let count = ((b - a) * cells as f64).ceil().max(1.0) as usize;
            let mid = 0.5 * (a + b);
            let v = pieces
                .iter()
                .find(|&&(s, e, _)| s <= mid && mid <= e)
                .map(|p| p.2)
                .unwrap_or(0.0);
            for j in 1..=count {
                x.push(if j == count { b } else { a + (b - a) * j as f64 / count as f64 });
                cell_v.push(v);
            }
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let inner = x.len() - 2;
        let mut mass = vec![0.0; inner];
        let mut stiff = vec![0.0; inner];
        let mut coupling = vec![0.0; inner.saturating_sub(1)];
        for i in 0..inner {
            let (hl, hr) = (h[i], h[i + 1]);
            mass[i] = 0.5 * (hl + hr);
            stiff[i] = 1.0 / hl + 1.0 / hr + 0.5 * (hl * cell_v[i] + hr * cell_v[i + 1]);
            if i + 1 < inner {
                coupling[i] = -1.0 / hr;
            }
        }
        for &node in nodes {
            if let Some(i) = x[1..x.len() - 1].iter().position(|&t| (t - node).abs() < 1e-14) {
                stiff[i] += sigma;
            }
        }
        let diag = (0..inner).map(|i| stiff[i] / mass[i]).collect();
        let off = (0..coupling.len())
            .map(|i| coupling[i] / (mass[i] * mass[i + 1]).sqrt())
            .collect();
        FemOracle { x, mass, diag, off }
    }

    /// Delta nodes at `k/n` on a zero background.
    pub fn canonical(n: usize, sigma: f64, cells: usize) -> Self {
        let nodes: Vec<f64> = (1..n).map(|k| k as f64 / n as f64).collect();
        Self::new(&nodes, sigma, &[(0.0, 1.0, 0.0)], cells)
    }

    pub fn mesh(&self) -> &[f64] {
        &self.x
    }

    /// Number of eigenvalues strictly below `lambda`.
    pub fn count_below(&self, lambda: f64) -> usize {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..self.diag.len() {
            let e2 = if i == 0 { 0.0 } else { self.off[i - 1] * self.off[i - 1] };
            q = self.diag[i] - lambda - if i == 0 { 0.0 } else { e2 / q };
            if q == 0.0 {
                q = -1e-300;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Eigenvalue number `k` (1-based).
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let bound = self
            .diag
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let l = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let r = self.off.get(i).map_or(0.0, |e| e.abs());
                (d - l - r, d + l + r)
            })
            .fold((f64::MAX, f64::MIN), |acc, (a, b)| (acc.0.min(a), acc.1.max(b)));
        let (mut lo, mut hi) = bound;
        for _ in 0..200 {
            let mid = lo + 0.5 * (hi - lo);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) >= k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo + 0.5 * (hi - lo)
    }

    pub fn eigenvalues(&self, k: usize) -> Vec<f64> {
        (1..=k).map(|j| self.eigenvalue(j)).collect()
    }

    /// Mesh values of eigenfunction `k`, Dirichlet ends included, scaled to
    /// unit sup norm with positive slope at 0.
    pub fn eigenvector(&self, k: usize) -> Vec<f64> {
        let lambda = self.eigenvalue(k);
        let n = self.diag.len();
        let shift = lambda + 1e-12 * (1.0 + lambda.abs());
        let mut y: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i as f64) * 0.7).sin()).collect();
        for _ in 0..4 {
            y = solve_tridiagonal(&self.off, &self.diag, shift, &y);
            let s = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            y.iter_mut().for_each(|v| *v /= s);
        }
        let mut u = vec![0.0; n + 2];
        for i in 0..n {
            u[i + 1] = y[i] / self.mass[i].sqrt();
        }
        let s = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let sign = if u[1] < 0.0 { -1.0 } else { 1.0 };
        u.iter_mut().for_each(|v| *v *= sign / s);
        u
    }

    /// Linear interpolation of mesh values at `t`.
    pub fn interpolate(&self, values: &[f64], t: f64) -> f64 {
        let i = match self.x.binary_search_by(|p| p.partial_cmp(&t).unwrap()) {
            Ok(i) => return values[i],
            Err(i) => i.clamp(1, self.x.len() - 1),
        };
        let (a, b) = (self.x[i - 1], self.x[i]);
        values[i - 1] + (values[i] - values[i - 1]) * (t - a) / (b - a)
    }

    /// Interior sign changes of mesh values, located by linear interpolation.
    pub fn zeros(&self, values: &[f64]) -> Vec<f64> {
        let mut out = Vec::new();
        for i in 1..values.len() - 2 {
            let (a, b) = (values[i], values[i + 1]);
            if a == 0.0 {
                out.push(self.x[i]);
            } else if a * b < 0.0 {
                out.push(self.x[i] + (self.x[i + 1] - self.x[i]) * a / (a - b));
            }
        }
        out
    }
}

/// Solves `(T - shift I) y = rhs` for symmetric tridiagonal `T` by LU with
/// partial pivoting.
fn solve_tridiagonal(off: &[f64], diag: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut d: Vec<f64> = diag.iter().map(|v| v - shift).collect();
    let mut du: Vec<f64> = off.to_vec();
    let mut dl: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swap = vec![false; n];
    let mut b = rhs.to_vec();
    let tiny = 1e-300;
    for i in 0..n.saturating_sub(1) {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let f = dl[i] / d[i];
            dl[i] = f;
            d[i + 1] -= f * du[i];
        } else {
            swap[i] = true;
            let f = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = f;
            let t = du[i];
            du[i] = d[i + 1];
            d[i + 1] = t - f * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -f;
            }
        }
    }
    if d[n - 1] == 0.0 {
        d[n - 1] = tiny;
    }
    for i in 0..n.saturating_sub(1) {
        if swap[i] {
            b.swap(i, i + 1);
        }
        b[i + 1] -= dl[i] * b[i];
    }
    b[n - 1] /= d[n - 1];
    if n > 1 {
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
    }
    for i in (0..n.saturating_sub(2)).rev() {
        b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
    }
    b
}

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..order {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[order - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// Composite Gauss-Legendre integral of `f` over `[a, b]`.
pub fn integrate(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (t, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|p| {
            let lo = a + p as f64 * h;
            t.iter()
                .zip(&w)
                .map(|(t, w)| w * f(lo + 0.5 * h * (t + 1.0)))
                .sum::<f64>()
                * 0.5
                * h
        })
        .sum()
}

//! Domain types shared by every solver: the path graph on [0, 1], the
//! piecewise-constant background potential, and eigenpair representations.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};

/// Piecewise-constant potential on [0, 1].
///
/// `breakpoints` are the interior jump locations, strictly increasing inside
/// (0, 1); segment `i` spans `[b_{i-1}, b_i]` with `b_{-1} = 0` and the last
/// segment ending at 1, so `values.len() == breakpoints.len() + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawPotential", into = "RawPotential")]
pub struct PiecewisePotential {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawPotential {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<RawPotential> for PiecewisePotential {
    type Error = FlowError;

    fn try_from(raw: RawPotential) -> Result<Self> {
        PiecewisePotential::new(raw.breakpoints, raw.values)
    }
}

impl From<PiecewisePotential> for RawPotential {
    fn from(p: PiecewisePotential) -> Self {
        RawPotential {
            breakpoints: p.breakpoints,
            values: p.values,
        }
    }
}

impl PiecewisePotential {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if values.len() != breakpoints.len() + 1 {
            return Err(FlowError::domain(format!(
                "potential needs {} values for {} breakpoints, got {}",
                breakpoints.len() + 1,
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().any(|b| !(b.is_finite() && *b > 0.0 && *b < 1.0)) {
            return Err(FlowError::domain("potential breakpoints must lie inside (0, 1)"));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(FlowError::domain("potential breakpoints must be strictly increasing"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(FlowError::domain("potential values must be finite"));
        }
        Ok(PiecewisePotential { breakpoints, values })
    }

    /// V = 0.
    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn constant(value: f64) -> Self {
        PiecewisePotential {
            breakpoints: Vec::new(),
            values: vec![value],
        }
    }

    /// `height` on (left, right), zero elsewhere. Endpoints at 0 or 1 do not
    /// produce breakpoints.
    pub fn indicator(left: f64, right: f64, height: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&left) || !(0.0..=1.0).contains(&right) || left >= right {
            return Err(FlowError::domain(format!(
                "indicator interval ({left}, {right}) must be a nonempty subinterval of [0, 1]"
            )));
        }
        let mut breakpoints = Vec::new();
        let mut values = Vec::new();
        if left > 0.0 {
            breakpoints.push(left);
            values.push(0.0);
        }
        values.push(height);
        if right < 1.0 {
            breakpoints.push(right);
            values.push(0.0);
        }
        Self::new(breakpoints, values)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Same breakpoints, every value multiplied by `eps`.
    pub fn scaled(&self, eps: f64) -> Self {
        PiecewisePotential {
            breakpoints: self.breakpoints.clone(),
            values: self.values.iter().map(|v| v * eps).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| *v == 0.0)
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Value at `x`; at a breakpoint the left segment wins.
    pub fn value_at(&self, x: f64) -> f64 {
        let idx = self.breakpoints.partition_point(|b| *b < x);
        self.values[idx]
    }

    /// Constant pieces `(start, end, value)` covering `[a, b]`, in order.
    pub fn pieces_on(&self, a: f64, b: f64) -> Vec<(f64, f64, f64)> {
        let mut out = Vec::new();
        let mut start = a;
        for (i, &bp) in self.breakpoints.iter().enumerate() {
            if bp <= start {
                continue;
            }
            if bp >= b {
                break;
            }
            out.push((start, bp, self.values[i]));
            start = bp;
        }
        out.push((start, b, self.value_at(0.5 * (start + b))));
        out
    }

    /// The value on `[a, b]` if the potential is constant there.
    pub fn constant_on(&self, a: f64, b: f64) -> Option<f64> {
        let pieces = self.pieces_on(a, b);
        let v = pieces[0].2;
        pieces.iter().all(|p| p.2 == v).then_some(v)
    }

    /// Exact integral of the potential against `f` where `antiderivative`
    /// is a primitive of `f`.
    pub fn integrate_against(&self, antiderivative: impl Fn(f64) -> f64) -> f64 {
        self.pieces_on(0.0, 1.0)
            .into_iter()
            .map(|(a, b, v)| v * (antiderivative(b) - antiderivative(a)))
            .sum()
    }
}

/// A spectral-flow instance: `-u'' + V u + sigma * sum_k delta(x - x_k) u = lambda u`
/// on [0, 1] with Dirichlet ends and delta vertices at the interior nodes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProblem", into = "RawProblem")]
pub struct FlowProblem {
    n: usize,
    nodes: Vec<f64>,
    sigma: f64,
    potential: PiecewisePotential,
}

#[derive(Serialize, Deserialize)]
struct RawProblem {
    n: usize,
    nodes: Vec<f64>,
    sigma: f64,
    potential: PiecewisePotential,
}

impl TryFrom<RawProblem> for FlowProblem {
    type Error = FlowError;

    fn try_from(raw: RawProblem) -> Result<Self> {
        let p = FlowProblem::with_potential(raw.potential, raw.nodes, raw.sigma)?;
        if p.n != raw.n {
            return Err(FlowError::domain(format!(
                "n = {} does not match {} node positions",
                raw.n,
                p.nodes.len()
            )));
        }
        Ok(p)
    }
}

impl From<FlowProblem> for RawProblem {
    fn from(p: FlowProblem) -> Self {
        RawProblem {
            n: p.n,
            nodes: p.nodes,
            sigma: p.sigma,
            potential: p.potential,
        }
    }
}

impl FlowProblem {
    /// The V = 0 flow generated by `sin(n pi x)`: nodes at `k / n`.
    pub fn canonical(n: usize, sigma: f64) -> Result<Self> {
        if n < 2 {
            return Err(FlowError::domain(format!(
                "n = {n}: sin(n pi x) needs n >= 2 to have interior zeros"
            )));
        }
        check_sigma(sigma)?;
        let nodes = (0..=n).map(|k| k as f64 / n as f64).collect();
        Ok(FlowProblem {
            n,
            nodes,
            sigma,
            potential: PiecewisePotential::zero(),
        })
    }

    /// General flow with externally supplied nodes (e.g. zeros of an
    /// eigenfunction of `-d^2 + V`). A two-node list `(0, 1)` describes the
    /// bare operator without any delta vertex.
    pub fn with_potential(potential: PiecewisePotential, nodes: Vec<f64>, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        if nodes.len() < 2 {
            return Err(FlowError::domain("need at least the two endpoint nodes"));
        }
        if nodes[0] != 0.0 || *nodes.last().unwrap() != 1.0 {
            return Err(FlowError::domain("nodes must start at 0 and end at 1"));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(FlowError::domain("nodes must be strictly increasing"));
        }
        Ok(FlowProblem {
            n: nodes.len() - 1,
            nodes,
            sigma,
            potential,
        })
    }

    /// Same graph and potential with a different delta strength.
    pub fn with_sigma(&self, sigma: f64) -> Result<Self> {
        check_sigma(sigma)?;
        Ok(FlowProblem {
            sigma,
            ..self.clone()
        })
    }

    /// Number of edges.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn potential(&self) -> &PiecewisePotential {
        &self.potential
    }

    /// V = 0 and nodes exactly at `k / n`.
    pub fn is_canonical(&self) -> bool {
        self.n >= 2 && self.potential.is_zero() && self.has_uniform_nodes()
    }

    /// `(start, end)` of edge `k` (0-based).
    pub fn edge(&self, k: usize) -> (f64, f64) {
        (self.nodes[k], self.nodes[k + 1])
    }

    /// Length of edge `k`. Uniform node sets report exactly `1/n` for every
    /// edge so that all edges carry bit-identical discrete operators.
    pub fn edge_length(&self, k: usize) -> f64 {
        if self.has_uniform_nodes() {
            1.0 / self.n as f64
        } else {
            self.nodes[k + 1] - self.nodes[k]
        }
    }

    fn has_uniform_nodes(&self) -> bool {
        self.nodes
            .iter()
            .enumerate()
            .all(|(k, x)| *x == k as f64 / self.n as f64)
    }

    /// Index of the edge containing `x`; a shared node belongs to its left edge.
    pub fn edge_of(&self, x: f64) -> usize {
        let idx = self.nodes.partition_point(|node| *node < x);
        idx.saturating_sub(1).min(self.n - 1)
    }

    /// The edge potential, or a configuration error when a breakpoint with a
    /// genuine jump falls strictly inside the edge.
    pub fn edge_potential(&self, k: usize) -> Result<f64> {
        let (a, b) = self.edge(k);
        self.potential.constant_on(a, b).ok_or_else(|| {
            FlowError::config(format!(
                "potential jumps inside edge [{a}, {b}]; split the edge at the breakpoint"
            ))
        })
    }

    pub fn to_json(&self) -> String {
        crate::json::to_string(self)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| FlowError::domain(format!("invalid problem JSON: {e}")))
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma.is_finite() && sigma >= 0.0 {
        Ok(())
    } else {
        Err(FlowError::domain(format!("sigma = {sigma} must be finite and nonnegative")))
    }
}

/// Closed-form eigenpair of the canonical flow:
/// `u(x) = sin(gamma x) + sum_{j < k} coeffs[j-1] sin(gamma (x - j/n))` on edge `k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticEigenpair {
    pub n: usize,
    pub m: usize,
    pub sigma: f64,
    pub gamma: f64,
    pub coeffs: Vec<f64>,
}

impl AnalyticEigenpair {
    pub fn lambda(&self) -> f64 {
        self.gamma * self.gamma
    }
}

/// Eigenpair produced by the collocation solver. `edge_values[k]` holds the
/// values at the mapped Chebyshev points of edge `k`, normalised to unit
/// sup-norm with `u'(0) > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollocationEigenpair {
    pub lambda: f64,
    pub edge_values: Vec<Vec<f64>>,
    pub residual: f64,
}

/// Coefficients of `sin(n pi x)` per eigenfunction (rows, `m = 1..`) and
/// subinterval (columns, `k = 1..n`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeMatrix {
    pub entries: Vec<Vec<f64>>,
}

impl AmplitudeMatrix {
    pub fn rows(&self) -> usize {
        self.entries.len()
    }

    pub fn row(&self, m: usize) -> &[f64] {
        &self.entries[m - 1]
    }

    /// Rescale each row by the least-squares scalar that best matches the
    /// corresponding row of `target`. Returns the scaled matrix and the scalars.
    pub fn fitted_to(&self, target: &AmplitudeMatrix) -> (AmplitudeMatrix, Vec<f64>) {
        let mut alphas = Vec::with_capacity(self.rows());
        let entries = self
            .entries
            .iter()
            .zip(&target.entries)
            .map(|(row, t)| {
                let alpha = least_squares_scale(row, t);
                alphas.push(alpha);
                row.iter().map(|v| alpha * v).collect()
            })
            .collect();
        (AmplitudeMatrix { entries }, alphas)
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_deviation(&self, other: &AmplitudeMatrix) -> f64 {
        self.entries
            .iter()
            .zip(&other.entries)
            .flat_map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max)
    }
}

/// `alpha` minimising `|alpha * v - target|_2`.
pub fn least_squares_scale(v: &[f64], target: &[f64]) -> f64 {
    let num: f64 = v.iter().zip(target).map(|(a, b)| a * b).sum();
    let den: f64 = v.iter().map(|a| a * a).sum();
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

//! Gauss-Legendre rules, sphere quadrature and Richardson extrapolation.

use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes increasing.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess, then Newton on P_n.
        let mut x = libm::cos(PI * (i as f64 + 0.75) / (nf + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Sum in a fixed binary tree so that the result only depends on the order of
/// `values`, never on how they were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        2 => values[0] + values[1],
        n => {
            let (a, b) = values.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Maps an index range through a fallible function. Implementations may run
/// in parallel but must return the values in index order and, on failure,
/// the error of the lowest failing index.
pub trait Evaluator {
    fn evaluate(&self, n: usize, f: &(dyn Fn(usize) -> Result<f64> + Sync)) -> Result<Vec<f64>>;
}

/// In-order evaluation on the calling thread.
#[derive(Clone, Copy, Debug, Default)]
pub struct Sequential;

impl Evaluator for Sequential {
    fn evaluate(&self, n: usize, f: &(dyn Fn(usize) -> Result<f64> + Sync)) -> Result<Vec<f64>> {
        (0..n).map(f).collect()
    }
}

/// One node of a sphere rule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereNode {
    pub point: [f64; 3],
    /// Outward unit normal.
    pub normal: [f64; 3],
    /// Area weight.
    pub weight: f64,
}

/// Product rule on a round sphere: Gauss-Legendre in `cos theta` times the
/// trapezoid rule in `phi`. The Gauss nodes are interior, so no node sits on
/// the poles.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SphereQuadrature {
    pub center: [f64; 3],
    pub radius: f64,
    pub n_theta: usize,
    pub n_phi: usize,
}

impl SphereQuadrature {
    pub const DEFAULT_N_THETA: usize = 64;
    pub const DEFAULT_N_PHI: usize = 128;

    pub fn new(center: [f64; 3], radius: f64) -> Self {
        SphereQuadrature {
            center,
            radius,
            n_theta: Self::DEFAULT_N_THETA,
            n_phi: Self::DEFAULT_N_PHI,
        }
    }

    pub fn with_degree(mut self, n_theta: usize, n_phi: usize) -> Self {
        self.n_theta = n_theta;
        self.n_phi = n_phi;
        self
    }

    pub fn len(&self) -> usize {
        self.n_theta * self.n_phi
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Nodes in `theta`-major order. Weights sum to `4 pi R^2`.
    pub fn nodes(&self) -> Vec<SphereNode> {
        let (u, w) = gauss_legendre(self.n_theta);
        let dphi = 2.0 * PI / self.n_phi as f64;
        let r2 = self.radius * self.radius;
        let mut out = Vec::with_capacity(self.len());
        for (cos_t, wt) in u.iter().zip(&w) {
            let sin_t = libm::sqrt((1.0 - cos_t * cos_t).max(0.0));
            for j in 0..self.n_phi {
                // half-step offset keeps nodes off the phi = 0 half-plane
                let phi = (j as f64 + 0.5) * dphi;
                let n = [sin_t * libm::cos(phi), sin_t * libm::sin(phi), *cos_t];
                out.push(SphereNode {
                    point: [
                        self.center[0] + self.radius * n[0],
                        self.center[1] + self.radius * n[1],
                        self.center[2] + self.radius * n[2],
                    ],
                    normal: n,
                    weight: wt * dphi * r2,
                });
            }
        }
        out
    }
}

/// Weighted sum of node values, reduced pairwise in node order.
pub fn weighted_sum(nodes: &[SphereNode], values: &[f64]) -> f64 {
    let terms: Vec<f64> = nodes
        .iter()
        .zip(values)
        .map(|(n, v)| n.weight * v)
        .collect();
    pairwise_sum(&terms)
}

/// `int_S f dA`. A failing node is reported with its index and position.
pub fn integrate_sphere<F>(q: &SphereQuadrature, f: F) -> Result<f64>
where
    F: Fn(&SphereNode) -> Result<f64> + Sync,
{
    integrate_sphere_with(q, &Sequential, |_, node| f(node))
}

/// [`integrate_sphere`] with node evaluation delegated to `eval`; `f` also
/// receives the node index. The sum is the same bit for bit whatever the
/// evaluator.
pub fn integrate_sphere_with<E, F>(q: &SphereQuadrature, eval: &E, f: F) -> Result<f64>
where
    E: Evaluator + ?Sized,
    F: Fn(usize, &SphereNode) -> Result<f64> + Sync,
{
    let nodes = q.nodes();
    let values = eval.evaluate(nodes.len(), &|i| {
        let node = &nodes[i];
        f(i, node).map_err(|e| node_error(i, node, e))
    })?;
    Ok(weighted_sum(&nodes, &values))
}

pub fn node_error(index: usize, node: &SphereNode, e: Error) -> Error {
    Error::QuadratureNode {
        index,
        point: node.point,
        source: Box::new(e),
    }
}

/// Polynomial extrapolation in `1/R` to `1/R = 0` (Neville's scheme).
///
/// For a geometric radius schedule this is Richardson extrapolation with
/// error orders `R^-1, R^-2, ...`, one order per extra radius. At least three
/// radii are required.
pub fn richardson(radii: &[f64], values: &[f64]) -> Result<f64> {
    const MIN: usize = 3;
    if radii.len() < MIN || values.len() != radii.len() {
        return Err(Error::ScheduleTooShort {
            len: radii.len().min(values.len()),
            min: MIN,
        });
    }
    let h: Vec<f64> = radii.iter().map(|r| 1.0 / r).collect();
    let mut p = values.to_vec();
    let n = p.len();
    for level in 1..n {
        for i in 0..n - level {
            let (hi, hj) = (h[i], h[i + level]);
            p[i] = (hj * p[i] - hi * p[i + 1]) / (hj - hi);
        }
    }
    Ok(p[0])
}

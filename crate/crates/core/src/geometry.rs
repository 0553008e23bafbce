//! Gibbons-Hawking metric and its curvature in chart coordinates
//! `(x1, x2, x3, t)`.
//!
//! Index 3 is the fibre coordinate `t`. Every metric handled here is
//! invariant along `t`, so derivatives along index 3 vanish identically and
//! jets only carry the three base derivatives.
//!
//! Curvature convention: `R(X, Y) Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z
//! - nabla_[X,Y] Z` with components `R(d_mu, d_nu) d_sigma = R^rho_{sigma mu nu} d_rho`,
//! lowered as `R_{rho sigma mu nu} = g_{rho alpha} R^alpha_{sigma mu nu}` and
//! `Ric_{sigma nu} = R^rho_{sigma rho nu}`. With this convention the round
//! sphere has `R_{abab} > 0` and positive Ricci curvature.

use crate::config::InstantonConfig;
use crate::connection::{total_connection, GaugeChart};
use crate::error::{Error, Result};
use crate::jet::{Jet1, Jet2};
use crate::linalg::{self, Mat4};
use crate::potential::eval_v;

/// Metric components as jets in the base coordinates.
pub type MetricJet = [[Jet2; 4]; 4];
pub type Christoffel = [[[Jet1; 4]; 4]; 4];
pub type Tensor3 = [[[f64; 4]; 4]; 4];
pub type Tensor4 = [[[[f64; 4]; 4]; 4]; 4];

/// A base point, fibre coordinate and gauge assignment.
#[derive(Clone, Debug, PartialEq)]
pub struct ChartPoint {
    pub x: [f64; 3],
    pub t: f64,
    pub gauge: GaugeChart,
}

impl ChartPoint {
    pub fn new(x: [f64; 3], t: f64, gauge: GaugeChart) -> Self {
        ChartPoint { x, t, gauge }
    }

    /// Point with the automatic chart choice and `t = 0`.
    pub fn automatic(config: &InstantonConfig, x: [f64; 3]) -> Self {
        ChartPoint {
            x,
            t: 0.0,
            gauge: GaugeChart::automatic(config, x),
        }
    }
}

/// `V` and the spatial part `A` of `eta = dt + A` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhFields {
    pub v: Jet2,
    pub a: [Jet2; 3],
}

impl GhFields {
    pub fn at(config: &InstantonConfig, p: &ChartPoint) -> Result<Self> {
        let eta = total_connection(config, &p.gauge, p.x, p.t)?;
        let v = eval_v(config, p.x)?;
        Ok(GhFields { v, a: eta.spatial })
    }

    pub fn a_values(&self) -> [f64; 3] {
        [self.a[0].value, self.a[1].value, self.a[2].value]
    }

    /// `g = V dx^2 + eta^2 / V`.
    pub fn metric(&self) -> Result<MetricJet> {
        let inv_v = self.v.checked_recip()?;
        let mut g = [[Jet2::ZERO; 4]; 4];
        for i in 0..3 {
            for j in i..3 {
                let mut gij = self.a[i] * self.a[j] * inv_v;
                if i == j {
                    gij += self.v;
                }
                g[i][j] = gij;
                g[j][i] = gij;
            }
            g[i][3] = self.a[i] * inv_v;
            g[3][i] = g[i][3];
        }
        g[3][3] = inv_v;
        Ok(g)
    }

    /// Closed-form inverse: `g^ij = delta/V`, `g^it = -A_i/V`,
    /// `g^tt = V + |A|^2/V`.
    pub fn inverse_metric(&self) -> Mat4 {
        inverse_metric_closed_form(self.v.value, self.a_values())
    }
}

pub fn inverse_metric_closed_form(v: f64, a: [f64; 3]) -> Mat4 {
    let mut inv = [[0.0; 4]; 4];
    for i in 0..3 {
        inv[i][i] = 1.0 / v;
        inv[i][3] = -a[i] / v;
        inv[3][i] = inv[i][3];
    }
    inv[3][3] = v + (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]) / v;
    inv
}

pub fn metric_values(g: &MetricJet) -> Mat4 {
    core::array::from_fn(|i| core::array::from_fn(|j| g[i][j].value))
}

/// `d_k g_ij` as a first-order jet; zero along the fibre.
#[inline]
fn dg(g: &MetricJet, k: usize, i: usize, j: usize) -> Jet1 {
    if k == 3 {
        Jet1::ZERO
    } else {
        g[i][j].partial(k)
    }
}

/// Inverse metric with its first derivatives, from
/// `d g^-1 = -g^-1 (d g) g^-1`.
pub fn inverse_metric_jet(g: &MetricJet, g_inv: &Mat4) -> [[Jet1; 4]; 4] {
    let mut out = [[Jet1::ZERO; 4]; 4];
    for a in 0..4 {
        for b in a..4 {
            let mut grad = [0.0; 3];
            for (m, slot) in grad.iter_mut().enumerate() {
                let mut s = 0.0;
                for c in 0..4 {
                    for d in 0..4 {
                        s += g_inv[a][c] * g[c][d].gradient[m] * g_inv[d][b];
                    }
                }
                *slot = -s;
            }
            let j = Jet1 {
                value: g_inv[a][b],
                gradient: grad,
            };
            out[a][b] = j;
            out[b][a] = j;
        }
    }
    out
}

/// Levi-Civita symbols `Gamma^k_ij = 1/2 g^kl (d_i g_jl + d_j g_il - d_l g_ij)`
/// together with their first derivatives.
///
/// The derivatives come from running the formula on jet-valued inputs: the
/// second derivatives of `g` are already in its jets.
pub fn christoffel(g: &MetricJet, g_inv: &Mat4) -> Christoffel {
    let inv = inverse_metric_jet(g, g_inv);
    let mut first = [[[Jet1::ZERO; 4]; 4]; 4];
    for l in 0..4 {
        for i in 0..4 {
            for j in i..4 {
                let v = (dg(g, i, j, l) + dg(g, j, i, l) - dg(g, l, i, j)).scale(0.5);
                first[l][i][j] = v;
                first[l][j][i] = v;
            }
        }
    }
    let mut gamma = [[[Jet1::ZERO; 4]; 4]; 4];
    for k in 0..4 {
        for i in 0..4 {
            for j in i..4 {
                let v: Jet1 = (0..4).map(|l| inv[k][l] * first[l][i][j]).sum();
                gamma[k][i][j] = v;
                gamma[k][j][i] = v;
            }
        }
    }
    gamma
}

pub fn christoffel_values(gamma: &Christoffel) -> Tensor3 {
    core::array::from_fn(|k| {
        core::array::from_fn(|i| core::array::from_fn(|j| gamma[k][i][j].value))
    })
}

/// `R^rho_{sigma mu nu} = d_mu Gamma^rho_{nu sigma} - d_nu Gamma^rho_{mu sigma}
/// + Gamma^rho_{mu l} Gamma^l_{nu sigma} - Gamma^rho_{nu l} Gamma^l_{mu sigma}`.
pub fn riemann_mixed(gamma: &Christoffel) -> Tensor4 {
    let mut r = [[[[0.0; 4]; 4]; 4]; 4];
    for rho in 0..4 {
        for sigma in 0..4 {
            for mu in 0..4 {
                for nu in (mu + 1)..4 {
                    let mut v = gamma[rho][nu][sigma].d(mu) - gamma[rho][mu][sigma].d(nu);
                    for l in 0..4 {
                        v += gamma[rho][mu][l].value * gamma[l][nu][sigma].value
                            - gamma[rho][nu][l].value * gamma[l][mu][sigma].value;
                    }
                    r[rho][sigma][mu][nu] = v;
                    r[rho][sigma][nu][mu] = -v;
                }
            }
        }
    }
    r
}

/// Metric, connection and curvature at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct CotensorFrame {
    pub g: Mat4,
    pub g_inv: Mat4,
    pub christoffel: Tensor3,
    /// Fully covariant `R_{abcd}`.
    pub riemann: Tensor4,
    pub ricci: Mat4,
}

impl CotensorFrame {
    /// Curvature of a metric given with jets and its inverse values.
    pub fn from_metric(g: &MetricJet, g_inv: Mat4) -> Self {
        let gamma = christoffel(g, &g_inv);
        let mixed = riemann_mixed(&gamma);
        let gv = metric_values(g);
        let mut lowered = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        lowered[a][b][c][d] = (0..4).map(|e| gv[a][e] * mixed[e][b][c][d]).sum();
                    }
                }
            }
        }
        let ricci = core::array::from_fn(|s| {
            core::array::from_fn(|n| (0..4).map(|r| mixed[r][s][r][n]).sum())
        });
        CotensorFrame {
            g: gv,
            g_inv,
            christoffel: christoffel_values(&gamma),
            riemann: lowered,
            ricci,
        }
    }

    /// As [`CotensorFrame::from_metric`], inverting `g` by pivoted elimination.
    pub fn from_metric_generic(g: &MetricJet) -> Result<Self> {
        let inv = linalg::invert(&metric_values(g)).ok_or(Error::SingularMetric)?;
        Ok(Self::from_metric(g, inv))
    }

    pub fn determinant(&self) -> f64 {
        linalg::determinant(&self.g)
    }

    /// `|Riem|^2 = R_{abcd} R^{abcd}`.
    pub fn riem_norm_squared(&self) -> f64 {
        let r = &self.riemann;
        let h = &self.g_inv;
        // raise one index at a time
        let mut up = *r;
        for slot in 0..4 {
            let src = up;
            for a in 0..4 {
                for b in 0..4 {
                    for c in 0..4 {
                        for d in 0..4 {
                            let idx = [a, b, c, d];
                            up[a][b][c][d] = (0..4)
                                .map(|e| {
                                    let mut j = idx;
                                    j[slot] = e;
                                    h[idx[slot]][e] * src[j[0]][j[1]][j[2]][j[3]]
                                })
                                .sum();
                        }
                    }
                }
            }
        }
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        s += r[a][b][c][d] * up[a][b][c][d];
                    }
                }
            }
        }
        s
    }

    pub fn riem_norm(&self) -> f64 {
        libm::sqrt(self.riem_norm_squared().max(0.0))
    }

    /// `|Ric|` measured with the metric.
    pub fn ricci_norm(&self) -> f64 {
        let h = &self.g_inv;
        let mut s = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        s += h[a][c] * h[b][d] * self.ricci[a][b] * self.ricci[c][d];
                    }
                }
            }
        }
        libm::sqrt(s.max(0.0))
    }

    pub fn ricci_max_abs(&self) -> f64 {
        linalg::max_abs(&self.ricci)
    }

    pub fn scalar_curvature(&self) -> f64 {
        (0..4)
            .flat_map(|a| (0..4).map(move |b| (a, b)))
            .map(|(a, b)| self.g_inv[a][b] * self.ricci[a][b])
            .sum()
    }

    /// Largest violation of the algebraic symmetries of `R_{abcd}`
    /// (both antisymmetries, pair symmetry, first Bianchi), relative to
    /// the largest component. Zero for a flat frame.
    pub fn riemann_symmetry_residual(&self) -> f64 {
        let r = &self.riemann;
        let scale = r
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let v = r[a][b][c][d];
                        worst = worst
                            .max((v + r[b][a][c][d]).abs())
                            .max((v + r[a][b][d][c]).abs())
                            .max((v - r[c][d][a][b]).abs())
                            .max((v + r[a][c][d][b] + r[a][d][b][c]).abs());
                    }
                }
            }
        }
        worst / scale
    }

    /// `K(X, Y) = R(X, Y, X, Y) / (|X|^2 |Y|^2 - g(X, Y)^2)`.
    pub fn sectional_curvature(&self, x: [f64; 4], y: [f64; 4]) -> f64 {
        let g = |u: &[f64; 4], v: &[f64; 4]| -> f64 {
            (0..4)
                .flat_map(|i| (0..4).map(move |j| (i, j)))
                .map(|(i, j)| self.g[i][j] * u[i] * v[j])
                .sum()
        };
        let mut num = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        num += self.riemann[a][b][c][d] * x[a] * y[b] * x[c] * y[d];
                    }
                }
            }
        }
        num / (g(&x, &x) * g(&y, &y) - g(&x, &y) * g(&x, &y))
    }

    /// `Delta_g f = g^{mu nu} (d_mu d_nu f - Gamma^l_{mu nu} d_l f)` for a
    /// fibre-invariant `f`.
    pub fn laplace_beltrami(&self, f: &Jet2) -> f64 {
        let d1 = |i: usize| if i < 3 { f.gradient[i] } else { 0.0 };
        let d2 = |i: usize, j: usize| if i < 3 && j < 3 { f.hessian(i, j) } else { 0.0 };
        let mut s = 0.0;
        for mu in 0..4 {
            for nu in 0..4 {
                let mut hess = d2(mu, nu);
                for l in 0..3 {
                    hess -= self.christoffel[l][mu][nu] * d1(l);
                }
                s += self.g_inv[mu][nu] * hess;
            }
        }
        s
    }
}

/// Gibbons-Hawking metric with jets at `p`.
pub fn metric(config: &InstantonConfig, p: &ChartPoint) -> Result<MetricJet> {
    GhFields::at(config, p)?.metric()
}

/// Full curvature frame of the Gibbons-Hawking metric at `p`.
pub fn frame(config: &InstantonConfig, p: &ChartPoint) -> Result<CotensorFrame> {
    let fields = GhFields::at(config, p)?;
    let g = fields.metric()?;
    Ok(CotensorFrame::from_metric(&g, fields.inverse_metric()))
}

pub fn riemann(config: &InstantonConfig, p: &ChartPoint) -> Result<Tensor4> {
    Ok(frame(config, p)?.riemann)
}

pub fn ricci(config: &InstantonConfig, p: &ChartPoint) -> Result<Mat4> {
    Ok(frame(config, p)?.ricci)
}

pub fn riem_norm(config: &InstantonConfig, p: &ChartPoint) -> Result<f64> {
    Ok(frame(config, p)?.riem_norm())
}

/// Laplace-Beltrami operator of the Gibbons-Hawking metric applied to a
/// fibre-invariant function given as a jet-valued map of the base
/// coordinates.
pub fn laplace_beltrami<F>(config: &InstantonConfig, p: &ChartPoint, f: F) -> Result<f64>
where
    F: Fn([Jet2; 3]) -> Jet2,
{
    let fr = frame(config, p)?;
    Ok(fr.laplace_beltrami(&f(Jet2::seed_point(p.x))))
}

/// `L_W g` for a vector field with constant chart components `w`:
/// `(L_W g)_ab = w^c d_c g_ab`.
pub fn lie_derivative_constant_field(g: &MetricJet, w: [f64; 4]) -> Mat4 {
    core::array::from_fn(|a| {
        core::array::from_fn(|b| (0..4).map(|c| w[c] * dg(g, c, a, b).value).sum())
    })
}

/// Max of `|nabla_k g_ij|` reconstructed from the Christoffel symbols,
/// relative to the largest `|d_k g_ij|`.
pub fn metric_compatibility_residual(g: &MetricJet, gamma: &Christoffel) -> f64 {
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for k in 0..4 {
        for i in 0..4 {
            for j in 0..4 {
                let d = dg(g, k, i, j).value;
                let mut v = d;
                for l in 0..4 {
                    v -=
                        gamma[l][k][i].value * g[l][j].value + gamma[l][k][j].value * g[i][l].value;
                }
                worst = worst.max(v.abs());
                scale = scale.max(d.abs());
            }
        }
    }
    if worst == 0.0 {
        0.0
    } else {
        worst / scale.max(f64::MIN_POSITIVE)
    }
}

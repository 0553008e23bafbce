//! Kähler triple of the Gibbons-Hawking metric and the Killing field `d/dt`.
//!
//! With `eta = dt + A` the forms are taken cyclically:
//!
//! ```text
//! omega_I = dx1 ^ eta + V dx2 ^ dx3
//! omega_J = dx2 ^ eta + V dx3 ^ dx1
//! omega_K = dx3 ^ eta + V dx1 ^ dx2
//! ```
//!
//! so that `IJ = K`. The endomorphisms are `omega(X, Y) = g(IX, Y)`, stored
//! as matrices `E[mu][nu] = I^mu_nu` acting on vector components.
//!
//! Two actions on covectors appear. The inverse-transpose action
//! `xi -> xi o I^-1` gives `I dx1 = eta / V`, `I dx2 = dx3`; the transpose
//! action `xi -> xi o I` gives `dx1 = I alpha` for `alpha = g(W, .)`. Both
//! are checked, each against its own relation.

use crate::config::InstantonConfig;
use crate::error::Result;
use crate::geometry::{ChartPoint, GhFields};
use crate::jet::Jet2;
use crate::linalg::{self, Mat4, IDENTITY};

pub type FormJet = [[Jet2; 4]; 4];

/// The three Kähler forms and their endomorphisms at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct KahlerTriple {
    pub forms: [Mat4; 3],
    pub endomorphisms: [Mat4; 3],
    pub g: Mat4,
    pub g_inv: Mat4,
}

/// Kähler forms with jets on their components.
pub fn kahler_form_jets(fields: &GhFields) -> [FormJet; 3] {
    let eta = [fields.a[0], fields.a[1], fields.a[2], Jet2::constant(1.0)];
    core::array::from_fn(|k| {
        let mut w = [[Jet2::ZERO; 4]; 4];
        for mu in 0..4 {
            if mu != k {
                w[k][mu] += eta[mu];
                w[mu][k] -= eta[mu];
            }
        }
        let (p, q) = ((k + 1) % 3, (k + 2) % 3);
        w[p][q] += fields.v;
        w[q][p] -= fields.v;
        w
    })
}

fn values(w: &FormJet) -> Mat4 {
    core::array::from_fn(|i| core::array::from_fn(|j| w[i][j].value))
}

/// `I^mu_nu = omega_{nu lambda} g^{lambda mu}`.
fn raise(omega: &Mat4, g_inv: &Mat4) -> Mat4 {
    core::array::from_fn(|mu| {
        core::array::from_fn(|nu| (0..4).map(|l| omega[nu][l] * g_inv[l][mu]).sum())
    })
}

pub fn kahler_forms(config: &InstantonConfig, p: &ChartPoint) -> Result<KahlerTriple> {
    let fields = GhFields::at(config, p)?;
    triple_from_fields(&fields)
}

fn triple_from_fields(fields: &GhFields) -> Result<KahlerTriple> {
    let g = crate::geometry::metric_values(&fields.metric()?);
    let g_inv = fields.inverse_metric();
    let jets = kahler_form_jets(fields);
    let forms = [values(&jets[0]), values(&jets[1]), values(&jets[2])];
    let endomorphisms = [
        raise(&forms[0], &g_inv),
        raise(&forms[1], &g_inv),
        raise(&forms[2], &g_inv),
    ];
    Ok(KahlerTriple {
        forms,
        endomorphisms,
        g,
        g_inv,
    })
}

/// `|d omega|` for each form, relative to the largest first derivative of
/// its components (exactly zero when those all vanish).
pub fn closedness_residual(config: &InstantonConfig, p: &ChartPoint) -> Result<[f64; 3]> {
    let fields = GhFields::at(config, p)?;
    let jets = kahler_form_jets(&fields);
    Ok(core::array::from_fn(|k| form_closedness(&jets[k])))
}

fn form_closedness(w: &FormJet) -> f64 {
    let d = |a: usize, b: usize, c: usize| if a < 3 { w[b][c].gradient[a] } else { 0.0 };
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for a in 0..4 {
        for b in (a + 1)..4 {
            for c in (b + 1)..4 {
                let terms = [d(a, b, c), d(b, c, a), d(c, a, b)];
                worst = worst.max((terms[0] + terms[1] + terms[2]).abs());
                for t in terms {
                    scale = scale.max(t.abs());
                }
            }
        }
    }
    if worst == 0.0 {
        0.0
    } else {
        worst / scale
    }
}

/// Pfaffian `omega_01 omega_23 - omega_02 omega_13 + omega_03 omega_12`;
/// `omega ^ omega = 2 Pf dx1 dx2 dx3 dt`.
pub fn pfaffian(w: &Mat4) -> f64 {
    w[0][1] * w[2][3] - w[0][2] * w[1][3] + w[0][3] * w[1][2]
}

/// Residuals of the quaternionic algebra at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuaternionReport {
    /// `I^2 + 1`, `J^2 + 1`, `K^2 + 1`.
    pub squares: [f64; 3],
    /// `IJ - K`, `JK - I`, `KI - J`.
    pub products: [f64; 3],
    /// `omega(X, Y) - g(IX, Y)` for each form.
    pub compatibility: [f64; 3],
    /// `g(I., I.) - g` for each structure.
    pub isometry: [f64; 3],
    /// `I dx1 - eta/V` and `I dx2 - dx3` (inverse-transpose action).
    pub pullback: [f64; 2],
    /// `Pf(omega) / sqrt(det g) - 1` for each form, i.e. `omega ^ omega = 2 vol`.
    pub wedge: [f64; 3],
}

impl QuaternionReport {
    pub fn max_residual(&self) -> f64 {
        self.squares
            .iter()
            .chain(&self.products)
            .chain(&self.compatibility)
            .chain(&self.isometry)
            .chain(&self.pullback)
            .chain(&self.wedge)
            .fold(0.0, |m, v| m.max(*v))
    }
}

fn rel(diff: f64, scale: f64) -> f64 {
    if diff == 0.0 {
        0.0
    } else {
        diff / scale.max(1.0)
    }
}

pub fn quaternion_check(config: &InstantonConfig, p: &ChartPoint) -> Result<QuaternionReport> {
    let fields = GhFields::at(config, p)?;
    let t = triple_from_fields(&fields)?;
    let e = &t.endomorphisms;
    let minus_id: Mat4 = core::array::from_fn(|i| core::array::from_fn(|j| -IDENTITY[i][j]));
    let scale = |a: &Mat4, b: &Mat4| linalg::max_abs(a) * linalg::max_abs(b);

    let squares = core::array::from_fn(|k| {
        rel(
            linalg::max_abs_diff(&linalg::mul(&e[k], &e[k]), &minus_id),
            scale(&e[k], &e[k]),
        )
    });
    let products = core::array::from_fn(|k| {
        let (a, b, c) = (&e[k], &e[(k + 1) % 3], &e[(k + 2) % 3]);
        rel(linalg::max_abs_diff(&linalg::mul(a, b), c), scale(a, b))
    });
    let compatibility = core::array::from_fn(|k| {
        // (E^T g)_{nu rho} = omega_{nu rho}
        let etg = linalg::mul(&linalg::transpose(&e[k]), &t.g);
        rel(
            linalg::max_abs_diff(&etg, &t.forms[k]),
            linalg::max_abs(&e[k]) * linalg::max_abs(&t.g),
        )
    });
    let isometry = core::array::from_fn(|k| {
        let pulled = linalg::mul(&linalg::mul(&linalg::transpose(&e[k]), &t.g), &e[k]);
        rel(
            linalg::max_abs_diff(&pulled, &t.g),
            linalg::max_abs(&e[k]) * linalg::max_abs(&e[k]) * linalg::max_abs(&t.g),
        )
    });

    // inverse-transpose action on covectors: (I xi)_nu = -xi_mu E[mu][nu]
    let act = |xi: [f64; 4]| -> [f64; 4] {
        core::array::from_fn(|nu| -(0..4).map(|mu| xi[mu] * e[0][mu][nu]).sum::<f64>())
    };
    let v = fields.v.value;
    let a = fields.a_values();
    let alpha = [a[0] / v, a[1] / v, a[2] / v, 1.0 / v];
    let i_dx1 = act([1.0, 0.0, 0.0, 0.0]);
    let i_dx2 = act([0.0, 1.0, 0.0, 0.0]);
    let cov_diff =
        |x: [f64; 4], y: [f64; 4]| (0..4).map(|i| (x[i] - y[i]).abs()).fold(0.0, f64::max);
    let e0 = linalg::max_abs(&e[0]);
    let pullback = [
        rel(cov_diff(i_dx1, alpha), e0),
        rel(cov_diff(i_dx2, [0.0, 0.0, 1.0, 0.0]), e0),
    ];

    let volume = libm::sqrt(linalg::determinant(&t.g));
    let wedge = core::array::from_fn(|k| (pfaffian(&t.forms[k]) / volume - 1.0).abs());

    Ok(QuaternionReport {
        squares,
        products,
        compatibility,
        isometry,
        pullback,
        wedge,
    })
}

/// `W = d/dt`, `alpha = g(W, .)` and `|W|^-2` at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KillingData {
    pub w: [f64; 4],
    pub alpha: [f64; 4],
    pub v_from_w: f64,
}

pub fn killing_data(config: &InstantonConfig, p: &ChartPoint) -> Result<KillingData> {
    let fields = GhFields::at(config, p)?;
    let g = crate::geometry::metric_values(&fields.metric()?);
    Ok(KillingData {
        w: [0.0, 0.0, 0.0, 1.0],
        alpha: g[3],
        v_from_w: 1.0 / g[3][3],
    })
}

/// Moment-map and Killing identities of `W = d/dt`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KillingReport {
    /// `iota_W omega_{I,J,K} + dx_{1,2,3}` (max component).
    pub moment: [f64; 3],
    /// `L_W g` assembled from jets (t-derivatives of the components).
    pub lie_derivative: f64,
    /// `dx_k - (alpha o I_k)` (transpose action).
    pub alpha_relation: [f64; 3],
    /// `alpha - eta/V` (max component).
    pub alpha_vs_eta: f64,
    /// `| |W|^-2 / V - 1 |`.
    pub v_from_w: f64,
    /// Largest deviation of the Gram matrix of `(dx1, dx2, dx3, alpha)` under
    /// `g^-1` from `diag(1/V)`, relative to `1/V`.
    pub coframe: f64,
}

impl KillingReport {
    pub fn max_residual(&self) -> f64 {
        self.moment
            .iter()
            .chain(&self.alpha_relation)
            .chain([
                &self.lie_derivative,
                &self.alpha_vs_eta,
                &self.v_from_w,
                &self.coframe,
            ])
            .fold(0.0, |m, v| m.max(*v))
    }
}

pub fn killing_moment_check(config: &InstantonConfig, p: &ChartPoint) -> Result<KillingReport> {
    let fields = GhFields::at(config, p)?;
    let gj = fields.metric()?;
    let t = triple_from_fields(&fields)?;
    let v = fields.v.value;
    let a = fields.a_values();

    let moment = core::array::from_fn(|k| {
        (0..4)
            .map(|nu| {
                let dx = if nu == k { 1.0 } else { 0.0 };
                (t.forms[k][3][nu] + dx).abs()
            })
            .fold(0.0, f64::max)
    });

    let lie = crate::geometry::lie_derivative_constant_field(&gj, [0.0, 0.0, 0.0, 1.0]);
    let lie_derivative = linalg::max_abs(&lie);

    let alpha = t.g[3];
    let alpha_relation = core::array::from_fn(|k| {
        let e = &t.endomorphisms[k];
        let pulled: [f64; 4] =
            core::array::from_fn(|nu| (0..4).map(|mu| alpha[mu] * e[mu][nu]).sum());
        let diff = (0..4)
            .map(|nu| {
                let dx = if nu == k { 1.0 } else { 0.0 };
                (pulled[nu] - dx).abs()
            })
            .fold(0.0, f64::max);
        rel(
            diff,
            linalg::max_abs(e) * alpha.iter().fold(0.0_f64, |m, x| m.max(x.abs())),
        )
    });

    let eta_over_v = [a[0] / v, a[1] / v, a[2] / v, 1.0 / v];
    let alpha_vs_eta = (0..4)
        .map(|i| (alpha[i] - eta_over_v[i]).abs())
        .fold(0.0, f64::max);
    let v_from_w = (1.0 / (t.g[3][3] * v) - 1.0).abs();

    let coframe_vectors = [
        [1.0, 0.0, 0.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [0.0, 0.0, 1.0, 0.0],
        alpha,
    ];
    let mut coframe: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            let gram: f64 = (0..4)
                .flat_map(|m| (0..4).map(move |n| (m, n)))
                .map(|(m, n)| t.g_inv[m][n] * coframe_vectors[i][m] * coframe_vectors[j][n])
                .sum();
            let expected = if i == j { 1.0 / v } else { 0.0 };
            coframe = coframe.max((gram - expected).abs() * v);
        }
    }

    Ok(KillingReport {
        moment,
        lie_derivative,
        alpha_relation,
        alpha_vs_eta,
        v_from_w,
        coframe,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connection::{Chart, GaugeChart};
    use alloc::vec;

    #[test]
    fn flat_forms() {
        let c = InstantonConfig::flat(1.0).unwrap();
        let p = ChartPoint::automatic(&c, [0.3, 0.1, -0.2]);
        let t = kahler_forms(&c, &p).unwrap();
        let mut expected = [[0.0; 4]; 4];
        expected[0][3] = 1.0;
        expected[3][0] = -1.0;
        expected[1][2] = 1.0;
        expected[2][1] = -1.0;
        assert_eq!(t.forms[0], expected);
        assert_eq!(closedness_residual(&c, &p).unwrap(), [0.0; 3]);
        let q = quaternion_check(&c, &p).unwrap();
        assert!(q.max_residual() <= 1e-14, "{q:?}");
    }

    #[test]
    fn taub_nut_identities() {
        let c = InstantonConfig::taub_nut(0.5).unwrap();
        for &x in &[[1.0, 0.2, 0.3], [-0.4, 2.0, -1.0], [5.0, 5.0, 5.0]] {
            let p = ChartPoint::automatic(&c, x);
            let closed = closedness_residual(&c, &p).unwrap();
            assert!(closed.iter().all(|r| *r <= 1e-12), "{closed:?}");
            let q = quaternion_check(&c, &p).unwrap();
            assert!(q.max_residual() <= 1e-12, "{q:?}");
            let k = killing_moment_check(&c, &p).unwrap();
            assert!(k.max_residual() <= 1e-12, "{k:?}");
            assert_eq!(k.moment, [0.0; 3]);
        }
    }

    #[test]
    fn killing_norm_matches_potential() {
        let c = InstantonConfig::new(0.3, vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]).unwrap();
        let p = ChartPoint::new([0.5, 0.5, 1.0], 0.0, GaugeChart::uniform(2, Chart::North));
        let data = killing_data(&c, &p).unwrap();
        let v = crate::potential::eval_v(&c, p.x).unwrap().value;
        assert!((data.v_from_w / v - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn perturbed_connection_breaks_closedness() {
        let c = InstantonConfig::taub_nut(0.5)
            .unwrap()
            .with_perturbed_connection(0, 1.25)
            .unwrap();
        let p = ChartPoint::automatic(&c, [1.0, 0.5, 0.5]);
        let closed = closedness_residual(&c, &p).unwrap();
        assert!(closed.iter().all(|r| *r >= 1e-3), "{closed:?}");
    }
}

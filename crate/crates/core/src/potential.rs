//! The harmonic potential `V = 1 + sum 2m / |x - a_i|` and its Hodge dual
//! `Omega = *dV` on Euclidean `R^3` (orientation `dx1 ^ dx2 ^ dx3`).

use crate::config::InstantonConfig;
use crate::error::Result;
use crate::jet::Jet2;

/// A two-form on `R^3` stored by its three independent components.
///
/// Via the Euclidean Hodge star it is the vector `(c23, c31, c12)`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct TwoForm3 {
    pub c23: f64,
    pub c31: f64,
    pub c12: f64,
}

impl TwoForm3 {
    pub fn from_vector(v: [f64; 3]) -> Self {
        TwoForm3 {
            c23: v[0],
            c31: v[1],
            c12: v[2],
        }
    }

    pub fn as_vector(&self) -> [f64; 3] {
        [self.c23, self.c31, self.c12]
    }

    /// Pairing with a unit normal: the surface density of the form on a
    /// surface with that oriented normal.
    pub fn flux_density(&self, normal: [f64; 3]) -> f64 {
        self.c23 * normal[0] + self.c31 * normal[1] + self.c12 * normal[2]
    }

    pub fn max_abs(&self) -> f64 {
        self.c23.abs().max(self.c31.abs()).max(self.c12.abs())
    }
}

impl core::ops::Sub for TwoForm3 {
    type Output = TwoForm3;
    fn sub(self, rhs: TwoForm3) -> TwoForm3 {
        TwoForm3 {
            c23: self.c23 - rhs.c23,
            c31: self.c31 - rhs.c31,
            c12: self.c12 - rhs.c12,
        }
    }
}

/// `2 mass / |x - center|` as a jet. The caller guarantees `x != center`.
pub fn single_center_potential(center: [f64; 3], mass: f64, x: [f64; 3]) -> Result<Jet2> {
    let p = Jet2::seed_point(x);
    let rel = [p[0] - center[0], p[1] - center[1], p[2] - center[2]];
    Ok(Jet2::inv_norm(&rel)?.scale(2.0 * mass))
}

/// `V` with exact gradient and Hessian at `x`.
pub fn eval_v(config: &InstantonConfig, x: [f64; 3]) -> Result<Jet2> {
    config.check_admissible(x)?;
    let mut v = Jet2::constant(1.0);
    for (i, a) in config.centers().iter().enumerate() {
        v += single_center_potential(*a, config.center_mass(i), x)?;
    }
    Ok(v)
}

/// Flat Laplacian of `V` at `x`; zero up to rounding away from the centers.
pub fn harmonic_residual_v(config: &InstantonConfig, x: [f64; 3]) -> Result<f64> {
    Ok(eval_v(config, x)?.laplacian())
}

/// Scale against which [`harmonic_residual_v`] is judged: `1 + |Hess V|`
/// (Frobenius).
pub fn hessian_scale(v: &Jet2) -> f64 {
    let h = v.hessian_matrix();
    let sq: f64 = h.iter().flatten().map(|x| x * x).sum();
    1.0 + libm::sqrt(sq)
}

/// `Omega = *dV`: `Omega_23 = d1 V`, `Omega_31 = d2 V`, `Omega_12 = d3 V`.
pub fn eval_omega(config: &InstantonConfig, x: [f64; 3]) -> Result<TwoForm3> {
    Ok(TwoForm3::from_vector(eval_v(config, x)?.gradient))
}

/// `d Omega` (a three-form, one component) from the jet of `V`; equals
/// the flat Laplacian of `V`.
pub fn omega_closedness(config: &InstantonConfig, x: [f64; 3]) -> Result<f64> {
    let v = eval_v(config, x)?;
    let d_omega = (0..3).map(|i| v.partial(i).gradient[i]).sum::<f64>();
    Ok(d_omega)
}

//! Second-order jets of scalar fields on the base `R^3`.
//!
//! A [`Jet2`] carries the value, gradient and Hessian of a scalar function of
//! the three base coordinates at one point. Arithmetic on jets is the truncated
//! Taylor algebra, so any composite built from [`Jet2::seed`] coordinates
//! carries exact first and second derivatives (up to floating-point rounding).
//!
//! Every field handled by this crate is invariant along the circle fibre, so
//! the fibre coordinate never appears here: its derivative is zero by
//! construction.
//!
//! Operations that can leave their domain (division, square roots, real
//! powers) are only exposed as `checked_*` methods returning [`JetError`];
//! there is no `Div` operator, so a NaN can never appear silently.

use core::iter::Sum;
use core::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use thiserror::Error;

/// One of the three base coordinate axes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X1,
    X2,
    X3,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X1, Axis::X2, Axis::X3];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Axis::X1 => 0,
            Axis::X2 => 1,
            Axis::X3 => 2,
        }
    }
}

/// Domain violations of jet arithmetic.
#[derive(Clone, Copy, Debug, PartialEq, Error)]
pub enum JetError {
    #[error("division by a jet with zero value")]
    ZeroDenominator,
    #[error("square root of non-positive value {0:e}")]
    NonPositiveSqrt(f64),
    #[error("real power of non-positive base {0:e}")]
    NonPositiveBase(f64),
    #[error("norm of the zero vector has no reciprocal")]
    ZeroNorm,
}

// Packed upper triangle: (0,0) (0,1) (0,2) (1,1) (1,2) (2,2).
#[inline]
const fn packed(i: usize, j: usize) -> usize {
    let (a, b) = if i <= j { (i, j) } else { (j, i) };
    match (a, b) {
        (0, 0) => 0,
        (0, 1) => 1,
        (0, 2) => 2,
        (1, 1) => 3,
        (1, 2) => 4,
        _ => 5,
    }
}

const PAIRS: [(usize, usize); 6] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)];

/// Value, gradient and (symmetric) Hessian of a scalar field.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: [f64; 3],
    hessian: [f64; 6],
}

impl Jet2 {
    pub const ZERO: Jet2 = Jet2 {
        value: 0.0,
        gradient: [0.0; 3],
        hessian: [0.0; 6],
    };

    #[inline]
    pub const fn constant(value: f64) -> Self {
        Jet2 {
            value,
            gradient: [0.0; 3],
            hessian: [0.0; 6],
        }
    }

    /// Builds a jet from explicit parts. The Hessian is symmetrized.
    pub fn new(value: f64, gradient: [f64; 3], hessian: [[f64; 3]; 3]) -> Self {
        let mut packed_h = [0.0; 6];
        for (slot, &(i, j)) in packed_h.iter_mut().zip(PAIRS.iter()) {
            *slot = if i == j {
                hessian[i][i]
            } else {
                0.5 * (hessian[i][j] + hessian[j][i])
            };
        }
        Jet2 {
            value,
            gradient,
            hessian: packed_h,
        }
    }

    /// The coordinate function `x_axis` evaluated at `point`.
    #[inline]
    pub fn seed(axis: Axis, point: [f64; 3]) -> Self {
        let i = axis.index();
        let mut gradient = [0.0; 3];
        gradient[i] = 1.0;
        Jet2 {
            value: point[i],
            gradient,
            hessian: [0.0; 6],
        }
    }

    /// All three coordinate jets at `point`.
    #[inline]
    pub fn seed_point(point: [f64; 3]) -> [Jet2; 3] {
        [
            Jet2::seed(Axis::X1, point),
            Jet2::seed(Axis::X2, point),
            Jet2::seed(Axis::X3, point),
        ]
    }

    #[inline]
    pub fn hessian(&self, i: usize, j: usize) -> f64 {
        self.hessian[packed(i, j)]
    }

    pub fn hessian_matrix(&self) -> [[f64; 3]; 3] {
        core::array::from_fn(|i| core::array::from_fn(|j| self.hessian(i, j)))
    }

    /// Trace of the Hessian, i.e. the flat Laplacian.
    #[inline]
    pub fn laplacian(&self) -> f64 {
        self.hessian[0] + self.hessian[3] + self.hessian[5]
    }

    /// The partial derivative `d_i f` as a first-order jet.
    #[inline]
    pub fn partial(&self, i: usize) -> Jet1 {
        Jet1 {
            value: self.gradient[i],
            gradient: [self.hessian(i, 0), self.hessian(i, 1), self.hessian(i, 2)],
        }
    }

    #[inline]
    pub fn to_jet1(&self) -> Jet1 {
        Jet1 {
            value: self.value,
            gradient: self.gradient,
        }
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        let mut out = self;
        out.value *= s;
        out.gradient.iter_mut().for_each(|g| *g *= s);
        out.hessian.iter_mut().for_each(|h| *h *= s);
        out
    }

    /// `f(self)` for a scalar function with `f0 = f(u)`, `f1 = f'(u)`,
    /// `f2 = f''(u)` at `u = self.value`.
    #[inline]
    pub fn compose(self, f0: f64, f1: f64, f2: f64) -> Self {
        let g = self.gradient;
        let mut hessian = [0.0; 6];
        for (slot, &(i, j)) in hessian.iter_mut().zip(PAIRS.iter()) {
            *slot = f2 * g[i] * g[j] + f1 * self.hessian[packed(i, j)];
        }
        Jet2 {
            value: f0,
            gradient: [f1 * g[0], f1 * g[1], f1 * g[2]],
            hessian,
        }
    }

    pub fn checked_recip(self) -> Result<Self, JetError> {
        let u = self.value;
        if u == 0.0 || !u.is_finite() {
            return Err(JetError::ZeroDenominator);
        }
        let r = 1.0 / u;
        Ok(self.compose(r, -r * r, 2.0 * r * r * r))
    }

    pub fn checked_div(self, rhs: Jet2) -> Result<Self, JetError> {
        Ok(self * rhs.checked_recip()?)
    }

    pub fn checked_sqrt(self) -> Result<Self, JetError> {
        let u = self.value;
        if u.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater) {
            return Err(JetError::NonPositiveSqrt(u));
        }
        let s = libm::sqrt(u);
        Ok(self.compose(s, 0.5 / s, -0.25 / (s * u)))
    }

    /// Integer power; negative exponents require a nonzero value.
    pub fn powi(self, n: i32) -> Result<Self, JetError> {
        let u = self.value;
        if n < 0 && u == 0.0 {
            return Err(JetError::ZeroDenominator);
        }
        let nf = n as f64;
        let p = |e: i32| if e == 0 { 1.0 } else { libm::pow(u, e as f64) };
        Ok(self.compose(p(n), nf * p(n - 1), nf * (nf - 1.0) * p(n - 2)))
    }

    /// Real power of a strictly positive jet.
    pub fn checked_powf(self, exponent: f64) -> Result<Self, JetError> {
        let u = self.value;
        if u.partial_cmp(&0.0) != Some(core::cmp::Ordering::Greater) {
            return Err(JetError::NonPositiveBase(u));
        }
        let f0 = libm::pow(u, exponent);
        Ok(self.compose(
            f0,
            exponent * f0 / u,
            exponent * (exponent - 1.0) * f0 / (u * u),
        ))
    }

    /// Euclidean norm `|v|` of a vector of jets (nonzero vectors only).
    pub fn norm(v: &[Jet2; 3]) -> Result<Self, JetError> {
        let sq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if sq.value == 0.0 {
            return Err(JetError::ZeroNorm);
        }
        sq.checked_sqrt()
    }

    /// `1 / |v|` for a vector of jets.
    pub fn inv_norm(v: &[Jet2; 3]) -> Result<Self, JetError> {
        let sq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        if sq.value == 0.0 {
            return Err(JetError::ZeroNorm);
        }
        sq.checked_powf(-0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.gradient.iter().all(|g| g.is_finite())
            && self.hessian.iter().all(|h| h.is_finite())
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out += rhs;
        out
    }
}

impl AddAssign for Jet2 {
    #[inline]
    fn add_assign(&mut self, rhs: Jet2) {
        self.value += rhs.value;
        for i in 0..3 {
            self.gradient[i] += rhs.gradient[i];
        }
        for i in 0..6 {
            self.hessian[i] += rhs.hessian[i];
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(self, rhs: Jet2) -> Jet2 {
        let mut out = self;
        out -= rhs;
        out
    }
}

impl SubAssign for Jet2 {
    #[inline]
    fn sub_assign(&mut self, rhs: Jet2) {
        self.value -= rhs.value;
        for i in 0..3 {
            self.gradient[i] -= rhs.gradient[i];
        }
        for i in 0..6 {
            self.hessian[i] -= rhs.hessian[i];
        }
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    #[inline]
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, rhs: Jet2) -> Jet2 {
        let (a, b) = (&self, &rhs);
        let mut hessian = [0.0; 6];
        for (slot, &(i, j)) in hessian.iter_mut().zip(PAIRS.iter()) {
            let p = packed(i, j);
            // grouped so that a * b == b * a bit for bit
            *slot = (a.value * b.hessian[p] + b.value * a.hessian[p])
                + (a.gradient[i] * b.gradient[j] + a.gradient[j] * b.gradient[i]);
        }
        Jet2 {
            value: a.value * b.value,
            gradient: core::array::from_fn(|i| a.value * b.gradient[i] + b.value * a.gradient[i]),
            hessian,
        }
    }
}

impl MulAssign for Jet2 {
    #[inline]
    fn mul_assign(&mut self, rhs: Jet2) {
        *self = *self * rhs;
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(mut self, rhs: f64) -> Jet2 {
        self.value += rhs;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(mut self, rhs: f64) -> Jet2 {
        self.value -= rhs;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, rhs: f64) -> Jet2 {
        self.scale(rhs)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    #[inline]
    fn add(self, rhs: Jet2) -> Jet2 {
        rhs + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    #[inline]
    fn mul(self, rhs: Jet2) -> Jet2 {
        rhs.scale(self)
    }
}

impl Sum for Jet2 {
    fn sum<I: Iterator<Item = Jet2>>(iter: I) -> Jet2 {
        iter.fold(Jet2::ZERO, |acc, j| acc + j)
    }
}

/// Value and gradient of a scalar field: the jet order left after one
/// derivative has been spent (Christoffel symbols, inverse-metric entries).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet1 {
    pub value: f64,
    pub gradient: [f64; 3],
}

impl Jet1 {
    pub const ZERO: Jet1 = Jet1 {
        value: 0.0,
        gradient: [0.0; 3],
    };

    #[inline]
    pub const fn constant(value: f64) -> Self {
        Jet1 {
            value,
            gradient: [0.0; 3],
        }
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Jet1 {
            value: self.value * s,
            gradient: [
                self.gradient[0] * s,
                self.gradient[1] * s,
                self.gradient[2] * s,
            ],
        }
    }

    /// Derivative along base axis `i`; zero for the fibre index 3.
    #[inline]
    pub fn d(&self, index: usize) -> f64 {
        if index < 3 {
            self.gradient[index]
        } else {
            0.0
        }
    }
}

impl Add for Jet1 {
    type Output = Jet1;
    #[inline]
    fn add(self, rhs: Jet1) -> Jet1 {
        Jet1 {
            value: self.value + rhs.value,
            gradient: core::array::from_fn(|i| self.gradient[i] + rhs.gradient[i]),
        }
    }
}

impl AddAssign for Jet1 {
    #[inline]
    fn add_assign(&mut self, rhs: Jet1) {
        *self = *self + rhs;
    }
}

impl Sub for Jet1 {
    type Output = Jet1;
    #[inline]
    fn sub(self, rhs: Jet1) -> Jet1 {
        Jet1 {
            value: self.value - rhs.value,
            gradient: core::array::from_fn(|i| self.gradient[i] - rhs.gradient[i]),
        }
    }
}

impl Neg for Jet1 {
    type Output = Jet1;
    #[inline]
    fn neg(self) -> Jet1 {
        self.scale(-1.0)
    }
}

impl Mul for Jet1 {
    type Output = Jet1;
    #[inline]
    fn mul(self, rhs: Jet1) -> Jet1 {
        Jet1 {
            value: self.value * rhs.value,
            gradient: core::array::from_fn(|i| {
                self.value * rhs.gradient[i] + rhs.value * self.gradient[i]
            }),
        }
    }
}

impl Sum for Jet1 {
    fn sum<I: Iterator<Item = Jet1>>(iter: I) -> Jet1 {
        iter.fold(Jet1::ZERO, |acc, j| acc + j)
    }
}

//! Central finite differences: an independent oracle for the jet kernel.
//!
//! Nothing in the main pipeline calls into this module; it exists so tests
//! (and the acceptance suite) can check jets against a route that shares no
//! code with them.

/// Gradient and Hessian of `f` at `x` by fourth-order central differences.
///
/// Both stencils use step `h`. Truncation error grows like `(h / r)^4` with
/// `r` the distance to the nearest singularity of `f`, and rounding in the
/// second differences like `eps (r / h)^2`, so `h` of about `2e-3 r` balances
/// the two near `1e-10`. `f` must be evaluable on the cube of half-width `2h`
/// around `x`.
pub fn fd_oracle<F>(f: F, x: [f64; 3], h: f64) -> ([f64; 3], [[f64; 3]; 3])
where
    F: Fn([f64; 3]) -> f64,
{
    let shifted = |d: [f64; 3]| f([x[0] + d[0], x[1] + d[1], x[2] + d[2]]);
    let axis = |i: usize, s: f64| {
        let mut d = [0.0; 3];
        d[i] = s;
        d
    };

    let mut gradient = [0.0; 3];
    for (i, g) in gradient.iter_mut().enumerate() {
        let (p1, m1) = (shifted(axis(i, h)), shifted(axis(i, -h)));
        let (p2, m2) = (shifted(axis(i, 2.0 * h)), shifted(axis(i, -2.0 * h)));
        *g = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
    }

    let k = h;
    let f0 = f(x);
    let mut hessian = [[0.0; 3]; 3];
    for i in 0..3 {
        let (p1, m1) = (shifted(axis(i, k)), shifted(axis(i, -k)));
        let (p2, m2) = (shifted(axis(i, 2.0 * k)), shifted(axis(i, -2.0 * k)));
        hessian[i][i] = (16.0 * (p1 + m1) - (p2 + m2) - 30.0 * f0) / (12.0 * k * k);
        for j in (i + 1)..3 {
            let mixed = |s: f64, t: f64| {
                let mut d = [0.0; 3];
                d[i] = s * k;
                d[j] = t * k;
                shifted(d)
            };
            // fourth-order mixed stencil: Richardson combination of steps k and 2k
            let narrow = (mixed(1.0, 1.0) - mixed(1.0, -1.0) - mixed(-1.0, 1.0)
                + mixed(-1.0, -1.0))
                / (4.0 * k * k);
            let wide = (mixed(2.0, 2.0) - mixed(2.0, -2.0) - mixed(-2.0, 2.0) + mixed(-2.0, -2.0))
                / (16.0 * k * k);
            let v = (4.0 * narrow - wide) / 3.0;
            hessian[i][j] = v;
            hessian[j][i] = v;
        }
    }
    (gradient, hessian)
}

/// Normwise relative error `|a - b| / |b|` with a unit floor on `|b|`
/// small enough to be irrelevant for nonzero references.
pub fn relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>();
    let norm = b.iter().map(|y| y * y).sum::<f64>();
    libm::sqrt(diff) / libm::sqrt(norm).max(f64::MIN_POSITIVE)
}

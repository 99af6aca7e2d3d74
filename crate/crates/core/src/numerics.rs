//! Small numerical kernels shared by the geometry modules: Hermite
//! interpolation, bracketed root finding, compensated summation and the
//! fourth-order finite-difference stencils.

/// Quintic Hermite interpolation on one interval of width `step`.
///
/// `left` and `right` hold `(y, y', y'')` at the interval ends; `s` is the
/// normalised position in `[0, 1]`.
pub fn quintic_hermite(left: [f64; 3], right: [f64; 3], step: f64, s: f64) -> f64 {
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h3 = 0.5 * (s3 - 2.0 * s4 + s5);
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    let hh = step * step;
    left[0] * h0
        + step * left[1] * h1
        + hh * left[2] * h2
        + hh * right[2] * h3
        + step * right[1] * h4
        + right[0] * h5
}

/// Bisection on a sign-changing bracket `[a, b]`, stopping once the bracket
/// is narrower than `rel_tol * max(|a|, |b|, tiny)`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, rel_tol: f64) -> Option<f64> {
    let mut fa = f(a);
    let fb = f(b);
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..400 {
        let mid = 0.5 * (a + b);
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if (b - a).abs() <= rel_tol * a.abs().max(b.abs()).max(f64::MIN_POSITIVE) {
            break;
        }
    }
    Some(0.5 * (a + b))
}

/// Neumaier compensated summation. Summing the same sequence in the same
/// order always yields the same bits.
#[derive(Debug, Default, Clone, Copy)]
pub struct CompensatedSum {
    sum: f64,
    correction: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.correction += (self.sum - t) + value;
        } else {
            self.correction += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.correction
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = CompensatedSum::default();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// Fourth-order central first-derivative weights at offsets -2..=2 (divide by step).
pub const D1: [f64; 5] = [1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0];
/// Fourth-order central second-derivative weights at offsets -2..=2 (divide by step²).
pub const D2: [f64; 5] = [
    -1.0 / 12.0,
    16.0 / 12.0,
    -30.0 / 12.0,
    16.0 / 12.0,
    -1.0 / 12.0,
];
/// Half-width of the stencils above.
pub const STENCIL_RADIUS: usize = 2;

/// Fourth-order central first derivative of a scalar function.
pub fn central_d1<F: Fn(f64) -> f64>(f: F, x: f64, step: f64) -> f64 {
    (0..5)
        .map(|k| D1[k] * f(x + (k as f64 - 2.0) * step))
        .sum::<f64>()
        / step
}

/// Fourth-order central second derivative of a scalar function.
pub fn central_d2<F: Fn(f64) -> f64>(f: F, x: f64, step: f64) -> f64 {
    (0..5)
        .map(|k| D2[k] * f(x + (k as f64 - 2.0) * step))
        .sum::<f64>()
        / (step * step)
}

/// Lagrange weights for the `order` nodes `start, start+1, ...` evaluated at
/// fractional lattice coordinate `x`.
pub fn lagrange_weights(start: isize, order: usize, x: f64) -> Vec<f64> {
    (0..order)
        .map(|k| {
            let xk = (start + k as isize) as f64;
            (0..order)
                .filter(|&m| m != k)
                .map(|m| {
                    let xm = (start + m as isize) as f64;
                    (x - xm) / (xk - xm)
                })
                .product()
        })
        .collect()
}

use std::ops::{Add, Mul};

use num_complex::Complex64;

use crate::numerics::{D1, D2, STENCIL_RADIUS};

/// Values that can be combined linearly by the difference stencils.
pub trait Linear: Copy + Add<Output = Self> + Mul<f64, Output = Self> {}
impl<T: Copy + Add<Output = T> + Mul<f64, Output = T>> Linear for T {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Axis {
    U,
    V,
}

fn offset(n: usize, i: usize, j: usize, axis: Axis, k: usize) -> Option<usize> {
    let (a, b) = match axis {
        Axis::U => ((i + k).checked_sub(STENCIL_RADIUS)?, j),
        Axis::V => (i, (j + k).checked_sub(STENCIL_RADIUS)?),
    };
    (a < n && b < n).then_some(a * n + b)
}

fn combine<T: Linear>(weights: &[f64; 5], mut sample: impl FnMut(usize) -> Option<T>) -> Option<T> {
    let mut acc = sample(0)? * weights[0];
    for (k, &w) in weights.iter().enumerate().skip(1) {
        let value = sample(k)?;
        if w != 0.0 {
            acc = acc + value * w;
        }
    }
    Some(acc)
}

/// Fourth-order first derivative of a fully populated lattice.
pub(crate) fn d1<T: Linear>(
    values: &[T],
    n: usize,
    step: f64,
    i: usize,
    j: usize,
    axis: Axis,
) -> Option<T> {
    combine(&D1, |k| offset(n, i, j, axis, k).map(|idx| values[idx])).map(|v| v * (1.0 / step))
}

/// Fourth-order second derivative of a fully populated lattice.
pub(crate) fn d2<T: Linear>(
    values: &[T],
    n: usize,
    step: f64,
    i: usize,
    j: usize,
    axis: Axis,
) -> Option<T> {
    combine(&D2, |k| offset(n, i, j, axis, k).map(|idx| values[idx]))
        .map(|v| v * (1.0 / (step * step)))
}

/// Fourth-order mixed derivative `∂u∂v` (tensor product of first-derivative stencils).
pub(crate) fn d_uv<T: Linear>(values: &[T], n: usize, step: f64, i: usize, j: usize) -> Option<T> {
    let column = |k: usize| -> Option<T> {
        let ii = (i + k).checked_sub(STENCIL_RADIUS)?;
        if ii >= n {
            return None;
        }
        d1(values, n, 1.0, ii, j, Axis::V)
    };
    combine(&D1, column).map(|v| v * (1.0 / (step * step)))
}

/// A field sampled on a chart lattice; `None` marks nodes where it is undefined
/// (boundary band or failed evaluation).
#[derive(Debug, Clone)]
pub struct LatticeField<T> {
    pub n: usize,
    pub spacing: f64,
    pub rho: f64,
    pub values: Vec<Option<T>>,
}

impl<T: Linear> LatticeField<T> {
    /// Sample `f(z)` on the lattice of a chart with `n` nodes per side over `[-rho, rho]^2`.
    pub fn sample(n: usize, rho: f64, f: impl Fn(Complex64) -> T) -> Self {
        let spacing = 2.0 * rho / (n - 1) as f64;
        let mut field = Self {
            n,
            spacing,
            rho,
            values: Vec::with_capacity(n * n),
        };
        for i in 0..n {
            for j in 0..n {
                let z = field.z(i, j);
                field.values.push(Some(f(z)));
            }
        }
        field
    }

    pub fn z(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(
            -self.rho + i as f64 * self.spacing,
            -self.rho + j as f64 * self.spacing,
        )
    }

    pub fn get(&self, i: usize, j: usize) -> Option<T> {
        self.values[i * self.n + j]
    }

    fn stencil(&self, weights: &[f64; 5], i: usize, j: usize, axis: Axis) -> Option<T> {
        combine(weights, |k| {
            offset(self.n, i, j, axis, k).and_then(|idx| self.values[idx])
        })
    }

    /// `(∂u f, ∂v f)` at a node, `None` within the boundary band or next to an undefined value.
    pub fn gradient(&self, i: usize, j: usize) -> Option<(T, T)> {
        let s = 1.0 / self.spacing;
        Some((
            self.stencil(&D1, i, j, Axis::U)? * s,
            self.stencil(&D1, i, j, Axis::V)? * s,
        ))
    }

    /// `∂u∂u f + ∂v∂v f`.
    pub fn laplacian(&self, i: usize, j: usize) -> Option<T> {
        let s = 1.0 / (self.spacing * self.spacing);
        Some((self.stencil(&D2, i, j, Axis::U)? + self.stencil(&D2, i, j, Axis::V)?) * s)
    }

    /// `(∂uu f, ∂uv f, ∂vv f)`.
    pub fn hessian(&self, i: usize, j: usize) -> Option<(T, T, T)> {
        let s = 1.0 / (self.spacing * self.spacing);
        let uu = self.stencil(&D2, i, j, Axis::U)? * s;
        let vv = self.stencil(&D2, i, j, Axis::V)? * s;
        let column = |k: usize| -> Option<T> {
            let ii = (i + k).checked_sub(STENCIL_RADIUS)?;
            if ii >= self.n {
                return None;
            }
            self.stencil(&D1, ii, j, Axis::V)
        };
        let uv = combine(&D1, column)? * s;
        Some((uu, uv, vv))
    }
}

/// `(∂f/∂z, ∂f/∂z̄)` at node `(i, j)` from `∂/∂z = (∂u - i ∂v)/2`, `∂/∂z̄ = (∂u + i ∂v)/2`.
pub fn complex_derivative(
    field: &LatticeField<Complex64>,
    i: usize,
    j: usize,
) -> Option<(Complex64, Complex64)> {
    let (du, dv) = field.gradient(i, j)?;
    let idv = Complex64::i() * dv;
    Some(((du - idv) * 0.5, (du + idv) * 0.5))
}

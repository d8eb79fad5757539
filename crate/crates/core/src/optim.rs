//! Finite-difference gradients and Armijo backtracking shared by the
//! nilsoliton search and the orbit ascent.

/// Central-difference gradient of `f` at the origin of `R^dim`.
pub(crate) fn central_gradient<F: Fn(&[f64]) -> f64>(f: F, dim: usize, step: f64) -> Vec<f64> {
    let mut theta = vec![0.0; dim];
    let mut grad = vec![0.0; dim];
    for i in 0..dim {
        theta[i] = step;
        let up = f(&theta);
        theta[i] = -step;
        let down = f(&theta);
        theta[i] = 0.0;
        grad[i] = (up - down) / (2.0 * step);
    }
    grad
}

pub(crate) const ARMIJO_SLOPE: f64 = 1e-4;
pub(crate) const MAX_HALVINGS: usize = 50;

/// Outcome of one backtracking line search along `sign * grad`.
pub(crate) struct LineStep {
    pub alpha: f64,
    pub value: f64,
}

/// Searches `theta = sign * alpha * grad` for the Armijo condition,
/// `value(theta) >= current + slope * alpha * |grad|^2` when ascending
/// (`sign = +1`) or the mirrored condition when descending. Non-finite trial
/// values count as failures.
pub(crate) fn backtrack<F: FnMut(&[f64]) -> Option<f64>>(
    mut value: F,
    grad: &[f64],
    current: f64,
    alpha0: f64,
    sign: f64,
) -> Option<LineStep> {
    let g2: f64 = grad.iter().map(|g| g * g).sum();
    if !(g2 > 0.0) {
        return None;
    }
    let mut alpha = alpha0;
    for _ in 0..=MAX_HALVINGS {
        let theta: Vec<f64> = grad.iter().map(|g| sign * alpha * g).collect();
        if let Some(v) = value(&theta) {
            if v.is_finite() && sign * (v - current) >= ARMIJO_SLOPE * alpha * g2 {
                return Some(LineStep { alpha, value: v });
            }
        }
        alpha *= 0.5;
    }
    None
}

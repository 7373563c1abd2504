//! Trapezoidal rules on a uniform grid.
//!
//! Every integral in the crate (state, costate, cost, admissibility) goes
//! through these three functions so that the discrete endpoint constraint is
//! exactly the quantity the descent projection conserves.

/// Trapezoidal integral of uniformly spaced samples.
pub fn trapezoid(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let interior: f64 = values[1..n - 1].iter().sum();
            step * (0.5 * (values[0] + values[n - 1]) + interior)
        }
    }
}

/// Running trapezoidal integral; the first entry is always zero.
pub fn cumulative_trapezoid(values: &[f64], step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    if values.is_empty() {
        return out;
    }
    out.push(0.0);
    for pair in values.windows(2) {
        acc += 0.5 * step * (pair[0] + pair[1]);
        out.push(acc);
    }
    out
}

/// Weight of node `k` in the trapezoidal rule over `len` samples.
pub fn trapezoid_weight(k: usize, len: usize, step: f64) -> f64 {
    if k == 0 || k + 1 == len {
        0.5 * step
    } else {
        step
    }
}

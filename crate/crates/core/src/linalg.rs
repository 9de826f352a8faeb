//! Small dense-vector kernels shared by the solvers.
//!
//! Reductions run left to right so results are bit-reproducible.

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm_sq(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn norm1(a: &[f64]) -> f64 {
    a.iter().map(|x| x.abs()).sum()
}

/// `‖a‖²_w = Σ w_i a_i²`.
pub fn weighted_norm_sq(a: &[f64], w: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), w.len());
    a.iter().zip(w).map(|(x, wi)| wi * x * x).sum()
}

/// `‖a − b‖²_w`.
pub fn weighted_dist_sq(a: &[f64], b: &[f64], w: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .zip(w)
        .map(|((x, y), wi)| {
            let d = x - y;
            wi * d * d
        })
        .sum()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `out = α·a + β·b`.
pub fn lincomb_into(out: &mut [f64], alpha: f64, a: &[f64], beta: f64, b: &[f64]) {
    for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
        *o = alpha * x + beta * y;
    }
}

pub fn all_finite(a: &[f64]) -> bool {
    a.iter().all(|x| x.is_finite())
}

/// Numerically stable `log(1 + exp(t))`.
pub fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

/// Logistic sigmoid `1 / (1 + exp(−t))`, evaluated without overflow.
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn softplus_matches_naive_in_safe_range() {
        for &t in &[-30.0, -3.0, -0.5, 0.0, 0.7, 4.0, 30.0] {
            let naive = (1.0 + f64::exp(t)).ln();
            assert!((softplus(t) - naive).abs() <= 1e-14 * naive.max(1.0));
        }
    }

    #[test]
    fn softplus_large_margin_no_overflow() {
        // log(1 + e^800) = 800 + log(1 + e^-800) = 800 in double precision
        assert_eq!(softplus(800.0), 800.0);
        assert!(softplus(-800.0) >= 0.0 && softplus(-800.0) < 1e-300);
    }

    #[test]
    fn sigmoid_is_symmetric() {
        for &t in &[-40.0, -1.0, 0.0, 2.5, 40.0] {
            assert!((sigmoid(t) + sigmoid(-t) - 1.0).abs() < 1e-15);
        }
    }
}

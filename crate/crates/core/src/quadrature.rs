//! Gauss-Legendre rules and the turning-point integrator.
//!
//! Integrals whose integrand vanishes like a square root at one or both
//! endpoints are mapped through `q = c + w sin(t)`, `t` in `[-pi/2, pi/2]`.
//! The Jacobian `w cos(t)` cancels the square-root behavior so the
//! transformed integrand is smooth and Gauss-Legendre converges spectrally.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

pub const MIN_ORDER: usize = 16;
pub const MAX_ORDER: usize = 4096;

/// Values below this multiple of the integral magnitude are treated as
/// roundoff when comparing successive orders.
const ROUNDOFF_FLOOR: f64 = 1e-13;
const SPLIT_ORDER: usize = 512;
const MAX_SPLIT_DEPTH: u32 = 60;
const MAX_PIECES: usize = 4096;

/// An `n`-point Gauss-Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes by Newton iteration on `P_n` from the Tricomi initial guess.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be positive");
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
            let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            if d.is_finite() {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = x;
            weights[i] = w;
            nodes[n - 1 - i] = -x;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p, d)
}

/// A converged integral with the last order-doubling difference.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub order: usize,
}

/// `int_a^b f(q) dq` through the sine substitution, doubling the order from
/// [`MIN_ORDER`] until successive values differ by less than `tol`.
pub fn integrate_turning<F: FnMut(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    turning_capped(f, a, b, tol, MAX_ORDER)
}

/// Like [`integrate_turning`], but a piece that fails at a moderate order is
/// bisected and each half integrated in turn with half the tolerance.
pub fn integrate_adaptive<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    if let Ok(est) = turning_capped(&mut f, a, b, tol, SPLIT_ORDER) {
        return Ok(est);
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let (c, w) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    let scale = GaussLegendre::new(64)
        .integrate(-FRAC_PI_2, FRAC_PI_2, |t| {
            let g = f((c + w * t.sin()).clamp(lo, hi)) * w * t.cos();
            if g.is_finite() {
                g
            } else {
                0.0
            }
        })
        .abs();
    let floor = ROUNDOFF_FLOOR * scale;
    let mut value = 0.0;
    let mut error = 0.0;
    let mut order = 0;
    let mut pieces = 0;
    let mut stack = vec![(lo, 0.5 * (lo + hi), 0.5 * tol, 1u32), (0.5 * (lo + hi), hi, 0.5 * tol, 1u32)];
    while let Some((x, y, t, depth)) = stack.pop() {
        pieces += 1;
        match turning_capped(&mut f, x, y, t.max(floor), SPLIT_ORDER) {
            Ok(est) => {
                value += est.value;
                error += est.error;
                order = order.max(est.order);
            }
            Err(Error::QuadratureFailure { .. }) if depth < MAX_SPLIT_DEPTH && pieces < MAX_PIECES => {
                let m = 0.5 * (x + y);
                stack.push((m, y, 0.5 * t, depth + 1));
                stack.push((x, m, 0.5 * t, depth + 1));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(Estimate {
        value: sign * value,
        error,
        order,
    })
}

fn turning_capped<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, tol: f64, max_order: usize) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            order: 0,
        });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let c = 0.5 * (lo + hi);
    let w = 0.5 * (hi - lo);
    let mut transformed = |t: f64| {
        let q = (c + w * t.sin()).clamp(lo, hi);
        let g = f(q) * w * t.cos();
        if g.is_finite() {
            g
        } else {
            0.0
        }
    };

    let mut order = MIN_ORDER;
    let mut prev = GaussLegendre::new(order).integrate(-FRAC_PI_2, FRAC_PI_2, &mut transformed);
    let mut diff = f64::INFINITY;
    while order < max_order {
        order *= 2;
        let value = GaussLegendre::new(order).integrate(-FRAC_PI_2, FRAC_PI_2, &mut transformed);
        diff = (value - prev).abs();
        prev = value;
        if diff <= tol.max(ROUNDOFF_FLOOR * value.abs()) {
            return Ok(Estimate {
                value: sign * value,
                error: diff,
                order,
            });
        }
    }
    Err(Error::QuadratureFailure {
        achieved: diff,
        order,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two_and_nodes_are_roots() {
        for n in [1, 2, 5, 16, 33, 256, 4096] {
            let rule = GaussLegendre::new(n);
            let s: f64 = rule.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "n = {n}: sum {s}");
            for &x in rule.nodes().iter().take(8) {
                let (p, dp) = legendre_with_derivative(n, x);
                assert!((p / dp).abs() < 1e-15, "n = {n}: P(x) / P'(x) = {}", p / dp);
            }
        }
    }

    #[test]
    fn exact_for_low_degree_polynomials() {
        let rule = GaussLegendre::new(5);
        // degree 9 is the exactness limit for 5 nodes
        let v = rule.integrate(-1.0, 2.0, |x| x.powi(9) - 3.0 * x.powi(4) + 1.0);
        let exact = (2f64.powi(10) - 1.0) / 10.0 - 3.0 * (32.0 + 1.0) / 5.0 + 3.0;
        assert!((v - exact).abs() < 1e-11);
    }

    #[test]
    fn semicircle_area() {
        let est = integrate_turning(|q| (1.0 - q * q).max(0.0).sqrt(), -1.0, 1.0, 1e-14).unwrap();
        assert!((est.value - FRAC_PI_2).abs() < 1e-14);
    }

    #[test]
    fn inverse_square_root_endpoint() {
        // int_0^1 (1/sqrt(q) - 1) ... split as sqrt((1-q)/q): value pi/2
        let est = integrate_turning(|q| ((1.0 - q) / q).sqrt(), 0.0, 1.0, 1e-12).unwrap();
        assert!((est.value - FRAC_PI_2).abs() < 1e-11, "{}", est.value);
    }

    #[test]
    fn reversed_bounds_change_sign() {
        let fwd = integrate_turning(|q| q * q, 0.0, 2.0, 1e-14).unwrap().value;
        let rev = integrate_turning(|q| q * q, 2.0, 0.0, 1e-14).unwrap().value;
        assert!((fwd - 8.0 / 3.0).abs() < 1e-13);
        assert_eq!(fwd, -rev);
    }

    #[test]
    fn failure_reports_achieved_error() {
        // discontinuous integrand defeats spectral convergence
        let r = integrate_turning(|q| if q < 0.3 { 0.0 } else { 1.0 }, 0.0, 1.0, 1e-15);
        assert!(matches!(r, Err(Error::QuadratureFailure { order: MAX_ORDER, .. })));
    }
}
